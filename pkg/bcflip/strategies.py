# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

"""Cheating strategies against bit-commitment based coin flipping.

Every strategy is simulated on the joint pure state of both players. The
honest player's randomness is enumerated, every check the honest player runs
is applied as a projector, and the success probability is the total weight
that survives. The cheater always aims for outcome c = target.
"""

import dataclasses
import itertools
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.optimize

from . import consts
from . import enums
from . import linalg
from . import protocol
from . import qmetrics

logger = logging.getLogger(__name__)

TOL = consts.DEFAULT_TOLERANCES


class StrategyError(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class Branch:
    # Honest-randomness branch, e.g. (b, s_2, s_4) or (b, g).
    key: Tuple[int, ...]
    weight: float
    passed: float


@dataclasses.dataclass(frozen=True)
class AttackReport:
    protocol: Dict[str, Any]
    cheater: enums.Party
    target: int
    success: float
    closed_form: float
    branches: Tuple[Branch, ...]
    guess_accuracy: Optional[float] = None
    details: Dict[str, float] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        total = sum(b.weight * b.passed for b in self.branches)
        assert abs(total - self.success) <= TOL.clamp, (total, self.success)
        assert -TOL.structural <= self.success <= 1 + TOL.structural, self.success

    @property
    def gap(self) -> float:
        return self.success - self.closed_form

    def as_dict(self) -> Dict[str, Any]:
        return {
            "protocol": self.protocol,
            "cheater": self.cheater.name.lower(),
            "target": self.target,
            "success": self.success,
            "closed_form": self.closed_form,
            "gap": self.gap,
            "guess_accuracy": self.guess_accuracy,
            "details": dict(self.details),
            "branches": [
                {"key": list(b.key), "weight": b.weight, "pass": b.passed}
                for b in self.branches
            ],
        }


def _report(
    spec: Dict[str, Any],
    cheater: enums.Party,
    branches: List[Branch],
    closed_form: float,
    target: int = 0,
    **kwargs,
) -> AttackReport:
    branches = sorted(branches, key=lambda b: b.key)
    report = AttackReport(
        protocol=spec,
        cheater=cheater,
        target=target,
        success=sum(b.weight * b.passed for b in branches),
        closed_form=closed_form,
        branches=tuple(branches),
        **kwargs,
    )
    logger.info(
        "%s attack on %s: success %.9f (closed form %.9f)",
        cheater.name.lower(),
        spec["name"],
        report.success,
        closed_form,
    )
    return report


def _describe(spec: protocol.ProtocolSpec) -> Dict[str, Any]:
    return {"name": spec.name, "params": dict(spec.params)}


# Crossing round.


def find_crossing_round(
    sched: protocol.FidelitySchedule, alpha: float
) -> Tuple[enums.Party, int]:
    """First round after which one player's commitments are at most alpha-faithful.

    Returns the player who should cheat and the round k after which the other
    player's fidelity first drops: F_cheater,k ≥ alpha and F_other,k+1 ≤ alpha.
    """
    if not 0 <= alpha <= 1:
        raise StrategyError(f"alpha must lie in [0, 1], got {alpha}")
    tol = TOL.derived
    for i in range(1, len(sched.fa)):
        a_low = sched.fa[i] <= alpha + tol
        b_low = sched.fb[i] <= alpha + tol
        if not (a_low or b_low):
            continue
        cheater = enums.Party.BOB if a_low and not b_low else enums.Party.ALICE
        k = i - 1
        mine, theirs = (sched.fa, sched.fb) if cheater == enums.Party.ALICE else (sched.fb, sched.fa)
        assert mine[k] >= alpha - tol and theirs[k + 1] <= alpha + tol
        return cheater, k
    raise StrategyError("fidelity schedule never drops to alpha")


def generic_attack(
    spec: protocol.ProtocolSpec, target: int = 0, alpha: float = consts.CROSSING_ALPHA
) -> AttackReport:
    """The universal attack: bisect the cheater's two honest states, guess the
    other bit from what has been received by round k+1, then steer towards the
    guess."""
    if not spec.purified:
        raise StrategyError(f"{spec.name} must be purified before the generic attack")
    sched = protocol.fidelity_schedule(spec)
    cheater, k = find_crossing_round(sched, alpha)
    other = cheater.other
    if spec.round_sender(k + 1) == cheater:
        raise StrategyError(f"round {k + 1} is sent by the cheater; nothing to guess from")

    psi = [protocol.party_state(spec, cheater, x) for x in (0, 1)]
    retained = protocol.retained_labels(spec, cheater, k)
    u, overlap2 = qmetrics.uhlmann_align(psi[0], psi[1], retained)
    xi = linalg.PureState.from_vector(
        psi[0].layout, psi[0].amplitudes + linalg.apply(u, psi[1]).amplitudes
    ).normalize()
    steered = {0: xi, 1: linalg.apply(u.dagger(), xi)}

    phi = [protocol.party_state(spec, other, y) for y in (0, 1)]
    received = protocol.sent_labels(spec, other, k + 1)
    guess = qmetrics.helstrom(phi[0].reduced(received), phi[1].reduced(received))

    branches = []
    for y in (0, 1):
        for g, proj in ((0, guess.p0), (1, guess.p1)):
            p_guess, _ = linalg.project(proj, phi[y])
            reveal = steered[g ^ target]
            passed = abs(psi[y ^ target].inner(reveal)) ** 2
            logger.debug("generic branch y=%d g=%d: guess %g pass %g", y, g, p_guess, passed)
            branches.append(Branch((y, g), 0.5 * p_guess, passed))

    f_cheater = sched.fa[k] if cheater == enums.Party.ALICE else sched.fb[k]
    cond = (1 + math.sqrt(f_cheater)) / 2
    product = cond * guess.probability
    return _report(
        _describe(spec),
        cheater,
        branches,
        closed_form=product,
        target=target,
        guess_accuracy=guess.probability,
        details={
            "k": k,
            "fidelity_cheater_k": f_cheater,
            "fidelity_other_k1": (sched.fb if cheater == enums.Party.ALICE else sched.fa)[k + 1],
            "uhlmann_overlap2": overlap2,
            "conditional_factor": cond,
            "guess_factor": guess.probability,
        },
    )


# Three-round protocol.


def _check_open_angle(name: str, theta: float):
    if not 0 < theta < math.pi:
        raise StrategyError(f"{name} must lie strictly between 0 and pi, got {theta}")


def _sign_superposition(r: protocol.CommitRound, bit: int) -> linalg.PureState:
    return linalg.PureState.from_vector(
        r.prep(bit, 0).layout,
        (r.prep(bit, 0).amplitudes + r.prep(bit, 1).amplitudes) / math.sqrt(2),
    )


def _acceptance(theta: float, bit: int, signs: Sequence[int], targets: Tuple[str, str]) -> linalg.LinearOp:
    """Σ_e |e⟩⟨e| ⊗ |ψ(bit, signs[e])⟩⟨ψ(bit, signs[e])|: the receiver's check of the
    revealed sign held in the first register."""
    dim = len(signs)
    mat = sum(
        np.kron(np.diag(np.eye(dim)[e]), linalg.projector(protocol.message_vector(theta, bit, s)))
        for e, s in enumerate(signs)
    )
    return linalg.LinearOp(mat, targets)


def _three_round_steering(alpha: float):
    rnd = protocol.build_three_round(alpha).commit_rounds[0]
    honest = [_sign_superposition(rnd, a) for a in (0, 1)]
    u, overlap2 = qmetrics.uhlmann_align(honest[0], honest[1], [rnd.sign])
    xi = linalg.PureState.from_vector(
        honest[0].layout, honest[0].amplitudes + linalg.apply(u, honest[1]).amplitudes
    ).normalize()
    reveals = {0: xi, 1: linalg.apply(u.dagger(), xi)}
    return rnd, honest, overlap2, reveals


def three_round_reveals(alpha: float) -> Dict[int, linalg.PureState]:
    _check_open_angle("alpha", alpha)
    return _three_round_steering(alpha)[3]


def _three_round_first_mover(alpha: float) -> Tuple[List[Branch], Dict[str, float]]:
    rnd, honest, overlap2, reveals = _three_round_steering(alpha)
    xi = reveals[0]

    branches = []
    for b, state in reveals.items():
        check = _acceptance(alpha, b, (0, 1), (rnd.sign, rnd.message))
        passed, _ = linalg.project(check, state)
        logger.debug("three-round branch b=%d passes with %g", b, passed)
        branches.append(Branch((b,), 0.5, passed))

    rho = [h.reduced([rnd.message]) for h in honest]
    sent = xi.reduced([rnd.message])
    lemma, _ = qmetrics.fidelity_sum_max(rho[0], rho[1])
    details = {
        "uhlmann_overlap2": overlap2,
        "fidelity_bound": (qmetrics.fidelity(rho[0], sent) + qmetrics.fidelity(rho[1], sent)) / 2,
        "fidelity_sum_max": lemma / 2,
    }
    return branches, details


def three_round_alice(alpha: float) -> AttackReport:
    _check_open_angle("alpha", alpha)
    branches, details = _three_round_first_mover(alpha)
    return _report(
        _describe(protocol.build_three_round(alpha)),
        enums.Party.ALICE,
        branches,
        closed_form=(3 + math.cos(alpha)) / 4,
        details=details,
    )


def three_round_bob(alpha: float) -> AttackReport:
    """Bob discriminates Alice's two commitments and announces his guess.

    This realizes (1 + sin²(α/2))/2, a strategy taken from earlier work on
    three-round protocols rather than constructed here.
    """
    _check_open_angle("alpha", alpha)
    spec = protocol.build_three_round(alpha)
    rnd = spec.commit_rounds[0]
    honest = [_sign_superposition(rnd, a) for a in (0, 1)]
    rho = [h.reduced([rnd.message]) for h in honest]
    guess = qmetrics.helstrom(rho[0], rho[1])
    branches = []
    for a, s in itertools.product((0, 1), repeat=2):
        sent = linalg.PureState(
            linalg.RegisterLayout.of((rnd.message, 3, enums.Party.CHANNEL)), rnd.state(a, s)
        )
        passed, _ = linalg.project(guess.p0 if a == 0 else guess.p1, sent)
        branches.append(Branch((a, s), 0.25, passed))
    return _report(
        _describe(spec),
        enums.Party.BOB,
        branches,
        closed_form=(1 + math.sin(alpha / 2) ** 2) / 2,
        guess_accuracy=guess.probability,
    )


# Five-round protocol.


def five_round_lambda(alpha: float, beta: float) -> float:
    sa2 = math.sin(alpha / 2) ** 2
    ca2 = math.cos(alpha / 2) ** 2
    sb2 = math.sin(beta / 2) ** 2
    return sa2 / ((1 + sb2) * ca2 + sa2)


def five_round_reveals(alpha: float, beta: float) -> Dict[Tuple[int, int], linalg.PureState]:
    """Alice's registers (e, m, q, g) as she reveals her sign, keyed by Bob's (b, s').

    Only the part where her announced bit matched b survives; the e register
    encodes the sign she sends, with level 2 meaning sign 0.
    """
    _check_open_angle("alpha", alpha)
    _check_open_angle("beta", beta)
    lam = five_round_lambda(alpha, beta)
    lay = linalg.RegisterLayout.of(("e", 3, enums.Party.ALICE), ("m", 3, enums.Party.CHANNEL))
    xi = np.zeros((3, 3))
    xi[0, 0] = math.sqrt(1 - lam)
    xi[1, 1] = xi[2, 2] = math.sqrt(lam / 2)
    xi = linalg.PureState(lay, xi)

    h_guess = linalg.LinearOp(linalg.HADAMARD, ("g",))
    x_guess = linalg.LinearOp(linalg.PAULI_X, ("g",))
    q, e = np.meshgrid(range(3), range(3), indexing="ij")
    e_map = linalg.level_swap(3, 1, 2)

    reveals = {}
    for b, s_bob in itertools.product((0, 1), repeat=2):
        state = linalg.extend(
            xi,
            linalg.Subsystem("q", 3, enums.Party.BOB),
            protocol.message_vector(beta, b, s_bob),
        )
        state = linalg.extend(state, linalg.Subsystem("g", 2, enums.Party.ALICE), [1, 0])
        # Guess a: Bob's qutrit if it shows b, else the committed value, else
        # an even superposition.
        state = linalg.apply_controlled(h_guess, state, ("q", "e"), (q == 0) & (e == 0))
        state = linalg.apply_controlled(x_guess, state, ("q", "e"), ((q == 0) & (e == 2)) | (q == 2))
        _, state = linalg.project(linalg.LinearOp(linalg.projector(np.eye(2)[b]), ("g",)), state)
        # Knowing (b, s'), collapse Bob's qutrit and the guess qubit onto |00⟩
        # separately for each value of the entangled qutrit.
        for m in range(3):
            chi = state.tensor[m, m].reshape(-1)
            if np.linalg.norm(chi) <= TOL.structural:
                continue
            rot = linalg.unitary_with_first_column(chi).conj().T
            state = linalg.apply_controlled(
                linalg.LinearOp(rot, ("q", "g")), state, ("e",), np.arange(3) == m
            )
        local = linalg.embed(linalg.HADAMARD, 3) @ (e_map if b else np.eye(3))
        reveals[b, s_bob] = linalg.apply(linalg.LinearOp(local, ("e",)), state)
    return reveals


def five_round_alice(alpha: float, beta: float) -> AttackReport:
    reveals = five_round_reveals(alpha, beta)
    spec = protocol.build_five_round(alpha, beta)
    lam = five_round_lambda(alpha, beta)
    ca, sa = math.cos(alpha / 2), math.sin(alpha / 2)
    sb2 = math.sin(beta / 2) ** 2

    branches = []
    for (b, s_bob), state in reveals.items():
        passed, _ = linalg.project(_acceptance(alpha, b, (0, 1, 0), ("e", "m")), state)
        logger.debug("five-round branch b=%d s'=%d passes with %g", b, s_bob, passed)
        branches.append(Branch((b, s_bob), 0.25, passed))

    # Everything that survives already has a = b.
    overlap = (math.sqrt((1 - lam) / 2 * (1 + sb2)) * ca + math.sqrt(lam / 2) * sa) ** 2
    agreed = sum(br.weight * br.passed for br in branches)
    if abs(agreed - overlap) > TOL.simulation:
        raise StrategyError(
            f"five-round pass probability {agreed} disagrees with the overlap expression {overlap}"
        )
    return _report(
        _describe(spec),
        enums.Party.ALICE,
        branches,
        closed_form=(1 + ca * ca * sb2) / 2,
        details={"lambda": lam, "overlap_expression": overlap, "overlap_gap": agreed - overlap},
    )


def five_round_bob(alpha: float, beta: float) -> AttackReport:
    """Bob reads Alice's first qutrit in the standard basis.

    On |a+1⟩ he knows a and plays b = a honestly. On |0⟩ the rest of the run is
    a three-round protocol at angle beta with Bob committing first.
    """
    _check_open_angle("alpha", alpha)
    _check_open_angle("beta", beta)
    spec = protocol.build_five_round(alpha, beta)
    residual, _ = _three_round_first_mover(beta)
    residual_success = sum(b.weight * b.passed for b in residual)
    return _report(
        _describe(spec),
        enums.Party.BOB,
        _measure_first_qutrit(spec.commit_rounds[0], residual_success),
        closed_form=1 - math.cos(alpha / 2) ** 2 * math.sin(beta / 2) ** 2 / 2,
        details={"residual_success": residual_success},
    )


def _measure_first_qutrit(rnd: protocol.CommitRound, residual_success: float) -> List[Branch]:
    layout = linalg.RegisterLayout.of((rnd.message, 3, enums.Party.CHANNEL))
    branches = []
    for a, s in itertools.product((0, 1), repeat=2):
        sent = linalg.PureState(layout, rnd.state(a, s))
        for outcome in (0, a + 1):
            p, _ = linalg.project(
                linalg.LinearOp(linalg.projector(np.eye(3)[outcome]), (rnd.message,)), sent
            )
            passed = residual_success if outcome == 0 else 1.0
            branches.append(Branch((a, s, outcome), 0.25 * p, passed))
    return branches


def five_round_alice_bound(alpha: float, beta: float, grid: int = 21) -> Tuple[float, Dict[str, float]]:
    """Numerical optimum of Alice's upper-bound program for the five-round protocol.

    Maximizes (F(σ̃0, σ0) + F(σ̃1, σ1))/2 over the diagonal commitment weights
    (λ0, λ1, λ2) and the split μ0 ≤ λ0, first on a dense grid and then with
    Nelder-Mead refinements from the best grid points. The refinement works on
    λ = w²/|w|² and μ0 = λ0 sin²t, which cover the region without clipping.
    """
    ca2, sa2 = math.cos(alpha / 2) ** 2, math.sin(alpha / 2) ** 2
    cb2, sb2 = math.cos(beta / 2) ** 2, math.sin(beta / 2) ** 2
    honest = [np.array([ca2, sa2, 0.0]), np.array([ca2, 0.0, sa2])]

    def program(lam, mu0):
        mixed = [
            cb2 * np.array([mu0, lam[1], 0.0]) + sb2 * lam,
            cb2 * np.array([lam[0] - mu0, 0.0, lam[2]]) + sb2 * lam,
        ]
        return sum(np.sum(np.sqrt(np.clip(m * h, 0, None))) ** 2 for m, h in zip(mixed, honest)) / 2

    def from_grid(u):
        u0, u1, u2 = u
        lam = np.array([u0, (1 - u0) * u1, (1 - u0) * (1 - u1)])
        return lam, u2 * lam[0]

    def from_smooth(x):
        w2 = x[:3] ** 2
        total = w2.sum()
        lam = w2 / total if total > 0 else np.full(3, 1 / 3)
        return lam, lam[0] * math.sin(x[3]) ** 2

    def to_smooth(lam, mu0):
        # Keep every coordinate off zero so the simplex can leave the faces.
        lam = (lam + 1e-3) / (1 + 3e-3)
        ratio = min(max(mu0 / lam[0], 1e-3), 1 - 1e-3)
        return np.append(np.sqrt(lam), math.asin(math.sqrt(ratio)))

    axis = np.linspace(0, 1, grid)
    scored = sorted(
        ((program(*from_grid(u)), from_grid(u)) for u in itertools.product(axis, repeat=3)),
        key=lambda t: -t[0],
    )
    best_value, (lam, mu0) = scored[0]
    for _, start in scored[:4]:
        x = to_smooth(*start)
        for _ in range(2):
            res = scipy.optimize.minimize(
                lambda x: -program(*from_smooth(x)), x, method="Nelder-Mead",
                options={"xatol": 1e-11, "fatol": 1e-13, "maxiter": 8000},
            )
            x = res.x
        if -res.fun > best_value:
            best_value = -res.fun
            lam, mu0 = from_smooth(res.x)
    return float(best_value), {
        "lambda0": float(lam[0]),
        "lambda1": float(lam[1]),
        "lambda2": float(lam[2]),
        "mu0": float(mu0),
    }


# Multi-round protocol P_n.


def closed_alice(n: int, eps: float) -> float:
    tail = (1 - eps) ** (n + 1)
    if n % 2 == 0:
        tail = -tail
    return (3 - 2 * eps + tail) / (2 * (2 - eps))


def closed_bob(n: int, eps: float) -> float:
    return (3 - eps + (-1) ** n * (1 - eps) ** (n + 1)) / (2 * (2 - eps))


@dataclasses.dataclass(frozen=True)
class MuLambdaSchedule:
    n: int
    eps: float
    # Both indexed from round k down to round 1.
    mu: Tuple[float, ...]
    lam: Tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.mu)

    def mu_at(self, i: int) -> float:
        return self.mu[self.k - i]

    def lambda_at(self, i: int) -> float:
        return self.lam[self.k - i]

    def closed_form_mu(self, i: int) -> float:
        decay = (1 - self.eps) ** (2 * (self.k - i))
        fixed = (3 - self.eps) / (2 * (2 - self.eps))
        return decay * self.mu[0] + fixed * (1 - decay)

    @property
    def success(self) -> float:
        return self.mu_at(1) * (1 - self.eps) + self.eps / 2


def mu_lambda(n: int, eps: float) -> MuLambdaSchedule:
    if n < 1:
        raise StrategyError(f"n must be at least 1, got {n}")
    if not 0 < eps < 1:
        raise StrategyError(f"eps must lie strictly between 0 and 1, got {eps}")
    k = (n + 1) // 2
    mu = [1.0 if n % 2 else (1 + eps) / 2]
    for _ in range(k - 1):
        mu.append((1 - eps) ** 2 * mu[-1] + eps / 2 * (3 - eps))
    lam = [(eps / 2) / (m * (1 - eps) + eps / 2) for m in mu]
    sched = MuLambdaSchedule(n=n, eps=eps, mu=tuple(mu), lam=tuple(lam))
    for i in range(1, k + 1):
        assert abs(sched.mu_at(i) - sched.closed_form_mu(i)) <= TOL.clamp
    return sched


def _e(j: int) -> str:
    return f"e{j}"


def _s(j: int) -> str:
    return f"t{j}"


def _m(j: int) -> str:
    return f"m{j}"


def _q(j: int) -> str:
    return f"q{j}"


def _mask(dims: Tuple[int, ...], predicate: Callable[[Tuple[int, ...]], bool]) -> np.ndarray:
    mask = np.zeros(dims, dtype=bool)
    for idx in np.ndindex(*dims):
        mask[idx] = predicate(idx)
    return mask


def _committed_bit(values: Tuple[int, ...], n_entangled: int) -> Optional[int]:
    # First nonzero entangled qutrit, then Bob's qutrits.
    for v in values[:n_entangled]:
        if v:
            return v - 1
    for v in values[n_entangled:]:
        if v:
            return v - 1
    return None


def _controls(upto_e: int, upto_q: int) -> Tuple[str, ...]:
    return tuple(_e(l) for l in range(1, upto_e + 1)) + tuple(_q(l) for l in range(1, upto_q + 1))


class _FirstMover:
    def __init__(self, n: int, eps: float, sched: MuLambdaSchedule, max_amplitudes: int):
        self.n = n
        self.eps = eps
        self.sched = sched
        self.theta = protocol.angle_from_eps(eps)
        self.k_first = (n + 1) // 2
        self.k_second = n // 2
        self.max_amplitudes = max_amplitudes

    def _fresh(self, state: linalg.PureState, label: str, dim: int, owner: enums.Party) -> linalg.PureState:
        return linalg.extend(state, linalg.Subsystem(label, dim, owner), np.eye(dim)[0])

    def _commit(self, state: linalg.PureState, j: int) -> linalg.PureState:
        state = self._fresh(state, _e(j), 3, enums.Party.ALICE)
        state = self._fresh(state, _s(j), 2, enums.Party.ALICE)
        state = self._fresh(state, _m(j), 3, enums.Party.CHANNEL)
        lam = self.sched.lambda_at(j)
        fresh = np.zeros((3, 2, 3))
        fresh[0, 0, 0] = math.sqrt(1 - lam)
        fresh[1, 0, 1] = fresh[2, 0, 2] = math.sqrt(lam / 2)
        preps = {None: fresh.reshape(-1)}
        for x in (0, 1):
            signed = sum(
                np.kron(np.eye(2)[s], protocol.message_vector(self.theta, x, s)) for s in (0, 1)
            ) / math.sqrt(2)
            preps[x] = np.kron(np.eye(3)[0], signed)

        controls = _controls(j - 1, j - 1)
        dims = (3,) * len(controls)
        for cls, vec in preps.items():
            mask = _mask(dims, lambda idx: _committed_bit(idx, j - 1) == cls)
            if not mask.any():
                continue
            op = linalg.LinearOp(linalg.unitary_with_first_column(vec), (_e(j), _s(j), _m(j)))
            state = linalg.apply_controlled(op, state, controls, mask)
        return state

    def _announce(self, state: linalg.PureState, b: int) -> linalg.PureState:
        state = self._fresh(state, "g", 2, enums.Party.ALICE)
        controls = _controls(self.k_first, self.k_second)
        dims = (3,) * len(controls)
        preps = {None: np.array([1, 1]) / math.sqrt(2), 0: np.eye(2)[0], 1: np.eye(2)[1]}
        for cls, vec in preps.items():
            mask = _mask(dims, lambda idx: _committed_bit(idx, self.k_first) == cls)
            op = linalg.LinearOp(linalg.unitary_with_first_column(vec), ("g",))
            state = linalg.apply_controlled(op, state, controls, mask)
        p, state = linalg.project(linalg.LinearOp(linalg.projector(np.eye(2)[b]), ("g",)), state)
        logger.debug("announcement a=b kept weight %g", p)
        return state

    def _reveal_sign(self, state: linalg.PureState, i: int, b: int) -> linalg.PureState:
        controls = _controls(i - 1, i - 1)
        mask = _mask((3,) * len(controls), lambda idx: not any(idx))
        # Move b+1 to level 1, Hadamard the {0, 1} block, then swap that qubit
        # into the sign register. Level 2 stays put.
        e_local = linalg.embed(linalg.HADAMARD, 3) @ (linalg.level_swap(3, 1, 2) if b else np.eye(3))
        swap = np.eye(6)
        swap[[1, 2]] = swap[[2, 1]]
        op = linalg.LinearOp(swap @ np.kron(e_local, np.eye(2)), (_e(i), _s(i)))
        state = linalg.apply_controlled(op, state, controls, mask)
        p, state = linalg.project(_acceptance(self.theta, b, (0, 1), (_s(i), _m(i))), state)
        logger.debug("sign of round %d accepted with weight %g", i, p)
        return state

    def _absorb_sign(
        self, state: linalg.PureState, m: int, b: int, sign: int, damping: float
    ) -> linalg.PureState:
        merged = np.zeros(3)
        merged[0] = math.sqrt(damping) * math.cos(self.theta / 2)
        merged[b + 1] = (-1) ** sign * math.sin(self.theta / 2)
        w = linalg.unitary_with_first_column(merged).conj().T
        v = linalg.unitary_with_first_column(protocol.message_vector(self.theta, b, sign)).conj().T
        controls = _controls(m, m - 1)
        mask = _mask((3,) * len(controls), lambda idx: not any(idx))
        state = linalg.apply_controlled(linalg.LinearOp(w, (_q(m),)), state, controls, mask)
        return linalg.apply_controlled(linalg.LinearOp(v, (_q(m),)), state, controls, ~mask)

    def run(self, b: int, signs: Tuple[int, ...]) -> float:
        state = linalg.PureState(linalg.RegisterLayout(max_amplitudes=self.max_amplitudes), [1])
        for j in range(1, self.k_first + 1):
            state = self._commit(state, j)
            if j <= self.k_second:
                state = linalg.extend(
                    state,
                    linalg.Subsystem(_q(j), 3, enums.Party.BOB),
                    protocol.message_vector(self.theta, b, signs[j - 1]),
                )
        if self.n % 2 == 0:
            state = self._announce(state, b)
            state = self._absorb_sign(state, self.k_second, b, signs[-1], 0.5)
        for i in range(self.k_first, 0, -1):
            state = self._reveal_sign(state, i, b)
            if i > 1:
                damping = self.sched.mu_at(i) * (1 - self.eps) + self.eps / 2
                state = self._absorb_sign(state, i - 1, b, signs[i - 2], damping)
        return state.norm2


def _first_mover_attack(
    n: int, eps: float, max_amplitudes: int, max_rounds: int
) -> Tuple[List[Branch], MuLambdaSchedule]:
    if n > max_rounds:
        raise StrategyError(f"n={n} exceeds the simulation cap of {max_rounds} rounds")
    sched = mu_lambda(n, eps)
    engine = _FirstMover(n, eps, sched, max_amplitudes)
    weight = 1 / 2 ** (engine.k_second + 1)
    branches = []
    try:
        for b in (0, 1):
            for signs in itertools.product((0, 1), repeat=engine.k_second):
                passed = engine.run(b, signs)
                logger.debug("P_%d branch b=%d signs=%s passes with %g", n, b, signs, passed)
                branches.append(Branch((b,) + signs, weight, passed))
    except linalg.LinalgError as e:
        raise StrategyError(f"cannot simulate P_{n}: {e}") from e
    return branches, sched


def pn_alice(
    n: int,
    eps: float,
    max_amplitudes: int = consts.DEFAULT_MAX_AMPLITUDES,
    max_rounds: int = consts.DEFAULT_MAX_ROUNDS,
) -> AttackReport:
    if n < 1 or not 0 < eps < 1:
        raise StrategyError(f"no protocol P_{n} at eps={eps}")
    spec = protocol.build_pn(n, eps)
    branches, sched = _first_mover_attack(n, eps, max_amplitudes, max_rounds)
    return _report(
        _describe(spec),
        enums.Party.ALICE,
        branches,
        closed_form=closed_alice(n, eps),
        details={
            "mu_1": sched.mu_at(1),
            "lambda_1": sched.lambda_at(1),
            "mu_recursion": sched.success,
        },
    )


def pn_bob(
    n: int,
    eps: float,
    max_amplitudes: int = consts.DEFAULT_MAX_AMPLITUDES,
    max_rounds: int = consts.DEFAULT_MAX_ROUNDS,
) -> AttackReport:
    """Bob measures Alice's first qutrit; on |0⟩ he is the first mover of P_{n-1}."""
    if n < 1 or not 0 < eps < 1:
        raise StrategyError(f"no protocol P_{n} at eps={eps}")
    if n == 1:
        report = three_round_bob(protocol.angle_from_eps(eps))
        return dataclasses.replace(report, protocol=_describe(protocol.build_pn(1, eps)))
    spec = protocol.build_pn(n, eps)
    residual, sched = _first_mover_attack(n - 1, eps, max_amplitudes, max_rounds)
    residual_success = sum(b.weight * b.passed for b in residual)
    return _report(
        _describe(spec),
        enums.Party.BOB,
        _measure_first_qutrit(spec.commit_rounds[0], residual_success),
        closed_form=closed_bob(n, eps),
        details={
            "residual_success": residual_success,
            "composition": eps + (1 - eps) * sched.success,
        },
    )


def attack(
    family: enums.Family,
    cheater: enums.Party,
    n: int = 1,
    eps: Optional[float] = None,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    generic: bool = False,
    max_amplitudes: int = consts.DEFAULT_MAX_AMPLITUDES,
    max_rounds: int = consts.DEFAULT_MAX_ROUNDS,
) -> AttackReport:
    if generic:
        if family == enums.Family.PN:
            spec = protocol.build_pn(n, eps)
        elif family == enums.Family.THREE:
            spec = protocol.build_three_round(alpha)
        else:
            spec = protocol.build_five_round(alpha, beta)
        return generic_attack(protocol.purify(spec))
    if family == enums.Family.PN:
        fn = pn_alice if cheater == enums.Party.ALICE else pn_bob
        return fn(n, eps, max_amplitudes=max_amplitudes, max_rounds=max_rounds)
    if family == enums.Family.THREE:
        fn = three_round_alice if cheater == enums.Party.ALICE else three_round_bob
        return fn(alpha)
    fn = five_round_alice if cheater == enums.Party.ALICE else five_round_bob
    return fn(alpha, beta)
