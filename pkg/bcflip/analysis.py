# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

"""Closed-form cheating probabilities for P_n, the optimal eps and the
verification suites that tie the closed forms to the simulations."""

import dataclasses
import logging
import math
import re
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from . import consts
from . import enums
from . import linalg
from . import protocol
from . import qmetrics
from . import strategies

logger = logging.getLogger(__name__)

TOL = consts.DEFAULT_TOLERANCES


class AnalysisError(Exception):
    pass


def _check(n: int, eps: float):
    if n < 1:
        raise AnalysisError(f"n must be at least 1, got {n}")
    if not 0 <= eps <= 1:
        raise AnalysisError(f"eps must lie in [0, 1], got {eps}")


def closed_A(n: int, eps: float) -> float:
    _check(n, eps)
    return strategies.closed_alice(n, eps)


def closed_B(n: int, eps: float) -> float:
    _check(n, eps)
    return strategies.closed_bob(n, eps)


CSV_HEADER = [
    "n",
    "epsilon",
    "A_closed",
    "B_closed",
    "A_sim",
    "B_sim",
    "max_cheat",
    "A_abs_err",
    "B_abs_err",
]


@dataclasses.dataclass(frozen=True)
class BiasRow:
    n: int
    eps: float
    a_closed: float
    b_closed: float
    a_sim: Optional[float] = None
    b_sim: Optional[float] = None

    @property
    def max_cheat(self) -> float:
        return max(self.a_closed, self.b_closed)

    @property
    def bias(self) -> float:
        return self.max_cheat - 0.5

    @property
    def a_abs_err(self) -> Optional[float]:
        return None if self.a_sim is None else abs(self.a_sim - self.a_closed)

    @property
    def b_abs_err(self) -> Optional[float]:
        return None if self.b_sim is None else abs(self.b_sim - self.b_closed)

    def csv_fields(self) -> List[Any]:
        return [
            self.n,
            self.eps,
            self.a_closed,
            self.b_closed,
            self.a_sim,
            self.b_sim,
            self.max_cheat,
            self.a_abs_err,
            self.b_abs_err,
        ]

    def as_dict(self) -> Dict[str, Any]:
        out = dict(zip(CSV_HEADER, self.csv_fields()))
        out["bias"] = self.bias
        return out


def bias_row(
    n: int,
    eps: float,
    simulate: bool = False,
    max_amplitudes: int = consts.DEFAULT_MAX_AMPLITUDES,
    max_rounds: int = consts.DEFAULT_MAX_ROUNDS,
) -> BiasRow:
    row = BiasRow(n=n, eps=eps, a_closed=closed_A(n, eps), b_closed=closed_B(n, eps))
    if simulate:
        if not 0 < eps < 1:
            raise AnalysisError(f"cannot simulate the degenerate protocol at eps={eps}")
        if n > max_rounds:
            raise AnalysisError(f"n={n} exceeds the simulation cap of {max_rounds} rounds")
        try:
            a_sim = strategies.pn_alice(n, eps, max_amplitudes=max_amplitudes, max_rounds=max_rounds)
            b_sim = strategies.pn_bob(n, eps, max_amplitudes=max_amplitudes, max_rounds=max_rounds)
        except strategies.StrategyError as e:
            raise AnalysisError(str(e)) from e
        row = dataclasses.replace(row, a_sim=a_sim.success, b_sim=b_sim.success)
    logger.info("P_%d at eps=%g: A=%.9f B=%.9f", n, eps, row.a_closed, row.b_closed)
    return row


def bias_table(ns: List[int], eps_grid: List[float], simulate: bool = False, **kwargs) -> List[BiasRow]:
    return [
        bias_row(n, eps, simulate=simulate, **kwargs)
        for n in sorted(set(ns))
        for eps in sorted(set(eps_grid))
    ]


def eps_residual(n: int, eps: float) -> float:
    """Zero at the eps that minimizes the larger cheating probability."""
    if n % 2:
        return (1 - eps) ** (n + 1) - eps / 2
    return (1 - eps) ** n - 1 / ((2 - eps) * n + 1)


def eps_trend(n: int) -> Optional[float]:
    """Leading-order estimate of the optimal eps; None where it is undefined."""
    if n % 2:
        if n < 3:
            return None
        return (math.log(n) - math.log(math.log(n))) / (n + 1)
    return math.log(2 * n - math.log(n)) / n


@dataclasses.dataclass(frozen=True)
class EpsOptimum:
    n: int
    eps0: float
    max_cheat: float
    residual: float
    a_closed: float
    b_closed: float
    trend: Optional[float]

    def as_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def optimize_eps(n: int) -> EpsOptimum:
    if n < 1:
        raise AnalysisError(f"n must be at least 1, got {n}")
    lo, hi = consts.BISECTION_LOW, consts.BISECTION_HIGH
    assert eps_residual(n, lo) > 0 > eps_residual(n, hi)
    for _ in range(consts.BISECTION_ITERATIONS):
        mid = (lo + hi) / 2
        if eps_residual(n, mid) > 0:
            lo = mid
        else:
            hi = mid
    eps0 = (lo + hi) / 2
    a, b = closed_A(n, eps0), closed_B(n, eps0)
    return EpsOptimum(
        n=n,
        eps0=eps0,
        max_cheat=max(a, b),
        residual=eps_residual(n, eps0),
        a_closed=a,
        b_closed=b,
        trend=eps_trend(n),
    )


_RANGE_RE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")


def parse_n_range(text: str) -> List[int]:
    """Parse "1..3", "4" or "1,3,5"."""
    m = _RANGE_RE.match(text)
    try:
        if m:
            ns = list(range(int(m.group(1)), int(m.group(2)) + 1))
        else:
            ns = [int(part) for part in text.split(",")]
    except ValueError as e:
        raise AnalysisError(f"bad n range {text!r}") from e
    if any(n < 1 for n in ns):
        raise AnalysisError(f"n must be at least 1 in {text!r}")
    return ns


def parse_eps_grid(text: str) -> List[float]:
    """Parse "0.5" or an inclusive sweep "start:stop:step"."""
    text = text.strip()
    if not text:
        return []
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise AnalysisError(f"bad eps grid {text!r}") from e
    if len(values) == 1:
        grid = values
    elif len(values) == 3:
        start, stop, step = values
        if step <= 0:
            raise AnalysisError(f"eps sweep step must be positive in {text!r}")
        grid = []
        i = 0
        while start + i * step <= stop + consts.SWEEP_SLACK:
            v = start + i * step
            grid.append(stop if abs(v - stop) <= consts.SWEEP_SLACK else v)
            i += 1
    else:
        raise AnalysisError(f"bad eps grid {text!r}")
    if any(not 0 <= v <= 1 for v in grid):
        raise AnalysisError(f"eps values must lie in [0, 1] in {text!r}")
    return grid


# Verification suites.


@dataclasses.dataclass(frozen=True)
class Check:
    name: str
    # Distance to the tolerance; negative means the check failed.
    margin: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.margin >= 0)

    def as_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "margin": float(self.margin), "detail": self.detail}


@dataclasses.dataclass(frozen=True)
class SuiteReport:
    suite: enums.Suite
    seed: int
    trials: int
    checks: List[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite.name.lower(),
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }


class _Worst:
    def __init__(self, name: str):
        self.name = name
        self.margin = math.inf
        self.detail = ""

    def see(self, margin: float, detail: str = ""):
        if margin < self.margin:
            self.margin = float(margin)
            self.detail = detail

    def check(self) -> Check:
        if math.isinf(self.margin):
            return Check(self.name, 0.0, "no samples")
        return Check(self.name, self.margin, self.detail)


def _lemma_checks(seed: int, trials: int) -> List[Check]:
    rng = np.random.default_rng(seed)
    sandwich = _Worst("fvg_sandwich")
    sum_bound = _Worst("fidelity_sum_bound")
    witness = _Worst("fidelity_sum_witness")
    pure_equality = _Worst("fidelity_sum_pure_equality")
    uhlmann = _Worst("uhlmann_overlap")
    helstrom = _Worst("helstrom_optimal")
    for t in range(trials):
        dim = int(rng.integers(2, 5))
        s0 = qmetrics.random_density(dim, rng)
        s1 = qmetrics.random_density(dim, rng)
        rep = qmetrics.metric_report(s0, s1)
        sandwich.see(
            min(rep.trace_norm_diff - rep.fvg_lower, rep.fvg_upper - rep.trace_norm_diff) + TOL.derived,
            f"trial {t}",
        )
        value, sigma = qmetrics.fidelity_sum_max(s0, s1)
        sum_bound.see(1 + math.sqrt(rep.fidelity) + TOL.derived - value, f"trial {t}")
        reached = qmetrics.fidelity(s0, sigma) + qmetrics.fidelity(s1, sigma)
        witness.see(TOL.simulation - abs(reached - value), f"trial {t}")

        p0 = qmetrics.random_pure_state(dim, rng).to_density()
        p1 = qmetrics.random_pure_state(dim, rng).to_density()
        value, _ = qmetrics.fidelity_sum_max(p0, p1)
        pure_equality.see(
            TOL.simulation - abs(value - 1 - math.sqrt(qmetrics.fidelity(p0, p1))), f"trial {t}"
        )

        layout = linalg.RegisterLayout.of(
            ("sys", dim, enums.Party.CHANNEL), ("env", dim, enums.Party.CHANNEL)
        )
        psi = [
            linalg.PureState(layout, qmetrics.random_pure_state(dim * dim, rng).amplitudes)
            for _ in range(2)
        ]
        _, overlap2 = qmetrics.uhlmann_align(psi[0], psi[1], ["env"])
        f = qmetrics.fidelity(psi[0].reduced(["sys"]), psi[1].reduced(["sys"]))
        uhlmann.see(TOL.derived - abs(overlap2 - f), f"trial {t}")

        # A two-outcome projective measurement on a qubit is trivial or rank one,
        # so sampling rank-one projectors covers every competitor.
        q0 = qmetrics.random_density(2, rng)
        q1 = qmetrics.random_density(2, rng)
        optimal = qmetrics.helstrom(q0, q1).probability
        for _ in range(8):
            v = qmetrics.random_pure_state(2, rng).amplitudes
            p = linalg.projector(v)
            guess = 0.5 * (np.trace(p @ q0.matrix).real + 1 - np.trace(p @ q1.matrix).real)
            helstrom.see(optimal - guess + TOL.derived, f"trial {t}")
    return [w.check() for w in (sandwich, sum_bound, witness, pure_equality, uhlmann, helstrom)]


def _grid_spec(point: consts.GridPoint) -> protocol.ProtocolSpec:
    if point.family == enums.Family.PN:
        return protocol.build_pn(point.n, point.eps)
    if point.family == enums.Family.THREE:
        return protocol.build_three_round(point.alpha)
    return protocol.build_five_round(point.alpha, point.beta)


def _explicit_attacks(point: consts.GridPoint, **kwargs) -> List[strategies.AttackReport]:
    if point.family == enums.Family.PN:
        return [
            strategies.pn_alice(point.n, point.eps, **kwargs),
            strategies.pn_bob(point.n, point.eps, **kwargs),
        ]
    if point.family == enums.Family.THREE:
        return [strategies.three_round_alice(point.alpha), strategies.three_round_bob(point.alpha)]
    return [
        strategies.five_round_alice(point.alpha, point.beta),
        strategies.five_round_bob(point.alpha, point.beta),
    ]


def _attack_checks(**kwargs) -> List[Check]:
    checks = []
    for point in consts.ATTACK_GRID:
        report = strategies.generic_attack(protocol.purify(_grid_spec(point)))
        checks.append(
            Check(
                f"generic {point.label} floor",
                report.success - consts.CHEATING_FLOOR + TOL.derived,
                f"success {report.success:.9f}",
            )
        )
        checks.append(
            Check(
                f"generic {point.label} product",
                report.success - report.closed_form + TOL.derived,
                f"product {report.closed_form:.9f}",
            )
        )
        for explicit in _explicit_attacks(point, **kwargs):
            checks.append(
                Check(
                    f"{explicit.cheater.name.lower()} {point.label}",
                    TOL.simulation - abs(explicit.gap),
                    f"success {explicit.success:.9f} closed form {explicit.closed_form:.9f}",
                )
            )
    return checks


def _schedule_checks() -> List[Check]:
    recurrence = _Worst("mu_recurrence_closed_form")
    ranges = _Worst("mu_lambda_ranges")
    for n in range(1, consts.SCHEDULE_N_MAX + 1):
        for eps in consts.SCHEDULE_EPS_GRID:
            sched = strategies.mu_lambda(n, eps)
            for i in range(1, sched.k + 1):
                recurrence.see(
                    TOL.clamp - abs(sched.mu_at(i) - sched.closed_form_mu(i)), f"n={n} eps={eps} i={i}"
                )
                ranges.see(
                    min(sched.mu_at(i), 1 - sched.mu_at(i) + TOL.clamp, sched.lambda_at(i), 1 - sched.lambda_at(i)),
                    f"n={n} eps={eps} i={i}",
                )

    total = _Worst("closed_form_sum")
    composed = _Worst("closed_form_composition")
    for n in range(1, consts.SCHEDULE_N_MAX + 1):
        for eps in consts.CLOSED_FORM_EPS_GRID:
            total.see(TOL.clamp - abs(closed_A(n, eps) + closed_B(n, eps) - 1.5), f"n={n} eps={eps}")
            if n >= 2:
                composed.see(
                    TOL.clamp - abs(closed_B(n, eps) - eps - (1 - eps) * closed_A(n - 1, eps)),
                    f"n={n} eps={eps}",
                )

    optimum = _Worst("odd_optimum_three_quarters")
    for n in range(1, consts.SCHEDULE_N_MAX, 2):
        opt = optimize_eps(n)
        optimum.see(TOL.derived - abs(opt.a_closed - 0.75), f"n={n}")

    fidelities = _Worst("fidelity_schedule_shape")
    for n in range(1, 6):
        for eps in (0.2, 0.5, 0.8):
            sched = protocol.fidelity_schedule(protocol.purify(protocol.build_pn(n, eps)))
            problems = sched.violations()
            fidelities.see(-len(problems), f"n={n} eps={eps}: {'; '.join(problems)}" if problems else "")
    return [w.check() for w in (recurrence, ranges, total, composed, optimum, fidelities)]


def run_suite(suite: enums.Suite, seed: int = 0, trials: int = 1000, **kwargs) -> SuiteReport:
    runners: Dict[enums.Suite, Callable[[], List[Check]]] = {
        enums.Suite.LEMMAS: lambda: _lemma_checks(seed, trials),
        enums.Suite.ATTACKS: lambda: _attack_checks(**kwargs),
        enums.Suite.SCHEDULES: _schedule_checks,
    }
    checks = runners[suite]()
    for c in checks:
        logger.debug("check %s margin %g %s", c.name, c.margin, c.detail)
    report = SuiteReport(suite=suite, seed=seed, trials=trials, checks=checks)
    logger.info("suite %s: %s", suite.name.lower(), "passed" if report.passed else "FAILED")
    return report
