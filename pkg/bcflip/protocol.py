# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

"""Bit-commitment based coin flipping protocols.

Each party commits to a bit by sending qutrits in the state

    cos(θ/2)|0⟩ + (-1)^s sin(θ/2)|bit+1⟩

for a fresh private sign s per round, reveals the bit and then the signs in
the opposite order, and the receiver checks every qutrit against the revealed
values. The outcome is a xor b.
"""

import dataclasses
import itertools
import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import consts
from . import enums
from . import linalg
from . import qmetrics

logger = logging.getLogger(__name__)

TOL = consts.DEFAULT_TOLERANCES

BIT_LABELS = {enums.Party.ALICE: "a", enums.Party.BOB: "b"}


class ProtocolError(Exception):
    pass


def angle_from_eps(eps: float) -> float:
    return 2 * math.asin(math.sqrt(eps))


def eps_from_angle(theta: float) -> float:
    return math.sin(theta / 2) ** 2


def message_vector(theta: float, bit: int, sign: int) -> np.ndarray:
    v = np.zeros(3, dtype=np.complex128)
    v[0] = math.cos(theta / 2)
    v[bit + 1] = (-1) ** sign * math.sin(theta / 2)
    return v


def sign_label(round_no: int) -> str:
    return f"s{round_no}"


def message_label(round_no: int) -> str:
    return f"m{round_no}"


@dataclasses.dataclass(frozen=True)
class CommitRound:
    round_no: int
    sender: enums.Party
    angle: float

    @property
    def message(self) -> str:
        return message_label(self.round_no)

    @property
    def sign(self) -> str:
        return sign_label(self.round_no)

    def state(self, bit: int, sign: int) -> np.ndarray:
        return message_vector(self.angle, bit, sign)

    def prep(self, bit: int, sign: int, max_amplitudes: int = consts.DEFAULT_MAX_AMPLITUDES) -> linalg.PureState:
        layout = linalg.RegisterLayout.of(
            (self.sign, 2, self.sender),
            (self.message, 3, self.sender),
            max_amplitudes=max_amplitudes,
        )
        return linalg.PureState(layout, np.kron(np.eye(2)[sign], self.state(bit, sign)))

    def verification(self, bit: int, sign: int) -> linalg.LinearOp:
        return linalg.LinearOp(linalg.projector(self.state(bit, sign)), (self.message,))


@dataclasses.dataclass(frozen=True)
class RevealStep:
    sender: enums.Party
    item: enums.RevealItem
    # Commit round whose sign is revealed; None for bits.
    round_no: Optional[int] = None


@dataclasses.dataclass(frozen=True)
class PurifyRound:
    round_no: int
    sender: enums.Party
    registers: Tuple[str, ...]


@dataclasses.dataclass(frozen=True)
class ProtocolSpec:
    name: str
    params: Dict[str, float]
    commit_rounds: Tuple[CommitRound, ...]
    reveal_schedule: Tuple[RevealStep, ...]
    purified: bool = False
    purify_rounds: Tuple[PurifyRound, ...] = ()

    def __post_init__(self):
        if not self.commit_rounds:
            raise ProtocolError("a protocol needs at least one commit round")
        sender = enums.Party.ALICE
        for i, r in enumerate(self.commit_rounds, start=1):
            if r.round_no != i:
                raise ProtocolError(f"commit round {r.round_no} out of place")
            if r.sender != sender:
                raise ProtocolError(f"round {i} should be sent by {sender.name}")
            sender = sender.other
        bits = [s.sender for s in self.reveal_schedule if s.item == enums.RevealItem.BIT]
        if sorted(p.name for p in bits) != ["ALICE", "BOB"]:
            raise ProtocolError("each party must reveal its bit exactly once")
        signs = [s for s in self.reveal_schedule if s.item == enums.RevealItem.SIGN]
        if [s.round_no for s in signs] != list(range(len(self.commit_rounds), 0, -1)):
            raise ProtocolError("signs must be revealed once each, in reverse round order")
        for s in signs:
            if s.sender != self.commit_rounds[s.round_no - 1].sender:
                raise ProtocolError(f"sign of round {s.round_no} revealed by the wrong party")
        first_sign = self.reveal_schedule.index(signs[0])
        if any(s.item == enums.RevealItem.BIT for s in self.reveal_schedule[first_sign:]):
            raise ProtocolError("bits must be revealed before any sign")

    @property
    def num_commit_rounds(self) -> int:
        return len(self.commit_rounds)

    @property
    def num_rounds(self) -> int:
        return self.num_commit_rounds + len(self.purify_rounds)

    def rounds_of(self, party: enums.Party) -> Tuple[CommitRound, ...]:
        return tuple(r for r in self.commit_rounds if r.sender == party)

    def round_sender(self, round_no: int) -> enums.Party:
        if 1 <= round_no <= self.num_commit_rounds:
            return self.commit_rounds[round_no - 1].sender
        for p in self.purify_rounds:
            if p.round_no == round_no:
                return p.sender
        raise ProtocolError(f"no round {round_no} in {self.name}")

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "params": dict(self.params),
            "purified": self.purified,
            "commit_rounds": [
                {
                    "round": r.round_no,
                    "sender": r.sender.name.lower(),
                    "message": r.message,
                    "sign": r.sign,
                    "angle": r.angle,
                    "eps": eps_from_angle(r.angle),
                }
                for r in self.commit_rounds
            ],
            "reveal_schedule": [
                {
                    "sender": s.sender.name.lower(),
                    "item": s.item.name.lower(),
                    "round": s.round_no,
                }
                for s in self.reveal_schedule
            ],
            "purification_rounds": [
                {
                    "round": p.round_no,
                    "sender": p.sender.name.lower(),
                    "registers": list(p.registers),
                }
                for p in self.purify_rounds
            ],
            "outcome_rule": "a xor b",
        }


def _check_angle(name: str, theta: float):
    if not 0 <= theta <= math.pi:
        raise ProtocolError(f"{name} must lie in [0, pi], got {theta}")


def _reveal_schedule(angles_count: int) -> Tuple[RevealStep, ...]:
    if angles_count % 2:
        first, second = enums.Party.BOB, enums.Party.ALICE
    else:
        first, second = enums.Party.ALICE, enums.Party.BOB
    steps = [
        RevealStep(first, enums.RevealItem.BIT),
        RevealStep(second, enums.RevealItem.BIT),
    ]
    for i in range(angles_count, 0, -1):
        sender = enums.Party.ALICE if i % 2 else enums.Party.BOB
        steps.append(RevealStep(sender, enums.RevealItem.SIGN, i))
    return tuple(steps)


def _build(name: str, params: Dict[str, float], angles: List[float]) -> ProtocolSpec:
    rounds = tuple(
        CommitRound(
            round_no=i,
            sender=enums.Party.ALICE if i % 2 else enums.Party.BOB,
            angle=theta,
        )
        for i, theta in enumerate(angles, start=1)
    )
    return ProtocolSpec(
        name=name,
        params=params,
        commit_rounds=rounds,
        reveal_schedule=_reveal_schedule(len(angles)),
    )


def build_pn(n: int, eps: float) -> ProtocolSpec:
    if n < 1:
        raise ProtocolError(f"need at least one commit round, got n={n}")
    if not 0 < eps < 1:
        raise ProtocolError(f"eps must lie strictly between 0 and 1, got {eps}")
    theta = angle_from_eps(eps)
    return _build(f"P_{n}", {"n": n, "eps": eps}, [theta] * n)


def build_three_round(alpha: float) -> ProtocolSpec:
    _check_angle("alpha", alpha)
    return _build("three-round", {"alpha": alpha}, [alpha])


def build_five_round(alpha: float, beta: float) -> ProtocolSpec:
    _check_angle("alpha", alpha)
    _check_angle("beta", beta)
    return _build("five-round", {"alpha": alpha, "beta": beta}, [alpha, beta])


@dataclasses.dataclass(frozen=True)
class OutcomeStats:
    p0: float
    p1: float
    p_abort: float
    # (a, b, signs) -> probability that every check passes on that branch.
    branches: Dict[Tuple[int, int, Tuple[int, ...]], float]

    def __post_init__(self):
        assert abs(self.p0 + self.p1 + self.p_abort - 1) <= TOL.clamp, self

    def as_dict(self) -> Dict[str, Any]:
        return {
            "p0": self.p0,
            "p1": self.p1,
            "p_abort": self.p_abort,
            "branches": [
                {"a": a, "b": b, "signs": list(signs), "pass": p}
                for (a, b, signs), p in sorted(self.branches.items())
            ],
        }


def _run_committed(spec: ProtocolSpec) -> OutcomeStats:
    n = spec.num_commit_rounds
    weight = 1 / 2 ** (n + 2)
    totals = [0.0, 0.0]
    branches = {}
    for a, b in itertools.product((0, 1), repeat=2):
        bits = {enums.Party.ALICE: a, enums.Party.BOB: b}
        for signs in itertools.product((0, 1), repeat=n):
            passed = 1.0
            for step in spec.reveal_schedule:
                if step.item != enums.RevealItem.SIGN:
                    continue
                r = spec.commit_rounds[step.round_no - 1]
                bit, sign = bits[r.sender], signs[r.round_no - 1]
                sent = linalg.PureState(
                    linalg.RegisterLayout.of((r.message, 3, enums.Party.CHANNEL)),
                    r.state(bit, sign),
                )
                p, _ = linalg.project(r.verification(bit, sign), sent)
                passed *= p
            logger.debug("honest branch a=%d b=%d signs=%s passes with %g", a, b, signs, passed)
            branches[(a, b, signs)] = passed
            totals[a ^ b] += weight * passed
    return OutcomeStats(totals[0], totals[1], 1 - totals[0] - totals[1], branches)


def _run_purified(spec: ProtocolSpec) -> OutcomeStats:
    states = {
        (party, bit): party_state(spec, party, bit)
        for party in (enums.Party.ALICE, enums.Party.BOB)
        for bit in (0, 1)
    }
    totals = [0.0, 0.0]
    branches = {}
    for a, b in itertools.product((0, 1), repeat=2):
        # The receiver measures {|ψ_0⟩⟨ψ_0|, |ψ_1⟩⟨ψ_1|, rest} on everything it was sent.
        pa = [abs(states[enums.Party.ALICE, x].inner(states[enums.Party.ALICE, a])) ** 2 for x in (0, 1)]
        pb = [abs(states[enums.Party.BOB, y].inner(states[enums.Party.BOB, b])) ** 2 for y in (0, 1)]
        branches[(a, b, ())] = sum(pa) * sum(pb)
        for x, y in itertools.product((0, 1), repeat=2):
            totals[x ^ y] += pa[x] * pb[y] / 4
    return OutcomeStats(totals[0], totals[1], 1 - totals[0] - totals[1], branches)


def run_honest(spec: ProtocolSpec) -> OutcomeStats:
    if spec.purified:
        return _run_purified(spec)
    return _run_committed(spec)


def party_state(
    spec: ProtocolSpec,
    party: enums.Party,
    bit: int,
    max_amplitudes: int = consts.DEFAULT_MAX_AMPLITUDES,
) -> linalg.PureState:
    """The party's honest purified state: |bit⟩ ⊗ ⊗_rounds (Σ_s |s⟩ψ(bit, s))/√2."""
    registers = [(BIT_LABELS[party], 2, party)]
    amps = np.eye(2)[bit]
    for r in spec.rounds_of(party):
        registers += [(r.sign, 2, party), (r.message, 3, party)]
        mixed = r.prep(bit, 0).amplitudes + r.prep(bit, 1).amplitudes
        amps = np.kron(amps, mixed / math.sqrt(2))
    layout = linalg.RegisterLayout.of(*registers, max_amplitudes=max_amplitudes)
    return linalg.PureState(layout, amps)


def purify(spec: ProtocolSpec) -> ProtocolSpec:
    if spec.purified:
        raise ProtocolError(f"{spec.name} is already purified")
    n = spec.num_commit_rounds
    last = spec.commit_rounds[-1].sender
    rounds = []
    # Rounds keep alternating, so the bits go out in the original reveal order.
    for round_no, sender in ((n + 1, last.other), (n + 2, last)):
        registers = (BIT_LABELS[sender],) + tuple(
            r.sign for r in spec.rounds_of(sender)
        )
        rounds.append(PurifyRound(round_no, sender, registers))
    purified = dataclasses.replace(spec, purified=True, purify_rounds=tuple(rounds))
    for party in (enums.Party.ALICE, enums.Party.BOB):
        overlap = abs(party_state(purified, party, 0).inner(party_state(purified, party, 1)))
        if overlap > TOL.structural:
            raise ProtocolError(
                f"{party.name} final states overlap by {overlap}; preparation is not a sign mixture"
            )
    return purified


def sent_labels(spec: ProtocolSpec, party: enums.Party, round_no: int) -> Tuple[str, ...]:
    """Registers of `party` that have been sent by the end of `round_no`."""
    if not 0 <= round_no <= spec.num_rounds:
        raise ProtocolError(f"round {round_no} outside 0..{spec.num_rounds}")
    labels = [
        r.message
        for r in spec.rounds_of(party)
        if r.round_no <= round_no
    ]
    for p in spec.purify_rounds:
        if p.sender == party and p.round_no <= round_no:
            labels.extend(p.registers)
    return tuple(labels)


def retained_labels(spec: ProtocolSpec, party: enums.Party, round_no: int) -> Tuple[str, ...]:
    sent = set(sent_labels(spec, party, round_no))
    layout = party_state(spec, party, 0).layout
    return tuple(label for label in layout.labels if label not in sent)


def _require_purified(spec: ProtocolSpec):
    if not spec.purified:
        raise ProtocolError(f"{spec.name} must be purified first")


def honest_partial_state(
    spec: ProtocolSpec, party: enums.Party, round_no: int, bit: int
) -> linalg.DensityOperator:
    _require_purified(spec)
    keep = sent_labels(spec, party, round_no)
    return party_state(spec, party, bit).reduced(keep)


@dataclasses.dataclass(frozen=True)
class FidelitySchedule:
    fa: Tuple[float, ...]
    fb: Tuple[float, ...]

    def violations(self, tol: float = TOL.derived) -> List[str]:
        out = []
        for name, seq in (("fa", self.fa), ("fb", self.fb)):
            if abs(seq[0] - 1) > tol:
                out.append(f"{name}[0] = {seq[0]}")
            if abs(seq[-1]) > tol:
                out.append(f"{name}[-1] = {seq[-1]}")
            for i in range(1, len(seq)):
                if seq[i] > seq[i - 1] + tol:
                    out.append(f"{name} increases at round {i}")
        return out

    def as_dict(self) -> Dict[str, Any]:
        return {"fa": list(self.fa), "fb": list(self.fb)}


def fidelity_schedule(spec: ProtocolSpec) -> FidelitySchedule:
    """F_{A,i} and F_{B,i} for every round i = 0..N of a purified protocol.

    Each entry is the fidelity between the two honest states a party has sent
    by round i, computed through Uhlmann's theorem on the full pure states.
    """
    _require_purified(spec)
    out = {}
    for party in (enums.Party.ALICE, enums.Party.BOB):
        psi0 = party_state(spec, party, 0)
        psi1 = party_state(spec, party, 1)
        out[party] = tuple(
            qmetrics.reduced_fidelity(psi0, psi1, sent_labels(spec, party, i))
            for i in range(spec.num_rounds + 1)
        )
    return FidelitySchedule(fa=out[enums.Party.ALICE], fb=out[enums.Party.BOB])
