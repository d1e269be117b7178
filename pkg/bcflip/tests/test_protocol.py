# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

import math

import numpy as np
import pytest

from bcflip import enums
from bcflip import protocol

ALICE = enums.Party.ALICE
BOB = enums.Party.BOB


def test_angle_eps():
    assert protocol.angle_from_eps(0.5) == pytest.approx(math.pi / 2)
    assert protocol.eps_from_angle(math.pi / 3) == pytest.approx(0.25)
    np.testing.assert_allclose(
        protocol.message_vector(math.pi / 2, 1, 1),
        [math.sqrt(0.5), 0, -math.sqrt(0.5)],
    )


def test_build_pn_rounds():
    spec = protocol.build_pn(4, 0.3)
    assert spec.name == "P_4"
    assert [r.sender for r in spec.commit_rounds] == [ALICE, BOB, ALICE, BOB]
    assert spec.round_sender(2) == BOB
    assert [r.round_no for r in spec.rounds_of(ALICE)] == [1, 3]
    assert all(r.angle == pytest.approx(protocol.angle_from_eps(0.3)) for r in spec.commit_rounds)


@pytest.mark.parametrize(
    "n,first_bit",
    [(1, BOB), (2, ALICE), (3, BOB), (4, ALICE)],
)
def test_reveal_order(n, first_bit):
    spec = protocol.build_pn(n, 0.5)
    steps = spec.reveal_schedule
    assert steps[0] == protocol.RevealStep(first_bit, enums.RevealItem.BIT)
    assert steps[1] == protocol.RevealStep(first_bit.other, enums.RevealItem.BIT)
    assert [s.round_no for s in steps[2:]] == list(range(n, 0, -1))
    for s in steps[2:]:
        assert s.sender == spec.commit_rounds[s.round_no - 1].sender


def test_build_errors():
    with pytest.raises(protocol.ProtocolError):
        protocol.build_pn(0, 0.5)
    with pytest.raises(protocol.ProtocolError):
        protocol.build_pn(2, 0)
    with pytest.raises(protocol.ProtocolError):
        protocol.build_pn(2, 1.5)
    with pytest.raises(protocol.ProtocolError):
        protocol.build_three_round(-0.1)
    with pytest.raises(protocol.ProtocolError):
        protocol.build_five_round(1.0, 4.0)


def test_bad_schedule():
    good = protocol.build_pn(2, 0.5)
    swapped = good.reveal_schedule[:2] + tuple(reversed(good.reveal_schedule[2:]))
    with pytest.raises(protocol.ProtocolError):
        protocol.ProtocolSpec(good.name, good.params, good.commit_rounds, swapped)
    wrong_sender = (
        protocol.CommitRound(1, BOB, 1.0),
        protocol.CommitRound(2, ALICE, 1.0),
    )
    with pytest.raises(protocol.ProtocolError):
        protocol.ProtocolSpec(good.name, good.params, wrong_sender, good.reveal_schedule)


def test_degenerate_three_round():
    spec = protocol.build_three_round(0)
    rnd = spec.commit_rounds[0]
    np.testing.assert_allclose(rnd.state(0, 0), rnd.state(1, 1))
    assert protocol.run_honest(spec).p_abort == pytest.approx(0)


def test_degenerate_five_round_beta():
    rnd = protocol.build_five_round(1.0, 0).commit_rounds[1]
    np.testing.assert_allclose(rnd.state(0, 0), rnd.state(1, 0))


@pytest.mark.parametrize(
    "spec",
    [
        protocol.build_pn(1, 0.5),
        protocol.build_pn(3, 0.2),
        protocol.build_pn(4, 0.7),
        protocol.build_three_round(math.pi / 3),
        protocol.build_five_round(math.pi / 2, math.pi / 3),
    ],
    ids=lambda s: s.name,
)
def test_honest_run(spec):
    stats = protocol.run_honest(spec)
    assert stats.p0 == pytest.approx(0.5)
    assert stats.p1 == pytest.approx(0.5)
    assert stats.p_abort == pytest.approx(0, abs=1e-12)

    purified = protocol.purify(spec)
    stats = protocol.run_honest(purified)
    assert (stats.p0, stats.p1, stats.p_abort) == pytest.approx((0.5, 0.5, 0), abs=1e-12)


def test_outcome_dict():
    doc = protocol.run_honest(protocol.build_pn(1, 0.5)).as_dict()
    assert doc["p0"] == pytest.approx(0.5)
    assert len(doc["branches"]) == 8


def test_purify():
    spec = protocol.purify(protocol.build_pn(3, 0.5))
    assert spec.purified
    assert spec.num_rounds == 5
    assert spec.purify_rounds[0] == protocol.PurifyRound(4, BOB, ("b", "s2"))
    assert spec.purify_rounds[1] == protocol.PurifyRound(5, ALICE, ("a", "s1", "s3"))
    with pytest.raises(protocol.ProtocolError):
        protocol.purify(spec)


def test_party_state():
    spec = protocol.purify(protocol.build_pn(2, 0.5))
    psi = protocol.party_state(spec, ALICE, 1)
    assert psi.layout.labels == ("a", "s1", "m1")
    assert psi.norm2 == pytest.approx(1)
    assert abs(psi.inner(protocol.party_state(spec, ALICE, 0))) == pytest.approx(0)


def test_sent_and_retained():
    spec = protocol.purify(protocol.build_pn(2, 0.5))
    assert protocol.sent_labels(spec, ALICE, 0) == ()
    assert protocol.sent_labels(spec, ALICE, 1) == ("m1",)
    assert protocol.sent_labels(spec, BOB, 1) == ()
    assert protocol.sent_labels(spec, BOB, 3) == ("m2",)
    assert protocol.sent_labels(spec, ALICE, 3) == ("m1", "a", "s1")
    assert protocol.sent_labels(spec, BOB, 4) == ("m2", "b", "s2")
    assert protocol.retained_labels(spec, ALICE, 1) == ("a", "s1")
    with pytest.raises(protocol.ProtocolError):
        protocol.sent_labels(spec, ALICE, 5)


def test_honest_partial_state():
    spec = protocol.purify(protocol.build_pn(1, 0.5))
    empty = protocol.honest_partial_state(spec, ALICE, 0, 0)
    assert empty.matrix.shape == (1, 1)
    assert empty.trace == pytest.approx(1)

    rho = protocol.honest_partial_state(spec, ALICE, 1, 1)
    np.testing.assert_allclose(rho.matrix, np.diag([0.5, 0, 0.5]), atol=1e-12)

    with pytest.raises(protocol.ProtocolError):
        protocol.honest_partial_state(protocol.build_pn(1, 0.5), ALICE, 1, 0)


def test_fidelity_schedule_p1():
    sched = protocol.fidelity_schedule(protocol.purify(protocol.build_pn(1, 0.5)))
    assert sched.fa == pytest.approx((1, 0.25, 0.25, 0), abs=1e-9)
    # Bob sends nothing before his bit reveal in round 2.
    assert sched.fb == pytest.approx((1, 1, 0, 0), abs=1e-9)
    assert sched.violations() == []


@pytest.mark.parametrize("n", [2, 3, 4])
def test_fidelity_schedule_shape(n):
    spec = protocol.purify(protocol.build_pn(n, 0.3))
    sched = protocol.fidelity_schedule(spec)
    assert len(sched.fa) == spec.num_rounds + 1
    assert sched.violations() == []


def test_fidelity_schedule_unpurified():
    with pytest.raises(protocol.ProtocolError):
        protocol.fidelity_schedule(protocol.build_pn(1, 0.5))


def test_violations():
    sched = protocol.FidelitySchedule(fa=(1, 0.5, 0.7, 0), fb=(0.9, 0.1))
    problems = sched.violations()
    assert "fa increases at round 2" in problems
    assert "fb[0] = 0.9" in problems
    assert "fb[-1] = 0.1" in problems


def test_as_dict():
    doc = protocol.purify(protocol.build_pn(2, 0.5)).as_dict()
    assert doc["name"] == "P_2"
    assert doc["params"] == {"n": 2, "eps": 0.5}
    assert [r["sender"] for r in doc["commit_rounds"]] == ["alice", "bob"]
    assert doc["reveal_schedule"][0] == {"sender": "alice", "item": "bit", "round": None}
    assert doc["purification_rounds"][0]["registers"] == ["a", "s1"]
