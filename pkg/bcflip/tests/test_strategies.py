# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

import math

import numpy as np
import pytest

from bcflip import analysis
from bcflip import enums
from bcflip import linalg
from bcflip import protocol
from bcflip import strategies

ALICE = enums.Party.ALICE
BOB = enums.Party.BOB


def test_crossing_round_simultaneous_drop():
    sched = protocol.FidelitySchedule(fa=(1, 0.3, 0), fb=(1, 0.9, 0))
    assert strategies.find_crossing_round(sched, 0.25) == (ALICE, 1)


def test_crossing_round_trivial_alpha():
    sched = protocol.FidelitySchedule(fa=(1, 0.3, 0), fb=(1, 0.9, 0))
    assert strategies.find_crossing_round(sched, 1) == (ALICE, 0)


def test_crossing_round_bob():
    sched = protocol.FidelitySchedule(fa=(1, 0.2, 0), fb=(1, 1, 0))
    assert strategies.find_crossing_round(sched, 0.25) == (BOB, 0)


def test_crossing_round_errors():
    sched = protocol.FidelitySchedule(fa=(1, 0.3, 0), fb=(1, 0.9, 0))
    with pytest.raises(strategies.StrategyError):
        strategies.find_crossing_round(sched, 1.5)
    with pytest.raises(strategies.StrategyError):
        strategies.find_crossing_round(protocol.FidelitySchedule(fa=(1, 1), fb=(1, 1)), 0.25)


def test_generic_attack_p1():
    spec = protocol.purify(protocol.build_pn(1, 0.5))
    report = strategies.generic_attack(spec)
    assert report.cheater == BOB
    assert report.details["k"] == 0
    assert report.success == pytest.approx(0.75)
    assert report.guess_accuracy == pytest.approx(0.75)
    sched = protocol.fidelity_schedule(spec)
    assert sched.fb[0] >= 0.25
    assert sched.fa[1] <= 0.25 + 1e-9


@pytest.mark.parametrize("target", [0, 1])
def test_generic_attack_targets(target):
    spec = protocol.purify(protocol.build_three_round(math.pi / 3))
    report = strategies.generic_attack(spec, target=target)
    assert report.target == target
    assert report.success >= 9 / 16
    assert report.success >= report.closed_form - 1e-9


def test_generic_attack_unpurified():
    with pytest.raises(strategies.StrategyError):
        strategies.generic_attack(protocol.build_pn(1, 0.5))


def test_three_round_alice():
    report = strategies.three_round_alice(math.pi / 2)
    assert report.success == pytest.approx(0.75, abs=1e-6)
    assert report.details["fidelity_bound"] == pytest.approx(0.75, abs=1e-6)
    assert report.details["fidelity_sum_max"] == pytest.approx(0.75, abs=1e-6)


@pytest.mark.parametrize("eps", [0.1, 0.5, 0.9])
def test_three_round_alice_eps(eps):
    report = strategies.three_round_alice(protocol.angle_from_eps(eps))
    assert report.success == pytest.approx(1 - eps / 2, abs=1e-6)


@pytest.mark.parametrize("eps", [0.1, 0.5, 0.9])
def test_three_round_bob(eps):
    report = strategies.three_round_bob(protocol.angle_from_eps(eps))
    assert report.success == pytest.approx((1 + eps) / 2, abs=1e-6)
    assert report.guess_accuracy == pytest.approx(report.success)


def test_open_angles():
    with pytest.raises(strategies.StrategyError):
        strategies.three_round_alice(0)
    with pytest.raises(strategies.StrategyError):
        strategies.five_round_bob(1.0, math.pi)


def test_five_round_at_right_angles():
    alice = strategies.five_round_alice(math.pi / 2, math.pi / 2)
    assert alice.success == pytest.approx(0.625, abs=1e-6)
    bob = strategies.five_round_bob(math.pi / 2, math.pi / 2)
    assert bob.success == pytest.approx(0.875, abs=1e-6)


@pytest.mark.parametrize("eps", [0.2, 0.5, 0.8])
def test_five_round_matched_angles(eps):
    theta = protocol.angle_from_eps(eps)
    alice = strategies.five_round_alice(theta, theta)
    assert alice.success == pytest.approx(0.5 + eps / 2 - eps**2 / 2, abs=1e-6)
    bob = strategies.five_round_bob(theta, theta)
    assert bob.success == pytest.approx(1 - eps / 2 + eps**2 / 2, abs=1e-6)


def test_five_round_small_beta():
    # Bob's commitment barely hides b.
    alice = strategies.five_round_alice(math.pi / 2, 1e-3)
    assert alice.success == pytest.approx(0.5, abs=1e-6)
    bob = strategies.five_round_bob(math.pi / 2, 1e-3)
    assert bob.success == pytest.approx(1, abs=1e-6)


def test_five_round_alice_bound():
    value, variables = strategies.five_round_alice_bound(math.pi / 2, math.pi / 2)
    assert value == pytest.approx(0.625, abs=1e-6)
    assert variables["lambda0"] + variables["lambda1"] + variables["lambda2"] == pytest.approx(1)
    assert 0 <= variables["mu0"] <= variables["lambda0"] + 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
def test_mu_lambda(n):
    sched = strategies.mu_lambda(n, 0.3)
    assert sched.k == (n + 1) // 2
    for i in range(1, sched.k + 1):
        assert sched.mu_at(i) == pytest.approx(sched.closed_form_mu(i), abs=1e-12)
        assert 0 <= sched.mu_at(i) <= 1
        assert 0 <= sched.lambda_at(i) <= 1
    if n % 2:
        assert sched.mu_at(sched.k) == 1


def test_mu_lambda_errors():
    with pytest.raises(strategies.StrategyError):
        strategies.mu_lambda(0, 0.5)
    with pytest.raises(strategies.StrategyError):
        strategies.mu_lambda(2, 1)


@pytest.mark.parametrize("eps", [0.2, 0.5, 0.8])
def test_pn_alice_one_round(eps):
    report = strategies.pn_alice(1, eps)
    assert report.success == pytest.approx(1 - eps / 2, abs=1e-6)
    assert report.closed_form == pytest.approx(1 - eps / 2)


def test_pn_alice_two_rounds_matches_five_round():
    eps = 0.4
    theta = protocol.angle_from_eps(eps)
    report = strategies.pn_alice(2, eps)
    assert report.success == pytest.approx(0.5 + eps / 2 - eps**2 / 2, abs=1e-6)
    assert report.success == pytest.approx(strategies.five_round_alice(theta, theta).success, abs=1e-6)


def test_pn_alice_three_rounds():
    report = strategies.pn_alice(3, 0.2)
    assert report.closed_form == pytest.approx(3.0096 / 3.6)
    assert report.success == pytest.approx(0.836, abs=1e-6)


def test_pn_bob():
    report = strategies.pn_bob(2, 0.5)
    assert report.success == pytest.approx(0.875, abs=1e-6)
    assert report.protocol["name"] == "P_2"
    one = strategies.pn_bob(1, 0.5)
    assert one.success == pytest.approx(0.75, abs=1e-6)
    assert one.protocol["name"] == "P_1"


def test_pn_caps():
    with pytest.raises(strategies.StrategyError):
        strategies.pn_alice(5, 0.5, max_rounds=4)
    with pytest.raises(strategies.StrategyError):
        strategies.pn_alice(3, 0.5, max_amplitudes=64)
    with pytest.raises(strategies.StrategyError):
        strategies.pn_bob(2, 0)


def test_attack_dispatch():
    report = strategies.attack(enums.Family.THREE, BOB, alpha=math.pi / 2)
    assert report.cheater == BOB
    assert report.success == pytest.approx(0.75, abs=1e-6)
    report = strategies.attack(enums.Family.PN, ALICE, n=1, eps=0.5, generic=True)
    assert report.success == pytest.approx(0.75, abs=1e-6)


def test_report_dict():
    doc = strategies.three_round_alice(math.pi / 2).as_dict()
    assert doc["cheater"] == "alice"
    assert doc["protocol"]["name"] == "three-round"
    assert sum(b["weight"] * b["pass"] for b in doc["branches"]) == pytest.approx(doc["success"])
    assert doc["gap"] == pytest.approx(0, abs=1e-6)


def sign_outcome(label, dim, value):
    return linalg.LinearOp(linalg.projector(np.eye(dim)[value]), [label])


@pytest.mark.parametrize("alpha", [0.3, math.pi / 3, math.pi / 2, 2.5])
def test_three_round_alice_replay(alpha):
    # Bob reads the revealed sign, then runs his own check on the message.
    rnd = protocol.build_three_round(alpha).commit_rounds[0]
    report = strategies.three_round_alice(alpha)
    for b, state in strategies.three_round_reveals(alpha).items():
        accepted = 0.0
        for s in (0, 1):
            _, told = linalg.project(sign_outcome(rnd.sign, 2, s), state)
            p, _ = linalg.project(rnd.verification(b, s), told)
            accepted += p
        assert accepted == pytest.approx(report.branches[b].passed, abs=1e-12)
    assert sum(0.5 * report.branches[b].passed for b in (0, 1)) == pytest.approx(report.success, abs=1e-12)


@pytest.mark.parametrize("alpha,beta", [(math.pi / 2, math.pi / 2), (1.0, 2.0), (2.0, 0.7)])
def test_five_round_alice_replay(alpha, beta):
    rnd = protocol.build_five_round(alpha, beta).commit_rounds[0]
    report = strategies.five_round_alice(alpha, beta)
    passes = {br.key: br.passed for br in report.branches}
    success = 0.0
    for (b, s_bob), state in strategies.five_round_reveals(alpha, beta).items():
        accepted = 0.0
        for level, s in enumerate((0, 1, 0)):
            _, told = linalg.project(sign_outcome("e", 3, level), state)
            check = linalg.LinearOp(linalg.projector(rnd.state(b, s)), ["m"])
            p, _ = linalg.project(check, told)
            accepted += p
        assert accepted == pytest.approx(passes[b, s_bob], abs=1e-12)
        success += 0.25 * accepted
    assert success == pytest.approx(report.success, abs=1e-12)


@pytest.mark.parametrize("alpha,beta", [(math.pi / 2, math.pi / 2), (1.0, 2.0), (2.0, 0.7)])
def test_five_round_overlap_expression(alpha, beta):
    report = strategies.five_round_alice(alpha, beta)
    assert report.details["overlap_expression"] == pytest.approx(report.success, abs=1e-6)
    assert abs(report.details["overlap_gap"]) <= 1e-6


def test_five_round_bound_near_edge():
    # The optimum sits a hair away from lambda1 = lambda2 = 0.
    value, variables = strategies.five_round_alice_bound(0.1, math.pi / 2)
    assert value == pytest.approx(strategies.five_round_alice(0.1, math.pi / 2).success, abs=1e-4)
    assert variables["lambda1"] > 0
    assert variables["lambda2"] > 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pn_closed_forms(n):
    alice = strategies.pn_alice(n, 0.3)
    assert alice.closed_form == pytest.approx(analysis.closed_A(n, 0.3), abs=1e-12)
    assert alice.details["mu_recursion"] == pytest.approx(alice.closed_form, abs=1e-12)
    bob = strategies.pn_bob(n, 0.3)
    assert bob.closed_form == pytest.approx(analysis.closed_B(n, 0.3), abs=1e-12)
    if n > 1:
        assert bob.details["composition"] == pytest.approx(bob.closed_form, abs=1e-12)
