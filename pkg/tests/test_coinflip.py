import math
import os

import numpy as np
import pytest

from hedgelab import coinflip as cf
from hedgelab import linalg as la

SIN2 = math.sin(math.pi / 8) ** 2
SEED = int(os.environ.get("HEDGELAB_SEED", "0"))


@pytest.fixture(scope="module")
def bob():
    return cf.bob_cheat_value()


@pytest.fixture(scope="module")
def attack():
    return cf.build_hedge_attack()


def test_p_star_closed_form():
    assert cf.P_STAR == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-15)


def test_honest_distribution_uniform():
    assert cf.honest_distribution() == pytest.approx({"Alice": 0.5, "Bob": 0.5}, abs=1e-15)
    for b in (0, 1):
        assert cf.honest_distribution(b) == pytest.approx({"Alice": 0.5, "Bob": 0.5}, abs=1e-15)
    assert cf.honest_agreement() == pytest.approx(1.0, abs=1e-15)


def test_honest_joint_is_diagonal():
    for b in (0, 1):
        joint = cf.honest_joint(b)
        assert joint[0, 1] == pytest.approx(0, abs=1e-15)
        assert joint[1, 0] == pytest.approx(0, abs=1e-15)


def test_honest_sampling_agrees_with_exact():
    shots = 100_000
    runs = cf.sample_honest(shots, seed=SEED)
    assert all(r.alice_result == r.bob_result for r in runs)
    alice = sum(r.winner == "Alice" for r in runs) / shots
    assert abs(alice - 0.5) <= 3 * math.sqrt(0.25 / shots)
    assert {r.winner for r in runs if r.alice_result == 0} == {"Alice"}


def test_alice_cheat_examples():
    assert cf.alice_cheat_value() == pytest.approx(cf.P_STAR, abs=1e-12)
    p0 = la.proj(cf.KET0)
    assert cf.alice_cheat_value(0.5 * (p0 + p0)) == pytest.approx(1.0, abs=1e-12)
    assert cf.alice_cheat_value(0.5 * (p0 + la.proj(cf.KET1))) == pytest.approx(0.5, abs=1e-12)


def test_bob_cheat_value(bob):
    assert bob.solution.primal_value == pytest.approx(0.8536, abs=1e-4)
    assert bob.outcome0_value == pytest.approx(cf.P_STAR, abs=1e-4)
    assert 0 <= bob.gap <= 2e-4
    assert bob.printed_dual == pytest.approx(cf.P_STAR, abs=1e-12)


def test_bob_printed_certificate_orientation(bob):
    assert bob.printed_feasible_outcome0
    assert not bob.printed_feasible_outcome1
    assert bob.flipped_feasible_outcome1


def test_bob_strategy_matches_printed_matrix(bob):
    printed = np.array([[0.0732, 0, 0.1768, 0], [0, 0.4268, 0, -0.1768],
                        [0.1768, 0, 0.4268, 0], [0, -0.1768, 0, 0.0732]])
    assert np.abs(bob.solution.rho - printed).max() <= 2e-3


def test_bob_perturbed_objective_breaks_certificate():
    cert = cf.bob_cheat_value(objective_scale=1.001)
    assert not cert.flipped_feasible_outcome1


def test_explicit_rotation_strategy():
    assert cf.bob_explicit_strategy_value() == pytest.approx(cf.P_STAR, abs=1e-12)
    assert np.abs(cf.bob_explicit_state() - cf.zeta_printed()).max() <= 1e-10


@pytest.mark.parametrize("theta", [0.0, -math.pi / 2, 0.3, -1.1, 2.0])
def test_explicit_rotation_closed_form(theta):
    expect = 0.5 - (math.cos(2 * theta) + math.sin(2 * theta)) / 4
    assert cf.bob_explicit_strategy_value(theta) == pytest.approx(expect, abs=1e-12)


def test_unrotated_message_wins_a_quarter():
    # sending the measured bit unchanged loses whenever b = 0 and also half the b = 1 runs
    assert cf.bob_explicit_strategy_value(0.0) == pytest.approx(0.25, abs=1e-12)
    assert cf.bob_explicit_strategy_value(-math.pi / 2) == pytest.approx(0.75, abs=1e-12)


def test_explicit_strategy_never_beats_sdp(bob):
    for theta in np.linspace(-math.pi, math.pi, 37):
        assert cf.bob_explicit_strategy_value(float(theta)) <= bob.solution.dual_value + 1e-12


def test_consistency_triangle(bob):
    vals = [bob.solution.primal_value, cf.bob_explicit_strategy_value(), np.trace(cf.Y_PRINTED).real]
    assert max(vals) - min(vals) <= 2e-4


def test_hedge_attack_structure(attack):
    assert np.abs(attack.gram() - np.eye(4)).max() <= 1e-12
    assert attack.unitarity_residual() <= 1e-12
    assert attack.initial_identity_residual() <= 1e-12
    assert np.abs(cf.SWAP @ cf.ALPHA[2] - cf.ALPHA[3]).max() <= 1e-12


def test_swap_moves_alpha2(attack):
    a2 = attack.alpha[2]
    assert np.linalg.norm(cf.SWAP @ a2 - a2) > 0.5
    assert np.linalg.norm(cf.SWAP @ a2 + a2) > 0.5
    assert cf.swap_distance(a2) > 0.5
    assert cf.swap_distance(cf.PHI_PLUS) == pytest.approx(0, abs=1e-15)


def test_parallel_hedge_distribution():
    dist = cf.simulate_parallel_hedge()
    assert dist[(0, 1)] + dist[(1, 0)] == pytest.approx(1.0, abs=1e-10)
    assert dist[(1, 1)] == pytest.approx(0.0, abs=1e-10)
    assert dist[(0, 0)] == pytest.approx(0.0, abs=1e-10)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)


def test_parallel_hedge_branch_11(attack):
    prob, left, dist = cf.hedge_branch((1, 1), attack)
    assert prob == pytest.approx(0.25, abs=1e-12)
    overlap = abs(np.vdot(attack.alpha[0], left))
    assert overlap == pytest.approx(1.0, abs=1e-12)
    assert dist == pytest.approx({(0, 0): 0, (0, 1): 0.5, (1, 0): 0.5, (1, 1): 0}, abs=1e-12)


def test_hedge_is_strict_and_costs_expected_wins():
    dist = cf.simulate_parallel_hedge()
    at_least_one = 1 - dist[(0, 0)]
    assert at_least_one == pytest.approx(1.0, abs=1e-10)
    assert cf.independent_cheat_value(2, 1) < 1 - 1e-2
    expected = sum((w1 + w2) * p for (w1, w2), p in dist.items())
    assert expected == pytest.approx(1.0, abs=1e-12)
    assert expected < 2 * cf.P_STAR


def test_parallel_hedge_sampling():
    shots = 100_000
    draws = cf.sample_parallel_hedge(shots, seed=SEED)
    assert draws.shape == (shots, 2)
    assert np.all(draws.sum(axis=1) == 1)
    frac = draws[:, 0].mean()
    assert abs(frac - 0.5) <= 3 * math.sqrt(0.25 / shots)


def test_independent_values():
    assert cf.independent_cheat_value(2, 1) == pytest.approx(1 - SIN2**2, abs=1e-12)
    assert cf.independent_cheat_value(2, 1) == pytest.approx(0.9786, abs=1e-4)
    p = cf.P_STAR
    assert cf.independent_cheat_value(3, 2) == pytest.approx(3 * p**2 - 2 * p**3, abs=1e-12)
    assert cf.independent_cheat_value(3, 2) == pytest.approx(0.9420, abs=1e-4)
    assert cf.independent_cheat_value(1, 1) == pytest.approx(p, abs=1e-15)
    with pytest.raises(ValueError):
        cf.independent_cheat_value(2, 3)


def test_at_least_targets():
    assert list(cf.at_least(2, 1)) == [0, 1, 1, 1]
    assert list(cf.at_least(3, 2)) == [0, 0, 0, 1, 0, 1, 1, 1]


def test_parallel_cheat_values():
    assert cf.parallel_cheat_value(1, 1).primal_value == pytest.approx(0.8536, abs=1e-4)
    assert cf.parallel_cheat_value(2, 1).primal_value == pytest.approx(1.0, abs=1e-6)


def test_parallel_two_of_three():
    sol = cf.parallel_cheat_value(3, 2)
    assert sol.primal_value == pytest.approx(0.986, abs=2e-3)
    assert sol.dual_value - sol.primal_value <= 5e-3
    assert sol.primal_value > cf.independent_cheat_value(3, 2)


def test_parallel_capacity():
    with pytest.raises(cf.CapacityError):
        cf.parallel_game(4)
    with pytest.raises(ValueError):
        cf.parallel_cheat_value(2, 0)


def test_alice_hedging_bound():
    assert cf.alice_hedging_bound(1) == pytest.approx(0.146447, abs=1e-6)
    assert cf.alice_hedging_bound(2) == pytest.approx(0.021447, abs=1e-6)
    assert cf.alice_hedging_bound(0) == 1.0
    for n in range(1, 6):
        assert cf.alice_hedging_bound(n) == pytest.approx(SIN2**n, abs=1e-12)
    with pytest.raises(ValueError):
        cf.alice_hedging_bound(-1)


def test_protocol_outcome_winner():
    assert cf.ProtocolOutcome(0, 0, 0).winner == "Alice"
    assert cf.ProtocolOutcome(1, 1, 1).winner == "Bob"
