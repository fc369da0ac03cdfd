"""SIC-matrix relaxation: structure checks, majorizers, subproblem, solver."""

import itertools

import numpy as np
import pytest

from conftest import make_scenario
from skylift import kernel, sca
from skylift.exact import solve_optimal
from skylift.model import distance_sorted_order, squared_distances
from skylift.sca import (
    PENALTY_THRESHOLD,
    PenaltyState,
    SicStructureError,
    alpha_from_order,
    build_subproblem,
    decode_positions,
    default_init,
    feasibility_check,
    majorize_bilinear,
    majorize_phi,
    order_from_alpha,
    positions_from_rowsums,
    sca_solve,
    smooth_penalties,
    subproblem_layout,
    theta,
    theta_matrix,
)


def test_alpha_order_roundtrip_exhaustive():
    for k in range(1, 5):
        for perm in itertools.permutations(range(k)):
            alpha = alpha_from_order(perm)
            assert order_from_alpha(alpha) == perm
            f = decode_positions(alpha)
            # f(device) is its 1-based decode position.
            for pos, dev in enumerate(perm):
                assert f[dev] == pos + 1


def test_decode_positions_rejects_bad_structure():
    with pytest.raises(SicStructureError, match="binary"):
        decode_positions([[0.0, 0.4], [0.6, 0.0]])
    with pytest.raises(SicStructureError, match="diagonal"):
        decode_positions([[1.0, 1.0], [0.0, 0.0]])
    with pytest.raises(SicStructureError, match="equal 1"):
        decode_positions([[0.0, 1.0], [1.0, 0.0]])
    cycle = np.array([  # 0 beats 1, 1 beats 2, 2 beats 0
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
    ])
    with pytest.raises(SicStructureError, match="transitivity"):
        decode_positions(cycle)
    with pytest.raises(ValueError, match="square"):
        decode_positions(np.zeros((2, 3)))


def test_transitive_tournaments_are_exactly_the_orders():
    # All 2^6 antisymmetric binary matrices on K=4; the structurally valid
    # ones must be the 4! = 24 decoding orders, each hit exactly once.
    pairs = list(itertools.combinations(range(4), 2))
    seen = set()
    for bits in itertools.product([0.0, 1.0], repeat=len(pairs)):
        alpha = np.zeros((4, 4))
        for (a, b), bit in zip(pairs, bits):
            alpha[a, b] = bit
            alpha[b, a] = 1.0 - bit
        try:
            seen.add(order_from_alpha(alpha))
        except SicStructureError:
            continue
    assert len(seen) == 24
    assert seen == set(itertools.permutations(range(4)))


def test_theta_is_squared_distance_gap():
    rng = np.random.default_rng(41)
    scenario = make_scenario(positions=rng.uniform(-200.0, 200.0, size=(4, 2)))
    q = rng.uniform(-100.0, 100.0, size=2)
    d2 = squared_distances(q, scenario)
    th = theta_matrix(q, scenario)
    for k in range(4):
        for j in range(4):
            if k == j:
                assert th[k, j] == 0.0
                continue
            expect = d2[k] - d2[j]
            assert theta(q, k, j, scenario) == pytest.approx(expect, rel=1e-9, abs=1e-6)
            assert th[k, j] == pytest.approx(expect, rel=1e-9, abs=1e-6)
    np.testing.assert_allclose(th, -th.T, atol=1e-9)
    with pytest.raises(ValueError):
        theta(q, 1, 1, scenario)


def test_smooth_penalties_vanish_only_when_consistent():
    rng = np.random.default_rng(43)
    scenario = make_scenario(positions=rng.uniform(-150.0, 150.0, size=(4, 2)))
    q = rng.uniform(-100.0, 100.0, size=2)
    order = distance_sorted_order(q, scenario)
    phi, phi_g = smooth_penalties(q, alpha_from_order(order), scenario)
    assert phi == 0.0
    assert phi_g == 0.0
    reversed_order = tuple(reversed(order))
    phi_r, phi_g_r = smooth_penalties(q, alpha_from_order(reversed_order), scenario)
    assert phi_r == 0.0
    assert phi_g_r > 1.0  # m^2 scale on these geometries
    relaxed = np.full((4, 4), 0.5)
    np.fill_diagonal(relaxed, 0.0)
    phi_x, _ = smooth_penalties(q, relaxed, scenario)
    assert phi_x == pytest.approx(12 * 0.25, rel=1e-12)
    with pytest.raises(ValueError):
        smooth_penalties(q, relaxed + 0.7, scenario)


def test_phi_majorizer_dominates_and_is_tight():
    rng = np.random.default_rng(47)
    for _ in range(200):
        k = int(rng.integers(2, 6))
        alpha = rng.uniform(0.0, 1.0, size=(k, k))
        alpha_bar = rng.uniform(0.0, 1.0, size=(k, k))
        np.fill_diagonal(alpha, 0.0)
        np.fill_diagonal(alpha_bar, 0.0)
        off = ~np.eye(k, dtype=bool)
        phi = float(np.sum((alpha - alpha**2)[off]))
        assert majorize_phi(alpha, alpha_bar) >= phi - 1e-12
        assert majorize_phi(alpha_bar, alpha_bar) == pytest.approx(
            float(np.sum((alpha_bar - alpha_bar**2)[off])), abs=1e-12)


def test_printed_phi_form_is_not_an_upper_bound():
    alpha_bar = np.array([[0.0, 0.5], [0.5, 0.0]])
    alpha = np.array([[0.0, 0.6], [0.4, 0.0]])
    phi = (0.6 - 0.36) + (0.4 - 0.16)
    assert majorize_phi(alpha, alpha_bar, form="printed") < phi
    assert majorize_phi(alpha, alpha_bar, form="taylor") >= phi
    with pytest.raises(ValueError):
        majorize_phi(alpha, alpha_bar, form="quadratic")


def test_bilinear_majorizer_dominates_and_is_tight():
    rng = np.random.default_rng(53)
    t = rng.normal(scale=3.0, size=2000)
    a = rng.uniform(0.0, 1.0, size=2000)
    tb = rng.normal(scale=3.0, size=2000)
    ab = rng.uniform(0.0, 1.0, size=2000)
    d = majorize_bilinear(t, a, tb, ab)
    assert np.all(d >= 2.0 * a * t - 1e-12)
    d_tight = majorize_bilinear(tb, ab, tb, ab)
    np.testing.assert_allclose(d_tight, 2.0 * ab * tb, atol=1e-12)
    assert isinstance(majorize_bilinear(1.0, 0.5, 1.0, 0.5), float)


def test_positions_from_rowsums_ranking():
    alpha = alpha_from_order((2, 0, 1))
    np.testing.assert_array_equal(positions_from_rowsums(alpha), decode_positions(alpha))
    relaxed = np.array([
        [0.0, 0.6, 0.6],
        [0.4, 0.0, 0.5],
        [0.4, 0.5, 0.0],
    ])
    # Row sums 1.2, 0.9, 0.9: device 0 first, tie broken by index.
    np.testing.assert_array_equal(positions_from_rowsums(relaxed), [1, 2, 3])


def test_subproblem_structure_counts():
    scenario = make_scenario([(0.0, 0.0), (80.0, 0.0), (-40.0, 60.0)])
    q0, alpha0 = default_init(scenario)
    program = build_subproblem(q0, alpha0, decode_positions(alpha0), PenaltyState(), scenario)
    k = 3
    assert program.n == 3 + k * (k - 1)
    assert program.names == subproblem_layout(k)
    assert len(program.quad_cons) == 2 * k
    assert len(program.obj_abs) == k * (k - 1)
    assert program.ineq_A.shape[0] == k * (k - 1) + k * (k - 1) * (k - 2)
    assert np.all(program.lower[3:] == 0.0) and np.all(program.upper[3:] == 1.0)
    with pytest.raises(ValueError, match="bijection"):
        build_subproblem(q0, alpha0, np.array([1, 1, 2]), PenaltyState(), scenario)


def _pack_point(zeta_hat, q, alpha, scenario):
    names = subproblem_layout(scenario.device_count)
    x = np.zeros(len(names))
    x[0] = zeta_hat
    x[1:3] = np.asarray(q, dtype=float) / sca.LENGTH_SCALE_M
    for k in range(scenario.device_count):
        for j in range(scenario.device_count):
            if j != k:
                x[names.index(f"a_{k}_{j}")] = alpha[k, j]
    return x


def test_subproblem_objective_tight_at_expansion_point():
    rng = np.random.default_rng(59)
    scenario = make_scenario(positions=rng.uniform(-150.0, 150.0, size=(3, 2)))
    q_bar = rng.uniform(-80.0, 80.0, size=2)
    alpha_bar = rng.uniform(0.0, 1.0, size=(3, 3))
    np.fill_diagonal(alpha_bar, 0.0)
    pen = PenaltyState(rho1=0.7, rho2=1.3)
    program = build_subproblem(q_bar, alpha_bar, np.array([2, 1, 3]), pen, scenario)
    phi, phi_g = smooth_penalties(q_bar, alpha_bar, scenario)
    x = _pack_point(0.42, q_bar, alpha_bar, scenario)
    expect = 0.42 + pen.rho1 * phi + pen.rho2 * phi_g / sca.LENGTH_SCALE_M**2
    assert program.objective_value(x) == pytest.approx(expect, rel=1e-9)


def test_subproblem_objective_majorizes_penalized_objective():
    rng = np.random.default_rng(61)
    scenario = make_scenario(positions=rng.uniform(-150.0, 150.0, size=(3, 2)))
    q_bar = rng.uniform(-80.0, 80.0, size=2)
    alpha_bar = rng.uniform(0.0, 1.0, size=(3, 3))
    np.fill_diagonal(alpha_bar, 0.0)
    pen = PenaltyState(rho1=0.7, rho2=1.3)
    program = build_subproblem(q_bar, alpha_bar, np.array([1, 3, 2]), pen, scenario)
    for _ in range(100):
        q = rng.uniform(-200.0, 200.0, size=2)
        alpha = rng.uniform(0.0, 1.0, size=(3, 3))
        np.fill_diagonal(alpha, 0.0)
        phi, phi_g = smooth_penalties(q, alpha, scenario)
        zeta_hat = float(rng.uniform(0.0, 2.0))
        x = _pack_point(zeta_hat, q, alpha, scenario)
        truth = zeta_hat + pen.rho1 * phi + pen.rho2 * phi_g / sca.LENGTH_SCALE_M**2
        assert program.objective_value(x) >= truth - 1e-9


def test_feasibility_check_and_default_init():
    easy = make_scenario([(0.0, 0.0), (100.0, 0.0)])
    q0, alpha0 = default_init(easy)
    ok, margins = feasibility_check(q0, alpha0, easy)
    assert ok and np.all(margins > 0.0)
    np.testing.assert_allclose(q0, [50.0, 0.0], atol=1e-12)
    # A hot primary link near device 0 rejects the centroid; the init walks
    # toward the tight device until the caps clear.
    tight = make_scenario([(0.0, 0.0), (300.0, 0.0)], gains=[100.0, 0.5])
    centroid_alpha = alpha_from_order((0, 1))
    ok_centroid, _ = feasibility_check(np.array([150.0, 0.0]), centroid_alpha, tight)
    assert not ok_centroid
    q1, alpha1 = default_init(tight)
    ok1, _ = feasibility_check(q1, alpha1, tight)
    assert ok1
    assert q1[0] < 150.0


def test_sca_reaches_near_optimal_on_k2(k2_symmetric):
    sol = sca_solve(k2_symmetric, tol=1e-5)
    assert sol.status == "optimal"
    assert sol.report.feasible
    assert sol.diagnostics["final_phi"] < PENALTY_THRESHOLD
    assert sol.diagnostics["final_phi_g"] < PENALTY_THRESHOLD
    opt = solve_optimal(k2_symmetric, tol=1e-6)
    assert sol.lifetime >= 0.95 * opt.lifetime
    # The returned order is consistent with the returned position.
    assert sol.order == distance_sorted_order(sol.q, k2_symmetric)


def test_sca_inner_loop_descends_at_frozen_penalties():
    scenario = make_scenario([(0.0, 0.0), (90.0, 20.0), (-60.0, 70.0)])
    pen = PenaltyState(rho1=10.0, rho2=10.0, b1=1.0, b2=1.0,
                       rho1_max=10.0, rho2_max=10.0, inner_cap=12, outer_cap=4)
    sol = sca_solve(scenario, penalties=pen, kernel_tol=1e-10)
    assert sol.status == "optimal"
    rows = [r for r in sol.diagnostics["trace"] if r["objective"] is not None]
    assert len(rows) >= 3
    for prev, cur in zip(rows, rows[1:]):
        if prev["outer"] != cur["outer"]:
            continue  # f may change between outer rounds
        scale = max(abs(prev["objective"]), 1e-12)
        assert cur["objective"] <= prev["objective"] + 1e-9 * scale


def test_sca_rejects_infeasible_start():
    scenario = make_scenario([(0.0, 0.0), (400.0, 0.0)], gains=[100.0, 100.0])
    sol = sca_solve(scenario, init_q=np.array([200.0, 0.0]),
                    init_alpha=alpha_from_order((0, 1)))
    assert sol.status == "infeasible"
    assert sol.lifetime == 0.0
    assert sol.diagnostics["reason"] == "initial point violates power caps"
    assert len(sol.diagnostics["margins_w"]) == 2


def test_sca_trace_and_determinism():
    scenario = make_scenario([(0.0, 0.0), (120.0, -30.0), (-50.0, 80.0)])
    a = sca_solve(scenario)
    b = sca_solve(scenario)
    assert a.status == "optimal"
    assert a.lifetime == b.lifetime
    np.testing.assert_array_equal(a.q, b.q)
    assert a.order == b.order
    trace = a.diagnostics["trace"]
    assert trace[-1]["objective"] is None  # extraction row
    assert trace[-1]["phi"] == 0.0 and trace[-1]["phi_g"] == 0.0
    outer_rows = a.diagnostics["outer_trace"]
    assert [r["outer"] for r in outer_rows] == list(range(1, len(outer_rows) + 1))
    lifetimes = [r["lifetime_best"] for r in outer_rows]
    assert all(y >= x for x, y in zip(lifetimes, lifetimes[1:]))


def test_penalty_state_validation_and_growth():
    with pytest.raises(ValueError):
        PenaltyState(rho1=0.0)
    with pytest.raises(ValueError):
        PenaltyState(b1=0.5)
    with pytest.raises(ValueError):
        PenaltyState(inner_cap=0)
    pen = PenaltyState(rho1=1.0, rho2=1.0, b1=10.0, b2=10.0, rho1_max=50.0, rho2_max=50.0)
    grown = pen.grown().grown()
    assert grown.rho1 == 50.0 and grown.rho2 == 50.0
    assert grown.saturated and not pen.saturated
