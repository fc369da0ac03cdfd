"""Exact solver: closed-form powers, dual machinery, ellipsoid, enumeration."""

import itertools
import math

import numpy as np
import pytest

from conftest import (
    K2_ROOT_X,
    fixed_point_powers,
    grid_bounds,
    make_scenario,
    order_cost_fn,
)
from skylift import exact, kernel
from skylift.exact import (
    DegenerateDualError,
    DualIterate,
    closed_form_power,
    coeff_c,
    dual_location,
    dual_objective,
    dual_subgradients,
    ellipsoid_cut,
    feasibility_program,
    location_program,
    power_coefficients,
    solve_fixed_order,
    solve_optimal,
    zeta_scale,
)
from skylift.model import achievable_rates, allowable_powers, channel_gains


def test_power_coefficient_values():
    # K=2, r*=1, gamma0=1e6: c_1 = 1*2^1/1e6, c_2 = 1*2^0/1e6.
    c = power_coefficients(2, 1.0, 1e6)
    assert c == pytest.approx([2e-6, 1e-6], rel=1e-15)
    assert coeff_c(1, 2, 1.0, 1e6) == pytest.approx(2e-6, rel=1e-15)
    with pytest.raises(ValueError):
        coeff_c(0, 2, 1.0, 1e6)
    with pytest.raises(ValueError):
        coeff_c(3, 2, 1.0, 1e6)


def test_closed_form_matches_fixed_point_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        k = int(rng.integers(1, 7))
        scenario = make_scenario(
            positions=rng.uniform(-250.0, 250.0, size=(k, 2)),
            qos_rate=float(rng.uniform(0.2, 1.2)),
        )
        q = rng.uniform(-250.0, 250.0, size=2)
        order = tuple(rng.permutation(k).tolist())
        p = closed_form_power(q, order, scenario)
        p_ref = fixed_point_powers(q, order, scenario)
        np.testing.assert_allclose(p, p_ref, rtol=1e-9, atol=1e-15)


def test_closed_form_rates_are_exactly_qos():
    rng = np.random.default_rng(12)
    for _ in range(10):
        k = int(rng.integers(2, 6))
        scenario = make_scenario(
            positions=rng.uniform(-200.0, 200.0, size=(k, 2)),
            qos_rate=float(rng.uniform(0.2, 1.5)),
        )
        q = rng.uniform(-300.0, 300.0, size=2)
        order = tuple(rng.permutation(k).tolist())
        rates = achievable_rates(q, closed_form_power(q, order, scenario), order, scenario)
        np.testing.assert_allclose(rates, scenario.qos_rate, rtol=0.0, atol=1e-12)


def test_received_powers_follow_geometric_law():
    rng = np.random.default_rng(13)
    scenario = make_scenario(
        positions=rng.uniform(-200.0, 200.0, size=(5, 2)), qos_rate=0.7,
    )
    q = np.array([40.0, -15.0])
    order = (3, 0, 4, 1, 2)
    p = closed_form_power(q, order, scenario)
    received = p * channel_gains(q, scenario)
    along = received[list(order)]
    # Decreasing along the decode order with ratio exactly 2^r*.
    ratios = along[:-1] / along[1:]
    np.testing.assert_allclose(ratios, 2.0**scenario.qos_rate, rtol=1e-12)
    assert np.all(np.diff(along) < 0.0)


def test_zeta_scale_value():
    scenario = make_scenario([(0.0, 0.0)], energies=[2e3], max_power=0.5, circuit_power=0.9)
    assert zeta_scale(scenario) == pytest.approx((0.9 + 0.5) / 2e3, rel=1e-15)


def test_location_program_constraint_arithmetic(k2_symmetric):
    program = location_program((0, 1), k2_symmetric)
    assert program.n == 3
    assert len(program.quad_cons) == 4  # 2 lifetime rows + 2 cap disks
    assert program.ineq_A.shape == (1, 3)
    zref = zeta_scale(k2_symmetric)
    ell = exact.LENGTH_SCALE_M
    q = np.array([-50.0, 10.0])
    p = closed_form_power(q, (0, 1), k2_symmetric)
    zeta = float(np.max((p + k2_symmetric.circuit_power) / k2_symmetric.battery_energies))
    x_ok = np.array([zeta * 1.000001 / zref, q[0] / ell, q[1] / ell])
    assert program.max_violation(x_ok) <= 1e-9
    x_bad = np.array([zeta * 0.999 / zref, q[0] / ell, q[1] / ell])
    assert program.max_violation(x_bad) > 0.0
    # Ordering row: device 1 decoded first requires being on its side.
    flipped = location_program((1, 0), k2_symmetric)
    y = np.array([zeta * 2.0 / zref, -50.0 / ell, 0.0])
    assert flipped.max_violation(y) > 0.0


def test_feasibility_program_sign(k2_symmetric):
    sol = kernel.solve(feasibility_program((0, 1), k2_symmetric), tol=1e-8)
    assert sol.status == kernel.STATUS_OPTIMAL
    assert sol.objective < -1e-3  # strictly interior positions exist


def test_dual_location_single_device():
    scenario = make_scenario([(70.0, -30.0)])
    dual = DualIterate(np.array([3.0]), np.array([0.0]), np.zeros(0))
    np.testing.assert_allclose(dual_location(dual, (0,), scenario), [70.0, -30.0], atol=1e-12)
    with pytest.raises(DegenerateDualError):
        dual_location(DualIterate(np.zeros(1), np.zeros(1), np.zeros(0)), (0,), scenario)


def test_dual_objective_concavity_and_supergradient(k2_symmetric):
    rng = np.random.default_rng(17)
    order = (0, 1)
    for _ in range(20):
        x = DualIterate(rng.uniform(1e-6, 1e-3, 2), rng.uniform(0.0, 1e-4, 2), rng.uniform(0.0, 1e-6, 1))
        y = DualIterate(rng.uniform(1e-6, 1e-3, 2), rng.uniform(0.0, 1e-4, 2), rng.uniform(0.0, 1e-6, 1))
        gx = dual_objective(x, order, k2_symmetric)
        gy = dual_objective(y, order, k2_symmetric)
        mid = DualIterate(0.5 * (x.lam + y.lam), 0.5 * (x.mu + y.mu), 0.5 * (x.v + y.v))
        assert dual_objective(mid, order, k2_symmetric) >= 0.5 * (gx + gy) - 1e-12
        # eta0 is the negated supergradient: g(y) <= g(x) - eta0 . (y - x).
        q_star = dual_location(x, order, k2_symmetric)
        eta0, eta1, eta2 = dual_subgradients(q_star, x, order, k2_symmetric)
        step = y.to_vector() - x.to_vector()
        assert gy <= gx - float(eta0 @ step) + 1e-12
        np.testing.assert_allclose(eta1, -eta2, atol=0.0)
        np.testing.assert_allclose(eta1[:2], -k2_symmetric.battery_energies, atol=0.0)


def test_ellipsoid_cut_geometry():
    rng = np.random.default_rng(23)
    n = 4
    m = rng.normal(size=(n, n))
    shape = m @ m.T + n * np.eye(n)
    center = rng.normal(size=n)
    g = rng.normal(size=n)
    cut = ellipsoid_cut(center, shape, g)
    assert cut is not None
    new_center, new_shape = cut
    assert np.linalg.det(new_shape) < np.linalg.det(shape)
    # Every sampled point of the half-ellipsoid {g.x <= g.center} stays inside.
    chol = np.linalg.cholesky(shape)
    inv_new = np.linalg.inv(new_shape)
    kept = 0
    for _ in range(500):
        u = rng.normal(size=n)
        u /= np.linalg.norm(u)
        x = center + chol @ (u * rng.uniform() ** (1.0 / n))
        if g @ x <= g @ center:
            kept += 1
            r = x - new_center
            assert float(r @ inv_new @ r) <= 1.0 + 1e-9
    assert kept > 100


def test_ellipsoid_deep_cut_limits():
    n = 3
    shape = np.eye(n)
    center = np.zeros(n)
    g = np.array([1.0, 0.0, 0.0])
    # Depth beyond the ellipsoid radius along g removes everything.
    assert ellipsoid_cut(center, shape, g, depth=1.5) is None
    # Degenerate direction (g P g' = 0) yields no cut.
    assert ellipsoid_cut(center, np.diag([0.0, 1.0, 1.0]), g) is None
    cut = ellipsoid_cut(center, shape, g, depth=0.5)
    assert cut is not None
    new_center, new_shape = cut
    assert new_center[0] < 0.0
    # Deep cut shrinks volume faster than the central cut.
    central = ellipsoid_cut(center, shape, g, depth=0.0)
    assert np.linalg.det(new_shape) < np.linalg.det(central[1])


def test_solve_fixed_order_single_device():
    scenario = make_scenario([(80.0, -60.0)], qos_rate=0.8)
    sol = solve_fixed_order((0,), scenario, tol=1e-8)
    assert sol.status == "optimal"
    np.testing.assert_allclose(sol.q, [80.0, -60.0], atol=1e-3)
    c1 = coeff_c(1, 1, 0.8, scenario.ref_snr)
    zeta_expect = (c1 * scenario.uav_altitude**2 + scenario.circuit_power) / 4e3
    assert sol.zeta == pytest.approx(zeta_expect, rel=1e-6)
    cert = sol.dual_certificate
    assert cert["gap"] <= 1e-8 * sol.zeta * 1.01
    assert sum(l * e for l, e in zip(cert["lambda"], scenario.battery_energies)) == pytest.approx(1.0, abs=1e-6)
    assert sol.report.feasible


def test_solve_fixed_order_k2_fixture(k2_symmetric):
    sol = solve_fixed_order((0, 1), k2_symmetric, tol=1e-6)
    assert sol.status == "optimal"
    assert sol.diagnostics["stop"] == "gap"
    assert abs(sol.q[0] - K2_ROOT_X) < 0.5
    assert abs(sol.q[1]) < 0.5
    # The two lifetime rows are tight and the multipliers certify it.
    cert = sol.dual_certificate
    lam_e = sum(l * e for l, e in zip(cert["lambda"], k2_symmetric.battery_energies))
    assert lam_e == pytest.approx(1.0, abs=1e-6)
    assert cert["gap"] <= 1e-6 * sol.zeta * 1.01
    slack = sol.report.power_slacks
    assert np.all(np.asarray(slack) > 0.0)  # caps set loose on purpose


def test_fixed_order_mirrors_under_order_swap(k2_symmetric):
    sol = solve_fixed_order((1, 0), k2_symmetric, tol=1e-6)
    assert sol.status == "optimal"
    assert abs(sol.q[0] + K2_ROOT_X) < 0.5
    assert abs(sol.q[1]) < 0.5


def test_fixed_order_against_grid_oracle():
    rng = np.random.default_rng(29)
    for _ in range(3):
        k = 3
        scenario = make_scenario(
            positions=rng.uniform(-200.0, 200.0, size=(k, 2)),
            energies=rng.uniform(3e3, 6e3, size=k),
        )
        centroid = scenario.device_positions.mean(axis=0)
        d2 = ((centroid - scenario.device_positions) ** 2).sum(axis=1)
        order = tuple(np.lexsort((np.arange(k), d2)).tolist())
        sol = solve_fixed_order(order, scenario, tol=1e-6)
        ref = kernel.grid_oracle(order_cost_fn(order, scenario), grid_bounds(scenario))
        if sol.status == "optimal":
            assert math.isfinite(ref.value)
            assert abs(sol.zeta - ref.value) <= 1e-3 * ref.value
        else:
            assert not math.isfinite(ref.value)


def test_infeasible_when_cap_below_altitude_cost():
    scenario = make_scenario([(0.0, 0.0), (10.0, 0.0)], interference_threshold_dbm=-45.0)
    assert np.min(allowable_powers(scenario)) < coeff_c(1, 2, 0.4, scenario.ref_snr) * 1e4
    sol = solve_fixed_order((0, 1), scenario, tol=1e-6)
    assert sol.status == "infeasible"
    assert sol.lifetime == 0.0
    assert sol.diagnostics["reason"] == "power cap below altitude cost"
    assert {"position", "device", "cap_w", "needed_w"} <= set(sol.diagnostics)


def test_infeasible_when_ordering_conflicts_with_caps():
    # Device 0's cap confines q to a 300 m disk around it, but decoding
    # device 1 first requires x >= 500: the intersection is empty.
    scenario = make_scenario(
        positions=[(0.0, 0.0), (1000.0, 0.0)],
        gains=[20.0, 0.5],
    )
    caps = allowable_powers(scenario)
    c = power_coefficients(2, scenario.qos_rate, scenario.ref_snr)
    radius = math.sqrt(caps[0] / c[1] - scenario.uav_altitude**2)
    assert radius < 500.0
    sol = solve_fixed_order((1, 0), scenario, tol=1e-6)
    assert sol.status == "infeasible"
    assert sol.diagnostics["reason"] == "no position satisfies ordering and power caps"
    assert sol.diagnostics["min_slack"] > 0.0
    # The other order keeps q near device 0 and is feasible.
    assert solve_fixed_order((0, 1), scenario, tol=1e-6).status == "optimal"


def test_dominated_early_return():
    # Unequal batteries and a wide spacing keep the two orders' optima a
    # comfortable margin apart (at +-100 m they coincide exactly).
    scenario = make_scenario(
        positions=[(-150.0, 0.0), (150.0, 0.0)],
        energies=[4e3, 8e3],
        qos_rate=1.0,
        interference_threshold_dbm=60.0,
    )
    a = solve_fixed_order((0, 1), scenario, tol=1e-6)
    b = solve_fixed_order((1, 0), scenario, tol=1e-6)
    best, worse = (a, b) if a.zeta <= b.zeta else (b, a)
    assert worse.zeta > best.zeta * (1.0 + 1e-4)
    redo = solve_fixed_order(worse.order, scenario, tol=1e-6, zeta_cap=best.zeta)
    assert redo.status == "dominated"
    assert redo.lifetime == 0.0
    assert redo.diagnostics["dual_lb"] >= best.zeta
    assert redo.diagnostics["iterations"] < worse.dual_certificate["iterations"]


def test_solve_optimal_beats_every_order():
    rng = np.random.default_rng(31)
    scenario = make_scenario(
        positions=rng.uniform(-150.0, 150.0, size=(3, 2)),
        energies=rng.uniform(3e3, 6e3, size=3),
    )
    opt = solve_optimal(scenario, tol=1e-6)
    assert opt.status == "optimal"
    assert opt.diagnostics["orders_total"] == 6
    feasible = 0
    for perm in itertools.permutations(range(3)):
        sol = solve_fixed_order(perm, scenario, tol=1e-6)
        if sol.status != "optimal":
            continue
        feasible += 1
        assert opt.lifetime >= sol.lifetime - 1e-9
    # Pruned orders are never counted feasible, so the standalone count bounds it.
    assert feasible >= opt.diagnostics["orders_feasible"] >= 1
    # The winner is re-derivable: solving its order alone gives the same q.
    again = solve_fixed_order(opt.order, scenario, tol=1e-6)
    np.testing.assert_allclose(again.q, opt.q, atol=0.0)


def test_solve_optimal_enumeration_accounting():
    scenario = make_scenario([(0.0, 0.0), (40.0, 0.0), (-30.0, 50.0)])
    opt = solve_optimal(scenario, tol=1e-6)
    assert opt.status == "optimal"
    assert opt.diagnostics["orders_total"] == 6
    assert 1 <= opt.diagnostics["orders_feasible"] <= 6
    assert opt.dual_certificate["gap"] is not None


def test_solve_optimal_respects_order_cap():
    scenario = make_scenario([(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)])
    with pytest.raises(ValueError):
        solve_optimal(scenario, order_cap=2)


def test_solve_optimal_all_orders_infeasible():
    scenario = make_scenario([(0.0, 0.0), (50.0, 0.0)], interference_threshold_dbm=-45.0)
    sol = solve_optimal(scenario, tol=1e-6)
    assert sol.status == "infeasible"
    assert sol.diagnostics["reason"] == "every decoding order is infeasible"
    assert len(sol.diagnostics["orders"]) == 2


def test_location_solution_passes_kkt_audit(k2_symmetric):
    program = location_program((0, 1), k2_symmetric)
    sol = kernel.solve(program, tol=1e-8)
    assert sol.status == kernel.STATUS_OPTIMAL
    audit = kernel.verify_kkt(program, sol, tol=1e-6)
    assert audit.ok, audit.failures


def test_solver_is_deterministic(k2_symmetric):
    a = solve_fixed_order((0, 1), k2_symmetric, tol=1e-6)
    b = solve_fixed_order((0, 1), k2_symmetric, tol=1e-6)
    np.testing.assert_array_equal(a.q, b.q)
    assert a.zeta == b.zeta
    assert a.dual_certificate["iterations"] == b.dual_certificate["iterations"]
