"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's closed forms: powers come
from a Jacobi fixed point of the raw QoS equalities, and locations from the
coarse-to-fine grid search in the kernel module.  Acceptance tests compare
solver output against these.
"""

import numpy as np
import pytest

from skylift import exact
from skylift.model import (
    Scenario,
    allowable_powers,
    channel_gains,
    db_to_linear,
    dbm_to_watts,
)


def make_scenario(positions, energies=None, gains=None, qos_rate=0.4,
                  altitude=100.0, ref_snr_db=60.0, noise_power=1e-3,
                  max_power=1.0, circuit_power=0.9,
                  interference_threshold_dbm=28.0, csi_error_var=1e-2,
                  violation_prob=1e-3) -> Scenario:
    """Scenario with evaluation-setup defaults and hand-picked geometry."""
    positions = np.asarray(positions, dtype=float)
    k = positions.shape[0]
    if energies is None:
        energies = np.full(k, 4e3)
    if gains is None:
        gains = np.full(k, 0.5)
    return Scenario(
        device_positions=positions,
        battery_energies=np.asarray(energies, dtype=float),
        uav_altitude=altitude,
        ref_snr=db_to_linear(ref_snr_db),
        noise_power=noise_power,
        max_power=max_power,
        circuit_power=circuit_power,
        qos_rate=qos_rate,
        interference_threshold=dbm_to_watts(interference_threshold_dbm),
        csi_error_var=csi_error_var,
        violation_prob=violation_prob,
        primary_gain_estimates=np.asarray(gains, dtype=float),
    )


def fixed_point_powers(q, order, scenario, max_iter=10000):
    """Jacobi fixed point of the QoS equalities gamma_k = 2^r* - 1.

    Updates every decode position simultaneously from the previous sweep, so
    it never exploits the triangular structure the closed form relies on.
    """
    h = channel_gains(q, scenario)
    growth = 2.0 ** scenario.qos_rate - 1.0
    k = scenario.device_count
    perm = list(order)
    p = np.zeros(k)
    for _ in range(max_iter):
        nxt = np.empty(k)
        for m in range(k):
            interf = scenario.noise_power + sum(
                p[perm[n]] * h[perm[n]] for n in range(m + 1, k)
            )
            nxt[perm[m]] = growth * interf / h[perm[m]]
        if np.allclose(nxt, p, rtol=1e-15, atol=0.0):
            return nxt
        p = nxt
    raise AssertionError("power fixed point did not converge")


def order_cost_fn(order, scenario):
    """Vectorized location cost for grid search, +inf where infeasible.

    Feasibility means: closed-form powers within caps and the decode order
    consistent with distances (both checked from raw arrays, no solver code).
    """
    w = scenario.device_positions
    h2 = scenario.uav_altitude ** 2
    c = exact.power_coefficients(scenario.device_count, scenario.qos_rate, scenario.ref_snr)
    caps = allowable_powers(scenario)
    energies = scenario.battery_energies
    perm = np.asarray(order, dtype=int)

    def cost(points):
        points = np.asarray(points, dtype=float)
        d2 = ((points[:, None, :] - w[None, :, :]) ** 2).sum(axis=-1)
        powers = np.empty_like(d2)
        powers[:, perm] = c[None, :] * (h2 + d2[:, perm])
        values = ((powers + scenario.circuit_power) / energies[None, :]).max(axis=1)
        ok = (powers <= caps[None, :] * (1.0 + 1e-12)).all(axis=1)
        ordered_d2 = d2[:, perm]
        slack = np.diff(ordered_d2, axis=1)
        ok &= (slack >= -1e-9 * (h2 + ordered_d2[:, :-1])).all(axis=1)
        return np.where(ok, values, np.inf)

    return cost


def grid_bounds(scenario, pad=0.5):
    """Bounding box of the devices, padded by `pad` of its span plus H."""
    w = scenario.device_positions
    lo = w.min(axis=0)
    hi = w.max(axis=0)
    span = max(float(np.max(hi - lo)), scenario.uav_altitude)
    margin = pad * span
    return ((lo[0] - margin, hi[0] + margin), (lo[1] - margin, hi[1] + margin))


ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter) -> None:
    """Echo one verdict line per acceptance criterion after the test run."""
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def k2_symmetric():
    """Two devices at (+-100, 0), r*=1, no binding power caps.

    For decode order (0, 1) the equal-cost location solves
    2 (H^2 + (x+100)^2) = H^2 + (x-100)^2, whose relevant root is
    x = -300 + 100 sqrt(7), about -35.425.
    """
    return make_scenario(
        positions=[(-100.0, 0.0), (100.0, 0.0)],
        qos_rate=1.0,
        interference_threshold_dbm=60.0,
    )


K2_ROOT_X = -300.0 + 100.0 * np.sqrt(7.0)
