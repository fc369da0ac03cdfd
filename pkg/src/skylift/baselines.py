"""Benchmark schemes: fixed-placement NOMA and jointly optimized FDMA.

The fixed-placement scheme parks the rotor at the geometric center of the
devices and only optimizes powers; at a fixed location the distance-ordering
constraint pins the decoding order (ties broken by device index), so the
closed-form powers settle the whole problem.  The FDMA benchmark splits the
band into K equal subbands (per-subband noise sigma^2/K), which gives each
device a closed-form required power p_k(q) = (2^(K r*) - 1)/(K gamma0) *
(H^2 + d_k^2); placement then reduces to a convex min-max program handled by
the convex kernel.
"""

from __future__ import annotations

import numpy as np

from . import kernel
from .exact import LENGTH_SCALE_M, closed_form_power, zeta_scale
from .model import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    PlacementSolution,
    Scenario,
    allowable_powers,
    channel_gains,
    distance_sorted_order,
    evaluate,
    geometric_centroid,
    squared_distances,
)


def solve_noma_fixed(scenario: Scenario) -> PlacementSolution:
    """Power-only NOMA benchmark at the device centroid.

    The order is distance-sorted ascending (the only order the consistency
    constraint admits at a fixed location); equidistant devices fall back to
    index order and the tie is recorded in diagnostics.
    """
    q = geometric_centroid(scenario)
    order = distance_sorted_order(q, scenario)
    d2 = squared_distances(q, scenario)
    ties = sorted(
        (int(a), int(b))
        for a in range(scenario.device_count)
        for b in range(a + 1, scenario.device_count)
        if d2[a] == d2[b]
    )
    diagnostics: dict = {"placement": "centroid"}
    if ties:
        diagnostics["distance_ties"] = ties

    powers = closed_form_power(q, order, scenario)
    caps = allowable_powers(scenario)
    rel = 1e-9 * np.maximum(1.0, caps)
    if np.any(powers > caps + rel):
        over = [int(k) for k in np.flatnonzero(powers > caps + rel)]
        diagnostics["reason"] = "required power exceeds allowable power at the centroid"
        diagnostics["devices_over_cap"] = over
        return PlacementSolution(
            algorithm="noma-p", status=STATUS_INFEASIBLE, q=q, powers=None,
            order=order, zeta=None, lifetime=0.0, diagnostics=diagnostics,
        )
    report = evaluate(q, powers, order, scenario)
    return PlacementSolution(
        algorithm="noma-p",
        status=STATUS_OPTIMAL,
        q=q,
        powers=powers,
        order=order,
        zeta=1.0 / report.lifetime,
        lifetime=report.lifetime,
        report=report,
        diagnostics=diagnostics,
    )


def fdma_power_coefficient(scenario: Scenario) -> float:
    """W per m^2 of (H^2 + d^2): (2^(K r*) - 1) / (K gamma0)."""
    k = scenario.device_count
    return float((2.0 ** (k * scenario.qos_rate) - 1.0) / (k * scenario.ref_snr))


def fdma_powers(q, scenario: Scenario) -> np.ndarray:
    """Per-device transmit power meeting the QoS on an equal 1/K subband.

    Rate model: (1/K) log2(1 + p h / (sigma^2/K)) >= r*, so the required
    received power is (sigma^2/K)(2^(K r*) - 1) regardless of the device.
    """
    coeff = fdma_power_coefficient(scenario)
    return coeff * (scenario.uav_altitude**2 + squared_distances(q, scenario))


def fdma_rates(q, powers, scenario: Scenario) -> np.ndarray:
    """Achieved per-device spectral efficiencies under the 1/K split."""
    k = scenario.device_count
    snr = np.asarray(powers) * channel_gains(q, scenario) / (scenario.noise_power / k)
    return np.log2(1.0 + snr) / k


def _fdma_location_program(scenario: Scenario) -> kernel.ConvexProgram:
    """min zeta_hat s.t. per-device lifetime rows and power-cap disks.

    Same scaled 3-variable layout as the exact solver's location program,
    with the FDMA power coefficient shared by every device.
    """
    ell = LENGTH_SCALE_M
    w = scenario.device_positions / ell
    h2 = scenario.uav_altitude**2 / ell**2
    zref = zeta_scale(scenario)
    coeff = fdma_power_coefficient(scenario) * ell**2
    caps = allowable_powers(scenario)
    wnorm = np.sum(w * w, axis=1)

    quad_cons = []
    for k in range(scenario.device_count):
        s = coeff / (zref * scenario.battery_energies[k])
        qmat = np.zeros((3, 3))
        qmat[1, 1] = qmat[2, 2] = s
        a_vec = np.array([-1.0, -2.0 * s * w[k, 0], -2.0 * s * w[k, 1]])
        b = s * (wnorm[k] + h2) + scenario.circuit_power / (zref * scenario.battery_energies[k])
        quad_cons.append(kernel.QuadTerm(Q=qmat, a=a_vec, b=float(b)))
        u = coeff / caps[k]
        qmat = np.zeros((3, 3))
        qmat[1, 1] = qmat[2, 2] = u
        a_vec = np.array([0.0, -2.0 * u * w[k, 0], -2.0 * u * w[k, 1]])
        quad_cons.append(kernel.QuadTerm(Q=qmat, a=a_vec, b=float(u * (wnorm[k] + h2) - 1.0)))

    return kernel.ConvexProgram(
        n=3,
        obj_linear=np.array([1.0, 0.0, 0.0]),
        quad_cons=tuple(quad_cons),
        lower=np.array([0.0, -np.inf, -np.inf]),
        upper=None,
        names=("zeta", "qx", "qy"),
    )


def solve_fdma(scenario: Scenario, tol: float = 1e-8) -> PlacementSolution:
    """Joint placement/power FDMA benchmark.

    The location problem is convex (each row is a disk in q), so the kernel
    answer is globally optimal; powers are recomputed in closed form at the
    returned location.  The decoding-order field stays empty: FDMA performs
    no interference cancellation.  The feasibility audit (rates, caps) lives
    in diagnostics because the SIC-shaped report does not apply.
    """
    program = _fdma_location_program(scenario)
    sol = kernel.solve(program, tol=tol)
    if sol.status == kernel.STATUS_INFEASIBLE:
        return PlacementSolution(
            algorithm="fdma", status=STATUS_INFEASIBLE, q=None, powers=None,
            order=None, zeta=None, lifetime=0.0,
            diagnostics={"reason": "power caps exclude every location"},
        )
    if sol.status != kernel.STATUS_OPTIMAL or sol.x is None:
        return PlacementSolution(
            algorithm="fdma", status=sol.status, q=None, powers=None,
            order=None, zeta=None, lifetime=0.0,
            diagnostics={"reason": f"location solve ended with status {sol.status}"},
        )
    q = np.asarray(sol.x[1:3], dtype=float) * LENGTH_SCALE_M
    powers = fdma_powers(q, scenario)
    caps = allowable_powers(scenario)
    rates = fdma_rates(q, powers, scenario)
    lifetime = float(np.min(scenario.battery_energies / (powers + scenario.circuit_power)))
    diagnostics = {
        "rates_bps_hz": [float(r) for r in rates],
        "rate_slacks": [float(r - scenario.qos_rate) for r in rates],
        "power_margins_w": [float(c - p) for c, p in zip(caps, powers)],
        "kernel_iterations": sol.iterations,
        "subband_share": 1.0 / scenario.device_count,
    }
    return PlacementSolution(
        algorithm="fdma",
        status=STATUS_OPTIMAL,
        q=q,
        powers=powers,
        order=None,
        zeta=1.0 / lifetime,
        lifetime=lifetime,
        diagnostics=diagnostics,
    )
