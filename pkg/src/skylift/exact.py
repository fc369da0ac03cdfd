"""Globally optimal joint UAV placement, power and SIC order.

For a fixed decoding order the QoS-tight transmit powers have a closed form
(a geometric received-power ladder), which collapses the joint problem to a
convex 2-D location problem.  That location problem is solved through its
Lagrange dual with a constrained ellipsoid method: feasibility cuts keep the
multipliers non-negative and on the normalization hyperplane sum(lambda_m *
E_pi(m)) = 1, objective cuts use the exact dual supergradients, and the
incumbent primal candidate supplies an upper bound so the loop can stop on
duality gap.  The global solver enumerates all K! decoding orders with cheap
dominance pruning and returns the lexicographically smallest optimum.

Decode positions m are 1-based in the scalar coefficient API (c_1 is the
power coefficient of the first-decoded device); orders remain 0-based device
index tuples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernel
from .model import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    PlacementSolution,
    Scenario,
    allowable_powers,
    evaluate,
    squared_distances,
    validate_order,
)

LENGTH_SCALE_M = 100.0  # kernel programs measure lengths in units of 100 m

STATUS_DOMINATED = "dominated"  # internal: pruned by an incumbent during enumeration


class DegenerateDualError(Exception):
    """Raised when the dual location formula has a zero denominator."""


class ExactSolverError(Exception):
    """Ellipsoid non-convergence; carries the last iterate and duality gap."""

    def __init__(self, message: str, last_iterate: "DualIterate", gap: float):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.gap = gap


def coeff_c(m: int, device_count: int, qos_rate: float, ref_snr: float) -> float:
    """Power coefficient c_m [W/m^2] of decode position m (1-based).

    c_m = (2^r* - 1) * 2^((K-m) r*) / gamma_0; the device decoded m-th needs
    transmit power c_m * (H^2 + d^2) to hit the QoS rate exactly.
    """
    if not 1 <= m <= device_count:
        raise ValueError(f"position {m} out of range 1..{device_count}")
    return (2.0**qos_rate - 1.0) * 2.0 ** ((device_count - m) * qos_rate) / ref_snr


def power_coefficients(device_count: int, qos_rate: float, ref_snr: float) -> np.ndarray:
    """All c_m for m = 1..K as an array indexed by decode position - 1."""
    m = np.arange(1, device_count + 1)
    return (2.0**qos_rate - 1.0) * 2.0 ** ((device_count - m) * qos_rate) / ref_snr


def closed_form_power(q: np.ndarray, order, scenario: Scenario) -> np.ndarray:
    """QoS-tight transmit powers at UAV position q, indexed by device.

    p_pi(m) = c_m (H^2 + ||q - w_pi(m)||^2); substituting into the SIC rate
    expressions makes every achieved rate equal r* exactly, for any q and any
    order (the ordering constraint governs decodability, not this algebra).
    """
    perm = validate_order(order, scenario.device_count)
    c = power_coefficients(scenario.device_count, scenario.qos_rate, scenario.ref_snr)
    d2 = squared_distances(q, scenario)
    powers = np.empty(scenario.device_count)
    h2 = scenario.uav_altitude**2
    for m, dev in enumerate(perm):
        powers[dev] = c[m] * (h2 + d2[dev])
    return powers


def zeta_scale(scenario: Scenario) -> float:
    """Normalization for the slack objective: (P_c + P_max) / min E, in 1/s."""
    return (scenario.circuit_power + scenario.max_power) / float(np.min(scenario.battery_energies))


@dataclass(frozen=True)
class DualIterate:
    """Multipliers of the fixed-order location problem, position-ordered.

    lam: lifetime rows (K), mu: power-cap rows (K), v: ordering rows (K-1).
    """

    lam: np.ndarray
    mu: np.ndarray
    v: np.ndarray

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.lam, self.mu, self.v])

    @staticmethod
    def from_vector(vec: np.ndarray, device_count: int) -> "DualIterate":
        k = device_count
        vec = np.asarray(vec, dtype=float)
        return DualIterate(vec[:k].copy(), vec[k : 2 * k].copy(), vec[2 * k :].copy())


@dataclass(frozen=True)
class _OrderData:
    """Position-ordered constants of the fixed-order location problem."""

    perm: tuple[int, ...]
    positions: np.ndarray  # (K, 2) w_pi(m)
    energies: np.ndarray   # (K,)
    caps: np.ndarray       # (K,) allowable powers
    c: np.ndarray          # (K,) power coefficients
    p_bar: np.ndarray      # (K,) disk budgets: H^2 + d^2 <= p_bar
    h2: np.ndarray         # scalar H^2 as 0-d array
    two_delta: np.ndarray  # (K-1, 2) rows 2 (w_{m+1} - w_m)
    delta_rhs: np.ndarray  # (K-1,) ||w_{m+1}||^2 - ||w_m||^2


def _order_data(order, scenario: Scenario) -> _OrderData:
    perm = validate_order(order, scenario.device_count)
    idx = list(perm)
    pos = scenario.device_positions[idx]
    c = power_coefficients(scenario.device_count, scenario.qos_rate, scenario.ref_snr)
    caps = allowable_powers(scenario)[idx]
    diff = pos[1:] - pos[:-1]
    norms = np.sum(pos * pos, axis=1)
    return _OrderData(
        perm=perm,
        positions=pos,
        energies=scenario.battery_energies[idx],
        caps=caps,
        c=c,
        p_bar=caps / c,
        h2=np.float64(scenario.uav_altitude**2),
        two_delta=2.0 * diff,
        delta_rhs=norms[1:] - norms[:-1],
    )


def dual_location(dual: DualIterate, order, scenario: Scenario) -> np.ndarray:
    """Lagrangian-minimizing UAV position for the given multipliers.

    q* = [sum (c_m lam_m + mu_m) w_pi(m) + sum v_m (w_pi(m) - w_pi(m+1))]
         / sum (c_m lam_m + mu_m)
    """
    data = _order_data(order, scenario)
    weights = data.c * np.asarray(dual.lam, dtype=float) + np.asarray(dual.mu, dtype=float)
    denom = float(np.sum(weights))
    scale = float(np.max(data.c / np.max(scenario.battery_energies)))
    if denom <= 1e-14 * max(scale, 1e-30):
        raise DegenerateDualError("sum of c_m*lambda_m + mu_m is not positive")
    v = np.asarray(dual.v, dtype=float)
    num = weights @ data.positions - v @ (data.positions[1:] - data.positions[:-1])
    return num / denom


def dual_objective(dual: DualIterate, order, scenario: Scenario) -> float:
    """Partial dual value g(lam, mu, v) = min_q L(q, .), a concave function.

    On the hyperplane sum(lam_m E_pi(m)) = 1 this is the dual of the location
    problem and lower-bounds its optimal zeta.
    """
    data = _order_data(order, scenario)
    q = dual_location(dual, order, scenario)
    d2 = np.sum((q[None, :] - data.positions) ** 2, axis=1)
    life = data.c * (d2 + data.h2) + scenario.circuit_power
    ordering = data.two_delta @ q - data.delta_rhs if data.two_delta.shape[0] else np.zeros(0)
    return float(
        np.asarray(dual.lam) @ life
        + np.asarray(dual.mu) @ (data.h2 + d2 - data.p_bar)
        + np.asarray(dual.v) @ ordering
    )


def dual_subgradients(q_star: np.ndarray, dual: DualIterate, order, scenario: Scenario):
    """Subgradient vectors (eta0, eta1, eta2) at q* for the ellipsoid cuts.

    eta0 is the negated supergradient of the partial dual (objective cut for
    the minimization form); eta1/eta2 are the +-E_pi(m) rows of the split
    equality sum(lam_m E_pi(m)) = 1: eta1 for the >= 1 side, eta2 = -eta1.
    """
    data = _order_data(order, scenario)
    q = np.asarray(q_star, dtype=float)
    d2 = np.sum((q[None, :] - data.positions) ** 2, axis=1)
    k = len(data.perm)
    dlam = -(data.c * (d2 + data.h2) + scenario.circuit_power)
    dmu = -(data.h2 + d2 - data.p_bar)
    dv = -(data.two_delta @ q - data.delta_rhs) if k > 1 else np.zeros(0)
    eta0 = np.concatenate([dlam, dmu, dv])
    eta1 = np.concatenate([-data.energies, np.zeros(k), np.zeros(k - 1)])
    return eta0, eta1, -eta1


def ellipsoid_cut(center: np.ndarray, shape: np.ndarray, g: np.ndarray, depth: float = 0.0):
    """One (possibly deep) ellipsoid update for the halfspace g'x <= g'center - depth.

    Returns (center', shape') or None when the halfspace misses the ellipsoid
    entirely (depth too large).  depth = 0 is the central cut, which shrinks
    the volume by at least exp(-1/(2n)).
    """
    n = center.shape[0]
    pg = shape @ g
    gpg = float(g @ pg)
    if gpg <= 0.0 or not math.isfinite(gpg):
        return None
    norm = math.sqrt(gpg)
    alpha = depth / norm
    if alpha >= 1.0:
        return None
    alpha = max(alpha, -1.0 / n + 1e-12)
    gamma = (1.0 + n * alpha) / (n + 1.0)
    sigma = 2.0 * gamma / (1.0 + alpha)
    dilation = n * n * (1.0 - alpha * alpha) / (n * n - 1.0)
    new_center = center - gamma * pg / norm
    new_shape = dilation * (shape - sigma * np.outer(pg, pg) / gpg)
    new_shape = 0.5 * (new_shape + new_shape.T)
    return new_center, new_shape


def location_program(order, scenario: Scenario) -> kernel.ConvexProgram:
    """The fixed-order location problem as a canonical convex program.

    Variables (zeta_hat, qx_hat, qy_hat): slack normalized by zeta_scale,
    lengths in units of LENGTH_SCALE_M.  Rows: K lifetime quadratics, K
    power-cap disks, K-1 linear ordering constraints.
    """
    data = _order_data(order, scenario)
    k = len(data.perm)
    ell = LENGTH_SCALE_M
    zref = zeta_scale(scenario)
    w = data.positions / ell
    h2 = float(data.h2) / ell**2
    quads = []
    for m in range(k):
        s = data.c[m] * ell**2 / (zref * data.energies[m])
        quads.append(kernel.QuadTerm(
            Q=np.diag([0.0, s, s]),
            a=np.array([-1.0, -2.0 * s * w[m, 0], -2.0 * s * w[m, 1]]),
            b=s * (w[m] @ w[m] + h2) + scenario.circuit_power / (zref * data.energies[m]),
        ))
    for m in range(k):
        u = data.c[m] * ell**2 / data.caps[m]
        quads.append(kernel.QuadTerm(
            Q=np.diag([0.0, u, u]),
            a=np.array([0.0, -2.0 * u * w[m, 0], -2.0 * u * w[m, 1]]),
            b=u * (w[m] @ w[m] + h2) - 1.0,
        ))
    ineq_A = ineq_b = None
    if k > 1:
        ineq_A = np.column_stack([np.zeros(k - 1), data.two_delta / ell])
        ineq_b = data.delta_rhs / ell**2
    return kernel.ConvexProgram(
        n=3,
        obj_linear=np.array([1.0, 0.0, 0.0]),
        quad_cons=tuple(quads),
        ineq_A=ineq_A,
        ineq_b=ineq_b,
        lower=np.array([0.0, -np.inf, -np.inf]),
        names=("zeta", "qx", "qy"),
    )


def feasibility_program(order, scenario: Scenario) -> kernel.ConvexProgram:
    """Min-slack program deciding whether the order admits any feasible q.

    Variables (t, qx_hat, qy_hat); minimizes the worst violation t of the
    ordering rows and power-cap disks.  t* <= 0 means the order is feasible.
    """
    data = _order_data(order, scenario)
    k = len(data.perm)
    ell = LENGTH_SCALE_M
    w = data.positions / ell
    h2 = float(data.h2) / ell**2
    quads = []
    for m in range(k):
        u = data.c[m] * ell**2 / data.caps[m]
        quads.append(kernel.QuadTerm(
            Q=np.diag([0.0, u, u]),
            a=np.array([-1.0, -2.0 * u * w[m, 0], -2.0 * u * w[m, 1]]),
            b=u * (w[m] @ w[m] + h2) - 1.0,
        ))
    ineq_A = ineq_b = None
    if k > 1:
        scale = np.maximum(h2, np.abs(data.delta_rhs / ell**2))
        ineq_A = np.column_stack([-scale, data.two_delta / ell])
        ineq_b = data.delta_rhs / ell**2
    return kernel.ConvexProgram(
        n=3,
        obj_linear=np.array([1.0, 0.0, 0.0]),
        quad_cons=tuple(quads),
        ineq_A=ineq_A,
        ineq_b=ineq_b,
        names=("slack", "qx", "qy"),
    )


def _projection_program(order, scenario: Scenario, q_target: np.ndarray) -> kernel.ConvexProgram:
    """Nearest feasible point to q_target (scaled coords) for the given order."""
    data = _order_data(order, scenario)
    k = len(data.perm)
    ell = LENGTH_SCALE_M
    w = data.positions / ell
    h2 = float(data.h2) / ell**2
    t = np.asarray(q_target, dtype=float) / ell
    quads = []
    for m in range(k):
        u = data.c[m] * ell**2 / data.caps[m]
        quads.append(kernel.QuadTerm(
            Q=u * np.eye(2),
            a=-2.0 * u * w[m],
            b=u * (w[m] @ w[m] + h2) - 1.0,
        ))
    ineq_A = data.two_delta / ell if k > 1 else None
    ineq_b = data.delta_rhs / ell**2 if k > 1 else None
    return kernel.ConvexProgram(
        n=2,
        obj_linear=-2.0 * t,
        obj_constant=float(t @ t),
        obj_quads=(kernel.QuadTerm(Q=np.eye(2), a=np.zeros(2), b=0.0),),
        ineq_A=ineq_A,
        ineq_b=ineq_b,
        names=("qx", "qy"),
    )


def _zeta_at(q: np.ndarray, data: _OrderData, scenario: Scenario) -> float:
    d2 = np.sum((np.asarray(q)[None, :] - data.positions) ** 2, axis=1)
    return float(np.max((data.c * (d2 + data.h2) + scenario.circuit_power) / data.energies))


def _primal_feasible(q: np.ndarray, data: _OrderData, tol: float = 1e-9) -> bool:
    d2 = np.sum((np.asarray(q)[None, :] - data.positions) ** 2, axis=1)
    if np.any(data.h2 + d2 - data.p_bar > tol * np.maximum(float(data.h2), data.p_bar)):
        return False
    if data.two_delta.shape[0]:
        if np.any(data.two_delta @ q - data.delta_rhs > tol * (float(data.h2) + d2[:-1])):
            return False
    return True


def _build_solution(q: np.ndarray, order, scenario: Scenario, certificate: dict,
                    diagnostics: dict) -> PlacementSolution:
    powers = closed_form_power(q, order, scenario)
    report = evaluate(q, powers, order, scenario)
    zeta = float(np.max((powers + scenario.circuit_power) / scenario.battery_energies))
    return PlacementSolution(
        algorithm="op-noma-j",
        status=STATUS_OPTIMAL,
        q=np.asarray(q, dtype=float),
        powers=powers,
        order=tuple(order),
        zeta=zeta,
        lifetime=1.0 / zeta,
        report=report,
        dual_certificate=certificate,
        diagnostics=diagnostics,
    )


def _infeasible(order, reason: str, detail: dict | None = None) -> PlacementSolution:
    diag = {"reason": reason}
    if detail:
        diag.update(detail)
    return PlacementSolution(
        algorithm="op-noma-j",
        status=STATUS_INFEASIBLE,
        q=None,
        powers=None,
        order=tuple(order) if order is not None else None,
        zeta=None,
        lifetime=0.0,
        diagnostics=diag,
    )


def solve_fixed_order(order, scenario: Scenario, tol: float = 1e-6,
                      max_iter: int = 100000, radius: float = 1e3,
                      zeta_cap: float | None = None) -> PlacementSolution:
    """Optimal UAV position and powers for one decoding order.

    Runs the constrained ellipsoid method on the Lagrange dual: negativity
    and split-equality feasibility cuts, supergradient objective cuts, primal
    candidates recovered from the KKT location formula.  Stops on relative
    duality gap <= tol or on ellipsoid collapse; raises ExactSolverError after
    max_iter.  With zeta_cap set (order enumeration), returns early with
    status "dominated" once the dual bound proves the order cannot beat it.
    """
    data = _order_data(order, scenario)
    k = len(data.perm)
    h2 = float(data.h2)
    pc = scenario.circuit_power

    if np.min(data.p_bar) < h2:
        worst = int(np.argmin(data.p_bar - h2))
        return _infeasible(data.perm, "power cap below altitude cost", {
            "position": worst, "device": data.perm[worst],
            "cap_w": float(data.caps[worst]),
            "needed_w": float(data.c[worst] * h2),
        })

    feas = kernel.solve(feasibility_program(data.perm, scenario), tol=1e-8)
    if feas.status != kernel.STATUS_OPTIMAL or feas.objective > 1e-7:
        return _infeasible(data.perm, "no position satisfies ordering and power caps", {
            "min_slack": feas.objective if feas.objective is not None else None,
        })

    # Diagonal preconditioning: y = x / S with S chosen so supergradient
    # components are O(1); the lambda block becomes y_m = lam_m E_pi(m), so
    # the equality is sum(y_lam) = 1 and the spec radius 1e3 covers optima.
    diam2 = float(np.max(np.sum(
        (data.positions[:, None, :] - data.positions[None, :, :]) ** 2, axis=-1))) if k > 1 else h2
    s_mu = np.maximum(h2, data.p_bar - h2)
    s_v = np.full(k - 1, h2 + diam2)
    scale = np.concatenate([1.0 / data.energies, 1.0 / s_mu, 1.0 / s_v])

    n = 3 * k - 1
    center = np.zeros(n)
    center[:k] = 1.0 / k
    shape = radius**2 * np.eye(n)
    band = 1e-7

    best_lb = -np.inf
    best_dual: DualIterate | None = None
    best_ub = np.inf
    best_q: np.ndarray | None = None

    # Strictly interior point from the precheck seeds the upper bound.
    if feas.objective < -1e-9:
        q_seed = np.asarray(feas.x[1:], dtype=float) * LENGTH_SCALE_M
        if _primal_feasible(q_seed, data):
            best_ub = _zeta_at(q_seed, data, scenario)
            best_q = q_seed

    counts = {"negativity": 0, "equality": 0, "objective": 0}
    pos_diff = data.positions[1:] - data.positions[:-1]
    status = None
    it = 0
    for it in range(1, max_iter + 1):
        i = int(np.argmin(center))
        if center[i] < 0.0:
            g = np.zeros(n)
            g[i] = -1.0
            depth = -center[i]
            counts["negativity"] += 1
        else:
            s = float(np.sum(center[:k])) - 1.0
            if abs(s) > band:
                g = np.zeros(n)
                g[:k] = 1.0 if s > 0 else -1.0
                depth = abs(s) - band
                counts["equality"] += 1
            else:
                counts["objective"] += 1
                y_lam = np.clip(center[:k], 0.0, None)
                y_lam = y_lam / float(np.sum(y_lam))
                lam = y_lam / data.energies
                mu = center[k : 2 * k] / s_mu
                v = center[2 * k :] / s_v
                weights = data.c * lam + mu
                q_star = (weights @ data.positions - v @ pos_diff) / float(np.sum(weights))
                d2 = np.sum((q_star[None, :] - data.positions) ** 2, axis=1)
                life = data.c * (d2 + h2) + pc
                ordering = data.two_delta @ q_star - data.delta_rhs if k > 1 else np.zeros(0)
                g_val = float(lam @ life + mu @ (h2 + d2 - data.p_bar) + v @ ordering)
                if g_val > best_lb:
                    best_lb = g_val
                    best_dual = DualIterate(lam.copy(), mu.copy(), v.copy())
                if _primal_feasible(q_star, data):
                    zeta_cand = float(np.max(life / data.energies))
                    if zeta_cand < best_ub:
                        best_ub = zeta_cand
                        best_q = q_star.copy()
                if best_ub - best_lb <= tol * max(best_ub, 1e-12):
                    status = "gap"
                    break
                if zeta_cap is not None and best_lb >= zeta_cap * (1.0 + 10.0 * tol):
                    return PlacementSolution(
                        algorithm="op-noma-j", status=STATUS_DOMINATED, q=None,
                        powers=None, order=data.perm, zeta=None, lifetime=0.0,
                        diagnostics={"dual_lb": best_lb, "iterations": it},
                    )
                eta_x = np.concatenate([-life, -(h2 + d2 - data.p_bar), -ordering])
                g = eta_x * scale
                y_hat = center.copy()
                y_hat[:k] = y_lam
                depth = float(g @ (center - y_hat)) + (best_lb - g_val)
        cut = ellipsoid_cut(center, shape, g, depth)
        if cut is None:
            status = "collapse"
            break
        center, shape = cut
        if it % 64 == 0 and math.sqrt(max(float(np.trace(shape)), 0.0)) < 1e-6:
            status = "radius"
            break
    else:
        status = "maxiter"

    if best_q is None or not math.isfinite(best_ub):
        # Recover a primal point by projecting the dual location (or the
        # device centroid) onto the feasible set.
        target = dual_location(best_dual, data.perm, scenario) if best_dual is not None \
            else np.mean(data.positions, axis=0)
        proj = kernel.solve(_projection_program(data.perm, scenario, target), tol=1e-8)
        if proj.status != kernel.STATUS_OPTIMAL:
            return _infeasible(data.perm, "primal recovery failed", {"stage": "projection"})
        best_q = np.asarray(proj.x, dtype=float) * LENGTH_SCALE_M
        best_ub = _zeta_at(best_q, data, scenario)

    gap = best_ub - best_lb
    if status == "maxiter" and gap > 100.0 * tol * max(best_ub, 1e-12):
        last = best_dual if best_dual is not None else DualIterate.from_vector(
            np.concatenate([center[:k] / data.energies, center[k:2*k] / s_mu, center[2*k:] / s_v]), k)
        raise ExactSolverError(
            f"ellipsoid did not converge in {max_iter} iterations (gap {gap:.3e})",
            last_iterate=last, gap=float(gap),
        )

    certificate = {
        "lambda": [float(x) for x in best_dual.lam] if best_dual is not None else None,
        "mu": [float(x) for x in best_dual.mu] if best_dual is not None else None,
        "v": [float(x) for x in best_dual.v] if best_dual is not None else None,
        "dual_objective": float(best_lb) if math.isfinite(best_lb) else None,
        "primal_objective": float(best_ub),
        "gap": float(gap) if math.isfinite(gap) else None,
        "iterations": it,
    }
    diagnostics = {"cuts": counts, "stop": status}
    return _build_solution(best_q, data.perm, scenario, certificate, diagnostics)


def solve_optimal(scenario: Scenario, tol: float = 1e-6, order_cap: int = 8,
                  max_iter: int = 100000) -> PlacementSolution:
    """Global optimum over all K! decoding orders.

    Enumerates permutations lexicographically; an order is skipped when its
    position-wise lower bound max_m (c_m H^2 + P_c)/E_pi(m) already loses to
    the incumbent, and per-order dual bounds abort dominated solves early.
    The first order to reach the best zeta wins, so ties break to the
    lexicographically smallest permutation.
    """
    k = scenario.device_count
    if k > order_cap:
        raise ValueError(f"K = {k} exceeds order enumeration cap {order_cap}")
    c = power_coefficients(k, scenario.qos_rate, scenario.ref_snr)
    h2 = scenario.uav_altitude**2
    pc = scenario.circuit_power
    energies = scenario.battery_energies
    best: PlacementSolution | None = None
    reasons: dict[str, str] = {}
    feasible_orders = 0
    for perm in itertools.permutations(range(k)):
        if best is not None:
            lb0 = float(np.max((c * h2 + pc) / energies[list(perm)]))
            if lb0 > best.zeta:
                reasons[str(list(perm))] = "dominated by position-wise bound"
                continue
        sol = solve_fixed_order(
            perm, scenario, tol=tol, max_iter=max_iter,
            zeta_cap=best.zeta if best is not None else None,
        )
        if sol.status == STATUS_DOMINATED:
            reasons[str(list(perm))] = "dominated by incumbent dual bound"
            continue
        if sol.status != STATUS_OPTIMAL:
            reasons[str(list(perm))] = sol.diagnostics.get("reason", "infeasible")
            continue
        feasible_orders += 1
        if best is None or sol.zeta < best.zeta:
            best = sol
    if best is None:
        return PlacementSolution(
            algorithm="op-noma-j",
            status=STATUS_INFEASIBLE,
            q=None, powers=None, order=None, zeta=None, lifetime=0.0,
            diagnostics={"reason": "every decoding order is infeasible", "orders": reasons},
        )
    diagnostics = dict(best.diagnostics)
    diagnostics["orders_total"] = math.factorial(k)
    diagnostics["orders_feasible"] = feasible_orders
    return PlacementSolution(
        algorithm="op-noma-j",
        status=best.status,
        q=best.q,
        powers=best.powers,
        order=best.order,
        zeta=best.zeta,
        lifetime=best.lifetime,
        report=best.report,
        dual_certificate=best.dual_certificate,
        diagnostics=diagnostics,
    )
