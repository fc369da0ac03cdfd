"""Low-complexity solver: binary SIC-matrix relaxation with smooth penalties.

The decoding order is re-expressed as a K x K binary matrix alpha
(alpha[k, j] = 1 when device k is decoded before device j) constrained by a
zero diagonal, pair complementarity and transitivity; the decode position of
device k is then f(k) = K - sum_j alpha[k, j], a bijection for every
consistent binary matrix.  Binary-ness and order/distance consistency are
moved into the objective as smooth penalties (phi, phi_g) with growing
weights, non-convex pieces are replaced by tight convex majorizers at the
current iterate, and the resulting convex subproblems are solved by the
convex kernel inside an alternating loop that re-derives f between rounds.

The subproblem works in scaled units (lengths /100 m, slack normalized);
reported penalties and trace rows are always in model units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernel
from .exact import LENGTH_SCALE_M, closed_form_power, power_coefficients, zeta_scale
from .model import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    PlacementSolution,
    Scenario,
    allowable_powers,
    distance_sorted_order,
    evaluate,
    geometric_centroid,
    squared_distances,
    validate_order,
)

PENALTY_THRESHOLD = 1e-4  # convergence bar for both phi and phi_g


class SicStructureError(Exception):
    """Raised when a SIC matrix is not binary-feasible."""


@dataclass(frozen=True)
class PenaltyState:
    """Penalty weights and growth schedule for the smooth reformulation."""

    rho1: float = 1e-2
    rho2: float = 1e-2
    b1: float = 5.0
    b2: float = 5.0
    rho1_max: float = 1e6
    rho2_max: float = 1e6
    inner_cap: int = 50
    outer_cap: int = 30

    def __post_init__(self) -> None:
        if min(self.rho1, self.rho2) <= 0 or min(self.b1, self.b2) < 1.0:
            raise ValueError("penalty weights must be positive with growth >= 1")
        if self.inner_cap < 1 or self.outer_cap < 1:
            raise ValueError("iteration caps must be at least 1")

    @property
    def saturated(self) -> bool:
        return self.rho1 >= self.rho1_max and self.rho2 >= self.rho2_max

    def grown(self) -> "PenaltyState":
        return replace(
            self,
            rho1=min(self.b1 * self.rho1, self.rho1_max),
            rho2=min(self.b2 * self.rho2, self.rho2_max),
        )


def _as_alpha(alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("alpha must be a square matrix")
    return a


def decode_positions(alpha, tol: float = 1e-3) -> np.ndarray:
    """Decode positions f(k) = K - sum_j alpha[k, j] for a binary-feasible alpha.

    Positions are 1-based (1 = decoded first).  Raises SicStructureError when
    entries are not binary within tol, the diagonal is non-zero, some pair
    does not sum to one, transitivity fails, or f is not a bijection.
    """
    a = _as_alpha(alpha)
    k = a.shape[0]
    rounded = np.round(a)
    if np.max(np.abs(a - rounded)) > tol:
        raise SicStructureError("alpha entries are not binary within tolerance")
    a = rounded
    if np.any(np.diag(a) != 0):
        raise SicStructureError("alpha diagonal must be zero")
    off = ~np.eye(k, dtype=bool)
    if np.any((a + a.T)[off] != 1):
        raise SicStructureError("alpha[k,j] + alpha[j,k] must equal 1 for k != j")
    if k >= 3:
        # C[k,j,i] = a[k,j] + a[j,i] - a[k,i] must stay <= 1 on distinct triples.
        c = a[:, :, None] + a[None, :, :] - a[:, None, :]
        idx = np.arange(k)
        distinct = (
            (idx[:, None, None] != idx[None, :, None])
            & (idx[None, :, None] != idx[None, None, :])
            & (idx[:, None, None] != idx[None, None, :])
        )
        if np.any(c[distinct] > 1):
            raise SicStructureError("alpha violates transitivity")
    f = (k - np.sum(a, axis=1)).astype(int)
    if sorted(f.tolist()) != list(range(1, k + 1)):
        raise SicStructureError("decode positions are not a bijection")
    return f


def order_from_alpha(alpha) -> tuple[int, ...]:
    """Decoding order pi with pi[m] = the device whose position is m+1."""
    f = decode_positions(alpha)
    order = np.empty(f.shape[0], dtype=int)
    order[f - 1] = np.arange(f.shape[0])
    return tuple(int(d) for d in order)


def alpha_from_order(order) -> np.ndarray:
    """Binary-feasible SIC matrix of a decoding order: earlier rows beat later."""
    perm = list(order)
    k = len(perm)
    validate_order(perm, k)
    position = np.empty(k, dtype=int)
    position[perm] = np.arange(k)
    alpha = (position[:, None] < position[None, :]).astype(float)
    np.fill_diagonal(alpha, 0.0)
    return alpha


def theta(q: np.ndarray, k: int, j: int, scenario: Scenario) -> float:
    """theta_{k,j} = 2 (w_j - w_k)' q + ||w_k||^2 - ||w_j||^2, which equals
    d_k^2 - d_j^2: positive when device k is farther from q than device j."""
    if k == j:
        raise ValueError("theta is defined for distinct devices")
    w = scenario.device_positions
    q = np.asarray(q, dtype=float)
    return float(2.0 * (w[j] - w[k]) @ q + w[k] @ w[k] - w[j] @ w[j])


def theta_matrix(q: np.ndarray, scenario: Scenario) -> np.ndarray:
    """All theta_{k,j} as a (K, K) matrix with a zero diagonal."""
    w = scenario.device_positions
    q = np.asarray(q, dtype=float)
    proj = 2.0 * (w @ q) - np.sum(w * w, axis=1)  # 2 w_k'q - ||w_k||^2 per device
    return proj[None, :] - proj[:, None]


def smooth_penalties(q: np.ndarray, alpha, scenario: Scenario) -> tuple[float, float]:
    """(phi, phi_g): binary-ness gap and order/distance inconsistency.

    phi = sum (alpha - alpha^2) is dimensionless; phi_g = sum theta (2 alpha
    - 1) + |theta| is in m^2.  Both are zero exactly when alpha is binary and
    consistent with the distance order at q.
    """
    a = _as_alpha(alpha)
    if np.min(a) < -1e-9 or np.max(a) > 1.0 + 1e-9:
        raise ValueError("alpha must lie in [0, 1]")
    off = ~np.eye(a.shape[0], dtype=bool)
    phi = float(np.sum((a - a * a)[off]))
    th = theta_matrix(q, scenario)
    g = th * (2.0 * a - 1.0) + np.abs(th)
    phi_g = float(np.sum(g[off]))
    return phi, phi_g


def majorize_phi(alpha, alpha_bar, form: str = "taylor") -> float:
    """Convex upper bound of phi = sum(alpha - alpha^2) around alpha_bar.

    form="taylor" is the first-order expansion of the concave -alpha^2 term:
    sum(alpha + alpha_bar^2 - 2 alpha_bar alpha), a global over-estimator
    tight at alpha = alpha_bar.  form="printed" is sum((alpha - alpha_bar)^2),
    kept for comparison; it is not an upper bound of phi.
    """
    a = np.asarray(alpha, dtype=float)
    ab = np.asarray(alpha_bar, dtype=float)
    if form == "taylor":
        return float(np.sum(a + ab * ab - 2.0 * ab * a))
    if form == "printed":
        return float(np.sum((a - ab) ** 2))
    raise ValueError(f"unknown phi majorizer form {form!r}")


def majorize_bilinear(theta_val, alpha_val, theta_bar, alpha_bar):
    """Convex upper bound D of the bilinear term 2 alpha theta.

    D = 0.5 [(theta + alpha)^2 + (theta_bar - alpha_bar)^2]
        - (theta_bar - alpha_bar)(theta - alpha),
    jointly convex in (theta, alpha), with D = 2 alpha theta exactly at the
    expansion point.
    """
    t = np.asarray(theta_val, dtype=float)
    a = np.asarray(alpha_val, dtype=float)
    tb = np.asarray(theta_bar, dtype=float)
    ab = np.asarray(alpha_bar, dtype=float)
    val = 0.5 * ((t + a) ** 2 + (tb - ab) ** 2) - (tb - ab) * (t - a)
    return float(val) if val.ndim == 0 else val


def positions_from_rowsums(alpha) -> np.ndarray:
    """Rank-based decode positions for a possibly relaxed alpha.

    Devices are ranked by descending row sum (ties by index); for a
    binary-feasible matrix this reduces to f(k) = K - sum_j alpha[k, j].
    """
    a = _as_alpha(alpha)
    k = a.shape[0]
    x = np.sum(a, axis=1)
    ranked = np.lexsort((np.arange(k), -x))
    f = np.empty(k, dtype=int)
    f[ranked] = np.arange(1, k + 1)
    return f


def subproblem_layout(device_count: int) -> tuple[str, ...]:
    """Variable names of the SCA subproblem: zeta, qx, qy, then alpha pairs."""
    names = ["zeta", "qx", "qy"]
    for k in range(device_count):
        for j in range(device_count):
            if j != k:
                names.append(f"a_{k}_{j}")
    return tuple(names)


def _pair_index(device_count: int, k: int, j: int) -> int:
    return 3 + k * (device_count - 1) + (j if j < k else j - 1)


def build_subproblem(q_bar: np.ndarray, alpha_bar, f: np.ndarray,
                     penalties: PenaltyState, scenario: Scenario,
                     phi_form: str = "taylor") -> kernel.ConvexProgram:
    """One convex SCA subproblem at expansion point (q_bar, alpha_bar).

    Variables (zeta_hat, q_hat, alpha off-diagonal); objective zeta_hat +
    rho1 * majorized phi + rho2 * majorized phi_g; constraints are the
    lifetime rows and power caps at decode positions f, pair complementarity,
    transitivity and the [0, 1] box.  theta is measured in scaled units.
    """
    a_bar = np.clip(_as_alpha(alpha_bar), 0.0, 1.0)
    kdev = scenario.device_count
    f = np.asarray(f, dtype=int)
    if sorted(f.tolist()) != list(range(1, kdev + 1)):
        raise ValueError("f must be a bijection onto 1..K")
    ell = LENGTH_SCALE_M
    w = scenario.device_positions / ell
    h2 = scenario.uav_altitude**2 / ell**2
    zref = zeta_scale(scenario)
    qb = np.asarray(q_bar, dtype=float) / ell
    caps = allowable_powers(scenario)
    c_all = power_coefficients(kdev, scenario.qos_rate, scenario.ref_snr)
    c_dev = c_all[f - 1] * ell**2  # W per scaled-length^2, per device

    n = 3 + kdev * (kdev - 1)
    obj_linear = np.zeros(n)
    obj_linear[0] = 1.0
    obj_constant = 0.0
    big_q = np.zeros((n, n))
    abs_terms = []
    rho1, rho2 = penalties.rho1, penalties.rho2

    wnorm = np.sum(w * w, axis=1)
    for k in range(kdev):
        for j in range(kdev):
            if j == k:
                continue
            idx = _pair_index(kdev, k, j)
            ab = a_bar[k, j]
            # theta_hat as an affine function of (qx, qy)
            t_a = np.zeros(n)
            t_a[1] = 2.0 * (w[j, 0] - w[k, 0])
            t_a[2] = 2.0 * (w[j, 1] - w[k, 1])
            t_b = float(wnorm[k] - wnorm[j])
            tb_bar = float(t_a[1] * qb[0] + t_a[2] * qb[1] + t_b)
            # phi majorizer
            if phi_form == "taylor":
                obj_linear[idx] += rho1 * (1.0 - 2.0 * ab)
                obj_constant += rho1 * ab * ab
            elif phi_form == "printed":
                big_q[idx, idx] += rho1
                obj_linear[idx] += -2.0 * rho1 * ab
                obj_constant += rho1 * ab * ab
            else:
                raise ValueError(f"unknown phi majorizer form {phi_form!r}")
            # phi_g majorizer: D - theta + |theta|
            u = t_a.copy()
            u[idx] += 1.0  # theta_hat + alpha
            big_q += (0.5 * rho2) * np.outer(u, u)
            obj_linear += rho2 * t_b * u
            obj_constant += 0.5 * rho2 * t_b * t_b
            r = tb_bar - ab
            obj_linear += rho2 * (-r) * t_a
            obj_linear[idx] += rho2 * r
            obj_constant += rho2 * (0.5 * r * r - r * t_b - t_b)
            obj_linear += -rho2 * t_a
            abs_terms.append(kernel.AbsTerm(a=t_a, b=t_b, weight=rho2))

    quads = []
    if np.any(np.abs(big_q) > 0):
        quads.append(kernel.QuadTerm(Q=big_q, a=np.zeros(n), b=0.0))

    quad_cons = []
    for k in range(kdev):
        s = c_dev[k] / (zref * scenario.battery_energies[k])
        qmat = np.zeros((n, n))
        qmat[1, 1] = qmat[2, 2] = s
        a_vec = np.zeros(n)
        a_vec[0] = -1.0
        a_vec[1] = -2.0 * s * w[k, 0]
        a_vec[2] = -2.0 * s * w[k, 1]
        b = s * (wnorm[k] + h2) + scenario.circuit_power / (zref * scenario.battery_energies[k])
        quad_cons.append(kernel.QuadTerm(Q=qmat, a=a_vec, b=float(b)))
    for k in range(kdev):
        u = c_dev[k] / caps[k]
        qmat = np.zeros((n, n))
        qmat[1, 1] = qmat[2, 2] = u
        a_vec = np.zeros(n)
        a_vec[1] = -2.0 * u * w[k, 0]
        a_vec[2] = -2.0 * u * w[k, 1]
        quad_cons.append(kernel.QuadTerm(Q=qmat, a=a_vec, b=float(u * (wnorm[k] + h2) - 1.0)))

    rows = []
    rhs = []
    for k in range(kdev):
        for j in range(k + 1, kdev):
            row = np.zeros(n)
            row[_pair_index(kdev, k, j)] = 1.0
            row[_pair_index(kdev, j, k)] = 1.0
            rows.append(row)
            rhs.append(1.0)
            rows.append(-row)
            rhs.append(-1.0)
    for k in range(kdev):
        for j in range(kdev):
            for i in range(kdev):
                if k == j or j == i or k == i:
                    continue
                row = np.zeros(n)
                row[_pair_index(kdev, k, j)] += 1.0
                row[_pair_index(kdev, j, i)] += 1.0
                row[_pair_index(kdev, k, i)] -= 1.0
                rows.append(row)
                rhs.append(1.0)
    ineq_A = np.vstack(rows) if rows else None
    ineq_b = np.asarray(rhs) if rows else None

    lower = np.concatenate([[0.0, -np.inf, -np.inf], np.zeros(n - 3)])
    upper = np.concatenate([[np.inf, np.inf, np.inf], np.ones(n - 3)])
    return kernel.ConvexProgram(
        n=n,
        obj_linear=obj_linear,
        obj_constant=float(obj_constant),
        obj_quads=tuple(quads),
        obj_abs=tuple(abs_terms),
        ineq_A=ineq_A,
        ineq_b=ineq_b,
        quad_cons=tuple(quad_cons),
        lower=lower,
        upper=upper,
        names=subproblem_layout(kdev),
    )


def feasibility_check(q0: np.ndarray, alpha0, scenario: Scenario):
    """Whether the closed-form powers at (q0, f0) respect every power cap.

    Returns (ok, margins) with margins_k = P_tilde_k - c_{f0(k)} (H^2 + d_k^2).
    """
    f0 = decode_positions(alpha0)
    c_all = power_coefficients(scenario.device_count, scenario.qos_rate, scenario.ref_snr)
    powers = c_all[f0 - 1] * (scenario.uav_altitude**2 + squared_distances(q0, scenario))
    margins = allowable_powers(scenario) - powers
    ok = bool(np.all(margins >= -1e-12 * np.maximum(1.0, allowable_powers(scenario))))
    return ok, margins


def default_init(scenario: Scenario):
    """Centroid start with the distance-sorted order; nudged toward the
    tightest device when the power caps reject the centroid."""
    q0 = geometric_centroid(scenario)
    alpha0 = alpha_from_order(distance_sorted_order(q0, scenario))
    ok, margins = feasibility_check(q0, alpha0, scenario)
    if ok:
        return q0, alpha0
    worst = int(np.argmin(margins))
    target = scenario.device_positions[worst]
    for t in np.linspace(0.1, 1.0, 10):
        q_try = q0 + t * (target - q0)
        alpha_try = alpha_from_order(distance_sorted_order(q_try, scenario))
        ok, _ = feasibility_check(q_try, alpha_try, scenario)
        if ok:
            return q_try, alpha_try
    return q0, alpha0  # caller reports the infeasible instance


def _alpha_from_solution(x: np.ndarray, device_count: int) -> np.ndarray:
    alpha = np.zeros((device_count, device_count))
    for k in range(device_count):
        for j in range(device_count):
            if j != k:
                alpha[k, j] = x[_pair_index(device_count, k, j)]
    return np.clip(alpha, 0.0, 1.0)


def _round_alpha(alpha: np.ndarray) -> np.ndarray:
    """Deterministic antisymmetric rounding: the larger of the pair wins."""
    k = alpha.shape[0]
    out = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            if alpha[a, b] > alpha[b, a] or (alpha[a, b] == alpha[b, a]):
                out[a, b] = 1.0
            else:
                out[b, a] = 1.0
    return out


def sca_solve(scenario: Scenario, init_q=None, init_alpha=None,
              penalties: PenaltyState | None = None, tol: float = 1e-4,
              kernel_tol: float = 1e-8, phi_form: str = "taylor",
              inner_tol: float = 1e-5) -> PlacementSolution:
    """Alternating SCA/penalty solver for the joint placement problem.

    Outer rounds re-derive the decode positions f from the current alpha row
    sums; inner rounds solve convex subproblems, move the expansion point and
    grow the penalties.  Every iterate is rounded to a candidate (order, q),
    re-powered through the closed form and audited; the best feasible
    candidate is returned (the initial point seeds it, so the result is never
    worse than the fixed-location scheme when started from the default init).
    Diagnostics carry the full iteration trace.
    """
    pen = penalties if penalties is not None else PenaltyState()
    if init_q is None and init_alpha is None:
        q0, alpha0 = default_init(scenario)
    elif init_q is None:
        q0, alpha0 = geometric_centroid(scenario), _as_alpha(init_alpha)
    elif init_alpha is None:
        q0 = np.asarray(init_q, dtype=float)
        alpha0 = alpha_from_order(distance_sorted_order(q0, scenario))
    else:
        q0, alpha0 = np.asarray(init_q, dtype=float), _as_alpha(init_alpha)
    ok, margins = feasibility_check(q0, alpha0, scenario)
    if not ok:
        return PlacementSolution(
            algorithm="sub-noma-j", status=STATUS_INFEASIBLE, q=None, powers=None,
            order=None, zeta=None, lifetime=0.0,
            diagnostics={"reason": "initial point violates power caps",
                         "margins_w": [float(m) for m in margins]},
        )

    kdev = scenario.device_count
    zref = zeta_scale(scenario)
    best = None  # (lifetime, q, order, powers, report, source)

    def consider(q, order, source):
        nonlocal best
        powers = closed_form_power(q, order, scenario)
        report = evaluate(q, powers, order, scenario)
        if report.feasible and (best is None or report.lifetime > best[0]):
            best = (report.lifetime, np.asarray(q, dtype=float), tuple(order), powers, report, source)

    def extract_order(alpha, q):
        try:
            return order_from_alpha(_round_alpha(alpha)), False
        except SicStructureError:
            return distance_sorted_order(q, scenario), True

    def consider_iterate(q, alpha, tag):
        order_cand, fell_back = extract_order(alpha, q)
        consider(q, order_cand, tag)
        sorted_order = distance_sorted_order(q, scenario)
        if tuple(sorted_order) != tuple(order_cand):
            consider(q, sorted_order, tag + "-sorted")
        return fell_back

    consider(q0, order_from_alpha(alpha0), "init")

    q_bar = np.asarray(q0, dtype=float)
    a_bar = alpha0.copy()
    f = positions_from_rowsums(a_bar)
    rho = pen
    trace = []
    outer_trace = []
    fallback_used = False
    subproblem_failure = None
    inaccurate_solves = 0
    global_iter = 0
    prev_outer_zeta = None
    phi = phi_g = math.inf
    stopped = "outer_cap"
    outer = 0
    for outer in range(1, pen.outer_cap + 1):
        prev_obj = None
        inner_stop = "inner_cap"
        for inner in range(1, pen.inner_cap + 1):
            program = build_subproblem(q_bar, a_bar, f, rho, scenario, phi_form)
            sol = kernel.solve(program, tol=kernel_tol)
            if sol.status == kernel.STATUS_INFEASIBLE or sol.x is None:
                subproblem_failure = {"outer": outer, "inner": inner, "status": sol.status}
                break
            if sol.status != kernel.STATUS_OPTIMAL:
                inaccurate_solves += 1
            q_bar = np.asarray(sol.x[1:3], dtype=float) * LENGTH_SCALE_M
            a_bar = _alpha_from_solution(sol.x, kdev)
            zeta_rel = float(sol.x[0]) * zref
            phi, phi_g = smooth_penalties(q_bar, a_bar, scenario)
            global_iter += 1
            trace.append({
                "iter": global_iter, "outer": outer, "inner": inner,
                "objective": float(sol.objective), "zeta": zeta_rel,
                "phi": phi, "phi_g": phi_g, "rho1": rho.rho1, "rho2": rho.rho2,
                "q_x": float(q_bar[0]), "q_y": float(q_bar[1]),
            })
            fallback_used = consider_iterate(q_bar, a_bar, f"outer{outer}") or fallback_used
            stalled = (
                prev_obj is not None
                and abs(prev_obj - sol.objective) <= inner_tol * max(abs(prev_obj), 1e-12)
            )
            converged = stalled and phi <= PENALTY_THRESHOLD and phi_g <= PENALTY_THRESHOLD
            prev_obj = sol.objective
            rho = rho.grown()
            if converged:
                inner_stop = "converged"
                break
            if stalled and rho.saturated:
                inner_stop = "stalled"
                break
        zeta_now = trace[-1]["zeta"] if trace else math.inf
        outer_trace.append({
            "outer": outer,
            "zeta": zeta_now,
            "lifetime_best": best[0] if best is not None else 0.0,
            "phi": phi if math.isfinite(phi) else None,
            "phi_g": phi_g if math.isfinite(phi_g) else None,
        })
        if subproblem_failure is not None:
            stopped = "subproblem_failure"
            break
        f_new = positions_from_rowsums(a_bar)
        zeta_settled = (
            prev_outer_zeta is not None
            and abs(prev_outer_zeta - zeta_now) <= tol * max(abs(prev_outer_zeta), 1e-12)
        )
        if np.array_equal(f_new, f) and zeta_settled and inner_stop in ("converged", "stalled"):
            stopped = "converged" if inner_stop == "converged" else "stalled"
            break
        f = f_new
        prev_outer_zeta = zeta_now

    # Final extraction: round, re-derive the order, recompute exact powers.
    fallback_used = consider_iterate(q_bar, a_bar, "final") or fallback_used
    if best is not None:
        phi_final, phi_g_final = smooth_penalties(best[1], alpha_from_order(best[2]), scenario)
    else:
        order_final, _ = extract_order(a_bar, q_bar)
        phi_final, phi_g_final = smooth_penalties(q_bar, alpha_from_order(order_final), scenario)
    global_iter += 1
    trace.append({
        "iter": global_iter, "outer": None, "inner": None, "objective": None,
        "zeta": (1.0 / best[0]) if best is not None else None,
        "phi": phi_final, "phi_g": phi_g_final,
        "rho1": rho.rho1, "rho2": rho.rho2,
        "q_x": float(best[1][0]) if best is not None else float(q_bar[0]),
        "q_y": float(best[1][1]) if best is not None else float(q_bar[1]),
    })

    if best is None:
        return PlacementSolution(
            algorithm="sub-noma-j", status=STATUS_INFEASIBLE, q=None, powers=None,
            order=None, zeta=None, lifetime=0.0,
            diagnostics={"reason": "no feasible candidate found", "trace": trace,
                         "subproblem_failure": subproblem_failure},
        )
    lifetime, q_best, order_best, powers_best, report_best, source = best
    diagnostics = {
        "trace": trace,
        "outer_trace": outer_trace,
        "stopped": stopped,
        "fallback_used": fallback_used,
        "final_phi": phi_final,
        "final_phi_g": phi_g_final,
        "candidate_source": source,
        "outer_iterations": outer,
        "inner_iterations_total": global_iter - 1,
        "inaccurate_solves": inaccurate_solves,
    }
    if subproblem_failure is not None:
        diagnostics["subproblem_failure"] = subproblem_failure
    return PlacementSolution(
        algorithm="sub-noma-j",
        status=STATUS_OPTIMAL,
        q=q_best,
        powers=powers_best,
        order=order_best,
        zeta=1.0 / lifetime,
        lifetime=lifetime,
        report=report_best,
        diagnostics=diagnostics,
    )
