"""Minimal convex-program facility for the small subproblems in this package.

A program is canonical data, not a modeling language: a linear objective plus
convex-quadratic atoms (PSD matrix) and weighted absolute-value atoms, affine
and convex-quadratic inequality constraints, and variable boxes.  `solve` is
backed by an interior-point solver behind this contract; `verify_kkt` and
`grid_oracle` are independent hand-written checks so that solver answers can
be cross-examined without trusting the same code path twice.

Absolute-value atoms are handled by epigraph lifting: each weight*|a'x + b|
becomes a fresh variable t with t >= a'x + b and t >= -(a'x + b).
"""

from __future__ import annotations

from dataclasses import dataclass
import json
from pathlib import Path

import cvxpy as cp
import numpy as np

PSD_TOL = 1e-10

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_MAXITER = "maxiter"


class KernelError(Exception):
    """Raised for out-of-contract programs (unbounded, malformed)."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadTerm:
    """x'Qx + a'x + b with Q symmetric PSD."""

    Q: np.ndarray
    a: np.ndarray
    b: float = 0.0

    def __post_init__(self) -> None:
        Q = np.asarray(self.Q, dtype=float)
        a = np.asarray(self.a, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or a.shape != (Q.shape[0],):
            raise ValueError("QuadTerm shapes inconsistent")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("QuadTerm matrix must be symmetric")
        scale = max(1.0, float(np.max(np.abs(Q))))
        if np.min(np.linalg.eigvalsh(Q)) < -PSD_TOL * scale:
            raise ValueError("QuadTerm matrix must be PSD")
        object.__setattr__(self, "Q", _readonly(Q))
        object.__setattr__(self, "a", _readonly(a))
        object.__setattr__(self, "b", float(self.b))

    def value(self, x: np.ndarray) -> float:
        return float(x @ self.Q @ x + self.a @ x + self.b)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * (self.Q @ x) + self.a


@dataclass(frozen=True)
class AbsTerm:
    """weight * |a'x + b| with weight >= 0."""

    a: np.ndarray
    b: float
    weight: float

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1:
            raise ValueError("AbsTerm coefficient must be a vector")
        if not self.weight >= 0.0:
            raise ValueError("AbsTerm weight must be non-negative")
        object.__setattr__(self, "a", _readonly(a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "weight", float(self.weight))

    def value(self, x: np.ndarray) -> float:
        return self.weight * abs(float(self.a @ x) + self.b)


@dataclass(frozen=True)
class ConvexProgram:
    """min  c'x + sum_i quad_i(x) + sum_j w_j |a_j'x + b_j| + const
    s.t.  A x <= b,   quad constraints g(x) <= 0,   lower <= x <= upper.
    """

    n: int
    obj_linear: np.ndarray
    obj_constant: float = 0.0
    obj_quads: tuple[QuadTerm, ...] = ()
    obj_abs: tuple[AbsTerm, ...] = ()
    ineq_A: np.ndarray | None = None
    ineq_b: np.ndarray | None = None
    quad_cons: tuple[QuadTerm, ...] = ()
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        n = int(self.n)
        if n < 1:
            raise ValueError("need at least one variable")
        lin = np.asarray(self.obj_linear, dtype=float)
        if lin.shape != (n,):
            raise ValueError("obj_linear must have shape (n,)")
        object.__setattr__(self, "obj_linear", _readonly(lin))
        for term in tuple(self.obj_quads) + tuple(self.quad_cons):
            if term.Q.shape != (n, n):
                raise ValueError("quadratic term dimension mismatch")
        for term in self.obj_abs:
            if term.a.shape != (n,):
                raise ValueError("abs term dimension mismatch")
        A, b = self.ineq_A, self.ineq_b
        if (A is None) != (b is None):
            raise ValueError("ineq_A and ineq_b must be given together")
        if A is not None:
            A = np.asarray(A, dtype=float)
            b = np.asarray(b, dtype=float)
            if A.ndim != 2 or A.shape[1] != n or b.shape != (A.shape[0],):
                raise ValueError("affine constraint shapes inconsistent")
            object.__setattr__(self, "ineq_A", _readonly(A))
            object.__setattr__(self, "ineq_b", _readonly(b))
        for name in ("lower", "upper"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=float)
                if v.shape != (n,):
                    raise ValueError(f"{name} must have shape (n,)")
                object.__setattr__(self, name, _readonly(v))
        if self.names is not None and len(self.names) != n:
            raise ValueError("names length mismatch")
        object.__setattr__(self, "obj_quads", tuple(self.obj_quads))
        object.__setattr__(self, "obj_abs", tuple(self.obj_abs))
        object.__setattr__(self, "quad_cons", tuple(self.quad_cons))

    def objective_value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        val = float(self.obj_linear @ x) + self.obj_constant
        val += sum(t.value(x) for t in self.obj_quads)
        val += sum(t.value(x) for t in self.obj_abs)
        return val

    def max_violation(self, x: np.ndarray) -> float:
        """Largest constraint violation at x (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        if self.ineq_A is not None:
            worst = max(worst, float(np.max(self.ineq_A @ x - self.ineq_b, initial=0.0)))
        for term in self.quad_cons:
            worst = max(worst, term.value(x))
        if self.lower is not None:
            worst = max(worst, float(np.max(self.lower - x, initial=0.0)))
        if self.upper is not None:
            worst = max(worst, float(np.max(x - self.upper, initial=0.0)))
        return worst


@dataclass(frozen=True)
class KernelSolution:
    x: np.ndarray | None
    objective: float | None
    max_violation: float | None
    status: str
    iterations: int
    duals: dict | None = None


def _stacked_rows(program: ConvexProgram):
    """All affine rows of the lifted program as one G z <= h system.

    z = (x, t) with one epigraph variable per abs atom.  Row order: user
    affine rows, upper boxes, lower boxes, then per-atom lift pairs.
    """
    n, nt = program.n, len(program.obj_abs)
    rows, rhs = [], []
    if program.ineq_A is not None:
        rows.append(np.hstack([program.ineq_A, np.zeros((program.ineq_A.shape[0], nt))]))
        rhs.append(program.ineq_b)
    eye = np.eye(n)
    if program.upper is not None:
        finite = np.isfinite(program.upper)
        if np.any(finite):
            rows.append(np.hstack([eye[finite], np.zeros((int(finite.sum()), nt))]))
            rhs.append(program.upper[finite])
    if program.lower is not None:
        finite = np.isfinite(program.lower)
        if np.any(finite):
            rows.append(np.hstack([-eye[finite], np.zeros((int(finite.sum()), nt))]))
            rhs.append(-program.lower[finite])
    for j, term in enumerate(program.obj_abs):
        lift = np.zeros((2, n + nt))
        lift[0, :n] = term.a
        lift[1, :n] = -term.a
        lift[:, n + j] = -1.0
        rows.append(lift)
        rhs.append(np.array([-term.b, term.b]))
    if rows:
        return np.vstack(rows), np.concatenate(rhs)
    return np.zeros((0, n + nt)), np.zeros(0)


def solve(program: ConvexProgram, tol: float = 1e-8, max_iter: int = 200000) -> KernelSolution:
    """Solve the program; deterministic for fixed inputs.

    Optimal status guarantees the reported point is within tol of feasible
    and of the true optimum on normalized data; Infeasible carries a solver
    certificate; MaxIter returns the last iterate without guarantees.
    """
    n, nt = program.n, len(program.obj_abs)
    z = cp.Variable(n + nt)
    G, h = _stacked_rows(program)
    constraints = []
    if G.shape[0]:
        constraints.append(G @ z <= h)
    quad_constraints = []
    for term in program.quad_cons:
        con = cp.quad_form(z[:n], cp.psd_wrap(term.Q)) + term.a @ z[:n] + term.b <= 0
        constraints.append(con)
        quad_constraints.append(con)
    obj = program.obj_linear @ z[:n]
    for term in program.obj_quads:
        obj = obj + cp.quad_form(z[:n], cp.psd_wrap(term.Q)) + term.a @ z[:n] + term.b
    if nt:
        obj = obj + cp.sum(cp.multiply(np.array([t.weight for t in program.obj_abs]), z[n:]))
    problem = cp.Problem(cp.Minimize(obj), constraints)
    opts = dict(
        solver=cp.CLARABEL,
        max_iter=max_iter,
        tol_gap_abs=max(tol * 0.1, 1e-12),
        tol_gap_rel=max(tol * 0.1, 1e-12),
        tol_feas=max(tol * 0.1, 1e-12),
    )
    problem.solve(**opts)
    status = problem.status
    iters = getattr(problem.solver_stats, "num_iters", None) or 0
    if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        return KernelSolution(None, None, None, STATUS_INFEASIBLE, iters)
    if status in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
        raise KernelError("program is unbounded; out of contract")
    if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise KernelError(f"unexpected solver status {status!r}")
    x = np.asarray(z.value[:n], dtype=float)
    duals = {
        "ineq": np.asarray(constraints[0].dual_value, dtype=float) if G.shape[0] else np.zeros(0),
        "quad": np.array([np.asarray(c.dual_value).item() for c in quad_constraints], dtype=float),
    }
    final = STATUS_OPTIMAL if status == cp.OPTIMAL else STATUS_MAXITER
    return KernelSolution(
        x=x,
        objective=program.objective_value(x),
        max_violation=program.max_violation(x),
        status=final,
        iterations=int(iters),
        duals=duals,
    )


@dataclass(frozen=True)
class KktReport:
    stationarity: float
    primal_violation: float
    complementarity: float
    dual_negativity: float
    ok: bool


def verify_kkt(program: ConvexProgram, solution: KernelSolution, tol: float = 1e-8) -> KktReport:
    """Independent first-order optimality audit of an Optimal solution.

    Residuals are assembled with plain numpy from the lifted program and the
    duals returned by solve; all must come out <= 10*tol.
    """
    if solution.status != STATUS_OPTIMAL:
        raise KernelError("verify_kkt requires an Optimal solution")
    n, nt = program.n, len(program.obj_abs)
    x = np.asarray(solution.x, dtype=float)
    t = np.array([abs(float(term.a @ x) + term.b) for term in program.obj_abs])
    zfull = np.concatenate([x, t])
    G, h = _stacked_rows(program)
    mu = np.asarray(solution.duals["ineq"], dtype=float)
    nu = np.asarray(solution.duals["quad"], dtype=float)
    grad = np.zeros(n + nt)
    grad[:n] = program.obj_linear
    for term in program.obj_quads:
        grad[:n] += term.gradient(x)
    grad[n:] = np.array([term.weight for term in program.obj_abs])
    if G.shape[0]:
        grad += G.T @ mu
    for term, d in zip(program.quad_cons, nu):
        grad[:n] += d * term.gradient(x)
    slacks = G @ zfull - h if G.shape[0] else np.zeros(0)
    quad_vals = np.array([term.value(x) for term in program.quad_cons])
    scale = max(1.0, float(np.max(np.abs(program.obj_linear), initial=0.0)))
    stationarity = float(np.max(np.abs(grad), initial=0.0)) / scale
    primal = max(
        float(np.max(slacks, initial=0.0)),
        float(np.max(quad_vals, initial=0.0)),
    )
    comp = max(
        float(np.max(np.abs(mu * slacks), initial=0.0)),
        float(np.max(np.abs(nu * quad_vals), initial=0.0)),
    )
    dual_neg = max(
        float(np.max(-mu, initial=0.0)),
        float(np.max(-nu, initial=0.0)),
    )
    bound = 10.0 * tol
    ok = (stationarity <= bound and primal <= bound and comp <= bound and dual_neg <= bound)
    return KktReport(stationarity, primal, comp, dual_neg, ok)


@dataclass(frozen=True)
class GridResult:
    q: np.ndarray
    value: float
    history: tuple[float, ...]


def grid_oracle(cost, bounds, levels: int = 7, grid_size: int = 33) -> GridResult:
    """Coarse-to-fine 2-D grid minimization, independent of any solver.

    cost maps an (M, 2) array of candidate points to (M,) objective values
    with +inf marking infeasible points.  Each level re-grids a shrinking box
    centered on the incumbent (which stays on the grid, so the best value is
    non-increasing across levels).  Accuracy is bounded by the final cell.
    """
    if grid_size % 2 == 0:
        grid_size += 1  # odd grid keeps the incumbent on the next grid
    (xlo, xhi), (ylo, yhi) = bounds
    best_q, best_val = None, np.inf
    history = []
    for level in range(levels):
        gx = np.linspace(xlo, xhi, grid_size)
        gy = np.linspace(ylo, yhi, grid_size)
        px, py = np.meshgrid(gx, gy, indexing="ij")
        pts = np.column_stack([px.ravel(), py.ravel()])
        vals = np.asarray(cost(pts), dtype=float)
        idx = int(np.argmin(vals))
        if vals[idx] < best_val:
            best_val = float(vals[idx])
            best_q = pts[idx].copy()
        history.append(best_val)
        if best_q is None:
            # Nothing feasible seen: refine globally and retry.
            grid_size = 2 * grid_size + 1
            if level >= 2:
                return GridResult(np.array([np.nan, np.nan]), np.inf, tuple(history))
            continue
        cell = max((xhi - xlo), (yhi - ylo)) / (grid_size - 1)
        half = 2.0 * cell
        xlo, xhi = best_q[0] - half, best_q[0] + half
        ylo, yhi = best_q[1] - half, best_q[1] + half
    return GridResult(best_q, best_val, tuple(history))


def program_to_dict(program: ConvexProgram) -> dict:
    def quad(t: QuadTerm) -> dict:
        return {"Q": t.Q.tolist(), "a": t.a.tolist(), "b": t.b}

    return {
        "n": program.n,
        "obj_linear": program.obj_linear.tolist(),
        "obj_constant": program.obj_constant,
        "obj_quads": [quad(t) for t in program.obj_quads],
        "obj_abs": [{"a": t.a.tolist(), "b": t.b, "weight": t.weight} for t in program.obj_abs],
        "ineq_A": program.ineq_A.tolist() if program.ineq_A is not None else None,
        "ineq_b": program.ineq_b.tolist() if program.ineq_b is not None else None,
        "quad_cons": [quad(t) for t in program.quad_cons],
        "lower": program.lower.tolist() if program.lower is not None else None,
        "upper": program.upper.tolist() if program.upper is not None else None,
        "names": list(program.names) if program.names is not None else None,
    }


def program_from_dict(data: dict) -> ConvexProgram:
    def quad(d: dict) -> QuadTerm:
        return QuadTerm(np.asarray(d["Q"]), np.asarray(d["a"]), float(d["b"]))

    return ConvexProgram(
        n=int(data["n"]),
        obj_linear=np.asarray(data["obj_linear"]),
        obj_constant=float(data["obj_constant"]),
        obj_quads=tuple(quad(d) for d in data["obj_quads"]),
        obj_abs=tuple(
            AbsTerm(np.asarray(d["a"]), float(d["b"]), float(d["weight"]))
            for d in data["obj_abs"]
        ),
        ineq_A=np.asarray(data["ineq_A"]) if data["ineq_A"] is not None else None,
        ineq_b=np.asarray(data["ineq_b"]) if data["ineq_b"] is not None else None,
        quad_cons=tuple(quad(d) for d in data["quad_cons"]),
        lower=np.asarray(data["lower"]) if data["lower"] is not None else None,
        upper=np.asarray(data["upper"]) if data["upper"] is not None else None,
        names=tuple(data["names"]) if data["names"] is not None else None,
    )


def save_program(program: ConvexProgram, path) -> None:
    Path(path).write_text(json.dumps(program_to_dict(program), indent=2) + "\n")


def load_program(path) -> ConvexProgram:
    return program_from_dict(json.loads(Path(path).read_text()))
