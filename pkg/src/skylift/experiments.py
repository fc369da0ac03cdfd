"""Experiment harness: scenario generation, dispatch, sweeps and CSV export.

Defaults follow the evaluation setup this package targets: 6 devices dropped
uniformly in a 500 m square, 100 m hover altitude, 60 dB reference SNR,
1 W hardware cap, 0.9 W circuit drain, 4 kJ batteries, 28 dBm interference
threshold, 1e-2 CSI error variance, 0.1% outage budget, 0.4 bits/s/Hz QoS.

Every float written to CSV uses 9 significant digits; rows are emitted in a
deterministic sorted order, so repeated runs with the same seeds produce
byte-identical files except for the solve_time_ms column.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import time

import numpy as np

from . import baselines, exact, sca
from .model import (
    STATUS_OPTIMAL,
    PlacementSolution,
    Scenario,
    db_to_linear,
    dbm_to_watts,
    sample_primary_gains,
)

ALGORITHMS = ("op-noma-j", "sub-noma-j", "noma-p", "fdma")
SWEEP_PARAMETERS = ("qos_rate", "interference_threshold_dbm", "device_count")


def generate_scenario(
    seed: int,
    device_count: int = 6,
    region_size: float = 500.0,
    altitude: float = 100.0,
    qos_rate: float = 0.4,
    ref_snr_db: float = 60.0,
    noise_power: float = 1e-3,
    max_power: float = 1.0,
    circuit_power: float = 0.9,
    battery_energy: float = 4e3,
    interference_threshold_dbm: float = 28.0,
    csi_error_var: float = 1e-2,
    violation_prob: float = 1e-3,
) -> Scenario:
    """Random instance with the documented defaults; deterministic per seed.

    Positions are uniform on the centered region square; primary-link gain
    estimates are drawn from the same stream, so one seed fixes everything.
    """
    if device_count < 1:
        raise ValueError("device_count must be at least 1")
    rng = np.random.default_rng(seed)
    half = region_size / 2.0
    positions = rng.uniform(-half, half, size=(device_count, 2))
    gains = sample_primary_gains(rng, device_count, csi_error_var)
    return Scenario(
        device_positions=positions,
        battery_energies=np.full(device_count, float(battery_energy)),
        uav_altitude=float(altitude),
        ref_snr=db_to_linear(ref_snr_db),
        noise_power=float(noise_power),
        max_power=float(max_power),
        circuit_power=float(circuit_power),
        qos_rate=float(qos_rate),
        interference_threshold=dbm_to_watts(interference_threshold_dbm),
        csi_error_var=float(csi_error_var),
        violation_prob=float(violation_prob),
        primary_gain_estimates=gains,
        region_size=float(region_size),
        seed=int(seed),
    )


def run_algorithm(name: str, scenario: Scenario, tol: float = 1e-6) -> tuple[PlacementSolution, float]:
    """Dispatch one solve; returns (solution, wall time in ms).

    tol means: duality-gap target for op-noma-j, outer-loop tolerance for
    sub-noma-j, kernel tolerance for fdma; noma-p is closed-form.
    """
    started = time.perf_counter()
    if name == "op-noma-j":
        solution = exact.solve_optimal(scenario, tol=tol)
    elif name == "sub-noma-j":
        solution = sca.sca_solve(scenario, tol=max(tol, 1e-6))
    elif name == "noma-p":
        solution = baselines.solve_noma_fixed(scenario)
    elif name == "fdma":
        solution = baselines.solve_fdma(scenario, tol=min(tol, 1e-8))
    else:
        raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
    return solution, (time.perf_counter() - started) * 1e3


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    """One parameter sweep: seeds x values x algorithms."""

    parameter: str
    values: tuple
    algorithms: tuple[str, ...] = ALGORITHMS
    seeds: tuple[int, ...] = (1, 2, 3)
    device_count: int = 6
    region_size: float = 500.0
    altitude: float = 100.0
    tol: float = 1e-6
    overrides: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"parameter must be one of {SWEEP_PARAMETERS}")
        if not self.values or not self.algorithms or not self.seeds:
            raise ValueError("values, algorithms and seeds must be non-empty")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        if self.parameter == "device_count" and any(int(v) != v or v < 1 for v in self.values):
            raise ValueError("device_count values must be positive integers")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))


@dataclasses.dataclass(frozen=True)
class ResultRow:
    """One sweep cell; lifetime is 0 exactly when the cell is not optimal."""

    seed: int
    algorithm: str
    parameter: str
    value: float
    lifetime_s: float
    zeta_per_s: float | None
    q_x_m: float | None
    q_y_m: float | None
    status: str
    solve_time_ms: float


def _scenario_for(spec: SweepSpec, seed: int, value) -> Scenario:
    base_kwargs = dict(
        device_count=spec.device_count,
        region_size=spec.region_size,
        altitude=spec.altitude,
        **spec.overrides,
    )
    if spec.parameter == "device_count":
        base_kwargs["device_count"] = int(value)
        return generate_scenario(seed, **base_kwargs)
    scenario = generate_scenario(seed, **base_kwargs)
    if spec.parameter == "qos_rate":
        return dataclasses.replace(scenario, qos_rate=float(value))
    return dataclasses.replace(scenario, interference_threshold=dbm_to_watts(float(value)))


def run_sweep(spec: SweepSpec) -> list[ResultRow]:
    """All sweep cells, row order sorted by (value, seed, algorithm position).

    A non-optimal cell becomes a row with its status and zero lifetime rather
    than an exception, so partial infeasibility stays visible in the output.
    """
    rows = []
    algo_rank = {name: i for i, name in enumerate(spec.algorithms)}
    cells = [
        (float(value), int(seed), name)
        for value in spec.values
        for seed in spec.seeds
        for name in spec.algorithms
    ]
    cells.sort(key=lambda cell: (cell[0], cell[1], algo_rank[cell[2]]))
    scenario_cache: dict = {}
    for value, seed, name in cells:
        key = (value, seed)
        if key not in scenario_cache:
            scenario_cache[key] = _scenario_for(spec, seed, value)
        scenario = scenario_cache[key]
        solution, elapsed_ms = run_algorithm(name, scenario, tol=spec.tol)
        optimal = solution.status == STATUS_OPTIMAL
        rows.append(ResultRow(
            seed=seed,
            algorithm=name,
            parameter=spec.parameter,
            value=value,
            lifetime_s=float(solution.lifetime) if optimal else 0.0,
            zeta_per_s=float(solution.zeta) if optimal else None,
            q_x_m=float(solution.q[0]) if optimal and solution.q is not None else None,
            q_y_m=float(solution.q[1]) if optimal and solution.q is not None else None,
            status=solution.status,
            solve_time_ms=elapsed_ms,
        ))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


RESULT_COLUMNS = ("seed", "algorithm", "parameter", "value", "lifetime_s",
                  "zeta_per_s", "q_x_m", "q_y_m", "status", "solve_time_ms")


def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, col)) for col in RESULT_COLUMNS])
    return buf.getvalue()


TRACE_COLUMNS = ("iter", "zeta", "phi", "phi_g", "rho1", "rho2", "q_x", "q_y")
OUTER_TRACE_COLUMNS = ("outer", "zeta", "lifetime_best", "phi", "phi_g")


def trace_to_csv(trace: list[dict]) -> str:
    """Inner-loop penalty trace; the last row is the rounded extraction."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for entry in trace:
        writer.writerow([_fmt(entry.get(col)) for col in TRACE_COLUMNS])
    return buf.getvalue()


def outer_trace_to_csv(outer_trace: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(OUTER_TRACE_COLUMNS)
    for entry in outer_trace:
        writer.writerow([_fmt(entry.get(col)) for col in OUTER_TRACE_COLUMNS])
    return buf.getvalue()


def compare_algorithms(scenario: Scenario, algorithms=ALGORITHMS, tol: float = 1e-6) -> list[dict]:
    """Run several schemes on one instance; annotate lifetimes relative to the best."""
    results = []
    for name in algorithms:
        solution, elapsed_ms = run_algorithm(name, scenario, tol=tol)
        results.append((name, solution, elapsed_ms))
    best = max((s.lifetime for _, s, _ in results if s.status == STATUS_OPTIMAL), default=0.0)
    rows = []
    for name, solution, elapsed_ms in results:
        optimal = solution.status == STATUS_OPTIMAL
        rows.append({
            "algorithm": name,
            "status": solution.status,
            "lifetime_s": float(solution.lifetime) if optimal else 0.0,
            "zeta_per_s": float(solution.zeta) if optimal and solution.zeta else None,
            "q_m": [float(v) for v in solution.q] if optimal and solution.q is not None else None,
            "order": list(solution.order) if solution.order is not None else None,
            "ratio_to_best": (float(solution.lifetime) / best) if optimal and best > 0 else None,
            "solve_time_ms": elapsed_ms,
        })
    return rows
