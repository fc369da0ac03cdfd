"""HTTP facade over the library: every CLI verb is an endpoint.

All numeric payloads pass through the canonical 9-significant-digit rounding
before leaving the service, so responses are deterministic for fixed inputs
(solve_time_ms fields excepted, by design).
"""

from __future__ import annotations

import dataclasses
import json

from fastapi import FastAPI, HTTPException

from . import experiments, sca
from .experiments import ALGORITHMS
from .model import canonical_json, scenario_from_dict, scenario_to_dict
from .schemas import (
    CompareRequest,
    CompareResponse,
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    SolveRequest,
    SolveResponse,
    SweepRequest,
    SweepResponse,
    TraceRequest,
    TraceResponse,
)

from . import __version__ as VERSION

app = FastAPI(title="skylift", version=VERSION)


def _canonical(obj) -> dict:
    return json.loads(canonical_json(obj))


def _parse_scenario(payload: dict):
    try:
        return scenario_from_dict(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"bad scenario: {exc}") from exc


@app.get("/healthz", response_model=HealthResponse)
def healthz() -> HealthResponse:
    return HealthResponse(status="ok", version=VERSION)


@app.post("/generate", response_model=GenerateResponse)
def generate(req: GenerateRequest) -> GenerateResponse:
    try:
        scenario = experiments.generate_scenario(
            seed=req.seed,
            device_count=req.device_count,
            region_size=req.region_m,
            altitude=req.altitude_m,
            qos_rate=req.qos_rate_bps_hz,
            ref_snr_db=req.ref_snr_db,
            noise_power=req.noise_power_w,
            max_power=req.max_power_w,
            circuit_power=req.circuit_power_w,
            battery_energy=req.battery_energy_j,
            interference_threshold_dbm=req.interference_threshold_dbm,
            csi_error_var=req.csi_error_var,
            violation_prob=req.violation_prob,
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return GenerateResponse(scenario=_canonical(scenario_to_dict(scenario)))


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    scenario = _parse_scenario(req.scenario)
    if req.algorithm not in ALGORITHMS:
        raise HTTPException(
            status_code=400,
            detail=f"unknown algorithm {req.algorithm!r}; expected one of {list(ALGORITHMS)}",
        )
    solution, elapsed_ms = experiments.run_algorithm(req.algorithm, scenario, tol=req.tol)
    return SolveResponse(solution=_canonical(solution.to_dict()), solve_time_ms=elapsed_ms)


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    try:
        spec = experiments.SweepSpec(
            parameter=req.parameter,
            values=tuple(req.values),
            algorithms=tuple(req.algorithms),
            seeds=tuple(req.seeds),
            device_count=req.device_count,
            region_size=req.region_m,
            altitude=req.altitude_m,
            tol=req.tol,
            overrides=dict(req.overrides),
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    rows = experiments.run_sweep(spec)
    return SweepResponse(
        rows=[_canonical(dataclasses.asdict(row)) for row in rows],
        csv=experiments.rows_to_csv(rows),
    )


@app.post("/trace", response_model=TraceResponse)
def trace(req: TraceRequest) -> TraceResponse:
    scenario = _parse_scenario(req.scenario)
    if req.phi_form not in ("taylor", "printed"):
        raise HTTPException(status_code=400, detail=f"unknown phi_form {req.phi_form!r}")
    solution = sca.sca_solve(scenario, tol=req.tol, phi_form=req.phi_form)
    diagnostics = solution.diagnostics or {}
    return TraceResponse(
        solution=_canonical(solution.to_dict()),
        inner_csv=experiments.trace_to_csv(diagnostics.get("trace", [])),
        outer_csv=experiments.outer_trace_to_csv(diagnostics.get("outer_trace", [])),
    )


@app.post("/compare", response_model=CompareResponse)
def compare(req: CompareRequest) -> CompareResponse:
    scenario = _parse_scenario(req.scenario)
    unknown = set(req.algorithms) - set(ALGORITHMS)
    if unknown:
        raise HTTPException(status_code=400, detail=f"unknown algorithms {sorted(unknown)}")
    rows = experiments.compare_algorithms(scenario, tuple(req.algorithms), tol=req.tol)
    return CompareResponse(rows=[_canonical(row) for row in rows])
