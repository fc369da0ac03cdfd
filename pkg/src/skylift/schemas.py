"""Request/response bodies for the HTTP service.

Scenario and solution payloads travel as plain dicts in the versioned file
schema (format: 1); validation happens in the library parsers so the service
and the on-disk formats can never drift apart.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from .experiments import ALGORITHMS


class HealthResponse(BaseModel):
    status: str
    version: str


class GenerateRequest(BaseModel):
    seed: int
    device_count: int = Field(default=6, ge=1)
    region_m: float = Field(default=500.0, gt=0)
    altitude_m: float = Field(default=100.0, gt=0)
    qos_rate_bps_hz: float = Field(default=0.4, gt=0)
    ref_snr_db: float = 60.0
    noise_power_w: float = Field(default=1e-3, gt=0)
    max_power_w: float = Field(default=1.0, gt=0)
    circuit_power_w: float = Field(default=0.9, gt=0)
    battery_energy_j: float = Field(default=4e3, gt=0)
    interference_threshold_dbm: float = 28.0
    csi_error_var: float = Field(default=1e-2, ge=0, lt=1)
    violation_prob: float = Field(default=1e-3, gt=0, lt=1)


class GenerateResponse(BaseModel):
    scenario: dict


class SolveRequest(BaseModel):
    scenario: dict
    algorithm: str = "op-noma-j"
    tol: float = Field(default=1e-6, gt=0)


class SolveResponse(BaseModel):
    solution: dict
    solve_time_ms: float


class SweepRequest(BaseModel):
    parameter: str
    values: list[float] = Field(min_length=1)
    algorithms: list[str] = Field(default_factory=lambda: list(ALGORITHMS), min_length=1)
    seeds: list[int] = Field(default_factory=lambda: [1, 2, 3], min_length=1)
    device_count: int = Field(default=6, ge=1)
    region_m: float = Field(default=500.0, gt=0)
    altitude_m: float = Field(default=100.0, gt=0)
    tol: float = Field(default=1e-6, gt=0)
    overrides: dict = Field(default_factory=dict)


class SweepResponse(BaseModel):
    rows: list[dict]
    csv: str


class TraceRequest(BaseModel):
    scenario: dict
    tol: float = Field(default=1e-4, gt=0)
    phi_form: str = "taylor"


class TraceResponse(BaseModel):
    solution: dict
    inner_csv: str
    outer_csv: str


class CompareRequest(BaseModel):
    scenario: dict
    algorithms: list[str] = Field(default_factory=lambda: list(ALGORITHMS), min_length=1)
    tol: float = Field(default=1e-6, gt=0)


class CompareResponse(BaseModel):
    rows: list[dict]
