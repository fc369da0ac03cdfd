"""Problem instances and physics for a UAV-served cognitive-NOMA uplink.

K ground devices transmit to a UAV hovering at altitude H above a horizontal
position q.  All devices share one band through power-domain NOMA with
successive interference cancellation (SIC) at the UAV, inside the licensed
band of a primary user, so each device additionally carries a
chance-constraint-derived transmit power cap.  This module owns the scenario
representation, the channel / lifetime / interference formulas, and the
feasibility evaluation that every solver reports against.

Units are meters, watts, joules, seconds and bits/s/Hz throughout; dB and dBm
appear only at the file-format boundary.  Decoding orders are 0-based device
index tuples: order[m] is the device decoded m-th.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCENARIO_FORMAT = 1

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_MAXITER = "maxiter"


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts * 1000.0)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Scenario:
    """Immutable description of one uplink instance.

    Attributes:
        device_positions: (K, 2) horizontal device coordinates w_k [m].
        battery_energies: (K,) battery energies E_k [J].
        uav_altitude: hover altitude H [m].
        ref_snr: reference SNR gamma_0 at 1 m, linear ratio.
        noise_power: receiver noise sigma^2 [W].
        max_power: hardware transmit cap P_max [W].
        circuit_power: per-device circuit drain P_c [W].
        qos_rate: per-device QoS spectral efficiency r* [bits/s/Hz].
        interference_threshold: primary-user interference cap I_th [W].
        csi_error_var: CSI error variance eps_p^2 of the device->primary link.
        violation_prob: allowed interference outage probability rho.
        primary_gain_estimates: (K,) estimated device->primary power gains z_k.
        region_size: side of the square deployment region [m] (metadata).
        seed: generation seed (metadata), if any.
    """

    device_positions: np.ndarray
    battery_energies: np.ndarray
    uav_altitude: float
    ref_snr: float
    noise_power: float
    max_power: float
    circuit_power: float
    qos_rate: float
    interference_threshold: float
    csi_error_var: float
    violation_prob: float
    primary_gain_estimates: np.ndarray
    region_size: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        pos = np.asarray(self.device_positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
            raise ValueError("device_positions must be a (K, 2) array with K >= 1")
        k = pos.shape[0]
        energies = np.asarray(self.battery_energies, dtype=float)
        gains = np.asarray(self.primary_gain_estimates, dtype=float)
        if energies.shape != (k,) or gains.shape != (k,):
            raise ValueError("battery_energies and primary_gain_estimates must have shape (K,)")
        if not np.all(energies > 0):
            raise ValueError("battery energies must be strictly positive")
        if not np.all(gains >= 0):
            raise ValueError("primary gain estimates must be non-negative")
        for name in ("uav_altitude", "ref_snr", "noise_power", "max_power",
                     "circuit_power", "qos_rate", "interference_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 <= self.csi_error_var < 1.0:
            raise ValueError("csi_error_var must lie in [0, 1)")
        if not 0.0 < self.violation_prob < 1.0:
            raise ValueError("violation_prob must lie in (0, 1)")
        # Coincident positions break the distance-order machinery; reject here.
        d2 = np.sum((pos[:, None, :] - pos[None, :, :]) ** 2, axis=-1)
        d2[np.diag_indices(k)] = np.inf
        if np.min(d2) <= 0.0:
            raise ValueError("device positions must be pairwise distinct")
        object.__setattr__(self, "device_positions", _readonly(pos))
        object.__setattr__(self, "battery_energies", _readonly(energies))
        object.__setattr__(self, "primary_gain_estimates", _readonly(gains))

    @property
    def device_count(self) -> int:
        return self.device_positions.shape[0]

    @property
    def ref_power(self) -> float:
        """rho_0 = gamma_0 * sigma^2, channel power gain at 1 m times noise."""
        return self.ref_snr * self.noise_power


def squared_distances(q: np.ndarray, scenario: Scenario) -> np.ndarray:
    """Squared horizontal distances ||q - w_k||^2 for all devices, shape (K,)."""
    q = np.asarray(q, dtype=float)
    diff = scenario.device_positions - q[None, :]
    return np.sum(diff * diff, axis=1)


def channel_gains(q: np.ndarray, scenario: Scenario) -> np.ndarray:
    """LoS channel power gains h_k = rho_0 / (||q - w_k||^2 + H^2), shape (K,)."""
    return scenario.ref_power / (squared_distances(q, scenario) + scenario.uav_altitude**2)


def channel_gain(q: np.ndarray, scenario: Scenario, k: int) -> float:
    """Channel power gain of device k at UAV position q."""
    if not 0 <= k < scenario.device_count:
        raise IndexError(f"device index {k} out of range")
    return float(channel_gains(q, scenario)[k])


def validate_order(order, device_count: int) -> tuple[int, ...]:
    """Check that order is a permutation of range(device_count); return it as a tuple."""
    perm = tuple(int(m) for m in order)
    if sorted(perm) != list(range(device_count)):
        raise ValueError(f"order {perm} is not a permutation of 0..{device_count - 1}")
    return perm


def distance_sorted_order(q: np.ndarray, scenario: Scenario) -> tuple[int, ...]:
    """Devices sorted by ascending distance to q (ties broken by device index)."""
    d2 = squared_distances(q, scenario)
    return tuple(int(i) for i in np.lexsort((np.arange(scenario.device_count), d2)))


def sinr_vector(q: np.ndarray, powers: np.ndarray, order, scenario: Scenario) -> np.ndarray:
    """Per-device SINR under SIC, indexed by device.

    The device decoded m-th sees interference only from devices decoded after
    it: gamma_{pi(m)} = p h / (sum_{n>m} p_{pi(n)} h_{pi(n)} + sigma^2).
    """
    powers = np.asarray(powers, dtype=float)
    if np.any(powers < 0):
        raise ValueError("powers must be non-negative")
    perm = validate_order(order, scenario.device_count)
    received = powers * channel_gains(q, scenario)
    out = np.empty(scenario.device_count)
    tail = scenario.noise_power  # interference-plus-noise after all cancellations
    for m in range(scenario.device_count - 1, -1, -1):
        dev = perm[m]
        out[dev] = received[dev] / tail
        tail += received[dev]
    return out


def achievable_rates(q: np.ndarray, powers: np.ndarray, order, scenario: Scenario) -> np.ndarray:
    """Per-device spectral efficiency log2(1 + SINR), indexed by device."""
    return np.log2(1.0 + sinr_vector(q, powers, order, scenario))


def lifetime_of(powers: np.ndarray, scenario: Scenario) -> float:
    """Network lifetime min_k E_k / (p_k + P_c): time until the first battery dies."""
    powers = np.asarray(powers, dtype=float)
    if np.any(powers < 0):
        raise ValueError("powers must be non-negative")
    return float(np.min(scenario.battery_energies / (powers + scenario.circuit_power)))


def allowable_powers(scenario: Scenario) -> np.ndarray:
    """Per-device cap P_tilde_k = min(P_max, I_th / (z_k - eps_p^2 ln rho)), shape (K,)."""
    denom = scenario.primary_gain_estimates - scenario.csi_error_var * math.log(scenario.violation_prob)
    return np.minimum(scenario.max_power, scenario.interference_threshold / denom)


def allowable_power(scenario: Scenario, k: int) -> float:
    """Allowable transmit power of device k (hardware cap meets chance constraint)."""
    if not 0 <= k < scenario.device_count:
        raise IndexError(f"device index {k} out of range")
    return float(allowable_powers(scenario)[k])


def sample_primary_gains(seed, count: int, csi_error_var: float) -> np.ndarray:
    """Draw estimated device->primary power gains, i.i.d. exponential, mean 1 - eps_p^2.

    seed is anything numpy.random.default_rng accepts, including an existing
    Generator (passed through unchanged, so callers can share one stream).
    """
    if not 0.0 <= csi_error_var < 1.0:
        raise ValueError("csi_error_var must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    return rng.exponential(scale=1.0 - csi_error_var, size=count)


def geometric_centroid(scenario: Scenario) -> np.ndarray:
    """Arithmetic mean of the device positions, shape (2,)."""
    return np.mean(scenario.device_positions, axis=0)


@dataclass(frozen=True)
class FeasibilityReport:
    """Constraint-by-constraint audit of a candidate (q, p, order) solution.

    Slack conventions: a solution is feasible when every slack is >= -tol
    relative to the natural scale of its constraint (rates in bits/s/Hz
    absolute; powers relative to max(1 W, cap); ordering gaps relative to
    H^2 + d^2 in m^2).
    """

    rates: tuple[float, ...]
    rate_slacks: tuple[float, ...]
    powers: tuple[float, ...]
    power_caps: tuple[float, ...]
    power_slacks: tuple[float, ...]
    order: tuple[int, ...] | None
    ordering_slacks: tuple[float, ...] | None
    lifetime: float
    zeta: float
    feasible: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "rates_bps_hz": list(self.rates),
            "rate_slacks_bps_hz": list(self.rate_slacks),
            "powers_w": list(self.powers),
            "power_caps_w": list(self.power_caps),
            "power_slacks_w": list(self.power_slacks),
            "order": list(self.order) if self.order is not None else None,
            "ordering_slacks_m2": list(self.ordering_slacks) if self.ordering_slacks is not None else None,
            "lifetime_s": self.lifetime,
            "zeta_per_s": self.zeta,
            "feasible": self.feasible,
            "tol": self.tol,
        }


def evaluate(q: np.ndarray, powers: np.ndarray, order, scenario: Scenario,
             tol: float = 1e-8) -> FeasibilityReport:
    """Audit a NOMA solution against the QoS, power-cap and SIC-order constraints.

    Checks, within tolerance tol: rate_k >= r* for every device, p_k <=
    P_tilde_k, and ascending distances along the decoding order (the SIC
    decodability condition).  Also reports the achieved lifetime.
    """
    q = np.asarray(q, dtype=float)
    powers = np.asarray(powers, dtype=float)
    perm = validate_order(order, scenario.device_count)
    rates = achievable_rates(q, powers, perm, scenario)
    rate_slacks = rates - scenario.qos_rate
    caps = allowable_powers(scenario)
    power_slacks = caps - powers
    d2 = squared_distances(q, scenario)
    h2 = scenario.uav_altitude**2
    ordered_d2 = d2[list(perm)]
    ordering_slacks = ordered_d2[1:] - ordered_d2[:-1]
    ordering_scale = h2 + ordered_d2[:-1]
    lifetime = lifetime_of(powers, scenario)
    feasible = bool(
        np.all(rate_slacks >= -tol)
        and np.all(power_slacks >= -tol * np.maximum(1.0, caps))
        and np.all(ordering_slacks >= -tol * ordering_scale)
    )
    return FeasibilityReport(
        rates=tuple(float(r) for r in rates),
        rate_slacks=tuple(float(s) for s in rate_slacks),
        powers=tuple(float(p) for p in powers),
        power_caps=tuple(float(c) for c in caps),
        power_slacks=tuple(float(s) for s in power_slacks),
        order=perm,
        ordering_slacks=tuple(float(s) for s in ordering_slacks),
        lifetime=float(lifetime),
        zeta=float(1.0 / lifetime),
        feasible=feasible,
        tol=tol,
    )


@dataclass(frozen=True)
class PlacementSolution:
    """Solver output: UAV position, powers, decoding order and objective.

    zeta = 1/lifetime is the minimized slack objective; order is None for
    schemes without SIC (FDMA).  dual_certificate carries the final Lagrange
    multipliers and duality gap when the solver is dual-based; diagnostics is
    free-form JSON-ready metadata (per-order infeasibility reasons, traces).
    """

    algorithm: str
    status: str
    q: np.ndarray | None
    powers: np.ndarray | None
    order: tuple[int, ...] | None
    zeta: float | None
    lifetime: float
    report: FeasibilityReport | None = None
    dual_certificate: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "status": self.status,
            "q_m": [float(v) for v in self.q] if self.q is not None else None,
            "powers_w": [float(p) for p in self.powers] if self.powers is not None else None,
            "order": list(self.order) if self.order is not None else None,
            "zeta_per_s": float(self.zeta) if self.zeta is not None else None,
            "lifetime_s": float(self.lifetime),
            "report": self.report.to_dict() if self.report is not None else None,
            "dual_certificate": self.dual_certificate,
            "diagnostics": self.diagnostics,
        }


def scenario_to_dict(scenario: Scenario) -> dict:
    """Serialize to the versioned file schema (units explicit in field names)."""
    out = {
        "format": SCENARIO_FORMAT,
        "device_positions_m": [[float(x), float(y)] for x, y in scenario.device_positions],
        "battery_energies_j": [float(e) for e in scenario.battery_energies],
        "uav_altitude_m": float(scenario.uav_altitude),
        "ref_snr_db": linear_to_db(scenario.ref_snr),
        "noise_power_w": float(scenario.noise_power),
        "max_power_w": float(scenario.max_power),
        "circuit_power_w": float(scenario.circuit_power),
        "qos_rate_bps_hz": float(scenario.qos_rate),
        "interference_threshold_dbm": watts_to_dbm(scenario.interference_threshold),
        "csi_error_var": float(scenario.csi_error_var),
        "violation_prob": float(scenario.violation_prob),
        "primary_gain_estimates": [float(z) for z in scenario.primary_gain_estimates],
    }
    if scenario.region_size is not None:
        out["region_m"] = float(scenario.region_size)
    if scenario.seed is not None:
        out["seed"] = int(scenario.seed)
    return out


def scenario_from_dict(data: dict) -> Scenario:
    fmt = data.get("format")
    if fmt != SCENARIO_FORMAT:
        raise ValueError(f"unsupported scenario format {fmt!r} (expected {SCENARIO_FORMAT})")
    return Scenario(
        device_positions=np.asarray(data["device_positions_m"], dtype=float),
        battery_energies=np.asarray(data["battery_energies_j"], dtype=float),
        uav_altitude=float(data["uav_altitude_m"]),
        ref_snr=db_to_linear(float(data["ref_snr_db"])),
        noise_power=float(data["noise_power_w"]),
        max_power=float(data["max_power_w"]),
        circuit_power=float(data["circuit_power_w"]),
        qos_rate=float(data["qos_rate_bps_hz"]),
        interference_threshold=dbm_to_watts(float(data["interference_threshold_dbm"])),
        csi_error_var=float(data["csi_error_var"]),
        violation_prob=float(data["violation_prob"]),
        primary_gain_estimates=np.asarray(data["primary_gain_estimates"], dtype=float),
        region_size=float(data["region_m"]) if "region_m" in data else None,
        seed=int(data["seed"]) if "seed" in data else None,
    )


def _round_floats(obj, sig: int = 9):
    """Round floats to `sig` significant digits for reproducible serialization.

    Also normalizes numpy scalars and arrays so diagnostics payloads built
    from solver internals stay JSON-safe.
    """
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.{sig}g}")
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_round_floats(v, sig) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _round_floats(v, sig) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, sig) for v in obj]
    return obj


def canonical_json(obj) -> str:
    """Deterministic JSON text: 9 significant digits, sorted keys, trailing newline."""
    return json.dumps(_round_floats(obj), indent=2, sort_keys=True) + "\n"


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(canonical_json(scenario_to_dict(scenario)))


def load_scenario(path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))
