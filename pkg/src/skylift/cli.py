"""Command-line client for the solver service.

Every verb speaks HTTP to the FastAPI app: by default in-process through an
ASGI transport (no socket, still exercising the full request path), or to a
remote instance when --server is given.  `serve` runs that instance.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

import click
import httpx
import numpy as np

from .experiments import ALGORITHMS, SWEEP_PARAMETERS
from .model import canonical_json, evaluate, scenario_from_dict

REQUEST_TIMEOUT_S = 3600.0


def _request(server: str | None, method: str, path: str, payload: dict | None = None) -> dict:
    if server:
        with httpx.Client(base_url=server, timeout=REQUEST_TIMEOUT_S) as client:
            response = client.request(method, path, json=payload)
    else:
        from .service import app

        async def _go():
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://skylift.internal",
                timeout=REQUEST_TIMEOUT_S,
            ) as client:
                return await client.request(method, path, json=payload)

        response = asyncio.run(_go())
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except json.JSONDecodeError:
            detail = response.text
        raise click.ClickException(f"{path} failed ({response.status_code}): {detail}")
    return response.json()


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read {path}: {exc}") from exc


def _revalidate(scenario_payload: dict, solution: dict) -> str:
    """Re-audit an optimal solution locally before reporting it."""
    if solution["status"] != "optimal":
        return "not optimal; nothing to validate"
    scenario = scenario_from_dict(scenario_payload)
    if solution["algorithm"] == "fdma":
        from .baselines import fdma_rates
        from .model import allowable_powers

        q = np.asarray(solution["q_m"], dtype=float)
        powers = np.asarray(solution["powers_w"], dtype=float)
        caps = allowable_powers(scenario)
        rates = fdma_rates(q, powers, scenario)
        ok = bool(np.all(powers <= caps * (1 + 1e-6))
                  and np.all(rates >= scenario.qos_rate - 1e-6))
        if not ok:
            raise click.ClickException("fdma solution failed local re-validation")
        return "rates and power caps re-checked locally: ok"
    report = evaluate(
        np.asarray(solution["q_m"], dtype=float),
        np.asarray(solution["powers_w"], dtype=float),
        tuple(solution["order"]),
        scenario,
        tol=1e-6,
    )
    if not report.feasible:
        raise click.ClickException("solution failed local feasibility re-validation")
    return f"feasibility re-checked locally: ok (lifetime {report.lifetime:.6g} s)"


def _echo_solution(solution: dict, solve_time_ms: float) -> None:
    click.echo(f"algorithm:  {solution['algorithm']}")
    click.echo(f"status:     {solution['status']}")
    if solution["status"] == "optimal":
        q = solution["q_m"]
        click.echo(f"lifetime:   {solution['lifetime_s']:.6g} s")
        click.echo(f"zeta:       {solution['zeta_per_s']:.6g} 1/s")
        click.echo(f"uav at:     ({q[0]:.3f}, {q[1]:.3f}) m")
        if solution.get("order") is not None:
            click.echo(f"order:      {solution['order']}")
        powers = solution.get("powers_w")
        if powers:
            click.echo("powers:     " + ", ".join(f"{p:.6g}" for p in powers) + " W")
    else:
        reason = (solution.get("diagnostics") or {}).get("reason")
        if reason:
            click.echo(f"reason:     {reason}")
    click.echo(f"solve time: {solve_time_ms:.1f} ms")


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default is in-process.")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Max-min lifetime planning for a NOMA uplink served by one rotor relay."""
    ctx.obj = {"server": server}


@main.command()
@click.option("--seed", type=int, required=True, help="Generation seed.")
@click.option("--k", type=int, default=6, show_default=True, help="Device count.")
@click.option("--region-m", type=float, default=500.0, show_default=True)
@click.option("--altitude-m", type=float, default=100.0, show_default=True)
@click.option("--qos-rate", type=float, default=0.4, show_default=True,
              help="Per-device QoS spectral efficiency [bits/s/Hz].")
@click.option("--ith-dbm", type=float, default=28.0, show_default=True,
              help="Primary interference threshold [dBm].")
@click.option("--out", type=click.Path(dir_okay=False), default="scenario.json",
              show_default=True)
@click.pass_context
def generate(ctx, seed, k, region_m, altitude_m, qos_rate, ith_dbm, out) -> None:
    """Generate a random scenario file."""
    data = _request(ctx.obj["server"], "POST", "/generate", {
        "seed": seed,
        "device_count": k,
        "region_m": region_m,
        "altitude_m": altitude_m,
        "qos_rate_bps_hz": qos_rate,
        "interference_threshold_dbm": ith_dbm,
    })
    Path(out).write_text(canonical_json(data["scenario"]))
    click.echo(f"wrote {out}: K={k}, seed={seed}, region {region_m:.0f} m")


@main.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--algorithm", type=click.Choice(ALGORITHMS), default="op-noma-j",
              show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the solution JSON here.")
@click.pass_context
def solve(ctx, scenario_path, algorithm, tol, out) -> None:
    """Solve one scenario with the chosen algorithm."""
    scenario_payload = _load_json(scenario_path)
    data = _request(ctx.obj["server"], "POST", "/solve", {
        "scenario": scenario_payload, "algorithm": algorithm, "tol": tol,
    })
    solution = data["solution"]
    _echo_solution(solution, data["solve_time_ms"])
    click.echo(_revalidate(scenario_payload, solution))
    if out is not None:
        Path(out).write_text(canonical_json(
            {"solution": solution, "solve_time_ms": data["solve_time_ms"]}
        ))
        click.echo(f"wrote {out}")


@main.command()
@click.option("--param", type=click.Choice(SWEEP_PARAMETERS), required=True)
@click.option("--values", required=True,
              help="Comma-separated sweep values, e.g. 0.2,0.4,0.6.")
@click.option("--algorithm", "algorithms", type=click.Choice(ALGORITHMS),
              multiple=True, default=ALGORITHMS, show_default=True)
@click.option("--seed", "seeds", type=int, multiple=True, default=(1, 2, 3),
              show_default=True)
@click.option("--k", type=int, default=6, show_default=True)
@click.option("--region-m", type=float, default=500.0, show_default=True)
@click.option("--altitude-m", type=float, default=100.0, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def sweep(ctx, param, values, algorithms, seeds, k, region_m, altitude_m, tol, out) -> None:
    """Sweep one parameter over seeds and algorithms; write a CSV."""
    try:
        value_list = [float(v) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise click.ClickException(f"bad --values: {exc}") from exc
    data = _request(ctx.obj["server"], "POST", "/sweep", {
        "parameter": param,
        "values": value_list,
        "algorithms": list(algorithms),
        "seeds": list(seeds),
        "device_count": k,
        "region_m": region_m,
        "altitude_m": altitude_m,
        "tol": tol,
    })
    Path(out).write_text(data["csv"])
    click.echo(f"wrote {out}: {len(data['rows'])} rows "
               f"({param} over {len(value_list)} values, {len(seeds)} seeds)")


@main.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", type=float, default=1e-4, show_default=True)
@click.option("--phi-form", type=click.Choice(["taylor", "printed"]), default="taylor",
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="trace.csv",
              show_default=True, help="Inner-loop CSV; outer CSV lands next to it.")
@click.pass_context
def trace(ctx, scenario_path, tol, phi_form, out) -> None:
    """Export the low-complexity solver's convergence traces."""
    data = _request(ctx.obj["server"], "POST", "/trace", {
        "scenario": _load_json(scenario_path), "tol": tol, "phi_form": phi_form,
    })
    out_path = Path(out)
    outer_path = out_path.with_name(out_path.stem + "_outer" + (out_path.suffix or ".csv"))
    out_path.write_text(data["inner_csv"])
    outer_path.write_text(data["outer_csv"])
    solution = data["solution"]
    diag = solution.get("diagnostics") or {}
    click.echo(f"wrote {out_path} and {outer_path}")
    click.echo(f"status: {solution['status']}; lifetime {solution['lifetime_s']:.6g} s; "
               f"final phi {diag.get('final_phi', float('nan')):.3g}, "
               f"phi_g {diag.get('final_phi_g', float('nan')):.3g}; "
               f"{diag.get('outer_iterations', '?')} outer rounds ({diag.get('stopped', '?')})")


@main.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--algorithm", "algorithms", type=click.Choice(ALGORITHMS),
              multiple=True, default=ALGORITHMS, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the comparison rows as JSON.")
@click.pass_context
def compare(ctx, scenario_path, algorithms, tol, out) -> None:
    """Run several algorithms on one scenario and tabulate lifetimes."""
    data = _request(ctx.obj["server"], "POST", "/compare", {
        "scenario": _load_json(scenario_path),
        "algorithms": list(algorithms),
        "tol": tol,
    })
    rows = data["rows"]
    header = f"{'algorithm':<12} {'status':<11} {'lifetime (s)':>14} {'ratio':>7}  q (m)"
    click.echo(header)
    click.echo("-" * len(header))
    for row in rows:
        ratio = f"{row['ratio_to_best']:.4f}" if row.get("ratio_to_best") is not None else "-"
        q = row.get("q_m")
        q_text = f"({q[0]:.1f}, {q[1]:.1f})" if q else "-"
        click.echo(f"{row['algorithm']:<12} {row['status']:<11} "
                   f"{row['lifetime_s']:>14.6g} {ratio:>7}  {q_text}")
    if out is not None:
        Path(out).write_text(canonical_json(rows))
        click.echo(f"wrote {out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("skylift.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
