"""Command-line surface: scenario dispatch, CSV/JSON persistence, SVG plots.

Every subcommand reads an explicit scenario file (or flags for the
eigenvalue probe), writes CSV with a JSON sidecar carrying the fully
resolved configuration, and is deterministic: the same config produces
byte-identical CSV output.
"""

from __future__ import annotations

import csv
import functools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import Scenario, load_scenario, scenario_from_dict
from .dynamics import classify, critical_mu
from .eigen import principal_eigenvalue, threshold_s_star
from .errors import PerifrontError
from .fields import (BoundaryOp, constant_field, decay_field,
                     time_modulated_field)
from .freeboundary import build_vanishing_certificate
from .periodic import monotone_iteration
from .speed import speed_bounds

MAX_SWEEP_CELLS = 4096


def _fail(exc: Exception) -> None:
    payload = {"error": str(exc), "type": type(exc).__name__}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    raise SystemExit(1)


def _guarded(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except PerifrontError as exc:
            _fail(exc)
    return wrapper


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v
                             for v in row])


def _write_sidecar(path: Path, config: dict, extra: dict) -> None:
    payload = {"config": config, "version": __version__, **extra}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True,
                               default=float) + "\n")


def _outdir(ctx) -> Path:
    out = Path(ctx.obj["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


@click.group()
@click.option("--out", default="out", show_default=True,
              help="Output directory for CSV/JSON/SVG artifacts.")
@click.option("--svg", is_flag=True, help="Also render SVG line plots.")
@click.option("--workers", default=os.cpu_count() or 1, show_default=True,
              help="Worker pool size for sweep.")
@click.pass_context
def main(ctx, out, svg, workers):
    """Numerical laboratory for free-boundary competition fronts."""
    ctx.ensure_object(dict)
    ctx.obj.update(out=out, svg=svg, workers=workers)


def _front_csv(out: Path, name: str, traj) -> Path:
    path = out / f"{name}.csv"
    rows = zip(traj.times, traj.s, traj.sprime, traj.sup_u, traj.sup_v)
    _write_csv(path, ["t", "s", "sprime", "sup_u", "sup_v"],
               ([float(a), float(b), float(c), float(d), float(e)]
                for a, b, c, d, e in rows))
    return path


def _front_svg(out: Path, name: str, traj) -> None:
    from .svgplot import line_plot
    line_plot(out / f"{name}_front.svg",
              [(traj.times, traj.s, "s(t)")],
              title="Front position", xlabel="t", ylabel="s")
    sn = traj.snapshots[-1]
    xs_u = sn.s * traj.grid_u.nodes
    series = [(xs_u, sn.u, "u")]
    if traj.problem == "coupled":
        series.append((xs_u, sn.v, "v"))
    else:
        series.append((traj.grid_v.nodes, sn.v, "v"))
    line_plot(out / f"{name}_profiles.svg", series,
              title=f"Profiles at t = {sn.t:.6g}", xlabel="x", ylabel="density")


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.pass_context
@_guarded
def simulate(ctx, config_path):
    """Run a scenario and persist the front trajectory."""
    sc = load_scenario(config_path)
    traj = sc.run()
    out = _outdir(ctx)
    csv_path = _front_csv(out, sc.name, traj)
    _write_sidecar(out / f"{sc.name}.json", sc.to_dict(),
                   {"s_end": traj.s_end, "M": traj.M,
                    "sup_u_end": float(traj.sup_u[-1]),
                    "sup_v_end": float(traj.sup_v[-1])})
    if ctx.obj["svg"]:
        _front_svg(out, sc.name, traj)
    click.echo(f"s_end = {traj.s_end:.6g} ({csv_path})")


def _parse_field(text: str, period: float):
    kind, _, rest = text.partition(":")
    vals = [float(v) for v in rest.split(",")] if rest else []
    if kind == "const":
        return constant_field(vals[0], period)
    if kind == "sin":
        return time_modulated_field(vals[0], vals[1], period)
    if kind == "decay":
        amp = vals[3] if len(vals) > 3 else 0.0
        power = vals[2] if len(vals) > 2 else 1.0
        return decay_field(vals[0], vals[1], power, amp, period)
    raise click.BadParameter(
        f"unknown field spec {text!r}; use const:V, sin:BASE,AMP or "
        "decay:KAPPA,COEF[,POWER[,AMP]]")


@main.command()
@click.option("--ell", type=float, required=True)
@click.option("--d", "diff", type=float, default=1.0, show_default=True)
@click.option("--field", "field_spec", default="const:0", show_default=True)
@click.option("--bc", type=click.Choice(["dirichlet", "neumann"]),
              default="dirichlet", show_default=True)
@click.option("--period", type=float, default=1.0, show_default=True)
@click.option("--nx", type=int, default=256, show_default=True)
@click.option("--nt", type=int, default=512, show_default=True)
@click.pass_context
@_guarded
def eigen(ctx, ell, diff, field_spec, bc, period, nx, nt):
    """Principal periodic eigenvalue on (0, ell)."""
    c = _parse_field(field_spec, period)
    op = BoundaryOp.dirichlet() if bc == "dirichlet" else BoundaryOp.neumann()
    res = principal_eigenvalue(ell, diff, c, op, resolution=(nx, nt))
    out = _outdir(ctx)
    _write_sidecar(out / "eigen.json",
                   {"ell": ell, "d": diff, "field": field_spec, "bc": bc,
                    "period": period, "nx": nx, "nt": nt},
                   {"lambda1": res.lambda1, "iterations": res.iterations,
                    "residual": res.residual})
    click.echo(f"lambda1 = {res.lambda1:.8g}")


@main.command("periodic")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--length", type=float, default=20.0, show_default=True,
              help="Half-line truncation for the extremal states.")
@click.pass_context
@_guarded
def periodic_cmd(ctx, config_path, length):
    """Extremal periodic coexistence states via monotone iteration."""
    sc = load_scenario(config_path)
    a, b = sc.make_fields()
    states = monotone_iteration(a, b, sc.params, length)
    out = _outdir(ctx)
    xs = states.u_upper.grid.nodes
    rows = zip(xs, states.u_upper.values[0], states.u_lower.values[0],
               states.v_upper.values[0], states.v_lower.values[0])
    path = out / f"{sc.name}_states.csv"
    _write_csv(path, ["x", "u_upper", "u_lower", "v_upper", "v_lower"],
               ([float(v) for v in row] for row in rows))
    _write_sidecar(out / f"{sc.name}_states.json", sc.to_dict(),
                   {"iterations": states.iterations,
                    "ordering_certificate": states.ordering_certificate,
                    "length": length})
    if ctx.obj["svg"]:
        from .svgplot import line_plot
        line_plot(out / f"{sc.name}_states.svg",
                  [(xs, states.u_upper.values[0], "U upper"),
                   (xs, states.u_lower.values[0], "U lower"),
                   (xs, states.v_upper.values[0], "V upper"),
                   (xs, states.v_lower.values[0], "V lower")],
                  title="Extremal periodic states at t = 0",
                  xlabel="x", ylabel="density")
    click.echo(f"states written ({path})")


def _threshold_for(sc: Scenario) -> float:
    a, b = sc.make_fields()
    return threshold_s_star(a, b, sc.params, problem=sc.problem).s_star


@main.command("classify")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.pass_context
@_guarded
def classify_cmd(ctx, config_path):
    """Simulate and apply the spreading / vanishing decision rules."""
    sc = load_scenario(config_path)
    threshold = _threshold_for(sc)
    traj = sc.run()
    report = classify(traj, threshold, problem=sc.problem)
    out = _outdir(ctx)
    _write_sidecar(out / f"{sc.name}_classify.json", sc.to_dict(),
                   {"report": report.to_dict()})
    if ctx.obj["svg"]:
        _front_svg(out, f"{sc.name}_classify", traj)
    click.echo(f"verdict = {report.verdict} (threshold {threshold:.6g})")


@main.command("critical-mu")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--mu-lo", type=float, required=True)
@click.option("--mu-hi", type=float, required=True)
@click.option("--tolerance", type=float, default=0.05, show_default=True)
@click.pass_context
@_guarded
def critical_mu_cmd(ctx, config_path, mu_lo, mu_hi, tolerance):
    """Bracket the critical expansion capacity."""
    sc = load_scenario(config_path)
    threshold = _threshold_for(sc)

    def run(mu, t_end):
        return sc.run(mu=mu, t_end=t_end,
                      stop_when_s=threshold * 1.2)

    res = critical_mu(run, (mu_lo, mu_hi), threshold, sc.problem, sc.t_end,
                      tolerance)
    out = _outdir(ctx)
    _write_sidecar(out / f"{sc.name}_critical_mu.json", sc.to_dict(),
                   {"kind": res.kind, "mu_lo": res.mu_lo, "mu_hi": res.mu_hi,
                    "threshold": threshold,
                    "evaluations": [[m, v] for m, v in res.evaluations]})
    click.echo(f"{res.kind}: mu in [{res.mu_lo:.6g}, {res.mu_hi:.6g}]")


@main.command("speed")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.pass_context
@_guarded
def speed_cmd(ctx, config_path):
    """Semi-wave speed bounds for a single-front scenario."""
    sc = load_scenario(config_path)
    if sc.problem != "single":
        raise click.UsageError("speed bounds apply to the single-front problem")
    a, b = sc.make_fields()
    sb = speed_bounds(a, b, sc.params)
    out = _outdir(ctx)
    ts = sb.semiwave_upper.times
    path = out / f"{sc.name}_F0.csv"
    _write_csv(path, ["t", "F0_lower", "F0_upper"],
               ([float(t), float(lo), float(hi)] for t, lo, hi in
                zip(ts, sb.semiwave_lower.F_values, sb.semiwave_upper.F_values)))
    _write_sidecar(out / f"{sc.name}_speed.json", sc.to_dict(),
                   {"lower": sb.lower, "upper": sb.upper,
                    "mean_F_lower": sb.semiwave_lower.mean_F,
                    "mean_F_upper": sb.semiwave_upper.mean_F,
                    "band_cap_lower": sb.semiwave_lower.admissible_cap,
                    "band_cap_upper": sb.semiwave_upper.admissible_cap,
                    "flux_residual_lower": sb.semiwave_lower.flux_residual,
                    "flux_residual_upper": sb.semiwave_upper.flux_residual})
    if ctx.obj["svg"]:
        from .svgplot import line_plot
        line_plot(out / f"{sc.name}_F0.svg",
                  [(ts, sb.semiwave_lower.F_values, "F0 lower"),
                   (ts, sb.semiwave_upper.F_values, "F0 upper")],
                  title="Semi-wave drift", xlabel="t", ylabel="F0")
    click.echo(f"speed bounds: [{sb.lower:.6g}, {sb.upper:.6g}]")


@main.command("certify-vanishing")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--delta", type=float, default=0.1, show_default=True)
@click.option("--sigma", type=float, default=0.1, show_default=True)
@click.pass_context
@_guarded
def certify_vanishing(ctx, config_path, delta, sigma):
    """Build the slow-expansion vanishing certificate."""
    sc = load_scenario(config_path)
    a, b = sc.make_fields()
    cert = build_vanishing_certificate(a, b, sc.params, sc.make_init(),
                                       delta, sigma)
    out = _outdir(ctx)
    _write_sidecar(out / f"{sc.name}_certificate.json", sc.to_dict(),
                   {"delta": cert.delta, "sigma": cert.sigma,
                    "mu0": cert.mu0, "Lambda": cert.Lambda,
                    "lambda1": cert.lambda1, "gamma1": cert.gamma1,
                    "C": cert.C, "epsilon": cert.epsilon,
                    "confinement_radius": cert.confinement_radius * sc.params.s0,
                    "residuals": cert.residuals})
    click.echo(f"mu0 = {cert.mu0:.6g}, front confined below "
               f"{cert.confinement_radius * sc.params.s0:.6g}")


def _sweep_cell(args):
    """Worker: classify one grid cell; returns the result row dict."""
    sc_dict, mu, s0, threshold, cell_path = args
    path = Path(cell_path)
    if path.exists():
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError:
            path.unlink()
    sc = scenario_from_dict(sc_dict)
    try:
        traj = sc.run(mu=mu, s0=s0, stop_when_s=threshold * 1.2)
        report = classify(traj, threshold, problem=sc.problem)
        row = {"mu": mu, "s0": s0, "verdict": report.verdict,
               "s_end": traj.s_end, "supU_end": float(traj.sup_u[-1])}
    except PerifrontError as exc:
        row = {"mu": mu, "s0": s0, "verdict": "error",
               "s_end": float("nan"), "supU_end": float("nan"),
               "error": str(exc)}
    path.write_text(json.dumps(row, sort_keys=True) + "\n")
    return row


@main.command("sweep")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.pass_context
@_guarded
def sweep(ctx, config_path):
    """Classify over a (mu, s0) grid from the config's [sweep] table."""
    path = Path(config_path)
    if path.suffix == ".json":
        data = json.loads(path.read_text())
    else:
        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        data = tomllib.loads(path.read_text())
    grid = data.pop("sweep", None)
    if not grid:
        raise click.UsageError("config needs a [sweep] table with mu/s0 lists")
    sc = scenario_from_dict(data)
    mus = [float(v) for v in grid.get("mu", [sc.params.mu])]
    s0s = [float(v) for v in grid.get("s0", [sc.params.s0])]
    if len(mus) * len(s0s) > MAX_SWEEP_CELLS:
        raise click.UsageError(
            f"sweep limited to {MAX_SWEEP_CELLS} cells")
    threshold = _threshold_for(sc)
    out = _outdir(ctx)
    cells_dir = out / f"{sc.name}_cells"
    cells_dir.mkdir(exist_ok=True)
    tasks = [(sc.to_dict(), mu, s0, threshold,
              str(cells_dir / f"cell_{i}_{j}.json"))
             for i, mu in enumerate(mus) for j, s0 in enumerate(s0s)]
    workers = max(1, int(ctx.obj["workers"]))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_cell, tasks))
    else:
        rows = [_sweep_cell(t) for t in tasks]
    csv_path = out / f"{sc.name}_sweep.csv"
    _write_csv(csv_path, ["mu", "s0", "verdict", "s_end", "supU_end"],
               ([r["mu"], r["s0"], r["verdict"], r["s_end"], r["supU_end"]]
                for r in rows))
    _write_sidecar(out / f"{sc.name}_sweep.json", sc.to_dict(),
                   {"threshold": threshold, "mu": mus, "s0": s0s,
                    "cells": len(rows)})
    click.echo(f"{len(rows)} cells -> {csv_path}")


if __name__ == "__main__":
    main()
