"""Command-line front end.

Subcommands: derive, simulate, spectrum, window, wayinout, classify,
normalform, hopf-probe, figure, sweep, validate.  Exit codes: 0 success,
1 computation error, 2 invalid input, 3 validation failure.
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import click

from . import __version__
from .canard import (
    TranscriticalCase,
    classify_transcritical,
    complex_window,
    fold_spectrum,
    hopf_probe,
    normal_form_report,
    psi_fold,
    psi_transcritical,
    trace_zero_report,
)
from .errors import DivergedError, InvalidInputError, ToolError
from .integrate import (
    ManifoldSpec,
    escape_time,
    euler_iterate,
    kahan_iterate,
    reference_solve,
)
from .modified import derive_modified, transcritical_modified_paper_variant
from .report import (
    FOLD_DIGITS,
    TRANS_DIGITS,
    figure as render_figure,
    fold_start,
    trajectory_csv,
    transcritical_start,
    write_csv,
    write_manifest,
)
from .validate import run_all
from .vectorfield import SystemName, SystemParams, canonical

EXIT_COMPUTATION = 1
EXIT_INVALID = 2
EXIT_VALIDATION = 3


def _fraction(_ctx, _param, value):
    if value is None:
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"not a number: {value!r}")


def _opt_eps(default="0.1"):
    return click.option("--eps", default=default, callback=_fraction,
                        show_default=True, help="scale separation epsilon")


def _opt_h(default="0.01"):
    return click.option("--h", "h", default=default, callback=_fraction,
                        show_default=True, help="discrete time step")


_opt_out = click.option("--out", type=click.Path(path_type=Path),
                        default=Path("out"), show_default=True,
                        help="output directory")
_opt_digits = click.option("--digits", type=int, default=None,
                           help="working precision in significant digits")
_opt_jobs = click.option("--jobs", type=int, default=1, show_default=True,
                         help="parallel workers for sweeps")


@click.group()
@click.version_option(__version__)
def main():
    """Modified-equation toolkit for fast-slow canard systems."""


def _run(fn):
    try:
        fn()
    except InvalidInputError as exc:
        click.echo(f"invalid input: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    except ToolError as exc:
        click.echo(f"computation error: {exc}", err=True)
        sys.exit(EXIT_COMPUTATION)


_SYSTEMS = {name.value: name for name in SystemName}


def _field(system: str):
    try:
        return canonical(_SYSTEMS[system])
    except KeyError:
        raise InvalidInputError(
            f"unknown system {system!r}; choose from {sorted(_SYSTEMS)}")


@main.command()
@click.option("--system", required=True, type=click.Choice(sorted(_SYSTEMS)))
@click.option("--variant", type=click.Choice(["engine", "paper"]),
              default="engine", show_default=True,
              help="for the transcritical system, which printed form of the "
                   "correction term to emit")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
def derive(system, variant, fmt):
    """Print the first-order modified field as a sorted term list."""

    def go():
        if variant == "paper":
            if system != SystemName.TRANSCRITICAL.value:
                raise InvalidInputError(
                    "--variant paper is only defined for the transcritical "
                    "system")
            fh = transcritical_modified_paper_variant()
        else:
            fh = derive_modified(_field(system)).fh
        if fmt == "text":
            click.echo("\n".join(fh.to_lines()))
        else:
            click.echo(json.dumps(
                {"system": system, "variant": variant,
                 "fx": fh.fx.to_lines(), "fy": fh.fy.to_lines()}, indent=2))

    _run(go)


def _read_config(path: Path) -> dict:
    config = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidInputError(f"bad config line: {line!r}")
        key, value = line.split("=", 1)
        config[key.strip()] = value.strip()
    return config


@main.command()
@click.option("--system", type=click.Choice(sorted(_SYSTEMS)), default=None)
@click.option("--scheme", "schemes", multiple=True,
              type=click.Choice(["euler", "kahan", "reference",
                                 "modified-reference"]),
              help="schemes to run (repeatable); default euler")
@_opt_eps()
@_opt_h()
@click.option("--lam", default="0", callback=_fraction, show_default=True,
              help="unfolding parameter lambda")
@click.option("--x0", default=None, help="initial x (system default if unset)")
@click.option("--y0", default=None, help="initial y (system default if unset)")
@click.option("--t-max", type=float, default=None, help="simulated time span")
@_opt_digits
@_opt_out
@click.option("--config", "config_path", type=click.Path(exists=True,
              path_type=Path), default=None,
              help="key=value scenario file; CLI flags override its entries")
def simulate(system, schemes, eps, h, lam, x0, y0, t_max, digits, out,
             config_path):
    """Run map iterations and/or reference solves, emitting CSVs + manifest."""

    ctx = click.get_current_context()

    def _flag_set(name):
        src = ctx.get_parameter_source(name)
        return src is not None and src.name != "DEFAULT"

    def go():
        cfg = _read_config(config_path) if config_path else {}
        sys_name = system or cfg.get("system")
        if sys_name is None:
            raise InvalidInputError("--system is required (flag or config)")
        run_schemes = list(schemes) or (
            cfg.get("schemes", "euler").split(","))
        eps_v = eps if _flag_set("eps") or "eps" not in cfg \
            else Fraction(cfg["eps"])
        h_v = h if _flag_set("h") or "h" not in cfg else Fraction(cfg["h"])
        x0_v = Fraction(x0 if x0 is not None else cfg.get("x0", "-1/2"))
        t_max_v = t_max if t_max is not None else float(cfg.get("t_max", 2.5))

        field = _field(sys_name)
        fold_like = field.uses_epsinv
        digits_v = digits if digits is not None else (
            FOLD_DIGITS if fold_like else TRANS_DIGITS)
        params = SystemParams(eps=eps_v, h=h_v, lambda_p=lam)
        if y0 is not None:
            z0 = (x0_v, Fraction(y0))
        elif "y0" in cfg:
            z0 = (x0_v, Fraction(cfg["y0"]))
        elif sys_name == SystemName.TRANSCRITICAL.value:
            z0 = transcritical_start(x0_v, eps_v, h_v)
        else:
            z0 = fold_start(x0_v, eps_v)
        n_steps = int(round(t_max_v / float(h_v)))

        out.mkdir(parents=True, exist_ok=True)
        start = time.perf_counter()
        files = []
        for scheme in run_schemes:
            if scheme == "euler":
                try:
                    traj = euler_iterate(field, z0, params, n_steps, digits_v)
                except DivergedError as err:
                    traj = err.trajectory
                    click.echo(f"euler diverged at step {err.step_index}; "
                               "partial trajectory written", err=True)
            elif scheme == "kahan":
                try:
                    traj = kahan_iterate(field, z0, params, n_steps, digits_v)
                except DivergedError as err:
                    traj = err.trajectory
                    click.echo(f"kahan diverged at step {err.step_index}; "
                               "partial trajectory written", err=True)
            elif scheme == "reference":
                traj = reference_solve(field, z0, params, (0, t_max_v),
                                       t_eval=_linspace(t_max_v, n_steps),
                                       stop_radius=50.0)
            elif scheme == "modified-reference":
                fh = derive_modified(field).fh
                traj = reference_solve(fh, z0, params, (0, t_max_v),
                                       t_eval=_linspace(t_max_v, n_steps),
                                       stop_radius=50.0)
            else:
                raise InvalidInputError(f"unknown scheme {scheme!r}")
            files.append(trajectory_csv(out / f"{sys_name}_{scheme}.csv",
                                        traj))
        scenario = {
            "system": sys_name, "schemes": ",".join(run_schemes),
            "eps": str(eps_v), "h": str(h_v), "lambda": str(lam),
            "z0": [str(z0[0]), str(z0[1])], "t_max": t_max_v,
            "digits": digits_v,
        }
        write_manifest(out, scenario, files, time.perf_counter() - start)
        click.echo(f"wrote {len(files)} trajectory files to {out}")

    _run(go)


def _linspace(t_max, n):
    return [t_max * i / n for i in range(n + 1)]


@main.command()
@_opt_eps()
@_opt_h()
@click.option("--x-min", type=float, default=-0.5, show_default=True)
@click.option("--x-max", type=float, default=0.5, show_default=True)
@click.option("--n", type=int, default=1001, show_default=True)
@_opt_out
def spectrum(eps, h, x_min, x_max, n, out):
    """Sample the slow-manifold spectrum of the modified fold field."""

    def go():
        out.mkdir(parents=True, exist_ok=True)
        rows = []
        for i in range(n):
            x = x_min + (x_max - x_min) * i / max(n - 1, 1)
            s = fold_spectrum(x, float(eps), float(h))
            rows.append((x, s.mu1.real, s.mu1.imag, s.mu2.real, s.mu2.imag))
        path = write_csv(out / "spectrum.csv",
                         ["x", "re_mu1", "im_mu1", "re_mu2", "im_mu2"], rows)
        click.echo(str(path))

    _run(go)


@main.command()
@_opt_eps()
@_opt_h()
def window(eps, h):
    """Complex-eigenvalue window boundaries on the slow manifold."""

    def go():
        w = complex_window(float(eps), float(h))
        payload = {"x1": w.x1, "x2": w.x2}
        if 0 < h < eps:
            payload["trace_zero"] = trace_zero_report(float(eps), float(h))
        click.echo(json.dumps(payload, indent=2))

    _run(go)


@main.command()
@click.option("--system", type=click.Choice(["fold", "transcritical"]),
              default="fold", show_default=True)
@click.option("--x0", required=True, callback=_fraction)
@_opt_eps()
@_opt_h()
@click.option("--t-max", type=float, default=2.5, show_default=True)
@_opt_out
def wayinout(system, x0, eps, h, t_max, out):
    """Way-in/way-out map Psi along the canard solution, with its roots."""

    def go():
        out.mkdir(parents=True, exist_ok=True)
        if system == "fold":
            r = psi_fold(float(x0), float(eps), float(h), t_max)
            curve = r.psi_curve
            roots, exit_t = r.roots, r.exit_time
        else:
            c = classify_transcritical(x0, eps, h)
            ts = [t_max * i / 2000 for i in range(2001)]
            curve = [(t, float(psi_transcritical(float(x0), float(eps),
                                                 float(h), t))) for t in ts]
            if c.case is TranscriticalCase.TWO_ROOTS:
                roots, exit_t = [c.t1, c.t2], c.t1
            elif c.case is TranscriticalCase.TANGENCY:
                roots, exit_t = [float(c.t_star)], None
            else:
                roots, exit_t = [], None
        path = write_csv(out / f"psi_{system}.csv", ["t", "psi"], curve)
        click.echo(json.dumps({"roots": roots, "exit_time": exit_t,
                               "csv": str(path)}, indent=2))

    _run(go)


@main.command()
@click.option("--x0", required=True, callback=_fraction)
@_opt_eps("0.25")
@_opt_h("0.1")
def classify(x0, eps, h):
    """Transcritical case split: two roots, tangency, or no escape."""

    def go():
        c = classify_transcritical(x0, eps, h)
        click.echo(json.dumps({
            "case": c.case.value,
            "x0": str(x0), "eps": str(eps), "h": str(h),
            "t1": c.t1, "t2": c.t2,
            "t_star": None if c.t_star is None else str(c.t_star),
        }, indent=2))

    _run(go)


@main.command()
@_opt_eps()
@_opt_h()
def normalform(eps, h):
    """Normal-form constants and the Hopf/maximal-canard prediction."""

    def go():
        r = normal_form_report(float(eps), float(h))
        click.echo(json.dumps({
            "h_tilde": r.h_tilde,
            "a": [r.a1, r.a2, r.a3, r.a4, r.a5],
            "A": r.A,
            "lambda_hopf": r.lambda_h,
            "lambda_canard": r.lambda_c,
        }, indent=2))

    _run(go)


@main.command("hopf-probe")
@_opt_eps()
@_opt_h()
@click.option("--lam", default="-0.005", callback=_fraction,
              show_default=True)
@click.option("--horizon", type=float, default=200.0, show_default=True)
def hopf_probe_cmd(eps, h, lam, horizon):
    """Euler-orbit boundedness probe near the unfolded-fold equilibrium."""

    def go():
        r = hopf_probe(float(eps), float(h), float(lam), horizon)
        click.echo(json.dumps({
            "outcome": "bounded" if r.bounded else "escaped",
            "exit_time": r.exit_time,
            "final_radius": r.final_radius,
        }, indent=2))

    _run(go)


@main.command("figure")
@click.option("--n", "numbers", multiple=True,
              type=click.IntRange(1, 5), help="figure number (repeatable); "
              "default all")
@_opt_out
def figure_cmd(numbers, out):
    """Reproduce the study figures: CSV data plus an SVG render each."""

    def go():
        for n in numbers or (1, 2, 3, 4, 5):
            files = render_figure(n, out)
            click.echo(f"figure {n}: wrote {len(files)} files to {out}")

    _run(go)


def _sweep_point(args):
    index, system, x0_s, eps_s, h_s, run_euler, digits, t_max = args
    x0, eps, h = Fraction(x0_s), Fraction(eps_s), Fraction(h_s)
    record = {"index": index, "x0": x0_s}
    try:
        if system == "transcritical":
            c = classify_transcritical(x0, eps, h)
            record["case"] = c.case.value
            record["psi_roots"] = (
                [c.t1, c.t2] if c.case is TranscriticalCase.TWO_ROOTS
                else [float(c.t_star)] if c.case is TranscriticalCase.TANGENCY
                else [])
            record["predicted_exit"] = (
                c.t1 if c.case is TranscriticalCase.TWO_ROOTS else None)
            manifold = ManifoldSpec.transcritical_line()
            z0 = transcritical_start(x0, eps, h)
            field = canonical(SystemName.TRANSCRITICAL)
        else:
            r = psi_fold(float(x0), float(eps), float(h), t_max)
            record["psi_roots"] = r.roots
            record["predicted_exit"] = r.exit_time
            manifold = ManifoldSpec.fold_slow_manifold()
            z0 = fold_start(x0, eps)
            field = canonical(SystemName.FOLD_SLOW)
        if run_euler:
            params = SystemParams(eps=eps, h=h)
            n_steps = int(round(t_max / float(h)))
            try:
                traj = euler_iterate(field, z0, params, n_steps, digits)
            except DivergedError as err:
                traj = err.trajectory
            hit = escape_time(traj, manifold, 0.1)
            record["euler_exit"] = None if hit is None else hit[0]
    except ToolError as exc:
        record["error"] = str(exc)
    return record


@main.command()
@click.option("--system", type=click.Choice(["fold", "transcritical"]),
              default="transcritical", show_default=True)
@click.option("--x0-grid", required=True,
              help="comma-separated list of initial x values")
@_opt_eps("0.25")
@_opt_h("0.1")
@click.option("--t-max", type=float, default=100.0, show_default=True)
@click.option("--simulate/--no-simulate", "run_euler", default=False,
              help="also run the Euler map and record measured exit times")
@_opt_digits
@_opt_jobs
@_opt_out
def sweep(system, x0_grid, eps, h, t_max, run_euler, digits, jobs, out):
    """Grid sweep over initial conditions; JSON output ordered by index."""

    def go():
        xs = [s for s in (p.strip() for p in x0_grid.split(",")) if s]
        digits_v = digits if digits is not None else (
            TRANS_DIGITS if system == "transcritical" else FOLD_DIGITS)
        tasks = [(i, system, x, str(eps), str(h), run_euler, digits_v, t_max)
                 for i, x in enumerate(xs)]
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                records = list(pool.map(_sweep_point, tasks))
        else:
            records = [_sweep_point(t) for t in tasks]
        records.sort(key=lambda r: r["index"])
        out.mkdir(parents=True, exist_ok=True)
        path = out / "sweep.json"
        payload = {"system": system, "eps": str(eps), "h": str(h),
                   "points": records}
        path.write_text(json.dumps(payload, indent=2) + "\n")
        click.echo(str(path))

    _run(go)


@main.command()
def validate():
    """Run the built-in symbolic and numeric consistency checks."""
    results = run_all()
    failed = False
    for r in results:
        if r.ok:
            status = ("expected-divergence" if r.expected_divergence
                      else "pass")
        else:
            status = "FAIL"
            failed = True
        click.echo(f"[{status}] {r.name}: {r.detail}")
    if failed:
        sys.exit(EXIT_VALIDATION)


if __name__ == "__main__":
    main()
