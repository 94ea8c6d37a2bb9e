"""CSV/JSON/figure emission for the CLI reproduction pipelines.

Figure numbering follows the study layout: 1 = fold spectrum, 2 = fold
trajectories with the way-in/way-out exit marker, 3 = unfolded-fold
orbits at the critical parameter, 4 = transcritical trajectories with
the exit-time marker, 5 = transcritical stabilization at the boundary
initial condition.
"""

from __future__ import annotations

import hashlib
import json
import time
from fractions import Fraction
from pathlib import Path

import matplotlib
import mpmath as mp
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import __version__ as _version
from .canard import (
    TranscriticalCase,
    classify_transcritical,
    complex_window,
    fold_spectrum,
    psi_fold,
)
from .errors import DivergedError
from .integrate import (
    ManifoldSpec,
    euler_iterate,
    reference_solve,
)
from .modified import derive_modified
from .vectorfield import SystemName, SystemParams, canonical

FOLD_EPS = Fraction(1, 10)
FOLD_H = Fraction(1, 100)
FOLD_X0 = Fraction(-1, 2)  # not stated in the source material; config default
TRANS_EPS = Fraction(1, 4)
TRANS_H = Fraction(1, 10)
TRANS_OFFSET = Fraction(1, 200)  # off-line start for escape-type runs

FOLD_DIGITS = 50
TRANS_DIGITS = 100


def fold_start(x0=FOLD_X0, eps=FOLD_EPS):
    """Default fold initial condition: on S_eps at the given x."""
    x0 = Fraction(x0) if isinstance(x0, (int, str)) else x0
    return (x0, x0 * x0 - eps / 2)


def transcritical_start(x0, eps=TRANS_EPS, h=TRANS_H):
    """Default transcritical initial condition.

    Escape-type starts (two-root classification) sit slightly off the
    invariant line, modelling the approach to the attracting branch;
    tangency and no-escape starts sit exactly on it, since the line is
    invariant for the Euler map and the stabilization statement is about
    staying on it.
    """
    c = classify_transcritical(x0, eps, h)
    if c.case is TranscriticalCase.TWO_ROOTS:
        return (x0, x0 + TRANS_OFFSET)
    return (x0, x0)


def format_number(v, digits: int) -> str:
    sig = min(digits, 30)
    if isinstance(v, (int, Fraction)):
        v = mp.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else mp.mpf(v)
    if isinstance(v, float):
        return repr(v)
    return mp.nstr(v, sig)


def write_csv(path: Path, header: list[str], rows, digits: int = 17) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_number(v, digits) for v in row) + "\n")
    return path


def trajectory_csv(path: Path, traj) -> Path:
    return write_csv(path, ["t", "x", "y"], traj.samples, digits=traj.digits)


def _digest(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(outdir: Path, scenario: dict, files: list[Path],
                   wall_time: float, name: str = "manifest.json") -> Path:
    outdir = Path(outdir)
    manifest = {
        "scenario": scenario,
        "tool_version": _version,
        "wall_time_s": round(wall_time, 3),
        "deterministic": "no RNG is used anywhere; identical scenarios "
                         "reproduce byte-identical CSVs",
        "files": [
            {"name": Path(f).name, "sha256": _digest(f)} for f in sorted(files)
        ],
    }
    path = outdir / name
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
        fh.write("\n")
    return path


def _scenario_dict(**kwargs) -> dict:
    return {k: str(v) for k, v in kwargs.items()}


# -- figure pipelines --------------------------------------------------------


def _euler_capped(field, z0, params, n_steps, digits):
    """Euler run that keeps the partial trajectory on divergence."""
    try:
        return euler_iterate(field, z0, params, n_steps, digits)
    except DivergedError as err:
        return err.trajectory


def figure1(outdir: Path) -> list[Path]:
    """Fold spectrum over x in [-0.5, 0.5] with window annotations."""
    eps, h = float(FOLD_EPS), float(FOLD_H)
    w = complex_window(eps, h)
    xs = np.linspace(-0.5, 0.5, 1001)
    rows = []
    for x in xs:
        s = fold_spectrum(float(x), eps, h)
        rows.append((x, s.mu1.real, s.mu1.imag, s.mu2.real, s.mu2.imag))
    csv = write_csv(Path(outdir) / "fig1_spectrum.csv",
                    ["x", "re_mu1", "im_mu1", "re_mu2", "im_mu2"], rows)
    wjson = Path(outdir) / "fig1_window.json"
    wjson.write_text(json.dumps({"x1": w.x1, "x2": w.x2}, indent=2) + "\n")

    fig, ax = plt.subplots(figsize=(7, 4.5))
    data = np.array(rows)
    ax.plot(data[:, 0], data[:, 1], label="Re mu1", color="tab:red")
    ax.plot(data[:, 0], data[:, 3], label="Re mu2", color="tab:blue")
    for xb in (w.x1, w.x2):
        ax.axvline(xb, color="gray", linestyle=":")
    ax.set_xlabel("x")
    ax.set_ylabel("Re mu")
    ax.set_title(f"Slow-manifold spectrum, eps={eps}, h={h}; "
                 f"complex window [{w.x1:.3f}, {w.x2:.3f}]")
    ax.legend()
    svg = Path(outdir) / "fig1.svg"
    fig.savefig(svg)
    plt.close(fig)
    return [csv, wjson, svg]


def _fold_runs(lambda_p=Fraction(0)):
    params = SystemParams(eps=FOLD_EPS, h=FOLD_H, lambda_p=lambda_p)
    fold = canonical(SystemName.FOLD_SLOW if lambda_p == 0
                     else SystemName.FOLD_LAMBDA)
    z0 = fold_start()
    n_steps = 260
    euler = _euler_capped(fold, z0, params, n_steps, FOLD_DIGITS)
    return params, fold, z0, euler


def figure2(outdir: Path) -> list[Path]:
    """Fold: Euler vs both reference flows, plus the exit marker."""
    params, fold, z0, euler = _fold_runs()
    manifold = ManifoldSpec.fold_slow_manifold()
    t_end = float(euler.samples[-1][0])
    t_eval = np.linspace(0.0, t_end, 4 * len(euler))
    ref = reference_solve(fold, (float(z0[0]), float(z0[1])), params,
                          (0.0, t_end), t_eval=t_eval, stop_radius=10.0)
    fh = derive_modified(fold).fh
    ref_mod = reference_solve(fh, (float(z0[0]), float(z0[1])), params,
                              (0.0, t_end), t_eval=t_eval, stop_radius=10.0)
    psi = psi_fold(float(z0[0]), float(params.eps), float(params.h), t_max=2.5)
    x_exit = float(z0[0]) + psi.exit_time / 2

    files = [
        trajectory_csv(Path(outdir) / "fig2_euler.csv", euler),
        trajectory_csv(Path(outdir) / "fig2_reference.csv", ref),
        trajectory_csv(Path(outdir) / "fig2_modified_reference.csv", ref_mod),
        write_csv(Path(outdir) / "fig2_psi.csv", ["t", "psi"], psi.psi_curve),
    ]

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 8))
    xs = np.linspace(-0.7, 0.9, 400)
    ax1.plot(xs, xs**2 - float(params.eps) / 2, "k--", lw=1,
             label="y = x^2 - eps/2")
    for traj, color, label in ((euler, "tab:red", "Euler map"),
                               (ref, "tab:cyan", "reference (original)"),
                               (ref_mod, "tab:green", "reference (modified)")):
        t, x, y = traj.arrays()
        ax1.plot(x, y, color=color, label=label)
    ax1.set_xlim(-0.7, 0.9)
    ax1.set_ylim(-0.1, 0.6)
    ax1.set_xlabel("x")
    ax1.set_ylabel("y")
    ax1.legend(fontsize=8)
    for traj, color in ((euler, "tab:red"), (ref, "tab:cyan"),
                        (ref_mod, "tab:green")):
        t, x, y = traj.arrays()
        ax2.plot(t, x, color=color)
    ax2.axhline(x_exit, color="k", lw=1,
                label=f"x0 + tau/2 = {x_exit:.3f}")
    ax2.set_ylim(-0.7, 0.9)
    ax2.set_xlabel("t")
    ax2.set_ylabel("x")
    ax2.legend(fontsize=8)
    fig.suptitle(f"Fold canard, eps={float(params.eps)}, h={float(params.h)}")
    svg = Path(outdir) / "fig2.svg"
    fig.savefig(svg)
    plt.close(fig)
    files.append(svg)
    return files


def figure3(outdir: Path) -> list[Path]:
    """Unfolded fold: Euler orbits at lambda = 0 and lambda = -h/2."""
    files = []
    fig, ax = plt.subplots(figsize=(7, 4.5))
    eps = float(FOLD_EPS)
    xs = np.linspace(-0.7, 0.9, 400)
    ax.plot(xs, xs**2 - eps / 2, "k--", lw=1, label="y = x^2 - eps/2")
    for lam, color, n_steps in ((Fraction(0), "tab:red", 260),
                                (-FOLD_H / 2, "tab:blue", 20000)):
        params = SystemParams(eps=FOLD_EPS, h=FOLD_H, lambda_p=lam)
        field = canonical(SystemName.FOLD_LAMBDA)
        z0 = (lam + Fraction(1, 20), lam * lam)
        traj = _euler_capped(field, z0, params, n_steps, FOLD_DIGITS)
        tag = "lambda0" if lam == 0 else "lambdaH"
        files.append(trajectory_csv(Path(outdir) / f"fig3_euler_{tag}.csv",
                                    traj))
        t, x, y = traj.arrays()
        ax.plot(x, y, color=color, lw=0.8,
                label=f"Euler, lambda={float(lam)}")
    ax.set_xlim(-0.7, 0.9)
    ax.set_ylim(-0.1, 0.6)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(fontsize=8)
    ax.set_title("Unfolded fold: escape at lambda=0 vs bounded orbit at "
                 "lambda=-h/2")
    svg = Path(outdir) / "fig3.svg"
    fig.savefig(svg)
    plt.close(fig)
    files.append(svg)
    return files


def figure4(outdir: Path) -> list[Path]:
    """Transcritical: Euler vs reference flows plus the exit-time marker."""
    params = SystemParams(eps=TRANS_EPS, h=TRANS_H)
    trans = canonical(SystemName.TRANSCRITICAL)
    x0 = Fraction(-2)
    z0 = transcritical_start(x0)
    n_steps = 250
    euler = _euler_capped(trans, z0, params, n_steps, TRANS_DIGITS)
    t_end = float(euler.samples[-1][0])
    t_eval = np.linspace(0.0, t_end, 2001)
    ref = reference_solve(trans, (float(z0[0]), float(z0[1])), params,
                          (0.0, t_end), t_eval=t_eval, stop_radius=50.0)
    fh = derive_modified(trans).fh
    ref_mod = reference_solve(fh, (float(z0[0]), float(z0[1])), params,
                              (0.0, t_end), t_eval=t_eval, stop_radius=50.0)
    c = classify_transcritical(x0, TRANS_EPS, TRANS_H)

    files = [
        trajectory_csv(Path(outdir) / "fig4_euler.csv", euler),
        trajectory_csv(Path(outdir) / "fig4_reference.csv", ref),
        trajectory_csv(Path(outdir) / "fig4_modified_reference.csv", ref_mod),
    ]
    (Path(outdir) / "fig4_classification.json").write_text(json.dumps(
        {"case": c.case.value, "t1": c.t1, "t2": c.t2}, indent=2) + "\n")
    files.append(Path(outdir) / "fig4_classification.json")

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 8))
    ys = np.linspace(-3, 5, 200)
    ax1.plot(ys, ys, "k--", lw=1)
    ax1.plot(-ys, ys, "k--", lw=1)
    for traj, color, label in ((euler, "tab:red", "Euler map"),
                               (ref, "tab:cyan", "reference (original)"),
                               (ref_mod, "tab:green", "reference (modified)")):
        t, x, y = traj.arrays()
        ax1.plot(x, y, color=color, label=label)
    ax1.set_xlim(-3, 8)
    ax1.set_ylim(-3, 5)
    ax1.set_xlabel("x")
    ax1.set_ylabel("y")
    ax1.legend(fontsize=8)
    for traj, color in ((euler, "tab:red"), (ref, "tab:cyan"),
                        (ref_mod, "tab:green")):
        t, x, y = traj.arrays()
        ax2.plot(t, x, color=color)
    ax2.axvline(c.t1, color="k", lw=1, label=f"tau = {c.t1:.2f}")
    ax2.set_ylim(-3, 8)
    ax2.set_xlabel("t")
    ax2.set_ylabel("x")
    ax2.legend(fontsize=8)
    fig.suptitle(f"Transcritical canard, eps={float(TRANS_EPS)}, "
                 f"h={float(TRANS_H)}")
    svg = Path(outdir) / "fig4.svg"
    fig.savefig(svg)
    plt.close(fig)
    files.append(svg)
    return files


def figure5(outdir: Path) -> list[Path]:
    """Transcritical Euler runs at x0 = -2 (escape) and x0 = -1/(2h)."""
    params = SystemParams(eps=TRANS_EPS, h=TRANS_H)
    trans = canonical(SystemName.TRANSCRITICAL)
    files = []
    fig, ax = plt.subplots(figsize=(7, 4.5))
    boundary_x0 = Fraction(-1) / (2 * TRANS_H)
    for x0, color, n_steps in ((Fraction(-2), "tab:red", 250),
                               (boundary_x0, "tab:blue", 1000)):
        z0 = transcritical_start(x0)
        traj = _euler_capped(trans, z0, params, n_steps, TRANS_DIGITS)
        tag = "escape" if x0 == -2 else "boundary"
        files.append(trajectory_csv(Path(outdir) / f"fig5_euler_{tag}.csv",
                                    traj))
        t, x, y = traj.arrays()
        ax.plot(t, x, color=color, lw=0.9, label=f"x0 = {float(x0)}")
    ax.set_ylim(-6, 25)
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    ax.legend(fontsize=8)
    ax.set_title("Transcritical Euler: escape vs arbitrarily long "
                 "stabilization at x0 = -1/(2h)")
    svg = Path(outdir) / "fig5.svg"
    fig.savefig(svg)
    plt.close(fig)
    files.append(svg)
    return files


_FIGURES = {1: figure1, 2: figure2, 3: figure3, 4: figure4, 5: figure5}


def figure(n: int, outdir) -> list[Path]:
    """Emit CSVs, JSON annotations and an SVG render for figure n."""
    if n not in _FIGURES:
        raise ValueError(f"figure number must be 1..5, got {n}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    files = _FIGURES[n](outdir)
    manifest = write_manifest(
        outdir,
        _scenario_dict(figure=n),
        files,
        time.perf_counter() - start,
        name=f"fig{n}_manifest.json",
    )
    return files + [manifest]
