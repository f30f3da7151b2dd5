"""Command-line front end.

Usage::

    phasepad amplitude --state test --window gaussian:beta=1 --out out/
    phasepad figure 4 --out figs/
    phasepad validate

Exit codes: 0 success, 1 a numerical check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .. import __version__
from .. import analytic as A
from ..dynamics import EvolutionConfig, evolve_amplitude
from ..errors import ConfigError, PhasepadError
from ..figures import FIGURE_NUMBERS, build_figure
from ..numgrid import Wavefunction1D, integrate_2d, l2_norm
from ..staralg import PolySymbol, born_wigner, bopp_apply, expectation, subspace_residual
from ..validation import CHECKS, run_all
from ..windows import GaussianWindow, WindowSpec, format_window
from ..xform import TransformPlan, forward_amplitude, spectrogram_husimi
from .config import RunConfig, load_wavefunction
from .io import read_field, write_field, write_json

__all__ = ["main", "build_parser", "read_field", "EXIT_OK", "EXIT_CHECK_FAILED", "EXIT_CONFIG"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2

#: Tolerance on eigenrelation residuals reported by ``eigenstate``.
EIGEN_TOLERANCE = 1e-6


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with [state], [window], [grid], [output] "
                                         "and [evolve] sections")
    common.add_argument("--window", help="gaussian:beta=1,xw=0,kw=0 | square:a=1 | "
                                         "oscillator:n=1,beta=1,xw=0,kw=0")
    common.add_argument("--state", help="test | coherent:mu=1+0.5j | oscillator:n=1 | "
                                        "free:gamma=1 | file:<path>")
    common.add_argument("--grid", help="qmin,qmax,nq,pmin,pmax,np")
    common.add_argument("--xgrid", help="xmin,xmax,nx for the coordinate grid")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "bin"), help="data file format")

    parser = argparse.ArgumentParser(prog="phasepad",
                                     description="Window-dependent phase-space amplitudes.")
    parser.add_argument("--version", action="version", version=f"phasepad {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("amplitude", parents=[common], help="amplitude Re, Im and |Psi|^2")
    sub.add_parser("wigner", parents=[common], help="Wigner function through the Born relation")
    sub.add_parser("husimi", parents=[common], help="spectrogram |Psi(q/2,p/2)/2|^2")
    sub.add_parser("bargmann", parents=[common], help="Bargmann function (Gaussian windows)")
    ev = sub.add_parser("evolve", parents=[common], help="snapshots of the evolving amplitude")
    ev.add_argument("--potential", help="polynomial V(q), e.g. 'q^2/2'")
    ev.add_argument("--dt", type=float)
    ev.add_argument("--steps", type=int)
    ev.add_argument("--snapshots", type=int)
    eg = sub.add_parser("eigenstate", parents=[common],
                        help="eigen-amplitude (oscillator:n, momentum:k0, position:x0)")
    eg.add_argument("--potential", help="polynomial V(q) for oscillator states")
    fg = sub.add_parser("figure", parents=[common], help="data for figure 1..6")
    fg.add_argument("number", type=int, choices=FIGURE_NUMBERS)
    va = sub.add_parser("validate", parents=[common], help="run the acceptance suite")
    va.add_argument("--only", help="comma-separated criterion numbers")
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {"state": args.state, "window": args.window, "grid": args.grid,
                 "x_axis": args.xgrid, "out_dir": args.out, "fmt": args.format}
    for key in ("potential", "dt", "steps", "snapshots"):
        overrides[key] = getattr(args, key, None)
    return cfg.with_overrides(overrides)


def _window(cfg: RunConfig) -> WindowSpec:
    if cfg.window is not None:
        return cfg.window
    if cfg.state.name == "test":
        return A.test_state_window(1.0)
    return GaussianWindow()


def _wavefunction(cfg: RunConfig) -> Wavefunction1D:
    st = cfg.state
    if st.name == "file":
        return load_wavefunction(st.path)
    if st.name == "test":
        ev = A.test_state().wavefunction
    elif st.name == "coherent":
        ev = A.coherent_wavefunction(st.get("mu"))
    elif st.name == "oscillator":
        ev = A.oscillator_wavefunction(st.get("n"))
    elif st.name == "free":
        ev = A.free_particle_wavefunction(0.0, st.get("gamma"))
    else:
        raise ConfigError(f"state {st.name!r} is not normalizable; use the eigenstate command")
    return ev.sample(cfg.x_axis)


def _warning_list(record: list) -> list:
    """Text of captured warnings (and plain notes) for the metadata record."""
    out = []
    for w in record:
        if isinstance(w, str):
            out.append(w)
        else:
            out.append(f"{w.category.__name__}: {w.message}")
    return out


def _plan(cfg: RunConfig, psi: Wavefunction1D, window: WindowSpec) -> TransformPlan:
    return TransformPlan(psi.axis, cfg.q_axis, cfg.p_axis, window)


def _base_metadata(cfg: RunConfig, command: str, window: WindowSpec) -> dict:
    try:
        wtext = format_window(window)
    except ConfigError:
        wtext = "custom"
    return {"tool": "phasepad", "version": __version__, "command": command,
            "state": cfg.state.to_string(), "window": wtext,
            "q_axis": cfg.q_axis.to_string(), "p_axis": cfg.p_axis.to_string(),
            "x_axis": cfg.x_axis.to_string()}


def _amplitude(cfg: RunConfig):
    window = _window(cfg)
    psi = _wavefunction(cfg)
    return window, psi, forward_amplitude(psi, _plan(cfg, psi, window))


def _emit_amplitude(cfg, name, Psi, meta):
    out = Path(cfg.out_dir)
    write_field(out, name, Psi, cfg.fmt, real=False, metadata=meta)
    write_field(out, f"{name}_modsq", Psi.abs2(), cfg.fmt, real=True, metadata=meta)


def cmd_amplitude(cfg: RunConfig, record: list) -> int:
    window, psi, Psi = _amplitude(cfg)
    meta = _base_metadata(cfg, "amplitude", window)
    meta["checks"] = {"norm_squared": l2_norm(Psi) ** 2,
                      "subspace_residual": subspace_residual(Psi, window)}
    meta["warnings"] = _warning_list(record)
    _emit_amplitude(cfg, "amplitude", Psi, meta)
    return EXIT_OK


def cmd_wigner(cfg: RunConfig, record: list) -> int:
    window, psi, Psi = _amplitude(cfg)
    W = born_wigner(Psi)
    meta = _base_metadata(cfg, "wigner", window)
    meta["checks"] = {"integral": integrate_2d(W).real, "min": float(np.min(W.values))}
    meta["warnings"] = _warning_list(record)
    write_field(cfg.out_dir, "wigner", W, cfg.fmt, real=True, metadata=meta)
    return EXIT_OK


def cmd_husimi(cfg: RunConfig, record: list) -> int:
    window, psi, Psi = _amplitude(cfg)
    H = spectrogram_husimi(Psi)
    meta = _base_metadata(cfg, "husimi", window)
    meta["checks"] = {"integral": integrate_2d(H).real, "min": float(np.min(H.values))}
    meta["warnings"] = _warning_list(record)
    write_field(cfg.out_dir, "husimi", H, cfg.fmt, real=True, metadata=meta)
    return EXIT_OK


def cmd_bargmann(cfg: RunConfig, record: list) -> int:
    window, psi, Psi = _amplitude(cfg)
    if not isinstance(window, GaussianWindow):
        raise ConfigError("the Bargmann representation needs a Gaussian window")
    G, mask = A.extract_bargmann(Psi, window.beta, window.lam)
    meta = _base_metadata(cfg, "bargmann", window)
    meta["checks"] = {"cauchy_riemann_residual": A.amplitude_cr_residual(Psi, window.beta,
                                                                         window.lam),
                      "mask_fraction": float(np.mean(mask))}
    meta["warnings"] = _warning_list(record)
    write_field(cfg.out_dir, "bargmann", G, cfg.fmt, real=False, metadata=meta)
    write_field(cfg.out_dir, "bargmann_mask", G.with_values(mask.astype(float)), cfg.fmt,
                real=True, metadata=meta)
    return EXIT_OK


def _potential(cfg: RunConfig) -> PolySymbol:
    try:
        return PolySymbol.parse(cfg.potential)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot parse potential {cfg.potential!r}: {exc}") from exc


def cmd_evolve(cfg: RunConfig, record: list) -> int:
    window = _window(cfg)
    psi0 = _wavefunction(cfg)
    ecfg = EvolutionConfig(_potential(cfg), cfg.dt, cfg.steps, window, psi0.axis, cfg.q_axis,
                           cfg.p_axis, snapshots=cfg.snapshots)
    snaps = evolve_amplitude(psi0, ecfg)
    H = ecfg.hamiltonian
    meta = _base_metadata(cfg, "evolve", window)
    times, norms, energies = [], [], []
    for snap in snaps:
        times.append(snap.t)
        norms.append(l2_norm(snap.field) ** 2)
        energies.append(expectation(H, snap.field).real)
    first, last = snaps[0].field.values, snaps[-1].field.values
    meta.update({"potential": H.to_string(), "dt": cfg.dt, "steps": cfg.steps})
    meta["checks"] = {
        "times": times,
        "norm_squared": norms,
        "energy": energies,
        "max_abs_final_minus_initial": float(np.max(np.abs(last - first))),
        "max_abs_final_plus_initial": float(np.max(np.abs(last + first))),
    }
    meta["warnings"] = _warning_list(record)
    for k, snap in enumerate(snaps):
        write_field(cfg.out_dir, f"snapshot_{k:03d}", snap.field, cfg.fmt, real=False,
                    metadata=dict(meta, t=snap.t, index=k))
    write_json(Path(cfg.out_dir) / "evolve.json", meta)
    return EXIT_OK


def cmd_eigenstate(cfg: RunConfig, record: list) -> int:
    """Eigen-amplitude with its eigenrelation residual.

    Derivatives are spectral along directions in which the amplitude decays
    and finite-difference along the others; the residual is measured on the
    points where the stencils are valid.
    """
    window = _window(cfg)
    st = cfg.state
    qa, pa = cfg.q_axis, cfg.p_axis
    if st.name == "oscillator":
        n = st.get("n")
        try:
            Psi = A.oscillator_amplitude(n, window).on_grid(qa, pa)
        except NotImplementedError:
            Psi = forward_amplitude(A.oscillator_wavefunction(n).sample(cfg.x_axis),
                                    TransformPlan(cfg.x_axis, qa, pa, window))
            record.append("oscillator amplitude computed by the numerical transform")
        eigenvalue = n + 0.5
        symbol = PolySymbol.p() ** 2 / 2 + _potential(cfg)
        method = "spectral" if isinstance(window, GaussianWindow) else ("spectral", "fd")
    elif st.name == "momentum":
        eigenvalue = st.get("k0")
        Psi = A.momentum_eigenamplitude(eigenvalue, window).on_grid(qa, pa)
        symbol, method = PolySymbol.p(), ("fd", "spectral")
    elif st.name == "position":
        eigenvalue = st.get("x0")
        Psi = A.position_eigenamplitude(eigenvalue, window).on_grid(qa, pa)
        symbol, method = PolySymbol.q(), ("spectral", "fd")
    else:
        raise ConfigError("eigenstate needs oscillator:n=..., momentum:k0=... or position:x0=...")
    applied, valid = bopp_apply(symbol, "left", Psi, method=method, return_mask=True)
    diff = (applied.values - eigenvalue * Psi.values)[valid]
    resid = float(np.linalg.norm(diff) / np.linalg.norm(Psi.values[valid]))
    meta = _base_metadata(cfg, "eigenstate", window)
    meta["checks"] = {"eigenvalue": eigenvalue, "eigen_residual": resid,
                      "tolerance": EIGEN_TOLERANCE, "valid_fraction": float(np.mean(valid))}
    meta["warnings"] = _warning_list(record)
    _emit_amplitude(cfg, "eigenstate", Psi, meta)
    return EXIT_OK if resid <= EIGEN_TOLERANCE else EXIT_CHECK_FAILED


def cmd_figure(cfg: RunConfig, number: int, record: list) -> int:
    fig = build_figure(number, cfg.q_axis, cfg.p_axis)
    meta = {"tool": "phasepad", "version": __version__, "command": "figure",
            "figure": number, "title": fig.title, "params": fig.params,
            "warnings": _warning_list(record)}
    for name, field in fig.fields.items():
        write_field(cfg.out_dir, f"fig{number}_{name}", field, cfg.fmt, real=True, metadata=meta)
    return EXIT_OK


def cmd_validate(cfg: RunConfig, only: str | None, record: list) -> int:
    numbers = None
    if only:
        try:
            numbers = sorted({int(s) for s in only.split(",") if s.strip()})
        except ValueError as exc:
            raise ConfigError(f"bad --only list {only!r}") from exc
        bad = [n for n in numbers if n not in CHECKS]
        if bad:
            raise ConfigError(f"no acceptance criteria numbered {bad}")
    results = run_all(numbers)
    for r in results:
        print(r.summary())
    report = {"tool": "phasepad", "version": __version__,
              "passed": all(r.passed for r in results),
              "results": [r.to_dict() for r in results]}
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    write_json(Path(cfg.out_dir) / "validation.json", report)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.command == "figure":
                code = cmd_figure(cfg, args.number, caught)
            elif args.command == "validate":
                code = cmd_validate(cfg, args.only, caught)
            else:
                handler = {"amplitude": cmd_amplitude, "wigner": cmd_wigner,
                           "husimi": cmd_husimi, "bargmann": cmd_bargmann,
                           "evolve": cmd_evolve, "eigenstate": cmd_eigenstate}[args.command]
                code = handler(cfg, caught)
        for text in _warning_list(caught):
            print(f"phasepad: warning: {text}", file=sys.stderr)
    except PhasepadError as exc:
        print(f"phasepad: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return code
