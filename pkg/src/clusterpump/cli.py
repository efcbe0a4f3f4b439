"""Batch command-line interface.

Commands: cluster, steady, spectrum, evolve, meanfield, sweep, scaling.
Options come from flags or a JSON config file (flags override the file).
Every command writes a JSON summary embedding the fully resolved
configuration, so runs are reproducible from their outputs alone; identical
configurations produce byte-identical files.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import GraphSpec, cluster_state, plus_state, state_from_bits, stabilizers
from .errors import ConfigError, NumericalError
from .experiments import (
    DEFAULT_GAMMA_POLICY,
    MAX_DENSE_QUBITS,
    detect_gamma_sat,
    gamma_sweep,
    parse_gamma_policy,
    size_scaling_study,
)
from .lindblad import ModelParams, hamiltonian, liouvillian, projection_jumps
from .meanfield import MeanFieldState, fixed_points, mean_field_evolve
from .meanfield import default_dt as mf_default_dt
from .observables import fidelity, spin_expectations, witness_expectation
from .operators import pauli_to_dense
from .solver import evolve_rk4, full_spectrum, pure_state_density


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems as config errors."""

    def error(self, message):  # noqa: D102 - argparse hook
        raise ConfigError(message)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([c if isinstance(c, str) else _fmt(c) for c in row])


def parse_graph(text: str) -> GraphSpec:
    """Accept "chain:N", "square:RxC", a JSON file path, or inline JSON."""
    if text.startswith("chain:"):
        try:
            n = int(text.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad chain preset {text!r}") from exc
        if n < 1:
            raise ConfigError(f"chain length must be positive, got {n}")
        return GraphSpec.chain(n)
    if text.startswith("square:"):
        spec = text.split(":", 1)[1]
        try:
            rows, cols = (int(v) for v in spec.split("x"))
        except ValueError as exc:
            raise ConfigError(f"bad square preset {text!r}; expected square:RxC") from exc
        return GraphSpec.grid(rows, cols)
    if text.lstrip().startswith("{"):
        try:
            return GraphSpec.from_json(text)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad inline graph JSON: {exc}") from exc
    path = Path(text)
    if path.is_file():
        try:
            return GraphSpec.from_json(path.read_text())
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad graph file {text!r}: {exc}") from exc
    raise ConfigError(f"cannot interpret graph {text!r}")


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge defaults, config file, and explicit flags (flags win)."""
    out = dict(defaults)
    if getattr(args, "config", None):
        cfg_path = Path(args.config)
        if not cfg_path.is_file():
            raise ConfigError(f"config file not found: {args.config}")
        try:
            cfg = json.loads(cfg_path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        for key, value in cfg.items():
            k = key.replace("-", "_")
            if k == "command":
                continue
            if k not in defaults:
                raise ConfigError(f"unknown config key {key!r} for this command")
            out[k] = value
    for k in defaults:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


def _model(cfg: dict) -> ModelParams:
    sign = cfg.get("sign_g", 1)
    if sign not in (1, -1):
        raise ConfigError(f"sign_g must be 1 or -1, got {sign}")
    return ModelParams(g=float(sign), h=float(cfg["h_g"]), gamma=float(cfg["gamma_g"]))


def _guard_graph(graph: GraphSpec) -> None:
    if graph.n_qubits > MAX_DENSE_QUBITS:
        raise ConfigError(
            f"graph has {graph.n_qubits} qubits; dense commands are limited to {MAX_DENSE_QUBITS}"
        )


def _bitstring(index: int, n: int) -> str:
    return format(index, f"0{n}b")


# ---------------------------------------------------------------- commands


def _cmd_cluster(cfg: dict, out_dir: Path) -> int:
    graph = parse_graph(cfg["graph"])
    state = cluster_state(graph)
    n = graph.n_qubits
    dense_stabs = [pauli_to_dense(s) for s in stabilizers(graph)]
    stab_dev = max(float(np.linalg.norm(m @ state - state, np.inf)) for m in dense_stabs)
    spins = spin_expectations(pure_state_density(state))
    amplitudes = [
        [_bitstring(i, n), float(a.real), float(a.imag)]
        for i, a in enumerate(state)
        if abs(a) > 1e-14
    ]
    summary = {
        "config": cfg,
        "version": __version__,
        "n_qubits": n,
        "edges": [list(e) for e in graph.edges],
        "amplitudes": amplitudes,
        "stabilizer_max_deviation": stab_dev,
        "local_spin_expectations": [spins.jx, spins.jy, spins.jz],
    }
    _write_json(out_dir / "cluster.json", summary)
    print(f"cluster state on {n} qubits, {len(graph.edges)} edges")
    for bits, re, im in amplitudes:
        print(f"  |{bits}>  {re:+.6f}{im:+.6f}j")
    print(f"stabilizer max deviation: {stab_dev:.3e}")
    return 0


def _steady_solution(cfg: dict):
    graph = parse_graph(cfg["graph"])
    _guard_graph(graph)
    params = _model(cfg)
    ham = hamiltonian(graph, params)
    jumps = projection_jumps(graph)
    L = liouvillian(ham, jumps, params.gamma)
    return graph, params, L, full_spectrum(L)


def _cmd_steady(cfg: dict, out_dir: Path) -> int:
    from .lindblad import vectorize

    graph, params, L, spec = _steady_solution(cfg)
    target = cluster_state(graph)
    residual = float(np.linalg.norm(L @ vectorize(spec.steady_state), np.inf))
    summary = {
        "config": cfg,
        "version": __version__,
        "n_qubits": graph.n_qubits,
        "fidelity": fidelity(spec.steady_state, target),
        "witness": witness_expectation(spec.steady_state, target, eta=cfg["eta"]),
        "gap": spec.gap,
        "kernel_dim": spec.kernel_dim,
        "steady_state_residual": residual,
        "antihermitian_residual": spec.antihermitian_residual,
    }
    _write_json(out_dir / "steady.json", summary)
    print(json.dumps({k: summary[k] for k in ("fidelity", "witness", "gap", "kernel_dim")}, sort_keys=True))
    return 0


def _cmd_spectrum(cfg: dict, out_dir: Path) -> int:
    graph, params, L, spec = _steady_solution(cfg)
    _write_csv(
        out_dir / "spectrum.csv",
        ["re", "im"],
        [[lam.real, lam.imag] for lam in spec.eigenvalues],
    )
    summary = {
        "config": cfg,
        "version": __version__,
        "n_qubits": graph.n_qubits,
        "n_eigenvalues": int(spec.eigenvalues.size),
        "gap": spec.gap,
        "kernel_dim": spec.kernel_dim,
        "max_real_part": float(spec.eigenvalues.real.max()),
    }
    _write_json(out_dir / "spectrum.json", summary)
    print(f"wrote {spec.eigenvalues.size} eigenvalues; gap = {spec.gap:.6g}")
    return 0


def _initial_density(kind: str, n: int, rng: np.random.Generator) -> np.ndarray:
    dim = 2**n
    if kind == "plus":
        return pure_state_density(plus_state(n))
    if kind == "zero":
        return pure_state_density(state_from_bits([0] * n))
    if kind == "mixed":
        return np.eye(dim, dtype=complex) / dim
    if kind == "random":
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = a @ a.conj().T
        return rho / np.trace(rho)
    raise ConfigError(f"unknown initial state {kind!r}")


def _cmd_evolve(cfg: dict, out_dir: Path) -> int:
    graph = parse_graph(cfg["graph"])
    _guard_graph(graph)
    params = _model(cfg)
    rng = np.random.default_rng(cfg["seed"])
    rho0 = _initial_density(cfg["rho0"], graph.n_qubits, rng)
    ham = hamiltonian(graph, params)
    jumps = projection_jumps(graph)
    L = liouvillian(ham, jumps, params.gamma)
    dt = cfg["dt"] if cfg.get("dt") else 0.01 / max(1.0, abs(params.gamma_g))
    traj = evolve_rk4(rho0, L, cfg["t_final"], dt, sample_every=cfg["sample_every"])
    target = cluster_state(graph)
    rows = []
    for t, rho in zip(traj.times, traj.states):
        spins = spin_expectations(rho)
        rows.append(
            [t, spins.jx, spins.jy, spins.jz,
             fidelity(rho, target), witness_expectation(rho, target, eta=cfg["eta"])]
        )
    _write_csv(out_dir / "evolve.csv", ["t", "jx", "jy", "jz", "fidelity", "witness"], rows)
    summary = {
        "config": cfg,
        "version": __version__,
        "n_qubits": graph.n_qubits,
        "dt": dt,
        "n_samples": len(rows),
        "final": {
            "t": rows[-1][0],
            "jx": rows[-1][1],
            "jy": rows[-1][2],
            "jz": rows[-1][3],
            "fidelity": rows[-1][4],
            "witness": rows[-1][5],
        },
    }
    _write_json(out_dir / "evolve.json", summary)
    print(f"evolved to t = {rows[-1][0]:g}; final fidelity = {rows[-1][4]:.6f}")
    return 0


def _cmd_meanfield(cfg: dict, out_dir: Path) -> int:
    params = _model(cfg)
    points = fixed_points(params)
    rng = np.random.default_rng(cfg["seed"])
    if cfg.get("s0"):
        try:
            x, y, z = (float(v) for v in str(cfg["s0"]).split(","))
        except ValueError as exc:
            raise ConfigError(f"bad s0 {cfg['s0']!r}; expected x,y,z") from exc
        s0 = MeanFieldState(x, y, z)
    else:
        # Default: a small seeded perturbation of the first stable branch
        # (or of the first branch when none is stable).
        base = next((fp for fp in points if fp.stable), points[0] if points else None)
        center = base.state.as_array() if base else np.zeros(3)
        s0 = MeanFieldState.from_array(center + rng.normal(0.0, 0.05, 3))
    dt = cfg["dt"] if cfg.get("dt") else mf_default_dt(params)
    traj = mean_field_evolve(s0, params, cfg["t_final"], dt, sample_every=cfg["sample_every"])
    _write_csv(
        out_dir / "meanfield.csv",
        ["t", "jx", "jy", "jz"],
        [[t, s[0], s[1], s[2]] for t, s in zip(traj.times, traj.states)],
    )
    _write_csv(
        out_dir / "meanfield_fixed_points.csv",
        ["label", "jx", "jy", "jz", "stable", "classification"],
        [
            [fp.label, fp.state.jx, fp.state.jy, fp.state.jz, str(fp.stable), fp.classification]
            for fp in points
        ],
    )
    final = traj.states[-1]
    summary = {
        "config": cfg,
        "version": __version__,
        "dt": dt,
        "s0": [s0.jx, s0.jy, s0.jz],
        "final_state": [float(final[0]), float(final[1]), float(final[2])],
        "fixed_points": [
            {
                "label": fp.label,
                "state": [fp.state.jx, fp.state.jy, fp.state.jz],
                "stable": fp.stable,
                "classification": fp.classification,
            }
            for fp in points
        ],
    }
    _write_json(out_dir / "meanfield.json", summary)
    print(f"final mean-field state: ({final[0]:.6f}, {final[1]:.6f}, {final[2]:.6f})")
    return 0


def _cmd_sweep(cfg: dict, out_dir: Path) -> int:
    graph = parse_graph(cfg["graph"])
    _guard_graph(graph)
    try:
        grid = parse_gamma_policy(cfg["gamma_grid"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    sign = cfg.get("sign_g", 1)
    sweep = gamma_sweep(
        graph,
        cfg["h_g"],
        grid,
        compute_gap=not cfg["skip_gap"],
        eta=cfg["eta"],
        g=float(sign),
        jobs=cfg["jobs"],
    )
    rows = [
        [g_, f, w, gp, st]
        for g_, f, w, gp, st in zip(
            sweep.axis_values, sweep.fidelity, sweep.witness, sweep.gap, sweep.status
        )
    ]
    _write_csv(out_dir / "sweep.csv", ["gamma_g", "fidelity", "witness", "gap", "status"], rows)
    gamma_sat = None
    note = None
    try:
        gamma_sat = detect_gamma_sat(sweep, epsilon=cfg["epsilon"])
    except NumericalError as exc:
        note = str(exc)
    finite = np.isfinite(sweep.fidelity)
    summary = {
        "config": cfg,
        "version": __version__,
        "n_qubits": graph.n_qubits,
        "n_points": int(grid.size),
        "n_failed": int(np.count_nonzero(~finite)),
        "gamma_sat": gamma_sat,
        "gamma_sat_note": note,
        "max_fidelity": float(np.nanmax(sweep.fidelity)) if finite.any() else None,
        "min_witness": float(np.nanmin(sweep.witness)) if finite.any() else None,
    }
    _write_json(out_dir / "sweep.json", summary)
    print(f"sweep over {grid.size} points; gamma_sat = {gamma_sat}")
    return 0


def _cmd_scaling(cfg: dict, out_dir: Path) -> int:
    try:
        n_values = [int(v) for v in str(cfg["n_values"]).split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad n_values {cfg['n_values']!r}") from exc
    for n in n_values:
        if n > MAX_DENSE_QUBITS:
            raise ConfigError(
                f"N = {n} exceeds the dense-solver guard ({MAX_DENSE_QUBITS}); "
                f"the superoperator alone would need {16.0 * 16.0 ** n / 2.0 ** 30:.1f} GiB"
            )
    study = size_scaling_study(
        n_values,
        h_g=cfg["h_g"],
        gamma_policy=cfg["gamma_policy"],
        epsilon=cfg["epsilon"],
        weak_gamma=cfg["weak_gamma"],
        strong_gamma=cfg["strong_gamma"],
        eta=cfg["eta"],
    )
    _write_csv(
        out_dir / "scaling.csv",
        ["n", "gamma_sat", "f_sat", "gap_weak", "gap_strong"],
        [[r.n, r.gamma_sat, r.f_sat, r.gap_weak, r.gap_strong] for r in study.rows],
    )
    summary = {
        "config": cfg,
        "version": __version__,
        "weak_gamma": study.weak_gamma,
        "strong_gamma": study.strong_gamma,
        "rows": [
            {
                "n": r.n,
                "gamma_sat": r.gamma_sat,
                "f_sat": r.f_sat,
                "gap_weak": r.gap_weak,
                "gap_strong": r.gap_strong,
            }
            for r in study.rows
        ],
        "fits": {
            name: {
                "model": fit.model,
                "coefficients": list(fit.coefficients),
                "r_squared": fit.r_squared,
            }
            for name, fit in study.fits.items()
        },
    }
    _write_json(out_dir / "scaling.json", summary)
    for r in study.rows:
        print(
            f"N={r.n}: gamma_sat={r.gamma_sat:.4g} f_sat={r.f_sat:.6f} "
            f"gap_weak={r.gap_weak:.4g} gap_strong={r.gap_strong:.4g}"
        )
    return 0


# ---------------------------------------------------------------- wiring

_COMMON = {"out": ".", "seed": 0}
_MODEL_DEFAULTS = {"h_g": 1.0, "gamma_g": 1.0, "sign_g": 1, "eta": 0.5}

_DEFAULTS = {
    "cluster": {**_COMMON, "graph": "chain:4"},
    "steady": {**_COMMON, **_MODEL_DEFAULTS, "graph": "chain:4"},
    "spectrum": {**_COMMON, **_MODEL_DEFAULTS, "graph": "chain:4"},
    "evolve": {
        **_COMMON,
        **_MODEL_DEFAULTS,
        "graph": "chain:4",
        "t_final": 10.0,
        "dt": None,
        "rho0": "plus",
        "sample_every": 10,
    },
    "meanfield": {
        **_COMMON,
        **_MODEL_DEFAULTS,
        "s0": None,
        "t_final": 20.0,
        "dt": None,
        "sample_every": 10,
    },
    "sweep": {
        **_COMMON,
        **_MODEL_DEFAULTS,
        "graph": "chain:3",
        "gamma_grid": "log:0.1:500:31",
        "skip_gap": False,
        "epsilon": 1e-3,
        "jobs": 1,
    },
    "scaling": {
        **_COMMON,
        "h_g": 1.0,
        "eta": 0.5,
        "n_values": "2,3,4",
        "gamma_policy": DEFAULT_GAMMA_POLICY,
        "epsilon": 1e-3,
        "weak_gamma": 1.0,
        "strong_gamma": None,
    },
}

_HANDLERS = {
    "cluster": _cmd_cluster,
    "steady": _cmd_steady,
    "spectrum": _cmd_spectrum,
    "evolve": _cmd_evolve,
    "meanfield": _cmd_meanfield,
    "sweep": _cmd_sweep,
    "scaling": _cmd_scaling,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clusterpump", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; explicit flags override it")
        p.add_argument("--out", help="output directory (default: current directory)")
        p.add_argument("--seed", type=int, help="seed for randomized initial states")

    def model(p):
        p.add_argument("--h-g", dest="h_g", type=float, help="transverse field h/g")
        p.add_argument("--gamma-g", dest="gamma_g", type=float, help="dissipation rate gamma/g")
        p.add_argument("--sign-g", dest="sign_g", type=int, choices=(1, -1), help="sign of the Ising coupling")
        p.add_argument("--eta", type=float, help="witness offset (default 1/2)")

    p = sub.add_parser("cluster", help="build a cluster state and print its amplitudes")
    common(p)
    p.add_argument("--graph", help='graph preset ("chain:N", "square:RxC"), JSON file, or inline JSON')

    for name in ("steady", "spectrum"):
        p = sub.add_parser(
            name,
            help="solve for the steady state" if name == "steady" else "write the full Liouvillian spectrum",
        )
        common(p)
        model(p)
        p.add_argument("--graph")

    p = sub.add_parser("evolve", help="integrate the master equation and record observables")
    common(p)
    model(p)
    p.add_argument("--graph")
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--dt", type=float, help="RK4 step (default 0.01 / max(1, gamma_g))")
    p.add_argument("--rho0", choices=("plus", "zero", "mixed", "random"), help="initial state")
    p.add_argument("--sample-every", dest="sample_every", type=int)

    p = sub.add_parser("meanfield", help="mean-field trajectory and fixed-point table")
    common(p)
    model(p)
    p.add_argument("--s0", help="initial (jx,jy,jz) as x,y,z; default perturbs a stable branch")
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--sample-every", dest="sample_every", type=int)

    p = sub.add_parser("sweep", help="gamma sweep of steady-state metrics")
    common(p)
    model(p)
    p.add_argument("--graph")
    p.add_argument("--gamma-grid", dest="gamma_grid", help='grid, e.g. "log:0.1:500:31"')
    p.add_argument("--skip-gap", dest="skip_gap", action="store_const", const=True,
                   help="skip spectra (fast steady-state solves only)")
    p.add_argument("--epsilon", type=float, help="saturation criterion")
    p.add_argument("--jobs", type=int, help="worker threads for sweep points")

    p = sub.add_parser("scaling", help="size-scaling study with fits")
    common(p)
    p.add_argument("--h-g", dest="h_g", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--n-values", dest="n_values", help="comma-separated chain lengths")
    p.add_argument("--gamma-policy", dest="gamma_policy")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--weak-gamma", dest="weak_gamma", type=float)
    p.add_argument("--strong-gamma", dest="strong_gamma", type=float,
                   help="fixed strong dissipation for the gap fit (default: largest gamma_sat)")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve(args, _DEFAULTS[args.command])
        cfg["command"] = args.command
        out_dir = Path(cfg["out"])
        out_dir.mkdir(parents=True, exist_ok=True)
        return _HANDLERS[args.command](cfg, out_dir)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
