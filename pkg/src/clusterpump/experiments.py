"""Parameter sweeps, saturation detection, and scaling fits.

A gamma sweep records steady-state fidelity, witness expectation, and
(optionally) the Liouvillian gap on a grid of dissipation strengths; the
saturation point gamma_sat is the smallest gamma whose fidelity comes within
a factor (1 - epsilon) of the sweep maximum.  Scaling studies repeat the
sweep over system sizes and fit the trends (linear gamma_sat growth, the
offset-inverse fidelity law, and power laws for the gap).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cluster import GraphSpec, cluster_state
from .errors import NumericalError
from .lindblad import ModelParams, hamiltonian, liouvillian_parts, projection_jumps
from .observables import fidelity, witness_expectation
from .solver import full_spectrum, steady_state_direct

# Dense solves above this register size are refused (the superoperator for
# N qubits holds 16^N complex entries).
MAX_DENSE_QUBITS = 7


@dataclass
class SweepResult:
    """Per-grid-point steady-state metrics for one system.

    Failed grid points carry NaN in the value arrays and the failure reason
    in ``status``; successful points have status "ok".  ``gap`` is NaN when
    the sweep was run without spectra.
    """

    axis_name: str
    axis_values: np.ndarray
    fidelity: np.ndarray
    witness: np.ndarray
    gap: np.ndarray
    n_qubits: int
    params: ModelParams
    status: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class FitResult:
    model: str  # "linear" | "power_law" | "offset_inverse"
    coefficients: tuple[float, ...]
    r_squared: float


@dataclass(frozen=True)
class ScalingRow:
    n: int
    gamma_sat: float
    f_sat: float
    gap_weak: float
    gap_strong: float


@dataclass
class ScalingStudy:
    rows: list[ScalingRow]
    fits: dict[str, FitResult]
    h_g: float
    gamma_policy: str
    epsilon: float
    weak_gamma: float
    strong_gamma: float


def _check_size_guard(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        need = 16.0 * 16.0**n / 2.0**30
        raise ValueError(
            f"N = {n} exceeds the dense-solver guard ({MAX_DENSE_QUBITS}); "
            f"the superoperator alone would need {need:.1f} GiB"
        )


def _system(g_spec: GraphSpec, h_g: float, g: float = 1.0):
    """Gamma-independent pieces of the model: base params, unitary part,
    rate-one dissipator, and the target state."""
    if g == 0:
        raise ValueError("sweeps are parameterized by h/g and gamma/g; g must be nonzero")
    # h and gamma scale with |g| so that a sign flip of g only flips the coupling.
    params = ModelParams(g=g, h=h_g * abs(g), gamma=0.0)
    ham = hamiltonian(g_spec, params)
    jumps = projection_jumps(g_spec)
    unitary, dissipator = liouvillian_parts(ham, jumps)
    target = cluster_state(g_spec)
    return params, unitary, dissipator, target


def gamma_sweep(
    g_spec: GraphSpec,
    h_g: float,
    gammas: Sequence[float],
    compute_gap: bool = True,
    eta: float = 0.5,
    g: float = 1.0,
    jobs: int = 1,
    _system_cache=None,
) -> SweepResult:
    """Steady-state metrics over an ascending grid of dissipation strengths.

    The Hamiltonian and jump operators are assembled once; each grid point
    recombines the cached unitary part and dissipator.  With
    ``compute_gap=False`` the steady state comes from a direct linear solve
    (much faster for large N) and the gap column is NaN.  Solver failures at
    individual points are recorded and the sweep continues.
    """
    _check_size_guard(g_spec.n_qubits)
    gammas = np.asarray(gammas, dtype=float)
    if gammas.size and (np.any(np.diff(gammas) < 0) or np.any(gammas < 0)):
        raise ValueError("gammas must be sorted ascending and nonnegative")
    params, unitary, dissipator, target = _system_cache or _system(g_spec, h_g, g)

    n_pts = gammas.size
    fid = np.full(n_pts, np.nan)
    wit = np.full(n_pts, np.nan)
    gap = np.full(n_pts, np.nan)
    status = ["pending"] * n_pts

    def run_point(i: int) -> None:
        gamma = gammas[i] * abs(g)
        L = unitary + gamma * dissipator
        try:
            if compute_gap:
                spec = full_spectrum(L)
                rho = spec.steady_state
                gap[i] = spec.gap
            else:
                rho = steady_state_direct(L)
            fid[i] = fidelity(rho, target)
            wit[i] = witness_expectation(rho, target, eta=eta)
            status[i] = "ok"
        except NumericalError as exc:
            status[i] = str(exc)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(run_point, range(n_pts)))
    else:
        for i in range(n_pts):
            run_point(i)

    return SweepResult(
        axis_name="gamma_g",
        axis_values=gammas.copy(),
        fidelity=fid,
        witness=wit,
        gap=gap,
        n_qubits=g_spec.n_qubits,
        params=params,
        status=status,
    )


def detect_gamma_sat(sweep: SweepResult, epsilon: float = 1e-3) -> float:
    """Smallest axis value whose fidelity reaches (1 - epsilon) of the sweep max.

    The crossing is refined by linear interpolation between the bracketing
    grid points.  If the maximum sits at the last grid point and the series
    is still rising there by more than epsilon per grid step, the sweep has
    not plateaued and a NumericalError("sweep range too small") is raised.
    """
    finite = np.isfinite(sweep.fidelity)
    if not np.any(finite):
        raise ValueError("fidelity series is empty or all-failed")
    x = np.asarray(sweep.axis_values, dtype=float)[finite]
    f = np.asarray(sweep.fidelity, dtype=float)[finite]

    i_max = int(np.argmax(f))
    f_max = f[i_max]
    if f.size >= 2 and i_max == f.size - 1 and (f[-1] - f[-2]) > epsilon:
        raise NumericalError("sweep range too small")
    threshold = (1.0 - epsilon) * f_max
    hits = np.nonzero(f >= threshold)[0]
    i_hit = int(hits[0])
    if i_hit == 0:
        return float(x[0])
    x0, x1 = x[i_hit - 1], x[i_hit]
    f0, f1 = f[i_hit - 1], f[i_hit]
    if f1 == f0:
        return float(x1)
    frac = (threshold - f0) / (f1 - f0)
    return float(x0 + frac * (x1 - x0))


def _r_squared(y: np.ndarray, y_hat: np.ndarray) -> float:
    ss_res = float(np.sum((y - y_hat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= 1e-300:
        return 1.0 if ss_res <= 1e-20 else 0.0
    return float(min(max(1.0 - ss_res / ss_tot, 0.0), 1.0))


def fit_linear(x: Sequence[float], y: Sequence[float]) -> FitResult:
    """Least-squares line y = slope * x + intercept."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("linear fit needs at least 2 points")
    if np.ptp(x) == 0:
        raise ValueError("degenerate x: all abscissae equal")
    slope, intercept = np.polyfit(x, y, 1)
    return FitResult(
        model="linear",
        coefficients=(float(slope), float(intercept)),
        r_squared=_r_squared(y, slope * x + intercept),
    )


def fit_power_law(x: Sequence[float], y: Sequence[float]) -> FitResult:
    """Least squares in log10-log10: y = 10^intercept * x^beta.

    Coefficients are (beta, log10 prefactor); r^2 is computed in log space.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit requires strictly positive data")
    lx, ly = np.log10(x), np.log10(y)
    if lx.size < 2:
        raise ValueError("power-law fit needs at least 2 points")
    if np.ptp(lx) == 0:
        raise ValueError("degenerate x: all abscissae equal")
    beta, intercept = np.polyfit(lx, ly, 1)
    return FitResult(
        model="power_law",
        coefficients=(float(beta), float(intercept)),
        r_squared=_r_squared(ly, beta * lx + intercept),
    )


def fit_offset_inverse(n: Sequence[float], f: Sequence[float]) -> FitResult:
    """Least squares for f = f0 + c / n; coefficients are (f0, c)."""
    n = np.asarray(n, dtype=float)
    f = np.asarray(f, dtype=float)
    if n.size < 2:
        raise ValueError("offset-inverse fit needs at least 2 points")
    if np.any(n <= 0):
        raise ValueError("offset-inverse fit requires positive n")
    design = np.column_stack([np.ones_like(n), 1.0 / n])
    coef, *_ = np.linalg.lstsq(design, f, rcond=None)
    f0, c = float(coef[0]), float(coef[1])
    return FitResult(
        model="offset_inverse",
        coefficients=(f0, c),
        r_squared=_r_squared(f, design @ coef),
    )


def parse_gamma_policy(text: str) -> np.ndarray:
    """Grid grammar: "log:<lo>:<hi>:<n>" or "lin:<lo>:<hi>:<n>"."""
    parts = text.split(":")
    if len(parts) != 4 or parts[0] not in ("log", "lin"):
        raise ValueError(f"bad gamma policy {text!r}; expected log:<lo>:<hi>:<n> or lin:<lo>:<hi>:<n>")
    lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
    if n < 2 or hi <= lo:
        raise ValueError(f"bad gamma policy {text!r}: need hi > lo and n >= 2")
    if parts[0] == "log":
        if lo <= 0:
            raise ValueError("log grid requires lo > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


DEFAULT_GAMMA_POLICY = "log:0.5:600:32"


def size_scaling_study(
    n_values: Sequence[int],
    h_g: float,
    gamma_policy: str = DEFAULT_GAMMA_POLICY,
    epsilon: float = 1e-3,
    weak_gamma: float = 1.0,
    strong_gamma: float | None = None,
    eta: float = 0.5,
) -> ScalingStudy:
    """Saturation and gap scaling over chain lengths.

    Per N: a fast (no-spectrum) gamma sweep locates gamma_sat, and the
    steady state is re-solved exactly at gamma_sat for F_sat.  The gap is
    fitted against N at two fixed dissipation strengths common to all
    sizes: ``weak_gamma``, and ``strong_gamma`` which defaults to the
    largest detected gamma_sat (the saturated regime).
    """
    for n in n_values:
        _check_size_guard(n)
    gammas = parse_gamma_policy(gamma_policy)

    partial = []
    for n in n_values:
        graph = GraphSpec.chain(n)
        system = _system(graph, h_g)
        _, unitary, dissipator, target = system
        sweep = gamma_sweep(graph, h_g, gammas, compute_gap=False, eta=eta, _system_cache=system)
        gamma_sat = detect_gamma_sat(sweep, epsilon=epsilon)
        rho_sat = steady_state_direct(unitary + gamma_sat * dissipator)
        f_sat = fidelity(rho_sat, target)
        gap_weak = full_spectrum(unitary + weak_gamma * dissipator).gap
        partial.append((n, gamma_sat, f_sat, gap_weak))

    if strong_gamma is None:
        strong_gamma = max(p[1] for p in partial)

    rows: list[ScalingRow] = []
    for n, gamma_sat, f_sat, gap_weak in partial:
        graph = GraphSpec.chain(n)
        _, unitary, dissipator, _ = _system(graph, h_g)
        gap_strong = full_spectrum(unitary + strong_gamma * dissipator).gap
        rows.append(
            ScalingRow(
                n=n,
                gamma_sat=gamma_sat,
                f_sat=f_sat,
                gap_weak=gap_weak,
                gap_strong=gap_strong,
            )
        )

    ns = [float(r.n) for r in rows]
    fits = {
        "gamma_sat_linear": fit_linear(ns, [r.gamma_sat for r in rows]),
        "f_sat_offset_inverse": fit_offset_inverse(ns, [r.f_sat for r in rows]),
        "gap_weak_power_law": fit_power_law(ns, [r.gap_weak for r in rows]),
        "gap_strong_power_law": fit_power_law(ns, [r.gap_strong for r in rows]),
    }
    return ScalingStudy(
        rows=rows,
        fits=fits,
        h_g=h_g,
        gamma_policy=gamma_policy,
        epsilon=epsilon,
        weak_gamma=weak_gamma,
        strong_gamma=float(strong_gamma),
    )
