"""Mean-field dynamics of the averaged spins (Jx, Jy, Jz) and the analytic
fixed-point branches of the dissipative Ising model.

Factorizing two-site correlators turns the master equation into a closed
3-variable ODE system,

    dJx/dt = -4 g Jy Jz - gamma Jx
    dJy/dt =  4 g Jx Jz - 2 h Jz - gamma Jy
    dJz/dt = -2 h Jy - gamma Jz

whose equilibria fall into four closed-form families:

* s1 = (+-1, 0, 0)                         at gamma = 0 (field-dominated),
* s2 = (h_g/2, 0, +-sqrt(1 - (h_g/2)^2))   at gamma = 0, |h_g| <= 2,
* s3 = (0, 0, 0)                           for gamma_g >= 2 h_g,
* s4 = q/(8 h_g) * (q, +-gamma_g, -+2 h_g) for gamma_g < 2 h_g,
       with q = sqrt(4 h_g^2 - gamma_g^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .lindblad import ModelParams

# Divergence guard for trajectories; the physical ball has |s| <= 1.
BLOWUP_NORM = 10.0
# Jacobian eigenvalue real parts within this band count as marginal.
STABILITY_EPS = 1e-9


@dataclass(frozen=True)
class MeanFieldState:
    jx: float
    jy: float
    jz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.jx, self.jy, self.jz])

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "MeanFieldState":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class FixedPoint:
    """A closed-form equilibrium with its stability classification.

    ``stable`` is True only when every Jacobian eigenvalue has a strictly
    negative real part; ``classification`` distinguishes "marginal" cases
    (eigenvalues on the imaginary axis within tolerance) from "unstable".
    """

    label: str
    state: MeanFieldState
    stable: bool
    classification: str


@dataclass
class MeanFieldTrajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n_samples, 3)


def _rhs(s: np.ndarray, g: float, h: float, gamma: float) -> np.ndarray:
    x, y, z = s
    return np.array(
        [
            -4.0 * g * y * z - gamma * x,
            4.0 * g * x * z - 2.0 * h * z - gamma * y,
            -2.0 * h * y - gamma * z,
        ]
    )


def mean_field_rhs(s: MeanFieldState, p: ModelParams) -> MeanFieldState:
    """Time derivatives (dJx/dt, dJy/dt, dJz/dt) at the given state."""
    return MeanFieldState.from_array(_rhs(s.as_array(), p.g, p.h, p.gamma))


def jacobian(s: MeanFieldState, p: ModelParams) -> np.ndarray:
    """3x3 Jacobian of the mean-field vector field."""
    g, h, gamma = p.g, p.h, p.gamma
    x, y, z = s.jx, s.jy, s.jz
    return np.array(
        [
            [-gamma, -4.0 * g * z, -4.0 * g * y],
            [4.0 * g * z, -gamma, 4.0 * g * x - 2.0 * h],
            [0.0, -2.0 * h, -gamma],
        ]
    )


def _classify(s: MeanFieldState, p: ModelParams) -> tuple[bool, str]:
    re = np.linalg.eigvals(jacobian(s, p)).real
    if np.all(re < -STABILITY_EPS):
        return True, "stable"
    if np.any(re > STABILITY_EPS):
        return False, "unstable"
    return False, "marginal"


def fixed_points(p: ModelParams) -> list[FixedPoint]:
    """Enumerate the applicable closed-form equilibrium branches.

    At gamma = 0 these are the polarized branches s1 and (for |h_g| <= 2)
    the ordered branches s2; for gamma > 0 the origin s3 applies when
    gamma_g >= 2 h_g and the s4 pair when gamma_g < 2 h_g.
    """
    if p.g == 0:
        raise ValueError("fixed points are parameterized by h/g and gamma/g; g must be nonzero")
    h_g = p.h_g
    gamma_g = p.gamma_g
    out: list[FixedPoint] = []

    def add(label: str, jx: float, jy: float, jz: float) -> None:
        state = MeanFieldState(jx, jy, jz)
        stable, cls = _classify(state, p)
        out.append(FixedPoint(label=label, state=state, stable=stable, classification=cls))

    if p.gamma == 0:
        add("s1_plus", 1.0, 0.0, 0.0)
        add("s1_minus", -1.0, 0.0, 0.0)
        if abs(h_g) <= 2.0:
            jz = math.sqrt(max(0.0, 1.0 - (h_g / 2.0) ** 2))
            add("s2_plus", h_g / 2.0, 0.0, jz)
            add("s2_minus", h_g / 2.0, 0.0, -jz)
    else:
        if gamma_g >= 2.0 * h_g:
            add("s3", 0.0, 0.0, 0.0)
        else:
            q = math.sqrt(4.0 * h_g**2 - gamma_g**2)
            pref = q / (8.0 * h_g)
            add("s4_plus", pref * q, pref * gamma_g, pref * (-2.0 * h_g))
            add("s4_minus", pref * q, pref * (-gamma_g), pref * (2.0 * h_g))
    return out


def default_dt(p: ModelParams) -> float:
    """Integrator step scaled to the fastest model rate."""
    if p.g != 0:
        scale = max(1.0, abs(p.gamma_g), abs(p.h_g))
    else:
        scale = max(1.0, abs(p.gamma), abs(p.h))
    return 0.005 / scale


def mean_field_evolve(
    s0: MeanFieldState,
    p: ModelParams,
    t_final: float,
    dt: float | None = None,
    sample_every: int = 1,
) -> MeanFieldTrajectory:
    """RK4 integration of the mean-field equations.

    Raises NumericalError("mean-field blow-up") if the state norm exceeds 10.
    """
    if dt is None:
        dt = default_dt(p)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be nonnegative, got {t_final}")
    g, h, gamma = p.g, p.h, p.gamma
    s = s0.as_array().astype(float)
    if np.linalg.norm(s) > BLOWUP_NORM:
        raise NumericalError("mean-field blow-up")
    times = [0.0]
    states = [s.copy()]
    if t_final == 0:
        return MeanFieldTrajectory(np.array(times), np.array(states))
    n_steps = max(1, int(math.ceil(t_final / dt - 1e-12)))
    step = t_final / n_steps
    for k in range(1, n_steps + 1):
        k1 = _rhs(s, g, h, gamma)
        k2 = _rhs(s + 0.5 * step * k1, g, h, gamma)
        k3 = _rhs(s + 0.5 * step * k2, g, h, gamma)
        k4 = _rhs(s + step * k3, g, h, gamma)
        s = s + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if np.linalg.norm(s) > BLOWUP_NORM:
            raise NumericalError("mean-field blow-up")
        if k % sample_every == 0 or k == n_steps:
            times.append(k * step)
            states.append(s.copy())
    return MeanFieldTrajectory(np.array(times), np.array(states))
