"""Optomechanical test of gravitational decoherence.

One photon of an entangled pair interacts for a time ``t`` with a harmonically
bound mirror that starts in a thermal state with mean phonon number ``nbar``.
Tracing out the mirror leaves the two cavity fields in

    rho_f = (|10><10| + |01><01| + R* |10><01| + R |01><10|) / 2,
    R(t)  = exp(-(1 + 2 nbar) (4 g0^2 / w_m^2) sin^2(w_m t / 2) / 2),

which, read as two qubits, is the Bell-diagonal state with probabilities
``((1 + R)/2, (1 - R)/2)`` on ``(Phi_3, Phi_4)``: correlation tensor
``diag(R, R, -1)``.  Gravity adds ``2 Lambda_grav / gamma_m`` phonons on top of
the thermal ``2 Lambda_heat / gamma_m``; cavity decay is neglected.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .bound import DEC_LIMIT, beta_fals
from .errors import DomainError
from .quantum import SQRT2, TwoQubitState

#: kg / m^3, standard room-temperature reference values
MATERIAL_DENSITIES = {
    "aluminum": 2700.0,
    "rhenium": 21020.0,
}


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values in SI units."""

    G: float = 6.67430e-11
    k_B: float = 1.380649e-23
    hbar: float = 1.054571817e-34


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class OptomechParams:
    g0: float  # 1/s, single-photon coupling
    omega_m: float  # rad/s
    gamma_m: float  # 1/s
    temperature: float  # K
    density: float  # kg/m^3
    constants: PhysicalConstants = field(default=CODATA)

    def __post_init__(self):
        for name in ("g0", "omega_m", "gamma_m", "temperature", "density"):
            v = getattr(self, name)
            # zero temperature / density are admitted as limiting cases
            allow_zero = name in ("temperature", "density")
            if not np.isfinite(v) or v < 0 or (v == 0 and not allow_zero):
                raise DomainError(f"{name} must be positive, got {v!r}")
        if self.quality < 1:
            raise DomainError(f"quality factor omega_m/gamma_m = {self.quality} < 1")

    @property
    def quality(self) -> float:
        return self.omega_m / self.gamma_m

    @property
    def period(self) -> float:
        return 2 * np.pi / self.omega_m

    def with_(self, **changes) -> OptomechParams:
        return replace(self, **changes)


def reference_params(material: str = "aluminum", temperature: float = 1e-9) -> OptomechParams:
    """``g0 = w_m = 1/s``, ``gamma_m = 1e-10/s`` with the density of ``material``."""
    return OptomechParams(1.0, 1.0, 1e-10, temperature, MATERIAL_DENSITIES[material])


def lambda_grav(params: OptomechParams) -> float:
    """``(2 pi / 3) G density / omega_m`` in 1/s."""
    return 2 * np.pi / 3 * params.constants.G * params.density / params.omega_m


def lambda_heat(params: OptomechParams) -> float:
    """``k_B T / (hbar Q)`` in 1/s."""
    c = params.constants
    return c.k_B * params.temperature / (c.hbar * params.quality)


def nbar(params: OptomechParams, include_gravity: bool = True) -> float:
    n = 2 * lambda_heat(params) / params.gamma_m
    if include_gravity:
        n += 2 * lambda_grav(params) / params.gamma_m
    return n


def displacement_sq(params: OptomechParams, t):
    """``|beta(t)|^2 = (4 g0^2 / w_m^2) sin^2(w_m t / 2)``."""
    t = np.asarray(t, dtype=float)
    return 4 * params.g0**2 / params.omega_m**2 * np.sin(params.omega_m * t / 2) ** 2


def coherence_R(params: OptomechParams, t, include_gravity: bool = True):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    out = np.exp(-(1 + 2 * nbar(params, include_gravity)) * displacement_sq(params, t) / 2)
    return float(out) if out.ndim == 0 else out


def bell_probs_from_R(R: float) -> np.ndarray:
    """Bell-basis probabilities of ``rho_f`` with coherence ``R``."""
    return np.array([0.0, 0.0, (1 + R) / 2, (1 - R) / 2])


def cavity_state(R: float) -> TwoQubitState:
    """``rho_f`` as a two-qubit density matrix (``|1,0> -> |10>``, real ``R``)."""
    m = np.zeros((4, 4), dtype=complex)
    m[2, 2] = m[1, 1] = 0.5
    m[2, 1] = 0.5 * R  # |10><01|
    m[1, 2] = 0.5 * R
    return TwoQubitState(m)


def dec_from_R(R):
    R = np.asarray(R, dtype=float)
    out = 0.25 * (1 + np.sqrt(np.clip(1 - R**2, 0.0, None)))
    return float(out) if out.ndim == 0 else out


def dec_of_t(params: OptomechParams, t, include_gravity: bool = True):
    """Dec(A|E) of the cavity state after interaction time ``t``."""
    return dec_from_R(coherence_R(params, t, include_gravity))


def beta_standard_from_R(R):
    """CHSH value of ``rho_f`` under the standard measurements, ``sqrt(2)(1 + R)``."""
    return SQRT2 * (1 + np.asarray(R, dtype=float))


def beta_optimal_from_R(R):
    """Maximal CHSH value of ``rho_f``, ``2 sqrt(1 + R^2)``."""
    return 2 * np.sqrt(1 + np.asarray(R, dtype=float) ** 2)


def beta_mech(params: OptomechParams, t, include_gravity: bool = False, optimal: bool = False):
    """CHSH value predicted without gravitational decoherence (by default)."""
    R = coherence_R(params, t, include_gravity)
    out = beta_optimal_from_R(R) if optimal else beta_standard_from_R(R)
    return float(out) if np.ndim(out) == 0 else out


def beta_fals_curve(params: OptomechParams, times) -> np.ndarray:
    """``beta_fals`` of the with-gravity prediction; NaN where not falsifiable."""
    dec = np.atleast_1d(dec_of_t(params, times, include_gravity=True))
    out = np.full(dec.shape, np.nan)
    ok = dec < DEC_LIMIT
    if np.any(ok):
        out[ok] = beta_fals(np.maximum(dec[ok], 0.25))
    return out


@dataclass
class DecoherenceCurve:
    times: np.ndarray
    dec_grav: np.ndarray
    dec_heat: np.ndarray
    beta_mech: np.ndarray
    beta_fals: np.ndarray
    beta_optimal: np.ndarray

    @property
    def gap(self) -> np.ndarray:
        return self.beta_mech - self.beta_fals

    def rows(self):
        cols = (self.times, self.dec_grav, self.dec_heat, self.beta_mech,
                self.beta_optimal, self.beta_fals, self.gap)
        return [tuple(float(c[i]) for c in cols) for i in range(len(self.times))]


CURVE_COLUMNS = ("t", "dec_grav", "dec_heat", "beta_mech", "beta_optimal", "beta_fals", "gap")


def decoherence_curve(params: OptomechParams, times) -> DecoherenceCurve:
    times = np.asarray(times, dtype=float)
    return DecoherenceCurve(
        times,
        np.atleast_1d(dec_of_t(params, times, True)),
        np.atleast_1d(dec_of_t(params, times, False)),
        np.atleast_1d(beta_mech(params, times)),
        beta_fals_curve(params, times),
        np.atleast_1d(beta_mech(params, times, optimal=True)),
    )


def gap(params: OptomechParams, t):
    return beta_mech(params, t) - beta_fals_curve(params, t)


@dataclass
class OptimalTime:
    t_max: float
    gap: float
    beta_mech: float
    beta_fals: float

    @property
    def falsifiable(self) -> bool:
        return self.gap > 0


def optimal_time(
    params: OptomechParams,
    window: tuple[float, float] | None = None,
    grid: int = 4096,
    tol: float = 1e-12,
    zoom_points: int = 65,
) -> OptimalTime:
    """Maximise ``beta_mech - beta_fals`` over ``window`` (default: one period).

    A dense scan is followed by rounds of finer scans over the cells around
    the current best point until the bracket is narrower than ``tol``.  Each
    round is one vectorised evaluation, which is far cheaper than a scalar
    line search here.  A non-positive ``gap`` means these parameters cannot
    be tested.
    """
    lo, hi = window if window is not None else (0.0, params.period)
    if not (0 <= lo < hi):
        raise DomainError(f"invalid time window {(lo, hi)!r}")
    if grid < 2 or zoom_points < 3:
        raise DomainError("grid needs at least 2 points and zoom_points at least 3")

    def score(ts):
        v = gap(params, ts)
        return np.where(np.isnan(v), -np.inf, v)

    ts = np.linspace(lo, hi, grid)
    g = score(ts)
    k = int(np.argmax(g))
    best_t, best_g = float(ts[k]), float(g[k])
    a, b = ts[max(k - 1, 0)], ts[min(k + 1, grid - 1)]
    while b - a > tol and np.isfinite(best_g):
        ts = np.linspace(a, b, zoom_points)
        g = score(ts)
        k = int(np.argmax(g))
        if g[k] > best_g:
            best_t, best_g = float(ts[k]), float(g[k])
        a, b = ts[max(k - 1, 0)], ts[min(k + 1, zoom_points - 1)]
    bf = beta_fals_curve(params, best_t)[0]
    return OptimalTime(best_t, best_g, float(beta_mech(params, best_t)), float(bf))
