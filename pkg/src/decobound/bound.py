"""Tight quantum upper bound on Dec(A|E) as a function of the CHSH value.

For ``2 < v <= 2 sqrt(2)`` the minimal min-entropy compatible with CHSH value
``v`` is

    f(v) = 3 - 2 log max_{-1 <= c <= 1 - v/sqrt(2)} h_v(c),
    h_v(c) = 2 sqrt(1 + c) + sqrt(1 - c + v/sqrt(2)) + sqrt(1 - c - v/sqrt(2)),

and the largest compatible decoherence is ``2**(-f(v)) / 2``.  ``h_v`` is
concave, so the inner maximum is found by golden-section search.  All public
functions accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import dec_quantum
from .errors import DomainError, NotFalsifiableError
from .quantum import SQRT2, TSIRELSON, BellDiagonalState

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
CZ_TOL = 1e-12
BETA_TOL = 1e-12
DEC_MIN = 0.25


def cz_objective(v, cz):
    """``h_v(c_z)``; negative radicands (outside the feasible interval) are clipped to 0."""
    q = np.asarray(v, dtype=float) / SQRT2
    cz = np.asarray(cz, dtype=float)
    return (
        2.0 * np.sqrt(np.clip(1.0 + cz, 0.0, None))
        + np.sqrt(np.clip(1.0 - cz + q, 0.0, None))
        + np.sqrt(np.clip(1.0 - cz - q, 0.0, None))
    )


def golden_section_max(fun, lo, hi, tol: float = CZ_TOL):
    """Maximise a unimodal ``fun`` on ``[lo, hi]``, elementwise over arrays.

    Returns ``(argmax, max)``.  One new probe per iteration; the interval
    ends are compared with the final midpoint so a maximum on the boundary
    is not missed.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    a, b = lo.copy(), hi.copy()
    width = float(np.max(b - a)) if a.size else 0.0
    n = 0 if width <= tol else int(np.ceil(np.log(tol / width) / np.log(INV_PHI)))
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(n):
        left = fc >= fd
        # left: keep [a, d], old c becomes the new d; right: keep [c, b]
        a, b = np.where(left, a, c), np.where(left, d, b)
        new = np.where(left, b - INV_PHI * (b - a), a + INV_PHI * (b - a))
        fnew = fun(new)
        c, d = np.where(left, new, d), np.where(left, c, new)
        fc, fd = np.where(left, fnew, fd), np.where(left, fc, fnew)
    cands = np.stack(np.broadcast_arrays((a + b) / 2, lo, hi))
    vals = np.stack([fun(x) for x in cands])
    k = np.argmax(vals, axis=0)
    return (
        np.take_along_axis(cands, k[None], axis=0)[0],
        np.take_along_axis(vals, k[None], axis=0)[0],
    )


def _check_v(v, allow_two: bool = False) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    low_bad = v < 2.0 if allow_two else v <= 2.0
    if np.any(low_bad) or np.any(v > TSIRELSON + BETA_TOL) or np.any(~np.isfinite(v)):
        raise DomainError(f"v must lie in (2, 2*sqrt(2)], got {v!r}")
    return np.minimum(v, TSIRELSON)


def optimal_cz(v, _allow_two: bool = False):
    """Maximiser ``c_z`` of ``h_v`` and the maximum itself."""
    v = _check_v(v, _allow_two)
    hi = 1.0 - v / SQRT2
    lo = -np.ones_like(v)
    hi = np.maximum(hi, lo)
    cz, val = golden_section_max(lambda c: cz_objective(v, c), lo, hi)
    return cz, val


def f_of_v(v, _allow_two: bool = False):
    """Minimal ``H_min(A|E)`` compatible with CHSH value ``v``; increasing on (2, 2 sqrt 2]."""
    _, val = optimal_cz(v, _allow_two)
    out = 3.0 - 2.0 * np.log2(val)
    return float(out) if np.ndim(out) == 0 else out


#: sup of the bound as beta -> 2 from above
DEC_LIMIT = float(2.0 ** (-f_of_v(2.0, _allow_two=True)) / 2.0)


def dec_bound_quantum(beta):
    """Largest Dec(A|E) compatible with observing CHSH value ``beta`` in quantum theory.

    Equal to 1 for ``beta <= 2`` (no constraint) and ``2**(-f(beta))/2`` above,
    so it jumps at ``beta = 2``.
    """
    b = np.asarray(beta, dtype=float)
    if np.any(b > TSIRELSON + BETA_TOL) or np.any(~np.isfinite(b)):
        raise DomainError(f"CHSH value above 2*sqrt(2) is not quantum: {beta!r}")
    out = np.ones_like(b)
    mask = b > 2.0
    if np.any(mask):
        out[mask] = 2.0 ** (-np.asarray(f_of_v(b[mask]))) / 2.0
    return float(out) if out.ndim == 0 else out


def _bound_open(beta):
    # continuous branch of the bound on [2, 2 sqrt 2]
    return 2.0 ** (-np.asarray(f_of_v(beta, _allow_two=True))) / 2.0


def beta_fals(dec_value, xtol: float = 1e-13):
    """Smallest CHSH value whose observation rules out decoherence ``dec_value``.

    Bisection on the decreasing bound.  ``dec_value`` must lie in
    ``[1/4, DEC_LIMIT)``; larger values cannot be excluded by any CHSH value
    and raise NotFalsifiableError.
    """
    d = np.asarray(dec_value, dtype=float)
    if np.any(d < DEC_MIN - BETA_TOL) or np.any(~np.isfinite(d)):
        raise DomainError(f"Dec(A|E) of a qubit is at least 1/4, got {dec_value!r}")
    if np.any(d >= DEC_LIMIT):
        raise NotFalsifiableError(
            f"Dec(A|E) >= {DEC_LIMIT:.6f} is not falsifiable by CHSH: {dec_value!r}"
        )
    d = np.atleast_1d(d)
    lo = np.full(d.shape, 2.0)
    hi = np.full(d.shape, TSIRELSON)
    while np.max(hi - lo) > xtol:
        mid = (lo + hi) / 2
        above = _bound_open(mid) > d
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    out = np.where(d <= DEC_MIN + BETA_TOL, TSIRELSON, hi)
    return float(out[0]) if np.ndim(dec_value) == 0 else out


def optimal_bell_state(beta: float) -> BellDiagonalState:
    """Bell-diagonal state on the boundary: ``c_x = c_y = beta/(2 sqrt 2)``, optimal ``c_z``."""
    cz, _ = optimal_cz(beta)
    c = min(float(beta), TSIRELSON) / TSIRELSON
    return BellDiagonalState.from_correlations(c, c, float(cz))


@dataclass(frozen=True)
class FeasibleRegionCurve:
    """Sampled boundary ``(beta, dec_bound)`` of the quantum feasible region."""

    beta: np.ndarray
    dec_bound: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.beta) <= 0):
            raise ValueError("beta samples must be strictly increasing")
        if np.any(np.diff(self.dec_bound) >= 0):
            raise ValueError("bound samples must be strictly decreasing")

    def rows(self):
        return list(zip(self.beta.tolist(), self.dec_bound.tolist()))


def region_curve(n: int, left_offset: float = 1e-9) -> FeasibleRegionCurve:
    """``n`` evenly spaced samples on ``(2, 2 sqrt 2]``; the first sits ``left_offset`` above 2."""
    if n < 2:
        raise DomainError(f"need at least 2 samples, got {n}")
    beta = np.linspace(2.0 + left_offset, TSIRELSON, n)
    return FeasibleRegionCurve(beta, np.asarray(dec_bound_quantum(beta)))


def dec_of_optimal_state(beta: float) -> float:
    return dec_quantum(optimal_bell_state(beta).p)
