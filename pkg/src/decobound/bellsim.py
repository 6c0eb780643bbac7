"""Finite-round simulation of the CHSH protocol with memoryless devices.

Every round draws independent uniform settings ``x, y`` and outcomes from the
Born rule.  The CHSH value is estimated as

    beta_hat = (4/n) sum_i s(x_i, y_i) (-1)^(a_i + b_i),   s = -1 iff x = y = 1,

which is unbiased, and each summand lies in [-4, 4].

Confidence radius at level ``1 - delta`` (``delta = 0.01``): treat each of the
four correlators as estimated from ``n/4`` rounds with values in [-1, 1].
Hoeffding gives a per-correlator radius ``sqrt(2 ln(2/delta) / (n/4))``, and
the four radii add, so

    radius = 4 sqrt(2 ln(2/delta) * 4 / n).

The single-sum estimator above with range 8 would allow half of that.  The
sum of per-cell radii is kept because it also covers the per-cell estimator,
which divides by the realised cell counts.

Randomness: numpy ``Generator(PCG64)`` seeded through ``SeedSequence(seed)``.
Repeated runs use ``SeedSequence(seed).spawn(k)``, so run ``i`` is
reproducible in isolation and independent of the others.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bound import dec_bound_quantum
from .errors import DomainError
from .quantum import TSIRELSON, ChshMeasurementSet, _matrix

CONFIDENCE = 0.99
#: s(x, y) sign of each correlator in the CHSH combination
CHSH_SIGNS = np.array([[1, 1], [1, -1]])


def hoeffding_radius(n: int, confidence: float = CONFIDENCE) -> float:
    if n < 1:
        raise DomainError(f"need at least one round, got {n}")
    delta = 1.0 - confidence
    return float(4.0 * np.sqrt(2.0 * np.log(2.0 / delta) * 4.0 / n))


def outcome_distribution(rho, m: ChshMeasurementSet, x: int, y: int) -> np.ndarray:
    """``Pr[a, b | x, y]`` as a 2x2 array indexed ``[a, b]``."""
    mat = _matrix(rho)
    A, B = m.alice(x), m.bob(y)
    out = np.empty((2, 2))
    for a in (0, 1):
        for b in (0, 1):
            out[a, b] = np.trace(np.kron(A.projector(a), B.projector(b)) @ mat).real
    # tiny negative entries are rounding noise from the projectors
    out = np.clip(out, 0.0, None)
    return out / out.sum()


def behaviour(rho, m: ChshMeasurementSet | None = None) -> np.ndarray:
    """Full table ``p[x, y, a, b]``."""
    if m is None:
        m = ChshMeasurementSet.standard()
    return np.array([[outcome_distribution(rho, m, x, y) for y in (0, 1)] for x in (0, 1)])


def chsh_from_behaviour(p: np.ndarray) -> float:
    corr = p[:, :, 0, 0] + p[:, :, 1, 1] - p[:, :, 0, 1] - p[:, :, 1, 0]
    return float((CHSH_SIGNS * corr).sum())


@dataclass
class TrialRecord:
    """Per-round settings and outcomes, each an array of bits."""

    x: np.ndarray
    y: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("x", "y", "a", "b"):
            v = np.asarray(getattr(self, name), dtype=np.int8)
            if v.ndim != 1 or np.any((v != 0) & (v != 1)):
                raise DomainError(f"{name} must be a 1-d array of bits")
            setattr(self, name, v)
        if not (len(self.x) == len(self.y) == len(self.a) == len(self.b)):
            raise DomainError("record arrays must have equal length")

    def __len__(self):
        return len(self.x)

    def counts(self) -> np.ndarray:
        """``counts[x, y, a, b]``."""
        flat = ((self.x * 2 + self.y) * 2 + self.a) * 2 + self.b
        return np.bincount(flat, minlength=16).reshape(2, 2, 2, 2)


@dataclass(frozen=True)
class BetaEstimate:
    beta_hat: float
    n_rounds: int
    confidence_radius: float
    confidence: float = CONFIDENCE

    @property
    def lower(self) -> float:
        return self.beta_hat - self.confidence_radius

    def covers(self, beta: float) -> bool:
        return abs(self.beta_hat - beta) <= self.confidence_radius

    def dec_bound(self) -> float:
        """Bound implied by the one-sided lower confidence limit (valid at ``confidence``)."""
        return float(dec_bound_quantum(min(self.lower, TSIRELSON)))

    def dec_bound_point(self) -> float:
        """Plug-in bound from ``beta_hat`` itself, clipped to the quantum range; not a confidence statement."""
        return float(dec_bound_quantum(min(self.beta_hat, TSIRELSON)))


def sample(rho, m: ChshMeasurementSet, n: int, rng: np.random.Generator) -> TrialRecord:
    if n < 1:
        raise DomainError(f"need at least one round, got {n}")
    p = behaviour(rho, m).reshape(4, 4)  # [(x, y), (a, b)]
    cdf = np.cumsum(p, axis=1)
    cdf[:, -1] = 1.0
    x = rng.integers(0, 2, size=n)
    y = rng.integers(0, 2, size=n)
    u = rng.random(n)
    cell = (u[:, None] >= cdf[x * 2 + y][:, :3]).sum(axis=1)
    return TrialRecord(x, y, cell >> 1, cell & 1)


def estimate(rec: TrialRecord, confidence: float = CONFIDENCE) -> BetaEstimate:
    n = len(rec)
    terms = CHSH_SIGNS[rec.x, rec.y] * (1 - 2 * (rec.a ^ rec.b))
    return BetaEstimate(float(4.0 * terms.sum() / n), n, hoeffding_radius(n, confidence), confidence)


def simulate(
    rho,
    m: ChshMeasurementSet | None = None,
    n: int = 10_000,
    seed: int | np.random.SeedSequence = 0,
    return_records: bool = False,
):
    """Run ``n`` rounds and estimate beta.  Same seed, same result."""
    if m is None:
        m = ChshMeasurementSet.standard()
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rec = sample(rho, m, n, np.random.Generator(np.random.PCG64(ss)))
    est = estimate(rec)
    return (est, rec) if return_records else est


def simulate_many(rho, m: ChshMeasurementSet | None = None, n: int = 10_000, runs: int = 100, seed: int = 0):
    """``runs`` independent estimates from spawned substreams of ``seed``."""
    children = np.random.SeedSequence(seed).spawn(runs)
    return [simulate(rho, m, n, ss) for ss in children]
