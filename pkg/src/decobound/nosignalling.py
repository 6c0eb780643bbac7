"""Theory-independent decoherence bound from the CHSH winning probability.

A tripartite no-signalling box ``Pr[a,b,c|x,y,z]`` (Alice, Bob, Eve) with CHSH
winning probability at least ``lam`` for Alice and Bob is compared with any
bipartite box ``Pr[a,c|x,z]`` whose outcomes agree whenever ``x == z``.  The
smallest worst-case total-variation distance between Eve's side of the first
and the second, ``delta(lam)``, is a linear program in 97 variables and yields

    Dec(A|E) <= 2 ** (-delta(lam) ** 2).

Outcome bit 0 corresponds to observable eigenvalue +1, so the CHSH value and
winning probability are related by ``lam = 1/2 + beta/8``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidStateError, LpError
from .simplex import LpProblem, LpSolution, lp_solve

BITS = (0, 1)
NS_TOL = 1e-9
N_OMEGA, N_PSI, N_DELTA = 64, 16, 16
N_VARS = N_OMEGA + N_PSI + N_DELTA + 1
CLASSICAL_LAMBDA = 0.75


def omega_index(a, b, c, x, y, z) -> int:
    return ((((a * 2 + b) * 2 + c) * 2 + x) * 2 + y) * 2 + z


def psi_index(a, c, x, z) -> int:
    return ((a * 2 + c) * 2 + x) * 2 + z


def _bits(n):
    return itertools.product(BITS, repeat=n)


# -- classical distances ----------------------------------------------------


def _distribution_pair(p, q):
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.size != q.size:
        raise ValueError(f"length mismatch: {p.size} vs {q.size}")
    for name, v in (("p", p), ("q", q)):
        if np.any(v < -NS_TOL) or abs(v.sum() - 1.0) > NS_TOL:
            raise InvalidStateError(f"{name} is not a probability distribution")
    return np.clip(p, 0.0, None), np.clip(q, 0.0, None)


def classical_fidelity(p, q) -> float:
    """Bhattacharyya coefficient ``sum_i sqrt(p_i q_i)``."""
    p, q = _distribution_pair(p, q)
    return float(min(1.0, np.sqrt(p * q).sum()))


def tv_distance(p, q) -> float:
    """Total variation distance ``(1/2) sum_i |p_i - q_i|``."""
    p, q = _distribution_pair(p, q)
    return float(min(1.0, 0.5 * np.abs(p - q).sum()))


# -- no-signalling boxes ----------------------------------------------------


@dataclass(frozen=True)
class NsDist3:
    """``Pr[a,b,c|x,y,z]`` stored as a (2,)*6 array indexed ``[a,b,c,x,y,z]``."""

    pr: np.ndarray

    def __post_init__(self):
        pr = np.asarray(self.pr, dtype=float).reshape((2,) * 6)
        if np.any(pr < -NS_TOL) or np.any(pr > 1 + NS_TOL):
            raise InvalidStateError("entries must lie in [0, 1]")
        norm = pr.sum(axis=(0, 1, 2))
        if np.max(np.abs(norm - 1.0)) > NS_TOL:
            raise InvalidStateError("not normalised for every setting")
        if self.signalling() > NS_TOL:
            raise InvalidStateError(f"signalling violation {self.signalling():.3g}")
        pr.setflags(write=False)
        object.__setattr__(self, "pr", pr)

    def signalling(self) -> float:
        pr = np.asarray(self.pr).reshape((2,) * 6)
        alice = pr.sum(axis=0)  # [b,c,x,y,z]
        bob = pr.sum(axis=1)  # [a,c,x,y,z]
        eve = pr.sum(axis=2)  # [a,b,x,y,z]
        return float(max(
            np.max(np.abs(alice[:, :, 0] - alice[:, :, 1])),
            np.max(np.abs(bob[:, :, :, 0] - bob[:, :, :, 1])),
            np.max(np.abs(eve[:, :, :, :, 0] - eve[:, :, :, :, 1])),
        ))

    def chsh_winning(self, z: int = 0) -> float:
        pr = self.pr
        return float(sum(
            pr[a, b, c, x, y, z]
            for x, y, a, b, c in _bits(5)
            if a ^ b == x * y
        ) / 4)

    def alice_eve(self, y: int = 0) -> NsDist2:
        """``Pr[a,c|x,z] = sum_b Pr[a,b,c|x,y,z]`` for Bob's setting ``y``."""
        return NsDist2(self.pr[:, :, :, :, y, :].sum(axis=1))


@dataclass(frozen=True)
class NsDist2:
    """``Pr[a,c|x,z]`` stored as a (2,)*4 array indexed ``[a,c,x,z]``."""

    pr: np.ndarray

    def __post_init__(self):
        pr = np.asarray(self.pr, dtype=float).reshape((2,) * 4)
        if np.any(pr < -NS_TOL) or np.any(pr > 1 + NS_TOL):
            raise InvalidStateError("entries must lie in [0, 1]")
        if np.max(np.abs(pr.sum(axis=(0, 1)) - 1.0)) > NS_TOL:
            raise InvalidStateError("not normalised for every setting")
        if self.signalling() > NS_TOL:
            raise InvalidStateError(f"signalling violation {self.signalling():.3g}")
        pr.setflags(write=False)
        object.__setattr__(self, "pr", pr)

    def signalling(self) -> float:
        pr = np.asarray(self.pr).reshape((2,) * 4)
        alice = pr.sum(axis=0)  # [c,x,z]
        eve = pr.sum(axis=1)  # [a,x,z]
        return float(max(
            np.max(np.abs(alice[:, 0] - alice[:, 1])),
            np.max(np.abs(eve[:, :, 0] - eve[:, :, 1])),
        ))

    def correlation(self, x: int) -> float:
        """``Pr[a = c | x = z]``."""
        return float(self.pr[0, 0, x, x] + self.pr[1, 1, x, x])

    def setting(self, x: int, z: int) -> np.ndarray:
        return np.asarray(self.pr[:, :, x, z]).reshape(4)


# -- the linear program ------------------------------------------------------


def _check_lambda(lam: float) -> float:
    if not (0.0 <= lam <= 1.0) or not np.isfinite(lam):
        raise DomainError(f"lambda must lie in [0, 1], got {lam!r}")
    return float(lam)


def _rows_D_omega():
    eq = []
    for x, y, z in _bits(3):
        r = np.zeros(N_VARS)
        for a, b, c in _bits(3):
            r[omega_index(a, b, c, x, y, z)] = 1.0
        eq.append((r, 1.0))
    for b, c, y, z in _bits(4):
        r = np.zeros(N_VARS)
        for a in BITS:
            r[omega_index(a, b, c, 0, y, z)] += 1.0
            r[omega_index(a, b, c, 1, y, z)] -= 1.0
        eq.append((r, 0.0))
    for a, c, x, z in _bits(4):
        r = np.zeros(N_VARS)
        for b in BITS:
            r[omega_index(a, b, c, x, 0, z)] += 1.0
            r[omega_index(a, b, c, x, 1, z)] -= 1.0
        eq.append((r, 0.0))
    for a, b, x, y in _bits(4):
        r = np.zeros(N_VARS)
        for c in BITS:
            r[omega_index(a, b, c, x, y, 0)] += 1.0
            r[omega_index(a, b, c, x, y, 1)] -= 1.0
        eq.append((r, 0.0))
    return eq


def _rows_D_psi():
    off = N_OMEGA
    eq = []
    for x, z in _bits(2):
        r = np.zeros(N_VARS)
        for a, c in _bits(2):
            r[off + psi_index(a, c, x, z)] = 1.0
        eq.append((r, 1.0))
    for c, z in _bits(2):
        r = np.zeros(N_VARS)
        for a in BITS:
            r[off + psi_index(a, c, 0, z)] += 1.0
            r[off + psi_index(a, c, 1, z)] -= 1.0
        eq.append((r, 0.0))
    for a, x in _bits(2):
        r = np.zeros(N_VARS)
        for c in BITS:
            r[off + psi_index(a, c, x, 0)] += 1.0
            r[off + psi_index(a, c, x, 1)] -= 1.0
        eq.append((r, 0.0))
    for x in BITS:
        r = np.zeros(N_VARS)
        r[off + psi_index(0, 0, x, x)] = 1.0
        r[off + psi_index(1, 1, x, x)] = 1.0
        eq.append((r, 1.0))
    return eq


def chsh_row(z: int = 0) -> np.ndarray:
    """Coefficients of the CHSH winning probability on the omega block at Eve's setting ``z``."""
    r = np.zeros(N_VARS)
    for x, y, a, b, c in _bits(5):
        if a ^ b == x * y:
            r[omega_index(a, b, c, x, y, z)] = 0.25
    return r


DELTA = N_VARS - 1


def delta_ac_index(a, c, x, z) -> int:
    return N_OMEGA + N_PSI + psi_index(a, c, x, z)


def build_delta_lp(lam: float, y: int = 0, chsh_z: int = 0, pairs=None) -> LpProblem:
    """Linear program whose optimum is ``delta(lam)``.

    Variables: 64 omega entries, 16 psi entries, 16 ``delta_ac^xz`` and the
    objective variable ``delta``.  ``pairs`` restricts the ``delta >= sum_ac``
    rows to the given ``(x, z)``; by default all four pairs are imposed.
    """
    lam = _check_lambda(lam)
    eq = _rows_D_omega() + _rows_D_psi()
    ineq_A, ineq_b, senses = [chsh_row(chsh_z)], [lam], [">="]
    for a, c, x, z in _bits(4):
        base = np.zeros(N_VARS)
        base[N_OMEGA + psi_index(a, c, x, z)] = 0.5
        for b in BITS:
            base[omega_index(a, b, c, x, y, z)] -= 0.5
        d = delta_ac_index(a, c, x, z)
        for sign in (1.0, -1.0):
            r = sign * base
            r[d] = -1.0
            ineq_A.append(r)
            ineq_b.append(0.0)
            senses.append("<=")
    for x, z in pairs if pairs is not None else list(_bits(2)):
        r = np.zeros(N_VARS)
        r[DELTA] = -1.0
        for a, c in _bits(2):
            r[delta_ac_index(a, c, x, z)] = 1.0
        ineq_A.append(r)
        ineq_b.append(0.0)
        senses.append("<=")
    objective = np.zeros(N_VARS)
    objective[DELTA] = 1.0
    # upper bounds of 1 on probabilities follow from normalisation
    bounds = [(0.0, None)] * N_VARS
    return LpProblem(
        objective,
        A_eq=np.array([r for r, _ in eq]),
        b_eq=np.array([v for _, v in eq]),
        A_ineq=np.array(ineq_A),
        b_ineq=np.array(ineq_b),
        senses=senses,
        bounds=bounds,
    )


@dataclass
class DeltaSolution:
    lam: float
    delta: float
    omega: NsDist3
    psi: NsDist2
    lp: LpSolution


def solve_delta_lp(lam: float, **kwargs) -> DeltaSolution:
    sol = lp_solve(build_delta_lp(lam, **kwargs))
    if sol.status != "optimal":
        raise LpError(f"delta LP at lambda={lam} returned {sol.status}")
    x = sol.x
    omega = NsDist3(np.clip(x[:N_OMEGA], 0.0, 1.0))
    psi = NsDist2(np.clip(x[N_OMEGA : N_OMEGA + N_PSI], 0.0, 1.0))
    return DeltaSolution(float(lam), max(0.0, sol.value), omega, psi, sol)


@lru_cache(maxsize=4096)
def delta_of_lambda(lam: float) -> float:
    """Optimal value of the 97-variable program (worst case over ``(x, z)``)."""
    return solve_delta_lp(lam).delta


def delta_min_variant(lam: float) -> float:
    """The same program with ``min`` over ``(x, z)``: four LPs, smallest value."""
    return min(solve_delta_lp(lam, pairs=[p]).delta for p in _bits(2))


def gpt_dec_bound(lam: float) -> float:
    """``2 ** (-delta(lam)**2)``: valid for every no-signalling theory."""
    d = delta_of_lambda(_check_lambda(lam))
    return float(2.0 ** (-d * d))


def lambda_from_beta(beta: float) -> float:
    """CHSH winning probability ``1/2 + beta/8`` for CHSH value ``beta`` in [-4, 4]."""
    if not (-4.0 <= beta <= 4.0):
        raise DomainError(f"CHSH value must lie in [-4, 4], got {beta!r}")
    return 0.5 + beta / 8.0
