"""Self-test battery: certificates, oracles and cross-checks between routes.

Each check compares a ``value`` to a ``bound`` with ``<=`` or ``>=``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bound, entropy, nosignalling, optomech, quantum
from .simplex import lp_solve, reference_solve

COLUMNS = ("suite", "check", "samples", "value", "relation", "bound", "passed")


@dataclass(frozen=True)
class Check:
    suite: str
    check: str
    samples: int
    value: float
    relation: str
    bound: float

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        if self.relation == "<=":
            return bool(self.value <= self.bound)
        return bool(self.value >= self.bound)

    def row(self):
        # + 0.0 turns -0.0 into 0.0 for stable output
        return (self.suite, self.check, self.samples, float(self.value) + 0.0, self.relation,
                float(self.bound), self.passed)


def random_bell_probs(rng: np.random.Generator, n: int) -> np.ndarray:
    """Mix of interior points and faces of the simplex (some zero weights)."""
    p = rng.dirichlet(np.full(4, 0.7), size=n)
    faces = rng.random((n, 4)) < 0.15
    faces[np.arange(n), rng.integers(0, 4, size=n)] = False
    p[faces] = 0.0
    return p / p.sum(axis=1, keepdims=True)


def endpoint_checks() -> list[Check]:
    return [
        Check("endpoints", "|dec_bound(2 sqrt 2) - 1/4|", 1,
              abs(bound.dec_bound_quantum(quantum.TSIRELSON) - 0.25), "<=", 1e-9),
        Check("endpoints", "|f(2 sqrt 2) - 1|", 1, abs(bound.f_of_v(quantum.TSIRELSON) - 1.0), "<=", 1e-9),
        Check("endpoints", "|dec_bound(2) - 1|", 1, abs(bound.dec_bound_quantum(2.0) - 1.0), "<=", 0.0),
    ]


def sdp_checks(p: np.ndarray, tol: float) -> list[Check]:
    worst: dict[str, float] = {}
    for row in p:
        for c in entropy.sdp_certificates_check(row, tol=tol).checks:
            worst[c.name] = max(worst.get(c.name, 0.0), c.residual)
    return [Check("sdp", name, len(p), r, "<=", tol) for name, r in worst.items()]


def oracle_checks(p: np.ndarray, tol: float, seed: int) -> list[Check]:
    err = 0.0
    for k, row in enumerate(p):
        numeric = entropy.hmax_numeric_oracle(quantum.BellDiagonalState(row), seed=seed + k)
        err = max(err, abs(numeric - entropy.hmax_bell_diagonal(row)))
    return [Check("oracle", "|H_max numeric - closed form|", len(p), err, "<=", tol)]


def tightness_checks(n: int, tol_beta: float, tol_dec: float) -> list[Check]:
    betas = np.linspace(2.0, quantum.TSIRELSON, n + 1)[1:]
    e_beta = e_dec = 0.0
    for b in betas:
        state = bound.optimal_bell_state(b)
        e_beta = max(e_beta, abs(quantum.beta_max(state) - b))
        e_dec = max(e_dec, abs(entropy.dec_quantum(state.p) - bound.dec_bound_quantum(b)))
    return [
        Check("tightness", "|beta_max(optimal state) - beta|", n, e_beta, "<=", tol_beta),
        Check("tightness", "|Dec(optimal state) - dec_bound(beta)|", n, e_dec, "<=", tol_dec),
    ]


def converse_checks(p: np.ndarray, tol: float) -> list[Check]:
    worst = -np.inf
    for row in p:
        state = quantum.BellDiagonalState(row)
        beta = min(quantum.beta_max(state), quantum.TSIRELSON)
        worst = max(worst, entropy.dec_quantum(row) - bound.dec_bound_quantum(beta))
    return [Check("converse", "max Dec - dec_bound(beta_max)", len(p), worst, "<=", tol)]


def lp_checks(tol: float) -> list[Check]:
    out = [
        Check("lp", f"delta({lam})", 1, nosignalling.delta_of_lambda(lam), "<=", tol)
        for lam in (0.5, 0.7, 0.75)
    ]
    out.append(Check("lp", "delta(0.76)", 1, nosignalling.delta_of_lambda(0.76), ">=", 1e-6))
    diff = res = 0.0
    lams = (0.76, 0.8, 0.9, 1.0)
    for lam in lams:
        prob = nosignalling.build_delta_lp(lam)
        mine, ref = lp_solve(prob), reference_solve(prob)
        diff = max(diff, abs(mine.value - ref.value))
        res = max(res, mine.max_constraint_residual)
    out.append(Check("lp", "|simplex - HiGHS|", len(lams), diff, "<=", 1e-7))
    out.append(Check("lp", "simplex constraint residual", len(lams), res, "<=", tol))
    return out


def classical_checks(rng: np.random.Generator, n: int = 500) -> list[Check]:
    worst = -np.inf
    for _ in range(n):
        k = int(rng.integers(2, 9))
        p, q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
        d = nosignalling.tv_distance(p, q)
        b = nosignalling.classical_fidelity(p, q)
        worst = max(worst, d * d - 2 * (1 - b))
    xs = np.arange(1, 1001) * 1e-3
    gap = np.min(-np.log2(xs**2) - 2 * (1 - xs))
    return [
        Check("classical", "max d^2 - 2(1 - b)", n, worst, "<=", 1e-12),
        Check("classical", "min -log(x^2) - 2(1 - x)", len(xs), gap, ">=", 0.0),
    ]


def optomech_checks() -> list[Check]:
    Rs = np.linspace(0.0, 1.0, 21)
    e_dec = e_std = e_opt = 0.0
    for R in Rs:
        state = optomech.cavity_state(R)
        e_dec = max(e_dec, abs(optomech.dec_from_R(R) - entropy.dec_quantum(optomech.bell_probs_from_R(R))))
        e_std = max(e_std, abs(optomech.beta_standard_from_R(R) - quantum.chsh_value(state)))
        e_opt = max(e_opt, abs(optomech.beta_optimal_from_R(R) - quantum.beta_max(state)))
    return [
        Check("optomech", "|Dec closed form - Dec of cavity state|", len(Rs), e_dec, "<=", 1e-12),
        Check("optomech", "|sqrt2 (1 + R) - chsh_value|", len(Rs), e_std, "<=", 1e-12),
        Check("optomech", "|2 sqrt(1 + R^2) - beta_max|", len(Rs), e_opt, "<=", 1e-12),
    ]


def run_all(cfg) -> list[Check]:
    tol, counts = cfg["tolerances"], cfg["certify"]
    rng = np.random.default_rng(cfg["seeds"]["certify"])
    checks = endpoint_checks()
    checks += sdp_checks(random_bell_probs(rng, counts["sdp_states"]), tol["certificate"])
    checks += oracle_checks(random_bell_probs(rng, counts["oracle_states"]), tol["oracle"],
                            cfg["seeds"]["certify"])
    checks += tightness_checks(counts["tightness_points"], tol["tightness_beta"], tol["tightness_dec"])
    checks += converse_checks(random_bell_probs(rng, counts["converse_states"]), tol["converse"])
    checks += lp_checks(tol["lp"])
    checks += classical_checks(rng)
    checks += optomech_checks()
    return checks
