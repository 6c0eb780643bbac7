"""Conditional max/min entropies and Dec(A|E) of Bell-diagonal two-qubit states.

All logarithms are base 2.  Besides the closed forms, the module ships two
independent checks of them: explicit primal and dual feasible points of the
max-entropy semidefinite program, and a direct numerical maximisation of the
fidelity over Bob's Bloch ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceError
from .quantum import BELL_BASIS, _matrix, validate_probabilities

QUBIT_DIM = 2


def hmax_bell_diagonal(p, d: int = QUBIT_DIM) -> float:
    """``H_max(A|B) = -log d + 2 log(sum_j sqrt(p_j))``."""
    p = validate_probabilities(p)
    if d < 2 or p.size != d * d:
        raise ValueError(f"need d >= 2 and d**2 probabilities, got d={d}, {p.size} entries")
    return float(-np.log2(d) + 2.0 * np.log2(np.sqrt(p).sum()))


def hmin_dual(p) -> float:
    """``H_min(A|E)`` of any purification of the Bell-diagonal state ``p``."""
    return -hmax_bell_diagonal(p, QUBIT_DIM)


def dec_quantum(p) -> float:
    """Dec(A|E) = 2**(-H_min)/d_A for a purified Bell-diagonal state; lies in [1/4, 1]."""
    p = validate_probabilities(p, size=4)
    return float(np.sqrt(p).sum() ** 2 / 4.0)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    # eigenvalues in [-1e-10, 0) are rounding noise
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Root fidelity ``|| sqrt(rho) sqrt(sigma) ||_1``."""
    s = _psd_sqrt(rho)
    inner = s @ sigma @ s
    w = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0.0, None)
    return float(np.sqrt(w).sum())


def _bloch_to_state(u: np.ndarray) -> np.ndarray:
    # smooth map of R^3 onto the open Bloch ball
    r = np.linalg.norm(u)
    vec = u * (np.tanh(r) / r) if r > 0 else u
    x, y, z = vec
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])


@dataclass
class OracleResult:
    value: float
    sigma_b: np.ndarray
    start_values: list[float] = field(default_factory=list)


def hmax_numeric_oracle(
    rho,
    n_starts: int = 20,
    seed: int = 0,
    agreement: float = 1e-6,
    full_output: bool = False,
):
    """``max_{sigma_B} log(d_A F^2(rho_AB, pi_A x sigma_B))`` by multi-start local search.

    The fidelity is concave in ``sigma_B``, so every start should land on the
    same value; ConvergenceError is raised when the two best starts differ
    by more than ``agreement``.
    """
    m = _matrix(rho)
    s = _psd_sqrt(m)
    sigma = np.zeros((4, 4), dtype=complex)

    def neg(u):
        # pi_A x sigma_B is block diagonal
        sigma[:2, :2] = sigma[2:, 2:] = _bloch_to_state(u) / 2
        inner = s @ sigma @ s
        w = np.linalg.eigvalsh(inner)
        return -np.sqrt(np.clip(w, 0.0, None)).sum()

    rng = np.random.default_rng(seed)
    values = []
    best_u = None
    best = np.inf
    for k in range(n_starts):
        u0 = np.zeros(3) if k == 0 else rng.normal(scale=1.0, size=3)
        res = minimize(
            neg, u0, method="Nelder-Mead",
            options={"xatol": 1e-7, "fatol": 1e-13, "maxiter": 2000, "maxfev": 4000},
        )
        values.append(-res.fun)
        if res.fun < best:
            best, best_u = res.fun, res.x
    top = sorted(values, reverse=True)
    # compare in log space, which is what the caller consumes
    logs = [np.log2(QUBIT_DIM * v * v) for v in top[:2]]
    if len(logs) == 2 and abs(logs[0] - logs[1]) > agreement:
        raise ConvergenceError(
            f"best two starts disagree: {logs[0]:.12f} vs {logs[1]:.12f}"
        )
    value = float(logs[0])
    if full_output:
        return OracleResult(value, _bloch_to_state(best_u), [float(np.log2(2 * v * v)) for v in values])
    return value


@dataclass
class CertificateCheck:
    name: str
    residual: float
    passed: bool


@dataclass
class CertificateReport:
    """Outcome of the primal/dual witness verification for one probability vector."""

    p: np.ndarray
    primal_value: float
    dual_value: float
    expected_value: float
    checks: list[CertificateCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CertificateCheck]:
        return [c for c in self.checks if not c.passed]


def _trace_out(m: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    n = len(dims)
    t = m.reshape(dims + dims)
    letters = "abcdefghijklmnop"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    res = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    k = int(np.prod([dims[i] for i in keep]))
    return res.reshape(k, k)


def sdp_certificates_check(p, tol: float = 1e-10) -> CertificateReport:
    """Verify the explicit primal and dual solutions of the max-entropy SDP.

    The purification is ``|psi> = sum_j sqrt(p_j) |Phi_j>|j>`` on ``A x B x C``
    with ``dim C = 4``.  Checked constraints:

    * primal: ``Z >= 0``, ``mu >= 0``, ``mu 1_B >= Tr_A Z``, ``Z x 1_C >= rho_ABC``
      (both through the support/inverse criterion and an eigenvalue test);
    * dual: ``Y >= 0``, ``Tr_C Y <= 1_A x sigma_B``, ``Tr sigma_B <= 1``;
    * equal objective values, both ``(1/2)(sum_j sqrt p_j)^2``.
    """
    p = validate_probabilities(p, size=4)
    d = QUBIT_DIM
    sq = np.sqrt(p)
    total = sq.sum()
    expected = total**2 / d
    checks: list[CertificateCheck] = []

    def check(name, residual):
        checks.append(CertificateCheck(name, float(residual), bool(residual <= tol)))

    proj = [np.outer(BELL_BASIS[:, k], BELL_BASIS[:, k].conj()) for k in range(4)]
    eye_c = np.eye(4)
    psi = sum(sq[j] * np.kron(BELL_BASIS[:, j], eye_c[j]) for j in range(4))
    rho_abc = np.outer(psi, psi.conj())

    # primal witness
    Z = total * sum(sq[k] * proj[k] for k in range(4))
    mu = expected
    check("primal: Z_AB >= 0", max(0.0, -np.linalg.eigvalsh(Z)[0]))
    check("primal: mu >= 0", max(0.0, -mu))
    tr_a_z = _trace_out(Z, (2, 2), keep=(1,))
    check("primal: mu 1_B - Tr_A Z >= 0", max(0.0, -np.linalg.eigvalsh(mu * np.eye(2) - tr_a_z)[0]))

    Zc = np.kron(Z, eye_c)
    support = [k for k in range(4) if p[k] > 0]
    Pi = np.kron(sum(proj[k] for k in support), eye_c)
    check("primal: Pi |psi> = |psi>", np.linalg.norm(Pi @ psi - psi))
    Z_inv = sum(proj[k] / sq[k] for k in support) / total
    quad = np.vdot(psi, np.kron(Z_inv, eye_c) @ psi).real
    check("primal: <psi|Z^-1|psi> <= 1", max(0.0, quad - 1.0))
    gap = Zc - rho_abc
    check("primal: Z x 1_C - rho_ABC >= 0 (eigenvalues)", max(0.0, -np.linalg.eigvalsh((gap + gap.conj().T) / 2)[0]))

    # dual witness
    omega = sum(np.kron(BELL_BASIS[:, j], eye_c[j]) for j in range(4))
    Y = np.outer(omega, omega.conj()) / d
    sigma_b = np.eye(2) / d
    check("dual: Y_ABC >= 0", max(0.0, -np.linalg.eigvalsh(Y)[0]))
    tr_c_y = _trace_out(Y, (2, 2, 4), keep=(0, 1))
    slack = np.kron(np.eye(2), sigma_b) - tr_c_y
    check("dual: 1_A x sigma_B - Tr_C Y >= 0", max(0.0, -np.linalg.eigvalsh(slack)[0]))
    check("dual: Tr sigma_B <= 1", max(0.0, np.trace(sigma_b).real - 1.0))
    check("dual: sigma_B >= 0", max(0.0, -np.linalg.eigvalsh(sigma_b)[0]))

    primal = float(mu)
    dual = float(np.trace(rho_abc @ Y).real)
    check("primal value = expected", abs(primal - expected))
    check("dual value = expected", abs(dual - expected))
    check("primal value = dual value", abs(primal - dual))
    return CertificateReport(p, primal, dual, float(expected), checks)
