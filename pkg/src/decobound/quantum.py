"""Two-qubit states, the Bell basis, twirling, noise channels and CHSH values.

Conventions
-----------
Computational basis ordering is ``|00>, |01>, |10>, |11>`` with Alice first.
The Bell basis is

    Phi_1,2 = (|00> +- |11>)/sqrt(2),   Phi_3,4 = (|01> +- |10>)/sqrt(2),

so a Bell-diagonal state ``sum_j p_j |Phi_j><Phi_j|`` has correlation tensor
``diag(c_x, c_y, c_z)`` with

    c_x =  p1 - p2 + p3 - p4
    c_y = -p1 + p2 + p3 - p4
    c_z =  p1 + p2 - p3 - p4.

The standard CHSH measurements ``A0 = X, A1 = Z, B0 = (X - Z)/sqrt(2),
B1 = (X + Z)/sqrt(2)`` evaluate to ``sqrt(2) (T_xx - T_zz)``.  They reach
``2 sqrt(2)`` on ``Phi_3`` (correlation tensor ``diag(1, 1, -1)``), which is
therefore used as the canonical maximally entangled test state.  On ``Phi_1``
the same measurements give 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidStateError

SQRT2 = np.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (X, Y, Z)
_AXES = {"x": X, "y": Y, "z": Z}

# columns are |Phi_1> .. |Phi_4>
BELL_BASIS = np.array(
    [
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [0, 0, 1, -1],
        [1, -1, 0, 0],
    ],
    dtype=complex,
) / SQRT2

# rows map (p1..p4) to (c_x, c_y, c_z); the full 4x4 matrix adds normalisation
_P_TO_C = np.array(
    [
        [1, -1, 1, -1],
        [-1, 1, 1, -1],
        [1, 1, -1, -1],
    ],
    dtype=float,
)

ALGEBRAIC_TOL = 1e-12
INPUT_TOL = 1e-9
PSD_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TwoQubitState:
    """A 4x4 density matrix on two qubits."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise InvalidStateError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("matrix has non-finite entries")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > INPUT_TOL:
            raise InvalidStateError(f"matrix is not Hermitian (max deviation {herm:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > INPUT_TOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        m = (m + m.conj().T) / 2
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -PSD_TOL:
            raise InvalidStateError(f"matrix has negative eigenvalue {lo:.3g}")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def maximally_mixed(cls) -> TwoQubitState:
        return cls(np.eye(4) / 4)

    @classmethod
    def from_ket(cls, psi) -> TwoQubitState:
        psi = np.asarray(psi, dtype=complex).reshape(4)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def product(cls, rho_a, rho_b) -> TwoQubitState:
        return cls(np.kron(np.asarray(rho_a), np.asarray(rho_b)))

    def partial_trace(self, keep: str) -> np.ndarray:
        """Reduced 2x2 state of ``'A'`` or ``'B'``."""
        t = self.matrix.reshape(2, 2, 2, 2)
        if keep == "A":
            return np.einsum("ijkj->ik", t)
        if keep == "B":
            return np.einsum("ijil->jl", t)
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")

    def is_bell_diagonal(self, tol: float = 1e-10) -> bool:
        m = BELL_BASIS.conj().T @ self.matrix @ BELL_BASIS
        return bool(np.max(np.abs(m - np.diag(np.diag(m)))) <= tol)


def canonical_entangled_state() -> TwoQubitState:
    """``Phi_3 = (|01> + |10>)/sqrt(2)``; the standard measurements give ``2 sqrt(2)``."""
    return TwoQubitState.from_ket(BELL_BASIS[:, 2])


def werner_state(w: float, index: int = 2) -> TwoQubitState:
    """``w |Phi><Phi| + (1 - w) 1/4`` built on Bell vector ``index`` (0-based)."""
    phi = BELL_BASIS[:, index]
    return TwoQubitState(w * np.outer(phi, phi.conj()) + (1 - w) * np.eye(4) / 4)


@dataclass(frozen=True)
class PauliForm:
    """Local Bloch vectors ``a``, ``b`` and correlation tensor ``T`` of a two-qubit state."""

    a: np.ndarray
    b: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(np.asarray(self.a, dtype=float).reshape(3)))
        object.__setattr__(self, "b", _frozen(np.asarray(self.b, dtype=float).reshape(3)))
        object.__setattr__(self, "T", _frozen(np.asarray(self.T, dtype=float).reshape(3, 3)))

    def to_matrix(self) -> np.ndarray:
        m = np.kron(I2, I2).astype(complex)
        for j, s in enumerate(PAULIS):
            m += self.a[j] * np.kron(s, I2) + self.b[j] * np.kron(I2, s)
            for k, t in enumerate(PAULIS):
                m += self.T[j, k] * np.kron(s, t)
        return m / 4

    def to_state(self) -> TwoQubitState:
        return TwoQubitState(self.to_matrix())


@dataclass(frozen=True)
class BellDiagonalState:
    """Probabilities ``(p1, p2, p3, p4)`` over ``Phi_1 .. Phi_4``."""

    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _frozen(validate_probabilities(self.p, size=4)))

    @classmethod
    def from_correlations(cls, cx: float, cy: float, cz: float) -> BellDiagonalState:
        p = np.array(
            [
                1 + cx - cy + cz,
                1 - cx + cy + cz,
                1 + cx + cy - cz,
                1 - cx - cy - cz,
            ]
        ) / 4
        # roots of the correlation polytope can land a hair below zero
        p[(p < 0) & (p > -ALGEBRAIC_TOL)] = 0.0
        return cls(p)

    @property
    def correlations(self) -> np.ndarray:
        """``(c_x, c_y, c_z)``."""
        return _P_TO_C @ self.p

    def to_matrix(self) -> np.ndarray:
        return (BELL_BASIS * self.p) @ BELL_BASIS.conj().T

    def to_state(self) -> TwoQubitState:
        return TwoQubitState(self.to_matrix())


def validate_probabilities(p, size: int | None = None, tol: float = INPUT_TOL) -> np.ndarray:
    """Return ``p`` as a float array after checking it is a probability vector."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if size is not None and p.size != size:
        raise InvalidStateError(f"expected {size} probabilities, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise InvalidStateError("probabilities must be finite")
    if np.any(p < -tol):
        raise InvalidStateError(f"negative probability {p.min():.3g}")
    if abs(p.sum() - 1.0) > tol:
        raise InvalidStateError(f"probabilities sum to {p.sum()!r}")
    return np.clip(p, 0.0, None)


@dataclass(frozen=True)
class Observable:
    """A binary (+-1 valued) qubit observable."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidStateError(f"expected a 2x2 observable, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > INPUT_TOL:
            raise InvalidStateError("observable is not Hermitian")
        if np.max(np.abs(m @ m - I2)) > INPUT_TOL:
            raise InvalidStateError("observable does not square to the identity")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def along(cls, n) -> Observable:
        """``n . sigma`` for a unit 3-vector ``n``."""
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(sum(c * s for c, s in zip(n, PAULIS)))

    def projector(self, outcome: int) -> np.ndarray:
        """Projector for outcome 0 (eigenvalue +1) or 1 (eigenvalue -1)."""
        sign = 1 - 2 * outcome
        return (I2 + sign * self.matrix) / 2


@dataclass(frozen=True)
class ChshMeasurementSet:
    a0: Observable
    a1: Observable
    b0: Observable
    b1: Observable

    @classmethod
    def standard(cls) -> ChshMeasurementSet:
        """``A0 = X, A1 = Z, B0 = (X - Z)/sqrt(2), B1 = (X + Z)/sqrt(2)``."""
        return cls(
            Observable(X),
            Observable(Z),
            Observable((X - Z) / SQRT2),
            Observable((X + Z) / SQRT2),
        )

    def alice(self, x: int) -> Observable:
        return (self.a0, self.a1)[x]

    def bob(self, y: int) -> Observable:
        return (self.b0, self.b1)[y]

    def operator(self) -> np.ndarray:
        """The 4x4 CHSH operator ``A0B0 + A0B1 + A1B0 - A1B1``."""
        a0, a1 = self.a0.matrix, self.a1.matrix
        b0, b1 = self.b0.matrix, self.b1.matrix
        return np.kron(a0, b0 + b1) + np.kron(a1, b0 - b1)


def _matrix(rho) -> np.ndarray:
    if isinstance(rho, TwoQubitState):
        return rho.matrix
    if isinstance(rho, BellDiagonalState):
        return rho.to_matrix()
    return TwoQubitState(rho).matrix


def pauli_decompose(rho) -> PauliForm:
    m = _matrix(rho)
    a = [np.trace(m @ np.kron(s, I2)).real for s in PAULIS]
    b = [np.trace(m @ np.kron(I2, s)).real for s in PAULIS]
    T = [[np.trace(m @ np.kron(s, t)).real for t in PAULIS] for s in PAULIS]
    return PauliForm(a, b, T)


def bell_probabilities(rho) -> np.ndarray:
    """Diagonal of ``rho`` in the Bell basis."""
    m = _matrix(rho)
    return np.einsum("ij,ik,kj->j", BELL_BASIS.conj(), m, BELL_BASIS).real


_TWIRL_UNITARIES = (I2, X, Y, Z)


def twirl_matrix(rho) -> np.ndarray:
    m = _matrix(rho)
    out = np.zeros((4, 4), dtype=complex)
    for u in _TWIRL_UNITARIES:
        uu = np.kron(u, u)
        out += uu @ m @ uu.conj().T
    return out / 4


def twirl(rho) -> BellDiagonalState:
    """Average over ``U x U`` for ``U in {1, X, Y, Z}``; the result is Bell-diagonal."""
    p = bell_probabilities(twirl_matrix(rho))
    p[(p < 0) & (p > -ALGEBRAIC_TOL)] = 0.0
    return BellDiagonalState(p)


def chsh_value(rho, m: ChshMeasurementSet | None = None) -> float:
    if m is None:
        m = ChshMeasurementSet.standard()
    return float(np.trace(m.operator() @ _matrix(rho)).real)


def beta_max(rho) -> float:
    """Maximal CHSH value over all measurements, from the two largest singular values of T."""
    T = pauli_decompose(rho).T
    s = np.linalg.svd(T, compute_uv=False)
    m = s[0] ** 2 + s[1] ** 2
    return 2.0 if m <= 1.0 else float(2.0 * np.sqrt(m))


def _check_unit(name: str, value: float) -> float:
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)


def depolarizing(rho, q: float) -> TwoQubitState:
    """Replace Bob's qubit by white noise with probability ``q``."""
    q = _check_unit("q", q)
    state = rho if isinstance(rho, TwoQubitState) else TwoQubitState(_matrix(rho))
    noisy = np.kron(state.partial_trace("A"), I2 / 2)
    return TwoQubitState((1 - q) * state.matrix + q * noisy)


def dephasing(rho, p: float, axis: str = "z") -> TwoQubitState:
    """``p rho + (1 - p) S rho S`` with ``S`` the Pauli along ``axis`` on Bob's qubit."""
    p = _check_unit("p", p)
    try:
        s = np.kron(I2, _AXES[axis])
    except KeyError:
        raise DomainError(f"axis must be one of 'x', 'y', 'z', got {axis!r}") from None
    m = _matrix(rho)
    return TwoQubitState(p * m + (1 - p) * s @ m @ s)
