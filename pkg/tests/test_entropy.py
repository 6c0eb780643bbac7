import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decobound.entropy import (
    dec_quantum, fidelity, hmax_bell_diagonal, hmax_numeric_oracle, hmin_dual, sdp_certificates_check,
)
from decobound.errors import ConvergenceError, InvalidStateError
from decobound.quantum import BellDiagonalState, TwoQubitState

probs = st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3).map(
    lambda v: np.array(v) / sum(v)
)

PURE = [1, 0, 0, 0]
UNIFORM = [0.25] * 4
HALF = [0.5, 0.5, 0, 0]


@pytest.mark.parametrize("p, hmax", [(PURE, -1.0), (UNIFORM, 1.0), (HALF, 0.0)])
def test_closed_form_examples(p, hmax):
    assert hmax_bell_diagonal(p) == pytest.approx(hmax, abs=1e-15)
    assert hmin_dual(p) == pytest.approx(-hmax, abs=1e-15)


def test_dec_examples():
    assert dec_quantum(PURE) == pytest.approx(0.25)
    assert dec_quantum(UNIFORM) == pytest.approx(1.0)
    for R in (0.0, 0.5, 1.0):
        p = [(1 + R) / 2, (1 - R) / 2, 0, 0]
        assert dec_quantum(p) == pytest.approx(0.25 * (1 + np.sqrt(1 - R**2)), abs=1e-15)


def test_general_d():
    # d = 3: uniform over 9 outcomes gives -log 3 + 2 log 3 = log 3
    assert hmax_bell_diagonal(np.full(9, 1 / 9), d=3) == pytest.approx(np.log2(3))
    with pytest.raises(ValueError):
        hmax_bell_diagonal(UNIFORM, d=3)


def test_rejects_bad_probabilities():
    with pytest.raises(InvalidStateError):
        dec_quantum([0.5, 0.6, 0, 0])
    with pytest.raises(InvalidStateError):
        dec_quantum([1.2, -0.2, 0, 0])


@settings(max_examples=200, deadline=None)
@given(probs)
def test_duality_and_range(p):
    assert hmax_bell_diagonal(p) + hmin_dual(p) == 0.0
    d = dec_quantum(p)
    assert 0.25 - 1e-12 <= d <= 1 + 1e-12
    assert d == pytest.approx(2 ** hmax_bell_diagonal(p) / 2, rel=1e-12)


def test_schur_concave(rng):
    # T-transforms (Robin Hood moves) produce majorised vectors
    for _ in range(100):
        p = rng.dirichlet(np.ones(4))
        i, j = rng.choice(4, size=2, replace=False)
        t = rng.uniform(0, 1)
        q = p.copy()
        q[i], q[j] = t * p[i] + (1 - t) * p[j], (1 - t) * p[i] + t * p[j]
        assert dec_quantum(q) >= dec_quantum(p) - 1e-14


def test_fidelity_basics():
    rho = np.eye(4) / 4
    assert fidelity(rho, rho) == pytest.approx(1.0)
    a = np.diag([1.0, 0, 0, 0])
    b = np.diag([0, 1.0, 0, 0])
    assert fidelity(a, b) == pytest.approx(0.0, abs=1e-12)


def test_oracle_examples():
    assert hmax_numeric_oracle(BellDiagonalState(HALF)) == pytest.approx(0.0, abs=1e-6)
    assert hmax_numeric_oracle(TwoQubitState.maximally_mixed()) == pytest.approx(1.0, abs=1e-6)


def test_oracle_matches_closed_form(rng):
    for _ in range(8):
        p = rng.dirichlet(np.full(4, 0.6))
        assert abs(hmax_numeric_oracle(BellDiagonalState(p)) - hmax_bell_diagonal(p)) <= 1e-6


def test_oracle_reports_disagreement():
    # a single start cannot disagree with itself; a hopeless tolerance with two can
    p = np.array([0.4, 0.3, 0.2, 0.1])
    out = hmax_numeric_oracle(BellDiagonalState(p), n_starts=1, full_output=True)
    assert len(out.start_values) == 1
    with pytest.raises(ConvergenceError):
        hmax_numeric_oracle(BellDiagonalState(p), n_starts=3, agreement=-1.0)


@pytest.mark.parametrize(
    "p, value",
    [
        (PURE, 0.5),
        (UNIFORM, 2.0),
        ([0.7, 0.1, 0.1, 0.1], 0.5 * (np.sqrt(0.7) + 3 * np.sqrt(0.1)) ** 2),
    ],
)
def test_certificate_examples(p, value):
    rep = sdp_certificates_check(p)
    assert rep.passed, rep.failures()
    assert rep.primal_value == pytest.approx(value, abs=1e-10)
    assert rep.dual_value == pytest.approx(value, abs=1e-10)


def test_certificates_random_with_faces(rng):
    for k in range(100):
        p = rng.dirichlet(np.ones(4))
        if k % 3 == 0:
            p[rng.integers(4)] = 0.0
            p /= p.sum()
        rep = sdp_certificates_check(p)
        assert rep.passed, rep.failures()
        assert abs(rep.primal_value - rep.dual_value) <= 1e-10


def test_certificate_reports_violation():
    # an impossible tolerance turns rounding residuals into reported failures
    rep = sdp_certificates_check([0.4, 0.3, 0.2, 0.1], tol=-1.0)
    assert not rep.passed
    assert all(c.name and c.residual >= 0 for c in rep.failures())
