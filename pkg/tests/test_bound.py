import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decobound.bound import (
    DEC_LIMIT, FeasibleRegionCurve, beta_fals, cz_objective, dec_bound_quantum, dec_of_optimal_state,
    f_of_v, golden_section_max, optimal_bell_state, optimal_cz, region_curve,
)
from decobound.entropy import dec_quantum
from decobound.errors import DomainError, NotFalsifiableError
from decobound.quantum import SQRT2, TSIRELSON, BellDiagonalState, beta_max


def f_grid(v, step=1e-6):
    """Brute force over c_z on a uniform grid (independent of golden section)."""
    hi = 1 - v / SQRT2
    c = np.arange(-1.0, hi, step)
    c = np.append(c, hi)
    q = v / SQRT2
    h = 2 * np.sqrt(1 + c) + np.sqrt(np.clip(1 - c + q, 0, None)) + np.sqrt(np.clip(1 - c - q, 0, None))
    return 3 - 2 * np.log2(h.max())


# frozen from f_grid
F_NEAR_TWO = -0.5595758710
F_2_5 = -0.1422666455


def test_frozen_oracle_values():
    assert f_grid(2 + 1e-9) == pytest.approx(F_NEAR_TWO, abs=1e-9)
    assert f_grid(2.5) == pytest.approx(F_2_5, abs=1e-9)


def test_f_examples():
    assert f_of_v(TSIRELSON) == pytest.approx(1.0, abs=1e-12)
    assert f_of_v(2 + 1e-9) == pytest.approx(F_NEAR_TWO, abs=1e-9)
    assert f_of_v(2.5) == pytest.approx(F_2_5, abs=1e-9)
    assert F_NEAR_TWO < f_of_v(2.5) < 1


def test_f_against_grid(rng):
    for v in rng.uniform(2, TSIRELSON, 10):
        assert f_of_v(v) == pytest.approx(f_grid(v), abs=1e-8)


def test_f_vectorised_matches_scalar():
    vs = np.linspace(2.01, TSIRELSON, 17)
    assert np.allclose(f_of_v(vs), [f_of_v(v) for v in vs], atol=1e-12, rtol=0)


def test_f_monotone():
    vs = np.arange(2.001, TSIRELSON, 1e-3)
    assert np.all(np.diff(f_of_v(vs)) >= -1e-9)


def test_objective_unimodal(rng):
    for v in rng.uniform(2, TSIRELSON, 20):
        c = np.arange(-1, 1 - v / SQRT2, 1e-4)
        h = cz_objective(v, c)
        k = int(np.argmax(h))
        # non-decreasing before the peak, non-increasing after
        assert np.all(np.diff(h[: k + 1]) >= -1e-12)
        assert np.all(np.diff(h[k:]) <= 1e-12)


def test_golden_section_boundary_max():
    x, val = golden_section_max(lambda t: -t, 0.0, 1.0)
    assert x == 0.0 and val == 0.0
    x, val = golden_section_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-9)


def test_domain_errors():
    with pytest.raises(DomainError):
        f_of_v(2.0)
    with pytest.raises(DomainError):
        f_of_v(3.0)
    with pytest.raises(DomainError):
        dec_bound_quantum(TSIRELSON + 1e-6)


def test_bound_examples():
    assert dec_bound_quantum(TSIRELSON) == pytest.approx(0.25, abs=1e-12)
    assert dec_bound_quantum(1.0) == 1.0
    assert dec_bound_quantum(2.0) == 1.0
    b = dec_bound_quantum(2.8)
    assert b == pytest.approx(2 ** -f_grid(2.8) / 2, abs=1e-8)
    assert 0.25 < b < DEC_LIMIT
    assert DEC_LIMIT == pytest.approx(2 ** -F_NEAR_TWO / 2, abs=1e-8)


def test_beta_fals_examples():
    assert beta_fals(0.25) == TSIRELSON
    assert beta_fals(dec_bound_quantum(2.5)) == pytest.approx(2.5, abs=1e-9)
    # independent inversion by scanning a fine curve
    vs = np.linspace(2 + 1e-9, TSIRELSON, 200001)
    bounds = 2.0 ** -np.array(f_of_v(vs)) / 2
    k = np.argmax(bounds <= 0.5)
    assert vs[k - 1] <= beta_fals(0.5) <= vs[k]
    with pytest.raises(NotFalsifiableError):
        beta_fals(0.8)
    with pytest.raises(DomainError):
        beta_fals(0.2)


@settings(max_examples=25, deadline=None)
@given(st.floats(2.0001, TSIRELSON))
def test_round_trip(beta):
    d = dec_bound_quantum(beta)
    assert dec_bound_quantum(beta_fals(d)) == pytest.approx(d, abs=1e-8)
    assert beta_fals(d) == pytest.approx(beta, abs=1e-6)


def test_region_curve():
    c = region_curve(2)
    assert c.beta[-1] == TSIRELSON and c.dec_bound[-1] == pytest.approx(0.25)
    assert c.dec_bound[0] == pytest.approx(DEC_LIMIT, abs=1e-6)
    c = region_curve(100)
    assert np.all(np.diff(c.beta) > 0) and np.all(np.diff(c.dec_bound) < 0)
    with pytest.raises(ValueError):
        FeasibleRegionCurve(np.array([2.5, 2.4]), np.array([0.5, 0.6]))


def test_tightness_direct_part():
    for beta in np.linspace(2.01, TSIRELSON, 20):
        s = optimal_bell_state(beta)
        assert beta_max(s) == pytest.approx(beta, abs=1e-9)
        assert dec_quantum(s.p) == pytest.approx(dec_bound_quantum(beta), abs=1e-7)
        assert dec_of_optimal_state(beta) == pytest.approx(dec_bound_quantum(beta), abs=1e-7)


def test_region_curve_dominates_constructed_states():
    c = region_curve(100)
    for beta, bound in zip(c.beta, c.dec_bound):
        cz, _ = optimal_cz(beta)
        # off-optimal c_z still has beta_max = beta, but less decoherence
        for shift in (0.0, 0.05, 0.2):
            z = max(-1.0, float(cz) - shift)
            s = BellDiagonalState.from_correlations(beta / (2 * SQRT2), beta / (2 * SQRT2), z)
            assert dec_quantum(s.p) <= bound + 1e-9


def test_converse(rng):
    for _ in range(200):
        p = rng.dirichlet(np.full(4, 0.5))
        b = min(beta_max(BellDiagonalState(p)), TSIRELSON)
        assert dec_quantum(p) <= dec_bound_quantum(b) + 1e-9
