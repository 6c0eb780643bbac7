import numpy as np
import pytest

from decobound.bellsim import (
    CHSH_SIGNS, BetaEstimate, TrialRecord, behaviour, chsh_from_behaviour, estimate, hoeffding_radius,
    outcome_distribution, sample, simulate, simulate_many,
)
from decobound.bound import dec_bound_quantum
from decobound.entropy import dec_quantum
from decobound.errors import DomainError
from decobound.quantum import (
    X, Z, ChshMeasurementSet, Observable, TwoQubitState, canonical_entangled_state,
    chsh_value, twirl, werner_state,
)

from conftest import random_density

STD = ChshMeasurementSet.standard()


def test_outcome_distribution_examples():
    assert np.allclose(outcome_distribution(TwoQubitState.maximally_mixed(), STD, 1, 0), 0.25)
    p = outcome_distribution(canonical_entangled_state(), STD, 0, 0)
    win = (2 + np.sqrt(2)) / 8
    assert np.allclose(p, [[win, 0.5 - win], [0.5 - win, win]], atol=1e-12)
    ket0 = np.diag([1.0, 0.0])
    zz = ChshMeasurementSet(Observable(X), Observable(Z), Observable(Z), Observable(Z))
    p = outcome_distribution(TwoQubitState.product(ket0, ket0), zz, 1, 0)
    assert np.allclose(p, [[1, 0], [0, 0]], atol=1e-12)


def test_behaviour_matches_chsh_value(rng):
    for _ in range(20):
        m = random_density(rng)
        p = behaviour(m)
        assert np.allclose(p.sum(axis=(2, 3)), 1, atol=1e-12)
        assert chsh_from_behaviour(p) == pytest.approx(chsh_value(m), abs=1e-10)


def test_radius_formula():
    assert hoeffding_radius(10**6) == pytest.approx(4 * np.sqrt(2 * np.log(200) * 4 / 1e6))
    assert hoeffding_radius(10**6) == pytest.approx(0.02604, abs=1e-5)
    with pytest.raises(DomainError):
        hoeffding_radius(0)


def test_trial_record_validation():
    with pytest.raises(DomainError):
        TrialRecord([0, 2], [0, 1], [0, 1], [0, 1])
    with pytest.raises(DomainError):
        TrialRecord([0], [0, 1], [0, 1], [0, 1])
    rec = TrialRecord([0, 1, 1], [1, 1, 0], [0, 0, 1], [1, 1, 1])
    c = rec.counts()
    assert c.sum() == 3 and c[1, 1, 0, 1] == 1 and c[0, 1, 0, 1] == 1


def test_single_round():
    for seed in range(10):
        est = simulate(canonical_entangled_state(), n=1, seed=seed)
        assert est.beta_hat in (-4.0, 4.0)
        assert est.confidence_radius > 4


def test_estimator_by_hand():
    # x=y=1 with a=b counts against; a single such round gives -4
    rec = TrialRecord([1], [1], [0], [0])
    assert estimate(rec).beta_hat == -4.0
    assert CHSH_SIGNS[1, 1] == -1


def test_deterministic():
    rho = canonical_entangled_state()
    a, ra = simulate(rho, n=5000, seed=7, return_records=True)
    b, rb = simulate(rho, n=5000, seed=7, return_records=True)
    assert a == b and np.array_equal(ra.a, rb.a) and np.array_equal(ra.x, rb.x)
    assert simulate(rho, n=5000, seed=8) != a
    assert simulate_many(rho, n=100, runs=3, seed=1) == simulate_many(rho, n=100, runs=3, seed=1)


def test_setting_marginals_uniform():
    n = 10**5
    _, rec = simulate(canonical_entangled_state(), n=n, seed=3, return_records=True)
    sigma = np.sqrt(n) / 2
    assert abs(rec.x.sum() - n / 2) <= 3 * sigma
    assert abs(rec.y.sum() - n / 2) <= 3 * sigma


def test_unbiased():
    rho = werner_state(0.9)
    exact = chsh_value(rho)
    beta = np.array([e.beta_hat for e in simulate_many(rho, n=10**4, runs=1000, seed=11)])
    se = beta.std(ddof=1) / np.sqrt(len(beta))
    assert abs(beta.mean() - exact) <= 3 * se


def test_sampling_frequencies(rng):
    rho = random_density(rng)
    rec = sample(rho, STD, 200_000, rng)
    freq = rec.counts() / len(rec)
    # each (x, y) cell is hit with probability 1/4
    assert np.allclose(freq, behaviour(rho) / 4, atol=0.005)


def test_pipeline_is_conservative():
    rho = werner_state(0.9)
    true_dec = dec_quantum(twirl(rho).p)
    for est in simulate_many(rho, n=10**5, runs=20, seed=5):
        if est.lower > 2 and est.covers(chsh_value(rho)):
            assert est.dec_bound() >= true_dec - 1e-12
    bounds = BetaEstimate(2.7, 10, 0.5)
    assert bounds.lower == pytest.approx(2.2)
    assert bounds.dec_bound() == pytest.approx(dec_bound_quantum(2.2))
    assert BetaEstimate(3.5, 10, 0.1).dec_bound_point() == pytest.approx(0.25)
