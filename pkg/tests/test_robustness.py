import math

import numpy as np
import pytest

from rqtgap.functionals import eval_I
from rqtgap.linalg import random_pm1_observable
from rqtgap.network import eve_outcome_probability, ideal_network
from rqtgap.robustness import (
    NOISE_MODELS,
    apply_noise,
    beta_rqt_upper,
    delta_n,
    epsilon_threshold,
    f_n,
    perturbation_experiment,
    residual_norms,
    robust_bounds,
    verify_sos_identity_A,
    verify_sos_identity_B,
)

SQRT2 = math.sqrt(2.0)


def random_pairs(n, dims, rng):
    return [
        [random_pm1_observable(dims, int(rng.integers(0, 2**63))).mat for _ in range(2)]
        for _ in range(n)
    ]


def test_sos_identity_A_on_ideal():
    for n in (2, 3):
        net = ideal_network(n)
        pairs = [(t[0], t[1]) for t in net.observables]
        for l in range(1 << n):
            assert verify_sos_identity_A(n, l, pairs) <= 1e-12


def test_sos_identity_A_randomized():
    rng = np.random.default_rng(2024)
    for n in (2, 3, 4):
        for dims in (2, 4):
            for _ in range(3):
                obs = random_pairs(n, dims, rng)
                assert verify_sos_identity_A(n, 0, obs) <= 1e-9


def test_sos_identity_B_residual_vanishes():
    # Measured as a residual; it lands at machine precision on every tested
    # input, which is what lets the acceptance battery assert it.
    rng = np.random.default_rng(99)
    for n in (2, 3, 4):
        for dims in (2, 4):
            obs = random_pairs(n, dims, rng)
            assert verify_sos_identity_B(n, 0, obs) <= 1e-9
    net = ideal_network(3)
    pairs = [(t[0], t[1]) for t in net.observables]
    assert verify_sos_identity_B(3, 5, pairs) <= 1e-12


def test_sos_rejects_non_observables():
    from rqtgap.errors import ValidationError

    bad = [[np.eye(2) * 2, np.eye(2)] for _ in range(2)]
    with pytest.raises(ValidationError):
        verify_sos_identity_A(2, 0, bad)


def test_residual_norms_vanish_on_ideal():
    for n in (2, 3):
        rec = residual_norms(ideal_network(n), 0)
        assert rec["epsilon_attained"] == pytest.approx(0.0, abs=1e-9)
        for term in rec["terms"].values():
            assert term["norm"] <= 1e-6
            assert term["ok"]


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("model", NOISE_MODELS)
def test_residual_norm_bounds_hold_under_noise(n, model):
    strengths = np.linspace(0.005, 0.05, 10)
    for s in strengths:
        net = apply_noise(ideal_network(n), model, float(s))
        for l in (0, (1 << n) - 1):
            rec = residual_norms(net, l)
            assert rec["epsilon_attained"] >= -1e-10
            violations = [k for k, t in rec["terms"].items() if not t["ok"]]
            assert violations == []


def test_depolarized_value_matches_closed_form():
    # n=3, l=0: the three-source word scales by (1-p)^3 and the two
    # two-source words by (1-p)^2, so I = 2(1-p)^3 + 2(1-p)^2.
    for p in (0.01, 0.05):
        net = apply_noise(ideal_network(3), "depolarize_sources", p)
        expect = 2 * (1 - p) ** 3 + 2 * (1 - p) ** 2
        assert eval_I(net, 0) == pytest.approx(expect, abs=1e-10)
    net = apply_noise(ideal_network(3), "depolarize_sources", 0.05)
    assert eval_I(net, 0) == pytest.approx(3.51975, abs=1e-10)


def test_mix_povm_probability_deviation():
    net = apply_noise(ideal_network(3), "mix_povm", 0.01)
    for l in range(8):
        assert abs(eve_outcome_probability(net, l) - 0.125) <= 0.01 / 8 + 1e-12


def test_unknown_model_rejected():
    with pytest.raises(ValueError):
        apply_noise(ideal_network(2), "gamma_rays", 0.1)


def test_delta_n_value():
    assert delta_n(2) == pytest.approx(16 + 4 * (SQRT2 + 2), abs=1e-12)
    assert delta_n(2) == pytest.approx(29.65685424949238, abs=1e-11)


def test_beta_rqt_upper_at_zero_and_monotone():
    for n in range(2, 31):
        assert beta_rqt_upper(n, 0.0) == 1.0 / (n - 1)
    grid = np.linspace(0, 1e-3, 50)
    vals = [beta_rqt_upper(3, float(e)) for e in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_epsilon_threshold_roundtrip():
    for n in range(3, 11):
        eps = epsilon_threshold(n, 1.0)
        assert eps > 0
        assert beta_rqt_upper(n, eps) == pytest.approx(1.0, abs=1e-10)
        assert beta_rqt_upper(n, eps * 1.01) > 1.0


def test_epsilon_threshold_rejects_unreachable_target():
    with pytest.raises(ValueError):
        epsilon_threshold(3, 0.5)
    with pytest.raises(ValueError):
        epsilon_threshold(2, 1.0)


def test_threshold_shrinks_with_n():
    values = [epsilon_threshold(n, 1.0) for n in range(3, 10)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_robust_bounds_record():
    rb = robust_bounds(3, 1e-6)
    assert rb.n == 3
    assert rb.beta_rqt_upper == pytest.approx(beta_rqt_upper(3, 1e-6))
    assert rb.f_n == pytest.approx(f_n(3))


def test_perturbation_experiment_noiseless_and_noisy():
    clean = perturbation_experiment(2, "depolarize_sources", 0.0, seed=1, restarts=3)
    assert clean["eps_max"] == pytest.approx(0.0, abs=1e-9)
    assert clean["pbar_max_deviation"] <= 1e-12
    assert clean["bound_holds"]
    noisy = perturbation_experiment(3, "depolarize_sources", 0.01, seed=5, restarts=3)
    assert noisy["eps_max"] > 0
    assert noisy["best_J"] <= noisy["beta_rqt_upper"] + 1e-9
    assert noisy["seed"] == 5 and noisy["model"] == "depolarize_sources"
    assert noisy["rng"] == "pcg64"
