import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

from rqtgap.functionals import eval_J
from rqtgap.linalg import DenseOperator, X, Y, Z, random_real_pm1_observable
from rqtgap.network import conditional_state, ideal_network
from rqtgap.rqt import (
    assert_entrywise_real,
    construct_optimal_real_strategy,
    j_from_t,
    max_j_over_t,
    pauli_block_decompose,
    reality_constraints_check,
    reconstruct,
    seesaw_real,
    t_values,
)


def brute_force_vertex_max(n: int) -> Fraction:
    """Oracle: evaluate j on every vertex of the cube."""
    best = None
    for t in itertools.product((-1, 1), repeat=n):
        s = sum(t)
        val = Fraction(n - s * s, n * (n - 1))
        if best is None or val > best:
            best = val
    return best


def test_reality_report_flags_y():
    net = ideal_network(2).with_third([Y.copy(), Y.copy()])
    rep = assert_entrywise_real(net)
    assert not rep["all_real"]
    assert rep["observables"][0][2]["max_imag"] == pytest.approx(1.0)
    real_net = ideal_network(2).with_third([X.copy(), X.copy()])
    assert assert_entrywise_real(real_net)["all_real"]


def test_pauli_block_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(5):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = m + m.conj().T
        d = pauli_block_decompose(DenseOperator(m, (2, 2)))
        np.testing.assert_allclose(reconstruct(d), m, atol=1e-12)


def test_block_decomposition_of_y():
    d = pauli_block_decompose(DenseOperator(Y, (2,)))
    np.testing.assert_allclose(d.r3, np.array([[1.0]]), atol=1e-12)
    for r in (d.r0, d.r1, d.r2):
        np.testing.assert_allclose(r, np.array([[0.0]]), atol=1e-12)


def test_reality_constraints_check_y_fails_x_passes():
    dy = pauli_block_decompose(DenseOperator(Y, (2,)))
    assert not reality_constraints_check(dy)["passed"]
    dx = pauli_block_decompose(DenseOperator(X.astype(complex), (2,)))
    assert reality_constraints_check(dx)["passed"]
    # Against any real state, Tr(r_3 rho) vanishes for a real observable.
    assert reality_constraints_check(dx, rho=np.eye(1))["passed"]


def test_j_from_t_matches_definition():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        t = rng.uniform(-1, 1, size=n)
        direct = -sum(
            t[i] * t[j] for i in range(n) for j in range(n) if i != j
        ) / (n * (n - 1))
        assert j_from_t(t) == pytest.approx(direct, abs=1e-12)


@pytest.mark.parametrize("n", range(2, 11))
def test_max_j_over_t_exact(n):
    got = max_j_over_t(n)
    assert got.max_value == brute_force_vertex_max(n)
    if n % 2 == 0:
        assert got.max_value == Fraction(1, n - 1)
    else:
        assert got.max_value == Fraction(1, n)
    assert j_from_t(got.argmax) == pytest.approx(float(got.max_value), abs=1e-12)


def test_max_never_exceeds_bound_up_to_64():
    for n in range(2, 65):
        assert max_j_over_t(n).max_value <= Fraction(1, n - 1)


def test_interior_points_never_beat_vertex_max():
    rng = np.random.default_rng(11)
    for n in (3, 4, 5):
        cap = float(max_j_over_t(n).max_value)
        for _ in range(200):
            t = rng.uniform(-1, 1, size=n)
            assert j_from_t(t) <= cap + 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_optimal_real_strategy_attains_enumerated_value(n):
    net = construct_optimal_real_strategy(n)
    assert assert_entrywise_real(net)["all_real"]
    assert eval_J(net) == pytest.approx(float(max_j_over_t(n).max_value), abs=1e-10)


def test_t_values_of_known_strategies():
    net = construct_optimal_real_strategy(4)
    assert t_values(net) == pytest.approx([-1, -1, 1, 1], abs=1e-12)
    y_net = ideal_network(2).with_third([Y.copy(), Y.copy()])
    assert t_values(y_net) == pytest.approx([0.0, 0.0], abs=1e-12)


def test_seesaw_reaches_optimum_and_is_sound():
    for n in (2, 3):
        res = seesaw_real(ideal_network(n), restarts=10, seed=0)
        exact = float(max_j_over_t(n).max_value)
        assert res.best_J == pytest.approx(exact, abs=1e-8)
        assert res.best_J <= exact + 1e-7
        assert len(res.per_restart) == 10
        assert res.rng == "pcg64"


def test_seesaw_deterministic_and_traced(tmp_path):
    trace = tmp_path / "trace.jsonl"
    a = seesaw_real(ideal_network(2), restarts=3, seed=5, trace_path=str(trace))
    b = seesaw_real(ideal_network(2), restarts=3, seed=5)
    assert a.per_restart == b.per_restart
    lines = [json.loads(s) for s in trace.read_text().splitlines()]
    assert lines and all({"restart", "iter", "J"} <= set(rec) for rec in lines)


def test_seesaw_result_observables_are_real_pm1():
    res = seesaw_real(ideal_network(2), restarts=5, seed=1)
    for m in res.best_third:
        np.testing.assert_allclose(m.imag if np.iscomplexobj(m) else 0 * m, 0, atol=1e-12)
        np.testing.assert_allclose(m @ m, np.eye(m.shape[0]), atol=1e-8)
