import math

import numpy as np
import pytest

from rqtgap.errors import ValidationError
from rqtgap.linalg import X, Y, Z, fidelity_with_pure
from rqtgap.network import (
    TILDE_0,
    TILDE_1,
    StarNetwork,
    conditional_expectation,
    conditional_state,
    correlation_table,
    eve_outcome_probability,
    expectation,
    ghz_state,
    ideal_network,
    load_strategy,
    network_from_json,
    network_to_json,
    save_strategy,
)

SQRT2 = math.sqrt(2.0)


def test_ghz_state_components():
    # |phi_0> = (|00> + |11>)/sqrt2; l_1 = 1 flips the relative sign.
    np.testing.assert_allclose(ghz_state(2, 0).vec, np.array([1, 0, 0, 1]) / SQRT2)
    np.testing.assert_allclose(ghz_state(2, 0b10).vec, np.array([0, -1, 1, 0]) / SQRT2)
    v = ghz_state(3, 0b011).vec
    np.testing.assert_allclose(v[0b011], 1 / SQRT2)
    np.testing.assert_allclose(v[0b100], 1 / SQRT2)
    assert np.count_nonzero(v) == 2


def test_ideal_network_structure():
    net = ideal_network(3)
    assert net.n == 3
    assert net.party_dims == (2, 2, 2)
    assert net.eve_dim == 8
    np.testing.assert_allclose(net.observables[0][0], (X + Z) / SQRT2)
    np.testing.assert_allclose(net.observables[0][1], (X - Z) / SQRT2)
    np.testing.assert_allclose(net.observables[1][0], Z)
    np.testing.assert_allclose(net.observables[1][1], X)
    assert net.observables[1][2] is None


def test_tilde_observables_of_party_one():
    net = ideal_network(2)
    np.testing.assert_allclose(net.observable(1, TILDE_0), Z, atol=1e-12)
    np.testing.assert_allclose(net.observable(1, TILDE_1), X, atol=1e-12)
    with pytest.raises(ValueError):
        net.observable(2, TILDE_0)


def test_povm_completeness_enforced():
    net = ideal_network(2)
    bad_povm = tuple(0.5 * r for r in net.eve_povm)
    with pytest.raises(ValidationError):
        StarNetwork(net.n, net.sources, net.observables, bad_povm)


def test_non_pm1_observable_rejected():
    net = ideal_network(2)
    obs = list(net.observables)
    obs[1] = (2.0 * Z, obs[1][1], obs[1][2])
    with pytest.raises(ValidationError):
        StarNetwork(net.n, net.sources, tuple(obs), net.eve_povm)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_eve_outcomes_uniform(n):
    net = ideal_network(n)
    for l in range(1 << n):
        assert eve_outcome_probability(net, l) == pytest.approx(1.0 / (1 << n), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_conditional_states_are_ghz(n):
    net = ideal_network(n)
    for l in range(1 << n):
        rho = conditional_state(net, l)
        assert fidelity_with_pure(rho, ghz_state(n, l)) == pytest.approx(1.0, abs=1e-10)


def test_conditional_expectation_stabilizers():
    net = ideal_network(3).with_third([Y.copy()] * 3)
    # X X X with the tilde-1 rotation on party 1 stabilizes |phi_0>.
    assert conditional_expectation(net, [TILDE_1, 1, 1], 0) == pytest.approx(1.0)
    # Z_1 Z_2 likewise, identity elsewhere.
    assert conditional_expectation(net, [TILDE_0, 0, None], 0) == pytest.approx(1.0)
    # Y Y on parties 2,3 with X~ on party 1: -X Y Y stabilizes, so value -1... sign:
    assert conditional_expectation(net, [TILDE_1, 2, 2], 0) == pytest.approx(-1.0)


def test_expectation_includes_outcome_weight():
    net = ideal_network(2)
    w = expectation(net, [TILDE_1, 1], 0)
    c = conditional_expectation(net, [TILDE_1, 1], 0)
    assert w == pytest.approx(c / 4.0)


def test_correlation_table_valid_and_consistent():
    net = ideal_network(2).with_third([Y.copy(), Y.copy()])
    table = correlation_table(net)
    table.validate()
    # Correlator reconstructed from the table matches the direct path.
    val = 0.0
    for a1, a2 in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        val += (-1) ** (a1 + a2) * table.p([1, 1], [a1, a2], 0)
    direct = expectation(net, [1, 1], 0)
    assert val == pytest.approx(direct, abs=1e-10)


def test_strategy_json_roundtrip(tmp_path):
    net = ideal_network(2).with_third([Y.copy(), Y.copy()])
    back = network_from_json(network_to_json(net))
    assert back.n == net.n
    for a, b in zip(back.sources, net.sources):
        np.testing.assert_array_equal(a.mat, b.mat)
    for ta, tb in zip(back.observables, net.observables):
        for ma, mb in zip(ta, tb):
            if ma is None:
                assert mb is None
            else:
                np.testing.assert_array_equal(ma, mb)
    path = tmp_path / "strategy.json"
    save_strategy(net, path)
    loaded = load_strategy(path)
    assert loaded.n == 2
    for l in range(4):
        assert eve_outcome_probability(loaded, l) == pytest.approx(0.25, abs=1e-12)


def test_with_third_rejects_wrong_count():
    with pytest.raises(ValueError):
        ideal_network(3).with_third([Y.copy()])
