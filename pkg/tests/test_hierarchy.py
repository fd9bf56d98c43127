"""Exact exponent arithmetic for the diagonal gate family.

The closed-form exponent vectors are checked against an independent
oracle that iterates the defining recurrence; the oracle is implemented
here, in the tests, so the two routes share no code.
"""

import numpy as np
import pytest

from quditgates.errors import UnsupportedDim
from quditgates.hierarchy import (
    GateParams,
    compose_params,
    conjugation_phase_factor,
    element_order,
    gate_exponents,
    gate_matrix,
    group_structure,
    identify_third_level,
    magic_gate,
    magic_gate_matrix,
    pauli_conjugation,
    root_order,
)
from quditgates.kernel import equal_up_to_global_phase, mod_inv
from quditgates.weylheis import clifford_unitary, displacement


def oracle_exponents(p, z, g, e):
    """Iterate v_{k+1} = v_k + k(2^-1 k g + z) + 2^-1 z + e mod p (p > 3)."""
    assert p > 3
    half = mod_inv(2, p)
    v = [0]
    for k in range(p - 1):
        v.append((v[-1] + k * (half * k * g + z) + half * z + e) % p)
    return tuple(v)


def all_params(p):
    return [GateParams(z, g, e)
            for z in range(p) for g in range(p) for e in range(p)]


@pytest.mark.parametrize("p", (5, 7))
def test_closed_form_matches_recurrence_oracle(p):
    for gp in all_params(p):
        exact = gate_exponents(p, gp)
        assert exact.root_order == p
        want = oracle_exponents(p, gp.z, gp.gamma, gp.eps)
        assert exact.exps == want, gp


def test_worked_exponent_examples():
    assert gate_exponents(5, GateParams(1, 4, 0)).exps == (0, 3, 4, 2, 1)
    assert gate_exponents(3, GateParams(1, 2, 0)).exps == (0, 1, 8)
    assert gate_exponents(7, GateParams(1, 2, 0)).exps == (0, 4, 3, 6, 1, 4, 3)


def test_p2_embedding():
    # k = 2z + g + 4e mod 8; the nonzero exponent lives on |1>
    assert gate_exponents(2, GateParams(0, 1, 0)).exps == (0, 1)
    assert gate_exponents(2, GateParams(1, 0, 0)).exps == (0, 2)
    assert gate_exponents(2, GateParams(0, 0, 1)).exps == (0, 4)
    assert root_order(2) == 8 and root_order(3) == 9 and root_order(5) == 5


@pytest.mark.parametrize("p", (2, 3, 5, 7))
def test_composition_matches_matrix_product(p):
    rng = np.random.default_rng(23 + p)
    params = all_params(p)
    for _ in range(60):
        g1 = params[rng.integers(len(params))]
        g2 = params[rng.integers(len(params))]
        g12 = compose_params(p, g1, g2)
        left = gate_matrix(p, g1) @ gate_matrix(p, g2)
        assert np.max(np.abs(left - gate_matrix(p, g12))) < 1e-12, (g1, g2)


def test_composition_worked_examples():
    got = compose_params(3, GateParams(1, 2, 0), GateParams(0, 2, 0))
    assert got.astuple() == (1, 1, 2)
    got = compose_params(5, GateParams(1, 4, 0), GateParams(2, 3, 1))
    assert got.astuple() == (3, 2, 1)


@pytest.mark.parametrize("p", (2, 3, 5, 7))
def test_exponent_vectors_injective(p):
    seen = {gate_exponents(p, gp).exps for gp in all_params(p)}
    assert len(seen) == p ** 3


def test_element_orders():
    assert element_order(2, GateParams(0, 1, 0)) == 8
    assert element_order(3, GateParams(1, 2, 0)) == 9
    assert element_order(5, GateParams(1, 4, 0)) == 5
    assert element_order(3, GateParams(0, 0, 0)) == 1


@pytest.mark.parametrize("p,name,hist,gens", [
    (2, "Z8", {1: 1, 2: 1, 4: 2, 8: 4}, 1),
    (3, "Z9 x Z3", {1: 1, 3: 8, 9: 18}, 2),
    (5, "Z5 x Z5 x Z5", {1: 1, 5: 124}, 3),
    (7, "Z7 x Z7 x Z7", {1: 1, 7: 342}, 3),
])
def test_group_structure(p, name, hist, gens):
    rep = group_structure(p)
    assert rep.size == p ** 3
    assert rep.group_name == name
    assert rep.order_histogram == hist
    assert rep.min_generators == gens


@pytest.mark.parametrize("p", (5, 7))
def test_exponent_sum_multiple_of_p(p):
    # det of the gate is a p-th root raised to the exponent sum; the family
    # at p > 3 sits inside SU(p) up to that root, so the sum vanishes mod p
    for gp in all_params(p):
        assert sum(gate_exponents(p, gp).exps) % p == 0


def test_qutrit_determinant_rule():
    w = np.exp(2j * np.pi / 3)
    for gp in all_params(3):
        det = np.linalg.det(gate_matrix(3, gp))
        want = w ** ((gp.z + gp.gamma) % 3)
        assert abs(det - want) < 1e-10, gp


@pytest.mark.parametrize("p,params", [(3, (1, 1, 0)), (5, (2, 1, 2)), (7, (3, 1, 4))])
def test_magic_gate_identification(p, params):
    rep = magic_gate(p)
    assert rep.params.astuple() == params
    ok, phase = equal_up_to_global_phase(
        magic_gate_matrix(p), gate_matrix(p, rep.params), tol=1e-9)
    assert ok
    assert abs(phase - 1 / rep.phase) < 1e-9


@pytest.mark.parametrize("p", (2, 3))
def test_identify_third_level_round_trip(p):
    for gp in all_params(p):
        rep = identify_third_level(p, gate_matrix(p, gp))
        assert rep.params == gp.reduced(p)
        want_kind = "clifford" if gp.gamma % p == 0 else "third_level"
        assert rep.kind == want_kind


def test_identify_rejects_outsiders():
    u = np.diag([1.0, np.exp(0.3j), np.exp(1.1j)])
    rep = identify_third_level(3, u)
    assert rep.kind == "not_third_level"
    assert rep.params is None


@pytest.mark.parametrize("p", (3, 5, 7))
def test_pauli_conjugation_against_brute_force(p):
    """The conjugation image of a displacement must be the labeled
    Clifford, including the returned scalar phase."""
    rng = np.random.default_rng(p)
    params = all_params(p)
    for _ in range(40):
        gp = params[rng.integers(len(params))]
        x = int(rng.integers(1, p))
        z = int(rng.integers(p))
        label, phase = pauli_conjugation(p, gp, x, z)
        u = gate_matrix(p, gp)
        got = u @ displacement(p, x, z) @ u.conj().T
        want = phase * clifford_unitary(label)
        assert np.max(np.abs(got - want)) < 1e-9, (gp, x, z)


def test_pauli_conjugation_rejects_p2():
    with pytest.raises(UnsupportedDim):
        pauli_conjugation(2, GateParams(0, 1, 0), 1, 0)


def test_qutrit_conjugation_factor():
    z9 = np.exp(2j * np.pi / 9)
    for gamma in range(3):
        assert abs(conjugation_phase_factor(3, gamma) - z9 ** (2 * gamma)) < 1e-12
    assert conjugation_phase_factor(5, 2) == 1
