import itertools

import numpy as np
import pytest

from quditgates.errors import BadLength, NotDiagonal, UnsupportedDim
from quditgates.geometry import (
    KrausChannel,
    basis_expectations,
    choi_of_channel,
    choi_of_unitary,
    clifford_eigenphase,
    depolarized_choi,
    depolarizing_gate_channel,
    edge_facet,
    edge_scan,
    edge_spectra_classes,
    facet_operator,
    gate_state,
    inject_gate,
    negativity,
    negativity_exhaustive,
    partial_trace,
    phase_damped_state,
    phase_damping_gate_channel,
    simulate_dilution,
    state_from_diagonal,
)
from quditgates.hierarchy import GateParams, gate_exponents, root_order
from quditgates.hull import ROBUST_GATE_PARAMS

QUTRIT_SECOND_TYPE = sorted([
    (1 - 3 * np.sin(np.pi / 18) - np.sqrt(3) * np.cos(np.pi / 18)) / 9,
    (1 + 3 * np.sin(np.pi / 18) - np.sqrt(3) * np.cos(np.pi / 18)) / 9,
    (1 + 2 * np.sqrt(3) * np.cos(np.pi / 18)) / 9,
])


def test_state_from_diagonal():
    psi = state_from_diagonal(np.diag([1, 1j]))
    assert np.allclose(psi, [1 / np.sqrt(2), 1j / np.sqrt(2)])
    with pytest.raises(NotDiagonal):
        state_from_diagonal(np.ones((2, 2)))


@pytest.mark.parametrize("p", (2, 3, 5, 7))
def test_facet_operator_trace(p):
    u = tuple(range(p + 1))
    a = facet_operator(p, u)
    assert abs(np.trace(a) - 1.0 / p) < 1e-12
    e = edge_facet(p, tuple(range(p)))
    assert abs(np.trace(e) - 1.0 / p) < 1e-12
    with pytest.raises(BadLength):
        facet_operator(p, (0,) * p)
    with pytest.raises(BadLength):
        edge_facet(p, (0,) * (p + 1))


def test_edge_facet_is_z_average_qutrit():
    """A_edge(u) must equal the average of A(u0, u) over the Z index."""
    p = 3
    for u in itertools.product(range(p), repeat=p):
        avg = sum(facet_operator(p, (u0,) + u) for u0 in range(p)) / p
        assert np.max(np.abs(avg - edge_facet(p, u))) < 1e-13


@pytest.mark.parametrize("p", (2, 3))
def test_negativity_against_exhaustive_oracle(p):
    rng = np.random.default_rng(p * 11)
    states = [gate_state(p, ROBUST_GATE_PARAMS[p])]
    for _ in range(10):
        v = rng.normal(size=p) + 1j * rng.normal(size=p)
        states.append(v / np.linalg.norm(v))
    for psi in states:
        fast = negativity(p, psi).value
        slow = negativity_exhaustive(p, psi)
        assert abs(fast - slow) < 1e-12


def test_negativity_canonical_values():
    assert abs(negativity(2, gate_state(2, GateParams(0, 1, 0))).value
               - (np.sqrt(2) - 1) / 4) < 1e-12
    n3 = negativity(3, gate_state(3, GateParams(1, 2, 0))).value
    assert abs(n3 - (-QUTRIT_SECOND_TYPE[0])) < 1e-12
    assert abs(negativity(5, gate_state(5, GateParams(1, 4, 0))).value - 0.16) < 1e-10


def test_negativity_stabilizer_state_inside():
    plus = np.full(3, 3 ** -0.5)
    res = negativity(3, plus)
    assert res.inside and res.value == 0.0


def test_basis_expectations_pure_vs_density():
    rng = np.random.default_rng(2)
    v = rng.normal(size=5) + 1j * rng.normal(size=5)
    v /= np.linalg.norm(v)
    q1 = basis_expectations(5, v)
    q2 = basis_expectations(5, np.outer(v, v.conj()))
    assert np.max(np.abs(q1 - q2)) < 1e-12
    assert np.max(np.abs(q1.sum(axis=1) - 1.0)) < 1e-12


def test_edge_spectra_qutrit_classes():
    classes = edge_spectra_classes(3, decimals=9)
    assert sum(classes.values()) == 27
    first = tuple(np.round([-2 / 9, 1 / 9, 4 / 9], 9))
    second = tuple(np.round(QUTRIT_SECOND_TYPE, 9))
    assert classes[first] == 9
    assert classes[second] == 18
    # the corrected second-type spectrum keeps the trace at 1/p
    assert abs(sum(QUTRIT_SECOND_TYPE) - 1 / 3) < 1e-12


def test_edge_spectra_p5_distinguished_count():
    classes = edge_spectra_classes(5, decimals=5)
    assert sum(classes.values()) == 5 ** 5
    target = np.array([-0.16, -0.08361, 0.04, 0.04, 0.36361])
    hits = sum(v for k, v in classes.items()
               if np.max(np.abs(np.array(k) - target)) < 2e-5)
    assert hits == 100


def test_edge_scan_p3_matches_classes():
    scan = edge_scan(3, target=float(QUTRIT_SECOND_TYPE[0]), window=1e-9)
    assert scan.n_edges == 27
    assert abs(scan.min_eigenvalue + 2 / 9) < 1e-12
    assert scan.window_count == 18
    assert scan.window_flat_count == 18


def test_edge_spectra_rejects_large_p():
    with pytest.raises(UnsupportedDim):
        edge_spectra_classes(7)


@pytest.mark.parametrize("p", (2, 3, 5, 7))
def test_clifford_eigenphase_all_gates_small(p):
    gps = [GateParams(z, g, e) for z in range(p) for g in range(p)
           for e in range(p)]
    if p == 7:
        gps = gps[:49]
    r = root_order(p)
    for gp in gps:
        k, order, phase = clifford_eigenphase(p, gp)
        assert order == r
        assert abs(phase - np.exp(2j * np.pi * k / r)) < 1e-8


def test_eigenphase_known_values():
    # exponent -eps mod p for p > 3, and the mod 9 form at p = 3
    assert clifford_eigenphase(5, GateParams(1, 4, 2))[0] == 3
    assert clifford_eigenphase(7, GateParams(1, 2, 0))[0] == 0
    k3, r3, _ = clifford_eigenphase(3, GateParams(1, 2, 0))
    assert (r3, k3) == (9, (-2 * 2 - 3 * 0) % 9)


@pytest.mark.parametrize("p", (2, 3, 5, 7))
def test_injection(p):
    rng = np.random.default_rng(p * 3)
    g = ROBUST_GATE_PARAMS[p]
    u = gate_exponents(p, g).matrix()
    ket0 = np.eye(p, dtype=complex)[0]
    for _ in range(5):
        v = rng.normal(size=p) + 1j * rng.normal(size=p)
        v /= np.linalg.norm(v)
        res = inject_gate(p, g, v)
        assert abs(res.success_prob - 1.0 / p) < 1e-12
        want = np.kron(u @ v, ket0)
        fidelity = abs(np.vdot(want, res.state)) ** 2
        assert fidelity > 1 - 1e-12


def test_partial_trace():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    ra = a @ a.conj().T
    ra /= np.trace(ra)
    rb = b @ b.conj().T
    rb /= np.trace(rb)
    joint = np.kron(ra, rb)
    assert np.max(np.abs(partial_trace(joint, 3, 0) - ra)) < 1e-12
    assert np.max(np.abs(partial_trace(joint, 3, 1) - rb)) < 1e-12


def test_choi_of_depolarizing_channel_matches_formula():
    p = 3
    u = gate_exponents(p, GateParams(1, 2, 0)).matrix()
    for eps in (0.0, 0.3, 1.0):
        ch = depolarizing_gate_channel(p, u, eps)
        assert np.max(np.abs(choi_of_channel(ch) - depolarized_choi(p, u, eps))) < 1e-12


def test_phase_damping_channel_matches_state_form():
    p = 5
    g = GateParams(1, 4, 0)
    u = gate_exponents(p, g).matrix()
    psi = gate_state(p, g)
    for eps in (0.2, 0.7):
        ch = phase_damping_gate_channel(p, u, eps)
        plus = np.full(p, p ** -0.5, dtype=complex)
        rho = ch.apply(np.outer(plus, plus.conj()))
        assert np.max(np.abs(rho - phase_damped_state(p, psi, eps))) < 1e-12


def test_kraus_channel_requires_trace_preservation():
    from quditgates.errors import NotTracePreserving
    with pytest.raises(NotTracePreserving):
        KrausChannel(((0.5, np.eye(2)),))


@pytest.mark.parametrize("p", (2, 3, 5))
def test_simulate_dilution_matches_formula(p):
    rng = np.random.default_rng(p * 7)
    gps = [GateParams(z, g, e) for z in range(p) for g in range(p)
           for e in range(p)]
    for _ in range(6):
        gp = gps[rng.integers(len(gps))]
        eps = float(rng.uniform(0, 1))
        res = simulate_dilution(p, gp, eps)
        want = eps / (p - (p - 1) * eps)
        assert abs(res.eps_out - want) < 1e-10
        assert abs(res.success_prob - ((1 - eps) + eps / p)) < 1e-10


def test_choi_of_unitary_is_pure():
    u = gate_exponents(3, GateParams(1, 2, 0)).matrix()
    j = choi_of_unitary(u)
    assert abs(np.trace(j) - 1.0) < 1e-12
    assert np.max(np.abs(j @ j - j)) < 1e-12
