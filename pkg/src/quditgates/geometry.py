"""States, Choi matrices, and stabilizer-polytope facet geometry.

The +1 superposition image of a diagonal gate U is psi_U = U |+>, i.e. the
normalised diagonal of U.  Distance from the stabilizer polytope is probed
with the facet operators

    A(u)      = (1/p) ( Pi_Z[u_0] + sum_j Pi_XZ^(j-1)[u_j] - I ),
    A_edge(u) = (1/p) ( sum_j Pi_XZ^(j-1)[u_j] - (p-1)/p * I ),

where A_edge is the average of A over the Z-basis index; both have trace
1/p.  Because each facet picks one eigenvalue index per basis
independently, the minimum over all p^(p+1) facets decomposes into
per-basis minima, which is what ``negativity`` exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadLength,
    ConvergenceFailure,
    NotDiagonal,
    NotEigenvector,
    NotTracePreserving,
    NotUnitary,
    UnsupportedDim,
)
from .hierarchy import (
    DiagGateExact,
    GateParams,
    conjugation_phase_factor,
    gate_exponents,
    root_order,
)
from .kernel import is_diagonal
from .weylheis import (
    CliffordLabel,
    check_dim,
    clifford_unitary,
    displacement,
    mub_projectors,
    mub_vectors,
    omega,
    pauli_z,
)


def state_from_diagonal(u) -> np.ndarray:
    """psi_U = U |+> for a diagonal unitary U (matrix or DiagGateExact)."""
    if isinstance(u, DiagGateExact):
        d = np.exp(2j * np.pi * np.asarray(u.exps) / u.root_order)
        return d / np.sqrt(len(d))
    u = np.asarray(u, dtype=complex)
    if not is_diagonal(u):
        raise NotDiagonal("state_from_diagonal expects a diagonal unitary")
    d = np.diag(u)
    if np.max(np.abs(np.abs(d) - 1.0)) > 1e-10:
        raise NotUnitary("diagonal entries must have unit modulus")
    return d / np.sqrt(len(d))


def gate_state(p: int, g: GateParams) -> np.ndarray:
    """Exact psi for the family gate with parameters ``g``."""
    return state_from_diagonal(gate_exponents(p, g))


def maximally_entangled(p: int) -> np.ndarray:
    phi = np.zeros(p * p, dtype=complex)
    phi[::p + 1] = 1.0 / np.sqrt(p)
    return phi


def choi_of_unitary(u: np.ndarray) -> np.ndarray:
    """Jamiolkowski state (I x U) |Phi><Phi| (I x U)^dag."""
    u = np.asarray(u, dtype=complex)
    p = u.shape[0]
    v = np.kron(np.eye(p), u) @ maximally_entangled(p)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class KrausChannel:
    """Channel rho -> sum_t w_t K_t rho K_t^dag with weights w_t >= 0."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((float(w), np.asarray(k, dtype=complex)) for w, k in self.terms)
        object.__setattr__(self, "terms", terms)
        dim = terms[0][1].shape[0]
        acc = np.zeros((dim, dim), dtype=complex)
        for w, k in terms:
            if w < -1e-12:
                raise NotTracePreserving("negative Kraus weight")
            acc += w * (k.conj().T @ k)
        if np.max(np.abs(acc - np.eye(dim))) > 1e-9:
            raise NotTracePreserving("weighted Kraus terms do not resolve the identity")

    @property
    def dim(self) -> int:
        return self.terms[0][1].shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(rho, dtype=complex))
        for w, k in self.terms:
            out += w * (k @ rho @ k.conj().T)
        return out


def choi_of_channel(channel: KrausChannel) -> np.ndarray:
    p = channel.dim
    phi = maximally_entangled(p)
    eye = np.eye(p)
    out = np.zeros((p * p, p * p), dtype=complex)
    for w, k in channel.terms:
        v = np.kron(eye, k) @ phi
        out += w * np.outer(v, v.conj())
    return out


def depolarizing_gate_channel(p: int, u: np.ndarray, eps: float) -> KrausChannel:
    """Target unitary with probability 1 - eps, complete depolarising otherwise."""
    check_dim(p)
    terms = [(1.0 - eps, u)]
    for x in range(p):
        for z in range(p):
            terms.append((eps / p ** 2, displacement(p, x, z) @ u))
    return KrausChannel(tuple(terms))


def phase_damping_gate_channel(p: int, u: np.ndarray, eps: float) -> KrausChannel:
    """Target unitary followed by a random nontrivial Z power with weight eps."""
    check_dim(p)
    z = pauli_z(p)
    terms = [(1.0 - eps, u)]
    zk = np.eye(p, dtype=complex)
    for _ in range(1, p):
        zk = zk @ z
        terms.append((eps / (p - 1), zk @ u))
    return KrausChannel(tuple(terms))


def depolarized_state(p: int, state: np.ndarray, eps: float) -> np.ndarray:
    rho = _as_density(p, state)
    return (1.0 - eps) * rho + eps * np.eye(p) / p


def phase_damped_state(p: int, psi: np.ndarray, eps: float) -> np.ndarray:
    """(1-eps) psi psi^dag + eps/(p-1) (I - psi psi^dag) for a pure psi."""
    psi = np.asarray(psi, dtype=complex)
    rho = np.outer(psi, psi.conj())
    return (1.0 - eps) * rho + (eps / (p - 1)) * (np.eye(p) - rho)


def depolarized_choi(p: int, u: np.ndarray, eps: float) -> np.ndarray:
    """Choi state of the depolarised gate: (1-eps) J_U + eps I / p^2."""
    return (1.0 - eps) * choi_of_unitary(u) + eps * np.eye(p * p) / p ** 2


def _as_density(p: int, state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def facet_operator(p: int, u) -> np.ndarray:
    """Full facet A(u); ``u`` has one eigenvalue index per basis (p+1 entries)."""
    check_dim(p)
    u = tuple(int(x) % p for x in u)
    if len(u) != p + 1:
        raise BadLength(f"need {p + 1} indices, got {len(u)}")
    projs = mub_projectors(p)
    acc = -np.eye(p, dtype=complex)
    for bi, k in enumerate(u):
        acc = acc + projs[bi, k]
    return acc / p


def edge_facet(p: int, u) -> np.ndarray:
    """Edge facet A_edge(u): Z basis averaged out, one index per X-type basis."""
    check_dim(p)
    u = tuple(int(x) % p for x in u)
    if len(u) != p:
        raise BadLength(f"need {p} indices, got {len(u)}")
    projs = mub_projectors(p)
    acc = -((p - 1) / p) * np.eye(p, dtype=complex)
    for j, k in enumerate(u):
        acc = acc + projs[j + 1, k]
    return acc / p


def basis_expectations(p: int, state: np.ndarray) -> np.ndarray:
    """Array (p+1, p) of eigenprojector expectation values in every basis."""
    check_dim(p)
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        amps = mub_vectors(p).conj() @ state
        return np.abs(amps) ** 2
    q = np.einsum("bkij,ji->bk", mub_projectors(p), state)
    return q.real


@dataclass(frozen=True)
class NegativityResult:
    value: float          # |minimum| when outside, else 0
    minimum: float        # most negative facet expectation
    facet: tuple          # index tuple achieving the minimum
    inside: bool


def negativity(p: int, state: np.ndarray) -> NegativityResult:
    """Distance below the stabilizer polytope boundary, by per-basis minima."""
    q = basis_expectations(p, state)
    idx = tuple(int(i) for i in np.argmin(q, axis=1))
    minimum = float((q.min(axis=1).sum() - 1.0) / p)
    inside = minimum >= -1e-12
    return NegativityResult(value=0.0 if inside else -minimum,
                            minimum=minimum, facet=idx, inside=inside)


def negativity_exhaustive(p: int, state: np.ndarray) -> float:
    """Oracle: scan every facet operator explicitly (small p only)."""
    if p > 3:
        raise UnsupportedDim("exhaustive facet scan is for p <= 3")
    rho = _as_density(p, state)
    best = np.inf
    from itertools import product as iproduct
    for u in iproduct(range(p), repeat=p + 1):
        val = float(np.trace(facet_operator(p, u) @ rho).real)
        best = min(best, val)
    return max(0.0, -best)


# ---------------------------------------------------------------------------
# edge-facet spectra


def edge_spectra_classes(p: int, decimals: int = 9) -> dict:
    """Spectra of all p^p edge facets, clustered after rounding.

    Returns a dict mapping the rounded eigenvalue tuple (ascending) to its
    multiplicity.  Exhaustive construction; intended for p <= 5.
    """
    if p > 5:
        raise UnsupportedDim("full spectral clustering is for p <= 5")
    classes: dict[tuple, int] = {}
    for lam in _edge_eigenvalues(p):
        key = tuple(np.round(lam, decimals))
        classes[key] = classes.get(key, 0) + 1
    return classes


def _edge_batches(p: int, chunk: int = 16807):
    """Yield (index array, stacked A_edge operators) over all p^p edges."""
    projs = np.ascontiguousarray(mub_projectors(p)[1:])  # X-type bases only
    total = p ** p
    shift = -((p - 1) / p) * np.eye(p)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        acc = np.broadcast_to(shift, (len(idx), p, p)).astype(complex)
        rem = idx.copy()
        for j in range(p):
            k = rem % p
            rem = rem // p
            acc = acc + projs[j, k]
        yield idx, acc / p


def _edge_eigenvalues(p: int):
    for _, ops in _edge_batches(p):
        yield from np.linalg.eigvalsh(ops)


@dataclass(frozen=True)
class EdgeScanResult:
    min_eigenvalue: float
    n_edges: int
    window_count: int
    window_flat_count: int


def edge_scan(p: int, target: float | None = None, window: float = 1e-4,
              flat_tol: float = 1e-6) -> EdgeScanResult:
    """Scan all p^p edge facets for their minimal eigenvalues.

    When ``target`` is given, counts edges whose smallest eigenvalue lies
    within ``window`` of it, and among those how many have a minimising
    eigenvector with flat amplitude profile |v_i| = p**-0.5 (the signature
    of a diagonal-gate +1 superposition image).
    """
    check_dim(p)
    global_min = np.inf
    in_window = 0
    flat = 0
    for _, ops in _edge_batches(p):
        lam = np.linalg.eigvalsh(ops)
        lam1 = lam[:, 0]
        global_min = min(global_min, float(lam1.min()))
        if target is not None:
            mask = np.abs(lam1 - target) <= window
            in_window += int(mask.sum())
            if mask.any():
                _, vecs = np.linalg.eigh(ops[mask])
                lead = np.abs(vecs[:, :, 0])
                flat += int(np.sum(np.max(np.abs(lead - p ** -0.5), axis=1) <= flat_tol))
    return EdgeScanResult(min_eigenvalue=global_min, n_edges=p ** p,
                          window_count=in_window, window_flat_count=flat)


# ---------------------------------------------------------------------------
# Clifford eigenvector property, gate injection, dilution


def clifford_eigenphase(p: int, g: GateParams, tol: float = 1e-9):
    """Eigenphase of psi_g under its stabilising Clifford.

    C_([1,0;gamma,1] | (1,z)) fixes psi_g up to a root-of-unity phase;
    returns ``(k, r, phase)`` with phase = exp(2 pi i k / r) observed
    numerically, r = 8, 9, p for p = 2, 3, > 3.
    """
    check_dim(p)
    g = g.reduced(p)
    lab = CliffordLabel(p, ((1, 0), (g.gamma, 1)), (1, g.z))
    c = clifford_unitary(lab)
    psi = gate_state(p, g)
    phase = complex(np.vdot(psi, c @ psi))
    resid = float(np.max(np.abs(c @ psi - phase * psi)))
    if resid > 1e-8 or abs(abs(phase) - 1.0) > 1e-8:
        raise NotEigenvector(f"residual {resid:.2e} above tolerance")
    r = root_order(p)
    k = int(np.rint(np.angle(phase) * r / (2 * np.pi))) % r
    if abs(phase - np.exp(2j * np.pi * k / r)) > max(tol, 1e-8):
        raise NotEigenvector("eigenphase is not on the expected root lattice")
    return k, r, phase


@dataclass(frozen=True)
class InjectionResult:
    state: np.ndarray       # two-qudit output (target register first)
    success_prob: float


def inject_gate(p: int, g: GateParams, psi_in: np.ndarray) -> InjectionResult:
    """Consume the resource state psi_g to apply the gate to ``psi_in``.

    Both qudits are measured with the projector onto the omega^0 eigenspace
    of Z x Z^(p-1), i.e. span{|jj>}; on success the correction
    |a, b> -> |a, b - a mod p> leaves (U_g psi_in) x |0>.  Success
    probability is exactly 1/p for any input.
    """
    check_dim(p)
    psi_in = np.asarray(psi_in, dtype=complex)
    if psi_in.shape != (p,):
        raise BadLength(f"input state must have length {p}")
    if abs(np.linalg.norm(psi_in) - 1.0) > 1e-10:
        raise NotUnitary("input state must be normalised")
    resource = gate_state(p, g)
    joint = np.kron(resource, psi_in)
    projected = np.zeros_like(joint)
    for j in range(p):
        projected[j * p + j] = joint[j * p + j]
    prob = float(np.linalg.norm(projected) ** 2)
    projected /= np.sqrt(prob)
    corrected = np.zeros_like(projected)
    for a in range(p):
        for b in range(p):
            corrected[a * p + ((b - a) % p)] = projected[a * p + b]
    return InjectionResult(state=corrected, success_prob=prob)


def partial_trace(rho: np.ndarray, p: int, keep: int) -> np.ndarray:
    """Trace out one factor of a two-qudit density operator."""
    r = np.asarray(rho, dtype=complex).reshape(p, p, p, p)
    if keep == 0:
        return np.einsum("ikjk->ij", r)
    return np.einsum("kikj->ij", r)


@dataclass(frozen=True)
class DilutionResult:
    eps_out: float
    success_prob: float


def simulate_dilution(p: int, g: GateParams, eps: float) -> DilutionResult:
    """Run the noisy gate on half of a maximally entangled pair, post-select.

    The depolarised gate's Choi state is measured with the span{|jj>}
    projector and corrected exactly as in gate injection; the surviving
    register carries (1 - eps') psi psi^dag + eps' I/p.  The returned
    eps_out is fitted from the off-diagonal scale and verified against the
    full output matrix (residual <= 1e-8).
    """
    check_dim(p)
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    u = gate_exponents(p, g).matrix()
    choi = choi_of_channel(depolarizing_gate_channel(p, u, eps))
    mask = np.zeros(p * p, dtype=bool)
    mask[::p + 1] = True
    blocked = np.where(np.outer(mask, mask), choi, 0.0)
    prob = float(np.trace(blocked).real)
    blocked /= prob
    perm = np.zeros((p * p, p * p))
    for a in range(p):
        for b in range(p):
            perm[a * p + ((b - a) % p), a * p + b] = 1.0
    out = perm @ blocked @ perm.T
    sigma = partial_trace(out, p, keep=0)
    psi = gate_state(p, g)
    pure = np.outer(psi, psi.conj())
    off = ~np.eye(p, dtype=bool)
    denom = float(np.sum(np.abs(pure[off]) ** 2))
    alpha = complex(np.sum(np.conj(pure[off]) * sigma[off])) / denom
    if abs(alpha.imag) > 1e-9:
        raise ConvergenceFailure("off-diagonal fit has a complex residue")
    eps_out = float(1.0 - alpha.real)
    model = (1.0 - eps_out) * pure + eps_out * np.eye(p) / p
    if np.max(np.abs(sigma - model)) > 1e-8:
        raise ConvergenceFailure("output is not of the diluted form")
    return DilutionResult(eps_out=eps_out, success_prob=prob)
