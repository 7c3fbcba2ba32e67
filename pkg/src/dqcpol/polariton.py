"""Polariton eigenstates, transition dipoles and coherence parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .fock import ManifoldBasis, raise_matrix
from .hamiltonian import HermitianBlock, build_blocks
from .model import DomainError, SystemSpec

LABELS = ("g", "e", "f")
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class PolaritonManifold:
    label: str
    energies: np.ndarray
    vectors: np.ndarray  # columns are states in canonical Fock order
    linewidths: np.ndarray
    basis: ManifoldBasis

    @property
    def dim(self) -> int:
        return len(self.energies)

    def slot_weights(self) -> np.ndarray:
        """(states, slots) expectation values of the slot number operators."""
        return (self.vectors**2).T @ self.basis.occupations()


@dataclass(frozen=True)
class PolaritonSystem:
    spec: SystemSpec
    couplings: np.ndarray
    blocks: tuple
    g: PolaritonManifold
    e: PolaritonManifold
    f: PolaritonManifold

    @property
    def manifolds(self) -> tuple:
        return (self.g, self.e, self.f)


@dataclass(frozen=True)
class TransitionTable:
    """Everything the DQC sum-over-states needs.

    ``mu_fe[f, e]`` is the dipole from one-quantum state e to two-quantum
    state f; ``omega_fe[f, e] = omega_fg[f] - omega_eg[e]``.
    """

    mu_eg: np.ndarray
    mu_fe: np.ndarray
    omega_eg: np.ndarray
    omega_fg: np.ndarray
    omega_fe: np.ndarray
    gamma_eg: np.ndarray
    gamma_fg: np.ndarray
    gamma_fe: np.ndarray

    @property
    def n_e(self) -> int:
        return len(self.omega_eg)

    @property
    def n_f(self) -> int:
        return len(self.omega_fg)

    def scaled(self, s: float) -> "TransitionTable":
        return TransitionTable(
            self.mu_eg * s, self.mu_fe * s, self.omega_eg, self.omega_fg, self.omega_fe,
            self.gamma_eg, self.gamma_fg, self.gamma_fe,
        )


def _gauge_fix(energies: np.ndarray, vectors: np.ndarray, basis: ManifoldBasis, tol: float):
    """Pin down eigenvectors inside degenerate clusters and fix their signs.

    Within a cluster the basis is rebuilt greedily from projections of Fock
    states (largest remaining weight first); cluster members are then ordered
    matter-like first (ascending photon number).  Each vector's largest
    component is made positive.
    """
    n = len(energies)
    U = vectors.copy()
    scale = max(1.0, float(np.max(np.abs(energies)))) if n else 1.0
    k = 0
    while k < n:
        stop = k + 1
        while stop < n and energies[stop] - energies[stop - 1] <= tol * scale:
            stop += 1
        if stop - k > 1:
            Uc = vectors[:, k:stop]
            P = Uc @ Uc.T
            chosen, vecs = [], []
            for _ in range(stop - k):
                R = P.copy()
                for v in vecs:
                    R -= np.outer(v, v)
                norms = np.linalg.norm(R, axis=0)
                norms[chosen] = -1.0
                s = int(np.argmax(norms))
                chosen.append(s)
                vecs.append(R[:, s] / norms[s])
            order = sorted(range(len(chosen)), key=lambda t: basis.states[chosen[t]])
            for offset, t in enumerate(order):
                U[:, k + offset] = vecs[t]
            energies[k:stop] = np.mean(energies[k:stop])
        k = stop
    U[np.abs(U) < 1e-13] = 0.0
    for c in range(n):
        col = np.abs(U[:, c])
        lead = int(np.argmax(col >= col.max() * (1.0 - 1e-9)))
        if U[lead, c] < 0:
            U[:, c] = -U[:, c]
    return energies, U


def _diagonalize_block(block: HermitianBlock, tol: float):
    E, U = np.linalg.eigh(block.matrix)
    return _gauge_fix(E.copy(), U, block.basis, tol)


def state_linewidths(vectors: np.ndarray, basis: ManifoldBasis, spec: SystemSpec) -> np.ndarray:
    """Occupation-weighted linewidth of each state: sum_slot <n_slot> gamma_slot."""
    slot_gamma = np.array([spec.cavity.kappa] + [md.dephasing for md in spec.modes])
    return (vectors**2).T @ basis.occupations() @ slot_gamma


def diagonalize_system(spec: SystemSpec, couplings=None, tol: float = DEGENERACY_TOL) -> PolaritonSystem:
    g = spec.effective_couplings() if couplings is None else np.asarray(couplings, float)
    blocks = build_blocks(spec, g)
    manifolds = []
    for label, block in zip(LABELS, blocks):
        E, U = _diagonalize_block(block, tol)
        if not np.all(np.isfinite(E)):
            raise np.linalg.LinAlgError(f"eigensolver returned non-finite energies for {label}")
        lw = state_linewidths(U, block.basis, spec)
        manifolds.append(PolaritonManifold(label, E, U, lw, block.basis))
    return PolaritonSystem(spec, g, blocks, *manifolds)


def reconstruction_residual(system: PolaritonSystem) -> float:
    """max over manifolds of ||H V - V diag(E)||_max / ||H||_max."""
    worst = 0.0
    for block, man in zip(system.blocks, system.manifolds):
        H = block.matrix
        r = np.max(np.abs(H @ man.vectors - man.vectors * man.energies))
        worst = max(worst, float(r / max(np.max(np.abs(H)), 1e-300)))
    return worst


def orthonormality_residual(system: PolaritonSystem) -> float:
    return max(
        float(np.max(np.abs(man.vectors.T @ man.vectors - np.eye(man.dim))))
        for man in system.manifolds
    )


def dipole_operator(spec: SystemSpec, n: int) -> np.ndarray:
    """Fock-basis dipole block from manifold n to n + 1.

    Only molecular dipoles couple to the external pulses unless
    ``cavity_leak_dipole`` is set.
    """
    m = spec.m
    V = spec.cavity_leak_dipole * raise_matrix(m, n, 0)
    for i, md in enumerate(spec.modes):
        V = V + md.dipole * md.orientation * raise_matrix(m, n, i + 1)
    return V


def coherence_dephasings(system: PolaritonSystem):
    """(gamma_eg, gamma_fg, gamma_fe) from state linewidths.

    ``difference`` rule: a coherence dephases at the linewidth of the quanta it
    carries, so gamma_eg = gamma_e, gamma_fg = gamma_f and
    gamma_fe = |gamma_f - gamma_e|.  For independent damped bosons this keeps
    gamma_fe equal to the linewidth of the added quantum, which is what makes
    the harmonic DQC signal vanish.  ``sum`` uses gamma_a + gamma_b.
    """
    spec = system.spec
    ge = system.e.linewidths - system.g.linewidths[0]
    gf = system.f.linewidths - system.g.linewidths[0]
    if spec.gamma_override is not None:
        v = float(spec.gamma_override)
        return np.full(ge.shape, v), np.full(gf.shape, v), np.full((gf.size, ge.size), v)
    if spec.dephasing == "sum":
        return ge, gf, gf[:, None] + ge[None, :]
    return ge, gf, np.abs(gf[:, None] - ge[None, :])


def transition_dipoles(system: PolaritonSystem) -> TransitionTable:
    spec = system.spec
    mu_eg = system.e.vectors.T @ dipole_operator(spec, 0) @ system.g.vectors
    mu_fe = system.f.vectors.T @ dipole_operator(spec, 1) @ system.e.vectors
    Eg = system.g.energies[0]
    omega_eg = system.e.energies - Eg
    omega_fg = system.f.energies - Eg
    omega_fe = omega_fg[:, None] - omega_eg[None, :]
    gamma_eg, gamma_fg, gamma_fe = coherence_dephasings(system)
    return TransitionTable(
        mu_eg[:, 0], mu_fe, omega_eg, omega_fg, omega_fe, gamma_eg, gamma_fg, gamma_fe
    )


def transition_table(spec: SystemSpec, couplings=None) -> TransitionTable:
    return transition_dipoles(diagonalize_system(spec, couplings))


# --- anharmonicity diagnostics ---------------------------------------------


def closed_form_anharmonicity(delta: float, detuning: float, coupling: float) -> float:
    """Single-mode polariton anharmonicity 16 D |g^4 / (d^2 - 16 g^2)^2|."""
    denom = (detuning**2 - 16.0 * coupling**2) ** 2
    if denom == 0.0:
        if delta == 0.0:
            return 0.0
        raise DomainError(
            f"closed-form anharmonicity undefined at detuning^2 = 16 g^2 (d={detuning}, g={coupling})"
        )
    return 16.0 * delta * abs(coupling**4 / denom)


def mixing_anharmonicity(delta_ij: float, weight_i: float, weight_j: float) -> float:
    """(D_ij / 2) |X_i|^2 |X_j|^2 given the mixing weights |X|^2."""
    return 0.5 * delta_ij * weight_i * weight_j


def polariton_anharmonicity_formula(spec: SystemSpec, i: int = 0, j: int = 0, form: str = "closed",
                                    weights=None, state: int = 0) -> float:
    """Printed-formula anharmonicity; diagnostic only.

    ``form="closed"`` evaluates the single-mode detuning formula for mode i
    (requires i == j).  ``form="mixing"`` evaluates (D_ij/2)|X_i|^2|X_j|^2,
    with weights defaulting to the vibrational weights of one-quantum
    polariton ``state``.
    """
    D = spec.delta
    if form == "closed":
        if i != j:
            raise ValueError("closed form is defined for a single mode (i == j)")
        md = spec.modes[i]
        g = spec.effective_couplings()[i]
        return closed_form_anharmonicity(D[i, i], md.frequency - spec.omega_c, g)
    if form == "mixing":
        if weights is None:
            system = diagonalize_system(spec)
            w = system.e.slot_weights()[state, 1:]
        else:
            w = np.asarray(weights, float)
        return mixing_anharmonicity(D[i, j], w[i], w[j])
    raise ValueError(f"unknown form {form!r}")


@dataclass(frozen=True)
class BipolaritonShift:
    f: int
    e: int
    e_prime: int
    overlap: float
    shift: float


def _pair_states(system: PolaritonSystem) -> dict:
    """Normalized two-quantum product states c_e† c_e'† |0> for e <= e'."""
    m = system.spec.m
    Ue = system.e.vectors
    creators = [
        sum(Ue[slot, k] * raise_matrix(m, 1, slot) for slot in range(m + 1))
        for k in range(Ue.shape[1])
    ]
    out = {}
    for a in range(Ue.shape[1]):
        for b in range(a, Ue.shape[1]):
            v = creators[b] @ Ue[:, a]
            out[(a, b)] = v / np.linalg.norm(v)
    return out


def polariton_anharmonicity_numeric(system: PolaritonSystem) -> list:
    """Operational anharmonicity of each two-quantum state.

    Each f state is paired with the product of one-quantum polaritons it
    overlaps most, and the shift omega_eg + omega_e'g - omega_fg is reported.
    """
    pairs = _pair_states(system)
    Eg = system.g.energies[0]
    weg = system.e.energies - Eg
    out = []
    for k in range(system.f.dim):
        vf = system.f.vectors[:, k]
        best = max(pairs, key=lambda p: (abs(vf @ pairs[p]), -p[0], -p[1]))
        ov = float((vf @ pairs[best]) ** 2)
        shift = float(weg[best[0]] + weg[best[1]] - (system.f.energies[k] - Eg))
        out.append(BipolaritonShift(k, best[0], best[1], ov, shift))
    return out


def track_states(systems) -> list:
    """Follow polariton branches across a sweep by maximal eigenvector overlap.

    Returns, for each sweep point, a dict label -> branch id per state.
    """
    tracks = []
    prev = None
    for system in systems:
        ids = {}
        for man in system.manifolds:
            if prev is None:
                ids[man.label] = np.arange(man.dim)
                continue
            old = getattr(prev[0], man.label)
            overlap = (old.vectors.T @ man.vectors) ** 2
            rows, cols = linear_sum_assignment(-overlap)
            branch = np.empty(man.dim, dtype=int)
            branch[cols] = prev[1][man.label][rows]
            ids[man.label] = branch
        tracks.append(ids)
        prev = (system, ids)
    return tracks

