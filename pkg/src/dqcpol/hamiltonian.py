"""Matrix blocks of the RWA cavity + vibration Hamiltonian.

    H = w_c a†a + sum_i w_i b_i†b_i + sum_{i!=j} J_ij b_i†b_j
        - sum_ij (D_ij / 2) b_i†b_j†b_i b_j + sum_i g_i (a†b_i + b_i†a)

The quartic term is taken as written (normal ordered), so a local overtone
sits at 2 w_i - D_ii and a combination band at w_i + w_j - D_ij.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .fock import ManifoldBasis, enumerate_manifold, lower_matrix, raise_matrix
from .model import SystemSpec


@dataclass(frozen=True)
class HermitianBlock:
    n: int
    matrix: np.ndarray
    basis: ManifoldBasis


def _diagonal(spec: SystemSpec, basis: ManifoldBasis) -> np.ndarray:
    occ = basis.occupations()
    w = np.array([md.frequency for md in spec.modes])
    D = spec.delta
    photons, vib = occ[:, 0], occ[:, 1:]
    diag = spec.omega_c * photons + vib @ w
    for i in range(spec.m):
        diag -= 0.5 * D[i, i] * vib[:, i] * (vib[:, i] - 1.0)
        if spec.cross_anharmonicity:
            for j in range(spec.m):
                if i != j:
                    diag -= 0.5 * D[i, j] * vib[:, i] * vib[:, j]
    return diag


def build_block(spec: SystemSpec, n: int, couplings=None) -> HermitianBlock:
    """Hamiltonian restricted to the n-excitation manifold.

    Each exchange term is added as ``X + X.T`` so the result is exactly
    symmetric without any after-the-fact symmetrization.
    """
    m = spec.m
    basis = enumerate_manifold(m, n)
    g = spec.effective_couplings() if couplings is None else np.asarray(couplings, float)
    H = np.diag(_diagonal(spec, basis))
    if n == 0:
        return HermitianBlock(n, H, basis)
    J = spec.J
    for i in range(m):
        # a† b_i
        if g[i] != 0.0:
            X = g[i] * (raise_matrix(m, n - 1, 0) @ lower_matrix(m, n, i + 1))
            H = H + (X + X.T)
        for j in range(i + 1, m):
            if J[i, j] != 0.0:
                X = J[i, j] * (raise_matrix(m, n - 1, i + 1) @ lower_matrix(m, n, j + 1))
                H = H + (X + X.T)
    return HermitianBlock(n, H, basis)


def build_blocks(spec: SystemSpec, couplings=None) -> tuple:
    g = spec.effective_couplings() if couplings is None else couplings
    return tuple(build_block(spec, n, g) for n in range(3))


def _full_space_operators(m: int):
    """Annihilation operators on the direct sum of manifolds 0, 1, 2.

    Creation out of the n = 2 manifold is dropped, which is harmless for
    number-conserving products of at most two lowering operators.
    """
    bases = [enumerate_manifold(m, n) for n in range(3)]
    offsets = np.cumsum([0] + [b.dim for b in bases])
    dim = offsets[-1]
    ops = []
    for slot in range(m + 1):
        A = np.zeros((dim, dim))
        for n in (1, 2):
            A[offsets[n - 1]:offsets[n], offsets[n]:offsets[n + 1]] = lower_matrix(m, n, slot)
        ops.append(A)
    return ops, offsets


def conserves_excitation(spec: SystemSpec) -> tuple:
    """Assemble H on the <= 2-quantum space from literal operator products.

    Returns ``(ok, max_off_block, max_block_mismatch)`` where the last entry
    compares the diagonal blocks against :func:`build_block`.
    """
    m = spec.m
    ops, offsets = _full_space_operators(m)
    a = ops[0]
    b = ops[1:]
    g = spec.effective_couplings()
    w = [md.frequency for md in spec.modes]
    J, D = spec.J, spec.delta
    H = spec.omega_c * a.T @ a
    for i in range(m):
        H = H + w[i] * b[i].T @ b[i]
        H = H + g[i] * (a.T @ b[i] + b[i].T @ a)
        for j in range(m):
            if i != j:
                H = H + J[i, j] * b[i].T @ b[j]
            if i == j or spec.cross_anharmonicity:
                H = H - 0.5 * D[i, j] * b[i].T @ b[j].T @ b[i] @ b[j]
    mask = np.zeros(H.shape, dtype=bool)
    mismatch = 0.0
    blocks = build_blocks(spec, g)
    for n in range(3):
        sl = slice(offsets[n], offsets[n + 1])
        mask[sl, sl] = True
        mismatch = max(mismatch, float(np.max(np.abs(H[sl, sl] - blocks[n].matrix))))
    off = float(np.max(np.abs(H[~mask]))) if (~mask).any() else 0.0
    return off == 0.0, off, mismatch


def write_block_csv(block: HermitianBlock, path) -> None:
    labels = block.basis.labels()
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow([""] + labels)
        for lab, row in zip(labels, block.matrix):
            wr.writerow([lab] + [format(float(x), ".12g") for x in row])
