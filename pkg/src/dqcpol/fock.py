"""Occupation-number bases for the number-conserving boson blocks.

Slot 0 is the cavity photon (operator ``a``), slots 1..m are the vibrational
modes (operators ``b_i``).  The Hamiltonian commutes with the total excitation
number, so the DQC signal only ever needs the n = 0, 1, 2 manifolds and no
truncation error is incurred by stopping there.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_EXCITATION = 2


@dataclass(frozen=True)
class ManifoldBasis:
    """Ordered basis of the n-excitation manifold.

    States are tuples of ``m + 1`` occupations, sorted lexicographically in
    decreasing order (most photons first).
    """

    m: int
    n: int
    states: tuple

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, state) -> int:
        return self._lookup()[tuple(state)]

    def _lookup(self) -> dict:
        return _index_map(self.states)

    def occupations(self) -> np.ndarray:
        """(dim, m + 1) array of occupation numbers."""
        return np.array(self.states, dtype=float).reshape(self.dim, self.m + 1)

    def labels(self) -> list:
        return [state_label(s) for s in self.states]


@lru_cache(maxsize=None)
def _index_map(states: tuple) -> dict:
    return {s: k for k, s in enumerate(states)}


def state_label(state) -> str:
    """Compact label such as ``ph1.v1_1`` or ``vac``."""
    parts = []
    if state[0]:
        parts.append(f"ph{state[0]}")
    for i, occ in enumerate(state[1:], start=1):
        if occ:
            parts.append(f"v{i}_{occ}")
    return ".".join(parts) if parts else "vac"


@lru_cache(maxsize=None)
def enumerate_manifold(m: int, n: int) -> ManifoldBasis:
    if m < 1:
        raise ValueError(f"need at least one vibrational mode, got m={m}")
    if not 0 <= n <= MAX_EXCITATION:
        raise ValueError(f"only manifolds n = 0..{MAX_EXCITATION} are supported, got n={n}")
    states = [s for s in itertools.product(range(n + 1), repeat=m + 1) if sum(s) == n]
    states.sort(reverse=True)
    return ManifoldBasis(m=m, n=n, states=tuple(states))


def ladder_element(kind: str, slot: int, source, target) -> float:
    """<target| op |source> for op = lower (a/b) or raise (a†/b†) on ``slot``."""
    source = tuple(source)
    target = tuple(target)
    if not 0 <= slot < len(source) or len(source) != len(target):
        raise ValueError("slot or state length mismatch")
    if kind == "lower":
        step = -1
    elif kind == "raise":
        step = 1
    else:
        raise ValueError(f"kind must be 'lower' or 'raise', got {kind!r}")
    for k, (a, b) in enumerate(zip(source, target)):
        expected = a + step if k == slot else a
        if b != expected:
            return 0.0
    if target[slot] < 0:
        return 0.0
    return math.sqrt(source[slot]) if step < 0 else math.sqrt(source[slot] + 1)


@lru_cache(maxsize=None)
def _raise_matrix(m: int, n: int, slot: int) -> np.ndarray:
    lo = enumerate_manifold(m, n)
    hi = enumerate_manifold(m, n + 1)
    out = np.zeros((hi.dim, lo.dim))
    for c, s in enumerate(lo.states):
        t = list(s)
        t[slot] += 1
        r = hi.index(t)
        out[r, c] = ladder_element("raise", slot, s, t)
    out.setflags(write=False)
    return out


def raise_matrix(m: int, n: int, slot: int) -> np.ndarray:
    """Matrix of the creation operator on ``slot`` from manifold n to n + 1."""
    return _raise_matrix(m, n, slot)


def lower_matrix(m: int, n: int, slot: int) -> np.ndarray:
    """Matrix of the annihilation operator on ``slot`` from manifold n to n - 1."""
    if n < 1:
        raise ValueError("cannot lower out of the vacuum manifold")
    return _raise_matrix(m, n - 1, slot).T
