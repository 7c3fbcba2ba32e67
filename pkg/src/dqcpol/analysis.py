"""Peak picking and assignment on DQC spectra.

Peaks are local maxima of |S|.  Assignment matches each peak to the
crossings of resonance lines: Omega_fg along omega2, and Omega_e'g (pathway
i) or Omega_fe (pathway ii) along omega3.  Labels are 1-based and follow the
ascending energy order of the polariton manifolds, e.g. ``e1``, ``f2e1``,
``f3``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage
from scipy.signal import find_peaks as _find_peaks_1d

from .polariton import TransitionTable
from .signal import BRIGHT_TOL, FrequencyGrid, SpectrumGrid

UNASSIGNED = "unassigned"


class MissingPeakError(LookupError):
    """A requested assignment label has no matching peak."""


@dataclass(frozen=True)
class Peak:
    omega3: float
    omega2: float
    height: float
    label3: str = UNASSIGNED
    label2: str = UNASSIGNED
    residual: float = float("nan")

    @property
    def label(self) -> str:
        if self.label3 == UNASSIGNED:
            return UNASSIGNED
        return f"{self.label3}/{self.label2}"


def _refine(left: float, centre: float, right: float) -> float:
    """Vertex offset of the parabola through three equally spaced samples."""
    curv = left - 2.0 * centre + right
    if curv >= 0.0:
        return 0.0
    return float(np.clip(0.5 * (left - right) / curv, -0.5, 0.5))


def find_peaks(grid: SpectrumGrid, threshold_fraction: float = 0.05, component: str = "total") -> list:
    """Local maxima of |S| over the 8-neighbourhood above a fraction of the max.

    Flat-topped maxima (plateaus of equal samples) count once, at their first
    sample in row-major order.  Positions are refined by a quadratic fit along
    each axis.  Peaks are returned by decreasing height.
    """
    if not 0.0 < threshold_fraction < 1.0:
        raise ValueError(f"threshold_fraction must lie in (0, 1), got {threshold_fraction}")
    A = np.abs(grid.component(component))
    top = float(A.max()) if A.size else 0.0
    if not top > 0.0:
        return []
    # a cancelled signal is numerically zero: nothing resolvable
    ref = max(np.abs(grid.s_i).max(), np.abs(grid.s_ii).max())
    if top <= 1e-8 * ref:
        return []
    local = (A == ndimage.maximum_filter(A, size=3, mode="nearest")) & (A > threshold_fraction * top)
    lab, n = ndimage.label(local, structure=np.ones((3, 3)))
    if n == 0:
        return []
    w2, w3 = grid.grid.omega2, grid.grid.omega3
    d2, d3 = grid.grid.omega2_step, grid.grid.omega3_step
    out = []
    for sl_id in range(1, n + 1):
        idx = np.argwhere(lab == sl_id)
        r, c = (int(v) for v in idx[0])
        nr, nc = A.shape
        o2 = _refine(A[r - 1, c], A[r, c], A[r + 1, c]) if 0 < r < nr - 1 else 0.0
        o3 = _refine(A[r, c - 1], A[r, c], A[r, c + 1]) if 0 < c < nc - 1 else 0.0
        out.append(Peak(float(w3[c] + o3 * d3), float(w2[r] + o2 * d2), float(A[r, c])))
    out.sort(key=lambda p: (-p.height, p.omega2, p.omega3))
    return out


def resonance_lines(table: TransitionTable, component: str = "total"):
    """Bright resonance lines as ``(omega2_lines, omega3_lines)``.

    Each entry is a list of ``(label, frequency, linewidth)``.
    """
    P = table.mu_fe * table.mu_eg[None, :]
    scale = float(np.max(np.abs(P))) if P.size else 0.0
    bright = np.abs(P) > BRIGHT_TOL * scale
    lines2 = [
        (f"f{f + 1}", float(table.omega_fg[f]), float(table.gamma_fg[f]))
        for f in range(table.n_f) if bright[f].any()
    ]
    lines3 = []
    if component in ("total", "i"):
        lines3 += [
            (f"e{e + 1}", float(table.omega_eg[e]), float(table.gamma_eg[e]))
            for e in range(table.n_e) if bright[:, e].any()
        ]
    if component in ("total", "ii"):
        lines3 += [
            (f"f{f + 1}e{e + 1}", float(table.omega_fe[f, e]), float(table.gamma_fe[f, e]))
            for f in range(table.n_f) for e in range(table.n_e) if bright[f, e]
        ]
    if component not in ("total", "i", "ii"):
        raise ValueError(f"component must be 'i', 'ii' or 'total', got {component!r}")
    return lines2, lines3


def far_from_resonances(table, grid: FrequencyGrid, widths: float = 3.0) -> np.ndarray:
    """Mask of grid points farther than ``widths`` linewidths from every bright line."""
    lines2, lines3 = resonance_lines(table)
    w2 = grid.omega2[:, None]
    w3 = grid.omega3[None, :]
    keep = np.ones(grid.shape, dtype=bool)
    for _, x, g in lines2:
        keep &= np.abs(w2 - x) > widths * g
    for _, x, g in lines3:
        keep &= np.abs(w3 - x) > widths * g
    return keep


def _join(labels) -> str:
    seen = []
    for lab in labels:
        if lab not in seen:
            seen.append(lab)
    return "+".join(seen)


def assign_peaks(peaks, table: TransitionTable, tolerance=None, component: str = "total") -> list:
    """Label each peak with every line crossing within ``tolerance`` (cm^-1).

    Distance is Euclidean in the (omega3, omega2) plane and the residual is the
    distance to the nearest crossing.  Peaks farther than ``tolerance`` from
    every crossing are ``unassigned``.  The default tolerance is the largest
    bright coherence dephasing.
    """
    lines2, lines3 = resonance_lines(table, component)
    if tolerance is None:
        widths = [w for _, _, w in lines2 + lines3]
        tolerance = max(widths) if widths else 0.0
    if not tolerance > 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    out = []
    for pk in peaks:
        crossings = []
        for lab2, x2, _ in lines2:
            for lab3, x3, _ in lines3:
                crossings.append((float(np.hypot(pk.omega3 - x3, pk.omega2 - x2)), lab3, lab2))
        crossings.sort(key=lambda c: c[0])
        if not crossings or crossings[0][0] > tolerance:
            res = crossings[0][0] if crossings else float("nan")
            out.append(replace(pk, label3=UNASSIGNED, label2=UNASSIGNED, residual=res))
            continue
        near = [c for c in crossings if c[0] <= tolerance]
        out.append(replace(
            pk,
            label3=_join(c[1] for c in near),
            label2=_join(c[2] for c in near),
            residual=crossings[0][0],
        ))
    return out


def _has(label: str, token: str) -> bool:
    return token in label.split("+")


def measure_splitting(peaks, axis: str, labels: tuple) -> float:
    """Signed distance ``pos(labels[1]) - pos(labels[0])`` along ``axis``.

    For each label the strongest assigned peak carrying it on that axis is
    used.  Both labels landing on the same peak (merged resonance) counts as
    missing.
    """
    if axis not in ("omega2", "omega3"):
        raise ValueError(f"axis must be 'omega2' or 'omega3', got {axis!r}")
    attr = "label2" if axis == "omega2" else "label3"
    chosen = []
    for token in labels:
        hits = [p for p in peaks if _has(getattr(p, attr), token)]
        if not hits:
            raise MissingPeakError(f"no peak assigned to {token} along {axis}")
        chosen.append(max(hits, key=lambda p: p.height))
    a, b = chosen
    if a is b:
        raise MissingPeakError(f"{labels[0]} and {labels[1]} share one merged peak along {axis}")
    return getattr(b, axis) - getattr(a, axis)


def axis_profile(grid: SpectrumGrid, axis: str = "omega2", component: str = "total") -> np.ndarray:
    """|S| summed over the other axis."""
    A = np.abs(grid.component(component))
    if axis == "omega2":
        return A.sum(axis=1)
    if axis == "omega3":
        return A.sum(axis=0)
    raise ValueError(f"axis must be 'omega2' or 'omega3', got {axis!r}")


def profile_peaks(grid: SpectrumGrid, axis: str = "omega2", component: str = "total",
                  threshold_fraction: float = 0.05) -> np.ndarray:
    """Positions of resolvable resonances along one axis of the spectrum."""
    prof = axis_profile(grid, axis, component)
    if not prof.max() > 0:
        return np.empty(0)
    idx, _ = _find_peaks_1d(prof, height=threshold_fraction * prof.max())
    coords = grid.grid.omega2 if axis == "omega2" else grid.grid.omega3
    return coords[idx]
