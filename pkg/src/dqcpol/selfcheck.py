"""Release gate: a handful of named invariants with measured residuals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import far_from_resonances
from .hamiltonian import build_blocks, conserves_excitation
from .model import CavitySpec, SystemSpec, VibrationalMode, effective_coupling
from .polariton import diagonalize_system, orthonormality_residual, reconstruction_residual, transition_dipoles
from .signal import FrequencyGrid, evaluate, fourier_spectrum


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name:<24s} residual={self.residual:.3e}  tol={self.tolerance:.1e}"


def _spec(m: int, gt: float, anharmonic: bool = True) -> SystemSpec:
    modes = (VibrationalMode(1625.0), VibrationalMode(1545.0))[:m]
    if m == 1:
        D = [[15.0]] if anharmonic else [[0.0]]
        J = None
    else:
        D = [[15.0, 10.0], [10.0, 11.0]] if anharmonic else np.zeros((2, 2))
        J = [[0.0, 15.0], [15.0, 0.0]]
    return SystemSpec(modes, CavitySpec(), scalar_coupling=J, anharmonicity=D, couplings=(gt,) * m)


def _check(name, residual, tol) -> CheckResult:
    return CheckResult(name, bool(residual <= tol), float(residual), float(tol))


def check_effective_coupling(fn=effective_coupling) -> CheckResult:
    # cases with kappa != 0 so a sign slip on kappa is visible
    cases = [((50.0, 1.0, 10.0, 20.0), math.sqrt(2500.0 - 25.0)),
             ((50.0, 1.0, 0.0, 20.0), math.sqrt(2400.0)),
             ((30.0, 4.0, 5.0, 25.0), math.sqrt(3600.0 - 100.0))]
    worst = max(abs(fn(*args) - want) / want for args, want in cases)
    return _check("effective_coupling", worst, 1e-12)


def check_hermiticity() -> CheckResult:
    worst = 0.0
    for m in (1, 2):
        for blk in build_blocks(_spec(m, 50.0)):
            H = blk.matrix
            worst = max(worst, float(np.max(np.abs(H - H.T))) / max(1.0, float(np.max(np.abs(H)))))
    return _check("hermiticity", worst, 1e-12)


def check_excitation_conservation() -> CheckResult:
    worst = 0.0
    for m in (1, 2):
        spec = _spec(m, 50.0)
        _, off, mismatch = conserves_excitation(spec)
        scale = max(float(np.max(np.abs(b.matrix))) for b in build_blocks(spec))
        worst = max(worst, off / scale, mismatch / scale)
    return _check("excitation_conservation", worst, 1e-12)


def check_eigensystem() -> CheckResult:
    worst = 0.0
    for m in (1, 2):
        for gt in (0.0, 20.0, 50.0, 80.0):
            s = diagonalize_system(_spec(m, gt))
            worst = max(worst, reconstruction_residual(s), orthonormality_residual(s))
    return _check("eigensystem", worst, 1e-9)


def check_rabi_splitting() -> CheckResult:
    worst = 0.0
    for gt in (1.0, 20.0, 50.0, 80.0):
        e = diagonalize_system(_spec(1, gt)).e.energies
        worst = max(worst, abs((e[1] - e[0]) - 2.0 * gt) / (2.0 * gt))
    return _check("rabi_splitting", worst, 1e-9)


def check_harmonic_sum_rule() -> CheckResult:
    worst = 0.0
    for m in (1, 2):
        s = diagonalize_system(_spec(m, 30.0, anharmonic=False))
        e = s.e.energies
        sums = np.sort([e[a] + e[b] for a in range(len(e)) for b in range(a, len(e))])
        worst = max(worst, float(np.max(np.abs(np.sort(s.f.energies) - sums) / np.abs(sums))))
    return _check("harmonic_sum_rule", worst, 1e-9)


def check_harmonic_null(grid: FrequencyGrid = FrequencyGrid()) -> CheckResult:
    worst = 0.0
    for m in (1, 2):
        for gt in (0.0, 20.0, 50.0, 80.0):
            table = transition_dipoles(diagonalize_system(_spec(m, gt, anharmonic=False)))
            si, sii = evaluate(table, grid.omega2, grid.omega3)
            worst = max(worst, float(np.abs(si + sii).max() / np.abs(si).max()))
    return _check("harmonic_null", worst, 1e-8)


def check_fourier_consistency() -> CheckResult:
    grid = FrequencyGrid(3050.0, 3450.0, 2.0, 1450.0, 1800.0, 2.0)
    table = transition_dipoles(diagonalize_system(_spec(1, 50.0)))
    si, sii = evaluate(table, grid.omega2, grid.omega3)
    S = si + sii
    F = fourier_spectrum(table, grid).s_i
    keep = far_from_resonances(table, grid)
    err = np.abs(F - S)[keep] / np.abs(S)[keep]
    return _check("fourier_consistency", float(err.max()), 0.02)


def run_selfcheck(effective_coupling_fn=effective_coupling) -> list:
    return [
        check_effective_coupling(effective_coupling_fn),
        check_hermiticity(),
        check_excitation_conservation(),
        check_eigensystem(),
        check_rabi_splitting(),
        check_harmonic_sum_rule(),
        check_harmonic_null(),
        check_fourier_consistency(),
    ]
