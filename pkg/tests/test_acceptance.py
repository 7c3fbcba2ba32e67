"""Acceptance gate.

Each criterion prints exactly one ``PASS``/``FAIL`` line with the measured
quantities, then asserts.  Run ``python tests/test_acceptance.py`` for the
summary alone or ``pytest tests/test_acceptance.py -s`` inside pytest.
"""

import contextlib
import io
import itertools
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import amide_one, amide_two  # noqa: E402

from dqcpol.analysis import (  # noqa: E402
    MissingPeakError,
    assign_peaks,
    far_from_resonances,
    find_peaks,
    measure_splitting,
    profile_peaks,
)
from dqcpol.cli import main as cli_main  # noqa: E402
from dqcpol.hamiltonian import build_blocks  # noqa: E402
from dqcpol.polariton import (  # noqa: E402
    diagonalize_system,
    orthonormality_residual,
    polariton_anharmonicity_formula,
    polariton_anharmonicity_numeric,
    reconstruction_residual,
    transition_dipoles,
)
from dqcpol.signal import FrequencyGrid, evaluate, fourier_spectrum, spectrum  # noqa: E402

GRID = FrequencyGrid()


def report(number, passed, text):
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number}: {text}"
    print(line)
    return line


def criterion_1():
    t0 = time.perf_counter()
    worst = 0.0
    for m, g in itertools.product((1, 2), (0.0, 20.0, 50.0, 80.0)):
        spec = amide_one(g, delta=0.0) if m == 1 else amide_two(g, anharmonic=False)
        si, sii = evaluate(transition_dipoles(diagonalize_system(spec)), GRID.omega2, GRID.omega3)
        worst = max(worst, np.abs(si + sii).max() / np.abs(si).max())
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 10.0
    return ok, f"harmonic null max|S|/max|S_i| = {worst:.2e} (<= 1e-8), {dt:.2f} s (< 10 s)"


def criterion_2():
    gap = max(
        abs(np.diff(diagonalize_system(amide_one(g)).e.energies)[0] - 2 * g) / (2 * g)
        for g in (1.0, 20.0, 50.0, 80.0)
    )
    spec = amide_one(50.0)
    peaks = assign_peaks(find_peaks(spectrum(spec), 0.05, "i"), transition_dipoles(diagonalize_system(spec)),
                         component="i")
    try:
        split = measure_splitting(peaks, "omega3", ("e1", "e2"))
    except MissingPeakError:
        split = float("nan")
    ok = gap <= 1e-9 and abs(split - 100.0) <= 1.0
    return ok, (f"e-gap rel. error {gap:.1e} (<= 1e-9); peak-level e1/e2 splitting in S_i at g=50: "
                f"{split:.2f} cm^-1 (100 +/- 1)")


def criterion_3():
    worst = 0.0
    for spec in (amide_one(30.0, delta=0.0), amide_two(30.0, anharmonic=False, J=15.0)):
        s = diagonalize_system(spec)
        e = s.e.energies
        sums = np.sort([e[a] + e[b] for a in range(len(e)) for b in range(a, len(e))])
        worst = max(worst, float(np.max(np.abs(s.f.energies - sums) / sums)))
    return worst <= 1e-9, f"harmonic sum rule max rel. deviation {worst:.1e} (<= 1e-9)"


def criterion_4():
    parts = []
    oks = []

    free = spectrum(amide_one(0.0))
    fp = find_peaks(free, 0.05)
    want = [(1625.0, 3235.0), (1610.0, 3235.0)]
    placed = len(fp) == 2 and all(
        any(abs(p.omega3 - w3) <= 1 and abs(p.omega2 - w2) <= 1 for p in fp) for w3, w2 in want
    )
    oks.append(placed)
    where = ", ".join(f"({p.omega3:.1f}, {p.omega2:.1f})" for p in fp)
    parts.append(f"free Amide-I {len(fp)} peak(s) at {where} (want 2 at (1625,3235),(1610,3235))")

    for g in (20.0, 50.0):
        sg = spectrum(amide_one(g))
        n2 = len(profile_peaks(sg, "omega2"))
        nii = len(find_peaks(sg, 0.05, "ii"))
        oks += [n2 == 3, nii == 6]
        parts.append(f"Amide-I g={g:g}: {n2} omega2 resonances (3), {nii} S_ii peaks (6)")

    sg = spectrum(amide_two(60.0))
    n2 = len(profile_peaks(sg, "omega2"))
    nt = len(find_peaks(sg, 0.05))
    oks += [n2 == 6, nt == 10]
    parts.append(f"Amide-I+II g=60: {n2} omega2 resonances (6), {nt} total peaks (10)")
    return all(oks), "; ".join(parts)


def criterion_5():
    t0 = time.perf_counter()
    worst = 0.0
    info = None
    for g in (0.0, 20.0, 50.0, 80.0):
        table = transition_dipoles(diagonalize_system(amide_one(g)))
        si, sii = evaluate(table, GRID.omega2, GRID.omega3)
        S = si + sii
        fs = fourier_spectrum(table, GRID)
        keep = far_from_resonances(table, GRID, 3.0)
        assert keep.any()
        worst = max(worst, float(np.max(np.abs(fs.s_i - S)[keep] / np.abs(S)[keep])))
        info = fs.provenance
    dt = time.perf_counter() - t0
    ok = worst < 0.02 and dt < 30.0
    return ok, (f"FFT vs frequency domain max rel. error {worst:.2e} (< 2e-2) away from poles, "
                f"N = {info['n_samples']}, {dt:.2f} s (< 30 s)")


def criterion_6():
    vals = np.array([polariton_anharmonicity_formula(amide_one(float(g))) for g in range(10, 90, 10)])
    spread = float(np.max(np.abs(vals - vals[0])) / vals[0])
    numeric = polariton_anharmonicity_numeric(diagonalize_system(amide_one(50.0)))
    shifts = ", ".join(f"{b.shift:.3f}" for b in numeric)
    ok = spread <= 1e-12 and abs(vals[0] - 15.0 / 16.0) <= 1e-12 * 15.0
    return ok, (f"closed form at zero detuning = {vals[0]:.6f} = D/16, spread {spread:.1e} (<= 1e-12); "
                f"D/32 = {15 / 32:.4f}, D/8 = {15 / 8:.4f}; eigen shifts at g=50: {shifts}")


def criterion_7():
    sym = ortho = recon = dip = 0.0
    exact = True
    small = FrequencyGrid(3000.0, 3450.0, 5.0, 1450.0, 1800.0, 5.0)
    specs = [amide_one(g) for g in (0.0, 20.0, 50.0, 80.0)] + [amide_two(g) for g in (0.0, 10.0, 60.0)]
    for spec in specs:
        for blk in build_blocks(spec):
            H = blk.matrix
            sym = max(sym, float(np.max(np.abs(H - H.T)) / np.max(np.abs(H)))) if H.any() else sym
        s = diagonalize_system(spec)
        ortho = max(ortho, orthonormality_residual(s))
        recon = max(recon, reconstruction_residual(s))
        t = transition_dipoles(s)
        want = sum((md.dipole * md.orientation) ** 2 for md in spec.modes)
        dip = max(dip, abs(np.sum(t.mu_eg**2) - want) / want)
        a = sum(evaluate(t, small.omega2, small.omega3))
        b = sum(evaluate(transition_dipoles(diagonalize_system(spec.scaled_dipoles(2.0))), small.omega2,
                         small.omega3))
        exact &= bool(np.array_equal(b, 16.0 * a))
    ok = sym <= 1e-12 and ortho <= 1e-9 and recon <= 1e-9 and dip <= 1e-10 and exact
    return ok, (f"symmetry {sym:.1e}, orthonormality {ortho:.1e}, reconstruction {recon:.1e}, "
                f"dipole sum rule {dip:.1e}, mu->2mu gives exactly 16x: {exact}")


def criterion_8(tmp):
    tmp = Path(tmp)
    runs = []
    for k, workers in enumerate(("1", "1", "2")):
        out = tmp / f"run{k}"
        with contextlib.redirect_stdout(io.StringIO()):
            code = cli_main(["sweep", "--preset", "amide-I+II", "--workers", workers, "--out", str(out)])
        assert code == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    same = runs[0] == runs[1] == runs[2]
    return same, f"{len(runs[0])} files byte-identical across 2 runs and worker counts 1/2: {same}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("number", range(1, 8))
def test_criterion(number, capsys):
    ok, text = CRITERIA[number - 1]()
    with capsys.disabled():
        print()
        report(number, ok, text)
    assert ok, text


def test_criterion_8(tmp_path, capsys):
    ok, text = criterion_8(tmp_path)
    with capsys.disabled():
        print()
        report(8, ok, text)
    assert ok, text


if __name__ == "__main__":
    import tempfile

    results = []
    for k, fn in enumerate(CRITERIA, start=1):
        ok, text = fn()
        report(k, ok, text)
        results.append(ok)
    with tempfile.TemporaryDirectory() as d:
        ok, text = criterion_8(d)
        report(8, ok, text)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
