import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqcpol.analysis import (
    UNASSIGNED,
    MissingPeakError,
    Peak,
    assign_peaks,
    axis_profile,
    far_from_resonances,
    find_peaks,
    measure_splitting,
    profile_peaks,
    resonance_lines,
)
from dqcpol.polariton import transition_table
from dqcpol.signal import FrequencyGrid, SpectrumGrid, spectrum

from conftest import amide_one, amide_two


def lorentzian_grid(a2, a3, gamma=10.0, grid=FrequencyGrid(3100.0, 3300.0, 1.0, 1500.0, 1700.0, 1.0)):
    w2 = grid.omega2[:, None]
    w3 = grid.omega3[None, :]
    S = 1.0 / ((w2 - a2 + 1j * gamma) * (w3 - a3 + 1j * gamma))
    return SpectrumGrid(grid, S, np.zeros_like(S))


@settings(max_examples=50, deadline=None)
@given(st.floats(3150.0, 3250.0), st.floats(1550.0, 1650.0), st.floats(3.0, 30.0))
def test_isolated_lorentzian_product(a2, a3, gamma):
    peaks = find_peaks(lorentzian_grid(a2, a3, gamma))
    assert len(peaks) == 1
    assert abs(peaks[0].omega2 - a2) <= 1.0
    assert abs(peaks[0].omega3 - a3) <= 1.0


def test_subgrid_refinement_helps():
    pk = find_peaks(lorentzian_grid(3200.4, 1600.3))[0]
    assert abs(pk.omega2 - 3200.4) < 0.2
    assert abs(pk.omega3 - 1600.3) < 0.2


def test_plateau_counts_once():
    grid = FrequencyGrid(0.0, 9.0, 1.0, 0.0, 9.0, 1.0)
    S = np.zeros(grid.shape, dtype=complex)
    S[4:6, 4:6] = 1.0
    assert len(find_peaks(SpectrumGrid(grid, S, np.zeros_like(S)))) == 1


def test_threshold_validation():
    with pytest.raises(ValueError):
        find_peaks(lorentzian_grid(3200.0, 1600.0), 0.0)
    with pytest.raises(ValueError):
        find_peaks(lorentzian_grid(3200.0, 1600.0), 1.0)


def test_harmonic_has_no_peaks():
    assert find_peaks(spectrum(amide_one(50.0, delta=0.0))) == []
    assert find_peaks(spectrum(amide_two(60.0, anharmonic=False))) == []


def test_free_molecule_pathways_assign():
    spec = amide_one(0.0)
    sg = spectrum(spec)
    t = transition_table(spec)
    pi = assign_peaks(find_peaks(sg, component="i"), t, component="i")
    pii = assign_peaks(find_peaks(sg, component="ii"), t, component="ii")
    assert [(p.label3, p.label2) for p in pi] == [("e1", "f1")]
    assert [(p.label3, p.label2) for p in pii] == [("f1e1", "f1")]
    assert pi[0].omega3 == pytest.approx(1625.0, abs=1.0)
    assert pii[0].omega3 == pytest.approx(1610.0, abs=1.0)


def test_free_molecule_total_is_one_merged_peak():
    # two Lorentzians 15 apart with width 20 interfere into a single maximum
    spec = amide_one(0.0)
    peaks = assign_peaks(find_peaks(spectrum(spec)), transition_table(spec))
    assert len(peaks) == 1
    assert peaks[0].label == "e1+f1e1/f1"
    assert peaks[0].omega3 == pytest.approx(1617.5, abs=0.5)


def test_omega2_labels_at_weak_coupling():
    spec = amide_one(20.0)
    peaks = assign_peaks(find_peaks(spectrum(spec)), transition_table(spec))
    labels = {tok for p in peaks for tok in p.label2.split("+")}
    assert labels == {"f1", "f2", "f3"}


def test_crossing_free_region_is_unassigned():
    t = transition_table(amide_one(50.0))
    far = assign_peaks([Peak(1400.0, 2950.0, 1.0)], t)[0]
    assert far.label == UNASSIGNED
    assert far.residual > 100.0


def test_assignment_is_stable_under_step_halving():
    spec = amide_one(50.0)
    t = transition_table(spec)
    coarse = FrequencyGrid(3050.0, 3450.0, 1.0, 1450.0, 1800.0, 1.0)
    fine = FrequencyGrid(3050.0, 3450.0, 0.5, 1450.0, 1800.0, 0.5)
    a = assign_peaks(find_peaks(spectrum(spec, coarse), 0.2, "i"), t, component="i")
    b = assign_peaks(find_peaks(spectrum(spec, fine), 0.2, "i"), t, component="i")
    assert [p.label for p in a] == [p.label for p in b]
    assert [p.label for p in a] == [p.label for p in assign_peaks(find_peaks(spectrum(spec, coarse), 0.2, "i"), t,
                                                                  component="i")]


def test_rabi_splitting_grows_with_coupling():
    vals = []
    for g in range(20, 90, 10):
        spec = amide_one(float(g))
        peaks = assign_peaks(find_peaks(spectrum(spec), component="i"), transition_table(spec), component="i")
        vals.append(measure_splitting(peaks, "omega3", ("e1", "e2")))
    assert all(b > a for a, b in zip(vals, vals[1:]))
    # overlapping tails push the two maxima slightly apart
    assert all(2 * g <= v <= 2 * g + 5 for g, v in zip(range(20, 90, 10), vals))


@pytest.mark.parametrize("g", [0.0, 10.0])
def test_unresolved_pair_is_missing(g):
    spec = amide_one(g)
    peaks = assign_peaks(find_peaks(spectrum(spec), component="i"), transition_table(spec), component="i")
    with pytest.raises(MissingPeakError):
        measure_splitting(peaks, "omega3", ("e1", "e2"))


def test_f_splitting_tracks_eigenvalues():
    spec = amide_one(50.0)
    t = transition_table(spec)
    peaks = assign_peaks(find_peaks(spectrum(spec)), t)
    got = measure_splitting(peaks, "omega2", ("f1", "f2"))
    assert abs(got - (t.omega_fg[1] - t.omega_fg[0])) < t.gamma_fg.max()


def test_measure_splitting_validation():
    with pytest.raises(ValueError):
        measure_splitting([], "omega1", ("e1", "e2"))
    with pytest.raises(MissingPeakError):
        measure_splitting([], "omega3", ("e1", "e2"))


def test_profiles():
    sg = spectrum(amide_one(50.0))
    assert axis_profile(sg, "omega2").shape == (sg.grid.shape[0],)
    assert axis_profile(sg, "omega3").shape == (sg.grid.shape[1],)
    assert len(profile_peaks(sg, "omega2")) == 3
    with pytest.raises(ValueError):
        axis_profile(sg, "t2")


def test_resonance_lines_respect_component():
    t = transition_table(amide_one(50.0))
    _, l3i = resonance_lines(t, "i")
    _, l3ii = resonance_lines(t, "ii")
    assert all(lab.startswith("e") for lab, _, _ in l3i)
    assert all(lab.startswith("f") for lab, _, _ in l3ii)
    mask = far_from_resonances(t, FrequencyGrid())
    assert 0 < mask.sum() < mask.size
