"""Vibrational polariton double-quantum-coherence spectra.

Build a :class:`SystemSpec`, diagonalize it into polariton manifolds and
evaluate the two-pathway DQC signal on a frequency grid::

    spec = SystemSpec((VibrationalMode(1625.0),), anharmonicity=[[15.0]], couplings=(50.0,))
    grid = spectrum(spec)
    peaks = assign_peaks(find_peaks(grid), transition_table(spec))
"""

__version__ = "0.1.0"

from .analysis import MissingPeakError, Peak, assign_peaks, find_peaks, measure_splitting, profile_peaks
from .config import ConfigError, RunConfig, load_config, load_preset
from .fock import ManifoldBasis, enumerate_manifold, ladder_element
from .hamiltonian import HermitianBlock, build_block, build_blocks, conserves_excitation
from .model import (
    CavitySpec,
    DomainError,
    SystemSpec,
    VibrationalMode,
    WeakCouplingError,
    cavity_frequency,
    coupling_from_geometry,
    detuning,
    effective_coupling,
)
from .polariton import (
    PolaritonSystem,
    TransitionTable,
    diagonalize_system,
    polariton_anharmonicity_formula,
    polariton_anharmonicity_numeric,
    state_linewidths,
    transition_dipoles,
    transition_table,
)
from .signal import (
    FrequencyGrid,
    SpectrumGrid,
    coupling_sweep,
    fourier_spectrum,
    signal_at,
    spectrum,
    time_signal,
)
