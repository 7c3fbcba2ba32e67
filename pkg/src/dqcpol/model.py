"""Physical parameters of the cavity + vibrational-mode system.

Every frequency, linewidth and coupling is stored in wavenumbers (cm^-1) with
hbar = 1.  SI units appear only inside :func:`coupling_from_geometry`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import constants as sc

# Debye in C*m
DEBYE = 1e-21 / sc.c
# speed of light in cm/fs, used for t[fs] -> phase conversions
C_CM_PER_FS = sc.c * 100.0 * 1e-15

DEPHASING_MODELS = ("difference", "sum")
EVANESCENT_TOL = 1e-12


class DomainError(ValueError):
    """A parameter combination outside the physical domain of a formula."""


class WeakCouplingError(DomainError):
    """Effective coupling radicand is negative: no real polariton splitting."""


@dataclass(frozen=True)
class VibrationalMode:
    """A single molecular vibration.

    ``dipole`` is in Debye and ``orientation`` is the projection of the
    transition dipole on the cavity field vector.
    """

    frequency: float
    dephasing: float = 20.0
    dipole: float = 1.0
    orientation: float = 1.0

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError(f"mode frequency must be > 0, got {self.frequency}")
        if not self.dephasing >= 0:
            raise ValueError(f"mode dephasing must be >= 0, got {self.dephasing}")
        if not self.dipole >= 0:
            raise ValueError(f"mode dipole must be >= 0, got {self.dipole}")
        if not -1.0 <= self.orientation <= 1.0:
            raise ValueError(f"orientation must lie in [-1, 1], got {self.orientation}")


@dataclass(frozen=True)
class CavitySpec:
    omega0: float = 1625.0
    theta_deg: float = 0.0
    n_eff: float = 0.5
    kappa: float = 0.0
    n_molecules: float = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"cavity cutoff omega0 must be > 0, got {self.omega0}")
        if not self.n_eff > 0:
            raise ValueError(f"n_eff must be > 0, got {self.n_eff}")
        if not self.kappa >= 0:
            raise ValueError(f"cavity decay kappa must be >= 0, got {self.kappa}")
        if not self.n_molecules >= 1:
            raise ValueError(f"molecule count must be >= 1, got {self.n_molecules}")
        # raises DomainError for evanescent angles
        cavity_frequency(self)


def _square(values, m: int, name: str) -> tuple:
    arr = np.zeros((m, m)) if values is None else np.asarray(values, dtype=float)
    if arr.shape != (m, m):
        raise ValueError(f"{name} must be {m}x{m}, got shape {arr.shape}")
    if not np.array_equal(arr, arr.T):
        raise ValueError(f"{name} must be symmetric")
    return tuple(tuple(float(x) for x in row) for row in arr)


@dataclass(frozen=True)
class SystemSpec:
    """Full parameter set for the cavity + m vibrational modes.

    ``couplings`` are the effective cavity couplings g~_i.  When left as
    ``None`` they are derived from the cavity geometry through
    :func:`coupling_from_geometry` and :func:`effective_coupling`.

    Dephasing of a coherence |a><b| is built from state linewidths
    (see :func:`dqcpol.polariton.state_linewidths`); ``dephasing`` picks the
    combination rule and a non-``None`` ``gamma_override`` replaces every
    coherence dephasing by that single value.
    """

    modes: tuple
    cavity: CavitySpec = field(default_factory=CavitySpec)
    scalar_coupling: tuple = None
    anharmonicity: tuple = None
    couplings: Optional[tuple] = None
    cross_anharmonicity: bool = True
    dephasing: str = "difference"
    gamma_override: Optional[float] = None
    cavity_leak_dipole: float = 0.0
    weak_coupling: str = "error"

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise ValueError("at least one vibrational mode is required")
        for md in modes:
            if not isinstance(md, VibrationalMode):
                raise TypeError("modes must be VibrationalMode instances")
        object.__setattr__(self, "modes", modes)
        m = len(modes)
        J = _square(self.scalar_coupling, m, "scalar_coupling")
        if any(J[i][i] != 0.0 for i in range(m)):
            raise ValueError("scalar_coupling must have a zero diagonal")
        object.__setattr__(self, "scalar_coupling", J)
        object.__setattr__(self, "anharmonicity", _square(self.anharmonicity, m, "anharmonicity"))
        if self.couplings is not None:
            g = tuple(float(x) for x in self.couplings)
            if len(g) != m:
                raise ValueError(f"expected {m} cavity couplings, got {len(g)}")
            if any(not x >= 0 for x in g):
                raise ValueError("cavity couplings must be >= 0")
            object.__setattr__(self, "couplings", g)
        if self.dephasing not in DEPHASING_MODELS:
            raise ValueError(f"dephasing must be one of {DEPHASING_MODELS}, got {self.dephasing!r}")
        if self.gamma_override is not None and not self.gamma_override >= 0:
            raise ValueError("gamma_override must be >= 0")
        if self.weak_coupling not in ("error", "warn"):
            raise ValueError("weak_coupling must be 'error' or 'warn'")

    @property
    def m(self) -> int:
        return len(self.modes)

    @property
    def J(self) -> np.ndarray:
        return np.array(self.scalar_coupling, dtype=float)

    @property
    def delta(self) -> np.ndarray:
        return np.array(self.anharmonicity, dtype=float)

    @property
    def omega_c(self) -> float:
        return cavity_frequency(self.cavity)

    def effective_couplings(self) -> np.ndarray:
        """g~_i per mode, direct values taking precedence over geometry."""
        if self.couplings is not None:
            return np.array(self.couplings, dtype=float)
        out = []
        for md in self.modes:
            g = coupling_from_geometry(md, self.cavity)
            try:
                # geometry coupling already carries sqrt(N)
                out.append(effective_coupling(g, 1.0, self.cavity.kappa, md.dephasing))
            except WeakCouplingError as exc:
                if self.weak_coupling == "error":
                    raise
                warnings.warn(f"{exc}; using zero coupling", RuntimeWarning, stacklevel=2)
                out.append(0.0)
        return np.array(out)

    def with_couplings(self, couplings: Sequence[float]) -> "SystemSpec":
        return replace(self, couplings=tuple(float(x) for x in couplings))

    def scaled_dipoles(self, s: float) -> "SystemSpec":
        modes = tuple(replace(md, dipole=md.dipole * s) for md in self.modes)
        return replace(self, modes=modes, cavity_leak_dipole=self.cavity_leak_dipole * s)


def cavity_frequency(cavity: CavitySpec) -> float:
    """Angle-dependent cavity frequency w0 * (1 - sin^2(theta)/n_eff^2)^(-1/2).

    The boundary case sin(theta) = n_eff is rejected even when rounding in
    ``sin`` leaves a residue of order machine epsilon.
    """
    s = math.sin(math.radians(cavity.theta_deg))
    x = 1.0 - s * s / cavity.n_eff**2
    if x <= EVANESCENT_TOL:
        raise DomainError(
            f"sin^2(theta)/n_eff^2 = {1.0 - x:.6g} >= 1 at theta={cavity.theta_deg} deg, "
            f"n_eff={cavity.n_eff}: evanescent regime, no propagating cavity mode"
        )
    return cavity.omega0 / math.sqrt(x)


def coupling_from_geometry(mode: VibrationalMode, cavity: CavitySpec) -> float:
    """Light-matter coupling in cm^-1 from the cavity mode volume.

    g = sqrt(N) (mu . e_c) sqrt(hbar w_c / (2 eps0 V)) with V = (lambda/n_eff)^3
    and lambda = 1/w_c.
    """
    wc = cavity_frequency(cavity)
    wavelength = 0.01 / wc  # m
    volume = (wavelength / cavity.n_eff) ** 3
    energy = sc.h * sc.c * 100.0 * wc  # J
    field_amp = math.sqrt(energy / (2.0 * sc.epsilon_0 * volume))
    g_joule = math.sqrt(cavity.n_molecules) * mode.dipole * DEBYE * mode.orientation * field_amp
    return abs(g_joule) / (sc.h * sc.c * 100.0)


def effective_coupling(g: float, n_molecules: float, kappa: float, gamma: float) -> float:
    """g~ = sqrt(N g^2 - (kappa - gamma)^2 / 4)."""
    radicand = n_molecules * g * g - 0.25 * (kappa - gamma) ** 2
    if radicand < 0:
        raise WeakCouplingError(
            f"weak coupling: N g^2 = {n_molecules * g * g:.6g} < (kappa-gamma)^2/4 = "
            f"{0.25 * (kappa - gamma) ** 2:.6g}"
        )
    return math.sqrt(radicand)


def detuning(mode: VibrationalMode, cavity: CavitySpec) -> float:
    return mode.frequency - cavity_frequency(cavity)
