import numpy as np
import pytest

from dqcpol.model import CavitySpec, SystemSpec, VibrationalMode


def amide_one(gt=50.0, delta=15.0, **kw):
    """Single Amide-I mode at resonance with the cavity."""
    return SystemSpec((VibrationalMode(1625.0, 20.0),), CavitySpec(), anharmonicity=[[delta]],
                      couplings=(gt,), **kw)


def amide_two(gt=60.0, anharmonic=True, J=15.0, **kw):
    """Amide-I + Amide-II with the tabulated couplings and anharmonicities."""
    D = [[15.0, 10.0], [10.0, 11.0]] if anharmonic else [[0.0, 0.0], [0.0, 0.0]]
    return SystemSpec(
        (VibrationalMode(1625.0, 20.0), VibrationalMode(1545.0, 20.0)),
        CavitySpec(),
        scalar_coupling=[[0.0, J], [J, 0.0]],
        anharmonicity=D,
        couplings=(gt, gt),
        **kw,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
