import numpy as np
import pytest

from audiofp.simulate import PopulationConfig, generate_population


def naive_dft(x):
    """O(n^2) reference DFT, independent of the radix-2 implementation."""
    x = np.asarray(x, dtype=np.complex128)
    n = len(x)
    k = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return w @ x


@pytest.fixture(scope="session")
def quiet_population():
    """Fickleness-0 population: every device yields one digest per vector."""
    cfg = PopulationConfig(
        num_users=60,
        num_classes=8,
        seed=101,
        iterations=30,
        family_fickleness={"chrome": (1, 0.0), "firefox": (1, 0.0)},
    )
    return generate_population(cfg)


@pytest.fixture(scope="session")
def fickle_population():
    """Small fickle population for stability/match shape checks."""
    cfg = PopulationConfig(
        num_users=120,
        num_classes=12,
        seed=202,
        iterations=30,
        family_fickleness={"chrome": (26, 0.12), "firefox": (26, 0.005)},
    )
    return generate_population(cfg)
