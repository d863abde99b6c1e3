import numpy as np
import pytest

from landscape_lattice.operator import HoppingProfile, PotentialVector, assemble


def random_profile(rng, n, zero_prob=0.3):
    coeffs = rng.uniform(0.0, 1.0, max(n - 1, 0))
    coeffs[rng.random(coeffs.size) < zero_prob] = 0.0
    return HoppingProfile(coeffs, n)


def random_strict_operator(rng, n_max=64, margin=(0.05, 2.0)):
    n = int(rng.integers(2, n_max + 1))
    profile = random_profile(rng, n)
    v = profile.hop_sum + rng.uniform(*margin, n)
    return assemble(PotentialVector(v), profile)


def random_soft_operator(rng, n_max=64):
    n = int(rng.integers(2, n_max + 1))
    profile = random_profile(rng, n)
    if profile.is_zero:
        coeffs = profile.coefficients.copy()
        coeffs[rng.integers(n - 1)] = rng.uniform(0.1, 1.0)
        profile = HoppingProfile(coeffs, n)
    return assemble(PotentialVector.constant(n, profile.hop_sum), profile)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
