"""Shared helpers for the test suite."""

import numpy as np
import pytest

from relaxed_polar.sampling import RngState, sample_rotations, sample_unit_quaternions


def haar_rotations(seed: int, n: int) -> np.ndarray:
    """Deterministic batch of Haar rotations for test inputs."""
    return sample_rotations(RngState(seed), n)


def haar_quaternions(seed: int, n: int) -> np.ndarray:
    return sample_unit_quaternions(RngState(seed), n)


def random_gl3(seed: int, n: int, half_range: float = 2.0, max_cond: float | None = None):
    """Deterministic proper-F test inputs: entries uniform in [-h, h), det > 1e-6,
    optionally capped condition number (keeps polar-factor roundoff well below
    the tolerances under test)."""
    rng = RngState(seed)
    out = []
    while len(out) < n:
        f = half_range * rng.symmetric_uniform(9).reshape(3, 3)
        if np.linalg.det(f) <= 1e-6:
            continue
        if max_cond is not None:
            s = np.linalg.svd(f, compute_uv=False)
            if s[0] / s[2] > max_cond:
                continue
        out.append(f)
    return out


@pytest.fixture
def rng42():
    return RngState(42)
