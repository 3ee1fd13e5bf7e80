"""Shared helpers for the suite: seeded random states and channels."""

from __future__ import annotations

import numpy as np
import pytest

from losrkit import DensityMatrix, PureState


def random_pure(rng: np.random.Generator, dims) -> PureState:
    total = int(np.prod(dims))
    amp = rng.standard_normal(total) + 1j * rng.standard_normal(total)
    return PureState(tuple(dims), amp / np.linalg.norm(amp))


def random_density(rng: np.random.Generator, dims) -> DensityMatrix:
    total = int(np.prod(dims))
    g = rng.standard_normal((total, total)) + 1j * rng.standard_normal((total, total))
    rho = g @ g.conj().T
    return DensityMatrix(tuple(dims), rho / np.trace(rho).real)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def majorizes(high, low, tol: float = 1e-9) -> bool:
    """Cumulative-sum dominance of `low` by `high` (descending, zero-padded)."""
    a = np.sort(np.asarray(high, dtype=float))[::-1]
    b = np.sort(np.asarray(low, dtype=float))[::-1]
    n = max(a.size, b.size)
    a = np.pad(a, (0, n - a.size))
    b = np.pad(b, (0, n - b.size))
    return bool(np.all(np.cumsum(a) >= np.cumsum(b) - tol))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
