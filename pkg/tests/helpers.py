"""Shared random-state generators for the test suite (seeded by the caller)."""

from __future__ import annotations

import numpy as np

from qgeo.states import BlochVector, DensityMatrix, from_bloch


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


def random_density(rng: np.random.Generator, d: int) -> DensityMatrix:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = a @ a.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_faithful(rng: np.random.Generator, d: int, floor: float = 0.05) -> DensityMatrix:
    rho = random_density(rng, d)
    m = (1.0 - floor) * rho.mat + floor * np.eye(d) / d
    return DensityMatrix(m)


def random_pure(rng: np.random.Generator, d: int) -> DensityMatrix:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


def random_bloch(rng: np.random.Generator, rmax: float = 1.0) -> BlochVector:
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    r = rmax * rng.uniform() ** (1.0 / 3.0)
    return BlochVector(*(r * v))


def random_bloch_pure(rng: np.random.Generator) -> BlochVector:
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return BlochVector(*v)


def random_pure_qubit(rng: np.random.Generator) -> DensityMatrix:
    return from_bloch(random_bloch_pure(rng))
