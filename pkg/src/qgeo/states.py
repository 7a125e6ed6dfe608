"""Density-matrix value types, parameterizations, and Hermitian matrix functions.

States live in three coordinate systems:

* the matrix itself (d x d complex Hermitian, unit trace, PSD),
* generalized coordinates ``xi`` in R^{d^2-1} (diagonal offsets first,
  then row-major upper-triangle pairs, real part before imaginary part),
* dual coordinates ``xihat`` obtained from the traceless part of ``log rho``.

For d=2 the generalized coordinates specialize to the Bloch ball as
``(xi_1, xi_2, xi_3) = (z, x, y)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    NotFaithful,
    NotHermitian,
    OutOfBall,
    WrongLength,
    WrongLevel,
)

# Rank / clamping thresholds (see module constants before touching these:
# eigensolver noise is O(1e-14), constructor tolerance is 1e-10).
EPS_RANK = 1e-12
HERM_TOL = 1e-10
PSD_TOL = 1e-10


def hermitize(m: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (m + m†)/2."""
    return (m + m.conj().T) / 2.0


def _check_square_complex(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise WrongLength(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise WrongLength("matrix entries must be finite")
    return m


@dataclass(frozen=True)
class DensityMatrix:
    """A quantum state: Hermitian, unit-trace, PSD matrix (validated)."""

    mat: np.ndarray

    def __post_init__(self):
        m = _check_square_complex(self.mat)
        herm_dev = float(np.max(np.abs(m - m.conj().T)))
        if herm_dev > HERM_TOL:
            raise NotHermitian(f"|m - m†| = {herm_dev:.3e} > {HERM_TOL}")
        m = hermitize(m)
        tr_dev = abs(np.trace(m).real - 1.0)
        if tr_dev > HERM_TOL:
            raise NotHermitian(f"|Tr - 1| = {tr_dev:.3e} > {HERM_TOL}")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -PSD_TOL:
            raise NotHermitian(f"min eigenvalue {lo:.3e} < -{PSD_TOL}")
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)


@dataclass(frozen=True)
class BlochVector:
    """One-qubit Bloch coordinates; pure states sit at r = 1."""

    x: float
    y: float
    z: float

    @property
    def r(self) -> float:
        return math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)


@dataclass(frozen=True)
class GeneralizedCoords:
    """Real coordinates xi of length d^2 - 1 for a Hermitian unit-trace matrix."""

    dim: int
    xi: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        if xi.shape != (self.dim ** 2 - 1,):
            raise WrongLength(
                f"xi must have length {self.dim ** 2 - 1}, got {xi.shape}"
            )
        xi = xi.copy()
        xi.flags.writeable = False
        object.__setattr__(self, "xi", xi)


@dataclass(frozen=True)
class DualCoords:
    """Dual coordinates xihat of length d^2 - 1 (Legendre image of xi)."""

    dim: int
    xihat: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.xihat, dtype=float)
        if v.shape != (self.dim ** 2 - 1,):
            raise WrongLength(
                f"xihat must have length {self.dim ** 2 - 1}, got {v.shape}"
            )
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "xihat", v)


class RankClass:
    """Numeric rank classification of a state."""

    PURE = "Pure"
    MIXED_NON_FAITHFUL = "MixedNonFaithful"
    FAITHFUL = "Faithful"


# ---------------------------------------------------------------------------
# eigendecomposition and matrix functions
# ---------------------------------------------------------------------------

def eig_hermitian(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose a Hermitian matrix; eigenvalues ascending.

    Returns (w, U) with m = U diag(w) U†.  Raises NotHermitian when the
    symmetry defect exceeds 1e-8.
    """
    m = _check_square_complex(m)
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > 1e-8:
        raise NotHermitian(f"symmetry defect {dev:.3e} > 1e-8")
    w, u = np.linalg.eigh(hermitize(m))
    return w, u


def matrix_fn(m: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply f to a Hermitian matrix through its eigenvalues: U diag(f(w)) U†."""
    w, u = eig_hermitian(m)
    return hermitize((u * f(w)) @ u.conj().T)


def matrix_log(m: np.ndarray) -> np.ndarray:
    """Matrix logarithm of a faithful (strictly positive) Hermitian matrix."""
    w, u = eig_hermitian(m)
    if w[0] <= EPS_RANK:
        raise DomainError(f"log needs all eigenvalues > {EPS_RANK}, got min {w[0]:.3e}")
    return hermitize((u * np.log(w)) @ u.conj().T)


def matrix_sqrt(m: np.ndarray) -> np.ndarray:
    """Matrix square root; eigenvalues in [-1e-10, 0) are clamped to 0."""
    w, u = eig_hermitian(m)
    if w[0] < -PSD_TOL:
        raise DomainError(f"sqrt needs eigenvalues >= -{PSD_TOL}, got min {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return hermitize((u * np.sqrt(w)) @ u.conj().T)


def matrix_exp(m: np.ndarray) -> np.ndarray:
    """Matrix exponential of a Hermitian matrix."""
    return matrix_fn(m, np.exp)


# ---------------------------------------------------------------------------
# Bloch ball (d = 2)
# ---------------------------------------------------------------------------

def from_bloch(b: BlochVector) -> DensityMatrix:
    """Build the one-qubit state [[ (1+z)/2, (x-iy)/2 ], [ (x+iy)/2, (1-z)/2 ]]."""
    if b.r > 1.0 + 1e-12:
        raise OutOfBall(f"Bloch radius {b.r} exceeds 1")
    m = np.array(
        [
            [(1.0 + b.z) / 2.0, (b.x - 1j * b.y) / 2.0],
            [(b.x + 1j * b.y) / 2.0, (1.0 - b.z) / 2.0],
        ],
        dtype=complex,
    )
    return DensityMatrix(m)


def to_bloch(rho: DensityMatrix) -> BlochVector:
    """Read Bloch coordinates off a one-qubit state."""
    if rho.dim != 2:
        raise WrongLevel(f"Bloch coordinates need d = 2, got d = {rho.dim}")
    m = rho.mat
    return BlochVector(
        x=2.0 * m[0, 1].real,
        y=-2.0 * m[0, 1].imag,
        z=(m[0, 0] - m[1, 1]).real,
    )


# ---------------------------------------------------------------------------
# generalized coordinates
# ---------------------------------------------------------------------------
#
# Flat index map (0-based, length d^2-1):
#   k = 0 .. d-2          diagonal: m[k,k] = (xi_k + 1)/d,
#                         m[d-1,d-1] = (1 - sum_{k<d-1} xi_k)/d
#   then row-major upper triangle (j < l), two slots per entry:
#   m[j,l] = (xi_a - i xi_{a+1})/2,  a advancing by 2 per entry.

def _offdiag_pairs(d: int):
    for j in range(d):
        for l in range(j + 1, d):
            yield j, l


def from_coords(c: GeneralizedCoords) -> np.ndarray:
    """Hermitian unit-trace matrix from coordinates. Not necessarily PSD."""
    d = c.dim
    xi = c.xi
    m = np.zeros((d, d), dtype=complex)
    for k in range(d - 1):
        m[k, k] = (xi[k] + 1.0) / d
    m[d - 1, d - 1] = (1.0 - np.sum(xi[: d - 1])) / d
    a = d - 1
    for j, l in _offdiag_pairs(d):
        m[j, l] = (xi[a] - 1j * xi[a + 1]) / 2.0
        m[l, j] = (xi[a] + 1j * xi[a + 1]) / 2.0
        a += 2
    return m


def to_coords(m: np.ndarray) -> GeneralizedCoords:
    """Coordinates of a Hermitian unit-trace matrix (inverse of from_coords)."""
    m = _check_square_complex(m)
    d = m.shape[0]
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > 1e-8:
        raise NotHermitian(f"symmetry defect {dev:.3e}")
    xi = np.empty(d * d - 1)
    for k in range(d - 1):
        xi[k] = d * m[k, k].real - 1.0
    a = d - 1
    for j, l in _offdiag_pairs(d):
        xi[a] = 2.0 * m[j, l].real
        xi[a + 1] = -2.0 * m[j, l].imag
        a += 2
    return GeneralizedCoords(d, xi)


def rank_class(rho: DensityMatrix, eps_rank: float = EPS_RANK) -> str:
    """Classify a state as Pure / MixedNonFaithful / Faithful by numeric rank."""
    rank = int(np.sum(rho.eigvals() > eps_rank))
    if rank <= 1:
        return RankClass.PURE
    if rank == rho.dim:
        return RankClass.FAITHFUL
    return RankClass.MIXED_NON_FAITHFUL


def is_faithful(rho: DensityMatrix, eps_rank: float = EPS_RANK) -> bool:
    return bool(rho.eigvals()[0] > eps_rank)


# ---------------------------------------------------------------------------
# dual (Legendre) coordinates
# ---------------------------------------------------------------------------
#
# The dual matrix is the traceless part of log(rho), up to a global sign
# convention: rhohat = sign * (log rho - (1/d) Tr(log rho) I).  The default
# sign +1 is the one under which the numerical duality identity
# D(rho||sigma) = Dhat(sigmahat||rhohat) holds for every d (for d = 2 both
# signs pass because Tr exp of a traceless 2x2 matrix is even).
#
# The coordinate reading of the dual matrix mirrors the primal layout:
#   xihat_k   = (rhohat[k,k] - rhohat[d-1,d-1]) / d   (k = 0 .. d-2)
#   xihat_a   = Re rhohat[j,l],  xihat_{a+1} = -Im rhohat[j,l]
# which makes {primal basis, dual basis} biorthogonal and the inner product
# <xi, xihat> equal to Tr((rho - I/d) rhohat).

DUAL_SIGN_DEFAULT = +1


def dual_matrix_to_coords(rhohat: np.ndarray) -> DualCoords:
    d = rhohat.shape[0]
    v = np.empty(d * d - 1)
    for k in range(d - 1):
        v[k] = (rhohat[k, k].real - rhohat[d - 1, d - 1].real) / d
    a = d - 1
    for j, l in _offdiag_pairs(d):
        v[a] = rhohat[j, l].real
        v[a + 1] = -rhohat[j, l].imag
        a += 2
    return DualCoords(d, v)


def dual_coords_to_matrix(c: DualCoords) -> np.ndarray:
    d = c.dim
    v = c.xihat
    s = np.sum(v[: d - 1])
    m = np.zeros((d, d), dtype=complex)
    for k in range(d - 1):
        m[k, k] = d * v[k] - s
    m[d - 1, d - 1] = -s
    a = d - 1
    for j, l in _offdiag_pairs(d):
        m[j, l] = v[a] - 1j * v[a + 1]
        m[l, j] = v[a] + 1j * v[a + 1]
        a += 2
    return m


def to_dual(rho: DensityMatrix, sign: int = DUAL_SIGN_DEFAULT) -> DualCoords:
    """Dual coordinates of a faithful state: read off sign*(log rho - (Tr log rho / d) I)."""
    if not is_faithful(rho):
        raise NotFaithful("to_dual needs a faithful state")
    lg = matrix_log(rho.mat)
    t = np.trace(lg).real / rho.dim
    rhohat = sign * (lg - t * np.eye(rho.dim))
    return dual_matrix_to_coords(rhohat)


def from_dual(c: DualCoords, sign: int = DUAL_SIGN_DEFAULT) -> DensityMatrix:
    """Invert to_dual: rho = exp(sign * rhohat) / Tr exp(sign * rhohat)."""
    m = sign * dual_coords_to_matrix(c)
    # subtract the max eigenvalue before exponentiating (cancels on normalization)
    w, u = eig_hermitian(m)
    ew = np.exp(w - w[-1])
    e = hermitize((u * ew) @ u.conj().T)
    return DensityMatrix(e / np.trace(e).real)


# ---------------------------------------------------------------------------
# JSON encoding: {"dim": d, "re": [[...]], "im": [[...]]}
# ---------------------------------------------------------------------------

def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    d = int(obj["dim"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.shape != (d, d) or im.shape != (d, d):
        raise WrongLength(f"matrix JSON arrays must be {d}x{d}")
    return re + 1j * im


def matrix_json_dumps(m: np.ndarray) -> str:
    return json.dumps(matrix_to_json(m), sort_keys=True)
