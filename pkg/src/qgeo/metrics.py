"""Pseudo-distances and potentials on quantum states.

Implements the quantum divergence D(sigma||rho) = Tr sigma (log sigma - log rho),
its one-qubit closed form, Bures and Fubini-Study distances, parameter-space
Euclidean distance, the sphere geodesic, von Neumann entropy, and the convex
potential phi(xi) = Tr rho log rho with its Legendre-dual potential
psi(xihat) = log Tr exp(rhohat).  Natural log throughout; divergences are in
nats.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import (
    DimMismatch,
    NotFaithful,
    NotOnSphere,
    NotPure,
    SecondArgNotFaithful,
    SiteIsPure,
)
from .states import (
    EPS_RANK,
    BlochVector,
    DensityMatrix,
    DualCoords,
    GeneralizedCoords,
    dual_coords_to_matrix,
    dual_matrix_to_coords,
    eig_hermitian,
    from_coords,
    hermitize,
    matrix_log,
    to_bloch,
    to_coords,
)


class MetricKind(Enum):
    """The measures compared by the Voronoi coincidence suite."""

    EUCLIDEAN_PARAM = "euclid"
    BURES = "bures"
    FUBINI_STUDY = "fs"
    GEODESIC_SPHERE = "geodesic"
    # the divergence is asymmetric: two distances to a site
    DIVERGENCE_X_FIRST = "div-x-first"        # d(x, s) = D(x||s)
    DIVERGENCE_SITE_FIRST = "div-site-first"  # d(x, s) = D(s||x)
    DIVERGENCE_DUAL = "div-dual"              # d(x, s) = Dhat(xhat||shat)


PURE_TOL = 1e-9  # purity / sphere-membership tolerance for FS and geodesic


def _entropy_sum(eigvals: np.ndarray) -> float:
    """Sum of lambda*log(lambda) with 0 log 0 := 0."""
    w = np.clip(eigvals, 0.0, None)
    pos = w > EPS_RANK
    return float(np.sum(w[pos] * np.log(w[pos])))


def trace_log_second(sigma_mat: np.ndarray, log_rho: np.ndarray) -> float:
    """Tr(sigma log_rho), real part."""
    return float(np.trace(sigma_mat @ log_rho).real)


def divergence(sigma: DensityMatrix, rho: DensityMatrix) -> float:
    """Quantum divergence D(sigma||rho) = Tr sigma (log sigma - log rho), in nats.

    The second argument must be faithful; the first may have zero eigenvalues.
    """
    if sigma.dim != rho.dim:
        raise DimMismatch(f"dims differ: {sigma.dim} vs {rho.dim}")
    w_rho = rho.eigvals()
    if w_rho[0] <= EPS_RANK:
        raise SecondArgNotFaithful(
            f"D(.||rho) needs faithful rho; min eigenvalue {w_rho[0]:.3e}"
        )
    s_term = _entropy_sum(sigma.eigvals())
    return s_term - trace_log_second(sigma.mat, matrix_log(rho.mat))


def _tr_rho_log_rho_qubit(r: float) -> float:
    """Tr rho log rho for a one-qubit state of Bloch radius r (0 log 0 := 0)."""
    out = 0.0
    for lam in ((1.0 + r) / 2.0, (1.0 - r) / 2.0):
        if lam > 0.0:
            out += lam * math.log(lam)
    return out


def divergence_qubit_closed(rho: BlochVector, sigma: BlochVector) -> float:
    """Closed-form one-qubit divergence D(rho||sigma) in Bloch coordinates.

    For sigma away from the origin:

        Tr rho log rho - (1/2) log((1 - rt^2)/4)
                       - (1/(2 rt)) log((1+rt)/(1-rt)) (x xt + y yt + z zt)

    and at the origin the last two terms degenerate to +log 2, which is the
    limit of the generic branch.  The site sigma must be mixed (rt < 1).
    """
    rt = sigma.r
    if rt >= 1.0 - 1e-12:
        raise SiteIsPure(f"second argument has Bloch radius {rt} >= 1")
    r = min(rho.r, 1.0)
    lead = _tr_rho_log_rho_qubit(r)
    if rt == 0.0:
        return lead - 0.5 * math.log(1.0 / 4.0)
    dot = rho.x * sigma.x + rho.y * sigma.y + rho.z * sigma.z
    return (
        lead
        - 0.5 * math.log((1.0 - rt * rt) / 4.0)
        - math.log((1.0 + rt) / (1.0 - rt)) / (2.0 * rt) * dot
    )


def _purity(rho: DensityMatrix) -> float:
    return float(np.trace(rho.mat @ rho.mat).real)


def _is_pure(rho: DensityMatrix, tol: float = PURE_TOL) -> bool:
    return _purity(rho) >= 1.0 - tol


def _bures_general(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Bures via the full matrix formula sqrt(1 - Tr sqrt(sqrt(sigma) rho sqrt(sigma)))."""
    w_s, u_s = eig_hermitian(sigma.mat)
    sqrt_s = hermitize((u_s * np.sqrt(np.clip(w_s, 0.0, None))) @ u_s.conj().T)
    inner = hermitize(sqrt_s @ rho.mat @ sqrt_s)
    w = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    fid = float(np.sum(np.sqrt(w)))
    return math.sqrt(max(1.0 - fid, 0.0))


def bures(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Bures distance sqrt(1 - Tr sqrt(sqrt(sigma) rho sqrt(sigma))).

    When one argument is (numerically) pure the fidelity term collapses to
    sqrt(Tr rho sigma) exactly, which avoids the nested matrix square roots.
    """
    if rho.dim != sigma.dim:
        raise DimMismatch(f"dims differ: {rho.dim} vs {sigma.dim}")
    if _is_pure(sigma, 1e-12) or _is_pure(rho, 1e-12):
        # pure projector P: sqrt(P rho P) = sqrt(Tr rho P) P
        overlap = float(np.trace(rho.mat @ sigma.mat).real)
        fid = math.sqrt(max(overlap, 0.0))
        return math.sqrt(max(1.0 - fid, 0.0))
    return _bures_general(rho, sigma)


def fubini_study(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Fubini-Study distance arccos sqrt(Tr rho sigma) for pure states."""
    if rho.dim != sigma.dim:
        raise DimMismatch(f"dims differ: {rho.dim} vs {sigma.dim}")
    if not _is_pure(rho) or not _is_pure(sigma):
        raise NotPure("Fubini-Study distance is defined for pure states only")
    t = float(np.trace(rho.mat @ sigma.mat).real)
    t = min(max(t, 0.0), 1.0)
    return math.acos(math.sqrt(t))


def euclidean_param(a: GeneralizedCoords, b: GeneralizedCoords) -> float:
    """Euclidean distance between generalized coordinate vectors."""
    if a.dim != b.dim:
        raise DimMismatch(f"dims differ: {a.dim} vs {b.dim}")
    return float(np.linalg.norm(a.xi - b.xi))


def geodesic_sphere(a: BlochVector, b: BlochVector) -> float:
    """Great-circle distance between two pure one-qubit states."""
    if abs(a.r - 1.0) > PURE_TOL or abs(b.r - 1.0) > PURE_TOL:
        raise NotOnSphere("geodesic distance needs unit Bloch vectors")
    dot = a.x * b.x + a.y * b.y + a.z * b.z
    return math.acos(min(max(dot, -1.0), 1.0))


def entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy S(rho) = -Tr rho log rho, in nats."""
    return -_entropy_sum(rho.eigvals())


# ---------------------------------------------------------------------------
# Bregman potentials
# ---------------------------------------------------------------------------

def _faithful_from_coords(c: GeneralizedCoords) -> np.ndarray:
    m = from_coords(c)
    w = np.linalg.eigvalsh(hermitize(m))
    if w[0] <= EPS_RANK:
        raise NotFaithful(f"coordinates give min eigenvalue {w[0]:.3e}")
    return m


def phi_potential(c: GeneralizedCoords) -> float:
    """Convex potential phi(xi) = Tr rho log rho (negative entropy)."""
    m = _faithful_from_coords(c)
    return _entropy_sum(np.linalg.eigvalsh(hermitize(m)))


def grad_phi(c: GeneralizedCoords) -> DualCoords:
    """Gradient of phi in xi-coordinates, returned as dual coordinates.

    d phi/d xi_i = Tr(B_i log rho) where B_i is the coordinate basis matrix;
    by biorthogonality this is exactly the dual-coordinate reading of the
    traceless part of log rho.
    """
    m = _faithful_from_coords(c)
    return dual_matrix_to_coords(matrix_log(m))


def psi_potential(c: DualCoords) -> float:
    """Dual potential psi(xihat) = log Tr exp(rhohat), stabilized."""
    w = np.linalg.eigvalsh(hermitize(dual_coords_to_matrix(c)))
    top = w[-1]
    return float(top + math.log(np.sum(np.exp(w - top))))


def grad_psi(c: DualCoords) -> GeneralizedCoords:
    """Gradient of psi: the xi-coordinates of exp(rhohat)/Tr exp(rhohat)."""
    w, u = eig_hermitian(dual_coords_to_matrix(c))
    ew = np.exp(w - w[-1])
    tau = hermitize((u * ew) @ u.conj().T)
    tau /= np.trace(tau).real
    return to_coords(tau)


def dual_divergence(a: DualCoords, b: DualCoords) -> float:
    """Bregman divergence of psi: Dhat(a||b) = psi(a) - psi(b) - <a-b, grad psi(b)>."""
    if a.dim != b.dim:
        raise DimMismatch(f"dims differ: {a.dim} vs {b.dim}")
    g = grad_psi(b).xi
    return psi_potential(a) - psi_potential(b) - float(np.dot(a.xihat - b.xihat, g))


# ---------------------------------------------------------------------------
# bisector gaps
# ---------------------------------------------------------------------------

def shrink_toward_center(rho: DensityMatrix, a: float) -> DensityMatrix:
    """Radial shrink rho(a) = I/d + a (rho - I/d); a < 1 makes the state faithful."""
    d = rho.dim
    eye = np.eye(d) / d
    return DensityMatrix(eye + a * (rho.mat - eye))


def metric_distance(kind: MetricKind, x: DensityMatrix, site: DensityMatrix) -> float:
    """Distance from sample x to a site under the chosen measure."""
    if kind is MetricKind.EUCLIDEAN_PARAM:
        return euclidean_param(to_coords(x.mat), to_coords(site.mat))
    if kind is MetricKind.BURES:
        return bures(x, site)
    if kind is MetricKind.FUBINI_STUDY:
        return fubini_study(x, site)
    if kind is MetricKind.GEODESIC_SPHERE:
        return geodesic_sphere(to_bloch(x), to_bloch(site))
    if kind is MetricKind.DIVERGENCE_X_FIRST:
        return divergence(x, site)
    if kind is MetricKind.DIVERGENCE_SITE_FIRST:
        return divergence(site, x)
    if kind is MetricKind.DIVERGENCE_DUAL:
        from .states import to_dual

        return dual_divergence(to_dual(x), to_dual(site))
    raise ValueError(f"unknown metric kind {kind}")


def bisector_gap(
    kind: MetricKind,
    site1: DensityMatrix,
    site2: DensityMatrix,
    x: DensityMatrix,
) -> float:
    """Signed gap d(x, site1) - d(x, site2); its zero set is the bisector."""
    return metric_distance(kind, x, site1) - metric_distance(kind, x, site2)
