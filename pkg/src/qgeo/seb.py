"""Metric-generic smallest enclosing balls via Welzl's move-to-front recursion.

Two concrete engines share one driver:

* Euclidean vectors, with an exact circumsphere subsolver (linear solve);
* quantum states under the divergence D(point||center), where the ball
  through a boundary set R is found by graduated quadratic penalty:

      minimize  D(s_1||rho) + A * sum_k (D(s_k||rho) - D(s_{k+1}||rho))^2

  over the generalized coordinates of rho, warm-starting as A grows.
  (The source formulation rewards constraint violation if the penalty term
  is subtracted; it must be added.)

Boundary sets are capped at d^2 - 1 states by default; a run that demands
more surfaces TooManyBoundary instead of guessing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import Degenerate, SubsolverFailed, TooManyBoundary
from .mesh import PointSet
from .metrics import MetricKind, _entropy_sum
from .states import DensityMatrix, hermitize, to_coords

TOL_EQ = 1e-6          # equal-divergence residual on boundary sets
FAITHFUL_FLOOR = 1e-9  # centers are kept at least this far inside the PSD cone
EPS_MIX = 1e-9


@dataclass(frozen=True)
class SebConfig:
    penalty_start: float = 10.0
    penalty_growth: float = 10.0
    penalty_max: float = 1e6
    inner_tol: float = 1e-9
    membership_rel: float = 1e-9
    membership_abs: float = 1e-12
    shuffle_seed: int = 0
    max_boundary: int | None = None  # default: d^2 - 1 (divergence), dim + 1 (euclid)


@dataclass(frozen=True)
class DivergenceBall:
    center: DensityMatrix
    radius: float
    support: tuple[int, ...]


@dataclass(frozen=True)
class EuclideanBall:
    center: np.ndarray
    radius: float
    support: tuple[int, ...]


@dataclass
class SebStats:
    boundary_solves: int = 0
    penalty_retries: int = 0
    subsolver_failures: int = 0
    capped_returns: int = 0


@dataclass(frozen=True)
class _DivBallRun:
    """Ball record used inside a Welzl run; caches log(center) for membership."""

    center: DensityMatrix
    radius: float
    support: tuple[int, ...]
    log_center: np.ndarray


# ---------------------------------------------------------------------------
# coordinate basis (cached per dimension) for fast rho(xi) and gradients
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _basis(dim: int) -> np.ndarray:
    """Basis tensor B with rho(xi) = I/d + sum_i xi_i B[i]; layout as in states."""
    n = dim * dim - 1
    b = np.zeros((n, dim, dim), dtype=complex)
    for k in range(dim - 1):
        b[k, k, k] = 1.0 / dim
        b[k, dim - 1, dim - 1] = -1.0 / dim
    a = dim - 1
    for j in range(dim):
        for l in range(j + 1, dim):
            b[a, j, l] = 0.5
            b[a, l, j] = 0.5
            b[a + 1, j, l] = -0.5j
            b[a + 1, l, j] = 0.5j
            a += 2
    return b


def _rho_of_xi(xi: np.ndarray, dim: int) -> np.ndarray:
    return np.eye(dim) / dim + np.tensordot(xi, _basis(dim), axes=1)


def _log_divided_differences(w: np.ndarray) -> np.ndarray:
    """Loewner matrix of log at eigenvalues w: (log wi - log wj)/(wi - wj)."""
    lw = np.log(w)
    dw = w[:, None] - w[None, :]
    near = np.abs(dw) < 1e-12 * np.maximum(w[:, None], w[None, :])
    safe = np.where(near, 1.0, dw)
    return np.where(near, 2.0 / (w[:, None] + w[None, :]),
                    (lw[:, None] - lw[None, :]) / safe)


def _divergence_terms(
    xi: np.ndarray,
    dim: int,
    sigmas: np.ndarray,
    s_terms: np.ndarray,
    want_grad: bool = True,
) -> tuple[np.ndarray, np.ndarray | None, float] | None:
    """D(s_k||rho(xi)) for all k, their gradients in xi, and min eig of rho.

    sigmas is a stacked (k, d, d) array.  Returns None when rho(xi) leaves
    the faithful cone.
    """
    rho = _rho_of_xi(xi, dim)
    w, u = np.linalg.eigh(rho)
    if w[0] <= 1e-12:
        return None
    lw = np.log(w)
    uc = u.conj().T
    t = np.matmul(np.matmul(uc, sigmas), u)  # (k, d, d)
    vals = s_terms - np.einsum("kaa,a->k", t, lw).real
    grads = None
    if want_grad:
        g = _log_divided_differences(w)
        wmats = np.matmul(np.matmul(u, g[None, :, :] * t), uc)
        # d/dxi_i Tr(sigma_k log rho) = Tr(W_k B_i)
        grads = -np.einsum("ijk,mkj->mi", _basis(dim), wmats).real
    return vals, grads, float(w[0])


def _mix_to_faithful(mat: np.ndarray, dim: int) -> np.ndarray:
    """Pull a state into the open faithful cone by mixing with I/d."""
    w = np.linalg.eigvalsh(hermitize(mat))
    if w[0] >= FAITHFUL_FLOOR:
        return mat
    return (1.0 - EPS_MIX) * mat + EPS_MIX * np.eye(dim) / dim


# ---------------------------------------------------------------------------
# quasi-Newton with backtracking, feasibility-aware
# ---------------------------------------------------------------------------

def _bfgs(fun_grad, x0: np.ndarray, gtol: float, max_iter: int = 300):
    """BFGS with Armijo backtracking; fun_grad returns (f, g) or None (infeasible)."""
    x = np.asarray(x0, dtype=float)
    res = fun_grad(x)
    if res is None:
        raise SubsolverFailed("infeasible start for the inner optimizer")
    f, g = res
    n = len(x)
    h = np.eye(n)
    restarted = False
    for _ in range(max_iter):
        if np.max(np.abs(g)) < gtol:
            return x, f, g, True
        p = -h @ g
        slope = float(np.dot(p, g))
        if slope >= 0.0:
            h = np.eye(n)
            p = -g
            slope = -float(np.dot(g, g))
        t = 1.0
        accepted = None
        while t > 1e-16:
            cand = x + t * p
            r = fun_grad(cand)
            if r is not None and r[0] <= f + 1e-4 * t * slope:
                accepted = (cand, r)
                break
            t *= 0.5  # includes steps that left the faithful cone
        if accepted is None:
            if restarted:
                return x, f, g, False
            h = np.eye(n)
            restarted = True
            continue
        xn, (fn, gn) = accepted
        s = xn - x
        y = gn - g
        sy = float(np.dot(s, y))
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            hy = h @ y
            rho = 1.0 / sy
            h = (
                h
                - rho * (np.outer(s, hy) + np.outer(hy, s))
                + rho * rho * (float(np.dot(y, hy)) + sy) * np.outer(s, s)
            )
        x, f, g = xn, fn, gn
    return x, f, g, bool(np.max(np.abs(g)) < gtol)


# ---------------------------------------------------------------------------
# boundary subsolvers
# ---------------------------------------------------------------------------

def boundary_ball_euclid(r_points: np.ndarray) -> EuclideanBall:
    """Smallest ball with every point of R on its boundary (exact circumsphere).

    The center lies in the affine hull of R; solved from the Gram system of
    the offsets.  R must be affinely independent.
    """
    pts = np.atleast_2d(np.asarray(r_points, dtype=float))
    m = pts.shape[0]
    if m == 1:
        return EuclideanBall(pts[0].copy(), 0.0, (0,))
    p0 = pts[0]
    u = pts[1:] - p0
    gram = u @ u.T
    rhs = 0.5 * np.sum(u * u, axis=1)
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        raise Degenerate("boundary points are affinely dependent")
    if not np.all(np.isfinite(coef)) or np.linalg.cond(gram) > 1e12:
        raise Degenerate("boundary points are (numerically) affinely dependent")
    center = p0 + coef @ u
    radii = np.linalg.norm(pts - center, axis=1)
    return EuclideanBall(center, float(np.max(radii)), tuple(range(m)))


def boundary_ball_divergence(
    r_states: list[DensityMatrix],
    cfg: SebConfig | None = None,
    stats: SebStats | None = None,
) -> DivergenceBall:
    """Divergence ball through R: minimize D(s_1||rho) s.t. equal divergences.

    Solved by graduated quadratic penalty over the xi-coordinates of rho with
    warm starts across the penalty schedule.  The returned ball satisfies the
    equal-divergence chain within TOL_EQ or SubsolverFailed is raised.
    """
    cfg = cfg or SebConfig()
    if not r_states:
        raise SubsolverFailed("empty boundary set")
    dim = r_states[0].dim
    if len(r_states) == 1:
        center = DensityMatrix(_mix_to_faithful(r_states[0].mat, dim))
        rad = _divergence_point(r_states[0].mat, center.mat)
        return DivergenceBall(center, rad, (0,))

    sigmas = np.stack([s.mat for s in r_states])
    s_terms = np.array([_entropy_sum(np.linalg.eigvalsh(s)) for s in sigmas])
    k = len(sigmas)

    def objective(a_pen: float):
        def fg(xi):
            out = _divergence_terms(xi, dim, sigmas, s_terms)
            if out is None:
                return None
            vals, grads, _ = out
            diffs = vals[:-1] - vals[1:]
            f = vals[0] + a_pen * float(np.dot(diffs, diffs))
            g = grads[0] + 2.0 * a_pen * (
                diffs @ (grads[:-1] - grads[1:])
            )
            return f, g

        return fg

    def solve_from(x0, gtol, max_iter):
        x = x0
        a_pen = cfg.penalty_start
        while a_pen <= cfg.penalty_max * (1.0 + 1e-12):
            x, _, _, _ = _bfgs(objective(a_pen), x, gtol, max_iter)
            a_pen *= cfg.penalty_growth
        return x

    mean = _mix_to_faithful(sigmas.sum(axis=0) / k, dim)
    x0 = to_coords(mean).xi.copy()
    rng = np.random.default_rng(cfg.shuffle_seed + 7919)
    best = None
    for attempt in range(3):
        if attempt > 0:
            if stats is not None:
                stats.penalty_retries += 1
            wts = rng.dirichlet(np.ones(k))
            start = _mix_to_faithful(np.einsum("k,kab->ab", wts, sigmas), dim)
            x0 = to_coords(start).xi.copy()
        # a loose penalty pass positions the iterate; hull-Newton supplies
        # the precision
        tight = attempt > 0
        x = solve_from(
            x0,
            gtol=max(cfg.inner_tol, 1e-9 if tight else 1e-5),
            max_iter=300 if tight else 40,
        )
        out = _divergence_terms(x, dim, sigmas, s_terms, want_grad=False)
        if out is None:
            continue
        vals = out[0]
        refined = _hull_refine(x, sigmas, s_terms, dim)
        if refined is not None:
            cand_mat, vals_r = refined
            resid_r = float(np.max(vals_r) - np.min(vals_r))
            if best is None or resid_r < best[2]:
                best = (cand_mat, vals_r, resid_r)
        resid = float(np.max(vals) - np.min(vals))
        if best is None or resid < best[2]:
            best = (_rho_of_xi(x, dim), vals, resid)
        if best[2] <= TOL_EQ:
            break
    if best is None or best[2] > TOL_EQ:
        if stats is not None:
            stats.subsolver_failures += 1
        resid = float("nan") if best is None else best[2]
        raise SubsolverFailed(
            f"equal-divergence residual {resid:.3e} > {TOL_EQ} for |R|={k}"
        )
    mat, vals, _ = best
    center = DensityMatrix(_mix_to_faithful(mat, dim))
    return DivergenceBall(center, float(np.max(vals)), tuple(range(k)))


def _hull_refine(
    xi_start: np.ndarray,
    sigmas: list[np.ndarray],
    s_terms: np.ndarray,
    dim: int,
    max_iter: int = 40,
) -> tuple[np.ndarray, np.ndarray] | None:
    """Damped Newton on the affine hull of the boundary states.

    Stationarity of the constrained problem forces the center into the
    affine hull of R (the dual picture is a convex program over hyperplane
    intersections), so the equal-divergence chain reduces to k-1 equations
    in the k-1 free hull coefficients.  Returns (center matrix, divergence
    values) at the root, or None when Newton fails.
    """
    k = len(sigmas)
    if k < 2:
        return None
    base = sigmas[-1]
    dirs = sigmas[:-1] - base[None, :, :]  # d rho / d alpha_m, shape (k-1, d, d)

    # fit hull coefficients to the penalty solution (fall back to barycenter)
    target = _rho_of_xi(xi_start, dim) - base
    amat = dirs.reshape(k - 1, -1).T
    alpha, *_ = np.linalg.lstsq(
        np.concatenate([amat.real, amat.imag]),
        np.concatenate([target.ravel().real, target.ravel().imag]),
        rcond=None,
    )
    if not np.all(np.isfinite(alpha)):
        alpha = np.full(k - 1, 1.0 / k)

    def evaluate(a):
        rho = hermitize(base + np.einsum("m,mab->ab", a, dirs))
        w, u = np.linalg.eigh(rho)
        if w[0] <= 1e-12:
            return None
        lw = np.log(w)
        uc = u.conj().T
        g = _log_divided_differences(w)
        t = np.matmul(np.matmul(uc, sigmas), u)
        vals = s_terms - np.einsum("kaa,a->k", t, lw).real
        wmats = np.matmul(np.matmul(u, g[None, :, :] * t), uc)
        f = vals[:-1] - vals[1:]
        jac = -np.einsum("jab,mba->jm", wmats[:-1] - wmats[1:], dirs).real
        return rho, vals, f, jac

    out = evaluate(alpha)
    if out is None:
        alpha = np.full(k - 1, 1.0 / k)
        out = evaluate(alpha)
        if out is None:
            return None
    rho, vals, f, jac = out
    for _ in range(max_iter):
        fn = float(np.max(np.abs(f)))
        if fn < 1e-12:
            break
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        t = 1.0
        improved = False
        while t > 1e-10:
            cand = evaluate(alpha + t * step)
            if cand is not None and np.max(np.abs(cand[2])) < fn:
                alpha = alpha + t * step
                rho, vals, f, jac = cand
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    if float(np.max(np.abs(f))) > 1e-9:
        return None
    return rho, vals


def _divergence_point(sigma: np.ndarray, center: np.ndarray) -> float:
    w, u = np.linalg.eigh(hermitize(center))
    log_c = (u * np.log(w)) @ u.conj().T
    s_term = _entropy_sum(np.linalg.eigvalsh(hermitize(sigma)))
    return s_term - float(np.trace(sigma @ log_c).real)


# ---------------------------------------------------------------------------
# Welzl move-to-front driver (generic over the boundary solver)
# ---------------------------------------------------------------------------

class _Chain:
    """Doubly linked list over point indices with move-to-front."""

    def __init__(self, order: list[int]):
        self.nodes = order
        n = len(order)
        self.nxt = {order[i]: (order[i + 1] if i + 1 < n else None) for i in range(n)}
        self.prv = {order[i]: (order[i - 1] if i > 0 else None) for i in range(n)}
        self.head = order[0] if order else None

    def move_to_front(self, node: int):
        if node == self.head:
            return
        p, q = self.prv[node], self.nxt[node]
        self.prv[node] = None
        self.nxt[node] = self.head
        self.prv[self.head] = node
        if p is not None:
            self.nxt[p] = q
        if q is not None:
            self.prv[q] = p
        self.head = node

    def iterate(self, stop: int | None):
        node = self.head
        while node is not None and node != stop:
            yield node
            node = self.nxt[node]


def _welzl_driver(n: int, solve_boundary, outside, max_boundary: int, seed: int):
    """Welzl's algorithm, move-to-front variant; recursion depth <= |R|max."""
    order = list(range(n))
    np.random.default_rng(seed).shuffle(order)
    chain = _Chain(order)

    def mtf(stop: int | None, r: tuple[int, ...]):
        if len(r) > max_boundary:
            raise TooManyBoundary(
                f"welzl demanded {len(r)} boundary points (cap {max_boundary})"
            )
        ball = solve_boundary(r) if r else None
        if len(r) == max_boundary:
            # restriction: the ball is pinned; anything outside would need
            # |R| = cap + 1, which is surfaced rather than solved
            for idx in chain.iterate(stop):
                if outside(idx, ball):
                    raise TooManyBoundary(
                        f"point {idx} outside the |R|={max_boundary} ball"
                    )
            return ball
        for idx in list(chain.iterate(stop)):
            if ball is None or outside(idx, ball):
                ball = mtf(idx, r + (idx,))
                chain.move_to_front(idx)
        return ball

    return mtf(None, ())


def welzl_euclidean(
    points: np.ndarray, cfg: SebConfig | None = None
) -> EuclideanBall:
    """Smallest enclosing ball of Euclidean vectors (exact subsolver)."""
    cfg = cfg or SebConfig()
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n, k = pts.shape
    max_boundary = cfg.max_boundary or (k + 1)

    def solve(r: tuple[int, ...]) -> EuclideanBall:
        ball = boundary_ball_euclid(pts[list(r)])
        return EuclideanBall(ball.center, ball.radius, r)

    def outside(idx: int, ball: EuclideanBall) -> bool:
        d = float(np.linalg.norm(pts[idx] - ball.center))
        return d > ball.radius * (1.0 + cfg.membership_rel) + cfg.membership_abs

    ball = _welzl_driver(n, solve, outside, max_boundary, cfg.shuffle_seed)
    if ball is None:  # single-point input never lands here; guard anyway
        ball = EuclideanBall(pts[0].copy(), 0.0, (0,))
    return ball


def welzl(
    points: PointSet | list[DensityMatrix],
    metric: MetricKind = MetricKind.DIVERGENCE_SITE_FIRST,
    cfg: SebConfig | None = None,
    stats: SebStats | None = None,
) -> DivergenceBall | EuclideanBall:
    """Smallest enclosing ball of quantum states under the chosen metric.

    For the divergence the ball minimizes max_k D(sigma_k||center) over
    faithful centers (the channel-capacity orientation).  For the Euclidean
    metric the states are embedded by their generalized coordinates.
    """
    cfg = cfg or SebConfig()
    states = list(points.points) if isinstance(points, PointSet) else list(points)
    if not states:
        raise SubsolverFailed("welzl needs at least one point")
    dim = states[0].dim

    if metric is MetricKind.EUCLIDEAN_PARAM:
        vecs = np.array([to_coords(s.mat).xi for s in states])
        return welzl_euclidean(vecs, cfg)
    if metric is not MetricKind.DIVERGENCE_SITE_FIRST:
        raise ValueError(f"welzl supports euclid or divergence metrics, got {metric}")

    max_boundary = cfg.max_boundary or (dim * dim - 1)
    mats = [s.mat for s in states]
    s_terms = [_entropy_sum(np.linalg.eigvalsh(m)) for m in mats]

    solve_cache: dict[tuple[int, ...], _DivBallRun] = {}

    def solve(r: tuple[int, ...]):
        canon = tuple(sorted(r))  # canonical order: radius independent of insertion path
        hit = solve_cache.get(canon)
        if hit is not None:
            return hit
        if stats is not None:
            stats.boundary_solves += 1
        ball = boundary_ball_divergence([states[i] for i in canon], cfg, stats)
        w, u = np.linalg.eigh(ball.center.mat)
        log_c = (u * np.log(w)) @ u.conj().T
        run = _DivBallRun(ball.center, ball.radius, canon, log_c)
        solve_cache[canon] = run
        return run

    def outside(idx: int, ball: "_DivBallRun") -> bool:
        d = s_terms[idx] - float(np.trace(mats[idx] @ ball.log_center).real)
        return d > ball.radius * (1.0 + cfg.membership_rel) + cfg.membership_abs

    run = _welzl_driver(len(states), solve, outside, max_boundary, cfg.shuffle_seed)
    return DivergenceBall(run.center, run.radius, run.support)


# ---------------------------------------------------------------------------
# independent oracles (used by the test suite)
# ---------------------------------------------------------------------------

def seb_euclid_exact(points: np.ndarray) -> EuclideanBall:
    """Exact brute force: smallest enclosing circumsphere over all subsets.

    Independent of the Welzl path: candidate centers come from a least-squares
    solve of the equidistance system per subset.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n, k = pts.shape
    best: EuclideanBall | None = None
    for m in range(1, min(n, k + 1) + 1):
        for subset in itertools.combinations(range(n), m):
            sub = pts[list(subset)]
            if m == 1:
                center = sub[0]
            else:
                # offset form: the least-norm solve lands in the affine hull
                u = sub[1:] - sub[0]
                h = 0.5 * np.sum(u * u, axis=1)
                y, *_ = np.linalg.lstsq(u, h, rcond=None)
                if np.max(np.abs(u @ y - h)) > 1e-9:
                    continue  # inconsistent (degenerate) subset
                center = sub[0] + y
            radius = float(np.max(np.linalg.norm(sub - center, axis=1)))
            if np.max(np.linalg.norm(pts - center, axis=1)) <= radius * (1 + 1e-12) + 1e-12:
                if best is None or radius < best.radius:
                    best = EuclideanBall(np.asarray(center, dtype=float), radius, subset)
    assert best is not None
    return best


def seb_bruteforce(
    points: PointSet | list[DensityMatrix] | np.ndarray,
    metric: MetricKind,
    grid_resolution: float = 1e-4,
) -> tuple[np.ndarray | DensityMatrix, float]:
    """Grid oracle: minimize the max distance over candidate centers.

    Candidates are convex mixtures of the input points plus, for one-qubit
    divergence, a Bloch-ball lattice; the incumbent is refined by shrinking
    lattices until the step is below grid_resolution.  Returns (center, radius);
    the radius is an upper bound within O(grid_resolution) of the optimum.
    Small instances only.
    """
    if metric is MetricKind.EUCLIDEAN_PARAM:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return _grid_min_max_euclid(pts, grid_resolution)
    if metric is not MetricKind.DIVERGENCE_SITE_FIRST:
        raise ValueError("grid oracle supports euclid or divergence metrics")
    states = list(points.points) if isinstance(points, PointSet) else list(points)
    dim = states[0].dim
    if dim != 2:
        raise ValueError("the divergence grid oracle is one-qubit only")
    return _grid_min_max_divergence_qubit(states, grid_resolution)


def _grid_min_max_euclid(pts: np.ndarray, res: float):
    n, k = pts.shape
    best_c, best_r = None, np.inf

    def value(c):
        return float(np.max(np.linalg.norm(pts - c, axis=1)))

    for wts in _simplex_grid(n, levels=6):
        c = wts @ pts
        v = value(c)
        if v < best_r:
            best_c, best_r = c, v
    span = float(np.max(np.linalg.norm(pts - best_c, axis=1)))
    while span > res:
        for c in _lattice_around(best_c, span, 5):
            v = value(c)
            if v < best_r:
                best_c, best_r = c, v
        span *= 0.35
    return best_c, best_r


def _grid_min_max_divergence_qubit(states: list[DensityMatrix], res: float):
    """One-qubit oracle over Bloch centers, vectorized via the closed form.

    D(sigma||rho(c)) = Tr sigma log sigma - (1/2) log((1-r^2)/4)
                       - log((1+r)/(1-r))/(2r) * <b_sigma, c>
    with r = |c|; evaluated on lattices of candidate centers.
    """
    bl = []
    s_terms = []
    for s in states:
        m = s.mat
        bl.append([2 * m[0, 1].real, -2 * m[0, 1].imag, (m[0, 0] - m[1, 1]).real])
        s_terms.append(_entropy_sum(np.linalg.eigvalsh(m)))
    b_sig = np.array(bl)
    s_terms = np.array(s_terms)

    def value_many(centers: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(centers, axis=1)
        r = np.clip(r, 1e-300, 1.0 - 1e-9)
        coef = np.where(r > 1e-12, np.log((1 + r) / (1 - r)) / (2 * r), 1.0)
        dots = b_sig @ centers.T  # (n_states, n_centers)
        vals = s_terms[:, None] - 0.5 * np.log((1 - r**2) / 4.0)[None, :] - coef[None, :] * dots
        return np.max(vals, axis=0)

    # convex mixtures of the points plus a coarse ball lattice
    cands = [np.asarray(w @ b_sig) for w in _simplex_grid(len(states), levels=8)]
    grid = np.linspace(-0.96, 0.96, 9)
    for c in itertools.product(grid, repeat=3):
        if np.linalg.norm(c) < 0.97:
            cands.append(np.asarray(c))
    cands = np.array(cands)
    vals = value_many(cands)
    i = int(np.argmin(vals))
    best_c, best_r = cands[i], float(vals[i])
    # shrink slowly enough that each stage's box covers the previous spacing;
    # the min-of-max landscape has kinked diagonal valleys, so every stage
    # also probes a seeded bundle of random directions around the incumbent
    rng = np.random.default_rng(908199)
    span = 0.4
    while span > res:
        lat = list(_lattice_around(best_c, span, 11))
        dirs = rng.standard_normal((400, 3))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        for frac in (1.0, 0.5, 0.25):
            lat.extend(best_c + frac * span * dirs)
        lat = np.array(lat)
        keep = np.linalg.norm(lat, axis=1) < 1.0 - 1e-9
        lat = lat[keep]
        if len(lat):
            vals = value_many(lat)
            i = int(np.argmin(vals))
            if vals[i] < best_r:
                best_c, best_r = lat[i], float(vals[i])
        span *= 0.65
    from .states import BlochVector, from_bloch

    center = from_bloch(BlochVector(*best_c))
    return center, best_r


def _simplex_grid(n: int, levels: int):
    """All weight vectors w >= 0, sum w = 1 with entries on a 1/levels grid."""
    for comp in itertools.combinations_with_replacement(range(n), levels):
        w = np.zeros(n)
        for i in comp:
            w[i] += 1.0 / levels
        yield w


def _lattice_around(center: np.ndarray, span: float, pts_per_axis: int):
    axes = [np.linspace(c - span, c + span, pts_per_axis) for c in center]
    for c in itertools.product(*axes):
        yield np.asarray(c)


# ---------------------------------------------------------------------------
# LP-type axiom checks
# ---------------------------------------------------------------------------

@dataclass
class LpTypeReport:
    monotonicity_checks: int = 0
    locality_checks: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def lp_type_check(
    points: PointSet | list[DensityMatrix] | np.ndarray,
    metric: MetricKind,
    trials: int = 20,
    cfg: SebConfig | None = None,
    tol: float = 1e-8,
) -> LpTypeReport:
    """Sample nested subsets and verify the LP-type axioms numerically.

    Monotonicity: radius(F) <= radius(G) for F in G.  Locality: if
    radius(F) = radius(G) and adding h grows F's ball, it must grow G's.
    Violations are reported as data, not raised.
    """
    cfg = cfg or SebConfig()
    rng = np.random.default_rng(cfg.shuffle_seed + 13)
    if metric is MetricKind.EUCLIDEAN_PARAM and isinstance(points, np.ndarray):
        items = list(range(len(points)))

        def radius_of(idx: tuple[int, ...]) -> float:
            return welzl_euclidean(points[list(idx)], cfg).radius

    else:
        states = list(points.points) if isinstance(points, PointSet) else list(points)
        items = list(range(len(states)))

        def radius_of(idx: tuple[int, ...]) -> float:
            return welzl([states[i] for i in idx], metric, cfg).radius

    cache: dict[tuple[int, ...], float] = {}

    def w(idx) -> float:
        key = tuple(sorted(idx))
        if key not in cache:
            cache[key] = radius_of(key)
        return cache[key]

    report = LpTypeReport()
    n = len(items)
    for _ in range(trials):
        g_size = int(rng.integers(2, n + 1))
        g = tuple(sorted(rng.choice(items, size=g_size, replace=False).tolist()))
        f_size = int(rng.integers(1, g_size + 1))
        f = tuple(sorted(rng.choice(list(g), size=f_size, replace=False).tolist()))
        report.monotonicity_checks += 1
        if w(f) > w(g) + tol:
            report.violations.append(
                f"monotonicity: w({f})={w(f):.9f} > w({g})={w(g):.9f}"
            )
        rest = [i for i in items if i not in g]
        if not rest:
            continue
        h = int(rng.choice(rest))
        report.locality_checks += 1
        if abs(w(f) - w(g)) <= tol and w(f + (h,)) > w(f) + tol:
            if not w(g + (h,)) > w(g) + tol:
                report.violations.append(
                    f"locality: F={f}, G={g}, h={h}: "
                    f"w(F+h)-w(F)={w(f + (h,)) - w(f):.3e} but "
                    f"w(G+h)-w(G)={w(g + (h,)) - w(g):.3e}"
                )
    return report


# JSON: {"center": matrixJSON, "radius_nats": r, "support": [indices]}

def ball_to_json(ball: DivergenceBall) -> dict:
    from .states import matrix_to_json

    return {
        "center": matrix_to_json(ball.center.mat),
        "radius_nats": ball.radius,
        "support": list(ball.support),
    }
