"""Bisector evaluation and the coincidence / non-coincidence audit suite.

One-qubit theory: for pure sites, the bisectors of Fubini-Study, Bures,
geodesic, Euclidean, and both divergence orders all reduce to the same
linear condition in Bloch coordinates, so their sign patterns must agree
(pure samples for all six, mixed samples for the four that extend).  For
d >= 3 the comparison lives on a distinguished planar section where the
divergence bisector stays linear while the Euclidean one does not, unless
the diagonal coordinates are rescaled by d/sqrt(2).

Divergence distances to pure sites (or at pure samples in the second slot)
are evaluated after a radial shrink toward I/d with factor 1 - 1e-6, the
limit construction under which the pure-state diagram is defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimTooSmall, NotPure
from .metrics import MetricKind, metric_distance, shrink_toward_center
from .mesh import PointSet
from .states import DensityMatrix, GeneralizedCoords, from_coords, rank_class

SHRINK = 1.0 - 1e-6      # radial limit factor for pure states in divergence slots
GAP_FLOOR = 1e-10        # |gap| below this is numerical zero; excluded from counts


@dataclass(frozen=True)
class SectionPoint:
    """Point on the d >= 3 comparison section, coordinates (xi_1, xi_d, xi_{d+1}).

    The section fixes xi_2 = d - 2 - xi_1, xi_3 = ... = xi_{d-1} = -1 and
    zeros every remaining coordinate; its pure states form the ellipsoid
    (d - 2 - 2 xi_1)^2 / d^2 + xi_d^2 + xi_{d+1}^2 = 1.
    """

    dim: int
    xi1: float
    xid: float
    xid1: float

    def __post_init__(self):
        if self.dim < 3:
            raise DimTooSmall(f"the section needs d >= 3, got {self.dim}")

    @property
    def radius(self) -> float:
        """Bloch-like radius of the section state; pure at 1."""
        return math.sqrt(
            ((self.dim - 2.0 - 2.0 * self.xi1) / self.dim) ** 2
            + self.xid ** 2
            + self.xid1 ** 2
        )

    def on_pure_ellipsoid(self, tol: float = 1e-9) -> bool:
        return abs(self.radius ** 2 - 1.0) <= tol

    def to_state(self) -> DensityMatrix:
        """Embed as a density matrix (requires radius <= 1)."""
        d = self.dim
        xi = np.zeros(d * d - 1)
        xi[0] = self.xi1
        if d > 2:
            xi[1] = d - 2.0 - self.xi1
        for j in range(2, d - 1):
            xi[j] = -1.0
        xi[d - 1] = self.xid
        xi[d] = self.xid1
        return DensityMatrix(from_coords(GeneralizedCoords(d, xi)))


def section_gap_divergence(
    d: int, site: SectionPoint, site2: SectionPoint, x: SectionPoint
) -> float:
    """Signed divergence gap on the section, oriented as d(x,site) - d(x,site2).

    The bisector condition is linear in the sample coordinates; the sign is
    fixed so that positive means x is divergence-farther from the first site
    (matching the other gap functions).
    """
    if d < 3:
        raise DimTooSmall("section gaps need d >= 3")
    c = (d - 2.0) / 2.0
    return -(
        (site.xid - site2.xid) * x.xid
        + (site.xid1 - site2.xid1) * x.xid1
        + 4.0 * (site.xi1 - site2.xi1) * (x.xi1 - c) / (d * d)
    )


def section_gap_euclidean(
    d: int,
    site: SectionPoint,
    site2: SectionPoint,
    x: SectionPoint,
    scale: float = 1.0,
) -> float:
    """Squared-Euclidean gap on the section under a diagonal rescaling.

    With scale = 1 this is the plain parameter-space metric (counting the
    dependent xi_2 coordinate); with scale = d/sqrt(2) the gap becomes
    pointwise proportional to the divergence gap.
    """
    if d < 3:
        raise DimTooSmall("section gaps need d >= 3")
    s2 = scale * scale

    def sq(a: SectionPoint) -> float:
        return (
            2.0 * (a.xi1 - x.xi1) ** 2 / s2
            + (a.xid - x.xid) ** 2
            + (a.xid1 - x.xid1) ** 2
        )

    return sq(site) - sq(site2)


def section_scale_auto(d: int) -> float:
    """The rescaling that makes the two section diagrams coincide."""
    return d / math.sqrt(2.0)


def example3_sites(d: int) -> list[SectionPoint]:
    """The eight-site section configuration used for the non-coincidence check."""
    c = (d - 2.0) / 2.0
    h = d / (2.0 * math.sqrt(3.0))
    a = 1.0 / math.sqrt(3.0)
    b = math.sqrt(2.0 / 3.0)
    sites = []
    for sd in (a, -a):
        for sd1 in (a, -a):
            sites.append(SectionPoint(d, c + h, sd, sd1))
    for sd in (b, -b):
        sites.append(SectionPoint(d, c - h, sd, 0.0))
    for sd1 in (b, -b):
        sites.append(SectionPoint(d, c - h, 0.0, sd1))
    return sites


def section_grid(d: int, n: int, sheet: int = +1) -> list[SectionPoint]:
    """n x n grid over the (xi_d, xi_{d+1}) chart of the pure ellipsoid.

    Each in-disk grid node lifts to the sheet with xi_1 = (d-2)/2 +
    sheet * (d/2) sqrt(1 - s^2).
    """
    pts = []
    for xd in np.linspace(-1.0, 1.0, n):
        for xd1 in np.linspace(-1.0, 1.0, n):
            s2 = xd * xd + xd1 * xd1
            if s2 > 1.0:
                continue
            xi1 = (d - 2.0) / 2.0 + sheet * (d / 2.0) * math.sqrt(max(1.0 - s2, 0.0))
            pts.append(SectionPoint(d, xi1, float(xd), float(xd1)))
    return pts


# ---------------------------------------------------------------------------
# pure-limit divergence bisector (general d)
# ---------------------------------------------------------------------------

def pure_limit_divergence_gap(
    sigma1: DensityMatrix, sigma2: DensityMatrix, x: DensityMatrix
) -> float:
    """Sign surrogate for the limiting divergence gap at pure states.

    As the sample state collapses onto a pure x, the gap
    D(sigma1||rho_eps) - D(sigma2||rho_eps) diverges with the sign of
    Tr(sigma2 x) - Tr(sigma1 x) = |<x|psi2>|^2 - |<x|psi1>|^2, so that trace
    difference is returned; its zero set is the limit bisector and its sign
    matches the Bures and Fubini-Study gaps.
    """
    for s in (sigma1, sigma2, x):
        if rank_class(s, 1e-9) != "Pure":
            raise NotPure("pure_limit_divergence_gap needs pure states")
    m = x.mat
    return float(np.trace(sigma2.mat @ m).real - np.trace(sigma1.mat @ m).real)


# ---------------------------------------------------------------------------
# coincidence audit
# ---------------------------------------------------------------------------

@dataclass
class Witness:
    pair: tuple[int, int]
    sample: int
    metric_a: str
    metric_b: str
    gap_a: float
    gap_b: float


@dataclass
class CoincidenceReport:
    metrics: list[MetricKind]
    site_pairs: int = 0
    samples: int = 0
    comparisons: int = 0
    disagreements: int = 0
    max_gap_at_disagreement: float = 0.0
    witnesses: list[Witness] = field(default_factory=list)

    @property
    def coincide(self) -> bool:
        return self.disagreements == 0


def _gap_for_metric(
    kind: MetricKind,
    s1: DensityMatrix,
    s2: DensityMatrix,
    x: DensityMatrix,
    s1_shrunk: DensityMatrix,
    s2_shrunk: DensityMatrix,
    x_second_slot: DensityMatrix,
) -> float:
    """Pairwise gap with the radial-limit substitutions for divergence slots."""
    if kind is MetricKind.DIVERGENCE_X_FIRST:
        return metric_distance(kind, x, s1_shrunk) - metric_distance(kind, x, s2_shrunk)
    if kind is MetricKind.DIVERGENCE_SITE_FIRST:
        return metric_distance(kind, x_second_slot, s1) - metric_distance(
            kind, x_second_slot, s2
        )
    return metric_distance(kind, x, s1) - metric_distance(kind, x, s2)


def coincidence_report(
    metrics: list[MetricKind],
    sites: PointSet | list[DensityMatrix],
    samples: PointSet | list[DensityMatrix],
    tol: float = GAP_FLOOR,
    max_witnesses: int = 32,
) -> CoincidenceReport:
    """Pairwise sign-agreement audit of bisector gaps across metrics.

    For every site pair and sample, the gap under each metric is computed
    and any sign disagreement (with both magnitudes above tol) is recorded.
    Divergence slots that require faithfulness receive radially shrunk
    stand-ins for pure states.  Distances are evaluated once per
    (site, sample); pair gaps are their differences.
    """
    site_list = list(sites.points) if isinstance(sites, PointSet) else list(sites)
    sample_list = (
        list(samples.points) if isinstance(samples, PointSet) else list(samples)
    )
    report = CoincidenceReport(metrics=list(metrics), samples=len(sample_list))

    def faithful(s: DensityMatrix) -> DensityMatrix:
        if rank_class(s, 1e-9) == "Faithful":
            return s
        return shrink_toward_center(s, SHRINK)

    shrunk_sites = [faithful(s) for s in site_list]
    shrunk_samples = [faithful(x) for x in sample_list]

    # distance tables, one entry per (metric, site, sample)
    n_sites, n_samples = len(site_list), len(sample_list)
    dist = np.empty((len(metrics), n_sites, n_samples))
    for mi, kind in enumerate(metrics):
        for si in range(n_sites):
            for xi in range(n_samples):
                if kind is MetricKind.DIVERGENCE_X_FIRST:
                    d = metric_distance(kind, sample_list[xi], shrunk_sites[si])
                elif kind is MetricKind.DIVERGENCE_SITE_FIRST:
                    d = metric_distance(kind, shrunk_samples[xi], site_list[si])
                else:
                    d = metric_distance(kind, sample_list[xi], site_list[si])
                dist[mi, si, xi] = d

    for i in range(n_sites):
        for j in range(i + 1, n_sites):
            report.site_pairs += 1
            gaps = dist[:, i, :] - dist[:, j, :]  # (metrics, samples)
            live = np.abs(gaps) > tol
            report.comparisons += n_samples
            for a in range(len(metrics)):
                for b in range(a + 1, len(metrics)):
                    both = live[a] & live[b]
                    bad = both & (gaps[a] * gaps[b] < 0.0)
                    n_bad = int(np.sum(bad))
                    if n_bad == 0:
                        continue
                    report.disagreements += n_bad
                    for m in np.nonzero(bad)[0]:
                        report.max_gap_at_disagreement = max(
                            report.max_gap_at_disagreement,
                            min(abs(gaps[a, m]), abs(gaps[b, m])),
                        )
                        if len(report.witnesses) < max_witnesses:
                            report.witnesses.append(
                                Witness(
                                    (i, j),
                                    int(m),
                                    metrics[a].value,
                                    metrics[b].value,
                                    float(gaps[a, m]),
                                    float(gaps[b, m]),
                                )
                            )
    return report


def section_coincidence_report(
    d: int,
    sites: list[SectionPoint],
    grid_n: int = 200,
    scale: float = 1.0,
    tol: float = GAP_FLOOR,
    max_witnesses: int = 32,
) -> CoincidenceReport:
    """Sign-agreement audit of the section divergence vs Euclidean gaps.

    Samples an n x n chart grid on both sheets of the pure ellipsoid;
    both gap functions are linear/quadratic forms, evaluated vectorized.
    """
    metrics = [MetricKind.DIVERGENCE_X_FIRST, MetricKind.EUCLIDEAN_PARAM]
    report = CoincidenceReport(metrics=metrics)
    samples = section_grid(d, grid_n, +1) + section_grid(d, grid_n, -1)
    report.samples = len(samples)
    x1 = np.array([p.xi1 for p in samples])
    xd = np.array([p.xid for p in samples])
    xd1 = np.array([p.xid1 for p in samples])
    c = (d - 2.0) / 2.0
    s2 = scale * scale
    for i in range(len(sites)):
        for j in range(i + 1, len(sites)):
            report.site_pairs += 1
            a, b = sites[i], sites[j]
            g_div = -(
                (a.xid - b.xid) * xd
                + (a.xid1 - b.xid1) * xd1
                + 4.0 * (a.xi1 - b.xi1) * (x1 - c) / (d * d)
            )
            g_euc = (
                2.0 * ((a.xi1 - x1) ** 2 - (b.xi1 - x1) ** 2) / s2
                + (a.xid - xd) ** 2 - (b.xid - xd) ** 2
                + (a.xid1 - xd1) ** 2 - (b.xid1 - xd1) ** 2
            )
            report.comparisons += len(samples)
            bad = (np.abs(g_div) > tol) & (np.abs(g_euc) > tol) & (g_div * g_euc < 0.0)
            n_bad = int(np.sum(bad))
            if n_bad == 0:
                continue
            report.disagreements += n_bad
            for m in np.nonzero(bad)[0]:
                report.max_gap_at_disagreement = max(
                    report.max_gap_at_disagreement,
                    min(abs(g_div[m]), abs(g_euc[m])),
                )
                if len(report.witnesses) < max_witnesses:
                    report.witnesses.append(
                        Witness(
                            (i, j), int(m), "section-divergence",
                            f"section-euclid(scale={scale:g})",
                            float(g_div[m]), float(g_euc[m]),
                        )
                    )
    return report


# ---------------------------------------------------------------------------
# field sampling (feeds the CSV/figure emission)
# ---------------------------------------------------------------------------

def bisector_field_sample(
    kinds: list[MetricKind],
    sigma1: DensityMatrix,
    sigma2: DensityMatrix,
    grid_n: int = 50,
) -> tuple[list[str], list[list[float]]]:
    """Gap field of a one-qubit site pair over a latitude/longitude sphere grid.

    Returns (header, rows); each row is (x, y, z, gap per metric).
    """
    from .states import BlochVector, from_bloch

    header = ["x", "y", "z"] + [f"gap_{k.value}" for k in kinds]
    s1f = shrink_toward_center(sigma1, SHRINK) if rank_class(sigma1, 1e-9) != "Faithful" else sigma1
    s2f = shrink_toward_center(sigma2, SHRINK) if rank_class(sigma2, 1e-9) != "Faithful" else sigma2
    rows = []
    for theta in np.linspace(0.0, math.pi, grid_n):
        for phi in np.linspace(0.0, 2.0 * math.pi, grid_n, endpoint=False):
            b = BlochVector(
                math.sin(theta) * math.cos(phi),
                math.sin(theta) * math.sin(phi),
                math.cos(theta),
            )
            x = from_bloch(b)
            xf = shrink_toward_center(x, SHRINK)
            row = [b.x, b.y, b.z]
            for kind in kinds:
                row.append(
                    _gap_for_metric(kind, sigma1, sigma2, x, s1f, s2f, xf)
                )
            rows.append(row)
    return header, rows


def section_field_sample(
    d: int,
    sites: list[SectionPoint],
    grid_n: int = 200,
    scale: float = 1.0,
    sheet: int = +1,
) -> tuple[list[str], list[list[float]]]:
    """Nearest-site assignment field on the section chart for both metrics.

    For two sites the gap columns are emitted; for more, the nearest-site
    index per metric (the diagram coloring).
    """
    samples = section_grid(d, grid_n, sheet)
    if len(sites) == 2:
        header = ["x1", "xd", "xd1", "gap_divergence", f"gap_euclid_scale_{scale:g}"]
        rows = [
            [
                x.xi1,
                x.xid,
                x.xid1,
                section_gap_divergence(d, sites[0], sites[1], x),
                section_gap_euclidean(d, sites[0], sites[1], x, scale),
            ]
            for x in samples
        ]
        return header, rows

    header = ["x1", "xd", "xd1", "nearest_divergence", f"nearest_euclid_scale_{scale:g}"]

    def nearest(x: SectionPoint, gap) -> int:
        best = 0
        for i in range(1, len(sites)):
            if gap(d, sites[best], sites[i], x) > 0.0:
                best = i
        return best

    rows = []
    for x in samples:
        rows.append(
            [
                x.xi1,
                x.xid,
                x.xid1,
                float(nearest(x, section_gap_divergence)),
                float(
                    nearest(
                        x,
                        lambda dd, a, b, xx: section_gap_euclidean(dd, a, b, xx, scale),
                    )
                ),
            ]
        )
    return header, rows
