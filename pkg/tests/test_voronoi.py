import math

import numpy as np
import pytest

from helpers import random_faithful, random_pure, random_pure_qubit
from qgeo.errors import DimTooSmall, NotPure
from qgeo.metrics import MetricKind, bures, divergence
from qgeo.states import DensityMatrix, from_bloch, BlochVector
from qgeo.voronoi import (
    CoincidenceReport,
    SectionPoint,
    bisector_field_sample,
    coincidence_report,
    example3_sites,
    pure_limit_divergence_gap,
    section_coincidence_report,
    section_field_sample,
    section_gap_divergence,
    section_gap_euclidean,
    section_grid,
    section_scale_auto,
)


def random_section_site(rng, d):
    phi = rng.uniform(0, 2 * math.pi)
    u = rng.uniform(-1, 1)
    s = math.sqrt(1 - u * u)
    xi1 = (d - 2) / 2 + (d / 2) * u
    return SectionPoint(d, xi1, s * math.cos(phi), s * math.sin(phi))


class TestSectionPoint:
    def test_pure_ellipsoid_membership(self):
        rng = np.random.default_rng(80)
        for d in (3, 5):
            p = random_section_site(rng, d)
            assert p.on_pure_ellipsoid()

    def test_to_state_eigenvalues(self):
        # section states have the two-level spectrum (1 +- r)/2
        rng = np.random.default_rng(81)
        for d in (3, 4):
            p = random_section_site(rng, d)
            shrunk = SectionPoint(d, (d - 2) / 2 + 0.7 * (p.xi1 - (d - 2) / 2),
                                  0.7 * p.xid, 0.7 * p.xid1)
            w = shrunk.to_state().eigvals()
            assert abs(w[-1] - (1 + shrunk.radius) / 2) <= 1e-10
            assert abs(shrunk.radius - 0.7) <= 1e-12

    def test_dim_too_small(self):
        with pytest.raises(DimTooSmall):
            SectionPoint(2, 0.0, 0.0, 0.0)


class TestSectionGaps:
    def test_identical_sites_zero(self):
        rng = np.random.default_rng(82)
        d = 3
        s = random_section_site(rng, d)
        x = random_section_site(rng, d)
        assert section_gap_divergence(d, s, s, x) == 0.0
        assert section_gap_euclidean(d, s, s, x) == 0.0

    def test_antisymmetry(self):
        rng = np.random.default_rng(83)
        d = 4
        s1, s2, x = (random_section_site(rng, d) for _ in range(3))
        assert section_gap_divergence(d, s1, s2, x) == pytest.approx(
            -section_gap_divergence(d, s2, s1, x), abs=1e-14
        )
        assert section_gap_euclidean(d, s1, s2, x) == pytest.approx(
            -section_gap_euclidean(d, s2, s1, x), abs=1e-12
        )

    def test_mirror_sites_bisect_at_zero(self):
        # sites mirrored in xi_{d+1} have the hyperplane xi_{d+1} = 0 as
        # bisector for the section divergence
        d = 3
        s1 = SectionPoint(d, (d - 2) / 2, math.sqrt(1 - 0.49), 0.7)
        s2 = SectionPoint(d, (d - 2) / 2, math.sqrt(1 - 0.49), -0.7)
        rng = np.random.default_rng(84)
        for _ in range(20):
            x = random_section_site(rng, d)
            on_plane = SectionPoint(d, x.xi1, x.xid, 0.0)
            assert abs(section_gap_divergence(d, s1, s2, on_plane)) <= 1e-12
            g = section_gap_divergence(d, s1, s2, x)
            if abs(x.xid1) > 1e-9:
                assert math.copysign(1, g) == math.copysign(1, -x.xid1)

    def test_example1_common_bisector(self):
        # sites (d-1, 0, 0) and (-1, 0, 0): both bisectors are xi_1 = (d-2)/2
        for d in (3, 5):
            s1 = SectionPoint(d, d - 1.0, 0.0, 0.0)
            s2 = SectionPoint(d, -1.0, 0.0, 0.0)
            assert s1.on_pure_ellipsoid() and s2.on_pure_ellipsoid()
            rng = np.random.default_rng(85)
            for _ in range(10):
                x = random_section_site(rng, d)
                mid = SectionPoint(d, (d - 2) / 2, x.xid, x.xid1)
                assert abs(section_gap_divergence(d, s1, s2, mid)) <= 1e-12
                assert abs(section_gap_euclidean(d, s1, s2, mid)) <= 1e-12
                g_div = section_gap_divergence(d, s1, s2, x)
                g_euc = section_gap_euclidean(d, s1, s2, x)
                if abs(g_div) > 1e-10 and abs(g_euc) > 1e-10:
                    assert g_div * g_euc > 0

    def test_divergence_gap_sign_matches_true_divergence(self):
        # oracle: embed section points at radius r < 1 and compare the sign
        # against the actual divergence gap D(s1||x) - D(s2||x)
        rng = np.random.default_rng(86)
        d = 3
        for _ in range(25):
            s1, s2 = random_section_site(rng, d), random_section_site(rng, d)
            x = random_section_site(rng, d)
            r = rng.uniform(0.2, 0.95)
            c = (d - 2) / 2
            xr = SectionPoint(d, c + r * (x.xi1 - c), r * x.xid, r * x.xid1)
            state_x = xr.to_state()
            # the sites and sample share the two-level block, so the gap of
            # Tr((s1 - s2) log x) restricted to that block is the divergence
            # gap up to entropy terms that cancel for equal-radius sites
            b1 = _embed_block(s1)
            b2 = _embed_block(s2)
            bx = _embed_block(xr)
            w, u = np.linalg.eigh(bx)
            logx = (u * np.log(w)) @ u.conj().T
            true_gap = -float(np.trace((b1 - b2) @ logx).real)
            lin_gap = section_gap_divergence(d, s1, s2, x)
            if abs(true_gap) > 1e-10 and abs(lin_gap) > 1e-10:
                assert math.copysign(1, true_gap) == math.copysign(1, lin_gap)

    def test_scaled_euclid_proportional_to_divergence(self):
        rng = np.random.default_rng(87)
        d = 3
        scale = section_scale_auto(d)
        ratios = []
        for _ in range(50):
            s1, s2 = random_section_site(rng, d), random_section_site(rng, d)
            x = random_section_site(rng, d)
            g_div = section_gap_divergence(d, s1, s2, x)
            g_euc = section_gap_euclidean(d, s1, s2, x, scale)
            if abs(g_div) > 1e-10 and abs(g_euc) > 1e-10:
                ratios.append(g_euc / g_div)
        ratios = np.array(ratios)
        assert np.all(ratios > 0)
        assert np.var(ratios) <= 1e-8


def _embed_block(p: SectionPoint) -> np.ndarray:
    """2x2 block of the section embedding (the only part that matters)."""
    d = p.dim
    return np.array(
        [
            [(p.xi1 + 1.0) / d, (p.xid - 1j * p.xid1) / 2.0],
            [(p.xid + 1j * p.xid1) / 2.0, (d - 2.0 - p.xi1 + 1.0) / d],
        ]
    )


class TestPureLimitGap:
    def test_symmetric_superposition_is_zero(self):
        v1 = np.array([1.0, 0.0])
        v2 = np.array([0.0, 1.0])
        x = (v1 + v2) / np.linalg.norm(v1 + v2)
        g = pure_limit_divergence_gap(
            DensityMatrix(np.outer(v1, v1)),
            DensityMatrix(np.outer(v2, v2)),
            DensityMatrix(np.outer(x, x)),
        )
        assert abs(g) <= 1e-12

    def test_at_first_site_negative(self):
        rng = np.random.default_rng(88)
        s1, s2 = random_pure(rng, 3), random_pure(rng, 3)
        assert pure_limit_divergence_gap(s1, s2, s1) <= 1e-12

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_sign_matches_bures(self, d):
        rng = np.random.default_rng(89 + d)
        for _ in range(100):
            s1, s2, x = (random_pure(rng, d) for _ in range(3))
            g = pure_limit_divergence_gap(s1, s2, x)
            gb = bures(x, s1) - bures(x, s2)
            if abs(g) > 1e-10 and abs(gb) > 1e-10:
                assert math.copysign(1, g) == math.copysign(1, gb)

    def test_rejects_mixed(self):
        rng = np.random.default_rng(93)
        with pytest.raises(NotPure):
            pure_limit_divergence_gap(
                random_pure(rng, 2), random_pure(rng, 2), random_faithful(rng, 2)
            )


class TestCoincidenceReport:
    def test_qubit_pure_sites_pure_samples_coincide(self):
        rng = np.random.default_rng(90)
        sites = [random_pure_qubit(rng) for _ in range(8)]
        samples = [random_pure_qubit(rng) for _ in range(40)]
        metrics = [
            MetricKind.EUCLIDEAN_PARAM,
            MetricKind.BURES,
            MetricKind.FUBINI_STUDY,
            MetricKind.GEODESIC_SPHERE,
            MetricKind.DIVERGENCE_X_FIRST,
            MetricKind.DIVERGENCE_SITE_FIRST,
        ]
        report = coincidence_report(metrics, sites, samples)
        assert report.coincide, report.witnesses[:3]
        assert report.site_pairs == 28

    def test_qubit_pure_sites_mixed_samples_coincide(self):
        rng = np.random.default_rng(91)
        sites = [random_pure_qubit(rng) for _ in range(6)]
        samples = [random_faithful(rng, 2) for _ in range(40)]
        metrics = [
            MetricKind.EUCLIDEAN_PARAM,
            MetricKind.BURES,
            MetricKind.DIVERGENCE_X_FIRST,
            MetricKind.DIVERGENCE_SITE_FIRST,
        ]
        report = coincidence_report(metrics, sites, samples)
        assert report.coincide, report.witnesses[:3]

    def test_affinity_of_divergence_gap_in_xi(self):
        # D(x||s1) - D(x||s2) is affine in the coordinates of x
        rng = np.random.default_rng(92)
        s1, s2 = random_faithful(rng, 3), random_faithful(rng, 3)
        for _ in range(10):
            a, b = random_faithful(rng, 3), random_faithful(rng, 3)
            mid = DensityMatrix((a.mat + b.mat) / 2)
            g = lambda x: divergence(x, s1) - divergence(x, s2)
            assert abs(g(mid) - (g(a) + g(b)) / 2) <= 1e-8


class TestSectionCoincidence:
    def test_example3_differs_at_scale_one(self):
        report = section_coincidence_report(3, example3_sites(3), grid_n=60, scale=1.0)
        assert report.disagreements > 0

    def test_example3_coincides_at_auto_scale(self):
        report = section_coincidence_report(
            3, example3_sites(3), grid_n=60, scale=section_scale_auto(3)
        )
        assert report.disagreements == 0


class TestFieldSampling:
    def test_identical_sites_all_zero(self):
        rng = np.random.default_rng(94)
        s = random_pure_qubit(rng)
        header, rows = bisector_field_sample(
            [MetricKind.EUCLIDEAN_PARAM, MetricKind.BURES], s, s, grid_n=8
        )
        assert header[:3] == ["x", "y", "z"]
        for row in rows:
            assert all(abs(v) <= 1e-12 for v in row[3:])

    def test_antipodal_euclid_splits_on_equator(self):
        north = from_bloch(BlochVector(0, 0, 1))
        south = from_bloch(BlochVector(0, 0, -1))
        header, rows = bisector_field_sample(
            [MetricKind.EUCLIDEAN_PARAM], north, south, grid_n=9
        )
        for row in rows:
            z, gap = row[2], row[3]
            if abs(z) > 1e-9:
                assert math.copysign(1, gap) == math.copysign(1, -z)

    def test_divergence_field_matches_euclid_signs(self):
        rng = np.random.default_rng(95)
        s1, s2 = random_pure_qubit(rng), random_pure_qubit(rng)
        header, rows = bisector_field_sample(
            [MetricKind.EUCLIDEAN_PARAM, MetricKind.DIVERGENCE_X_FIRST], s1, s2, grid_n=10
        )
        for row in rows:
            ge, gd = row[3], row[4]
            if abs(ge) > 1e-10 and abs(gd) > 1e-10:
                assert math.copysign(1, ge) == math.copysign(1, gd)

    def test_section_field_two_sites_vs_many(self):
        sites = example3_sites(3)
        header2, rows2 = section_field_sample(3, sites[:2], grid_n=12)
        assert header2[3].startswith("gap_")
        header8, rows8 = section_field_sample(3, sites, grid_n=12)
        assert header8[3].startswith("nearest_")
        assert {int(r[3]) for r in rows8} <= set(range(8))
