"""Command-line entry points.

Subcommands: mesh generation, capacity estimation, the coincidence audit
(the CI hook for the coincidence/non-coincidence statements), bisector
field emission with optional figure rendering, and a capacity-vs-step
sweep.  Structured outputs are JSON, fields are CSV, figures are SVG/PNG
via matplotlib; stdout carries only the headline number of each command.

Exit codes: 0 ok, 2 bad arguments, 3 generation failure, 4 invalid
channel, 5 solver failure, 6 expectation violated.  The environment
variable QGEO_SEED overrides --seed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import platform
import sys
import time

import numpy as np

from . import __version__
from .capacity import capacity_vs_delta, holevo_capacity, result_to_json
from .channels import BUILTIN_CHANNELS, channel_from_json
from .errors import (
    EmptyMesh,
    NotCompletable,
    NotTracePreserving,
    QgeoError,
    SubsolverFailed,
    TooManyBoundary,
    WrongLength,
)
from .mesh import MeshSpec, PointSet, dist_points, pointset_from_json, pointset_to_json
from .metrics import MetricKind
from .seb import SebConfig
from .states import BlochVector, from_bloch
from .voronoi import (
    SectionPoint,
    bisector_field_sample,
    coincidence_report,
    example3_sites,
    section_coincidence_report,
    section_field_sample,
    section_scale_auto,
)

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_GENERATION = 3
EXIT_CHANNEL = 4
EXIT_SOLVER = 5
EXIT_EXPECTATION = 6

METRIC_ALIASES = {
    "euclid": [MetricKind.EUCLIDEAN_PARAM],
    "bures": [MetricKind.BURES],
    "fs": [MetricKind.FUBINI_STUDY],
    "geodesic": [MetricKind.GEODESIC_SPHERE],
    "divergence": [MetricKind.DIVERGENCE_X_FIRST, MetricKind.DIVERGENCE_SITE_FIRST],
    "div-x-first": [MetricKind.DIVERGENCE_X_FIRST],
    "div-site-first": [MetricKind.DIVERGENCE_SITE_FIRST],
    "div-dual": [MetricKind.DIVERGENCE_DUAL],
}

MIXED_SAMPLE_METRICS = {
    MetricKind.EUCLIDEAN_PARAM,
    MetricKind.BURES,
    MetricKind.DIVERGENCE_X_FIRST,
    MetricKind.DIVERGENCE_SITE_FIRST,
    MetricKind.DIVERGENCE_DUAL,
}


def _resolve_seed(args) -> int:
    env = os.environ.get("QGEO_SEED")
    if env is not None:
        return int(env)
    return int(getattr(args, "seed", 0) or 0)


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        h.update(f.read())
    return h.hexdigest()


def _write_manifest(out_path: str, args, seed: int, wall: float, inputs: dict):
    manifest = {
        "command": sys.argv,
        "seed": seed,
        "version": __version__,
        "input_digests": inputs,
        "wall_time_s": wall,
        "host": {"node": platform.node(), "platform": platform.platform()},
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    with open(out_path + ".manifest.json", "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)


def _write_json(path: str, obj):
    with open(path, "w") as f:
        json.dump(obj, f, sort_keys=True)


def _write_csv(path: str, header: list[str], rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


def _load_channel(args):
    if args.builtin:
        return BUILTIN_CHANNELS[args.builtin](args.dim), {}
    with open(args.channel) as f:
        ch = channel_from_json(json.load(f))
    return ch, {args.channel: _digest(args.channel)}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_mesh(args) -> int:
    seed = _resolve_seed(args)
    t0 = time.perf_counter()
    try:
        spec = MeshSpec(args.dim, args.delta, args.rule)
    except WrongLength as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ARGS
    try:
        ps = dist_points(spec)
    except EmptyMesh as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GENERATION
    _write_json(args.out, pointset_to_json(ps))
    _write_manifest(args.out, args, seed, time.perf_counter() - t0, {})
    print(len(ps))
    return EXIT_OK


def cmd_capacity(args) -> int:
    seed = _resolve_seed(args)
    t0 = time.perf_counter()
    try:
        ch, inputs = _load_channel(args)
    except (NotTracePreserving, NotCompletable, QgeoError, KeyError) as e:
        print(f"error: invalid channel: {e}", file=sys.stderr)
        return EXIT_CHANNEL
    try:
        spec = MeshSpec(ch.dim, args.delta, args.rule)
    except WrongLength as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ARGS
    cfg = SebConfig(shuffle_seed=seed)
    try:
        res = holevo_capacity(ch, spec, cfg, threads=args.threads)
    except (SubsolverFailed, TooManyBoundary) as e:
        print(f"error: solver failed: {e}", file=sys.stderr)
        return EXIT_SOLVER
    if args.out:
        _write_json(args.out, result_to_json(res))
        _write_manifest(args.out, args, seed, time.perf_counter() - t0, inputs)
    value = res.capacity_bits if args.bits else res.capacity_nats
    print(f"{value:.7f}")
    return EXIT_OK


def _random_pure_states(rng, dim, n):
    from .states import DensityMatrix

    out = []
    for _ in range(n):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        out.append(DensityMatrix(np.outer(v, v.conj())))
    return out


def _random_faithful_states(rng, dim, n):
    from .states import DensityMatrix

    out = []
    for _ in range(n):
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        m = a @ a.conj().T
        m = 0.95 * m / np.trace(m).real + 0.05 * np.eye(dim) / dim
        out.append(DensityMatrix(m))
    return out


def cmd_coincide(args) -> int:
    seed = _resolve_seed(args)
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    witnesses_rows = []
    if args.section:
        if args.dim < 3:
            print("error: --section needs --dim >= 3", file=sys.stderr)
            return EXIT_ARGS
        scale = section_scale_auto(args.dim) if args.scale == "auto" else float(args.scale)
        if args.sites:
            sites = []
            for _ in range(args.sites):
                phi = rng.uniform(0.0, 2.0 * math.pi)
                u = rng.uniform(-1.0, 1.0)
                s = math.sqrt(1.0 - u * u)
                sites.append(
                    SectionPoint(
                        args.dim,
                        (args.dim - 2) / 2 + args.dim / 2 * u,
                        s * math.cos(phi),
                        s * math.sin(phi),
                    )
                )
        else:
            sites = example3_sites(args.dim)
        report = section_coincidence_report(
            args.dim, sites, grid_n=args.grid, scale=scale
        )
    else:
        metrics = []
        for name in args.metrics.split(","):
            if name not in METRIC_ALIASES:
                print(f"error: unknown metric {name!r}", file=sys.stderr)
                return EXIT_ARGS
            for kind in METRIC_ALIASES[name]:
                if kind not in metrics:
                    metrics.append(kind)
        sites = _random_pure_states(rng, args.dim, args.sites or 8)
        pure_samples = _random_pure_states(rng, args.dim, args.samples)
        report = coincidence_report(metrics, sites, pure_samples)
        mixed_metrics = [m for m in metrics if m in MIXED_SAMPLE_METRICS]
        if mixed_metrics:
            mixed_samples = _random_faithful_states(rng, args.dim, args.samples)
            mixed_report = coincidence_report(mixed_metrics, sites, mixed_samples)
            report.disagreements += mixed_report.disagreements
            report.comparisons += mixed_report.comparisons
            report.witnesses.extend(mixed_report.witnesses)

    for w in report.witnesses:
        witnesses_rows.append(
            [w.pair[0], w.pair[1], w.sample, w.metric_a, w.metric_b, w.gap_a, w.gap_b]
        )
    _write_csv(
        args.out,
        ["site_a", "site_b", "sample", "metric_a", "metric_b", "gap_a", "gap_b"],
        witnesses_rows,
    )
    _write_manifest(args.out, args, seed, time.perf_counter() - t0, {})
    print(report.disagreements)
    if args.expect == "coincide" and report.disagreements > 0:
        return EXIT_EXPECTATION
    if args.expect == "differ" and report.disagreements == 0:
        return EXIT_EXPECTATION
    return EXIT_OK


def cmd_bisector(args) -> int:
    seed = _resolve_seed(args)
    t0 = time.perf_counter()
    metrics = []
    for name in args.metric.split(","):
        if name not in METRIC_ALIASES:
            print(f"error: unknown metric {name!r}", file=sys.stderr)
            return EXIT_ARGS
        metrics.extend(METRIC_ALIASES[name])
    inputs = {}
    try:
        if args.section:
            scale = (
                section_scale_auto(args.dim) if args.scale == "auto" else float(args.scale)
            )
            sites = example3_sites(args.dim)
            if args.pair:
                i, j = (int(s) for s in args.pair.split(","))
                sites = [sites[i], sites[j]]
            header, rows = section_field_sample(
                args.dim, sites, grid_n=args.grid, scale=scale
            )
        else:
            with open(args.sites) as f:
                ps = pointset_from_json(json.load(f))
            inputs[args.sites] = _digest(args.sites)
            if len(ps.points) < 2:
                print("error: need at least two sites", file=sys.stderr)
                return EXIT_ARGS
            header, rows = bisector_field_sample(
                metrics, ps.points[0], ps.points[1], grid_n=args.grid
            )
    except QgeoError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GENERATION
    _write_csv(args.out, header, rows)
    _write_manifest(args.out, args, seed, time.perf_counter() - t0, inputs)
    if args.svg:
        from .figures import sign_map

        sign_map(header, rows, args.svg)
    print(len(rows))
    return EXIT_OK


def cmd_capacity_sweep(args) -> int:
    seed = _resolve_seed(args)
    t0 = time.perf_counter()
    try:
        ch, inputs = _load_channel(args)
    except (NotTracePreserving, NotCompletable, QgeoError, KeyError) as e:
        print(f"error: invalid channel: {e}", file=sys.stderr)
        return EXIT_CHANNEL
    try:
        deltas = sorted((float(x) for x in args.deltas.split(",")), reverse=True)
        rows = capacity_vs_delta(
            ch, deltas, SebConfig(shuffle_seed=seed), rule=args.rule,
            threads=args.threads,
        )
    except (SubsolverFailed, TooManyBoundary) as e:
        print(f"error: solver failed: {e}", file=sys.stderr)
        return EXIT_SOLVER
    header = ["delta", "points", "capacity_nats", "capacity_bits", "wall_time_s"]
    _write_csv(args.out, header, [[r[k] for k in header] for r in rows])
    _write_manifest(args.out, args, seed, time.perf_counter() - t0, inputs)
    if args.plot:
        from .figures import capacity_sweep_plot

        capacity_sweep_plot(rows, args.plot)
    print(f"{rows[-1]['capacity_nats']:.7f}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgeo", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mesh", help="generate a deterministic pure-state mesh")
    m.add_argument("--dim", type=int, required=True)
    m.add_argument("--delta", type=float, required=True)
    m.add_argument("--rule", choices=["linear", "quadratic"], default="linear")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_mesh)

    c = sub.add_parser("capacity", help="estimate the Holevo capacity of a channel")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--channel", help="channel JSON file")
    g.add_argument("--builtin", choices=sorted(BUILTIN_CHANNELS))
    c.add_argument("--dim", type=int, default=2, help="dimension for builtin channels")
    c.add_argument("--delta", type=float, required=True)
    c.add_argument("--rule", choices=["linear", "quadratic"], default="linear")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--bits", action="store_true", help="print bits instead of nats")
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_capacity)

    v = sub.add_parser("coincide", help="audit bisector sign agreement across metrics")
    v.add_argument("--dim", type=int, required=True)
    v.add_argument("--sites", type=int, default=0,
                   help="number of random sites (section default: the 8-site example)")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--metrics", default="euclid,bures,divergence")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--section", action="store_true")
    v.add_argument("--scale", default="1", help="section rescale factor or 'auto'")
    v.add_argument("--grid", type=int, default=200)
    v.add_argument("--expect", choices=["coincide", "differ"], required=True)
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_coincide)

    b = sub.add_parser("bisector", help="emit a bisector gap field (CSV, optional figure)")
    b.add_argument("--metric", default="divergence,euclid")
    b.add_argument("--sites", help="PointSet JSON with at least two states")
    b.add_argument("--section", action="store_true")
    b.add_argument("--dim", type=int, default=3)
    b.add_argument("--pair", help="site index pair i,j for a section gap field")
    b.add_argument("--scale", default="1")
    b.add_argument("--grid", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.add_argument("--svg", default=None)
    b.set_defaults(func=cmd_bisector)

    s = sub.add_parser("capacity-sweep", help="capacity across mesh resolutions")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--channel")
    g.add_argument("--builtin", choices=sorted(BUILTIN_CHANNELS))
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--deltas", required=True, help="comma-separated, e.g. 0.5,0.4,0.3")
    s.add_argument("--rule", choices=["linear", "quadratic"], default="linear")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out", required=True)
    s.add_argument("--plot", default=None)
    s.set_defaults(func=cmd_capacity_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ARGS
    except QgeoError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GENERATION


if __name__ == "__main__":
    sys.exit(main())
