"""Deterministic generation of approximately uniform pure states.

The generator walks a grid over the phase vector phi of length 2(d-1) and
forms an amplitude vector whose first d-1 entries are phi_1 + i phi_2, ...,
phi_{2d-3} + i phi_{2d-2}; the state is |Phi><Phi| after normalization.
Two feasibility rules are provided, which also fix the last amplitude:

* ``linear`` (default): the literal carry rule -- increment position i by
  Delta and carry when phi_i exceeds 1 minus the sum of the previous
  positions (because earlier positions are zero at carry time this
  enumerates the box grid {0, Delta, ..., <=1}^{2(d-1)}), with the last
  amplitude psi = 1 - sum phi_j.
* ``quadratic``: all signed integer tuples n with sum (n_j Delta)^2 <= 1,
  with psi = sqrt(1 - sum phi_j^2); the feasibility constraint is exactly
  the domain of that square root and the vector is unit norm by
  construction.  This is the rule that reproduces the published capacity
  figures.

Grid values are always computed as n * Delta from integer counters so the
enumeration cannot drift with accumulated floating-point error.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyMesh, WrongLength
from .states import DensityMatrix, matrix_from_json, matrix_to_json

RULES = ("linear", "quadratic")


@dataclass(frozen=True)
class MeshSpec:
    dim: int
    delta: float
    rule: str = "linear"

    def __post_init__(self):
        if self.dim < 2:
            raise WrongLength(f"dim must be >= 2, got {self.dim}")
        if not (0.0 < self.delta <= 1.0):
            raise WrongLength(f"delta must be in (0, 1], got {self.delta}")
        if self.rule not in RULES:
            raise WrongLength(f"rule must be one of {RULES}, got {self.rule!r}")


@dataclass(frozen=True)
class PointSet:
    dim: int
    points: tuple[DensityMatrix, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.points:
            raise EmptyMesh("a point set cannot be empty")
        object.__setattr__(self, "points", tuple(self.points))

    def __len__(self) -> int:
        return len(self.points)


def next_state(phi: list[int], i: int, nmax: int) -> list[int] | None:
    """One odometer step over integer counters (phi values are n * Delta).

    Adds one at position i (1-based); when the incremented value overflows
    the carry constraint the position resets to 0 and the carry moves to
    i + 1.  Returns None when the carry falls off the end.
    """
    if i > len(phi):
        return None
    phi = list(phi)
    phi[i - 1] += 1
    # carry constraint: n_i * Delta > 1 - sum of earlier entries (all zero
    # at carry time, so this is the per-digit bound n_i * Delta <= 1)
    if phi[i - 1] > nmax - sum(phi[: i - 1]):
        phi[i - 1] = 0
        return next_state(phi, i + 1, nmax)
    return phi


def _phase_vector_to_state(phi_vals: np.ndarray, d: int, rule: str) -> DensityMatrix | None:
    amp = np.empty(d, dtype=complex)
    for k in range(d - 1):
        amp[k] = phi_vals[2 * k] + 1j * phi_vals[2 * k + 1]
    if rule == "quadratic":
        amp[d - 1] = np.sqrt(max(0.0, 1.0 - float(np.sum(phi_vals * phi_vals))))
    else:
        amp[d - 1] = 1.0 - float(np.sum(phi_vals))
    norm = np.linalg.norm(amp)
    if norm < 1e-12:
        return None
    amp = amp / norm
    return DensityMatrix(np.outer(amp, amp.conj()))


def _linear_tuples(d: int, nmax: int):
    phi = [0] * (2 * (d - 1))
    while phi is not None:
        yield tuple(phi)
        phi = next_state(phi, 1, nmax)


def _quadratic_tuples(d: int, nmax: int):
    rng = range(-nmax, nmax + 1)
    limit = nmax * nmax
    # first counter fastest, matching the linear walk's odometer order
    for rev in itertools.product(rng, repeat=2 * (d - 1)):
        n = tuple(reversed(rev))
        if sum(x * x for x in n) <= limit:
            yield n


def enumerate_tuples(spec: MeshSpec) -> list[tuple[int, ...]]:
    """All integer counter tuples the generator visits, in generation order."""
    nmax = int(np.floor(1.0 / spec.delta + 1e-9))
    gen = _linear_tuples if spec.rule == "linear" else _quadratic_tuples
    return list(gen(spec.dim, nmax))


def enumerate_tuples_bruteforce(spec: MeshSpec) -> list[tuple[int, ...]]:
    """Independent oracle: nested-loop enumeration of the feasible tuples.

    For the linear rule this is the box grid in odometer order (first index
    fastest); for the quadratic rule the signed ball.  Kept free of the
    carry-rule code on purpose.
    """
    nmax = int(np.floor(1.0 / spec.delta + 1e-9))
    k = 2 * (spec.dim - 1)
    if spec.rule == "linear":
        out = []
        for rev in itertools.product(range(nmax + 1), repeat=k):
            out.append(tuple(reversed(rev)))
        return out
    out = []
    for rev in itertools.product(range(-nmax, nmax + 1), repeat=k):
        n = tuple(reversed(rev))
        if sum(x * x for x in n) <= nmax * nmax:
            out.append(n)
    return out


def dist_points(spec: MeshSpec) -> PointSet:
    """Generate the deterministic pure-state mesh for the given spec."""
    pts = []
    for n in enumerate_tuples(spec):
        state = _phase_vector_to_state(
            np.asarray(n, dtype=float) * spec.delta, spec.dim, spec.rule
        )
        if state is not None:
            pts.append(state)
    if not pts:
        raise EmptyMesh(f"no mesh points for {spec}")
    return PointSet(
        spec.dim,
        tuple(pts),
        provenance={"delta": spec.delta, "rule": spec.rule},
    )


# JSON: {"dim": d, "points": [matrixJSON, ...], "mesh": {"delta": ..., "rule": ...}}

def pointset_to_json(ps: PointSet) -> dict:
    return {
        "dim": ps.dim,
        "points": [matrix_to_json(p.mat) for p in ps.points],
        "mesh": dict(ps.provenance) if ps.provenance else None,
    }


def pointset_from_json(obj: dict) -> PointSet:
    dim = int(obj["dim"])
    pts = tuple(DensityMatrix(matrix_from_json(m)) for m in obj["points"])
    prov = obj.get("mesh") or {"source": "file"}
    return PointSet(dim, pts, provenance=prov)
