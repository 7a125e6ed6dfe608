"""Kraus-form quantum channels: validation, application, completion, built-ins."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NotCompletable, NotTracePreserving
from .states import DensityMatrix, hermitize, matrix_from_json, matrix_sqrt, matrix_to_json

TPCP_TOL = 1e-8


@dataclass(frozen=True)
class KrausChannel:
    """A trace-preserving completely positive map rho -> sum_i V_i rho V_i†."""

    dim: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = []
        for v in self.kraus:
            v = np.asarray(v, dtype=complex)
            if v.shape != (self.dim, self.dim):
                raise DimMismatch(
                    f"Kraus operator shape {v.shape} != ({self.dim}, {self.dim})"
                )
            v = v.copy()
            v.flags.writeable = False
            ops.append(v)
        if not ops:
            raise DimMismatch("a channel needs at least one Kraus operator")
        object.__setattr__(self, "kraus", tuple(ops))

    def kraus_sum(self) -> np.ndarray:
        """Sum V_i† V_i (equals I for a valid channel)."""
        return sum(v.conj().T @ v for v in self.kraus)


def validate(ch: KrausChannel, tol: float = TPCP_TOL) -> None:
    """Check trace preservation: ||sum V†V - I||_max <= tol."""
    dev = float(np.max(np.abs(ch.kraus_sum() - np.eye(ch.dim))))
    if dev > tol:
        raise NotTracePreserving(dev)


def apply(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Channel action sum_i V_i rho V_i†."""
    if rho.dim != ch.dim:
        raise DimMismatch(f"state dim {rho.dim} != channel dim {ch.dim}")
    out = np.zeros((ch.dim, ch.dim), dtype=complex)
    for v in ch.kraus:
        out += v @ rho.mat @ v.conj().T
    return DensityMatrix(hermitize(out))


def apply_many(
    ch: KrausChannel, states: list[DensityMatrix], threads: int = 1
) -> list[DensityMatrix]:
    """Map the channel over states, preserving order (optionally threaded)."""
    if threads <= 1 or len(states) < 64:
        return [apply(ch, s) for s in states]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: apply(ch, s), states))


def kraus_complete(partial: list[np.ndarray], dim: int | None = None) -> KrausChannel:
    """Append the Hermitian PSD root sqrt(I - sum V†V) as the last Kraus operator."""
    ops = [np.asarray(v, dtype=complex) for v in partial]
    if dim is None:
        if not ops:
            raise DimMismatch("dim is required to complete an empty Kraus list")
        dim = ops[0].shape[0]
    gap = np.eye(dim) - sum(
        (v.conj().T @ v for v in ops), start=np.zeros((dim, dim), dtype=complex)
    )
    gap = hermitize(gap)
    lo = float(np.linalg.eigvalsh(gap)[0])
    if lo < -1e-10:
        raise NotCompletable(f"I - sum V†V has eigenvalue {lo:.3e} < -1e-10")
    ch = KrausChannel(dim, tuple(ops) + (matrix_sqrt(gap),))
    validate(ch)
    return ch


def gamma5() -> KrausChannel:
    """The three-level test channel with V1, V2 fixed and V3 completed."""
    v1 = np.array(
        [
            [0.2, 0.3, 0.4],
            [0.0, 0.5j, 0.0],
            [0.1j, 0.4j, 0.5j],
        ],
        dtype=complex,
    )
    v2 = np.array(
        [
            [0.1 - 0.3j, 0.0, 0.0],
            [0.0, -0.3j, 0.1 - 0.2j],
            [0.3 - 0.3j, 0.2 + 0.1j, 0.0],
        ],
        dtype=complex,
    )
    return kraus_complete([v1, v2])


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel(dim, (np.eye(dim, dtype=complex),))


def depolarizing_channel(dim: int) -> KrausChannel:
    """Fully depolarizing channel: every input maps to I/d."""
    ops = []
    for i in range(dim):
        for j in range(dim):
            v = np.zeros((dim, dim), dtype=complex)
            v[i, j] = 1.0 / np.sqrt(dim)
            ops.append(v)
    return KrausChannel(dim, tuple(ops))


BUILTIN_CHANNELS = {
    "gamma5": lambda dim: gamma5(),
    "identity": identity_channel,
    "depolarizing": depolarizing_channel,
}


# JSON: {"dim": d, "kraus": [matrixJSON, ...], "complete_last": bool}

def channel_to_json(ch: KrausChannel, complete_last: bool = False) -> dict:
    return {
        "dim": ch.dim,
        "kraus": [matrix_to_json(v) for v in ch.kraus],
        "complete_last": bool(complete_last),
    }


def channel_from_json(obj: dict) -> KrausChannel:
    dim = int(obj["dim"])
    ops = [matrix_from_json(m) for m in obj["kraus"]]
    if obj.get("complete_last", False):
        return kraus_complete(ops, dim=dim)
    ch = KrausChannel(dim, tuple(ops))
    validate(ch)
    return ch
