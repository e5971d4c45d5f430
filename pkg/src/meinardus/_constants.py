"""Per-kind constants built from (r, A): the zeta factor and its products."""
from __future__ import annotations

import math
from functools import lru_cache

from . import specialfn
from .weights import DirichletMeta, StructureKind


@lru_cache(maxsize=None)
def zeta_factor(r: float, kind: StructureKind) -> float:
    """zeta(r+1), (1-2^-r) zeta(r+1) or 1 for kinds 1, 2, 3."""
    if kind is StructureKind.ASSEMBLY:
        return 1.0
    z = specialfn.zeta(r + 1.0)
    if kind is StructureKind.SELECTION:
        z *= -math.expm1(-r * math.log(2.0))
    return z


@lru_cache(maxsize=None)
def gamma_cached(x: float) -> float:
    return specialfn.gamma(x)


def leading_coefficient(meta: DirichletMeta, kind: StructureKind, shift: int = 0) -> float:
    """A Gamma(r + shift) times the zeta factor.

    shift=0 gives the delta^-r coefficient of log F, shift=1 the saddle
    constant h and shift=2 the variance constant K_2.
    """
    return meta.A * gamma_cached(meta.r + shift) * zeta_factor(meta.r, kind)


def principal_delta(meta: DirichletMeta, kind: StructureKind, n: float) -> float:
    """(h / n)^(1/(r+1)), the leading term of the saddle root."""
    h = leading_coefficient(meta, kind, 1)
    return (h / n) ** (1.0 / (meta.r + 1.0))
