"""Weight sequences b_k and their Dirichlet-series data.

A :class:`WeightSequence` wraps a deterministic map k -> b_k >= 0.  The
scalar form may return ``int`` or ``Fraction`` so that exact counting can
recover exact values; :meth:`WeightSequence.array` gives a float vector for
the analytic code.  Optional :class:`DirichletMeta` carries the pole r,
residue A, D(0), D'(0) and the continuation width C0 of
D(s) = sum_k b_k k^(-s).
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import specialfn
from .errors import MissingMetaError

__all__ = [
    "StructureKind",
    "DirichletMeta",
    "WeightSequence",
    "MissingMetaError",
    "make_power_law",
    "make_example2",
    "make_example3",
    "make_forest",
    "make_tabulated",
    "load_tabulated",
    "check_growth_bound",
    "GrowthReport",
    "EXAMPLE3_SCALE",
]


class StructureKind(enum.Enum):
    """Multisets (i=1), selections (i=2) and assemblies (i=3)."""

    MULTISET = 1
    SELECTION = 2
    ASSEMBLY = 3

    @property
    def index(self) -> int:
        return self.value

    @property
    def M(self) -> float:
        """Constant M^(i) of the weakened decay condition."""
        return {1: 4.0 / math.log(5.0), 2: 4.0, 3: 1.0}[self.value]

    @classmethod
    def parse(cls, text) -> "StructureKind":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        aliases = {
            "1": cls.MULTISET, "multiset": cls.MULTISET, "partition": cls.MULTISET,
            "2": cls.SELECTION, "selection": cls.SELECTION,
            "3": cls.ASSEMBLY, "assembly": cls.ASSEMBLY,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown structure kind {text!r}") from None


@dataclass(frozen=True)
class DirichletMeta:
    r: float
    A: float
    D0: float
    D0prime: float
    C0: float = 1.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"pole location r must be positive, got {self.r}")
        if not self.A > 0:
            raise ValueError(f"residue A must be positive, got {self.A}")
        if not 0 < self.C0 <= 1:
            raise ValueError(f"C0 must lie in (0, 1], got {self.C0}")


Scalar = Callable[[int], "int | Fraction | float"]
Vector = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Immutable weight sequence b_1, b_2, ...

    ``support`` is the largest index with a possibly nonzero weight, or
    ``None`` for an infinite sequence.
    """

    kind_label: str
    func: Scalar = field(repr=False)
    meta: Optional[DirichletMeta] = None
    vector: Optional[Vector] = field(default=None, repr=False)
    support: Optional[int] = None

    def value(self, k: int):
        """Exact-when-possible b_k (int, Fraction or float)."""
        if k < 1:
            raise ValueError(f"weights are indexed from k=1, got {k}")
        return self.func(k)

    def __call__(self, k: int) -> float:
        return float(self.value(k))

    b = __call__

    def exact(self, k: int) -> Fraction:
        return Fraction(self.value(k))

    def array(self, n: int) -> np.ndarray:
        """Float vector (b_1, ..., b_n)."""
        if n <= 0:
            return np.zeros(0)
        if self.vector is not None:
            return np.asarray(self.vector(np.arange(1, n + 1)), dtype=float)
        return np.fromiter((float(self.func(k)) for k in range(1, n + 1)), dtype=float, count=n)

    def require_meta(self) -> DirichletMeta:
        if self.meta is None:
            raise MissingMetaError(f"weights {self.kind_label!r} carry no Dirichlet metadata")
        return self.meta


def make_power_law(rho: float, r: float) -> WeightSequence:
    """b_k = rho k^(r-1); D(s) = rho zeta(s-r+1)."""
    if not rho > 0 or not r > 0:
        raise ValueError(f"power law needs rho > 0 and r > 0, got rho={rho}, r={r}")
    meta = DirichletMeta(
        r=float(r),
        A=float(rho),
        D0=rho * specialfn.zeta(1.0 - r),
        D0prime=rho * specialfn.zeta_prime(1.0 - r),
        C0=1.0,
    )
    integral_power = float(r - 1).is_integer() and r >= 1
    rho_exact = Fraction(rho)

    def func(k: int):
        if integral_power:
            return rho_exact * k ** int(r - 1)
        return rho * k ** (r - 1.0)

    def vector(k):
        return rho * np.asarray(k, dtype=float) ** (r - 1.0)

    label = f"power-law:r={_fmt(r)},rho={_fmt(rho)}"
    return WeightSequence(label, func, meta, vector)


def make_forest() -> WeightSequence:
    """Assembly of linear forests: m_k = k!, i.e. b_k = 1."""
    base = make_power_law(1, 1)
    return WeightSequence("forest", base.func, base.meta, base.vector)


def make_example2() -> WeightSequence:
    """b_k = 1 if 4 | k else 0; D(s) = 4^(-s) zeta(s).

    D(0) = zeta(0) = -1/2 and D'(0) = log(4)/2 + zeta'(0) = log(2/pi)/2.
    """
    meta = DirichletMeta(
        r=1.0,
        A=0.25,
        D0=specialfn.zeta(0.0),
        D0prime=-math.log(4.0) * specialfn.zeta(0.0) + specialfn.zeta_prime(0.0),
        C0=1.0,
    )

    def func(k: int):
        return 1 if k % 4 == 0 else 0

    def vector(k):
        return (np.asarray(k) % 4 == 0).astype(float)

    return WeightSequence("example2", func, meta, vector)


EXAMPLE3_SCALE = 12.0 * math.exp(7.0)


def _xlogx_inv(x):
    return np.log(x) / x


def make_example3() -> WeightSequence:
    """Weights satisfying the weakened decay condition but not Meinardus' (iii).

    With S = 12 e^7 and h(x) = log(x)/x:
    b_k = S h(k) for 4 not dividing k, S (50 + h(k) - 2 h(k/4)) for 4 | k but
    16 not dividing k, and S (50 + h(k) - 2 h(k/4) + h(k/16)) for 16 | k.  Then
    D(s) = S (-(1 - 4^(-s))^2 zeta'(s+1) + 50 * 4^(-s) zeta(s)), so
    r = 1 and A = 50 S / 4 (residue of 4^(-s) zeta(s) at s = 1 is 1/4).
    Expanding at s = 0 with L = log 4:
    D(0) = S (L^2 - 25) and D'(0) = S (-L^3 + 25 L - 25 log(2 pi)).
    """
    S = EXAMPLE3_SCALE
    L = math.log(4.0)
    meta = DirichletMeta(
        r=1.0,
        A=S * 50.0 / 4.0,
        D0=S * (L * L + 50.0 * specialfn.zeta(0.0)),
        D0prime=S * (-L ** 3 + 50.0 * (-L * specialfn.zeta(0.0) + specialfn.zeta_prime(0.0))),
        C0=1.0,
    )

    def func(k: int) -> float:
        h = math.log(k) / k
        if k % 4:
            return S * h
        val = 50.0 + h - 2.0 * math.log(k / 4) / (k / 4)
        if k % 16 == 0:
            val += math.log(k / 16) / (k / 16)
        return S * val

    def vector(k):
        k = np.asarray(k, dtype=float)
        out = _xlogx_inv(k)
        by4 = (k % 4 == 0)
        out = out + by4 * (50.0 - 2.0 * _xlogx_inv(np.where(by4, k / 4, 1.0)))
        by16 = (k % 16 == 0)
        out = out + by16 * _xlogx_inv(np.where(by16, k / 16, 1.0))
        return S * out

    return WeightSequence("example3", func, meta, vector)


def make_tabulated(values: Sequence, meta: Optional[DirichletMeta] = None,
                   label: str = "tabulated") -> WeightSequence:
    """b_k = values[k-1] for k <= len(values) and 0 beyond."""
    table = []
    for v in values:
        if isinstance(v, str):
            v = Fraction(v.strip())
        elif isinstance(v, float) and v.is_integer():
            v = int(v)
        if v < 0:
            raise ValueError(f"weights must be nonnegative, got {v}")
        table.append(v)
    table = tuple(table)
    floats = np.array([float(v) for v in table], dtype=float)

    def func(k: int):
        return table[k - 1] if k <= len(table) else 0

    def vector(k):
        k = np.asarray(k)
        out = np.zeros(k.shape, dtype=float)
        inside = k <= len(table)
        out[inside] = floats[k[inside] - 1]
        return out

    return WeightSequence(label, func, meta, vector, support=len(table))


def load_tabulated(path, meta: Optional[DirichletMeta] = None) -> WeightSequence:
    """Read weights from a JSON array or a one-value-per-line text file."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        raw = json.loads(stripped)
        values = [Fraction(v) if isinstance(v, str) else v for v in raw]
    else:
        values = [line.strip() for line in text.splitlines()
                  if line.strip() and not line.lstrip().startswith("#")]
    return make_tabulated(values, meta, label=f"@{path}")


@dataclass(frozen=True)
class GrowthReport:
    r: float
    K: int
    max_ratio: float
    windows: tuple  # ((lo, hi, max b_k/k^r), ...) over dyadic windows [lo, hi]
    violation: bool


def check_growth_bound(w: WeightSequence, K: int) -> GrowthReport:
    """Real-axis sanity check of b_k = o(k^r).

    The ratio b_k/k^r is maximised over dyadic windows [2^j, 2^(j+1)); the
    sequence is flagged when the windowed maxima do not decrease over the
    last three windows.
    """
    meta = w.require_meta()
    if K < 10:
        raise ValueError(f"K must be at least 10, got {K}")
    k = np.arange(1, K + 1)
    ratio = w.array(K) / k.astype(float) ** meta.r
    windows = []
    lo = 1
    while lo <= K:
        hi = min(2 * lo - 1, K)
        windows.append((lo, hi, float(ratio[lo - 1:hi].max())))
        lo *= 2
    last = [m for _, _, m in windows[-3:]]
    violation = len(last) == 3 and last[0] <= last[1] <= last[2]
    return GrowthReport(meta.r, K, float(ratio.max()), tuple(windows), violation)


def _fmt(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)
