"""Numerical checks of the decay conditions, the modulus bound and the local limit.

All condition verdicts are evidence at grid resolution, not proofs.  The
trigonometric sum

    V(alpha; delta) = 2 sum_k b_k e^(-k delta) sin^2(pi k alpha)

is evaluated on grids of exact rationals p/q.  For q not exceeding the
truncation index the tilted weights are summed by residue class k mod q
first, so each grid point costs O(q) and phases are reduced exactly (an
exact zero, such as weights supported on multiples of 4 at alpha = 1/4,
stays exactly zero).

Because every term of V is nonnegative, the truncated sum is a lower
bound for V; truncation can only make a pass harder, never fake one.  A
negative margin is reported as a failure only when it survives adding the
tail bound, otherwise the verdict is indeterminate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from ._constants import leading_coefficient
from ._tails import growth_constant, tail_bound, truncation_index
from .khintchine import (
    CONVOLUTION_MAX_N,
    TiltedEnsemble,
    char_fn,
    point_prob_convolution,
    point_prob_quadrature,
    solve_saddle,
)
from .weights import StructureKind, WeightSequence

__all__ = [
    "VSum",
    "Verdict",
    "Condition",
    "DeltaSlice",
    "ConditionReport",
    "ModulusBoundReport",
    "LocalLimitRow",
    "LocalLimitReport",
    "v_sum",
    "alpha_grid",
    "check_condition_iii",
    "check_condition_iii_prime",
    "check_modulus_bound",
    "check_local_limit",
    "block_length",
    "sin_square_sum",
]

V_TOL = 1e-10
UNIFORM_POINTS = 512
GEOMETRIC_POINTS = 128
GEOMETRIC_DENOMINATOR = 1 << 16
FAREY_MAX_Q = 16
FOLD_MAX_Q = 1 << 17
ZERO_TOL = 1e-12
DECAY_FACTOR = 0.1
MODULUS_SLACK = 1e-6
MODULUS_POINTS = 1024


# ---------------------------------------------------------------------------
# the trigonometric sum

@dataclass(frozen=True)
class VSum:
    delta: float
    alpha: float
    value: float
    truncation_error_bound: float
    K: int = 0


@lru_cache(maxsize=8)
def _tilted(w: WeightSequence, delta: float, K: int) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=float)
    return w.array(K) * np.exp(-k * delta)


@lru_cache(maxsize=256)
def _folded(w: WeightSequence, delta: float, K: int, q: int) -> np.ndarray:
    residues = np.arange(1, K + 1) % q
    return np.bincount(residues, weights=_tilted(w, delta, K), minlength=q)


def _v_rational(w: WeightSequence, delta: float, K: int, x: Fraction) -> float:
    x = x % 1
    p, q = x.numerator, x.denominator
    if q == 1:
        return 0.0
    if q <= FOLD_MAX_Q:
        folded = _folded(w, delta, K, q)
        phase = (np.arange(q, dtype=np.int64) * p) % q
        s = np.sin(np.pi * phase / q)
        return 2.0 * float(np.dot(s * s, folded))
    k = np.arange(1, K + 1, dtype=float)
    s = np.sin(np.pi * np.mod(k * float(x), 1.0))
    return 2.0 * float(np.dot(s * s, _tilted(w, delta, K)))


def _truncation(w: WeightSequence, delta: float) -> tuple[int, float]:
    K = truncation_index(w, delta, V_TOL)
    return K, 2.0 * tail_bound(w, delta, K)


def v_sum(w: WeightSequence, delta: float, alpha) -> VSum:
    """V(alpha; delta) truncated at K, with a bound on the omitted tail."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    x = alpha if isinstance(alpha, Fraction) else Fraction(float(alpha))
    K, bound = _truncation(w, float(delta))
    value = _v_rational(w, float(delta), K, x)
    return VSum(float(delta), float(alpha), value, bound, K)


def _v_many(w: WeightSequence, delta: float, K: int, grid: Sequence[Fraction]) -> np.ndarray:
    return np.array([_v_rational(w, delta, K, x) for x in grid])


# ---------------------------------------------------------------------------
# alpha grids

def _farey(lower: Fraction, strict: bool) -> set:
    out = set()
    for q in range(2, FAREY_MAX_Q + 1):
        for p in range(1, q // 2 + 1):
            x = Fraction(p, q)
            if x > lower or (not strict and x == lower):
                out.add(x)
    return out


def alpha_grid(lower: float, strict: bool = False, resolution: int = 1) -> tuple:
    """Sorted exact rationals in [lower, 1/2] (or (lower, 1/2] if ``strict``).

    Three families are merged: a uniform dyadic grid j/D with D the smallest
    power of two giving at least 512*resolution points in range, geometric
    points clustered at the lower endpoint (rounded up to multiples of
    2^-16/resolution), and Farey fractions with denominators up to 16.
    """
    if not 0 <= lower < 0.5:
        raise ValueError(f"alpha range [{lower}, 1/2] is empty")
    lo = Fraction(lower)
    half = Fraction(1, 2)
    n_uniform = UNIFORM_POINTS * resolution
    D = 2
    while (half - lo) * D < n_uniform:
        D *= 2
    j0 = math.floor(lo * D)
    pts = set(Fraction(j, D) for j in range(max(j0, 0), D // 2 + 1))

    Q = GEOMETRIC_DENOMINATOR * resolution
    start = max(float(lower), 1.0 / Q)
    stop = min(0.5, 64.0 * start)
    for g in np.geomspace(start, stop, GEOMETRIC_POINTS * resolution):
        pts.add(Fraction(math.ceil(g * Q), Q))
    pts |= _farey(lo, strict)
    pts = [x for x in pts if (x > lo or (not strict and x == lo)) and x <= half]
    return tuple(sorted(pts))


# ---------------------------------------------------------------------------
# condition reports

class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INDETERMINATE = "indeterminate"


class Condition(enum.Enum):
    MEINARDUS_III = "iii"
    WEAK_III_PRIME = "iii-prime"


@dataclass(frozen=True)
class DeltaSlice:
    """Grid scan at one delta.

    ``margin`` holds V*delta^eps (condition iii) or V - threshold
    (condition iii'), in grid order.
    """

    delta: float
    alphas: tuple
    margin: np.ndarray = field(repr=False)
    K: int
    tail: float
    threshold: float
    witness: Fraction

    @property
    def minimum(self) -> float:
        return float(self.margin.min())


@dataclass(frozen=True)
class ConditionReport:
    condition: Condition
    kind: Optional[StructureKind]
    delta_grid: tuple
    alpha_grid_spec: str
    margin: tuple  # one array per delta
    verdict: Verdict
    truncation_K: int
    epsilon: float
    growth_constant: float
    witness_alpha: Optional[float]
    slices: tuple = field(repr=False, default=())
    stable: bool = True
    note: str = ""

    def summary(self) -> list[dict]:
        return [
            {"delta": s.delta, "points": len(s.alphas), "min_margin": s.minimum,
             "witness_alpha": float(s.witness), "K": s.K, "tail_bound": s.tail}
            for s in self.slices
        ]


def _growth(w: WeightSequence) -> float:
    if w.support is not None:
        return float(max(w.array(w.support).max(), 0.0))
    return growth_constant(w)


def _check_deltas(deltas) -> tuple:
    ds = tuple(float(d) for d in deltas)
    if not ds:
        raise ValueError("delta grid is empty")
    for d in ds:
        if not 0 < d < 0.1:
            raise ValueError(f"deltas must lie in (0, 0.1), got {d}")
    return tuple(sorted(ds, reverse=True))


def _scan_iii(w, deltas, eps, resolution) -> list[DeltaSlice]:
    out = []
    for d in deltas:
        grid = alpha_grid(d / (2.0 * math.pi), strict=True, resolution=resolution)
        K, tail = _truncation(w, d)
        scaled = _v_many(w, d, K, grid) * d ** eps
        i = int(np.argmin(scaled))
        out.append(DeltaSlice(d, grid, scaled, K, tail * d ** eps, 0.0, grid[i]))
    return out


def _verdict_iii(slices: list[DeltaSlice]) -> tuple[Verdict, Optional[Fraction], str]:
    lower = [s.minimum for s in slices]
    upper = [s.minimum + s.tail for s in slices]
    last = slices[-1]
    if all(v == 0.0 for v in lower):
        return Verdict.FAIL, last.witness, "exact zero of the truncated sum at every delta"
    if upper[-1] <= ZERO_TOL:
        return Verdict.FAIL, last.witness, "scaled minimum vanishes (to tail bound)"
    if len(slices) > 1:
        decaying = all(b <= a for a, b in zip(upper, upper[1:]))
        if decaying and upper[-1] < DECAY_FACTOR * lower[0]:
            return Verdict.FAIL, last.witness, "scaled minimum decays along the delta grid"
        if lower[-1] > 0 and lower[-1] >= DECAY_FACTOR * max(lower):
            return Verdict.PASS, None, "scaled minimum stays bounded below"
    elif lower[0] > 0:
        return Verdict.PASS, None, "single delta: scaled minimum positive"
    return Verdict.INDETERMINATE, last.witness, "no clear trend at grid resolution"


def _report(condition, kind, slices, verdict, witness, eps, w, stable, note) -> ConditionReport:
    spec = (f"{len(slices[0].alphas)}+ exact rationals: dyadic uniform, geometric near the lower "
            f"endpoint, Farey q<={FAREY_MAX_Q}")
    return ConditionReport(
        condition=condition,
        kind=kind,
        delta_grid=tuple(s.delta for s in slices),
        alpha_grid_spec=spec,
        margin=tuple(s.margin for s in slices),
        verdict=verdict,
        truncation_K=max(s.K for s in slices),
        epsilon=eps,
        growth_constant=_growth(w),
        witness_alpha=None if witness is None else float(witness),
        slices=tuple(slices),
        stable=stable,
        note=note,
    )


def check_condition_iii(w: WeightSequence, deltas=(1e-2, 1e-3, 1e-4),
                        epsilon_probe: float = 1.0, stability: bool = True) -> ConditionReport:
    """Scan min V*delta^eps over delta/(2 pi) < alpha <= 1/2 for each delta.

    Fail when the truncated scaled minimum is exactly zero at every delta,
    when it vanishes to within the tail bound, or when it decays by a factor of ten or
    more along a decreasing delta grid (reporting the witness alpha at the
    smallest delta); pass when it stays within a factor of ten of its
    largest value; indeterminate otherwise.  With ``stability`` a pass is
    re-examined at doubled grid resolution and downgraded if it flips.
    """
    ds = _check_deltas(deltas)
    if not epsilon_probe > 0:
        raise ValueError(f"epsilon_probe must be positive, got {epsilon_probe}")
    slices = _scan_iii(w, ds, epsilon_probe, 1)
    verdict, witness, note = _verdict_iii(slices)
    stable = True
    if stability and verdict is Verdict.PASS:
        fine, _, _ = _verdict_iii(_scan_iii(w, ds, epsilon_probe, 2))
        if fine is not Verdict.PASS:
            stable, verdict, note = False, Verdict.INDETERMINATE, "pass flipped at doubled resolution"
    return _report(Condition.MEINARDUS_III, None, slices, verdict, witness,
                   epsilon_probe, w, stable, note)


def _scan_iii_prime(w, kind, deltas, eps, resolution) -> list[DeltaSlice]:
    r = w.require_meta().r
    out = []
    for d in deltas:
        grid = alpha_grid(math.sqrt(d), strict=False, resolution=resolution)
        K, tail = _truncation(w, d)
        thr = (1.0 + 0.5 * r + eps) * kind.M * abs(math.log(d))
        margin = _v_many(w, d, K, grid) - thr
        i = int(np.argmin(margin))
        out.append(DeltaSlice(d, grid, margin, K, tail, thr, grid[i]))
    return out


def _verdict_margins(slices: list[DeltaSlice]) -> tuple[Verdict, Optional[Fraction], str]:
    worst = min(slices, key=lambda s: s.minimum)
    if worst.minimum >= 0:
        return Verdict.PASS, None, "all margins nonnegative"
    for s in slices:
        if s.minimum + s.tail < 0:
            return Verdict.FAIL, s.witness, f"negative margin at delta={s.delta:g}"
    return Verdict.INDETERMINATE, worst.witness, "negative margin within the truncation bound"


def check_condition_iii_prime(w: WeightSequence, kind, deltas=(1e-2, 1e-3, 1e-4),
                              epsilon: float = 0.1, stability: bool = True) -> ConditionReport:
    """Check V >= (1 + r/2 + eps) M |log delta| over sqrt(delta) <= alpha <= 1/2.

    V is even and 1-periodic in alpha, so the positive half-range suffices.
    A pass at small ``epsilon`` is the stronger statement.
    """
    kind = StructureKind.parse(kind)
    ds = _check_deltas(deltas)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    slices = _scan_iii_prime(w, kind, ds, epsilon, 1)
    verdict, witness, note = _verdict_margins(slices)
    stable = True
    if stability and verdict is Verdict.PASS:
        fine, _, _ = _verdict_margins(_scan_iii_prime(w, kind, ds, epsilon, 2))
        if fine is not Verdict.PASS:
            stable, verdict, note = False, Verdict.INDETERMINATE, "pass flipped at doubled resolution"
    return _report(Condition.WEAK_III_PRIME, kind, slices, verdict, witness,
                   epsilon, w, stable, note)


# ---------------------------------------------------------------------------
# modulus bound on the characteristic function

@dataclass(frozen=True)
class ModulusBoundReport:
    kind: StructureKind
    n: int
    delta_n: float
    alphas: np.ndarray = field(repr=False)
    log_modulus: np.ndarray = field(repr=False)
    log_bound: np.ndarray = field(repr=False)
    slack: float = MODULUS_SLACK
    truncation_K: int = 0

    @property
    def excess(self) -> np.ndarray:
        """log|phi| - log((1+slack) exp(-V/M)); positive entries violate."""
        return self.log_modulus - self.log_bound - math.log1p(self.slack)

    @property
    def max_violation(self) -> float:
        return float(max(self.excess.max(), 0.0))

    @property
    def violations(self) -> int:
        return int(np.count_nonzero(self.excess > 0))

    @property
    def max_gap(self) -> float:
        return float(np.max(np.abs(self.log_modulus - self.log_bound)))


def check_modulus_bound(w: WeightSequence, kind, n: int,
                       points: int = MODULUS_POINTS, slack: float = MODULUS_SLACK) -> ModulusBoundReport:
    """|phi_n(alpha)| <= (1+slack) exp(-V(alpha; delta_n)/M) on alpha = j/points - 1/2.

    The bound side uses V plus its tail bound, the conservative direction.
    """
    kind = StructureKind.parse(kind)
    sp = solve_saddle(w, kind, n)
    e = TiltedEnsemble(w, kind, n, sp.delta_n)
    grid = [Fraction(j, points) - Fraction(1, 2) for j in range(points)]
    alphas = np.array([float(x) for x in grid])
    log_mod = np.real(_log_modulus(e, alphas))
    K, tail = _truncation(w, sp.delta_n)
    V = _v_many(w, sp.delta_n, K, grid)
    log_bound = -(V + tail) / kind.M
    return ModulusBoundReport(kind, n, sp.delta_n, alphas, log_mod, log_bound, slack, K)


def _log_modulus(e: TiltedEnsemble, alphas: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(char_fn(e, alphas)))


# ---------------------------------------------------------------------------
# local limit

@dataclass(frozen=True)
class LocalLimitRow:
    n: int
    delta_n: float
    B2: float
    prob: float
    method: str
    gauss_ratio: float  # P(Z_n = n) sqrt(2 pi B_n^2)
    variance_ratio: float  # B_n^2 delta_n^(r+2) / K_2


@dataclass(frozen=True)
class LocalLimitReport:
    kind: StructureKind
    K2: float
    rows: tuple

    @property
    def gauss_ratios(self) -> list[float]:
        return [row.gauss_ratio for row in self.rows]

    @property
    def variance_ratios(self) -> list[float]:
        return [row.variance_ratio for row in self.rows]

    def drift(self) -> list[tuple[float, float]]:
        """(|gauss_ratio - 1|, |variance_ratio - 1|) per row."""
        return [(abs(r.gauss_ratio - 1.0), abs(r.variance_ratio - 1.0)) for r in self.rows]

    def max_jump(self) -> float:
        """Largest change of either ratio between consecutive rows."""
        jumps = [0.0]
        for a, b in zip(self.rows, self.rows[1:]):
            jumps.append(abs(b.gauss_ratio - a.gauss_ratio))
            jumps.append(abs(b.variance_ratio - a.variance_ratio))
        return max(jumps)


def check_local_limit(w: WeightSequence, kind, n_list) -> LocalLimitReport:
    kind = StructureKind.parse(kind)
    meta = w.require_meta()
    K2 = leading_coefficient(meta, kind, 2)
    rows = []
    for n in n_list:
        sp = solve_saddle(w, kind, int(n))
        e = TiltedEnsemble(w, kind, int(n), sp.delta_n)
        if n <= CONVOLUTION_MAX_N:
            p = point_prob_convolution(e)
        else:
            p = point_prob_quadrature(e)
        gauss = math.exp(p.log_value + 0.5 * math.log(2.0 * math.pi * sp.variance))
        var_ratio = sp.variance * sp.delta_n ** (meta.r + 2.0) / K2
        rows.append(LocalLimitRow(int(n), sp.delta_n, sp.variance, p.value,
                                  p.method.value, gauss, var_ratio))
    return LocalLimitReport(kind, K2, tuple(rows))


# ---------------------------------------------------------------------------
# block-sum bound used for condition (iii)

def block_length(alpha: float, delta: float) -> int:
    """P = floor((1 + |alpha|/delta) / (2 |alpha|))."""
    a = abs(alpha)
    if a == 0:
        raise ValueError("alpha must be nonzero")
    return math.floor((1.0 + a / delta) / (2.0 * a))


def sin_square_sum(P: int, alpha: float) -> float:
    """2 sum_{k<=P} sin^2(pi k alpha)."""
    k = np.arange(1, P + 1, dtype=float)
    s = np.sin(np.pi * np.mod(k * alpha, 1.0))
    return 2.0 * float(np.dot(s, s))
