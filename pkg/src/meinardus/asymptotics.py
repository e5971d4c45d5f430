"""Closed-form asymptotics of log F(delta), delta_n and c_n.

Small-delta expansions (Mellin residues at s = r and s = 0):

    multiset   log F = A Gamma(r) zeta(r+1) delta^-r - D(0) log delta + D'(0)
    selection  log F = A Gamma(r) (1-2^-r) zeta(r+1) delta^-r + D(0) log 2
    assembly   log F = A Gamma(r) delta^-r + D(0)

each up to O(delta^C0).  The count estimates have the common shape
log c_n ~ log C + p log n + a n^(r/(r+1)).

``meinardus_estimate`` evaluates the closed forms; ``khintchine_estimate``
assembles n delta_n + log f_n(e^-delta_n) - log(2 pi B_n^2)/2 from the solved
saddle.  The two share no code beyond the weight data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ._constants import leading_coefficient, principal_delta
from .khintchine import TiltedEnsemble, log_Fn, solve_saddle
from .weights import StructureKind, WeightSequence

__all__ = [
    "ExpansionTerms",
    "AsymptoticEstimate",
    "EstimateParts",
    "log_F_expansion",
    "log_F_derivative_expansion",
    "delta_asymptotic",
    "delta_remainder_exponent",
    "meinardus_estimate",
    "khintchine_estimate",
    "kappa1",
    "kappa2",
]


@dataclass(frozen=True)
class ExpansionTerms:
    kind: StructureKind
    delta: float
    leading: float
    log_term: float
    constant: float
    remainder_order: float

    @property
    def value(self) -> float:
        return self.leading + self.log_term + self.constant


@dataclass(frozen=True)
class EstimateParts:
    exponent_coeff: float
    power_exponent: float
    log_constant: float


@dataclass(frozen=True)
class AsymptoticEstimate:
    kind: StructureKind
    n: int
    log_value: float
    parts: EstimateParts
    r: float = 1.0

    @staticmethod
    def assemble(kind: StructureKind, n: int, parts: EstimateParts, r: float) -> "AsymptoticEstimate":
        log_value = (parts.log_constant + parts.power_exponent * math.log(n)
                     + parts.exponent_coeff * n ** (r / (r + 1.0)))
        return AsymptoticEstimate(kind, n, log_value, parts, r)

    @property
    def value(self) -> float:
        """c_n estimate on the linear scale, or inf if it overflows a double."""
        return math.exp(self.log_value) if self.log_value < 709.0 else math.inf

    def mantissa_exponent(self) -> tuple[float, int]:
        """Decimal (m, e) with estimate = m * 10^e, 1 <= m < 10."""
        l10 = self.log_value / math.log(10.0)
        e = math.floor(l10)
        return 10.0 ** (l10 - e), e


def log_F_expansion(w: WeightSequence, kind, delta: float) -> ExpansionTerms:
    kind = StructureKind.parse(kind)
    meta = w.require_meta()
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    leading = leading_coefficient(meta, kind) * delta ** (-meta.r)
    if kind is StructureKind.MULTISET:
        log_term, const = -meta.D0 * math.log(delta), meta.D0prime
    elif kind is StructureKind.SELECTION:
        log_term, const = 0.0, meta.D0 * math.log(2.0)
    else:
        log_term, const = 0.0, meta.D0
    return ExpansionTerms(kind, delta, leading, log_term, const, meta.C0)


def log_F_derivative_expansion(w: WeightSequence, kind, delta: float, order: int) -> float:
    """k-th delta-derivative of the expansion, k in {1, 2, 3}.

    (-1)^k A Gamma(r+k) Z delta^(-r-k), plus (-1)^k (k-1)! D(0) delta^-k for
    multisets (the derivatives of -D(0) log delta).
    """
    kind = StructureKind.parse(kind)
    meta = w.require_meta()
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    sign = -1.0 if order % 2 else 1.0
    value = sign * leading_coefficient(meta, kind, order) * delta ** (-meta.r - order)
    if kind is StructureKind.MULTISET:
        value += sign * math.factorial(order - 1) * meta.D0 * delta ** (-order)
    return value


def delta_asymptotic(w: WeightSequence, kind, n: int) -> float:
    """Saddle root expansion; multisets add the D(0)/((r+1) n) correction."""
    kind = StructureKind.parse(kind)
    meta = w.require_meta()
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    d = principal_delta(meta, kind, n)
    if kind is StructureKind.MULTISET:
        d += meta.D0 / ((meta.r + 1.0) * n)
    return d


def delta_remainder_exponent(w: WeightSequence, kind) -> float:
    """beta in the O(n^(-1-beta)) remainder of ``delta_asymptotic`` (order tag only)."""
    kind = StructureKind.parse(kind)
    meta = w.require_meta()
    if kind is StructureKind.MULTISET and meta.r < meta.C0:
        return meta.r / (meta.r + 1.0)
    return meta.C0 / (meta.r + 1.0)


def kappa1(D0: float, r: float) -> float:
    return (2.0 * D0 - 2.0 - r) / (2.0 * (1.0 + r))


def kappa2(D0: float, r: float) -> float:
    return (1.0 - 2.0 * D0) / (2.0 * (1.0 + r))


def meinardus_estimate(w: WeightSequence, kind, n: int) -> AsymptoticEstimate:
    kind = StructureKind.parse(kind)
    meta = w.require_meta()
    r = meta.r
    h = leading_coefficient(meta, kind, 1)  # A Gamma(r+1) Z
    coeff = (1.0 + 1.0 / r) * h ** (1.0 / (r + 1.0))
    base = -0.5 * math.log(2.0 * math.pi * (1.0 + r))
    if kind is StructureKind.MULTISET:
        power = kappa1(meta.D0, r)
        log_c = meta.D0prime + base + kappa2(meta.D0, r) * math.log(h)
    else:
        power = -(r + 2.0) / (2.0 * r + 2.0)
        lead = meta.D0 * math.log(2.0) if kind is StructureKind.SELECTION else meta.D0
        log_c = lead + base + math.log(h) / (2.0 * r + 2.0)
    return AsymptoticEstimate.assemble(kind, n, EstimateParts(coeff, power, log_c), r)


def khintchine_estimate(w: WeightSequence, kind, n: int) -> AsymptoticEstimate:
    """n delta_n + log f_n(e^-delta_n) - log(2 pi B_n^2)/2 with solved quantities.

    ``parts`` records n delta_n + log f_n as exponent_coeff (power 1 in n
    is not meaningful here, so power_exponent is 0) and the Gaussian
    normalisation as log_constant.
    """
    kind = StructureKind.parse(kind)
    sp = solve_saddle(w, kind, n)
    e = TiltedEnsemble(w, kind, n, sp.delta_n)
    main = n * sp.delta_n + log_Fn(e)
    gauss = -0.5 * math.log(2.0 * math.pi * sp.variance)
    r = w.meta.r if w.meta is not None else 1.0
    scale = n ** (r / (r + 1.0))
    return AsymptoticEstimate.assemble(kind, n, EstimateParts(main / scale, 0.0, gauss), r)
