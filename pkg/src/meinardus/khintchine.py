"""Tilted ensembles behind the probabilistic representation of c_n.

For a tilt delta > 0 the component counts Y_k / k are independent with
laws NegativeBinomial(b_k; e^(-k delta)) (multisets),
Binomial(b_k; e^(-k delta)/(1+e^(-k delta))) (selections) or
Poisson(b_k e^(-k delta)) (assemblies), and Z_n = Y_1 + ... + Y_n satisfies

    c_n = e^(n delta) f_n(e^(-delta)) P(Z_n = n)

for every delta > 0, where f_n is the generating function truncated to
k <= n.  The saddle delta_n solves E Z_n(delta) = n.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from ._constants import principal_delta
from .errors import IntegralityError, PreconditionError, UnsolvableSaddleError
from .weights import StructureKind, WeightSequence

__all__ = [
    "TiltedEnsemble",
    "SaddlePoint",
    "PointProbability",
    "ProbMethod",
    "log_Fn",
    "moments",
    "mean_untruncated",
    "solve_saddle",
    "char_fn",
    "log_char_fn",
    "point_prob_convolution",
    "point_prob_quadrature",
    "reconstruct_count",
    "CONVOLUTION_MAX_N",
]

CONVOLUTION_MAX_N = 4000
SADDLE_RTOL = 1e-9
QUAD_NODES_PER_WIDTH = 40


@dataclass(frozen=True)
class TiltedEnsemble:
    w: WeightSequence
    kind: StructureKind
    n: int
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "kind", StructureKind.parse(self.kind))
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.n < 0:
            raise ValueError(f"n must be nonnegative, got {self.n}")

    @cached_property
    def b(self) -> np.ndarray:
        return self.w.array(self.n)

    @cached_property
    def k(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=float)

    def with_delta(self, delta: float) -> "TiltedEnsemble":
        e = TiltedEnsemble(self.w, self.kind, self.n, delta)
        # weights do not depend on delta
        e.__dict__["b"] = self.b
        e.__dict__["k"] = self.k
        return e


@dataclass(frozen=True)
class SaddlePoint:
    n: int
    kind: StructureKind
    delta_n: float
    residual: float
    mean: float
    variance: float
    third_cumulant: float
    iterations: int
    bracket: tuple = (0.0, 0.0)

    @property
    def B2(self) -> float:
        return self.variance


class ProbMethod(enum.Enum):
    CONVOLUTION = "convolution"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class PointProbability:
    value: float
    method: ProbMethod
    error_estimate: float
    log_value: float = field(default=float("nan"))
    imag: float = 0.0
    alpha0: Optional[float] = None
    nodes: int = 0

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0 + 1e-12):
            raise ValueError(f"probability out of range: {self.value}")
        if math.isnan(self.log_value):
            lv = math.log(self.value) if self.value > 0 else -math.inf
            object.__setattr__(self, "log_value", lv)


def log_Fn(e: TiltedEnsemble) -> float:
    """log f_n(e^-delta) by direct summation over k <= n."""
    if e.n == 0:
        return 0.0
    u = e.k * e.delta
    if e.kind is StructureKind.MULTISET:
        terms = -e.b * np.log(-np.expm1(-u))
    elif e.kind is StructureKind.SELECTION:
        terms = e.b * np.log1p(np.exp(-u))
    else:
        terms = e.b * np.exp(-u)
    return math.fsum(terms)


def _cumulant_terms(kind: StructureKind, b, k, delta):
    u = k * delta
    x = np.exp(-u)
    if kind is StructureKind.MULTISET:
        om = -np.expm1(-u)  # 1 - x
        c1 = x / om
        c2 = x / om ** 2
        c3 = x * (1.0 + x) / om ** 3
    elif kind is StructureKind.SELECTION:
        op = 1.0 + x
        c1 = x / op
        c2 = x / op ** 2
        c3 = x * (1.0 - x) / op ** 3
    else:
        c1 = c2 = c3 = x
    return b * k * c1, b * k ** 2 * c2, b * k ** 3 * c3


def moments(e: TiltedEnsemble) -> tuple[float, float, float]:
    """(E Z_n, Var Z_n, third central moment), i.e. -L', L'', -L''' for
    L(delta) = log f_n(e^-delta)."""
    if e.n == 0:
        return 0.0, 0.0, 0.0
    t1, t2, t3 = _cumulant_terms(e.kind, e.b, e.k, e.delta)
    return math.fsum(t1), math.fsum(t2), math.fsum(t3)


def _mean(kind, b, k, delta) -> float:
    return math.fsum(_cumulant_terms(kind, b, k, delta)[0])


def mean_untruncated(w: WeightSequence, kind, delta: float, tol: float = 1e-12) -> tuple[float, float]:
    """-(log F)'(delta) summed over all k, with a bound on the neglected tail.

    Diagnostic only; the saddle equation uses the truncated sum.  The tail
    beyond K is bounded by C * integral_K^inf x^(r+1) e^(-x delta) dx / (1-e^-K delta)
    with C = max b_k/k^r observed on k <= 10^4.
    """
    from ._tails import tail_bound, truncation_index

    kind = StructureKind.parse(kind)
    K = truncation_index(w, delta, tol, extra_power=1.0)
    b = w.array(K)
    k = np.arange(1, K + 1, dtype=float)
    value = _mean(kind, b, k, delta)
    bound = tail_bound(w, delta, K, extra_power=1.0)
    if kind is StructureKind.MULTISET:
        bound /= -math.expm1(-K * delta)
    return value, bound


def _check_solvable(kind: StructureKind, b: np.ndarray, k: np.ndarray, n: int) -> None:
    if n < 1:
        raise UnsolvableSaddleError(f"saddle equation needs n >= 1, got {n}")
    total = float(np.dot(k, b))
    if kind is StructureKind.MULTISET:
        if total <= 0:
            raise UnsolvableSaddleError(
                f"all weights b_k, k <= {n}, vanish: E Z_n = 0 cannot reach n = {n}")
    elif kind is StructureKind.SELECTION:
        if 0.5 * total <= n:
            raise UnsolvableSaddleError(
                f"selection saddle needs (1/2) sum_(k<={n}) k b_k > n; "
                f"got {0.5 * total:g} <= {n}")
    elif total <= n:
        raise UnsolvableSaddleError(
            f"assembly saddle needs sum_(k<={n}) k b_k > n; got {total:g} <= {n}")


def solve_saddle(w: WeightSequence, kind, n: int) -> SaddlePoint:
    """Root delta_n of E Z_n(delta) = n by bisection in log(delta), then Newton."""
    kind = StructureKind.parse(kind)
    e = TiltedEnsemble(w, kind, n, 1.0) if n >= 1 else None
    if e is None:
        raise UnsolvableSaddleError(f"saddle equation needs n >= 1, got {n}")
    b, k = e.b, e.k
    _check_solvable(kind, b, k, n)

    def f(d):
        return _mean(kind, b, k, d) - n

    if w.meta is not None:
        guess = principal_delta(w.meta, kind, n)
        lo, hi, factor = guess / 10.0, guess * 10.0, 10.0
    else:
        lo, hi, factor = 1e-12, 50.0, 2.0
    while f(lo) <= 0:
        lo /= factor
        if lo < 1e-300:
            raise UnsolvableSaddleError("could not bracket the saddle from below")
    while f(hi) >= 0:
        hi *= factor
        if hi > 1e6:
            raise UnsolvableSaddleError("could not bracket the saddle from above")
    bracket = (lo, hi)

    a, c = math.log(lo), math.log(hi)
    its = 0
    while c - a > 1e-7:
        mid = 0.5 * (a + c)
        if f(math.exp(mid)) > 0:
            a = mid
        else:
            c = mid
        its += 1
    delta = math.exp(0.5 * (a + c))
    lo_d, hi_d = math.exp(a), math.exp(c)
    for _ in range(50):
        its += 1
        mean, var, _t = moments(e.with_delta(delta))
        resid = mean - n
        if abs(resid) <= 1e-13 * n:
            break
        step = resid / var  # d mean / d delta = -var
        nxt = delta + step
        if not lo_d < nxt < hi_d:
            nxt = 0.5 * (lo_d + hi_d)
        if resid > 0:
            lo_d = max(lo_d, delta)
        else:
            hi_d = min(hi_d, delta)
        if nxt == delta:
            break
        delta = nxt
    mean, var, third = moments(e.with_delta(delta))
    resid = mean - n
    if abs(resid) > SADDLE_RTOL * n:
        raise ArithmeticError(f"saddle solver stalled: residual {resid:g} at delta {delta:g}")
    return SaddlePoint(n, kind, delta, resid, mean, var, third, its, bracket)


def _clog1p(z: np.ndarray) -> np.ndarray:
    """Principal log(1+z) accurate for small |z|."""
    x, y = z.real, z.imag
    re = 0.5 * np.log1p(2.0 * x + x * x + y * y)
    im = np.arctan2(y, 1.0 + x)
    return re + 1j * im


def _log_phi_block(kind, b, k, delta, alpha: np.ndarray) -> np.ndarray:
    """log phi_n(alpha) for a 1-d block of alpha values (rows) against k (cols)."""
    frac = np.mod(np.outer(alpha, k), 1.0)
    theta = 2.0 * math.pi * frac
    # u = 1 - e^(i theta), written to avoid cancellation at small theta
    s_half = np.sin(0.5 * theta)
    u = 2.0 * s_half * s_half - 1j * np.sin(theta)
    x = np.exp(-k * delta)
    if kind is StructureKind.MULTISET:
        ratio = x / -np.expm1(-k * delta)
        terms = -_clog1p(ratio * u)
    elif kind is StructureKind.SELECTION:
        ratio = x / (1.0 + x)
        terms = _clog1p(-ratio * u)
    else:
        terms = -x * u
    return terms @ b


def log_char_fn(e: TiltedEnsemble, alpha) -> np.ndarray:
    """log phi_n(alpha), vectorised and chunked over alpha."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    out = np.empty(alpha.shape, dtype=complex)
    if e.n == 0:
        out[:] = 0.0
        return out
    mask = e.b != 0
    b, k = e.b[mask], e.k[mask]
    flat = alpha.ravel()
    res = out.ravel()
    chunk = max(1, 2_000_000 // max(1, k.size))
    for i in range(0, flat.size, chunk):
        res[i:i + chunk] = _log_phi_block(e.kind, b, k, e.delta, flat[i:i + chunk])
    return res.reshape(alpha.shape)


def char_fn(e: TiltedEnsemble, alpha):
    """phi_n(alpha) = f_n(e^(-delta + 2 pi i alpha)) / f_n(e^-delta)."""
    vals = np.exp(log_char_fn(e, alpha))
    if np.ndim(alpha) == 0:
        return complex(vals[0])
    return vals


def _component_logpmf(kind: StructureKind, bk: float, k: int, delta: float, jmax: int) -> np.ndarray:
    j = np.arange(jmax + 1, dtype=float)
    u = k * delta
    if kind is StructureKind.MULTISET:
        # generalized negative binomial, valid for real b > 0
        return gammaln(bk + j) - gammaln(bk) - gammaln(j + 1.0) - j * u + bk * math.log(-math.expm1(-u))
    if kind is StructureKind.SELECTION:
        bi = int(round(bk))
        j = j[: bi + 1]
        log_q = -math.log1p(math.exp(-u))  # log(1 - p)
        log_p = -u + log_q
        return (gammaln(bi + 1.0) - gammaln(j + 1.0) - gammaln(bi - j + 1.0)
                + j * log_p + (bi - j) * log_q)
    lam_log = math.log(bk) - u
    lam = math.exp(lam_log)
    return -lam + j * lam_log - gammaln(j + 1.0)


def point_prob_convolution(e: TiltedEnsemble) -> PointProbability:
    """P(Z_n = n) by sequential convolution of the component pmfs on {0..n}.

    Mass that leaves the lattice is accumulated in an overflow cell; the
    vector is rescaled after every factor and the scale is tracked in log
    form, so tiny probabilities keep full relative precision.
    """
    n = e.n
    if n > CONVOLUTION_MAX_N:
        raise PreconditionError(f"convolution is limited to n <= {CONVOLUTION_MAX_N}, got {n}")
    if n == 0:
        return PointProbability(1.0, ProbMethod.CONVOLUTION, 0.0, 0.0)
    b = e.b
    if e.kind is StructureKind.SELECTION:
        bad = np.nonzero(b != np.round(b))[0]
        if bad.size:
            raise IntegralityError(
                f"selection pmfs need integer b_k; b_{bad[0] + 1} = {b[bad[0]]}")
    dist = np.zeros(n + 1)
    dist[0] = 1.0
    log_scale = 0.0
    overflow = 0.0
    for k in range(1, n + 1):
        bk = b[k - 1]
        if bk == 0:
            continue
        jmax = n // k
        pmf = np.exp(_component_logpmf(e.kind, float(bk), k, e.delta, jmax))
        new = np.zeros_like(dist)
        for j, pj in enumerate(pmf):
            if pj == 0.0:
                continue
            shift = j * k
            new[shift:] += pj * dist[: n + 1 - shift]
        overflow += max(0.0, dist.sum() - new.sum())
        top = new.max()
        if top <= 0.0:
            return PointProbability(0.0, ProbMethod.CONVOLUTION, 0.0, -math.inf)
        new /= top
        overflow /= top
        log_scale += math.log(top)
        dist = new
    log_p = math.log(dist[n]) + log_scale if dist[n] > 0 else -math.inf
    return PointProbability(math.exp(log_p), ProbMethod.CONVOLUTION, 0.0, log_p)


def _gauss_panels(lo: float, hi: float, width: float, q: int) -> tuple[np.ndarray, np.ndarray]:
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    panels = max(1, int(math.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, panels + 1)
    x, wts = leggauss(q)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * wts[None, :]).ravel()
    return nodes, weights


def _alpha0(e: TiltedEnsemble) -> Optional[float]:
    meta = e.w.meta
    if meta is None or e.n < 2:
        return None
    r = meta.r
    return e.delta ** ((r + 2.0) / (2.0 * (r + 1.0))) * math.log(e.n) ** 2


def point_prob_quadrature(e: TiltedEnsemble, nodes_per_width: int = QUAD_NODES_PER_WIDTH) -> PointProbability:
    """P(Z_n = n) as the integral of phi_n(alpha) e^(-2 pi i n alpha) over [-1/2, 1/2].

    The central part |alpha| <= alpha_0 = delta^((r+2)/(2r+2)) log^2 n is
    covered by Gauss-Legendre panels of width 1/B_n (capped at 8/n so the
    factor e^(-2 pi i n alpha) stays resolved) with ``nodes_per_width``
    nodes each; the remainder uses panels of width 2/n with half as many
    nodes.  The error estimate compares against the same panels with half
    the nodes.
    """
    n = e.n
    if n == 0:
        return PointProbability(1.0, ProbMethod.QUADRATURE, 0.0, 0.0)
    _, var, _ = moments(e)
    B = math.sqrt(var)
    a0 = _alpha0(e)
    a_in = 0.5 if a0 is None else min(0.5, a0)
    width_in = min(1.0 / B, 8.0 / n)
    width_out = 2.0 / n

    def rule(q_in, q_out):
        parts = [_gauss_panels(-a_in, a_in, width_in, q_in)]
        if a_in < 0.5:
            parts.append(_gauss_panels(a_in, 0.5, width_out, q_out))
            parts.append(_gauss_panels(-0.5, -a_in, width_out, q_out))
        nodes = np.concatenate([p[0] for p in parts])
        weights = np.concatenate([p[1] for p in parts])
        return nodes, weights

    def integrate(nodes, weights):
        logs = log_char_fn(e, nodes)
        phase = -2.0 * math.pi * np.mod(n * nodes, 1.0)
        vals = np.exp(logs + 1j * phase)
        return complex(np.sum(weights * vals))

    q_out = max(8, nodes_per_width // 2)
    fine = integrate(*rule(nodes_per_width, q_out))
    coarse = integrate(*rule(max(4, nodes_per_width // 2), max(4, q_out // 2)))
    value = fine.real
    err = abs(fine - coarse)
    count = rule(nodes_per_width, q_out)[0].size
    return PointProbability(
        min(max(value, 0.0), 1.0), ProbMethod.QUADRATURE, err,
        imag=fine.imag, alpha0=a0, nodes=count,
    )


def reconstruct_count(e: TiltedEnsemble, p: PointProbability) -> float:
    """log c_n = n delta + log f_n(e^-delta) + log P(Z_n = n)."""
    if e.n == 0:
        return 0.0
    if not p.value > 0 and not math.isfinite(p.log_value):
        raise PreconditionError("P(Z_n = n) = 0: the count cannot be reconstructed")
    return e.n * e.delta + log_Fn(e) + p.log_value
