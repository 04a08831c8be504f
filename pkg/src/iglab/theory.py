"""Exact and asymptotic edge-probability formulas, the scaling law, and
critical-parameter solvers for the interest-overlap network model.

The model joins three layers on one node set: an overlap graph where two
nodes are adjacent iff their size-K object rings (drawn from a pool of P
objects) share at least d objects, a Bernoulli(f) friendship layer, and a
Bernoulli(g) link-survival layer. The per-pair edge probability is
t = f * g * s(K, P, d) with s the hypergeometric overlap tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidParameterError

# Finite-n proxies for the asymptotic regime conditions; thresholds are
# configuration constants so the advisory is reproducible.
REGIME_SPARSITY_THRESHOLD = 0.1   # flags K^2 ln n / P above this
REGIME_POOL_THRESHOLD = 0.1       # flags K n ln n / P above this
REGIME_RING_GROWTH_EXPONENT = 0.1  # flags K below n**this


@dataclass(frozen=True)
class ModelParams:
    """Model parameter tuple (n, K, P, d, f, g); p = f*g is derived."""

    n: int
    K: int
    P: int
    d: int
    f: float
    g: float

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameterError(f"n must be >= 2, got {self.n}")
        if not (1 <= self.d <= self.K <= self.P):
            raise InvalidParameterError(
                f"need 1 <= d <= K <= P, got d={self.d}, K={self.K}, P={self.P}"
            )
        if not (0.0 <= self.f <= 1.0):
            raise InvalidParameterError(f"f must be in [0,1], got {self.f}")
        if not (0.0 <= self.g <= 1.0):
            raise InvalidParameterError(f"g must be in [0,1], got {self.g}")

    @property
    def p(self) -> float:
        """Combined friendship x link-survival probability."""
        return self.f * self.g

    def replace(self, **kw) -> "ModelParams":
        vals = dict(n=self.n, K=self.K, P=self.P, d=self.d, f=self.f, g=self.g)
        vals.update(kw)
        return ModelParams(**vals)


@dataclass
class RegimeCondition:
    name: str
    value: float
    threshold: float
    ok: bool
    description: str


@dataclass
class ScalingDiagnostics:
    s: float
    t: float
    alpha: float
    m: int
    predicted_limit: float
    regime_flags: list = field(default_factory=list)


def _validate_kpd(K: int, P: int, d: int) -> None:
    if not (1 <= d <= K <= P):
        raise InvalidParameterError(
            f"need 1 <= d <= K <= P, got d={d}, K={K}, P={P}"
        )


def edge_prob_overlap_exact(K: int, P: int, d: int) -> Fraction:
    """Exact probability two independent uniform K-subsets of a P-pool share
    at least d elements, as a reduced rational.

    Hypergeometric tail over the general support max(d, 2K-P) <= u <= K, so
    P < 2K is also legal (out-of-range terms are zero anyway).
    """
    _validate_kpd(K, P, d)
    total = math.comb(P, K)
    num = 0
    for u in range(max(d, 2 * K - P), K + 1):
        num += math.comb(K, u) * math.comb(P - K, K - u)
    return Fraction(num, total)


def edge_prob_overlap(K: int, P: int, d: int) -> float:
    """Float value of the exact overlap probability s(K, P, d)."""
    return float(edge_prob_overlap_exact(K, P, d))


def edge_prob_model(params: ModelParams) -> float:
    """Per-pair edge probability t = f * g * s(K, P, d) of the full model."""
    return params.p * edge_prob_overlap(params.K, params.P, params.d)


def approx_edge_prob_overlap(K: int, P: int, d: int) -> float:
    """Asymptotic overlap probability (1/d!) * (K^2/P)^d, clamped to [0,1].

    Accurate only when K is large and K^2/P is small; at moderate K^2/P the
    relative error can exceed 10%.
    """
    if K < 1 or P < 1 or d < 1:
        raise InvalidParameterError("K, P, d must all be >= 1")
    val = (K * K / P) ** d / math.factorial(d)
    return min(1.0, val)


def alpha_from_params(params: ModelParams, m: int) -> float:
    """Deviation alpha solving n*t = ln n + m*ln ln n + alpha."""
    if params.n < 3:
        raise InvalidParameterError("scaling law needs n >= 3 (ln ln n undefined)")
    if m < 0:
        raise InvalidParameterError(f"failure budget m must be >= 0, got {m}")
    t = edge_prob_model(params)
    return params.n * t - math.log(params.n) - m * math.log(math.log(params.n))


def predicted_limit_prob(alpha: float, m: int) -> float:
    """Limit probability exp(-exp(-alpha)/m!) of staying connected after any
    m node failures; 1 at alpha=+inf and 0 at alpha=-inf."""
    if m < 0:
        raise InvalidParameterError(f"failure budget m must be >= 0, got {m}")
    if math.isnan(alpha):
        raise InvalidParameterError("alpha must not be NaN")
    if alpha == math.inf:
        return 1.0
    if alpha == -math.inf:
        return 0.0
    return math.exp(-math.exp(-alpha) / math.factorial(m))


def er_kconn_limit(alpha: float, k: int) -> float:
    """Limit probability that an Erdos-Renyi graph at the k-connectivity
    scaling is k-connected: exp(-exp(-alpha)/(k-1)!). Same kernel as
    predicted_limit_prob with m = k-1."""
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    return predicted_limit_prob(alpha, k - 1)


def check_regime(params: ModelParams) -> list[RegimeCondition]:
    """Finite-n advisory proxies for the theorem's asymptotic conditions."""
    n, K, P = params.n, params.K, params.P
    ln_n = math.log(n)
    sparsity = K * K * ln_n / P
    pool = K * n * ln_n / P
    ring_floor = n ** REGIME_RING_GROWTH_EXPONENT
    return [
        RegimeCondition(
            name="K^2/P = o(1/ln n)",
            value=sparsity,
            threshold=REGIME_SPARSITY_THRESHOLD,
            ok=sparsity <= REGIME_SPARSITY_THRESHOLD,
            description=f"K^2 ln n / P = {sparsity:.6g}",
        ),
        RegimeCondition(
            name="K/P = o(1/(n ln n))",
            value=pool,
            threshold=REGIME_POOL_THRESHOLD,
            ok=pool <= REGIME_POOL_THRESHOLD,
            description=f"K n ln n / P = {pool:.6g}",
        ),
        RegimeCondition(
            name="K = Omega(n^eps)",
            value=float(K),
            threshold=ring_floor,
            ok=K >= ring_floor,
            description=f"K = {K} vs n^{REGIME_RING_GROWTH_EXPONENT} = {ring_floor:.6g}",
        ),
    ]


def poisson_degree_mean(n: int, t: float, h: int) -> float:
    """Mean n * (n t)^h * exp(-n t) / h! of the asymptotic Poisson law for
    the number of degree-h nodes."""
    if not (0.0 <= t <= 1.0):
        raise InvalidParameterError(f"t must be in [0,1], got {t}")
    if h < 0:
        raise InvalidParameterError(f"h must be >= 0, got {h}")
    nt = n * t
    if nt == 0.0:
        return float(n) if h == 0 else 0.0
    log_val = math.log(n) + h * math.log(nt) - nt - math.lgamma(h + 1)
    return math.exp(log_val)


def poisson_pmf(lam: float, ell: int) -> float:
    """Poisson pmf lam^ell exp(-lam)/ell!, evaluated in log space."""
    if lam < 0:
        raise InvalidParameterError(f"lambda must be >= 0, got {lam}")
    if ell < 0:
        raise InvalidParameterError(f"ell must be >= 0, got {ell}")
    if lam == 0.0:
        return 1.0 if ell == 0 else 0.0
    return math.exp(ell * math.log(lam) - lam - math.lgamma(ell + 1))


def scaling_diagnostics(params: ModelParams, m: int) -> ScalingDiagnostics:
    s = edge_prob_overlap(params.K, params.P, params.d)
    t = params.p * s
    alpha = alpha_from_params(params, m)
    return ScalingDiagnostics(
        s=s,
        t=t,
        alpha=alpha,
        m=m,
        predicted_limit=predicted_limit_prob(alpha, m),
        regime_flags=[c for c in check_regime(params) if not c.ok],
    )


# -- critical parameter solvers ------------------------------------------

CRITICAL_AXES = ("g", "f", "n", "m", "K", "P")


@dataclass
class CriticalResult:
    """Boundary value where f*g*s(K,P,d) crosses (ln n + m ln ln n)/n.

    For continuous axes (f, g) the crossing is solved exactly by division;
    for integer axes the extreme integer satisfying the inequality is
    returned (minimal n*, minimal K*, maximal P*, maximal m*). When no value
    in the valid domain works, feasible is False and value carries the
    unclamped/sentinel quantity.
    """

    axis: str
    value: float
    feasible: bool
    alpha_at_value: float | None = None
    boundary_hit: bool = False
    note: str = ""


def _threshold(n: int, m: int) -> float:
    return (math.log(n) + m * math.log(math.log(n))) / n


def solve_critical(param_name: str, params: ModelParams, m: int) -> CriticalResult:
    """Critical value of one axis with all other parameters held fixed."""
    if param_name not in CRITICAL_AXES:
        raise InvalidParameterError(
            f"axis must be one of {CRITICAL_AXES}, got {param_name!r}"
        )
    if m < 0:
        raise InvalidParameterError(f"m must be >= 0, got {m}")
    if params.n < 3:
        raise InvalidParameterError("critical solving needs n >= 3")

    if param_name == "g":
        return _solve_ratio_axis("g", params, m, params.f)
    if param_name == "f":
        return _solve_ratio_axis("f", params, m, params.g)
    if param_name == "m":
        return _solve_m(params, m)
    if param_name == "n":
        return _solve_n(params, m)
    if param_name == "K":
        return _solve_K(params, m)
    return _solve_P(params, m)


def _alpha_at(params: ModelParams, m: int) -> float:
    return alpha_from_params(params, m)


def _solve_ratio_axis(axis: str, params: ModelParams, m: int, other: float) -> CriticalResult:
    s = edge_prob_overlap(params.K, params.P, params.d)
    thr = _threshold(params.n, m)
    denom = params.n  # kept for clarity of the rearrangement below
    del denom
    if other * s == 0.0:
        return CriticalResult(axis=axis, value=math.inf, feasible=False,
                              note="f*s (resp. g*s) is zero; no finite crossing")
    star = thr / (other * s)
    feasible = star <= 1.0
    alpha = None
    if feasible:
        alpha = _alpha_at(params.replace(**{axis: star}), m)
    return CriticalResult(axis=axis, value=star, feasible=feasible,
                          alpha_at_value=alpha,
                          boundary_hit=(alpha == 0.0 if alpha is not None else False),
                          note="" if feasible else "required value exceeds 1")


def _solve_m(params: ModelParams, m_query: int) -> CriticalResult:
    # maximal m with t >= (ln n + m ln ln n)/n
    t = edge_prob_model(params)
    n = params.n
    lnln = math.log(math.log(n))
    raw = (n * t - math.log(n)) / lnln
    if raw < 0:
        return CriticalResult(axis="m", value=raw, feasible=False,
                              note="even m=0 violates the inequality")
    m_star = math.floor(raw)
    return CriticalResult(axis="m", value=float(m_star), feasible=True,
                          alpha_at_value=alpha_from_params(params, m_star),
                          boundary_hit=(raw == m_star))


_N_CAP = 10 ** 15


def _solve_n(params: ModelParams, m: int) -> CriticalResult:
    # minimal n >= 3 with t >= (ln n + m ln ln n)/n; t does not depend on n.
    t = edge_prob_model(params)
    if t <= 0:
        return CriticalResult(axis="n", value=math.inf, feasible=False,
                              note="t = 0; threshold never met")

    def ok(n: int) -> bool:
        return t >= _threshold(n, m)

    # The threshold is not monotone at very small n (it can rise before the
    # eventual 1/n decay), so scan a small prefix before bisecting the tail.
    for n in range(3, 1001):
        if ok(n):
            return _n_result(params, m, n)
    if not ok(_N_CAP):
        return CriticalResult(axis="n", value=math.inf, feasible=False,
                              note=f"no n <= {_N_CAP} meets the threshold")
    lo, hi = 1000, _N_CAP  # ok(lo) False, ok(hi) True; threshold decreasing here
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return _n_result(params, m, hi)


def _n_result(params: ModelParams, m: int, n_star: int) -> CriticalResult:
    p2 = params.replace(n=n_star)
    alpha = alpha_from_params(p2, m)
    return CriticalResult(axis="n", value=float(n_star), feasible=True,
                          alpha_at_value=alpha, boundary_hit=(alpha == 0.0))


def _solve_K(params: ModelParams, m: int) -> CriticalResult:
    # minimal K in [d..P] with f*g*s(K,P,d) >= threshold; s nondecreasing in K.
    thr = _threshold(params.n, m)
    p = params.p

    def ok(K: int) -> bool:
        return p * edge_prob_overlap(K, params.P, params.d) >= thr

    lo, hi = params.d, params.P
    if not ok(hi):
        return CriticalResult(axis="K", value=math.inf, feasible=False,
                              note="even K = P misses the threshold")
    if ok(lo):
        return _int_result("K", params.replace(K=lo), m, lo)
    # ok(lo) False, ok(hi) True
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    # +-1 neighborhood check (bisection soundness guard)
    assert ok(hi) and not ok(hi - 1)
    return _int_result("K", params.replace(K=hi), m, hi)


def _solve_P(params: ModelParams, m: int) -> CriticalResult:
    # maximal P >= K with f*g*s(K,P,d) >= threshold; s nonincreasing in P.
    thr = _threshold(params.n, m)
    p = params.p

    def ok(P: int) -> bool:
        return p * edge_prob_overlap(params.K, P, params.d) >= thr

    lo = params.K
    if not ok(lo):
        return CriticalResult(axis="P", value=-math.inf, feasible=False,
                              note="even P = K (s = 1) misses the threshold")
    # exponential search for an upper bound where it fails
    hi = max(2 * lo, lo + 1)
    while ok(hi):
        if hi > 10 ** 12:
            return CriticalResult(axis="P", value=math.inf, feasible=False,
                                  note="threshold met beyond the search cap")
        hi *= 2
    # ok(lo) True, ok(hi) False
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    assert ok(lo) and not ok(lo + 1)
    return _int_result("P", params.replace(P=lo), m, lo)


def _int_result(axis: str, params_at: ModelParams, m: int, value: int) -> CriticalResult:
    alpha = alpha_from_params(params_at, m)
    return CriticalResult(axis=axis, value=float(value), feasible=True,
                          alpha_at_value=alpha, boundary_hit=(alpha == 0.0))
