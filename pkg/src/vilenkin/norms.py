"""Lp norms, Lebesgue constants, and the digit-variation statistics bounding them.

For an index n with digits n_j the two variation counts are

    delta_j   = 1 if n_j != 0 else 0
    delta*_j  = |((m_j - n_j) mod m_j) - 1| * delta_j
    v(n)      = delta_0 + sum_j |delta_{j+1} - delta_j|
    v*(n)     = sum_j delta*_j

(delta vanishes above the top digit, so the sum for v is finite).  The
Lebesgue constant L_n = ||D_n||_1 sits between

    v(n)/(4 lambda) + v*(n)/lambda + 1/(2 lambda)   and   1.5 v(n) + 4 v*(n) - 1

with lambda the largest radix.  On dyadic systems delta* vanishes
identically and the bounds collapse to the classical Walsh ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .radix import RadixSystem, VilenkinIndex, decompose
from .spectral import StepFunction, cumulative_l1_norms, dirichlet_kernel


def lp_norm(f: StepFunction, p: float) -> float:
    """Normalized Lp norm ((1/M_N) sum |f|^p)^(1/p); p must be positive.

    numpy's pairwise summation keeps the accumulation error in the same
    class as compensated summation, so large cell counts need no special
    treatment.
    """
    if p <= 0:
        raise ValueError(f"invalid argument p = {p}: exponent must be positive")
    mags = np.abs(f.values)
    if p == 1.0:
        return float(mags.mean())
    return float(np.mean(mags**p) ** (1.0 / p))


def lebesgue_constant(sys: RadixSystem, n: int) -> float:
    """L_n = ||D_n||_1.  Defined for 1 <= n <= M_N.

    D_n is measurable at rank order(n)+1, so the value does not depend on
    the depth used to realize it (tested, not assumed).
    """
    if not 1 <= n <= sys.cells:
        raise ValueError(f"Lebesgue constant index {n} out of range [1, {sys.cells}]")
    return lp_norm(dirichlet_kernel(sys, n), 1.0)


def lebesgue_scan(sys: RadixSystem, lo: int = 1, hi: int | None = None) -> np.ndarray:
    """L_n for every n = lo .. hi inclusive, via one cumulative character scan."""
    if hi is None:
        hi = sys.cells - 1
    if not 1 <= lo <= hi <= sys.cells:
        raise ValueError(f"scan range [{lo}, {hi}] outside [1, {sys.cells}]")
    ones = np.ones(sys.cells, dtype=np.complex128)
    return cumulative_l1_norms(sys, ones, lo, hi)[0]


@dataclass(frozen=True)
class VariationProfile:
    """Digit variation data for one index."""

    index: VilenkinIndex
    delta: tuple[int, ...]
    delta_star: tuple[int, ...]
    v: int
    v_star: int


def variation_profile(sys: RadixSystem, n: int) -> VariationProfile:
    idx = decompose(sys, n)
    delta = tuple(1 if d else 0 for d in idx.digits)
    delta_star = tuple(
        abs(((m - d) % m) - 1) * (1 if d else 0)
        for d, m in zip(idx.digits, sys.radices)
    )
    v = delta[0] + sum(
        abs((delta[j + 1] if j + 1 < len(delta) else 0) - delta[j])
        for j in range(len(delta))
    )
    return VariationProfile(idx, delta, delta_star, v, sum(delta_star))


def variation_values(sys: RadixSystem, ns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (v(n), v*(n)) for an arbitrary array of indices."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and (ns.min() < 0 or ns.max() >= sys.cells):
        raise ValueError(f"indices outside [0, {sys.cells})")
    v = np.zeros(ns.shape, dtype=np.int64)
    v_star = np.zeros(ns.shape, dtype=np.int64)
    prev = np.zeros(ns.shape, dtype=np.int64)
    for j in range(sys.depth):
        m = sys.radices[j]
        d = (ns // sys.products[j]) % m
        cur = (d != 0).astype(np.int64)
        if j == 0:
            v += cur  # the leading delta_0 term
        else:
            v += np.abs(cur - prev)
        v_star += np.where(d != 0, m - d - 1, 0)
        prev = cur
    v += prev  # final transition back to zero above the top digit
    return v, v_star


def variation_bound_arrays(
    v: np.ndarray, v_star: np.ndarray, max_radix: int
) -> tuple[np.ndarray, np.ndarray]:
    """Two-sided Lebesgue-constant bounds from the variation counts."""
    lam = float(max_radix)
    lower = v / (4.0 * lam) + v_star / lam + 1.0 / (2.0 * lam)
    upper = 1.5 * v + 4.0 * v_star - 1.0
    return lower, upper


@dataclass(frozen=True)
class BoundCheck:
    """One row of the variation-bound check for a single index."""

    n: int
    v: int
    v_star: int
    lebesgue: float
    lower: float
    upper: float
    lower_slack: float
    upper_slack: float

    def violated(self, tol: float = 1e-9) -> bool:
        return self.lower_slack < -tol or self.upper_slack < -tol


def check_variation_bounds(
    sys: RadixSystem, n: int, lebesgue: float | None = None
) -> BoundCheck:
    profile = variation_profile(sys, n)
    if lebesgue is None:
        lebesgue = lebesgue_constant(sys, n)
    lower, upper = variation_bound_arrays(
        np.array([profile.v]), np.array([profile.v_star]), sys.max_radix
    )
    lo, up = float(lower[0]), float(upper[0])
    return BoundCheck(
        n=n,
        v=profile.v,
        v_star=profile.v_star,
        lebesgue=lebesgue,
        lower=lo,
        upper=up,
        lower_slack=lebesgue - lo,
        upper_slack=up - lebesgue,
    )


@dataclass(frozen=True)
class LemmaReport:
    """Outcome of a scanned bound or average check."""

    n_lo: int
    n_hi: int
    checked: int
    violations: tuple[int, ...]
    min_lower_slack: float
    min_upper_slack: float
    c_estimate: float | None = None


def scan_variation_bounds(
    sys: RadixSystem,
    lo: int = 1,
    hi: int | None = None,
    tol: float = 1e-9,
    lebesgue: np.ndarray | None = None,
) -> LemmaReport:
    """Check the two-sided bound for every n in [lo, hi]; returns the report."""
    if hi is None:
        hi = sys.cells - 1
    ns = np.arange(lo, hi + 1, dtype=np.int64)
    if lebesgue is None:
        lebesgue = lebesgue_scan(sys, lo, hi)
    v, v_star = variation_values(sys, ns)
    lower, upper = variation_bound_arrays(v, v_star, sys.max_radix)
    lower_slack = lebesgue - lower
    upper_slack = upper - lebesgue
    bad = (lower_slack < -tol) | (upper_slack < -tol)
    return LemmaReport(
        n_lo=lo,
        n_hi=hi,
        checked=int(ns.size),
        violations=tuple(int(n) for n in ns[bad]),
        min_lower_slack=float(lower_slack.min()),
        min_upper_slack=float(upper_slack.min()),
    )


def variation_average(sys: RadixSystem, n: int, normalizer: str = "n_mn") -> float:
    """Average of v over [1, M_n): sum_{k=1}^{M_n - 1} v(k) / (n * M_n).

    The printed normalizer n * M_n is the default; pass normalizer="mn"
    for the plain 1/M_n average (both stay bounded away from zero on the
    systems in scope, the open normalization question is left visible).
    """
    if not 1 <= n <= sys.depth:
        raise ValueError(f"level {n} out of range [1, {sys.depth}]")
    if normalizer not in ("n_mn", "mn"):
        raise ValueError(f"unknown normalizer {normalizer!r}: use 'n_mn' or 'mn'")
    M_n = sys.products[n]
    v, _ = variation_values(sys, np.arange(1, M_n, dtype=np.int64))
    total = float(v.sum())
    return total / (n * M_n) if normalizer == "n_mn" else total / M_n


def max_lebesgue_log_ratio(lebesgue: np.ndarray, lo: int) -> tuple[float, int]:
    """Largest L_n / ln(n) over a scanned range and the n attaining it."""
    ns = np.arange(lo, lo + lebesgue.size)
    mask = ns >= 2
    if not mask.any():
        return 0.0, 0
    ratios = lebesgue[mask] / np.log(ns[mask])
    pos = int(np.argmax(ratios))
    return float(ratios[pos]), int(ns[mask][pos])
