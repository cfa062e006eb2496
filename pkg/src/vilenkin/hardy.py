"""Martingale maximal machinery, the H1 norm, and lacunary-block experiments.

The maximal function of a step function is the sup over ranks of the
absolute cylinder averages; its L1 norm is the martingale H1 norm.  For
rank-N step functions the rank-n average coincides pointwise with the
partial sum S_{M_n} f, which is what makes the norm equivalence checkable
as an exact identity rather than a two-sided estimate.

The counterexample family lives here too: for increasing exponents a_k the
function f = sum_k (D_{M_{a_k + 1}} - D_{M_{a_k}}) / sqrt(a_k) has block
constant coefficients, uniformly bounded H1 norm, and window averages of
partial-sum norms growing like sqrt(a_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .norms import lebesgue_constant, lp_norm
from .radix import RadixSystem
from .spectral import (
    SpectralVector,
    StepFunction,
    character_column,
    cumulative_l1_norms,
    dirichlet_kernel,
    fejer_l1_norms,
    forward_fast,
    partial_sum,
)


def cylinder_averages(f: StepFunction, rank: int) -> np.ndarray:
    """Average of f over the rank-n cylinder through each cell (length M_N)."""
    if not 0 <= rank <= f.sys.depth:
        raise ValueError(f"rank {rank} out of range [0, {f.sys.depth}]")
    width = f.sys.products[rank]
    reps = f.sys.cells // width
    avg = f.values.reshape(reps, width).mean(axis=0)
    return np.tile(avg, reps)


def maximal_function(f: StepFunction) -> StepFunction:
    """f*(x) = sup over ranks of |average of f over the cylinder at x|."""
    best = np.full(f.sys.cells, abs(complex(f.values.mean())), dtype=np.float64)
    for rank in range(1, f.sys.depth + 1):
        np.maximum(best, np.abs(cylinder_averages(f, rank)), out=best)
    return StepFunction(f.sys, best)


def h1_norm(f: StepFunction) -> float:
    """Martingale Hardy norm ||f||_{H_1} = ||f*||_1."""
    return lp_norm(maximal_function(f), 1.0)


def block_partial_sums(f: StepFunction) -> list[StepFunction]:
    """The family S_{M_n} f for n = 0 .. N, computed by the spectral route."""
    c = forward_fast(f)
    return [partial_sum(c, f.sys.products[n]) for n in range(f.sys.depth + 1)]


@dataclass(frozen=True)
class HardyProfile:
    """Maximal function, H1 norm, and block partial sums of one function."""

    f: StepFunction
    maximal: StepFunction
    h1: float
    block_sums: tuple[StepFunction, ...]


def hardy_profile(f: StepFunction) -> HardyProfile:
    maximal = maximal_function(f)
    return HardyProfile(
        f=f,
        maximal=maximal,
        h1=lp_norm(maximal, 1.0),
        block_sums=tuple(block_partial_sums(f)),
    )


@dataclass(frozen=True)
class EquivalenceReport:
    """Two routes to the maximal function and their pointwise gap."""

    h1_norm: float
    sup_block_norm: float
    max_pointwise_diff: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_pointwise_diff <= self.tolerance


def check_norm_equivalence(f: StepFunction, tol: float = 1e-9) -> EquivalenceReport:
    """Compare f* (cylinder averages) against sup_n |S_{M_n} f| (spectral).

    The two families coincide pointwise for rank-N step functions, so the
    report carries the max cellwise difference, not just the norms.
    """
    direct = maximal_function(f).values.real
    spectral = np.zeros(f.sys.cells, dtype=np.float64)
    for s in block_partial_sums(f):
        np.maximum(spectral, np.abs(s.values), out=spectral)
    gap = float(np.max(np.abs(direct - spectral)))
    return EquivalenceReport(
        h1_norm=float(direct.mean()),
        sup_block_norm=float(spectral.mean()),
        max_pointwise_diff=gap,
        tolerance=tol,
    )


# ---------------------------------------------------------------------------
# the lacunary-block counterexample


@dataclass(frozen=True)
class CounterexampleSpec:
    """Exponent schedule for the lacunary block martingale.

    alphas must be strictly increasing and at least 1, and the system must
    be deep enough to hold the last coefficient block: depth >= a_K + 1.
    """

    sys: RadixSystem
    alphas: tuple[int, ...]

    def __post_init__(self) -> None:
        alphas = tuple(int(a) for a in self.alphas)
        if not alphas:
            raise ValueError("alpha schedule must contain at least one exponent")
        if alphas[0] < 1 or any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError(f"alpha schedule {alphas} must be strictly increasing and >= 1")
        if alphas[-1] + 1 > self.sys.depth:
            raise ValueError(
                f"depth insufficient: schedule needs depth >= {alphas[-1] + 1}, "
                f"system has {self.sys.depth}"
            )
        object.__setattr__(self, "alphas", alphas)

    @property
    def terms(self) -> int:
        return len(self.alphas)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(a ** -0.5 for a in self.alphas)

    @property
    def tail_sum(self) -> float:
        """sum_k alpha_k^{-1/2}; reported so summability stays visible."""
        return float(sum(self.weights))

    def block(self, k: int) -> tuple[int, int]:
        """Coefficient block [M_{a_k}, M_{a_k + 1}) of term k (0-based)."""
        a = self.alphas[k]
        return self.sys.products[a], self.sys.products[a + 1]

    def block_of(self, j: int) -> int | None:
        for k in range(self.terms):
            lo, hi = self.block(k)
            if lo <= j < hi:
                return k
        return None

    def truncated(self, terms: int) -> "CounterexampleSpec":
        if not 1 <= terms <= self.terms:
            raise ValueError(f"terms {terms} out of range [1, {self.terms}]")
        return CounterexampleSpec(self.sys, self.alphas[:terms])


def build_counterexample(spec: CounterexampleSpec) -> StepFunction:
    """f = sum_k (D_{M_{a_k+1}} - D_{M_{a_k}}) / sqrt(a_k), built exactly.

    D_{M_j} is M_j on the cells of I_j (the multiples of M_j) and zero
    elsewhere, so the construction is pure integer geometry per term.
    """
    vals = np.zeros(spec.sys.cells, dtype=np.complex128)
    for a, w in zip(spec.alphas, spec.weights):
        inner, outer = spec.sys.products[a], spec.sys.products[a + 1]
        vals[::outer] += w * outer
        vals[::inner] -= w * inner
    return StepFunction(spec.sys, vals)


def expected_counterexample_coefficients(spec: CounterexampleSpec) -> np.ndarray:
    """The block-constant coefficient vector the construction must produce."""
    coeffs = np.zeros(spec.sys.cells, dtype=np.complex128)
    for k in range(spec.terms):
        lo, hi = spec.block(k)
        coeffs[lo:hi] = spec.weights[k]
    return coeffs


def partial_sum_decomposition(
    spec: CounterexampleSpec, coeffs: SpectralVector, j: int
) -> tuple[StepFunction, StepFunction]:
    """Split S_j f into the completed blocks plus one kernel term.

    For j inside block k (M_{a_k} <= j < M_{a_k+1}):

        S_j f = S_{M_{a_k}} f + a_k^{-1/2} psi_{M_{a_k}} D_{j - M_{a_k}}

    The first factor collects all finished blocks; the second exists because
    the block coefficients are constant and index addition below M_{a_k+1}
    carries no digit interaction.  ||second term||_1 is exactly
    a_k^{-1/2} L_{j - M_{a_k}} whenever j > M_{a_k}.
    """
    if coeffs.sys != spec.sys:
        raise ValueError("system mismatch: coefficients use a different radix system")
    k = spec.block_of(j)
    if k is None:
        raise ValueError(f"index {j} lies in no coefficient block of the schedule")
    lo, _ = spec.block(k)
    head = partial_sum(coeffs, lo)
    tail = (
        spec.weights[k]
        * character_column(spec.sys, lo)
        * dirichlet_kernel(spec.sys, j - lo).values
    )
    return head, StepFunction(spec.sys, tail)


# ---------------------------------------------------------------------------
# strong means and logarithmic averages


def partial_sum_l1_norms(
    c: SpectralVector,
    lo: int,
    hi: int,
    *,
    offset: StepFunction | None = None,
) -> np.ndarray:
    """||S_m f + offset||_1 for m = lo .. hi inclusive, via one scan."""
    offsets = None if offset is None else offset.values[None, :]
    return cumulative_l1_norms(c.sys, c.coeffs, lo, hi, offsets=offsets)[0]


def strong_sum_average(f: StepFunction, n: int) -> float:
    """Cesaro mean of partial-sum norms: (1/n) sum_{m=1}^{n} ||S_m f||_1."""
    if not 1 <= n <= f.sys.cells:
        raise ValueError(f"average length {n} out of range [1, {f.sys.cells}]")
    norms = partial_sum_l1_norms(forward_fast(f), 1, n)
    return float(norms.mean())


def window_strong_average(
    spec: CounterexampleSpec, coeffs: SpectralVector, k: int
) -> float:
    """B_k = (1/M_{a_k+1}) sum_{l=M_{a_k}}^{2 M_{a_k}} ||S_l f||_1 (ends included)."""
    if coeffs.sys != spec.sys:
        raise ValueError("system mismatch: coefficients use a different radix system")
    a = spec.alphas[k]
    lo = spec.sys.products[a]
    norms = cumulative_l1_norms(spec.sys, coeffs.coeffs, lo, 2 * lo)[0]
    return float(norms.sum() / spec.sys.products[a + 1])


@dataclass(frozen=True)
class LogAverages:
    """The two logarithmic means at a common endpoint n."""

    n: int
    convergence: float  # (1/ln n) sum ||S_k f - f||_1 / k
    bounded: float      # (1/ln n) sum ||S_k f||_1 / k


def gat_log_average(f: StepFunction, n: int) -> LogAverages:
    """Both logarithmic averages over k = 1 .. n (natural log, n >= 2)."""
    if not 2 <= n <= f.sys.cells:
        raise ValueError(f"log average endpoint {n} out of range [2, {f.sys.cells}]")
    c = forward_fast(f)
    weights = np.vstack([c.coeffs, c.coeffs])
    offsets = np.vstack([np.zeros(f.sys.cells, dtype=np.complex128), -f.values])
    norms = cumulative_l1_norms(f.sys, weights, 1, n, offsets=offsets)
    ks = np.arange(1, n + 1, dtype=np.float64)
    scale = 1.0 / math.log(n)
    return LogAverages(
        n=n,
        convergence=float((norms[1] / ks).sum() * scale),
        bounded=float((norms[0] / ks).sum() * scale),
    )


@dataclass(frozen=True)
class FejerMaximalReport:
    """Largest Fejer-mean L1 norm over n <= n_max, against the H1 norm."""

    sup_norm: float
    at_n: int
    h1: float
    ratio: float


def fejer_maximal_check(f: StepFunction, n_max: int | None = None) -> FejerMaximalReport:
    """max_n ||sigma_n f||_1 for n = 1 .. n_max and its ratio to ||f||_{H_1}."""
    if n_max is None:
        n_max = f.sys.cells
    if not 1 <= n_max <= f.sys.cells:
        raise ValueError(f"scan bound {n_max} out of range [1, {f.sys.cells}]")
    norms = fejer_l1_norms(f.sys, forward_fast(f).coeffs, n_max)[0]
    pos = int(np.argmax(norms))
    sup = float(norms[pos])
    h1 = h1_norm(f)
    return FejerMaximalReport(
        sup_norm=sup,
        at_n=pos + 1,
        h1=h1,
        ratio=sup / h1 if h1 > 0 else 0.0,
    )


def verify_decomposition_norm(
    spec: CounterexampleSpec, j: int
) -> tuple[float, float]:
    """(||tail||_1, expected a_k^{-1/2} L_{j - M_{a_k}}) for an in-block j."""
    k = spec.block_of(j)
    if k is None:
        raise ValueError(f"index {j} lies in no coefficient block of the schedule")
    lo, _ = spec.block(k)
    if j <= lo:
        raise ValueError(f"index {j} must exceed the block start {lo}")
    c = forward_fast(build_counterexample(spec))
    _, tail = partial_sum_decomposition(spec, c, j)
    return lp_norm(tail, 1.0), spec.weights[k] * lebesgue_constant(spec.sys, j - lo)
