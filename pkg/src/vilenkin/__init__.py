"""Exact harmonic analysis on bounded Vilenkin groups.

The package covers the truncated product group of cyclic levels: its
character system, fast and naive Fourier transforms, Dirichlet kernels and
Lebesgue constants, digit-variation bounds, the martingale H1 norm, and the
lacunary-block experiments around strong (non)convergence of partial sums.
"""

__version__ = "0.1.0"

from .radix import (
    CellIndex,
    RadixSystem,
    VilenkinIndex,
    build_radix_system,
    cell_from_coords,
    cell_index,
    cell_measure,
    compose,
    decompose,
    group_add,
    group_neg,
    parse_radix_spec,
)
from .spectral import (
    SpectralVector,
    StepFunction,
    character_block,
    character_column,
    cumulative_l1_norms,
    dirichlet_kernel,
    fejer_l1_norms,
    fejer_mean,
    forward_fast,
    forward_naive,
    inverse_transform,
    partial_sum,
    rademacher,
    vilenkin_char,
)
from .norms import (
    BoundCheck,
    LemmaReport,
    VariationProfile,
    check_variation_bounds,
    lebesgue_constant,
    lebesgue_scan,
    lp_norm,
    max_lebesgue_log_ratio,
    scan_variation_bounds,
    variation_average,
    variation_bound_arrays,
    variation_profile,
    variation_values,
)
from .hardy import (
    CounterexampleSpec,
    EquivalenceReport,
    FejerMaximalReport,
    HardyProfile,
    LogAverages,
    block_partial_sums,
    build_counterexample,
    check_norm_equivalence,
    cylinder_averages,
    expected_counterexample_coefficients,
    fejer_maximal_check,
    gat_log_average,
    h1_norm,
    hardy_profile,
    maximal_function,
    partial_sum_decomposition,
    partial_sum_l1_norms,
    strong_sum_average,
    verify_decomposition_norm,
    window_strong_average,
)
from .experiments import random_step_corpus

__all__ = [name for name in dir() if not name.startswith("_")]
