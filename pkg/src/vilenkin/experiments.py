"""Reproducible experiment drivers and their report plumbing.

Every driver returns an ExperimentReport: a main table, optional extra
tables, a summary dict, and a violation count for the CLI exit code.  File
output is byte-identical for identical (config, seed, threads); timings are
therefore logged to stderr, never written into report files.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import sys as _sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .hardy import (
    CounterexampleSpec,
    build_counterexample,
    check_norm_equivalence,
    expected_counterexample_coefficients,
    fejer_l1_norms,
    forward_fast,
    h1_norm,
)
from .norms import (
    lebesgue_scan,
    max_lebesgue_log_ratio,
    variation_average,
    variation_bound_arrays,
    variation_values,
)
from .radix import RadixSystem
from .spectral import StepFunction, cumulative_l1_norms

DEFAULT_EQUALITY_TOL = 1e-9
DEFAULT_ORACLE_TOL = 1e-10


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]


@dataclass
class ExperimentReport:
    experiment: str
    meta: dict[str, str]
    table: Table
    extra_tables: dict[str, Table] = field(default_factory=dict)
    summary: dict[str, object] = field(default_factory=dict)
    violations: int = 0


def config_hash(resolved: dict[str, object]) -> str:
    """sha256 over the canonical key=value rendering of a resolved config."""
    canon = "\n".join(f"{k}={resolved[k]}" for k in sorted(resolved))
    return hashlib.sha256(canon.encode()).hexdigest()


def report_meta(sys: RadixSystem, resolved: dict[str, object]) -> dict[str, str]:
    return {
        "radix": sys.spec_string(),
        "depth": str(sys.depth),
        "version": __version__,
        "config_hash": config_hash(resolved),
    }


def _fmt(x: object) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render_csv(report: ExperimentReport, table: Table | None = None) -> str:
    """One CSV table with `#` meta header lines; deterministic float text."""
    t = table if table is not None else report.table
    buf = io.StringIO()
    buf.write(f"# experiment={report.experiment}\n")
    for key, val in report.meta.items():
        buf.write(f"# {key}={val}\n")
    buf.write(",".join(t.columns) + "\n")
    for row in t.rows:
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def render_json(report: ExperimentReport) -> str:
    payload = {
        "experiment": report.experiment,
        "meta": report.meta,
        "columns": report.table.columns,
        "rows": [list(r) for r in report.table.rows],
        "tables": {
            name: {"columns": t.columns, "rows": [list(r) for r in t.rows]}
            for name, t in report.extra_tables.items()
        },
        "summary": report.summary,
        "violations": report.violations,
    }
    return json.dumps(payload, indent=2) + "\n"


def write_report(report: ExperimentReport, out: str | None, fmt: str) -> list[str]:
    """Write the report; returns the paths written (empty for stdout)."""
    if fmt == "json":
        text = render_json(report)
        if out is None:
            _sys.stdout.write(text)
            return []
        with open(out, "w") as fh:
            fh.write(text)
        return [out]
    if fmt != "csv":
        raise ValueError(f"unknown output format {fmt!r}: use 'csv' or 'json'")
    written = []
    main = render_csv(report)
    if out is None:
        _sys.stdout.write(main)
    else:
        with open(out, "w") as fh:
            fh.write(main)
        written.append(out)
    for name, table in report.extra_tables.items():
        if out is None:
            _sys.stdout.write(f"# table={name}\n")
            _sys.stdout.write(render_csv(report, table))
        else:
            stem, dot, ext = out.rpartition(".")
            side = f"{stem}.{name}.{ext}" if dot else f"{out}.{name}"
            with open(side, "w") as fh:
                fh.write(render_csv(report, table))
            written.append(side)
    return written


# ---------------------------------------------------------------------------
# shared helpers


def random_step_corpus(
    sys: RadixSystem, count: int, max_rank: int, seed: int
) -> list[StepFunction]:
    """Deterministic corpus of complex step functions.

    Function i has rank r_i = 1 + (i mod max_rank); its M_{r_i} base values
    are standard complex normals drawn from numpy.random.default_rng(seed)
    in corpus order, then tiled across the remaining levels.
    """
    if count < 1:
        raise ValueError(f"corpus size must be >= 1, got {count}")
    if not 1 <= max_rank <= sys.depth:
        raise ValueError(f"max rank {max_rank} out of range [1, {sys.depth}]")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        width = sys.products[1 + (i % max_rank)]
        base = rng.standard_normal(width) + 1j * rng.standard_normal(width)
        out.append(StepFunction(sys, np.tile(base, sys.cells // width)))
    return out


def _chunk_ranges(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    """Split the inclusive range [lo, hi] into contiguous inclusive chunks."""
    total = hi - lo + 1
    parts = max(1, min(parts, total))
    size = -(-total // parts)
    out = []
    start = lo
    while start <= hi:
        end = min(start + size - 1, hi)
        out.append((start, end))
        start = end + 1
    return out


def _map_ordered(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def scan_l1_norms_threaded(
    sys: RadixSystem,
    weights: np.ndarray,
    lo: int,
    hi: int,
    threads: int,
) -> np.ndarray:
    """cumulative_l1_norms for one weight row, chunked across a thread pool.

    Each chunk restarts the recursion from its own synthesized checkpoint, so
    results are assembled in index order regardless of scheduling.
    """
    chunks = _chunk_ranges(lo, hi, threads)
    parts = _map_ordered(
        lambda c: cumulative_l1_norms(sys, weights, c[0], c[1])[0], chunks, threads
    )
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# drivers


def run_lebesgue_scan(
    sys: RadixSystem,
    n_lo: int,
    n_hi: int,
    tol: float,
    threads: int,
    resolved: dict[str, object],
) -> ExperimentReport:
    ones = np.ones(sys.cells, dtype=np.complex128)
    lebesgue = scan_l1_norms_threaded(sys, ones, n_lo, n_hi, threads)
    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    v, v_star = variation_values(sys, ns)
    lower, upper = variation_bound_arrays(v, v_star, sys.max_radix)
    lower_slack = lebesgue - lower
    upper_slack = upper - lebesgue
    bad = (lower_slack < -tol) | (upper_slack < -tol)
    rows = [
        (
            int(ns[i]),
            int(v[i]),
            int(v_star[i]),
            float(lebesgue[i]),
            float(lower[i]),
            float(upper[i]),
            float(lower_slack[i]),
            float(upper_slack[i]),
        )
        for i in range(ns.size)
    ]
    ratio, at_n = max_lebesgue_log_ratio(lebesgue, n_lo)
    report = ExperimentReport(
        experiment="lebesgue-scan",
        meta=report_meta(sys, resolved),
        table=Table(
            ["n", "v", "v_star", "L_n", "lower_bound", "upper_bound",
             "lower_slack", "upper_slack"],
            rows,
        ),
        summary={
            "checked": int(ns.size),
            "violations": int(bad.sum()),
            "min_lower_slack": float(lower_slack.min()),
            "min_upper_slack": float(upper_slack.min()),
            "max_L_over_log_n": ratio,
            "max_L_over_log_n_at": at_n,
        },
        violations=int(bad.sum()),
    )
    return report


def run_variation_average(
    sys: RadixSystem, n_max: int, resolved: dict[str, object]
) -> ExperimentReport:
    rows = []
    for n in range(1, n_max + 1):
        rows.append(
            (
                n,
                float(variation_average(sys, n, "n_mn")),
                float(variation_average(sys, n, "mn")),
            )
        )
    c_estimate = min(r[1] for r in rows)
    return ExperimentReport(
        experiment="lemma1",
        meta=report_meta(sys, resolved),
        table=Table(["n", "average_n_mn", "average_mn"], rows),
        summary={"c_estimate": c_estimate},
        violations=0 if c_estimate > 0 else 1,
    )


def run_divergence(
    sys: RadixSystem,
    alphas: Sequence[int],
    threads: int,
    tol: float,
    resolved: dict[str, object],
) -> ExperimentReport:
    spec = CounterexampleSpec(sys, tuple(alphas))
    f = build_counterexample(spec)
    coeffs = forward_fast(f)
    eq_dev = float(
        np.max(np.abs(coeffs.coeffs - expected_counterexample_coefficients(spec)))
    )

    norms = scan_l1_norms_threaded(sys, coeffs.coeffs, 1, sys.cells, threads)
    cumulative = np.cumsum(norms)

    rows = []
    for k, a in enumerate(spec.alphas):
        lo = sys.products[a]
        window = norms[lo - 1 : 2 * lo]  # norms[m-1] holds ||S_m f||_1
        b_k = float(window.sum() / sys.products[a + 1])
        root = math.sqrt(a)
        truncated = build_counterexample(spec.truncated(k + 1))
        rows.append((k + 1, a, sys.products[a], b_k, root, b_k / root, h1_norm(truncated)))

    curve_rows = []
    for level in range(1, sys.depth + 1):
        n = sys.products[level]
        curve_rows.append((n, float(cumulative[n - 1] / n)))

    ratios = [r[5] for r in rows]
    b_values = [r[3] for r in rows]
    h1_values = [r[6] for r in rows]
    fit = float(
        sum(b * math.sqrt(a) for b, a in zip(b_values, spec.alphas))
        / sum(spec.alphas)
    )
    return ExperimentReport(
        experiment="divergence",
        meta=report_meta(sys, resolved),
        table=Table(
            ["k", "alpha_k", "M_alpha_k", "B_k", "alpha_k_sqrt", "ratio", "h1_norm"],
            rows,
        ),
        extra_tables={"cesaro": Table(["n", "cesaro_average"], curve_rows)},
        summary={
            "eq_block_coeff_deviation": eq_dev,
            "b_strictly_increasing": all(
                b < c for b, c in zip(b_values, b_values[1:])
            ),
            "min_ratio": min(ratios),
            "fit_ratio": fit,
            "h1_spread": max(h1_values) / min(h1_values),
            "tail_sum": spec.tail_sum,
        },
        violations=0 if eq_dev <= tol else 1,
    )


def run_gat(
    sys: RadixSystem,
    count: int,
    max_rank: int,
    seed: int,
    resolved: dict[str, object],
) -> ExperimentReport:
    corpus = random_step_corpus(sys, count, max_rank, seed)
    coeff_rows = np.vstack([forward_fast(f).coeffs for f in corpus])
    value_rows = np.vstack([f.values for f in corpus])
    h1s = np.array([h1_norm(f) for f in corpus])

    n_max = sys.cells
    norms_s = cumulative_l1_norms(sys, coeff_rows, 1, n_max)
    norms_d = cumulative_l1_norms(sys, coeff_rows, 1, n_max, offsets=-value_rows)
    sigma = fejer_l1_norms(sys, coeff_rows, n_max)
    ks = np.arange(1, n_max + 1, dtype=np.float64)
    sum_s = np.cumsum(norms_s / ks, axis=1)
    sum_d = np.cumsum(norms_d / ks, axis=1)

    checkpoints = [sys.products[level] for level in range(2, sys.depth + 1)]
    rows = []
    for i in range(count):
        rank = 1 + (i % max_rank)
        for n in checkpoints:
            log_n = math.log(n)
            rows.append(
                (
                    i,
                    rank,
                    n,
                    float(sum_d[i, n - 1] / log_n),
                    float(sum_s[i, n - 1] / log_n),
                    float(sum_s[i, n - 1] / log_n / h1s[i]),
                )
            )

    fejer_rows = []
    for i in range(count):
        sup = float(sigma[i].max())
        fejer_rows.append((i, sup, float(h1s[i]), sup / float(h1s[i])))

    final = sys.cells
    bounded_ratios = sum_s[:, final - 1] / math.log(final) / h1s
    return ExperimentReport(
        experiment="gat",
        meta=report_meta(sys, resolved),
        table=Table(
            ["func_id", "rank", "n", "convergence_form", "bounded_form", "bounded_ratio"],
            rows,
        ),
        extra_tables={
            "fejer": Table(["func_id", "sup_sigma_l1", "h1_norm", "ratio"], fejer_rows)
        },
        summary={
            "count": count,
            "max_bounded_ratio": float(bounded_ratios.max()),
            "max_fejer_ratio": float(max(r[3] for r in fejer_rows)),
        },
        violations=0,
    )


def run_equiv_check(
    sys: RadixSystem,
    count: int,
    rank: int,
    seed: int,
    tol: float,
    resolved: dict[str, object],
) -> ExperimentReport:
    corpus = random_step_corpus(sys, count, rank, seed)
    rows = []
    worst = 0.0
    bad = 0
    for i, f in enumerate(corpus):
        rep = check_norm_equivalence(f, tol)
        rows.append(
            (
                i,
                1 + (i % rank),
                float(rep.h1_norm),
                float(rep.sup_block_norm),
                float(rep.max_pointwise_diff),
            )
        )
        worst = max(worst, rep.max_pointwise_diff)
        if not rep.passed:
            bad += 1
    return ExperimentReport(
        experiment="equiv-check",
        meta=report_meta(sys, resolved),
        table=Table(
            ["func_id", "rank", "h1_norm", "sup_block_norm", "max_pointwise_diff"],
            rows,
        ),
        summary={"max_pointwise_diff": worst, "violations": bad},
        violations=bad,
    )
