"""Monte Carlo campaign drivers: record streams, sweeps and moment tables.

All aggregation happens on index-ordered value lists with compensated
summation, so outputs are byte-identical for any worker count.
"""

from __future__ import annotations

import math

import numpy as np

from . import parallel, stats, weingarten
from .errors import InvalidConfig
from .sampling import RandomStateConfig, ZProfile, draw_sample
from .stats import TypicalityRecord, tail_probability

DEFAULT_EPSILONS = (0.01, 0.05, 0.1, 0.2)

# Validity thresholds of the concentration statements; runs outside them
# are legal but get flagged in sweep summaries.
EIGEN_DISPERSION_BETA_MAX = 0.25
WORK_TAIL_BETA_MAX = 0.125


def _record_chunk(config: RandomStateConfig, lo: int, hi: int) -> list[TypicalityRecord]:
    out = []
    for index in range(lo, hi):
        gamma, spec = draw_sample(config, index)
        out.append(stats.evaluate_record(gamma, spec, config, index))
    return out


def compute_records(
    config: RandomStateConfig, n_samples: int, threads: int = 1
) -> list[TypicalityRecord]:
    """Records for sample indices 0..n_samples-1, in index order."""
    if n_samples < 1:
        raise InvalidConfig(f"samples must be >= 1, got {n_samples}")
    return parallel.run_chunked(_record_chunk, (config,), n_samples, threads)


def records_csv(records) -> str:
    lines = [stats.CSV_HEADER]
    lines.extend(r.csv_row() for r in records)
    return "\n".join(lines) + "\n"


def _value_block(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    q50, q90, q99 = (float(np.quantile(arr, q)) for q in (0.5, 0.9, 0.99))
    return {
        "mean": math.fsum(values) / len(values),
        "median": q50,
        "q50": q50,
        "q90": q90,
        "q99": q99,
    }


# Mean dispersions below this are round-off dust, not signal: dispersions
# are sums of squared spectral deviations, so pure float noise sits at
# ~(1e-15)^2.  A vacuum sweep lands here and gets no slope fit.
_SLOPE_FLOOR = 1e-24


def fit_loglog_slope(ns, means) -> dict | None:
    """OLS slope of log(mean) against log(n), with its standard error.

    Returns None when any mean is not meaningfully positive (at or below
    the round-off floor), e.g. for vacuum sweeps where every dispersion is
    zero up to rounding.
    """
    if len(ns) < 2 or any(m <= _SLOPE_FLOOR for m in means):
        return None
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(means, dtype=float))
    x_bar, y_bar = float(np.mean(x)), float(np.mean(y))
    sxx = float(np.sum((x - x_bar) ** 2))
    slope = float(np.sum((x - x_bar) * (y - y_bar)) / sxx)
    intercept = y_bar - slope * x_bar
    dof = len(ns) - 2
    if dof > 0:
        rss = float(np.sum((y - intercept - slope * x) ** 2))
        stderr = math.sqrt(rss / dof / sxx)
    else:
        stderr = None
    return {"slope": slope, "stderr": stderr, "intercept": intercept}


def beta_warnings(beta: float) -> list[str]:
    warnings = []
    if beta >= WORK_TAIL_BETA_MAX:
        warnings.append(
            f"beta={beta!r} is outside the validity range of the symplectic-spectrum "
            f"and work-tail bounds (requires beta < {WORK_TAIL_BETA_MAX})"
        )
    if beta >= EIGEN_DISPERSION_BETA_MAX:
        warnings.append(
            f"beta={beta!r} is outside the validity range of the eigenspectrum "
            f"bound (requires beta < {EIGEN_DISPERSION_BETA_MAX})"
        )
    return warnings


def run_sweep(
    n_grid,
    m_sys: int,
    profile: ZProfile,
    samples: int,
    master_seed: int,
    pipeline: str = "purified",
    epsilons=DEFAULT_EPSILONS,
    threads: int = 1,
) -> tuple[list[TypicalityRecord], dict]:
    """Sample every grid point and build the sweep summary.

    Returns (all records concatenated in grid-then-index order, summary
    dict ready for JSON serialization).
    """
    n_grid = [int(n) for n in n_grid]
    if len(n_grid) < 1 or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise InvalidConfig(f"n grid must be strictly increasing, got {n_grid}")
    epsilons = [float(e) for e in epsilons]
    if any(e <= 0.0 for e in epsilons):
        raise InvalidConfig(f"epsilon values must be > 0, got {epsilons}")

    all_records: list[TypicalityRecord] = []
    per_n = []
    mean_deltas = []
    for n_full in n_grid:
        config = RandomStateConfig(
            n_full=n_full,
            m_sys=m_sys,
            profile=profile,
            master_seed=master_seed,
            pipeline=pipeline,
        )
        records = compute_records(config, samples, threads)
        all_records.extend(records)
        works = [r.work for r in records]
        deltas = [r.stat_delta for r in records]
        tails = []
        for eps in epsilons:
            est = tail_probability(works, eps)
            tails.append(
                {
                    "epsilon": eps,
                    "fraction": est.fraction,
                    "wilson_low": est.wilson_low,
                    "wilson_high": est.wilson_high,
                }
            )
        block = {
            "n": n_full,
            "samples": samples,
            "work": _value_block(works),
            "delta": _value_block(deltas),
            "tails": tails,
        }
        per_n.append(block)
        mean_deltas.append(block["delta"]["mean"])

    slope = fit_loglog_slope(n_grid, mean_deltas)
    warnings = beta_warnings(profile.degree)
    if slope is None:
        warnings.append("delta slope undefined: some per-n mean delta is not positive")
    summary = {
        "config": {
            "n_grid": n_grid,
            "m": m_sys,
            "z_profile": profile.canonical(),
            "samples": samples,
            "master_seed": master_seed,
            "pipeline": pipeline,
            "epsilons": epsilons,
        },
        "per_n": per_n,
        "delta_slope": slope,
        "warnings": warnings,
    }
    return all_records, summary


def run_moments(
    config: RandomStateConfig, n_samples: int, threads: int = 1
) -> list[weingarten.MomentReport]:
    """Moment reports for every supported quantity."""
    return [
        weingarten.mc_moment(q, config, n_samples, threads=threads)
        for q in weingarten.QUANTITIES
    ]
