"""Concentration statistics of the reduced random states.

Each sample yields an m-mode covariance matrix whose eigenvalues and
symplectic eigenvalues both cluster around the same thermal value nu_th
(the mean energy per ambient mode).  The dispersions quantifying the two
distances, their sum, and the resulting cap on extractable work are
collected in a :class:`TypicalityRecord`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import phasespace
from .errors import DimensionMismatch, EmptyInput, NumericalFailure
from .sampling import RandomStateConfig, SqueezingSpec, squeeze_gram_diagonal, state_from_unitary

WORK_BOUND_SLACK = 1e-9

# Exact column order of the record CSV schema.
CSV_COLUMNS = (
    "sample_index",
    "n_modes_full",
    "n_modes_sys",
    "beta",
    "z_profile",
    "master_seed",
    "energy",
    "sum_sympl",
    "work",
    "stat_T",
    "stat_frakT",
    "stat_delta",
    "nu_th",
)
CSV_HEADER = ",".join(CSV_COLUMNS)


def thermal_nu(spec: SqueezingSpec, ambient_modes: int | None = None) -> float:
    """Mean energy per mode of the ambient squeezed input, always >= 1/2.

    Equals the trace of the squeeze Gram matrix over four times the ambient
    mode count; 1/2 exactly for the vacuum profile.
    """
    if ambient_modes is not None and ambient_modes != spec.n_modes:
        raise DimensionMismatch(
            f"squeezing has {spec.n_modes} modes, ambient dimension is {ambient_modes}"
        )
    return float(np.sum(squeeze_gram_diagonal(spec))) / (4.0 * spec.n_modes)


def eigen_dispersion(gamma_m: np.ndarray, nu_th: float) -> float:
    """Squared distance of the eigenspectrum from the thermal value:
    sum_k (lambda_k - nu_th)^2 = Tr[(Gamma - nu_th I)^2]."""
    gamma_m = np.asarray(gamma_m, dtype=float)
    lam = np.linalg.eigvalsh(gamma_m)
    return float(np.sum((lam - nu_th) ** 2))


def symplectic_dispersion(gamma_m: np.ndarray, nu_th: float) -> float:
    """Squared distance of the symplectic spectrum from the thermal value:
    2 sum_k (nu_k^2 - nu_th^2)^2."""
    nus = phasespace.symplectic_eigenvalues(gamma_m).nus
    return symplectic_dispersion_from_nus(nus, nu_th)


def symplectic_dispersion_from_nus(nus: np.ndarray, nu_th: float) -> float:
    return 2.0 * float(np.sum((np.asarray(nus) ** 2 - nu_th * nu_th) ** 2))


@dataclass
class TypicalityRecord:
    """Per-sample statistics; field names match the CSV schema."""

    sample_index: int
    n_modes_full: int
    n_modes_sys: int
    beta: float
    z_profile: str
    master_seed: int
    energy: float
    sum_sympl: float
    work: float
    stat_T: float
    stat_frakT: float
    stat_delta: float
    nu_th: float
    eigenvalues: np.ndarray | None = field(default=None, repr=False)

    def csv_row(self) -> str:
        return ",".join(
            (
                str(self.sample_index),
                str(self.n_modes_full),
                str(self.n_modes_sys),
                repr(self.beta),
                self.z_profile,
                str(self.master_seed),
                repr(self.energy),
                repr(self.sum_sympl),
                repr(self.work),
                repr(self.stat_T),
                repr(self.stat_frakT),
                repr(self.stat_delta),
                repr(self.nu_th),
            )
        )


def work_bound(m_sys: int, delta: float) -> float:
    """Cap sqrt(m * delta) on the extractable work implied by the dispersions."""
    return math.sqrt(m_sys * max(delta, 0.0))


def evaluate_record(
    gamma_m: np.ndarray,
    spec: SqueezingSpec,
    config: RandomStateConfig,
    sample_index: int,
    keep_eigenvalues: bool = False,
) -> TypicalityRecord:
    """Assemble the full statistics record for one sampled state.

    Enforces the per-sample work bound ``work <= sqrt(m * delta)`` (an
    exact consequence of physicality); a violation beyond 1e-9 indicates a
    numerical breakdown and raises.  Round-off-negative work is clamped to
    zero in the record only.
    """
    gamma_m = np.asarray(gamma_m, dtype=float)
    nu = thermal_nu(spec, config.ambient_modes)
    lam = np.linalg.eigvalsh(gamma_m)
    nus = phasespace.symplectic_eigenvalues(gamma_m).nus

    energy = 0.5 * float(np.sum(lam))
    sum_sympl = float(np.sum(nus))
    raw_work = energy - sum_sympl
    stat_t = float(np.sum((lam - nu) ** 2))
    stat_frak = symplectic_dispersion_from_nus(nus, nu)
    delta = stat_t + stat_frak

    if raw_work > work_bound(config.m_sys, delta) + WORK_BOUND_SLACK:
        raise NumericalFailure(
            f"work bound violated at sample {sample_index}: "
            f"work={raw_work!r} > sqrt(m*delta)={work_bound(config.m_sys, delta)!r}"
        )
    return TypicalityRecord(
        sample_index=sample_index,
        n_modes_full=config.n_full,
        n_modes_sys=config.m_sys,
        beta=config.profile.degree,
        z_profile=config.profile.canonical(),
        master_seed=config.master_seed,
        energy=energy,
        sum_sympl=sum_sympl,
        work=max(raw_work, 0.0),
        stat_T=stat_t,
        stat_frakT=stat_frak,
        stat_delta=delta,
        nu_th=nu,
        eigenvalues=lam if keep_eigenvalues else None,
    )


def _dispersion_pair(
    u: np.ndarray,
    v: np.ndarray,
    spec: SqueezingSpec,
    m_sys: int,
    statistic,
    constant: float,
    power: int,
) -> tuple[float, float]:
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionMismatch(f"unitary shapes differ: {u.shape} vs {v.shape}")
    if u.shape[0] != spec.n_modes:
        raise DimensionMismatch(
            f"unitaries are {u.shape[0]}-dimensional, squeezing has {spec.n_modes} modes"
        )
    nu = thermal_nu(spec)
    lhs = abs(
        statistic(state_from_unitary(u, spec, m_sys), nu)
        - statistic(state_from_unitary(v, spec, m_sys), nu)
    )
    j_max = float(np.max(spec.z)) ** 2
    rhs = constant * math.sqrt(2.0 * m_sys) * j_max ** power * float(np.linalg.norm(u - v))
    return lhs, rhs


def eigen_dispersion_lipschitz_pair(
    u: np.ndarray, v: np.ndarray, spec: SqueezingSpec, m_sys: int
) -> tuple[float, float]:
    """(lhs, rhs) of the eigen-dispersion Lipschitz inequality.

    lhs is the dispersion difference between the states built from u and v;
    rhs is 4 sqrt(2m) |J|_inf^2 |u - v|_2 with the Frobenius norm.  The
    inequality lhs <= rhs is a proven bound and must hold for every pair.
    """
    return _dispersion_pair(u, v, spec, m_sys, eigen_dispersion, 4.0, 1)


def symplectic_dispersion_lipschitz_pair(
    u: np.ndarray, v: np.ndarray, spec: SqueezingSpec, m_sys: int
) -> tuple[float, float]:
    """(lhs, rhs) of the symplectic-dispersion Lipschitz inequality,
    with constant 10 sqrt(2m) |J|_inf^4."""
    return _dispersion_pair(u, v, spec, m_sys, symplectic_dispersion, 10.0, 2)


def wilson_interval(successes: int, total: int, z_score: float = 1.96) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial fraction."""
    if total <= 0:
        raise EmptyInput("wilson_interval needs at least one trial")
    p_hat = successes / total
    z2 = z_score * z_score
    denom = 1.0 + z2 / total
    center = (p_hat + z2 / (2.0 * total)) / denom
    half = z_score * math.sqrt(p_hat * (1.0 - p_hat) / total + z2 / (4.0 * total * total)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


@dataclass
class TailEstimate:
    epsilon: float
    fraction: float
    wilson_low: float
    wilson_high: float
    n_samples: int


def tail_probability(works, epsilon: float) -> TailEstimate:
    """Empirical fraction of work values exceeding epsilon, with Wilson CI.

    Accepts an iterable of work values or of :class:`TypicalityRecord`.
    """
    values = [w.work if isinstance(w, TypicalityRecord) else float(w) for w in works]
    if not values:
        raise EmptyInput("tail_probability needs at least one record")
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    hits = sum(1 for w in values if w > epsilon)
    low, high = wilson_interval(hits, len(values))
    return TailEstimate(
        epsilon=epsilon,
        fraction=hits / len(values),
        wilson_low=low,
        wilson_high=high,
        n_samples=len(values),
    )
