"""Samplers for Haar unitaries, squeezing profiles and random Gaussian states.

A random state is built by squeezing n vacua with a z-profile, scrambling
them with a Haar-random passive interferometer (an orthogonal symplectic
matrix obtained from a Haar unitary) and tracing out all but the first m
modes.  The default ``purified`` pipeline doubles the ambient mode count
before the trace, so the ambient unitary lives in U(2 n_full).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadModeCount,
    DimensionMismatch,
    EmptyConstraintSet,
    InvalidConfig,
    InvalidProfile,
    NotUnitary,
    NumericalFailure,
    RejectionTimeout,
)

UNITARY_TOL = 1e-10
EMBED_IMAG_TOL = 1e-12

_REJECTION_BATCH = 256
_REJECTION_MAX_DRAWS = 2_000_000


def sample_rng(master_seed: int, sample_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one sample index.

    Streams are keyed by (master_seed, sample_index), so any partitioning
    of indices across workers yields bit-identical draws.
    """
    if sample_index < 0:
        raise InvalidConfig(f"sample_index must be >= 0, got {sample_index}")
    seq = np.random.SeedSequence(master_seed, spawn_key=(sample_index,))
    return np.random.default_rng(seq)


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Complex standard-Gaussian matrix with E|Z_ij|^2 = 1."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2.0)


def haar_isometry(dim: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """``cols`` orthonormal columns distributed as the first columns of a
    Haar unitary of size ``dim`` (QR of a Ginibre block with the R-diagonal
    phase correction; the raw QR alone is not Haar)."""
    if dim < 1 or not 1 <= cols <= dim:
        raise BadModeCount(f"invalid isometry shape ({dim}, {cols})")
    z = ginibre(dim, cols, rng)
    try:
        q, r = np.linalg.qr(z, mode="reduced")
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK breakdown
        raise NumericalFailure(f"QR factorization failed: {exc}") from exc
    diag = np.diagonal(r).copy()
    # A zero diagonal entry has probability zero; keep the phase finite.
    diag[diag == 0] = 1.0
    return q * (diag / np.abs(diag))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary of size ``dim``."""
    return haar_isometry(dim, dim, rng)


def _check_unitary(u: np.ndarray) -> int:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitary(f"expected a square matrix, got shape {u.shape}")
    d = u.shape[0]
    residue = float(np.max(np.abs(u.conj().T @ u - np.eye(d))))
    if residue > max(UNITARY_TOL, 1e-13 * d):
        raise NotUnitary(f"max |U^dag U - I| = {residue:.3e}")
    return d


def unitary_to_symplectic(u: np.ndarray) -> np.ndarray:
    """Orthogonal symplectic image [[Re U, Im U], [-Im U, Re U]] of a unitary.

    This is the closed real form of the conjugation
    P diag(U, U*) P^{-1} with P = [[I, iI], [iI, I]]/sqrt(2); the two agree
    to machine precision (see :func:`unitary_to_symplectic_reference`).
    The map is a group homomorphism from U(d) onto the passive phase-space
    transformations of d modes.
    """
    u = np.asarray(u, dtype=complex)
    _check_unitary(u)
    return np.block([[u.real, u.imag], [-u.imag, u.real]])


def unitary_to_symplectic_reference(u: np.ndarray) -> np.ndarray:
    """Reference embedding via the explicit P-conjugation.

    Kept as the convention anchor; discards an imaginary residue after
    checking it is below 1e-12.
    """
    u = np.asarray(u, dtype=complex)
    d = _check_unitary(u)
    eye = np.eye(d)
    p = np.block([[eye, 1j * eye], [1j * eye, eye]]) / math.sqrt(2.0)
    block = np.zeros((2 * d, 2 * d), dtype=complex)
    block[:d, :d] = u
    block[d:, d:] = u.conj()
    out = p @ block @ p.conj().T
    residue = float(np.max(np.abs(out.imag)))
    if residue > EMBED_IMAG_TOL:
        raise NumericalFailure(f"imaginary residue {residue:.3e} exceeds {EMBED_IMAG_TOL}")
    return out.real


@dataclass(frozen=True)
class ZProfile:
    """Squeezing profile for the ambient modes.

    Kinds: ``vacuum`` (all ones), ``uniform`` (all z0), ``power`` (the
    first ceil(n/4) modes squeezed to n^(beta/2), rest 1, so the largest
    squeeze-spectrum entry grows like n^beta), ``flat`` (flat Lebesgue
    measure on the energy ball, by rejection) and ``file`` (one z per line,
    ambient-dimension many entries).
    """

    kind: str
    z0: float | None = None
    beta: float | None = None
    energy: float | None = None
    path: str | None = None

    _KINDS = ("vacuum", "uniform", "power", "flat", "file")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise InvalidProfile(f"unknown profile kind {self.kind!r}")
        if self.kind == "uniform" and (self.z0 is None or self.z0 < 1.0):
            raise InvalidProfile(f"uniform profile needs z0 >= 1, got {self.z0}")
        if self.kind == "power" and (self.beta is None or self.beta < 0.0):
            raise InvalidProfile(f"power profile needs beta >= 0, got {self.beta}")
        if self.kind == "flat" and (self.energy is None or self.energy <= 0.0):
            raise InvalidProfile(f"flat profile needs a positive energy bound, got {self.energy}")
        if self.kind == "file" and not self.path:
            raise InvalidProfile("file profile needs a path")

    @classmethod
    def parse(cls, text: str) -> "ZProfile":
        """Parse 'vacuum | uniform:<z0> | power:<beta> | flat:<E> | file:<path>'."""
        head, _, tail = text.strip().partition(":")
        try:
            if head == "vacuum":
                if tail:
                    raise InvalidProfile("vacuum takes no parameter")
                return cls("vacuum")
            if head == "uniform":
                return cls("uniform", z0=float(tail))
            if head == "power":
                return cls("power", beta=float(tail))
            if head == "flat":
                return cls("flat", energy=float(tail))
            if head == "file":
                return cls("file", path=tail)
        except ValueError as exc:
            raise InvalidProfile(f"bad profile parameter in {text!r}") from exc
        raise InvalidProfile(f"unknown profile {text!r}")

    def canonical(self) -> str:
        if self.kind == "vacuum":
            return "vacuum"
        if self.kind == "uniform":
            return f"uniform:{self.z0!r}"
        if self.kind == "power":
            return f"power:{self.beta!r}"
        if self.kind == "flat":
            return f"flat:{self.energy!r}"
        return f"file:{self.path}"

    @property
    def degree(self) -> float:
        """Polynomial growth degree of the squeeze spectrum (beta for
        power profiles, 0 for every bounded profile)."""
        return float(self.beta) if self.kind == "power" else 0.0

    @property
    def is_random(self) -> bool:
        return self.kind == "flat"


@dataclass(frozen=True, eq=False)
class SqueezingSpec:
    """Vector of per-mode squeezing values z_i >= 1.

    ``energy_bound`` marks membership in the energy ball
    sum(z^2 + z^-2) <= 4E; profile-generated vectors carry None.
    """

    z: np.ndarray
    energy_bound: float | None = None

    def __post_init__(self) -> None:
        z = np.atleast_1d(np.asarray(self.z, dtype=float)).copy()
        if z.ndim != 1 or z.size == 0:
            raise InvalidProfile("squeezing vector must be a nonempty 1-D array")
        if np.any(z < 1.0):
            raise InvalidProfile(f"squeezing values must be >= 1, min is {z.min()}")
        if self.energy_bound is not None:
            budget = float(np.sum(z * z + z ** -2.0))
            if budget > 4.0 * self.energy_bound:
                raise InvalidProfile(
                    f"energy-ball violation: sum(z^2 + z^-2) = {budget} > 4E = {4 * self.energy_bound}"
                )
        z.flags.writeable = False
        object.__setattr__(self, "z", z)

    @property
    def n_modes(self) -> int:
        return int(self.z.size)


def flat_z_max(energy: float) -> float:
    """Largest single z compatible with the ball: solves z^2 + z^-2 = 4E."""
    if energy < 0.5:
        raise EmptyConstraintSet(f"energy bound {energy} admits no z >= 1")
    return math.sqrt(2.0 * energy + math.sqrt(4.0 * energy * energy - 1.0))


def draw_squeezing(
    profile: ZProfile, n_modes: int, rng: np.random.Generator | None = None
) -> SqueezingSpec:
    """Squeezing vector for ``n_modes`` ambient modes under a profile.

    Deterministic profiles ignore ``rng``.  The flat profile rejection
    samples: each z_i uniform on [1, z_max], accepted iff the vector lies
    in the energy ball, so accepted vectors satisfy the bound exactly.
    """
    if n_modes < 1:
        raise BadModeCount(f"n_modes must be >= 1, got {n_modes}")
    if profile.kind == "vacuum":
        return SqueezingSpec(np.ones(n_modes))
    if profile.kind == "uniform":
        return SqueezingSpec(np.full(n_modes, float(profile.z0)))
    if profile.kind == "power":
        z = np.ones(n_modes)
        z[: math.ceil(n_modes / 4)] = float(n_modes) ** (profile.beta / 2.0)
        return SqueezingSpec(z)
    if profile.kind == "file":
        with open(profile.path, "r", encoding="utf-8") as fh:
            values = [float(line) for line in fh if line.strip()]
        if len(values) != n_modes:
            raise DimensionMismatch(
                f"profile file has {len(values)} entries, ambient dimension is {n_modes}"
            )
        return SqueezingSpec(np.array(values))

    # flat measure on the energy ball
    energy = float(profile.energy)
    if 4.0 * energy < 2.0 * n_modes:
        raise EmptyConstraintSet(
            f"4E = {4 * energy} < 2n = {2 * n_modes}: the constraint set is empty"
        )
    if rng is None:
        raise InvalidConfig("flat profile needs an RNG stream")
    z_hi = flat_z_max(energy)
    drawn = 0
    while drawn < _REJECTION_MAX_DRAWS:
        batch = rng.uniform(1.0, z_hi, size=(_REJECTION_BATCH, n_modes))
        drawn += _REJECTION_BATCH
        cost = np.sum(batch * batch + batch ** -2.0, axis=1)
        hits = np.nonzero(cost <= 4.0 * energy)[0]
        if hits.size:
            return SqueezingSpec(batch[hits[0]], energy_bound=energy)
    raise RejectionTimeout(
        f"no acceptance in {_REJECTION_MAX_DRAWS} draws (rate < 1e-6); "
        "use a deterministic profile (uniform/power) instead"
    )


def squeeze_gram_diagonal(spec: SqueezingSpec) -> np.ndarray:
    """Diagonal (z_1^2..z_n^2, z_1^-2..z_n^-2) of the squeeze-layer Gram matrix."""
    zsq = spec.z * spec.z
    return np.concatenate([zsq, 1.0 / zsq])


def squeeze_gram(spec: SqueezingSpec) -> np.ndarray:
    """Gram matrix S S^T of the squeeze layer: diag(z^2) (+) diag(z^-2).

    Twice the covariance of the product squeezed-vacuum state.
    """
    return np.diag(squeeze_gram_diagonal(spec))


@dataclass(frozen=True)
class RandomStateConfig:
    """Configuration of the random-state pipeline.

    ``n_full`` is the mode count of the pre-trace system; the ``purified``
    pipeline doubles it before applying the ambient interferometer, the
    ``direct`` pipeline does not.  ``m_sys`` modes are kept.
    """

    n_full: int
    m_sys: int
    profile: ZProfile
    master_seed: int
    pipeline: str = "purified"

    def __post_init__(self) -> None:
        if self.n_full < 1:
            raise InvalidConfig(f"n_full must be >= 1, got {self.n_full}")
        if not 1 <= self.m_sys <= self.n_full:
            raise InvalidConfig(f"m_sys={self.m_sys} out of range 1..{self.n_full}")
        if self.pipeline not in ("direct", "purified"):
            raise InvalidConfig(f"pipeline must be 'direct' or 'purified', got {self.pipeline!r}")

    @property
    def ambient_modes(self) -> int:
        return 2 * self.n_full if self.pipeline == "purified" else self.n_full


def _gamma_from_rows(rows: np.ndarray, gram_diag: np.ndarray) -> np.ndarray:
    """Reduced covariance from the kept rows of the ambient unitary.

    ``rows`` holds the first m rows of U in U(d); the corresponding rows of
    the embedded interferometer are [Re W, Im W] and [-Im W, Re W], and the
    kept covariance block is half their Gram matrix through the squeeze
    diagonal.
    """
    re, im = rows.real, rows.imag
    sel = np.block([[re, im], [-im, re]])
    return 0.5 * (sel * gram_diag) @ sel.T


def state_from_unitary(u: np.ndarray, spec: SqueezingSpec, m_sys: int) -> np.ndarray:
    """Kept-mode covariance produced by an explicit ambient unitary.

    Equals the full pipeline: embed u, conjugate the squeeze Gram matrix,
    halve, and keep the first ``m_sys`` modes.
    """
    u = np.asarray(u, dtype=complex)
    d = _check_unitary(u)
    if d != spec.n_modes:
        raise DimensionMismatch(f"unitary is {d}-dimensional, squeezing has {spec.n_modes} modes")
    if not 1 <= m_sys <= d:
        raise BadModeCount(f"m_sys={m_sys} out of range 1..{d}")
    return _gamma_from_rows(u[:m_sys], squeeze_gram_diagonal(spec))


def draw_sample(
    config: RandomStateConfig, sample_index: int
) -> tuple[np.ndarray, SqueezingSpec]:
    """One (covariance, squeezing) draw, deterministic in (seed, index).

    Only the kept rows of the ambient Haar unitary are generated (their
    marginal distribution is exact), which keeps the cost at O(d m^2)
    instead of O(d^3).
    """
    rng = sample_rng(config.master_seed, sample_index)
    d = config.ambient_modes
    spec = draw_squeezing(config.profile, d, rng)
    rows = haar_isometry(d, config.m_sys, rng).T
    return _gamma_from_rows(rows, squeeze_gram_diagonal(spec)), spec


def sample_random_state(config: RandomStateConfig, sample_index: int) -> np.ndarray:
    """Covariance matrix of one random reduced Gaussian state."""
    return draw_sample(config, sample_index)[0]


def random_symplectic(
    n_modes: int, rng: np.random.Generator, max_squeeze: float = 1.5
) -> np.ndarray:
    """Generic symplectic matrix: interferometer, squeeze layer, interferometer."""
    o_left = unitary_to_symplectic(haar_unitary(n_modes, rng))
    o_right = unitary_to_symplectic(haar_unitary(n_modes, rng))
    z = rng.uniform(1.0, max_squeeze, n_modes)
    diag = np.concatenate([z, 1.0 / z])
    return (o_left * diag) @ o_right


def random_covariance(
    n_modes: int,
    rng: np.random.Generator,
    nu_max: float = 2.0,
    max_squeeze: float = 1.5,
) -> np.ndarray:
    """Random physical covariance matrix S D S^T with nu in [1/2, nu_max]."""
    s = random_symplectic(n_modes, rng, max_squeeze)
    nus = rng.uniform(0.5, nu_max, n_modes)
    return (s * np.concatenate([nus, nus])) @ s.T
