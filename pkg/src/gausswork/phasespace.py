"""Covariance-matrix algebra for zero-mean multimode Gaussian states.

Conventions used everywhere in this package:

* quadrature ordering is (q_1..q_n, p_1..p_n), so the symplectic form is
  the block matrix [[0, I], [-I, 0]];
* hbar = 1 and unit mode frequencies, so the vacuum covariance is I/2 and
  the mean energy of a zero-mean state is Tr[Gamma]/2;
* a physical covariance matrix is symmetric, positive definite and has
  every symplectic eigenvalue >= 1/2 (up to a small slack).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np
from scipy.linalg import schur

from .errors import (
    BadModeCount,
    InvalidCovariance,
    MalformedFile,
    NonPositiveDefinite,
    NumericalFailure,
)

# Tolerances, sized for double precision at dimensions up to 2n ~ 1024.
SYMMETRY_TOL = 1e-10
SYMPLECTIC_TOL = 1e-10
PHYSICAL_SLACK = 1e-9
RECONSTRUCTION_TOL = 1e-8
PURITY_TOL = 1e-8


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return the 2n x 2n symplectic form [[0, I], [-I, 0]]."""
    if n_modes < 1:
        raise BadModeCount(f"n_modes must be >= 1, got {n_modes}")
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def mode_count(matrix: np.ndarray) -> int:
    """Mode count of a 2n x 2n phase-space matrix."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise BadModeCount(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] % 2 != 0 or matrix.shape[0] == 0:
        raise BadModeCount(f"matrix dimension {matrix.shape[0]} is not a positive even number")
    return matrix.shape[0] // 2


def check_covariance(gamma: np.ndarray, require_physical: bool = True) -> int:
    """Validate the covariance-matrix invariants and return the mode count.

    Checks, in order: symmetry (max asymmetry <= 1e-10), positive
    definiteness, and, when ``require_physical``, the uncertainty relation
    nu_k >= 1/2 - 1e-9.  Raises :class:`InvalidCovariance` (or the
    :class:`NonPositiveDefinite` subclass) naming the violated invariant.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = mode_count(gamma)
    asym = float(np.max(np.abs(gamma - gamma.T)))
    if asym > SYMMETRY_TOL:
        raise InvalidCovariance(f"symmetry: max |Gamma - Gamma^T| = {asym:.3e} exceeds {SYMMETRY_TOL}")
    evals = np.linalg.eigvalsh(gamma)
    if evals[0] <= 0.0:
        raise NonPositiveDefinite(f"positive-definite: smallest eigenvalue {evals[0]:.3e} <= 0")
    if require_physical:
        nus = symplectic_eigenvalues(gamma).nus
        if nus[-1] < 0.5 - PHYSICAL_SLACK:
            raise InvalidCovariance(
                f"uncertainty: smallest symplectic eigenvalue {nus[-1]:.12g} < 1/2"
            )
    return n


def energy(gamma: np.ndarray) -> float:
    """Mean energy Tr[Gamma]/2 of a zero-mean state."""
    gamma = np.asarray(gamma, dtype=float)
    mode_count(gamma)
    return 0.5 * float(np.trace(gamma))


def _sqrt_spd(gamma: np.ndarray) -> np.ndarray:
    """Symmetric square root of a symmetric positive-definite matrix."""
    try:
        evals, vecs = np.linalg.eigh(gamma)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK breakdown
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    if evals[0] <= 0.0:
        raise NonPositiveDefinite(f"positive-definite: smallest eigenvalue {evals[0]:.3e} <= 0")
    return (vecs * np.sqrt(evals)) @ vecs.T


def _interleaved_to_split(n_modes: int) -> np.ndarray:
    """Column permutation mapping (q1,p1,...,qn,pn) indices to (q..q,p..p)."""
    idx = np.empty(2 * n_modes, dtype=int)
    idx[:n_modes] = 2 * np.arange(n_modes)
    idx[n_modes:] = 2 * np.arange(n_modes) + 1
    return idx


@dataclass
class WilliamsonResult:
    """Symplectic spectrum, descending, plus the optional diagonalizing factor.

    When ``symplectic_factor`` is present it satisfies
    ``Gamma = S D S^T`` with ``D = diag(nus) (+) diag(nus)``.
    """

    nus: np.ndarray
    symplectic_factor: np.ndarray | None = None

    @property
    def n_modes(self) -> int:
        return len(self.nus)

    def diagonal(self) -> np.ndarray:
        return np.diag(np.concatenate([self.nus, self.nus]))


def symplectic_eigenvalues(gamma: np.ndarray, with_factor: bool = False) -> WilliamsonResult:
    """Williamson symplectic spectrum of a positive-definite matrix.

    The eigenvalues of Omega @ Gamma are {+-i nu_k}; the nu_k are computed
    from the Hermitian matrix i * G^{1/2} Omega G^{1/2}, which is the
    numerically robust route.  With ``with_factor`` the real Schur form of
    the antisymmetric kernel additionally yields S with Gamma = S D S^T.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = mode_count(gamma)
    omega = symplectic_form(n)
    root = _sqrt_spd(gamma)
    kernel = root @ omega @ root
    if not with_factor:
        try:
            evals = np.linalg.eigvalsh(1j * kernel)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
        # Hermitian spectrum is {-nu_n..-nu_1, nu_1..nu_n}; take the positive half.
        return WilliamsonResult(nus=evals[n:][::-1].copy())

    try:
        t_form, q_orth = schur(kernel, output="real")
    except Exception as exc:  # pragma: no cover - LAPACK breakdown
        raise NumericalFailure(f"Schur decomposition failed: {exc}") from exc
    # Antisymmetric kernels have a block-diagonal real Schur form with
    # 2x2 blocks [[0, t], [-t, 0]]; swap columns inside a block if t < 0.
    nus = np.empty(n)
    q_orth = q_orth.copy()
    for k in range(n):
        t = t_form[2 * k, 2 * k + 1]
        if t < 0.0:
            q_orth[:, [2 * k, 2 * k + 1]] = q_orth[:, [2 * k + 1, 2 * k]]
            t = -t
        nus[k] = t
    if np.any(nus <= 0.0):
        raise NumericalFailure("non-positive symplectic eigenvalue in Schur form")
    order = np.argsort(-nus, kind="stable")
    nus = nus[order]
    cols = np.empty(2 * n, dtype=int)
    cols[0::2] = 2 * order
    cols[1::2] = 2 * order + 1
    q_orth = q_orth[:, cols]
    scale = np.repeat(nus, 2) ** -0.5
    factor = (root @ q_orth) * scale
    factor = factor[:, _interleaved_to_split(n)]
    return WilliamsonResult(nus=nus, symplectic_factor=factor)


def symplectic_eigenvalues_direct(gamma: np.ndarray) -> np.ndarray:
    """Cross-check spectrum from the imaginary parts of eig(Omega @ Gamma).

    Independent of the symmetric-kernel route; used to validate it.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = mode_count(gamma)
    evals = np.linalg.eigvals(symplectic_form(n) @ gamma)
    return np.sort(np.abs(evals.imag))[::-1][0::2].copy()


def symplectic_trace(gamma: np.ndarray) -> float:
    """Sum of symplectic eigenvalues over the doubled spectrum, 2 * sum(nu)."""
    return 2.0 * float(np.sum(symplectic_eigenvalues(gamma).nus))


def extractable_work(gamma: np.ndarray) -> float:
    """Maximum mean-energy decrease under Gaussian unitaries.

    Equals Tr[Gamma]/2 - sum(nu_k), i.e. half the gap between the trace and
    the symplectic trace.  Zero for thermal states.  Round-off can make the
    result slightly negative; it is clamped only in reports, never here.
    """
    gamma = np.asarray(gamma, dtype=float)
    nus = symplectic_eigenvalues(gamma).nus
    return 0.5 * float(np.trace(gamma)) - float(np.sum(nus))


def keep_indices(n_modes: int, keep: int) -> np.ndarray:
    """Row/column indices of the first ``keep`` modes in split ordering."""
    if not 1 <= keep <= n_modes:
        raise BadModeCount(f"keep={keep} out of range for {n_modes} modes")
    return np.concatenate([np.arange(keep), n_modes + np.arange(keep)])


def partial_trace(gamma: np.ndarray, keep: int) -> np.ndarray:
    """Covariance matrix of the first ``keep`` modes."""
    gamma = np.asarray(gamma, dtype=float)
    n = mode_count(gamma)
    idx = keep_indices(n, keep)
    return gamma[np.ix_(idx, idx)].copy()


def purify(gamma_m: np.ndarray) -> np.ndarray:
    """Two-copy pure extension of a physical m-mode covariance matrix.

    Williamson-factor the input as S D S^T, attach one two-mode-squeezed
    partner per thermal mode, and apply S on the original half.  The result
    is a 2m-mode pure state (all nu = 1/2) whose first-m-mode partial trace
    reproduces the input, with Tr of the output <= 2 Tr of the input.
    """
    gamma_m = np.asarray(gamma_m, dtype=float)
    m = check_covariance(gamma_m)
    res = symplectic_eigenvalues(gamma_m, with_factor=True)
    nus = res.nus
    # The square root amplifies eigenvalue round-off near nu = 1/2 (an
    # excess of 1e-16 becomes a 1e-8 cross term); sub-noise excesses mean
    # the mode is pure and needs no partner.
    excess = nus * nus - 0.25
    excess[excess <= 1e-12] = 0.0
    cross = np.sqrt(excess)

    big = np.zeros((4 * m, 4 * m))
    q_a, q_r = np.arange(m), m + np.arange(m)
    p_a, p_r = 2 * m + np.arange(m), 3 * m + np.arange(m)
    big[q_a, q_a] = nus
    big[q_r, q_r] = nus
    big[p_a, p_a] = nus
    big[p_r, p_r] = nus
    big[q_a, q_r] = cross
    big[q_r, q_a] = cross
    big[p_a, p_r] = -cross
    big[p_r, p_a] = -cross

    s = res.symplectic_factor
    embed = np.eye(4 * m)
    embed[np.ix_(q_a, q_a)] = s[:m, :m]
    embed[np.ix_(q_a, p_a)] = s[:m, m:]
    embed[np.ix_(p_a, q_a)] = s[m:, :m]
    embed[np.ix_(p_a, p_a)] = s[m:, m:]
    return embed @ big @ embed.T


def single_mode_squeezer(z: float, n_modes: int, target_mode: int) -> np.ndarray:
    """Symplectic matrix scaling q of one mode by z and its p by 1/z.

    ``target_mode`` is zero-based.  z = 1 gives the identity.
    """
    if z <= 0.0:
        raise ValueError(f"squeezing value must be positive, got {z}")
    if n_modes < 1 or not 0 <= target_mode < n_modes:
        raise BadModeCount(f"target_mode={target_mode} out of range for {n_modes} modes")
    s = np.eye(2 * n_modes)
    s[target_mode, target_mode] = z
    s[n_modes + target_mode, n_modes + target_mode] = 1.0 / z
    return s


def is_symplectic(matrix: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    matrix = np.asarray(matrix, dtype=float)
    n = mode_count(matrix)
    omega = symplectic_form(n)
    return float(np.max(np.abs(matrix @ omega @ matrix.T - omega))) <= tol


def is_orthosymplectic(matrix: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    matrix = np.asarray(matrix, dtype=float)
    if not is_symplectic(matrix, tol):
        return False
    gram = matrix.T @ matrix
    return float(np.max(np.abs(gram - np.eye(gram.shape[0])))) <= tol


def williamson_reconstruction_error(gamma: np.ndarray, result: WilliamsonResult) -> float:
    """Relative spectral-norm error of Gamma - S D S^T."""
    if result.symplectic_factor is None:
        raise ValueError("result carries no symplectic factor")
    s = result.symplectic_factor
    delta = gamma - s @ result.diagonal() @ s.T
    return float(np.linalg.norm(delta, 2) / np.linalg.norm(gamma, 2))


# Text format: first line is the mode count n, then 2n rows of 2n
# whitespace-separated decimals in (q..q, p..p) ordering.

def read_covariance_text(stream: TextIO) -> np.ndarray:
    lines = [line.strip() for line in stream if line.strip()]
    if not lines:
        raise MalformedFile("empty covariance file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise MalformedFile(f"first line must be the mode count, got {lines[0]!r}") from exc
    if n < 1:
        raise MalformedFile(f"mode count must be >= 1, got {n}")
    if len(lines) != 1 + 2 * n:
        raise MalformedFile(f"expected {2 * n} matrix rows, found {len(lines) - 1}")
    rows = []
    for line in lines[1:]:
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError as exc:
            raise MalformedFile(f"non-numeric entry in row: {line!r}") from exc
        if len(row) != 2 * n:
            raise MalformedFile(f"expected {2 * n} entries per row, found {len(row)}")
        rows.append(row)
    return np.array(rows, dtype=float)


def write_covariance_text(gamma: np.ndarray, stream: TextIO) -> None:
    gamma = np.asarray(gamma, dtype=float)
    n = mode_count(gamma)
    stream.write(f"{n}\n")
    for row in gamma:
        stream.write(" ".join(repr(float(x)) for x in row) + "\n")
