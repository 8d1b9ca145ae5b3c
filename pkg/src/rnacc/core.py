"""Regularized nonlinear acceleration of iterate sequences.

Given a window of m successive iterates ``theta_0 .. theta_{m-1}`` of an
optimizer, build the residual matrix ``R`` of consecutive differences,
solve the ridge-regularized Gram system ``(R^T R + lam*I) z = 1``,
normalize the solution to unit sum, and return the affine combination
``theta_hat = sum_k c_k theta_{sigma(k)}``. For gradient descent the
residual columns are scaled negative gradients, so the combination
approximately minimizes the gradient norm of the extrapolated point;
near a minimum, where the objective is close to quadratic, the window
spans a Krylov subspace and the extrapolation can land far closer to the
optimum than the last iterate.

Coefficients may be negative; only their sum is constrained. All
arithmetic is float64 regardless of how iterates were stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import (
    DegenerateSum,
    DimensionMismatch,
    InvalidConfig,
    NumericalFailure,
    SingularSystem,
    WindowTooSmall,
)
from .linalg import refined_spd_solve

__all__ = [
    "WeightTarget",
    "RnaConfig",
    "Coefficients",
    "as_iterate_matrix",
    "build_residuals",
    "solve_regularized",
    "normalize",
    "extrapolate",
    "rna",
    "adaptive_rna",
]

# |sum(z)| below this multiple of ||z||_1 means the affine combination
# is undefined; callers are told to raise lam instead.
DEGENERATE_SUM_RTOL = 1e-12


class WeightTarget(Enum):
    """Which m-1 of the m window iterates the coefficients weight.

    ``LATEST`` assigns coefficient k to the iterate each residual leads
    *to* (``theta_1 .. theta_{m-1}``); ``OLDEST`` to the iterate it
    starts from (``theta_0 .. theta_{m-2}``).
    """

    LATEST = "latest"
    OLDEST = "oldest"


def _as_weight_target(value) -> WeightTarget:
    if isinstance(value, WeightTarget):
        return value
    try:
        return WeightTarget(str(value).lower())
    except ValueError:
        raise InvalidConfig(
            f"unknown weight target {value!r}; expected 'latest' or 'oldest'"
        ) from None


@dataclass(frozen=True)
class RnaConfig:
    """Acceleration settings.

    Attributes:
        window: Maximum number of residuals K per extrapolation; the
            window holds at most K+1 iterates. Default 10.
        lam: Ridge added to the Gram matrix. Default 1e-8.
        lam_grid: Optional strictly increasing grid of positive ridges
            for adaptive selection; ``None`` disables it.
        weight_target: See :class:`WeightTarget`. Default ``LATEST``.
    """

    window: int = 10
    lam: float = 1e-8
    lam_grid: tuple[float, ...] | None = None
    weight_target: WeightTarget = WeightTarget.LATEST

    def __post_init__(self):
        if int(self.window) != self.window or self.window < 1:
            raise InvalidConfig(f"window must be a positive integer, got {self.window}")
        object.__setattr__(self, "window", int(self.window))
        if not (self.lam >= 0.0) or not math.isfinite(self.lam):
            raise InvalidConfig(f"lam must be finite and >= 0, got {self.lam}")
        object.__setattr__(self, "lam", float(self.lam))
        if self.lam_grid is not None:
            grid = tuple(float(g) for g in self.lam_grid)
            if not grid:
                raise InvalidConfig("lam_grid must be nonempty when given")
            if any(not (g > 0.0) or not math.isfinite(g) for g in grid):
                raise InvalidConfig("lam_grid entries must be finite and > 0")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise InvalidConfig("lam_grid must be strictly increasing")
            object.__setattr__(self, "lam_grid", grid)
        object.__setattr__(
            self, "weight_target", _as_weight_target(self.weight_target)
        )


@dataclass(frozen=True)
class Coefficients:
    """Solved combination weights.

    Attributes:
        weights: Length-K unit-sum coefficient vector c.
        lam_used: Ridge that actually entered the solve (it may exceed
            the requested one by a one-shot trace-scaled bump), or
            ``None`` when not applicable.
        raw_solution: The pre-normalization solution z of the Gram
            system.
    """

    weights: np.ndarray
    lam_used: float | None
    raw_solution: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)


def as_iterate_matrix(iterates) -> np.ndarray:
    """Validate and stack iterates into an (m, d) float64 matrix.

    Accepts a 2-D array (rows = iterates, oldest first) or a sequence of
    1-D vectors. Raises DimensionMismatch for ragged input and
    NumericalFailure for NaN or infinite entries.
    """
    if isinstance(iterates, np.ndarray) and iterates.ndim == 2:
        mat = np.array(iterates, dtype=np.float64)
    else:
        rows = [np.asarray(v, dtype=np.float64) for v in iterates]
        if not rows:
            raise WindowTooSmall("empty iterate sequence")
        dims = {r.shape for r in rows}
        if len(dims) != 1 or rows[0].ndim != 1:
            raise DimensionMismatch(
                f"iterates must share one dimension, got shapes {sorted(dims)}"
            )
        mat = np.vstack(rows)
    if mat.shape[0] == 0:
        raise WindowTooSmall("empty iterate sequence")
    if mat.shape[1] == 0:
        raise DimensionMismatch("iterates must be nonempty vectors")
    if not np.isfinite(mat).all():
        raise NumericalFailure("iterates contain NaN or infinite entries")
    return mat


def build_residuals(iterates) -> np.ndarray:
    """Return the d x (m-1) matrix whose column k is theta_{k+1} - theta_k.

    For an exact gradient descent trajectory with step eta, column k
    equals ``-eta * grad f(theta_k)``, which is what makes the Gram
    solve a proxy for gradient-norm minimization.

    Raises:
        WindowTooSmall: Fewer than two iterates.
        DimensionMismatch: Iterates of inconsistent dimension.
        NumericalFailure: Non-finite entries.
    """
    mat = as_iterate_matrix(iterates)
    if mat.shape[0] < 2:
        raise WindowTooSmall(
            f"need at least 2 iterates to form a residual, got {mat.shape[0]}"
        )
    return np.diff(mat, axis=0).T


def _solve_gram(gram: np.ndarray, lam: float) -> tuple[np.ndarray, float]:
    """Solve (gram + lam*I) z = 1, bumping lam once on factorization failure.

    Returns (z, effective lam). The bump adds ``10 * eps * trace(gram)``,
    enough to absorb the rounding incurred while forming the Gram matrix;
    it is attempted only for lam > 0, since lam == 0 with a singular
    Gram is a caller error by contract.
    """
    k = gram.shape[0]
    ones = np.ones(k)
    eye = np.eye(k)
    try:
        return refined_spd_solve(gram + lam * eye, ones), lam
    except np.linalg.LinAlgError:
        if lam > 0.0:
            bumped = lam + 10.0 * np.finfo(np.float64).eps * float(np.trace(gram))
            try:
                return refined_spd_solve(gram + bumped * eye, ones), bumped
            except np.linalg.LinAlgError:
                pass
        raise SingularSystem(
            "residual Gram matrix is numerically singular"
            + (" at lam=0; use lam > 0" if lam == 0.0 else f" even at lam={lam:g}")
        ) from None


def solve_regularized(residuals: np.ndarray, lam: float) -> np.ndarray:
    """Solve ``(R^T R + lam*I) z = 1`` for the raw combination weights.

    Forms the K x K Gram matrix explicitly (O(K^2 d)) and solves by
    Cholesky with exact-residual refinement (O(K^3)). If the requested
    ``lam`` is positive but rounding makes the shifted Gram numerically
    indefinite, the ridge is bumped once by ``10 * eps * trace(R^T R)``
    before giving up.

    Args:
        residuals: d x K residual matrix.
        lam: Ridge parameter, >= 0. ``lam == 0`` requires a numerically
            nonsingular Gram matrix.

    Returns:
        z of length K.

    Raises:
        SingularSystem: Rank-deficient system that the bump cannot fix.
        NumericalFailure: Non-finite entries in ``residuals``.
        InvalidConfig: Negative or non-finite ``lam``.
    """
    r = np.asarray(residuals, dtype=np.float64)
    if r.ndim != 2:
        raise DimensionMismatch(f"residual matrix must be 2-D, got ndim={r.ndim}")
    if not np.isfinite(r).all():
        raise NumericalFailure("residual matrix contains NaN or infinite entries")
    if not (lam >= 0.0) or not math.isfinite(lam):
        raise InvalidConfig(f"lam must be finite and >= 0, got {lam}")
    z, _ = _solve_gram(r.T @ r, float(lam))
    return z


def normalize(raw_solution, lam_used: float | None = None) -> Coefficients:
    """Scale z to unit sum: ``c = z / sum(z)``.

    The sum is accumulated with ``math.fsum`` and the largest entry of c
    receives a single correction so that the coefficient sum is exact to
    within one ulp of the largest coefficient. Negative weights are
    legal; the combination is affine, not convex.

    Raises:
        DegenerateSum: ``|sum(z)| < 1e-12 * ||z||_1`` (raise lam).
        NumericalFailure: Non-finite entries.
    """
    z = np.asarray(raw_solution, dtype=np.float64).ravel()
    if z.size == 0:
        raise DimensionMismatch("empty raw solution")
    if not np.isfinite(z).all():
        raise NumericalFailure("raw solution contains NaN or infinite entries")
    total = math.fsum(z)
    if abs(total) < DEGENERATE_SUM_RTOL * math.fsum(np.abs(z)):
        raise DegenerateSum(
            f"raw solution sums to {total:.3e}, which is negligible against "
            f"its own magnitude; increase lam"
        )
    c = z / total
    c[np.argmax(np.abs(c))] -= math.fsum(c) - 1.0
    return Coefficients(weights=c, lam_used=lam_used, raw_solution=z)


def extrapolate(iterates, coefficients, target=WeightTarget.LATEST) -> np.ndarray:
    """Combine window iterates: ``theta_hat = sum_k c_k theta_{sigma(k)}``.

    With m iterates and m-1 coefficients, ``LATEST`` weights
    ``theta_1 .. theta_{m-1}`` and ``OLDEST`` weights
    ``theta_0 .. theta_{m-2}``.

    Accepts a :class:`Coefficients` or a bare weight vector. Raises
    DimensionMismatch unless ``len(c) == m - 1``.
    """
    mat = as_iterate_matrix(iterates)
    weights = np.asarray(getattr(coefficients, "weights", coefficients), dtype=np.float64)
    if weights.ndim != 1 or weights.size != mat.shape[0] - 1:
        raise DimensionMismatch(
            f"{weights.size} coefficients cannot weight {mat.shape[0]} iterates "
            f"(need exactly m - 1)"
        )
    window = mat[1:] if _as_weight_target(target) is WeightTarget.LATEST else mat[:-1]
    return weights @ window


def rna(iterates, config: RnaConfig | None = None) -> tuple[np.ndarray, Coefficients]:
    """Run the full acceleration step on (a suffix of) the iterates.

    Uses at most the last ``config.window + 1`` iterates, silently
    shrinking the window when fewer are available (so the procedure is
    usable from the second epoch onward). Composition of
    :func:`build_residuals`, :func:`solve_regularized`,
    :func:`normalize`, and :func:`extrapolate`; deterministic given its
    inputs.

    Returns:
        (theta_hat, coefficients).
    """
    cfg = config if config is not None else RnaConfig()
    mat = as_iterate_matrix(iterates)
    if mat.shape[0] < 2:
        raise WindowTooSmall(
            f"need at least 2 iterates to extrapolate, got {mat.shape[0]}"
        )
    window = mat[-(cfg.window + 1):]
    residuals = np.diff(window, axis=0).T
    z, lam_used = _solve_gram(residuals.T @ residuals, cfg.lam)
    coeffs = normalize(z, lam_used=lam_used)
    return extrapolate(window, coeffs, cfg.weight_target), coeffs


def adaptive_rna(
    iterates,
    config: RnaConfig,
    score: Callable[[np.ndarray], float],
) -> tuple[np.ndarray, float | None, Coefficients | None]:
    """Grid-search the ridge and keep the best-scoring candidate.

    Runs :func:`rna` once per entry of ``config.lam_grid``, scores each
    extrapolated point with ``score`` (typically the objective or the
    gradient norm), and compares against the fallback candidate: the
    last iterate itself. The fallback wins ties, so the returned score
    is never worse than ``score(last iterate)``. Grid cells that fail
    with a degenerate or singular solve are skipped; if every cell
    fails, the last iterate is returned with ``lam_star = None``.

    Returns:
        (theta_hat, lam_star, coefficients); the latter two are ``None``
        for the fallback candidate.
    """
    if config.lam_grid is None:
        raise InvalidConfig("adaptive_rna requires a config with lam_grid set")
    mat = as_iterate_matrix(iterates)
    if mat.shape[0] < 2:
        raise WindowTooSmall(
            f"need at least 2 iterates to extrapolate, got {mat.shape[0]}"
        )
    best_theta = mat[-1].copy()
    best_lam: float | None = None
    best_coeffs: Coefficients | None = None
    best_score = float(score(best_theta))
    for lam in config.lam_grid:
        cell = RnaConfig(
            window=config.window, lam=lam, weight_target=config.weight_target
        )
        try:
            theta_hat, coeffs = rna(mat, cell)
        except (DegenerateSum, SingularSystem):
            continue
        s = float(score(theta_hat))
        if s < best_score:
            best_theta, best_lam, best_coeffs, best_score = theta_hat, lam, coeffs, s
    return best_theta, best_lam, best_coeffs
