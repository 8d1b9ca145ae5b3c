"""Baseline optimizers whose iterate streams feed the acceleration.

Plain gradient descent and heavy-ball SGD with weight decay and a
step-drop learning rate schedule. The driver :func:`run_with_rna`
snapshots parameters once per epoch into a sliding buffer and runs the
extrapolation offline alongside; the extrapolated point is never fed
back, so the base trajectory is bit-identical with acceleration on or
off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .buffer import SlidingBuffer
from .core import RnaConfig, adaptive_rna, rna
from .errors import DegenerateSum, InvalidConfig, NumericalFailure
from .problems import Problem

__all__ = [
    "OptimizerConfig",
    "EpochRecord",
    "AccelRecord",
    "learning_rate",
    "gd_step",
    "sgd_momentum_epoch",
    "run_with_rna",
]

# Abort an epoch once the parameter norm passes this; the run has diverged.
DIVERGENCE_NORM = 1e12


@dataclass(frozen=True)
class OptimizerConfig:
    """Heavy-ball SGD settings.

    ``schedule`` lists (epoch, multiplier) pairs with strictly
    increasing epochs; every drop at or below the current epoch applies,
    so ``[(150, 0.1), (250, 0.1)]`` with base 0.1 gives 0.1 before epoch
    150, 0.01 from 150, and 0.001 from 250. ``batch_size=None`` means
    one full-batch step per epoch.
    """

    eta: float
    momentum: float = 0.9
    weight_decay: float = 1e-5
    schedule: tuple[tuple[int, float], ...] = ()
    batch_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not (self.eta > 0.0 and math.isfinite(self.eta)):
            raise InvalidConfig(f"eta must be positive and finite, got {self.eta}")
        if not (0.0 <= self.momentum < 1.0):
            raise InvalidConfig(f"momentum must lie in [0, 1), got {self.momentum}")
        if not (self.weight_decay >= 0.0):
            raise InvalidConfig(f"weight_decay must be >= 0, got {self.weight_decay}")
        sched = tuple((int(e), float(m)) for e, m in self.schedule)
        if any(m <= 0.0 for _, m in sched):
            raise InvalidConfig("schedule multipliers must be positive")
        if any(b[0] <= a[0] for a, b in zip(sched, sched[1:])):
            raise InvalidConfig("schedule epochs must be strictly increasing")
        object.__setattr__(self, "schedule", sched)
        if self.batch_size is not None and (
            int(self.batch_size) != self.batch_size or self.batch_size < 1
        ):
            raise InvalidConfig(f"batch_size must be a positive integer, got {self.batch_size}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidConfig(f"seed must be a nonnegative integer, got {self.seed}")


def learning_rate(cfg: OptimizerConfig, epoch: int) -> float:
    """Step size at ``epoch``: base eta times all drops at or below it."""
    eta = cfg.eta
    for drop_epoch, mult in cfg.schedule:
        if epoch >= drop_epoch:
            eta *= mult
    return eta


def gd_step(theta: np.ndarray, problem: Problem, eta: float) -> np.ndarray:
    """One plain gradient descent step; exactly one gradient evaluation."""
    if not eta > 0.0:
        raise InvalidConfig(f"eta must be positive, got {eta}")
    g = problem.grad(theta)
    if not np.isfinite(g).all():
        raise NumericalFailure("gradient contains NaN or infinite entries")
    return theta - eta * g


def sgd_momentum_epoch(
    theta: np.ndarray,
    velocity: np.ndarray,
    problem: Problem,
    cfg: OptimizerConfig,
    epoch: int,
) -> tuple[np.ndarray, np.ndarray]:
    """One full pass over the data in shuffled mini-batches.

    Per batch: ``v = momentum*v + (g_batch + weight_decay*theta)`` then
    ``theta = theta - eta(epoch)*v``. Weight decay joins the gradient
    *before* the momentum buffer (classical heavy ball, not the
    decoupled variant). Shuffling is a deterministic function of
    (seed, epoch). With ``batch_size=None`` the pass is a single
    full-gradient step, which for zero momentum and zero decay is
    exactly :func:`gd_step`.
    """
    theta = np.asarray(theta, dtype=np.float64)
    velocity = np.asarray(velocity, dtype=np.float64)
    eta = learning_rate(cfg, epoch)
    if cfg.batch_size is None:
        batches = [None]
    else:
        if problem.batch_grad is None or problem.n_samples is None:
            raise InvalidConfig(f"{problem.name} offers no mini-batch gradients")
        if cfg.batch_size > problem.n_samples:
            raise InvalidConfig(
                f"batch_size {cfg.batch_size} exceeds n_samples {problem.n_samples}"
            )
        order = np.random.default_rng([cfg.seed, epoch]).permutation(problem.n_samples)
        batches = [
            order[i : i + cfg.batch_size]
            for i in range(0, problem.n_samples, cfg.batch_size)
        ]
    for batch in batches:
        g = problem.grad(theta) if batch is None else problem.batch_grad(theta, batch)
        if not np.isfinite(g).all():
            raise NumericalFailure("gradient contains NaN or infinite entries")
        velocity = cfg.momentum * velocity + (g + cfg.weight_decay * theta)
        theta = theta - eta * velocity
        if np.linalg.norm(theta) > DIVERGENCE_NORM:
            raise NumericalFailure(
                f"parameters diverged at epoch {epoch} (norm > {DIVERGENCE_NORM:g})"
            )
    return theta, velocity


@dataclass(frozen=True)
class EpochRecord:
    """Per-epoch snapshot of the base optimizer."""

    epoch: int
    theta: np.ndarray = field(repr=False)
    objective: float
    grad_norm: float
    eta: float


@dataclass(frozen=True)
class AccelRecord:
    """Per-epoch extrapolation result running alongside the optimizer.

    ``lam_used`` is None when the entry is a plain copy of the iterate
    (window not yet filled, solve failed, or adaptive fallback).
    """

    epoch: int
    theta: np.ndarray = field(repr=False)
    objective: float
    grad_norm: float
    lam_used: float | None


def run_with_rna(
    problem: Problem,
    opt_cfg: OptimizerConfig,
    rna_cfg: RnaConfig | None,
    epochs: int,
    theta0=None,
    flush_on_drop: bool = False,
) -> tuple[list[EpochRecord], list[AccelRecord]]:
    """Train for ``epochs`` passes, extrapolating offline after each one.

    After every epoch the parameters are pushed into a sliding buffer of
    capacity ``rna_cfg.window + 1``; once two snapshots exist, the
    window is extrapolated (grid-adaptive when ``rna_cfg.lam_grid`` is
    set, scored by the objective) and the result recorded next to the
    vanilla trace. A degenerate solve falls back to the last iterate for
    that epoch instead of failing the run; a singular system, which
    signals a misconfigured ridge rather than unlucky data, still
    raises. Pass ``rna_cfg=None`` to disable acceleration; the vanilla
    trace is bit-identical either way.

    ``flush_on_drop`` empties the window at every schedule drop, since a
    drop changes the dynamics the window is extrapolating.

    Returns:
        (vanilla records, acceleration records); the latter is empty
        when acceleration is disabled.
    """
    if int(epochs) != epochs or epochs < 1:
        raise InvalidConfig(f"epochs must be a positive integer, got {epochs}")
    theta = (
        np.zeros(problem.dim)
        if theta0 is None
        else np.array(theta0, dtype=np.float64).ravel()
    )
    if theta.size != problem.dim:
        raise InvalidConfig(f"theta0 has size {theta.size}, problem.dim is {problem.dim}")
    velocity = np.zeros_like(theta)
    window = SlidingBuffer(rna_cfg.window + 1) if rna_cfg is not None else None
    drop_epochs = {e for e, _ in opt_cfg.schedule}
    vanilla: list[EpochRecord] = []
    accelerated: list[AccelRecord] = []
    for epoch in range(1, int(epochs) + 1):
        theta, velocity = sgd_momentum_epoch(theta, velocity, problem, opt_cfg, epoch)
        vanilla.append(
            EpochRecord(
                epoch=epoch,
                theta=theta.copy(),
                objective=float(problem.f(theta)),
                grad_norm=float(np.linalg.norm(problem.grad(theta))),
                eta=learning_rate(opt_cfg, epoch),
            )
        )
        if window is None:
            continue
        if flush_on_drop and epoch in drop_epochs:
            window.clear()
        window.push(epoch, theta)
        theta_hat, lam_used = theta, None
        if len(window) >= 2:
            try:
                if rna_cfg.lam_grid is not None:
                    theta_hat, lam_used, _ = adaptive_rna(
                        window.as_matrix(), rna_cfg, problem.f
                    )
                else:
                    theta_hat, coeffs = rna(window.as_matrix(), rna_cfg)
                    lam_used = coeffs.lam_used
            except DegenerateSum:
                theta_hat, lam_used = theta, None
        accelerated.append(
            AccelRecord(
                epoch=epoch,
                theta=np.array(theta_hat, dtype=np.float64),
                objective=float(problem.f(theta_hat)),
                grad_norm=float(np.linalg.norm(problem.grad(theta_hat))),
                lam_used=lam_used,
            )
        )
    return vanilla, accelerated
