"""Random-erasure transmission channel with unbiased reconstruction.

Protocol: the sender transmits the M inner products <z_j, x> of a
recon-normalized tight frame; each coefficient survives independently
with probability ``keep_prob``.  The receiver forms

    y = 1/(keep_prob * M) * sum over surviving j of <z_j, x> z_j,

which is unbiased (E y = x) for any keep probability and reduces to the
classical 2/M reconstruction at keep_prob = 1/2.  The mean error
E ||x - y|| is compared against the redundancy scale

    epsilon = sqrt(n * ln(n) / M),

reported as the dimensionless ratio mean_error / (epsilon * ||x||).

Two estimators are provided: exact enumeration of all 2^M equiprobable
masks (M <= 20), and seeded Monte Carlo whose per-trial masks are drawn
from independent (seed, trial) substreams so results do not depend on
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import (
    InvalidDimension,
    InvalidProbability,
    LengthMismatch,
    OutOfRange,
    TooLarge,
)
from .frames import RECON, Frame, harmonic_frame

_ENUM_LIMIT = 20
_ENUM_CHUNK = 1 << 14


@dataclass(frozen=True, eq=False)
class ErasureMask:
    """Survival pattern of one transmission: kept[j] is True if coefficient j arrived."""

    kept: np.ndarray
    keep_prob: float

    def __post_init__(self):
        k = np.asarray(self.kept, dtype=bool).copy()
        k.flags.writeable = False
        object.__setattr__(self, "kept", k)
        if not 0.0 < self.keep_prob <= 1.0:
            raise InvalidProbability(f"keep_prob must be in (0, 1], got {self.keep_prob}")

    @property
    def M(self) -> int:
        return self.kept.shape[0]


@dataclass(frozen=True)
class ErasureTrialReport:
    """Aggregate reconstruction-error statistics of a Monte Carlo run."""

    n: int
    M: int
    keep_prob: float
    trials: int
    mean_error: float
    stderr: float
    epsilon: float
    input_norm: float
    ratio: float
    seed: int


def sample_mask(M: int, keep_prob: float, stream: np.random.Generator) -> ErasureMask:
    """Draw an independent Bernoulli(keep_prob) survival flag per coefficient."""
    if not 0.0 < keep_prob <= 1.0:
        raise InvalidProbability(f"keep_prob must be in (0, 1], got {keep_prob}")
    kept = stream.random(M) < keep_prob
    return ErasureMask(kept=kept, keep_prob=keep_prob)


def analysis_coefficients(f: Frame, x) -> np.ndarray:
    """Transmitted inner products <z_j, x>, conjugate-linear in the frame vector."""
    x = np.asarray(x)
    if x.shape != (f.n,):
        raise LengthMismatch(f"input has shape {x.shape}, expected ({f.n},)")
    return f.array.conj().T @ x


def reconstruct(f: Frame, coeffs, mask: ErasureMask) -> np.ndarray:
    """Unbiased estimate y = 1/(keep_prob * M) * sum_{kept j} coeffs[j] z_j."""
    if f.normalization != RECON:
        raise OutOfRange("reconstruction requires a recon-normalized frame")
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (f.M,):
        raise LengthMismatch(f"coeffs length {coeffs.shape} != M = {f.M}")
    if mask.M != f.M:
        raise LengthMismatch(f"mask length {mask.M} != M = {f.M}")
    weight = 1.0 / (mask.keep_prob * f.M)
    kept = mask.kept
    return weight * (f.array[:, kept] @ coeffs[kept])


def _contributions(f: Frame, x, keep_prob: float) -> np.ndarray:
    """Per-coefficient reconstruction contributions: column j is c_j z_j/(q M)."""
    if f.normalization != RECON:
        raise OutOfRange("erasure experiments require a recon-normalized frame")
    c = analysis_coefficients(f, x)
    return f.array * c[None, :] / (keep_prob * f.M)


def exact_error_expectation(f: Frame, x) -> float:
    """Exact E ||x - y|| at keep_prob 1/2 by enumerating all 2^M masks."""
    if f.M > _ENUM_LIMIT:
        raise TooLarge(f"exact enumeration limited to M <= {_ENUM_LIMIT}, got {f.M}")
    x = np.asarray(x)
    b = _contributions(f, x, keep_prob=0.5)  # (n, M)
    total = 1 << f.M
    acc = 0.0
    j = np.arange(f.M)
    for start in range(0, total, _ENUM_CHUNK):
        idx = np.arange(start, min(start + _ENUM_CHUNK, total))
        theta = ((idx[:, None] >> j[None, :]) & 1).astype(np.float64)
        y = theta @ b.T  # (chunk, n)
        acc += float(np.sum(np.linalg.norm(y - x[None, :], axis=1)))
    return acc / total


def per_trial_errors(f: Frame, x, trials: int, seed: int,
                     keep_prob: float = 0.5) -> np.ndarray:
    """Reconstruction error of each trial; trial t uses substream (seed, t)."""
    if f.n < 2:
        raise InvalidDimension(f"need n >= 2 so that ln(n) > 0, got n = {f.n}")
    if trials < 1:
        raise OutOfRange(f"trials must be >= 1, got {trials}")
    x = np.asarray(x)
    b = _contributions(f, x, keep_prob)
    errors = np.empty(trials)
    for t in range(trials):
        mask = sample_mask(f.M, keep_prob, rng.substream(seed, rng.MASK, t))
        y = b[:, mask.kept].sum(axis=1)
        errors[t] = np.linalg.norm(x - y)
    return errors


def mc_error_estimate(f: Frame, x, trials: int, seed: int,
                      keep_prob: float = 0.5) -> ErasureTrialReport:
    """Monte Carlo estimate of E ||x - y|| with the epsilon scale attached."""
    errors = per_trial_errors(f, x, trials, seed, keep_prob)
    mean = float(np.mean(errors))
    stderr = float(np.std(errors, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    epsilon = math.sqrt(f.n * math.log(f.n) / f.M)
    input_norm = float(np.linalg.norm(x))
    ratio = mean / (epsilon * input_norm) if input_norm > 0 else 0.0
    return ErasureTrialReport(
        n=f.n, M=f.M, keep_prob=keep_prob, trials=trials,
        mean_error=mean, stderr=stderr, epsilon=epsilon,
        input_norm=input_norm, ratio=ratio, seed=int(seed),
    )


def deterministic_unit_vector(n: int, seed: int) -> np.ndarray:
    """Fixed pseudo-random unit-norm test input, reproducible from the seed."""
    v = rng.substream(seed, rng.INPUT).standard_normal(n)
    return v / np.linalg.norm(v)


def redundancy_sweep(n: int, M_list, trials: int, seed: int,
                     keep_prob: float = 0.5) -> list[ErasureTrialReport]:
    """Run the channel on harmonic frames of growing redundancy, fixed input."""
    x = deterministic_unit_vector(n, seed)
    reports = []
    for M in M_list:
        f = harmonic_frame(n, M)
        reports.append(mc_error_estimate(f, x, trials, seed, keep_prob))
    return reports
