"""Matrix probing: recover a structured matrix from one matrix-vector product.

A matrix A = sum_j lambda_j U_j in the span of n known n x n matrices is
determined by n numbers.  Applying both sides to a probe vector x gives
A x = D lambda with the dictionary D = [U_1 x | ... | U_n x], so lambda is
recovered by a single n x n solve whose stability is governed by cond(D).

Regrouping the same data by column index instead of matrix index yields
matrices T_k (column j of T_k is column k of U_j) with the identity
D = sum_k x_k T_k.  When every T_k satisfies T_k* T_k = (1/n) I (columns
orthogonal with norm 1/sqrt(n)), the deviation of a randomly probed
dictionary from its mean concentrates like sqrt(ln n), which
``concentration_estimate`` measures empirically.  The cyclic-shift family
U_j = P^j / sqrt(n) realizes the scaled-isometry hypothesis exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import (
    IllConditioned,
    InvalidDimension,
    OutOfRange,
    RankDeficient,
    ShapeMismatch,
    Singular,
    TooLarge,
    UnsupportedDistribution,
)
from .linalg import as_array, condition_number, operator_norm
from .inequalities import exact_sign_expectation

RADEMACHER = "rademacher"
UNIFORM = "uniform"

_CONTRACTION_LIMIT = 16

# means of the supported probe-coefficient distributions
_DIST_MEAN = {RADEMACHER: 0.0, UNIFORM: 0.0}


def _family_stack(U) -> np.ndarray:
    """Coerce a sequence of n matrices (each n x n) to an (n, n, n) stack."""
    if isinstance(U, np.ndarray) and U.ndim == 3:
        stack = U
    else:
        stack = np.stack([as_array(u) for u in U])
    count, r, c = stack.shape
    if not (count == r == c):
        raise ShapeMismatch(
            f"need n matrices of shape n x n, got {count} of shape {r} x {c}"
        )
    return stack


def regroup(U) -> np.ndarray:
    """Regroup by columns: T_k[:, j] = U_j[:, k].  An exact involution."""
    stack = _family_stack(U)
    return np.ascontiguousarray(np.transpose(stack, (2, 1, 0)))


@dataclass(frozen=True)
class IsometryReport:
    max_residual: float
    passed: bool
    # ||(sum T_k* T_k)^(1/2)||_{C_p}^p for p in (2, 4); equals n when passed
    schatten_identity: dict | None


def check_scaled_isometry(T, tol: float = 1e-10) -> IsometryReport:
    """Max over k of || T_k* T_k - (1/n) I ||, plus the Schatten identity check."""
    stack = _family_stack(T)
    n = stack.shape[0]
    eye = np.eye(n) / n
    residual = max(
        operator_norm(t.conj().T @ t - eye) for t in stack
    )
    passed = bool(residual <= tol)
    identity = None
    if passed:
        total = np.einsum("kij,kil->jl", stack.conj(), stack)  # sum T_k* T_k
        lam = np.clip(np.linalg.eigvalsh(total), 0.0, None)
        identity = {p: float(np.sum(lam ** (p / 2))) for p in (2, 4)}
    return IsometryReport(max_residual=float(residual), passed=passed,
                          schatten_identity=identity)


def build_dictionary(U, x) -> np.ndarray:
    """Dictionary D with column j = U_j x."""
    stack = _family_stack(U)
    x = np.asarray(x)
    if x.shape != (stack.shape[0],):
        raise ShapeMismatch(f"probe vector has shape {x.shape}, expected ({stack.shape[0]},)")
    return np.einsum("jik,k->ij", stack, x)


def recover_coefficients(D, y, cond_limit: float = 1e8):
    """Solve D lambda = y by dense LU; returns (lambda, cond(D)).

    Refuses outright when D is numerically singular, and flags probes whose
    dictionary conditioning would destroy the solution's accuracy.
    """
    d = as_array(D)
    if d.shape[0] != d.shape[1]:
        raise ShapeMismatch(f"dictionary must be square, got {d.shape}")
    try:
        cond = condition_number(d)
    except RankDeficient as exc:
        raise Singular(f"dictionary is singular: {exc}") from exc
    if cond > cond_limit:
        raise IllConditioned(
            f"cond(D) = {cond:.3e} exceeds limit {cond_limit:.1e}", cond=cond
        )
    return np.linalg.solve(d, np.asarray(y)), cond


@dataclass(frozen=True)
class RoundtripResult:
    lambda_hat: np.ndarray
    rel_error: float
    cond: float


def probe_roundtrip(U, lam, x, cond_limit: float = 1e8) -> RoundtripResult:
    """Form A = sum lambda_j U_j, observe y = A x, and recover the coefficients."""
    stack = _family_stack(U)
    lam = np.asarray(lam)
    if lam.shape != (stack.shape[0],):
        raise ShapeMismatch(f"lambda has shape {lam.shape}, expected ({stack.shape[0]},)")
    a = np.tensordot(lam, stack, axes=(0, 0))
    y = a @ np.asarray(x)
    lam_hat, cond = recover_coefficients(build_dictionary(stack, x), y, cond_limit)
    denom = np.linalg.norm(lam)
    rel = float(np.linalg.norm(lam_hat - lam) / denom) if denom > 0 else 0.0
    return RoundtripResult(lambda_hat=lam_hat, rel_error=rel, cond=cond)


@dataclass(frozen=True)
class ConcentrationEstimate:
    n: int
    trials: int
    mean_dev: float
    scale: float
    ratio: float
    distribution: str
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "mean_dev": self.mean_dev,
            "scale": self.scale,
            "ratio": self.ratio,
            "distribution": self.distribution,
            "seed": self.seed,
        }


def _draw_coefficients(distribution: str, n: int, stream: np.random.Generator) -> np.ndarray:
    if distribution == RADEMACHER:
        return stream.integers(0, 2, size=n) * 2.0 - 1.0
    if distribution == UNIFORM:
        return stream.uniform(-1.0, 1.0, size=n)
    raise UnsupportedDistribution(
        f"distribution must be one of {sorted(_DIST_MEAN)}, got {distribution!r}"
    )


def concentration_estimate(T, distribution: str, trials: int,
                           seed: int) -> ConcentrationEstimate:
    """Mean operator-norm deviation of D = sum x_k T_k from its expectation.

    Coefficients are i.i.d. from a bounded zero-mean distribution
    (|x_k| <= 1), so E(D) is the analytic mean * sum T_k rather than an
    estimate.  The ratio divides by sqrt(ln n).
    """
    if distribution not in _DIST_MEAN:
        raise UnsupportedDistribution(
            f"distribution must be one of {sorted(_DIST_MEAN)}, got {distribution!r}"
        )
    if trials < 1:
        raise OutOfRange("trials must be >= 1")
    stack = _family_stack(T)
    n = stack.shape[0]
    if n < 2:
        raise InvalidDimension(f"need n >= 2 so that ln(n) > 0, got n = {n}")
    mean_d = _DIST_MEAN[distribution] * stack.sum(axis=0)
    flat = stack.reshape(n, -1)
    coeffs = np.stack([
        _draw_coefficients(distribution, n, rng.substream(seed, rng.DISTR, t))
        for t in range(trials)
    ])
    devs = np.empty(trials)
    chunk = max(1, (1 << 24) // flat.shape[1])  # cap scratch at ~128 MB
    for start in range(0, trials, chunk):
        block = coeffs[start:start + chunk]
        d = (block @ flat).reshape(block.shape[0], n, n) - mean_d[None, :, :]
        s = np.linalg.svd(d, compute_uv=False)
        devs[start:start + chunk] = s[:, 0]
    mean_dev = float(np.mean(devs))
    scale = math.sqrt(math.log(n))
    return ConcentrationEstimate(n=n, trials=trials, mean_dev=mean_dev,
                                 scale=scale, ratio=mean_dev / scale,
                                 distribution=distribution, seed=int(seed))


@dataclass(frozen=True)
class ContractionReport:
    lhs: float
    rhs: float
    holds: bool


def contraction_check(summands, x, b: float) -> ContractionReport:
    """Verify E||sum eps_k x_k f_k|| <= b E||sum eps_k f_k|| by full enumeration.

    ``summands`` may be vectors (Euclidean norm) or matrices (operator
    norm); all coefficients must satisfy |x_k| <= b.
    """
    arrays = [np.asarray(f) for f in summands]
    count = len(arrays)
    if count > _CONTRACTION_LIMIT:
        raise TooLarge(f"contraction check limited to count <= {_CONTRACTION_LIMIT}")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (count,):
        raise ShapeMismatch(f"coefficients have shape {x.shape}, expected ({count},)")
    if b <= 0 or np.any(np.abs(x) > b * (1 + 1e-15)):
        raise OutOfRange("need |x_k| <= b with b > 0")
    norm = np.linalg.norm if arrays[0].ndim == 1 else operator_norm
    lhs = exact_sign_expectation([xk * f for xk, f in zip(x, arrays)], norm)
    rhs = b * exact_sign_expectation(arrays, norm)
    return ContractionReport(lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs * (1 + 1e-12)))


def circulant_dictionary(n: int) -> np.ndarray:
    """The family U_j = P^j / sqrt(n), j = 1..n, P the cyclic shift.

    The regrouped T_k have pairwise-disjoint unit-coordinate columns, so
    T_k* T_k = (1/n) I exactly, and the family is linearly independent
    (the shifts have disjoint supports), making the coefficients
    identifiable.
    """
    if n < 2:
        raise InvalidDimension(f"need n >= 2, got {n}")
    eye = np.eye(n)
    return np.stack([np.roll(eye, j, axis=0) for j in range(1, n + 1)]) / math.sqrt(n)


def tuned_schatten_order(n: int) -> int:
    """m with 2m closest to ln n, rounded to an even 2m >= 2."""
    if n < 2:
        raise InvalidDimension(f"need n >= 2, got {n}")
    return max(1, round(math.log(n) / 2.0))


@dataclass(frozen=True, eq=False)
class ProbeDictionary:
    """A bound probing instance: the family, its regrouping, and one probe."""

    n: int
    U: np.ndarray
    T: np.ndarray
    lam: np.ndarray
    x: np.ndarray

    @classmethod
    def from_family(cls, U, lam, x) -> "ProbeDictionary":
        stack = _family_stack(U)
        n = stack.shape[0]
        lam = np.asarray(lam)
        x = np.asarray(x)
        if lam.shape != (n,) or x.shape != (n,):
            raise ShapeMismatch("lambda and x must both have length n")
        return cls(n=n, U=stack, T=regroup(stack), lam=lam, x=x)

    def dictionary(self) -> np.ndarray:
        return build_dictionary(self.U, self.x)
