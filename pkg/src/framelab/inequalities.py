"""Empirical checks of Bernoulli sign inequalities for matrices.

Two classical bounds are estimated over random sign vectors
(epsilon_j = +-1 with probability 1/2 each):

* the rank-one concentration bound

      E || sum_i eps_i z_i (x) z_i ||
          <= C sqrt(ln n) max_i ||z_i|| ||sum_i z_i (x) z_i||**(1/2),

  reported with C fixed to 1 so the ratio estimates the absolute constant;

* the operator Khintchine inequality in Schatten 2m-norms,

      (E || sum_j eps_j A_j ||_{C_2m}^{2m})**(1/(2m))
          <= C_m max( ||(sum A_j* A_j)^(1/2)||_{C_2m},
                      ||(sum A_j A_j*)^(1/2)||_{C_2m} ),

  with C_m = 2 ((2m)! / (2^m m!))**(1/(2m)).

Small instances are enumerated exactly over all 2^count sign patterns;
larger ones are estimated by seeded Monte Carlo.  The related factorial
bound (2m)!/(2^m m!) <= sqrt(2) (2/e)^m m^m is checked in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import (
    InvalidDimension,
    OutOfRange,
    ShapeMismatch,
    TooLarge,
)
from .linalg import as_array, operator_norm, singular_values

_ENUM_LIMIT = 20
_ENUM_CHUNK = 1 << 11


@dataclass(frozen=True)
class SignEnsemble:
    """How to average over sign patterns: exact enumeration or seeded MC."""

    count: int
    exact: bool = False
    trials: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise OutOfRange("count must be >= 1")
        if self.exact:
            if self.count > _ENUM_LIMIT:
                raise TooLarge(
                    f"exact enumeration limited to count <= {_ENUM_LIMIT}, got {self.count}"
                )
        elif self.trials < 1:
            raise OutOfRange("Monte Carlo mode needs trials >= 1")

    def sign_vector(self, trial: int) -> np.ndarray:
        stream = rng.substream(self.seed, rng.SIGNS, trial)
        return stream.integers(0, 2, size=self.count) * 2.0 - 1.0


@dataclass(frozen=True)
class InequalityEstimate:
    lhs: float
    lhs_stderr: float
    rhs: float
    ratio: float
    trials: int
    exact: bool

    def to_json_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "lhs_stderr": self.lhs_stderr,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "trials": self.trials,
            "exact": self.exact,
        }


def khintchine_constant(m: int) -> float:
    """C_m = 2 ((2m)! / (2^m m!))**(1/(2m)), evaluated through log-gamma."""
    if not 1 <= m <= 30:
        raise OutOfRange(f"m must be in 1..30, got {m}")
    log_ratio = math.lgamma(2 * m + 1) - m * math.log(2.0) - math.lgamma(m + 1)
    return 2.0 * math.exp(log_ratio / (2 * m))


def _stack(summands) -> np.ndarray:
    arrays = [np.asarray(a) for a in summands]
    if not arrays:
        raise ShapeMismatch("need at least one summand")
    shape = arrays[0].shape
    if any(a.shape != shape for a in arrays):
        raise ShapeMismatch("all summands must share one shape")
    return np.stack(arrays)


def exact_sign_expectation(summands, functional) -> float:
    """Average functional(sum_j eps_j S_j) over all 2^count sign patterns.

    The functional must be even (f(-X) = f(X), true of every norm), which
    lets the enumeration fix the first sign and halve the work.
    """
    stack = _stack(summands)
    count = stack.shape[0]
    if count > _ENUM_LIMIT:
        raise TooLarge(f"exact enumeration limited to count <= {_ENUM_LIMIT}")
    flat = stack.reshape(count, -1)
    total = 1 << (count - 1)  # first sign fixed to +1
    bits = np.arange(count - 1)
    acc = 0.0
    for start in range(0, total, _ENUM_CHUNK):
        idx = np.arange(start, min(start + _ENUM_CHUNK, total))
        signs = np.ones((idx.size, count))
        if count > 1:
            signs[:, 1:] = ((idx[:, None] >> bits[None, :]) & 1) * 2.0 - 1.0
        sums = signs @ flat
        for row in sums:
            acc += functional(row.reshape(stack.shape[1:]))
    return acc / total


def sign_mc_expectation(summands, functional, trials: int, seed: int):
    """Monte Carlo mean and standard error of functional(sum_j eps_j S_j)."""
    stack = _stack(summands)
    count = stack.shape[0]
    flat = stack.reshape(count, -1)
    ens = SignEnsemble(count=count, exact=False, trials=trials, seed=seed)
    values = np.empty(trials)
    for t in range(trials):
        signs = ens.sign_vector(t)
        values[t] = functional((signs @ flat).reshape(stack.shape[1:]))
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


def _schatten_power(a: np.ndarray, m: int) -> float:
    """sum_j sigma_j(a)^(2m)."""
    s = singular_values(a)
    return float(np.sum(s ** (2 * m)))


def _psd_half_schatten(s: np.ndarray, m: int) -> float:
    """||S^(1/2)||_{C_2m} for PSD S, via eigenvalues: (sum lambda^m)**(1/(2m))."""
    lam = np.clip(np.linalg.eigvalsh(s), 0.0, None)
    return float(np.sum(lam**m)) ** (1.0 / (2 * m))


def khintchine_check(matrices, m: int, ensemble: SignEnsemble) -> InequalityEstimate:
    """Compare both sides of the operator Khintchine inequality.

    lhs is (E || sum eps_j A_j ||_{C_2m}^{2m})**(1/(2m)); rhs multiplies
    C_m by the larger of the two square-root Schatten terms, computed from
    eigenvalues of the PSD sums without forming matrix square roots.
    """
    if m < 1:
        raise OutOfRange(f"m must be >= 1, got {m}")
    stack = _stack(matrices)
    if stack.ndim != 3:
        raise ShapeMismatch("summands must be matrices")
    if ensemble.count != stack.shape[0]:
        raise ShapeMismatch(
            f"ensemble.count = {ensemble.count} != number of matrices {stack.shape[0]}"
        )
    power = lambda a: _schatten_power(a, m)
    if ensemble.exact:
        mean_pow = exact_sign_expectation(stack, power)
        lhs = mean_pow ** (1.0 / (2 * m))
        lhs_stderr, trials = 0.0, 1 << stack.shape[0]
    else:
        mean_pow, se_pow = sign_mc_expectation(stack, power, ensemble.trials, ensemble.seed)
        lhs = mean_pow ** (1.0 / (2 * m))
        lhs_stderr = se_pow * lhs / (2 * m * mean_pow) if mean_pow > 0 else 0.0
        trials = ensemble.trials
    left_sum = np.einsum("jki,jkl->il", stack.conj(), stack)   # sum A_j* A_j
    right_sum = np.einsum("jik,jlk->il", stack, stack.conj())  # sum A_j A_j*
    rhs = khintchine_constant(m) * max(
        _psd_half_schatten(left_sum, m), _psd_half_schatten(right_sum, m)
    )
    ratio = lhs / rhs if rhs > 0 else 0.0
    return InequalityEstimate(lhs=lhs, lhs_stderr=lhs_stderr, rhs=rhs,
                              ratio=ratio, trials=trials, exact=ensemble.exact)


def rudelson_check(vectors, ensemble: SignEnsemble) -> InequalityEstimate:
    """Compare E || sum eps_i z_i (x) z_i || with sqrt(ln n) max||z|| ||sum z (x) z||^(1/2).

    ``vectors`` is anything with n x M columns (Frame, DenseMatrix, ndarray).
    The rhs takes the absolute constant to be 1, so the ratio is a direct
    estimate of that constant.
    """
    v = as_array(vectors)
    n, M = v.shape
    if n < 2:
        raise InvalidDimension(f"need n >= 2 so that ln(n) > 0, got n = {n}")
    if ensemble.count != M:
        raise ShapeMismatch(f"ensemble.count = {ensemble.count} != M = {M}")
    if ensemble.exact:
        summands = np.einsum("im,jm->mij", v, v.conj())
        lhs = exact_sign_expectation(summands, operator_norm)
        lhs_stderr, trials = 0.0, 1 << M
    else:
        values = np.empty(ensemble.trials)
        for t in range(ensemble.trials):
            signs = ensemble.sign_vector(t)
            values[t] = operator_norm((v * signs[None, :]) @ v.conj().T)
        lhs = float(np.mean(values))
        lhs_stderr = (
            float(np.std(values, ddof=1) / math.sqrt(ensemble.trials))
            if ensemble.trials > 1 else 0.0
        )
        trials = ensemble.trials
    max_norm = float(np.max(np.linalg.norm(v, axis=0)))
    rhs = math.sqrt(math.log(n)) * max_norm * math.sqrt(operator_norm(v @ v.conj().T))
    ratio = lhs / rhs if rhs > 0 else 0.0
    return InequalityEstimate(lhs=lhs, lhs_stderr=lhs_stderr, rhs=rhs,
                              ratio=ratio, trials=trials, exact=ensemble.exact)


@dataclass(frozen=True)
class StirlingBound:
    m: int
    lhs: float
    rhs: float
    holds: bool

    def to_json_dict(self) -> dict:
        return {"m": self.m, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def stirling_bound_check(m: int) -> StirlingBound:
    """Check (2m)!/(2^m m!) <= sqrt(2) (2/e)^m m^m, evaluated in the log domain."""
    if not 1 <= m <= 150:
        raise OutOfRange(f"m must be in 1..150, got {m}")
    log_lhs = math.lgamma(2 * m + 1) - m * math.log(2.0) - math.lgamma(m + 1)
    log_rhs = 0.5 * math.log(2.0) + m * (math.log(2.0) - 1.0) + m * math.log(m)
    holds = log_lhs <= log_rhs + 1e-12
    return StirlingBound(m=m, lhs=math.exp(log_lhs), rhs=math.exp(log_rhs), holds=holds)
