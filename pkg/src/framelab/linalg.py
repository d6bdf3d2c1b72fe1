"""Dense linear-algebra kernel.

Everything downstream (frame construction, erasure simulation, robustness
certificates, sign-inequality estimates) funnels through the handful of
SVD-backed quantities defined here: singular values, operator and Schatten
norms, condition numbers, and frame/Gram operators.

A single matrix carrier covers both fields: real matrices are stored as
float64, complex ones as complex128, and the ``mode`` flag is derived from
the dtype.  All functions accept a :class:`DenseMatrix`, a plain ndarray,
or anything ``np.asarray`` understands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidExponent, NonFiniteEntry, RankDeficient, ShapeMismatch

REAL = "real"
COMPLEX = "complex"

# Scale-relative cutoff below which a matrix counts as numerically singular.
RANK_TOL = 1e-12


def _canonical_array(values) -> np.ndarray:
    a = np.asarray(values)
    if a.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeMismatch(f"matrix dimensions must be positive, got {a.shape}")
    dtype = np.complex128 if np.iscomplexobj(a) else np.float64
    return np.ascontiguousarray(a, dtype=dtype)


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Immutable dense matrix, float64 or complex128.

    ``mode`` is ``"real"`` exactly when the storage dtype is real, so the
    invariant "real mode implies zero imaginary parts" holds structurally.
    """

    data: np.ndarray

    def __post_init__(self):
        a = _canonical_array(self.data)
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "data", a)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def mode(self) -> str:
        return COMPLEX if np.iscomplexobj(self.data) else REAL

    def to_json_dict(self) -> dict:
        """Encode as {"rows", "cols", "mode", "entries": [[re, im], ...]} row-major."""
        flat = self.data.ravel()
        entries = [[float(v.real), float(v.imag)] for v in flat]
        return {
            "rows": self.rows,
            "cols": self.cols,
            "mode": self.mode,
            "entries": entries,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "DenseMatrix":
        required = {"rows", "cols", "mode", "entries"}
        if not isinstance(obj, dict) or set(obj) != required:
            extra = set(obj) - required if isinstance(obj, dict) else set()
            missing = required - set(obj) if isinstance(obj, dict) else required
            raise ValueError(
                f"matrix JSON must have keys {sorted(required)}; "
                f"missing={sorted(missing)} unknown={sorted(extra)}"
            )
        rows, cols, mode = obj["rows"], obj["cols"], obj["mode"]
        if not (isinstance(rows, int) and isinstance(cols, int) and rows >= 1 and cols >= 1):
            raise ValueError("rows and cols must be positive integers")
        if mode not in (REAL, COMPLEX):
            raise ValueError(f"mode must be 'real' or 'complex', got {mode!r}")
        entries = obj["entries"]
        if len(entries) != rows * cols:
            raise ValueError(f"entries length {len(entries)} != rows*cols = {rows * cols}")
        re = np.array([e[0] for e in entries], dtype=np.float64)
        im = np.array([e[1] for e in entries], dtype=np.float64)
        if mode == REAL:
            if np.any(im != 0.0):
                raise ValueError("real-mode matrix has nonzero imaginary entries")
            return cls(re.reshape(rows, cols))
        return cls((re + 1j * im).reshape(rows, cols))


def as_array(m) -> np.ndarray:
    """Coerce a DenseMatrix, Frame-like object, or array-like to a 2-D ndarray."""
    if isinstance(m, DenseMatrix):
        return m.data
    vectors = getattr(m, "vectors", None)
    if isinstance(vectors, DenseMatrix):
        return vectors.data
    return _canonical_array(m)


def _require_finite(a: np.ndarray):
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntry("matrix contains NaN or Inf entries")


def singular_values(m) -> np.ndarray:
    """All min(rows, cols) singular values, sorted nonincreasing."""
    a = as_array(m)
    _require_finite(a)
    return np.linalg.svd(a, compute_uv=False)


@dataclass(frozen=True, eq=False)
class SvdResult:
    """Nonincreasing singular-value sequence of a matrix."""

    singular_values: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.singular_values, dtype=np.float64)
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "singular_values", s)


def svd_values(m) -> SvdResult:
    """Singular values of ``m`` packaged as an :class:`SvdResult`."""
    return SvdResult(singular_values(m))


def operator_norm(m) -> float:
    """Largest singular value."""
    return float(singular_values(m)[0])


def schatten_norm(m, p: float) -> float:
    """Schatten p-norm (sum of p-th powers of singular values) ** (1/p).

    Evaluated relative to the largest singular value for stability at
    large p.
    """
    if p < 1:
        raise InvalidExponent(f"Schatten exponent must satisfy p >= 1, got {p}")
    s = singular_values(m)
    top = float(s[0])
    if top == 0.0:
        return 0.0
    return top * float(np.sum((s / top) ** p)) ** (1.0 / p)


def condition_number(m) -> float:
    """Ratio of largest to smallest singular value.

    Raises :class:`RankDeficient` when sigma_min <= RANK_TOL * sigma_max,
    so effectively singular inputs surface as errors rather than huge floats.
    """
    s = singular_values(m)
    smax, smin = float(s[0]), float(s[-1])
    if smin <= RANK_TOL * smax:
        raise RankDeficient(
            f"matrix is numerically rank deficient (sigma_min={smin:.3e}, sigma_max={smax:.3e})"
        )
    return smax / smin


def frame_operator(m) -> np.ndarray:
    """Sum of outer products sum_j z_j z_j* of the columns of ``m``.

    Accepts a Frame, a DenseMatrix, or an n x M ndarray whose columns are
    the frame vectors; returns the n x n operator.
    """
    v = as_array(m)
    _require_finite(v)
    return v @ v.conj().T


def gram_matrix(m) -> np.ndarray:
    """Gram matrix of the columns of ``m``: G[k, l] = <z_k, z_l>."""
    v = as_array(m)
    _require_finite(v)
    return v.conj().T @ v
