"""Construction and validation of finite tight frames.

Three families are built here:

* scaled orthonormal unions: copies of sqrt(n) * e_i, the simplest frame
  satisfying the reconstruction identity x = (1/M) sum <z_j, x> z_j;
* harmonic frames: columns of character tables, equal-norm and tight at
  any redundancy M >= n, with an optional real cosine/sine variant;
* equiangular tight frames obtained by indexing the rows of an N-point
  character table with a cyclic (N, M, 1)-difference set; their coherence
  meets the Welch bound sqrt((N-M)/(M(N-1))).

Difference sets are found by ordered backtracking rather than algebraic
construction; the search is exhaustive and deterministic at desk scale.

Two normalizations are carried explicitly. ``recon`` scales every vector
to squared norm n so that x = (1/M) sum <z_j, x> z_j; ``unit`` scales to
norm 1 so the frame operator is (M/n) I.  Conflating them corrupts both
the erasure experiments and the robustness certificates, hence the flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRowSet, NoSuchSet, OutOfRange, ShapeMismatch, BudgetExceeded
from .linalg import DenseMatrix, frame_operator, gram_matrix, operator_norm

RECON = "recon"
UNIT = "unit"

# Loose construction-time check on column norms; tightness itself is the
# business of check_tight.
_NORM_TOL = 1e-8

# Ordered backtracking above this modulus is out of desk-scale budget.
_SEARCH_LIMIT = 200


@dataclass(frozen=True, eq=False)
class Frame:
    """A collection of M frame vectors for an n-dimensional space.

    ``vectors`` is n x M with column j holding the j-th frame vector.
    """

    n: int
    M: int
    vectors: DenseMatrix
    normalization: str
    kind: str = "custom"

    def __post_init__(self):
        if self.normalization not in (RECON, UNIT):
            raise OutOfRange(f"unknown normalization {self.normalization!r}")
        if self.vectors.rows != self.n or self.vectors.cols != self.M:
            raise ShapeMismatch(
                f"vectors shape {(self.vectors.rows, self.vectors.cols)} "
                f"does not match (n, M) = {(self.n, self.M)}"
            )
        norms_sq = np.sum(np.abs(self.vectors.data) ** 2, axis=0)
        target = float(self.n) if self.normalization == RECON else 1.0
        if np.max(np.abs(norms_sq - target)) > _NORM_TOL * max(target, 1.0):
            raise OutOfRange(
                f"column norms violate {self.normalization!r} normalization"
            )

    @property
    def array(self) -> np.ndarray:
        return self.vectors.data

    @property
    def alpha(self) -> float:
        """Tightness constant: x = alpha * sum <z_j, x> z_j for tight frames."""
        return 1.0 / self.M if self.normalization == RECON else self.n / self.M

    def operator(self) -> np.ndarray:
        return frame_operator(self.vectors)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "M": self.M,
            "normalization": self.normalization,
            "kind": self.kind,
            "matrix": self.vectors.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Frame":
        required = {"n", "M", "normalization", "kind", "matrix"}
        if not isinstance(obj, dict) or set(obj) != required:
            raise ValueError(f"frame JSON must have keys {sorted(required)}")
        return cls(
            n=obj["n"],
            M=obj["M"],
            vectors=DenseMatrix.from_json_dict(obj["matrix"]),
            normalization=obj["normalization"],
            kind=obj["kind"],
        )


@dataclass(frozen=True)
class DifferenceSet:
    """A cyclic (N, M, lambda) difference set.

    Every nonzero residue mod N occurs exactly ``lam`` times among the
    pairwise differences d_i - d_j (i != j).  Validated on construction.
    """

    N: int
    elements: tuple[int, ...]
    lam: int = 1

    def __post_init__(self):
        elems = tuple(sorted(int(d) for d in self.elements))
        object.__setattr__(self, "elements", elems)
        if len(set(elems)) != len(elems):
            raise OutOfRange("difference set elements must be distinct")
        if any(not 0 <= d < self.N for d in elems):
            raise OutOfRange("difference set elements must lie in [0, N)")
        counts = [0] * self.N
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                if i != j:
                    counts[(a - b) % self.N] += 1
        if any(c != self.lam for c in counts[1:]):
            raise OutOfRange(
                f"not a (N={self.N}, M={len(elems)}, lambda={self.lam}) difference set"
            )

    @property
    def M(self) -> int:
        return len(self.elements)


def scaled_onb_frame(n: int, copies: int) -> Frame:
    """Union of ``copies`` scaled orthonormal bases: columns sqrt(n) * e_i.

    Direction-major order: the first ``copies`` columns repeat e_1, and so on.
    """
    if n < 1 or copies < 1:
        raise OutOfRange("n and copies must be >= 1")
    cols = np.repeat(np.eye(n), copies, axis=1) * math.sqrt(n)
    return Frame(n=n, M=n * copies, vectors=DenseMatrix(cols),
                 normalization=RECON, kind="scaled-onb")


def harmonic_frame(n: int, M: int, row_set=None, real: bool = False) -> Frame:
    """Equal-norm tight frame from n rows of the M-point character table.

    Column k is z_k with z_k[i] = omega**(k * s_i), omega = exp(2*pi*i/M),
    where s_i ranges over ``row_set`` (defaults to 0..n-1).  Each column has
    squared norm n and the frame operator is M * I by character orthogonality.

    With ``real=True`` conjugate character pairs are replaced by
    sqrt(2)*cos / sqrt(2)*sin rows (plus the constant row when n is odd),
    which requires M > n for even n.
    """
    if n < 1:
        raise OutOfRange("n must be >= 1")
    if M < n:
        raise OutOfRange(f"harmonic frame needs M >= n, got M={M} < n={n}")
    k = np.arange(M)
    if real:
        if row_set is not None:
            raise InvalidRowSet("row_set is not supported in real mode")
        pairs = n // 2
        # every pair frequency s = 1..pairs needs 0 < 2s < M
        if 2 * pairs >= M:
            raise InvalidRowSet(
                f"real harmonic frame needs M > {2 * pairs} for n = {n}"
            )
        rows = []
        if n % 2 == 1:
            rows.append(np.ones(M))
        for s in range(1, pairs + 1):
            theta = 2.0 * np.pi * s * k / M
            rows.append(math.sqrt(2.0) * np.cos(theta))
            rows.append(math.sqrt(2.0) * np.sin(theta))
        cols = np.vstack(rows)
        return Frame(n=n, M=M, vectors=DenseMatrix(cols),
                     normalization=RECON, kind="harmonic-real")
    if row_set is None:
        row_set = tuple(range(n))
    rows = tuple(int(s) for s in row_set)
    if len(rows) != n or len(set(rows)) != n or any(not 0 <= s < M for s in rows):
        raise InvalidRowSet(
            f"row_set must be {n} distinct integers in [0, {M}), got {rows}"
        )
    s = np.asarray(rows)[:, None]
    cols = np.exp(2j * np.pi * (s * k[None, :]) / M)
    return Frame(n=n, M=M, vectors=DenseMatrix(cols),
                 normalization=RECON, kind="harmonic")


def find_difference_set(N: int, M: int) -> DifferenceSet:
    """Lexicographically smallest (N, M, 1) difference set containing 0.

    Ordered backtracking: elements are chosen in increasing order and a
    candidate is accepted only if all the new pairwise differences it
    creates are still unused.  The first complete solution found is the
    lexicographically smallest one.
    """
    if M * (M - 1) != N - 1:
        raise NoSuchSet(
            f"lambda=1 requires M(M-1) = N-1; got {M}*{M - 1} = {M * (M - 1)} != {N - 1}"
        )
    if N > _SEARCH_LIMIT:
        raise BudgetExceeded(f"difference-set search limited to N <= {_SEARCH_LIMIT}")
    used = bytearray(N)  # used[d] = 1 when residue d already appears as a difference
    chosen = [0]

    def extend(start: int) -> bool:
        if len(chosen) == M:
            return True
        # not enough residues left to fill the remaining slots
        for cand in range(start, N - (M - len(chosen)) + 1):
            new = []
            ok = True
            for d in chosen:
                fwd = (cand - d) % N
                bwd = (d - cand) % N
                if used[fwd] or used[bwd] or fwd == bwd:
                    ok = False
                    break
                new.append(fwd)
                new.append(bwd)
            if ok and len(set(new)) != len(new):
                ok = False
            if not ok:
                continue
            for d in new:
                used[d] = 1
            chosen.append(cand)
            if extend(cand + 1):
                return True
            chosen.pop()
            for d in new:
                used[d] = 0
        return False

    if extend(1):
        return DifferenceSet(N=N, elements=tuple(chosen), lam=1)
    raise NoSuchSet(f"no (N={N}, M={M}, 1) difference set exists")


def difference_set_etf(ds: DifferenceSet, normalization: str = UNIT) -> Frame:
    """Equiangular tight frame from a cyclic (N, M, 1) difference set.

    The frame matrix is M x N with F[m, k] = omega**(d_m * k) / sqrt(M),
    omega = exp(2*pi*i/N): rows of the N-point character table indexed by
    the difference set, columns normalized.  The result is tight
    (F F* = (N/M) I) and equiangular with coherence sqrt(M-1)/M, which
    equals the Welch bound for N vectors in dimension M.
    """
    d = np.asarray(ds.elements)[:, None]
    k = np.arange(ds.N)[None, :]
    cols = np.exp(2j * np.pi * (d * k) / ds.N) / math.sqrt(ds.M)
    if normalization == RECON:
        cols = cols * math.sqrt(ds.M)
    elif normalization != UNIT:
        raise OutOfRange(f"unknown normalization {normalization!r}")
    return Frame(n=ds.M, M=ds.N, vectors=DenseMatrix(cols),
                 normalization=normalization, kind="etf")


def renormalize(f: Frame, normalization: str) -> Frame:
    """Rescale all frame vectors to the requested normalization."""
    if normalization == f.normalization:
        return f
    if normalization == RECON:
        scale = math.sqrt(f.n)
    elif normalization == UNIT:
        scale = 1.0 / math.sqrt(f.n)
    else:
        raise OutOfRange(f"unknown normalization {normalization!r}")
    return Frame(n=f.n, M=f.M, vectors=DenseMatrix(f.array * scale),
                 normalization=normalization, kind=f.kind)


@dataclass(frozen=True)
class TightnessReport:
    residual: float
    passed: bool


def check_tight(f: Frame, tol: float = 1e-10) -> TightnessReport:
    """Operator-norm residual of alpha * (frame operator) - I."""
    s = f.alpha * f.operator() - np.eye(f.n)
    residual = operator_norm(s)
    return TightnessReport(residual=residual, passed=bool(residual <= tol))


def coherence(f: Frame) -> float:
    """Largest normalized off-diagonal Gram magnitude max |<f_k, f_l>| / (|f_k||f_l|)."""
    if f.M < 2:
        raise OutOfRange("coherence needs at least two vectors")
    g = gram_matrix(f.vectors)
    norms = np.sqrt(np.real(np.diag(g)))
    scaled = np.abs(g) / np.outer(norms, norms)
    np.fill_diagonal(scaled, 0.0)
    return float(np.max(scaled))


def offdiagonal_gram_magnitudes(f: Frame) -> np.ndarray:
    """All |<f_k, f_l>|, k < l, normalized; equiangularity witness."""
    g = gram_matrix(f.vectors)
    norms = np.sqrt(np.real(np.diag(g)))
    scaled = np.abs(g) / np.outer(norms, norms)
    iu = np.triu_indices(f.M, k=1)
    return scaled[iu]


def welch_bound(n: int, M: int) -> float:
    """Minimum possible coherence of M unit vectors in dimension n."""
    if M <= n:
        return 0.0
    return math.sqrt((M - n) / (n * (M - 1)))
