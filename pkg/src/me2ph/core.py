"""Vector-matrix representations, norms, and density/moment evaluation.

A distribution is described by a row vector ``alpha`` and a square matrix
``A`` through the density ``f(x) = -alpha A exp(A x) 1``.  Entries may be
negative (and, for internal canonical forms, complex in conjugate pairs); the
Markovian subclass is handled by the ``validate`` module.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import InvalidRepresentationError, NumericError

__all__ = [
    "MERep",
    "ComplexSpectrum",
    "NormReport",
    "vec_norm1",
    "vec_norm_inf",
    "mat_norm_inf",
    "norms",
    "matrix_exp",
    "pdf_eval",
    "pdf_eval_many",
    "moments",
    "derivatives_at_zero",
    "apply_transformation",
]


def vec_norm1(v) -> float:
    """Sum of absolute entries."""
    return float(np.abs(np.asarray(v)).sum())


def vec_norm_inf(v) -> float:
    """Largest absolute entry."""
    return float(np.abs(np.asarray(v)).max())


def mat_norm_inf(m) -> float:
    """Largest absolute row sum."""
    return float(np.abs(np.asarray(m)).sum(axis=1).max())


@dataclass(frozen=True)
class NormReport:
    """Norms of a vector or matrix argument; unset fields are None."""

    vec1: float | None = None
    vec_inf: float | None = None
    mat_inf: float | None = None


def norms(v_or_m) -> NormReport:
    """Compute the 1-norm and infinity norm of a vector, or the infinity norm
    of a matrix."""
    arr = np.asarray(v_or_m)
    if not np.all(np.isfinite(arr)):
        raise InvalidRepresentationError("norms: input has non-finite entries")
    if arr.ndim == 1:
        return NormReport(vec1=vec_norm1(arr), vec_inf=vec_norm_inf(arr))
    if arr.ndim == 2:
        return NormReport(mat_inf=mat_norm_inf(arr))
    raise InvalidRepresentationError(f"norms: expected 1-D or 2-D input, got ndim={arr.ndim}")


def matrix_exp(H: np.ndarray) -> np.ndarray:
    """Matrix exponential of a square matrix with finite entries."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidRepresentationError("matrix_exp: input must be square")
    if not np.all(np.isfinite(H)):
        raise InvalidRepresentationError("matrix_exp: input has non-finite entries")
    E = expm(H)
    if not np.all(np.isfinite(E)):
        raise NumericError(
            "matrix_exp: result overflowed", detail={"norm_inf": mat_norm_inf(H)}
        )
    return E


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MERep:
    """A (row vector, matrix) pair defining a matrix-exponential distribution.

    Invariants checked at construction: matching shapes, finite entries, the
    vector sums to 1, and the matrix is nonsingular (smallest singular value
    bounded away from zero relative to the infinity norm).
    """

    alpha: np.ndarray
    A: np.ndarray
    tol: ToleranceConfig = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha))
        A = np.atleast_2d(np.asarray(self.A))
        if not (np.iscomplexobj(alpha) or np.iscomplexobj(A)):
            alpha = alpha.astype(float)
            A = A.astype(float)
        if alpha.ndim != 1 or A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InvalidRepresentationError("MERep: alpha must be 1-D and A square")
        if alpha.shape[0] != A.shape[0]:
            raise InvalidRepresentationError(
                f"MERep: alpha has length {alpha.shape[0]} but A is {A.shape[0]}x{A.shape[1]}"
            )
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(A))):
            raise InvalidRepresentationError("MERep: non-finite entries")
        total = complex(alpha.sum())
        if abs(total - 1.0) > self.tol.alpha_sum:
            raise InvalidRepresentationError(
                f"MERep: alpha must sum to 1, got {total}"
            )
        sv = np.linalg.svd(A, compute_uv=False)
        scale = max(mat_norm_inf(A), 1e-300)
        if sv[-1] <= self.tol.singular_rel * scale:
            raise InvalidRepresentationError(
                f"MERep: A is singular to working precision (smallest sv {sv[-1]:.3e})"
            )
        object.__setattr__(self, "alpha", _as_readonly(alpha))
        object.__setattr__(self, "A", _as_readonly(A))

    @property
    def order(self) -> int:
        return self.alpha.shape[0]

    def is_complex(self) -> bool:
        return np.iscomplexobj(self.alpha) or np.iscomplexobj(self.A)


@dataclass(frozen=True)
class ComplexSpectrum:
    """Eigenvalues with algebraic multiplicities, sorted by descending real
    part, members of a conjugate pair adjacent (positive imaginary part first).
    """

    pairs: tuple[tuple[complex, int], ...]

    def __post_init__(self):
        for ev, mult in self.pairs:
            if mult < 1:
                raise InvalidRepresentationError("ComplexSpectrum: multiplicity must be >= 1")
        # non-real eigenvalues must come in conjugate pairs of equal multiplicity
        tagged = {}
        for ev, mult in self.pairs:
            if ev.imag != 0:
                tagged.setdefault(ev.real, []).append((ev.imag, mult))
        for real, imags in tagged.items():
            ups = sorted((i, m) for i, m in imags if i > 0)
            downs = sorted((-i, m) for i, m in imags if i < 0)
            if ups != downs:
                raise InvalidRepresentationError(
                    f"ComplexSpectrum: unpaired complex eigenvalues at real part {real}"
                )

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.pairs)


def pdf_eval(rep: MERep, x: float) -> float:
    """Density value ``-alpha A exp(A x) 1`` at a single point ``x >= 0``."""
    if x < 0:
        raise InvalidRepresentationError(f"pdf_eval: x must be >= 0, got {x}")
    E = matrix_exp(rep.A * x)
    val = -(rep.alpha @ rep.A @ E).sum()
    return float(np.real(val))


def pdf_eval_many(rep: MERep, xs: Sequence[float]) -> np.ndarray:
    """Density on an array of points, one matrix exponential per point.

    Per-point evaluation keeps full relative accuracy even where the density
    has decayed by hundreds of orders of magnitude, which the sign checks
    depend on.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return np.zeros(0)
    if xs.min() < 0:
        raise InvalidRepresentationError("pdf_eval_many: grid points must be >= 0")
    lead = -(rep.alpha @ rep.A)
    out = np.empty(xs.shape)
    for i, x in enumerate(xs.flat):
        out.flat[i] = float(np.real((lead @ expm(rep.A * x)).sum()))
    return out


def derivatives_at_zero(rep: MERep, count: int) -> np.ndarray:
    """First ``count`` derivatives of the density at 0: ``f^(k)(0) = -alpha A^(k+1) 1``."""
    ones = np.ones(rep.order, dtype=rep.A.dtype)
    v = rep.A @ ones
    out = np.empty(count)
    for k in range(count):
        out[k] = float(np.real(-(rep.alpha @ v)))
        v = rep.A @ v
    return out


def moments(rep: MERep, k_max: int) -> list[float]:
    """Raw moments ``E[X^k] = k! alpha (-A)^(-k) 1`` for k = 1..k_max."""
    if k_max < 1:
        raise InvalidRepresentationError("moments: k_max must be >= 1")
    negA = -rep.A
    y = np.ones(rep.order, dtype=negA.dtype)
    out = []
    fact = 1.0
    for k in range(1, k_max + 1):
        try:
            y = np.linalg.solve(negA, y)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"moments: singular matrix ({exc})") from exc
        fact *= k
        out.append(float(np.real(rep.alpha @ y)) * fact)
    return out


def apply_transformation(rep: MERep, W: np.ndarray, G: np.ndarray,
                         tol: ToleranceConfig | None = None) -> MERep:
    """Map ``(alpha, A)`` to ``(alpha W, G)``.

    The caller supplies the transformation matrix ``W`` (rows summing to 1)
    and the target matrix ``G`` with ``A W = W G``; under those conditions the
    density is unchanged.  Only the row-sum condition is enforced here.
    """
    tol = tol or rep.tol
    W = np.asarray(W)
    G = np.asarray(G)
    if W.shape != (rep.order, G.shape[0]) or G.shape[0] != G.shape[1]:
        raise InvalidRepresentationError(
            f"apply_transformation: W must be {rep.order}x{G.shape[0]} with G square"
        )
    rs = W @ np.ones(W.shape[1])
    worst = float(np.abs(rs - 1.0).max())
    if worst > tol.row_sum:
        raise InvalidRepresentationError(
            f"apply_transformation: W rows must sum to 1 (worst deviation {worst:.3e})"
        )
    return MERep(rep.alpha @ W, G, tol=tol)
