"""Markovian block bidiagonal generators built from feedback-Erlang blocks.

A feedback-Erlang block is a chain of ``b`` exponential states of rate
``sigma`` whose last state feeds back to the first with probability ``z``.
Its eigenvalues are ``-sigma (1 - z^(1/b) w)`` over the b-th roots of unity
``w``, equally spaced on a circle around ``-sigma``, so a block can embed any
complex conjugate pair whose real part decays strictly faster than the
dominant rate.  Chaining one block per eigenvalue instance yields a Markovian
matrix whose spectrum contains the source spectrum.
"""

from dataclasses import dataclass, replace
from functools import cached_property
from math import atan, ceil, cos, pi, sin, tan

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .core import MERep, mat_norm_inf
from .errors import DecViolationError, InvalidRepresentationError, NumericError
from .spectral import SpectralData, check_dec

__all__ = [
    "FEBlock",
    "MonocyclicRep",
    "fe_block_for",
    "build_generator",
    "solve_transformation_matrix",
    "solve_gamma",
]


@dataclass(frozen=True)
class FEBlock:
    """Feedback-Erlang block parameters (chain length, rate, feedback probability)."""

    b: int
    sigma: float
    z: float

    def __post_init__(self):
        if self.b < 1 or int(self.b) != self.b:
            raise InvalidRepresentationError(f"FEBlock: b must be a positive integer, got {self.b}")
        if not self.sigma > 0:
            raise InvalidRepresentationError(f"FEBlock: sigma must be > 0, got {self.sigma}")
        if not (0 <= self.z < 1):
            raise InvalidRepresentationError(f"FEBlock: z must lie in [0, 1), got {self.z}")

    @property
    def degenerate(self) -> bool:
        return self.b == 1 and self.z == 0.0

    @property
    def r(self) -> float:
        """Dominant (largest real part) eigenvalue, always real."""
        return -self.sigma * (1.0 - self.z ** (1.0 / self.b))

    @property
    def exit_rate(self) -> float:
        return self.sigma * (1.0 - self.z)

    def matrix(self) -> np.ndarray:
        m = np.diag(np.full(self.b, -self.sigma)) + np.diag(np.full(self.b - 1, self.sigma), 1)
        if self.z > 0:
            m[self.b - 1, 0] += self.z * self.sigma
        return m

    def eigenvalues(self) -> np.ndarray:
        k = np.arange(self.b)
        roots = self.z ** (1.0 / self.b) * np.exp(2j * pi * k / self.b)
        return -self.sigma * (1.0 - roots)


def fe_block_for(eigenvalue: complex, lambda1: float,
                 tol: ToleranceConfig = DEFAULT_TOL) -> FEBlock:
    """Block embedding one eigenvalue (or conjugate pair) of the source matrix.

    Real eigenvalues map to a single-state block.  A pair ``-a +/- ic`` needs
    its real part strictly below ``-lambda1``; the chain length is the
    smallest one keeping the block's own dominant eigenvalue below
    ``-lambda1``, and the rate and feedback follow from placing the pair on
    the block's eigenvalue circle.  The constructed block is verified
    spectrally before being returned.
    """
    eigenvalue = complex(eigenvalue)
    a, c = -eigenvalue.real, abs(eigenvalue.imag)
    if c == 0.0:
        if a <= 0:
            raise InvalidRepresentationError(
                f"fe_block_for: real eigenvalue must be negative, got {eigenvalue}"
            )
        return FEBlock(1, a, 0.0)

    gap = a - lambda1
    if gap <= tol.eig_cluster_rel * max(abs(eigenvalue), lambda1, 1.0):
        raise DecViolationError(
            f"complex pair {-a}+/-{c}j has real part at the dominant eigenvalue "
            f"-{lambda1}; no finite chain can embed it"
        )

    b = ceil(2 * pi / (pi - 2 * atan(c / gap)))
    for _ in range(64):
        if b < 3:
            b = 3
        theta = 2 * pi / b
        sigma = a + c * cos(theta) / sin(theta)
        rho = c / (sigma * sin(theta)) if sigma > 0 else 2.0
        # the block's dominant eigenvalue -sigma(1 - rho) must stay strictly
        # below -lambda1, and the feedback probability must be admissible
        if sigma > 0 and 0 <= rho < 1 and sigma * (1 - rho) > lambda1 * (1 + 1e-12):
            break
        b += 1
    else:
        raise NumericError(
            f"fe_block_for: no admissible chain length found for {eigenvalue}"
        )

    block = FEBlock(b, sigma, rho ** b)
    evs = block.eigenvalues()
    target = complex(-a, c)
    err = np.abs(evs - target).min()
    if err > tol.fe_eig_check * max(1.0, abs(target)):
        raise NumericError(
            f"fe_block_for: constructed block misses {target} by {err:.3e}"
        )
    r_num = float(np.max(np.real(np.linalg.eigvals(block.matrix()))))
    if abs(r_num - block.r) > tol.fe_r_check * max(1.0, abs(block.r)):
        raise NumericError(
            f"fe_block_for: closed-form dominant eigenvalue {block.r} disagrees "
            f"with the solver value {r_num}"
        )
    return block


@dataclass(frozen=True, eq=False)
class MonocyclicRep:
    """Chained feedback-Erlang blocks plus an initial vector over their states.

    The first ``n1`` blocks are the single-state blocks of the dominant rate.
    The assembled matrix is Markovian with exactly one exit transition, from
    the last state of the last block.
    """

    blocks: tuple[FEBlock, ...]
    n1: int
    lambda1: float
    gamma: np.ndarray | None = None

    def __post_init__(self):
        if not self.blocks:
            raise InvalidRepresentationError("MonocyclicRep: needs at least one block")
        if not (1 <= self.n1 <= len(self.blocks)):
            raise InvalidRepresentationError("MonocyclicRep: n1 out of range")
        for blk in self.blocks[: self.n1]:
            if not blk.degenerate or abs(blk.sigma - self.lambda1) > 1e-12 * self.lambda1:
                raise InvalidRepresentationError(
                    "MonocyclicRep: leading blocks must be single-state blocks "
                    "of the dominant rate"
                )
        if self.gamma is not None:
            g = np.asarray(self.gamma, dtype=float)
            if g.shape != (self.order,):
                raise InvalidRepresentationError(
                    f"MonocyclicRep: gamma length {g.shape} does not match order {self.order}"
                )
            g = np.array(g)
            g.setflags(write=False)
            object.__setattr__(self, "gamma", g)

    @property
    def order(self) -> int:
        return sum(blk.b for blk in self.blocks)

    @cached_property
    def matrix(self) -> np.ndarray:
        u = self.order
        G = np.zeros((u, u))
        at = 0
        for i, blk in enumerate(self.blocks):
            G[at : at + blk.b, at : at + blk.b] = blk.matrix()
            at += blk.b
            if at < u:
                G[at - 1, at] = blk.exit_rate
        return G

    @property
    def exit_vector(self) -> np.ndarray:
        """Column of absorption rates, nonzero only in the last coordinate."""
        return -(self.matrix @ np.ones(self.order))

    def with_gamma(self, gamma: np.ndarray) -> "MonocyclicRep":
        return replace(self, gamma=np.asarray(gamma, dtype=float))

    def to_me_rep(self, tol: ToleranceConfig = DEFAULT_TOL) -> MERep:
        if self.gamma is None:
            raise InvalidRepresentationError("MonocyclicRep: gamma not set")
        return MERep(self.gamma, self.matrix, tol=tol)


def build_generator(spec: SpectralData, tol: ToleranceConfig = DEFAULT_TOL) -> MonocyclicRep:
    """Assemble the block list for a spectrum satisfying the dominance condition.

    Each eigenvalue instance gets one block (a conjugate pair shares one);
    the dominant eigenvalue's single-state blocks come first, the rest follow
    in descending real part.
    """
    dec = check_dec(spec, tol)
    if not dec.ok:
        raise DecViolationError(dec.diagnostic)
    lambda1 = spec.lambda1
    if lambda1 <= 0:
        raise InvalidRepresentationError(
            f"build_generator: dominant eigenvalue must be negative, got {-lambda1}"
        )

    blocks: list[FEBlock] = [FEBlock(1, lambda1, 0.0) for _ in range(spec.n1)]
    rest = [t for i, t in enumerate(spec.terms) if i != spec.dominant and t.eigenvalue.imag >= 0]
    rest.sort(key=lambda t: (-t.eigenvalue.real, abs(t.eigenvalue.imag)))
    for term in rest:
        blk = fe_block_for(term.eigenvalue, lambda1, tol)
        blocks.extend([blk] * term.multiplicity)
    return MonocyclicRep(tuple(blocks), n1=spec.n1, lambda1=lambda1)


def solve_transformation_matrix(rep: MERep, mono: MonocyclicRep) -> np.ndarray:
    """Solve ``A W = W G`` with ``W 1 = 1`` for the rectangular ``W``.

    Set up as one stacked linear system in the entries of ``W`` and solved by
    least squares; a significant residual means the spectra of the two
    matrices do not nest, and is reported with a conditioning estimate.
    """
    n, u = rep.order, mono.order
    G = mono.matrix
    A = rep.A
    dtype = complex if rep.is_complex() else float
    eqs = np.kron(np.eye(u), A) - np.kron(G.T, np.eye(n))
    rowsum = np.kron(np.ones((1, u)), np.eye(n))
    stacked = np.vstack([eqs, rowsum]).astype(dtype)
    rhs = np.concatenate([np.zeros(n * u), np.ones(n)]).astype(dtype)
    sol, _, _, sv = np.linalg.lstsq(stacked, rhs, rcond=None)
    W = sol.reshape((u, n)).T  # column-major unstacking

    scale = max(mat_norm_inf(A), mat_norm_inf(G), 1.0)
    res = max(
        float(np.abs(A @ W - W @ G).max()) / scale,
        float(np.abs(W @ np.ones(u) - 1.0).max()),
    )
    if res > 1e-8:
        cond = float(sv[0] / sv[-1]) if sv.size and sv[-1] > 0 else np.inf
        raise NumericError(
            "solve_transformation_matrix: no consistent solution; the generator "
            "spectrum does not contain the source spectrum",
            detail={"residual": res, "cond": cond},
        )
    return W


def solve_gamma(rep: MERep, mono: MonocyclicRep,
                tol: ToleranceConfig = DEFAULT_TOL) -> MonocyclicRep:
    """Fill in the initial vector: ``gamma = alpha W`` for the solved ``W``."""
    W = solve_transformation_matrix(rep, mono)
    gamma_c = rep.alpha @ W
    imag = float(np.abs(np.imag(gamma_c)).max())
    if imag > 1e-8 * max(1.0, float(np.abs(gamma_c).max())):
        raise NumericError(f"solve_gamma: initial vector has imaginary residue {imag:.3e}")
    gamma = np.real(gamma_c)
    drift = abs(gamma.sum() - 1.0)
    if drift > 1e3 * tol.alpha_sum:
        raise NumericError(f"solve_gamma: initial vector sums to 1{drift:+.3e}")
    return mono.with_gamma(gamma)
