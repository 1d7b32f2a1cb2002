"""Numeric tolerances threaded through the pipeline.

All decision points that are exact in real arithmetic (normalization, zero
derivatives, sign checks, eigenvalue coincidences) need explicit slack in
floating point.  Every module takes a ``ToleranceConfig`` and defaults to
``DEFAULT_TOL``; nothing reads global state.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ToleranceConfig:
    # vector sums and row sums that must equal 1
    alpha_sum: float = 1e-9
    row_sum: float = 1e-9
    # eigenvalue clustering, relative to the matrix infinity norm
    eig_cluster_rel: float = 1e-6
    # spectral terms whose coefficients all fall below this times the largest
    # coefficient are treated as absent from the density
    coeff_zero_rel: float = 1e-9
    # zero-derivative threshold at x = 0, relative to ||A||_inf^(k+1)
    deriv_zero_rel: float = 1e-9
    # clamp window for tail-extension vector entries, relative to ||gamma||_1
    markov_slack_rel: float = 1e-12
    # default relative tolerance for density/moment equivalence verdicts
    equivalence_rel: float = 1e-7
    # nonsingularity floor: smallest singular value relative to the largest
    singular_rel: float = 1e-13
    # feedback-Erlang block: target eigenvalue containment and closed-form
    # dominant-eigenvalue agreement
    fe_eig_check: float = 1e-8
    fe_r_check: float = 1e-10
    # positive-density grid check
    pos_grid_points: int = 2000
    pos_delta_rel: float = 1e-3
    pos_span: float = 30.0
    # infimum of the density on [0, tau] is shrunk by this safety factor
    eps2_safety: float = 0.9
    # doubling searches (rate selection, tau selection) give up after this many
    max_doublings: int = 60

    def replace(self, **changes) -> "ToleranceConfig":
        return replace(self, **changes)


DEFAULT_TOL = ToleranceConfig()
