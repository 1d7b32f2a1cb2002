"""Executable checks: Markovianity, positivity, equivalence, redundancy,
and a Monte Carlo cross-check of the absorption-time interpretation."""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .core import MERep, moments, pdf_eval_many
from .errors import InvalidRepresentationError, NumericError
from .spectral import SpectralData
from .tail import PHRep, phrep_cdf_grid, phrep_moments, phrep_pdf

__all__ = [
    "MarkovianVerdict",
    "PositiveDensityVerdict",
    "EquivalenceVerdict",
    "check_markovian",
    "check_positive_density",
    "check_equivalence",
    "eliminate_redundant",
    "monte_carlo_check",
    "ks_threshold",
]


@dataclass(frozen=True)
class MarkovianVerdict:
    ok: bool
    violation: str | None = None


def check_markovian(rep, tol: ToleranceConfig = DEFAULT_TOL) -> MarkovianVerdict:
    """Entrywise Markovian conditions; structured representations are checked
    without densifying."""
    if isinstance(rep, PHRep):
        return _check_markovian_ph(rep, tol)
    slack = tol.alpha_sum
    alpha, A = rep.alpha, rep.A
    if np.iscomplexobj(alpha) and np.abs(alpha.imag).max() > slack:
        return MarkovianVerdict(False, "alpha has complex entries")
    if np.iscomplexobj(A) and np.abs(A.imag).max() > slack:
        return MarkovianVerdict(False, "matrix has complex entries")
    alpha = alpha.real if np.iscomplexobj(alpha) else alpha
    A = A.real if np.iscomplexobj(A) else A
    if alpha.min() < -slack:
        return MarkovianVerdict(False, f"alpha[{alpha.argmin()}] = {alpha.min():.6g} < 0")
    if abs(alpha.sum() - 1.0) > slack:
        return MarkovianVerdict(False, f"alpha sums to {alpha.sum():.12g}")
    diag = np.diag(A)
    if diag.max() >= 0:
        return MarkovianVerdict(False, f"diagonal entry {diag.max():.6g} is not negative")
    off = A - np.diag(diag)
    if off.min() < -slack * max(1.0, float(np.abs(A).max())):
        i, j = np.unravel_index(off.argmin(), off.shape)
        return MarkovianVerdict(False, f"off-diagonal A[{i},{j}] = {A[i, j]:.6g} < 0")
    rowsums = A.sum(axis=1)
    if rowsums.max() > slack * max(1.0, float(np.abs(A).max())):
        return MarkovianVerdict(False, f"row {rowsums.argmax()} sums to {rowsums.max():.6g} > 0")
    return MarkovianVerdict(True)


def _check_markovian_ph(ph: PHRep, tol: ToleranceConfig) -> MarkovianVerdict:
    if ph.head_gamma.min() < 0:
        return MarkovianVerdict(False, f"head entry {ph.head_gamma.min():.6g} < 0")
    if ph.tail_n and ph.tail_weights.min() < 0:
        return MarkovianVerdict(False, f"tail weight {ph.tail_weights.min():.6g} < 0")
    total = ph.head_gamma.sum() + ph.tail_weights.sum()
    if abs(total - 1.0) > tol.alpha_sum:
        return MarkovianVerdict(False, f"initial mass sums to {total:.12g}")
    for blk in ph.blocks:
        if blk.sigma <= 0 or not (0 <= blk.z < 1):
            return MarkovianVerdict(False, f"invalid block {blk}")
    if ph.tail_n and ph.tail_lambda <= 0:
        return MarkovianVerdict(False, "tail rate must be positive")
    if ph.prefix is not None and ph.prefix.l > 0 and ph.prefix.mu <= 0:
        return MarkovianVerdict(False, "prefix rate must be positive")
    return MarkovianVerdict(True)


@dataclass(frozen=True)
class PositiveDensityVerdict:
    ok: bool
    failed_part: str | None = None
    detail: str | None = None


def check_positive_density(rep: MERep, spec: SpectralData,
                           tol: ToleranceConfig = DEFAULT_TOL) -> PositiveDensityVerdict:
    """Best-effort positivity check of the density on (0, inf).

    Three parts: a grid check on a bounded window, the sign of the dominant
    asymptotic coefficient for the far tail, and the first nonzero derivative
    at the origin for the near field.  A full decision procedure does not
    exist; the window and grid density are configurable.
    """
    from .spectral import expansion_values

    lam1, n1 = spec.lambda1, spec.n1
    if lam1 <= 0:
        return PositiveDensityVerdict(False, "tail", "density diverges (unstable eigenvalue)")
    delta = tol.pos_delta_rel / lam1
    K = tol.pos_span * n1 / lam1
    xs = np.linspace(delta, K, tol.pos_grid_points)
    vals = expansion_values(spec, xs)
    if vals.min() <= 0:
        i = int(vals.argmin())
        return PositiveDensityVerdict(
            False, "grid", f"f({xs[i]:.6g}) = {vals[i]:.6g} <= 0"
        )
    dom = spec.dominant_term
    c_top = dom.coeffs[-1]
    if not (abs(c_top.imag) <= 1e-9 * abs(c_top) and c_top.real > 0):
        return PositiveDensityVerdict(
            False, "tail", f"leading asymptotic coefficient {c_top:.6g} is not positive"
        )
    from .spectral import check_c_conditions

    creport = check_c_conditions(rep, spec, tol)
    if not creport.c4_nonneg_start:
        return PositiveDensityVerdict(
            False, "origin",
            f"first nonzero derivative at 0 (order {creport.first_nonzero_order}) "
            f"is {creport.first_nonzero_value}",
        )
    return PositiveDensityVerdict(True)


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Grid and moment comparison between two representations."""

    max_rel_error: float
    grid: tuple[float, ...]
    moments_rel_error: float
    ok: bool


def _pdf_on(rep_or_ph, xs: np.ndarray) -> np.ndarray:
    if isinstance(rep_or_ph, PHRep):
        return np.asarray(phrep_pdf(rep_or_ph, xs))
    return pdf_eval_many(rep_or_ph, xs)


def _moments_of(rep_or_ph, k_max: int) -> np.ndarray:
    if isinstance(rep_or_ph, PHRep):
        return np.asarray(phrep_moments(rep_or_ph, k_max))
    return np.asarray(moments(rep_or_ph, k_max))


def check_equivalence(rep1, rep2, grid=None, rel_tol: float | None = None,
                      tol: ToleranceConfig = DEFAULT_TOL) -> EquivalenceVerdict:
    """Compare densities on a grid and the first five raw moments."""
    rel_tol = rel_tol if rel_tol is not None else tol.equivalence_rel
    if grid is None:
        grid = np.linspace(0.05, 10.0, 50)
    grid = np.asarray(grid, dtype=float)
    f1 = _pdf_on(rep1, grid)
    f2 = _pdf_on(rep2, grid)
    floor = max(float(np.abs(f1).max()), 1e-300) * 1e-9
    rel = float((np.abs(f1 - f2) / np.maximum(np.abs(f1), floor)).max())
    m1 = _moments_of(rep1, 5)
    m2 = _moments_of(rep2, 5)
    mrel = float((np.abs(m1 - m2) / np.maximum(np.abs(m1), 1e-300)).max())
    return EquivalenceVerdict(
        max_rel_error=rel,
        grid=tuple(float(x) for x in grid),
        moments_rel_error=mrel,
        ok=(rel <= rel_tol and mrel <= rel_tol),
    )


def eliminate_redundant(rep: MERep, tol: ToleranceConfig = DEFAULT_TOL) -> MERep:
    """Remove states never visited before absorption.

    The mean time spent in each state is ``-alpha A^(-1)``; coordinates with
    zero mean occupancy can be deleted without changing the distribution.
    """
    verdict = check_markovian(rep, tol)
    if not verdict.ok:
        raise InvalidRepresentationError(
            f"eliminate_redundant: input must be Markovian ({verdict.violation})"
        )
    try:
        mean_times = -np.linalg.solve(rep.A.T, rep.alpha.astype(float))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eliminate_redundant: singular matrix ({exc})") from exc
    scale = max(float(np.abs(mean_times).max()), 1e-300)
    keep = np.abs(mean_times) > 1e-12 * scale
    if keep.all():
        return rep
    if not keep.any():
        raise InvalidRepresentationError("eliminate_redundant: no state is ever visited")
    alpha = rep.alpha[keep]
    A = rep.A[np.ix_(keep, keep)]
    return MERep(alpha, A, tol=rep.tol)


def ks_threshold(samples: int, quantile: float = 0.01) -> float:
    """Asymptotic one-sample Kolmogorov-Smirnov critical value."""
    coeff = {0.10: 1.22, 0.05: 1.36, 0.01: 1.63}[quantile]
    return coeff / np.sqrt(samples)


def _simulate_body(ph: PHRep, start_states: np.ndarray, rng) -> np.ndarray:
    """Absorption times of walkers started in the given body states."""
    G = ph.matrix
    u = ph.u
    rates = -np.diag(G)
    jump = G - np.diag(np.diag(G))
    exit_rates = -(G @ np.ones(u))
    # per-state categorical over (next states..., absorption)
    probs = np.hstack([jump / rates[:, None], (exit_rates / rates)[:, None]])
    cums = np.cumsum(probs, axis=1)
    t = np.zeros(start_states.shape[0])
    state = np.array(start_states, dtype=int)
    active = np.arange(state.shape[0])
    guard = 0
    while active.size:
        guard += 1
        if guard > 100_000:
            raise NumericError("monte_carlo_check: jump chain failed to absorb")
        cur = state[active]
        t[active] += rng.exponential(1.0 / rates[cur])
        draws = rng.random(active.size)
        nxt = (cums[cur] < draws[:, None]).sum(axis=1)
        absorbed = nxt >= u
        state[active[~absorbed]] = nxt[~absorbed]
        active = active[~absorbed]
    return t


def simulate_absorption_times(ph: PHRep, samples: int, rng) -> np.ndarray:
    """Draw absorption times of the chain described by the structured form.

    Body states are walked as a jump chain; a start in tail position k is a
    direct Erlang(n - k) draw; the prefix adds an independent Erlang draw.
    """
    ini = np.concatenate([ph.head_gamma, ph.tail_weights])
    ini = ini / ini.sum()
    cum = np.cumsum(ini)
    picks = np.searchsorted(cum, rng.random(samples), side="right")
    picks = np.minimum(picks, ini.size - 1)
    t = np.zeros(samples)
    in_head = picks < ph.u
    if in_head.any():
        t[in_head] = _simulate_body(ph, picks[in_head], rng)
        if ph.tail_n:
            t[in_head] += rng.gamma(ph.tail_n, 1.0 / ph.tail_lambda, size=int(in_head.sum()))
    in_tail = ~in_head
    if in_tail.any():
        orders = ph.tail_n - (picks[in_tail] - ph.u)
        t[in_tail] = rng.gamma(orders, 1.0 / ph.tail_lambda)
    if ph.prefix is not None and ph.prefix.l > 0:
        t += rng.gamma(ph.prefix.l, 1.0 / ph.prefix.mu, size=samples)
    return t


def monte_carlo_check(ph: PHRep, samples: int = 100_000, seed: int = 0,
                      tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """One-sample KS statistic of simulated absorption times against the
    numerically integrated distribution function.  Deterministic per seed."""
    verdict = check_markovian(ph, tol)
    if not verdict.ok:
        raise InvalidRepresentationError(
            f"monte_carlo_check: representation must be Markovian ({verdict.violation})"
        )
    rng = np.random.default_rng(seed)
    times = np.sort(simulate_absorption_times(ph, samples, rng))
    hi = float(times[-1]) * 1.02 + 1e-9
    grid = np.linspace(0.0, hi, 4097)
    cdf_grid = phrep_cdf_grid(ph, grid)
    F = np.interp(times, grid, cdf_grid)
    i = np.arange(1, samples + 1)
    d_plus = np.abs(i / samples - F).max()
    d_minus = np.abs(F - (i - 1) / samples).max()
    return float(max(d_plus, d_minus))
