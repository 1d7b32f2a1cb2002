"""Erlang-tail extension: make the initial vector nonnegative.

Appending a chain of ``n`` exponential states of rate ``lam`` to a monocyclic
representation transforms the initial vector through powers of
``M = I + G/lam``.  For ``tau = n/lam`` fixed and ``lam`` large enough both
parts of the transformed vector are positive: the tail entries are
approximate density samples ``f(k/lam)/lam`` and the head entries approach
``gamma exp(G tau) > 0``.  The certified rates come from the approximation
bound ``|e^z - (1+z/n)^n| <= r^2 e^r / (2n)`` for ``|z| <= r``.
"""

import math
import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.special import gammainc, gammaln, roots_legendre

from .config import DEFAULT_TOL, ToleranceConfig
from .core import mat_norm_inf, vec_norm1
from .errors import (
    InvalidRepresentationError,
    NumericError,
    PositiveDensityError,
)
from .monocyclic import FEBlock, MonocyclicRep

__all__ = [
    "BoundsReport",
    "PHRep",
    "find_tau",
    "compute_bounds",
    "append_tail",
    "phrep_pdf",
    "phrep_moments",
    "phrep_cdf_grid",
    "to_dense",
]

_GL_NODES = 96
_GLX, _GLW = roots_legendre(_GL_NODES)


@dataclass(frozen=True)
class BoundsReport:
    """Scalars of the tail-rate derivation.

    ``lambda_prime`` keeps the head block positive, ``lambda_dprime`` keeps
    the sampled tail weights positive; ``rate`` is their maximum (optionally
    rounded up) and ``n = ceil(tau * rate)``.
    """

    tau: float
    g: float
    gamma_norm: float
    eps1: float
    eps2: float
    lambda_prime: float
    lambda_dprime: float
    rate: float
    n: int


@dataclass(frozen=True, eq=False)
class PHRep:
    """Markovian representation: optional Erlang prefix, feedback-Erlang body,
    and an Erlang tail, never stored densely.

    ``tail_weights`` follows the transformed-vector layout left to right:
    entry ``k`` is ``gamma (I + G/lam)^(n-1-k) (-G 1) / lam`` and starts the
    absorption path ``n - k`` exponential stages before the end.
    """

    head_gamma: np.ndarray
    blocks: tuple[FEBlock, ...]
    tail_lambda: float
    tail_n: int
    tail_weights: np.ndarray
    prefix: object | None = None  # optional Erlang factor with fields l, mu
    tol: ToleranceConfig = DEFAULT_TOL

    def __post_init__(self):
        head = np.asarray(self.head_gamma, dtype=float)
        w = np.asarray(self.tail_weights, dtype=float)
        u = sum(b.b for b in self.blocks)
        if head.shape != (u,):
            raise InvalidRepresentationError(
                f"PHRep: head vector length {head.shape} does not match blocks ({u} states)"
            )
        if self.tail_n != w.shape[0]:
            raise InvalidRepresentationError(
                f"PHRep: tail_n={self.tail_n} but {w.shape[0]} weights given"
            )
        if self.tail_n > 0 and not self.tail_lambda > 0:
            raise InvalidRepresentationError("PHRep: tail rate must be positive")
        if head.size and head.min() < 0:
            raise InvalidRepresentationError(f"PHRep: negative head entry {head.min()}")
        if w.size and w.min() < 0:
            raise InvalidRepresentationError(f"PHRep: negative tail weight {w.min()}")
        total = head.sum() + w.sum()
        if abs(total - 1.0) > self.tol.alpha_sum:
            raise InvalidRepresentationError(f"PHRep: initial mass sums to {total}")
        if self.prefix is not None and self.prefix.l > 0 and not self.prefix.mu > 0:
            raise InvalidRepresentationError("PHRep: prefix rate must be positive")
        head = np.array(head)
        head.setflags(write=False)
        w = np.array(w)
        w.setflags(write=False)
        object.__setattr__(self, "head_gamma", head)
        object.__setattr__(self, "tail_weights", w)
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def u(self) -> int:
        return sum(b.b for b in self.blocks)

    @property
    def prefix_length(self) -> int:
        return self.prefix.l if self.prefix is not None else 0

    @property
    def order(self) -> int:
        return self.prefix_length + self.u + self.tail_n

    @property
    def lambda1(self) -> float:
        return self.blocks[0].sigma

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense body generator (feedback-Erlang blocks only)."""
        u = self.u
        G = np.zeros((u, u))
        at = 0
        for blk in self.blocks:
            G[at : at + blk.b, at : at + blk.b] = blk.matrix()
            at += blk.b
            if at < u:
                G[at - 1, at] = blk.exit_rate
        return G


def _log_rate_cost(density, tau: float, g: float, gn: float,
                   eps1: float) -> float:
    """Logarithm of the certified tail rate a given ``tau`` would lead to."""
    xs = np.linspace(0.0, tau, 17)
    density_floor = float(np.min(density(xs)))
    if density_floor <= 0:
        return math.inf
    eps2 = 0.9 * density_floor
    log_lp = math.log(gn) + 2 * math.log(g * tau) + g * tau - math.log(2 * eps1 * tau)
    log_lpp = math.log(gn) + g * tau + math.log(tau) + 3 * math.log(g) - math.log(2 * eps2)
    return max(log_lp, log_lpp)


def find_tau(mono: MonocyclicRep, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Pick a horizon ``tau`` with ``gamma exp(G tau)`` entrywise positive.

    Doubling from ``n1/lambda1`` always reaches a feasible point when the
    construction's preconditions hold.  Because the certified rate grows like
    ``exp(g tau)``, the search then walks the binary ladder back down while
    positivity survives and keeps the feasible point with the cheapest rate.
    """
    if mono.gamma is None:
        raise InvalidRepresentationError("find_tau: gamma not set")
    if mono.gamma[0] <= 0:
        raise InvalidRepresentationError(
            f"find_tau: first coordinate of gamma must be positive, got {mono.gamma[0]}"
        )
    G = mono.matrix
    g = mat_norm_inf(G)
    gn = vec_norm1(mono.gamma)

    def smallest_entry(t: float) -> float:
        return float((mono.gamma @ expm(G * t)).min())

    tau = mono.n1 / mono.lambda1
    for _ in range(tol.max_doublings):
        e1 = smallest_entry(tau)
        if e1 > 0:
            break
        tau *= 2
    else:
        raise NumericError(
            "find_tau: preconditions violated (gamma_1 <= 0 or non-dominant input); "
            f"no positive vector after {tol.max_doublings} doublings"
        )

    if float(mono.gamma.min()) >= 0:
        return tau

    from .spectral import density_evaluator

    density = density_evaluator(mono.to_me_rep(tol), tol)
    best, best_cost = tau, _log_rate_cost(density, tau, g, gn, e1)
    t = tau / 2
    for _ in range(tol.max_doublings):
        e1 = smallest_entry(t)
        if e1 <= 0:
            break
        cost = _log_rate_cost(density, t, g, gn, e1)
        if cost < best_cost:
            best, best_cost = t, cost
        elif cost > best_cost + 3.0:
            # well past the minimum: the vanishing positivity margin dominates
            break
        t /= 2
    return best


def compute_bounds(
    mono: MonocyclicRep,
    tau: float,
    f_inf_grid: int | None = None,
    *,
    tol: ToleranceConfig = DEFAULT_TOL,
    gamma_norm: float | None = None,
    eps1: float | None = None,
    eps2: float | None = None,
    round_rate_to: float | None = None,
) -> BoundsReport:
    """Derive the certified tail rate and order for a given ``tau``.

    ``eps1`` is the smallest entry of ``gamma exp(G tau)``; ``eps2`` a safety-
    shrunk grid infimum of the density on ``[0, tau]``.  The keyword overrides
    substitute externally supplied constants for the computed ones (used to
    reproduce published figures); ``round_rate_to`` rounds the applied rate up
    to the next multiple, which is always safe.
    """
    if mono.gamma is None:
        raise InvalidRepresentationError("compute_bounds: gamma not set")
    G = mono.matrix
    g = mat_norm_inf(G)
    gn = float(gamma_norm) if gamma_norm is not None else vec_norm1(mono.gamma)

    e1_computed = float((mono.gamma @ expm(G * tau)).min())
    if e1_computed <= 0:
        raise InvalidRepresentationError(
            f"compute_bounds: gamma exp(G tau) has minimum {e1_computed} <= 0; "
            "tau must come from find_tau"
        )
    e1 = float(eps1) if eps1 is not None else e1_computed

    if eps2 is not None:
        e2 = float(eps2)
    else:
        points = f_inf_grid if f_inf_grid is not None else 10 * math.ceil(g * tau)
        points = max(points, 10)
        xs = np.linspace(0.0, tau, points)
        from .spectral import density_evaluator

        vals = np.asarray(density_evaluator(mono.to_me_rep(tol), tol)(xs))
        e2 = tol.eps2_safety * float(vals.min())
        if e2 <= 0:
            raise PositiveDensityError(
                f"density is not positive on [0, {tau}] (grid minimum "
                f"{vals.min():.3e}); an Erlang factor may need splitting off first"
            )

    log_lp = math.log(gn) + 2 * math.log(g * tau) + g * tau - math.log(2 * e1 * tau)
    log_lpp = math.log(gn) + g * tau + math.log(tau) + 3 * math.log(g) - math.log(2 * e2)
    if max(log_lp, log_lpp) > math.log(1e15):
        raise NumericError(
            "compute_bounds: certified tail rate exceeds 1e15; the representation "
            "is numerically out of reach",
            detail={"log_lambda_prime": log_lp, "log_lambda_dprime": log_lpp},
        )
    lp = math.exp(log_lp)
    lpp = math.exp(log_lpp)
    rate = max(lp, lpp)
    if round_rate_to:
        rate = math.ceil(rate / round_rate_to) * round_rate_to
    n = math.ceil(tau * rate - 1e-9 * max(1.0, tau * rate))
    return BoundsReport(
        tau=tau, g=g, gamma_norm=gn, eps1=e1, eps2=e2,
        lambda_prime=lp, lambda_dprime=lpp, rate=float(rate), n=int(n),
    )


def _tail_sweep(gamma: np.ndarray, G: np.ndarray, rate: float, n: int,
                chunk: int = 512):
    """Left-to-right products through ``M = I + G/rate``.

    Returns ``gamma M^n`` and the scalars ``q[j] = gamma M^j (-G 1)/rate`` for
    ``j = 0..n-1``.  Work is O(n u^2); powers of ``M`` are only formed up to
    the chunk size, which keeps the evaluation a blocked version of plain
    successive vector-matrix products.
    """
    u = G.shape[0]
    chunk = max(1, min(chunk, max(32, 4_000_000 // (u * u)), n))
    M = np.eye(u) + G / rate
    e = -(G @ np.ones(u)) / rate
    powers = np.empty((chunk, u, u))
    powers[0] = M
    for i in range(1, chunk):
        powers[i] = powers[i - 1] @ M
    q = np.empty(n)
    v = np.array(gamma, dtype=float)
    j = 0
    while j < n:
        c = min(chunk, n - j)
        rows = np.einsum("i,kij->kj", v, powers[:c])
        q[j] = v @ e
        if c > 1:
            q[j + 1 : j + c] = rows[: c - 1] @ e
        v = rows[c - 1]
        j += c
    return v, q


def append_tail(mono: MonocyclicRep, bounds: BoundsReport,
                tol: ToleranceConfig = DEFAULT_TOL) -> PHRep:
    """Extend the monocyclic representation with the certified Erlang tail.

    Entries of the transformed vector within the negative slack window are
    clamped to zero; a genuinely negative entry triggers one retry with the
    rate doubled before failing.
    """
    if mono.gamma is None:
        raise InvalidRepresentationError("append_tail: gamma not set")
    if bounds.n == 0:
        if float(mono.gamma.min()) < 0:
            raise InvalidRepresentationError(
                "append_tail: empty tail requested but gamma has negative entries"
            )
        return PHRep(mono.gamma, mono.blocks, 0.0, 0, np.zeros(0), tol=tol)

    G = mono.matrix
    slack = tol.markov_slack_rel * vec_norm1(mono.gamma)
    rate, n = bounds.rate, bounds.n
    for attempt in range(2):
        head, q = _tail_sweep(mono.gamma, G, rate, n)
        worst = min(float(head.min()), float(q.min()) if n else 0.0)
        if worst > -slack:
            head = np.clip(head, 0.0, None)
            q = np.clip(q, 0.0, None)
            return PHRep(head, mono.blocks, rate, n, q[::-1].copy(), tol=tol)
        if attempt == 0:
            rate *= 2
            n = math.ceil(bounds.tau * rate - 1e-9 * max(1.0, bounds.tau * rate))
    bad_head = int(head.argmin())
    bad_tail = int(q.argmin()) if n else -1
    raise NumericError(
        "append_tail: transformed vector stays negative after doubling the rate",
        detail={
            "head_min": (bad_head, float(head.min())),
            "tail_min": (bad_tail, float(q.min()) if n else None),
            "rate": rate,
        },
    )


# ---------------------------------------------------------------------------
# structured evaluation


class _EvalState:
    """Cached machinery for evaluating one PHRep: the body generator, the
    order-indexed weights, and an ODE dense solution for the head density."""

    def __init__(self, ph: PHRep):
        self.ph = ph
        self.G = ph.matrix
        self.exit = -(self.G @ np.ones(ph.u))
        n = ph.tail_n
        # weight_by_order[m-1] pairs with an Erlang(m, rate) absorption path
        self.weight_by_order = ph.tail_weights[::-1].copy() if n else np.zeros(0)
        self.cum_weights = np.concatenate([[0.0], np.cumsum(self.weight_by_order)])
        self.head_mass = float(ph.head_gamma.sum())
        if n:
            rate = ph.tail_lambda
            spread = max(16.0 * math.sqrt(n), 60.0)
            self.r_lo = max(0.0, (n - spread) / rate)
            self.r_hi = (n + spread) / rate
        self._sol = None
        self._sol_hi = 0.0

    def _ensure_head_solution(self, hi: float):
        hi = max(hi, 1e-6)
        if self._sol is not None and hi <= self._sol_hi:
            return
        hi = hi * 1.25 + 1.0
        y0 = np.concatenate([self.ph.head_gamma, [0.0]])

        def rhs(t, y):
            yv = y[:-1]
            return np.concatenate([yv @ self.G, [yv @ self.exit]])

        # the absolute floor must sit above the 1e-16-scale coupling noise of
        # the O(1) components, or step control collapses as fast modes decay
        sol = solve_ivp(rhs, (0.0, hi), y0, method="DOP853",
                        dense_output=True, rtol=1e-12, atol=1e-14)
        if not sol.success:
            raise NumericError(f"PHRep evaluation: head propagation failed: {sol.message}")
        self._sol = sol
        self._sol_hi = hi

    def head_density(self, v: np.ndarray) -> np.ndarray:
        """Defective density of absorption from the head states."""
        if self.head_mass <= 0:
            return np.zeros_like(v)
        self._ensure_head_solution(float(np.max(v, initial=0.0)))
        ys = self._sol.sol(np.asarray(v, dtype=float))
        return self.exit @ ys[:-1]

    def head_cumulative(self, v: np.ndarray) -> np.ndarray:
        """Mass absorbed from the head states by time ``v``."""
        if self.head_mass <= 0:
            return np.zeros_like(v)
        self._ensure_head_solution(float(np.max(v, initial=0.0)))
        return self._sol.sol(np.asarray(v, dtype=float))[-1]


_EVAL_CACHE: "weakref.WeakKeyDictionary[PHRep, _EvalState]" = weakref.WeakKeyDictionary()


def _state(ph: PHRep) -> _EvalState:
    st = _EVAL_CACHE.get(ph)
    if st is None:
        st = _EvalState(ph)
        _EVAL_CACHE[ph] = st
    return st


def _gl_panel(lo: float, hi: float):
    mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
    return mid + half * _GLX, half * _GLW


def _erlang_logpdf(m, rate: float, x):
    """Log density of an Erlang mixture component; -inf where it vanishes."""
    m = np.asarray(m, dtype=float)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(
            x > 0,
            math.log(rate) + (m - 1) * np.log(np.maximum(rate * x, 1e-300))
            - rate * x - gammaln(m),
            np.where(m == 1.0, math.log(rate), -np.inf),
        )
    return out


def _tail_mixture_batch(st: _EvalState, xs: np.ndarray) -> np.ndarray:
    """Weighted Erlang-density mixture, restricted to the orders that matter."""
    n, rate = st.ph.tail_n, st.ph.tail_lambda
    out = np.zeros(xs.shape)
    if n == 0:
        return out
    at_zero = xs == 0.0
    out[at_zero] = st.weight_by_order[0] * rate
    pos = np.flatnonzero(xs > 0)
    if pos.size == 0:
        return out
    if n <= 4000:
        m = np.arange(1, n + 1, dtype=float)
        logs = _erlang_logpdf(m[:, None], rate, xs[pos][None, :])
        with np.errstate(over="ignore"):
            out[pos] = st.weight_by_order @ np.exp(logs)
        return out
    for i in pos:
        x = float(xs[i])
        c = rate * x
        half = 40.0 * math.sqrt(c) + 60.0
        m_lo = max(1, int(c - half))
        m_hi = min(n, int(c + half) + 1)
        if m_lo > n:
            continue
        m = np.arange(m_lo, m_hi + 1, dtype=float)
        logs = _erlang_logpdf(m, rate, x)
        top = logs.max()
        if top == -np.inf:
            continue
        out[i] = np.exp(top) * float(
            (st.weight_by_order[m_lo - 1 : m_hi] * np.exp(logs - top)).sum()
        )
    return out


def _head_correction_batch(st: _EvalState, xs: np.ndarray) -> np.ndarray:
    """Density contribution of paths through the head states (plus the full
    tail when one is present)."""
    ph = st.ph
    out = np.zeros(xs.shape)
    if st.head_mass <= 0:
        return out
    if ph.tail_n == 0:
        return st.head_density(xs)
    lo = np.maximum(0.0, xs - st.r_hi)
    hi = np.maximum(0.0, xs - st.r_lo)
    live = np.flatnonzero(hi > lo)
    if live.size == 0:
        return out
    mid = (lo[live] + hi[live]) / 2.0
    half = (hi[live] - lo[live]) / 2.0
    nodes = mid[:, None] + half[:, None] * _GLX[None, :]
    dens = st.head_density(nodes.ravel()).reshape(nodes.shape)
    kern = np.exp(_erlang_logpdf(float(ph.tail_n), ph.tail_lambda,
                                 xs[live][:, None] - nodes))
    out[live] = half * ((_GLW[None, :] * dens * kern).sum(axis=1))
    return out


def _inner_pdf_batch(st: _EvalState, xs: np.ndarray) -> np.ndarray:
    return _tail_mixture_batch(st, xs) + _head_correction_batch(st, xs)


def _prefix_panels(st: _EvalState, x: float, kernel_span: float):
    """Integration panels for the prefix convolution.

    The inner density has short-scale features (low-order Erlang terms) on
    ``[0, ~80/rate]``; that region gets its own panel whenever the kernel
    window reaches it.
    """
    lo = max(0.0, x - kernel_span)
    panels = []
    if st.ph.tail_n:
        cut = min(x, 80.0 / st.ph.tail_lambda)
        if lo < cut:
            panels.append((lo, cut))
            lo = cut
    if lo < x:
        panels.append((lo, x))
    return panels


def phrep_pdf(ph: PHRep, x) -> float | np.ndarray:
    """Density of the structured representation at ``x`` (scalar or array)."""
    st = _state(ph)
    xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if xs.size and xs.min() < 0:
        raise InvalidRepresentationError("phrep_pdf: x must be >= 0")
    if ph.prefix is None or ph.prefix.l == 0:
        out = _inner_pdf_batch(st, xs)
    else:
        l, mu = ph.prefix.l, ph.prefix.mu
        span = (l + 60.0) / mu
        segments = []  # (index, node weights * kernel, node slice)
        all_nodes = []
        at = 0
        for i, xi in enumerate(xs):
            xi = float(xi)
            if xi <= 0:
                continue
            for lo, hi in _prefix_panels(st, xi, span):
                sv, wv = _gl_panel(lo, hi)
                kern = np.exp(_erlang_logpdf(float(l), mu, xi - sv))
                segments.append((i, wv * kern, at, at + sv.size))
                all_nodes.append(sv)
                at += sv.size
        out = np.zeros(xs.shape)
        if all_nodes:
            inner = _inner_pdf_batch(st, np.concatenate(all_nodes))
            for i, wk, a, b in segments:
                out[i] += float(wk @ inner[a:b])
    return out.reshape(np.shape(x)) if np.ndim(x) else float(out[0])


def _erlang_moments(order, rate: float, k_max: int) -> np.ndarray:
    """Rows k = 0..k_max of E[Erlang(order, rate)^k], vectorized over orders."""
    order = np.atleast_1d(np.asarray(order, dtype=float))
    out = np.ones((k_max + 1, order.size))
    acc = np.ones(order.size)
    for k in range(1, k_max + 1):
        acc = acc * (order + (k - 1)) / rate
        out[k] = acc
    return out


def phrep_moments(ph: PHRep, k_max: int) -> list[float]:
    """Raw moments through the structure, never densifying the matrix."""
    st = _state(ph)
    # partial moments through the head: p[j] = j! * head (-G)^(-j) 1
    p = np.zeros(k_max + 1)
    p[0] = st.head_mass
    if st.head_mass > 0:
        y = np.ones(ph.u)
        fact = 1.0
        negG = -st.G
        for j in range(1, k_max + 1):
            y = np.linalg.solve(negG, y)
            fact *= j
            p[j] = fact * float(ph.head_gamma @ y)

    inner = np.zeros(k_max + 1)
    if ph.tail_n:
        em_full = _erlang_moments(ph.tail_n, ph.tail_lambda, k_max)[:, 0]
        for k in range(k_max + 1):
            inner[k] += sum(math.comb(k, j) * p[j] * em_full[k - j] for j in range(k + 1))
        em_orders = _erlang_moments(np.arange(1, ph.tail_n + 1), ph.tail_lambda, k_max)
        inner += em_orders @ st.weight_by_order
    else:
        inner = p

    if ph.prefix is not None and ph.prefix.l > 0:
        ep = _erlang_moments(ph.prefix.l, ph.prefix.mu, k_max)[:, 0]
        total = np.zeros(k_max + 1)
        for k in range(k_max + 1):
            total[k] = sum(math.comb(k, j) * ep[j] * inner[k - j] for j in range(k + 1))
    else:
        total = inner
    return [float(v) for v in total[1:]]


def phrep_cdf_grid(ph: PHRep, xs: np.ndarray) -> np.ndarray:
    """Distribution function on an increasing grid starting at or above 0.

    The tail mixture is summed exactly through regularized incomplete gamma
    functions; head and prefix layers are folded in by quadrature, the prefix
    through interpolation on the inner grid.
    """
    st = _state(ph)
    xs = np.asarray(xs, dtype=float)
    inner = np.empty(xs.shape)
    n, rate = ph.tail_n, ph.tail_lambda
    for i, x in enumerate(xs):
        if x <= 0:
            inner[i] = 0.0
            continue
        acc = 0.0
        if n:
            c = rate * x
            half = 40.0 * math.sqrt(c) + 60.0
            m_lo = max(1, int(c - half))
            m_hi = min(n, int(c + half) + 1)
            # orders below the window are fully absorbed by time x
            acc += st.cum_weights[min(m_lo - 1, n)]
            if m_lo <= m_hi:
                m = np.arange(m_lo, m_hi + 1, dtype=float)
                acc += float(
                    (st.weight_by_order[m_lo - 1 : m_hi] * gammainc(m, c)).sum()
                )
            if st.head_mass > 0:
                edge = max(0.0, x - st.r_hi)
                acc += float(st.head_cumulative(np.array([edge]))[0])
                hi = max(0.0, x - st.r_lo)
                if hi > edge:
                    sv, wv = _gl_panel(edge, hi)
                    dens = st.head_density(sv)
                    kern = gammainc(float(n), rate * np.maximum(x - sv, 0.0))
                    acc += float((wv * dens * kern).sum())
        else:
            acc += float(st.head_cumulative(np.array([x]))[0])
        inner[i] = min(acc, 1.0)

    if ph.prefix is None or ph.prefix.l == 0:
        return inner

    l, mu = ph.prefix.l, ph.prefix.mu
    span = (l + 60.0) / mu
    out = np.empty(xs.shape)
    for i, x in enumerate(xs):
        if x <= 0:
            out[i] = 0.0
            continue
        # kernel mass outside the window is below exp(-60) of the total
        sv, wv = _gl_panel(max(0.0, x - span), x)
        kern = np.exp(_erlang_logpdf(float(l), mu, x - sv))
        vals = np.interp(sv, xs, inner)
        out[i] = float((wv * vals * kern).sum())
    return np.clip(out, 0.0, 1.0)


def to_dense(ph: PHRep, limit: int = 10_000):
    """Materialize the full (vector, matrix) pair; refuses above ``limit`` states."""
    order = ph.order
    if order > limit:
        raise NumericError(
            f"to_dense: order {order} exceeds the densification limit {limit}"
        )
    u, n, l = ph.u, ph.tail_n, ph.prefix_length
    B = np.zeros((order, order))
    b = np.zeros(order)
    G = ph.matrix
    at = l
    B[at : at + u, at : at + u] = G
    exit_col = -(G @ np.ones(u))
    if n:
        B[at : at + u, at + u] = exit_col
        for k in range(n):
            i = at + u + k
            B[i, i] = -ph.tail_lambda
            if k < n - 1:
                B[i, i + 1] = ph.tail_lambda
    inner_b = np.concatenate([ph.head_gamma, ph.tail_weights])
    if l:
        mu = ph.prefix.mu
        for k in range(l):
            B[k, k] = -mu
            if k < l - 1:
                B[k, k + 1] = mu
        B[l - 1, l : order] = mu * inner_b
        b[0] = 1.0
    else:
        b[l : order] = inner_b
    return b, B
