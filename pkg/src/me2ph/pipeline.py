"""End-to-end conversion of a matrix-exponential pair into Markovian form.

Order of operations: minimize, check the dominance and positivity conditions,
split off an Erlang factor if the density vanishes at 0, build the monocyclic
generator and its initial vector, append the certified Erlang tail if the
vector has negative entries, and finally reattach the Erlang factor.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .core import MERep
from .deconv import choose_mu, deconvolve, recompose, zero_multiplicity
from .errors import DecViolationError, InvalidRepresentationError, NumericError, PositiveDensityError
from .monocyclic import build_generator, solve_gamma
from .spectral import analyze_spectrum, check_c_conditions, check_dec, minimal_representation
from .tail import BoundsReport, PHRep, append_tail, compute_bounds, find_tau
from .validate import check_markovian, check_positive_density

__all__ = ["PaperBounds", "ConversionReport", "convert"]


@dataclass(frozen=True)
class PaperBounds:
    """Published rounded constants for regression runs of the bundled example.

    Substituting these for the computed quantities reproduces the published
    tail figures exactly (rate 806600, order 403309).  Meaningless for other
    inputs.
    """

    mu: float = 10.0
    tau: float = 0.5
    gamma_norm: float = 1.5
    eps1: float = 0.05
    eps2: float = 0.069
    round_rate_to: float = 100.0


@dataclass
class ConversionReport:
    """Step-by-step record of one conversion."""

    input_order: int = 0
    minimal_order: int = 0
    eigenvalues: list = field(default_factory=list)
    l: int = 0
    mu: float | None = None
    blocks: list = field(default_factory=list)
    monocyclic_order: int = 0
    gamma_min: float = 0.0
    tail_needed: bool = False
    bounds: BoundsReport | None = None
    final_order: int = 0

    def lines(self) -> list[str]:
        out = [
            f"input order: {self.input_order}",
            f"minimal order: {self.minimal_order}",
            "eigenvalues: " + ", ".join(self.eigenvalues),
            f"erlang factor: l={self.l}" + (f" mu={self.mu!r}" if self.l else ""),
            "blocks: " + ", ".join(self.blocks),
            f"monocyclic order: {self.monocyclic_order}",
            f"gamma min entry: {self.gamma_min!r}",
        ]
        if self.tail_needed and self.bounds is not None:
            b = self.bounds
            out += [
                f"tau: {b.tau!r}",
                f"g: {b.g!r}",
                f"gamma norm: {b.gamma_norm!r}",
                f"eps1: {b.eps1!r}",
                f"eps2: {b.eps2!r}",
                f"lambda_prime: {b.lambda_prime!r}",
                f"lambda_dprime: {b.lambda_dprime!r}",
                f"lambda: {b.rate!r}",
                f"n: {b.n}",
            ]
        else:
            out.append("tail: not needed")
        out.append(f"final order: {self.final_order}")
        return out


def _fmt_eig(term) -> str:
    ev = term.eigenvalue
    if ev.imag == 0:
        s = f"{ev.real:g}"
    else:
        sign = "+" if ev.imag >= 0 else "-"
        s = f"{ev.real:g}{sign}{abs(ev.imag):g}j"
    return f"{s} (x{term.multiplicity})" if term.multiplicity > 1 else s


def convert(
    rep: MERep,
    tol: ToleranceConfig = DEFAULT_TOL,
    *,
    paper_bounds: PaperBounds | None = None,
    max_order: int = 10_000_000,
    f_inf_grid: int | None = None,
) -> tuple[PHRep, ConversionReport]:
    """Run the full construction and return the Markovian representation.

    Raises ``DecViolationError`` or ``PositiveDensityError`` when the input
    fails the corresponding existence condition, and ``NumericError`` when the
    certified order would exceed ``max_order``.
    """
    report = ConversionReport(input_order=rep.order)

    spec = analyze_spectrum(rep, tol)
    minimal = minimal_representation(spec, tol)
    report.minimal_order = minimal.order
    report.eigenvalues = [_fmt_eig(t) for t in spec.terms]

    dec = check_dec(spec, tol)
    if not dec.ok:
        raise DecViolationError(dec.diagnostic)
    conditions = check_c_conditions(minimal, spec, tol)
    if not conditions.c1_stable:
        raise InvalidRepresentationError(
            "convert: spectrum has an eigenvalue with nonnegative real part"
        )
    pd = check_positive_density(minimal, spec, tol)
    if not pd.ok:
        raise PositiveDensityError(f"{pd.failed_part}: {pd.detail}")

    l = zero_multiplicity(minimal, tol)
    report.l = l
    working = minimal
    working_spec = spec
    mu = None
    if l > 0:
        mu = paper_bounds.mu if paper_bounds is not None else choose_mu(minimal, l, spec, tol)
        report.mu = mu
        residual = deconvolve(minimal, l, mu, tol)
        # re-minimize: the factor removal may cancel an eigenvalue outright
        working_spec = analyze_spectrum(residual, tol)
        working = minimal_representation(working_spec, tol)
        pd = check_positive_density(working, working_spec, tol)
        if not pd.ok:
            raise PositiveDensityError(
                f"residual density after the Erlang split is not positive ({pd.detail})"
            )

    mono = build_generator(working_spec, tol)
    mono = solve_gamma(working, mono, tol)
    report.blocks = [f"({b.b},{b.sigma:g},{b.z:g})" for b in mono.blocks]
    report.monocyclic_order = mono.order
    gamma_min = float(mono.gamma.min())
    report.gamma_min = gamma_min

    if gamma_min >= 0:
        ph = PHRep(np.clip(mono.gamma, 0.0, None), mono.blocks, 0.0, 0, np.zeros(0), tol=tol)
    else:
        report.tail_needed = True
        if paper_bounds is not None:
            tau = paper_bounds.tau
            bounds = compute_bounds(
                mono, tau, f_inf_grid, tol=tol,
                gamma_norm=paper_bounds.gamma_norm,
                eps1=paper_bounds.eps1,
                eps2=paper_bounds.eps2,
                round_rate_to=paper_bounds.round_rate_to,
            )
        else:
            tau = find_tau(mono, tol)
            bounds = compute_bounds(mono, tau, f_inf_grid, tol=tol)
        report.bounds = bounds
        if l + mono.order + bounds.n > max_order:
            raise NumericError(
                f"convert: certified order {l + mono.order + bounds.n} exceeds "
                f"the limit {max_order}",
                detail={"n": bounds.n, "max_order": max_order},
            )
        ph = append_tail(mono, bounds, tol)

    if l > 0:
        ph = recompose(ph, l, mu, tol)
    report.final_order = ph.order

    verdict = check_markovian(ph, tol)
    if not verdict.ok:
        raise NumericError(f"convert: output failed the Markovian check ({verdict.violation})")
    return ph, report
