import numpy as np
import pytest

from me2ph import (
    InvalidRepresentationError,
    MERep,
    NumericError,
    PaperBounds,
    PositiveDensityError,
    analyze_spectrum,
    choose_mu,
    convert,
    zero_multiplicity,
)
from genutil import rep_from_terms


def test_convert_rejects_unstable_spectrum():
    rep = MERep(np.array([1.0]), np.array([[1.0]]))
    with pytest.raises(InvalidRepresentationError, match="nonnegative real part"):
        convert(rep)


def test_convert_enforces_order_limit(worked_rep):
    with pytest.raises(NumericError, match="exceeds"):
        convert(worked_rep, paper_bounds=PaperBounds(), max_order=100_000)


def test_convert_erlang_reports_prefix():
    A = np.array([[-1.0, 1.0], [0.0, -1.0]])
    ph, report = convert(MERep(np.array([1.0, 0.0]), A))
    assert report.l == 1
    assert report.minimal_order == 2
    assert not report.tail_needed
    assert report.final_order == ph.order == 3
    assert any(line.startswith("erlang factor: l=1") for line in report.lines())


def test_choose_mu_gives_up_on_sign_changing_density():
    # vanishing at the origin but genuinely negative further out: no rate can
    # make the residual positive, so the search must terminate with an error
    rep = rep_from_terms([(-1.0 + 0j, [0.0, 1.0]), (-2.0 + 4j, [0.0, 2.5])])
    assert zero_multiplicity(rep) == 1
    spec = analyze_spectrum(rep)
    with pytest.raises(PositiveDensityError, match="doublings"):
        choose_mu(rep, 1, spec)


def test_choose_mu_rejects_zero_multiplicity():
    rep = MERep(np.array([1.0]), np.array([[-1.0]]))
    with pytest.raises(InvalidRepresentationError, match="nothing to split"):
        choose_mu(rep, 0, analyze_spectrum(rep))


def test_analyze_spectrum_reports_ill_conditioning():
    n = 8
    A = np.diag(np.linspace(-1.0, -1.0 - 6e-5, n))
    alpha = np.full(n, 1.0 / n)
    rep = MERep(alpha, A)
    with pytest.raises(NumericError, match="ill conditioned") as exc:
        analyze_spectrum(rep)
    assert exc.value.detail["cond"] > 1e13
