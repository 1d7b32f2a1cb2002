import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from me2ph import (
    DecViolationError,
    FEBlock,
    MERep,
    analyze_spectrum,
    apply_transformation,
    build_generator,
    fe_block_for,
    pdf_eval_many,
    solve_gamma,
)
from me2ph.monocyclic import solve_transformation_matrix
from conftest import G8, GAMMA8
from genutil import damped_oscillation_rep, rep_from_terms


def test_fe_block_worked_pair():
    blk = fe_block_for(-5 + 3j, lambda1=1.0)
    assert blk.b == 4
    assert blk.sigma == pytest.approx(5.0, abs=1e-12)
    assert blk.z == pytest.approx(81 / 625, abs=1e-12)
    expected = np.array(
        [
            [-5.0, 5, 0, 0],
            [0, -5, 5, 0],
            [0, 0, -5, 5],
            [81 / 125, 0, 0, -5],
        ]
    )
    assert blk.matrix() == pytest.approx(expected, abs=1e-9)


def test_fe_block_real_eigenvalue_degenerate():
    blk = fe_block_for(-3.0, lambda1=1.0)
    assert (blk.b, blk.sigma, blk.z) == (1, 3.0, 0.0)
    assert blk.degenerate


def test_fe_block_contains_target_pair():
    rng = np.random.default_rng(2)
    for _ in range(25):
        lam1 = rng.uniform(0.5, 2.0)
        a = lam1 + rng.uniform(0.2, 4.0)
        c = rng.uniform(0.1, 5.0)
        blk = fe_block_for(complex(-a, c), lam1)
        evs = blk.eigenvalues()
        assert np.abs(evs - complex(-a, c)).min() < 1e-8 * max(1.0, a + c)
        assert blk.r < -lam1


def test_fe_block_integer_boundary_bumps_chain_length():
    # the raw chain-length formula gives exactly 4 here, which would park the
    # block's own dominant eigenvalue on the dominance threshold
    blk = fe_block_for(-2.0 + 1j, lambda1=1.0)
    assert blk.b >= 5
    assert blk.r < -1.0


def test_fe_block_rejects_tying_real_part():
    with pytest.raises(DecViolationError):
        fe_block_for(-1.0 + 2j, lambda1=1.0)


@settings(max_examples=220, deadline=None)
@given(
    st.integers(1, 12),
    st.floats(0.01, 10.0, allow_nan=False),
    st.one_of(st.just(0.0), st.floats(1e-6, 0.99, allow_nan=False)),
)
def test_fe_block_dominant_eigenvalue_closed_form(b, sigma, z):
    # below z ~ 1e-6 the matrix is numerically defective and the root
    # splitting sits under what any eigensolver can resolve
    blk = FEBlock(b, sigma, z)
    eigs = np.linalg.eigvals(blk.matrix())
    assert abs(blk.r - eigs.real.max()) <= 1e-10 * max(1.0, sigma)


def test_build_generator_worked_example(worked_residual):
    spec = analyze_spectrum(worked_residual)
    mono = build_generator(spec)
    assert mono.order == 8
    assert mono.n1 == 2
    assert mono.matrix == pytest.approx(G8, abs=1e-12)


def test_build_generator_single_exponential():
    rep = MERep(np.array([1.0]), np.array([[-4.0]]))
    mono = build_generator(analyze_spectrum(rep))
    assert mono.matrix == pytest.approx(np.array([[-4.0]]))


def test_build_generator_repeated_real_eigenvalue():
    rep = rep_from_terms([(-1.0 + 0j, [0.4, 0.6])])
    mono = build_generator(analyze_spectrum(rep))
    assert mono.matrix == pytest.approx(np.array([[-1.0, 1.0], [0.0, -1.0]]))


def test_generator_is_markovian_with_contained_spectrum():
    rng = np.random.default_rng(31)
    for _ in range(10):
        rep = damped_oscillation_rep(rng)
        spec = analyze_spectrum(rep)
        mono = build_generator(spec)
        G = mono.matrix
        diag = np.diag(G)
        off = G - np.diag(diag)
        assert diag.max() < 0
        assert off.min() >= 0
        rowsums = G.sum(axis=1)
        assert rowsums.max() <= 1e-12
        # exactly the last state exits
        assert (rowsums[:-1] == pytest.approx(0.0, abs=1e-12)) and rowsums[-1] < 0
        evs = np.linalg.eigvals(G)
        for t in spec.terms:
            assert np.abs(evs - t.eigenvalue).min() < 1e-7 * max(1.0, abs(t.eigenvalue))
        # non-dominant blocks decay strictly faster than the dominant rate
        for blk in mono.blocks[mono.n1:]:
            assert blk.r < -mono.lambda1
        assert np.max(evs.real) == pytest.approx(-mono.lambda1, abs=1e-9)


def test_solve_gamma_worked_example(worked_residual):
    spec = analyze_spectrum(worked_residual)
    mono = solve_gamma(worked_residual, build_generator(spec))
    assert mono.gamma == pytest.approx(GAMMA8, abs=1e-9)
    assert mono.gamma.sum() == pytest.approx(1.0, abs=1e-10)


def test_transformation_matrix_reproduces_gamma(worked_residual):
    spec = analyze_spectrum(worked_residual)
    mono = build_generator(spec)
    W = solve_transformation_matrix(worked_residual, mono)
    out = apply_transformation(worked_residual, W, mono.matrix)
    assert np.real(out.alpha) == pytest.approx(GAMMA8, abs=1e-9)
    assert np.abs(np.imag(out.alpha)).max() < 1e-10


def test_solve_gamma_identity_when_already_monocyclic(worked_residual):
    spec = analyze_spectrum(worked_residual)
    mono = build_generator(spec)
    rep = MERep(GAMMA8, G8)
    W = solve_transformation_matrix(rep, mono)
    assert W == pytest.approx(np.eye(8), abs=1e-8)
    filled = solve_gamma(rep, mono)
    assert filled.gamma == pytest.approx(GAMMA8, abs=1e-9)


def test_solve_gamma_random_real_spectra():
    rng = np.random.default_rng(7)
    for _ in range(10):
        rates = np.sort(rng.uniform(0.5, 6.0, size=3))
        while np.diff(rates).min() < 0.15:
            rates = np.sort(rng.uniform(0.5, 6.0, size=3))
        weights = rng.dirichlet(np.ones(3))
        terms = [(-r, [w * r]) for r, w in zip(rates, weights)]
        rep = rep_from_terms(terms)
        spec = analyze_spectrum(rep)
        mono = solve_gamma(rep, build_generator(spec))
        xs = np.linspace(0.05, 8.0, 40)
        assert pdf_eval_many(mono.to_me_rep(), xs) == pytest.approx(
            pdf_eval_many(rep, xs), rel=1e-8, abs=1e-12
        )


def test_pdf_equivalence_through_generator():
    rng = np.random.default_rng(41)
    for _ in range(6):
        rep = damped_oscillation_rep(rng)
        spec = analyze_spectrum(rep)
        mono = solve_gamma(rep, build_generator(spec))
        xs = np.linspace(0.02, 15.0, 100)
        assert pdf_eval_many(mono.to_me_rep(), xs) == pytest.approx(
            pdf_eval_many(rep, xs), rel=1e-7, abs=1e-12
        )
