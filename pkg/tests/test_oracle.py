import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghr.bound import Status, hankel_determinant, numerator_U, orthogonal_norm, projection_coefficient
from ghr.errors import DegenerateFrame, InvalidSpec, NonHermitian
from ghr.moments import moments_of
from ghr.oracle import (
    QuantumModel,
    RandomModel,
    SpectrumModel,
    build_model,
    cross_validate,
    derivative_frame,
    evolve,
    expansion_numerators,
    expectation_and_variance,
    fisher_information,
    frame_capacity,
    g,
    rel_err,
    run_ensemble,
)

R = 1 / np.sqrt(2)
TWO_POINT = SpectrumModel(((1.0, R), (-1.0, R)))
STATIONARY = SpectrumModel(((2.5, 1.0),))


def rand(seed=42, dim=6):
    return build_model(RandomModel(seed, dim))


# --- models --------------------------------------------------------------------

def test_two_point_model():
    m = build_model(TWO_POINT)
    assert m.dim == 2
    assert m.mean_energy() == pytest.approx(0.0, abs=1e-15)


def test_random_model_deterministic():
    a, b = rand(), rand()
    assert np.array_equal(a.hamiltonian, b.hamiltonian) and np.array_equal(a.state, b.state)
    assert not np.array_equal(a.state, rand(43).state)


def test_random_model_shape_and_invariants():
    m = rand(7, 9)
    assert m.dim == 9
    assert np.allclose(m.hamiltonian, m.hamiltonian.conj().T, atol=1e-12)
    assert np.linalg.norm(m.state) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        m.state[0] = 0


def test_stationary_model_derivatives_vanish():
    m = build_model(STATIONARY)
    frame = derivative_frame(m, 3)
    assert np.allclose(frame.xi_derivs[1:], 0)
    assert frame.vanished_at == 1 and frame.k_valid == []


def test_spectrum_model_normalizes_amplitudes():
    m = build_model(SpectrumModel(((0.0, 3.0), (1.0, 4j))))
    assert np.linalg.norm(m.state) == pytest.approx(1.0)
    assert [p for _, p in m.spectrum().levels] == pytest.approx([9 / 25, 16 / 25])


@pytest.mark.parametrize(
    "spec",
    [SpectrumModel(()), SpectrumModel(((1.0, 0.0), (2.0, 0.0))), RandomModel(1, 1)],
)
def test_invalid_model_specs(spec):
    with pytest.raises(InvalidSpec):
        build_model(spec)


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitian):
        QuantumModel(np.array([[0, 1], [0, 0]], dtype=complex), np.array([1, 0], dtype=complex))
    with pytest.raises(InvalidSpec):
        QuantumModel(np.eye(2), np.array([1.0, 1.0]))


# --- derivative frame ----------------------------------------------------------

def test_two_point_frame():
    frame = derivative_frame(build_model(TWO_POINT), 3)
    assert np.allclose(frame.xi_derivs[3], -frame.xi_derivs[1])
    assert frame.vanished_at == 3 and frame.k_valid == [1]
    assert frame.measured_N[1] == pytest.approx(0.0, abs=1e-15)


def test_measured_variance_and_convention():
    m = rand()
    frame = derivative_frame(m, 5)
    h = m.hamiltonian
    mean = np.real(np.vdot(m.state, h @ m.state))
    second = np.real(np.vdot(m.state, h @ h @ m.state))
    assert frame.measured_mu[2] == pytest.approx(second - mean**2, rel=1e-12)
    # sign convention: g(xi^(3), xi^(1)) = -mu_4
    xs = frame.xi_derivs
    assert g(xs[3], xs[1]) == pytest.approx(-frame.measured_mu[4], rel=1e-12)


@pytest.mark.parametrize("dim", [4, 6, 8, 12])
def test_moment_bridge(dim):
    for seed in range(5):
        m = rand(seed, dim)
        frame = derivative_frame(m, 5)
        spectral = moments_of(m.spectrum(), 10)
        for n in range(0, 11, 2):
            assert rel_err(frame.measured_mu[n], spectral[n]) < 1e-8
        for n in (3, 5):
            assert abs(frame.measured_mu[n] - spectral[n]) < 1e-8 * spectral[n + 1] ** ((n) / (n + 1))


def test_norm_projection_numerator_identities():
    m = rand()
    frame = derivative_frame(m, 5)
    mu = moments_of(m.spectrum(), 10)
    for k in (1, 3, 5):
        i = (k - 1) // 2
        assert rel_err(frame.measured_N[i], orthogonal_norm(mu, k)) < 1e-8
        assert rel_err(frame.measured_N[i], hankel_determinant(mu, k) / hankel_determinant(mu, k - 2)) < 1e-8
        for jj in range(i):
            assert rel_err(frame.projections[i, jj], projection_coefficient(mu, k, 2 * jj + 1)) < 1e-8
    u = expansion_numerators(frame)
    assert u[0] == 1
    assert rel_err(u[1], (mu[4] - 3 * mu[2] ** 2) / mu[2]) < 1e-8
    for k, val in zip((1, 3, 5), u):
        assert rel_err(val, numerator_U(mu, k)) < 1e-8


@given(st.integers(0, 2**31 - 1), st.integers(3, 12))
@settings(max_examples=30, deadline=None)
def test_orthogonality(seed, dim):
    frame = derivative_frame(rand(seed, dim), 5)
    psi = frame.psi[: len(frame.k_valid)]
    for i in range(len(psi)):
        for j in range(i):
            cos = abs(g(psi[i], psi[j])) / (np.linalg.norm(psi[i]) * np.linalg.norm(psi[j]))
            assert cos < 1e-10


def test_coefficients_reconstruct_psi():
    frame = derivative_frame(rand(3, 8), 5)
    odd = frame.xi_derivs[1::2]
    for i in range(3):
        assert np.allclose(frame.coeffs[i, : i + 1] @ odd[: i + 1], frame.psi[i], rtol=0, atol=1e-9 * np.linalg.norm(frame.psi[i]))


def test_expansion_numerators_degenerate():
    frame = derivative_frame(build_model(TWO_POINT), 3)
    assert expansion_numerators(frame) == [1]
    with pytest.raises(DegenerateFrame):
        expansion_numerators(frame, 3)


# --- frame dimension -----------------------------------------------------------

@pytest.mark.parametrize(
    "energies, expected",
    [
        ((1.0, -1.0), 1),
        ((0.0, 1.0), 1),
        ((0.0, 1.0, 3.0), 3),
        ((-1.0, 0.0, 1.0), 1),
        ((0.0, 1.0, 3.0, 7.0), 4),
        ((-2.0, -1.0, 1.0, 2.0), 2),
    ],
)
def test_frame_dimension(energies, expected):
    # Odd derivatives span H~ p(H~**2) xi: one direction per distinct nonzero (E - <H>)**2
    amp = 1 / np.sqrt(len(energies))
    m = build_model(SpectrumModel(tuple((e, amp) for e in energies)))
    frame = derivative_frame(m, 2 * len(energies) + 1)
    assert len(frame.k_valid) == expected == frame_capacity(m)
    assert len(frame.k_valid) <= len(energies)


def test_frame_dimension_random_spectra():
    rng = np.random.default_rng(11)
    for s in (2, 3, 4):
        for _ in range(10):
            energies = rng.integers(-6, 7, size=s).astype(float)
            amps = rng.uniform(0.3, 1.0, size=s)
            m = build_model(SpectrumModel(tuple(zip(energies, amps))))
            frame = derivative_frame(m, 2 * s + 1)
            assert len(frame.k_valid) == frame_capacity(m) <= s


# --- expectation, evolution, Fisher --------------------------------------------

def test_expectation_examples():
    two = build_model(TWO_POINT)
    assert expectation_and_variance(two, np.eye(2)) == pytest.approx((1.0, 0.0))
    assert expectation_and_variance(two, two.hamiltonian) == pytest.approx((0.0, 1.0))
    m = rand()
    _, var = expectation_and_variance(m, m.hamiltonian)
    assert var == pytest.approx(derivative_frame(m, 1).measured_mu[2], rel=1e-12)
    with pytest.raises(NonHermitian):
        expectation_and_variance(m, np.triu(np.ones((6, 6))))


def test_fisher_examples():
    assert fisher_information(build_model(TWO_POINT)) == pytest.approx(4.0)
    assert fisher_information(build_model(STATIONARY)) == 0.0


def test_fisher_constancy():
    m = rand()
    ref = fisher_information(m)
    assert ref == pytest.approx(4 * moments_of(m.spectrum(), 2)[2], rel=1e-10)
    for t in (0.3, 1.7, 40.0):
        assert rel_err(fisher_information(m, t), ref) < 1e-10


def test_evolution_is_unitary_and_periodic():
    m = build_model(TWO_POINT)
    assert np.allclose(evolve(m, 2 * np.pi), m.state)
    assert np.linalg.norm(evolve(rand(), 3.3)) == pytest.approx(1.0, abs=1e-13)


# --- cross validation ----------------------------------------------------------

@pytest.mark.parametrize("dim", [4, 12])
def test_cross_validate_random(dim):
    rep = cross_validate(rand(1, dim), 5, 1e-8)
    assert rep.passed, rep.failures
    assert [t.k for t in rep.terms] == [1, 3, 5]


def test_cross_validate_two_point():
    rep = cross_validate(build_model(TWO_POINT), 3)
    assert rep.frame_vanished_at == 3 and rep.engine_stopped_at == 3
    assert rep.frame_status == rep.engine_status == str(Status.DIVERGENT)
    assert rep.consistent and rep.passed


def test_cross_validate_truncated_model():
    p = np.sqrt(1 / 6)
    m = build_model(SpectrumModel(((-1.0, p), (0.0, np.sqrt(2 / 3)), (1.0, p))))
    rep = cross_validate(m, 5)
    assert rep.frame_status == rep.engine_status == str(Status.TRUNCATED)
    assert rep.passed


def test_cross_validate_stationary():
    rep = cross_validate(build_model(STATIONARY), 3)
    assert rep.variance_zero and rep.passed


def test_cross_validate_exhausted_frame():
    rep = cross_validate(rand(5, 4), 9)
    assert rep.frame_vanished_at == 9 and rep.consistent
    assert rep.passed, rep.failures


def test_run_ensemble_order_and_determinism():
    a = run_ensemble([4, 6], range(3), 5)
    b = run_ensemble([4, 6], range(3), 5)
    assert [(d, s) for d, s, _ in a.runs] == [(4, 0), (4, 1), (4, 2), (6, 0), (6, 1), (6, 2)]
    assert a.worst() == b.worst() and a.passed


def test_report_flags_failures():
    rep = cross_validate(rand(), 5, tolerance=0.0)
    assert not rep.passed and rep.failures
