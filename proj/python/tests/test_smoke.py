import math

import numpy as np
import pytest

import spectrace as st


def test_cosine_series_roundtrip():
    a = st.FourierDamping([1.5, 0.2, 0.1])
    x = np.linspace(0.0, 1.0, 11)
    ref = 1.5 + 0.2 * np.cos(2 * np.pi * x) + 0.1 * np.cos(4 * np.pi * x)
    np.testing.assert_allclose(a(x), ref, rtol=1e-14)
    assert a.mean == 1.5
    assert len(a.resized(5)) == 5
    p = st.FourierDamping.project(lambda t: float(a(t)), 4)
    np.testing.assert_allclose(p.coeffs, [1.5, 0.2, 0.1, 0.0], atol=1e-12)


def test_constant_damping_forward_matches_closed_form():
    num = st.forward_spectrum(lambda x: 1.0, n_cheb=96, k=6)
    ref = st.constant_damping_spectrum(1.0, 6)
    for j in range(1, 7):
        assert abs(num.at(j) - ref.at(j)) < 1e-8 * abs(ref.at(j))
        assert num.at(-j) == pytest.approx(num.at(j).conjugate())
    assert st.estimate_alpha0(num, 6) == pytest.approx(1.0, rel=1e-8)


def test_noise_is_reproducible():
    s = st.constant_damping_spectrum(1.0, 10)
    a = st.add_noise(s, 0.01, seed=4)
    b = st.add_noise(s, 0.01, seed=4)
    assert a.eigs == b.eigs
    assert a.eigs != s.eigs


def test_traces_and_jacobian_shapes():
    a = st.FourierDamping([1.2, 0.1, -0.05])
    t = st.tn_matrix_traces(a, 30, 1.2, 20)
    jac = st.trace_jacobian(a, 30, 1.2, 20)
    assert t.shape == (20,)
    assert jac.shape == (20, 3)
    m = st.mn_traces(st.FourierDamping.constant(1.0), 400, 1)
    assert m[0] == pytest.approx(-1.0 / 6.0, abs=1e-3)


def test_spectral_traces_match_matrix_traces_for_constant_damping():
    s = st.constant_damping_spectrum(1.0, 40)
    r = st.spectral_traces(s, 1.0, 30, 40, 40)
    t = st.tn_matrix_traces(st.FourierDamping.constant(1.0), 40, 1.0, 30)
    np.testing.assert_allclose(r, t, rtol=1e-10)


def test_self_consistent_inversion():
    truth = st.FourierDamping([1.3, 0.2, -0.1])
    target = st.tn_matrix_traces(truth, 40, 1.3, 50)
    cfg = st.GNConfig()
    cfg.m_modes = 3
    cfg.j_trunc = 40
    cfg.n_polys = 50
    cfg.tol = 1e-11
    run = st.gauss_newton(target, 1.3, cfg)
    assert run.converged
    assert run.status == "converged"
    np.testing.assert_allclose(run.final.coeffs, truth.coeffs, atol=1e-8)
    norms = run.residual_norms
    assert all(b <= a for a, b in zip(norms, norms[1:]))
    assert st.l2_error(run.final, lambda x: float(truth(x))) < 1e-14


def test_bad_arguments_raise():
    with pytest.raises(ValueError):
        st.forward_spectrum(lambda x: 1.0, n_cheb=4)
    with pytest.raises(ValueError):
        st.estimate_alpha0(st.constant_damping_spectrum(1.0, 3), 1)
    cfg = st.GNConfig()
    cfg.n_polys = 10
    cfg.j_trunc = 10
    with pytest.raises(ValueError):
        st.gauss_newton([0.0] * 5, 1.0, cfg)


def test_example_profiles():
    alpha = st.example_damping("ex3")
    assert alpha(0.5) == 3.0
    assert alpha(0.1) == 2.0
    assert math.isclose(st.example_damping("ex1")(0.5), 0.25)
