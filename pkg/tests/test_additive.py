"""Additive convolution: subordination solves, densities, moment pipelines."""

import numpy as np
import pytest

from freesub import (
    bernoulli_pm1,
    cauchy_transform,
    convolve_cauchy,
    convolve_moments,
    free_add_convolve,
    atomic,
    semicircle,
    subordination_pair,
)
from freesub.additive import free_cumulants, free_cumulants_to_moments
from freesub.errors import NoConvergence


def test_bernoulli_pair_closed_form():
    # for mu = nu = (d_{-1}+d_1)/2 the fixed point solves w^2 - z w + 1 = 0,
    # so omega1(2i) = i (1 + sqrt 2)
    res = subordination_pair(bernoulli_pm1(), bernoulli_pm1(), 2j)
    assert abs(res.omega1 - 1j * (1 + np.sqrt(2))) <= 1e-12
    assert res.omega1 == res.omega2
    assert res.residual <= 1e-12
    # G of the arcsine limit: 1/sqrt(z^2-4)
    assert abs(res.g_conv - 1 / np.sqrt((2j) ** 2 - 4)) <= 1e-12


def test_point_mass_shift():
    # convolving with d_a translates: omega1(z) = z - a, G(z) = G_mu(z - a)
    mu = semicircle(0, 1)
    for a in (-1.5, 0.25, 3.0):
        for z in (0.3 + 0.7j, -2 + 0.05j, 5j):
            res = subordination_pair(mu, atomic([(a, 1.0)]), z)
            assert abs(res.omega1 - (z - a)) <= 1e-10
            assert abs(res.g_conv - cauchy_transform(mu, z - a)) <= 1e-10


def test_semicircle_stability():
    # sc(0,1) (+) sc(0,1) = sc(0,2); variances add
    mu = semicircle(0, 1)
    target = semicircle(0, 2)
    z = np.array([0.1 + 0.4j, 1.9 + 0.02j, -0.7 + 1j, 3 + 2j])
    got = convolve_cauchy(mu, mu, z)
    want = cauchy_transform(target, z)
    # target G carries the 2048-node grid error of the stored measure
    assert np.max(np.abs(got - want)) <= 5e-6


def test_exchange_symmetry(line_pairs):
    z = 0.37 + 0.21j
    for mu, nu in line_pairs:
        r1 = subordination_pair(mu, nu, z)
        r2 = subordination_pair(nu, mu, z)
        assert abs(r1.g_conv - r2.g_conv) <= 1e-10
        assert abs(r1.omega1 - r2.omega2) <= 1e-9
        assert abs(r1.omega2 - r2.omega1) <= 1e-9


def test_convolve_cauchy_matches_pointwise():
    mu, nu = semicircle(0, 1), bernoulli_pm1()
    z = np.array([0.5 + 0.3j, -1 + 0.1j, 2j, 1.5 + 0.05j])
    vec = convolve_cauchy(mu, nu, z)
    for i, zi in enumerate(z):
        assert abs(vec[i] - subordination_pair(mu, nu, complex(zi)).g_conv) <= 1e-12
    assert isinstance(convolve_cauchy(mu, nu, 1j), complex)


def test_herglotz_margins_on_sweep(line_pairs):
    zs = [0.05j, 1 + 0.02j, -2.5 + 0.3j, 0.8 + 2j]
    for mu, nu in line_pairs:
        for z in zs:
            res = subordination_pair(mu, nu, z)
            assert res.omega1.imag >= z.imag - 1e-10
            assert res.omega2.imag >= z.imag - 1e-10
            assert res.g_conv.imag < 0


def test_free_add_convolve_two_atoms():
    # d_1 (+) d_2 = d_3, reconstructed as a bump of mass ~1 near 3
    grid = np.linspace(0, 6, 1201)
    out = free_add_convolve(atomic([(1.0, 1.0)]), atomic([(2.0, 1.0)]), grid)
    t = out.grid.points()
    w = out.grid.trapezoid_weights()
    near = np.abs(t - 3) <= 0.75
    assert np.sum((out.density * w)[near]) >= 0.95
    assert abs(t[np.argmax(out.density)] - 3) <= 0.05


def test_free_add_convolve_semicircles():
    grid = np.linspace(-3.4, 3.4, 1201)
    out = free_add_convolve(semicircle(0, 1), semicircle(0, 1), grid,
                            eta_sequence=(4e-4, 2e-4, 1e-4))
    t = out.grid.points()
    target = np.sqrt(np.clip(8 - t * t, 0, None)) / (4 * np.pi)
    inner = np.abs(t) <= 2.6
    assert np.max(np.abs(out.density - target)[inner]) <= 5e-4


def test_convolve_moments_semicircle_bernoulli():
    # kappa(sc) = (0,1,0,0), kappa(bern) = (0,1,0,-1): m = (0,2,0,7)
    got = convolve_moments(semicircle(0, 1), bernoulli_pm1(), 4)
    # textbook values, limited by the gridded semicircle's own moments
    assert np.max(np.abs(np.array(got) - [0, 2, 0, 7])) <= 5e-4
    # the combinatorial pipeline agrees with itself to solver precision
    mu, nu = semicircle(0, 1), bernoulli_pm1()
    km = free_cumulants([1.0] + [mu.moment(k) for k in range(1, 5)], 4)
    kn = free_cumulants([1.0] + [nu.moment(k) for k in range(1, 5)], 4)
    want = free_cumulants_to_moments(np.add(km, kn))
    assert np.max(np.abs(np.array(got) - want)) <= 1e-9


def test_cumulant_additivity_on_pairs(line_pairs):
    order = 6
    for mu, nu in line_pairs:
        mc = convolve_moments(mu, nu, order)
        kc = free_cumulants([1.0] + list(mc), order)
        km = free_cumulants([1.0] + [mu.moment(k) for k in range(1, order + 1)], order)
        kn = free_cumulants([1.0] + [nu.moment(k) for k in range(1, order + 1)], order)
        # additivity against the factors' own grid moments is solver-exact
        assert np.max(np.abs(np.array(kc) - np.add(km, kn))) <= 1e-8


def test_rejects_bad_arguments():
    mu = semicircle(0, 1)
    with pytest.raises(ValueError):
        subordination_pair(mu, mu, 1.0 - 0.5j)
    with pytest.raises(ValueError):
        subordination_pair(mu, mu, 2j, tol=1e-16)
    with pytest.raises(ValueError):
        convolve_cauchy(mu, mu, np.array([1j, 1 - 1j]))


def test_no_convergence_reports_residual():
    mu, nu = bernoulli_pm1(), bernoulli_pm1()
    with pytest.raises(NoConvergence) as info:
        subordination_pair(mu, nu, 0.5 + 1e-6j, max_iter=2)
    assert info.value.residual > 0
    assert info.value.iterations == 2
