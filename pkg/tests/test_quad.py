import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma, roots_legendre

from beamortho.beams import make_beam, normalization_constant, north_beam
from beamortho.quad import (
    GridTooLarge,
    band_grid,
    build_grid,
    gauss_legendre,
    gram_quadrature,
    inner_product,
    integral_identity_check,
    integrate,
    lp_norm,
    lp_norm_converged,
    lp_norms,
    tube_mass,
)
from beamortho.sphere import canonical_frame
from conftest import random_beam, random_frame


@pytest.mark.parametrize("n", [1, 2, 5, 64])
def test_gauss_legendre_matches_scipy(n):
    x, w = gauss_legendre(n)
    xs, ws = roots_legendre(n)
    assert np.allclose(x, xs, atol=1e-14) and np.allclose(w, ws, rtol=1e-12, atol=1e-15)


def test_gauss_legendre_large_n_against_extended_precision():
    # scipy's end weights drift at this size, so the reference is mpmath
    n = 501
    x, w = gauss_legendre(n)
    assert abs(w.sum() - 2) < 1e-14
    with mpmath.workdps(30):
        P = lambda t: mpmath.legendre(n, t)  # noqa: E731
        for i in (0, 100, 250):
            r = mpmath.findroot(P, x[i])
            wt = 2 / ((1 - r**2) * mpmath.diff(P, r) ** 2)
            assert abs(float(r) - x[i]) < 1e-15
            assert float(abs(wt - w[i]) / wt) < 1e-10


def test_gauss_legendre_arrays_are_read_only():
    x, _ = gauss_legendre(4)
    with pytest.raises(ValueError):
        x[0] = 0.0


@given(st.integers(0, 40))
def test_grid_weights_sum_to_area(N):
    assert build_grid(N).total_weight() == pytest.approx(4 * math.pi, rel=1e-13)


def _monomial_integral(a, b, c):
    # int_S^2 x^a y^b z^c dS, zero unless all exponents are even
    if a % 2 or b % 2 or c % 2:
        return 0.0
    B = [gamma((e + 1) / 2) for e in (a, b, c)]
    return 2 * B[0] * B[1] * B[2] / gamma((a + b + c + 3) / 2)


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
@settings(max_examples=60, deadline=None)
def test_grid_exact_for_monomials(a, b, c):
    N = a + b + c
    f = lambda y: y[:, 0] ** a * y[:, 1] ** b * y[:, 2] ** c  # noqa: E731
    assert integrate(f, build_grid(N)) == pytest.approx(_monomial_integral(a, b, c), abs=1e-13)


def test_rotated_band_grid_covers_sphere():
    fr = random_frame(np.random.default_rng(0))
    f = lambda y: y[:, 0] ** 2 * y[:, 2] ** 4  # noqa: E731
    total = sum(integrate(f, band_grid(t0, t1, 6, fr)) for t0, t1 in [(-1, -0.3), (-0.3, 0.5), (0.5, 1)])
    assert total == pytest.approx(_monomial_integral(2, 0, 4), abs=1e-14)


def test_grid_too_large():
    with pytest.raises(GridTooLarge):
        build_grid(10**6)


def _beam_lp_exact(k, p):
    c = normalization_constant(k)
    return (2 * math.pi * c**p * math.sqrt(math.pi) * gamma((k * p + 2) / 2) / gamma((k * p + 3) / 2)) ** (1 / p)


@pytest.mark.parametrize("p", [1.0, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0])
def test_beam_lp_norm_against_closed_form(p):
    k = 8
    val = lp_norm_converged(north_beam(k), [p], k, rtol=1e-12, max_doublings=4).values[0]
    assert val == pytest.approx(_beam_lp_exact(k, p), rel=1e-10)


def test_even_p_is_exact_on_base_grid():
    k = 10
    res = lp_norm_converged(north_beam(k), [4.0], k)
    assert len(res.degrees) == 1 and res.converged
    assert res.values[0] == pytest.approx(_beam_lp_exact(k, 4), rel=1e-13)


def test_sup_norm_is_c_k():
    k = 50
    val = lp_norm(north_beam(k), math.inf, build_grid(2 * k))
    assert val == pytest.approx(normalization_constant(k), rel=1e-12)


def test_lp_norms_multi_column_matches_single(rng):
    k = 12
    beams = [random_beam(k, rng) for _ in range(3)]
    f = lambda y: np.column_stack([b(y) for b in beams])  # noqa: E731
    f.n_funcs = 3
    g = build_grid(4 * k + 8)
    table = lp_norms(f, [2.0, 4.0], g)
    assert table.shape == (2, 3)
    for j, b in enumerate(beams):
        assert table[1, j] == pytest.approx(lp_norm(b, 4.0, g), rel=1e-13)
    assert np.allclose(table[0], 1.0, atol=1e-12)


def test_lp_norms_rejects_p_below_one():
    with pytest.raises(ValueError):
        lp_norms(north_beam(2), [0.5], build_grid(4))


def test_inner_product_and_gram_quadrature(rng):
    k = 6
    beams = [random_beam(k, rng) for _ in range(4)]
    g = build_grid(2 * k)
    f = lambda y: np.column_stack([b(y) for b in beams])  # noqa: E731
    f.n_funcs = 4
    G = gram_quadrature(f, g)
    assert np.allclose(np.diag(G), 1.0, atol=1e-13)
    assert G[0, 1] == pytest.approx(inner_product(beams[0], beams[1], g), abs=1e-14)
    assert np.allclose(G, G.conj().T, atol=1e-14)


@pytest.mark.parametrize("k", [0, 1, 2, 9, 99, 200, 1000])
def test_integral_identity(k):
    assert integral_identity_check(k) == pytest.approx(2 / (k + 1), abs=1e-12)


def test_integral_identity_rejects_negative():
    with pytest.raises(ValueError):
        integral_identity_check(-1)


def test_tube_mass_whole_sphere():
    k = 20
    tm = tube_mass(north_beam(k), canonical_frame([0, 0, 1.0]), math.pi / 2, build_grid(2 * k))
    assert tm.inside == pytest.approx(1.0, abs=1e-12) and abs(tm.outside) < 1e-14
    assert not tm.under_resolved


def test_tube_mass_exact_band_value():
    # |Q_k|^2 integrates to 1 - ((1 - s^2)^{k+1/2}-type tail); compare with
    # a 1-d Gauss-Legendre integral of c^2 (1 - t^2)^k over |t| <= sin w
    k, w = 30, 0.2
    q = north_beam(k)
    tm = tube_mass(q, q.frame, w, build_grid(2 * k))
    x, wt = gauss_legendre(200)
    s = math.sin(w)
    inside = 2 * math.pi * normalization_constant(k) ** 2 * s * np.sum(wt * (1 - (s * x) ** 2) ** k)
    assert tm.inside == pytest.approx(inside, rel=1e-13)
    assert tm.inside + tm.outside == pytest.approx(1.0, abs=1e-13)


def test_tube_mass_flags_coarse_grid():
    q = north_beam(20)
    assert tube_mass(lambda y: q(y), q.frame, 0.3, build_grid(10)).under_resolved is False
    fn = lambda y: q(y)  # noqa: E731
    fn.degree = 20
    assert tube_mass(fn, q.frame, 0.3, build_grid(10)).under_resolved


def test_tube_mass_rejects_bad_width():
    with pytest.raises(ValueError):
        tube_mass(north_beam(2), canonical_frame([0, 0, 1.0]), 2.0, build_grid(4))


def test_rotated_tube_mass_matches_north(rng):
    k, w = 40, 0.15
    b = make_beam(k, random_frame(rng))
    g = build_grid(2 * k)
    q = north_beam(k)
    assert tube_mass(b, b.frame, w, g).inside == pytest.approx(tube_mass(q, q.frame, w, g).inside, rel=1e-12)
