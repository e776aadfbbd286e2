import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamortho.beams import make_beam
from beamortho.gram import (
    C0,
    build_gram,
    density_condition,
    density_lhs,
    gershgorin_certificate,
    gram_entry,
    load_matrix,
    overlap_modulus,
    save_matrix,
    strip_riemann_sum,
    strip_sum_bound,
    theoretical_r,
)
from beamortho.linalg import deleted_row_sums
from beamortho.quad import build_grid, inner_product
from beamortho.sphere import PoleSet, canonical_frame, generate_poles
from conftest import random_beam, random_frame


@pytest.mark.parametrize("k", [1, 4, 8, 25])
def test_gram_entry_matches_quadrature(k, rng):
    g = build_grid(2 * k)
    for _ in range(10):
        b1, b2 = random_beam(k, rng), random_beam(k, rng)
        assert abs(gram_entry(b1, b2) - inner_product(b1, b2, g)) < 1e-13


def test_gram_entry_closed_form(rng):
    # <q1, q2> = ((v1 . conj(v2)) / 2)^k with v = a + i b
    k = 11
    b1, b2 = random_beam(k, rng), random_beam(k, rng)
    v1 = b1.frame.a + 1j * b1.frame.b
    v2 = b2.frame.a + 1j * b2.frame.b
    assert gram_entry(b1, b2) == pytest.approx((v1 @ v2.conj() / 2) ** k, abs=1e-15)


def test_gram_entry_special_configurations():
    k = 6
    f = canonical_frame([0, 0, 1.0])
    q = make_beam(k, f)
    assert gram_entry(q, q) == pytest.approx(1.0)
    # same pole, frame turned by alpha: phase exp(-ik alpha)
    alpha = 0.4
    assert gram_entry(q, q.phase_shifted(alpha)) == pytest.approx(np.exp(-1j * k * alpha))
    anti = make_beam(k, canonical_frame([0, 0, -1.0]))
    assert gram_entry(q, anti) == 0
    with pytest.raises(ValueError):
        gram_entry(q, make_beam(k + 1, f))


@given(st.floats(0.0, math.pi))
@settings(deadline=None)
def test_gram_modulus_is_cos_power(beta):
    k = 15
    p2 = [math.sin(beta), 0.0, math.cos(beta)]
    q1 = make_beam(k, canonical_frame([0, 0, 1.0]))
    q2 = make_beam(k, canonical_frame(p2))
    assert abs(gram_entry(q1, q2)) == pytest.approx(math.cos(beta / 2) ** (2 * k), rel=1e-13, abs=1e-300)


def test_overlap_modulus_edges():
    assert overlap_modulus(0.0, 10) == 1.0
    assert overlap_modulus(math.pi, 10) == 0.0
    assert overlap_modulus(math.pi, 0) == 1.0
    assert overlap_modulus(0.3, 5000) == pytest.approx(math.cos(0.15) ** 10000, rel=1e-12)


def test_gram_phase_shift_rule(rng):
    k = 9
    b1, b2 = random_beam(k, rng), random_beam(k, rng)
    a1, a2 = 0.3, -1.1
    lhs = gram_entry(b1.phase_shifted(a1), b2.phase_shifted(a2))
    assert lhs == pytest.approx(np.exp(1j * k * (a1 - a2)) * gram_entry(b1, b2), abs=1e-14)


def test_build_gram_is_hermitian_unit_diagonal():
    ps = generate_poles(12, 1)
    G = build_gram([make_beam(20, f) for f in ps.frames()])
    assert np.allclose(G.E, G.E.conj().T)
    assert np.allclose(np.diag(G.E), 1)
    assert G.r_emp == pytest.approx(deleted_row_sums(G.E).max())
    with pytest.raises(ValueError):
        build_gram([])


def test_gershgorin_certificate():
    ps = generate_poles(12, 1)
    rep = gershgorin_certificate(build_gram([make_beam(200, f) for f in ps.frames()]))
    assert rep.dominant and rep.eig_check
    lo, hi = rep.interval
    assert lo <= rep.eigenvalues.min() and rep.eigenvalues.max() <= hi
    bad = gershgorin_certificate(np.array([[1, 0.9, 0.9], [0.9, 1, 0.9], [0.9, 0.9, 1]]))
    assert not bad.dominant and bad.eig_check


def test_density_constants():
    assert C0 == pytest.approx(math.exp(1 / 72))
    assert 0.0390 <= density_lhs(1 / 400) <= 0.0400
    assert density_condition(1 / 400)
    assert not density_condition(0.5)
    with pytest.raises(ValueError):
        density_condition(0)


def test_theoretical_r_groups():
    r = theoretical_r(1 / 400, 400)
    assert 0.0390 <= r.groupI + r.groupII <= 0.0400
    assert r.groupIII > 1 and not r.admissible
    r = theoretical_r(1 / 400, 4000)
    assert r.groupIII < 1e-10 and r.admissible
    assert r.r_theory == pytest.approx(r.groupI + r.groupII + r.groupIII)
    with pytest.raises(ValueError):
        theoretical_r(0.5, 0)


@pytest.mark.parametrize("m,k", [(10, 100), (30, 400), (60, 1000)])
def test_strip_bound_dominates_row_sums(m, k):
    ps = generate_poles(m, 0)
    G = build_gram([make_beam(k, f) for f in ps.frames()])
    for i in range(m):
        sb = strip_sum_bound(ps, i, k)
        if sb.caps_hold:
            assert G.row_sums[i] <= sb.bound * (1 + 1e-12) + 1e-300


def test_strip_bound_needs_two_poles():
    with pytest.raises(ValueError):
        strip_sum_bound(PoleSet.from_points([[0, 0, 1.0]]), 0, 5)


@pytest.mark.parametrize("k", [10, 100, 1000])
def test_strip_riemann_sum_approaches_integral(k):
    delta = math.pi / 4000
    assert strip_riemann_sum(delta, k) == pytest.approx(2 / (k + 1), rel=0.05)


def test_matrix_file_roundtrip(tmp_path, rng):
    A = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    save_matrix(A, tmp_path / "A.txt")
    assert np.array_equal(load_matrix(tmp_path / "A.txt"), A)
    assert (tmp_path / "A.txt").read_text().startswith("# rows=3 cols=4")
