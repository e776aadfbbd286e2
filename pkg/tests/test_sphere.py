import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamortho.sphere import (
    PoleSet,
    angle,
    angles_from,
    build_delta,
    build_poles,
    canonical_frame,
    check_separation,
    density_count,
    fibonacci_lattice,
    generate_poles,
    load_poles,
    min_separation,
    save_poles,
    strip_counts,
)

unit_vectors = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3).map(
    lambda v: np.array(v) / np.linalg.norm(v)
)


def test_angle_is_accurate_near_zero_and_pi():
    e = 1e-9
    x = np.array([1.0, 0.0, 0.0])
    y = np.array([math.cos(e), math.sin(e), 0.0])
    assert angle(x, y) == pytest.approx(e, rel=1e-12)
    assert angle(x, -y) == pytest.approx(math.pi - e, rel=1e-15)


def test_angles_from_matches_angle(rng):
    pts = fibonacci_lattice(30)
    a = angles_from(pts[0], pts)
    assert np.allclose(a, [angle(pts[0], p) for p in pts], atol=1e-15)


@given(unit_vectors)
@settings(max_examples=200, deadline=None)
def test_canonical_frame_is_right_handed_orthonormal(p):
    f = canonical_frame(p)
    assert f.orthonormality_error() < 1e-14
    assert np.allclose(f.pole, p, atol=1e-15)


def test_canonical_frame_at_poles():
    n = canonical_frame([0, 0, 1.0])
    assert np.allclose(n.a, [1, 0, 0]) and np.allclose(n.b, [0, 1, 0])
    s = canonical_frame([0, 0, -1.0])
    assert np.allclose(s.a, [1, 0, 0]) and np.allclose(s.b, [0, -1, 0])
    assert s.orthonormality_error() < 1e-15


def test_canonical_frame_is_continuous_near_south_pole():
    e = 1e-8
    f = canonical_frame([math.sin(e), 0.0, -math.cos(e)])
    assert f.orthonormality_error() < 1e-14


def test_canonical_frame_rejects_non_unit():
    with pytest.raises(ValueError):
        canonical_frame([0, 0, 2.0])


@given(unit_vectors, st.floats(-10, 10))
@settings(max_examples=50, deadline=None)
def test_rotated_frame_keeps_pole(p, alpha):
    f = canonical_frame(p).rotated(alpha)
    assert f.orthonormality_error() < 1e-13
    assert np.allclose(f.pole, p)


def test_min_separation_degenerate():
    assert min_separation(np.zeros((0, 3))) == math.inf
    assert min_separation([[0, 0, 1.0]]) == math.inf
    assert min_separation([[0, 0, 1.0], [0, 0, -1.0]]) == pytest.approx(math.pi)


@pytest.mark.parametrize("m", [2, 3, 10, 20, 40, 100])
def test_generated_poles_meet_separation_bounds(m):
    ps = generate_poles(m, seed=0)
    rep = check_separation(ps)
    assert rep.passed, rep
    assert np.allclose(np.linalg.norm(ps.poles, axis=1), 1.0)


def test_generate_poles_is_deterministic():
    a = generate_poles(17, seed=3)
    b = generate_poles(17, seed=3)
    c = generate_poles(17, seed=4)
    assert np.array_equal(a.poles, b.poles)
    assert not np.array_equal(a.poles, c.poles)


def test_single_pole_is_degenerate():
    rep = check_separation(generate_poles(1))
    assert rep.passed and rep.degenerate


def test_density_count():
    assert density_count(1 / 400, 400) == 2
    assert density_count(1 / 400, 2000) == 10
    assert density_count(0.02, 512) == 20
    assert density_count(0.02, 1024) == 40
    # 0.1 * 5 is 0.5 exactly, 0.2 * 5 rounds to just under 1 in binary
    assert density_count(0.2, 2) == 1
    with pytest.raises(ValueError):
        density_count(1.5, 3)


def test_build_poles_records_metadata():
    ps = build_poles(0.02, 256, seed=1)
    assert ps.m == 10 and ps.D == 0.02 and ps.k == 256 and ps.seed == 1
    with pytest.raises(ValueError):
        build_poles(0.001, 10)


@given(st.floats(1e-3, math.pi))
def test_build_delta_bracket(d):
    delta = build_delta(d)
    assert d / 2 <= delta <= d * (1 + 1e-12)
    n = round(math.pi / delta)
    assert math.isclose(n * delta, math.pi, rel_tol=1e-12)


def test_build_delta_exact_divisor():
    assert build_delta(math.pi / 7) == pytest.approx(math.pi / 7)


def test_strip_counts_tally_all_other_poles():
    ps = generate_poles(50, seed=2)
    delta = build_delta(ps.d_min)
    for i in (0, 17, 49):
        part = strip_counts(ps, i, delta)
        assert part.counts.sum() == 49
        # nothing lies closer than d_min, so the first strip of width <= d_min
        # holds only poles at distance exactly in (0, delta]
        ang = np.delete(angles_from(ps.poles[i], ps.poles), i)
        assert part.counts[0] == np.sum(ang <= delta + 1e-12)


def test_strip_counts_antipodal_pair():
    ps = PoleSet.from_points([[0, 0, 1.0], [0, 0, -1.0]])
    part = strip_counts(ps, 0, math.pi / 4)
    assert part.n_strips == 4
    assert list(part.counts) == [0, 0, 0, 1]


def test_pole_file_roundtrip(tmp_path):
    ps = generate_poles(12, seed=5)
    path = tmp_path / "poles.txt"
    save_poles(ps, path)
    back = load_poles(path)
    assert np.array_equal(back.poles, ps.poles)
    assert back.seed == 5 and back.d_min == ps.d_min


def test_pole_file_count_mismatch(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# m=3 seed=None d_min=1\n0 0 1\n0 1 0\n")
    with pytest.raises(ValueError):
        load_poles(path)
