import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kakeya.cantor import middle_spec
from kakeya.trees import (
    FiniteTree,
    build_psi,
    count_level_vertices,
    cube_center,
    cube_from_axis_indices,
    decode_cube,
    encode_cube,
    height,
    is_sticky,
    leaf_from_index,
    phi_map,
    yca,
    yca_all,
)

F = Fraction

vertices = st.lists(st.integers(0, 2), max_size=8).map(tuple)


def test_yca_shared_first_digit():
    assert yca((0, 1), (0, 2)) == (0,)


def test_yca_distinct_first_digit_is_root():
    assert yca((1, 0), (2, 0)) == ()


def test_yca_ancestor_returns_ancestor():
    assert yca((0,), (0, 1, 2)) == (0,)
    assert yca((0, 1, 2), (0,)) == (0,)


@given(vertices, vertices)
def test_yca_symmetric_and_bounded(u, v):
    assert yca(u, v) == yca(v, u)
    assert height(yca(u, v)) <= min(height(u), height(v))
    assert yca(u, u) == u


@given(vertices, vertices, vertices)
def test_yca_all_matches_pairwise_min(u, v, w):
    d = yca_all([u, v, w])
    assert height(d) == min(
        height(yca(u, v)), height(yca(u, w)), height(yca(v, w))
    )


def test_encode_cube_base3():
    assert encode_cube([F(2, 9)], 2, 3, 1) == (0, 2)


def test_encode_cube_d2_lexicographic():
    # (1/3, 0) at level 1: per-axis digits (1, 0) pack to rank 3
    assert encode_cube([F(1, 3), F(0)], 1, 3, 2) == (3,)


def test_encode_decode_roundtrip_random():
    rng = random.Random(0)
    for _ in range(10_000):
        d = rng.choice([1, 2])
        x = [F(rng.randrange(10**6), 10**6) for _ in range(d)]
        k = rng.randrange(1, 5)
        v = encode_cube(x, k, 3, d)
        corner, side = decode_cube(v, 3, d)
        assert all(c <= xi < c + side for c, xi in zip(corner, x))


def test_cube_from_axis_indices_matches_encode():
    rng = random.Random(1)
    for _ in range(500):
        d, k, M = rng.choice([1, 2]), rng.randrange(1, 4), 3
        idx = [rng.randrange(M**k) for _ in range(d)]
        v = cube_from_axis_indices(idx, k, M, d)
        corner, side = decode_cube(v, M, d)
        assert corner == tuple(F(i, M**k) for i in idx)
        assert encode_cube(corner, k, M, d) == v


def test_psi_middle_thirds():
    psi = build_psi(middle_spec(3, 2))
    assert psi.forward((0, 2)) == (0, 1)
    assert psi.forward(()) == ()
    assert psi.backward((0, 1)) == (0, 2)


def test_psi_roundtrip_depth10():
    spec = middle_spec(3, 10)
    psi = build_psi(spec)
    seen = set()
    for i in range(1 << 10):
        bits = tuple((i >> (9 - j)) & 1 for j in range(10))
        v = psi.backward(bits)
        assert psi.forward(v) == bits
        seen.add(v)
    assert len(seen) == 1 << 10


def test_psi_is_sticky_both_ways():
    spec = middle_spec(3, 6)
    psi = build_psi(spec)
    rng = random.Random(2)
    cantor_vs = []
    for _ in range(80):
        bits = tuple(rng.randrange(2) for _ in range(rng.randrange(7)))
        cantor_vs.append(psi.backward(bits))
    assert is_sticky(psi.forward, cantor_vs)
    assert is_sticky(psi.backward, [psi.forward(v) for v in cantor_vs])


def test_non_sticky_map_fails_audit():
    flip = lambda v: tuple(reversed(v))
    assert not is_sticky(flip, [(0, 1), (0, 2), (1, 0)])


def test_phi_left_endpoint():
    assert phi_map(middle_spec(3, 2), (2,)) == F(2, 3)


def test_phi_consistent_with_representatives():
    spec = middle_spec(3, 4)
    from kakeya.cantor import representatives

    for iv in representatives(spec):
        assert phi_map(spec, iv.digits) == iv.left


def test_phi_containment_sweep():
    spec = middle_spec(3, 8)
    psi = build_psi(spec)
    for k in range(0, 9):
        for i in range(1 << k):
            bits = tuple((i >> (k - 1 - j)) & 1 for j in range(k))
            v = psi.backward(bits)
            x = phi_map(spec, v)
            lo = sum(F(dig, 3**j) for j, dig in enumerate(v, start=1))
            assert lo <= x < lo + F(1, 3**k)


def test_phi_rejects_unselected():
    with pytest.raises(KeyError):
        phi_map(middle_spec(3, 2), (1,))


def test_count_level_vertices_parameter_tree():
    spec = middle_spec(3, 6)
    from kakeya.cantor import representative_points

    pts = [[p] for p in representative_points(spec)]
    for k in range(0, 7):
        assert count_level_vertices(pts, k, 3, 1) == 2**k
    assert count_level_vertices(pts, 0, 3, 1) == 1


def test_count_level_vertices_affine_copies():
    # pullbacks of the direction set stay within C * 2^k cubes per level
    from kakeya.cantor import affine_curve, direction_set

    ds = direction_set(middle_spec(3, 6), affine_curve(1))
    slopes = [float(s[1]) for s in ds.slopes]
    rng = random.Random(3)
    worst = 0.0
    for _ in range(100):
        x1 = rng.uniform(2.0, 3.0)
        x2 = rng.uniform(-4.0, 4.0)
        pts = [[x2 - x1 * v] for v in slopes if 0 <= x2 - x1 * v < 1]
        if not pts:
            continue
        for k in range(1, 7):
            c = count_level_vertices(pts, k, 3, 1) / 2**k
            worst = max(worst, c)
    assert 0 < worst <= 4.0  # fitted constant stays small


def test_finite_tree_structure():
    tree = FiniteTree.from_leaves([(0, 1), (0, 2), (1, 0)])
    assert tree.is_prefix_closed()
    assert tree.level_counts() == [1, 2, 3]
    assert tree.leaves() == [(0, 1), (0, 2), (1, 0)]
    assert tree.edges() == [(0,), (0, 1), (0, 2), (1,), (1, 0)]


def test_full_tree_counts():
    tree = FiniteTree.full(3, 3)
    assert tree.level_counts() == [1, 3, 9, 27]
    assert len(tree.leaves()) == 27


def test_leaf_from_index_lexicographic():
    leaves = [leaf_from_index(i, 3, 2) for i in range(9)]
    assert leaves == sorted(leaves)
    assert leaves[5] == (1, 2)


def test_cube_center():
    assert cube_center((0, 2), 3, 1) == (F(5, 18),)
