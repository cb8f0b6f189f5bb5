import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import forests, plane_trees, root_subtrees
from percolimit.codec import (LatticePath, concat_paths, contour_fn,
                              decode_lukaciewicz, glue_backbone_path,
                              height_fn, height_from_lukaciewicz, lukaciewicz,
                              read_path_csv, rescale, stopped_path_distance,
                              trim_final_step, write_path_csv)
from percolimit.errors import DecodeError, InvalidInputError
from percolimit.trees import (PlaneTree, SinLevel, SinTree, right_graft,
                              truncate)

SINGLE = PlaneTree([0])
EDGE = PlaneTree([1, 0])
CHERRY = PlaneTree([2, 0, 0])
PATH2 = PlaneTree([1, 1, 0])


def path_of(*vals):
    return LatticePath(np.array(vals, dtype=np.float64))


# --- LatticePath basics -----------------------------------------------------

def test_path_interpolates_and_clamps():
    p = path_of(0, 2, 1)
    assert p(0.5) == pytest.approx(1.0)
    assert p(1.5) == pytest.approx(1.5)
    assert p(-3) == 0.0
    assert p(99) == 1.0


def test_path_lifetime():
    assert path_of(0, 1, 0).lifetime == 2.0
    assert LatticePath([0.0, 4.0], time_scale=4.0).lifetime == pytest.approx(0.25)


def test_path_rejects_garbage():
    with pytest.raises(InvalidInputError):
        LatticePath([])
    with pytest.raises(InvalidInputError):
        LatticePath([0.0, np.nan])
    with pytest.raises(InvalidInputError):
        LatticePath([0.0], time_scale=0.0)


# --- lukaciewicz / decode ---------------------------------------------------

def test_lukaciewicz_single_vertex():
    assert list(lukaciewicz(SINGLE).values) == [0, -1]


def test_lukaciewicz_cherry():
    assert list(lukaciewicz(CHERRY).values) == [0, 1, 0, -1]


def test_lukaciewicz_path_of_two():
    assert list(lukaciewicz(PATH2).values) == [0, 0, 0, -1]


@given(plane_trees())
def test_lukaciewicz_shape_invariants(tree):
    v = lukaciewicz(tree).values
    assert v[0] == 0 and v[-1] == -1
    steps = np.diff(v)
    assert steps.min() >= -1
    assert steps.max() <= tree.child_counts.max() - 1
    if v.size > 2:
        assert v[1:-1].min() >= 0


def test_decode_single_vertex():
    assert decode_lukaciewicz(path_of(0, -1)) == SINGLE


def test_decode_cherry():
    assert decode_lukaciewicz(path_of(0, 1, 0, -1)) == CHERRY


@given(plane_trees(max_vertices=120))
def test_decode_inverts_encode(tree):
    assert decode_lukaciewicz(lukaciewicz(tree)) == tree


def test_decode_rejects_early_termination():
    with pytest.raises(DecodeError) as info:
        decode_lukaciewicz(path_of(0, 0, -1, -1))
    assert info.value.index == 2


def test_decode_rejects_non_integer():
    with pytest.raises(DecodeError) as info:
        decode_lukaciewicz(path_of(0, 0.5, -1))
    assert info.value.index == 1


def test_decode_rejects_steep_drop():
    with pytest.raises(DecodeError) as info:
        decode_lukaciewicz(path_of(0, 1, -1))
    assert info.value.index == 2


def test_decode_rejects_wrong_end():
    with pytest.raises(DecodeError):
        decode_lukaciewicz(path_of(0, 1, 0))


# --- heights ----------------------------------------------------------------

def test_height_cherry():
    assert list(height_fn(CHERRY).values) == [0, 1, 1]


def test_height_path_of_two():
    assert list(height_fn(PATH2).values) == [0, 1, 2]


def test_height_from_lukaciewicz_examples():
    assert list(height_from_lukaciewicz(path_of(0, 1, 0, -1)).values) == [0, 1, 1]
    assert list(height_from_lukaciewicz(path_of(0, 0, 0, -1)).values) == [0, 1, 2]
    assert list(height_from_lukaciewicz(path_of(0, -1)).values) == [0]


@given(plane_trees(max_vertices=120))
def test_height_agrees_with_min_count_formula(tree):
    direct = height_fn(tree).values
    via_v = height_from_lukaciewicz(lukaciewicz(tree)).values
    assert np.array_equal(direct, via_v)


@given(plane_trees())
def test_height_never_jumps_up_by_more_than_one(tree):
    h = height_fn(tree).values
    assert np.all(np.diff(h) <= 1)


def test_height_accepts_unterminated_prefix():
    # prefix of a sin-tree encoding stays >= 0 and has no terminal step
    h = height_from_lukaciewicz(path_of(0, 2, 1, 0, 0))
    assert list(h.values) == [0, 1, 1, 1, 2]


def test_height_rejects_negative_unterminated():
    with pytest.raises(DecodeError):
        height_from_lukaciewicz(path_of(0, 1, 0, -1, 0))


# --- contour ----------------------------------------------------------------

def test_contour_single_edge():
    assert list(contour_fn(EDGE).values) == [0, 1, 0]


def test_contour_cherry():
    assert list(contour_fn(CHERRY).values) == [0, 1, 0, 1, 0]


def test_contour_path_of_two():
    assert list(contour_fn(PATH2).values) == [0, 1, 2, 1, 0]


def test_contour_single_vertex():
    assert list(contour_fn(SINGLE).values) == [0]


@given(plane_trees())
def test_contour_shape_invariants(tree):
    c = contour_fn(tree).values
    assert c.size == max(2 * tree.n_vertices - 1, 1)
    assert c[0] == 0 and c[-1] == 0
    if c.size > 1:
        assert set(np.unique(np.abs(np.diff(c)))) == {1.0}
    assert contour_fn(tree).lifetime == 2 * (tree.n_vertices - 1)


@given(plane_trees())
def test_contour_visits_each_vertex_depth(tree):
    # local maxima counted with multiplicity enumerate the leaves; the
    # multiset of contour values at first-visit times equals the height
    # sequence (first visits are the strict up-steps plus the start)
    c = contour_fn(tree).values
    h = height_fn(tree).values
    if c.size == 1:
        assert list(h) == [0]
        return
    first_visits = np.concatenate([[0.0], c[1:][np.diff(c) > 0]])
    assert sorted(first_visits) == sorted(h)


# --- concat / trim / graft identity ----------------------------------------

def test_concat_with_point_path_is_identity():
    p = path_of(0, 1, 0, -1)
    q = concat_paths(p, path_of(0))
    assert np.array_equal(q.values, p.values)


def test_concat_example():
    got = concat_paths(path_of(0, 0), path_of(0, 1, 0, -1))
    assert list(got.values) == [0, 0, 1, 0, -1]


def test_concat_requires_zero_start():
    with pytest.raises(InvalidInputError):
        concat_paths(path_of(0, 0), path_of(1, 0))


def test_concat_requires_matching_scales():
    with pytest.raises(InvalidInputError):
        concat_paths(path_of(0, 0), LatticePath([0.0, 1.0], time_scale=2.0))


def test_trim_drops_terminal_step():
    assert list(trim_final_step(path_of(0, 1, 0, -1)).values) == [0, 1, 0]
    with pytest.raises(InvalidInputError):
        trim_final_step(path_of(0))


@given(plane_trees(max_vertices=30), plane_trees(max_vertices=30))
def test_graft_lukaciewicz_identity(t, s):
    # encoding a right-graft = trimmed encoding of t, then encoding of s
    direct = lukaciewicz(right_graft(t, s))
    pieced = concat_paths(trim_final_step(lukaciewicz(t)), lukaciewicz(s))
    assert np.array_equal(direct.values, pieced.values)


def _min_at_end_walk(rng, n):
    steps = rng.integers(-1, 2, size=n)
    w = np.concatenate([[0], np.cumsum(steps)]).astype(np.float64)
    w = np.append(w, w.min() - 1)  # force the minimum to sit at the end
    return w


def test_concat_commutes_with_reflection_at_minimum(rng):
    # concatenating paths that attain their minima at their ends, the
    # "subtract the running minimum" transform factors through concatenation
    for _ in range(25):
        parts = [_min_at_end_walk(rng, int(rng.integers(1, 12))) for _ in range(3)]
        lhs = path_of(0)
        for w in parts:
            refl = w - np.minimum.accumulate(w)
            lhs = concat_paths(lhs, LatticePath(refl))
        full = path_of(0)
        for w in parts:
            full = concat_paths(full, LatticePath(w))
        rhs = full.values - np.minimum.accumulate(full.values)
        assert np.array_equal(lhs.values, rhs)


# --- glue -------------------------------------------------------------------

def test_glue_two_singletons():
    assert list(glue_backbone_path(path_of(0, -1, -2)).values) == [0, 0, 0]


def test_glue_cherry_then_singleton():
    assert list(glue_backbone_path(path_of(0, 1, 0, -1, -2)).values) == [0, 2, 1, 0, 0]


@given(forests())
@settings(max_examples=60)
def test_glue_matches_direct_encoding(forest):
    # forest path: concatenated Lukaciewicz paths, drifting one lower per tree
    u = path_of(0)
    for tree in forest:
        u = concat_paths(u, lukaciewicz(tree))
    glued = glue_backbone_path(u)
    assert glued.values.min() >= 0

    # the sin-tree of the gluing: tree i's root becomes backbone vertex i
    levels = [SinLevel(left=tuple(root_subtrees(t))) for t in forest]
    sin = SinTree(levels, backbone_rightmost=True)
    trunc = truncate(sin, len(forest))
    direct = lukaciewicz(trunc)
    assert np.array_equal(glued.values, direct.values[:-1])


def test_glue_rejects_steep_drop():
    with pytest.raises(DecodeError):
        glue_backbone_path(path_of(0, -2))


# --- stopped-path distance --------------------------------------------------

def test_distance_to_self_is_zero():
    p = path_of(0, 2, 1, -1)
    assert stopped_path_distance(p, p) == 0.0


def test_distance_lifetime_gap():
    f = path_of(0, 0)          # zero on [0, 1]
    g = path_of(0, 0, 0)       # zero on [0, 2]
    assert stopped_path_distance(f, g) == 1.0


def test_distance_sees_off_grid_gap():
    # f is flat; g has a tent peak at t = 0.5, between f's grid points
    f = path_of(0, 0, 0)
    g = LatticePath(np.array([0.0, 1.0, 0.0, 0.0, 0.0]), time_scale=2.0)
    assert stopped_path_distance(f, g) == pytest.approx(1.0)


@st.composite
def _random_paths(draw):
    vals = draw(st.lists(st.integers(-5, 5), min_size=1, max_size=12))
    scale = draw(st.sampled_from([1.0, 2.0, 4.0]))
    return LatticePath(np.array(vals, dtype=np.float64), time_scale=scale)


@given(_random_paths(), _random_paths(), _random_paths())
@settings(max_examples=200)
def test_distance_metric_axioms(f, g, h):
    dfg = stopped_path_distance(f, g)
    assert dfg == stopped_path_distance(g, f)
    assert dfg >= 0
    assert dfg <= stopped_path_distance(f, h) + stopped_path_distance(h, g) + 1e-12


# --- rescale ----------------------------------------------------------------

def test_rescale_identity():
    p = path_of(0, 1, 2, 3)
    q = rescale(p, 1.0)
    ts = np.linspace(0, 3, 7)
    assert np.allclose(q(ts), p(ts))


def test_rescale_linear_path():
    # ramp t -> t; k = 2, exponent 2 gives path(4t)/2 = 2t
    p = LatticePath(np.arange(9, dtype=np.float64))
    q = rescale(p, 2.0)
    for t in (0.0, 0.25, 0.5, 1.0, 2.0):
        assert q(t) == pytest.approx(2.0 * t)


def test_rescale_contour_convention():
    p = path_of(0, 1, 0)
    q = rescale(p, 3.0, time_prefactor=2.0)
    assert q.time_scale == pytest.approx(2 * 9)
    assert q.lifetime == pytest.approx(2 / 18)


def test_rescale_composes():
    p = path_of(0, 1, 0, 1)
    q = rescale(rescale(p, 2.0), 3.0)
    r = rescale(p, 6.0)
    assert q.time_scale == pytest.approx(r.time_scale)
    assert q.space_scale == pytest.approx(r.space_scale)
    assert q.values is p.values  # views share the raw data


def test_rescale_rejects_bad_k():
    with pytest.raises(InvalidInputError):
        rescale(path_of(0, 1), 0.0)


# --- CSV --------------------------------------------------------------------

def test_path_csv_round_trip():
    p = LatticePath(np.array([0.0, 1.0, -1.0 / 3.0]), time_scale=9.0, space_scale=3.0)
    buf = io.StringIO()
    write_path_csv(p, buf)
    buf.seek(0)
    ts, vs = read_path_csv(buf)
    assert np.array_equal(ts, p.grid_times)
    assert np.array_equal(vs, p.grid_values)


def test_path_csv_rejects_bad_header():
    with pytest.raises(DecodeError):
        read_path_csv(io.StringIO("time,val\n0,0\n"))
