import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import forests, plane_trees, root_subtrees, sin_trees
from percolimit.errors import (InvalidInputError, MaterializationError,
                               TreeFileError)
from percolimit.trees import (PlaneTree, SinLevel, SinTree, ZLawSpec,
                              dumps_tree, lex_vertices, load_tree, loads_tree,
                              n_vertices_of_truncation, reflect, right_graft,
                              save_tree, split_sides, tree_height, truncate)

SINGLE = PlaneTree([0])
EDGE = PlaneTree([1, 0])
CHERRY = PlaneTree([2, 0, 0])
PATH2 = PlaneTree([1, 1, 0])  # path of 2 edges


# --- construction invariants ------------------------------------------------

def test_rejects_negative_count():
    with pytest.raises(InvalidInputError, match="negative"):
        PlaneTree([2, -1, 0])


def test_rejects_wrong_total():
    with pytest.raises(InvalidInputError, match="sum"):
        PlaneTree([2, 0])


def test_rejects_disconnected_suffix():
    # walk hits -1 before the last vertex
    with pytest.raises(InvalidInputError, match="prefix"):
        PlaneTree([0, 3, 0, 0])


def test_rejects_empty():
    with pytest.raises(InvalidInputError):
        PlaneTree([])


def test_equality_and_hash():
    assert CHERRY == PlaneTree([2, 0, 0])
    assert CHERRY != PATH2
    assert hash(CHERRY) == hash(PlaneTree([2, 0, 0]))


def test_counts_are_readonly():
    with pytest.raises(ValueError):
        CHERRY.child_counts[0] = 5


@given(plane_trees())
def test_random_trees_satisfy_walk_invariants(tree):
    steps = np.cumsum(tree.child_counts - 1)
    assert steps[-1] == -1
    if tree.n_vertices > 1:
        assert steps[:-1].min() >= 0


# --- lex_vertices -----------------------------------------------------------

def test_lex_single_vertex():
    assert list(lex_vertices(SINGLE)) == [()]


def test_lex_cherry():
    assert list(lex_vertices(CHERRY)) == [(), (1,), (2,)]


def test_lex_path_of_two():
    assert list(lex_vertices(PATH2)) == [(), (1,), (1, 1)]


@given(plane_trees())
def test_lex_order_is_strictly_increasing(tree):
    words = list(lex_vertices(tree))
    assert len(words) == tree.n_vertices
    assert words[0] == ()
    for a, b in zip(words, words[1:]):
        assert a < b


@given(plane_trees())
def test_lex_words_are_consistent_with_counts(tree):
    words = list(lex_vertices(tree))
    children_of = {}
    for w in words:
        if w:
            children_of.setdefault(w[:-1], []).append(w)
    for w, k in zip(words, tree.child_counts):
        kids = children_of.get(w, [])
        assert len(kids) == k
        assert kids == [w + (j,) for j in range(1, k + 1)]


# --- reflect ----------------------------------------------------------------

def test_reflect_cherry_is_cherry():
    assert reflect(CHERRY) == CHERRY


def test_reflect_reverses_child_order():
    t = PlaneTree([2, 0, 1, 0])  # root children: leaf, single edge
    assert reflect(t) == PlaneTree([2, 1, 0, 0])


@given(plane_trees())
def test_reflect_is_involution(tree):
    assert reflect(reflect(tree)) == tree


@given(plane_trees())
def test_reflect_preserves_count_multiset(tree):
    assert sorted(reflect(tree).child_counts) == sorted(tree.child_counts)


# --- right_graft ------------------------------------------------------------

def test_graft_onto_single_vertex():
    assert right_graft(SINGLE, CHERRY) == CHERRY


def test_graft_edge_and_cherry():
    assert right_graft(EDGE, CHERRY) == PlaneTree([1, 2, 0, 0])


@given(plane_trees(max_vertices=25), plane_trees(max_vertices=25))
def test_graft_vertex_count(t, s):
    assert right_graft(t, s).n_vertices == t.n_vertices + s.n_vertices - 1


@given(plane_trees(max_vertices=15), plane_trees(max_vertices=15),
       plane_trees(max_vertices=15))
def test_graft_is_associative(t, s, r):
    assert right_graft(right_graft(t, s), r) == right_graft(t, right_graft(s, r))


# --- truncate ---------------------------------------------------------------

def _ray_levels(n):
    return [SinLevel() for _ in range(n)]


def test_truncate_at_zero_is_single_vertex():
    tree = SinTree(_ray_levels(4), backbone_rightmost=True)
    assert truncate(tree, 0) == SINGLE


def test_truncate_bare_backbone():
    tree = SinTree(_ray_levels(5), backbone_rightmost=True)
    assert truncate(tree, 3) == PlaneTree([1, 1, 1, 0])


def test_truncate_leaf_decorated_backbone():
    leaf = PlaneTree([0])
    levels = [SinLevel(left=(leaf,)), SinLevel(left=(leaf,))]
    tree = SinTree(levels, backbone_rightmost=True)
    assert truncate(tree, 2) == PlaneTree([2, 0, 2, 0, 0])


def test_truncate_beyond_materialization_fails():
    tree = SinTree(_ray_levels(2), backbone_rightmost=True)
    with pytest.raises(MaterializationError):
        truncate(tree, 3)


def test_truncate_two_sided_fails():
    tree = SinTree([SinLevel(right=(SINGLE,))], backbone_rightmost=False)
    with pytest.raises(InvalidInputError):
        truncate(tree, 1)


@given(sin_trees())
def test_truncations_are_nested(tree):
    h = tree.truncation_height
    sets = [set(lex_vertices(truncate(tree, i))) for i in range(h + 1)]
    for small, big in zip(sets, sets[1:]):
        assert small < big


@given(sin_trees())
def test_truncation_size_matches_prediction(tree):
    for i in range(tree.truncation_height + 1):
        assert n_vertices_of_truncation(tree, i) == truncate(tree, i).n_vertices


def test_backbone_rightmost_validation():
    with pytest.raises(InvalidInputError, match="right"):
        SinTree([SinLevel(right=(SINGLE,))], backbone_rightmost=True)


# --- split_sides ------------------------------------------------------------

def test_split_of_rightmost_tree_gives_bare_right():
    levels = [SinLevel(left=(CHERRY,)), SinLevel(left=(EDGE,))]
    tree = SinTree(levels, backbone_rightmost=True)
    left, right = split_sides(tree)
    assert left.levels == tree.levels
    assert all(lvl.left == () and lvl.right == () for lvl in right.levels)
    assert left.backbone_rightmost and right.backbone_rightmost


@given(sin_trees(two_sided=True))
def test_split_then_remerge_recovers_tree(tree):
    left, right = split_sides(tree)
    assert left.truncation_height == right.truncation_height == tree.truncation_height
    for orig, lv, rv in zip(tree.levels, left.levels, right.levels):
        assert lv.left == orig.left
        # undo the mirror: reverse and reflect the right part's subtrees
        assert tuple(reflect(t) for t in reversed(rv.left)) == orig.right


@given(sin_trees(two_sided=True))
def test_split_parts_sizes_partition_level_degrees(tree):
    left, right = split_sides(tree)
    for orig, lv, rv in zip(tree.levels, left.levels, right.levels):
        assert len(lv.left) + len(rv.left) == orig.degree - 1


# --- ZLawSpec ---------------------------------------------------------------

def test_zlaw_binomial_sigma():
    law = ZLawSpec("binomial_sigma", sigma=3, w=0.25)
    assert law.m == pytest.approx(0.75)
    assert law.eta == pytest.approx(1 - 0.75**3)
    assert law.support_max == 3
    assert law.alpha == 1.0


def test_zlaw_binomial_sigma_minus_1():
    law = ZLawSpec("binomial_sigma_minus_1", sigma=3, w=0.25)
    assert law.m == pytest.approx(0.5)
    assert law.eta == pytest.approx(1 - 0.75**2)
    assert law.support_max == 2


def test_zlaw_uniform_split():
    law = ZLawSpec("uniform_split", sigma=2, w=0.5)
    assert law.m == pytest.approx(0.25)
    # Z > 0 iff Y = 2 (prob 1/2) and the Bin(1, 1/2) succeeds
    assert law.eta == pytest.approx(0.25)
    assert law.support_max == 1


def test_zlaw_uniform_split_eta_by_enumeration():
    sigma, w = 4, 0.3
    law = ZLawSpec("uniform_split", sigma=sigma, w=w)
    p_zero = sum((1 - w) ** (y - 1) for y in range(1, sigma + 1)) / sigma
    assert law.eta == pytest.approx(1 - p_zero)


def test_zlaw_rejects_bad_family():
    with pytest.raises(InvalidInputError):
        ZLawSpec("geometric", sigma=2, w=0.5)


def test_zlaw_rejects_bad_params():
    with pytest.raises(InvalidInputError):
        ZLawSpec("binomial_sigma", sigma=1, w=0.5)
    with pytest.raises(InvalidInputError):
        ZLawSpec("binomial_sigma", sigma=2, w=1.5)


# --- serialization ----------------------------------------------------------

def test_dumps_format():
    assert dumps_tree(CHERRY) == "pt1 3\n2 0 0\n"


def test_file_round_trip(tmp_path):
    path = tmp_path / "t.pt"
    save_tree(PATH2, path)
    assert load_tree(path) == PATH2


@given(plane_trees())
@settings(max_examples=50)
def test_string_round_trip(tree):
    assert loads_tree(dumps_tree(tree)) == tree


def test_loads_rejects_bad_header():
    with pytest.raises(TreeFileError) as info:
        loads_tree("pt2 3\n2 0 0\n")
    assert info.value.line == 1


def test_loads_rejects_count_mismatch():
    with pytest.raises(TreeFileError) as info:
        loads_tree("pt1 4\n2 0 0\n")
    assert info.value.line == 2


def test_loads_rejects_non_integer():
    with pytest.raises(TreeFileError) as info:
        loads_tree("pt1 3\n2 x 0\n")
    assert info.value.line == 2 and info.value.column == 2


def test_loads_rejects_invalid_tree():
    with pytest.raises(TreeFileError):
        loads_tree("pt1 3\n0 0 2\n")


# --- misc helpers -----------------------------------------------------------

def test_tree_height_examples():
    assert tree_height(SINGLE) == 0
    assert tree_height(CHERRY) == 1
    assert tree_height(PATH2) == 2
    assert tree_height(PlaneTree([2, 1, 0, 0])) == 2


@given(plane_trees())
def test_tree_height_matches_word_depth(tree):
    assert tree_height(tree) == max(len(w) for w in lex_vertices(tree))
