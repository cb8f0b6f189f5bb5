import numpy as np
import pytest
from hypothesis import strategies as st

from percolimit.trees import PlaneTree, SinLevel, SinTree


@st.composite
def plane_trees(draw, max_vertices=60, max_children=4):
    """Random finite plane trees via their child-count walk.

    Draws counts until the walk sum(k - 1) hits -1, forcing leaves once the
    vertex budget would otherwise be exceeded, so every draw is valid.
    """
    counts = []
    open_edges = 1
    while open_edges > 0:
        if len(counts) + open_edges >= max_vertices:
            k = 0
        else:
            k = draw(st.integers(0, max_children))
        counts.append(k)
        open_edges += k - 1
    return PlaneTree(np.array(counts, dtype=np.int64))


@st.composite
def forests(draw, max_trees=4, max_vertices=20):
    n = draw(st.integers(1, max_trees))
    return [draw(plane_trees(max_vertices=max_vertices)) for _ in range(n)]


@st.composite
def sin_trees(draw, max_height=5, two_sided=False, max_vertices=12):
    height = draw(st.integers(0, max_height))
    levels = []
    for _ in range(height):
        n_left = draw(st.integers(0, 2))
        left = tuple(draw(plane_trees(max_vertices=max_vertices)) for _ in range(n_left))
        if two_sided:
            n_right = draw(st.integers(0, 2))
            right = tuple(draw(plane_trees(max_vertices=max_vertices)) for _ in range(n_right))
        else:
            right = ()
        levels.append(SinLevel(left=left, right=right))
    return SinTree(levels, backbone_rightmost=not two_sided)


def root_subtrees(tree: PlaneTree):
    """The subtrees hanging off the root, left to right."""
    counts = tree.child_counts
    k = int(counts[0])
    subs = []
    pos = 1
    for _ in range(k):
        open_edges = 1
        end = pos
        while open_edges > 0:
            open_edges += int(counts[end]) - 1
            end += 1
        subs.append(PlaneTree(counts[pos:end].copy()))
        pos = end
    return subs


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20260819))
