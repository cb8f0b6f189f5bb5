"""Finite plane trees and single-infinite-branch (sin-) trees.

A finite rooted plane tree is stored as its child-count sequence in
depth-first (lexicographic) order; this is the canonical representation and
everything else (vertex labels, encodings, reflections) is derived from it.
A sin-tree is stored level by level along its backbone: for each backbone
height the off-backbone subtrees hanging to the left and right of the next
backbone vertex, materialized up to a finite truncation height.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, MaterializationError, TreeFileError

__all__ = [
    "PlaneTree",
    "SinTree",
    "SinLevel",
    "ZLawSpec",
    "lex_vertices",
    "reflect",
    "right_graft",
    "truncate",
    "split_sides",
    "save_tree",
    "load_tree",
    "loads_tree",
    "dumps_tree",
]


class PlaneTree:
    """A finite rooted plane tree.

    Parameters
    ----------
    child_counts : array_like of int
        Number of children of each vertex, in depth-first order with
        children visited left to right.  The sequence determines the tree:
        vertex 0 is the root, and each vertex's subtree occupies a
        contiguous block.

    The constructor checks the three structural invariants: the sequence is
    non-negative, sums to ``n_vertices - 1``, and its partial sums of
    ``count - 1`` stay non-negative before the final step (the Lukaciewicz
    path only hits -1 at the very end).
    """

    __slots__ = ("child_counts",)

    def __init__(self, child_counts):
        counts = np.asarray(child_counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size == 0:
            raise InvalidInputError("child_counts must be a nonempty 1-d sequence")
        if np.any(counts < 0):
            bad = int(np.argmax(counts < 0))
            raise InvalidInputError(f"negative child count at vertex {bad}")
        steps = np.cumsum(counts - 1)
        if steps[-1] != -1:
            raise InvalidInputError(
                f"child counts sum to {int(counts.sum())}, expected n_vertices - 1 = {counts.size - 1}"
            )
        if counts.size > 1 and int(steps[:-1].min()) < 0:
            bad = int(np.argmax(steps[:-1] < 0))
            raise InvalidInputError(
                f"prefix sum drops below zero after vertex {bad} (disconnected suffix)"
            )
        counts.setflags(write=False)
        self.child_counts = counts

    @property
    def n_vertices(self) -> int:
        return self.child_counts.size

    def __len__(self) -> int:
        return self.child_counts.size

    def __eq__(self, other):
        if not isinstance(other, PlaneTree):
            return NotImplemented
        return np.array_equal(self.child_counts, other.child_counts)

    def __hash__(self):
        return hash(self.child_counts.tobytes())

    def __repr__(self):
        if self.n_vertices <= 12:
            body = " ".join(str(int(c)) for c in self.child_counts)
        else:
            head = " ".join(str(int(c)) for c in self.child_counts[:8])
            body = f"{head} ... ({self.n_vertices} vertices)"
        return f"PlaneTree([{body}])"


def lex_vertices(tree: PlaneTree):
    """Iterate vertex labels in lexicographic (depth-first) order.

    Labels are child-index words: the root is the empty tuple ``()``, and
    the j-th child (1-based) of a vertex with word w has word ``w + (j,)``.
    Words are built on the fly; nothing is stored per vertex.
    """
    counts = tree.child_counts
    yield ()
    if counts.size == 1:
        return
    word = []
    remaining = [int(counts[0])]
    next_child = [1]
    for i in range(1, counts.size):
        while remaining[-1] == 0:
            remaining.pop()
            next_child.pop()
            word.pop()
        word.append(next_child[-1])
        next_child[-1] += 1
        remaining[-1] -= 1
        yield tuple(word)
        remaining.append(int(counts[i]))
        next_child.append(1)


def _children_table(counts: np.ndarray):
    """Index lists of each vertex's children, in left-to-right order."""
    children = [[] for _ in range(counts.size)]
    stack = [0]
    remaining = [int(counts[0])]
    for i in range(1, counts.size):
        while remaining[-1] == 0:
            stack.pop()
            remaining.pop()
        children[stack[-1]].append(i)
        remaining[-1] -= 1
        stack.append(i)
        remaining.append(int(counts[i]))
    return children


def reflect(tree: PlaneTree) -> PlaneTree:
    """Mirror image: reverse the child order of every vertex.

    An involution; preserves the number of vertices and the multiset of
    child counts.
    """
    counts = tree.child_counts
    if counts.size == 1:
        return tree
    children = _children_table(counts)
    out = np.empty_like(counts)
    stack = [0]
    pos = 0
    while stack:
        v = stack.pop()
        out[pos] = counts[v]
        pos += 1
        # push in original order so they pop (and are visited) reversed
        stack.extend(children[v])
    return PlaneTree(out)


def right_graft(T: PlaneTree, S: PlaneTree) -> PlaneTree:
    """Graft S onto T by identifying S's root with T's rightmost leaf.

    The rightmost leaf of T is its last vertex in depth-first order, so on
    child-count sequences the operation is concatenation with that final
    zero dropped: ``counts(T + S) = counts(T)[:-1] ++ counts(S)``.  The
    result has ``#T + #S - 1`` vertices.
    """
    if not isinstance(T, PlaneTree) or T.n_vertices < 1:
        raise InvalidInputError("right_graft needs a nonempty finite tree T")
    if T.n_vertices == 1:
        return S
    return PlaneTree(np.concatenate([T.child_counts[:-1], S.child_counts]))


@dataclass(frozen=True)
class SinLevel:
    """Off-backbone subtrees at one backbone height.

    ``left`` are the subtrees whose roots precede the next backbone vertex
    in the child order of this one; ``right`` are those after it.
    """

    left: tuple = ()
    right: tuple = ()

    @property
    def degree(self) -> int:
        """Child count of this backbone vertex (off-backbone plus backbone)."""
        return len(self.left) + len(self.right) + 1


class SinTree:
    """A sin-tree materialized along its backbone up to a finite height.

    ``levels[i]`` describes backbone vertex BB_i for ``i < truncation_height``;
    the backbone vertex at the truncation height exists but its children are
    not materialized.  When ``backbone_rightmost`` is set, every off-backbone
    child precedes the next backbone vertex (all ``right`` parts empty), which
    is the convention for conditioned trees.
    """

    __slots__ = ("levels", "truncation_height", "backbone_rightmost")

    def __init__(self, levels, backbone_rightmost: bool):
        levels = tuple(levels)
        if backbone_rightmost:
            for i, lvl in enumerate(levels):
                if lvl.right:
                    raise InvalidInputError(
                        f"backbone_rightmost tree has right-side subtrees at level {i}"
                    )
        self.levels = levels
        self.truncation_height = len(levels)
        self.backbone_rightmost = backbone_rightmost

    def __repr__(self):
        side = "rightmost" if self.backbone_rightmost else "two-sided"
        return f"SinTree(height={self.truncation_height}, {side})"


def truncate(tree: SinTree, i: int) -> PlaneTree:
    """The i-truncation: backbone up to BB_i plus everything attached strictly below.

    Defined for backbone-rightmost trees, where the truncation is exactly the
    set of vertices lexicographically at most BB_i and BB_i becomes the
    rightmost leaf of the result.
    """
    if not tree.backbone_rightmost:
        raise InvalidInputError("truncate is defined for backbone-rightmost sin-trees")
    if i < 0:
        raise InvalidInputError("truncation height must be >= 0")
    if i > tree.truncation_height:
        raise MaterializationError(
            f"truncation at {i} exceeds materialized height {tree.truncation_height}"
        )
    parts = []
    for lvl in tree.levels[:i]:
        parts.append(np.array([len(lvl.left) + 1], dtype=np.int64))
        for sub in lvl.left:
            parts.append(sub.child_counts)
    parts.append(np.zeros(1, dtype=np.int64))
    return PlaneTree(np.concatenate(parts))


def _reflect_sin(tree: SinTree) -> SinTree:
    levels = [
        SinLevel(
            left=tuple(reflect(t) for t in reversed(lvl.right)),
            right=tuple(reflect(t) for t in reversed(lvl.left)),
        )
        for lvl in tree.levels
    ]
    return SinTree(levels, backbone_rightmost=False)


def split_sides(tree: SinTree):
    """Split a sin-tree at its backbone into (left part, right part).

    The left part keeps the backbone and the subtrees on its left; the right
    part is the left part of the mirror image.  Both results are
    backbone-rightmost sin-trees of the same truncation height.
    """
    left = SinTree(
        [SinLevel(left=lvl.left) for lvl in tree.levels],
        backbone_rightmost=True,
    )
    right = SinTree(
        [
            SinLevel(left=tuple(reflect(t) for t in reversed(lvl.right)))
            for lvl in tree.levels
        ],
        backbone_rightmost=True,
    )
    return left, right


_Z_FAMILIES = ("binomial_sigma", "binomial_sigma_minus_1", "uniform_split")


@dataclass(frozen=True)
class ZLawSpec:
    """Law of the off-backbone child count Z at a backbone vertex.

    Families:

    * ``binomial_sigma``          : Z ~ Bin(sigma, w)
    * ``binomial_sigma_minus_1``  : Z ~ Bin(sigma - 1, w)
    * ``uniform_split``           : Y ~ uniform{1..sigma}, Z ~ Bin(Y - 1, w);
      the complementary side draws Bin(sigma - Y, w) with the same Y.

    ``alpha`` is the moment-bound exponent (E Z^(1+alpha) finite, trivially
    true here since Z <= sigma), ``eta`` a lower bound on P(Z > 0), and
    ``m`` the analytic mean; all three are computed, not supplied.
    """

    family: str
    sigma: int
    w: float
    alpha: float = field(init=False, default=1.0)

    def __post_init__(self):
        if self.family not in _Z_FAMILIES:
            raise InvalidInputError(
                f"unknown Z family {self.family!r}; expected one of {_Z_FAMILIES}"
            )
        if self.sigma < 2:
            raise InvalidInputError("sigma must be >= 2")
        if not 0.0 <= self.w <= 1.0:
            raise InvalidInputError("w must lie in [0, 1]")

    @property
    def m(self) -> float:
        """Analytic mean of Z."""
        if self.family == "binomial_sigma":
            return self.sigma * self.w
        if self.family == "binomial_sigma_minus_1":
            return (self.sigma - 1) * self.w
        # uniform_split: E[Y - 1] = (sigma - 1) / 2
        return 0.5 * (self.sigma - 1) * self.w

    @property
    def eta(self) -> float:
        """P(Z > 0), exact."""
        q = 1.0 - self.w
        if self.family == "binomial_sigma":
            return 1.0 - q**self.sigma
        if self.family == "binomial_sigma_minus_1":
            return 1.0 - q ** (self.sigma - 1)
        if self.w == 1.0:
            return 1.0 - 1.0 / self.sigma
        total = sum(q ** (y - 1) for y in range(1, self.sigma + 1))
        return 1.0 - total / self.sigma

    @property
    def support_max(self) -> int:
        if self.family == "binomial_sigma":
            return self.sigma
        return self.sigma - 1


# ---------------------------------------------------------------------------
# .pt file format: first line "pt1 <n_vertices>", second line the child
# counts, space separated.  Round trips are bit exact.
# ---------------------------------------------------------------------------


def dumps_tree(tree: PlaneTree) -> str:
    counts = " ".join(str(int(c)) for c in tree.child_counts)
    return f"pt1 {tree.n_vertices}\n{counts}\n"


def save_tree(tree: PlaneTree, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_tree(tree))


def loads_tree(text: str, name: str = "<string>") -> PlaneTree:
    lines = text.split("\n")
    if not lines or not lines[0]:
        raise TreeFileError(f"{name}: line 1: empty file, expected 'pt1 <n>'", line=1, column=1)
    header = lines[0].split(" ")
    if len(header) != 2 or header[0] != "pt1":
        raise TreeFileError(
            f"{name}: line 1: bad header {lines[0]!r}, expected 'pt1 <n_vertices>'",
            line=1,
            column=1,
        )
    try:
        n = int(header[1])
    except ValueError:
        raise TreeFileError(
            f"{name}: line 1, column 2: vertex count {header[1]!r} is not an integer",
            line=1,
            column=2,
        ) from None
    if n <= 0:
        raise TreeFileError(f"{name}: line 1: vertex count must be positive", line=1, column=2)
    if len(lines) < 2:
        raise TreeFileError(f"{name}: line 2: missing child counts", line=2, column=1)
    tokens = lines[1].split()
    counts = np.empty(len(tokens), dtype=np.int64)
    for j, tok in enumerate(tokens):
        try:
            counts[j] = int(tok)
        except ValueError:
            raise TreeFileError(
                f"{name}: line 2, column {j + 1}: child count {tok!r} is not an integer",
                line=2,
                column=j + 1,
            ) from None
    if counts.size != n:
        raise TreeFileError(
            f"{name}: line 2: {counts.size} child counts, header promised {n}",
            line=2,
            column=counts.size + 1,
        )
    try:
        return PlaneTree(counts)
    except InvalidInputError as exc:
        raise TreeFileError(f"{name}: line 2: {exc}", line=2, column=1) from exc


def load_tree(path) -> PlaneTree:
    with open(path, "r", encoding="ascii") as fh:
        return loads_tree(fh.read(), name=str(path))


def tree_height(tree: PlaneTree) -> int:
    """Height (max depth) of a finite tree."""
    depth = 0
    best = 0
    remaining = [int(tree.child_counts[0])]
    for i in range(1, tree.n_vertices):
        while remaining[-1] == 0:
            remaining.pop()
        depth = len(remaining)
        best = max(best, depth)
        remaining[-1] -= 1
        remaining.append(int(tree.child_counts[i]))
    return best


def n_vertices_of_truncation(tree: SinTree, i: int) -> int:
    """Vertex count of truncate(tree, i) without building it."""
    if i > tree.truncation_height:
        raise MaterializationError(
            f"truncation at {i} exceeds materialized height {tree.truncation_height}"
        )
    total = i + 1
    for lvl in tree.levels[:i]:
        total += sum(t.n_vertices for t in lvl.left)
    return total
