"""Tree/path codecs: Lukaciewicz, height, and contour encodings.

Paths live on an integer grid and are linearly interpolated in between.
Rescaled views share the raw value array: ``k``-rescaling only touches the
scale metadata, so building ensembles of rescaled paths costs no copies.

Conventions.  For a finite tree with vertices v^0, ..., v^{n-1} in
depth-first order, the Lukaciewicz path is V_0 = 0, V_m = sum_{i<m}
(k_{v^i} - 1); it stays >= 0 until the final step and ends at -1.  The
height path is H(m) = depth of v^m, recovered from V by the count
H(n) = #{k < n : V_k = min(V_k, ..., V_n)}.  (A side note on the textbook
"edges attached on the right" description of this count: computing it on
the cherry tree shows it is shifted by one vertex; the summation formula
above is the authoritative one here.)  The contour path records the depth
of a unit-speed walker traversing the tree left to right, with lifetime
2(#tree - 1).
"""

from __future__ import annotations

import numpy as np

from .errors import DecodeError, InvalidInputError
from .trees import PlaneTree, _children_table

__all__ = [
    "LatticePath",
    "lukaciewicz",
    "decode_lukaciewicz",
    "height_fn",
    "height_from_lukaciewicz",
    "contour_fn",
    "concat_paths",
    "glue_backbone_path",
    "stopped_path_distance",
    "rescale",
    "trim_final_step",
    "write_path_csv",
    "read_path_csv",
]


class LatticePath:
    """A continuous path stored as values on a uniform grid.

    Parameters
    ----------
    values : array_like of float
        Raw values at raw integer times 0, 1, 2, ...
    time_scale : float
        Raw time units per path time unit: evaluating at path time t reads
        the raw grid at ``t * time_scale``.
    space_scale : float
        Raw value units per path value unit: path value = raw / space_scale.
    tail_floor : float or None
        Raw-unit lower bound on the (unmaterialized) continuation past the
        last grid point.  None means the path is complete: there is nothing
        past the lifetime.
    """

    __slots__ = ("values", "time_scale", "space_scale", "tail_floor")

    def __init__(self, values, time_scale=1.0, space_scale=1.0, tail_floor=None):
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise InvalidInputError("path needs a nonempty 1-d value sequence")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("path values must be finite")
        if time_scale <= 0 or space_scale <= 0:
            raise InvalidInputError("scales must be positive")
        vals.setflags(write=False)
        self.values = vals
        self.time_scale = float(time_scale)
        self.space_scale = float(space_scale)
        self.tail_floor = None if tail_floor is None else float(tail_floor)

    @property
    def lifetime(self) -> float:
        return (self.values.size - 1) / self.time_scale

    def __call__(self, t):
        """Evaluate at path time(s) t, linearly interpolated, clamped at the ends."""
        raw_t = np.asarray(t, dtype=np.float64) * self.time_scale
        out = np.interp(raw_t, np.arange(self.values.size), self.values)
        out = out / self.space_scale
        return float(out) if np.isscalar(t) else out

    @property
    def grid_times(self) -> np.ndarray:
        return np.arange(self.values.size) / self.time_scale

    @property
    def grid_values(self) -> np.ndarray:
        return self.values / self.space_scale

    def __repr__(self):
        return (
            f"LatticePath(n={self.values.size}, lifetime={self.lifetime:g}, "
            f"time_scale={self.time_scale:g}, space_scale={self.space_scale:g})"
        )


def lukaciewicz(tree: PlaneTree) -> LatticePath:
    """Lukaciewicz path of a finite tree: V_m = sum_{i<m} (children(v^i) - 1)."""
    vals = np.empty(tree.n_vertices + 1, dtype=np.float64)
    vals[0] = 0.0
    vals[1:] = np.cumsum(tree.child_counts - 1)
    return LatticePath(vals)


def _as_integer_steps(path: LatticePath, op: str) -> np.ndarray:
    vals = path.values
    rounded = np.rint(vals)
    off = np.nonzero(np.abs(vals - rounded) > 1e-9)[0]
    if off.size:
        raise DecodeError(
            f"{op}: non-integer value {vals[off[0]]!r} at index {int(off[0])}",
            index=int(off[0]),
        )
    return rounded.astype(np.int64)


def _validate_walk(vals: np.ndarray, op: str, terminated: bool) -> None:
    """Common Lukaciewicz-shape checks on integer values.

    ``terminated`` requires the path to end at -1 and forbids hitting -1
    earlier; otherwise the path must stay >= 0 throughout (an unterminated
    prefix, e.g. of a sin-tree encoding).
    """
    if vals[0] != 0:
        raise DecodeError(f"{op}: path must start at 0, got {int(vals[0])}", index=0)
    if vals.size < 2:
        if terminated:
            raise DecodeError(f"{op}: path too short to terminate", index=0)
        return
    steps = np.diff(vals)
    bad = np.nonzero(steps < -1)[0]
    if bad.size:
        i = int(bad[0])
        raise DecodeError(
            f"{op}: increment {int(steps[i])} < -1 at index {i + 1}", index=i + 1
        )
    if terminated:
        hits = np.nonzero(vals == -1)[0]
        if hits.size == 0 or vals[-1] != -1:
            raise DecodeError(
                f"{op}: path must end at -1, got {int(vals[-1])}",
                index=int(vals.size - 1),
            )
        if hits[0] != vals.size - 1:
            raise DecodeError(
                f"{op}: path hits -1 early at index {int(hits[0])}", index=int(hits[0])
            )
        if vals.size > 2 and int(vals[1:-1].min()) < 0:
            i = int(np.argmax(vals[1:-1] < 0)) + 1
            raise DecodeError(f"{op}: negative value before the end at index {i}", index=i)
    else:
        if int(vals.min()) < 0:
            i = int(np.argmax(vals < 0))
            raise DecodeError(f"{op}: unterminated path goes negative at index {i}", index=i)


def decode_lukaciewicz(path: LatticePath) -> PlaneTree:
    """Inverse of :func:`lukaciewicz`: child counts are the increments plus one."""
    vals = _as_integer_steps(path, "decode_lukaciewicz")
    _validate_walk(vals, "decode_lukaciewicz", terminated=True)
    return PlaneTree(np.diff(vals) + 1)


def height_fn(tree: PlaneTree) -> LatticePath:
    """Height path: H(m) = depth of the m-th vertex in depth-first order."""
    n = tree.n_vertices
    out = np.empty(n, dtype=np.float64)
    out[0] = 0.0
    remaining = [int(tree.child_counts[0])]
    for i in range(1, n):
        while remaining[-1] == 0:
            remaining.pop()
        out[i] = len(remaining)
        remaining[-1] -= 1
        remaining.append(int(tree.child_counts[i]))
    return LatticePath(out)


def height_from_lukaciewicz(V: LatticePath) -> LatticePath:
    """Recover the height path from a Lukaciewicz path.

    Uses H(n) = #{k < n : V_k = min(V_k, ..., V_n)} with a monotone stack,
    so the whole pass is O(n) amortized.  Accepts both terminated paths
    (finite tree, trailing -1 dropped from the height domain) and
    unterminated non-negative prefixes (sin-tree truncations).
    """
    vals = _as_integer_steps(V, "height_from_lukaciewicz")
    terminated = vals.size >= 2 and vals[-1] == -1
    _validate_walk(vals, "height_from_lukaciewicz", terminated=terminated)
    n = vals.size - 1 if terminated else vals.size
    out = np.empty(n, dtype=np.float64)
    stack = np.empty(n + 1, dtype=np.int64)
    top = -1
    for m in range(n):
        v = vals[m]
        while top >= 0 and stack[top] > v:
            top -= 1
        out[m] = top + 1
        top += 1
        stack[top] = v
    return LatticePath(out)


def contour_fn(tree: PlaneTree) -> LatticePath:
    """Contour path of the unit-speed depth-first walk; lifetime 2(#tree - 1)."""
    n = tree.n_vertices
    if n == 1:
        return LatticePath(np.zeros(1))
    children = _children_table(tree.child_counts)
    out = np.empty(2 * n - 1, dtype=np.float64)
    out[0] = 0.0
    pos = 1
    stack = [(0, iter(children[0]))]
    depth = 0
    while stack:
        _, it = stack[-1]
        child = next(it, None)
        if child is None:
            stack.pop()
            depth -= 1
            if stack:
                out[pos] = depth
                pos += 1
        else:
            depth += 1
            out[pos] = depth
            pos += 1
            stack.append((child, iter(children[child])))
    return LatticePath(out)


def concat_paths(P1: LatticePath, P2: LatticePath) -> LatticePath:
    """Concatenate in time: run P1 to its lifetime, then continue with P1's
    final value plus P2.  P2 must start at 0 and both paths must live on the
    same grid scales."""
    if P1.time_scale != P2.time_scale or P1.space_scale != P2.space_scale:
        raise InvalidInputError("concat_paths: mismatched grid scales")
    if P2.values[0] != 0.0:
        raise InvalidInputError(
            f"concat_paths: second path starts at {P2.values[0]!r}, expected 0"
        )
    if P2.values.size == 1:
        return P1
    vals = np.concatenate([P1.values, P1.values[-1] + P2.values[1:]])
    floor = None if P2.tail_floor is None else P2.tail_floor + P1.values[-1]
    return LatticePath(vals, P1.time_scale, P1.space_scale, tail_floor=floor)


def trim_final_step(path: LatticePath) -> LatticePath:
    """Drop the last grid step (the terminal -1 of a Lukaciewicz path),
    leaving the path on [0, lifetime - one grid unit]."""
    if path.values.size < 2:
        raise InvalidInputError("cannot trim a single-point path")
    return LatticePath(
        path.values[:-1].copy(), path.time_scale, path.space_scale, path.tail_floor
    )


def glue_backbone_path(U: LatticePath) -> LatticePath:
    """Lukaciewicz path of the sin-tree glued from a sequence of finite trees.

    Hanging the i-th tree of the sequence off backbone vertex BB_i (backbone
    rightmost) turns the forest path U into the sin-tree path
    ``V_n = U_n + 1 - min(U_0, ..., U_{n-1})`` with the convention that the
    empty minimum is 1 (so V_0 = 0).  The result never terminates, hence
    stays >= 0.
    """
    vals = _as_integer_steps(U, "glue_backbone_path")
    if vals[0] != 0:
        raise DecodeError("glue_backbone_path: U must start at 0", index=0)
    if vals.size > 1:
        steps = np.diff(vals)
        bad = np.nonzero(steps < -1)[0]
        if bad.size:
            i = int(bad[0])
            raise DecodeError(
                f"glue_backbone_path: increment {int(steps[i])} < -1 at index {i + 1}",
                index=i + 1,
            )
    out = np.empty(vals.size, dtype=np.float64)
    out[0] = 0.0
    if vals.size > 1:
        prev_min = np.minimum.accumulate(vals[:-1])
        out[1:] = vals[1:] + 1 - prev_min
    return LatticePath(out)


def stopped_path_distance(f: LatticePath, g: LatticePath) -> float:
    """d(f, g) = |lifetime(f) - lifetime(g)| + sup_t |f(t) - g(t)|.

    The sup runs over all t with each path held at its terminal value past
    its own lifetime.  (Cutting the sup at the common lifetime, as the
    definition is often abbreviated, breaks the triangle inequality through
    short-lived paths; the frozen-tail form is an actual metric and induces
    the same topology.)  The sup is exact: both frozen paths are piecewise
    linear with kinks on the union of the two grids.
    """
    ts = np.union1d(f.grid_times, g.grid_times)
    return abs(f.lifetime - g.lifetime) + float(np.max(np.abs(f(ts) - g(ts))))


def rescale(path: LatticePath, k: float, time_exponent: float = 2.0,
            time_prefactor: float = 1.0) -> LatticePath:
    """Diffusive rescaling view: output(t) = path(time_prefactor * k^time_exponent * t) / k.

    The default exponent 2 gives the k^{-1} f(k^2 t) convention of the
    Lukaciewicz/height limits; pass ``time_prefactor=2`` for the contour
    convention k^{-1} C(2 k^2 t).  No data is copied: only the scale
    metadata changes, and repeated rescaling composes multiplicatively.
    """
    if k <= 0:
        raise InvalidInputError("rescale: k must be positive")
    if time_prefactor <= 0:
        raise InvalidInputError("rescale: time_prefactor must be positive")
    return LatticePath(
        path.values,
        path.time_scale * time_prefactor * float(k) ** time_exponent,
        path.space_scale * k,
        tail_floor=path.tail_floor,
    )


def write_path_csv(path: LatticePath, fh) -> None:
    """Write ``t,value`` rows (full round-trip precision), one per grid point."""
    fh.write("t,value\n")
    ts = path.grid_times
    vs = path.grid_values
    for t, v in zip(ts, vs):
        fh.write(f"{float(t)!r},{float(v)!r}\n")


def read_path_csv(fh):
    """Read a ``t,value`` CSV back into (times, values) arrays."""
    header = fh.readline().strip()
    if header != "t,value":
        raise DecodeError(f"path CSV: bad header {header!r}, expected 't,value'")
    ts, vs = [], []
    for lineno, line in enumerate(fh, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DecodeError(f"path CSV: line {lineno}: expected 2 columns")
        ts.append(float(parts[0]))
        vs.append(float(parts[1]))
    return np.asarray(ts), np.asarray(vs)
