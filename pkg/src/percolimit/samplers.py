"""Samplers for every discrete object in the model.

Galton-Watson trees, backbone (Z, theta)-trees, the incipient infinite
cluster in its conditioned and two-sided forms, direct invasion percolation
on the sigma-ary tree, and the structural form of the invaded cluster driven
by a height-indexed weight profile.

All randomness comes from ``numpy.random.Generator`` objects passed in
explicitly; ensemble functions split one seed into per-replica streams via
:mod:`percolimit.seeding` and are deterministic in (seed, params) regardless
of worker count.
"""

from __future__ import annotations

import heapq
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import GWOverflowError, InvalidInputError, MaterializationError
from .seeding import replica_sequences
from .trees import PlaneTree, SinLevel, SinTree, ZLawSpec

__all__ = [
    "ModelParams",
    "WPath",
    "WeightedEdgeFrontier",
    "InvasionRun",
    "GWOverflow",
    "zeta",
    "sample_gw",
    "sample_ztheta",
    "sample_iic",
    "sample_ipc_direct",
    "sample_w_asymptotic",
    "sample_ipc_structural",
    "ensemble_manifest",
    "iic_conditioned_marginals",
    "iic_pair_marginals",
    "ipc_asymptotic_marginals",
]

DEFAULT_GW_CAP = 10**7


@dataclass(frozen=True)
class ModelParams:
    """The tree parameter sigma with its derived constants."""

    sigma: int

    def __post_init__(self):
        if not isinstance(self.sigma, (int, np.integer)) or self.sigma < 2:
            raise InvalidInputError(f"sigma must be an integer >= 2, got {self.sigma!r}")

    @property
    def gamma(self) -> float:
        return (self.sigma - 1) / self.sigma

    @property
    def p_c(self) -> float:
        return 1.0 / self.sigma


def zeta(sigma: int, p: float) -> float:
    """Extinction probability of Binomial(sigma, p) branching.

    The smallest fixed point q of q = (1 - p + p q)^sigma, found by
    bisection to absolute tolerance 1e-12 (the bracket is shrunk far past
    that).  Subcritical and critical p give 1.
    """
    if sigma < 2:
        raise InvalidInputError("sigma must be >= 2")
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"p must lie in [0, 1], got {p!r}")
    if p * sigma <= 1.0:
        return 1.0
    if p == 1.0:
        return 0.0

    def f(q):
        return (1.0 - p + p * q) ** sigma - q

    # smallest root is < 1; f > 0 left of it, < 0 between it and 1
    hi = 1.0 - 2.0 ** -8
    while f(hi) >= 0.0:
        hi = 1.0 - (1.0 - hi) / 2.0
        if 1.0 - hi < 1e-15:
            return 1.0
    lo = 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def _w_from_w_hat(sigma: int, w_hat: float) -> float:
    """Invert w -> w * zeta(sigma, w) on [1/sigma, 1].

    The product decreases from 1/sigma (at criticality) to 0 (at w = 1), so
    bisection applies; the residual is checked afterwards.
    """
    p_c = 1.0 / sigma
    if not 0.0 < w_hat <= p_c + 1e-12:
        raise InvalidInputError(f"w_hat must lie in (0, 1/sigma], got {w_hat!r}")
    if w_hat >= p_c:
        return p_c
    lo, hi = p_c, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * zeta(sigma, mid) > w_hat:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    w = 0.5 * (lo + hi)
    if abs(w * zeta(sigma, w) - w_hat) > 1e-9:
        raise InvalidInputError(
            f"could not invert w_hat={w_hat!r} (residual too large); "
            "is the profile inside (0, 1/sigma]?")
    return w


@dataclass(frozen=True)
class GWOverflow:
    """Partial result of a Galton-Watson sample that hit its vertex cap.

    ``child_counts`` holds the counts generated so far (depth-first order,
    not a complete tree).
    """

    child_counts: np.ndarray
    cap: int

    @property
    def n_generated(self) -> int:
        return self.child_counts.size


def sample_gw(sigma: int, w: float, cap: int = DEFAULT_GW_CAP, rng=None):
    """A Binomial(sigma, w) Galton-Watson tree, or GWOverflow past ``cap``.

    Subcritical or critical w (sigma * w <= 1) terminates with probability
    one; supercritical w is allowed and relies on the cap.  ``rng`` may be a
    Generator or anything ``np.random.default_rng`` accepts.
    """
    if not 0.0 <= w <= 1.0:
        raise InvalidInputError(f"w must lie in [0, 1], got {w!r}")
    if cap < 1:
        raise InvalidInputError("cap must be >= 1")
    rng = np.random.default_rng(rng)
    counts, overflowed = _kernels.gw_walk(rng, sigma, w, cap)
    if overflowed:
        return GWOverflow(child_counts=counts, cap=cap)
    return PlaneTree(counts)


def _draw_z(law: ZLawSpec, rng) -> int:
    if law.family == "binomial_sigma":
        return int(rng.binomial(law.sigma, law.w))
    if law.family == "binomial_sigma_minus_1":
        return int(rng.binomial(law.sigma - 1, law.w))
    # uniform_split: marginal of the left share under a uniform split label
    y = int(rng.random() * law.sigma) + 1
    return int(rng.binomial(y - 1, law.w))


def _gw_subtrees(sigma, w, z, rng, cap):
    subs = []
    for _ in range(z):
        t = sample_gw(sigma, w, cap=cap, rng=rng)
        if isinstance(t, GWOverflow):
            raise GWOverflowError(
                f"off-backbone subtree exceeded {cap} vertices", cap=cap)
        subs.append(t)
    return tuple(subs)


def sample_ztheta(params: ModelParams, z_law: ZLawSpec, w: float, height: int,
                  rng, cap: int = DEFAULT_GW_CAP) -> SinTree:
    """Backbone-rightmost sin-tree: level l carries Z_l ~ z_law subtrees,
    each an independent Binomial(sigma, w) Galton-Watson tree, materialized
    for levels 0..height-1.

    Draw order per level: Z (one label draw first for the uniform-split
    family), then each subtree in full depth-first order.
    """
    if height < 0:
        raise InvalidInputError("height must be >= 0")
    if z_law.sigma != params.sigma:
        raise InvalidInputError(
            f"z_law.sigma = {z_law.sigma} does not match params.sigma = {params.sigma}")
    levels = []
    for _ in range(height):
        z = _draw_z(z_law, rng)
        levels.append(SinLevel(left=_gw_subtrees(params.sigma, w, z, rng, cap)))
    return SinTree(levels, backbone_rightmost=True)


def sample_iic(params: ModelParams, conditioned: bool, height: int, rng,
               cap: int = DEFAULT_GW_CAP):
    """The incipient infinite cluster, materialized to ``height``.

    Conditioned form: one backbone-rightmost sin-tree whose spine degrees
    are Binomial(sigma - 1, p_c) and whose subtrees are critical GW trees.

    Unconditioned form: the pair (left part, right part) around the spine.
    Each level draws one uniform label Y on {1..sigma}; the left tree gets
    Z ~ Bin(Y - 1, p_c) subtrees, the right tree Z~ ~ Bin(sigma - Y, p_c),
    correlated through the shared Y, with all subtrees independent critical
    GW.  Both parts are returned as backbone-rightmost sin-trees.

    Draw order (unconditioned), per level: Y, Z, the Z left subtrees, Z~,
    the Z~ right subtrees.
    """
    if height < 1:
        raise InvalidInputError("height must be >= 1")
    sigma = params.sigma
    p_c = params.p_c
    if conditioned:
        law = ZLawSpec("binomial_sigma_minus_1", sigma=sigma, w=p_c)
        return sample_ztheta(params, law, p_c, height, rng, cap=cap)
    left_levels = []
    right_levels = []
    for _ in range(height):
        y = int(rng.random() * sigma) + 1
        z = int(rng.binomial(y - 1, p_c))
        left_levels.append(SinLevel(left=_gw_subtrees(sigma, p_c, z, rng, cap)))
        z_tilde = int(rng.binomial(sigma - y, p_c))
        right_levels.append(SinLevel(left=_gw_subtrees(sigma, p_c, z_tilde, rng, cap)))
    return (SinTree(left_levels, backbone_rightmost=True),
            SinTree(right_levels, backbone_rightmost=True))


class WeightedEdgeFrontier:
    """Boundary of the invaded set as a lazily weighted min-priority queue.

    Each boundary edge is a (weight, parent id, child slot) triple; weights
    are drawn i.i.d. uniform when the edge first enters the frontier.
    Vertices are numbered by invasion order (root 0).  The draw protocol
    (sigma uniforms in slot order per invaded vertex) matches the batch
    sampler, so stepping this by hand replays :func:`sample_ipc_direct`.
    """

    def __init__(self, sigma: int, rng):
        if sigma < 2:
            raise InvalidInputError("sigma must be >= 2")
        self.sigma = sigma
        self._rng = rng
        self._heap = []
        self.n_invaded = 1  # the root
        self._extend(0)

    def _extend(self, parent: int):
        for slot in range(self.sigma):
            heapq.heappush(self._heap, (self._rng.random(), parent, slot))

    def __len__(self):
        return len(self._heap)

    def peek_min(self):
        return self._heap[0]

    def step(self):
        """Invade the minimal boundary edge; returns (weight, parent, slot, child)."""
        w, parent, slot = heapq.heappop(self._heap)
        child = self.n_invaded
        self.n_invaded += 1
        self._extend(child)
        return w, parent, slot, child


@dataclass(frozen=True)
class InvasionRun:
    """Result of n invasion steps.

    Step j invaded the edge (parents[j], slots[j]) with weight weights[j],
    creating vertex j + 1 (invasion numbering).  ``tree`` is the invaded
    fragment as a plane tree (children ordered by slot) and ``dfs_index``
    maps invasion ids to depth-first positions in it.
    """

    sigma: int
    parents: np.ndarray
    slots: np.ndarray
    weights: np.ndarray
    tree: PlaneTree
    dfs_index: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.parents.size


def _fragment_tree(parents, slots):
    n = parents.shape[0]
    kids = {}
    for j in range(n):
        kids.setdefault(int(parents[j]), []).append((int(slots[j]), j + 1))
    counts = np.empty(n + 1, dtype=np.int64)
    dfs_index = np.empty(n + 1, dtype=np.int64)
    stack = [0]
    pos = 0
    while stack:
        v = stack.pop()
        dfs_index[v] = pos
        ks = sorted(kids.get(v, ()))
        counts[pos] = len(ks)
        pos += 1
        stack.extend(child for _, child in reversed(ks))
    return PlaneTree(counts), dfs_index


def sample_ipc_direct(params: ModelParams, n_steps: int, rng) -> InvasionRun:
    """Invasion percolation, minimal-weight boundary edge first, for n steps."""
    if n_steps < 1:
        raise InvalidInputError("n_steps must be >= 1")
    parents, slots, weights = _kernels.invade_walk(rng, params.sigma, n_steps)
    tree, dfs_index = _fragment_tree(parents, slots)
    return InvasionRun(sigma=params.sigma, parents=parents, slots=slots,
                       weights=weights, tree=tree, dfs_index=dfs_index)


class WPath:
    """Piecewise-constant weight profile along the backbone.

    Segment i covers heights [heights[i], heights[i+1]) (the last one runs
    to ``max_height``) and carries the supercritical value ``w[i]`` with its
    subcritical companion ``w_hat[i] = w[i] * zeta(w[i])``.  Values are
    non-increasing in w (equivalently non-decreasing in w_hat), both
    approaching 1/sigma, which is included as the critical boundary case.
    """

    __slots__ = ("sigma", "heights", "w_hat", "max_height", "_w")

    def __init__(self, sigma: int, heights, w=None, max_height=None, w_hat=None):
        if sigma < 2:
            raise InvalidInputError("sigma must be >= 2")
        heights = np.asarray(heights, dtype=np.int64)
        if heights.ndim != 1 or heights.size == 0 or heights[0] != 0:
            raise InvalidInputError("segment heights must be 1-d and start at 0")
        if heights.size > 1 and np.any(np.diff(heights) <= 0):
            raise InvalidInputError("segment heights must be strictly increasing")
        if (w is None) == (w_hat is None):
            raise InvalidInputError("pass exactly one of w, w_hat")
        p_c = 1.0 / sigma
        if w is not None:
            w = np.asarray(w, dtype=np.float64)
            if w.shape != heights.shape:
                raise InvalidInputError("w must have one value per segment")
            if np.any(w < p_c - 1e-12) or np.any(w > 1.0):
                raise InvalidInputError("w values must lie in [1/sigma, 1]")
            if w.size > 1 and np.any(np.diff(w) > 1e-12):
                raise InvalidInputError("w must be non-increasing")
            w_hat = np.array([wi * zeta(sigma, wi) for wi in w], dtype=np.float64)
        else:
            w_hat = np.asarray(w_hat, dtype=np.float64)
            if w_hat.shape != heights.shape:
                raise InvalidInputError("w_hat must have one value per segment")
            if np.any(w_hat <= 0.0) or np.any(w_hat > p_c + 1e-12):
                raise InvalidInputError("w_hat values must lie in (0, 1/sigma]")
            if w_hat.size > 1 and np.any(np.diff(w_hat) < -1e-12):
                raise InvalidInputError("w_hat must be non-decreasing")
            w = None
        if max_height is None:
            max_height = int(heights[-1])
        if max_height < heights[-1]:
            raise InvalidInputError("max_height must cover the last segment start")
        heights.setflags(write=False)
        w_hat = np.minimum(w_hat, p_c)
        w_hat.setflags(write=False)
        self.sigma = int(sigma)
        self.heights = heights
        self.w_hat = w_hat
        self.max_height = int(max_height)
        self._w = None if w is None else np.array(w, dtype=np.float64)

    @property
    def w(self) -> np.ndarray:
        """Supercritical values, inverted from w_hat on first access."""
        if self._w is None:
            self._w = np.array(
                [_w_from_w_hat(self.sigma, wh) for wh in self.w_hat], dtype=np.float64)
        return self._w

    @property
    def n_segments(self) -> int:
        return self.heights.size

    def w_hat_at(self, n: int) -> float:
        """w_hat in force at backbone height n."""
        if n < 0 or n > self.max_height:
            raise MaterializationError(
                f"height {n} outside covered range [0, {self.max_height}]")
        return float(self.w_hat[np.searchsorted(self.heights, n, side="right") - 1])

    def __repr__(self):
        return (f"WPath(sigma={self.sigma}, {self.n_segments} segments, "
                f"max_height={self.max_height})")


def sample_w_asymptotic(k: float, envelope, max_height: int, rng=None,
                        sigma: int = 2) -> WPath:
    """Weight profile read off a lower-envelope realization at scale k.

    The subcritical value at backbone height n is
    w_hat(n) = (1 - L(n/k)/k) / sigma, clamped into (0, 1/sigma], with
    segment boundaries at ceil(k * jump time).  Heights below k * t_min
    reuse the envelope's first materialized value.  Deterministic given the
    envelope -- the randomness lives in the envelope itself, so ``rng`` is
    accepted for signature uniformity and ignored.
    """
    if k <= 0:
        raise InvalidInputError("k must be positive")
    if max_height < 0:
        raise InvalidInputError("max_height must be >= 0")
    if sigma < 2:
        raise InvalidInputError("sigma must be >= 2")
    if envelope.t_max < max_height / k:
        raise MaterializationError(
            f"envelope materialized to {envelope.t_max}, need {max_height / k}")
    starts = [0]
    vals = [float(envelope.values[0])]
    for t, ell in zip(envelope.times[1:], envelope.values[1:]):
        x = int(np.ceil(k * float(t)))
        if x > max_height:
            break
        if x == starts[-1]:
            vals[-1] = float(ell)
        else:
            starts.append(x)
            vals.append(float(ell))
    p_c = 1.0 / sigma
    w_hat = (1.0 - np.asarray(vals) / k) / sigma
    w_hat = np.clip(w_hat, 1e-12, p_c)
    return WPath(sigma, np.asarray(starts, dtype=np.int64),
                 w_hat=w_hat, max_height=max_height)


def sample_ipc_structural(params: ModelParams, w_path: WPath, height: int,
                          two_sided: bool, rng, cap: int = DEFAULT_GW_CAP):
    """Invaded cluster in structural form, driven by a weight profile.

    Conditioned mode (two_sided=False): one backbone-rightmost sin-tree;
    at height n the off-backbone degree is Bin(sigma - 1, w_hat(n)) and
    each subtree an independent Bin(sigma, w_hat(n)) GW tree, so a profile
    with one segment per height class is the right-grafted concatenation of
    its segments.

    Two-sided mode: per level a uniform label Y on {1..sigma} splits the
    degree into Z ~ Bin(Y-1, w_hat) left and Z~ ~ Bin(sigma-Y, w_hat) right;
    returns the pair of sin-trees.  Draw order per level matches
    :func:`sample_iic`: Y, Z, Z subtrees, Z~, Z~ subtrees.
    """
    if height < 1:
        raise InvalidInputError("height must be >= 1")
    if w_path.sigma != params.sigma:
        raise InvalidInputError(
            f"w_path.sigma = {w_path.sigma} does not match params.sigma = {params.sigma}")
    if w_path.max_height < height - 1:
        raise MaterializationError(
            f"w_path covers heights up to {w_path.max_height}, need {height - 1}")
    rng = np.random.default_rng(rng)
    sigma = params.sigma
    if not two_sided:
        levels = []
        for n in range(height):
            wh = w_path.w_hat_at(n)
            z = int(rng.binomial(sigma - 1, wh))
            levels.append(SinLevel(left=_gw_subtrees(sigma, wh, z, rng, cap)))
        return SinTree(levels, backbone_rightmost=True)
    left_levels = []
    right_levels = []
    for n in range(height):
        wh = w_path.w_hat_at(n)
        y = int(rng.random() * sigma) + 1
        z = int(rng.binomial(y - 1, wh))
        left_levels.append(SinLevel(left=_gw_subtrees(sigma, wh, z, rng, cap)))
        z_tilde = int(rng.binomial(sigma - y, wh))
        right_levels.append(SinLevel(left=_gw_subtrees(sigma, wh, z_tilde, rng, cap)))
    return (SinTree(left_levels, backbone_rightmost=True),
            SinTree(right_levels, backbone_rightmost=True))


def ensemble_manifest(model: str, seed: int, sigma: int, params: dict,
                      n_replicas: int) -> dict:
    """Reproducibility record attached to every ensemble output."""
    from . import __version__
    return {
        "seed": int(seed),
        "sigma": int(sigma),
        "model": str(model),
        "params": dict(params),
        "n_replicas": int(n_replicas),
        "version": __version__,
    }


def _gather(worker, n_replicas: int, workers, kwargs: dict) -> dict:
    """Run a chunk worker over [0, n_replicas), optionally across processes.

    Chunking never changes results: each replica's stream depends only on
    (seed, replica index), so the split points are irrelevant.
    """
    if workers is None or workers <= 1:
        return worker(0, n_replicas, **kwargs)
    bounds = np.linspace(0, n_replicas, int(workers) + 1).astype(np.int64)
    with ProcessPoolExecutor(max_workers=int(workers)) as pool:
        futs = [pool.submit(worker, int(lo), int(hi), **kwargs)
                for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        parts = [f.result() for f in futs]
    return {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}


def _replica_generators(seed, n_replicas, lo, hi):
    seqs = replica_sequences(seed, n_replicas)[lo:hi]
    return [np.random.Generator(np.random.PCG64(sq)) for sq in seqs]


_BIG_LEVEL = np.iinfo(np.int64).max // 2


def _iic_cond_chunk(lo, hi, sigma, n_index, n_replicas, seed):
    p_c = 1.0 / sigma
    starts = np.zeros(1, dtype=np.int64)
    whs = np.full(1, p_c)
    v = np.empty(hi - lo, dtype=np.float64)
    h = np.empty(hi - lo, dtype=np.float64)
    empty = np.empty(0, dtype=np.int64)
    for j, gen in enumerate(_replica_generators(seed, n_replicas, lo, hi)):
        vj, hj, _, _, _ = _kernels.sin_walk(
            gen, sigma, n_index, starts, whs, _kernels.MODE_COND, empty, _BIG_LEVEL)
        v[j] = vj
        h[j] = hj
    return {"v": v, "h": h}


def iic_conditioned_marginals(sigma: int, n_index: int, n_replicas: int,
                              seed: int, workers: int = 1) -> dict:
    """Depth-first walk and height of the conditioned IIC at one index.

    Runs n_replicas independent copies without materializing trees and
    returns arrays {"v": V_n, "h": H_n} of length n_replicas.
    """
    if n_index < 1:
        raise InvalidInputError("n_index must be >= 1")
    if n_replicas < 1:
        raise InvalidInputError("n_replicas must be >= 1")
    return _gather(_iic_cond_chunk, n_replicas, workers,
                   dict(sigma=sigma, n_index=n_index,
                        n_replicas=n_replicas, seed=seed))


def _iic_pair_chunk(lo, hi, sigma, n_index, n_replicas, seed):
    p_c = 1.0 / sigma
    starts = np.zeros(1, dtype=np.int64)
    whs = np.full(1, p_c)
    out = {key: np.empty(hi - lo, dtype=np.float64)
           for key in ("v_g", "h_g", "v_d", "h_d")}
    empty = np.empty(0, dtype=np.int64)
    for j, gen in enumerate(_replica_generators(seed, n_replicas, lo, hi)):
        vg, hg, _, y_used, _ = _kernels.sin_walk(
            gen, sigma, n_index, starts, whs, _kernels.MODE_LEFT, empty, _BIG_LEVEL)
        vd, hd, _, _, _ = _kernels.sin_walk(
            gen, sigma, n_index, starts, whs, _kernels.MODE_RIGHT, y_used, _BIG_LEVEL)
        out["v_g"][j] = vg
        out["h_g"][j] = hg
        out["v_d"][j] = vd
        out["h_d"][j] = hd
    return out


def iic_pair_marginals(sigma: int, n_index: int, n_replicas: int, seed: int,
                       workers: int = 1) -> dict:
    """Walk/height marginals for the two-sided IIC pair at one index.

    The two sides share the per-level uniform labels (the left walk records
    the labels it consumed and the right walk replays them, drawing fresh
    ones only for levels the left walk never reached).  Returns arrays
    {"v_g", "h_g", "v_d", "h_d"}.
    """
    if n_index < 1:
        raise InvalidInputError("n_index must be >= 1")
    if n_replicas < 1:
        raise InvalidInputError("n_replicas must be >= 1")
    return _gather(_iic_pair_chunk, n_replicas, workers,
                   dict(sigma=sigma, n_index=n_index,
                        n_replicas=n_replicas, seed=seed))


def _ipc_asym_chunk(lo, hi, sigma, k, n_index, n_replicas, seed, t_min):
    from .continuum import sample_envelope

    t_max = n_index / k + 1.0 / k
    seqs = replica_sequences(seed, n_replicas)[lo:hi]
    v = np.empty(hi - lo, dtype=np.float64)
    h = np.empty(hi - lo, dtype=np.float64)
    empty = np.empty(0, dtype=np.int64)
    for j, sq in enumerate(seqs):
        env_seq, tree_seq = sq.spawn(2)
        env = sample_envelope(t_min, t_max, np.random.Generator(np.random.PCG64(env_seq)))
        wp = sample_w_asymptotic(k, env, max_height=n_index, sigma=sigma)
        gen = np.random.Generator(np.random.PCG64(tree_seq))
        vj, hj, _, _, status = _kernels.sin_walk(
            gen, sigma, n_index, wp.heights, wp.w_hat, _kernels.MODE_COND,
            empty, n_index)
        if status == _kernels.STATUS_STOPPED:
            raise MaterializationError("walk left the covered height range")
        v[j] = vj
        h[j] = hj
    return {"v": v, "h": h}


def ipc_asymptotic_marginals(sigma: int, k: float, n_index: int,
                             n_replicas: int, seed: int, t_min: float = 1e-3,
                             workers: int = 1) -> dict:
    """Walk/height marginals of the structural invaded cluster at scale k.

    Each replica draws its own envelope realization on [t_min, n/k + 1/k],
    converts it to a weight profile at scale k, and runs the conditioned
    backbone walk under that profile to index n.  Streams: replica
    sequence spawned into (envelope, tree) roles, in that order.
    """
    if n_index < 1:
        raise InvalidInputError("n_index must be >= 1")
    if n_replicas < 1:
        raise InvalidInputError("n_replicas must be >= 1")
    if not 0.0 < t_min <= 1.0 / k:
        raise InvalidInputError(
            f"t_min must lie in (0, 1/k] so every height is covered, got {t_min!r}")
    return _gather(_ipc_asym_chunk, n_replicas, workers,
                   dict(sigma=sigma, k=k, n_index=n_index,
                        n_replicas=n_replicas, seed=seed, t_min=t_min))
