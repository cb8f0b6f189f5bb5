"""Pure-Python reference kernels.

Every kernel here has a compiled twin in ``_ckern``.  The two backends must
consume random draws in exactly the same order from the same stream, so that
a given ``numpy.random.Generator`` state produces bit-identical output under
either backend.  The draw protocol is therefore part of each kernel's
contract and is spelled out in its docstring; do not reorder draws.

Scalar conventions shared by both backends:

* binomial counts come from ``Generator.binomial(n, p)`` one vertex at a
  time, in depth-first order;
* uniform labels on ``{1..sigma}`` are ``floor(u * sigma) + 1`` with ``u``
  a single ``Generator.random()`` double;
* Gaussian increments come from ``standard_normal``; a driving kernel always
  consumes exactly ``n_steps`` normals per call, even when it stops
  integrating early.
"""

from __future__ import annotations

import heapq

import numpy as np

MODE_COND = 0
MODE_LEFT = 1
MODE_RIGHT = 2

STATUS_RUNNING = 0
STATUS_STOPPED = 1
STATUS_EXHAUSTED = 2


def gw_walk(gen, sigma, w, cap):
    """Child counts of a Binomial(sigma, w) Galton-Watson tree, DFS order.

    Draw protocol: one ``binomial(sigma, w)`` per vertex, in depth-first
    order, until the walk ``sum(k_i - 1)`` first hits -1.  Counting stops
    after ``cap`` vertices: the partial count array (not a valid tree) is
    returned together with ``overflowed=True`` and no further draws are made.
    """
    out = np.empty(min(cap, 4096), dtype=np.int64)
    open_edges = 1
    i = 0
    while open_edges > 0:
        if i >= cap:
            return out[:i].copy(), True
        if i == out.shape[0]:
            out = np.resize(out, min(cap, 2 * out.shape[0]))
        k = gen.binomial(sigma, w)
        out[i] = k
        open_edges += k - 1
        i += 1
    return out[:i].copy(), False


def sin_walk(gen, sigma, n_index, seg_starts, seg_w, mode, y_in, max_level):
    """Lukaciewicz value and height at one DFS index of a backbone tree.

    Walks, without storing it, the depth-first sequence of a tree made of a
    rightmost backbone whose vertex at level ``l`` carries ``Z_l`` subtrees
    to the left of the spine, each subtree an independent
    Binomial(sigma, w_l) Galton-Watson tree, with ``w_l`` read from the step
    function (seg_starts, seg_w).

    mode selects the spine offspring law:
      MODE_COND   Z ~ Binomial(sigma - 1, w_l)
      MODE_LEFT   Y ~ Uniform{1..sigma},  Z ~ Binomial(Y - 1, w_l)
      MODE_RIGHT  Y as MODE_LEFT,         Z ~ Binomial(sigma - Y, w_l)

    In the split modes the per-level labels come from ``y_in`` while it
    lasts and are drawn fresh after; the labels actually used are returned
    so a second walk can share them.

    Draw protocol, per backbone level: the label draw if any (one uniform
    double, skipped when the label is supplied), then one binomial for Z,
    then each of the Z subtrees in full depth-first order (one
    ``binomial(sigma, w_l)`` per subtree vertex).  The walk stops *before*
    drawing anything for DFS index ``n_index``.

    Returns ``(v, h, levels_used, y_used, status)`` where status 1 means the
    step function ran out (level exceeded max_level) before index n_index.
    """
    split = mode != MODE_COND
    y_out = np.empty(n_index + 1 if split else 0, dtype=np.int64)
    n_y = 0
    v = 0
    i = 0
    level = 0
    p = 0
    nseg = seg_starts.shape[0]
    while True:
        # about to visit the spine vertex at this level (DFS index i)
        if i == n_index:
            return v, level, level, y_out[:n_y].copy(), STATUS_RUNNING
        if level > max_level:
            return v, level, level, y_out[:n_y].copy(), 1
        while p + 1 < nseg and seg_starts[p + 1] <= level:
            p += 1
        w = seg_w[p]
        if mode == MODE_COND:
            z = int(gen.binomial(sigma - 1, w))
        else:
            if level < y_in.shape[0]:
                y = int(y_in[level])
            else:
                y = int(gen.random() * sigma) + 1
            y_out[n_y] = y
            n_y += 1
            if mode == MODE_LEFT:
                z = int(gen.binomial(y - 1, w))
            else:
                z = int(gen.binomial(sigma - y, w))
        v += z  # spine vertex has z + 1 children
        i += 1
        for _ in range(z):
            # subtree root sits at depth level + 1
            if i == n_index:
                return v, level + 1, level + 1, y_out[:n_y].copy(), STATUS_RUNNING
            k = int(gen.binomial(sigma, w))
            v += k - 1
            i += 1
            rs = [k]
            while rs:
                while rs and rs[-1] == 0:
                    rs.pop()
                if not rs:
                    break
                rs[-1] -= 1
                if i == n_index:
                    return v, level + 1 + len(rs), level + 1, y_out[:n_y].copy(), STATUS_RUNNING
                k = int(gen.binomial(sigma, w))
                v += k - 1
                i += 1
                rs.append(k)
        level += 1


def invade_walk(gen, sigma, n_steps):
    """Invasion of the sigma-ary tree: lowest-weight boundary edge first.

    Vertices are numbered by invasion order, the root being 0.  Edge weights
    are independent Uniform(0,1).

    Draw protocol: sigma uniforms for the root's child edges in slot order
    0..sigma-1, then, after each invasion step, sigma uniforms for the new
    vertex's child edges in slot order.

    Returns (parents, slots, weights) arrays of length n_steps: step j
    invades the edge from vertex ``parents[j]`` through child slot
    ``slots[j]``, with weight ``weights[j]``, creating vertex ``j + 1``.
    Weight ties (measure zero) are broken arbitrarily and the break may
    differ between backends.
    """
    parents = np.empty(n_steps, dtype=np.int64)
    slots = np.empty(n_steps, dtype=np.int64)
    weights = np.empty(n_steps, dtype=np.float64)
    heap = []
    for s in range(sigma):
        heapq.heappush(heap, (gen.random(), 0, s))
    for j in range(n_steps):
        w, p, s = heapq.heappop(heap)
        parents[j] = p
        slots[j] = s
        weights[j] = w
        child = j + 1
        for s2 in range(sigma):
            heapq.heappush(heap, (gen.random(), child, s2))
    return parents, slots, weights


def _advance(env_t, ptr, u):
    m = env_t.shape[0]
    while ptr + 1 < m and env_t[ptr + 1] <= u:
        ptr += 1
    return ptr


def sde_path(gen, n_steps, dt, sqrt_step, env_t, env_v, t_max, start_ptr):
    """One Euler path of dY = sqrt(diffusion) dB - env(-min Y) dt, stored.

    ``env_t``/``env_v`` is a right-continuous step function (value
    ``env_v[i]`` on ``[env_t[i], env_t[i+1])``); the lookup pointer starts
    at ``start_ptr`` and only moves right, which realises the small-time
    clamp chosen by the caller.  ``sqrt_step`` is sqrt(diffusion * dt).

    Draw protocol: exactly ``n_steps`` standard normals are consumed, one
    per step, even if the walk leaves the materialized envelope range early
    (integration then stops and the exhaustion step index is returned;
    -1 means the full horizon was integrated).

    Returns (y, exhausted_at) with ``y`` of length n_steps + 1, frozen past
    an exhaustion point.
    """
    noise = gen.standard_normal(n_steps)
    y = np.empty(n_steps + 1, dtype=np.float64)
    y[0] = 0.0
    ymin = 0.0
    ptr = start_ptr
    exhausted_at = -1
    cur = 0.0
    for idx in range(n_steps):
        if exhausted_at >= 0:
            y[idx + 1] = cur
            continue
        u = -ymin
        if u > t_max:
            exhausted_at = idx
            y[idx + 1] = cur
            continue
        ptr = _advance(env_t, ptr, u)
        cur = cur + sqrt_step * noise[idx] - env_v[ptr] * dt
        y[idx + 1] = cur
        if cur < ymin:
            ymin = cur
    return y, exhausted_at


def _overlap_fraction(h0, h1, lo, hi):
    if h0 == h1:
        return 1.0 if lo <= h0 <= hi else 0.0
    a = h0 if h0 < h1 else h1
    b = h1 if h1 > h0 else h0
    top = b if b < hi else hi
    bot = a if a > lo else lo
    if top <= bot:
        return 0.0
    return (top - bot) / (b - a)


def sde_block_many(gens, y, ymin, occ, ptr, status, n_steps, dt, sqrt_step,
                   env_t_list, env_v_list, t_max, alpha, beta, lo, hi,
                   do_occ, stop_floor):
    """Advance a batch of Euler walks by one block of ``n_steps`` steps.

    State arrays (y, ymin, occ, ptr, status) are updated in place; replica r
    uses the step function (env_t_list[r], env_v_list[r]) and the generator
    gens[r].  Replicas whose status is not STATUS_RUNNING are skipped and
    consume nothing.  A running replica consumes exactly n_steps normals.

    When ``do_occ`` the occupation time of ``alpha * Y + beta * minY`` in
    [lo, hi] is accumulated into ``occ`` with the exact piecewise-linear
    overlap of each step, and a replica is marked STATUS_STOPPED at the end
    of a block in which ``-minY`` passed ``stop_floor`` (by then the
    tracked functional can never re-enter the window).  Leaving the
    materialized envelope range marks STATUS_EXHAUSTED; integration freezes
    but the block's draws are still consumed.
    """
    n_rep = y.shape[0]
    for r in range(n_rep):
        if status[r] != STATUS_RUNNING:
            continue
        noise = gens[r].standard_normal(n_steps)
        env_t = env_t_list[r]
        env_v = env_v_list[r]
        tmax_r = t_max[r]
        yy = y[r]
        ym = ymin[r]
        pp = int(ptr[r])
        oc = occ[r]
        exhausted = False
        for idx in range(n_steps):
            if exhausted:
                continue
            u = -ym
            if u > tmax_r:
                exhausted = True
                continue
            pp = _advance(env_t, pp, u)
            ynew = yy + sqrt_step * noise[idx] - env_v[pp] * dt
            ymnew = ynew if ynew < ym else ym
            if do_occ:
                h0 = alpha * yy + beta * ym
                h1 = alpha * ynew + beta * ymnew
                oc += dt * _overlap_fraction(h0, h1, lo, hi)
            yy = ynew
            ym = ymnew
        y[r] = yy
        ymin[r] = ym
        ptr[r] = pp
        occ[r] = oc
        if exhausted:
            status[r] = STATUS_EXHAUSTED
        elif do_occ and -ym > stop_floor:
            status[r] = STATUS_STOPPED
