# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Mirror of ``_pykern`` (see its module docstring for the draw protocol).
Each function must consume random draws from the supplied generator in
exactly the same order as the pure-Python version, so that both backends
produce bit-identical output from the same stream state.
"""

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memset

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (binomial_t, random_binomial,
                                           random_standard_normal,
                                           random_standard_uniform)

import numpy as np

cnp.import_array()

MODE_COND = 0
MODE_LEFT = 1
MODE_RIGHT = 2

STATUS_RUNNING = 0
STATUS_STOPPED = 1
STATUS_EXHAUSTED = 2


cdef bitgen_t *_bitgen(object gen) except NULL:
    capsule = gen.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, b"BitGenerator"):
        raise ValueError("generator does not expose a BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, b"BitGenerator")


cdef void _copy_int64(cnp.ndarray[cnp.int64_t, ndim=1] out, long *buf, long n):
    cdef long j
    for j in range(n):
        out[j] = buf[j]


def gw_walk(object gen, long sigma, double w, long cap):
    """See _pykern.gw_walk; identical draw protocol."""
    cdef bitgen_t *bg = _bitgen(gen)
    cdef binomial_t bstate
    memset(&bstate, 0, sizeof(binomial_t))
    cdef long capacity = 4096 if cap > 4096 else cap
    if capacity < 1:
        capacity = 1
    cdef long *buf = <long *> malloc(capacity * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef long open_edges = 1
    cdef long i = 0
    cdef long k
    cdef long *grown
    cdef bint overflowed = False
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out
    try:
        with gen.bit_generator.lock:
            while open_edges > 0:
                if i >= cap:
                    overflowed = True
                    break
                if i == capacity:
                    capacity = cap if 2 * capacity > cap else 2 * capacity
                    grown = <long *> realloc(buf, capacity * sizeof(long))
                    if grown == NULL:
                        raise MemoryError()
                    buf = grown
                k = <long> random_binomial(bg, w, sigma, &bstate)
                buf[i] = k
                open_edges += k - 1
                i += 1
        out = np.empty(i, dtype=np.int64)
        _copy_int64(out, buf, i)
        return out, overflowed
    finally:
        free(buf)


def sin_walk(object gen, long sigma, long n_index,
             cnp.ndarray[cnp.int64_t, ndim=1] seg_starts,
             cnp.ndarray[cnp.float64_t, ndim=1] seg_w,
             int mode,
             cnp.ndarray[cnp.int64_t, ndim=1] y_in,
             long max_level):
    """See _pykern.sin_walk; identical draw protocol."""
    cdef bitgen_t *bg = _bitgen(gen)
    cdef binomial_t bstate
    memset(&bstate, 0, sizeof(binomial_t))
    cdef bint split = mode != MODE_COND
    cdef cnp.ndarray[cnp.int64_t, ndim=1] y_out = np.empty(
        n_index + 1 if split else 0, dtype=np.int64)
    cdef long n_y = 0
    cdef long v = 0
    cdef long i = 0
    cdef long level = 0
    cdef long p = 0
    cdef long nseg = seg_starts.shape[0]
    cdef long n_y_in = y_in.shape[0]
    cdef double w = 0.0
    cdef long y, z, k, s
    cdef int status = STATUS_RUNNING
    cdef bint done = False
    cdef long h = 0
    cdef long levels_used = 0
    cdef long rs_cap = 64
    cdef long rs_top = 0
    cdef long *rs = <long *> malloc(rs_cap * sizeof(long))
    cdef long *rs_grown
    if rs == NULL:
        raise MemoryError()
    try:
        with gen.bit_generator.lock:
            while not done:
                # about to visit the spine vertex at this level (DFS index i)
                if i == n_index:
                    h = level
                    levels_used = level
                    break
                if level > max_level:
                    h = level
                    levels_used = level
                    status = 1
                    break
                while p + 1 < nseg and seg_starts[p + 1] <= level:
                    p += 1
                w = seg_w[p]
                if mode == MODE_COND:
                    z = <long> random_binomial(bg, w, sigma - 1, &bstate)
                else:
                    if level < n_y_in:
                        y = y_in[level]
                    else:
                        y = <long> (random_standard_uniform(bg) * sigma) + 1
                    y_out[n_y] = y
                    n_y += 1
                    if mode == MODE_LEFT:
                        z = <long> random_binomial(bg, w, y - 1, &bstate)
                    else:
                        z = <long> random_binomial(bg, w, sigma - y, &bstate)
                v += z
                i += 1
                for s in range(z):
                    # subtree root sits at depth level + 1
                    if i == n_index:
                        h = level + 1
                        levels_used = level + 1
                        done = True
                        break
                    k = <long> random_binomial(bg, w, sigma, &bstate)
                    v += k - 1
                    i += 1
                    rs_top = 1
                    rs[0] = k
                    while rs_top > 0:
                        while rs_top > 0 and rs[rs_top - 1] == 0:
                            rs_top -= 1
                        if rs_top == 0:
                            break
                        rs[rs_top - 1] -= 1
                        if i == n_index:
                            h = level + 1 + rs_top
                            levels_used = level + 1
                            done = True
                            break
                        k = <long> random_binomial(bg, w, sigma, &bstate)
                        v += k - 1
                        i += 1
                        if rs_top == rs_cap:
                            rs_cap *= 2
                            rs_grown = <long *> realloc(rs, rs_cap * sizeof(long))
                            if rs_grown == NULL:
                                raise MemoryError()
                            rs = rs_grown
                        rs[rs_top] = k
                        rs_top += 1
                    if done:
                        break
                if not done:
                    level += 1
        return v, h, levels_used, y_out[:n_y].copy(), status
    finally:
        free(rs)


cdef struct HeapEntry:
    double w
    long parent
    long slot


cdef inline bint _heap_less(HeapEntry a, HeapEntry b):
    if a.w != b.w:
        return a.w < b.w
    if a.parent != b.parent:
        return a.parent < b.parent
    return a.slot < b.slot


cdef void _heap_push(HeapEntry *heap, long *size, HeapEntry e):
    cdef long j = size[0]
    cdef long up
    cdef HeapEntry tmp
    heap[j] = e
    size[0] = j + 1
    while j > 0:
        up = (j - 1) >> 1
        if _heap_less(heap[j], heap[up]):
            tmp = heap[j]
            heap[j] = heap[up]
            heap[up] = tmp
            j = up
        else:
            break


cdef HeapEntry _heap_pop(HeapEntry *heap, long *size):
    cdef HeapEntry top = heap[0]
    cdef HeapEntry tmp
    cdef long n = size[0] - 1
    cdef long j = 0
    cdef long child
    size[0] = n
    heap[0] = heap[n]
    while True:
        child = 2 * j + 1
        if child >= n:
            break
        if child + 1 < n and _heap_less(heap[child + 1], heap[child]):
            child += 1
        if _heap_less(heap[child], heap[j]):
            tmp = heap[j]
            heap[j] = heap[child]
            heap[child] = tmp
            j = child
        else:
            break
    return top


def invade_walk(object gen, long sigma, long n_steps):
    """See _pykern.invade_walk; identical draw protocol.

    The heap key is (weight, parent, slot) lexicographic in both backends,
    so pops agree even on exact weight ties.
    """
    cdef bitgen_t *bg = _bitgen(gen)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] parents = np.empty(n_steps, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] slots = np.empty(n_steps, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] weights = np.empty(n_steps, dtype=np.float64)
    cdef long heap_cap = sigma * (n_steps + 1) + 1
    cdef HeapEntry *heap = <HeapEntry *> malloc(heap_cap * sizeof(HeapEntry))
    if heap == NULL:
        raise MemoryError()
    cdef long heap_size = 0
    cdef HeapEntry e
    cdef long s, j
    try:
        with gen.bit_generator.lock:
            for s in range(sigma):
                e.w = random_standard_uniform(bg)
                e.parent = 0
                e.slot = s
                _heap_push(heap, &heap_size, e)
            for j in range(n_steps):
                e = _heap_pop(heap, &heap_size)
                parents[j] = e.parent
                slots[j] = e.slot
                weights[j] = e.w
                for s in range(sigma):
                    e.w = random_standard_uniform(bg)
                    e.parent = j + 1
                    e.slot = s
                    _heap_push(heap, &heap_size, e)
        return parents, slots, weights
    finally:
        free(heap)


def sde_path(object gen, long n_steps, double dt, double sqrt_step,
             cnp.ndarray[cnp.float64_t, ndim=1] env_t,
             cnp.ndarray[cnp.float64_t, ndim=1] env_v,
             double t_max, long start_ptr):
    """See _pykern.sde_path; identical draw protocol."""
    cdef bitgen_t *bg = _bitgen(gen)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = np.empty(n_steps + 1, dtype=np.float64)
    y[0] = 0.0
    cdef double ymin = 0.0
    cdef double cur = 0.0
    cdef long ptr = start_ptr
    cdef long exhausted_at = -1
    cdef long m = env_t.shape[0]
    cdef long idx
    cdef double u, noise
    with gen.bit_generator.lock:
        for idx in range(n_steps):
            noise = random_standard_normal(bg)
            if exhausted_at >= 0:
                y[idx + 1] = cur
                continue
            u = -ymin
            if u > t_max:
                exhausted_at = idx
                y[idx + 1] = cur
                continue
            while ptr + 1 < m and env_t[ptr + 1] <= u:
                ptr += 1
            cur = cur + sqrt_step * noise - env_v[ptr] * dt
            y[idx + 1] = cur
            if cur < ymin:
                ymin = cur
    return y, exhausted_at


cdef inline double _overlap_fraction(double h0, double h1, double lo, double hi):
    cdef double a, b, top, bot
    if h0 == h1:
        return 1.0 if lo <= h0 <= hi else 0.0
    a = h0 if h0 < h1 else h1
    b = h1 if h1 > h0 else h0
    top = b if b < hi else hi
    bot = a if a > lo else lo
    if top <= bot:
        return 0.0
    return (top - bot) / (b - a)


def sde_block_many(list gens,
                   cnp.ndarray[cnp.float64_t, ndim=1] y,
                   cnp.ndarray[cnp.float64_t, ndim=1] ymin,
                   cnp.ndarray[cnp.float64_t, ndim=1] occ,
                   cnp.ndarray[cnp.int64_t, ndim=1] ptr,
                   cnp.ndarray[cnp.int64_t, ndim=1] status,
                   long n_steps, double dt, double sqrt_step,
                   list env_t_list, list env_v_list,
                   cnp.ndarray[cnp.float64_t, ndim=1] t_max,
                   double alpha, double beta, double lo, double hi,
                   bint do_occ, double stop_floor):
    """See _pykern.sde_block_many; identical draw protocol."""
    cdef long n_rep = y.shape[0]
    cdef long r, idx, pp, m
    cdef double yy, ym, oc, tmax_r, u, ynew, ymnew, h0, h1, noise
    cdef bint exhausted
    cdef bitgen_t *bg
    cdef cnp.ndarray[cnp.float64_t, ndim=1] env_t
    cdef cnp.ndarray[cnp.float64_t, ndim=1] env_v
    for r in range(n_rep):
        if status[r] != STATUS_RUNNING:
            continue
        gen = gens[r]
        bg = _bitgen(gen)
        env_t = env_t_list[r]
        env_v = env_v_list[r]
        m = env_t.shape[0]
        tmax_r = t_max[r]
        yy = y[r]
        ym = ymin[r]
        pp = ptr[r]
        oc = occ[r]
        exhausted = False
        with gen.bit_generator.lock:
            for idx in range(n_steps):
                noise = random_standard_normal(bg)
                if exhausted:
                    continue
                u = -ym
                if u > tmax_r:
                    exhausted = True
                    continue
                while pp + 1 < m and env_t[pp + 1] <= u:
                    pp += 1
                ynew = yy + sqrt_step * noise - env_v[pp] * dt
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
