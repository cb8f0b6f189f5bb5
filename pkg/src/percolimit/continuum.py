"""Continuum limit objects.

The Poisson lower-envelope process L, an Euler solver for the drifted
equations E(L) and E(L/2), the scaled functionals appearing in the three
coding-path limits, first hitting times, and the two-sided continuum tree
pseudo-metric.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .codec import LatticePath
from .errors import InvalidInputError, MaterializationError
from .seeding import replica_sequences

__all__ = [
    "EnvelopeProcess",
    "LimitPath",
    "sample_envelope",
    "extend_envelope",
    "envelope_value",
    "write_envelope_csv",
    "read_envelope_csv",
    "solve_sde",
    "write_limit_path_csv",
    "read_limit_path_csv",
    "limit_functional",
    "first_hitting",
    "continuum_metric",
    "sde_marginal_ensemble",
    "sde_occupation_ensemble",
]

LIMIT_FUNCTIONALS = ("lukaciewicz_R", "height_R", "height_side")


class EnvelopeProcess:
    """Piecewise-constant realization of the Poisson lower envelope.

    ``values[i]`` holds on ``[times[i], times[i+1])`` (and ``values[-1]``
    up to ``t_max``); ``times[0]`` is the materialization start t_min, the
    later times are the jumps.  Values are strictly decreasing and
    nonnegative -- the zero envelope is the constant 0 used for the IIC
    reduction.
    """

    __slots__ = ("times", "values", "t_max")

    def __init__(self, times, values, t_max):
        times = np.asarray(times, dtype=np.float64)
        values = np.asarray(values, dtype=np.float64)
        if times.ndim != 1 or times.size == 0 or times.shape != values.shape:
            raise InvalidInputError("times and values must be matching 1-d arrays")
        if times[0] < 0.0:
            raise InvalidInputError("t_min must be nonnegative")
        if np.any(np.diff(times) <= 0.0):
            raise InvalidInputError("jump times must be strictly increasing")
        if np.any(np.diff(values) >= 0.0):
            raise InvalidInputError("envelope values must be strictly decreasing")
        if values[-1] < 0.0 or not np.all(np.isfinite(values)):
            raise InvalidInputError("envelope values must be finite and nonnegative")
        if t_max < times[-1]:
            raise InvalidInputError("t_max must cover the last jump")
        times = times.copy()
        values = values.copy()
        times.setflags(write=False)
        values.setflags(write=False)
        self.times = times
        self.values = values
        self.t_max = float(t_max)

    @classmethod
    def constant(cls, value: float, t_min: float = 0.0, t_max: float = np.inf):
        """An envelope frozen at one value on [t_min, t_max] (no jumps)."""
        return cls(np.array([t_min]), np.array([float(value)]), t_max)

    @property
    def t_min(self) -> float:
        return float(self.times[0])

    @property
    def n_jumps(self) -> int:
        return self.times.size - 1

    def value_at(self, t) -> float:
        return envelope_value(self, t)

    def __reduce__(self):
        return (EnvelopeProcess,
                (np.array(self.times), np.array(self.values), self.t_max))

    def __repr__(self):
        return (f"EnvelopeProcess(t_min={self.t_min:g}, t_max={self.t_max:g}, "
                f"{self.n_jumps} jumps, last={self.values[-1]:g})")


def sample_envelope(t_min: float, t_max: float, rng=None) -> EnvelopeProcess:
    """Draw the lower envelope of a unit Poisson process on [t_min, t_max].

    Markov jump construction: L(t_min) ~ Exponential(rate t_min); from
    level l, the next jump comes after an Exponential(rate l) gap and lands
    uniformly on (0, l).  The marginal law is P(L(t) > y) = exp(-t y).

    Draw protocol: one exponential for the initial level; then per jump one
    exponential for the gap followed by one uniform for the value -- the
    gap that overshoots t_max ends the loop before any value is drawn.
    """
    if not 0.0 < t_min < t_max:
        raise InvalidInputError("need 0 < t_min < t_max")
    rng = np.random.default_rng(rng)
    times = [t_min]
    values = [rng.exponential(1.0 / t_min)]
    t = t_min
    while True:
        level = values[-1]
        if level <= 0.0:
            break
        t = t + rng.exponential(1.0 / level)
        if t > t_max:
            break
        values.append(level * rng.random())
        times.append(t)
    return EnvelopeProcess(np.asarray(times), np.asarray(values), t_max)


def extend_envelope(env: EnvelopeProcess, new_t_max: float, rng=None) -> EnvelopeProcess:
    """Continue a realization to a later t_max (memoryless in the gap)."""
    if new_t_max <= env.t_max:
        raise InvalidInputError("new_t_max must exceed the current t_max")
    if not np.isfinite(env.t_max):
        raise InvalidInputError("cannot extend an envelope with infinite t_max")
    rng = np.random.default_rng(rng)
    times = list(env.times)
    values = list(env.values)
    t = env.t_max
    while True:
        level = values[-1]
        if level <= 0.0:
            break
        t = t + rng.exponential(1.0 / level)
        if t > new_t_max:
            break
        values.append(level * rng.random())
        times.append(t)
    return EnvelopeProcess(np.asarray(times), np.asarray(values), new_t_max)


def envelope_value(env: EnvelopeProcess, t) -> float:
    """Right-continuous step lookup L(t) on [t_min, t_max]."""
    t = float(t)
    if t < env.t_min:
        raise MaterializationError(
            f"envelope unmaterialized below t_min={env.t_min}, asked for {t}")
    if t > env.t_max:
        raise MaterializationError(
            f"envelope materialized only to t_max={env.t_max}, asked for {t}")
    return float(env.values[np.searchsorted(env.times, t, side="right") - 1])


def write_envelope_csv(env: EnvelopeProcess, fname) -> None:
    """Two-section CSV: the (t_min, initial value) header pair, then jumps."""
    with open(fname, "w") as fh:
        fh.write("t_min,initial_value\n")
        fh.write(f"{env.t_min!r},{float(env.values[0])!r}\n")
        fh.write("t_jump,value\n")
        for t, v in zip(env.times[1:], env.values[1:]):
            fh.write(f"{float(t)!r},{float(v)!r}\n")


def read_envelope_csv(fname, t_max=None) -> EnvelopeProcess:
    """Inverse of write_envelope_csv.

    The file does not record t_max; by default the envelope is taken as
    materialized to its last jump (or t_min when jumpless), which is the
    conservative choice.  Pass t_max to assert a wider range.
    """
    with open(fname) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 3 or lines[0] != "t_min,initial_value" or lines[2] != "t_jump,value":
        raise InvalidInputError(f"{fname}: not an envelope CSV (bad section headers)")
    t_min, l0 = (float(x) for x in lines[1].split(","))
    times = [t_min]
    values = [l0]
    for ln in lines[3:]:
        t, v = (float(x) for x in ln.split(","))
        times.append(t)
        values.append(v)
    if t_max is None:
        t_max = times[-1]
    return EnvelopeProcess(np.asarray(times), np.asarray(values), t_max)


class LimitPath:
    """Euler path of one of the limit equations on a uniform dt-grid.

    ``y[0] = 0``; ``ymin`` is the running infimum.  ``variant`` records
    which drift the path solved ("E(L)" or "E(L/2)"), ``diffusion`` the
    multiplier on the Brownian term (the quadratic variation per unit
    time), and ``seed`` the driving-noise seed when one was given.
    """

    __slots__ = ("y", "ymin", "dt", "variant", "diffusion", "seed")

    def __init__(self, y, dt, variant, diffusion=1.0, seed=None):
        y = np.asarray(y, dtype=np.float64)
        if y.ndim != 1 or y.size < 2 or y[0] != 0.0:
            raise InvalidInputError("y must be a 1-d path started at 0")
        if dt <= 0:
            raise InvalidInputError("dt must be positive")
        ymin = np.minimum.accumulate(y)
        y.setflags(write=False)
        ymin.setflags(write=False)
        self.y = y
        self.ymin = ymin
        self.dt = float(dt)
        self.variant = str(variant)
        self.diffusion = float(diffusion)
        self.seed = seed

    @property
    def n_steps(self) -> int:
        return self.y.size - 1

    @property
    def T(self) -> float:
        return self.n_steps * self.dt

    @property
    def grid_times(self) -> np.ndarray:
        return np.arange(self.y.size) * self.dt

    def __repr__(self):
        return (f"LimitPath({self.variant}, T={self.T:g}, dt={self.dt:g}, "
                f"diffusion={self.diffusion:g})")


def _drift_values(env: EnvelopeProcess, variant: str) -> np.ndarray:
    if variant == "E(L)":
        return np.asarray(env.values, dtype=np.float64)
    if variant == "E(L/2)":
        return np.asarray(env.values, dtype=np.float64) / 2.0
    raise InvalidInputError(f"variant must be 'E(L)' or 'E(L/2)', got {variant!r}")


def _clamp_ptr(drift_vals: np.ndarray, eps: float) -> int:
    """Index of the first envelope segment with drift below 1/eps.

    Realizes the small-time clamp: the drift lookup starts at this segment
    and never moves left, so arguments below the clamp point read the
    clamped value.  The clamp only matters on an initial window that
    vanishes as eps -> 0.
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    below = np.nonzero(drift_vals < 1.0 / eps)[0]
    if below.size == 0:
        raise MaterializationError(
            "envelope exceeds 1/eps on its whole materialized range; "
            "extend it or relax eps")
    return int(below[0])


def solve_sde(envelope: EnvelopeProcess, variant: str, T: float = 20.0,
              dt: float = 1e-4, diffusion: float = 1.0, rng=None,
              eps: float = 1e-3) -> LimitPath:
    """Euler scheme for Y_t = sqrt(diffusion) B_t - int_0^t drift(-Ymin_s) ds.

    drift is the envelope for variant "E(L)" and half of it for "E(L/2)",
    evaluated with the small-time clamp at eps (see _clamp_ptr).  Raises
    when -Ymin leaves the materialized envelope range before T; envelopes
    with t_max = inf (constants) never exhaust.
    """
    if T <= 0 or dt <= 0:
        raise InvalidInputError("T and dt must be positive")
    n_steps = int(round(T / dt))
    if n_steps < 1:
        raise InvalidInputError("T/dt must round to at least one step")
    if diffusion <= 0:
        raise InvalidInputError("diffusion must be positive")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    gen = np.random.default_rng(rng)
    drift_vals = _drift_values(envelope, variant)
    ptr = _clamp_ptr(drift_vals, eps)
    y, exhausted_at = _kernels.sde_path(
        gen, n_steps, dt, float(np.sqrt(diffusion * dt)),
        np.asarray(envelope.times), drift_vals, envelope.t_max, ptr)
    if exhausted_at >= 0:
        raise MaterializationError(
            f"-Ymin left the materialized envelope range at step {exhausted_at} "
            f"(t={exhausted_at * dt:g}); extend the envelope past "
            f"t_max={envelope.t_max:g}")
    return LimitPath(y, dt, variant, diffusion=diffusion, seed=seed)


def write_limit_path_csv(path: LimitPath, fname) -> None:
    with open(fname, "w") as fh:
        fh.write("t,Y,Ymin\n")
        for t, yv, mv in zip(path.grid_times, path.y, path.ymin):
            fh.write(f"{float(t)!r},{float(yv)!r},{float(mv)!r}\n")


def read_limit_path_csv(fname, variant="unknown", diffusion=1.0) -> LimitPath:
    data = np.loadtxt(fname, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3 or data.shape[0] < 2:
        raise InvalidInputError(f"{fname}: expected t,Y,Ymin rows")
    dt = data[1, 0] - data[0, 0]
    return LimitPath(data[:, 1], dt, variant, diffusion=diffusion)


def limit_functional(path: LimitPath, which: str, gamma: float = 0.5) -> LatticePath:
    """Pointwise limit-law transform of a limit path.

    which selects the line: "lukaciewicz_R" gives gamma^{1/2} (Y - Ymin),
    "height_R" gives gamma^{-1/2} (2Y - 3Ymin), "height_side" gives
    gamma^{-1/2} (Y - 2Ymin).  gamma defaults to the binary-tree value 1/2.

    The returned path carries a tail_floor: past the materialized window
    the height-type functionals dip to gamma^{-1/2} (-Ymin_end) at the next
    running-minimum epoch and never below, while the reflected walk
    functional returns to 0 there.
    """
    if not 0.0 < gamma < 1.0:
        raise InvalidInputError("gamma must lie in (0, 1)")
    root = float(np.sqrt(gamma))
    y, ymin = path.y, path.ymin
    if which == "lukaciewicz_R":
        vals = root * (y - ymin)
        tail = 0.0
    elif which == "height_R":
        vals = (2.0 * y - 3.0 * ymin) / root
        tail = -ymin[-1] / root
    elif which == "height_side":
        vals = (y - 2.0 * ymin) / root
        tail = -ymin[-1] / root
    else:
        raise InvalidInputError(
            f"unknown functional {which!r}; pick one of {LIMIT_FUNCTIONALS}")
    return LatticePath(vals, time_scale=1.0 / path.dt, tail_floor=tail)


def first_hitting(path: LimitPath, y: float) -> float:
    """First time Y reaches -y, linearly interpolated; inf if not by T."""
    if y <= 0:
        raise InvalidInputError("level y must be positive")
    hit = np.nonzero(path.y <= -y)[0]
    if hit.size == 0:
        return np.inf
    i = int(hit[0])
    if i == 0:
        return 0.0
    y0, y1 = path.y[i - 1], path.y[i]
    frac = (y0 + y) / (y0 - y1)
    return (i - 1 + frac) * path.dt


def _inf_on(path: LatticePath, a: float, b: float) -> float:
    """Infimum of a piecewise-linear path over path times [a, b]."""
    lo = min(path(a), path(b))
    i0 = int(np.ceil(a * path.time_scale))
    i1 = int(np.floor(b * path.time_scale))
    if i1 >= i0:
        i0 = max(i0, 0)
        i1 = min(i1, path.values.size - 1)
        if i1 >= i0:
            lo = min(lo, float(np.min(path.values[i0:i1 + 1])) / path.space_scale)
    return lo


def continuum_metric(c_g: LatticePath, c_d: LatticePath, s: float, t: float) -> float:
    """Two-sided contour pseudo-metric d(s,t) = C(s) + C(t) - 2 inf C.

    Negative coordinates read the left path at |u|, nonnegative ones the
    right path.  For coordinates of equal sign the infimum runs over [s,t];
    for opposite signs it runs over the complement, whose unbounded ends
    are bounded below by each path's tail_floor (an error if a needed
    tail_floor is missing or a coordinate is beyond the materialized
    lifetime).
    """
    for name, path in (("left", c_g), ("right", c_d)):
        if path.values[0] != 0.0:
            raise InvalidInputError(f"{name} path must start at 0")

    def val(u):
        path = c_d if u >= 0 else c_g
        x = abs(u)
        if x > path.lifetime:
            raise MaterializationError(
                f"coordinate {u:g} beyond materialized lifetime {path.lifetime:g}")
        return path(x)

    vs, vt = val(s), val(t)
    if s == t:
        return 0.0
    if s * t >= 0.0:
        path = c_d if s + t >= 0 else c_g
        a, b = sorted((abs(s), abs(t)))
        inf = _inf_on(path, a, b)
    else:
        inf = np.inf
        for path, x in ((c_g, abs(min(s, t))), (c_d, max(s, t))):
            inf = min(inf, _inf_on(path, x, path.lifetime))
            if path.tail_floor is None:
                raise MaterializationError(
                    "complement infimum needs a tail_floor on both paths")
            inf = min(inf, path.tail_floor / path.space_scale)
    return vs + vt - 2.0 * inf


def _resolve_envelopes(envelope, seqs, t_min, t_max):
    """Per-replica (envelope, noise generator) pairs for an ensemble chunk.

    envelope may be None (sample one per replica; the replica sequence is
    spawned into (envelope, noise) roles), a shared EnvelopeProcess, or a
    sequence of per-replica EnvelopeProcess objects (sliced by the caller).
    In the latter two cases the replica sequence drives the noise directly.
    """
    out = []
    if envelope is None:
        if not (t_min and t_max) or not 0.0 < t_min < t_max:
            raise InvalidInputError(
                "sampling per-replica envelopes needs 0 < t_min < t_max")
        for sq in seqs:
            env_seq, noise_seq = sq.spawn(2)
            env = sample_envelope(
                t_min, t_max, np.random.Generator(np.random.PCG64(env_seq)))
            out.append((env, np.random.Generator(np.random.PCG64(noise_seq))))
    elif isinstance(envelope, EnvelopeProcess):
        for sq in seqs:
            out.append((envelope, np.random.Generator(np.random.PCG64(sq))))
    else:
        for env, sq in zip(envelope, seqs, strict=True):
            out.append((env, np.random.Generator(np.random.PCG64(sq))))
    return out


def _sde_marginal_chunk(lo, hi, n_replicas, seed, T, dt, variant, diffusion,
                        eps, envelope, t_min, t_max):
    seqs = replica_sequences(seed, n_replicas)[lo:hi]
    if envelope is not None and not isinstance(envelope, EnvelopeProcess):
        pairs = _resolve_envelopes(envelope[lo:hi], seqs, t_min, t_max)
    else:
        pairs = _resolve_envelopes(envelope, seqs, t_min, t_max)
    n_steps = int(round(T / dt))
    sqrt_step = float(np.sqrt(diffusion * dt))
    y_end = np.empty(hi - lo)
    ymin_end = np.empty(hi - lo)
    for j, (env, gen) in enumerate(pairs):
        drift_vals = _drift_values(env, variant)
        ptr = _clamp_ptr(drift_vals, eps)
        y, exhausted_at = _kernels.sde_path(
            gen, n_steps, dt, sqrt_step, np.asarray(env.times), drift_vals,
            env.t_max, ptr)
        if exhausted_at >= 0:
            raise MaterializationError(
                f"replica {lo + j}: envelope exhausted at step {exhausted_at}; "
                f"materialize past t_max={env.t_max:g}")
        y_end[j] = y[-1]
        ymin_end[j] = y.min()
    return {"y": y_end, "ymin": ymin_end}


def sde_marginal_ensemble(n_replicas: int, seed: int, T: float = 1.0,
                          dt: float = 1e-4, variant: str = "E(L)",
                          diffusion: float = 1.0, eps: float = 1e-3,
                          envelope=None, t_min: float = None,
                          t_max: float = None, workers: int = 1) -> dict:
    """Endpoint marginals (Y_T, min over [0,T]) over an SDE ensemble.

    envelope: a shared EnvelopeProcess, a per-replica sequence of them, or
    None to sample one per replica on [t_min, t_max] (replica stream
    spawned into (envelope, noise) roles).  Returns {"y", "ymin"} arrays.
    """
    if n_replicas < 1:
        raise InvalidInputError("n_replicas must be >= 1")
    from .samplers import _gather
    return _gather(_sde_marginal_chunk, n_replicas, workers,
                   dict(n_replicas=n_replicas, seed=seed, T=T, dt=dt,
                        variant=variant, diffusion=diffusion, eps=eps,
                        envelope=envelope, t_min=t_min, t_max=t_max))


def _sde_occupation_chunk(lo, hi, n_replicas, seed, alpha, beta, window_lo,
                          window_hi, stop_floor, dt, variant, diffusion, eps,
                          envelope, t_min, t_max, max_time, block_steps):
    seqs = replica_sequences(seed, n_replicas)[lo:hi]
    if envelope is not None and not isinstance(envelope, EnvelopeProcess):
        pairs = _resolve_envelopes(envelope[lo:hi], seqs, t_min, t_max)
    else:
        pairs = _resolve_envelopes(envelope, seqs, t_min, t_max)
    n = hi - lo
    gens = []
    env_t_list = []
    env_v_list = []
    tmax_arr = np.empty(n)
    ptr = np.empty(n, dtype=np.int64)
    for j, (env, gen) in enumerate(pairs):
        drift_vals = _drift_values(env, variant)
        if env.t_max < stop_floor:
            raise MaterializationError(
                f"replica {lo + j}: envelope t_max={env.t_max:g} below the "
                f"stop floor {stop_floor:g}; materialize past it")
        gens.append(gen)
        env_t_list.append(np.asarray(env.times))
        env_v_list.append(drift_vals)
        tmax_arr[j] = env.t_max
        ptr[j] = _clamp_ptr(drift_vals, eps)
    y = np.zeros(n)
    ymin = np.zeros(n)
    occ = np.zeros(n)
    status = np.zeros(n, dtype=np.int64)
    sqrt_step = float(np.sqrt(diffusion * dt))
    steps_done = 0
    max_steps = int(round(max_time / dt))
    while np.any(status == _kernels.STATUS_RUNNING) and steps_done < max_steps:
        block = min(block_steps, max_steps - steps_done)
        _kernels.sde_block_many(
            gens, y, ymin, occ, ptr, status, block, dt, sqrt_step,
            env_t_list, env_v_list, tmax_arr, alpha, beta, window_lo,
            window_hi, True, stop_floor)
        steps_done += block
    return {"occ": occ,
            "unstopped": (status == _kernels.STATUS_RUNNING).astype(np.int64)}


def sde_occupation_ensemble(n_replicas: int, seed: int, alpha: float,
                            beta: float, window_lo: float, window_hi: float,
                            stop_floor: float, dt: float = 1e-4,
                            variant: str = "E(L)", diffusion: float = 1.0,
                            eps: float = 1e-3, envelope=None,
                            t_min: float = None, t_max: float = None,
                            max_time: float = 4000.0,
                            block_steps: int = 20000,
                            workers: int = 1) -> dict:
    """Occupation time of alpha*Y + beta*Ymin in [window_lo, window_hi].

    Each replica integrates until -Ymin passes stop_floor, after which the
    tracked functional can never re-enter the window (it is bounded below
    by -Ymin times a positive combination whenever alpha + beta <= 0 ...
    concretely: choose stop_floor so that alpha*Y + beta*Ymin > window_hi
    whenever -Ymin > stop_floor; for the height functionals this is
    gamma^{1/2} * window_hi).  Leaving the materialized envelope range past
    the stop floor counts as stopped for the same reason.  Replicas still
    running at max_time are returned as censored ("unstopped" flag 1);
    their accumulated occupation is a lower bound with vanishing bias.

    Returns {"occ", "unstopped"} arrays.
    """
    if n_replicas < 1:
        raise InvalidInputError("n_replicas must be >= 1")
    if window_hi <= window_lo:
        raise InvalidInputError("need window_lo < window_hi")
    if stop_floor <= 0:
        raise InvalidInputError("stop_floor must be positive")
    from .samplers import _gather
    return _gather(_sde_occupation_chunk, n_replicas, workers,
                   dict(n_replicas=n_replicas, seed=seed, alpha=alpha,
                        beta=beta, window_lo=window_lo, window_hi=window_hi,
                        stop_floor=stop_floor, dt=dt, variant=variant,
                        diffusion=diffusion, eps=eps, envelope=envelope,
                        t_min=t_min, t_max=t_max, max_time=max_time,
                        block_steps=block_steps))
