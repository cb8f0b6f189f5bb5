"""Level statistics, excursion formulas, and convergence experiments.

Three layers live here.  The bottom layer is exact tree bookkeeping:
``level_count`` / ``volume`` count vertices of a materialized tree by depth.
The middle layer is the continuum side of the level story: the occupation
estimator of local time, the excursion-measure tail formulas, and the
exponential-sum sampler for the limiting level count conditional on a lower
envelope.  The top layer, ``convergence_experiment``, wires a discrete
ensemble against its scaling limit and reports a two-sample KS comparison
with a pre-registered threshold.

Conventions: gamma = (sigma - 1)/sigma throughout, heights compare at the
integer part of ``x``, and every experiment derives all of its randomness
from one integer seed via the package-wide splitting rules in ``seeding``.
"""

from __future__ import annotations

import dataclasses
import math
import time
from typing import Callable, Mapping

import numpy as np
import scipy.stats

from . import _kernels  # noqa: F401  (imported for side-effectful backend choice)
from .codec import LatticePath, height_fn
from .continuum import (
    EnvelopeProcess,
    sample_envelope,
    sde_marginal_ensemble,
    sde_occupation_ensemble,
)
from .errors import InvalidInputError, MaterializationError
from .samplers import (
    ModelParams,
    ensemble_manifest,
    iic_conditioned_marginals,
    iic_pair_marginals,
    ipc_asymptotic_marginals,
)
from .seeding import replica_sequences, subordinate_seed
from .trees import PlaneTree, SinTree

__all__ = [
    "SampleSet",
    "LevelLimitDraw",
    "ExperimentSpec",
    "EXPERIMENTS",
    "level_count",
    "volume",
    "occupation_local_time",
    "excursion_sup_rate",
    "excursion_inf_rate",
    "sample_level_limit",
    "level_limit_mean",
    "ks_two_sample",
    "convergence_experiment",
    "write_sample_csv",
    "read_sample_csv",
]


# ---------------------------------------------------------------------------
# sample containers
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class SampleSet:
    """A labeled vector of replica values, optionally carrying its manifest."""

    label: str
    values: np.ndarray
    manifest: dict | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise InvalidInputError("SampleSet needs a nonempty 1-d value vector")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError(f"SampleSet {self.label!r} contains NaN/inf")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size


def write_sample_csv(samples: SampleSet, fname) -> None:
    with open(fname, "w") as fh:
        fh.write("replica,value\n")
        for i, v in enumerate(samples.values):
            fh.write(f"{i},{float(v)!r}\n")


def read_sample_csv(fname, label: str = None) -> SampleSet:
    with open(fname) as fh:
        header = fh.readline().strip()
        if header != "replica,value":
            raise InvalidInputError(
                f"{fname}: expected 'replica,value' header, got {header!r}")
        vals = [float(line.split(",")[1]) for line in fh if line.strip()]
    if label is None:
        label = str(fname)
    return SampleSet(label, np.asarray(vals, dtype=np.float64))


# ---------------------------------------------------------------------------
# level counts of materialized trees
# ---------------------------------------------------------------------------

def _counts_to(arr: np.ndarray, up_to: int) -> np.ndarray:
    """Pad/trim a bincount vector to exactly up_to+1 entries."""
    out = np.zeros(up_to + 1, dtype=np.int64)
    k = min(arr.size, up_to + 1)
    out[:k] = arr[:k]
    return out


def _level_counts(tree, up_to: int) -> np.ndarray:
    """Vertices per depth, depths 0..up_to inclusive."""
    if isinstance(tree, PlaneTree):
        depths = height_fn(tree).values.astype(np.int64)
        return _counts_to(np.bincount(depths), up_to)
    if isinstance(tree, SinTree):
        if up_to > tree.truncation_height:
            raise MaterializationError(
                f"level counts need depth {up_to} but the sin-tree is "
                f"materialized to height {tree.truncation_height}")
        # The backbone ray contributes one vertex at every depth; a subtree
        # hanging at level l has its root at depth l+1.
        counts = np.ones(up_to + 1, dtype=np.int64)
        for lvl_index, lvl in enumerate(tree.levels):
            if lvl_index + 1 > up_to:
                break
            for sub in (*lvl.left, *lvl.right):
                depths = height_fn(sub).values.astype(np.int64) + lvl_index + 1
                counts += _counts_to(np.bincount(depths), up_to)
        return counts
    raise InvalidInputError(
        f"level counts need a PlaneTree or SinTree, got {type(tree).__name__}")


def _check_level(x) -> int:
    if not np.isfinite(x) or x < 0:
        raise InvalidInputError(f"level must be a finite non-negative real, got {x}")
    return int(math.floor(x))


def level_count(tree, x) -> int:
    """Number of vertices at depth floor(x)."""
    d = _check_level(x)
    return int(_level_counts(tree, d)[d])


def volume(tree, x) -> int:
    """Number of vertices at depths 0..floor(x) (the partial volume C[0,x])."""
    d = _check_level(x)
    return int(_level_counts(tree, d).sum())


# ---------------------------------------------------------------------------
# occupation estimator and excursion formulas
# ---------------------------------------------------------------------------

def occupation_local_time(H: LatticePath, a: float, eta: float,
                          quad_var_rate: float = None,
                          gamma: float = 0.5) -> float:
    """Local-time estimate at level a: rate * (1/eta) * time H spends in [a, a+eta].

    The occupation time is computed exactly on the piecewise-linear
    interpolation of the path.  quad_var_rate defaults to 2/gamma, the
    quadratic-variation rate of the limiting height process.
    """
    if eta <= 0:
        raise InvalidInputError("occupation window width eta must be positive")
    if quad_var_rate is None:
        if not 0 < gamma < 1:
            raise InvalidInputError(f"gamma must lie in (0, 1), got {gamma}")
        quad_var_rate = 2.0 / gamma
    vals = H.grid_values
    if vals.size < 2:
        return 0.0
    lo = np.minimum(vals[:-1], vals[1:])
    hi = np.maximum(vals[:-1], vals[1:])
    width = hi - lo
    overlap = np.clip(np.minimum(hi, a + eta) - np.maximum(lo, a), 0.0, None)
    flat_inside = (width == 0) & (lo >= a) & (lo <= a + eta)
    frac = np.where(width > 0, overlap / np.where(width > 0, width, 1.0),
                    flat_inside.astype(np.float64))
    occ = float(frac.sum()) / H.time_scale
    return quad_var_rate * occ / eta


def _check_excursion_args(c: float, a: float) -> None:
    if not (c > 0 and a > 0) or not (np.isfinite(c) and np.isfinite(a)):
        raise InvalidInputError(
            f"excursion formulas need c > 0 and a > 0, got c={c}, a={a}")


def excursion_sup_rate(c: float, a: float) -> float:
    """Rate of excursions of drift -c Brownian motion with supremum above a."""
    _check_excursion_args(c, a)
    return 2.0 * c / math.expm1(2.0 * c * a)


def excursion_inf_rate(c: float, a: float) -> float:
    """Rate of excursions of drift -c Brownian motion with infimum below -a."""
    _check_excursion_args(c, a)
    return c / (-math.expm1(-2.0 * c * a))


# ---------------------------------------------------------------------------
# the exponential-sum representation of the limiting level count
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class LevelLimitDraw:
    """One draw of the limiting level count conditional on an envelope.

    Points sit at locations s_j in [0, a*sqrt(gamma)); each carries an
    exponential contribution with the recorded rate, and
    total = (sqrt(gamma)/2) * sum(contributions).  Points closer to the
    right endpoint than ``truncation`` are discarded; the discarded mass
    has mean at most ``discarded_mean_bound``.
    """

    locations: np.ndarray
    rates: np.ndarray
    contributions: np.ndarray
    total: float
    gamma: float
    horizon: float      # a * sqrt(gamma)
    truncation: float   # delta

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=np.float64)
        rates = np.asarray(self.rates, dtype=np.float64)
        contr = np.asarray(self.contributions, dtype=np.float64)
        if not (loc.shape == rates.shape == contr.shape) or loc.ndim != 1:
            raise InvalidInputError("level-limit draw vectors must share one shape")
        if rates.size and not np.all(rates > 0):
            raise InvalidInputError("exponential parameters must be positive")
        if loc.size and (loc.min() < 0 or loc.max() >= self.horizon):
            raise InvalidInputError("point locations must lie in [0, horizon)")
        expected = 0.5 * math.sqrt(self.gamma) * float(contr.sum())
        if not math.isclose(self.total, expected, rel_tol=1e-12, abs_tol=1e-300):
            raise InvalidInputError("total != (sqrt(gamma)/2) * sum(contributions)")
        for name, arr in (("locations", loc), ("rates", rates),
                          ("contributions", contr)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_points(self) -> int:
        return self.locations.size

    @property
    def discarded_mean_bound(self) -> float:
        # intensity * mean contribution is 2 exp(-x L) <= 2 per unit length,
        # so truncating the final delta discards mean mass at most 2 delta
        # before the sqrt(gamma)/2 prefactor.
        return 2.0 * self.truncation


def _env_value_floor(env: EnvelopeProcess, s: float) -> float:
    """Envelope value at s, extending the first segment down to s = 0."""
    idx = int(np.searchsorted(env.times, s, side="right")) - 1
    return float(env.values[max(idx, 0)])


def _intensity_mass(c: float, x_lo: float, x_hi: float) -> float:
    """Integral of the point intensity over x in [x_lo, x_hi].

    For L = c the intensity in the distance coordinate x = horizon - s is
    2c/(e^{xc}-1), whose antiderivative is 2*log(1 - e^{-xc}); the c -> 0
    limit is 2/x with antiderivative 2*log(x).
    """
    if c > 1e-14:
        return 2.0 * (math.log1p(-math.exp(-x_hi * c))
                      - math.log1p(-math.exp(-x_lo * c)))
    return 2.0 * math.log(x_hi / x_lo)


def sample_level_limit(envelope: EnvelopeProcess, a: float, gamma: float,
                       delta: float = None, rng=None) -> LevelLimitDraw:
    """Sample the limiting level count at height a, conditional on an envelope.

    Conditional on L, points fall on [0, a*sqrt(gamma)) with intensity
    2 L(s) / (e^{(a*sqrt(gamma)-s) L(s)} - 1) ds, and a point at s
    contributes an independent exponential with rate
    L(s) / (1 - e^{-(a*sqrt(gamma)-s) L(s)}).  The total is
    (sqrt(gamma)/2) times the sum.  The envelope is piecewise constant, so
    both the intensity mass and the inverse CDF are closed-form per segment;
    below the envelope's first materialized time the initial value is used.

    The intensity is non-integrable at the right endpoint (it behaves like
    2/(a*sqrt(gamma) - s)) while per-point contributions vanish there;
    points within delta of the endpoint are discarded, which biases the
    mean total down by at most sqrt(gamma) * delta (see
    LevelLimitDraw.discarded_mean_bound).  delta defaults to
    1e-4 * a * sqrt(gamma).
    """
    if not 0 < gamma < 1:
        raise InvalidInputError(f"gamma must lie in (0, 1), got {gamma}")
    if a < 0 or not np.isfinite(a):
        raise InvalidInputError(f"level a must be finite and >= 0, got {a}")
    rng = np.random.default_rng(rng)
    root = math.sqrt(gamma)
    horizon = a * root
    if a == 0:
        empty = np.empty(0)
        return LevelLimitDraw(empty, empty, empty, 0.0, gamma, 0.0,
                              delta if delta is not None else 0.0)
    if delta is None:
        delta = 1e-4 * horizon
    if delta <= 0:
        raise InvalidInputError(f"truncation delta must be positive, got {delta}")
    if envelope.t_max < horizon:
        raise MaterializationError(
            f"envelope materialized to t_max={envelope.t_max:g} but the level "
            f"window needs [0, {horizon:g}]")

    # Segment boundaries in the s coordinate; the envelope is constant
    # between consecutive boundaries.
    inner = [float(t) for t in envelope.times if 0.0 < t < horizon]
    bounds = np.array([0.0] + inner + [horizon])
    locations, rates, contribs = [], [], []
    for s0, s1 in zip(bounds[:-1], bounds[1:]):
        c = _env_value_floor(envelope, s0)
        x_hi = horizon - s0
        x_lo = max(horizon - s1, delta)
        if x_lo >= x_hi:
            continue
        mass = _intensity_mass(c, x_lo, x_hi)
        n_pts = int(rng.poisson(mass))
        if n_pts == 0:
            continue
        u = rng.random(n_pts)
        if c > 1e-14:
            f_lo = math.log1p(-math.exp(-x_lo * c))
            f_hi = math.log1p(-math.exp(-x_hi * c))
            f = f_lo + u * (f_hi - f_lo)
            x = -np.log1p(-np.exp(f)) / c
            rate = c / (-np.expm1(-x * c))
        else:
            x = x_lo * (x_hi / x_lo) ** u
            rate = 1.0 / x
        contribs.append(rng.exponential(1.0 / rate))
        locations.append(horizon - x)
        rates.append(rate)

    if locations:
        loc = np.concatenate(locations)
        rate = np.concatenate(rates)
        contr = np.concatenate(contribs)
    else:
        loc = rate = contr = np.empty(0)
    total = 0.5 * root * float(contr.sum())
    return LevelLimitDraw(loc, rate, contr, total, gamma, horizon, delta)


def level_limit_mean(envelope: EnvelopeProcess, a: float, gamma: float,
                     delta: float = 0.0) -> float:
    """Closed-form conditional mean of the limiting level count.

    E[total | L] = sqrt(gamma) * integral of e^{-(a*sqrt(gamma)-s) L(s)} ds
    over s in [0, a*sqrt(gamma) - delta], evaluated segment-by-segment.
    """
    if not 0 < gamma < 1:
        raise InvalidInputError(f"gamma must lie in (0, 1), got {gamma}")
    root = math.sqrt(gamma)
    horizon = a * root
    if horizon <= 0:
        return 0.0
    if envelope.t_max < horizon:
        raise MaterializationError(
            f"envelope materialized to t_max={envelope.t_max:g} but the level "
            f"window needs [0, {horizon:g}]")
    inner = [float(t) for t in envelope.times if 0.0 < t < horizon]
    bounds = np.array([0.0] + inner + [horizon])
    acc = 0.0
    for s0, s1 in zip(bounds[:-1], bounds[1:]):
        c = _env_value_floor(envelope, s0)
        x_hi = horizon - s0
        x_lo = max(horizon - s1, delta)
        if x_lo >= x_hi:
            continue
        if c > 1e-14:
            acc += (math.exp(-x_lo * c) - math.exp(-x_hi * c)) / c
        else:
            acc += x_hi - x_lo
    return root * acc


# ---------------------------------------------------------------------------
# two-sample comparison
# ---------------------------------------------------------------------------

def ks_two_sample(a, b) -> tuple:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    av = a.values if isinstance(a, SampleSet) else np.asarray(a, dtype=np.float64)
    bv = b.values if isinstance(b, SampleSet) else np.asarray(b, dtype=np.float64)
    if av.size == 0 or bv.size == 0:
        raise InvalidInputError("ks_two_sample needs two nonempty samples")
    res = scipy.stats.ks_2samp(av, bv, method="asymp")
    return float(res.statistic), float(res.pvalue)


# ---------------------------------------------------------------------------
# registered convergence experiments
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """A discrete-vs-limit comparison with pre-registered defaults.

    ``builder(params, seed, workers)`` returns (discrete values, limit
    values, extras dict); the two sides draw from independent subordinate
    seeds so the comparison is honest.
    """

    name: str
    description: str
    discrete: str
    limit: str
    functional: str
    defaults: Mapping
    builder: Callable

    def __post_init__(self):
        if not self.name:
            raise InvalidInputError("experiment name must be nonempty")
        if not callable(self.builder):
            raise InvalidInputError(f"experiment {self.name}: builder not callable")
        for key in ("n_replicas", "threshold"):
            if key not in self.defaults:
                raise InvalidInputError(
                    f"experiment {self.name}: defaults must include {key!r}")


def _zero_envelope() -> EnvelopeProcess:
    return EnvelopeProcess.constant(0.0)


def _build_iic_cond_height(p, seed, workers):
    sigma, k, n = p["sigma"], p["k"], p["n_replicas"]
    gamma = ModelParams(sigma).gamma
    disc = iic_conditioned_marginals(sigma, k * k, n, subordinate_seed(seed, 0),
                                     workers=workers)
    lim = sde_marginal_ensemble(n, subordinate_seed(seed, 1), T=1.0, dt=p["dt"],
                                envelope=_zero_envelope(), workers=workers)
    a_vals = disc["h"] / k
    b_vals = (2.0 * lim["y"] - 3.0 * lim["ymin"]) / math.sqrt(gamma)
    return a_vals, b_vals, {}


def _build_iic_sides_height(p, seed, workers):
    sigma, k, n = p["sigma"], p["k"], p["n_replicas"]
    gamma = ModelParams(sigma).gamma
    disc = iic_pair_marginals(sigma, k * k, n, subordinate_seed(seed, 0),
                              workers=workers)
    # The one-sided height limit is a Bessel(3)-type process: at t = 1 it is
    # (2/gamma) (B_gamma - 2 min B_gamma) in law, so run unit-diffusion
    # Brownian motion (zero envelope) to time gamma.
    lim = sde_marginal_ensemble(n, subordinate_seed(seed, 1), T=gamma,
                                dt=p["dt"], envelope=_zero_envelope(),
                                workers=workers)
    a_vals = disc["h_g"] / k
    b_vals = (2.0 / gamma) * (lim["y"] - 2.0 * lim["ymin"])
    rho = float(np.corrcoef(disc["h_g"], disc["h_d"])[0, 1])
    return a_vals, b_vals, {"pair_correlation": rho}


def _build_ipc_v(p, seed, workers):
    sigma, k, n = p["sigma"], p["k"], p["n_replicas"]
    gamma = ModelParams(sigma).gamma
    disc = ipc_asymptotic_marginals(sigma, k, k * k, n, subordinate_seed(seed, 0),
                                    t_min=p["t_min"], workers=workers)
    lim = sde_marginal_ensemble(n, subordinate_seed(seed, 1), T=1.0, dt=p["dt"],
                                envelope=None, t_min=p["t_min"],
                                t_max=p["sde_t_max"], workers=workers)
    a_vals = disc["v"] / k
    b_vals = math.sqrt(gamma) * (lim["y"] - lim["ymin"])
    return a_vals, b_vals, {}


def _build_level_local_time(p, seed, workers):
    sigma, n = p["sigma"], p["n_replicas"]
    gamma = ModelParams(sigma).gamma
    a, eta = p["a"], p["eta"]
    root = math.sqrt(gamma)
    horizon = a * root
    stop_floor = root * (a + eta)
    t_max = max(horizon, stop_floor) + 1.0
    # One frozen envelope per replica, shared by both sides: the comparison
    # is then between two conditional models of the same level count.
    env_seqs = replica_sequences(subordinate_seed(seed, 0), n)
    envs = [sample_envelope(p["t_min"], t_max,
                            np.random.Generator(np.random.PCG64(sq)))
            for sq in env_seqs]
    occ = sde_occupation_ensemble(
        n, subordinate_seed(seed, 1), alpha=2.0 / root, beta=-3.0 / root,
        window_lo=a, window_hi=a + eta, stop_floor=stop_floor, dt=p["dt"],
        envelope=envs, max_time=p["max_time"], workers=workers)
    # The martingale part of the height (2Y - 3 min Y)/sqrt(gamma) is
    # (2/sqrt(gamma)) Y, so its quadratic variation rate is 4/gamma and
    # (gamma/4) * standard local time = (gamma/4) * (4/gamma) * occ/eta,
    # i.e. the plain occupation density.
    a_vals = occ["occ"] / eta
    pts_seqs = replica_sequences(subordinate_seed(seed, 2), n)
    b_vals = np.array([
        sample_level_limit(env, a, gamma, p["delta"],
                           np.random.Generator(np.random.PCG64(sq))).total
        for env, sq in zip(envs, pts_seqs)])
    closed = float(np.mean([level_limit_mean(env, a, gamma) for env in envs]))
    extras = {
        "unstopped": int(occ["unstopped"].sum()),
        "limit_mean": float(b_vals.mean()),
        "closed_form_mean": closed,
    }
    return a_vals, b_vals, extras


def _conditioned_volume(sigma: int, depth: int, gen) -> int:
    """Partial volume C[0, depth] of one conditioned incipient cluster.

    Only generation sizes matter for the count, so instead of materializing
    trees (whose total progeny is heavy-tailed at criticality) we evolve
    off-backbone generation sizes directly: a level contributes
    Bin(sigma-1, p_c) fresh subtree roots one depth down, and g vertices at
    depth d have Bin(sigma*g, p_c) children in aggregate.
    """
    p_c = 1.0 / sigma
    inject = gen.binomial(sigma - 1, p_c, size=depth) if depth else ()
    off = 0
    total = depth + 1  # the backbone ray
    for d in range(1, depth + 1):
        off = int(gen.binomial(sigma * off, p_c)) + int(inject[d - 1])
        total += off
    return total


def _build_iic_volume(p, seed, workers):
    sigma, k, n = p["sigma"], p["k"], p["n_replicas"]
    gamma = ModelParams(sigma).gamma
    a = p["a"]
    depth = int(math.floor(a * k))
    vols = np.empty(n)
    for i, sq in enumerate(replica_sequences(subordinate_seed(seed, 0), n)):
        gen = np.random.Generator(np.random.PCG64(sq))
        vols[i] = _conditioned_volume(sigma, depth, gen)
    root = math.sqrt(gamma)
    occ = sde_occupation_ensemble(
        n, subordinate_seed(seed, 1), alpha=2.0 / root, beta=-3.0 / root,
        window_lo=0.0, window_hi=a, stop_floor=root * a, dt=p["dt"],
        envelope=_zero_envelope(), max_time=p["max_time"], workers=workers)
    a_vals = vols / (k * k)
    b_vals = occ["occ"]
    return a_vals, b_vals, {"unstopped": int(occ["unstopped"].sum())}


EXPERIMENTS = {spec.name: spec for spec in [
    ExperimentSpec(
        name="iic-cond-height",
        description=("Rescaled height of the conditioned incipient cluster at "
                     "index k^2 against the zero-envelope diffusion height "
                     "marginal (2Y - 3 min Y)/sqrt(gamma) at time 1."),
        discrete="conditioned incipient-cluster walk to index k^2",
        limit="unit-diffusion SDE with zero envelope, T=1",
        functional="height marginal at t=1",
        defaults={"sigma": 2, "k": 300, "n_replicas": 10_000, "dt": 1e-4,
                  "threshold": 0.05},
        builder=_build_iic_cond_height,
    ),
    ExperimentSpec(
        name="iic-sides-height",
        description=("Rescaled one-sided height of the unconditioned "
                     "incipient cluster against its Bessel(3)-type limit "
                     "(2/gamma)(B_gamma - 2 min B_gamma); also reports the "
                     "left/right pair correlation."),
        discrete="two-sided incipient-cluster walk to index k^2, left part",
        limit="Brownian motion run to time gamma",
        functional="height marginal at t=1",
        defaults={"sigma": 2, "k": 300, "n_replicas": 10_000, "dt": 1e-4,
                  "threshold": 0.05},
        builder=_build_iic_sides_height,
    ),
    ExperimentSpec(
        name="ipc-v",
        description=("Rescaled exploration (Lukaciewicz) marginal of the "
                     "invasion cluster at index k^2 against "
                     "sqrt(gamma)(Y - min Y) under a sampled envelope."),
        discrete="structurally sampled invasion cluster at scale k",
        limit="SDE driven by a fresh envelope per replica, T=1",
        functional="exploration-walk marginal at t=1",
        defaults={"sigma": 2, "k": 200, "n_replicas": 10_000, "dt": 1e-4,
                  "t_min": 1e-3, "sde_t_max": 50.0, "threshold": 0.07},
        builder=_build_ipc_v,
    ),
    ExperimentSpec(
        name="level-local-time",
        description=("Occupation estimate (gamma/4) l^a of the diffusion "
                     "height at level a against exponential-sum draws of the "
                     "limiting level count, sharing one frozen envelope per "
                     "replica across the two sides."),
        discrete="occupation-time estimator on the SDE height path",
        limit="exponential-sum level-count sampler",
        functional="level count at height a",
        defaults={"sigma": 2, "a": 1.0, "eta": 0.02, "n_replicas": 10_000,
                  "dt": 1e-4, "t_min": 1e-3, "delta": None,
                  "max_time": 2000.0, "threshold": 0.05},
        builder=_build_level_local_time,
    ),
    ExperimentSpec(
        name="iic-volume",
        description=("Rescaled partial volume C[0, ak]/k^2 of the conditioned "
                     "incipient cluster against the sojourn time of the "
                     "zero-envelope diffusion height below a."),
        discrete="materialized conditioned incipient cluster to height ak",
        limit="occupation time of the diffusion height in [0, a]",
        functional="partial volume below height a",
        defaults={"sigma": 2, "k": 40, "a": 1.0, "n_replicas": 1500,
                  "dt": 1e-4, "max_time": 2000.0, "threshold": 0.1},
        builder=_build_iic_volume,
    ),
]}


def convergence_experiment(spec, seed: int, workers: int = 1,
                           return_samples: bool = False, **overrides):
    """Run a registered (or ad-hoc) discrete-vs-limit comparison.

    ``spec`` is an EXPERIMENTS key or an ExperimentSpec.  Keyword overrides
    must name existing default parameters.  Returns the report dict; with
    return_samples=True returns (report, discrete SampleSet, limit SampleSet).
    """
    if isinstance(spec, str):
        if spec not in EXPERIMENTS:
            raise InvalidInputError(
                f"unknown experiment {spec!r}; registered: "
                + ", ".join(sorted(EXPERIMENTS)))
        spec = EXPERIMENTS[spec]
    if not isinstance(spec, ExperimentSpec):
        raise InvalidInputError(
            f"spec must be an experiment name or ExperimentSpec, got "
            f"{type(spec).__name__}")
    params = dict(spec.defaults)
    unknown = set(overrides) - set(params)
    if unknown:
        raise InvalidInputError(
            f"experiment {spec.name}: unknown parameters {sorted(unknown)}")
    params.update(overrides)

    t0 = time.perf_counter()
    a_vals, b_vals, extras = spec.builder(params, seed, workers)
    stat, pval = ks_two_sample(a_vals, b_vals)
    wall = time.perf_counter() - t0

    manifest = ensemble_manifest(spec.name, seed, params.get("sigma", 0),
                                 params, params["n_replicas"])
    report = {
        "experiment": spec.name,
        "manifest": manifest,
        "n_A": int(np.asarray(a_vals).size),
        "n_B": int(np.asarray(b_vals).size),
        "ks_stat": stat,
        "p_value": pval,
        "threshold": float(params["threshold"]),
        "pass": bool(stat < params["threshold"]),
        "wall_time_s": wall,
    }
    if extras:
        report["extras"] = extras
    if not return_samples:
        return report
    sample_a = SampleSet(f"{spec.name}:discrete", a_vals, manifest)
    sample_b = SampleSet(f"{spec.name}:limit", b_vals, manifest)
    return report, sample_a, sample_b
