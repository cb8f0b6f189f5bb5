import json
import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import plane_trees
from percolimit.codec import LatticePath
from percolimit.continuum import EnvelopeProcess, solve_sde
from percolimit.errors import InvalidInputError, MaterializationError
from percolimit.stats import (EXPERIMENTS, ExperimentSpec, LevelLimitDraw,
                              SampleSet, convergence_experiment,
                              excursion_inf_rate, excursion_sup_rate,
                              ks_two_sample, level_count, level_limit_mean,
                              occupation_local_time, read_sample_csv,
                              sample_level_limit, volume, write_sample_csv)
from percolimit.trees import PlaneTree, SinLevel, SinTree

GAMMA = 0.5
ROOT = math.sqrt(GAMMA)

CHERRY = PlaneTree([2, 0, 0])
EDGE = PlaneTree([1, 0])


def gen(seed=0):
    return np.random.Generator(np.random.PCG64(seed))


def stub_envelope():
    return EnvelopeProcess(np.array([0.01, 0.3, 1.2]),
                           np.array([9.0, 5.0, 2.0]), t_max=2.0)


# --- sample sets -------------------------------------------------------------

def test_sample_set_basics():
    s = SampleSet("toy", [1.0, 2.0, 3.0])
    assert s.n == 3 and len(s) == 3
    assert not s.values.flags.writeable
    assert s.manifest is None


def test_sample_set_validation():
    with pytest.raises(InvalidInputError):
        SampleSet("bad", [])
    with pytest.raises(InvalidInputError):
        SampleSet("bad", [[1.0, 2.0]])
    with pytest.raises(InvalidInputError):
        SampleSet("bad", [1.0, np.nan])
    with pytest.raises(InvalidInputError):
        SampleSet("bad", [1.0, np.inf])


def test_sample_csv_round_trip(tmp_path):
    vals = gen(1).standard_normal(40)
    fname = tmp_path / "s.csv"
    write_sample_csv(SampleSet("orig", vals), fname)
    back = read_sample_csv(fname, label="back")
    assert back.label == "back"
    assert np.array_equal(back.values, vals)  # repr round trip is exact
    assert read_sample_csv(fname).label == str(fname)


def test_sample_csv_rejects_bad_header(tmp_path):
    fname = tmp_path / "bad.csv"
    fname.write_text("index,value\n0,1.0\n")
    with pytest.raises(InvalidInputError):
        read_sample_csv(fname)


# --- level counts and volumes --------------------------------------------------

def test_level_count_cherry():
    assert level_count(CHERRY, 0) == 1
    assert level_count(CHERRY, 1) == 2
    assert level_count(CHERRY, 1.9) == 2  # floor
    assert level_count(CHERRY, 2) == 0
    assert volume(CHERRY, 0) == 1
    assert volume(CHERRY, 1) == 3
    assert volume(CHERRY, 7) == 3


def test_level_count_validation():
    with pytest.raises(InvalidInputError):
        level_count(CHERRY, -1)
    with pytest.raises(InvalidInputError):
        volume(CHERRY, np.nan)
    with pytest.raises(InvalidInputError):
        level_count("not a tree", 0)


def _depths_by_stack(tree):
    # independent re-derivation of vertex depths straight off the DFS order
    depths = []
    stack = [0]
    for c in tree.child_counts:
        d = stack.pop()
        depths.append(d)
        stack.extend([d + 1] * c)
    return depths


@given(plane_trees())
@settings(max_examples=60)
def test_level_counts_match_stack_walk(tree):
    depths = _depths_by_stack(tree)
    top = max(depths)
    for x in range(top + 2):
        assert level_count(tree, x) == depths.count(x)
    assert volume(tree, top) == tree.n_vertices


@given(plane_trees())
@settings(max_examples=40)
def test_volume_is_summed_level_counts(tree):
    x = tree.n_vertices // 2
    assert volume(tree, x) == sum(level_count(tree, j) for j in range(x + 1))


def test_sin_tree_level_counts():
    bare = SinTree([SinLevel(), SinLevel(), SinLevel()], backbone_rightmost=True)
    for d in range(4):
        assert level_count(bare, d) == 1
    assert volume(bare, 3) == 4
    # a cherry hanging to the left of level 0 roots at depth 1
    decorated = SinTree([SinLevel(left=(CHERRY,)), SinLevel(right=(EDGE,))],
                        backbone_rightmost=False)
    assert level_count(decorated, 0) == 1
    assert level_count(decorated, 1) == 2   # backbone + cherry root
    assert level_count(decorated, 2) == 4   # backbone + 2 cherry leaves + edge root
    assert volume(decorated, 2) == 7


def test_sin_tree_level_counts_need_materialization():
    bare = SinTree([SinLevel()], backbone_rightmost=True)
    with pytest.raises(MaterializationError):
        level_count(bare, 2)
    with pytest.raises(MaterializationError):
        volume(bare, 5)


# --- occupation estimator -------------------------------------------------------

def test_occupation_ramp():
    # a unit-slope ramp spends exactly eta units of time in [a, a+eta],
    # so the estimate equals the quadratic-variation rate
    ramp = LatticePath(np.array([0.0, 1.0]))
    assert occupation_local_time(ramp, 0.3, 0.2) == pytest.approx(4.0)
    assert occupation_local_time(ramp, 0.3, 0.2, quad_var_rate=1.0) == \
        pytest.approx(1.0)
    assert occupation_local_time(ramp, 0.3, 0.2, gamma=0.25) == pytest.approx(8.0)


def test_occupation_misses_window():
    flat = LatticePath(np.full(11, 5.0))
    assert occupation_local_time(flat, 0.0, 1.0) == 0.0
    below = LatticePath(np.linspace(-2.0, -1.0, 11))
    assert occupation_local_time(below, 0.0, 1.0) == 0.0


def test_occupation_flat_inside_window():
    flat = LatticePath(np.full(11, 0.5), time_scale=10.0)
    # ten flat unit segments of dt = 0.1 inside the window
    assert occupation_local_time(flat, 0.0, 1.0, quad_var_rate=1.0) == \
        pytest.approx(1.0)


def test_occupation_validation():
    ramp = LatticePath(np.array([0.0, 1.0]))
    with pytest.raises(InvalidInputError):
        occupation_local_time(ramp, 0.0, 0.0)
    with pytest.raises(InvalidInputError):
        occupation_local_time(ramp, 0.0, 0.1, gamma=1.5)


def test_occupation_estimates_brownian_local_time():
    # standard local time of Brownian motion at 0: E L_1 = sqrt(2/pi)
    env = EnvelopeProcess.constant(0.0)
    eta, n, dt = 0.05, 400, 1e-3
    rng = gen(77)
    est = np.empty(n)
    for i in range(n):
        path = solve_sde(env, "E(L)", T=1.0, dt=dt, rng=rng)
        lat = LatticePath(path.y, time_scale=1.0 / dt)
        est[i] = occupation_local_time(lat, -eta / 2, eta, quad_var_rate=1.0)
    target = math.sqrt(2.0 / math.pi)
    se = est.std(ddof=1) / math.sqrt(n)
    assert abs(est.mean() - target) < 3 * se + 0.02


# --- excursion rate formulas ------------------------------------------------------

def test_excursion_rates_frozen_values():
    assert excursion_sup_rate(1.0, 1.0) == pytest.approx(2.0 / math.expm1(2.0))
    assert excursion_sup_rate(1.0, 1.0) == pytest.approx(0.3130352854993313)
    assert excursion_inf_rate(1.0, 1.0) == pytest.approx(1.1565176427496657)


def test_excursion_rate_identities():
    for c in (0.3, 1.0, 2.5):
        for a in (0.2, 1.0, 4.0):
            inf_rate = excursion_inf_rate(c, a)
            sup_rate = excursion_sup_rate(c, a)
            assert inf_rate * (-math.expm1(-2 * c * a)) == pytest.approx(c, rel=1e-12)
            assert sup_rate == pytest.approx(2 * inf_rate * math.exp(-2 * c * a),
                                             rel=1e-12)


def test_excursion_rates_small_drift_limit():
    # as c -> 0 the sup rate tends to 1/a and the inf rate to 1/(2a)
    assert excursion_sup_rate(1e-9, 2.0) == pytest.approx(0.5, rel=1e-6)
    assert excursion_inf_rate(1e-9, 2.0) == pytest.approx(0.25, rel=1e-6)


def test_excursion_rate_validation():
    for bad in ((0.0, 1.0), (1.0, 0.0), (-1.0, 1.0), (np.inf, 1.0)):
        with pytest.raises(InvalidInputError):
            excursion_sup_rate(*bad)
        with pytest.raises(InvalidInputError):
            excursion_inf_rate(*bad)


# --- limiting level count sampler -------------------------------------------------

def test_level_limit_draw_validation():
    loc = np.array([0.5])
    rates = np.array([2.0])
    contr = np.array([1.0])
    ok = LevelLimitDraw(loc, rates, contr, 0.5 * ROOT, GAMMA, 1.0, 1e-4)
    assert ok.n_points == 1
    assert ok.discarded_mean_bound == pytest.approx(2e-4)
    with pytest.raises(InvalidInputError):
        LevelLimitDraw(loc, rates, contr, 0.9, GAMMA, 1.0, 1e-4)
    with pytest.raises(InvalidInputError):
        LevelLimitDraw(loc, -rates, contr, 0.5 * ROOT, GAMMA, 1.0, 1e-4)
    with pytest.raises(InvalidInputError):
        LevelLimitDraw(np.array([1.5]), rates, contr, 0.5 * ROOT, GAMMA, 1.0, 1e-4)
    with pytest.raises(InvalidInputError):
        LevelLimitDraw(np.array([0.4, 0.5]), rates, contr, 0.5 * ROOT,
                       GAMMA, 1.0, 1e-4)


def test_level_limit_draw_invariants():
    env = stub_envelope()
    rng = gen(5)
    for _ in range(200):
        d = sample_level_limit(env, 1.0, GAMMA, rng=rng)
        assert d.horizon == pytest.approx(ROOT)
        if d.n_points:
            assert d.locations.min() >= 0.0
            assert d.locations.max() < d.horizon
            assert np.all(d.rates > 0)
            assert np.all(d.contributions >= 0)
        assert d.total == pytest.approx(0.5 * ROOT * d.contributions.sum())


def test_level_limit_determinism():
    env = stub_envelope()
    a = sample_level_limit(env, 1.0, GAMMA, rng=99)
    b = sample_level_limit(env, 1.0, GAMMA, rng=99)
    assert np.array_equal(a.locations, b.locations)
    assert a.total == b.total


def test_level_limit_at_zero_level():
    d = sample_level_limit(stub_envelope(), 0.0, GAMMA, rng=1)
    assert d.n_points == 0 and d.total == 0.0 and d.horizon == 0.0


def test_level_limit_mean_matches_monte_carlo():
    env = stub_envelope()
    rng = gen(314)
    totals = np.array([sample_level_limit(env, 1.0, GAMMA, rng=rng).total
                       for _ in range(3000)])
    closed = level_limit_mean(env, 1.0, GAMMA)
    se = totals.std(ddof=1) / math.sqrt(totals.size)
    assert abs(totals.mean() - closed) < 4 * se + 2e-4 * ROOT


def test_level_limit_zero_envelope_branch():
    # with L == 0 the closed-form mean collapses to gamma * a
    env = EnvelopeProcess.constant(0.0)
    assert level_limit_mean(env, 1.0, GAMMA) == pytest.approx(GAMMA)
    rng = gen(2718)
    totals = np.array([sample_level_limit(env, 1.0, GAMMA, rng=rng).total
                       for _ in range(3000)])
    se = totals.std(ddof=1) / math.sqrt(totals.size)
    assert abs(totals.mean() - GAMMA) < 4 * se + 2e-4 * ROOT


def test_level_limit_truncation_bias_bound():
    env = stub_envelope()
    base = level_limit_mean(env, 1.0, GAMMA)
    for d in (0.05, 0.005, 0.0005):
        trimmed = level_limit_mean(env, 1.0, GAMMA, delta=d)
        assert trimmed <= base
        assert base - trimmed <= ROOT * d + 1e-15
    assert level_limit_mean(env, 1.0, GAMMA, delta=0.005) > \
        level_limit_mean(env, 1.0, GAMMA, delta=0.05)


def test_level_limit_validation():
    env = stub_envelope()
    with pytest.raises(InvalidInputError):
        sample_level_limit(env, 1.0, 1.5, rng=1)
    with pytest.raises(InvalidInputError):
        sample_level_limit(env, -1.0, GAMMA, rng=1)
    with pytest.raises(InvalidInputError):
        sample_level_limit(env, 1.0, GAMMA, delta=0.0, rng=1)
    short = EnvelopeProcess(np.array([0.01]), np.array([1.0]), t_max=0.3)
    with pytest.raises(MaterializationError):
        sample_level_limit(short, 1.0, GAMMA, rng=1)
    with pytest.raises(MaterializationError):
        level_limit_mean(short, 1.0, GAMMA)


# --- two-sample comparison ---------------------------------------------------------

def test_ks_identical_samples():
    vals = gen(3).standard_normal(200)
    stat, p = ks_two_sample(vals, np.random.permutation(vals))
    assert stat == 0.0
    assert p == pytest.approx(1.0)


def test_ks_disjoint_samples():
    stat, _ = ks_two_sample(np.zeros(5), np.ones(5))
    assert stat == 1.0


def test_ks_accepts_sample_sets():
    a = SampleSet("a", gen(1).standard_normal(50))
    b = SampleSet("b", gen(2).standard_normal(60))
    assert ks_two_sample(a, b) == ks_two_sample(a.values, b.values)


def test_ks_matches_brute_force_ecdf():
    rng = gen(11)
    a = rng.standard_normal(100)
    b = rng.standard_normal(120) * 1.3 + 0.2
    stat, _ = ks_two_sample(a, b)
    grid = np.concatenate([a, b])
    brute = max(abs(np.mean(a <= x) - np.mean(b <= x)) for x in grid)
    assert stat == pytest.approx(brute, abs=1e-12)


def test_ks_rejects_empty():
    with pytest.raises(InvalidInputError):
        ks_two_sample(np.array([]), np.array([1.0]))


# --- experiment registry ------------------------------------------------------------

def test_registry_contents():
    assert set(EXPERIMENTS) == {"iic-cond-height", "iic-sides-height", "ipc-v",
                                "level-local-time", "iic-volume"}
    for spec in EXPERIMENTS.values():
        assert spec.defaults["n_replicas"] >= 1000
        assert 0 < spec.defaults["threshold"] < 1


def test_experiment_spec_validation():
    with pytest.raises(InvalidInputError):
        ExperimentSpec("", "d", "a", "b", "f", {"n_replicas": 1, "threshold": 0.1},
                       lambda p, s, w: None)
    with pytest.raises(InvalidInputError):
        ExperimentSpec("x", "d", "a", "b", "f", {"n_replicas": 1}, lambda p, s, w: None)
    with pytest.raises(InvalidInputError):
        ExperimentSpec("x", "d", "a", "b", "f",
                       {"n_replicas": 1, "threshold": 0.1}, builder=None)


def test_convergence_experiment_rejects_unknowns():
    with pytest.raises(InvalidInputError, match="iic-cond-height"):
        convergence_experiment("no-such-experiment", seed=1)
    with pytest.raises(InvalidInputError, match="n_steps"):
        convergence_experiment("iic-cond-height", seed=1, n_steps=5)
    with pytest.raises(InvalidInputError):
        convergence_experiment(42, seed=1)


TINY = dict(k=8, n_replicas=25, dt=5e-3)


def test_convergence_experiment_report_shape():
    report, disc, lim = convergence_experiment("iic-cond-height", seed=101,
                                               return_samples=True, **TINY)
    assert report["experiment"] == "iic-cond-height"
    assert report["n_A"] == report["n_B"] == 25
    assert report["pass"] == (report["ks_stat"] < report["threshold"])
    assert report["manifest"]["seed"] == 101
    assert report["manifest"]["params"]["k"] == 8
    assert disc.label == "iic-cond-height:discrete"
    assert lim.label == "iic-cond-height:limit"
    assert disc.manifest == report["manifest"]
    json.dumps(report)  # must stay serializable for the CLI


def test_convergence_experiment_deterministic_and_worker_invariant():
    a = convergence_experiment("iic-cond-height", seed=7, workers=1, **TINY)
    b = convergence_experiment("iic-cond-height", seed=7, workers=3, **TINY)
    a.pop("wall_time_s"), b.pop("wall_time_s")
    assert a == b
    _, disc_a, _ = convergence_experiment("iic-cond-height", seed=7,
                                          return_samples=True, **TINY)
    _, disc_c, _ = convergence_experiment("iic-cond-height", seed=8,
                                          return_samples=True, **TINY)
    assert not np.array_equal(disc_a.values, disc_c.values)
