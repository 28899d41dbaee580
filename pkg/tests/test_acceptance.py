"""Exit criteria.  Each test is one criterion; the run prints PASS/FAIL per test."""

import contextlib
import io as stdio
import json
import math
import random
import time

import numpy as np
import pytest

from oracles import (
    brute_separability,
    exhaustive_cover,
    gaussian_tail_error,
    least_squares_line,
    strict_reachability,
    transitive_closure,
)
from pairsep import io
from pairsep.cli import main
from pairsep.constructions import construct_parity, hypercube_bank
from pairsep.cover import fundamental_number_exact, fundamental_number_greedy, theorem1_check
from pairsep.errors import NotSeparableError
from pairsep.features import FeatureSet
from pairsep.fewshot import EpisodeConfig, best_worst_pair_sets, run_episodes
from pairsep.heads import (
    HeadBank,
    Hyperplane,
    TrainConfig,
    build_bank,
    empirical_error,
    gaussian_error,
    train_head,
)
from pairsep.metrics import RunRecord, class_separability, pair_separability, pearson
from pairsep.poset import (
    AbstractModel,
    all_pairs,
    bounds,
    equivalence_classes,
    hasse_diagram,
    separable_set,
    separates,
)
from pairsep.separability import SeparabilityReport, separability_matrix, separability_score
from pairsep.synth import GaussianSpec, generate

pytestmark = pytest.mark.acceptance


def run_cli(*argv):
    out = stdio.StringIO()
    with contextlib.redirect_stdout(out):
        code = main([str(a) for a in argv])
    return code, out.getvalue()


def random_model(rng, n):
    """A bipartition with both sides non-empty; some classes may be left out."""
    order = rng.sample(range(n), n)
    a, b = {order[0]}, {order[1]}
    for c in order[2:]:
        r = rng.random()
        (a if r < 0.4 else b if r < 0.8 else set()).add(c)
    return AbstractModel(frozenset(a), frozenset(b))


def test_1_hypercube_witness():
    t0 = time.perf_counter()
    code, out = run_cli("construct", "--hypercube", 4)
    assert code == 0
    models, n, _ = io.models_from_json(json.loads(out))
    assert len(models) == 4 and n == 16
    sets = [separable_set(m, n) for m in models]
    covered = set().union(*(set(s.pairs()) for s in sets))
    assert covered == set(all_pairs(16)) and len(covered) == 120
    assert fundamental_number_exact(sets, n) == 4 == math.ceil(math.log2(16)) == bounds(16)[0]
    check = theorem1_check({p: separable_set(m, 16) for p, m in hypercube_bank(4).items()})
    assert (check.dedup_fundamental_count, check.exact_cover, check.agrees) == (4, 4, True)
    assert time.perf_counter() - t0 < 1.0


def test_2_parity_witness():
    t0 = time.perf_counter()
    code, out = run_cli("construct", "--parity", 6)
    assert code == 0
    models, n, _ = io.models_from_json(json.loads(out))
    assert len(models) == 15 and n == 6
    sets = [separable_set(m, n) for m in models]
    for m in models:
        assert separates(m, m.label, n)
    assert len({s.bits for s in sets}) == 15
    assert equivalence_classes(sets) == [[k] for k in range(15)]
    assert fundamental_number_exact(sets, n) == 15 == bounds(6)[1]
    assert sorted(construct_parity(6)) == all_pairs(6)
    assert time.perf_counter() - t0 < 1.0


def test_3_set_cover_oracle():
    t0 = time.perf_counter()
    rng = random.Random(20261014)
    coverable = 0
    for _ in range(200):
        n = rng.randint(2, 6)
        models = [random_model(rng, n) for _ in range(rng.randint(1, 12))]
        sets = [separable_set(m, n) for m in models]
        expected = exhaustive_cover([set(s.pairs()) for s in sets], n)
        if expected is None:
            with pytest.raises(NotSeparableError):
                fundamental_number_exact(sets, n)
            continue
        coverable += 1
        exact = fundamental_number_exact(sets, n)
        assert exact == expected
        assert fundamental_number_greedy(sets, n) >= exact
    assert coverable >= 100
    assert time.perf_counter() - t0 < 30.0


def test_4_gaussian_closed_form():
    t0 = time.perf_counter()
    value = gaussian_error(0.0, 2.0, 1.0)
    oracle = gaussian_tail_error(0.0, 2.0, 1.0)
    assert abs(value - 0.158655) <= 1e-6 and abs(oracle - 0.158655) <= 1e-6
    grid = np.linspace(-1.0, 3.0, 101)
    errs = [gaussian_error(0.0, 2.0, float(t)) for t in grid]
    assert value <= min(errs)
    assert abs(grid[int(np.argmin(errs))] - 1.0) < 1e-9

    f = generate(GaussianSpec(np.array([[0.0], [2.0]]), 1.0, 10_000, seed=4))
    h = train_head(f[1], f[0], TrainConfig())  # class at 2 on the positive side
    assert abs(empirical_error(h, f[1], f[0]) - 0.1587) <= 0.01
    assert abs(-h.b / float(h.w[0]) - 1.0) <= 0.15
    assert time.perf_counter() - t0 < 10.0


def test_5_algorithm1_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    for _ in range(50):
        n_eval = int(rng.integers(2, 5))
        d = int(rng.integers(1, 4))
        n_bank = int(rng.choice([2, 3, 4]))  # 1, 3 or 6 heads
        data = [rng.normal(size=(int(rng.integers(1, 9)), d)) * 2 + rng.normal(size=d) * 3
                for _ in range(n_eval)]
        if rng.random() < 0.3:
            data = [np.round(X) for X in data]  # exercises decision values of exactly 0
        heads = [(rng.normal(size=d), float(rng.normal())) for _ in all_pairs(n_bank)]
        if rng.random() < 0.3:
            heads = [(np.round(w), round(b)) for w, b in heads]
        bank = HeadBank([f"b{k}" for k in range(n_bank)], d,
                        {p: Hyperplane(w, b) for p, (w, b) in zip(all_pairs(n_bank), heads)})
        feats = FeatureSet([f"e{k}" for k in range(n_eval)], data)
        scores = []
        for eps in (0.01, 0.05, 0.1, 0.25):
            S = separability_matrix(feats, bank, eps)
            oracle = brute_separability([[tuple(x) for x in X] for X in data],
                                        [(list(w), b) for w, b in heads], eps)
            assert S.tolist() == oracle
            scores.append(separability_score(S))
        assert scores == sorted(scores)
    assert time.perf_counter() - t0 < 10.0


def test_6_hasse_closure():
    t0 = time.perf_counter()
    rng = random.Random(6)
    for _ in range(100):
        n = rng.randint(2, 6)
        sets = [separable_set(random_model(rng, n), n) for _ in range(rng.randint(1, 12))]
        groups = equivalence_classes(sets)
        reps = [set(sets[g[0]].pairs()) for g in groups]
        edges = hasse_diagram(sets)
        assert transitive_closure(edges, len(groups)) == strict_reachability(reps)
    assert time.perf_counter() - t0 < 5.0


# base classes spread on a grid; novel pairs (0,1) and (2,3) sit 1 apart, every
# other novel pair at least 3 apart
BASE = [[0, 0], [6, 0], [0, 6], [6, 6], [3, -4]]
NOVEL = [[0, 0], [1, 0], [0, 3], [1, 3], [5, 1.5]]


def test_7_fewshot_direction():
    t0 = time.perf_counter()
    means = np.array(BASE + NOVEL, dtype=float)
    novel_gaps = [np.linalg.norm(means[5 + i] - means[5 + j]) for i, j in all_pairs(5)]
    assert min(g for g in novel_gaps if g > 1.5) / max(g for g in novel_gaps if g < 1.5) >= 3
    universe = generate(GaussianSpec(means, 0.5, 200, seed=7))
    base = universe.subset(universe.names[:5])
    novel = universe.subset(universe.names[5:])
    bank = build_bank(base, TrainConfig())
    sets = best_worst_pair_sets(bank, novel, 0.05, 2)
    assert sorted(sets.worst) == [(0, 1), (2, 3)]

    cfg = EpisodeConfig(ways=2, shots=1, queries=15)
    best = run_episodes(novel, cfg, 2000, seed=11, class_pool=sets.best)
    worst = run_episodes(novel, cfg, 2000, seed=11, class_pool=sets.worst)
    print(f"\nbest {best.mean:.4f} +/- {best.ci95:.4f}, worst {worst.mean:.4f} +/- {worst.ci95:.4f}")
    assert best.mean - worst.mean >= 0.05

    twins = generate(GaussianSpec(np.zeros((2, 2)), 0.5, 200, seed=8))
    control = run_episodes(twins, cfg, 2000, seed=11)
    print(f"control {control.mean:.4f} +/- {control.ci95:.4f}")
    assert abs(control.mean - 0.5) <= control.ci95
    assert time.perf_counter() - t0 < 60.0


def test_8_metrics_pipeline():
    xs = [0.0, 1.0, 2.0, 4.0, 7.0]
    r, slope, intercept = pearson(xs, [-1.5 * x + 4 for x in xs])
    assert abs(r + 1) <= 1e-12 and abs(slope + 1.5) <= 1e-12 and abs(intercept - 4) <= 1e-12
    r, slope, intercept = pearson(xs, [3 * x - 2 for x in xs])
    assert abs(r - 1) <= 1e-12 and abs(slope - 3) <= 1e-12 and abs(intercept + 2) <= 1e-12
    s, b = least_squares_line([1, 2, 3, 4, 5], [2, 4, 5, 4, 5])
    r, slope, intercept = pearson([1, 2, 3, 4, 5], [2, 4, 5, 4, 5])
    assert abs(slope - float(s)) <= 1e-12 and abs(intercept - float(b)) <= 1e-12
    assert abs(r - 6 / math.sqrt(60)) <= 1e-12

    # rows (x,y) (x,z) (y,z); heads (a,b) (a,c) (b,c) in run 1, (a,d) (a,e) (d,e) in run 2
    E1 = [[0.01, 0.30, 0.30], [0.30, 0.02, 0.30], [0.30, 0.30, 0.03]]
    E2 = [[0.00, 0.00, 0.40], [0.00, 0.40, 0.40], [0.00, 0.40, 0.40]]
    runs = [RunRecord(rid, list(sub), SeparabilityReport(["x", "y", "z"], list(sub), 0.25,
                                                         np.array(E)))
            for rid, sub, E in (("r1", "abc", E1), ("r2", "ade", E2))]
    # a: run 1 -> 2 rows, run 2 -> 3 rows; mean 2.5
    assert class_separability(runs, "a", 0.025) == 2.5
    assert class_separability(runs, "c", 0.03) == 2.0  # error equal to eps counts
    assert class_separability(runs, "e", 0.025) == 1.0
    assert pair_separability(runs, ("a", "b"), 0.025) == 1.0
    assert pair_separability(runs, ("a", "d"), 0.025) == 3.0
    assert pair_separability(runs, ("b", "c"), 0.03) == 0.0


def _pipeline(tmp):
    """Every CLI pipeline the criteria use, writing JSON into ``tmp``."""
    cube, parity = tmp / "cube.json", tmp / "parity.json"
    spec, feats, bank = tmp / "spec.json", tmp / "f.csv", tmp / "bank.json"
    spec.write_text(json.dumps({"means": BASE + NOVEL, "sigma": 0.5, "samples": 60, "seed": 7}))
    names = ",".join(f"c{k}" for k in range(5))
    novel = ",".join(f"c{k}" for k in range(5, 10))
    steps = [
        ["construct", "--hypercube", 4, "-o", cube],
        ["construct", "--parity", 6, "-o", parity],
        ["poset", cube, "-o", tmp / "cube_poset.json", "--dot", tmp / "cube.dot"],
        ["poset", parity, "-o", tmp / "parity_poset.json"],
        ["synth", spec, "-o", feats],
        ["train-heads", feats, "--classes", names, "-o", bank],
        ["separability", feats, "--bank", bank, "--eval-classes", novel, "-o", tmp / "sep.json",
         "--csv", tmp / "sep.csv"],
        ["separability", feats, "--bank", bank, "--eval-classes", novel, "--run-id", "r0",
         "-o", tmp / "run_pre.json"],
        ["separability", feats, "--bank", bank, "--eval-classes", novel, "--run-id", "r0",
         "--stage", "post", "-o", tmp / "run_post.json"],
        ["metrics", tmp / "run_pre.json", tmp / "run_post.json", "-o", tmp / "table.json"],
        ["poset", "--bank", bank, "--features", feats, "--eval-classes", novel,
         "-o", tmp / "bank_poset.json"],
        ["fewshot", feats, "--runs", 200, "--seed", 3, "-o", tmp / "fewshot.json"],
    ]
    for argv in steps:
        code, _ = run_cli(*argv, "--deterministic")
        assert code == 0, argv
    return {p.name: p.read_bytes() for p in sorted(tmp.iterdir())}


def test_9_determinism(tmp_path):
    first = _pipeline(tmp_path)
    second = _pipeline(tmp_path)
    assert first.keys() == second.keys() and len(first) >= 12
    for name in first:
        assert first[name] == second[name], name
    for name, data in first.items():
        if name.endswith(".json") and name != "spec.json":
            assert b'"created"' not in data, name
