import itertools
import os
from fractions import Fraction
from pathlib import Path

import pytest

import gridminer

SAMPLES = Path(os.environ.get("GRIDMINER_SAMPLES", Path(__file__).resolve().parents[2] / "samples"))


def brute_force(db, minsup):
    counts = {}
    for seq in db:
        subs = set()
        for r in range(1, len(seq) + 1):
            subs.update(itertools.combinations(seq, r))
        for s in subs:
            counts[s] = counts.get(s, 0) + 1
    found = {s: Fraction(c, len(db)) for s, c in counts.items() if Fraction(c, len(db)) >= minsup}
    return sorted(found.items(), key=lambda kv: (len(kv[0]), kv[0]))


def test_mine_three_sequence_example():
    db = [[1, 2, 3], [1, 3], [2, 3]]
    got = gridminer.mine(db, Fraction(2, 3))
    assert got == [
        ((1,), Fraction(2, 3)),
        ((2,), Fraction(2, 3)),
        ((3,), Fraction(1)),
        ((1, 3), Fraction(2, 3)),
        ((2, 3), Fraction(2, 3)),
    ]
    assert got == brute_force(db, Fraction(2, 3))
    assert gridminer.mine(db, "2/3", partitions=3, workers=2) == got


def test_mine_matches_brute_force_on_random_data():
    import random

    rng = random.Random(3)
    for _ in range(10):
        db = [[rng.randrange(4) for _ in range(rng.randint(1, 6))] for _ in range(rng.randint(1, 20))]
        minsup = Fraction(rng.randint(1, 5), 5)
        assert gridminer.mine(db, minsup, partitions=rng.choice([1, 2, 4])) == brute_force(db, minsup)


def test_probabilistic_full_sample_reports_epsilon():
    db = [[1, 2], [1], [2, 1], [1, 2, 3]] * 5
    rows = gridminer.mine_prob(db, Fraction(1, 2), sample_rate=1, delta=0.05, seed=1)
    eps = gridminer.hoeffding_epsilon(len(db), 0.05)
    assert rows and all(e == pytest.approx(eps) for _, _, e in rows)
    assert gridminer.hoeffding_epsilon(200, 0.05) == pytest.approx(0.0960, abs=1e-4)


def test_gini_and_classify():
    assert gridminer.gini([4, 0]) == 0
    assert gridminer.gini([2, 2]) == Fraction(1, 2)
    assert gridminer.gini([3, 1]) == Fraction(3, 8)
    tree = gridminer.classify("x,y,cls\n0,0,A\n0,1,B\n1,0,B\n1,1,A\n", "cls", max_depth=2, min_records=1)
    assert sum(line.strip().startswith("leaf") for line in tree.splitlines()) == 4
    assert gridminer.classify((SAMPLES / "pure.csv").read_text(), "kind") == "leaf apple (n=3)\n"


def test_reformulate():
    assert gridminer.reformulate("/a/b", "A") == []
    mappings = [
        {"from": "A", "to": "B", "pairs": [[["dept", "emp"], ["division", "person"]]]},
        {"from": "B", "to": "C", "pairs": [[["division"], ["unit"]]]},
    ]
    assert gridminer.reformulate("/dept/emp/age[>40]", "A", mappings) == [
        ("B", "/division/person/age[>40]"),
        ("C", "/unit/person/age[>40]"),
    ]


def test_scheduler_and_delivery():
    assert gridminer.select_gridlet([5, 3, 7]) == 1
    assert gridminer.select_gridlet([4, 4], queue_len=[2, 1]) == 1
    assert gridminer.select_gridlet([10, 0], trust=[(8, 0), (0, 8)]) == 0
    assert gridminer.select_gridlet([1], trust=[(0, 9)]) is None
    assert max(gridminer.delivery_times([1, 2, 2])) == 2
    assert max(gridminer.delivery_times([1, 2, 2], sequential=True)) == 5


def test_simulate_is_deterministic():
    cfg, wl = SAMPLES / "grid.json", SAMPLES / "workload.json"
    report, text, trace = gridminer.simulate(cfg, wl, seed=3)
    _, text2, trace2 = gridminer.simulate(cfg, wl, seed=3, workers=4)
    assert text == text2 and trace == trace2
    assert all(job["state"] == "delivered" for job in report["jobs"])
    assert trace[0].startswith("tick=")


def test_errors_surface_as_value_errors():
    with pytest.raises(gridminer.GridminerError):
        gridminer.mine([[1]], 0)
    with pytest.raises(ValueError):
        gridminer.reformulate("no-slash", "A")
