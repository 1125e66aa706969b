"""Python front end for the gridminer core.

Supports and gini values come back as fractions.Fraction; thresholds may be
given as Fraction, int, float or a "n/d" string.
"""

from fractions import Fraction
import json

from . import _core
from ._core import GridminerError, hoeffding_epsilon, is_subsequence

__all__ = [
    "GridminerError",
    "classify",
    "delivery_times",
    "gini",
    "hoeffding_epsilon",
    "is_subsequence",
    "mine",
    "mine_prob",
    "reformulate",
    "select_gridlet",
    "simulate",
]


def _ratio_text(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def _fraction(pair):
    return Fraction(pair[0], pair[1])


def mine(sequences, minsup, partitions=1, policy="round_robin", workers=1):
    """Exact frequent subsequences as [(items, support)]."""
    rows = _core.mine(sequences, _ratio_text(minsup), partitions, policy, workers)
    return [(tuple(items), _fraction(sup)) for items, sup in rows]


def mine_prob(sequences, minsup, sample_rate=Fraction(1, 2), delta=0.05, seed=0, partitions=1, policy="round_robin"):
    """Sample-based estimate as [(items, estimated support, epsilon)]."""
    rows = _core.mine_prob(sequences, _ratio_text(minsup), _ratio_text(sample_rate), delta, seed, partitions, policy)
    return [(tuple(items), _fraction(sup), eps) for items, sup, eps in rows]


def gini(class_counts):
    return _fraction(_core.gini(list(class_counts)))


def classify(csv_text, target, max_depth=4, min_records=2, partitions=1):
    """Rendered decision tree, one node per line."""
    return _core.classify(csv_text, target, max_depth, min_records, partitions)


def reformulate(query, schema, mappings=(), max_steps=16):
    """[(schema, query)] reachable through the mappings (list of dicts or JSON text)."""
    text = mappings if isinstance(mappings, str) else json.dumps(list(mappings))
    return _core.reformulate(query, schema, text, max_steps)


def select_gridlet(busy, queue_len=None, trust=None, threshold=Fraction(1, 4)):
    n = len(busy)
    return _core.select_gridlet(
        list(busy),
        list(queue_len) if queue_len is not None else [0] * n,
        list(trust) if trust is not None else [(0, 0)] * n,
        _ratio_text(threshold),
    )


def delivery_times(latencies, at=0, sequential=False):
    return _core.delivery_times(list(latencies), at, sequential)


def simulate(config_path, workload_path, seed=0, sequential=False, workers=1, trust_threshold=Fraction(1, 4), failures=()):
    """Runs a workload; returns (report dict, report text, trace lines)."""
    text, trace = _core.simulate(
        str(config_path), str(workload_path), seed, sequential, workers, _ratio_text(trust_threshold), list(failures)
    )
    return json.loads(text), text, trace
