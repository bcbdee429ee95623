"""Sequential two-outcome games: tree value, black-box strategies, brute force.

Outcome strings a = a1...an index target vectors with the first game as the
most significant bit.  Tree nodes are named by the outcome prefix leading to
them ("" is the root, "01" is reached after outcomes 0 then 1).

All arithmetic is generic, so ``fractions.Fraction`` inputs give exact results.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from numbers import Real
from pathlib import Path
from typing import Sequence

S0, S1 = 0, 1
MAX_BRUTEFORCE = 4
ORDER = "first-game-msb"


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class GameParams:
    q0: Real
    q1: Real

    def __post_init__(self):
        for q in (self.q0, self.q1):
            if not 0 <= q <= 1:
                raise ValueError(f"probability {q} outside [0, 1]")
        # the tree value argument relies on q0 >= 1 - q1
        if self.q0 + self.q1 < 1 - 1e-9:
            raise ValueError(f"q0 + q1 = {self.q0 + self.q1} < 1 is not a valid game")

    def m(self, outcome: int):
        """Minimal probability of ``outcome``."""
        return 1 - self.q1 if outcome == 0 else 1 - self.q0

    def prob(self, label: int, outcome: int):
        """Pr(outcome) when playing S0 or S1."""
        if label == S0:
            return self.q0 if outcome == 0 else 1 - self.q0
        return self.q1 if outcome == 1 else 1 - self.q1


@dataclass(frozen=True)
class TargetFn:
    n: int
    t: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        t = tuple(self.t)
        if len(t) != 2**self.n:
            raise ValueError(f"target for n={self.n} needs {2 ** self.n} entries, got {len(t)}")
        if not all(math.isfinite(float(x)) for x in t):
            raise ValueError("target entries must be finite")
        object.__setattr__(self, "t", t)

    @classmethod
    def of(cls, t) -> "TargetFn":
        t = list(t)
        n = len(t).bit_length() - 1
        if 2**n != len(t):
            raise ValueError(f"target length {len(t)} is not a power of two")
        return cls(n, tuple(t))

    def __getitem__(self, outcome: str):
        return self.t[int(outcome, 2)]

    def left(self) -> "TargetFn":
        half = len(self.t) // 2
        return TargetFn(self.n - 1, self.t[:half])

    def right(self) -> "TargetFn":
        half = len(self.t) // 2
        return TargetFn(self.n - 1, self.t[half:])

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "t": [float(x) for x in self.t], "order": ORDER})

    @classmethod
    def from_json(cls, text: str) -> "TargetFn":
        doc = json.loads(text)
        if not isinstance(doc, dict) or "n" not in doc or "t" not in doc:
            raise ValueError("target document needs 'n' and 't'")
        if doc.get("order", ORDER) != ORDER:
            raise ValueError(f"unsupported order {doc['order']!r}; expected {ORDER!r}")
        n, t = doc["n"], doc["t"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValueError("'n' must be an integer")
        if not isinstance(t, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in t):
            raise ValueError("'t' must be a list of numbers")
        return cls(n, tuple(float(x) for x in t))

    @classmethod
    def load(cls, path) -> "TargetFn":
        return cls.from_json(Path(path).read_text())


def one_minus_delta(outcome: str) -> TargetFn:
    """t_a = 1 - [a == outcome]."""
    n = len(outcome)
    hit = int(outcome, 2)
    return TargetFn(n, tuple(0 if i == hit else 1 for i in range(2**n)))


def at_least_ones(n: int, k: int) -> TargetFn:
    return TargetFn(n, tuple(1.0 if bin(i).count("1") >= k else 0.0 for i in range(2**n)))


def internal_nodes(n: int) -> list[str]:
    return ["".join(p) for d in range(n) for p in itertools.product("01", repeat=d)]


@dataclass
class StrategyTree:
    n: int
    labels: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.labels and len(self.labels) != 2**self.n - 1:
            raise ValueError("a depth-n tree has 2^n - 1 internal labels")

    @property
    def value(self):
        return self.values.get("")

    def render(self) -> str:
        lines = []
        for node in internal_nodes(self.n) + ["".join(p) for p in itertools.product("01", repeat=self.n)]:
            name = node or "root"
            label = self.labels.get(node)
            tag = f"S{label}" if label is not None else "leaf"
            val = self.values.get(node)
            val = "" if val is None else f" = {float(val):.10g}"
            lines.append(f"{'  ' * len(node)}{name} [{tag}]{val}")
        return "\n".join(lines)


def _params_at(p, depth):
    if isinstance(p, GameParams):
        return p
    return p[depth]


def _check_params(p, n):
    if not isinstance(p, GameParams) and len(p) != n:
        raise ValueError(f"need one GameParams per game ({n}), got {len(p)}")


def tval(t: TargetFn, p) -> tuple:
    """Backward induction over the outcome tree.

    ``p`` is one :class:`GameParams` or a sequence with one entry per game.
    Ties go to S0.
    """
    _check_params(p, t.n)
    tree = StrategyTree(t.n)
    for i, leaf in enumerate(itertools.product("01", repeat=t.n)):
        tree.values["".join(leaf)] = t.t[i]
    for depth in range(t.n - 1, -1, -1):
        g = _params_at(p, depth)
        for prefix in itertools.product("01", repeat=depth):
            node = "".join(prefix)
            vl, vr = tree.values[node + "0"], tree.values[node + "1"]
            play0 = g.q0 * vl + (1 - g.q0) * vr
            play1 = g.q1 * vr + (1 - g.q1) * vl
            if play0 >= play1:
                tree.labels[node], tree.values[node] = S0, play0
            else:
                tree.labels[node], tree.values[node] = S1, play1
    return tree.values[""], tree


def optimal_blackbox_strategy(t: TargetFn, p) -> StrategyTree:
    return tval(t, p)[1]


def outcome_distribution(labels: dict, n: int, p) -> dict:
    """Pr(a) for every outcome string under a black-box labelling, path by path."""
    dist = {}
    for leaf in itertools.product("01", repeat=n):
        prob = 1
        for depth in range(n):
            g = _params_at(p, depth)
            prob = prob * g.prob(labels["".join(leaf[:depth])], int(leaf[depth]))
        dist["".join(leaf)] = prob
    return dist


def evaluate_strategy(labels: dict, t: TargetFn, p):
    dist = outcome_distribution(labels, t.n, p)
    return sum(t[a] * pr for a, pr in dist.items())


def sval_bruteforce(t: TargetFn, p) -> tuple:
    """Best expected target over every {S0, S1} black-box strategy."""
    if t.n > MAX_BRUTEFORCE:
        raise CapacityError(f"brute force supports n <= {MAX_BRUTEFORCE}, got {t.n}")
    _check_params(p, t.n)
    nodes = internal_nodes(t.n)
    best_val, best_labels = None, None
    for choice in itertools.product((S0, S1), repeat=len(nodes)):
        labels = dict(zip(nodes, choice))
        val = evaluate_strategy(labels, t, p)
        if best_val is None or val > best_val:
            best_val, best_labels = val, labels
    return best_val, StrategyTree(t.n, best_labels, {"": best_val})


def m_seq(p, outcomes: Sequence[int], check: bool = True):
    """prod_i m(a_i); cross-checked against 1 - tval(1 - delta_a)."""
    outcomes = [int(a) for a in outcomes]
    n = len(outcomes)
    if n == 0:
        return 1
    _check_params(p, n)
    product = 1
    for depth, a in enumerate(outcomes):
        product = product * _params_at(p, depth).m(a)
    if check:
        value, _ = tval(one_minus_delta("".join(map(str, outcomes))), p)
        if abs(float((1 - value) - product)) > 1e-12:
            raise AssertionError(f"1 - tval = {1 - value} but product of minima = {product}")
    return product
