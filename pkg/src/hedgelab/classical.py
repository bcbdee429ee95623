"""Two classical one-round games, each played twice with target "win exactly one".

Game 1: the player sends b; b = 0 loses, b = 1 wins with probability 1/2.
Game 2: the board sends a uniform bit a, the player answers b.
    a = 0: b = 0 loses, b = 1 wins with probability p.
    a = 1: b = 0 wins,  b = 1 loses with probability p.

Values come from exhaustive enumeration of deterministic strategies, which
suffices because mixed strategies are convex combinations of them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

HALF = Fraction(1, 2)
BITS = (0, 1)


@dataclass(frozen=True)
class ClassicalGame1:
    def boards(self):
        """Board messages with their probabilities (game 1 sends nothing)."""
        return [(None, 1)]

    def win_prob(self, a, b):
        return 0 if b == 0 else HALF


@dataclass(frozen=True)
class ClassicalGame2:
    p: object = HALF

    def __post_init__(self):
        if not 0 <= self.p < 1:
            raise ValueError("p must lie in [0, 1)")

    def boards(self):
        return [(0, HALF), (1, HALF)]

    def win_prob(self, a, b):
        if a == 0:
            return 0 if b == 0 else self.p
        return 1 if b == 0 else 1 - self.p


def _exactly_one(w1, w2):
    return w1 * (1 - w2) + w2 * (1 - w1)


def _functions(domain, codomain=BITS):
    """All maps domain -> codomain as dicts, in a fixed order."""
    domain = list(domain)
    for image in itertools.product(codomain, repeat=len(domain)):
        yield dict(zip(domain, image))


def parallel_strategies(game):
    """(b1, b2) chosen from both board messages at once."""
    msgs = [a for a, _ in game.boards()]
    pairs = list(itertools.product(msgs, repeat=2))
    for f in _functions(pairs, list(itertools.product(BITS, repeat=2))):
        value = 0
        for a1, pa1 in game.boards():
            for a2, pa2 in game.boards():
                b1, b2 = f[(a1, a2)]
                value += pa1 * pa2 * _exactly_one(game.win_prob(a1, b1), game.win_prob(a2, b2))
        yield _describe(f), value


def sequential_strategies(game):
    """b1 from a1; b2 from (a1, outcome of game 1, a2)."""
    msgs = [a for a, _ in game.boards()]
    for f1 in _functions(msgs):
        for f2 in _functions(list(itertools.product(msgs, BITS, msgs))):
            value = 0
            for a1, pa1 in game.boards():
                b1 = f1[a1]
                w1 = game.win_prob(a1, b1)
                for o1, po1 in ((1, w1), (0, 1 - w1)):
                    for a2, pa2 in game.boards():
                        w2 = game.win_prob(a2, f2[(a1, o1, a2)])
                        # exactly one win: the second outcome must differ from the first
                        value += pa1 * po1 * pa2 * (1 - w2 if o1 else w2)
            yield (_describe(f1), _describe(f2)), value


def _describe(f):
    return tuple(sorted(f.items(), key=lambda kv: repr(kv[0])))


def enumerate_strategy_values(game, setting: str):
    if setting == "parallel":
        return list(parallel_strategies(game))
    if setting == "sequential":
        return list(sequential_strategies(game))
    raise ValueError(f"setting must be 'parallel' or 'sequential', got {setting!r}")


def values(game) -> dict:
    return {
        "sval": max(v for _, v in sequential_strategies(game)),
        "pval": max(v for _, v in parallel_strategies(game)),
    }


def single_game_value(game):
    """Best probability of winning one copy."""
    return max(sum(pa * game.win_prob(a, f[a]) for a, pa in game.boards())
               for f in _functions([a for a, _ in game.boards()]))


def game1_values() -> dict:
    return values(ClassicalGame1())


def game2_values(p) -> dict:
    return values(ClassicalGame2(p))


def game2_claimed(p) -> dict:
    """Closed forms as stated for game 2: pval >= 1/2 + 2p(1-p), sval = 1/2 + p/2."""
    return {"pval": HALF + 2 * p * (1 - p), "sval": HALF + HALF * p}


def game2_closed_form(p) -> dict:
    """Enumeration-consistent closed forms.

    When a1 = a2 (probability 1/2) the best reply wins exactly once with
    probability max(p, 2p(1-p)); when a1 != a2 it always does.
    """
    return {"pval": HALF + HALF * max(p, 2 * p * (1 - p)), "sval": HALF + HALF * p}
