"""Two-outcome board games with one round of communication.

The board prepares a pure state on A (x) M and hands M to the player, who
applies any channel and returns it; the board then measures with projectors
{P_0, P_1} on A (x) M.  Because the player cannot touch A, every strategy is a
state rho with tr_M rho equal to the initial reduced state, so the best
probability of an outcome is a :class:`~hedgelab.sdpsolve.PTraceSDP`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import linalg as la
from .sdpsolve import PTraceSDP, SDPConfig, SDPSolution, solve_primal


class SolverError(RuntimeError):
    """The SDP solver did not reach its tolerance."""


@dataclass(frozen=True)
class OneRoundGame:
    initial: np.ndarray
    projectors: Mapping[int, np.ndarray]
    layout: la.SubsystemLayout

    def __post_init__(self):
        psi = np.asarray(self.initial, dtype=complex).reshape(-1)
        if psi.shape[0] != self.layout.dim:
            raise ValueError("initial state does not match layout")
        if abs(np.vdot(psi, psi).real - 1.0) > 1e-12:
            raise ValueError("initial state must be normalized")
        if set(self.projectors) != {0, 1}:
            raise ValueError("only two-outcome games are supported")
        projs = {a: la.hermitize(p) for a, p in self.projectors.items()}
        total = projs[0] + projs[1]
        if np.abs(total - np.eye(self.layout.dim)).max() > 1e-12:
            raise ValueError("outcome projectors must sum to the identity")
        for a, p in projs.items():
            if np.abs(p @ p - p).max() > 1e-10:
                raise ValueError(f"outcome operator {a} is not a projector")
        object.__setattr__(self, "initial", psi)
        object.__setattr__(self, "projectors", projs)

    @property
    def board_state(self) -> np.ndarray:
        """Reduced state on the board registers, which no strategy can change."""
        return la.partial_trace(la.proj(self.initial), self.layout, self.layout.board_factors())

    def sdp(self, W) -> PTraceSDP:
        return PTraceSDP(W, self.board_state, self.layout)

    def probability(self, rho, outcome: int) -> float:
        return float(np.trace(self.projectors[outcome] @ rho).real)


@dataclass(frozen=True)
class OutcomeExtremes:
    q0: float
    q1: float

    def __post_init__(self):
        for q in (self.q0, self.q1):
            if not -1e-9 <= q <= 1 + 1e-9:
                raise ValueError(f"probability {q} outside [0, 1]")
        if self.q0 + self.q1 < 1 - 1e-9:
            raise ValueError("q0 + q1 must be at least 1")

    @property
    def m0(self) -> float:
        return 1.0 - self.q1

    @property
    def m1(self) -> float:
        return 1.0 - self.q0

    def m(self, outcome: int) -> float:
        return self.m0 if outcome == 0 else self.m1


def _solve(sdp: PTraceSDP, cfg: SDPConfig | None) -> SDPSolution:
    sol = solve_primal(sdp, cfg)
    if not sol.converged:
        raise SolverError(f"SDP did not converge after {sol.iterations} iterations")
    return sol


def outcome_extremes(g: OneRoundGame, cfg: SDPConfig | None = None) -> OutcomeExtremes:
    q0 = _solve(g.sdp(g.projectors[0]), cfg).primal_value
    q1 = _solve(g.sdp(g.projectors[1]), cfg).primal_value
    return OutcomeExtremes(min(q0, 1.0), min(q1, 1.0))


class ParallelGame:
    """Several one-round games played at once by a single player.

    Registers are game-major (A1 M1 A2 M2 ...), which is just the tensor
    product of the component layouts.
    """

    def __init__(self, games: Sequence[OneRoundGame]):
        if not games:
            raise ValueError("need at least one game")
        self.games = tuple(games)
        self.n = len(self.games)
        self.layout = la.SubsystemLayout(tuple(d for g in self.games for d in g.layout.dims))
        self.keep = tuple(
            offset + k
            for offset, g in zip(np.cumsum([0] + [len(g.layout) for g in self.games[:-1]]), self.games)
            for k in g.layout.board_factors()
        )
        self.initial = la.kron_all(g.initial.reshape(-1, 1) for g in self.games).reshape(-1)

    @property
    def board_state(self) -> np.ndarray:
        return la.kron_all(g.board_state for g in self.games)

    def projector(self, outcomes: Sequence[int]) -> np.ndarray:
        if len(outcomes) != self.n:
            raise ValueError(f"expected {self.n} outcomes")
        return la.kron_all(g.projectors[int(a)] for g, a in zip(self.games, outcomes))

    def objective(self, t) -> np.ndarray:
        """W(t) = sum_a t_a P_a, outcome strings indexed first-game-most-significant."""
        t = np.asarray(t, dtype=float).reshape(-1)
        if t.shape[0] != 2**self.n:
            raise ValueError(f"target needs {2 ** self.n} entries")
        W = np.zeros((self.layout.dim, self.layout.dim), dtype=complex)
        for idx, a in enumerate(itertools.product((0, 1), repeat=self.n)):
            if t[idx] != 0:
                W += t[idx] * self.projector(a)
        return W

    def sdp(self, W) -> PTraceSDP:
        return PTraceSDP(W, self.board_state, self.layout, self.keep)

    def value(self, t, cfg: SDPConfig | None = None) -> SDPSolution:
        return solve_primal(self.sdp(self.objective(t)), cfg)

    def m_par(self, outcomes: Sequence[int], cfg: SDPConfig | None = None) -> float:
        """Minimal probability of the joint outcome, 1 - max Pr(not outcomes)."""
        W = np.eye(self.layout.dim) - self.projector(outcomes)
        return 1.0 - _solve(self.sdp(W), cfg).primal_value

    def as_game(self) -> OneRoundGame | None:
        if self.n == 1:
            return self.games[0]
        return None


def parallel_compose(games: Sequence[OneRoundGame]) -> ParallelGame:
    return ParallelGame(games)


def is_hedging(m_par: float, singles: Sequence[float], tol: float = 1e-6) -> bool:
    """Strictly below the product of per-game minima."""
    return m_par < float(np.prod(singles)) - tol


@dataclass(frozen=True)
class MeasureOnlyGame:
    """The player receives a state and is measured with {M_a}; no reply."""

    operators: Mapping[int, np.ndarray]

    def __post_init__(self):
        ops = {a: la.hermitize(m) for a, m in self.operators.items()}
        dims = {m.shape[0] for m in ops.values()}
        if len(dims) != 1:
            raise ValueError("measurement operators must share a dimension")
        d = dims.pop()
        for a, m in ops.items():
            if la.min_eig(m, "lapack") < -1e-10:
                raise ValueError(f"operator {a} is not PSD")
        if np.abs(sum(ops.values()) - np.eye(d)).max() > 1e-10:
            raise ValueError("measurement operators must sum to the identity")
        object.__setattr__(self, "operators", ops)

    def m(self, outcome: int) -> float:
        return la.min_eig(self.operators[outcome])


def m_par_measure_only(ms: Sequence[MeasureOnlyGame], outcomes: Sequence[int], check: bool = True) -> float:
    """Smallest eigenvalue of M_{a1} (x) ... (x) M_{an}."""
    if len(ms) != len(outcomes):
        raise ValueError("one outcome per game")
    if not ms:
        return 1.0
    joint = la.min_eig(la.kron_all(g.operators[a] for g, a in zip(ms, outcomes)))
    if check:
        product = float(np.prod([g.m(a) for g, a in zip(ms, outcomes)]))
        if abs(joint - product) > 1e-9:
            raise AssertionError(f"min eigenvalue {joint} differs from product {product}")
    return joint
