"""The EPR-pair weak coin flip and its cheating and hedging strategies.

Alice prepares |Phi+> on A (x) M and sends M to Bob; Bob answers with a bit b;
both apply H when b = 1 and measure.  Outcome 0 means Alice wins, 1 means Bob
wins.  A cheating Bob is modelled by letting his message be a qubit that
Alice measures in the standard basis on arrival.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .games import MeasureOnlyGame, OneRoundGame, ParallelGame, m_par_measure_only
from .sdpsolve import PTraceSDP, SDPConfig, SDPSolution, dual_feasible, dual_value, solve_primal

P_STAR = math.cos(math.pi / 8) ** 2  # (2 + sqrt 2) / 4
SIN2 = math.sin(math.pi / 8) ** 2
MAX_PARALLEL = 3

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
KET0, KET1 = la.ket(0), la.ket(1)
PLUS = (KET0 + KET1) / math.sqrt(2)
MINUS = (KET0 - KET1) / math.sqrt(2)
PHI_PLUS = (la.ket(0, 0) + la.ket(1, 1)) / math.sqrt(2)
LAYOUT = la.SubsystemLayout((2, 2))

# printed dual matrix; it certifies Bob's best probability of outcome 0
Y_PRINTED = np.array([[3 + math.sqrt(2), 1], [1, 1 + math.sqrt(2)]], dtype=complex) / 8
# maps |0> -> |1>, |+> -> -|->, carrying the outcome-0 certificate to outcome 1
_FLIP = np.array([[0, -1], [1, 0]], dtype=complex)


class CapacityError(ValueError):
    """Instance too large for dense SDP treatment."""


@dataclass(frozen=True)
class ProtocolOutcome:
    b: int
    alice_result: int
    bob_result: int

    @property
    def winner(self) -> str:
        return "Alice" if self.alice_result == 0 else "Bob"


def bob_win_operator() -> np.ndarray:
    """|1><1| (x) |0><0| + |-><-| (x) |1><1| on A (x) M."""
    return la.kron(la.proj(KET1), la.proj(KET0)) + la.kron(la.proj(MINUS), la.proj(KET1))


def coin_flip_game() -> OneRoundGame:
    """One flip with Bob as the player; outcome 1 is a Bob win."""
    w = bob_win_operator()
    return OneRoundGame(PHI_PLUS, {0: np.eye(4) - w, 1: w}, LAYOUT)


def honest_joint(b: int) -> np.ndarray:
    """Joint distribution [alice_result, bob_result] for Bob's bit ``b``."""
    u = H if b else np.eye(2)
    amp = la.kron(u, u) @ PHI_PLUS
    return (np.abs(amp) ** 2).reshape(2, 2)


def honest_distribution(branch: int | None = None) -> dict[str, float]:
    branches = (0, 1) if branch is None else (branch,)
    joint = sum(honest_joint(b) for b in branches) / len(branches)
    return {"Alice": float(joint[0, :].sum()), "Bob": float(joint[1, :].sum())}


def honest_agreement() -> float:
    return float(sum(np.trace(honest_joint(b)) for b in (0, 1)) / 2)


def sample_honest(shots: int, seed: int = 0) -> list[ProtocolOutcome]:
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=shots)
    cdf = np.array([np.cumsum(honest_joint(b).reshape(-1)) for b in (0, 1)])
    u = rng.random(shots)
    ks = np.minimum((u[:, None] > cdf[bits]).sum(axis=1), 3)
    return [ProtocolOutcome(int(b), int(k // 2), int(k % 2)) for b, k in zip(bits, ks)]


def alice_operator(win: bool = True) -> np.ndarray:
    """Pr(Alice wins) = tr(op rho) for the qubit rho she sends."""
    if win:
        return 0.5 * (la.proj(KET0) + la.proj(PLUS))
    return 0.5 * (la.proj(KET1) + la.proj(MINUS))


def alice_cheat_value(operator=None) -> float:
    op = alice_operator() if operator is None else operator
    return la.max_eig(op)


def bob_sdp(outcome: int = 1) -> PTraceSDP:
    w = bob_win_operator()
    return PTraceSDP(w if outcome == 1 else np.eye(4) - w, np.eye(2) / 2, LAYOUT)


def printed_certificate(outcome: int = 0) -> np.ndarray:
    """2 Y_printed for outcome 0, its image under the |0>->|1> flip for outcome 1."""
    y = 2 * Y_PRINTED
    if outcome == 1:
        y = _FLIP @ y @ _FLIP.conj().T
    return y


@dataclass
class BobCertificate:
    solution: SDPSolution
    outcome0_value: float
    printed_dual: float
    printed_feasible_outcome0: bool
    printed_feasible_outcome1: bool
    flipped_feasible_outcome1: bool

    @property
    def gap(self) -> float:
        return self.printed_dual - self.solution.primal_value


def bob_cheat_value(cfg: SDPConfig | None = None, objective_scale: float = 1.0) -> BobCertificate:
    """Bob's best single-flip win probability with the printed dual certificate.

    ``objective_scale`` perturbs W; it exists to confirm certification fails.
    """
    sdp1 = bob_sdp(1).scaled(objective_scale)
    sol = solve_primal(sdp1, cfg)
    sdp0 = bob_sdp(0).scaled(objective_scale)
    q0 = solve_primal(sdp0, cfg, certify=False).primal_value
    y0, y1 = printed_certificate(0), printed_certificate(1)
    return BobCertificate(
        solution=sol,
        outcome0_value=q0,
        printed_dual=dual_value(y0, sdp1.sigma),
        printed_feasible_outcome0=dual_feasible(y0, sdp0.W, LAYOUT),
        printed_feasible_outcome1=dual_feasible(y0, sdp1.W, LAYOUT),
        flipped_feasible_outcome1=dual_feasible(y1, sdp1.W, LAYOUT),
    )


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def zeta_printed() -> np.ndarray:
    s, c = math.sin(math.pi / 8), math.cos(math.pi / 8)
    return (la.kron(s * KET0 + c * KET1, KET0) - la.kron(s * PLUS + c * MINUS, KET1)) / math.sqrt(2)


def bob_explicit_state(theta: float = -3 * math.pi / 8) -> np.ndarray:
    return la.kron(np.eye(2), rotation(theta)) @ PHI_PLUS


def bob_explicit_strategy_value(theta: float = -3 * math.pi / 8) -> float:
    """Rotate M by ``theta``, measure it, send the bit; return Pr(Bob wins)."""
    zeta = bob_explicit_state(theta)
    if theta == -3 * math.pi / 8:
        residual = np.abs(zeta - zeta_printed()).max()
        if residual > 1e-10:
            raise AssertionError(f"rotated state deviates from its closed form by {residual}")
    total = 0.0
    for msg in (0, 1):
        branch = la.kron(np.eye(2), la.proj(la.ket(msg))) @ zeta
        win = la.proj(KET1) if msg == 0 else la.proj(MINUS)
        total += float(np.vdot(branch, la.kron(win, np.eye(2)) @ branch).real)
    return total


ALPHA = (
    (la.ket(0, 0) - la.ket(1, 1)) / math.sqrt(2),
    (la.ket(0, 1) + la.ket(1, 0)) / math.sqrt(2),
    (la.kron(KET0, MINUS) + la.kron(KET1, PLUS)) / math.sqrt(2),
    (la.kron(MINUS, KET0) + la.kron(PLUS, KET1)) / math.sqrt(2),
)
GAMMA = (la.ket(1, 1), la.ket(0, 0), la.ket(0, 1), la.ket(1, 0))
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


@dataclass(frozen=True)
class HedgeAttack:
    alpha: tuple
    gamma: tuple
    U: np.ndarray

    def gram(self) -> np.ndarray:
        a = np.array(self.alpha)
        return a.conj() @ a.T

    def initial_identity_residual(self) -> float:
        """|| sum_i |ii>|ii> - sum_i |alpha_i>|alpha_i> || / 2 over (A1 A2)(M1 M2)."""
        lhs = sum(la.kron(la.ket(*b), la.ket(*b)) for b in ((0, 0), (0, 1), (1, 0), (1, 1))) / 2
        rhs = sum(la.kron(a, a) for a in self.alpha) / 2
        return float(np.abs(lhs - rhs).max())

    def unitarity_residual(self) -> float:
        return float(np.abs(self.U @ self.U.conj().T - np.eye(4)).max())


def build_hedge_attack() -> HedgeAttack:
    u = sum(np.outer(g, a.conj()) for g, a in zip(GAMMA, ALPHA))
    attack = HedgeAttack(ALPHA, GAMMA, u)
    if np.abs(attack.gram() - np.eye(4)).max() > 1e-12:
        raise AssertionError("alpha states are not orthonormal")
    if attack.initial_identity_residual() > 1e-12:
        raise AssertionError("initial-state identity fails")
    if np.abs(SWAP @ ALPHA[2] - ALPHA[3]).max() > 1e-12:
        raise AssertionError("SWAP does not exchange alpha_2 and alpha_3")
    return attack


def swap_distance(v) -> float:
    """min over signs of || SWAP v -/+ v ||."""
    sv = SWAP @ v
    return float(min(np.linalg.norm(sv - v), np.linalg.norm(sv + v)))


def hedge_state(attack: HedgeAttack | None = None) -> np.ndarray:
    """Two EPR pairs on (A1 A2)(M1 M2) after Bob applies U to M1 M2."""
    attack = attack or build_hedge_attack()
    psi = sum(la.kron(la.ket(*b), la.ket(*b)) for b in ((0, 0), (0, 1), (1, 0), (1, 1))) / 2
    return la.kron(np.eye(4), attack.U) @ psi


def hedge_branch(bits: tuple[int, int], attack: HedgeAttack | None = None):
    """Alice's post-measurement A1 A2 state and the (o1, o2) distribution after her H's."""
    psi = hedge_state(attack).reshape(4, 4)
    left = psi[:, 2 * bits[0] + bits[1]]
    prob = float(np.vdot(left, left).real)
    left = left / math.sqrt(prob)
    u = la.kron(H if bits[0] else np.eye(2), H if bits[1] else np.eye(2))
    dist = np.abs(u @ left) ** 2
    return prob, left, {(o1, o2): float(dist[2 * o1 + o2]) for o1 in (0, 1) for o2 in (0, 1)}


def simulate_parallel_hedge(attack: HedgeAttack | None = None) -> dict[tuple[int, int], float]:
    """Exact distribution of (Bob wins flip 1, Bob wins flip 2)."""
    attack = attack or build_hedge_attack()
    out = {(w1, w2): 0.0 for w1 in (0, 1) for w2 in (0, 1)}
    for b1 in (0, 1):
        for b2 in (0, 1):
            prob, _, dist = hedge_branch((b1, b2), attack)
            for key, p in dist.items():
                out[key] += prob * p
    return out


def sample_parallel_hedge(shots: int, seed: int = 0) -> np.ndarray:
    """Monte Carlo draws of (win1, win2); rows are shots."""
    dist = simulate_parallel_hedge()
    keys = sorted(dist)
    p = np.array([dist[k] for k in keys])
    rng = np.random.default_rng(seed)
    draws = rng.choice(len(keys), size=shots, p=p / p.sum())
    return np.array(keys)[draws]


def independent_cheat_value(n: int, k: int) -> float:
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    return sum(math.comb(n, j) * P_STAR**j * (1 - P_STAR) ** (n - j) for j in range(k, n + 1))


def at_least(n: int, k: int) -> np.ndarray:
    """Target vector rewarding >= k Bob wins (bit 1 = Bob win, first flip most significant)."""
    return np.array([1.0 if bin(i).count("1") >= k else 0.0 for i in range(2**n)])


def parallel_game(n: int) -> ParallelGame:
    if n > MAX_PARALLEL:
        raise CapacityError(f"{n} parallel flips need a {4 ** n}-dim SDP; at most {MAX_PARALLEL} supported")
    return ParallelGame([coin_flip_game()] * n)


def parallel_cheat_value(n: int, k: int, cfg: SDPConfig | None = None) -> SDPSolution:
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    return parallel_game(n).value(at_least(n, k), cfg)


def alice_measurement() -> MeasureOnlyGame:
    """Bob's view of a cheating Alice: outcome 1 = Alice loses."""
    return MeasureOnlyGame({0: alice_operator(True), 1: alice_operator(False)})


def alice_hedging_bound(n: int) -> float:
    """Smallest probability Alice can give to losing all ``n`` parallel flips."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return m_par_measure_only([alice_measurement()] * n, [1] * n)
