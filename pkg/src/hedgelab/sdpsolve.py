"""Partial-trace constrained SDP: maximize tr(W rho) s.t. rho >= 0, tr_M rho = sigma.

The dual is: minimize tr(Y sigma) s.t. Y (x) I_M >= W, with Y Hermitian on the
kept registers.  Any feasible Y upper-bounds the primal optimum, which is how
every reported value is certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la

INV_SQRT_FLOOR = 1e-12
RENORM_REGULARIZER = 1e-9


@dataclass(frozen=True)
class SDPConfig:
    # step is relative to the spectral scale of W, so solves are scale-covariant
    step: float = 0.05
    max_iters: int = 20000
    tol: float = 1e-10


class PTraceSDP:
    """Problem data; ``keep`` lists the layout factors whose marginal is fixed."""

    def __init__(self, W, sigma, layout: la.SubsystemLayout, keep=None):
        W = la.as_matrix(W)
        sigma = la.as_matrix(sigma)
        if keep is None:
            keep = layout.board_factors()
        self.keep = tuple(sorted(keep))
        self.layout = layout
        if W.shape[0] != layout.dim:
            raise ValueError(f"W has dim {W.shape[0]}, layout needs {layout.dim}")
        self.dim_kept = int(np.prod([layout.dims[k] for k in self.keep]))
        self.dim_traced = layout.dim // self.dim_kept
        if sigma.shape[0] != self.dim_kept:
            raise ValueError(f"sigma has dim {sigma.shape[0]}, kept registers need {self.dim_kept}")
        if not la.is_hermitian(W, 1e-10):
            raise ValueError("W must be Hermitian")
        if not la.is_hermitian(sigma, 1e-10) or la.min_eig(sigma, "lapack") < -1e-12:
            raise ValueError("sigma must be PSD")
        if abs(np.trace(sigma).real - 1.0) > 1e-12:
            raise ValueError("sigma must have unit trace")
        self.W = la.hermitize(W)
        self.sigma = la.hermitize(sigma)
        traced = [i for i in range(len(layout)) if i not in self.keep]
        # kept-first ordering puts the problem in block form (kept) (x) (traced)
        self.order = self.keep + tuple(traced)
        self.inverse_order = tuple(int(i) for i in np.argsort(self.order))
        self.block_layout = la.SubsystemLayout(tuple(layout.dims[i] for i in self.order))

    def to_block(self, m) -> np.ndarray:
        return la.permute_subsystems(m, self.layout, self.order)

    def from_block(self, m) -> np.ndarray:
        return la.permute_subsystems(m, self.block_layout, self.inverse_order)

    def reduce(self, rho) -> np.ndarray:
        return la.partial_trace(rho, self.layout, self.keep)

    def lift(self, y) -> np.ndarray:
        """Y (x) I on the traced registers, in the original layout."""
        return self.from_block(la.kron(y, np.eye(self.dim_traced)))

    def scaled(self, c: float) -> "PTraceSDP":
        return PTraceSDP(c * self.W, self.sigma, self.layout, self.keep)


@dataclass
class SDPSolution:
    primal_value: float
    rho: np.ndarray
    dual_value: float
    Y: np.ndarray
    gap: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)


def _block_reduce(x, dk, dt):
    return np.einsum("ajbj->ab", x.reshape(dk, dt, dk, dt))


def _renormalize_block(rho, sigma, dk, dt, method="lapack"):
    tau = _block_reduce(rho, dk, dt)
    lo = la.min_eig(tau, method)
    if lo < RENORM_REGULARIZER:
        # missing support on the kept side cannot be restored by conjugation alone
        rho = rho + (RENORM_REGULARIZER - lo) * np.eye(dk * dt) / dt
        tau = _block_reduce(rho, dk, dt)
    k = la.psd_sqrt(sigma, method) @ la.psd_inv_sqrt(tau, INV_SQRT_FLOOR, method)
    kk = la.kron(k, np.eye(dt))
    return la.hermitize(kk @ rho @ kk.conj().T)


def renormalize_ptrace(rho, sigma, layout: la.SubsystemLayout, keep=None, method: str = "jacobi"):
    """Map a PSD ``rho`` onto the constraint set by conjugation.

    With tau = tr_M(rho) the result is K rho K^dagger, K = sigma^{1/2} tau^{-1/2} (x) I.
    Feasible input comes back unchanged.
    """
    sdp_keep = layout.board_factors() if keep is None else tuple(sorted(keep))
    rho = la.as_matrix(rho)
    traced = [i for i in range(len(layout)) if i not in sdp_keep]
    order = sdp_keep + tuple(traced)
    dk = int(np.prod([layout.dims[k] for k in sdp_keep]))
    dt = layout.dim // dk
    block = la.permute_subsystems(rho, layout, order)
    out = _renormalize_block(block, la.as_matrix(sigma), dk, dt, method)
    block_layout = la.SubsystemLayout(tuple(layout.dims[i] for i in order))
    return la.permute_subsystems(out, block_layout, tuple(int(i) for i in np.argsort(order)))


def solve_primal(sdp: PTraceSDP, cfg: SDPConfig | None = None, certify: bool = True) -> SDPSolution:
    """ADMM between the affine set tr_M X = sigma and the PSD cone.

    Each iteration takes a step along W, restores the partial-trace constraint,
    and clips eigenvalues.  ``history`` records tr(W rho) of the renormalized,
    exactly feasible iterate.
    """
    cfg = cfg or SDPConfig()
    dk, dt = sdp.dim_kept, sdp.dim_traced
    W = sdp.to_block(sdp.W)
    sigma = sdp.sigma
    scale = float(np.abs(np.linalg.eigvalsh(W)).max())
    eta = cfg.step / scale if scale > 0 else cfg.step
    eye_t = np.eye(dt) / dt

    z = la.kron(sigma, eye_t)
    u = np.zeros_like(z)
    history = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        v = z - u + eta * W
        x = v - la.kron(_block_reduce(v, dk, dt) - sigma, eye_t)
        z_new = la.psd_project(x + u)
        u = u + x - z_new
        primal_res = float(np.abs(x - z_new).max())
        dual_res = float(np.abs(z_new - z).max())
        z = z_new
        history.append(float(np.trace(W @ _renormalize_block(z, sigma, dk, dt)).real))
        if primal_res < cfg.tol and dual_res < cfg.tol:
            converged = True
            break

    rho_block = _renormalize_block(z, sigma, dk, dt)
    rho = sdp.from_block(rho_block)
    primal = float(np.trace(sdp.W @ rho).real)
    if certify:
        y = extract_dual(sdp, rho)
        dual = dual_value(y, sigma)
    else:
        y = np.full((dk, dk), np.nan)
        dual = math.nan
    gap = dual - primal if converged and certify else math.inf
    return SDPSolution(primal, rho, dual, y, gap, it, converged, history)


def dual_slack(y, sdp: PTraceSDP, method: str = "jacobi") -> float:
    """Minimum eigenvalue of Y (x) I - W."""
    return la.min_eig(sdp.lift(la.hermitize(y)) - sdp.W, method)


def dual_feasible(y, W, layout: la.SubsystemLayout, tol: float = 1e-9, keep=None, method: str = "jacobi") -> bool:
    """True iff Y (x) I_M - W >= -tol."""
    y = la.hermitize(y)
    keep = layout.board_factors() if keep is None else tuple(sorted(keep))
    traced = [i for i in range(len(layout)) if i not in keep]
    order = keep + tuple(traced)
    dt = int(np.prod([layout.dims[i] for i in traced])) if traced else 1
    block_layout = la.SubsystemLayout(tuple(layout.dims[i] for i in order))
    lifted = la.permute_subsystems(la.kron(y, np.eye(dt)), block_layout, tuple(int(i) for i in np.argsort(order)))
    return la.min_eig(lifted - la.hermitize(W), method) >= -tol


def dual_value(y, sigma) -> float:
    return float(np.trace(la.as_matrix(y) @ la.as_matrix(sigma)).real)


def _penalized(y, sdp, W_block, dt):
    """tr(Y sigma) plus the identity shift that makes Y feasible (tr sigma = 1)."""
    slack = float(np.linalg.eigvalsh(la.kron(y, np.eye(dt)) - W_block)[0])
    return dual_value(y, sdp.sigma) + max(0.0, -slack), slack


def _hermitian_basis(d):
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1.0 / math.sqrt(2)
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j], e[j, i] = -1j / math.sqrt(2), 1j / math.sqrt(2)
            basis.append(e)
    return basis


def extract_dual(sdp: PTraceSDP, rho, sweeps: int = 30, margin: float = 1e-12) -> np.ndarray:
    """Find a feasible Y with small tr(Y sigma).

    Candidates are lambda_max(W) I and the complementary-slackness estimate
    tr_M(W rho) sigma^{-1}; the better one is polished by coordinate descent on
    the shift-penalized dual objective, then shifted so Y (x) I >= W holds.
    """
    dk, dt = sdp.dim_kept, sdp.dim_traced
    W_block = sdp.to_block(sdp.W)
    lam = float(np.linalg.eigvalsh(W_block)[-1])
    trivial = lam * np.eye(dk, dtype=complex)

    candidates = [trivial]
    rho_block = sdp.to_block(rho)
    s_inv = la.psd_inv_sqrt(sdp.sigma, 1e-12, "lapack")
    kkt = la.hermitize(_block_reduce(W_block @ rho_block, dk, dt) @ s_inv @ s_inv)
    if np.all(np.isfinite(kkt)):
        candidates.append(kkt)
    scored = [(_penalized(c, sdp, W_block, dt)[0], i) for i, c in enumerate(candidates)]
    best_val, best_i = min(scored)
    y = candidates[best_i]

    basis = _hermitian_basis(dk)
    h = max(1e-3 * max(abs(lam), 1e-12), 1e-9)
    for _ in range(sweeps):
        improved = False
        for e in basis:
            for sgn in (-1.0, 1.0):
                trial = y + sgn * h * e
                val, _ = _penalized(trial, sdp, W_block, dt)
                if val < best_val - 1e-15:
                    y, best_val, improved = trial, val, True
                    break
        if not improved:
            h *= 0.25
            if h < 1e-13:
                break

    _, slack = _penalized(y, sdp, W_block, dt)
    y = y + (max(0.0, -slack) + margin) * np.eye(dk)
    if dual_value(y, sdp.sigma) > dual_value(trivial, sdp.sigma):
        return trivial
    return la.hermitize(y)
