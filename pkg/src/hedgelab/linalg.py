"""Dense complex linear algebra for small quantum registers.

Matrices are plain ``numpy`` complex arrays.  Multi-register operators follow
one global ordering, described by :class:`SubsystemLayout`: games ascend left
to right and, inside a game, the board register A precedes the message
register M.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered factor dimensions of a tensor-product space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {self.dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.dims)

    @classmethod
    def games(cls, n: int, dim_a: int = 2, dim_m: int = 2) -> "SubsystemLayout":
        """Layout A1 M1 A2 M2 ... for ``n`` identical one-round games."""
        return cls((dim_a, dim_m) * n)

    def board_factors(self) -> tuple[int, ...]:
        """Indices of the A registers in a game-major layout."""
        return tuple(range(0, len(self.dims), 2))


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermitize(m) -> np.ndarray:
    """Symmetrize ``(M + M^dagger) / 2`` to absorb float drift."""
    a = as_matrix(m)
    return 0.5 * (a + a.conj().T)


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    a = as_matrix(m)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def ket(*bits: int) -> np.ndarray:
    """Computational basis vector |b1 b2 ...>."""
    index = 0
    for b in bits:
        index = 2 * index + int(b)
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[index] = 1.0
    return v


def proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def kron(a, b) -> np.ndarray:
    """Tensor product; (A (x) B)[i*dB + k, j*dB + l] = A[i, j] B[k, l]."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(factors: Iterable) -> np.ndarray:
    return reduce(kron, factors, np.ones((1, 1), dtype=complex))


def _check_keep(layout: SubsystemLayout, keep) -> tuple[int, ...]:
    keep = tuple(sorted(set(int(k) for k in keep)))
    if any(k < 0 or k >= len(layout) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(layout)} factors")
    return keep


def permute_subsystems(m, layout: SubsystemLayout, order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of an operator: new factor j is old ``order[j]``."""
    a = as_matrix(m)
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(len(layout))):
        raise ValueError(f"{order} is not a permutation of {len(layout)} factors")
    n = len(layout)
    t = a.reshape(layout.dims + layout.dims)
    t = t.transpose(order + tuple(n + i for i in order))
    return t.reshape(layout.dim, layout.dim)


def permute_vector(v, layout: SubsystemLayout, order: Sequence[int]) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(layout.dims)
    return v.transpose(tuple(order)).reshape(-1)


def partial_trace(m, layout: SubsystemLayout, keep) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    Kept factors stay in their original relative order.
    """
    a = as_matrix(m)
    if a.shape[0] != layout.dim:
        raise ValueError(f"matrix dim {a.shape[0]} does not match layout {layout.dims}")
    keep = _check_keep(layout, keep)
    n = len(layout)
    traced = [i for i in range(n) if i not in keep]
    t = a.reshape(layout.dims + layout.dims)
    # move traced row/col pairs to the back, then trace them pairwise
    t = t.transpose(keep + tuple(traced) + tuple(n + k for k in keep) + tuple(n + i for i in traced))
    dk = int(np.prod([layout.dims[k] for k in keep])) if keep else 1
    dt = int(np.prod([layout.dims[i] for i in traced])) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def _jacobi(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi rotations; returns (eigenvalues, eigenvectors)."""
    a = h.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < JACOBI_OFF_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                c = abs(apq)
                if c < 1e-300:
                    continue
                phase = apq / c
                theta = 0.5 * np.arctan2(2.0 * c, (a[p, p] - a[q, q]).real)
                cs, sn = np.cos(theta), np.sin(theta)
                # phase fix on q makes the pivot real, then a real plane rotation
                g = np.array([[cs, -sn], [sn * np.conj(phase), cs * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = a[q, p] = 0.0
    else:
        raise RuntimeError("Jacobi eigensolver did not converge")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_herm(h, method: str = "jacobi") -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="jacobi"`` runs the in-house cyclic Jacobi solver; ``"lapack"``
    delegates to ``numpy.linalg.eigh`` for inner loops where speed matters.
    """
    a = as_matrix(h)
    if not is_hermitian(a, max(HERMITIAN_TOL, 1e-12 * float(np.abs(a).max(initial=0.0)))):
        raise ValueError("eig_herm requires a Hermitian matrix")
    a = hermitize(a)
    if method == "jacobi":
        return _jacobi(a)
    if method == "lapack":
        w, v = np.linalg.eigh(a)
        return w, v
    raise ValueError(f"unknown eigen method {method!r}")


def eigvals_herm(h, method: str = "jacobi") -> np.ndarray:
    return eig_herm(h, method)[0]


def min_eig(h, method: str = "jacobi") -> float:
    return float(eigvals_herm(h, method)[0])


def max_eig(h, method: str = "jacobi") -> float:
    return float(eigvals_herm(h, method)[-1])


def psd_check(h, tol: float = 1e-9, method: str = "jacobi") -> bool:
    return min_eig(h, method) >= -tol


def psd_project(h, method: str = "lapack") -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (eigenvalue clipping at 0)."""
    w, v = eig_herm(h, method)
    return hermitize((v * np.clip(w, 0.0, None)) @ v.conj().T)


def psd_sqrt(p, method: str = "jacobi") -> np.ndarray:
    w, v = eig_herm(p, method)
    if w[0] < -1e-10 * max(1.0, abs(w[-1])):
        raise ValueError(f"psd_sqrt requires a PSD matrix, min eigenvalue {w[0]:.3e}")
    return hermitize((v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T)


def psd_inv_sqrt(p, floor: float = 1e-12, method: str = "jacobi") -> np.ndarray:
    """P^{-1/2} with eigenvalues below ``floor`` clamped to ``floor``."""
    w, v = eig_herm(p, method)
    w = np.maximum(w, floor)
    return hermitize((v / np.sqrt(w)) @ v.conj().T)
