import math

import numpy as np
import pytest

from conftest import random_hermitian, random_psd
from hedgelab import linalg as la

S2 = math.sin(math.pi / 8) ** 2
C2 = math.cos(math.pi / 8) ** 2
PLUS = np.array([1, 1]) / math.sqrt(2)

RHO1_PRINTED = np.array([
    [0.0732, 0, 0.1768, 0],
    [0, 0.4268, 0, -0.1768],
    [0.1768, 0, 0.4268, 0],
    [0, -0.1768, 0, 0.0732],
])


def test_kron_identity_and_projectors():
    assert np.allclose(la.kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(la.kron(la.proj(la.ket(0)), la.proj(la.ket(1))), np.diag([0, 1, 0, 0]))


def test_kron_index_convention(rng):
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 3)
    k = la.kron(a, b)
    for i, j, p, q in [(0, 1, 2, 0), (1, 1, 1, 2), (1, 0, 0, 0)]:
        assert k[i * 3 + p, j * 3 + q] == a[i, j] * b[p, q]


def test_kron_min_eig_product():
    p = 0.5 * (la.proj(la.ket(0)) + la.proj(PLUS))
    # each factor has min eigenvalue sin^2(pi/8)
    assert la.min_eig(la.kron(p, p)) == pytest.approx(S2**2, abs=1e-12)
    assert la.min_eig(la.kron(p, p)) == pytest.approx(0.021447, abs=1e-6)
    assert np.linalg.eigvalsh(la.kron(p, p))[0] == pytest.approx(S2**2, abs=1e-12)


def test_kron_associative_and_mixed_product(rng):
    a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    assert np.abs(la.kron(la.kron(a, b), c) - la.kron(a, la.kron(b, c))).max() <= 1e-12
    assert np.abs(la.kron(a, b) @ la.kron(c, d) - la.kron(a @ c, b @ d)).max() <= 1e-12


def test_partial_trace_bell_state():
    phi = (la.ket(0, 0) + la.ket(1, 1)) / math.sqrt(2)
    layout = la.SubsystemLayout((2, 2))
    assert np.allclose(la.partial_trace(la.proj(phi), layout, [0]), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_product_law(rng):
    for _ in range(10):
        a, b = random_hermitian(rng, 2), random_hermitian(rng, 2)
        layout = la.SubsystemLayout((2, 2))
        assert np.abs(la.partial_trace(la.kron(a, b), layout, [0]) - a * np.trace(b)).max() <= 1e-12
        assert np.abs(la.partial_trace(la.kron(a, b), layout, [1]) - b * np.trace(a)).max() <= 1e-12


def test_partial_trace_printed_optimum():
    red = la.partial_trace(RHO1_PRINTED, la.SubsystemLayout((2, 2)), [0])
    assert np.abs(red - np.eye(2) / 2).max() <= 1e-3


def test_partial_trace_interleaved_factors(rng):
    a, b, c = random_hermitian(rng, 2), random_hermitian(rng, 3), random_hermitian(rng, 2)
    m = la.kron_all([a, b, c])
    layout = la.SubsystemLayout((2, 3, 2))
    assert np.allclose(la.partial_trace(m, layout, [0, 2]), la.kron(a, c) * np.trace(b))
    assert np.allclose(la.partial_trace(m, layout, [1]), b * np.trace(a) * np.trace(c))
    assert np.allclose(la.partial_trace(m, layout, []), np.trace(m) * np.ones((1, 1)))


def test_partial_trace_preserves_trace_and_is_linear(rng):
    layout = la.SubsystemLayout((2, 2, 2))
    m1, m2 = random_hermitian(rng, 8), random_hermitian(rng, 8)
    keep = [0, 2]
    assert np.trace(la.partial_trace(m1, layout, keep)) == pytest.approx(np.trace(m1))
    lhs = la.partial_trace(2 * m1 - 3 * m2, layout, keep)
    rhs = 2 * la.partial_trace(m1, layout, keep) - 3 * la.partial_trace(m2, layout, keep)
    assert np.allclose(lhs, rhs)


def test_partial_trace_bad_keep():
    with pytest.raises(ValueError):
        la.partial_trace(np.eye(4), la.SubsystemLayout((2, 2)), [2])
    with pytest.raises(ValueError):
        la.partial_trace(np.eye(4), la.SubsystemLayout((2, 3)), [0])


def test_permute_subsystems_matches_explicit_kron(rng):
    a, b, c = random_hermitian(rng, 2), random_hermitian(rng, 3), random_hermitian(rng, 2)
    layout = la.SubsystemLayout((2, 3, 2))
    out = la.permute_subsystems(la.kron_all([a, b, c]), layout, (2, 0, 1))
    assert np.allclose(out, la.kron_all([c, a, b]))
    v = [rng.normal(size=2), rng.normal(size=3), rng.normal(size=2)]
    pv = la.permute_vector(la.kron_all(x.reshape(-1, 1) for x in v).reshape(-1), layout, (2, 0, 1))
    assert np.allclose(pv, la.kron_all(v[i].reshape(-1, 1) for i in (2, 0, 1)).reshape(-1))


def test_eig_herm_coin_operator():
    w, _ = la.eig_herm(0.5 * (la.proj(la.ket(0)) + la.proj(PLUS)))
    assert w == pytest.approx([S2, C2], abs=1e-14)
    assert w == pytest.approx([0.146447, 0.853553], abs=1e-6)


def test_eig_herm_trivial():
    assert la.eig_herm(np.eye(2))[0] == pytest.approx([1, 1])
    assert la.eig_herm(np.diag([3.0, 1.0, 2.0]))[0] == pytest.approx([1, 2, 3])


@pytest.mark.parametrize("d", [2, 3, 5, 8, 16, 64])
def test_eig_herm_residuals(rng, d):
    h = random_hermitian(rng, d)
    w, v = la.eig_herm(h)
    assert np.all(np.diff(w) >= 0)
    assert np.abs(h @ v - v * w).max() <= 1e-10 * max(1, np.abs(w).max())
    assert np.abs(v.conj().T @ v - np.eye(d)).max() <= 1e-10
    assert np.abs(v @ np.diag(w) @ v.conj().T - h).max() <= 1e-9
    assert np.abs(w - np.linalg.eigvalsh(h)).max() <= 1e-10 * max(1, np.abs(w).max())


def test_eig_herm_degenerate_spectrum(rng):
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    h = q @ np.diag([1, 1, 1, 2, 2, 5.0]) @ q.conj().T
    w, v = la.eig_herm(h)
    assert w == pytest.approx([1, 1, 1, 2, 2, 5], abs=1e-12)
    assert np.abs(v.conj().T @ v - np.eye(6)).max() <= 1e-10


def test_eig_herm_rejects_non_hermitian():
    with pytest.raises(ValueError):
        la.eig_herm(np.array([[0, 1], [0, 0]]))


def test_tensor_min_eig_multiplicative(rng):
    for _ in range(20):
        dims = rng.integers(1, 3, size=2) + 1
        if dims.prod() > 8:
            continue
        a, b = random_psd(rng, int(dims[0])), random_psd(rng, int(dims[1]))
        assert la.min_eig(la.kron(a, b)) == pytest.approx(la.min_eig(a) * la.min_eig(b), abs=1e-9)


def test_psd_check():
    assert la.psd_check(np.eye(2), 1e-9)
    assert not la.psd_check(np.diag([1.0, -0.1]), 1e-9)
    assert la.psd_check(RHO1_PRINTED, 1e-3)


def test_psd_sqrt_and_inverse(rng):
    assert np.allclose(la.psd_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(la.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2, 3]))
    assert np.allclose(la.psd_inv_sqrt(np.eye(2) / 2), math.sqrt(2) * np.eye(2))
    p = random_psd(rng, 5)
    s = la.psd_sqrt(p)
    assert np.abs(s @ s - p).max() <= 1e-9
    # clamping keeps the singular direction finite
    assert la.psd_inv_sqrt(np.diag([1.0, 0.0]), floor=1e-4)[1, 1] == pytest.approx(100)


def test_hermitize_absorbs_drift():
    m = np.array([[1, 1 + 1e-13], [1, 2]], dtype=complex)
    assert la.is_hermitian(la.hermitize(m), 0.0)


def test_layout_validation():
    with pytest.raises(ValueError):
        la.SubsystemLayout((2, 0))
    layout = la.SubsystemLayout.games(3)
    assert layout.dims == (2, 2, 2, 2, 2, 2)
    assert layout.board_factors() == (0, 2, 4)
    assert layout.dim == 64
