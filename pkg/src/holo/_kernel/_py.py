"""Vectorized numpy implementation of the hot kernels.

This is the reference backend: the compiled extension (holo._kernel._cy)
implements the same three functions with identical semantics, and the test
suite cross-checks them against each other. Keep this module importable with
nothing but numpy.

Conventions shared by both backends:

  * coordinate arrays are (M, 8) float64 in the canonical order
    theta13, theta14, theta23, theta24, phi13, phi14, phi23, phi24;
  * ordered products place later items on the LEFT, matching a time-ordered
    propagator: chain([m0, m1, ..., m_{N-1}]) = m_{N-1} @ ... @ m1 @ m0.
"""

from __future__ import annotations

import numpy as np

__all__ = ["batch_unitary", "chain_expm_2x2", "chain_propagator"]


def _rotation_stack(theta, phi, half_angle, minus_i, conj_phase):
    """(M,2,2) stack of elementary 2x2 rotations for given angle arrays."""
    t = 0.5 * theta if half_angle else theta
    c = np.cos(t)
    s = np.sin(t)
    j = -1j if minus_i else 1j
    ph = np.exp((-1j if conj_phase else 1j) * phi)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = j * ph * s
    out[..., 1, 0] = j * np.conj(ph) * s
    out[..., 1, 1] = c
    return out


def _apply_plane_rotation(u, rot, i, j):
    """Right-multiply the (M,4,4) stack u by plane rotations acting on
    columns i and j (0-based). In place."""
    ci = u[..., :, i].copy()
    cj = u[..., :, j].copy()
    a = rot[..., 0, 0][..., None]
    b = rot[..., 0, 1][..., None]
    c = rot[..., 1, 0][..., None]
    d = rot[..., 1, 1][..., None]
    u[..., :, i] = ci * a + cj * c
    u[..., :, j] = ci * b + cj * d


def batch_unitary(coords, half_angle: bool, minus_i: bool, conj_phase: bool):
    """(M,4,4) stack of U = U13 U14 U23 U24 at M points.

    coords: (M, 8) float64 in canonical coordinate order.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] != 8:
        raise ValueError(f"coords must be (M, 8), got {coords.shape}")
    m = coords.shape[0]
    u = np.zeros((m, 4, 4), dtype=complex)
    u[:, 0, 0] = u[:, 1, 1] = u[:, 2, 2] = u[:, 3, 3] = 1.0
    # pairs in product order; (i, j) are 0-based level indices
    for k, (i, j) in enumerate(((0, 2), (0, 3), (1, 2), (1, 3))):
        rot = _rotation_stack(
            coords[:, k], coords[:, 4 + k], half_angle, minus_i, conj_phase
        )
        _apply_plane_rotation(u, rot, i, j)
    return u


def _ordered_product(stack):
    """Product of an (N,d,d) stack with later entries on the left.

    Pairwise tree reduction: associative, deterministic, and much faster
    than a python loop for large N.
    """
    cur = stack
    while cur.shape[0] > 1:
        n = cur.shape[0]
        even = n - (n % 2)
        # new[i] = cur[2i+1] @ cur[2i]  keeps later-on-the-left ordering
        prod = np.matmul(cur[1:even:2], cur[0:even:2])
        if n % 2:
            prod = np.concatenate([prod, cur[-1:]], axis=0)
        cur = prod
    return cur[0].copy()


def chain_expm_2x2(ls):
    """exp(ls[N-1]) @ ... @ exp(ls[0]) for a stack of anti-hermitian 2x2s.

    Each exponential uses the closed form for u(2) = u(1) + su(2): write
    L = i(a0 I + a . sigma) with real a; then
    exp(L) = e^{i a0} (cos r I + i sin r (a . sigma) / r), r = |a|.
    """
    ls = np.asarray(ls, dtype=complex)
    if ls.ndim != 3 or ls.shape[1:] != (2, 2):
        raise ValueError(f"expected (N, 2, 2), got {ls.shape}")
    if ls.shape[0] == 0:
        return np.eye(2, dtype=complex)
    # L = i h with h hermitian; decompose h on {I, sigma}
    h00 = ls[:, 0, 0].imag
    h11 = ls[:, 1, 1].imag
    h01 = -1j * ls[:, 0, 1]
    a0 = 0.5 * (h00 + h11)
    az = 0.5 * (h00 - h11)
    ax = h01.real
    ay = -h01.imag  # h01 = ax - i ay for hermitian h
    r = np.sqrt(ax * ax + ay * ay + az * az)
    cosr = np.cos(r)
    # sin(r)/r, exact 1 at r = 0
    sinc = np.sinc(r / np.pi)
    phase = np.exp(1j * a0)
    es = np.empty_like(ls)
    es[:, 0, 0] = phase * (cosr + 1j * sinc * az)
    es[:, 0, 1] = phase * (1j * sinc * (ax - 1j * ay))
    es[:, 1, 0] = phase * (1j * sinc * (ax + 1j * ay))
    es[:, 1, 1] = phase * (cosr - 1j * sinc * az)
    return _ordered_product(es)


def chain_propagator(us, dt: float, omega: float, nplus: int):
    """Time-ordered product of per-step factors exp(-i H_k dt) where
    H_k = U_k H0 U_k^dagger and H0 = (omega/2) diag(+1 ... , -1 ...) with
    nplus leading +1 entries.

    us: (N, d, d) stack of the frame unitaries at the step midpoints.
    Uses the exact two-band form: with S = U J U^dagger, J = diag(+-1),
    exp(-i H dt) = cos(omega dt / 2) I - i sin(omega dt / 2) S.
    """
    us = np.asarray(us, dtype=complex)
    if us.ndim != 3 or us.shape[1] != us.shape[2]:
        raise ValueError(f"expected (N, d, d), got {us.shape}")
    d = us.shape[1]
    if not 0 < nplus < d:
        raise ValueError(f"nplus must be in (0, {d}), got {nplus}")
    if us.shape[0] == 0:
        return np.eye(d, dtype=complex)
    jdiag = np.concatenate([np.ones(nplus), -np.ones(d - nplus)])
    s = np.matmul(us * jdiag[None, None, :], us.conj().transpose(0, 2, 1))
    x = 0.5 * omega * dt
    factors = np.cos(x) * np.eye(d)[None, :, :] - 1j * np.sin(x) * s
    return _ordered_product(factors)
