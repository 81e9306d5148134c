"""Determinantal observables and their extended block forms.

These are the integrands shared by the Monte Carlo route (evaluated on
ensemble draws) and the quadrature route (evaluated on parameter-space
points).  Every function broadcasts over leading batch dimensions of its
matrix and scalar arguments and returns an array of determinant values (a
plain complex scalar when no batching is present).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError, SingularityError

__all__ = [
    "ratio_det",
    "keacp_det",
    "correlated_det",
    "product2_det",
    "crossover_det",
]


def _mat(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"{name} must be a square matrix (batched allowed), got {a.shape}")
    return a


def _scal(x) -> np.ndarray:
    # scalar parameter, possibly batched; shaped for block assignment
    return np.asarray(x, dtype=np.complex128)


def _adj(x: np.ndarray) -> np.ndarray:
    return x.conj().swapaxes(-1, -2)


def _ret(values: np.ndarray):
    return complex(values) if values.ndim == 0 else values


def ratio_det(z, w, h):
    """Ratio of characteristic polynomials det(z - H) / det(w - H)."""
    h = _mat(h, "h")
    n = h.shape[-1]
    eye = np.eye(n, dtype=np.complex128)
    z = _scal(z)[..., None, None]
    w = _scal(w)[..., None, None]
    num = np.linalg.det(z * eye - h)
    den = np.linalg.det(w * eye - h)
    if np.any(den == 0):
        raise SingularityError("det(w - H) vanished; w is an eigenvalue of h")
    return _ret(num / den)


def keacp_det(zs, a, x):
    """k-extended averaged characteristic polynomial determinant.

    The 2kN block determinant with diagonal blocks ``diag(z) (x) 1_n - 1_k (x) X``
    and its adjoint, coupled through ``-A^+ (x) 1_n`` and ``A (x) 1_n``.
    At ``a = 0`` it factorizes into ``prod_i det(z_i - X) det(conj(z_i) - X^+)``.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
    if zs.ndim != 1:
        raise DimensionError("zs must be a 1-d sequence of complex points")
    k = zs.shape[0]
    x = _mat(x, "x")
    n = x.shape[-1]
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-2:] != (k, k):
        raise DimensionError(f"a must be {k}x{k} (batched allowed), got {a.shape}")
    batch = np.broadcast_shapes(a.shape[:-2], x.shape[:-2])
    m = 2 * k * n
    eye = np.eye(n, dtype=np.complex128)
    out = np.zeros(batch + (m, m), dtype=np.complex128)
    xa = _adj(x)
    for i in range(k):
        r = slice(i * n, (i + 1) * n)
        rb = slice(k * n + i * n, k * n + (i + 1) * n)
        out[..., r, r] = zs[i] * eye - x
        out[..., rb, rb] = np.conj(zs[i]) * eye - xa
        for j in range(k):
            cb = slice(k * n + j * n, k * n + (j + 1) * n)
            c = slice(j * n, (j + 1) * n)
            out[..., r, cb] = -np.conj(a[..., j, i])[..., None, None] * eye
            out[..., rb, c] = a[..., i, j][..., None, None] * eye
    return _ret(np.linalg.det(out))


def correlated_det(z, x, gamma, omega, w):
    """Block determinant of the correlation-deformed characteristic polynomial.

    Blocks: ``[[z - G^-1 X O^-1, -G^-2 conj(w)], [O^-2 w, conj(z) - O^-1 X^+ G^-1]]``
    with ``G = diag(gamma)`` and ``O = diag(omega)`` strictly positive.
    """
    gamma = np.asarray(gamma, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if gamma.ndim != 1 or omega.ndim != 1:
        raise DimensionError("gamma and omega must be 1-d diagonals")
    if not (np.all(gamma > 0) and np.all(omega > 0)):
        raise DomainError("gamma and omega must be strictly positive")
    x = _mat(x, "x")
    n = x.shape[-1]
    if gamma.shape[0] != n or omega.shape[0] != n:
        raise DimensionError("diagonal lengths must match the matrix size")
    gi = 1.0 / gamma
    oi = 1.0 / omega
    eye = np.eye(n, dtype=np.complex128)
    z = _scal(z)
    w = _scal(w)
    batch = np.broadcast_shapes(x.shape[:-2], z.shape, w.shape)
    out = np.zeros(batch + (2 * n, 2 * n), dtype=np.complex128)
    core = gi[:, None] * x * oi[None, :]
    out[..., :n, :n] = z[..., None, None] * eye - core
    out[..., :n, n:] = -np.conj(w)[..., None, None] * np.diag(gi**2)
    out[..., n:, :n] = w[..., None, None] * np.diag(oi**2)
    out[..., n:, n:] = np.conj(z)[..., None, None] * eye - _adj(core)
    return _ret(np.linalg.det(out))


def product2_det(z, x1, x2, u, v, w, lower_sign: str = "vbar"):
    """4N block determinant linearizing the two-matrix product observable.

    Row blocks:

        [ z        -conj(w)   0          X1      ]
        [ v         conj(z)   X2^+       0       ]
        [ 0         X1^+      u          w       ]
        [ X2        0         s          conj(u) ]

    where ``s = -conj(v)`` by default.  Two sign conventions for the (4, 3)
    coupling circulate; the default is the one consistent with the
    vanishing-source closed form ``(1 + conj(v) w)^n (|z|^2 + v conj(w))^n``
    at ``u = 1``.  Pass ``lower_sign="v"`` for the alternative ``s = -v``.
    At ``(u, v, w) = (1, 0, 0)`` the value is det(z - X1 X2) det(conj(z) - (X1 X2)^+).
    """
    if lower_sign not in ("vbar", "v"):
        raise DomainError("lower_sign must be 'vbar' or 'v'")
    x1 = _mat(x1, "x1")
    x2 = _mat(x2, "x2")
    n = x1.shape[-1]
    if x2.shape[-1] != n:
        raise DimensionError("x1 and x2 must share the same size")
    z, u, v, w = (_scal(c) for c in (z, u, v, w))
    batch = np.broadcast_shapes(x1.shape[:-2], x2.shape[:-2], z.shape, u.shape, v.shape, w.shape)
    eye = np.eye(n, dtype=np.complex128)
    out = np.zeros(batch + (4 * n, 4 * n), dtype=np.complex128)
    blk = [slice(i * n, (i + 1) * n) for i in range(4)]
    s = -np.conj(v) if lower_sign == "vbar" else -v

    def put(i, j, val):
        out[..., blk[i], blk[j]] = val

    put(0, 0, z[..., None, None] * eye)
    put(0, 1, -np.conj(w)[..., None, None] * eye)
    put(0, 3, np.broadcast_to(x1, batch + (n, n)))
    put(1, 0, v[..., None, None] * eye)
    put(1, 1, np.conj(z)[..., None, None] * eye)
    put(1, 2, np.broadcast_to(_adj(x2), batch + (n, n)))
    put(2, 1, np.broadcast_to(_adj(x1), batch + (n, n)))
    put(2, 2, u[..., None, None] * eye)
    put(2, 3, w[..., None, None] * eye)
    put(3, 0, np.broadcast_to(x2, batch + (n, n)))
    put(3, 2, s[..., None, None] * eye)
    put(3, 3, np.conj(u)[..., None, None] * eye)
    return _ret(np.linalg.det(out))


def crossover_det(z, x, w):
    """2N block determinant ``det [[z - X, -conj(w)], [w, conj(z) - X^+]]``.

    Real and nonnegative for every ``X`` and ``w``; depends on ``w`` only
    through ``|w|``.  At ``w = 0`` it equals ``|det(z - X)|^2`` and at
    ``X = 0`` it reduces to ``(|z|^2 + |w|^2)^n``.
    """
    x = _mat(x, "x")
    n = x.shape[-1]
    eye = np.eye(n, dtype=np.complex128)
    z = _scal(z)
    w = _scal(w)
    batch = np.broadcast_shapes(x.shape[:-2], z.shape, w.shape)
    out = np.zeros(batch + (2 * n, 2 * n), dtype=np.complex128)
    out[..., :n, :n] = z[..., None, None] * eye - x
    out[..., :n, n:] = -np.conj(w)[..., None, None] * eye
    out[..., n:, :n] = w[..., None, None] * eye
    out[..., n:, n:] = np.conj(z)[..., None, None] * eye - _adj(x)
    return _ret(np.linalg.det(out))
