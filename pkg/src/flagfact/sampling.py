"""Seeded random generators for projections, flags and structured elements."""

from __future__ import annotations

import numpy as np

from .flags import Flag, Idempotent, complement_flag, diagonal_truncation

__all__ = [
    "random_unitary", "random_projection", "random_idempotent", "random_flag",
    "random_delta", "random_D", "random_D_invertible", "random_positive_D",
    "random_unipotent", "random_lower_unipotent",
]


def random_unitary(algebra, rng):
    """Pointwise Q factor (positive-diagonal R) of a random element."""
    if algebra.signature is not None:
        raise ValueError("random_unitary needs the standard involution")
    x = algebra.random(rng).data
    q, r = np.linalg.qr(x)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phase = diag / np.abs(diag)
    return algebra.element(q * phase[:, None, :])


def _coordinate(algebra, rank):
    diag = np.zeros(algebra.flat_size)
    diag[:rank] = 1.0
    return np.diag(diag).astype(complex)


def random_projection(algebra, rank, rng):
    """Self-adjoint idempotent of the given (flat) rank.

    Standard involution: a unitary conjugate of a coordinate projection.
    Signature instances: a coordinate projection on a random index set
    (these commute with J, hence are self-adjoint).
    """
    if algebra.signature is not None:
        idx = rng.permutation(algebra.flat_size)[:rank]
        diag = np.zeros(algebra.flat_size)
        diag[idx] = 1.0
        return Idempotent(algebra.element(np.diag(diag).astype(complex)), True)
    w = random_unitary(algebra, rng)
    return Idempotent(w * algebra.element(_coordinate(algebra, rank)) * w.adjoint())


def random_idempotent(algebra, rank, rng, spread=1.0):
    """``v E v^-1`` for a coordinate projection ``E`` and random invertible ``v``
    (``spread`` scales the off-identity part of ``v``)."""
    v = 1 + spread * algebra.random(rng)
    while True:
        try:
            v_inv = v.inverse()
            break
        except Exception:
            v = v + 1
    return Idempotent(v * algebra.element(_coordinate(algebra, rank)) * v_inv)


def random_flag(algebra, cuts, rng, selfadjoint=True, rotate=True):
    """Flag with members conjugate to the coordinate projections at ``cuts``.

    Conjugation is by a random unitary (self-adjoint flags) or a random
    invertible element (general commuting chains); ``rotate=False`` keeps the
    coordinate projections themselves.  ``cuts`` are flat positions.
    """
    if not rotate:
        w = w_inv = algebra.one()
    elif selfadjoint:
        if algebra.signature is not None:
            perm = rng.permutation(algebra.flat_size)
            w = algebra.element(np.eye(algebra.flat_size)[perm].astype(complex))
            w_inv = w.adjoint()
        else:
            w = random_unitary(algebra, rng)
            w_inv = w.adjoint()
    else:
        # keep the conjugator well conditioned so corners stay honest
        w = 1 + (0.3 / np.sqrt(algebra.flat_size)) * algebra.random(rng)
        w_inv = w.inverse()
    chain = [Idempotent(w * algebra.element(_coordinate(algebra, c)) * w_inv)
             for c in cuts]
    return Flag(algebra, chain)


def random_delta(flag, rng, scale=1.0):
    """Random block upper triangular element ``sum_{i <= j} q_i x q_j``."""
    x = scale * flag.algebra.random(rng)
    qs = flag.pieces()
    out = flag.algebra.zero()
    for i, qi in enumerate(qs):
        for qj in qs[i:]:
            out = out + qi * x * qj
    return out


def random_D(flag, rng):
    return diagonal_truncation(flag.algebra.random(rng), flag)


def random_D_invertible(flag, rng):
    d = random_D(flag, rng)
    return d + 2.0 * np.sqrt(flag.algebra.flat_size) * (np.sign(rng.standard_normal()) or 1.0)


def random_positive_D(flag, rng):
    x = flag.algebra.random(rng)
    return diagonal_truncation(x.adjoint() * x, flag) + 0.5


def random_unipotent(flag, rng, scale=None):
    """Random element of ``N(flag)``: ``1 + sum_{i < j} q_i x q_j``."""
    if scale is None:
        scale = 1.0 / np.sqrt(flag.algebra.flat_size)
    x = scale * flag.algebra.random(rng)
    qs = flag.pieces()
    out = flag.algebra.one()
    for i, qi in enumerate(qs):
        for qj in qs[i + 1:]:
            out = out + qi * x * qj
    return out


def random_lower_unipotent(flag, rng, scale=None):
    return random_unipotent(complement_flag(flag), rng, scale)

