"""Idempotents, flags, diagonal truncation and the algebras it defines.

A flag ``0 = p_0 < p_1 < ... < p_n = 1`` is stored through its interior
members only.  Members are required to form a commuting chain
(``p_j p_k = p_k p_j = p_min(j,k)``); this is automatic for self-adjoint
chains and is what makes the block pieces ``p_k - p_{k-1}`` idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (BlockAlgebra, Element, _check_same, invert, is_self_adjoint, norm,
                      require_hermitian)
from .errors import BadFlag, BadPartition, NotEquivalent, NotIdempotent

__all__ = [
    "Idempotent", "Flag", "leq", "equivalent", "similarity", "selfadjointify",
    "diagonal_truncation", "in_Delta", "in_D", "in_N", "complement_flag",
    "standard_flag", "delta_residual", "commutant_residual", "equivalence_residual",
    "unipotent_residual",
]


def _element(p):
    return p.element if isinstance(p, Idempotent) else p


@dataclass(frozen=True, eq=False)
class Idempotent:
    """An element with ``p^2 = p``; ``selfadjoint`` certifies ``p = p*`` as well.

    Passing ``selfadjoint=None`` lets the constructor decide.
    """

    element: Element
    selfadjoint: bool | None = None

    def __post_init__(self):
        p = self.element
        tol = p.algebra.tol.rel_residual
        if norm(p * p - p) > tol * max(1.0, norm(p) ** 2):
            raise NotIdempotent("element is not idempotent")
        sa = is_self_adjoint(p)
        if self.selfadjoint is None:
            object.__setattr__(self, "selfadjoint", sa)
        elif self.selfadjoint and not sa:
            raise NotIdempotent("idempotent certified self-adjoint but p != p*")

    @property
    def algebra(self):
        return self.element.algebra


def leq(p, q):
    """``p <= q`` in the sense ``qp = p``."""
    p, q = _element(p), _element(q)
    _check_same(p, q)
    return norm(q * p - p) <= p.algebra.tol.rel_residual * max(1.0, norm(p))


def equivalence_residual(p, q):
    """``max(|pq - q|, |qp - p|)`` relative to ``max(1, |p|, |q|)^2``."""
    p, q = _element(p), _element(q)
    _check_same(p, q)
    scale = max(1.0, norm(p), norm(q)) ** 2
    return max(norm(p * q - q), norm(q * p - p)) / scale


def equivalent(p, q):
    """``p ~ q``: ``pq = q`` and ``qp = p`` (same right ideal)."""
    p, q = _element(p), _element(q)
    return equivalence_residual(p, q) <= p.algebra.tol.rel_residual


def similarity(p, q):
    """Invertible ``s = pq + (1-p)(1-q)`` with ``s q s^-1 = p``.

    For equivalent idempotents ``s = 1 + (q - p)`` and ``s^-1 = 1 - (q - p)``.
    """
    p, q = _element(p), _element(q)
    if not equivalent(p, q):
        raise NotEquivalent("idempotents are not equivalent (pq != q or qp != p)")
    return p * q + (1 - p) * (1 - q)


def selfadjointify(e, override=False):
    """The unique self-adjoint idempotent ``p ~ e``: ``p = e (1 - (e* - e))^-1``.

    Needs a hermitian instance, where ``1`` is never in the spectrum of the
    skew element ``e* - e``; elsewhere inversion may fail with NotInvertible.
    """
    e = _element(e)
    require_hermitian(e.algebra, override, "selfadjointify")
    return Idempotent(e * invert(1 - (e.adjoint() - e)))


class Flag:
    """Strict commuting chain of idempotents in one instance."""

    def __init__(self, algebra, chain=()):
        members = []
        for p in chain:
            if not isinstance(p, Idempotent):
                p = Idempotent(p)
            if p.algebra != algebra:
                raise BadFlag("flag member belongs to a different instance")
            members.append(p)
        tol = algebra.tol.rel_residual
        full = [algebra.zero()] + [p.element for p in members] + [algebra.one()]
        for k in range(len(full) - 1):
            lo, hi = full[k], full[k + 1]
            scale = max(1.0, norm(lo), norm(hi)) ** 2
            if norm(hi * lo - lo) > tol * scale or norm(lo * hi - lo) > tol * scale:
                raise BadFlag(f"members {k} and {k + 1} do not form a commuting chain")
            if norm(hi - lo) <= tol * scale:
                raise BadFlag(f"degenerate flag: p_{k} = p_{k + 1}")
        self.algebra = algebra
        self.chain = tuple(members)
        self.selfadjoint = all(p.selfadjoint for p in members)
        self._projections = full
        self._pieces = [full[k] - full[k - 1] for k in range(1, len(full))]

    def __repr__(self):
        return f"Flag({self.algebra.kind}, n={self.n}, selfadjoint={self.selfadjoint})"

    @property
    def n(self):
        """Number of blocks (``p_n = 1``)."""
        return len(self.chain) + 1

    def projections(self):
        """``[p_0, p_1, ..., p_n]`` as elements, endpoints included."""
        return list(self._projections)

    def pieces(self):
        """Block idempotents ``q_k = p_k - p_{k-1}``, k = 1..n."""
        return list(self._pieces)


def diagonal_truncation(x, flag):
    """``Phi(x) = sum_k q_k x q_k``."""
    _check_same(x, flag.algebra.zero())
    out = flag.algebra.zero()
    for q in flag.pieces():
        out = out + q * x * q
    return out


def delta_residual(x, flag):
    """``max_k |x p_k - p_k x p_k| / max(1, |x|)``; zero exactly on Delta(flag)."""
    _check_same(x, flag.algebra.zero())
    scale = max(1.0, norm(x))
    return max((norm(x * p - p * x * p) / scale for p in flag.projections()[1:-1]),
               default=0.0)


def commutant_residual(x, flag):
    _check_same(x, flag.algebra.zero())
    scale = max(1.0, norm(x))
    return max((norm(x * p - p * x) / scale for p in flag.projections()[1:-1]),
               default=0.0)


def in_Delta(x, flag):
    return delta_residual(x, flag) <= flag.algebra.tol.rel_residual


def in_D(x, flag):
    return commutant_residual(x, flag) <= flag.algebra.tol.rel_residual


def unipotent_residual(x, flag):
    """Distance of ``x`` from ``N(flag)``: Delta residual and ``|Phi(x) - 1|``."""
    gap = norm(diagonal_truncation(x, flag) - 1) / max(1.0, norm(x))
    return max(delta_residual(x, flag), gap)


def in_N(x, flag):
    return unipotent_residual(x, flag) <= flag.algebra.tol.rel_residual


def complement_flag(flag):
    """``0 = 1 - p_n < 1 - p_{n-1} < ... < 1 - p_0 = 1``."""
    return Flag(flag.algebra, [Idempotent(1 - p.element, p.selfadjoint)
                               for p in reversed(flag.chain)])


def standard_flag(algebra, cuts=None, parts=None):
    """Flag of leading-corner unit projections.

    ``cuts`` lists the positions ``0 < c_1 < ... < c_{n-1} < size`` where
    ``size`` counts blocks for block instances and matrix rows otherwise;
    ``parts=n`` asks for ``n`` equal pieces.  With neither, the full flag
    (every position) is returned.
    """
    if isinstance(algebra, BlockAlgebra):
        size, unit = algebra.blockcount, algebra.inner.flat_size
    else:
        size, unit = algebra.flat_size, 1
    if cuts is not None and parts is not None:
        raise BadPartition("give either cuts or parts, not both")
    if parts is not None:
        if parts < 1 or size % parts:
            raise BadPartition(f"cannot split {size} into {parts} equal parts")
        cuts = list(range(size // parts, size, size // parts))
    elif cuts is None:
        cuts = list(range(1, size))
    cuts = [int(c) for c in cuts]
    if any(c <= 0 or c >= size for c in cuts) or any(a >= b for a, b in zip(cuts, cuts[1:])):
        raise BadPartition(f"cuts {cuts} must be strictly increasing inside (0, {size})")
    chain = []
    for c in cuts:
        diag = np.zeros(algebra.flat_size)
        diag[:c * unit] = 1.0
        chain.append(Idempotent(algebra.element(np.diag(diag).astype(complex)), True))
    return Flag(algebra, chain)
