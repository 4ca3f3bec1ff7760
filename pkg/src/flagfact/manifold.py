"""Flag-manifold points, charts, unitary transitivity and its failure.

Points of a flag manifold are tuples of idempotents ``q_1 <= ... <= q_n``
compared through the right ideals they generate.  Local coordinates come
from the lower factor of the Gauss decomposition, and the two
counterexample builders show how transitivity breaks once the algebra has a
self-adjoint element with ``i`` in its spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import (BlockAlgebra, Element, invert, is_hermitian,
                      is_self_adjoint, norm, relative_smin, spectrum)
from .errors import BadWitness, CornerNotInvertible, OutOfChart
from .factorization import (corner_conditions, gauss_decompose, nest_gram_factorize,
                            uab_decompose)
from .flags import Idempotent, delta_residual, equivalent, leq, selfadjointify, standard_flag

__all__ = [
    "FlagPoint", "ChartCoordinates", "OmegaReport", "TransitivityWitness",
    "CharReport", "U11Report", "base_point", "flag_action", "same_point",
    "omega_membership", "chart_sigma", "chart_transition",
    "unitary_transitivity_witness", "char_element", "counterexample_char",
    "u11_signature", "u11_membership", "u11_residual", "u11_element",
    "u11_counterexample", "random_u11",
]


@dataclass(frozen=True, eq=False)
class FlagPoint:
    reps: tuple
    canonical: tuple | None = None

    def __post_init__(self):
        reps = tuple(p if isinstance(p, Idempotent) else Idempotent(p) for p in self.reps)
        object.__setattr__(self, "reps", reps)
        for lo, hi in zip(reps, reps[1:]):
            if not leq(lo, hi):
                raise ValueError("flag point representatives are not increasing")
        if self.canonical is not None:
            if len(self.canonical) != len(reps):
                raise ValueError("canonical representatives do not match reps")
            for c, q in zip(self.canonical, reps):
                if not equivalent(c, q):
                    raise ValueError("canonical representative not equivalent to its rep")

    @property
    def algebra(self):
        return self.reps[0].algebra if self.reps else None


def _canonicalize(reps):
    return tuple(selfadjointify(q, override=True) for q in reps)


def base_point(flag, canonicalize=None):
    """The point ``[flag]`` itself."""
    reps = tuple(flag.chain)
    if canonicalize is None:
        canonicalize = is_hermitian(flag.algebra)
    return FlagPoint(reps, _canonicalize(reps) if canonicalize and reps else None)


def flag_action(g, point, canonicalize=None):
    """``q_j -> g q_j g^-1``; canonical reps are recomputed on hermitian instances."""
    g_inv = invert(g)
    reps = tuple(Idempotent(g * q.element * g_inv) for q in point.reps)
    if canonicalize is None:
        canonicalize = bool(reps) and is_hermitian(g.algebra)
    return FlagPoint(reps, _canonicalize(reps) if canonicalize and reps else None)


def same_point(P, Q):
    """Equality of flag points: pairwise equivalence of representatives."""
    return len(P.reps) == len(Q.reps) and all(equivalent(p, q) for p, q in zip(P.reps, Q.reps))


@dataclass
class OmegaReport:
    member: bool
    corner_conditions: tuple
    failing_corners: list

    def __bool__(self):
        return self.member


def omega_membership(g, flag):
    """Whether every corner ``p_j g p_j`` (j = 1..n) is invertible in ``p_j A p_j``."""
    conds = corner_conditions(g, flag)
    thr = flag.algebra.tol.inv_threshold
    failing = [j for j, c in enumerate(conds, start=1) if c < thr]
    return OmegaReport(not failing, conds, failing)


@dataclass(frozen=True, eq=False)
class ChartCoordinates:
    base_flag: object
    point: Element
    residual: float


def chart_sigma(g, flag):
    """Local coordinate of ``g.[flag]``: the lower factor of ``g = x d y``."""
    gf = gauss_decompose(g, flag)
    return ChartCoordinates(flag, gf.x, gf.residual)


def chart_transition(g, coords):
    """Coordinate change ``x -> sigma(g x)``."""
    flag = coords.base_flag
    moved = g * coords.point
    report = omega_membership(moved, flag)
    if not report:
        raise OutOfChart(f"g x leaves Omega at corners {report.failing_corners}")
    return chart_sigma(moved, flag)


@dataclass
class TransitivityWitness:
    u: Element
    unitarity: float          # |u* u - 1|
    delta_residual: float     # u^-1 g in Delta(flag)
    inverse_delta_residual: float  # (u^-1 g)^-1 in Delta(flag)

    def passed(self, tol):
        return max(self.unitarity, self.delta_residual, self.inverse_delta_residual) <= tol


def unitary_transitivity_witness(g, flag, override=False):
    """Unitary ``u`` with ``g p_j A = u p_j A`` for all j, plus its certificate."""
    u = uab_decompose(g, flag, override=override).u
    w = invert(u) * g
    return TransitivityWitness(u, norm(u.adjoint() * u - 1), delta_residual(w, flag),
                               delta_residual(invert(w), flag))


def _check_self_adjoint(a):
    if not is_self_adjoint(a):
        raise BadWitness("witness must be self-adjoint")


def _check_i_in_spectrum(a):
    scale = max(1.0, norm(a))
    sig = spectrum(a)
    if min(sig.distance(1j), sig.distance(-1j)) > a.algebra.tol.spec_margin * scale:
        raise BadWitness("witness spectrum does not contain i")


def char_element(a):
    """``g = [[1, 0], [a, 1]]`` in ``M_2(A)`` and the flag ``0 < diag(1, 0) < 1``."""
    alg = BlockAlgebra(2, a.algebra, tol=a.algebra.tol)
    return alg.from_blocks([[1, 0], [a, 1]]), standard_flag(alg)


@dataclass
class CharReport:
    kind: str
    spectrum_a: np.ndarray
    one_plus_a2_norm: float
    corner_residual: float    # |(g* g)_11 - (1 + a^2)|
    failed: bool
    failing_corner: int | None
    smallest: float | None
    message: str

    @property
    def failure_observed(self):
        return self.failed and self.failing_corner == 1


def counterexample_char(a, check_witness=True):
    """Run the nest-Gram factorization on ``[[1, 0], [a, 1]]``.

    With ``a = a*`` and ``i`` in the spectrum of ``a`` the corner
    ``(g* g)_11 = 1 + a^2`` is singular, so the run must stop at corner 1.
    ``check_witness=False`` skips the spectral precondition, which is how
    the hermitian control run is made.
    """
    _check_self_adjoint(a)
    if check_witness:
        _check_i_in_spectrum(a)
    g, flag = char_element(a)
    gram = g.adjoint() * g
    one_plus = 1 + a * a
    corner = g.algebra.block(gram, 0, 0)
    failed, corner_idx, smallest, message = False, None, None, "factorization succeeded"
    try:
        nest_gram_factorize(g, flag, override=True)
    except CornerNotInvertible as exc:
        failed, corner_idx, smallest, message = True, exc.corner, exc.smallest, str(exc)
    return CharReport(a.algebra.kind, spectrum(a).points, norm(one_plus),
                      norm(corner - one_plus), failed, corner_idx, smallest, message)


def u11_signature(algebra):
    """``J = diag(1, -1)`` in a 2x2 block instance."""
    if not isinstance(algebra, BlockAlgebra) or algebra.blockcount != 2:
        raise ValueError("U(1,1) needs a 2x2 block instance")
    return algebra.from_blocks([[1, 0], [0, -1]])


def u11_residual(g):
    j = u11_signature(g.algebra)
    return norm(g * j * g.adjoint() * j - 1)


def u11_membership(g):
    """``g J g* J = 1`` within tolerance."""
    return u11_residual(g) <= g.algebra.tol.rel_residual * max(1.0, norm(g) ** 2)


def u11_element(a):
    """``[[a + i, a], [a, a - i]]``."""
    alg = BlockAlgebra(2, a.algebra, tol=a.algebra.tol)
    return alg.from_blocks([[a + 1j, a], [a, a - 1j]])


@dataclass
class U11Report:
    member: bool
    residual: float
    g11_smallest: float
    omega_member: bool
    failing_corners: list

    @property
    def failure_observed(self):
        return self.member and not self.omega_member and 1 in self.failing_corners


def u11_counterexample(a, check_witness=True):
    _check_self_adjoint(a)
    if check_witness:
        _check_i_in_spectrum(a)
    g = u11_element(a)
    flag = standard_flag(g.algebra)
    omega = omega_membership(g, flag)
    g11_smin = relative_smin(g.algebra.block(g, 0, 0))[0]
    return U11Report(u11_membership(g), u11_residual(g), g11_smin, omega.member,
                     omega.failing_corners)


def random_u11(algebra, rng, scale=0.5):
    """``exp(X)`` for a random ``J``-skew ``X`` (``J X* J = -X``), so ``g`` lies in U(1,1)."""
    j = u11_signature(algebra)
    y = scale * algebra.random(rng)
    x = y - j * y.adjoint() * j
    return algebra.element(scipy.linalg.expm(x.data))

