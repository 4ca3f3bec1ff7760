"""Flag-relative factorizations.

* :func:`gauss_decompose` -- ``g = x d y`` with ``x`` in ``N(1 - flag)``,
  ``d`` block diagonal and invertible, ``y`` in ``N(flag)``.
* :func:`nest_gram_factorize` -- ``s* s = b* d b`` with ``d`` positive block
  diagonal and ``b`` unipotent block upper triangular.
* :func:`uab_decompose` -- ``s = u a b`` with ``u`` unitary and
  ``a = d^(1/2)``.

All three peel the top member ``p_{n-1}`` of the flag off the current corner
and recurse into ``p_{n-1} A p_{n-1}``.  Corner elements are kept in the
ambient algebra; inversion inside a corner goes through an orthonormal
compression of the corner onto a smaller matrix algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (corner_invert, corner_smin, invert, is_self_adjoint, norm,
                      relative_smin, require_hermitian, spectrum)
from .errors import CornerNotInvertible, FlagFactError, NotInvertible, NotPositive
from .flags import in_D

__all__ = [
    "GaussFactors", "NestGramFactors", "UABFactors", "ConsistencyReport",
    "corner_conditions", "first_singular_corner", "gauss_decompose",
    "nest_gram_factorize", "positive_sqrt", "uab_decompose",
    "factor_maps_consistency",
]


@dataclass(frozen=True, eq=False)
class GaussFactors:
    x: object
    d: object
    y: object
    residual: float
    corner_conditions: tuple = field(default=())


@dataclass(frozen=True, eq=False)
class NestGramFactors:
    d: object
    b: object
    residual: float
    corner_conditions: tuple = field(default=())


@dataclass(frozen=True, eq=False)
class UABFactors:
    u: object
    a: object
    b: object
    residual: float
    unitarity: float = 0.0
    corner_conditions: tuple = field(default=())


def corner_conditions(g, flag):
    """Relative smallest singular values of ``p_j g p_j`` in ``p_j A p_j``, j = 1..n."""
    ps = flag.projections()
    scale = np.linalg.norm(g.data, ord=2, axis=(-2, -1))
    conds = [corner_smin(ps[j] * g * ps[j], ps[j], scale)[0] for j in range(1, flag.n)]
    conds.append(relative_smin(g)[0])
    return tuple(conds)


def first_singular_corner(conds, threshold):
    """1-based index of the first corner below ``threshold``, else ``None``."""
    for j, c in enumerate(conds, start=1):
        if c < threshold:
            return j
    return None


def _checked_conditions(g, flag):
    conds = corner_conditions(g, flag)
    bad = first_singular_corner(conds, flag.algebra.tol.inv_threshold)
    if bad is not None:
        raise CornerNotInvertible(bad, conds[bad - 1])
    return conds


def _product(factors, one):
    out = one
    for f in factors:
        out = out * f
    return out


def gauss_decompose(g, flag):
    """Gauss decomposition ``g = x d y`` relative to ``flag``.

    Raises CornerNotInvertible naming the first corner ``p_j g p_j`` that is
    singular, i.e. when ``g`` lies outside ``Omega``.
    """
    alg = flag.algebra
    conds = _checked_conditions(g, flag)
    ps = flag.projections()
    one = alg.one()
    h = g
    d = alg.zero()
    lowers, uppers = [], []
    for k in range(flag.n, 1, -1):
        p, q = ps[k - 1], ps[k] - ps[k - 1]
        php_inv = corner_invert(p * h * p, p)
        lower = q * h * p * php_inv
        upper = php_inv * p * h * q
        schur = q * h * q - lower * p * h * q
        lowers.append(one + lower)
        uppers.append(one + upper)
        d = d + schur
        h = p * h * p
    d = d + h
    x = _product(lowers, one)
    y = _product(reversed(uppers), one)
    residual = norm(x * d * y - g) / max(norm(g), np.finfo(float).tiny)
    return GaussFactors(x, d, y, residual, conds)


def _nest_gram(gram, ps, k):
    """``(d, b)`` for ``gram`` in the corner ``p_k A p_k`` with flag ``p_0 < ... < p_k``."""
    if k == 1:
        return gram, ps[1]
    p, q = ps[k - 1], ps[k] - ps[k - 1]
    top = p * gram * p
    d_prev, b_prev = _nest_gram(top, ps, k - 1)
    coupling = p * gram * q
    t = corner_invert(d_prev, p) * corner_invert(b_prev.adjoint(), p) * coupling
    d_k = q * (gram - gram * p * corner_invert(top, p) * p * gram) * q
    return d_prev + d_k, b_prev + t + q


def nest_gram_factorize(s, flag, override=False):
    """Factor ``s* s = b* d b`` for a self-adjoint ``flag``.

    ``d`` is block diagonal with spectrum in ``(0, inf)`` and ``b`` lies in
    ``N(flag)``.  The construction assumes a hermitian instance; on other
    instances a NonHermitianWarning is issued (``override`` silences it) and
    the run may end in CornerNotInvertible, which is itself a certificate of
    non-hermitian input.
    """
    if not flag.selfadjoint:
        raise FlagFactError("nest_gram_factorize needs a flag of self-adjoint idempotents")
    require_hermitian(flag.algebra, override, "nest_gram_factorize")
    gram = s.adjoint() * s
    conds = _checked_conditions(gram, flag)
    d, b = _nest_gram(gram, flag.projections(), flag.n)
    residual = norm(b.adjoint() * d * b - gram) / max(norm(s) ** 2, np.finfo(float).tiny)
    return NestGramFactors(d, b, residual, conds)


def positive_sqrt(d, flag=None):
    """The positive square root of a positive element.

    With the standard involution each sample is diagonalised by a hermitian
    eigendecomposition; signature-twisted instances use a general
    eigendecomposition.  Either way the result is a function of ``d``, so it
    stays in ``D(flag)`` whenever ``d`` does.
    """
    alg = d.algebra
    tol = alg.tol
    if not is_self_adjoint(d):
        raise NotPositive(spectrum(d).points, "element is not self-adjoint")
    if flag is not None and not in_D(d, flag):
        raise FlagFactError("element is not block diagonal for the flag")
    scale = max(1.0, norm(d))
    if alg.signature is None:
        herm = 0.5 * (d.data + np.conj(np.swapaxes(d.data, -1, -2)))
        lam, vecs = np.linalg.eigh(herm)
        bad = lam[lam <= tol.spec_margin]
        if bad.size:
            raise NotPositive(np.unique(bad))
        root = (vecs * np.sqrt(lam)[:, None, :]) @ np.conj(np.swapaxes(vecs, -1, -2))
    else:
        lam, vecs = np.linalg.eig(d.data)
        bad = lam[(lam.real <= tol.spec_margin) | (np.abs(lam.imag) > tol.spec_margin * scale)]
        if bad.size:
            raise NotPositive(np.unique(bad))
        root = (vecs * np.sqrt(lam.real)[:, None, :]) @ np.linalg.inv(vecs)
    return alg.element(root)


def uab_decompose(s, flag, override=False):
    """``s = u a b``: unitary ``u``, positive block diagonal ``a``, unipotent ``b``."""
    ng = nest_gram_factorize(s, flag, override=override)
    a = positive_sqrt(ng.d, flag)
    u = s * invert(a * ng.b)
    residual = norm(u * a * ng.b - s) / max(norm(s), np.finfo(float).tiny)
    unitarity = norm(u.adjoint() * u - 1)
    return UABFactors(u, a, ng.b, residual, unitarity, ng.corner_conditions)


@dataclass
class ConsistencyReport:
    steps: int
    input_steps: list
    factor_steps: list
    ratios: list
    max_ratio: float
    failed_index: int | None = None
    error: str | None = None


def factor_maps_consistency(path, flag, override=False):
    """Track ``u(s), a(s), b(s)`` along a discretised path of invertible elements.

    For each consecutive pair the largest factor change is divided by the
    input change; a constant path reports zero change.  A factorization
    failure stops the sweep and is recorded with the offending index.
    """
    factors = []
    failed, error = None, None
    for i, s in enumerate(path):
        try:
            factors.append(uab_decompose(s, flag, override=override))
        except (FlagFactError, NotInvertible) as exc:
            failed, error = i, f"{type(exc).__name__}: {exc}"
            break
    input_steps, factor_steps, ratios = [], [], []
    for i in range(1, len(factors)):
        ds = norm(path[i] - path[i - 1])
        f0, f1 = factors[i - 1], factors[i]
        df = max(norm(f1.u - f0.u), norm(f1.a - f0.a), norm(f1.b - f0.b))
        input_steps.append(ds)
        factor_steps.append(df)
        ratios.append(df / ds if ds > 0 else 0.0)
    return ConsistencyReport(len(factors), input_steps, factor_steps, ratios,
                             max(ratios, default=0.0), failed, error)

