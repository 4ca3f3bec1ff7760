"""Concrete unital involutive algebras and their elements.

Every instance stores its elements as a stack of square complex matrices of
shape ``(batch, N, N)``:

* dense instances use ``batch == 1``;
* loop instances use ``batch == gridsize``, sample ``j`` being the value at
  angle ``2*pi*j/gridsize``;
* block instances ``M_n(B)`` store the flattened ``(n*k) x (n*k)`` matrix
  (per grid sample when ``B`` is a loop instance).

All algebra operations act sample by sample, so one code path serves every
instance.  The involution is the conjugate transpose, optionally twisted by a
diagonal signature ``J`` (``x* = J x^H J``).
"""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field, replace
from numbers import Number

import numpy as np

from .errors import (InstanceMismatch, NonHermitianWarning, NotIdempotent,
                     NotInCorner, NotInvertible)

__all__ = [
    "Tolerances", "Algebra", "DenseAlgebra", "LoopAlgebra", "BlockAlgebra",
    "Element", "SpectrumApprox", "HermitianReport", "HermitianViolation",
    "add", "mul", "scale", "adjoint", "invert", "spectrum", "norm",
    "is_self_adjoint", "is_hermitian_witnessed", "is_hermitian",
    "require_hermitian", "relative_smin", "hausdorff",
    "corner_embed_iota0", "corner_embed_iota1", "corner_spectrum",
    "corner_invert", "corner_smin", "corner_rank", "in_corner",
    "smoothness_defect",
]


@dataclass(frozen=True)
class Tolerances:
    rel_residual: float = 1e-9
    inv_threshold: float = 1e-10
    spec_margin: float = 1e-10
    loop_smoothness: float = 1e-8

    def __post_init__(self):
        for name in ("rel_residual", "inv_threshold", "spec_margin", "loop_smoothness"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {name} must be strictly positive, got {value!r}")


class Algebra:
    """Shared behaviour of the concrete instances.

    Subclasses are frozen dataclasses exposing ``kind``, ``flat_size``,
    ``batch``, ``signature`` (tuple of +-1 or ``None``) and ``tol``.
    """

    kind: str
    tol: Tolerances

    @property
    def shape(self):
        return (self.batch, self.flat_size, self.flat_size)

    @property
    def sampled(self):
        """True when elements are functions sampled on a grid."""
        return False

    @property
    def flat_signature(self):
        if self.signature is None:
            return None
        return np.asarray(self.signature, dtype=float)

    def with_tolerances(self, **overrides):
        return replace(self, tol=replace(self.tol, **overrides))

    # -- element construction -------------------------------------------------

    def element(self, data):
        """Wrap raw data; a single ``N x N`` matrix is broadcast to every sample."""
        arr = np.asarray(data, dtype=complex)
        if arr.ndim == 2:
            arr = np.broadcast_to(arr, (self.batch,) + arr.shape)
        return Element(self, arr)

    def one(self):
        return Element(self, np.broadcast_to(np.eye(self.flat_size, dtype=complex), self.shape))

    def zero(self):
        return Element(self, np.zeros(self.shape, dtype=complex))

    def scalar(self, lam):
        return lam * self.one()

    def random(self, rng):
        """Random element with i.i.d. complex standard normal entries."""
        return Element(self, self._random_data(rng))

    def random_self_adjoint(self, rng):
        x = self.random(rng)
        return 0.5 * (x + x.adjoint())

    def random_invertible(self, rng):
        """Random element shifted by a multiple of 1 until comfortably invertible."""
        x = self.random(rng)
        shift = 0.0
        while relative_smin(x + shift)[0] < 10 * self.tol.inv_threshold:
            shift = 1.0 if shift == 0.0 else 2 * shift
        return x + shift

    def _random_data(self, rng):
        shape = self.shape
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@dataclass(frozen=True)
class DenseAlgebra(Algebra):
    """``M_dim(C)`` with the standard or a signature-twisted involution."""

    dim: int
    signature: tuple | None = None
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("dim must be positive")
        if self.signature is not None:
            sig = tuple(int(s) for s in self.signature)
            if len(sig) != self.dim or any(s not in (1, -1) for s in sig):
                raise ValueError("signature must be a length-dim vector of +1/-1 entries")
            object.__setattr__(self, "signature", sig)

    @property
    def kind(self):
        return "dense-standard" if self.signature is None else "dense-indefinite"

    @property
    def flat_size(self):
        return self.dim

    @property
    def batch(self):
        return 1


@dataclass(frozen=True)
class LoopAlgebra(Algebra):
    """``C^inf(T, M_k(C))`` sampled on a uniform grid of ``gridsize`` angles."""

    matdim: int
    gridsize: int
    tol: Tolerances = field(default_factory=Tolerances)
    bandwidth: int = 3  # Fourier modes used by random()

    kind = "loop"
    signature = None

    def __post_init__(self):
        m = int(self.gridsize)
        if m < 1 or m & (m - 1):
            raise ValueError("gridsize must be a power of two")
        if int(self.matdim) < 1:
            raise ValueError("matdim must be positive")

    @property
    def flat_size(self):
        return self.matdim

    @property
    def batch(self):
        return self.gridsize

    @property
    def sampled(self):
        return True

    @property
    def thetas(self):
        return 2 * np.pi * np.arange(self.gridsize) / self.gridsize

    def from_function(self, f):
        """Sample ``f(theta) -> k x k`` on the grid."""
        return Element(self, np.stack([np.asarray(f(t), dtype=complex).reshape(
            self.matdim, self.matdim) for t in self.thetas]))

    def from_fourier(self, coefficients):
        """Build ``sum_f c_f exp(i f theta)`` from a ``{frequency: matrix}`` mapping."""
        data = np.zeros(self.shape, dtype=complex)
        for freq, coeff in coefficients.items():
            phase = np.exp(1j * freq * self.thetas)
            data += phase[:, None, None] * np.asarray(coeff, dtype=complex)
        return Element(self, data)

    def _random_data(self, rng):
        k, band = self.matdim, self.bandwidth
        freqs = np.arange(-band, band + 1)
        coeffs = (rng.standard_normal((freqs.size, k, k))
                  + 1j * rng.standard_normal((freqs.size, k, k))) / np.sqrt(2 * freqs.size)
        phases = np.exp(1j * np.outer(self.thetas, freqs))
        return np.einsum("mf,fij->mij", phases, coeffs)


@dataclass(frozen=True)
class BlockAlgebra(Algebra):
    """``M_n(B)`` for a finite-dimensional or loop inner instance ``B``."""

    blockcount: int
    inner: Algebra
    tol: Tolerances = field(default_factory=Tolerances)

    kind = "block"

    def __post_init__(self):
        if int(self.blockcount) < 1:
            raise ValueError("blockcount must be positive")

    @property
    def flat_size(self):
        return self.blockcount * self.inner.flat_size

    @property
    def batch(self):
        return self.inner.batch

    @property
    def sampled(self):
        return self.inner.sampled

    @property
    def signature(self):
        if self.inner.signature is None:
            return None
        return tuple(self.inner.signature) * self.blockcount

    def from_blocks(self, blocks):
        """Assemble an element from an ``n x n`` nested list of inner elements
        (scalars are read as multiples of the inner unit)."""
        n, k = self.blockcount, self.inner.flat_size
        if len(blocks) != n or any(len(row) != n for row in blocks):
            raise ValueError(f"expected {n}x{n} blocks")
        data = np.zeros(self.shape, dtype=complex)
        for i, row in enumerate(blocks):
            for j, blk in enumerate(row):
                if isinstance(blk, Number):
                    blk = blk * self.inner.one()
                if blk.algebra != self.inner:
                    raise InstanceMismatch("block does not belong to the inner instance")
                data[:, i * k:(i + 1) * k, j * k:(j + 1) * k] = blk.data
        return Element(self, data)

    def block(self, x, i, j):
        k = self.inner.flat_size
        return Element(self.inner, x.data[:, i * k:(i + 1) * k, j * k:(j + 1) * k])

    def blocks(self, x):
        n = self.blockcount
        return [[self.block(x, i, j) for j in range(n)] for i in range(n)]

    def _random_data(self, rng):
        n = self.blockcount
        return self.from_blocks([[self.inner.random(rng) for _ in range(n)]
                                 for _ in range(n)]).data


class Element:
    """Immutable member of an :class:`Algebra` instance.

    Supports ``+``, ``-``, ``*`` (scalar or algebra product) and ``@``
    (algebra product).  Numbers are promoted to multiples of the unit in sums.
    """

    __array_ufunc__ = None

    def __init__(self, algebra, data):
        arr = np.array(data, dtype=complex)
        if arr.shape != algebra.shape:
            raise ValueError(f"data shape {arr.shape} does not match instance shape {algebra.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("element entries must be finite")
        arr.flags.writeable = False
        self.algebra = algebra
        self.data = arr
        self._cache = {}

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Element):
            if other.algebra is not self.algebra and other.algebra != self.algebra:
                raise InstanceMismatch("operands belong to different instances")
            return other
        if isinstance(other, Number):
            return other * self.algebra.one()
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Element(self.algebra, self.data + other.data)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Element(self.algebra, self.data - other.data)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Element(self.algebra, other.data - self.data)

    def __neg__(self):
        return Element(self.algebra, -self.data)

    def __mul__(self, other):
        if isinstance(other, Number):
            return Element(self.algebra, other * self.data)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Element(self.algebra, self.data @ other.data)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return Element(self.algebra, other * self.data)
        return NotImplemented

    def __matmul__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self * other

    def __truediv__(self, other):
        if isinstance(other, Number):
            return Element(self.algebra, self.data / other)
        return NotImplemented

    # -- structure --------------------------------------------------------------

    def adjoint(self):
        data = np.conj(np.swapaxes(self.data, -1, -2))
        sig = self.algebra.flat_signature
        if sig is not None:
            data = sig[:, None] * data * sig[None, :]
        return Element(self.algebra, data)

    def inverse(self):
        return invert(self)

    def norm(self):
        return norm(self)

    def spectrum(self):
        return spectrum(self)

    @property
    def matrix(self):
        """The single matrix of a dense element, else the full sample stack."""
        return self.data[0] if self.algebra.batch == 1 else self.data

    def __repr__(self):
        return f"Element({self.algebra.kind}, shape={self.data.shape})"


def _check_same(x, y):
    if x.algebra is not y.algebra and x.algebra != y.algebra:
        raise InstanceMismatch("operands belong to different instances")


def add(x, y):
    _check_same(x, y)
    return x + y


def mul(x, y):
    _check_same(x, y)
    return x * y


def scale(lam, x):
    return complex(lam) * x


def adjoint(x):
    return x.adjoint()


def norm(x):
    """Sup over grid samples of the Frobenius norm."""
    return float(np.max(np.linalg.norm(x.data, axis=(-2, -1))))


def relative_smin(x):
    """Smallest ``s_min / s_max`` over the samples of ``x`` and its sample index."""
    s = np.linalg.svd(x.data, compute_uv=False)
    top = s[:, 0]
    ratios = np.divide(s[:, -1], top, out=np.zeros_like(top), where=top > 0)
    idx = int(np.argmin(ratios))
    return float(ratios[idx]), idx


def invert(x):
    """Inverse of ``x``, computed sample by sample.

    Raises NotInvertible when the relative smallest singular value of any
    sample falls below ``inv_threshold``.
    """
    smin, idx = relative_smin(x)
    if smin < x.algebra.tol.inv_threshold:
        raise NotInvertible(smin, idx)
    return Element(x.algebra, np.linalg.inv(x.data))


def is_self_adjoint(x):
    return norm(x - x.adjoint()) <= x.algebra.tol.rel_residual * max(1.0, norm(x))


# -- spectra -----------------------------------------------------------------


def _collapse(points, tol):
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        return pts
    pts = pts[np.lexsort((pts.imag, pts.real))]
    kept = [pts[0]]
    for z in pts[1:]:
        if np.min(np.abs(np.asarray(kept) - z)) > tol:
            kept.append(z)
    return np.asarray(kept)


@dataclass(frozen=True, eq=False)
class SpectrumApprox:
    points: np.ndarray
    method: str

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def distance(self, z):
        """Distance from the complex number ``z`` to the point set."""
        if len(self.points) == 0:
            return np.inf
        return float(np.min(np.abs(self.points - z)))

    def max_imag(self):
        return float(np.max(np.abs(self.points.imag))) if len(self.points) else 0.0

    def hausdorff(self, other):
        other_points = other.points if isinstance(other, SpectrumApprox) else other
        return hausdorff(self.points, other_points)

    def union(self, extra):
        return SpectrumApprox(np.concatenate([self.points, np.asarray(extra, dtype=complex).ravel()]),
                              self.method)


def hausdorff(a, b):
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return np.inf
    dist = np.abs(a[:, None] - b[None, :])
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def _spectrum_of_stack(algebra, stack):
    eig = np.linalg.eigvals(stack) if stack.shape[-1] else np.zeros((0,), dtype=complex)
    scale_ = max(1.0, float(np.max(np.abs(eig)))) if eig.size else 1.0
    method = "pointwise-union" if algebra.sampled else "eigenvalues"
    return SpectrumApprox(_collapse(eig, algebra.tol.spec_margin * scale_), method)


def spectrum(x):
    """Eigenvalues for dense/flattened instances, pointwise union on grids."""
    return _spectrum_of_stack(x.algebra, x.data)


# -- hermitian witness -------------------------------------------------------


@dataclass
class HermitianViolation:
    index: int
    element: Element
    max_imag: float
    minus_one_distance: float   # dist(-1, sigma(a^2))
    normalized: Element | None  # (a - Re l)/Im l, which has i in its spectrum
    normalized_distance: float  # dist(-1, sigma(normalized^2))


@dataclass
class HermitianReport:
    kind: str
    trials: int
    samples: int
    violations: list

    @property
    def passed(self):
        return not self.violations


def is_hermitian_witnessed(algebra, trials=16, seed=0):
    """Sample self-adjoint elements and look for non-real spectrum.

    Each trial draws a random ``x`` and tests both self-adjoint parts
    ``(x + x*)/2`` and ``i(x - x*)/2``.  A sample is violating when its
    spectrum leaves the real axis or ``-1`` lies in the spectrum of its square.
    For every violation with a non-real eigenvalue ``l`` the rescaled witness
    ``(a - Re(l))/Im(l)`` is recorded; ``-1`` lies in the spectrum of its square.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    margin = algebra.tol.spec_margin
    violations = []
    count = 0
    for _ in range(trials):
        x = algebra.random(rng)
        for a in (0.5 * (x + x.adjoint()), 0.5j * (x - x.adjoint())):
            scale_ = max(1.0, norm(a))
            sig = spectrum(a)
            imag = sig.max_imag()
            d_minus = spectrum(a * a).distance(-1.0)
            if imag > margin * scale_ or d_minus <= margin * scale_ ** 2:
                normalized, ndist = None, np.inf
                if imag > margin * scale_:
                    lam = sig.points[np.argmax(np.abs(sig.points.imag))]
                    normalized = (a - lam.real) / lam.imag
                    ndist = spectrum(normalized * normalized).distance(-1.0)
                violations.append(HermitianViolation(count, a, imag, d_minus, normalized, ndist))
            count += 1
    return HermitianReport(algebra.kind, trials, count, violations)


@functools.lru_cache(maxsize=64)
def is_hermitian(algebra):
    """Cached verdict of :func:`is_hermitian_witnessed` with default sampling."""
    return is_hermitian_witnessed(algebra).passed


def require_hermitian(algebra, override=False, what="this operation"):
    if override or is_hermitian(algebra):
        return
    warnings.warn(f"{what} assumes a hermitian algebra, but the sampled witness test "
                  f"failed for the {algebra.kind} instance", NonHermitianWarning, stacklevel=3)


# -- corners -----------------------------------------------------------------


def _check_idempotent(p):
    tol = p.algebra.tol.rel_residual
    if norm(p * p - p) > tol * max(1.0, norm(p) ** 2):
        raise NotIdempotent("p is not idempotent")


def _compression(p):
    """Factor ``p = V W`` with ``W V = 1_r`` per sample (cached on ``p``).

    ``V`` is an orthonormal basis of the range of ``p``; the map
    ``x -> W x V`` is then a unital algebra isomorphism ``pAp -> M_r``.
    Nonzero singular values of an idempotent are >= 1, so rank is read off
    with a fixed cutoff of 1/2.
    """
    cached = p._cache.get("compression")
    if cached is not None:
        return cached
    _check_idempotent(p)
    u, s, _ = np.linalg.svd(p.data)
    ranks = np.count_nonzero(s > 0.5, axis=-1)
    if np.any(ranks != ranks[0]):
        raise NotIdempotent("idempotent has non-constant rank across grid samples")
    r = int(ranks[0])
    v = u[:, :, :r]
    w = np.conj(np.swapaxes(v, -1, -2)) @ p.data
    p._cache["compression"] = (v, w)
    return v, w


def corner_rank(p):
    return _compression(p)[0].shape[-1]


def in_corner(x, p):
    _check_same(x, p)
    return norm(p * x * p - x) <= x.algebra.tol.rel_residual * max(1.0, norm(x))


def _require_corner(x, p):
    if not in_corner(x, p):
        raise NotInCorner("element does not satisfy pxp = x")


def _compress(x, p):
    v, w = _compression(p)
    return w @ x.data @ v


def _expand(algebra, y, p):
    v, w = _compression(p)
    return Element(algebra, v @ y @ w)


def corner_embed_iota0(x, p):
    """Inclusion ``pAp -> A``."""
    _require_corner(x, p)
    return x


def corner_embed_iota1(x, p):
    """Monoid embedding ``x -> x + (1 - p)``."""
    _require_corner(x, p)
    return x + (1 - p)


def corner_smin(x, p, scale=None):
    """Relative smallest singular value of ``x`` inside ``pAp`` (and sample index).

    ``scale`` (per-sample array or number) sets a floor for the denominator,
    so a corner that is pure rounding noise of a larger element reads as
    singular rather than well conditioned.
    """
    y = _compress(x, p)
    if y.shape[-1] == 0:
        return 1.0, 0
    s = np.linalg.svd(y, compute_uv=False)
    top = s[:, 0]
    if scale is not None:
        top = np.maximum(top, scale)
    ratios = np.divide(s[:, -1], top, out=np.zeros_like(top), where=top > 0)
    idx = int(np.argmin(ratios))
    return float(ratios[idx]), idx


def corner_invert(x, p):
    """Inverse of ``x`` in the corner algebra ``pAp`` (whose unit is ``p``)."""
    _require_corner(x, p)
    y = _compress(x, p)
    if y.shape[-1] == 0:
        return x.algebra.zero()
    smin, idx = corner_smin(x, p)
    if smin < x.algebra.tol.inv_threshold:
        raise NotInvertible(smin, idx)
    return _expand(x.algebra, np.linalg.inv(y), p)


def corner_spectrum(x, p):
    """Spectrum of ``x`` in ``pAp``; equals ``spectrum(x)`` when ``p = 1``."""
    _require_corner(x, p)
    y = _compress(x, p)
    if y.shape[-1] == x.algebra.flat_size:
        return spectrum(x)
    return _spectrum_of_stack(x.algebra, y)


# -- loop diagnostics ----------------------------------------------------------


def smoothness_defect(x):
    """Fraction of Fourier energy in the trailing band ``|f| > m/4``.

    Dense elements report 0.  Small values indicate well-resolved smooth
    loops; the number is a diagnostic, not a membership certificate.
    """
    m = x.algebra.batch
    if not x.algebra.sampled or m < 4:
        return 0.0
    coeffs = np.fft.fft(x.data, axis=0)
    energy = np.sum(np.abs(coeffs) ** 2, axis=(1, 2))
    total = energy.sum()
    if total == 0:
        return 0.0
    freqs = np.fft.fftfreq(m, d=1.0 / m)
    return float(energy[np.abs(freqs) > m / 4].sum() / total)
