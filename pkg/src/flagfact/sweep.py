"""Seeded invariant suites for every module, aggregated into one report.

Each property maps ``(rng, index)`` to a nonnegative residual; a sample
fails when the residual exceeds the property's threshold or the check
raises.  Property ``k`` draws from its own generator seeded with
``(seed, k)``, so reports depend only on the seed and the trial count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (BlockAlgebra, DenseAlgebra, LoopAlgebra, corner_embed_iota0,
                      corner_embed_iota1, corner_invert, corner_spectrum, hausdorff, norm,
                      smoothness_defect, spectrum)
from .errors import FlagFactError
from .factorization import gauss_decompose, nest_gram_factorize, uab_decompose
from .flags import (commutant_residual, delta_residual, diagonal_truncation,
                    equivalence_residual, selfadjointify, similarity, standard_flag,
                    unipotent_residual)
from .manifold import (base_point, chart_sigma, counterexample_char, flag_action,
                       unitary_transitivity_witness)
from .sampling import (random_D_invertible, random_delta, random_flag, random_idempotent,
                       random_lower_unipotent, random_positive_D, random_projection,
                       random_unipotent, random_unitary)

__all__ = ["PROPERTIES", "Property", "run_sweep", "indefinite_witness"]

DENSE = [DenseAlgebra(n) for n in (2, 3, 4, 8, 16)]
LOOPS = [LoopAlgebra(k, m) for k in (1, 2) for m in (64, 256)]
BLOCKS = [BlockAlgebra(2, DenseAlgebra(2)), BlockAlgebra(2, LoopAlgebra(2, 64))]
INDEFINITE = [DenseAlgebra(2, (1, -1)), DenseAlgebra(4, (1, 1, -1, -1))]
HERMITIAN = DENSE + LOOPS + BLOCKS
EVERYTHING = HERMITIAN + INDEFINITE
# instances with room for a flag of at least two blocks
FLAGGABLE = [a for a in HERMITIAN if a.flat_size >= 2]


def _pick(pool, index):
    return pool[index % len(pool)]


def _rel(x, scale):
    return norm(x) / max(1.0, scale)


def _random_cuts(size, rng, max_blocks=4):
    blocks = int(rng.integers(2, min(max_blocks, size) + 1))
    return sorted(rng.choice(np.arange(1, size), size=blocks - 1, replace=False).tolist())


def _flag(alg, rng, selfadjoint=True):
    return random_flag(alg, _random_cuts(alg.flat_size, rng), rng, selfadjoint=selfadjoint)


def indefinite_witness(t=0.0, phase=0.0):
    """``a = [[t, b], [-conj(b), -t]]`` with ``|b|^2 = 1 + t^2`` in M_2 with J = diag(1, -1).

    ``a`` is self-adjoint for the twisted involution and ``a^2 = -1``.
    """
    alg = DenseAlgebra(2, (1, -1))
    b = np.sqrt(1 + t * t) * np.exp(1j * phase)
    return alg.element([[t, b], [-np.conj(b), -t]])


# -- algebra-core ----------------------------------------------------------------


def involution_axioms(rng, i):
    alg = _pick(EVERYTHING, i)
    x, y = alg.random(rng), alg.random(rng)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    nx, ny = norm(x), norm(y)
    return max(_rel((x * y).adjoint() - y.adjoint() * x.adjoint(), nx * ny),
               _rel(x.adjoint().adjoint() - x, nx),
               _rel((lam * x).adjoint() - np.conj(lam) * x.adjoint(), abs(lam) * nx))


def spectral_inclusion(rng, i):
    alg = _pick(DENSE + LOOPS, i)
    x = alg.random(rng)
    squares = spectrum(x).points ** 2
    target = spectrum(x * x)
    one_sided = max(target.distance(z) for z in squares)
    return one_sided / max(1.0, norm(x) ** 2)


def corner_spectra(rng, i):
    alg = _pick(DENSE, i)
    p = random_projection(alg, int(rng.integers(1, alg.dim)), rng).element
    x = p * alg.random(rng) * p
    inner = corner_spectrum(x, p)
    d0 = hausdorff(spectrum(corner_embed_iota0(x, p)).points, np.append(inner.points, 0.0))
    d1 = hausdorff(spectrum(corner_embed_iota1(x, p)).points, np.append(inner.points, 1.0))
    return max(d0, d1)


def corner_gram_invertible(rng, i):
    alg = _pick(FLAGGABLE, i)
    a = alg.random_invertible(rng)
    p = random_projection(alg, int(rng.integers(1, alg.flat_size)), rng).element
    gram = p * a.adjoint() * a * p
    inv = corner_invert(gram, p)
    return _rel(gram * inv - p, norm(gram) * norm(inv))


def block_real_spectrum(rng, i):
    alg = _pick([BlockAlgebra(2, DenseAlgebra(2)), BlockAlgebra(3, DenseAlgebra(2)),
                 BlockAlgebra(2, LoopAlgebra(2, 64))], i)
    a = alg.random_self_adjoint(rng)
    return spectrum(a).max_imag() / max(1.0, norm(a))


def loop_smoothness(rng, i):
    alg = _pick(LOOPS, i)
    x, y = alg.random(rng), alg.random(rng)
    near_one = 1 + x / (8 * norm(x))
    return max(smoothness_defect(z) for z in (x * y, x + y, x.adjoint(), near_one.inverse()))


# -- flags -------------------------------------------------------------------------


def truncation_idempotent(rng, i):
    alg = _pick(FLAGGABLE, i)
    flag = _flag(alg, rng, selfadjoint=bool(i % 2))
    x = alg.random(rng)
    phi = diagonal_truncation(x, flag)
    return _rel(diagonal_truncation(phi, flag) - phi, norm(x))


def truncation_multiplicative(rng, i):
    alg = _pick(FLAGGABLE, i)
    flag = _flag(alg, rng, selfadjoint=bool(i % 2))
    x, y = random_delta(flag, rng), random_delta(flag, rng)
    lhs = diagonal_truncation(x * y, flag)
    rhs = diagonal_truncation(x, flag) * diagonal_truncation(y, flag)
    return _rel(lhs - rhs, norm(x) * norm(y))


def truncation_range(rng, i):
    alg = _pick(FLAGGABLE, i)
    flag = _flag(alg, rng, selfadjoint=bool(i % 2))
    phi = diagonal_truncation(alg.random(rng), flag)
    return max(commutant_residual(phi, flag),
               _rel(diagonal_truncation(phi, flag) - phi, norm(phi)))


def unipotent_group(rng, i):
    alg = _pick(FLAGGABLE, i)
    flag = _flag(alg, rng, selfadjoint=bool(i % 2))
    x, y = random_unipotent(flag, rng), random_unipotent(flag, rng)
    return max(unipotent_residual(x * y, flag), unipotent_residual(x.inverse(), flag))


def selfadjointify_unique(rng, i):
    alg = _pick(DENSE[:4] + BLOCKS[:1], i)
    e = random_idempotent(alg, int(rng.integers(1, alg.flat_size)), rng, spread=0.5).element
    p = selfadjointify(e).element
    # independent route: orthogonal projection onto the range of e
    u, s, _ = np.linalg.svd(e.data[0])
    basis = u[:, s > 0.5]
    q = alg.element(basis @ basis.conj().T)
    ne = max(1.0, norm(e))
    return max(_rel(p - p.adjoint(), 1), _rel(p * p - p, 1), _rel(e * p - p, ne),
               _rel(p * e - e, ne * ne), _rel(selfadjointify(p).element - p, 1),
               _rel(p - q, 1))


def similarity_identities(rng, i):
    alg = _pick(DENSE[:4] + BLOCKS[:1], i)
    q = random_idempotent(alg, int(rng.integers(1, alg.flat_size)), rng, spread=0.5).element
    p = selfadjointify(q).element
    s = similarity(p, q)
    s_inv = 1 - (q - p)
    nq = max(1.0, norm(q))
    return max(_rel((q - p) * (q - p), nq * nq), _rel(s * s_inv - 1, nq * nq),
               _rel(s * q * s_inv - p, nq ** 3))


# -- factorization -----------------------------------------------------------------


def _roundtrip_instance(rng, i):
    if i % 3 == 2:
        return _pick(BLOCKS, i)
    return DenseAlgebra(int(rng.integers(4, 11)))


def gauss_roundtrip(rng, i):
    alg = _roundtrip_instance(rng, i)
    flag = _flag(alg, rng, selfadjoint=bool(i % 2))
    x0 = random_lower_unipotent(flag, rng)
    d0 = random_D_invertible(flag, rng)
    y0 = random_unipotent(flag, rng)
    gf = gauss_decompose(x0 * d0 * y0, flag)
    return max(_rel(gf.x - x0, norm(x0)), _rel(gf.d - d0, norm(d0)), _rel(gf.y - y0, norm(y0)))


def uab_roundtrip(rng, i):
    alg = _roundtrip_instance(rng, i)
    flag = _flag(alg, rng)
    u0 = random_unitary(alg, rng)
    a0 = random_positive_D(flag, rng)
    b0 = random_unipotent(flag, rng)
    f = uab_decompose(u0 * a0 * b0, flag)
    return max(_rel(f.u - u0, norm(u0)), _rel(f.a - a0, norm(a0)), _rel(f.b - b0, norm(b0)))


def nestgram_cholesky(rng, i):
    alg = _pick(DENSE, i)
    s = alg.random_invertible(rng)
    ng = nest_gram_factorize(s, standard_flag(alg))
    chol = np.linalg.cholesky((s.adjoint() * s).matrix)
    diag_sq = np.abs(np.diag(chol)) ** 2
    d = np.diag(ng.d.matrix)
    return float(np.max(np.abs(d - diag_sq) / diag_sq))


def reconstruction_positivity(rng, i):
    alg = _pick(FLAGGABLE, i)
    flag = _flag(alg, rng)
    s = alg.random_invertible(rng)
    g = gauss_decompose(s, flag)
    ng = nest_gram_factorize(s, flag)
    f = uab_decompose(s, flag)
    positive = spectrum(ng.d).points
    if np.any(positive.real <= alg.tol.spec_margin) or np.max(np.abs(positive.imag)) > 1e-8 * norm(ng.d):
        return np.inf
    return max(g.residual, ng.residual, f.residual, f.unitarity)


def stabilizer_invariance(rng, i):
    alg = _pick(FLAGGABLE, i)
    flag = _flag(alg, rng)
    s = alg.random_invertible(rng)
    w = random_D_invertible(flag, rng) * random_unipotent(flag, rng)
    u1 = uab_decompose(s, flag).u
    u2 = uab_decompose(s * w, flag).u
    z = u1.inverse() * u2
    return max(delta_residual(z, flag), delta_residual(z.inverse(), flag))


# -- manifold ----------------------------------------------------------------------


def _points_residual(P, Q):
    return max((equivalence_residual(p, q) for p, q in zip(P.reps, Q.reps)), default=0.0)


def action_functoriality(rng, i):
    alg = _pick(DENSE[1:4], i)
    flag = _flag(alg, rng)
    P = base_point(flag, canonicalize=False)
    g = 1 + 0.5 * alg.random(rng)
    h = 1 + 0.5 * alg.random(rng)
    lhs = flag_action(g * h, P, canonicalize=False)
    rhs = flag_action(g, flag_action(h, P, canonicalize=False), canonicalize=False)
    return _points_residual(lhs, rhs)


def order_preservation(rng, i):
    alg = _pick(DENSE[1:4] + BLOCKS[:1], i)
    flag = _flag(alg, rng)
    g = 1 + 0.5 * alg.random(rng)
    moved = flag_action(g, base_point(flag, canonicalize=False), canonicalize=False)
    reps = [q.element for q in moved.reps]
    return max((_rel(hi * lo - lo, norm(lo)) for lo, hi in zip(reps, reps[1:])), default=0.0)


def chart_orbit(rng, i):
    alg = _pick(DENSE[1:4] + BLOCKS, i)
    flag = _flag(alg, rng)
    g = 1 + 0.3 * alg.random(rng)
    base = base_point(flag, canonicalize=False)
    x = chart_sigma(g, flag).point
    return _points_residual(flag_action(g, base, canonicalize=False),
                            flag_action(x, base, canonicalize=False))


def transitivity(rng, i):
    alg = _pick(FLAGGABLE, i)
    flag = _flag(alg, rng)
    w = unitary_transitivity_witness(alg.random_invertible(rng), flag)
    return max(w.unitarity, w.delta_residual, w.inverse_delta_residual)


def non_transitivity(rng, i):
    a = indefinite_witness(rng.standard_normal(), rng.uniform(0, 2 * np.pi))
    report = counterexample_char(a)
    return 0.0 if report.failure_observed else np.inf


@dataclass(frozen=True)
class Property:
    name: str
    module: str
    check: object
    threshold: float


PROPERTIES = [
    Property("involution_axioms", "algebra-core", involution_axioms, 1e-9),
    Property("spectral_inclusion", "algebra-core", spectral_inclusion, 1e-10),
    Property("corner_spectra", "algebra-core", corner_spectra, 1e-8),
    Property("corner_gram_invertible", "algebra-core", corner_gram_invertible, 1e-9),
    Property("block_real_spectrum", "algebra-core", block_real_spectrum, 1e-10),
    Property("loop_smoothness", "algebra-core", loop_smoothness, 1e-8),
    Property("truncation_idempotent", "flags", truncation_idempotent, 1e-9),
    Property("truncation_multiplicative", "flags", truncation_multiplicative, 1e-9),
    Property("truncation_range", "flags", truncation_range, 1e-9),
    Property("unipotent_group", "flags", unipotent_group, 1e-9),
    Property("selfadjointify_unique", "flags", selfadjointify_unique, 1e-8),
    Property("similarity_identities", "flags", similarity_identities, 1e-8),
    Property("gauss_roundtrip", "factorization", gauss_roundtrip, 1e-7),
    Property("uab_roundtrip", "factorization", uab_roundtrip, 1e-7),
    Property("nestgram_cholesky", "factorization", nestgram_cholesky, 1e-8),
    Property("reconstruction_positivity", "factorization", reconstruction_positivity, 1e-9),
    Property("stabilizer_invariance", "factorization", stabilizer_invariance, 1e-8),
    Property("action_functoriality", "manifold", action_functoriality, 1e-9),
    Property("order_preservation", "manifold", order_preservation, 1e-9),
    Property("chart_orbit", "manifold", chart_orbit, 1e-9),
    Property("transitivity", "manifold", transitivity, 1e-8),
    Property("non_transitivity", "manifold", non_transitivity, 0.5),
]


def _sig(value):
    """Round to 6 significant digits so report bytes do not hinge on the last ulp."""
    value = float(value)
    if not np.isfinite(value):
        return str(value)
    return float(f"{value:.6e}")


def run_property(prop, index, seed, trials, threshold=None):
    rng = np.random.default_rng([seed, index])
    limit = prop.threshold if threshold is None else threshold
    failures, worst, first = 0, 0.0, None
    for i in range(trials):
        try:
            residual = float(prop.check(rng, i))
            message = None
        except (FlagFactError, ValueError, np.linalg.LinAlgError) as exc:
            residual, message = np.inf, f"{type(exc).__name__}: {exc}"
        if not residual <= limit:
            failures += 1
            if first is None:
                first = {"sample": i, "residual": _sig(residual),
                         "message": message or "residual above threshold"}
        if np.isfinite(residual):
            worst = max(worst, residual)
    return {"name": prop.name, "module": prop.module, "trials": trials,
            "failures": failures, "max_residual": _sig(worst),
            "threshold": limit, "first_failure": first}


def run_sweep(seed=0, trials=200, only=None, threshold=None):
    """Run every property (or those named in ``only``); returns the report body.

    ``threshold`` replaces every property's own threshold when given.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    results = []
    for index, prop in enumerate(PROPERTIES):
        if only and prop.name not in only:
            continue
        results.append(run_property(prop, index, seed, trials, threshold))
    total_failures = sum(r["failures"] for r in results)
    return {"seed": seed, "trials": trials, "properties": results,
            "total_failures": total_failures, "ok": total_failures == 0}
