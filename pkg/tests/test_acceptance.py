"""Acceptance criteria 1-10, each measured against an independent oracle.

Run under pytest (one test per criterion; pass/fail lines are printed in the
session summary) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time
import warnings
from dataclasses import dataclass

import numpy as np
import pytest

from flagfact import (BlockAlgebra, DenseAlgebra, Flag, LoopAlgebra, NonHermitianWarning,
                      corner_embed_iota0, corner_embed_iota1, corner_spectrum,
                      counterexample_char, diagonal_truncation, gauss_decompose, hausdorff,
                      nest_gram_factorize, norm, selfadjointify, similarity,
                      standard_flag, u11_counterexample, uab_decompose,
                      unitary_transitivity_witness)
from flagfact.sampling import (random_D_invertible, random_delta, random_flag, random_idempotent,
                               random_lower_unipotent, random_positive_D, random_projection,
                               random_unipotent, random_unitary)

SIZES = (2, 4, 8, 16, 32)
SEED = 20240601


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        text = (f"[{verdict}] criterion {self.number:2d} {self.title}: "
                f"worst {self.measured:.3e} (tol {self.tolerance:.0e})")
        return text + (f"; {self.detail}" if self.detail else "")


RESULTS: dict[int, Outcome] = {}


def _rel(a, b):
    """Relative Frobenius error of ``a`` against the reference ``b``."""
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def _componentwise(a, b):
    """Largest entry error relative to the largest reference entry."""
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def _rng(number):
    return np.random.default_rng([SEED, number])


def _qr_oracle(s):
    q, r = np.linalg.qr(s)
    phase = np.diag(r) / np.abs(np.diag(r))
    return q * phase[None, :], phase.conj()[:, None] * r


# -- 1. QR ---------------------------------------------------------------------


def criterion_1():
    rng, worst = _rng(1), 0.0
    for n in SIZES:
        alg = DenseAlgebra(n)
        flag = standard_flag(alg)
        for _ in range(100):
            s = alg.random_invertible(rng)
            f = uab_decompose(s, flag)
            q, r = _qr_oracle(s.matrix)
            worst = max(worst, _rel(f.u.matrix, q), _rel((f.a * f.b).matrix, r))
    return worst, 1e-8, f"{100 * len(SIZES)} samples, u vs Q and a*b vs R"


# -- 2. Cholesky ----------------------------------------------------------------


def criterion_2():
    rng, worst = _rng(2), 0.0
    for n in SIZES:
        alg = DenseAlgebra(n)
        flag = standard_flag(alg)
        for _ in range(100):
            s = alg.random_invertible(rng).matrix
            ng = nest_gram_factorize(alg.element(s), flag)
            # upper Cholesky factor R with s* s = R* R and positive diagonal
            r = np.linalg.cholesky(s.conj().T @ s).conj().T
            root = np.sqrt(np.diag(ng.d.matrix).real)
            worst = max(worst, _rel(root[:, None] * ng.b.matrix, r))
    return worst, 1e-8, f"{100 * len(SIZES)} samples, d^(1/2) b vs Cholesky"


# -- 3. polar ------------------------------------------------------------------


def criterion_3():
    rng, worst = _rng(3), 0.0
    for i in range(100):
        n = SIZES[i % len(SIZES)]
        alg = DenseAlgebra(n)
        s = alg.random_invertible(rng)
        f = uab_decompose(s, Flag(alg, []))
        w, sig, vh = np.linalg.svd(s.matrix)
        u_ref = w @ vh
        a_ref = vh.conj().T @ np.diag(sig) @ vh
        worst = max(worst, _rel(f.u.matrix, u_ref), _rel(f.a.matrix, a_ref),
                    _rel(f.b.matrix, np.eye(n)))
    return worst, 1e-8, "100 samples, trivial flag vs SVD polar"


# -- 4. uniqueness round-trips ---------------------------------------------------


def _unequal_cuts(rng):
    blocks = int(rng.integers(2, 5))
    sizes = rng.choice(np.arange(1, 6), size=blocks, replace=False)
    return int(sizes.sum()), np.cumsum(sizes)[:-1].tolist()


def criterion_4():
    rng, worst = _rng(4), 0.0
    for i in range(100):
        n, cuts = _unequal_cuts(rng)
        alg = DenseAlgebra(n)
        flag = random_flag(alg, cuts, rng, selfadjoint=bool(i % 2))
        x0 = random_lower_unipotent(flag, rng)
        d0 = random_D_invertible(flag, rng)
        y0 = random_unipotent(flag, rng)
        g = gauss_decompose(x0 * d0 * y0, flag)
        worst = max(worst, *(_componentwise(a.matrix, b.matrix)
                             for a, b in ((g.x, x0), (g.d, d0), (g.y, y0))))
    for i in range(100):
        n, cuts = _unequal_cuts(rng)
        alg = DenseAlgebra(n)
        flag = random_flag(alg, cuts, rng, rotate=bool(i % 2))
        u0 = random_unitary(alg, rng)
        a0 = random_positive_D(flag, rng)
        b0 = random_unipotent(flag, rng)
        f = uab_decompose(u0 * a0 * b0, flag)
        worst = max(worst, *(_componentwise(a.matrix, b.matrix)
                             for a, b in ((f.u, u0), (f.a, a0), (f.b, b0))))
    return worst, 1e-7, "100 Gauss + 100 uab, 2-4 unequal blocks"


# -- 5. corner spectra -----------------------------------------------------------


def criterion_5():
    rng, worst, failures = _rng(5), 0.0, 0
    dims = (2, 3, 4, 8, 16)
    for i in range(200):
        alg = DenseAlgebra(dims[i % len(dims)])
        rank = int(rng.integers(1, alg.dim))
        if i % 2:
            p = random_idempotent(alg, rank, rng, spread=0.5).element
        else:
            p = random_projection(alg, rank, rng).element
        x = p * alg.random(rng) * p
        corner = corner_spectrum(x, p).points
        # oracle: eigenvalues of the compression onto range(p) along ker(p)
        d0 = hausdorff(np.linalg.eigvals(corner_embed_iota0(x, p).matrix), np.append(corner, 0))
        d1 = hausdorff(np.linalg.eigvals(corner_embed_iota1(x, p).matrix), np.append(corner, 1))
        worst = max(worst, d0, d1)
        failures += max(d0, d1) > 1e-8
    return worst, 1e-8, f"200 samples, {failures} failures"


# -- 6. transitivity -------------------------------------------------------------


def criterion_6():
    rng, worst, failures = _rng(6), 0.0, 0
    dense = DenseAlgebra(4)
    loops = BlockAlgebra(2, LoopAlgebra(2, 64))
    cases = []
    for i in range(100):
        flag = (standard_flag(dense) if i % 2 == 0
                else random_flag(dense, sorted(rng.choice([1, 2, 3], int(rng.integers(1, 4)),
                                                          replace=False).tolist()), rng))
        cases.append((dense, flag))
    for i in range(100):
        flag = standard_flag(loops) if i % 2 == 0 else random_flag(loops, [2], rng)
        cases.append((loops, flag))
    for alg, flag in cases:
        g = alg.random_invertible(rng)
        w = unitary_transitivity_witness(g, flag)
        residual = max(w.unitarity, w.delta_residual, w.inverse_delta_residual)
        pointwise = np.max(np.abs(np.conj(np.swapaxes(w.u.data, -1, -2)) @ w.u.data
                                  - np.eye(alg.flat_size)))
        worst = max(worst, residual, pointwise)
        failures += not w.passed(1e-8) or pointwise > 1e-8
    return worst, 1e-8, f"100 in M_4, 100 in M_2(loop 2x64), {failures} failures"


# -- 7. counterexample -----------------------------------------------------------


def criterion_7():
    ind = DenseAlgebra(2, (1, -1))
    a = ind.element([[0, 1], [-1, 0]])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonHermitianWarning)
        char = counterexample_char(a)
        u11 = u11_counterexample(a)
    herm = DenseAlgebra(2)
    control = counterexample_char(herm.element([[0, 1], [1, 0]]), check_witness=False)
    # oracle: direct arithmetic in M_4(C) with J = diag(1,-1,1,-1)
    j4 = np.diag([1, -1, 1, -1]).astype(complex)
    a2 = np.array([[0, 1], [-1, 0]], dtype=complex)
    g = np.block([[np.eye(2), np.zeros((2, 2))], [a2, np.eye(2)]])
    gram = j4 @ g.conj().T @ j4 @ g
    oracle_corner = np.linalg.norm(gram[:2, :2])
    checks = {
        "char stops at corner 1": char.failed and char.failing_corner == 1,
        "|1 + a^2| <= 1e-12": char.one_plus_a2_norm <= 1e-12,
        "oracle corner vanishes": oracle_corner <= 1e-12,
        "spectrum(a) = {i, -i}": hausdorff(char.spectrum_a, [1j, -1j]) <= 1e-12,
        "hermitian control succeeds": not control.failed,
        "u11 residual <= 1e-12": u11.residual <= 1e-12,
        "g11 singular": u11.g11_smallest < ind.tol.inv_threshold and u11.member,
    }
    failed = [k for k, ok in checks.items() if not ok]
    measured = max(char.one_plus_a2_norm, u11.residual, oracle_corner)
    detail = "all checks hold" if not failed else "failed: " + ", ".join(failed)
    return measured, 1e-12, detail, not failed


# -- 8. idempotents ----------------------------------------------------------------


def criterion_8():
    rng, worst = _rng(8), 0.0
    dims = (2, 3, 4, 8, 16)
    for i in range(200):
        alg = DenseAlgebra(dims[i % len(dims)])
        e = random_idempotent(alg, int(rng.integers(1, alg.dim)), rng).element
        p = selfadjointify(e).element
        s = similarity(p, e)
        residuals = (norm(p - p.adjoint()), norm(p * p - p), norm(e * p - p), norm(p * e - e),
                     norm(s * e * s.inverse() - p), norm(selfadjointify(p).element - p))
        worst = max(worst, *residuals)
    return worst, 1e-8, "200 idempotents v E v^-1 in dense instances"


# -- 9. truncation ------------------------------------------------------------------


def criterion_9():
    rng, worst = _rng(9), 0.0
    pool = [DenseAlgebra(3), DenseAlgebra(5), DenseAlgebra(8), LoopAlgebra(3, 64),
            BlockAlgebra(2, DenseAlgebra(2)), BlockAlgebra(2, LoopAlgebra(2, 64))]
    for i in range(200):
        alg = pool[i % len(pool)]
        size = alg.flat_size
        k = int(rng.integers(1, size))
        cuts = sorted(rng.choice(np.arange(1, size), size=k, replace=False).tolist())
        flag = random_flag(alg, cuts, rng, selfadjoint=bool(i % 2))
        x, y = random_delta(flag, rng), random_delta(flag, rng)
        px, py = diagonal_truncation(x, flag), diagonal_truncation(y, flag)
        worst = max(worst, norm(diagonal_truncation(px, flag) - px) / max(1.0, norm(x)),
                    norm(diagonal_truncation(x * y, flag) - px * py) / max(1.0, norm(x) * norm(y)))
    return worst, 1e-9, "200 samples, idempotence and multiplicativity on Delta"


# -- 10. determinism ------------------------------------------------------------------


def _sweep_body(seed, trials):
    env = dict(os.environ)
    env.pop("FLAGFACT_SEED", None)
    out = subprocess.run([sys.executable, "-m", "flagfact", "propsweep", "--seed", str(seed),
                          "--trials", str(trials)], capture_output=True, check=False, env=env)
    report = json.loads(out.stdout)
    return json.dumps(report["body"], sort_keys=True).encode(), report["meta"]["body_sha256"]


def criterion_10():
    a, ha = _sweep_body(7, 10)
    b, hb = _sweep_body(7, 10)
    identical = a == b and ha == hb
    return (0.0 if identical else 1.0), 0.0, f"two fresh processes, body sha {ha[:12]}", identical


CRITERIA = {
    1: ("QR oracle", criterion_1),
    2: ("Cholesky oracle", criterion_2),
    3: ("polar oracle", criterion_3),
    4: ("uniqueness round-trips", criterion_4),
    5: ("corner spectra", criterion_5),
    6: ("unitary transitivity", criterion_6),
    7: ("non-hermitian counterexample", criterion_7),
    8: ("idempotent constructions", criterion_8),
    9: ("truncation algebra", criterion_9),
    10: ("propsweep determinism", criterion_10),
}


def evaluate(number):
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    out = fn()
    measured, tol, detail = out[:3]
    passed = out[3] if len(out) > 3 else measured <= tol
    detail = f"{detail}; {time.perf_counter() - start:.1f}s"
    outcome = Outcome(number, title, bool(passed), float(measured), tol, detail)
    RESULTS[number] = outcome
    return outcome


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    outcome = evaluate(number)
    print(outcome.line())
    assert outcome.passed, outcome.line()


if __name__ == "__main__":
    failed = 0
    for number in sorted(CRITERIA):
        outcome = evaluate(number)
        print(outcome.line(), flush=True)
        failed += not outcome.passed
    sys.exit(1 if failed else 0)
