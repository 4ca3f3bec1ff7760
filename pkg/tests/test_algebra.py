import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagfact import (BlockAlgebra, DenseAlgebra, InstanceMismatch, LoopAlgebra,
                      NonHermitianWarning, NotIdempotent, NotInCorner, NotInvertible,
                      Tolerances, corner_embed_iota0, corner_embed_iota1, corner_invert,
                      corner_rank, corner_spectrum, hausdorff, invert, is_hermitian,
                      is_hermitian_witnessed, is_self_adjoint, norm, relative_smin,
                      require_hermitian, smoothness_defect, spectrum)

E11 = np.array([[1, 0], [0, 0]], dtype=complex)


def test_tolerances_reject_nonpositive():
    with pytest.raises(ValueError):
        Tolerances(rel_residual=0.0)
    with pytest.raises(ValueError):
        DenseAlgebra(2).with_tolerances(inv_threshold=-1.0)


def test_instance_validation():
    with pytest.raises(ValueError):
        LoopAlgebra(2, 48)
    with pytest.raises(ValueError):
        DenseAlgebra(2, (1, 2))


def test_adjoint_of_unit():
    for alg in (DenseAlgebra(3), DenseAlgebra(2, (1, -1)), LoopAlgebra(2, 16)):
        assert norm(alg.one().adjoint() - 1) == 0


def test_indefinite_adjoint_fixes_rotation():
    alg = DenseAlgebra(2, (1, -1))
    x = alg.element([[0, 1], [-1, 0]])
    np.testing.assert_allclose(x.adjoint().matrix, [[0, 1], [-1, 0]])
    assert is_self_adjoint(x)


def test_loop_adjoint_is_pointwise():
    alg = LoopAlgebra(2, 32)
    x = alg.from_function(lambda t: np.diag([np.exp(1j * t), 1]))
    expected = alg.from_function(lambda t: np.diag([np.exp(-1j * t), 1]))
    assert norm(x.adjoint() - expected) < 1e-15


def test_dense_inverse_example():
    alg = DenseAlgebra(2)
    inv = invert(alg.element([[2, 1], [1, 1]]))
    np.testing.assert_allclose(inv.matrix, [[1, -1], [-1, 2]], atol=1e-14)
    assert norm(invert(alg.one()) - 1) == 0


def test_loop_inverse_and_zero_sample():
    alg = LoopAlgebra(1, 64)
    z = alg.from_function(lambda t: np.exp(1j * t))
    np.testing.assert_allclose(invert(z).data[:, 0, 0], np.exp(-1j * alg.thetas), atol=1e-14)
    with pytest.raises(NotInvertible) as info:
        invert(z - 1)
    assert info.value.index == 0


def test_spectrum_examples():
    assert hausdorff(spectrum(DenseAlgebra(3).one()).points, [1]) == 0
    a = DenseAlgebra(2, (1, -1)).element([[0, 1], [-1, 0]])
    assert hausdorff(spectrum(a).points, [1j, -1j]) < 1e-14
    assert spectrum(a).method == "eigenvalues"
    loop = LoopAlgebra(1, 64)
    sig = spectrum(loop.from_function(lambda t: np.exp(1j * t)))
    assert sig.method == "pointwise-union"
    assert len(sig) == 64 and np.allclose(np.abs(sig.points), 1)


def test_hermitian_witness():
    assert is_hermitian_witnessed(DenseAlgebra(3)).passed
    assert is_hermitian_witnessed(LoopAlgebra(2, 64)).passed
    assert is_hermitian_witnessed(BlockAlgebra(2, DenseAlgebra(2))).passed
    report = is_hermitian_witnessed(DenseAlgebra(2, (1, -1)))
    assert not report.passed
    v = report.violations[0]
    # the rescaled witness has -1 in the spectrum of its square
    assert v.normalized is not None and v.normalized_distance < 1e-8
    assert is_self_adjoint(v.normalized)


def test_require_hermitian_warns_but_runs():
    alg = DenseAlgebra(2, (1, -1))
    with pytest.warns(NonHermitianWarning):
        require_hermitian(alg)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        require_hermitian(alg, override=True)
        require_hermitian(DenseAlgebra(2))
    assert is_hermitian(DenseAlgebra(4)) and not is_hermitian(alg)


def test_instance_mismatch():
    with pytest.raises(InstanceMismatch):
        DenseAlgebra(2).one() + DenseAlgebra(3).one()


def test_block_layout():
    inner = DenseAlgebra(2)
    alg = BlockAlgebra(2, inner)
    b = inner.element([[1, 2], [3, 4]])
    x = alg.from_blocks([[1, b], [0, 2]])
    assert norm(alg.block(x, 0, 1) - b) == 0
    assert norm(alg.block(x, 1, 1) - 2) == 0
    assert norm(alg.block(x, 1, 0)) == 0
    # the block involution transposes blocks and adjoints entries
    assert norm(alg.block(x.adjoint(), 1, 0) - b.adjoint()) == 0


def test_block_over_indefinite_tiles_signature():
    alg = BlockAlgebra(2, DenseAlgebra(2, (1, -1)))
    assert alg.signature == (1, -1, 1, -1)


def test_corner_examples():
    alg = DenseAlgebra(2)
    p = alg.element(E11)
    assert hausdorff(corner_spectrum(p, p).points, [1]) < 1e-15
    assert hausdorff(spectrum(corner_embed_iota0(p, p)).points, [0, 1]) < 1e-15
    x = 2 * p
    assert hausdorff(corner_spectrum(x, p).points, [2]) < 1e-15
    assert hausdorff(spectrum(corner_embed_iota1(x, p)).points, [2, 1]) < 1e-15
    y = alg.element([[1, 2], [3, 4]])
    assert hausdorff(corner_spectrum(y, alg.one()).points, spectrum(y).points) == 0


def test_corner_invert_uses_corner_unit(rng):
    alg = DenseAlgebra(4)
    p = alg.element(np.diag([1, 1, 0, 0]).astype(complex))
    x = p * alg.random_invertible(rng) * p + 3 * p
    inv = corner_invert(x, p)
    assert norm(x * inv - p) < 1e-12 and norm(inv * x - p) < 1e-12
    assert corner_rank(p) == 2


def test_corner_errors():
    alg = DenseAlgebra(2)
    with pytest.raises(NotIdempotent):
        corner_rank(alg.element([[2, 0], [0, 0]]))
    with pytest.raises(NotInCorner):
        corner_invert(alg.element([[1, 1], [1, 1]]), alg.element(E11))


def test_relative_smin_scale_invariant(rng):
    x = DenseAlgebra(3).random_invertible(rng)
    assert relative_smin(x)[0] == pytest.approx(relative_smin(1e6 * x)[0], rel=1e-12)


def test_smoothness_defect():
    alg = LoopAlgebra(2, 64)
    assert smoothness_defect(alg.one()) == 0
    rough = alg.element(np.where(np.arange(64)[:, None, None] % 2 == 0, 1.0, -1.0)
                        * np.eye(2)[None])
    assert smoothness_defect(rough) > 0.9
    assert smoothness_defect(DenseAlgebra(2).one()) == 0


INSTANCES = [DenseAlgebra(3), DenseAlgebra(2, (1, -1)), LoopAlgebra(2, 16),
             BlockAlgebra(2, DenseAlgebra(2)), BlockAlgebra(2, LoopAlgebra(1, 16))]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, len(INSTANCES) - 1), st.integers(0, 2 ** 32 - 1),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_involution_axioms(idx, seed, lam):
    alg = INSTANCES[idx]
    rng = np.random.default_rng(seed)
    x, y = alg.random(rng), alg.random(rng)
    scale = max(1.0, norm(x) * norm(y))
    assert norm((x * y).adjoint() - y.adjoint() * x.adjoint()) <= 1e-12 * scale
    assert norm(x.adjoint().adjoint() - x) == 0
    assert norm((lam * x).adjoint() - np.conj(lam) * x.adjoint()) <= 1e-12 * max(1, abs(lam) * norm(x))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, len(INSTANCES) - 1), st.integers(0, 2 ** 32 - 1))
def test_inverse_roundtrip(idx, seed):
    alg = INSTANCES[idx]
    x = alg.random_invertible(np.random.default_rng(seed))
    inv = invert(x)
    assert norm(x * inv - 1) <= 1e-9 * max(1.0, norm(x) * norm(inv))
