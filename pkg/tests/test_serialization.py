import json

import numpy as np
import pytest

from flagfact import BadPartition, BlockAlgebra, DenseAlgebra, LoopAlgebra, norm, standard_flag
from flagfact.sampling import random_flag
from flagfact.serialization import (element_from_json, element_to_json, flag_from_json,
                                    flag_to_json, instance_from_json, instance_to_json,
                                    matrix_from_json, parse_flag, parse_instance)

INSTANCES = [DenseAlgebra(3), DenseAlgebra(2, (1, -1)), LoopAlgebra(2, 16),
             BlockAlgebra(2, DenseAlgebra(2)), BlockAlgebra(2, LoopAlgebra(1, 8))]


@pytest.mark.parametrize("alg", INSTANCES, ids=lambda a: a.kind)
def test_element_roundtrip(alg, rng):
    x = alg.random(rng)
    text = json.dumps(element_to_json(x))
    back = element_from_json(json.loads(text), alg)
    assert norm(back - x) == 0
    desc = json.loads(json.dumps(instance_to_json(alg, with_tolerances=True)))
    assert instance_from_json(desc) == alg


def test_dense_encoding_layout():
    alg = DenseAlgebra(2)
    enc = element_to_json(alg.element([[1 + 2j, 0], [0, 3]]))
    assert enc[0][0] == [1.0, 2.0] and enc[1][1] == [3.0, 0.0]
    np.testing.assert_allclose(matrix_from_json([[1, 2], [3, 4]]), [[1, 2], [3, 4]])


def test_loop_shape_mismatch():
    enc = element_to_json(LoopAlgebra(1, 8).one())
    with pytest.raises(ValueError):
        element_from_json(enc, LoopAlgebra(1, 16))


def test_tolerance_override():
    alg = instance_from_json({"kind": "dense-standard", "dim": 2,
                              "tolerances": {"rel_residual": 1e-6}})
    assert alg.tol.rel_residual == 1e-6
    with pytest.raises(ValueError):
        instance_from_json({"kind": "dense-standard", "dim": 2, "tolerances": {"bogus": 1}})
    with pytest.raises(ValueError):
        instance_from_json({"kind": "nope"})


def test_shorthands():
    assert parse_instance("dense:3") == DenseAlgebra(3)
    assert parse_instance("indefinite:1,-1") == DenseAlgebra(2, (1, -1))
    assert parse_instance("loop:2x64") == LoopAlgebra(2, 64)
    assert parse_instance("block:2/loop:2x64") == BlockAlgebra(2, LoopAlgebra(2, 64))
    with pytest.raises(ValueError):
        parse_instance("matrix:3")
    alg = DenseAlgebra(4)
    assert parse_flag("standard", alg).n == 4
    assert parse_flag("standard:1,3", alg).n == 3
    assert parse_flag("trivial", alg).n == 1
    assert parse_flag("parts:2", alg).n == 2
    with pytest.raises(BadPartition):
        parse_flag("zigzag", alg)


def test_flag_roundtrip(rng):
    alg = BlockAlgebra(2, DenseAlgebra(2))
    for flag in (standard_flag(alg), random_flag(alg, [1, 3], rng, selfadjoint=False)):
        obj = json.loads(json.dumps(flag_to_json(flag)))
        back = flag_from_json(obj)
        assert back.selfadjoint == flag.selfadjoint
        for p, q in zip(back.chain, flag.chain):
            assert norm(p.element - q.element) == 0
