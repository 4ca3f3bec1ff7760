"""JSON encodings of instances, elements and flags, plus CLI shorthands.

Dense elements are row-major nested arrays of ``[re, im]`` pairs; loop
elements are ``{"matdim", "gridsize", "samples"}`` objects; block elements
are ``{"blockcount", "blocks"}`` objects whose entries use the inner
encoding.
"""

from __future__ import annotations

import numpy as np

from .algebra import BlockAlgebra, DenseAlgebra, Element, LoopAlgebra, Tolerances
from .errors import BadPartition
from .flags import Flag, Idempotent, standard_flag

__all__ = [
    "instance_to_json", "instance_from_json", "parse_instance",
    "element_to_json", "element_from_json", "flag_to_json", "flag_from_json",
    "parse_flag", "matrix_to_json", "matrix_from_json", "complex_list",
]

_TOL_FIELDS = ("rel_residual", "inv_threshold", "spec_margin", "loop_smoothness")


def matrix_to_json(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def matrix_from_json(rows):
    arr = np.asarray(rows, dtype=float)
    if arr.ndim == 2:  # plain real matrix
        return arr.astype(complex)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("matrix must be a nested array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def complex_list(points):
    return [[float(z.real), float(z.imag)] for z in np.asarray(points, dtype=complex).ravel()]


def _tolerances_to_json(tol):
    return {name: getattr(tol, name) for name in _TOL_FIELDS}


def instance_to_json(algebra, with_tolerances=False):
    if isinstance(algebra, DenseAlgebra):
        desc = ({"kind": "dense-standard", "dim": algebra.dim} if algebra.signature is None
                else {"kind": "dense-indefinite", "J": list(algebra.signature)})
    elif isinstance(algebra, LoopAlgebra):
        desc = {"kind": "loop", "matdim": algebra.matdim, "gridsize": algebra.gridsize}
    elif isinstance(algebra, BlockAlgebra):
        desc = {"kind": "block", "blockcount": algebra.blockcount,
                "inner": instance_to_json(algebra.inner)}
    else:
        raise TypeError(f"unknown instance {algebra!r}")
    if with_tolerances:
        desc["tolerances"] = _tolerances_to_json(algebra.tol)
    return desc


def instance_from_json(desc, tolerances=None):
    """Build an instance from a descriptor; ``tolerances`` (a dict) overrides
    the descriptor's own ``"tolerances"`` object."""
    tol_fields = dict(desc.get("tolerances", {}))
    tol_fields.update(tolerances or {})
    unknown = set(tol_fields) - set(_TOL_FIELDS)
    if unknown:
        raise ValueError(f"unknown tolerance fields {sorted(unknown)}")
    tol = Tolerances(**tol_fields)
    kind = desc.get("kind")
    if kind == "dense-standard":
        return DenseAlgebra(int(desc["dim"]), tol=tol)
    if kind == "dense-indefinite":
        sig = tuple(int(s) for s in desc["J"])
        return DenseAlgebra(len(sig), sig, tol=tol)
    if kind == "loop":
        return LoopAlgebra(int(desc["matdim"]), int(desc["gridsize"]), tol=tol)
    if kind == "block":
        inner = instance_from_json(desc["inner"], tol_fields)
        return BlockAlgebra(int(desc["blockcount"]), inner, tol=tol)
    raise ValueError(f"unknown instance kind {kind!r}")


def parse_instance(text, tolerances=None):
    """Shorthands: ``dense:3``, ``indefinite:1,-1``, ``loop:2x64``, ``block:2/<inner>``."""
    head, _, rest = text.partition(":")
    if head == "dense":
        desc = {"kind": "dense-standard", "dim": int(rest)}
    elif head == "indefinite":
        desc = {"kind": "dense-indefinite", "J": [int(s) for s in rest.split(",")]}
    elif head == "loop":
        k, m = rest.lower().split("x")
        desc = {"kind": "loop", "matdim": int(k), "gridsize": int(m)}
    elif head == "block":
        n, _, inner = rest.partition("/")
        return BlockAlgebra(int(n), parse_instance(inner, tolerances),
                            tol=Tolerances(**(tolerances or {})))
    else:
        raise ValueError(f"unknown instance shorthand {text!r}")
    return instance_from_json(desc, tolerances)


def element_to_json(x):
    alg = x.algebra
    if isinstance(alg, DenseAlgebra):
        return matrix_to_json(x.data[0])
    if isinstance(alg, LoopAlgebra):
        return {"matdim": alg.matdim, "gridsize": alg.gridsize,
                "samples": [matrix_to_json(s) for s in x.data]}
    if isinstance(alg, BlockAlgebra):
        return {"blockcount": alg.blockcount,
                "blocks": [[element_to_json(b) for b in row] for row in alg.blocks(x)]}
    raise TypeError(f"unknown instance {alg!r}")


def element_from_json(obj, algebra):
    if isinstance(algebra, DenseAlgebra):
        return Element(algebra, matrix_from_json(obj)[None])
    if isinstance(algebra, LoopAlgebra):
        if obj.get("matdim") != algebra.matdim or obj.get("gridsize") != algebra.gridsize:
            raise ValueError("loop element does not match the instance")
        return Element(algebra, np.stack([matrix_from_json(s) for s in obj["samples"]]))
    if isinstance(algebra, BlockAlgebra):
        if obj.get("blockcount") != algebra.blockcount:
            raise ValueError("block element does not match the instance")
        return algebra.from_blocks([[element_from_json(b, algebra.inner) for b in row]
                                    for row in obj["blocks"]])
    raise TypeError(f"unknown instance {algebra!r}")


def flag_to_json(flag):
    return {"instance": instance_to_json(flag.algebra),
            "chain": [element_to_json(p.element) for p in flag.chain],
            "selfadjoint": flag.selfadjoint}


def flag_from_json(obj, algebra=None):
    if algebra is None:
        algebra = instance_from_json(obj["instance"])
    chain = [Idempotent(element_from_json(e, algebra)) for e in obj.get("chain", [])]
    flag = Flag(algebra, chain)
    if obj.get("selfadjoint") and not flag.selfadjoint:
        raise ValueError("flag declared self-adjoint but a member is not")
    return flag


def parse_flag(text, algebra):
    """``standard`` (full flag), ``trivial``, ``standard:k1,k2,...`` or ``parts:n``."""
    head, _, rest = text.partition(":")
    if head == "standard":
        if not rest:
            return standard_flag(algebra)
        return standard_flag(algebra, cuts=[int(c) for c in rest.split(",") if c])
    if head == "trivial":
        return Flag(algebra, [])
    if head == "parts":
        return standard_flag(algebra, parts=int(rest))
    raise BadPartition(f"unknown flag shorthand {text!r}")
