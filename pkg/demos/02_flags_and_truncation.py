"""
Flags and diagonal truncation
=============================

A flag is a strictly increasing chain of commuting idempotents.  Truncation
keeps the diagonal blocks it cuts out, and is multiplicative on the
block upper triangular part.
"""

import numpy as np

from flagfact import (DenseAlgebra, diagonal_truncation, in_Delta, in_N, norm,
                      selfadjointify, similarity, standard_flag)
from flagfact.sampling import random_delta, random_flag

A = DenseAlgebra(2)
flag = standard_flag(A)
x = A.element([[1, 2], [3, 4]])
print("truncation of [[1,2],[3,4]]:\n", diagonal_truncation(x, flag).matrix.real)

# A non-self-adjoint idempotent and its self-adjoint partner generate the
# same right ideal.
e = A.element([[1, 1], [0, 0]])
p = selfadjointify(e)
print("selfadjointify([[1,1],[0,0]]):\n", p.element.matrix.real)
s = similarity(p.element, e)
print("s e s^-1 == p:", norm(s * e * s.inverse() - p.element) < 1e-14)

# Rotated flags in M_6 with unequal blocks: truncation is multiplicative on
# the triangular algebra, and triangular elements stay triangular.
rng = np.random.default_rng(0)
B = DenseAlgebra(6)
rot = random_flag(B, [1, 4], rng, selfadjoint=False)
u, v = random_delta(rot, rng), random_delta(rot, rng)
lhs = diagonal_truncation(u * v, rot)
rhs = diagonal_truncation(u, rot) * diagonal_truncation(v, rot)
print("multiplicativity defect:", norm(lhs - rhs))
print("u v triangular:", in_Delta(u * v, rot))
print("1 + strictly upper part unipotent:",
      in_N(1 + (u - diagonal_truncation(u, rot)), rot))
