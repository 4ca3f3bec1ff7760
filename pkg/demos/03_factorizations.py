"""
Three factorizations
====================

Gauss ``g = x d y``, nest-Gram ``s* s = b* d b`` and ``s = u a b``.  On the
full flag of M_n they are LDU, LDL* and QR; on the trivial flag ``u a`` is
the polar decomposition.
"""

import numpy as np

from flagfact import DenseAlgebra, Flag, gauss_decompose, nest_gram_factorize, standard_flag, uab_decompose

A = DenseAlgebra(2)
g = A.element([[2, 1], [1, 1]])
flag = standard_flag(A)

f = gauss_decompose(g, flag)
print("Gauss x, d, y:")
for m in (f.x, f.d, f.y):
    print(m.matrix.real)

ng = nest_gram_factorize(g, flag)
print("nest-Gram d:", np.diag(ng.d.matrix).real, " b:", ng.b.matrix.real.tolist())

f = uab_decompose(g, flag)
print("u a b residual:", f.residual, " |u*u - 1|:", f.unitarity)

# Compare with numpy's QR on a random 8x8 matrix.
rng = np.random.default_rng(1)
B = DenseAlgebra(8)
s = B.random_invertible(rng)
f = uab_decompose(s, standard_flag(B))
q, r = np.linalg.qr(s.matrix)
phase = np.diag(r) / np.abs(np.diag(r))
print("u vs Q:", np.linalg.norm(f.u.matrix - q * phase) / np.linalg.norm(q))

# The trivial flag gives the polar decomposition.
f = uab_decompose(s, Flag(B, []))
w, sig, vh = np.linalg.svd(s.matrix)
print("u vs polar factor:", np.linalg.norm(f.u.matrix - w @ vh) / np.sqrt(8))

# A partial flag with blocks of sizes 2, 3 and 3.
f = uab_decompose(s, standard_flag(B, cuts=[2, 5]))
print("partial flag residual:", f.residual)
