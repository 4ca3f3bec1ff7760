"""
Algebra instances
=================

Three kinds of involutive algebra share one element type: plain matrices,
matrix-valued loops sampled on a grid, and block matrices over either.
"""

import numpy as np

from flagfact import (BlockAlgebra, DenseAlgebra, LoopAlgebra, NotInvertible, invert,
                      is_hermitian_witnessed, spectrum)

# Dense matrices with the usual conjugate transpose.
A = DenseAlgebra(2)
g = A.element([[2, 1], [1, 1]])
print("inverse of g:\n", invert(g).matrix.real)

# Twisting the involution by J = diag(1, -1) makes [[0, 1], [-1, 0]]
# self-adjoint, yet its spectrum is {i, -i}.
J = DenseAlgebra(2, signature=(1, -1))
a = J.element([[0, 1], [-1, 0]])
print("a* == a:", np.allclose(a.adjoint().matrix, a.matrix))
print("spectrum of a:", np.round(spectrum(a).points, 12))

# The sampled hermitian test finds such elements on its own.
print("dense hermitian:", is_hermitian_witnessed(A).passed)
print("indefinite hermitian:", is_hermitian_witnessed(J).passed)

# Loops: theta -> e^{i theta} is invertible, e^{i theta} - 1 vanishes at 0.
L = LoopAlgebra(1, 64)
z = L.from_function(lambda t: np.exp(1j * t))
print("max |z^-1 - conj z|:", np.max(np.abs(invert(z).data - np.conj(z.data))))
try:
    invert(z - 1)
except NotInvertible as exc:
    print("z - 1:", exc)

# Block matrices over loops, stored flattened per grid sample.
M = BlockAlgebra(2, LoopAlgebra(2, 64))
x = M.from_blocks([[1, 0], [0, 2]])
print("spectrum of diag(1, 2):", np.round(spectrum(x).points.real, 12))
print("block instance:", M.kind, "flat size", M.flat_size, "samples", M.batch)
