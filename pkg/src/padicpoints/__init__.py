"""Rational points on hyperelliptic curves over Q by p-adic methods.

Subpackages follow the pipeline: exact p-adic arithmetic (padic), generic
polynomial/matrix algebra (algebra), curve models and residue disks (curve),
Frobenius on de Rham cohomology (kedlaya), Coleman integration (coleman),
classical Chabauty-Coleman (chabauty), quadratic Chabauty (qc), the
Mordell-Weil sieve (sieve), and the command-line drivers (cli).
"""

__version__ = "0.1.0"
