"""Exact algebra and numerics for twisted gauge theories in the BV formalism.

Submodules:

* ``exactlinalg``: sparse rational matrices, ranks, kernels, cochain complexes
* ``graded_core``: graded vector spaces, Koszul signs, free graded-commutative counts, forms
* ``dg_lie``: dg Lie algebras, cdgas, ε-extensions, Hodge and vacuum-twisted families
* ``ce_complex``: Chevalley–Eilenberg cochains with coefficients
* ``spectral``: spectral sequences of filtered complexes
* ``anomaly``: graph classes and one-loop algebraic weights
* ``vacua``: centralizers, symmetry breaking, coarse moduli invariants
* ``fact_homology``: determinant-line degrees and compactification algebras
* ``weyl_dot``: Weyl algebras and differential-operator-type skeletons
* ``heat_kernel``: the regularized propagator and its vanishing identities (floats)
"""

__version__ = "0.1.0"
