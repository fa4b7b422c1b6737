# Quon Fock space: Gram matrices between bosons (q=1) and fermions (q=-1).
#
# Run:  python demos/05_quon_fock_space.py

import numpy as np

from vipkit.quon import exclusion_defect, gram_matrix, min_eigenvalue

np.set_printoptions(precision=3, suppress=True)

print(gram_matrix(2, 2, 0.5).entries)

# positivity holds strictly inside (-1, 1); null states appear at the ends
for q in (-1.0, -0.9, -0.5, 0.0, 0.5, 0.9, 1.0):
    lows = [min_eigenvalue(gram_matrix(n, 3, q)) for n in (2, 3, 4)]
    print(f"q={q:+.1f}  min eigenvalue for n=2,3,4 on 3 modes:", " ".join(f"{x:8.4f}" for x in lows))

# the doubly occupied state's norm measures how far from exclusion we are
for eps in (0.0, 1e-6, 1e-3, 0.1):
    print(f"q = -1 + {eps:g}: |a+a+|0>|^2 = {exclusion_defect(-1 + eps):.3g}")
