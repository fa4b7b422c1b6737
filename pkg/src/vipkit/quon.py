"""Quon Fock spaces: inner products of creation strings at deformation q.

The only rule used is the deformed commutator

    a_k a†_l - q a†_l a_k = delta_kl,   a_k |0> = 0,

so q = 1 gives bosons, q = -1 fermions and q = 0 the free (Cuntz) case.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "CreationString",
    "GramMatrix",
    "MAX_PARTICLES",
    "MAX_MODES",
    "vacuum_expectation",
    "inner_product",
    "gram_matrix",
    "min_eigenvalue",
    "exclusion_defect",
]

MAX_PARTICLES = 4
MAX_MODES = 4


@dataclass(frozen=True)
class CreationString:
    """The state ``a†_{m0} a†_{m1} ... |0>`` for ``modes = (m0, m1, ...)``."""

    modes: tuple
    n_modes: int | None = None

    def __post_init__(self):
        modes = tuple(int(m) for m in self.modes)
        if not modes:
            raise ValueError("a creation string needs at least one operator")
        if min(modes) < 0:
            raise ValueError("mode indices must be >= 0")
        if self.n_modes is not None and max(modes) >= self.n_modes:
            raise ValueError(f"mode index {max(modes)} outside [0, {self.n_modes})")
        object.__setattr__(self, "modes", modes)

    def __len__(self):
        return len(self.modes)


@lru_cache(maxsize=None)
def _contract(ann: tuple, cre: tuple, q: float) -> float:
    # <0| a_{ann[-1]} ... a_{ann[0]} a†_{cre[0]} ... a†_{cre[-1]} |0>
    # ann[0] is the annihilator adjacent to the creators. Moving it right
    # past j creators picks up q**j and contracts with cre[j].
    if not ann:
        return 1.0
    k, rest = ann[0], ann[1:]
    total = 0.0
    weight = 1.0
    for j, l in enumerate(cre):
        if l == k:
            total += weight * _contract(rest, cre[:j] + cre[j + 1:], q)
        weight *= q
    return total


def vacuum_expectation(annihilators, creators, q: float) -> float:
    """``<0| a_{k1} ... a_{kn} a†_{l1} ... a†_{ln} |0>`` as written left to right."""
    ann = tuple(int(k) for k in annihilators)
    cre = tuple(int(l) for l in creators)
    if len(ann) != len(cre):
        return 0.0
    return _contract(ann[::-1], cre, float(q))


def inner_product(left: CreationString, right: CreationString, q: float) -> float:
    """Hilbert-space inner product ``<left|right>`` of two creation strings.

    The bra of ``a†_{k1}...a†_{kn}|0>`` is ``<0|a_{kn}...a_{k1}``, so the
    annihilator next to the creators is ``a_{k1}``. Strings of different
    length are orthogonal.
    """
    if not -1.0 <= q <= 1.0:
        raise ValueError("q must lie in [-1, 1]")
    if len(left) != len(right):
        return 0.0
    return _contract(left.modes, right.modes, float(q))


@dataclass(frozen=True, eq=False)
class GramMatrix:
    basis: tuple
    entries: np.ndarray
    q: float


def gram_matrix(n_particles: int, n_modes: int, q: float) -> GramMatrix:
    """All inner products of length-``n_particles`` strings, lexicographic basis."""
    if not 1 <= n_particles <= MAX_PARTICLES or not 1 <= n_modes <= MAX_MODES:
        raise ValueError(
            f"size error: need 1 <= n_particles <= {MAX_PARTICLES} and 1 <= n_modes <= {MAX_MODES}"
        )
    if not -1.0 <= q <= 1.0:
        raise ValueError("q must lie in [-1, 1]")
    basis = tuple(CreationString(m, n_modes) for m in itertools.product(range(n_modes), repeat=n_particles))
    size = len(basis)
    g = np.empty((size, size))
    for i in range(size):
        for j in range(i, size):
            g[i, j] = g[j, i] = inner_product(basis[i], basis[j], q)
    g.setflags(write=False)
    return GramMatrix(basis=basis, entries=g, q=float(q))


def min_eigenvalue(gram) -> float:
    m = gram.entries if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=float)
    if not np.all(np.isfinite(m)):
        raise ValueError("Gram matrix has non-finite entries")
    return float(np.linalg.eigvalsh(m)[0])


def exclusion_defect(q: float) -> float:
    """Squared norm ``1 + q`` of the doubly occupied state ``a†_k a†_k |0>``."""
    if not -1.0 <= q <= 1.0:
        raise ValueError("q must lie in [-1, 1]")
    pair = CreationString((0, 0))
    return inner_product(pair, pair, q)
