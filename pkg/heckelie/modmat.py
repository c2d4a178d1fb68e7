"""
Arithmetic in Z/p^r and F_p: 2x2 matrix groups, the kernel embedding of sl_2(F_p)
into SL_2(Z/p^r), conjugation orbits, centralizers, subgroups and double cosets.

Whole-group computations work on numpy arrays of shape (N, 4) holding the entries
(a, b, c, d) of each matrix; single elements are ResidueMatrix / LieElt values.
"""
import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from sympy import factorint, primitive_root
from sympy.functions.combinatorial.numbers import legendre_symbol

from heckelie.utils import (
    GroupTooLargeError,
    InvalidInputError,
    NotInKernelError,
    verify_level,
    verify_odd_prime,
    verify_set,
)

logger = logging.getLogger(__name__)

MAX_GROUP_ORDER = 10_000_000

INERTIA_LABELS = ["i", "omega", "infinity"]


# Residues mod p


def legendre(x, p):
    """Legendre symbol (x/p) in {-1, 0, 1}."""
    verify_odd_prime("p", p)
    return _legendre_residue(x % p, p)


@lru_cache(maxsize=None)
def _legendre_residue(x, p):
    return int(legendre_symbol(x, p))


@lru_cache(maxsize=None)
def fixed_nonresidue(p):
    """The smallest positive quadratic nonresidue mod p."""
    verify_odd_prime("p", p)
    return next(x for x in range(2, p) if legendre(x, p) == -1)


def verify_nonresidue(nonresidue, p):
    """Verify that an override of the fixed nonresidue really is a nonresidue mod p."""
    if not isinstance(nonresidue, int) or legendre(nonresidue, p) != -1:
        raise InvalidInputError(
            f"The value of {nonresidue} for the argument 'nonresidue' is not a "
            f"quadratic nonresidue mod {p}."
        )


def resolve_nonresidue(p, nonresidue=None):
    """Return `nonresidue` after checking it, or the fixed nonresidue when None."""
    if nonresidue is None:
        return fixed_nonresidue(p)
    verify_nonresidue(nonresidue, p)
    return nonresidue


@lru_cache(maxsize=None)
def split_prime_power(modulus):
    """Return (p, r) with modulus == p**r for an odd prime p."""
    factors = factorint(modulus)
    if len(factors) != 1:
        raise InvalidInputError(f"The modulus {modulus} is not a prime power.")
    ((p, r),) = factors.items()
    return int(p), int(r)


def sl2_order(p, r):
    """|SL_2(Z/p^r)| = p^(3r-2) (p^2 - 1)."""
    return p ** (3 * r - 2) * (p * p - 1)


def verify_group_size(p, r, limit=None):
    limit = MAX_GROUP_ORDER if limit is None else limit
    order = sl2_order(p, r)
    if order > limit:
        raise GroupTooLargeError(
            f"SL_2(Z/{p}^{r}) has {order} elements, above the enumeration guard {limit}."
        )


# Single elements


@dataclass(frozen=True, order=True)
class ResidueMatrix:
    """A 2x2 matrix [[a, b], [c, d]] over Z/modulus."""

    modulus: int
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def of(cls, modulus, a, b, c, d):
        return cls(modulus, a % modulus, b % modulus, c % modulus, d % modulus)

    @classmethod
    def identity(cls, modulus):
        return cls(modulus, 1 % modulus, 0, 0, 1 % modulus)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def det(self):
        return (self.a * self.d - self.b * self.c) % self.modulus

    def __matmul__(self, other):
        if self.modulus != other.modulus:
            raise InvalidInputError(
                f"Cannot multiply matrices mod {self.modulus} and mod {other.modulus}."
            )
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return ResidueMatrix.of(
            self.modulus, a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h
        )

    def inverse(self):
        det_inv = pow(self.det(), -1, self.modulus)
        return ResidueMatrix.of(
            self.modulus,
            self.d * det_inv,
            -self.b * det_inv,
            -self.c * det_inv,
            self.a * det_inv,
        )

    def reduce(self, modulus):
        """Reduction to a modulus dividing the current one."""
        if self.modulus % modulus != 0:
            raise InvalidInputError(f"{modulus} does not divide {self.modulus}.")
        return ResidueMatrix.of(modulus, *self.entries())


def verify_unimodular(g):
    if g.det() != 1 % g.modulus:
        raise InvalidInputError(f"{g} does not have determinant 1.")


@dataclass(frozen=True, order=True)
class LieElt:
    """The traceless matrix [[a, b], [c, -a]] over F_p."""

    prime: int
    a: int
    b: int
    c: int

    @classmethod
    def of(cls, prime, a, b, c):
        return cls(prime, a % prime, b % prime, c % prime)

    @classmethod
    def zero(cls, prime):
        return cls(prime, 0, 0, 0)

    @classmethod
    def from_index(cls, prime, index):
        a, rest = divmod(index, prime * prime)
        b, c = divmod(rest, prime)
        return cls(prime, a, b, c)

    @property
    def index(self):
        return (self.a * self.prime + self.b) * self.prime + self.c

    def d(self):
        return (-self.a) % self.prime

    def __add__(self, other):
        return LieElt.of(self.prime, self.a + other.a, self.b + other.b, self.c + other.c)

    def __neg__(self):
        return LieElt.of(self.prime, -self.a, -self.b, -self.c)

    def scale(self, factor):
        return LieElt.of(self.prime, factor * self.a, factor * self.b, factor * self.c)

    def trace_pairing(self, other):
        """Tr(self * other) mod p."""
        return (2 * self.a * other.a + self.b * other.c + self.c * other.b) % self.prime

    def is_zero(self):
        return self.a == 0 and self.b == 0 and self.c == 0

    def is_nilpotent(self):
        # det = -a^2 - bc vanishes exactly for the nilpotent traceless matrices
        return (self.a * self.a + self.b * self.c) % self.prime == 0


def lie_u(p):
    """u = [[0, 0], [1, 0]]."""
    return LieElt(p, 0, 0, 1)


def lie_v(p, nonresidue=None):
    """v = [[0, 0], [nonresidue, 0]]."""
    return LieElt(p, 0, 0, resolve_nonresidue(p, nonresidue))


def lie_u0(p):
    """u_0 = [[0, 1], [0, 0]]."""
    return LieElt(p, 0, 1, 0)


def lie_v0(p, nonresidue=None):
    """v_0 = [[0, nonresidue], [0, 0]]."""
    return LieElt(p, 0, resolve_nonresidue(p, nonresidue), 0)


def all_lie_elements(p):
    return [LieElt.from_index(p, i) for i in range(p**3)]


def lie_embed(X, r):
    """I + p^(r-1) X as an element of the kernel of SL_2(Z/p^r) -> SL_2(Z/p^(r-1))."""
    verify_level("r", r)
    p = X.prime
    step = p ** (r - 1)
    return ResidueMatrix.of(
        p**r, 1 + step * X.a, step * X.b, step * X.c, 1 - step * X.a
    )


def lie_project(g, p=None):
    """Inverse of lie_embed on the kernel of reduction mod p^(r-1)."""
    if p is None:
        p, r = split_prime_power(g.modulus)
    else:
        r = split_prime_power(g.modulus)[1]
    if r < 2:
        raise NotInKernelError(f"{g} is not over Z/p^r with r >= 2.")
    step = p ** (r - 1)
    a, b, c, d = g.entries()
    if (a - 1) % step or b % step or c % step or (d - 1) % step:
        raise NotInKernelError(f"{g} is not congruent to the identity mod {step}.")
    return LieElt.of(p, (a - 1) // step, b // step, c // step)


def is_in_kernel(g):
    p, r = split_prime_power(g.modulus)
    if r < 2:
        return g == ResidueMatrix.identity(g.modulus)
    step = p ** (r - 1)
    a, b, c, d = g.entries()
    return not ((a - 1) % step or b % step or c % step or (d - 1) % step)


def conjugate_lie(g, X):
    """g X g^-1, computed through the kernel embedding when g lives over Z/p^r, r >= 2."""
    p = X.prime
    _, r = split_prime_power(g.modulus)
    if r >= 2:
        return lie_project(g @ lie_embed(X, r) @ g.inverse(), p)
    a, b, c, d = (e % p for e in g.entries())
    g_p = ResidueMatrix.of(p, a, b, c, d)
    h = g_p.inverse()
    x = ResidueMatrix.of(p, X.a, X.b, X.c, -X.a)
    y = g_p @ x @ h
    return LieElt.of(p, y.a, y.b, y.c)


# Vectorised matrix arithmetic on (..., 4) arrays


def _mul(A, B, m):
    a, b, c, d = A[..., 0], A[..., 1], A[..., 2], A[..., 3]
    e, f, g, h = B[..., 0], B[..., 1], B[..., 2], B[..., 3]
    return np.stack(
        [(a * e + b * g) % m, (a * f + b * h) % m, (c * e + d * g) % m, (c * f + d * h) % m],
        axis=-1,
    )


def _inv(A, m):
    """Inverse of determinant-one matrices."""
    return np.stack([A[..., 3], (-A[..., 1]) % m, (-A[..., 2]) % m, A[..., 0]], axis=-1)


def _keys(A, m):
    return ((A[..., 0] * m + A[..., 1]) * m + A[..., 2]) * m + A[..., 3]


def conjugate_lie_indices(G, p, lie_indices):
    """Canonical indices of g X g^-1 for every g in G (rows) and X in `lie_indices` (columns).

    Only the reduction of G mod p matters.
    """
    G = np.asarray(G, dtype=np.int64) % p
    idx = np.asarray(lie_indices, dtype=np.int64)
    x, rest = np.divmod(idx, p * p)
    y, z = np.divmod(rest, p)
    ga, gb, gc, gd = (G[:, k : k + 1] for k in range(4))
    # g X = [[r00, r01], [r10, r11]], then multiply by g^-1 = [[gd, -gb], [-gc, ga]]
    r00 = ga * x + gb * z
    r01 = ga * y - gb * x
    r10 = gc * x + gd * z
    r11 = gc * y - gd * x
    new_a = (r00 * gd - r01 * gc) % p
    new_b = (-r00 * gb + r01 * ga) % p
    new_c = (r10 * gd - r11 * gc) % p
    return (new_a * p + new_b) * p + new_c


@lru_cache(maxsize=8)
def sl2_array(p, r):
    """All of SL_2(Z/p^r) as a read-only (N, 4) array in lexicographic order."""
    verify_odd_prime("p", p)
    verify_level("r", r, lower_limit=1)
    verify_group_size(p, r)
    m = p**r
    residues = np.arange(m, dtype=np.int64)
    units = residues[residues % p != 0]
    non_units = residues[residues % p == 0]
    inverses = np.zeros(m, dtype=np.int64)
    inverses[units] = [pow(int(u), -1, m) for u in units]

    # a a unit: d = (1 + b c) / a
    a1, b1, c1 = (x.ravel() for x in np.meshgrid(units, residues, residues, indexing="ij"))
    d1 = ((1 + b1 * c1) % m) * inverses[a1] % m
    # a not a unit, so c must be: b = (a d - 1) / c
    a2, c2, d2 = (x.ravel() for x in np.meshgrid(non_units, units, residues, indexing="ij"))
    b2 = ((a2 * d2 - 1) % m) * inverses[c2] % m

    elements = np.concatenate(
        [np.stack([a1, b1, c1, d1], axis=1), np.stack([a2, b2, c2, d2], axis=1)]
    )
    elements = elements[np.lexsort(elements.T[::-1])]
    if len(elements) != sl2_order(p, r):
        raise GroupTooLargeError(
            f"Enumerated {len(elements)} elements of SL_2(Z/{p}^{r}), expected {sl2_order(p, r)}."
        )
    elements.flags.writeable = False
    logger.debug("enumerated SL_2(Z/%d^%d): %d elements", p, r, len(elements))
    return elements


def enumerate_sl2(p, r):
    """All elements of SL_2(Z/p^r) as ResidueMatrix values, in lexicographic order."""
    m = p**r
    return [ResidueMatrix(m, *map(int, row)) for row in sl2_array(p, r)]


def sl2_generators(p, r):
    """Elementary matrices and a torus element; they generate SL_2(Z/p^r)."""
    m = p**r
    g = int(primitive_root(p))
    return [
        ResidueMatrix.of(m, 1, 1, 0, 1),
        ResidueMatrix.of(m, 1, 0, 1, 1),
        ResidueMatrix.of(m, g, 0, 0, pow(g, -1, m)),
    ]


# Orbits


def orbit_and_centralizer(X, p, r, method="closure"):
    """The SL_2(Z/p^r) conjugation orbit of X and the order of its centralizer.

    Arguments:
    ----------

        X: LieElt

        p, r: int
            The prime and the level (r >= 2).

        method: string
            'closure' grows the orbit under a generating set; 'enumerate' sweeps the
            whole group and counts the stabilizer directly.

    Returns:
    --------

        Tuple(frozenset of LieElt, int)
    """
    verify_odd_prime("p", p)
    verify_level("r", r)
    verify_set("method", method, ["closure", "enumerate"])
    order = sl2_order(p, r)

    if method == "enumerate":
        conjugates = conjugate_lie_indices(sl2_array(p, r), p, [X.index])[:, 0]
        orbit = frozenset(LieElt.from_index(p, int(i)) for i in np.unique(conjugates))
        centralizer = int(np.count_nonzero(conjugates == X.index))
        if centralizer * len(orbit) != order:
            raise GroupTooLargeError(
                f"Orbit-stabilizer failed for {X}: {len(orbit)} * {centralizer} != {order}."
            )
        return orbit, centralizer

    orbit = lie_orbit(X)
    return orbit, order // len(orbit)


def lie_orbit(X):
    """The conjugation orbit of X, grown breadth-first under generators of SL_2(F_p)."""
    p = X.prime
    generators = sl2_generators(p, 1)
    seen = {X}
    queue = deque([X])
    while queue:
        Y = queue.popleft()
        for g in generators:
            Z = conjugate_lie(g, Y)
            if Z not in seen:
                seen.add(Z)
                queue.append(Z)
    logger.debug("orbit of %s in sl_2(F_%d): %d elements", X, p, len(seen))
    return frozenset(seen)


def nilpotent_cusp_legendre_profile(p):
    """Legendre symbols of b(u_0^h) over all h in SL_2(F_p).

    Returns:
    --------

        dict
            - 'values': set of Legendre symbols observed
            - 'zero_iff_lower_triangular': bool
            - 'lower_triangular_conjugates': number of distinct lower triangular u_0^h
            - 'orbit_size': number of distinct u_0^h
    """
    conjugates = conjugate_lie_indices(sl2_array(p, 1), p, [lie_u0(p).index])[:, 0]
    distinct = [LieElt.from_index(p, int(i)) for i in np.unique(conjugates)]
    values = {legendre(Y.b, p) for Y in distinct}
    zero_iff_lower = all((legendre(Y.b, p) == 0) == (Y.b == 0) for Y in distinct)
    return {
        "values": values,
        "zero_iff_lower_triangular": zero_iff_lower,
        "lower_triangular_conjugates": sum(1 for Y in distinct if Y.b == 0),
        "orbit_size": len(distinct),
    }


# Subgroups


@dataclass(frozen=True)
class SubgroupSet:
    """A subgroup of SL_2(Z/modulus), elements sorted lexicographically."""

    modulus: int
    elements: Tuple[ResidueMatrix, ...]

    @property
    def order(self):
        return len(self.elements)

    def array(self):
        return np.array([g.entries() for g in self.elements], dtype=np.int64)

    def __contains__(self, g):
        return g in set(self.elements)


def generate_subgroup(generators, modulus):
    """Closure of `generators` under products; the identity is always included."""
    for g in generators:
        verify_unimodular(g)
    identity = ResidueMatrix.identity(modulus)
    seen = {identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in generators:
            h = g @ s
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return SubgroupSet(modulus, tuple(sorted(seen)))


def subgroup_from_array(array, modulus):
    return SubgroupSet(
        modulus, tuple(ResidueMatrix(modulus, *map(int, row)) for row in array)
    )


def inertia_subgroup(p, r, j):
    """G_i = <[[0,1],[-1,0]]>, G_omega = <[[0,1],[-1,-1]], -I>, G_infinity = <[[1,1],[0,1]], -I>."""
    verify_odd_prime("p", p)
    verify_level("r", r)
    verify_set("j", j, INERTIA_LABELS)
    m = p**r
    minus_one = ResidueMatrix.of(m, -1, 0, 0, -1)
    if j == "i":
        generators = [ResidueMatrix.of(m, 0, 1, -1, 0)]
    elif j == "omega":
        generators = [ResidueMatrix.of(m, 0, 1, -1, -1), minus_one]
    else:
        generators = [ResidueMatrix.of(m, 1, 1, 0, 1), minus_one]
    return generate_subgroup(generators, m)


def inertia_subgroups(p, r):
    """(G_i, G_omega, G_infinity) over Z/p^r."""
    return tuple(inertia_subgroup(p, r, j) for j in INERTIA_LABELS)


def torus_subgroup(p):
    """T, the diagonal matrices of SL_2(F_p)."""
    verify_odd_prime("p", p)
    return generate_subgroup(
        [ResidueMatrix.of(p, a, 0, 0, pow(a, -1, p)) for a in range(1, p)], p
    )


def borel_subgroup(p, level):
    """P, the matrices of SL_2(Z/p^level) that are upper triangular mod p."""
    G = sl2_array(p, level)
    return subgroup_from_array(G[G[:, 2] % p == 0], p**level)


def kernel_subgroup(p, r):
    """sl_2(F_p) embedded as the kernel of SL_2(Z/p^r) -> SL_2(Z/p^(r-1))."""
    verify_level("r", r)
    return SubgroupSet(
        p**r, tuple(sorted(lie_embed(X, r) for X in all_lie_elements(p)))
    )


def projective_line_representatives(p, level):
    """The p+1 representatives of SL_2(Z/p^level)/P: [[1,0],[t,1]] and the Weyl element."""
    m = p**level
    reps = [ResidueMatrix.of(m, 1, 0, t, 1) for t in range(p)]
    reps.append(ResidueMatrix.of(m, 0, 1, -1, 0))
    return reps


def kernel_intersection(H, p):
    """The Lie elements of H intersected with the embedded sl_2(F_p)."""
    return frozenset(lie_project(h, p) for h in H.elements if is_in_kernel(h))


def conjugated_kernel_intersection(s, H, p):
    """(s H s^-1) intersected with sl_2(F_p), as Lie elements."""
    s_inv = s.inverse()
    return frozenset(
        lie_project(k, p)
        for k in (s @ h @ s_inv for h in H.elements)
        if is_in_kernel(k)
    )


def conjugated_kernel_intersection_sizes(H, p, r, S=None):
    """|s H s^-1 cap sl_2(F_p)| for every s in S (default: the whole group), vectorised."""
    m = p**r
    step = p ** (r - 1)
    S = sl2_array(p, r) if S is None else np.asarray(S, dtype=np.int64)
    Harr = H.array()
    conj = _mul(_mul(S[:, None, :], Harr[None, :, :], m), _inv(S, m)[:, None, :], m)
    in_kernel = (
        ((conj[..., 0] - 1) % step == 0)
        & (conj[..., 1] % step == 0)
        & (conj[..., 2] % step == 0)
        & ((conj[..., 3] - 1) % step == 0)
    )
    return in_kernel.sum(axis=1)


# Double cosets

# Upper bound on the rows of one batch of products in the coset sweeps.
PRODUCT_BATCH = 1 << 20


def _batches(n, width):
    """Slices of range(n) whose products with `width` rows stay within PRODUCT_BATCH."""
    step = max(1, PRODUCT_BATCH // max(1, width))
    return [slice(start, min(start + step, n)) for start in range(0, n, step)]


def double_coset_labels(H, K, p, r):
    """Label every element of SL_2(Z/p^r) by its double coset in H \\ G / K.

    Labels are numbered in order of the lexicographically first element of each coset.
    """
    G = sl2_array(p, r)
    m = p**r
    keys = _keys(G, m)
    Harr, Karr = H.array(), K.array()
    labels = np.full(len(G), -1, dtype=np.int64)
    label = 0
    start = 0
    while True:
        free = np.flatnonzero(labels[start:] < 0)
        if free.size == 0:
            break
        start += int(free[0])
        labels[start] = label
        frontier = G[start : start + 1]
        while len(frontier):
            reached = []
            for part in _batches(len(frontier), max(len(Harr), len(Karr))):
                chunk = frontier[part]
                left = _mul(Harr[:, None, :], chunk[None, :, :], m).reshape(-1, 4)
                right = _mul(chunk[:, None, :], Karr[None, :, :], m).reshape(-1, 4)
                reached.append(np.unique(_keys(np.concatenate([left, right]), m)))
            positions = np.searchsorted(keys, np.unique(np.concatenate(reached)))
            positions = positions[labels[positions] < 0]
            labels[positions] = label
            frontier = G[positions]
        label += 1
    logger.debug("H\\SL_2(Z/%d^%d)/K: %d double cosets", p, r, label)
    return labels


def double_cosets(H, K, p, r):
    """One representative (the lexicographically first element) per double coset H g K."""
    labels = double_coset_labels(H, K, p, r)
    _, first = np.unique(labels, return_index=True)
    m = p**r
    return [ResidueMatrix(m, *map(int, row)) for row in sl2_array(p, r)[np.sort(first)]]


def lift_matrix(g, p, r):
    """An element of SL_2(Z/p^r) reducing to g in SL_2(Z/p^(r-1))."""
    m = p**r
    step = p ** (r - 1)
    a, b, c, d = g.entries()
    t = ((a * d - b * c - 1) % m) // step
    if a % p:
        d = d - t * step * pow(a, -1, m)
    else:
        b = b + t * step * pow(c, -1, m)
    lifted = ResidueMatrix.of(m, a, b, c, d)
    verify_unimodular(lifted)
    return lifted


def kernel_double_cosets(K, p, r):
    """Representatives of sl_2(F_p) \\ SL_2(Z/p^r) / K, for r >= 2.

    The kernel is normal with quotient SL_2(Z/p^(r-1)), so the double cosets are the
    left cosets of K mod p^(r-1) there. Each is represented by its lexicographically
    first element, lifted back to level r.
    """
    verify_odd_prime("p", p)
    verify_level("r", r)
    m = p ** (r - 1)
    Q = sl2_array(p, r - 1)
    Kq = np.unique(K.array() % m, axis=0)
    first_keys = np.empty(len(Q), dtype=np.int64)
    for part in _batches(len(Q), len(Kq)):
        coset = _mul(Q[part][:, None, :], Kq[None, :, :], m)
        first_keys[part] = _keys(coset, m).min(axis=1)
    reps = []
    for key in np.unique(first_keys):
        rest, d = divmod(int(key), m)
        rest, c = divmod(rest, m)
        a, b = divmod(rest, m)
        reps.append(lift_matrix(ResidueMatrix(m, a, b, c, d), p, r))
    logger.debug("sl_2\\SL_2(Z/%d^%d)/K: %d double cosets", p, r, len(reps))
    return reps
