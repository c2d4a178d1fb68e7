"""
Exact character tables on the additive group sl_2(F_p).

A table holds one CycloNum per Lie element, indexed by LieElt.index. Sums of
psi-characters are assembled from exponent histograms (how many summands take the
value zeta^k at each point) so values only widen to general CycloNums once.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Tuple

import numpy as np

from heckelie.exactnum import CycloNum, sqrt_star
from heckelie.modmat import (
    _batches,
    conjugate_lie_indices,
    conjugated_kernel_intersection,
    inertia_subgroup,
    kernel_double_cosets,
    kernel_intersection,
    legendre,
    lie_orbit,
    lie_u,
    lie_v,
    LieElt,
    resolve_nonresidue,
    sl2_array,
    sl2_generators,
    torus_subgroup,
)
from heckelie.utils import (
    CheckResult,
    InvalidInputError,
    verify_level,
    verify_odd_prime,
    verify_set,
)

logger = logging.getLogger(__name__)

# Dense tables have p^3 entries; beyond this prime they are not built by default.
MAX_TABLE_PRIME = 31

SIGNS = ["+", "-"]


@dataclass(frozen=True)
class CharTable:
    """A class function on sl_2(F_p), one CycloNum per canonical Lie index."""

    prime: int
    values: Tuple[CycloNum, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.values) != self.prime**3:
            raise InvalidInputError(
                f"A table for p={self.prime} needs {self.prime ** 3} values, got {len(self.values)}."
            )

    @property
    def degree(self):
        return self.values[0]

    def value(self, X):
        return self.values[X.index]

    def _check(self, other):
        if self.prime != other.prime:
            raise InvalidInputError(
                f"Tables over sl_2(F_{self.prime}) and sl_2(F_{other.prime}) cannot be combined."
            )

    def __add__(self, other):
        self._check(other)
        return CharTable(
            self.prime,
            tuple(a + b for a, b in zip(self.values, other.values)),
            f"({self.label} + {other.label})",
        )

    def __sub__(self, other):
        self._check(other)
        return CharTable(
            self.prime,
            tuple(a - b for a, b in zip(self.values, other.values)),
            f"({self.label} - {other.label})",
        )

    def scale(self, factor):
        factor = Fraction(factor)
        return CharTable(
            self.prime, tuple(v * factor for v in self.values), f"{factor}*{self.label}"
        )

    def conj(self):
        return CharTable(
            self.prime, tuple(v.conj() for v in self.values), f"conj({self.label})"
        )

    def is_rational(self):
        return all(v.is_rational() for v in self.values)


def _lie_index_arrays(p):
    idx = np.arange(p**3, dtype=np.int64)
    a, rest = np.divmod(idx, p * p)
    b, c = np.divmod(rest, p)
    return a, b, c


def _trace_pairing_matrix(p, ys):
    """Tr(y X) mod p for y in `ys` (rows) and every X in sl_2(F_p) (columns)."""
    ys = np.asarray(ys, dtype=np.int64)
    ya, rest = np.divmod(ys, p * p)
    yb, yc = np.divmod(rest, p)
    xa, xb, xc = _lie_index_arrays(p)
    return (
        2 * ya[:, None] * xa[None, :] + yb[:, None] * xc[None, :] + yc[:, None] * xb[None, :]
    ) % p


def psi_sum_table(p, ys, weight=1, label=""):
    """weight * sum over y in `ys` of psi(Tr(y * -)), assembled from exponent histograms."""
    pairing = _trace_pairing_matrix(p, ys)
    histogram = np.stack([(pairing == k).sum(axis=0) for k in range(p)], axis=1)
    weight = Fraction(weight)
    values = tuple(
        CycloNum.from_exponent_counts(p, [int(n) * weight for n in row]) for row in histogram
    )
    return CharTable(p, values, label)


def table_from_rationals(p, values, label=""):
    return CharTable(p, tuple(CycloNum.from_rational(p, v) for v in values), label)


def trivial_char(p):
    verify_odd_prime("p", p)
    return table_from_rationals(p, [1] * p**3, "1")


def regular_char(p):
    """Reg(sl_2(F_p)): p^3 at 0 and 0 elsewhere."""
    verify_odd_prime("p", p)
    return table_from_rationals(p, [p**3] + [0] * (p**3 - 1), "Reg")


def psi_trace_char(y):
    """X -> zeta_p^Tr(y X)."""
    return psi_sum_table(y.prime, [y.index], label=f"psi[{y.a},{y.b},{y.c}]")


def _orbit_representative(p, sign, nonresidue):
    verify_set("sign", sign, SIGNS)
    return lie_u(p) if sign == "+" else lie_v(p, nonresidue)


def chi_invariant(p, sign, nonresidue=None):
    """chi_+ (resp. chi_-): the sum of psi-characters over the orbit of u (resp. v)."""
    verify_odd_prime("p", p)
    X = _orbit_representative(p, sign, nonresidue)
    orbit = sorted(lie_orbit(X))
    return psi_sum_table(p, [Y.index for Y in orbit], label=f"chi{sign}")


def n_normalized(p, sign, nonresidue=None):
    """N_+ (resp. N_-): half the sum of psi-characters over the torus conjugates of u (resp. v)."""
    verify_odd_prime("p", p)
    X = _orbit_representative(p, sign, nonresidue)
    torus = np.array([s.entries() for s in torus_subgroup(p).elements], dtype=np.int64)
    ys = conjugate_lie_indices(torus, p, [X.index])[:, 0]
    return psi_sum_table(p, ys, weight=Fraction(1, 2), label=f"N{sign}")


def inner_product(alpha, beta):
    """(1/p^3) sum_X alpha(X) conj(beta(X))."""
    alpha._check(beta)
    p = alpha.prime
    total = CycloNum.from_rational(p, 0)
    for a, b in zip(alpha.values, beta.values):
        if a.is_zero() or b.is_zero():
            continue
        total = total + a * b.conj()
    return total / p**3


def psi_multiplicity(table, y):
    """<table, psi_y>. Rational tables are summed by exponent class instead of term by term."""
    if not table.is_rational():
        return inner_product(table, psi_trace_char(y))
    p = table.prime
    exponents = _trace_pairing_matrix(p, [y.index])[0]
    buckets = [Fraction(0)] * p
    for value, k in zip(table.values, exponents):
        buckets[(-int(k)) % p] += value.coeffs[0]
    return CycloNum.from_exponent_counts(p, buckets) / p**3


def is_invariant(table, p=None):
    """Whether the table is constant on SL_2 conjugation orbits (checked on generators)."""
    p = table.prime if p is None else p
    generators = np.array([g.entries() for g in sl2_generators(p, 1)], dtype=np.int64)
    permutations = conjugate_lie_indices(generators, p, np.arange(p**3))
    values = table.values
    return all(
        all(values[int(j)] == values[i] for i, j in enumerate(perm)) for perm in permutations
    )


def psi_sum_is_regular(p):
    """Whether sum over all y of psi_y equals Reg(sl_2(F_p))."""
    return psi_sum_table(p, np.arange(p**3), label="sum psi") == regular_char(p)


def check_gauss_collapse(p, nonresidue=None):
    """(N_+ - N_-)(g) == legendre(b(g), p) * sqrt_star(p) for every g in sl_2(F_p).

    Returns:
    --------

        CheckResult
            Passes when all p^3 elements satisfy the identity; on failure the
            left-hand side names the first counterexample.
    """
    verify_odd_prime("p", p)
    nonresidue = resolve_nonresidue(p, nonresidue)
    difference = n_normalized(p, "+", nonresidue) - n_normalized(p, "-", nonresidue)
    root = sqrt_star(p)
    expected = {s: root * s for s in (-1, 0, 1)}
    name = f"gauss_collapse(p={p})"
    for index, value in enumerate(difference.values):
        X = LieElt.from_index(p, index)
        if value != expected[legendre(X.b, p)]:
            return CheckResult(name, "fail", f"{X}: {value}", expected[legendre(X.b, p)])
    return CheckResult(name, "pass", f"{p ** 3} elements", "legendre(b) * sqrt_star")


def borel_line(s, p):
    """The Lie elements s [[0, m], [0, 0]] s^-1, m in F_p (only s mod p matters)."""
    s_p = np.array([[e % p for e in s.entries()]], dtype=np.int64)
    line = [LieElt(p, 0, m, 0).index for m in range(p)]
    return sorted(int(i) for i in conjugate_lie_indices(s_p, p, line)[0])


def reg_borel_char(s, p):
    """The trivially extended regular character of the line s b s^-1: p^2 on it, 0 elsewhere."""
    values = [0] * p**3
    for index in borel_line(s, p):
        values[index] = p * p
    return table_from_rationals(p, values, "Reg~")


def induced_from_subgroup(K, p, r):
    """Res to sl_2(F_p) of Ind_K^SL_2(Z/p^r) 1, by the induced-character formula.

    The value at X is (1/|K|) #{g in SL_2(Z/p^r) : g embed(X) g^-1 in K}. Conjugates
    of embed(X) stay in the kernel and only depend on g mod p, so the count is
    p^(3(r-1)) times the number of h in SL_2(F_p) with h X h^-1 in K cap sl_2(F_p).
    """
    verify_level("r", r)
    G1 = sl2_array(p, 1)
    inside = np.array(sorted(X.index for X in kernel_intersection(K, p)), dtype=np.int64)
    hits = np.empty(p**3, dtype=np.int64)
    for part in _batches(p**3, len(G1)):
        conjugates = conjugate_lie_indices(G1, p, np.arange(p**3)[part])
        hits[part] = np.isin(conjugates, inside).sum(axis=0)
    scale = p ** (3 * (r - 1))
    values = [Fraction(int(n) * scale, K.order) for n in hits]
    return table_from_rationals(p, values, f"Ind[{K.order}]")


def mackey_sum(K, p, r):
    """Sum over s in sl_2 \\ SL_2(Z/p^r) / K of Ind from sl_2 cap sKs^-1 to sl_2 of 1.

    Returns:
    --------

        Tuple(CharTable, list)
            The table and the double coset representatives used.
    """
    reps = kernel_double_cosets(K, p, r)
    totals = [Fraction(0)] * p**3
    for s in reps:
        intersection = conjugated_kernel_intersection(s, K, p)
        weight = Fraction(p**3, len(intersection))
        for X in intersection:
            totals[X.index] += weight
    return table_from_rationals(p, totals, "Mackey"), reps


def mackey_check(p, r, j):
    """Compute Res Ind_{G_j} 1 directly and through double cosets, and compare.

    For j in ('i', 'omega') both must also equal (number of double cosets) * Reg; for
    j == 'infinity' they must equal the sum of reg_borel_char over the representatives.
    """
    verify_odd_prime("p", p)
    K = inertia_subgroup(p, r, j)
    direct = induced_from_subgroup(K, p, r)
    via_cosets, reps = mackey_sum(K, p, r)
    if j == "infinity":
        shape = reg_borel_char(reps[0], p)
        for s in reps[1:]:
            shape = shape + reg_borel_char(s, p)
    else:
        shape = regular_char(p).scale(len(reps))
    passed = direct == via_cosets == shape
    logger.debug("mackey p=%d r=%d j=%s: %d double cosets, %s", p, r, j, len(reps), passed)
    return CheckResult(
        f"mackey(p={p}, r={r}, j={j})",
        "pass" if passed else "fail",
        f"direct degree {direct.degree}, {len(reps)} double cosets",
        f"Mackey degree {via_cosets.degree}",
    )
