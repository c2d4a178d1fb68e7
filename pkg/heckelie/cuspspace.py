"""
The character of S = S_2(Gamma(p^r)) + its dual, restricted to sl_2(F_p).

S is never built as a space of forms. Its restriction is assembled from the virtual
decomposition C[G] - C[G/G_i] - C[G/G_omega] - C[G/G_infinity] + 2 over
G = SL_2(Z/p^r)/{+-I}, which on sl_2(F_p) becomes

    c * Reg + 2 * 1 - k * (sum of the p+1 Borel-line regular characters)

with c = (p^2-1) p^(3r-5) / 12 and k = (p-1) p^(2(r-2)) / 2.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

from heckelie.invchar import (
    CharTable,
    MAX_TABLE_PRIME,
    psi_multiplicity,
    reg_borel_char,
    regular_char,
    trivial_char,
)
from heckelie.modmat import (
    INERTIA_LABELS,
    LieElt,
    inertia_subgroup,
    kernel_double_cosets,
    legendre,
    lie_u,
    lie_v,
    projective_line_representatives,
    resolve_nonresidue,
    sl2_order,
    verify_group_size,
)
from heckelie.utils import (
    CheckResult,
    ConsistencyError,
    InvalidInputError,
    exact_quotient,
    verify_level,
    verify_odd_prime,
    verify_set,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SumSpaceChar:
    """chi_S on sl_2(F_p) together with dim S = 2 dim S_2(Gamma(p^r))."""

    p: int
    r: int
    table: CharTable
    dim: int


def _verify_pr(p, r):
    verify_odd_prime("p", p)
    verify_level("r", r)


def dim_cusp(p, r):
    """dim S_2(Gamma(p^r)) = 1 + p^(2r) (p^r - 6) (1 - p^-2) / 24."""
    _verify_pr(p, r)
    value = 1 + Fraction(p ** (2 * r) * (p**r - 6)) * (1 - Fraction(1, p * p)) / 24
    if value.denominator != 1:
        raise ConsistencyError(f"dim S_2(Gamma({p}^{r})) evaluated to {value}.")
    return value.numerator


def regular_coefficient(p, r):
    """(p^2 - 1) p^(3r-5) / 12, the multiplicity of Reg(sl_2) in chi_S."""
    _verify_pr(p, r)
    return exact_quotient((p * p - 1) * p ** (3 * r - 5), 12, "regular coefficient")


def borel_coefficient(p, r):
    """(p - 1) p^(2(r-2)) / 2, the weight of each Borel-line regular character in chi_S."""
    _verify_pr(p, r)
    return exact_quotient((p - 1) * p ** (2 * (r - 2)), 2, "Borel coefficient")


def inertia_order(p, r, j):
    """|G_i| = 4, |G_omega| = 6, |G_infinity| = 2 p^r."""
    _verify_pr(p, r)
    verify_set("j", j, INERTIA_LABELS)
    return {"i": 4, "omega": 6, "infinity": 2 * p**r}[j]


def virtual_degree(p, r):
    """Degree of C[G] - sum_j C[G/G_j] + 2 over G = SL_2(Z/p^r)/{+-I}.

    Every inertia subgroup contains -I, so |G/G_j| = |SL_2(Z/p^r)| / |G_j|.
    """
    _verify_pr(p, r)
    order = sl2_order(p, r)
    degree = order // 2 + 2
    for j in INERTIA_LABELS:
        degree -= exact_quotient(order, inertia_order(p, r, j), f"index of G_{j}")
    return degree


def regular_multiplicity(p, r):
    """Reg(sl_2) multiplicities of the pieces of the virtual decomposition.

    Returns:
    --------

        dict
            - 'group': from C[G], |G| / p^3
            - 'i', 'omega': the double coset counts of sl_2 \\ SL_2(Z/p^r) / G_j
            - 'total': 'i' + 'omega' = 5 (p^2-1) p^(3r-5) / 12
            - 'regular': 'group' - 'total', the coefficient of Reg in chi_S
    """
    c = regular_coefficient(p, r)
    counts = {"group": 6 * c, "i": 3 * c, "omega": 2 * c}
    counts["total"] = counts["i"] + counts["omega"]
    counts["regular"] = counts["group"] - counts["total"]
    return counts


def double_coset_count_check(p, r, j):
    """Compare the enumerated number of double cosets sl_2 \\ SL_2(Z/p^r) / G_j with its closed form.

    For j == 'infinity' the closed form is (p + 1) * borel_coefficient.
    """
    verify_group_size(p, r)
    counts = regular_multiplicity(p, r)
    expected = (p + 1) * borel_coefficient(p, r) if j == "infinity" else counts[j]
    found = len(kernel_double_cosets(inertia_subgroup(p, r, j), p, r))
    return CheckResult.compare(f"double_cosets(p={p}, r={r}, j={j})", found, expected)


def chi_S(p, r):
    """Build chi_S on sl_2(F_p) and check its degree against 2 * dim_cusp(p, r)."""
    _verify_pr(p, r)
    if p > MAX_TABLE_PRIME:
        raise InvalidInputError(
            f"Dense tables are built for p <= {MAX_TABLE_PRIME}, got p={p}."
        )
    verify_group_size(p, r - 1)
    c = regular_coefficient(p, r)
    k = borel_coefficient(p, r)

    reps = projective_line_representatives(p, r - 1)
    borel_total = reg_borel_char(reps[0], p)
    for s in reps[1:]:
        borel_total = borel_total + reg_borel_char(s, p)

    table = regular_char(p).scale(c) + trivial_char(p).scale(2) - borel_total.scale(k)
    table = CharTable(p, table.values, "chi_S")
    dim = 2 * dim_cusp(p, r)
    degree = table.degree.to_integer()
    if degree != dim:
        raise ConsistencyError(
            f"chi_S({p}, {r}) has degree {degree}, expected dim S = {dim}."
        )
    logger.debug("chi_S p=%d r=%d: degree %d, Reg x %d, Borel x %d", p, r, dim, c, k)
    return SumSpaceChar(p, r, table, dim)


def mult_sum_closed_form(p, r):
    """n_+ + n_- = p^(2(r-2)) (p - 1) (p^r + p^(r-1) - 6) / 12."""
    _verify_pr(p, r)
    return exact_quotient(
        p ** (2 * (r - 2)) * (p - 1) * (p**r + p ** (r - 1) - 6), 12, "n_+ + n_-"
    )


def mult_sum(p, r, chi=None):
    """n_+ + n_- as the multiplicity <chi_S, psi_u> of one constituent of chi_+."""
    chi = chi_S(p, r) if chi is None else chi
    return psi_multiplicity(chi.table, lie_u(p)).to_integer()


def mult_sum_checks(p, r, nonresidue=None, chi=None):
    """<chi_S, psi_u>, <chi_S, psi_v> and the closed form must all agree."""
    nonresidue = resolve_nonresidue(p, nonresidue)
    chi = chi_S(p, r) if chi is None else chi
    via_u = mult_sum(p, r, chi)
    via_v = psi_multiplicity(chi.table, lie_v(p, nonresidue)).to_integer()
    closed = mult_sum_closed_form(p, r)
    return [
        CheckResult.compare(f"mult_sum_u_vs_v(p={p}, r={r})", via_u, via_v),
        CheckResult.compare(f"mult_sum_closed_form(p={p}, r={r})", via_u, closed),
        CheckResult.compare(
            f"chi_S_self_dual(p={p}, r={r})", chi.table.conj() == chi.table, True
        ),
    ]


# One representative per SL_2(F_p)-orbit type of sl_2(F_p)
ORBIT_TYPES = ["zero", "u", "v", "split", "nonsplit"]


def orbit_type_representatives(p, nonresidue=None):
    """0, u, v, diag(1, -1) and [[0, 1], [nonresidue, 0]]."""
    nonresidue = resolve_nonresidue(p, nonresidue)
    return {
        "zero": LieElt.zero(p),
        "u": lie_u(p),
        "v": lie_v(p, nonresidue),
        "split": LieElt.of(p, 1, 0, 0),
        "nonsplit": LieElt.of(p, 0, 1, nonresidue),
    }


def invariant_multiplicities_closed_form(p, r):
    """Multiplicity in S of the invariant character of each orbit type.

    <Reg, psi_X> is 1 and <Reg~ of a Borel line, psi_X> is 1 exactly when X is
    orthogonal to the line, which happens for p+1, 1, 1, 2 and 0 of the p+1 lines.
    """
    c = regular_coefficient(p, r)
    k = borel_coefficient(p, r)
    return {
        "zero": c + 2 - (p + 1) * k,
        "u": c - k,
        "v": c - k,
        "split": c - 2 * k,
        "nonsplit": c,
    }


def invariant_multiplicities(p, r, chi=None, nonresidue=None):
    """<chi_S, psi_X> for X running over ORBIT_TYPES, read off the table.

    Since chi_S is invariant this is the multiplicity in S of the invariant character
    attached to the orbit of X.
    """
    chi = chi_S(p, r) if chi is None else chi
    reps = orbit_type_representatives(p, nonresidue)
    return {
        name: psi_multiplicity(chi.table, reps[name]).to_integer() for name in ORBIT_TYPES
    }


def invariant_multiplicity_check(p, r, chi=None, nonresidue=None):
    """Table multiplicities of every orbit type against the closed form.

    Every split and non-split orbit is covered: [[0, 1], [e, 0]] is split for e a
    nonzero square and non-split for e a nonresidue.
    """
    chi = chi_S(p, r) if chi is None else chi
    found = invariant_multiplicities(p, r, chi, nonresidue)
    expected = invariant_multiplicities_closed_form(p, r)
    name = f"invariant_multiplicities(p={p}, r={r})"
    for e in range(1, p):
        kind = "split" if legendre(e, p) == 1 else "nonsplit"
        value = psi_multiplicity(chi.table, LieElt(p, 0, 1, e)).to_integer()
        if value != expected[kind]:
            return CheckResult(name, "fail", f"e={e}: {value}", expected[kind])
    return CheckResult.compare(name, found, expected)
