"""
Class numbers h(-p), the multiplicity difference n_+ - n_- and the checks that tie
them together.

n_+ - n_- is evaluated from the cusp contributions of a holomorphic fixed point
formula: with sqrt_star = sum_h zeta^(h^2),

    n_+ - n_- = -(p^(2(r-2)) sqrt_star / 2) (-p + 1 + 2 sum_{a != 0} 1 / (1 - zeta^(a^2)))

and for p > 3, p = 3 mod 4 this must equal p^(2r-3) h(-p).
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from sympy import primerange

from heckelie.cuspspace import (
    chi_S,
    dim_cusp,
    double_coset_count_check,
    invariant_multiplicities_closed_form,
    invariant_multiplicity_check,
    mult_sum_checks,
    mult_sum_closed_form,
    virtual_degree,
)
from heckelie.exactnum import (
    decompose_quadratic,
    inv_one_minus_zeta,
    inv_sum,
    sqrt_star,
)
from heckelie.invchar import (
    MAX_TABLE_PRIME,
    check_gauss_collapse,
    chi_invariant,
    mackey_check,
    psi_multiplicity,
)
from heckelie.modmat import (
    INERTIA_LABELS,
    MAX_GROUP_ORDER,
    legendre,
    lie_u,
    lie_v,
    resolve_nonresidue,
    sl2_order,
)
from heckelie.utils import (
    CheckResult,
    ConsistencyError,
    GroupTooLargeError,
    InvalidInputError,
    NotInSubfieldError,
    exact_quotient,
    verify_level,
    verify_odd_prime,
    verify_set,
)

logger = logging.getLogger(__name__)

SIGNS = ["+", "-"]

# Limits for table-level checks unless a deep run is requested.
DEFAULT_GROUP_LIMIT = 20_000
DEFAULT_TABLE_PRIME = 11


@dataclass
class VerificationReport:
    """Everything computed for one (p, r), plus the individual check outcomes."""

    p: int
    r: int
    h: Optional[int] = None
    n_diff: Optional[int] = None
    n_sum: Optional[int] = None
    n_plus: Optional[int] = None
    n_minus: Optional[int] = None
    invariant_multiplicities: Optional[Dict[str, int]] = None
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self):
        return all(c.status != "fail" for c in self.checks)

    def count(self, status):
        return sum(1 for c in self.checks if c.status == status)

    def as_dict(self):
        """JSON-ready dict; numbers are decimal strings, missing values are None."""

        def text(value):
            return None if value is None else str(value)

        return {
            "p": str(self.p),
            "r": str(self.r),
            "h": text(self.h),
            "n_diff": text(self.n_diff),
            "n_sum": text(self.n_sum),
            "n_plus": text(self.n_plus),
            "n_minus": text(self.n_minus),
            "invariant_multiplicities": None
            if self.invariant_multiplicities is None
            else {k: str(v) for k, v in self.invariant_multiplicities.items()},
            "checks": [c.as_dict() for c in self.checks],
        }


# Class numbers


def _verify_three_mod_four(p):
    verify_odd_prime("p", p)
    if p % 4 != 3:
        raise InvalidInputError(
            f"-{p} is not a fundamental discriminant: p={p} is not 3 mod 4."
        )


def reduced_forms(p):
    """Reduced forms (a, b, c) of discriminant -p: |b| <= a <= c, b >= 0 if |b| == a or a == c."""
    _verify_three_mod_four(p)
    forms = []
    a = 1
    while 3 * a * a <= p:
        for b in range(-a + 1, a + 1):
            numerator = b * b + p
            if numerator % (4 * a):
                continue
            c = numerator // (4 * a)
            if c < a or (b < 0 and a == c):
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def class_number_forms(p):
    """h(-p) as the number of reduced binary quadratic forms of discriminant -p."""
    return len(reduced_forms(p))


def dirichlet_sum(p):
    """sum_{k=1}^{p-1} k (k/p)."""
    verify_odd_prime("p", p)
    return sum(k * legendre(k, p) for k in range(1, p))


def class_number_dirichlet(p):
    """h(-p) = -dirichlet_sum(p) / p, for p > 3 and p = 3 mod 4.

    For p = 1 mod 4 there is no class number to return; dirichlet_sum_vanishes gives
    the corresponding check that the sum is 0.
    """
    _verify_three_mod_four(p)
    if p == 3:
        raise InvalidInputError("h(-3) carries the extra unit weight; use p > 3.")
    return exact_quotient(-dirichlet_sum(p), p, f"Dirichlet class number for p={p}")


def dirichlet_sum_vanishes(p):
    """For p = 1 mod 4 the Dirichlet sum is 0."""
    verify_odd_prime("p", p)
    if p % 4 != 1:
        raise InvalidInputError(f"p={p} is not 1 mod 4.")
    return CheckResult.compare(f"dirichlet_sum_zero(p={p})", dirichlet_sum(p), 0)


# n_+ - n_-


def _prefactor(p, r):
    """-p^(2(r-2)) sqrt_star / 2."""
    return sqrt_star(p) * Fraction(-(p ** (2 * (r - 2))), 2)


def n_diff_formula(p, r, nonresidue=None):
    """n_+ - n_- from the twisted sums of 1/(1 - zeta^e), evaluated exactly.

    The intermediate identities relating the residue, nonresidue and untwisted sums
    are checked on the way; any failure raises ConsistencyError.
    """
    verify_odd_prime("p", p)
    verify_level("r", r)
    nonresidue = resolve_nonresidue(p, nonresidue)
    residue_sum = inv_sum(p, "residue", nonresidue)
    nonresidue_sum = inv_sum(p, "nonresidue", nonresidue)
    full_sum = inv_sum(p, "all", nonresidue)

    if full_sum * 2 != p - 1 or residue_sum + nonresidue_sum != full_sum * 2:
        raise ConsistencyError(
            f"Twisted sums for p={p} are inconsistent: residue {residue_sum}, "
            f"nonresidue {nonresidue_sum}, all {full_sum}."
        )
    twist_difference = residue_sum - nonresidue_sum
    substituted = residue_sum * 2 + (1 - p)
    if twist_difference != substituted:
        raise ConsistencyError(
            f"Residue minus nonresidue sum {twist_difference} differs from {substituted}."
        )
    value = _prefactor(p, r) * substituted
    logger.debug("n_diff_formula p=%d r=%d nonresidue=%d: %s", p, r, nonresidue, value)
    return value.to_integer()


def cusp_differentials(p, sign, nonresidue=None):
    """Exponents e with du' = zeta^e at the cusps fixed by the two regular nilpotents.

    a^2 for sign '+', nonresidue * a^2 for sign '-', a in F_p \\ {0}.
    """
    verify_odd_prime("p", p)
    verify_set("sign", sign, SIGNS)
    nonresidue = resolve_nonresidue(p, nonresidue)
    twist = 1 if sign == "+" else nonresidue
    return [(twist * a * a) % p for a in range(1, p)]


def n_diff_fixed_point(p, r, nonresidue=None):
    """n_+ - n_- summed cusp by cusp from the differentials, without the residue substitution."""
    verify_level("r", r)
    total = sqrt_star(p) * 0
    for sign, weight in (("+", 1), ("-", -1)):
        for e in cusp_differentials(p, sign, nonresidue):
            total = total + inv_one_minus_zeta(p, e) * weight
    return (_prefactor(p, r) * total).to_integer()


def theorem_check(p, r, nonresidue=None):
    """n_+ - n_- against p^(2r-3) h(-p) (p = 3 mod 4, p > 3), 0 (p = 1 mod 4) or 3^(2r-4) (p = 3)."""
    verify_odd_prime("p", p)
    verify_level("r", r)
    name = f"theorem(p={p}, r={r})"
    if p == 3:
        expected = 3 ** (2 * r - 4)
    elif p % 4 == 1:
        expected = 0
    else:
        expected = p ** (2 * r - 3) * class_number_forms(p)
    try:
        found = n_diff_formula(p, r, nonresidue)
    except ConsistencyError as error:
        return CheckResult(name, "fail", str(error), expected)
    return CheckResult.compare(name, found, expected)


def gross_identity_check(p):
    """sum_{a != 0} 1/(1 - zeta^(a^2)) == (p-1)/2 + h(-p) sqrt(-p) for p > 3, p = 3 mod 4."""
    _verify_three_mod_four(p)
    if p == 3:
        raise InvalidInputError("The identity is stated for p > 3.")
    expected = (Fraction(p - 1, 2), Fraction(class_number_forms(p)))
    name = f"gross_identity(p={p})"
    try:
        found = decompose_quadratic(inv_sum(p, "residue"))
    except NotInSubfieldError as error:
        return CheckResult(name, "fail", str(error), expected)
    return CheckResult.compare(name, tuple(found), expected)


def corollary_quantities(p, r, nonresidue=None):
    """(n_+ - n_-) / p^(r-2) and the parity obstruction to a uniform split over U.

    Returns:
    --------

        Tuple(int, CheckResult)
            The group level difference p^(r-1) h(-p), and a check that h is odd, so
            that p^(r-1) h / |U| with |U| = 2 p^(r-1) is not an integer.
    """
    _verify_three_mod_four(p)
    if p == 3:
        raise InvalidInputError("The corollary is stated for p > 3.")
    verify_level("r", r)
    difference = exact_quotient(
        n_diff_formula(p, r, nonresidue), p ** (r - 2), "group level difference"
    )
    h = class_number_forms(p)
    uniform_share = Fraction(difference, 2 * p ** (r - 1))
    obstruction = CheckResult(
        f"parity_obstruction(p={p}, r={r})",
        "pass" if h % 2 == 1 and uniform_share.denominator != 1 else "fail",
        f"h={h}, share={uniform_share}",
        "h odd, share not an integer",
    )
    return difference, obstruction


def solve_multiplicities(p, r, nonresidue=None, n_diff=None):
    """(n_+, n_-) = ((n_sum + n_diff) / 2, (n_sum - n_diff) / 2), both nonnegative integers.

    `n_diff` is evaluated with n_diff_formula unless given.
    """
    n_sum = mult_sum_closed_form(p, r)
    if n_diff is None:
        n_diff = n_diff_formula(p, r, nonresidue)
    n_plus = exact_quotient(n_sum + n_diff, 2, "n_+")
    n_minus = exact_quotient(n_sum - n_diff, 2, "n_-")
    if n_plus < 0 or n_minus < 0:
        raise ConsistencyError(
            f"Negative multiplicities ({n_plus}, {n_minus}) at p={p}, r={r}."
        )
    return n_plus, n_minus


def self_duality_check(p, r, chi=None, nonresidue=None):
    """For p = 1 mod 4, n_+ = n_- read off chi_S without any cyclotomic sums.

    chi_+ and chi_- are self-dual, so each occurs in S = S_2 + dual with twice its
    multiplicity in S_2(Gamma(p^r)). chi_S gives them the same multiplicity.
    """
    verify_odd_prime("p", p)
    if p % 4 != 1:
        raise InvalidInputError(f"p={p} is not 1 mod 4.")
    nonresidue = resolve_nonresidue(p, nonresidue)
    chi = chi_S(p, r) if chi is None else chi
    self_dual = all(
        chi_invariant(p, sign, nonresidue).conj() == chi_invariant(p, sign, nonresidue)
        for sign in SIGNS
    )
    n_plus = Fraction(psi_multiplicity(chi.table, lie_u(p)).to_integer(), 2)
    n_minus = Fraction(psi_multiplicity(chi.table, lie_v(p, nonresidue)).to_integer(), 2)
    passed = (
        self_dual
        and n_plus == n_minus
        and n_plus == solve_multiplicities(p, r, nonresidue)[0]
        and n_diff_formula(p, r, nonresidue) == 0
    )
    return CheckResult(
        f"self_duality(p={p}, r={r})",
        "pass" if passed else "fail",
        f"self-dual={self_dual}, n_+={n_plus}, n_-={n_minus}",
        "self-dual, n_+ = n_- = n_sum / 2",
    )


def alternative_nonresidue(p, nonresidue):
    """The smallest nonresidue mod p other than `nonresidue`, or None when there is none (p = 3)."""
    return next((x for x in range(2, p) if x != nonresidue and legendre(x, p) == -1), None)


# Reports


def _formula_checks(report, nonresidue):
    p, r = report.p, report.r
    checks = report.checks
    checks.append(theorem_check(p, r, nonresidue))
    checks.append(
        CheckResult.compare(
            f"fixed_point_vs_formula(p={p}, r={r})",
            n_diff_fixed_point(p, r, nonresidue),
            report.n_diff,
        )
    )
    other = alternative_nonresidue(p, nonresidue)
    if other is None:
        checks.append(CheckResult.skipped(f"nonresidue_invariance(p={p})", "single nonresidue"))
    else:
        checks.append(
            CheckResult.compare(
                f"nonresidue_invariance(p={p}, r={r}, nonresidue={other})",
                n_diff_formula(p, r, other),
                report.n_diff,
            )
        )

    if p % 4 == 1:
        checks.append(dirichlet_sum_vanishes(p))
    elif p > 3:
        checks.append(gross_identity_check(p))
        checks.append(
            CheckResult.compare(
                f"class_number_methods(p={p})", class_number_dirichlet(p), report.h
            )
        )
        difference, obstruction = corollary_quantities(p, r, nonresidue)
        checks.append(
            CheckResult.compare(
                f"corollary(p={p}, r={r})", difference, p ** (r - 1) * report.h
            )
        )
        checks.append(obstruction)

    checks.append(
        CheckResult.compare(
            f"mult_sum_parity(p={p}, r={r})", report.n_sum % 2 == 1, p % 4 == 3
        )
    )
    checks.append(
        CheckResult.compare(
            f"virtual_degree(p={p}, r={r})", virtual_degree(p, r), 2 * dim_cusp(p, r)
        )
    )


def _table_checks(report, nonresidue, group_limit, table_prime):
    p, r = report.p, report.r
    checks = report.checks
    if p > table_prime:
        reason = f"p={p} above the table limit {table_prime}"
        logger.info("skipping table-level checks: %s", reason)
        checks.append(CheckResult.skipped(f"gauss_collapse(p={p})", reason))
        checks.append(CheckResult.skipped(f"mult_sum_tables(p={p}, r={r})", reason))
        checks.append(
            CheckResult.skipped(f"invariant_multiplicities(p={p}, r={r})", reason)
        )
    else:
        checks.append(check_gauss_collapse(p, nonresidue))
        try:
            chi = chi_S(p, r)
        except GroupTooLargeError as error:
            logger.info("skipping chi_S: %s", error)
            checks.append(CheckResult.skipped(f"mult_sum_tables(p={p}, r={r})", str(error)))
            checks.append(
                CheckResult.skipped(f"invariant_multiplicities(p={p}, r={r})", str(error))
            )
        else:
            checks.extend(mult_sum_checks(p, r, nonresidue, chi=chi))
            checks.append(invariant_multiplicity_check(p, r, chi, nonresidue))
            if p % 4 == 1:
                checks.append(self_duality_check(p, r, chi, nonresidue))

    order = sl2_order(p, r)
    if order > group_limit or p > table_prime:
        reason = f"|SL_2(Z/{p}^{r})| = {order} above the limit {group_limit}"
        logger.info("skipping group enumeration checks: %s", reason)
        for j in INERTIA_LABELS:
            checks.append(CheckResult.skipped(f"mackey(p={p}, r={r}, j={j})", reason))
            checks.append(CheckResult.skipped(f"double_cosets(p={p}, r={r}, j={j})", reason))
        return
    for j in INERTIA_LABELS:
        checks.append(mackey_check(p, r, j))
        checks.append(double_coset_count_check(p, r, j))


def verify(p, r, deep=False, nonresidue=None):
    """Run every check for one (p, r).

    Arguments:
    ----------

        p, r: int
            Odd prime and level r >= 2.

        deep: bool
            Raise the limits for checks that build character tables and enumerate
            SL_2(Z/p^r) from DEFAULT_TABLE_PRIME and DEFAULT_GROUP_LIMIT to
            MAX_TABLE_PRIME and MAX_GROUP_ORDER. Checks above the limits are skipped.

        nonresidue: int
            Override of the fixed quadratic nonresidue.

    Returns:
    --------

        VerificationReport
    """
    verify_odd_prime("p", p)
    verify_level("r", r)
    nonresidue = resolve_nonresidue(p, nonresidue)
    report = VerificationReport(p, r)
    if p % 4 == 3:
        report.h = class_number_forms(p)
    report.n_sum = mult_sum_closed_form(p, r)
    report.invariant_multiplicities = invariant_multiplicities_closed_form(p, r)
    try:
        report.n_diff = n_diff_formula(p, r, nonresidue)
    except ConsistencyError as error:
        report.checks.append(
            CheckResult(f"n_diff_formula(p={p}, r={r})", "fail", str(error), "")
        )
        return report
    try:
        report.n_plus, report.n_minus = solve_multiplicities(
            p, r, nonresidue, n_diff=report.n_diff
        )
        report.checks.append(
            CheckResult(
                f"solve_multiplicities(p={p}, r={r})",
                "pass",
                (report.n_plus, report.n_minus),
                "nonnegative integers",
            )
        )
    except ConsistencyError as error:
        report.checks.append(
            CheckResult(f"solve_multiplicities(p={p}, r={r})", "fail", str(error), "")
        )

    _formula_checks(report, nonresidue)
    if deep:
        _table_checks(report, nonresidue, MAX_GROUP_ORDER, MAX_TABLE_PRIME)
    else:
        _table_checks(report, nonresidue, DEFAULT_GROUP_LIMIT, DEFAULT_TABLE_PRIME)
    logger.debug(
        "verified p=%d r=%d: %d pass, %d fail, %d skipped",
        p,
        r,
        report.count("pass"),
        report.count("fail"),
        report.count("skipped"),
    )
    return report


def odd_primes(p_max, p_min=3):
    return [int(q) for q in primerange(max(p_min, 3), p_max + 1)]


def sweep(primes, levels, **kwargs):
    """VerificationReports for every (p, r), in (p, r) order."""
    for p in sorted(primes):
        for r in sorted(levels):
            logger.info("verifying p=%d r=%d", p, r)
            yield verify(p, r, **kwargs)
