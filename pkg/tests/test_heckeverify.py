from fractions import Fraction

from pytest import raises
from sympy import primerange

from heckelie.heckeverify import (
    VerificationReport,
    alternative_nonresidue,
    class_number_dirichlet,
    class_number_forms,
    corollary_quantities,
    cusp_differentials,
    dirichlet_sum,
    dirichlet_sum_vanishes,
    gross_identity_check,
    n_diff_fixed_point,
    n_diff_formula,
    odd_primes,
    reduced_forms,
    self_duality_check,
    solve_multiplicities,
    sweep,
    theorem_check,
    verify,
)
from heckelie.modmat import resolve_nonresidue
from heckelie.utils import CheckResult, InvalidInputError

PRIMES_3_MOD_4 = [p for p in primerange(7, 500) if p % 4 == 3]


def test_class_number_forms():
    assert reduced_forms(7) == [(1, 1, 2)]
    assert reduced_forms(23) == [(1, 1, 6), (2, -1, 3), (2, 1, 3)]
    assert class_number_forms(3) == 1
    assert class_number_forms(7) == 1
    assert class_number_forms(23) == 3
    assert class_number_forms(47) == 5
    assert class_number_forms(163) == 1
    with raises(InvalidInputError):
        class_number_forms(13)
    with raises(InvalidInputError):
        class_number_forms(15)


def test_class_number_dirichlet():
    assert dirichlet_sum(7) == -7
    assert dirichlet_sum(23) == -69
    assert class_number_dirichlet(7) == 1
    assert class_number_dirichlet(23) == 3
    for p in PRIMES_3_MOD_4:
        h = class_number_forms(p)
        assert class_number_dirichlet(p) == h
        assert h % 2 == 1

    assert dirichlet_sum_vanishes(13).passed
    with raises(InvalidInputError):
        class_number_dirichlet(3)
    with raises(InvalidInputError):
        dirichlet_sum_vanishes(7)


def test_n_diff_formula():
    assert n_diff_formula(7, 2) == 7
    assert n_diff_formula(5, 2) == 0
    assert n_diff_formula(3, 2) == 1
    assert n_diff_formula(11, 3) == 1331

    for p in [7, 11, 19, 23, 31]:
        h = class_number_forms(p)
        for r in [2, 3]:
            assert n_diff_formula(p, r) == p ** (2 * r - 3) * h
    for p in [5, 13, 17, 29]:
        for r in [2, 3]:
            assert n_diff_formula(p, r) == 0
    for r in [2, 3, 4]:
        assert n_diff_formula(3, r) == 3 ** (2 * r - 4)

    # The level only enters through p^(2(r-2))
    assert n_diff_formula(7, 3) == 49 * n_diff_formula(7, 2)


def test_nonresidue_invariance():
    for p in [7, 11, 23]:
        other = alternative_nonresidue(p, resolve_nonresidue(p))
        assert other != resolve_nonresidue(p)
        for r in [2, 3]:
            assert n_diff_formula(p, r, other) == n_diff_formula(p, r)
            assert theorem_check(p, r, other).passed
    assert alternative_nonresidue(3, 2) is None
    assert alternative_nonresidue(7, 3) == 5
    with raises(InvalidInputError):
        n_diff_formula(7, 2, nonresidue=4)


def test_fixed_point():
    assert cusp_differentials(7, "+") == [1, 4, 2, 2, 4, 1]
    assert cusp_differentials(7, "-") == [3, 5, 6, 6, 5, 3]
    for p, r in [(3, 2), (5, 2), (7, 2), (7, 3), (23, 2)]:
        assert n_diff_fixed_point(p, r) == n_diff_formula(p, r)
    assert n_diff_fixed_point(11, 2, nonresidue=6) == 11
    with raises(InvalidInputError):
        cusp_differentials(7, "0")


def test_theorem_check():
    for p, r in [(7, 2), (13, 2), (3, 3), (11, 3)]:
        result = theorem_check(p, r)
        assert result.passed, result
    assert theorem_check(7, 2).lhs == "7"
    assert theorem_check(3, 3).rhs == "9"


def test_gross_identity():
    for p in [q for q in PRIMES_3_MOD_4 if q <= 199]:
        result = gross_identity_check(p)
        assert result.passed, result
    assert gross_identity_check(7).lhs == str((Fraction(3), Fraction(1)))
    with raises(InvalidInputError):
        gross_identity_check(5)
    with raises(InvalidInputError):
        gross_identity_check(3)


def test_corollary_quantities():
    assert corollary_quantities(7, 2)[0] == 7
    assert corollary_quantities(23, 2)[0] == 69
    assert corollary_quantities(7, 3)[0] == 49
    for p in [7, 11, 23]:
        for r in [2, 3]:
            difference, obstruction = corollary_quantities(p, r)
            assert difference == p ** (r - 1) * class_number_forms(p)
            assert obstruction.passed
    with raises(InvalidInputError):
        corollary_quantities(13, 2)


def test_solve_multiplicities():
    assert solve_multiplicities(7, 2) == (16, 9)
    assert solve_multiplicities(5, 2) == (4, 4)
    assert solve_multiplicities(3, 2) == (1, 0)
    assert solve_multiplicities(11, 2) == (58, 47)
    assert solve_multiplicities(23, 2, n_diff=69) == (535, 466)
    assert solve_multiplicities(23, 2, n_diff=69) == solve_multiplicities(23, 2)
    for p in primerange(3, 32):
        for r in [2, 3]:
            n_plus, n_minus = solve_multiplicities(p, r)
            assert n_plus >= 0 and n_minus >= 0



def test_self_duality():
    for p, r in [(5, 2), (5, 3), (13, 2)]:
        result = self_duality_check(p, r)
        assert result.passed, result
    assert self_duality_check(5, 2, nonresidue=3).passed
    with raises(InvalidInputError):
        self_duality_check(7, 2)
    with raises(InvalidInputError):
        self_duality_check(3, 2)


def test_verification_report():
    report = VerificationReport(7, 2, h=1, n_diff=7)
    report.checks.append(CheckResult.compare("a", 1, 1))
    report.checks.append(CheckResult.skipped("b", "large"))
    assert report.passed
    assert report.count("skipped") == 1
    data = report.as_dict()
    assert data["p"] == "7"
    assert data["n_sum"] is None
    assert data["checks"][1]["status"] == "skipped"

    report.checks.append(CheckResult.compare("c", 1, 2))
    assert not report.passed


def test_verify():
    report = verify(7, 2)
    assert report.passed
    assert (report.h, report.n_diff, report.n_sum) == (1, 7, 25)
    assert (report.n_plus, report.n_minus) == (16, 9)
    assert report.invariant_multiplicities == {
        "zero": 6,
        "u": 25,
        "v": 25,
        "split": 22,
        "nonsplit": 28,
    }
    assert not any(c.name.startswith("self_duality") for c in report.checks)
    assert report.count("fail") == 0
    assert report.count("skipped") > 0

    report = verify(5, 2)
    assert report.passed
    assert report.h is None
    assert report.n_diff == 0
    assert report.count("skipped") == 0
    assert report.invariant_multiplicities["nonsplit"] == 10
    duality = [c for c in report.checks if c.name.startswith("self_duality")]
    assert len(duality) == 1 and duality[0].passed
    names = [c.name for c in report.checks]
    assert "invariant_multiplicities(p=5, r=2)" in names

    report = verify(3, 2, deep=True)
    assert report.passed
    assert report.count("skipped") == 1

    report = verify(13, 2)
    assert report.passed
    assert all(c.status == "skipped" for c in report.checks if "mackey" in c.name)

    with raises(InvalidInputError):
        verify(9, 2)
    with raises(InvalidInputError):
        verify(7, 1)


def test_sweep():
    reports = list(sweep([7, 3, 5], [3, 2]))
    assert [(r.p, r.r) for r in reports] == [
        (3, 2),
        (3, 3),
        (5, 2),
        (5, 3),
        (7, 2),
        (7, 3),
    ]
    assert all(r.passed for r in reports)
    assert odd_primes(11) == [3, 5, 7, 11]
