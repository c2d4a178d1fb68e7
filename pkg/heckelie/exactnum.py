"""
Exact arithmetic in Q and in the cyclotomic field Q(zeta_p).

Elements of Q(zeta_p) are stored in the power basis 1, zeta, ..., zeta^(p-2) with
rational coefficients. zeta is purely symbolic: the only relation used is
zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)), so no floating point appears anywhere.
The square root of (-1)^((p-1)/2) * p is *defined* as the Gauss sum
sum_h zeta^(h^2), which fixes every sign convention exactly.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from math import lcm

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from heckelie.modmat import fixed_nonresidue, legendre, verify_nonresidue
from heckelie.utils import (
    ConsistencyError,
    InvalidInputError,
    NotInSubfieldError,
    verify_odd_prime,
    verify_set,
)

logger = logging.getLogger(__name__)

ARITH_OPS = ["add", "sub", "mul"]
TWISTS = ["residue", "nonresidue", "all"]


def _reduce_exponent_vector(prime, vector):
    """Map a length-p vector sum_k v_k zeta^k (k = 0..p-1) to the power basis."""
    top = vector[prime - 1]
    if top == 0:
        return tuple(Fraction(v) for v in vector[: prime - 1])
    return tuple(Fraction(v - top) for v in vector[: prime - 1])


class CycloNum:
    """An element of Q(zeta_p), immutable.

    Arguments:
    ----------

        prime: int
            The odd prime p.

        coeffs: sequence
            The p-1 rational coefficients c_0, ..., c_(p-2) of
            c_0 + c_1 zeta + ... + c_(p-2) zeta^(p-2).
    """

    __slots__ = ("prime", "coeffs")

    def __init__(self, prime, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != prime - 1:
            raise InvalidInputError(
                f"A CycloNum for p={prime} needs {prime - 1} coefficients, got {len(coeffs)}."
            )
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("CycloNum is immutable")

    # Constructors

    @classmethod
    def from_rational(cls, prime, value):
        coeffs = [Fraction(0)] * (prime - 1)
        coeffs[0] = Fraction(value)
        return cls(prime, coeffs)

    @classmethod
    def from_exponent_counts(cls, prime, counts):
        """Build sum_k counts[k] zeta^k from a length-p vector indexed by exponent."""
        if len(counts) != prime:
            raise InvalidInputError(
                f"Exponent counts for p={prime} need length {prime}, got {len(counts)}."
            )
        return cls(prime, _reduce_exponent_vector(prime, list(counts)))

    # Coercion

    def _coerce(self, other):
        if isinstance(other, CycloNum):
            if other.prime != self.prime:
                raise InvalidInputError(
                    f"Cannot mix elements of Q(zeta_{self.prime}) and Q(zeta_{other.prime})."
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNum.from_rational(self.prime, other)
        return NotImplemented

    def exponent_vector(self):
        """The coefficients padded to length p (coefficient of zeta^(p-1) is 0)."""
        return list(self.coeffs) + [Fraction(0)]

    # Field operations

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloNum(self.prime, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.prime, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloNum(self.prime, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNum(self.prime, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        # Convolve integer numerators over a common denominator, then reduce exponents mod p.
        den_a = lcm(*(c.denominator for c in self.coeffs))
        den_b = lcm(*(c.denominator for c in other.coeffs))
        num_a = [c.numerator * (den_a // c.denominator) for c in self.coeffs]
        num_b = [c.numerator * (den_b // c.denominator) for c in other.coeffs]
        acc = [0] * p
        for i, x in enumerate(num_a):
            if x == 0:
                continue
            for j, y in enumerate(num_b):
                if y:
                    acc[(i + j) % p] += x * y
        den = den_a * den_b
        top = acc[p - 1]
        return CycloNum(p, [Fraction(v - top, den) for v in acc[: p - 1]])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("Division of a CycloNum by zero.")
            return CycloNum(self.prime, [a / other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * cyclo_inv(other)

    def __rtruediv__(self, other):
        return self._coerce(other) * cyclo_inv(self)

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return cyclo_inv(self) ** (-exponent)
        result = CycloNum.from_rational(self.prime, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conj(self):
        """Complex conjugation zeta -> zeta^(p-1)."""
        p = self.prime
        vector = [Fraction(0)] * p
        for k, c in enumerate(self.coeffs):
            vector[(-k) % p] = c
        return CycloNum(p, _reduce_exponent_vector(p, vector))

    # Comparison and inspection

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.prime, self.coeffs))

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ConsistencyError(f"{self} is not a rational number.")
        return self.coeffs[0]

    def to_integer(self):
        value = self.to_rational()
        if value.denominator != 1:
            raise ConsistencyError(f"{self} is not a rational integer.")
        return value.numerator

    def __repr__(self):
        return f"CycloNum({self.prime}, {self})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(f"{c}")
            elif k == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{k}")
        return " + ".join(terms) if terms else "0"


def conj(z):
    """Complex conjugate of a CycloNum."""
    return z.conj()


def cyclo_power(p, k):
    """Canonical representation of zeta_p^k."""
    verify_odd_prime("p", p)
    counts = [0] * p
    counts[k % p] = 1
    return CycloNum.from_exponent_counts(p, counts)


def cyclo_arith(a, b, op):
    """Exact field arithmetic a (op) b for op in 'add', 'sub', 'mul'."""
    verify_set("op", op, ARITH_OPS)
    if a.prime != b.prime:
        raise InvalidInputError(
            f"Mismatched primes {a.prime} and {b.prime} in cyclo_arith."
        )
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    return a * b


def _multiplication_matrix(a):
    """Rows of the (p-1)x(p-1) matrix of x -> a*x in the power basis (column j is a*zeta^j)."""
    p = a.prime
    n = p - 1
    columns = []
    for j in range(n):
        columns.append((a * cyclo_power(p, j)).coeffs)
    return [[columns[j][i] for j in range(n)] for i in range(n)]


def cyclo_inv(a):
    """Inverse of a nonzero element, by an exact solve of M x = e_0 over QQ.

    M is the matrix of multiplication by `a` in the power basis.
    """
    if a.is_zero():
        raise ZeroDivisionError("Inverse of the zero CycloNum.")
    p = a.prime
    n = p - 1
    if a.is_rational():
        return CycloNum.from_rational(p, 1 / a.coeffs[0])

    rows = [[QQ(c.numerator, c.denominator) for c in row] for row in _multiplication_matrix(a)]
    M = DomainMatrix(rows, (n, n), QQ)
    e0 = DomainMatrix([[QQ(1)]] + [[QQ(0)] for _ in range(n - 1)], (n, 1), QQ)
    try:
        solution = M.lu_solve(e0).to_Matrix()
    except DMNonInvertibleMatrixError as error:
        raise ConsistencyError(
            f"Multiplication by {a} is singular, which is impossible in a field."
        ) from error
    return CycloNum(p, [Fraction(int(x.p), int(x.q)) for x in solution])


def inv_one_minus_zeta(p, b):
    """Closed form of 1/(1 - zeta^b) = -(1/p)(zeta^b + 2 zeta^(2b) + ... + (p-1) zeta^((p-1)b)).

    Valid for b not divisible by p.
    """
    verify_odd_prime("p", p)
    if b % p == 0:
        raise ZeroDivisionError(f"1 - zeta^{b} is zero for p={p}.")
    counts = [0] * p
    for k in range(1, p):
        counts[(k * b) % p] += k
    return CycloNum.from_exponent_counts(p, [Fraction(-c, p) for c in counts])


@lru_cache(maxsize=None)
def gauss_sum(p, x):
    """Quadratic Gauss sum sum_{h in F_p} zeta_p^(x h^2)."""
    verify_odd_prime("p", p)
    if not 0 <= x < p:
        raise InvalidInputError(f"The residue x={x} should satisfy 0 <= x < {p}.")
    counts = [0] * p
    for h in range(p):
        counts[(x * h * h) % p] += 1
    return CycloNum.from_exponent_counts(p, counts)


def sqrt_star(p):
    """The canonical square root of (-1)^((p-1)/2) * p, i.e. gauss_sum(p, 1)."""
    return gauss_sum(p, 1)


def sqrt_star_square(p):
    """The integer (-1)^((p-1)/2) * p."""
    return p if p % 4 == 1 else -p


def check_gauss_sum_law(p, x):
    """Whether gauss_sum(p, x) == legendre(x, p) * sqrt_star(p) holds exactly."""
    return gauss_sum(p, x) == sqrt_star(p) * legendre(x, p)


def decompose_quadratic(z):
    """Write z = a + b * sqrt_star(p) with rational a, b.

    Raises NotInSubfieldError if z does not lie in Q(sqrt_star(p)).
    """
    p = z.prime
    root = sqrt_star(p)
    # sqrt_star has a nonzero coefficient beyond the constant term, 1 has none.
    k = next(i for i in range(1, p - 1) if root.coeffs[i] != 0)
    b = z.coeffs[k] / root.coeffs[k]
    a = z.coeffs[0] - b * root.coeffs[0]
    residual = z - (root * b + a)
    if not residual.is_zero():
        raise NotInSubfieldError(
            f"{z} is not in the quadratic subfield of Q(zeta_{p}); residual {residual}."
        )
    return a, b


def _twist_exponents(p, twist, nonresidue):
    if twist == "all":
        return list(range(1, p))
    if twist == "residue":
        return [(a * a) % p for a in range(1, p)]
    return [(nonresidue * a * a) % p for a in range(1, p)]


def inv_sum(p, twist, nonresidue=None):
    """Sum over a in F_p \\ {0} of 1/(1 - zeta^e(a)).

    e(a) = a^2 for twist 'residue', nonresidue * a^2 for 'nonresidue' and a for 'all'.
    """
    verify_odd_prime("p", p)
    verify_set("twist", twist, TWISTS)
    if nonresidue is None:
        nonresidue = fixed_nonresidue(p)
    else:
        verify_nonresidue(nonresidue, p)

    counts = [0] * p
    for b in _twist_exponents(p, twist, nonresidue):
        for k in range(1, p):
            counts[(k * b) % p] += k
    logger.debug("inv_sum p=%d twist=%s assembled", p, twist)
    return CycloNum.from_exponent_counts(p, [Fraction(-c, p) for c in counts])
