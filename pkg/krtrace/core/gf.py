"""Finite field arithmetic for F_q = F_{p^r}.

An element is stored as an integer code: the canonical representative
c_0 + c_1 z + ... + c_{r-1} z^{r-1} modulo the field modulus has code
sum(c_i * p^i). Codes order the field, so 0 and 1 come first and the prime
subfield is exactly the codes below p.

Multiplication is polynomial arithmetic modulo the modulus. Fields small
enough get discrete log/exp tables built from that arithmetic; the tables
never change results, only speed.
"""

import logging
from functools import lru_cache
from itertools import product
from typing import Any, List, Optional, Sequence, Tuple, Union

import sympy

from .errors import FieldError

logger = logging.getLogger(__name__)

MAX_DEGREE = 4
TABLE_LIMIT = 1 << 14

Coeffs = Tuple[int, ...]


def _to_digits(code: int, p: int, r: int) -> List[int]:
    digits = []
    for _ in range(r):
        code, d = divmod(code, p)
        digits.append(d)
    return digits


def _from_digits(digits: Sequence[int], p: int) -> int:
    code = 0
    for d in reversed(digits):
        code = code * p + d % p
    return code


def _poly_rem(num: Sequence[int], den: Sequence[int], p: int) -> List[int]:
    """Remainder of num by a monic den over F_p, coefficients low to high."""
    rem = list(num)
    deg = len(den) - 1
    for k in range(len(rem) - 1, deg - 1, -1):
        c = rem[k] % p
        if c:
            for j in range(deg + 1):
                rem[k - deg + j] = (rem[k - deg + j] - c * den[j]) % p
    return [c % p for c in rem[:deg]]


def _is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree at most deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not any(_poly_rem(poly, list(low) + [1], p)):
                return False
    return True


def smallest_irreducible(p: int, r: int) -> Coeffs:
    """Lexicographically smallest monic irreducible of degree r over F_p.

    Candidates are ordered by the code of their non-leading coefficients, so
    the result is the same on every run.
    """
    for code in range(p**r):
        poly = _to_digits(code, p, r) + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise FieldError(f"No irreducible polynomial of degree {r} over F_{p}")


class FieldCtx:
    """The field F_q with q = p^r.

    Immutable after construction. Use make_field to obtain a shared instance.
    """

    def __init__(self, p: int, r: int, use_tables: bool = True) -> None:
        if p == 2:
            raise FieldError("p must be an odd prime, got 2")
        if p < 2 or not sympy.isprime(p):
            raise FieldError(f"p must be an odd prime, got {p}")
        if not 1 <= r <= MAX_DEGREE:
            raise FieldError(f"r must satisfy 1 <= r <= {MAX_DEGREE}, got {r}")

        self.p = p
        self.r = r
        self.q = p**r
        self.modulus: Coeffs = smallest_irreducible(p, r)

        self._log: Optional[List[int]] = None
        self._exp: Optional[List[int]] = None
        self._gen_code = self._find_generator()
        if use_tables and self.q <= TABLE_LIMIT:
            self._build_tables()
        logger.debug(
            "Built F_%d (p=%d, r=%d) modulus=%s generator=%d tables=%s",
            self.q,
            p,
            r,
            self.modulus,
            self._gen_code,
            self._log is not None,
        )

    def __reduce__(self) -> Tuple[Any, Tuple[int, int, bool]]:
        return (FieldCtx, (self.p, self.r, self._log is not None))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldCtx):
            return NotImplemented
        return (self.p, self.r) == (other.p, other.r)

    def __hash__(self) -> int:
        return hash((self.p, self.r))

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, r={self.r})"

    @property
    def has_tables(self) -> bool:
        return self._log is not None

    # raw arithmetic on codes

    def add_codes(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a + b) % self.p
        p = self.p
        res, place = 0, 1
        while a or b:
            res += ((a % p + b % p) % p) * place
            a //= p
            b //= p
            place *= p
        return res

    def neg_code(self, a: int) -> int:
        if self.r == 1:
            return -a % self.p
        p = self.p
        res, place = 0, 1
        while a:
            res += (-(a % p) % p) * place
            a //= p
            place *= p
        return res

    def poly_mul_codes(self, a: int, b: int) -> int:
        """Table-free product of two codes."""
        if self.r == 1:
            return a * b % self.p
        p, r = self.p, self.r
        da, db = _to_digits(a, p, r), _to_digits(b, p, r)
        prod = [0] * (2 * r - 1)
        for i, ai in enumerate(da):
            if ai:
                for j, bj in enumerate(db):
                    prod[i + j] += ai * bj
        return _from_digits(_poly_rem(prod, self.modulus, p), p)

    def mul_codes(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._log is not None and self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self.poly_mul_codes(a, b)

    def pow_code(self, a: int, k: int) -> int:
        if k < 0:
            a = self.inv_code(a)
            k = -k
        if a == 0:
            return 1 if k == 0 else 0
        if self._log is not None and self._exp is not None:
            return self._exp[self._log[a] * k % (self.q - 1)]
        result = 1
        while k:
            if k & 1:
                result = self.poly_mul_codes(result, a)
            a = self.poly_mul_codes(a, a)
            k >>= 1
        return result

    def inv_code(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.q}")
        if self._log is not None and self._exp is not None:
            return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        return self.pow_code(a, self.q - 2)

    def _find_generator(self) -> int:
        order = self.q - 1
        cofactors = [order // ell for ell in sympy.factorint(order)]
        for code in range(1, self.q):
            if all(self.pow_code(code, k) != 1 for k in cofactors):
                return code
        raise FieldError(f"F_{self.q} has no generator; modulus is not irreducible")

    def _build_tables(self) -> None:
        order = self.q - 1
        exp = [0] * (2 * order)
        log = [0] * self.q
        val = 1
        for i in range(order):
            exp[i] = val
            log[val] = i
            val = self.poly_mul_codes(val, self._gen_code)
        for i in range(order, 2 * order):
            exp[i] = exp[i - order]
        self._exp, self._log = exp, log

    # element constructors

    def from_code(self, code: int) -> "FqElement":
        if not 0 <= code < self.q:
            raise FieldError(f"Element code {code} out of range for F_{self.q}")
        return FqElement(self, code)

    def from_int(self, n: int) -> "FqElement":
        """Image of the integer n in the prime subfield."""
        return FqElement(self, n % self.p)

    def from_coeffs(self, coeffs: Sequence[int]) -> "FqElement":
        if len(coeffs) > self.r:
            raise FieldError(f"Expected at most {self.r} coefficients, got {len(coeffs)}")
        return FqElement(self, _from_digits(list(coeffs), self.p))

    @property
    def zero(self) -> "FqElement":
        return FqElement(self, 0)

    @property
    def one(self) -> "FqElement":
        return FqElement(self, 1)

    @property
    def generator(self) -> "FqElement":
        """Smallest code generating the multiplicative group."""
        return FqElement(self, self._gen_code)

    def elements(self) -> List["FqElement"]:
        return [FqElement(self, code) for code in range(self.q)]

    def units(self) -> List["FqElement"]:
        return [FqElement(self, code) for code in range(1, self.q)]

    def norm(self, u: "FqElement") -> "FqElement":
        return u ** ((self.q - 1) // (self.p - 1))

    def count_root_solutions(self, u: "FqElement") -> int:
        if u.code == 0:
            return 1
        return self.p - 1 if self.norm(u).code == 1 else 0


Operand = Union["FqElement", int]


class FqElement:
    """An element of F_q, compared coefficient-wise."""

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: FieldCtx, code: int) -> None:
        self.ctx = ctx
        self.code = code

    def _other(self, other: Operand) -> int:
        if isinstance(other, FqElement):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise FieldError(f"Cannot combine elements of {self.ctx} and {other.ctx}")
            return other.code
        if isinstance(other, int):
            return other % self.ctx.p
        raise TypeError(f"Unsupported operand type: {type(other).__name__}")

    def __add__(self, other: Operand) -> "FqElement":
        return FqElement(self.ctx, self.ctx.add_codes(self.code, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other: Operand) -> "FqElement":
        neg = self.ctx.neg_code(self._other(other))
        return FqElement(self.ctx, self.ctx.add_codes(self.code, neg))

    def __rsub__(self, other: Operand) -> "FqElement":
        return FqElement(
            self.ctx, self.ctx.add_codes(self._other(other), self.ctx.neg_code(self.code))
        )

    def __neg__(self) -> "FqElement":
        return FqElement(self.ctx, self.ctx.neg_code(self.code))

    def __mul__(self, other: Operand) -> "FqElement":
        return FqElement(self.ctx, self.ctx.mul_codes(self.code, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other: Operand) -> "FqElement":
        inv = self.ctx.inv_code(self._other(other))
        return FqElement(self.ctx, self.ctx.mul_codes(self.code, inv))

    def __rtruediv__(self, other: Operand) -> "FqElement":
        inv = self.ctx.inv_code(self.code)
        return FqElement(self.ctx, self.ctx.mul_codes(self._other(other), inv))

    def __pow__(self, k: int) -> "FqElement":
        return FqElement(self.ctx, self.ctx.pow_code(self.code, k))

    def inverse(self) -> "FqElement":
        return FqElement(self.ctx, self.ctx.inv_code(self.code))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FqElement):
            return self.ctx == other.ctx and self.code == other.code
        # ints compare as prime-field codes only, so equal values share a hash
        if isinstance(other, int):
            return 0 <= other < self.ctx.p and self.code == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.code)

    def __bool__(self) -> bool:
        return self.code != 0

    @property
    def coeffs(self) -> Coeffs:
        return tuple(_to_digits(self.code, self.ctx.p, self.ctx.r))

    @property
    def in_prime_field(self) -> bool:
        return self.code < self.ctx.p

    def __int__(self) -> int:
        if not self.in_prime_field:
            raise FieldError(f"{self} does not lie in the prime field F_{self.ctx.p}")
        return self.code

    def __repr__(self) -> str:
        return f"FqElement({self}, q={self.ctx.q})"

    def __str__(self) -> str:
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "z" if i == 1 else f"z^{i}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms) or "0"


@lru_cache(maxsize=None)
def make_field(p: int, r: int, use_tables: bool = True) -> FieldCtx:
    """Build (or reuse) the context for F_{p^r}.

    Args:
        p: Odd prime characteristic
        r: Extension degree, 1 <= r <= 4
        use_tables: Allow log/exp tables when q is small

    Raises:
        FieldError: If p is not an odd prime or r is out of range
    """
    return FieldCtx(p, r, use_tables=use_tables)


def elements(ctx: FieldCtx) -> List[FqElement]:
    """All q elements in code order: 0, 1, 2, ..."""
    return ctx.elements()


def norm(ctx: FieldCtx, u: FqElement) -> FqElement:
    """N_r(u) = u^((q-1)/(p-1)), with norm(0) = 0."""
    return ctx.norm(u)


def count_root_solutions(ctx: FieldCtx, u: FqElement) -> int:
    """Number of t in F_q with t^(p-1) = u."""
    return ctx.count_root_solutions(u)
