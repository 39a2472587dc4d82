"""Arithmetic in GF(p^k) for small prime powers.

Elements are identified with integers ``sum(c_i * p**i)`` where ``c_i`` is
the coefficient of ``x**i`` in the residue polynomial. Every construction in
the package enumerates field elements in that integer order.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import product

from .core import ParameterError

MAX_ORDER = 1 << 16


class NonPrimePower(ParameterError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """``(p, k)`` with ``q == p**k`` and p prime, or None."""
    if q < 2:
        return None
    p = 2
    while q % p:
        p += 1
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    return (p, k) if r == 1 else None


# Polynomials over GF(p) are coefficient tuples, constant term first.

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a, m, p: int) -> list[int]:
    a = _trim([x % p for x in a])
    m = _trim(list(m))
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mi) % p
        _trim(a)
    return a


def is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _trim(list(poly))
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not poly_mod(poly, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k.

    Candidates are ordered by their coefficient vector read constant term
    first.
    """
    if k == 1:
        return (0, 1)
    for low in product(range(p), repeat=k):
        cand = list(low) + [1]
        if low[0] != 0 and is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("an irreducible polynomial of every degree exists")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    p: int
    k: int
    modulus: tuple[int, ...]
    _tables: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.k, self.modulus) == (
            other.p, other.k, other.modulus)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    @property
    def q(self) -> int:
        return self.p ** self.k

    # -- integer-level arithmetic ------------------------------------------

    def digits(self, x: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            x, r = divmod(x, self.p)
            out.append(r)
        return tuple(out)

    def from_digits(self, coeffs) -> int:
        x = 0
        for c in reversed(list(coeffs)):
            x = x * self.p + c % self.p
        return x

    def add(self, x: int, y: int) -> int:
        if self.k == 1:
            return (x + y) % self.p
        p = self.p
        out, scale = 0, 1
        while x or y:
            out += ((x % p + y % p) % p) * scale
            x //= p
            y //= p
            scale *= p
        return out

    def neg(self, x: int) -> int:
        if self.k == 1:
            return -x % self.p
        return self.from_digits(-c for c in self.digits(x))

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def _log_tables(self):
        if "exp" not in self._tables:
            q = self.q
            exp = [0] * (q - 1)
            log = [0] * q
            g = self.primitive_element()
            cur = 1
            for i in range(q - 1):
                exp[i] = cur
                log[cur] = i
                cur = self._slow_mul(cur, g)
            self._tables["exp"] = exp
            self._tables["log"] = log
        return self._tables["exp"], self._tables["log"]

    def _slow_mul(self, x: int, y: int) -> int:
        if self.k == 1:
            return x * y % self.p
        a, b = self.digits(x), self.digits(y)
        prod = [0] * (2 * self.k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        return self.from_digits(poly_mod(prod, self.modulus, self.p) + [0] * self.k)

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        if self.k == 1:
            return x * y % self.p
        exp, log = self._log_tables()
        return exp[(log[x] + log[y]) % (self.q - 1)]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        if self.k == 1:
            return pow(x, self.p - 2, self.p)
        exp, log = self._log_tables()
        return exp[-log[x] % (self.q - 1)]

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            x, e = self.inv(x), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def primitive_element(self) -> int:
        """Smallest nonzero element generating the multiplicative group."""
        if "g" in self._tables:
            return self._tables["g"]
        order = self.q - 1
        factors = {f for f in range(2, order + 1) if order % f == 0 and is_prime(f)}
        for g in range(1, self.q):
            if all(self._slow_pow(g, order // f) != 1 for f in factors):
                self._tables["g"] = g
                return g
        raise AssertionError("multiplicative group of a finite field is cyclic")

    def _slow_pow(self, x: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._slow_mul(result, x)
            x = self._slow_mul(x, x)
            e >>= 1
        return result

    # -- element views -------------------------------------------------------

    def element(self, value) -> "FieldElement":
        if isinstance(value, int):
            if not 0 <= value < self.q:
                raise ParameterError(f"{value} is not an element id of GF({self.q})")
            return FieldElement(self, value)
        return FieldElement(self, self.from_digits(value))

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, i) for i in range(self.q)]

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.digits(self.value)

    def _other(self, y) -> int:
        if isinstance(y, FieldElement):
            if y.spec != self.spec:
                raise ParameterError("operands live in different fields")
            return y.value
        return self.spec.from_digits([y])

    def __add__(self, y):
        return FieldElement(self.spec, self.spec.add(self.value, self._other(y)))

    __radd__ = __add__

    def __sub__(self, y):
        return FieldElement(self.spec, self.spec.sub(self.value, self._other(y)))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.value))

    def __mul__(self, y):
        return FieldElement(self.spec, self.spec.mul(self.value, self._other(y)))

    __rmul__ = __mul__

    def inv(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.value))

    def __truediv__(self, y):
        return self * FieldElement(self.spec, self._other(y)).inv()

    def __pow__(self, e: int):
        return FieldElement(self.spec, self.spec.pow(self.value, e))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"GF({self.spec.q})[{self.value}]"


@lru_cache(maxsize=None)
def field(q: int) -> FieldSpec:
    if not 2 <= q <= MAX_ORDER:
        raise ParameterError(f"field order {q} outside [2, {MAX_ORDER}]")
    pk = prime_power(q)
    if pk is None:
        raise NonPrimePower(f"{q} is not a prime power")
    p, k = pk
    return FieldSpec(p, k, smallest_irreducible(p, k))


def subfield_elements(spec: FieldSpec, base: int) -> set[FieldElement]:
    """Elements of GF(base) inside GF(base**2): the fixed points of x -> x**base."""
    if base * base != spec.q or prime_power(base) is None:
        raise ParameterError(f"GF({spec.q}) is not GF({base}^2)")
    return {FieldElement(spec, x) for x in range(spec.q) if spec.pow(x, base) == x}
