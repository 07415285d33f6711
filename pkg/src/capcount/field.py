"""Finite fields GF(p^d) with precomputed index tables.

Elements are the integers 0..q-1; element ``e`` stands for the polynomial
``sum(c_k x^k)`` where ``c_k`` is the k-th base-p digit of ``e``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

DEFAULT_MAX_ORDER = 16


class FieldError(ValueError):
    """Base class for rejected field parameters."""


class NotPrimeError(FieldError):
    pass


class BadDegreeError(FieldError):
    pass


class OrderTooLargeError(FieldError):
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


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q`` into ``(p, d)`` with ``q == p**d``; raise if impossible."""
    if q < 2:
        raise NotPrimeError(f"{q} is not a prime power")
    p = next(k for k in range(2, q + 1) if q % k == 0)
    d, r = 0, q
    while r % p == 0:
        r //= p
        d += 1
    if r != 1:
        raise NotPrimeError(f"{q} is not a prime power")
    return p, d


def _poly_mulmod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    d = len(modulus) - 1
    prod = [0] * (2 * d - 1 if d > 0 else 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    # modulus is monic: reduce from the top down
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for j in range(d + 1):
                prod[k - d + j] = (prod[k - d + j] - c * modulus[j]) % p
    return (prod + [0] * d)[:d]


def _is_irreducible(poly: list[int], p: int) -> bool:
    """True iff the monic ``poly`` (constant term first) is irreducible over GF(p)."""
    d = len(poly) - 1
    if d == 1:
        return True
    # any reducible poly of degree d has a monic factor of degree <= d//2
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            div = list(low) + [1]
            rem = list(poly)
            for top in range(d, k - 1, -1):
                c = rem[top]
                if c:
                    for j in range(k + 1):
                        rem[top - k + j] = (rem[top - k + j] - c * div[j]) % p
            if not any(rem[:k]):
                return False
    return True


def least_irreducible(p: int, d: int) -> list[int]:
    """Lexicographically least monic irreducible polynomial of degree ``d``.

    Polynomials are ordered by their coefficient vector read from the highest
    degree down, so GF(8) gets x^3+x+1. Returned constant term first.
    """
    for tail in itertools.product(range(p), repeat=d):
        coeffs = list(reversed(tail)) + [1]
        if d > 1 and coeffs[0] == 0:
            continue
        if _is_irreducible(coeffs, p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True)
class Field:
    p: int
    d: int
    q: int
    modulus: tuple[int, ...]
    add_table: tuple[tuple[int, ...], ...] = field(repr=False)
    mul_table: tuple[tuple[int, ...], ...] = field(repr=False)
    neg_table: tuple[int, ...] = field(repr=False)
    inv_table: tuple[int, ...] = field(repr=False)

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.inv_table[a]

    def pow(self, a: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = self.mul_table[r][a]
        return r

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def digits(self, a: int) -> list[int]:
        """Polynomial coefficients of element ``a``, constant term first."""
        out = []
        for _ in range(self.d):
            out.append(a % self.p)
            a //= self.p
        return out

    def modulus_str(self) -> str:
        terms = []
        for k in range(self.d, -1, -1):
            c = self.modulus[k]
            if not c:
                continue
            mono = "1" if k == 0 else ("x" if k == 1 else f"x^{k}")
            terms.append(mono if c == 1 and k else f"{c}{'' if k == 0 else '*' + mono}")
        return "+".join(terms)


def field_arith(f: Field, op: str, a: int, b: int | None = None) -> int:
    """Dispatch a table lookup by operation name."""
    for x in (a, b):
        if x is not None and not 0 <= x < f.q:
            raise ValueError(f"{x} is not an element of GF({f.q})")
    if op in ("add", "mul", "sub"):
        if b is None:
            raise ValueError(f"{op} needs two operands")
        return getattr(f, op)(a, b)
    if op in ("neg", "inv"):
        return getattr(f, op)(a)
    raise ValueError(f"unknown field operation {op!r}")


@lru_cache(maxsize=None)
def make_field(p: int, d: int = 1, max_order: int = DEFAULT_MAX_ORDER) -> Field:
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    if d < 1:
        raise BadDegreeError(f"extension degree must be >= 1, got {d}")
    q = p**d
    if q > max_order:
        raise OrderTooLargeError(f"GF({q}) exceeds the configured bound {max_order}")
    modulus = least_irreducible(p, d) if d > 1 else [0, 1]

    def to_poly(e: int) -> list[int]:
        return [(e // p**k) % p for k in range(d)]

    def from_poly(c: list[int]) -> int:
        return sum(x * p**k for k, x in enumerate(c))

    polys = [to_poly(e) for e in range(q)]
    add = tuple(
        tuple(from_poly([(x + y) % p for x, y in zip(polys[a], polys[b])]) for b in range(q))
        for a in range(q)
    )
    if d == 1:
        mul = tuple(tuple(a * b % p for b in range(q)) for a in range(q))
    else:
        mul = tuple(
            tuple(from_poly(_poly_mulmod(polys[a], polys[b], modulus, p)) for b in range(q))
            for a in range(q)
        )
    neg = tuple(add[a].index(0) for a in range(q))
    inv = tuple([0] + [mul[a].index(1) for a in range(1, q)])
    f = Field(p, d, q, tuple(modulus), add, mul, neg, inv)
    _check_axioms(f)
    return f


def field_for_order(q: int, max_order: int = DEFAULT_MAX_ORDER) -> Field:
    p, d = prime_power(q)
    return make_field(p, d, max_order)


def _check_axioms(f: Field) -> None:
    # cheap structural checks; the exhaustive ones live in the test suite
    q = f.q
    assert all(f.add_table[0][a] == a and f.mul_table[1][a] == a for a in range(q))
    assert all(f.mul_table[a][f.inv_table[a]] == 1 for a in range(1, q))
    assert all(sorted(f.mul_table[a]) == list(range(q)) for a in range(1, q))
