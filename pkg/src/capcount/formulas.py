"""Exact integer polynomials and mod-2 quasipolynomials for the closed-form counts.

Every catalog entry is typed in factored form, exactly as it is usually
displayed, and expanded here by machine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from typing import Mapping


class IntPoly:
    """Dense polynomial over Z, constant term first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPoly":
        return cls([0] * k + [c])

    @classmethod
    def from_high(cls, coeffs) -> "IntPoly":
        """Build from coefficients listed highest degree first."""
        return cls(list(coeffs)[::-1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def _coerce(self, other) -> "IntPoly":
        return other if isinstance(other, IntPoly) else IntPoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(-x for x in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return reduce(lambda acc, _: acc * self, range(e), IntPoly.const(1))

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            mag = abs(c)
            body = f"{mag}" if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def poly_op(op: str, a: IntPoly, b: IntPoly):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "eq":
        return a == b
    raise ValueError(f"unknown polynomial operation {op!r}")


def a_indicator(q: int) -> int:
    """1 for even q, 0 for odd q."""
    return 1 if q % 2 == 0 else 0


@dataclass(frozen=True)
class QuasiPoly:
    """``base(q) + a(q) * even_correction(q)`` with ``a`` the parity indicator."""

    base: IntPoly
    even_correction: IntPoly = IntPoly()
    source: str = ""

    modulus = 2

    def __call__(self, q: int) -> int:
        v = self.base(q)
        if a_indicator(q):
            v += self.even_correction(q)
        return v

    def branch(self, residue: int) -> IntPoly:
        return self.base + self.even_correction if residue % 2 == 0 else self.base

    @property
    def branches(self) -> tuple[IntPoly, IntPoly]:
        return self.branch(0), self.branch(1)

    def is_polynomial(self) -> bool:
        return self.even_correction.is_zero()


Q = IntPoly([0, 1])
_one = IntPoly.const(1)


def _pgl_poly(k: int) -> IntPoly:
    out = Q ** (k * (k - 1) // 2)
    for i in range(2, k + 1):
        out = out * (Q**i - 1)
    return out


PGL3 = _pgl_poly(3)
PGL4 = _pgl_poly(4)

_c7_outer = (Q**2 + Q + 1) * (Q**2 + 1) * (Q + 1) ** 2 * (Q - 1) ** 2 * Q**3
_c7_inner = IntPoly.from_high([1, 6, -13, -98, 148, 629, -1461, -686, 6462, -11004, 7470])

CATALOG: dict[str, QuasiPoly] = {
    "c3": QuasiPoly(
        (Q**2 + Q + 1) * (Q**2 + 1) * (Q + 1) ** 2 * Q**3,
        source="(q^2+q+1)(q^2+1)(q+1)^2 q^3",
    ),
    "c4": QuasiPoly(
        (Q**3 + Q**2 - 2 * Q + 1) * (Q**2 + Q + 1) * (Q**2 + 1) * (Q + 1) ** 2 * Q**3,
        source="(q^3+q^2-2q+1)(q^2+q+1)(q^2+1)(q+1)^2 q^3",
    ),
    "c5": QuasiPoly(
        (Q**4 + 4 * Q**3 + Q**2 - 5 * Q + 6) * (Q**2 + Q + 1) * (Q**2 + 1) * (Q + 1) ** 2 * (Q - 1) ** 2 * Q**3,
        source="(q^4+4q^3+q^2-5q+6)(q^2+q+1)(q^2+1)(q+1)^2(q-1)^2 q^3",
    ),
    "c6": QuasiPoly(
        IntPoly.from_high([1, 5, -5, -39, 35, 96, -210, 144, 169, -116, -260, 240])
        * (Q**2 + Q + 1) * (Q**2 + 1) * (Q + 1) * (Q - 1) * Q,
        source="(q^11+5q^10-5q^9-39q^8+35q^7+96q^6-210q^5+144q^4+169q^3-116q^2-260q+240)"
        "(q^2+q+1)(q^2+1)(q+1)(q-1)q",
    ),
    "c7": QuasiPoly(
        _c7_inner * _c7_outer,
        -30 * _c7_outer,
        source="(q^10+6q^9-13q^8-98q^7+148q^6+629q^5-1461q^4-686q^3+6462q^2-11004q+7470-30a(q))"
        "(q^2+q+1)(q^2+1)(q+1)^2(q-1)^2 q^3",
    ),
    "naive_c4": QuasiPoly(
        (Q**3 + Q**2 + Q + 1) * (Q**3 + Q**2 + Q) * (Q**3 + Q**2) * (Q**3 + Q**2 - 2 * Q + 1),
        source="(q^3+q^2+q+1)(q^3+q^2+q)(q^3+q^2)(q^3+q^2-2q+1)",
    ),
    "A6": QuasiPoly(
        (Q**2 + Q + 1) * (Q**2 + 1) * (Q + 1) ** 2 * (Q - 1) ** 2 * Q**6,
        source="(q^2+q+1)(q^2+1)(q+1)^2(q-1)^2 q^6",
    ),
    "Ah1": QuasiPoly(PGL4, -PGL4, source="(1-a(q)) |PGL_4(F_q)|"),
    "Ah2": QuasiPoly(IntPoly(), PGL4, source="a(q) |PGL_4(F_q)|"),
    # printed as A_{h3}(3,Q) in the source table; the A(4,Q) family is meant
    "Ah3": QuasiPoly((Q - 2) * PGL4, source="(q-2) |PGL_4(F_q)|"),
    "Ah4": QuasiPoly(PGL4, source="|PGL_4(F_q)|"),
    "Ah5": QuasiPoly(
        (Q**2 + Q + 1) * (Q**2 + 1) * (Q + 1) ** 2 * (Q - 1) ** 2 * (Q - 2) * Q**6,
        source="(q^2+q+1)(q^2+1)(q+1)^2(q-1)^2(q-2) q^6",
    ),
    "Ah6": QuasiPoly(IntPoly(), (Q**3 + Q**2 + Q + 1) * PGL3, source="a(q) (q^3+q^2+q+1) |PGL_3(F_q)|"),
    "pgl3": QuasiPoly(PGL3, source="q^3 (q^2-1)(q^3-1)"),
    "pgl4": QuasiPoly(PGL4, source="q^6 (q^2-1)(q^3-1)(q^4-1)"),
}

# which realization count each named planar space corresponds to
CONFIG_FORMULA = {
    "sixpoint": "A6",
    "h1": "Ah1",
    "h2": "Ah2",
    "h3": "Ah3",
    "h4": "Ah4",
    "h5": "Ah5",
    "h6": "Ah6",
}


@dataclass(frozen=True)
class Combination:
    """``target(q) == polynomial(q) + sum(coeff(q) * inputs[name])``."""

    target: str
    polynomial: IntPoly
    terms: tuple[tuple[str, IntPoly], ...]


COMBINATIONS: dict[str, Combination] = {
    "prop_c6": Combination(
        "c6",
        IntPoly.from_high(
            [1, 6, 1, -39, -20, 76, -80, 79, 132, 115, -128, -176, -133, 43, 207, 136, 20, -240, 0]
        ),
        (("A6", IntPoly.const(10)),),
    ),
    "prop_c7": Combination(
        "c7",
        IntPoly.from_high(
            [1, 7, -7, -112, -28, 637, -119, -1840, 4676, -4949, -1436, 4136, -107, 7839, -5908,
             -2184, -4542, -3534, 7470, 0, 0, 0]
        ),
        (
            ("A6", 70 * Q**3 + 70 * Q**2 - 560 * Q + 280),
            ("Ah5", IntPoly.const(-105)),
            ("Ah6", IntPoly.const(-30)),
        ),
    ),
}


class UnknownFormulaError(KeyError):
    pass


class MissingInputError(KeyError):
    pass


def get_formula(name: str) -> QuasiPoly:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownFormulaError(name) from None


def pgl_order(k: int, q: int) -> int:
    """|PGL_k(F_q)| = |GL_k(F_q)| / (q - 1)."""
    out = (q**k - 1) // (q - 1)
    for i in range(1, k):
        out *= q**k - q**i
    return out


def formula_eval(name: str, q: int) -> int:
    return get_formula(name)(q)


def identity_check(name: str, q: int, inputs: Mapping[str, int]) -> bool:
    rhs, target = identity_sides(name, q, inputs)
    return rhs == target


def identity_sides(name: str, q: int, inputs: Mapping[str, int]) -> tuple[int, int]:
    """(right-hand side evaluated from ``inputs``, supplied target value)."""
    try:
        comb = COMBINATIONS[name]
    except KeyError:
        raise UnknownFormulaError(name) from None
    needed = [comb.target] + [t for t, _ in comb.terms]
    missing = [k for k in needed if k not in inputs]
    if missing:
        raise MissingInputError(f"{name} needs inputs {missing}")
    rhs = comb.polynomial(q) + sum(c(q) * int(inputs[t]) for t, c in comb.terms)
    return rhs, int(inputs[comb.target])


def quasipoly_consistency(name: str) -> dict:
    f = get_formula(name)
    even, odd = f.branches
    diff = even - odd
    return {
        "name": name,
        "parity_dependent": not diff.is_zero(),
        "branch_difference": diff,
        "even_branch_zero": even.is_zero(),
        "odd_branch_zero": odd.is_zero(),
    }


def dump_catalog() -> str:
    def enc(p: IntPoly) -> list[str]:
        return [str(c) for c in p.coeffs]

    doc = {
        "formulas": {
            k: {"dense": enc(v.base), "modulus": v.modulus, "even_correction": enc(v.even_correction),
                "factored": v.source}
            for k, v in CATALOG.items()
        },
        "combinations": {
            k: {"target": v.target, "polynomial": enc(v.polynomial), "terms": {t: enc(c) for t, c in v.terms}}
            for k, v in COMBINATIONS.items()
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)
