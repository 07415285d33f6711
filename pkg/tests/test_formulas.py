import json
from math import factorial

import pytest
from hypothesis import given, strategies as st

from capcount.formulas import (
    CATALOG,
    PGL4,
    Q,
    IntPoly,
    MissingInputError,
    UnknownFormulaError,
    a_indicator,
    dump_catalog,
    formula_eval,
    identity_check,
    identity_sides,
    pgl_order,
    poly_op,
    quasipoly_consistency,
)


def _a(q):
    return 1 if q % 2 == 0 else 0


def _pgl4(q):
    return (q**4 - 1) * (q**4 - q) * (q**4 - q**2) * (q**4 - q**3) // (q - 1)


def _pgl3(q):
    return (q**3 - 1) * (q**3 - q) * (q**3 - q**2) // (q - 1)


def _outer(q):
    return (q**2 + q + 1) * (q**2 + 1) * (q + 1) ** 2 * (q - 1) ** 2 * q**3


# plain-integer transcriptions, independent of IntPoly
REFERENCE = {
    "c3": lambda q: (q**2 + q + 1) * (q**2 + 1) * (q + 1) ** 2 * q**3,
    "c4": lambda q: (q**3 + q**2 - 2 * q + 1) * (q**2 + q + 1) * (q**2 + 1) * (q + 1) ** 2 * q**3,
    "c5": lambda q: (q**4 + 4 * q**3 + q**2 - 5 * q + 6) * _outer(q),
    "c6": lambda q: (
        q**11 + 5 * q**10 - 5 * q**9 - 39 * q**8 + 35 * q**7 + 96 * q**6 - 210 * q**5
        + 144 * q**4 + 169 * q**3 - 116 * q**2 - 260 * q + 240
    ) * (q**2 + q + 1) * (q**2 + 1) * (q + 1) * (q - 1) * q,
    "c7": lambda q: (
        q**10 + 6 * q**9 - 13 * q**8 - 98 * q**7 + 148 * q**6 + 629 * q**5 - 1461 * q**4
        - 686 * q**3 + 6462 * q**2 - 11004 * q + 7470 - 30 * _a(q)
    ) * _outer(q),
    "naive_c4": lambda q: (q**3 + q**2 + q + 1) * (q**3 + q**2 + q) * (q**3 + q**2) * (q**3 + q**2 - 2 * q + 1),
    "A6": lambda q: (q**2 + q + 1) * (q**2 + 1) * (q + 1) ** 2 * (q - 1) ** 2 * q**6,
    "Ah1": lambda q: (1 - _a(q)) * _pgl4(q),
    "Ah2": lambda q: _a(q) * _pgl4(q),
    "Ah3": lambda q: (q - 2) * _pgl4(q),
    "Ah4": _pgl4,
    "Ah5": lambda q: (q**2 + q + 1) * (q**2 + 1) * (q + 1) ** 2 * (q - 1) ** 2 * (q - 2) * q**6,
    "Ah6": lambda q: _a(q) * (q**3 + q**2 + q + 1) * _pgl3(q),
    "pgl3": _pgl3,
    "pgl4": _pgl4,
}


def test_reference_covers_catalog():
    assert set(REFERENCE) == set(CATALOG)


def test_poly_examples():
    assert poly_op("mul", Q + 1, Q - 1) == Q**2 - 1
    assert poly_op("eq", CATALOG["naive_c4"].base, CATALOG["c4"].base)
    c3 = (Q**2 + Q + 1) * (Q**2 + 1) * (Q + 1) ** 2 * Q**3
    assert poly_op("eq", c3, CATALOG["c3"].base)
    assert poly_op("sub", Q, Q).is_zero()
    with pytest.raises(ValueError):
        poly_op("div", Q, Q)


def test_intpoly_normalization_and_str():
    assert IntPoly([1, 2, 0, 0]).coeffs == (1, 2)
    assert str(Q**2 - 2 * Q + 1) == "q^2 - 2*q + 1"
    assert str(-Q) == "-q"
    assert IntPoly.from_high([3, 0, 1]) == 3 * Q**2 + 1


def test_a_indicator():
    assert (a_indicator(2), a_indicator(3), a_indicator(4)) == (1, 0, 1)


def test_pgl_examples():
    assert pgl_order(4, 2) == 20160
    assert pgl_order(3, 2) == 168
    assert pgl_order(4, 3) == 12130560


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16])
def test_pgl_polynomial_matches_order(q):
    assert PGL4(q) == pgl_order(4, q) == formula_eval("pgl4", q)
    assert formula_eval("pgl3", q) == pgl_order(3, q)


def test_eval_examples():
    assert formula_eval("c7", 2) == 604800
    assert formula_eval("c6", 2) == 302400
    assert formula_eval("Ah5", 2) == 0
    assert formula_eval("A6", 3) == 6065280 == 13 * 10 * 16 * 4 * 729
    assert formula_eval("c3", 2) == 2520
    assert formula_eval("c4", 2) == 22680 == 15 * 14 * 12 * 9
    assert formula_eval("c5", 2) == 120960


def test_unknown_formula():
    with pytest.raises(UnknownFormulaError):
        formula_eval("c8", 2)
    with pytest.raises(UnknownFormulaError):
        quasipoly_consistency("nope")


@pytest.mark.parametrize("name", sorted(REFERENCE))
def test_expansion_fidelity(name):
    for q in range(2, 52):
        assert formula_eval(name, q) == REFERENCE[name](q), (name, q)


@pytest.mark.parametrize("name", ["c3", "c4", "c5", "c6", "c7"])
def test_ordered_divisibility(name):
    n = int(name[1])
    for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]:
        assert formula_eval(name, q) % factorial(n) == 0


def test_degrees_of_displayed_factorizations():
    degs = {k: CATALOG[k].base.degree for k in ("c3", "c4", "c5", "c6", "c7")}
    # exponents of the displayed factors add up to these
    assert degs == {"c3": 9, "c4": 12, "c5": 15, "c6": 18, "c7": 21}
    assert all(CATALOG[k].base.leading == 1 for k in degs)


def test_identity_examples():
    assert identity_check("prop_c6", 2, {"A6": 20160, "c6": 302400})
    assert identity_check("prop_c7", 2, {"A6": 20160, "Ah5": 0, "Ah6": 2520, "c7": 604800})
    assert identity_check("prop_c6", 3, {"A6": 6065280, "c6": formula_eval("c6", 3)})
    assert not identity_check("prop_c6", 2, {"A6": 20160, "c6": 302401})


@pytest.mark.parametrize("q", range(2, 30))
def test_identities_agree_with_closed_forms(q):
    ins = {k: formula_eval(k, q) for k in ("A6", "Ah5", "Ah6", "c6", "c7")}
    assert identity_check("prop_c6", q, ins)
    assert identity_check("prop_c7", q, ins)


def test_identity_missing_inputs():
    with pytest.raises(MissingInputError):
        identity_sides("prop_c7", 2, {"A6": 1, "c7": 1})
    with pytest.raises(UnknownFormulaError):
        identity_check("prop_c9", 2, {})


def test_consistency_examples():
    r = quasipoly_consistency("c6")
    assert not r["parity_dependent"]
    r = quasipoly_consistency("c7")
    outer = (Q**2 + Q + 1) * (Q**2 + 1) * (Q + 1) ** 2 * (Q - 1) ** 2 * Q**3
    assert r["parity_dependent"] and r["branch_difference"] == -30 * outer
    r = quasipoly_consistency("Ah1")
    assert r["even_branch_zero"] and not r["odd_branch_zero"]
    assert quasipoly_consistency("Ah2")["odd_branch_zero"]


def test_dump_catalog_roundtrip():
    doc = json.loads(dump_catalog())
    for name, entry in doc["formulas"].items():
        dense = IntPoly(int(c) for c in entry["dense"])
        assert dense == CATALOG[name].base
        assert all(isinstance(c, str) for c in entry["dense"])
        assert entry["modulus"] == 2
    assert set(doc["combinations"]) == {"prop_c6", "prop_c7"}


polys = st.lists(st.integers(-50, 50), max_size=6).map(IntPoly)


@given(polys, polys, st.integers(-20, 20))
def test_evaluation_is_ring_homomorphism(a, b, x):
    assert (a + b)(x) == a(x) + b(x)
    assert (a * b)(x) == a(x) * b(x)
    assert (a - b)(x) == a(x) - b(x)


@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
