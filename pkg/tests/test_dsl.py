import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distcalc import dsl
from distcalc.distribution import core
from distcalc.dsl import Bin, Call, Neg, Num
from distcalc.errors import DSLSyntaxError, TypeMismatch, UnknownName


def _number(rng: random.Random) -> Num:
    c = rng.random()
    if c < 0.3:
        return Num(complex(rng.randint(-9, 9)))
    if c < 0.6:
        return Num(complex(rng.uniform(-1e3, 1e3)))
    if c < 0.8:
        return Num(complex(0, rng.uniform(-10, 10)))
    return Num(complex(rng.uniform(-5, 5), rng.uniform(-5, 5)))


def _leaf(rng: random.Random):
    return rng.choice([
        lambda: _number(rng),
        lambda: Call("H"),
        lambda: Call("pi"),
        lambda: Call("gauss", None, ((_number(rng),),)),
        lambda: Call("delta", None, ((_number(rng),),)),
        lambda: Call("mono", None, ((Num(complex(rng.randint(0, 4))),),)),
        lambda: Call("chi", None, ((Num(-1 + 0j), _number(rng)),)),
        lambda: Call("polygauss", None, ((_number(rng), _number(rng)), (_number(rng),))),
    ])()


def random_expr(rng: random.Random, depth: int):
    """A syntactically well-formed (not necessarily well-typed) tree of depth <= ``depth``."""
    if depth == 0 or rng.random() < 0.2:
        return _leaf(rng)
    c = rng.random()
    if c < 0.45:
        return Bin(rng.choice("+-*/"), random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if c < 0.55:
        return Neg(random_expr(rng, depth - 1))
    if c < 0.7:
        return Call("D", rng.choice([None, 2, 5]), ((random_expr(rng, depth - 1),),))
    if c < 0.8:
        return Call("FT", None, ((random_expr(rng, depth - 1),),))
    if c < 0.9:
        return Call("translate", None, ((random_expr(rng, depth - 1), random_expr(rng, depth - 1)),))
    return Call("sqrt", None, ((random_expr(rng, depth - 1),),))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_round_trip_property(seed):
    e = random_expr(random.Random(seed), 5)
    assert dsl.parse_expr(dsl.format_expr(e)) == dsl.canonical(e)


@given(st.floats(allow_nan=False, allow_infinity=False), st.floats(allow_nan=False, allow_infinity=False))
def test_numbers_round_trip_at_17_digits(re, im):
    z = complex(re, im)
    back = dsl.parse_expr(dsl.format_number(z))
    assert isinstance(back, Num) and back.value == z


def test_canonical_is_idempotent():
    rng = random.Random(7)
    for _ in range(200):
        c = dsl.canonical(random_expr(rng, 4))
        assert dsl.canonical(c) == c


def test_precedence():
    assert dsl.parse_raw("H + 2 * H") == Bin("+", Call("H"), Bin("*", Num(2 + 0j), Call("H")))
    assert dsl.parse_raw("D^2(H)") == Call("D", 2, ((Call("H"),),))
    assert dsl.parse_raw("-H * H") == Bin("*", Neg(Call("H")), Call("H"))
    assert dsl.parse_raw("  D ^ 2 ( H )") == dsl.parse_raw("D^2(H)")


def test_mixed_example_parses():
    e = dsl.parse_expr("D^2(delta(0)) + 3*FT(H)")
    assert e == Bin("+", Call("D", 2, ((Call("delta", None, ((Num(0j),),)),),)),
                    Bin("*", Num(3 + 0j), Call("FT", None, ((Call("H"),),))))


def test_numeric_folding():
    assert dsl.parse_expr("2*pi - sqrt(4)") == Num(complex(2 * math.pi - 2))
    assert dsl.parse_expr("(1+2i)*i") == Num(-2 + 1j)
    assert dsl.parse_expr("1 - H") == Bin("+", Num(1 + 0j), Neg(Call("H")))


@pytest.mark.parametrize("text,offset", [("delta(", 6), ("1 +", 3), ("D^x(H)", 2), ("(H", 2),
                                         ("H H", 2), ("2 $ 3", 2)])
def test_syntax_error_offsets(text, offset):
    with pytest.raises(DSLSyntaxError) as info:
        dsl.parse_expr(text)
    assert info.value.offset == offset
    assert info.value.record()["error"] == "SyntaxError"


def test_syntax_error_offsets_are_bytes():
    with pytest.raises(DSLSyntaxError) as info:
        dsl.parse_expr("é")
    assert info.value.offset == 0
    with pytest.raises(DSLSyntaxError) as info:
        dsl.parse_expr("1 + é")
    assert info.value.offset == 4


def test_unknown_name():
    with pytest.raises(UnknownName) as info:
        dsl.parse_expr("2 * foo(1)")
    assert info.value.identifier == "foo"


def test_monomial_transform_elaborates_to_point_atom():
    target = core.delta(0, order=2, coeff=-1)
    assert dsl.elaborate("FT(mono(2))") == target
    assert dsl.elaborate("FT(poly(0,0,1))") == target


def test_zero_multiple_is_zero_distribution():
    L = dsl.elaborate("0 * delta(1)")
    assert L.atoms == ()
    assert str(L) == "0 * delta(0)"


def test_derivative_of_heaviside_keeps_structure():
    L = dsl.elaborate("D(H)")
    assert L == core.derivative(core.regular("H"))
    assert L != core.delta(0)


@pytest.mark.parametrize("text", [
    "delta(0)", "D^3(delta(-1.5)) + 2i*regular(H)", "FT(H)", "FT(FT(H))", "translate(FT(sign), 0.75)",
    "xmul(FT(H))", "FT(sinfn) + FT(cosfn)", "regular(warp(1,2,-1,0.5,0.25;chi(0,1)))",
    "FT(expabs) - D(abs)", "translate(D^2(mono(3)), -1.25)", "FTW(gaussfn)", "FT(regular(spiky))",
    "FT(translate(H, 2))", "modulate(cauchy, 1.5)", "reflect(translate(H, 1))",
])
def test_printed_distributions_elaborate_back(text):
    L = dsl.elaborate(text)
    assert dsl.elaborate(str(L)) == L


@pytest.mark.parametrize("text", ["delta(0) + gauss(0)", "gauss(0) * gauss(1)", "H / H",
                                  "regular(gauss(0))", "delta(0) + 1", "mollify(H, 1, 0)"])
def test_type_mismatch(text):
    with pytest.raises(TypeMismatch):
        dsl.evaluate(dsl.parse_expr(text))


def test_testfunction_expressions():
    phi = dsl.testfn("mollify(gauss(0)/sqrt(pi), 4, 0.5)")
    assert phi(0.5) == pytest.approx(4 / math.sqrt(math.pi))
    psi = dsl.testfn("polygauss(1, 2; 0.5; 2; -1)")
    assert psi(0.0) == pytest.approx(math.exp(-2))
    assert psi(1.0) == pytest.approx(3 * math.exp(-8) * complex(math.cos(0.5), -math.sin(0.5)))
    assert dsl.testfn("D(gauss(0))")(1.0) == pytest.approx(-2 * math.exp(-1))
    assert dsl.testfn("FT(gauss(0))")(0.0) == pytest.approx(math.sqrt(math.pi) / (2 * math.pi))
