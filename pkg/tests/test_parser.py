import pytest
from hypothesis import given

from errors import ParseError
from logic.fol import (Const, FoAnd, FoEq, FoExists, FoForall, FoImplies, FoPred, FoRel, Var,
                       fol_to_text)
from logic.parser import infer_signature, parse_fol, parse_hybrid, tokenize
from logic.syntax import (And, At, Dia, Down, Exists, Implies, Nom, Not, Or, Prop, Signature, Top,
                          WVar, to_text)

from strategies import SIG_PS, hybrid_formulas

SIG = Signature(("p", "q", "r"), ("s",))


def test_tokenize_records_offsets():
    tokens = tokenize("<> 's")
    assert [(t.kind, t.offset) for t in tokens] == [("DIA", 0), ("NOM", 3), ("EOF", 5)]


def test_precedence():
    assert parse_hybrid("~p & q", SIG) == And(Not(Prop("p")), Prop("q"))
    assert parse_hybrid("<> p | q", SIG) == Or(Dia(Prop("p")), Prop("q"))
    assert parse_hybrid("p & q | r", SIG) == Or(And(Prop("p"), Prop("q")), Prop("r"))
    assert parse_hybrid("p -> q -> r", SIG) == Implies(Prop("p"), Implies(Prop("q"), Prop("r")))


def test_binders_extend_to_the_right():
    assert parse_hybrid("down x . p & ?x", SIG) == Down("x", And(Prop("p"), WVar("x")))
    assert parse_hybrid("p & exists ?y . ?y", SIG) == And(Prop("p"), Exists("y", WVar("y")))


def test_jump_takes_a_nominal_or_variable():
    assert parse_hybrid("@'s <> true", SIG) == At(Nom("s"), Dia(Top()))
    assert parse_hybrid("@?x p", SIG) == At(WVar("x"), Prop("p"))
    with pytest.raises(ParseError):
        parse_hybrid("@p q", SIG)


def test_unknown_symbols():
    with pytest.raises(ParseError) as info:
        parse_hybrid("p & z", SIG)
    assert info.value.offset == 4
    with pytest.raises(ParseError):
        parse_hybrid("'t", SIG)


@pytest.mark.parametrize("text, offset", [("(p", 2), ("p )", 2), ("p & ", 4), ("", 0), ("p $ q", 2)])
def test_error_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        parse_hybrid(text, SIG)
    assert info.value.offset == offset


@given(hybrid_formulas(SIG_PS, ("x1", "x2"), max_leaves=10))
def test_printed_formulas_parse_back(phi):
    assert parse_hybrid(to_text(phi), SIG_PS) == phi


def test_parse_fol():
    phi = parse_fol("forall x . (P(x) -> exists y . R(x,y))", SIG)
    assert phi == FoForall("x", FoImplies(FoPred("P", Var("x")), FoExists("y", FoRel(Var("x"), Var("y")))))
    assert parse_fol("x = 's & Q(x)", SIG) == FoAnd(FoEq(Var("x"), Const("s")), FoPred("Q", Var("x")))


def test_fol_printing_parses_back():
    text = "forall x . (P(x) -> exists y . (R(x,y) & ~(y = 's)))"
    phi = parse_fol(text, SIG)
    assert parse_fol(fol_to_text(phi), SIG) == phi


def test_fol_errors():
    with pytest.raises(ParseError):
        parse_fol("R(x)", SIG)
    with pytest.raises(ParseError):
        parse_fol("Z(x)", SIG)
    with pytest.raises(ParseError):
        parse_fol("exists X . P(X)", SIG)


def test_infer_signature():
    sig = infer_signature("<> p & 's | down x . ?x -> q")
    assert sig.props == ("p", "q")
    assert sig.noms == ("s",)
    fol = infer_signature("forall x . (P(x) -> Q(x)) & R(x,'c)", fol=True)
    assert fol.props == ("p", "q")
    assert fol.noms == ("c",)
