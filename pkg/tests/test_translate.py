import random

import pytest
from hypothesis import given

from errors import TranslationError
from logic.fol import Const, FoEq, FoOr, FoPred, Var, fol_to_text, free_vars, is_closed, quantifier_depth
from logic.parser import parse_fol, parse_hybrid
from logic.semantics import HybridContext, sat_fol, sat_hybrid
from logic.syntax import Down, Signature, WVar
from logic.translate import (TranslationState, instantiate, invariance_counterexample, psi_sigma,
                             relativise, sbt, st)
from settings import STX, STY
from world.fixtures import random_model
from world.kripke import KripkeModel, disjoint_union

from strategies import SIG_PS, hybrid_formulas, kripke_models

SIG = Signature(("p",), ("s",))


def test_st_of_diamond():
    assert fol_to_text(st(parse_hybrid("<> p", SIG))) == "exists sty . (R(stx,sty) & P(sty))"
    assert fol_to_text(st(parse_hybrid("<> p", SIG), "y")) == "exists stx . (R(sty,stx) & P(stx))"


def test_st_keeps_the_current_variable_free():
    phi = st(parse_hybrid("@'s p", SIG))
    assert STX in free_vars(phi)
    assert free_vars(st(parse_hybrid("down x . ?x", SIG))) == {STX}


def test_st_rejects_designated_names():
    with pytest.raises(TranslationError):
        st(Down(STY, WVar(STY)))
    with pytest.raises(TranslationError):
        st(parse_hybrid("p", SIG), "z")
    with pytest.raises(TranslationError):
        TranslationState("v", "v")


def test_st_with_custom_designated_variables():
    phi = st(parse_hybrid("<> p", SIG), state=TranslationState("u", "v"))
    assert fol_to_text(phi) == "exists v . (R(u,v) & P(v))"


@given(kripke_models(), hybrid_formulas(SIG_PS, ("x1", "x2")))
def test_standard_translation_preserves_truth(model, phi):
    translated = st(phi)
    for w in model.worlds:
        for a in model.worlds:
            for b in model.worlds:
                expected = sat_hybrid(HybridContext(model, (a, b), w), phi)
                assert sat_fol(model, {STX: w, "x1": a, "x2": b}, translated) == expected


@given(kripke_models(), hybrid_formulas(SIG_PS, ("x1",)))
def test_back_translation_of_translation(model, phi):
    sentence = Down("x1", phi)
    back = sbt(st(sentence), SIG_PS)
    for w in model.worlds:
        ctx = HybridContext(model, (), w)
        assert sat_hybrid(ctx, back) == sat_hybrid(ctx, sentence)


def test_back_translation_of_a_first_order_formula():
    phi = parse_fol("exists y . (R(x,y) & forall z . (R(y,z) -> P(z)))", SIG)
    back = sbt(phi, SIG)
    model = random_model(random.Random(3), 4, SIG, 0.5)
    for w in model.worlds:
        assert sat_hybrid(HybridContext(model, (), w), back) == sat_fol(model, {"x": w}, phi)


def test_back_translation_errors():
    with pytest.raises(TranslationError):
        sbt(parse_fol("R(x,y)", SIG))
    expanded = Signature(("p",), ("s",), ("U",))
    with pytest.raises(TranslationError):
        sbt(parse_fol("U(x)", expanded), SIG)


def test_back_translation_reads_the_signature_off_the_formula():
    x = Var("x")
    phi = FoOr(FoPred("P", x), FoEq(x, Const("s")))
    back = sbt(phi)
    model = random_model(random.Random(4), 3, SIG, 0.5)
    for w in model.worlds:
        assert sat_hybrid(HybridContext(model, (), w), back) == sat_fol(model, {"x": w}, phi)
    with pytest.raises(TranslationError):
        sbt(FoPred("Pq", x))
    with pytest.raises(TranslationError):
        sbt(FoPred("R", x))
    with pytest.raises(TranslationError):
        sbt(FoEq(x, Const("t")), SIG)


def test_relativise():
    phi = parse_fol("exists x . P(x)", SIG)
    assert fol_to_text(relativise(phi, "U")) == "exists x . (U(x) & P(x))"
    assert fol_to_text(relativise(parse_fol("forall x . P(x)", SIG), "U")) == "forall x . (U(x) -> P(x))"
    with pytest.raises(TranslationError):
        relativise(parse_fol("exists x . U(x)", Signature((), (), ("U",))), "U")


def test_relativisation_reads_the_marked_part():
    rng = random.Random(11)
    sig = Signature(("p",))
    closed = [parse_fol(text, sig) for text in (
        "exists x . P(x)",
        "forall x . exists y . R(x,y)",
        "exists x . (P(x) & forall y . (R(x,y) -> ~P(y)))",
        "forall x . forall y . (R(x,y) -> R(y,x))",
    )]
    for _ in range(10):
        a = random_model(rng, rng.randint(1, 3), sig, 0.5, "a")
        b = random_model(rng, rng.randint(1, 3), sig, 0.5, "b")
        union = disjoint_union(a, b, left_pred="U")
        for phi in closed:
            assert sat_fol(a, {}, phi) == sat_fol(union, {}, relativise(phi, "U"))


def test_psi_sigma_shape_and_errors():
    sig = Signature(("p",))
    sigma = parse_fol("forall x . P(x)", sig)
    phi_s = parse_fol("exists y . R(x,y)", sig)
    formula = psi_sigma(sigma, phi_s)
    assert free_vars(formula) == {"x"}
    assert is_closed(instantiate(formula, "d"))
    assert quantifier_depth(formula) == 1
    with pytest.raises(TranslationError):
        psi_sigma(phi_s, phi_s)
    with pytest.raises(TranslationError):
        psi_sigma(sigma, sigma)
    with pytest.raises(TranslationError):
        psi_sigma(sigma, phi_s, pred="P")
    with pytest.raises(TranslationError):
        psi_sigma(sigma, phi_s, sig=Signature(("p",), ("d",)))


def test_invariance_counterexample_tracks_phi_s():
    sig = Signature(("p",))
    sigma = parse_fol("forall x . P(x)", sig)
    phi_s = parse_fol("exists y . R(x,y)", sig)
    countermodel = KripkeModel(["c0"], [], {"p": []})
    a = KripkeModel(["a0", "a1"], [("a0", "a1")], {"p": ["a0", "a1"]})
    witness = invariance_counterexample(sigma, countermodel, a, "a0", a, "a1", phi_s)
    assert sat_fol(witness.left, {}, witness.formula)
    assert not sat_fol(witness.right, {}, witness.formula)
