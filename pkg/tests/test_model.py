import json
import os
import random

import pytest
from hypothesis import given

from errors import FixtureError, ModelError, SignatureError
from logic.syntax import Signature
from world.contexts import ContextGrid
from world.fixtures import (depth_scope, fig1, fig2_chain, fig2_cycle, fig3_M, fig3_N, fig3_U, fixture,
                            fixture_names, is_unravelling_shape, random_model)
from world.kripke import (KripkeModel, PairRelation, Structure, contexts, disjoint_union, dump_model,
                          load_model, load_model_file, reachability)

from strategies import kripke_models


def test_model_validation():
    with pytest.raises(ModelError):
        KripkeModel([])
    with pytest.raises(ModelError):
        KripkeModel(["a", "a"])
    with pytest.raises(ModelError):
        KripkeModel(["a"], [("a", "b")])
    with pytest.raises(ModelError):
        KripkeModel(["a"], valuation={"p": ["b"]})
    with pytest.raises(ModelError):
        KripkeModel(["a"], nominals={"s": "b"})


def test_successors_follow_declared_order():
    m = KripkeModel(["c", "a", "b"], [("c", "b"), ("c", "a")])
    assert m.successors("c") == ("a", "b")
    assert m.successors("a") == ()


def test_load_model_document():
    m = load_model('{"worlds": ["w0", "w1"], "rel": [["w0", "w1"]], "prop": {"p": ["w1"]}, "nom": {"s": "w0"}}')
    assert m.successors("w0") == ("w1",)
    assert m.holds("p", "w1") and not m.holds("p", "w0")
    assert m.nominal("s") == "w0"


@pytest.mark.parametrize("doc", [
    "[1, 2]",
    '{"rel": []}',
    '{"worlds": ["a"], "edges": []}',
    '{"worlds": ["a"], "rel": [["a"]]}',
    '{"worlds": ["a"], "prop": {"p": "a"}}',
    '{"worlds": ["a"], "nom": {"s": ["a"]}}',
    '{"worlds": ["a"], "rel": [["a", "b"]]}',
    "{not json",
])
def test_load_model_rejects(doc):
    with pytest.raises(ModelError):
        load_model(doc)


def test_load_model_under_a_signature():
    doc = {"worlds": ["a"], "prop": {"p": ["a"]}}
    m = load_model(doc, Signature(("p", "q")))
    assert m.valuation == {"p": frozenset({"a"}), "q": frozenset()}
    with pytest.raises(ModelError):
        load_model(doc, Signature(("q",)))
    with pytest.raises(ModelError):
        load_model(doc, Signature(("p",), ("s",)))


def test_dump_and_reload(tmp_path):
    model = fig1().left
    path = os.path.join(tmp_path, "m.json")
    dump_model(model, path)
    assert load_model_file(path) == model


def test_bundled_model_files(models_dir):
    left = load_model_file(os.path.join(models_dir, "fig1M.json"))
    right = load_model_file(os.path.join(models_dir, "fig1N.json"))
    figure = fig1()
    assert left == figure.left
    assert right == figure.right
    with open(os.path.join(models_dir, "fig1B.json")) as f:
        assert PairRelation.from_json(json.load(f)) == figure.relation
    assert load_model_file(os.path.join(models_dir, "fig2chain.json")) == fig2_chain(4)
    assert load_model_file(os.path.join(models_dir, "fig2cycle.json")) == fig2_cycle(2)


def test_reachability_is_reflexive_transitive():
    chain = fig2_chain(3)
    assert reachability(chain) == frozenset({("m0", "m0"), ("m1", "m1"), ("m2", "m2"),
                                             ("m0", "m1"), ("m1", "m2"), ("m0", "m2")})
    assert not chain.reachable("m2", "m0")


@given(kripke_models(max_worlds=5))
def test_reachability_is_idempotent(model):
    closure = reachability(model)
    closed = KripkeModel(model.worlds, closure, model.valuation, model.nominals)
    assert reachability(closed) == closure
    assert all((w, w) in closure for w in model.worlds)
    assert model.rel <= closure
    assert all((a, d) in closure for a, b in closure for c, d in closure if b == c)


def test_pair_relation_json():
    rel = PairRelation(1, [((("a",), "b"), (("c",), "d"))])
    doc = rel.to_json()
    assert doc == {"k": 1, "pairs": [{"left": ["a", "b"], "right": ["c", "d"]}]}
    assert PairRelation.from_json(json.dumps(doc)) == rel
    with pytest.raises(ModelError):
        PairRelation(2, [((("a",), "b"), (("c",), "d"))])
    with pytest.raises(ModelError):
        PairRelation.from_json({"pairs": []})


def test_pair_relation_check_worlds(figure1):
    figure1.relation.check_worlds(figure1.left, figure1.right)
    with pytest.raises(ModelError):
        figure1.relation.check_worlds(figure1.right, figure1.left)


def test_disjoint_union_tags_worlds():
    a, b = fig2_chain(2), fig2_cycle(1)
    union = disjoint_union(a, b)
    assert isinstance(union, KripkeModel)
    assert union.worlds == ("A:m0", "A:m1", "B:n0")
    assert ("B:n0", "B:n0") in union.rel
    marked = disjoint_union(a, b, right_pred="U")
    assert isinstance(marked, Structure)
    assert marked.expansion.preds["U"] == frozenset({"B:n0"})


def test_disjoint_union_needs_one_signature():
    with pytest.raises(SignatureError):
        disjoint_union(fig2_chain(2), fig1().left)


def test_fixture_shapes():
    figure = fig1()
    assert figure.left.nominal("t") == "m1" and figure.right.nominal("t") == "n1"
    assert fig3_M(3).successors("m0") == ("m1", "m2")
    assert fig3_N(3).successors("n2") == ("n3",)
    assert is_unravelling_shape(fig3_U(4), "u0")
    assert not is_unravelling_shape(fig3_M(4), "m0")
    assert fig2_cycle(1).successors("n0") == ("n0",)


def test_fixture_registry():
    assert "fig3_UN" in fixture_names()
    assert fixture("fig2_chain", 3) == fig2_chain(3)
    assert fixture("fig2_cycle") == fig2_cycle(2)
    with pytest.raises(FixtureError):
        fixture("fig9")
    with pytest.raises(FixtureError):
        fixture("fig3_M")
    with pytest.raises(FixtureError):
        fixture("fig3_M", 0)
    with pytest.raises(FixtureError):
        fixture("fig1", 3)


def test_depth_scope():
    within = depth_scope(fig3_N(5), "n0", 4)
    assert within((((), "m3"), ((), "n3")))
    assert not within((((), "m4"), ((), "n4")))


def test_random_model_is_reproducible():
    sig = Signature(("p",), ("s",))
    a = random_model(random.Random(7), 4, sig)
    b = random_model(random.Random(7), 4, sig)
    assert a == b
    assert len(a) == 4 and set(a.nominals) == {"s"}


def test_context_grid_codes():
    model = fig2_chain(3)
    grid = ContextGrid(model, 2)
    assert grid.size == 27
    assert [grid.decode(c) for c in range(grid.size)] == contexts(model, 2)
    ctx = (("m1", "m2"), "m0")
    c = grid.encode(ctx)
    assert grid.decode(c) == ctx
    assert grid.decode(grid.bind[0][c]) == (("m0", "m2"), "m0")
    assert grid.decode(grid.jump_var[1][c]) == (("m1", "m2"), "m2")
    assert [grid.decode(v) for v in grid.succ[c]] == [(("m1", "m2"), "m1")]
    assert {grid.decode(v)[0] for v in grid.variants[1][c]} == {("m1", "m0"), ("m1", "m1"), ("m1", "m2")}
    assert grid.wvar[grid.encode((("m0", "m1"), "m1"))] == (False, True)
    assert grid.constant("m2") == grid.encode((("m2", "m2"), "m2"))
    with pytest.raises(KeyError):
        grid.encode((("m9", "m0"), "m0"))


def test_context_grid_extend():
    model = fig2_chain(3)
    small, big = ContextGrid(model, 1), ContextGrid(model, 2)
    c = small.encode((("m0",), "m2"))
    assert big.decode(small.extend(c)) == (("m0", "m2"), "m2")


def test_context_grid_nominal_jumps(figure1):
    grid = ContextGrid(figure1.left, 1)
    c = grid.encode((("m2",), "m0"))
    assert grid.decode(grid.jump_nom[1][c]) == (("m2",), "m1")
    props, noms = grid.local[c]
    assert props == (True,) and noms == (True, False)
