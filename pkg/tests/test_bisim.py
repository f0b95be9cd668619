import random
from itertools import product

import pytest
from hypothesis import given

from bisim.checker import PairChecker, coded_relation, first_failure
from bisim.conditions import (BASE_CONDITIONS, GATED_CONDITIONS, ConditionTag, VerifyReport, Violation,
                              conds)
from bisim.family import BisimFamily, decide_equiv, guard, max_kl_family, union_family, verify_kl_family
from bisim.omega import verify_omega_family
from errors import FamilyError, ResourceGuardError
from logic.syntax import ALL_FEATURES, NO_FEATURES, Feature
from world.fixtures import fig2_chain, fig2_cycle
from world.kripke import PairRelation, PointedModel

from strategies import kripke_models, random_pairs

NOM = frozenset({Feature.NOM})
DOWN = frozenset({Feature.DOWN})
T = ConditionTag


@pytest.mark.parametrize("features, expected", [
    (NO_FEATURES, set()),
    (NOM, {T.NOM}),
    (DOWN, {T.BIND}),
    (frozenset({Feature.AT}), {T.ATV}),
    (frozenset({Feature.AT, Feature.NOM}), {T.ATV, T.ATN, T.NOM}),
    (frozenset({Feature.EXISTS}), {T.EX_F, T.EX_B}),
    (frozenset({Feature.DOWN, Feature.AT}), {T.BIND, T.ATV}),
    (ALL_FEATURES, set(GATED_CONDITIONS)),
])
def test_conds(features, expected):
    assert conds(features) == frozenset(expected)


def test_base_conditions_are_never_gated():
    assert not BASE_CONDITIONS & GATED_CONDITIONS


def test_violation_rendering():
    pair = ((("a",), "b"), (("c",), "d"))
    v = Violation(T.FORTH, 1, 1, pair, "no match")
    assert v.to_json() == {"tag": "forth", "level": 1, "k": 1, "detail": "no match",
                           "left": ["a", "b"], "right": ["c", "d"]}
    assert str(v) == "(forth) at Z[1][1] pair ((a),b) ~ ((c),d): no match"
    empty = Violation(T.SEED, None, 2, None, "relation is empty")
    assert "left" not in empty.to_json()
    assert str(empty) == "(seed) at B_2: relation is empty"


def test_report_helpers():
    report = VerifyReport()
    assert report.ok
    report.add(T.NOM, None, 0, None, "x")
    report.add(T.BACK, None, 0, None, "y")
    assert not report.ok
    assert report.tags() == {T.NOM, T.BACK}
    assert len(report.of(T.NOM)) == 1
    assert report.to_json()["ok"] is False


def test_checker_local_pairs_respect_nominals(figure1):
    plain = PairChecker(figure1.left, figure1.right, 0, NO_FEATURES)
    with_nom = PairChecker(figure1.left, figure1.right, 0, NOM)
    assert len(plain.local_pairs(0)) == 6
    named = {with_nom.decode(0, p) for p in with_nom.local_pairs(0)}
    assert named == {(((), "m0"), ((), "n0")), (((), "m1"), ((), "n1"))}


def test_checker_failures(figure1):
    checker = PairChecker(figure1.left, figure1.right, 0, NOM)
    coded, checked = coded_relation(checker, 0, figure1.relation)
    bad = checker.encode(0, (((), "m2"), ((), "n1")))
    assert bad in checked
    assert first_failure(checker.local(0, bad))[0] == T.NOM
    good = checker.encode(0, (((), "m0"), ((), "n0")))
    assert first_failure(checker.stepping(0, good, coded)) is None
    with pytest.raises(FamilyError):
        checker.encode(0, (((), "m9"), ((), "n0")))
    with pytest.raises(FamilyError):
        checker.encode(1, (((), "m0"), ((), "n0")))


def test_family_validation_and_json():
    rel = PairRelation(0, [(((), "m0"), ((), "n0"))])
    fam = BisimFamily(0, 1, {(0, 0): rel, (0, 1): rel})
    assert BisimFamily.from_json(fam.to_json()) == fam
    assert fam.prefix(0).L == 0
    assert fam.top(0) == rel
    with pytest.raises(FamilyError):
        BisimFamily(0, 1, {(1, 0): PairRelation(1)})
    with pytest.raises(FamilyError):
        BisimFamily(1, 1, {(1, 0): PairRelation(0)})
    with pytest.raises(FamilyError):
        BisimFamily(-1, 0)
    with pytest.raises(FamilyError):
        BisimFamily.from_json({"K": 0, "L": 0, "levels": {"zero": []}})


def test_chain_and_seed_violations():
    chain, cycle = fig2_chain(2), fig2_cycle(2)
    pair = (((), "m0"), ((), "n0"))
    fam = BisimFamily(0, 1, {(0, 0): PairRelation(0, [pair])})
    report = verify_kl_family(chain, cycle, fam, NO_FEATURES, seed=("m1", "n1"))
    assert T.CHAIN in report.tags()
    assert report.of(T.SEED)[0].pair == (((), "m1"), ((), "n1"))


def test_extension_violation():
    chain, cycle = fig2_chain(2), fig2_cycle(2)
    top = PairRelation(0, [(((), m), ((), n)) for m in chain.worlds for n in cycle.worlds])
    fam = BisimFamily(1, 1, {(0, 0): PairRelation(0, [(((), "m1"), ((), "n1"))]), (0, 1): top})
    report = verify_kl_family(chain, cycle, fam, NO_FEATURES)
    assert T.EXT in report.tags()


def test_plain_chain_against_cycle():
    chain, cycle = fig2_chain(4), fig2_cycle(2)
    fam = max_kl_family(chain, cycle, NO_FEATURES, 0, 3)
    levels = {i: {m for (_, m), _ in fam[(0, i)]} for i in range(4)}
    assert levels == {0: {"m0"}, 1: {"m0", "m1"}, 2: {"m0", "m1", "m2"}, 3: set(chain.worlds)}
    assert verify_kl_family(chain, cycle, fam, NO_FEATURES, seed=("m0", "n0")).ok


def test_decide_equiv_on_chain_and_cycle():
    chain, cycle = PointedModel(fig2_chain(4), "m0"), PointedModel(fig2_cycle(2), "n0")
    assert decide_equiv(chain, cycle, NO_FEATURES, 3)
    assert not decide_equiv(chain, cycle, NO_FEATURES, 4)
    assert not decide_equiv(chain, cycle, DOWN, 3, K=1)
    assert decide_equiv(chain, cycle, DOWN, 2, K=0)
    # the seed stores m0 / n0 in x1, and <> <> ?x1 already tells them apart
    assert not decide_equiv(chain, cycle, DOWN, 2)


@given(kripke_models(max_worlds=3), kripke_models(max_worlds=3, prefix="v"))
def test_greatest_family_passes_verification(left, right):
    for features in (NO_FEATURES, frozenset({Feature.DOWN, Feature.AT, Feature.NOM}), frozenset({Feature.EXISTS})):
        fam = max_kl_family(left, right, features, 1, 2)
        assert verify_kl_family(left, right, fam, features).ok


def test_guard():
    chain, cycle = fig2_chain(4), fig2_cycle(2)
    assert guard(chain, cycle, 1, 2) == 8 ** 2 * 3
    with pytest.raises(ResourceGuardError):
        guard(chain, cycle, 1, 2, max_pairs=100)
    with pytest.raises(ResourceGuardError):
        max_kl_family(chain, cycle, DOWN, 2, 3, max_pairs=1000)


def test_guard_reads_the_environment(monkeypatch):
    monkeypatch.setenv("HYBIS_MAX_PAIRS", "10")
    with pytest.raises(ResourceGuardError):
        guard(fig2_chain(4), fig2_cycle(2), 0, 1)


def test_union_family():
    small, big = fig2_cycle(2), fig2_cycle(4)
    fams = [max_kl_family(small, big, NO_FEATURES, 0, L) for L in (0, 1)]
    union = union_family(small, big, fams, NO_FEATURES)
    assert len(union[0]) == 8
    assert union_family(small, big, fams[:1], NO_FEATURES)[0] == fams[0].top(0)
    with pytest.raises(FamilyError):
        union_family(small, big, [], NO_FEATURES)
    with pytest.raises(FamilyError):
        union_family(small, big, list(reversed(fams)), NO_FEATURES)
    with pytest.raises(FamilyError):
        union_family(small, big, [fams[0], max_kl_family(small, big, NO_FEATURES, 1, 2)], NO_FEATURES)


def test_union_family_drops_pairs_without_witnesses(figure1):
    M, N, B = figure1
    fams = [max_kl_family(M, N, NO_FEATURES, 0, L) for L in range(4)]
    assert all(verify_kl_family(M, N, fam, NO_FEATURES).ok for fam in fams)
    assert (((), "m0"), ((), "n1")) in fams[-1].top(0)
    union = union_family(M, N, fams, NO_FEATURES)
    assert verify_omega_family(M, N, union, NO_FEATURES, 0).ok
    assert (((), "m0"), ((), "n1")) not in union[0]
    assert B.pairs <= union[0].pairs


def test_union_family_with_binders_is_an_omega_family():
    cycle = fig2_cycle(3)
    fams = [max_kl_family(cycle, cycle, DOWN, 1, L) for L in (1, 2)]
    union = union_family(cycle, cycle, fams, DOWN)
    assert verify_omega_family(cycle, cycle, union, DOWN, 1).ok
    with pytest.raises(FamilyError):
        union_family(fig2_chain(1), fig2_cycle(1), [max_kl_family(fig2_chain(1), fig2_cycle(1), NO_FEATURES, 0, 0)],
                     NO_FEATURES)


def all_contexts(model, k):
    return [(t, w) for t in product(model.worlds, repeat=k) for w in model.worlds]


@pytest.mark.parametrize("features", [NO_FEATURES, DOWN, frozenset({Feature.AT, Feature.NOM}),
                                      frozenset({Feature.EXISTS})])
def test_maximal_family_cannot_grow(features):
    rng = random.Random(31)
    K, L = 1, 2
    for left, right in random_pairs(4, seed=11, max_worlds=3):
        fam = max_kl_family(left, right, features, K, L)
        absent = [(k, i, (lc, rc)) for (k, i) in sorted(fam.Z)
                  for lc in all_contexts(left, k) for rc in all_contexts(right, k) if (lc, rc) not in fam[(k, i)]]
        for k, i, pair in rng.sample(absent, min(50, len(absent))):
            grown = BisimFamily(K, L, {**fam.Z, (k, i): PairRelation(k, fam[(k, i)].pairs | {pair})})
            assert not verify_kl_family(left, right, grown, features).ok
