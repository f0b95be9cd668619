"""End-to-end checks tying the evaluators, translations, bisimulation fixpoint and oracle together."""

import random
from functools import lru_cache
from itertools import product

import pytest
from hypothesis import given, settings

from bisim.conditions import ConditionTag
from bisim.family import decide_equiv, max_kl_family
from bisim.omega import (example46_family, is_quasi_injective, qinj_to_family, verify_omega_family,
                         verify_plain_bisim)
from logic.fol import FoAnd, FoEq, FoExists, FoForall, FoNot, FoOr, FoPred, FoRel, Var, is_closed
from logic.semantics import HybridContext, sat_fol, sat_hybrid, truth_vector
from logic.syntax import ALL_FEATURES, Dia, Down, Exists, Feature, NO_FEATURES, WVar, degree
from logic.translate import relativise, sbt, st
from oracle.search import separating_formula
from oracle.strata import agree_up_to, axiomatise, enumerate_strata
from oracle.universe import Universe
from settings import STX
from world.fixtures import depth_scope, fig1, fig2_chain, fig2_cycle, fig3_N, fig3_MN, fig3_UN, random_model
from world.kripke import PointedModel, disjoint_union

from strategies import SIG_PS, enumerate_sentences, hybrid_formulas, kripke_models, random_pairs

DOWN = frozenset({Feature.DOWN})
HYBRID = frozenset({Feature.NOM, Feature.DOWN, Feature.AT})
FEATURE_SETS = [frozenset(f) for f in (
    (), (Feature.DOWN,), (Feature.NOM,), (Feature.DOWN, Feature.NOM), (Feature.AT,),
    (Feature.AT, Feature.NOM), (Feature.EXISTS,), (Feature.AT, Feature.DOWN),
)]
LEVELS = range(3)


def sweep_fixtures():
    figure = fig1(SIG_PS)
    return [figure.left, figure.right, fig2_chain(4, SIG_PS), fig2_cycle(2, SIG_PS), fig3_N(4, SIG_PS)]


@lru_cache(maxsize=None)
def sweep_sentences():
    return tuple(enumerate_sentences(SIG_PS, ("x1",), 2))


@pytest.mark.slow
def test_standard_translation_sweep():
    mismatches = []
    for model in sweep_fixtures():
        for phi in sweep_sentences():
            translated = st(phi)
            for w in model.worlds:
                if sat_hybrid(HybridContext(model, (), w), phi) != sat_fol(model, {STX: w}, translated):
                    mismatches.append((model.name, w, phi))
    assert mismatches == []


@pytest.mark.slow
def test_back_translation_sweep():
    mismatches = []
    for phi in sweep_sentences():
        back = sbt(st(phi), SIG_PS)
        for model in sweep_fixtures():
            if truth_vector([model], 0, back) != truth_vector([model], 0, phi):
                mismatches.append((model.name, phi))
    assert mismatches == []


@lru_cache(maxsize=None)
def master_corpus():
    """(pair, m, n, features, k, L) -> (fixpoint verdict, oracle verdict) at every pair of points."""
    results = {}
    for index, (left, right) in enumerate(random_pairs(100, seed=2024, sig=SIG_PS)):
        for features, k, L in product(FEATURE_SETS, range(3), LEVELS):
            fam = max_kl_family(left, right, features, k, L)
            universe = Universe([left, right], k, features)
            top = enumerate_strata(universe, L)[-1]
            for m, n in product(left.worlds, right.worlds):
                equiv = all((((m,) * j, m), ((n,) * j, n)) in fam[(j, 0)] for j in range(k + 1))
                oracle = top.block_of(universe.seed(0, m)) == top.block_of(universe.seed(1, n))
                results[index, m, n, features, k, L] = (equiv, oracle)
    return results


@pytest.mark.slow
def test_fixpoint_matches_oracle():
    disagreements = [key for key, (equiv, oracle) in master_corpus().items() if equiv != oracle]
    assert disagreements == []


@pytest.mark.slow
def test_corpus_readings_match_the_deciders():
    results = master_corpus()
    for index, (left, right) in enumerate(random_pairs(10, seed=2024, sig=SIG_PS)):
        Mp, Np = PointedModel(left, "a0"), PointedModel(right, "b0")
        for features, k, L in product(FEATURE_SETS, range(3), LEVELS):
            assert results[index, "a0", "b0", features, k, L] == (decide_equiv(Mp, Np, features, L, K=k),
                                                                  agree_up_to(Mp, Np, features, k, L))


@pytest.mark.slow
def test_equivalence_is_monotone():
    results = master_corpus()
    broken = []
    for (index, m, n, features, k, L), (equiv, _) in results.items():
        if not equiv:
            continue
        for smaller in FEATURE_SETS:
            if smaller <= features and not results[index, m, n, smaller, k, L][0]:
                broken.append(("features", index, m, n, smaller, features, k, L))
        for lower in range(L):
            if not results[index, m, n, features, k, lower][0]:
                broken.append(("level", index, m, n, features, k, lower, L))
    assert broken == []


@settings(max_examples=200)
@given(kripke_models(SIG_PS, max_worlds=3), hybrid_formulas(SIG_PS, ("x1", "x2"), ALL_FEATURES, max_leaves=10))
def test_standard_translation_under_every_assignment(model, phi):
    translated = st(phi)
    for x1, x2, w in product(model.worlds, repeat=3):
        env = {STX: w, "x1": x1, "x2": x2}
        assert sat_hybrid(HybridContext(model, (x1, x2), w), phi) == sat_fol(model, env, translated)


@settings(max_examples=200)
@given(kripke_models(SIG_PS, max_worlds=3), hybrid_formulas(SIG_PS, ("x1", "x2"), ALL_FEATURES, max_leaves=10))
def test_back_translation_at_every_point(model, phi):
    sentence = Down("x1", Exists("x2", phi))
    back = sbt(st(sentence), SIG_PS)
    assert truth_vector([model], 0, back) == truth_vector([model], 0, sentence)


def test_leaf_pairing_breaks_nominals():
    M, N, B = fig1()
    assert verify_plain_bisim(M, N, B).ok
    report = verify_plain_bisim(M, N, B, with_nom=True)
    assert [(v.tag, v.pair) for v in report.violations] == [(ConditionTag.NOM, (((), "m2"), ((), "n1")))]
    assert N.nominal("t") == "n1" and M.nominal("t") != "m2"


def test_chain_and_cycle_split_with_binder():
    chain, cycle = PointedModel(fig2_chain(4), "m0"), PointedModel(fig2_cycle(2), "n0")
    assert decide_equiv(chain, cycle, NO_FEATURES, 3)
    assert not decide_equiv(chain, cycle, DOWN, 3, K=1)
    found = separating_formula(chain, cycle, DOWN, 1, 3)
    models = [chain.model, cycle.model]
    assert degree(found) == 3
    assert truth_vector(models, 1, found) == truth_vector(models, 1, Down("x1", Dia(Dia(WVar("x1")))))


def test_unravelling_is_quasi_injective():
    within = depth_scope(fig3_N(5), "n0", 4)
    assert not is_quasi_injective(*fig3_MN(5), within=within)
    U, N, B = fig3_UN(5)
    assert is_quasi_injective(U, N, B, within=within)
    family = qinj_to_family(U, N, B, 2, within=within)
    assert verify_omega_family(U, N, family, DOWN, 2, within=within).ok


def test_three_branch_family_fails_exactly_the_jumps():
    within = depth_scope(fig3_N(5), "n0", 4)
    M, N, family = example46_family(5, 2)
    report = verify_omega_family(M, N, family, HYBRID, 2, within=within)
    assert report.tags() == {ConditionTag.ATV}
    assert report.of(ConditionTag.ATV)[0].pair is not None


def closed_fol_formulas(limit=50):
    x, y = Var("x"), Var("y")
    atoms = [FoPred("P", x), FoPred("P", y), FoRel(x, y), FoRel(y, x), FoRel(x, x), FoEq(x, y)]
    bodies = list(atoms) + [FoNot(a) for a in atoms]
    bodies += [FoAnd(a, b) for a, b in product(atoms, repeat=2) if a != b]
    bodies += [FoOr(FoNot(a), b) for a, b in product(atoms, repeat=2) if a != b]
    prefixes = [(FoExists, FoForall), (FoForall, FoExists), (FoExists, FoExists), (FoForall, FoForall)]
    formulas = []
    for body in bodies:
        for outer, inner in prefixes:
            formulas.append(outer("x", inner("y", body)))
    rng = random.Random(5)
    return rng.sample(formulas, limit)


def test_relativisation_to_the_left_part():
    sentences = closed_fol_formulas()
    assert all(is_closed(phi) for phi in sentences)
    rng = random.Random(9)
    mismatches = []
    for _ in range(20):
        a = random_model(rng, rng.randint(1, 3), SIG_PS, rng.uniform(0.2, 0.7), "a")
        b = random_model(rng, rng.randint(1, 3), SIG_PS, rng.uniform(0.2, 0.7), "b")
        union = disjoint_union(a, b, left_pred="UA")
        for phi in sentences:
            if sat_fol(a, {}, phi) != sat_fol(union, {}, relativise(phi, "UA")):
                mismatches.append((a.name, b.name, phi))
    assert mismatches == []


def test_axiomatisation_of_finite_classes():
    rng = random.Random(17)
    L = 2
    k = 2
    for _ in range(10):
        members = []
        for _ in range(rng.randint(1, 3)):
            model = random_model(rng, rng.randint(1, 3), SIG_PS, rng.uniform(0.2, 0.7), "a")
            members.append(PointedModel(model, rng.choice(model.worlds)))
        probe_models = [random_model(rng, rng.randint(1, 3), SIG_PS, rng.uniform(0.2, 0.7), "b") for _ in range(3)]
        probes = [PointedModel(m, w) for m in probe_models for w in m.worlds]
        phi = axiomatise(members, HYBRID, L, probes=probes)
        for pm in members:
            assert sat_hybrid(HybridContext(pm.model, (pm.point,) * k, pm.point), phi)
        for probe in probes:
            if sat_hybrid(HybridContext(probe.model, (probe.point,) * k, probe.point), phi):
                assert any(agree_up_to(pm, probe, HYBRID, k, L) for pm in members)
