import pytest

from bisim.conditions import ConditionTag
from bisim.omega import (example46_family, is_quasi_injective, qinj_to_family, verify_omega_family,
                         verify_plain_bisim)
from errors import FamilyError
from logic.syntax import Feature, NO_FEATURES
from world.fixtures import depth_scope, fig2_chain, fig2_cycle, fig3_N
from world.kripke import PairRelation

DOWN = frozenset({Feature.DOWN})
HYBRID = frozenset({Feature.NOM, Feature.DOWN, Feature.AT})


def inside(depth: int = 5):
    return depth_scope(fig3_N(depth), "n0", depth - 1)


def test_figure1_relation_breaks_nominals(figure1):
    M, N, B = figure1
    assert verify_plain_bisim(M, N, B).ok
    report = verify_plain_bisim(M, N, B, with_nom=True)
    assert report.tags() == {ConditionTag.NOM}
    assert [v.pair for v in report.violations] == [(((), "m2"), ((), "n1"))]


def test_plain_bisim_reports_back():
    chain, cycle = fig2_chain(2), fig2_cycle(2)
    B = PairRelation.lift([("m0", "n0"), ("m1", "n1")])
    report = verify_plain_bisim(chain, cycle, B)
    assert report.tags() == {ConditionTag.BACK}
    with pytest.raises(FamilyError):
        verify_plain_bisim(chain, cycle, PairRelation(1))


def test_quasi_injectivity_of_the_truncated_structures(figure3_mn, figure3_un):
    assert verify_plain_bisim(*figure3_mn, within=inside()).ok
    assert not is_quasi_injective(*figure3_mn, within=inside())
    assert is_quasi_injective(*figure3_un, within=inside())


def test_truncation_frontier_is_not_a_bisimulation(figure3_un):
    assert not verify_plain_bisim(*figure3_un).ok


def test_quasi_injective_relation_gives_an_omega_family(figure3_un):
    U, N, B = figure3_un
    family = qinj_to_family(U, N, B, 2, within=inside())
    assert sorted(family) == [0, 1, 2]
    assert family[0].states() == B.states()
    assert ((("u1",), "u3"), (("n1",), "n3")) in family[1]
    assert ((("u1",), "u3p"), (("n1",), "n2")) not in family[1]
    assert verify_omega_family(U, N, family, DOWN, 2, within=inside()).ok
    jumps = verify_omega_family(U, N, family, HYBRID, 2, within=inside())
    assert jumps.tags() == {ConditionTag.ATV}


def test_qinj_to_family_rejects_crossing_partners(figure3_mn):
    with pytest.raises(FamilyError):
        qinj_to_family(*figure3_mn, 1, within=inside())


def test_three_branch_family_fails_only_jumps():
    M, N, family = example46_family(5, 2)
    report = verify_omega_family(M, N, family, HYBRID, 2, within=inside())
    assert report.tags() == {ConditionTag.ATV}
    assert all(v.k == 2 for v in report.violations)
    assert verify_omega_family(M, N, family, DOWN, 2, within=inside()).ok
    pair = ((("m1", "m2"), "m2"), (("n1", "n2"), "n2"))
    assert any(v.pair == pair for v in report.violations)


def test_three_branch_family_with_one_slot_is_sound():
    M, N, family = example46_family(5, 1)
    assert verify_omega_family(M, N, family, HYBRID, 1, within=inside()).ok


def test_three_branch_family_needs_depth():
    with pytest.raises(FamilyError):
        example46_family(1, 1)


def test_omega_family_shape_errors(figure3_un):
    U, N, B = figure3_un
    with pytest.raises(FamilyError):
        verify_omega_family(U, N, {0: B}, NO_FEATURES, 1)
    with pytest.raises(FamilyError):
        verify_omega_family(U, N, {0: B, 1: B}, NO_FEATURES, 1)


def test_empty_relation_is_reported(figure3_un):
    U, N, B = figure3_un
    report = verify_omega_family(U, N, {0: B, 1: PairRelation(1)}, NO_FEATURES, 1, within=inside())
    seeds = report.of(ConditionTag.SEED)
    assert len(seeds) == 1 and seeds[0].pair is None and seeds[0].k == 1
    assert ConditionTag.EXT in report.tags()
