"""
Unlevelled relations: plain bisimulations, bounded ω-families (B_k)_{k ≤ Kbound},
quasi-injectivity and the constructions that turn a quasi-injective bisimulation,
or the truncated three-branch structures, into families.
"""

import logging
from itertools import combinations, product
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from bisim.checker import PairChecker, coded_relation
from bisim.conditions import ConditionTag, VerifyReport
from errors import FamilyError
from logic.syntax import Feature, FeatureSet, NO_FEATURES
from world.fixtures import fig3_M, fig3_N, fig3_MN
from world.kripke import KripkeModel, Pair, PairRelation

log = logging.getLogger(__name__)

Within = Optional[Callable[[Pair], bool]]


def verify_omega_family(M: KripkeModel, N: KripkeModel, B: Mapping[int, PairRelation], F: FeatureSet,
                        Kbound: int, within: Within = None) -> VerifyReport:
    """
    Check B_0..B_Kbound: every condition is evaluated inside B_k itself, and ext
    sends B_k into B_(k+1) for k < Kbound.

    Args:
        M (KripkeModel): Left model.
        N (KripkeModel): Right model.
        B (Mapping[int, PairRelation]): B_k for every k ≤ Kbound.
        F (FeatureSet): Hybrid features selecting cond(F).
        Kbound (int): Largest tuple length checked.
        within (Callable[[Pair], bool], optional): Only pairs it accepts are checked.

    Returns:
        VerifyReport: Violations with level None; an empty B_k is reported without a pair.

    Raises:
        FamilyError: If some B_k is missing or has the wrong tuple length.
    """
    for k in range(Kbound + 1):
        if k not in B:
            raise FamilyError(f"B_{k} is missing")
        if B[k].k != k:
            raise FamilyError(f"B_{k} has tuple length {B[k].k}")
    checker = PairChecker(M, N, Kbound, F)
    coded, checked = {}, {}
    for k in range(Kbound + 1):
        coded[k], checked[k] = coded_relation(checker, k, B[k], within)
    report = VerifyReport()
    for k in range(Kbound + 1):
        if not coded[k]:
            report.add(ConditionTag.SEED, None, k, None, "relation is empty")
        for pair in checked[k]:
            named = checker.decode(k, pair)
            failures = [*checker.local(k, pair), *checker.stepping(k, pair, coded[k]),
                        *checker.jumps(k, pair, coded[k])]
            if k < Kbound:
                failures += checker.extension(k, pair, coded[k + 1])
            for tag, detail in failures:
                report.add(tag, None, k, named, detail)
    log.debug(f"[VERIFY] omega family up to k={Kbound}: {len(report.violations)} violation(s)")
    return report


def verify_plain_bisim(M: KripkeModel, N: KripkeModel, B: PairRelation, with_nom: bool = False,
                       within: Within = None) -> VerifyReport:
    """prop, forth and back on a state relation, plus nom when ``with_nom``."""
    if B.k != 0:
        raise FamilyError(f"a plain bisimulation relates states, got tuple length {B.k}")
    checker = PairChecker(M, N, 0, frozenset({Feature.NOM}) if with_nom else NO_FEATURES)
    coded, checked = coded_relation(checker, 0, B, within)
    report = VerifyReport()
    for pair in checked:
        named = checker.decode(0, pair)
        for tag, detail in [*checker.local(0, pair), *checker.stepping(0, pair, coded)]:
            report.add(tag, None, 0, named, detail)
    return report


def _crossing_pairs(states, left: KripkeModel, right: KripkeModel) -> List[Tuple[str, str, str]]:
    """Worlds of ``right`` sharing a partner in ``left`` while one reaches the other."""
    partners: Dict[str, List[str]] = {}
    for m, n in sorted(states):
        partners.setdefault(m, []).append(n)
    found = []
    for m, ns in partners.items():
        for a, b in combinations(ns, 2):
            if right.reachable(a, b) or right.reachable(b, a):
                found.append((m, a, b))
    return found


def is_quasi_injective(M: KripkeModel, N: KripkeModel, B: PairRelation, within: Within = None) -> bool:
    """
    True when B is a bisimulation and any two distinct worlds sharing a partner are
    mutually unreachable, on both sides.

    ``within`` restricts the bisimulation check only; the reachability condition
    always covers every pair of B.
    """
    if not verify_plain_bisim(M, N, B, within=within).ok:
        return False
    states = B.states()
    clashes = _crossing_pairs(states, M, N)
    clashes += _crossing_pairs({(n, m) for m, n in states}, N, M)
    if clashes:
        log.debug(f"[VERIFY] not quasi-injective, first clash {clashes[0]}")
    return not clashes


def qinj_to_family(M: KripkeModel, N: KripkeModel, B: PairRelation, K: int,
                   within: Within = None) -> Dict[int, PairRelation]:
    """
    B_k for k ≤ K: ((m̄, m), (n̄, n)) with (m, n) and every (m̄(j), n̄(j)) in B, and m
    (resp. n) reachable from every m̄(j) (resp. n̄(j)).

    Raises:
        FamilyError: If B is not quasi-injective.
    """
    if not is_quasi_injective(M, N, B, within):
        raise FamilyError("the relation is not a quasi-injective bisimulation")
    states = sorted(B.states())
    family = {}
    for k in range(K + 1):
        pairs = []
        for word in product(states, repeat=k):
            for m, n in states:
                if all(M.reachable(a, m) and N.reachable(b, n) for a, b in word):
                    pairs.append(((tuple(a for a, _ in word), m), (tuple(b for _, b in word), n)))
        family[k] = PairRelation(k, pairs)
    return family


def _alphabet(i: int, j: int) -> List[Tuple[str, str]]:
    letters = [("m0", "n0")]
    if i == j and i >= 1:
        letters += [(f"m{t}", f"n{t}") for t in range(1, i + 1)]
    elif i == j + 1:
        letters += [(f"m{t + 1}", f"n{t}") for t in range(1, j + 1)]
    return letters


def example46_family(depth: int, Kbound: int) -> Tuple[KripkeModel, KripkeModel, Dict[int, PairRelation]]:
    """
    The family over the truncated three-branch structures M and N that records runs
    through pairs of B: a pair whose current worlds are (m_i, n_j) carries tuples of
    pairs of B visited on the way from (m0, n0) along the same branch.

    It satisfies every condition except atv.

    Raises:
        FamilyError: If depth < 2.
    """
    if depth < 2:
        raise FamilyError(f"depth must be at least 2, got {depth}")
    M, N = fig3_M(depth), fig3_N(depth)
    B = fig3_MN(depth).relation
    family = {}
    for k in range(Kbound + 1):
        pairs = []
        for m, n in sorted(B.states()):
            letters = _alphabet(int(m[1:]), int(n[1:]))
            for word in product(letters, repeat=k):
                pairs.append(((tuple(a for a, _ in word), m), (tuple(b for _, b in word), n)))
        family[k] = PairRelation(k, pairs)
    return M, N, family
