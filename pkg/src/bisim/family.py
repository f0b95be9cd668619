"""
Leveled bisimulation families Z[k][i] (tuple length k ≤ K, level i ≤ L).

Level 0 is the seed level. forth, back, bind and ex at level i take their witnesses
at level i + 1; atv and atn stay on the same level; ext sends Z[k][i] into Z[k+1][i+1];
and every level is included in the next one. Pairs on the top level L only have to
pass the local conditions.
"""

import json
import logging
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

from bisim.checker import CodedPair, PairChecker, coded_relation, first_failure
from bisim.conditions import ConditionTag, VerifyReport
from bisim.omega import verify_omega_family
from errors import FamilyError, ResourceGuardError
from logic.syntax import FeatureSet, default_k
from settings import DEFAULT_MAX_PAIRS, MAX_PAIRS_ENV, resolve_limit
from world.kripke import KripkeModel, Pair, PairRelation, PointedModel

log = logging.getLogger(__name__)

Level = Tuple[int, int]


class BisimFamily:
    """
    A family of pair relations indexed by (tuple length, level).

    Attributes:
        K (int): Largest tuple length.
        L (int): Largest level.
        Z (Dict[Tuple[int, int], PairRelation]): Relation of every (k, i).
    """
    def __init__(self, K: int, L: int, Z: Optional[Mapping[Level, PairRelation]] = None) -> None:
        """
        Raises:
            FamilyError: On negative bounds, an index outside the bounds or a tuple length mismatch.
        """
        if K < 0 or L < 0:
            raise FamilyError(f"bounds must be non-negative, got K={K}, L={L}")
        self.K, self.L = K, L
        self.Z: Dict[Level, PairRelation] = {(k, i): PairRelation(k) for k in range(K + 1) for i in range(L + 1)}
        for (k, i), rel in (Z or {}).items():
            if (k, i) not in self.Z:
                raise FamilyError(f"level ({k},{i}) is outside K={K}, L={L}")
            if rel.k != k:
                raise FamilyError(f"relation at ({k},{i}) has tuple length {rel.k}")
            self.Z[(k, i)] = rel

    def __getitem__(self, index: Level) -> PairRelation:
        return self.Z[index]

    def top(self, k: int) -> PairRelation:
        return self.Z[(k, self.L)]

    def prefix(self, L: int) -> "BisimFamily":
        """The levels 0..L of this family, itself a family with bound L."""
        if not 0 <= L <= self.L:
            raise FamilyError(f"prefix bound {L} outside 0..{self.L}")
        return BisimFamily(self.K, L, {(k, i): rel for (k, i), rel in self.Z.items() if i <= L})

    def size(self) -> int:
        return sum(len(rel) for rel in self.Z.values())

    def to_json(self) -> Dict[str, Any]:
        levels = {f"{k},{i}": rel.to_json()["pairs"] for (k, i), rel in sorted(self.Z.items())}
        return {"K": self.K, "L": self.L, "levels": levels}

    @classmethod
    def from_json(cls, data: Union[str, bytes, Mapping[str, Any]]) -> "BisimFamily":
        """
        Read the ``{"K": int, "L": int, "levels": {"k,i": pairs}}`` document.

        Raises:
            FamilyError: On a malformed document.
        """
        doc = json.loads(data) if isinstance(data, (str, bytes)) else data
        try:
            K, L = int(doc["K"]), int(doc["L"])
            Z = {}
            for key, pairs in doc["levels"].items():
                k, i = (int(part) for part in key.split(","))
                Z[(k, i)] = PairRelation.from_json({"k": k, "pairs": pairs})
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise FamilyError(f"malformed family: {e}")
        return cls(K, L, Z)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BisimFamily):
            return NotImplemented
        return (self.K, self.L, self.Z) == (other.K, other.L, other.Z)

    def __repr__(self) -> str:
        return f"BisimFamily(K={self.K}, L={self.L}, pairs={self.size()})"


def _failures(checker: PairChecker, Z: Mapping[Level, Any], L: int, k: int, i: int, pair: CodedPair):
    if i < L:
        nxt = Z[(k, i + 1)]
        if pair not in nxt:
            yield ConditionTag.CHAIN, f"missing from level {i + 1}"
        yield from checker.stepping(k, pair, nxt)
        if k < checker.K:
            yield from checker.extension(k, pair, Z[(k + 1, i + 1)])
    yield from checker.jumps(k, pair, Z[(k, i)])


def verify_kl_family(M: KripkeModel, N: KripkeModel, fam: BisimFamily, F: FeatureSet,
                     seed: Optional[Tuple[str, str]] = None,
                     within: Optional[Callable[[Pair], bool]] = None) -> VerifyReport:
    """
    Check every stored pair of a family against the base, cond(F), chain and ext conditions.

    Args:
        M (KripkeModel): Left model.
        N (KripkeModel): Right model.
        fam (BisimFamily): The family.
        F (FeatureSet): Hybrid features selecting cond(F).
        seed (Tuple[str, str], optional): Worlds (m, n) whose constant tuples must sit in every Z[k][0].
        within (Callable[[Pair], bool], optional): Only pairs it accepts are checked.

    Returns:
        VerifyReport: All violations found, in level order.

    Raises:
        FamilyError: If a pair mentions an unknown world.
    """
    checker = PairChecker(M, N, fam.K, F)
    Z, checked = {}, {}
    for (k, i), rel in fam.Z.items():
        Z[(k, i)], checked[(k, i)] = coded_relation(checker, k, rel, within)
    report = VerifyReport()
    for (k, i) in sorted(Z):
        for pair in checked[(k, i)]:
            named = checker.decode(k, pair)
            for tag, detail in checker.local(k, pair):
                report.add(tag, i, k, named, detail)
            for tag, detail in _failures(checker, Z, fam.L, k, i, pair):
                report.add(tag, i, k, named, detail)
    if seed is not None:
        m, n = seed
        for k in range(fam.K + 1):
            pair = (((m,) * k, m), ((n,) * k, n))
            if pair not in fam[(k, 0)]:
                report.add(ConditionTag.SEED, 0, k, pair, "constant tuples are not related")
    log.debug(f"[VERIFY] family K={fam.K} L={fam.L}: {len(report.violations)} violation(s)")
    return report


def guard(M: KripkeModel, N: KripkeModel, K: int, L: int, max_pairs: Optional[int] = None) -> int:
    """
    Raises:
        ResourceGuardError: If (|M|·|N|)^(K+1)·(L+1) exceeds the configured cap.
    """
    cap = resolve_limit(max_pairs, MAX_PAIRS_ENV, DEFAULT_MAX_PAIRS)
    domain = (len(M) * len(N)) ** (K + 1) * (L + 1)
    if domain > cap:
        raise ResourceGuardError(f"{domain} candidate pairs for K={K}, L={L} exceed the cap of {cap}")
    return domain


def max_kl_family(M: KripkeModel, N: KripkeModel, F: FeatureSet, K: int, L: int,
                  max_pairs: Optional[int] = None) -> BisimFamily:
    """
    Greatest F-(K, L) family between M and N.

    Starts from every pair passing the local conditions at every level and deletes
    violating pairs in barrier-synchronized sweeps until nothing changes.

    Raises:
        ResourceGuardError: When the instance exceeds the pair cap.
    """
    if K < 0 or L < 0:
        raise FamilyError(f"bounds must be non-negative, got K={K}, L={L}")
    domain = guard(M, N, K, L, max_pairs)
    checker = PairChecker(M, N, K, F)
    Z: Dict[Level, set] = {}
    for k in range(K + 1):
        local = checker.local_pairs(k)
        for i in range(L + 1):
            Z[(k, i)] = set(local)
    order = [(k, i) for i in range(L, -1, -1) for k in range(K + 1)]
    sweeps = 0
    while True:
        sweeps += 1
        doomed = {}
        for k, i in order:
            dead = [p for p in sorted(Z[(k, i)]) if next(_failures(checker, Z, L, k, i, p), None) is not None]
            if dead:
                doomed[(k, i)] = dead
        if not doomed:
            break
        removed = 0
        for level, dead in doomed.items():
            Z[level].difference_update(dead)
            removed += len(dead)
        log.debug(f"[FIXPOINT] sweep {sweeps}: removed {removed} pair(s)")
    fam = BisimFamily(K, L, {(k, i): PairRelation(k, (checker.decode(k, p) for p in pairs))
                             for (k, i), pairs in Z.items()})
    log.info(f"[FIXPOINT] {M.name or 'M'} vs {N.name or 'N'} K={K} L={L}: {fam.size()} pair(s) "
             f"kept of {domain} after {sweeps} sweep(s)")
    return fam


def decide_equiv(Mp: PointedModel, Np: PointedModel, F: FeatureSet, L: int, K: Optional[int] = None,
                 max_pairs: Optional[int] = None) -> bool:
    """
    Decide whether two pointed models agree on every F-sentence of degree at most L.

    Args:
        Mp (PointedModel): Left pointed model.
        Np (PointedModel): Right pointed model.
        F (FeatureSet): Hybrid features.
        L (int): Degree bound.
        K (int, optional): Largest tuple length, ``default_k(F, L)`` when omitted.
        max_pairs (int, optional): Resource cap override.

    Returns:
        bool: True when the constant tuples of the two points are related in every Z[k][0].
    """
    K = default_k(F, L) if K is None else K
    fam = max_kl_family(Mp.model, Np.model, F, K, L, max_pairs)
    m, n = Mp.point, Np.point
    return all((((m,) * k, m), ((n,) * k, n)) in fam[(k, 0)] for k in range(K + 1))


def _omega_failures(checker: PairChecker, B: Mapping[int, Any], k: int, pair: CodedPair):
    yield from checker.local(k, pair)
    yield from checker.stepping(k, pair, B[k])
    yield from checker.jumps(k, pair, B[k])
    if k < checker.K:
        yield from checker.extension(k, pair, B[k + 1])


def union_family(M: KripkeModel, N: KripkeModel, fams: Iterable[BisimFamily],
                 F: FeatureSet) -> Dict[int, PairRelation]:
    """
    Unlevelled family B_0..B_K built from families sharing K, listed with increasing L.

    B_k starts as the union of every level Z[k][i] of every input family. Pairs whose
    witnesses fall outside B (or, for ext, outside B_(k+1)) are deleted until nothing
    changes, and the result is checked with ``verify_omega_family``.

    Args:
        M (KripkeModel): Left model.
        N (KripkeModel): Right model.
        fams (Iterable[BisimFamily]): The families.
        F (FeatureSet): Hybrid features selecting cond(F).

    Returns:
        Dict[int, PairRelation]: B_k for every k ≤ K.

    Raises:
        FamilyError: On an empty list, differing K, non-increasing L, or when the
            pruned union is not an ω-family (some B_k ends up empty).
    """
    fams = list(fams)
    if not fams:
        raise FamilyError("union of an empty list of families")
    K = fams[0].K
    for before, after in zip(fams, fams[1:]):
        if after.K != K:
            raise FamilyError(f"families disagree on K ({K} vs {after.K})")
        if after.L <= before.L:
            raise FamilyError(f"levels must increase, got L={before.L} then L={after.L}")
    checker = PairChecker(M, N, K, F)
    B: Dict[int, set] = {k: set() for k in range(K + 1)}
    for fam in fams:
        for (k, _), rel in fam.Z.items():
            B[k] |= coded_relation(checker, k, rel)[0]
    sweeps = 0
    while True:
        sweeps += 1
        doomed = {k: [p for p in sorted(pairs) if first_failure(_omega_failures(checker, B, k, p)) is not None]
                  for k, pairs in B.items()}
        removed = sum(len(dead) for dead in doomed.values())
        if not removed:
            break
        for k, dead in doomed.items():
            B[k].difference_update(dead)
        log.debug(f"[FIXPOINT] union sweep {sweeps}: removed {removed} pair(s)")
    union = {k: PairRelation(k, (checker.decode(k, p) for p in pairs)) for k, pairs in B.items()}
    report = verify_omega_family(M, N, union, F, K)
    if not report.ok:
        raise FamilyError(f"union of {len(fams)} families is not an omega family: {report.violations[0]}")
    log.info(f"[FIXPOINT] union of {len(fams)} families: {sum(len(r) for r in union.values())} pair(s) "
             f"after {sweeps} sweep(s)")
    return union
