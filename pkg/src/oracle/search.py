"""Size-ordered formula enumeration and separating-formula extraction."""

import logging
from typing import Dict, List, NamedTuple, Optional

from errors import EvaluationError
from logic.semantics import HybridContext, sat_hybrid
from logic.syntax import (At, Dia, Down, Exists, Feature, FeatureSet, HybridFormula, Not, Or, degree)
from oracle.strata import first_split
from oracle.universe import Universe, Vector
from settings import (DEFAULT_ORACLE_CAP, ORACLE_CAP_ENV, SENTENCE_SLACK, SEPARATOR_MAX_SIZE,
                      resolve_limit)
from world.kripke import PointedModel

log = logging.getLogger(__name__)

WORK_FACTOR = 20  # candidate formulas tried per kept vector before giving up


class Entry(NamedTuple):
    formula: HybridFormula
    vector: Vector
    degree: int


class FormulaEnumerator:
    """
    Formulas of degree ≤ L in order of size, one per truth vector.

    Attributes:
        universe (Universe): Contexts the vectors range over.
        L (int): Degree bound.
        cap (int): Largest number of distinct vectors kept.
        by_size (Dict[int, List[Entry]]): New entries of every size generated so far.
    """
    def __init__(self, universe: Universe, L: int, cap: int) -> None:
        self.universe = universe
        self.L = L
        self.cap = cap
        self.by_size: Dict[int, List[Entry]] = {}
        self.seen: Dict[Vector, Entry] = {}
        self.exhausted = False
        self.work = 0

    def _add(self, bucket: List[Entry], formula: HybridFormula, vector: Vector, deg: int) -> None:
        self.work += 1
        if self.work > WORK_FACTOR * self.cap:
            self.exhausted = True
        if deg > self.L or vector in self.seen or self.exhausted:
            return
        if len(self.seen) >= self.cap:
            log.debug(f"[ORACLE] enumeration stopped at {len(self.seen)} vectors")
            self.exhausted = True
            return
        entry = Entry(formula, vector, deg)
        self.seen[vector] = entry
        bucket.append(entry)

    def _generate(self, s: int) -> List[Entry]:
        u = self.universe
        bucket: List[Entry] = []
        if s == 1:
            for vector, phi in u.atom_formulas():
                self._add(bucket, phi, vector, 0)
            return bucket
        for e in self.by_size.get(s - 1, []):
            self._add(bucket, Not(e.formula), u.neg(e.vector), e.degree)
            self._add(bucket, Dia(e.formula), u.dia(e.vector), e.degree + 1)
            for binder, j in u.binders():
                if binder == Feature.DOWN:
                    self._add(bucket, Down(u.slots[j], e.formula), u.down(j, e.vector), e.degree + 1)
                else:
                    self._add(bucket, Exists(u.slots[j], e.formula), u.exists(j, e.vector), e.degree + 1)
            for place, _, pre in u.places():
                self._add(bucket, At(place, e.formula), u.at(pre, e.vector), e.degree)
        for a in range(1, (s - 1) // 2 + 1):
            left_entries = self.by_size.get(a, [])
            right_entries = self.by_size.get(s - 1 - a, [])
            for x in left_entries:
                for y in right_entries:
                    self._add(bucket, Or(x.formula, y.formula), x.vector | y.vector, max(x.degree, y.degree))
                if self.exhausted:
                    return bucket
        return bucket

    def entries(self, s: int) -> List[Entry]:
        """New entries of size s; sizes must be requested in increasing order."""
        if s not in self.by_size:
            self.by_size[s] = [] if self.exhausted else self._generate(s)
        return self.by_size[s]


def _differs(vector: Vector, left: int, right: int) -> bool:
    return ((vector >> left) & 1) != ((vector >> right) & 1)


def _search(universe: Universe, L: int, left: int, right: int, cap: int,
            max_size: int) -> Optional[HybridFormula]:
    enumerator = FormulaEnumerator(universe, L, cap)
    fallback, limit = None, max_size
    size = 0
    while size < limit and not enumerator.exhausted:
        size += 1
        for e in enumerator.entries(size):
            if not _differs(e.vector, left, right):
                continue
            if universe.is_sentence_like(e.vector):
                return e.formula
            if fallback is None:
                fallback = e.formula
                limit = min(max_size, size + SENTENCE_SLACK)
    return fallback


def separating_formula(Mp: PointedModel, Np: PointedModel, F: FeatureSet, k: int, L: int,
                       cap: Optional[int] = None, max_size: int = SEPARATOR_MAX_SIZE) -> Optional[HybridFormula]:
    """
    A formula of degree ≤ L telling the two seeds apart, or None when they agree.

    Small formulas are searched first and assignment-independent ones are preferred;
    when the search finds nothing within ``max_size`` the characteristic formula of
    the left seed's block in the first separating stratum is returned.

    Raises:
        OracleCapExceeded: When the strata outgrow the cap.
        EvaluationError: If the result fails the re-check by the evaluator.
    """
    universe, strata, split = first_split(Mp, Np, F, k, L, cap)
    if split is None:
        return None
    left, right = universe.seed(0, Mp.point), universe.seed(1, Np.point)
    found = _search(universe, L, left, right, resolve_limit(cap, ORACLE_CAP_ENV, DEFAULT_ORACLE_CAP), max_size)
    if found is None:
        found = strata[split].characteristic(strata[split].block_of(left))
        log.debug(f"[ORACLE] no small separator, using the degree-{split} characteristic formula")
    ctx_left = HybridContext(Mp.model, (Mp.point,) * k, Mp.point)
    ctx_right = HybridContext(Np.model, (Np.point,) * k, Np.point)
    if sat_hybrid(ctx_left, found) == sat_hybrid(ctx_right, found):
        raise EvaluationError(f"separator {found} does not separate the seeds")
    log.info(f"[ORACLE] separator of degree {degree(found)}: {found}")
    return found
