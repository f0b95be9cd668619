"""
Degree strata of the formula space, computed as partitions of the evaluation contexts.

The vectors of all formulas of degree ≤ d are exactly the unions of blocks of one
partition P_d. P_0 splits contexts by the atoms, P_d splits each block of P_(d-1) by
the blocks reachable with <>, down and exists, and every stratum is then refined by
@ until jumps respect blocks. Each partition keeps the literals that generate it, so
a block always has a characteristic formula built greedily from them.
"""

import logging
from typing import Callable, Hashable, List, Optional, Sequence, Tuple

from errors import EvaluationError, OracleCapExceeded
from logic.semantics import truth_vector
from logic.syntax import (BOT, At, Dia, Down, Exists, Feature, FeatureSet, HybridFormula, Not,
                          Signature, conjoin, default_k, disjoin)
from oracle.universe import Universe, Vector, pack
from settings import DEFAULT_ORACLE_CAP, ORACLE_CAP_ENV, resolve_limit
from world.kripke import PointedModel

log = logging.getLogger(__name__)

Literal = Tuple[Vector, Callable[[], HybridFormula]]


def _popcount(v: Vector) -> int:
    return bin(v).count("1")


class Partition:
    """
    Blocks of contexts plus literals whose vectors generate exactly these blocks.

    Attributes:
        block_of (List[int]): Block id of every context; ids follow first occurrence.
        blocks (List[Vector]): Mask of every block.
        literals (List[Literal]): (vector, formula builder) pairs.
    """
    def __init__(self, universe: Universe, keys: Sequence[Hashable], literals: List[Literal]) -> None:
        self.universe = universe
        self.literals = literals
        ids = {}
        self.block_of: List[int] = []
        self.blocks: List[Vector] = []
        for c, key in enumerate(keys):
            if key not in ids:
                ids[key] = len(self.blocks)
                self.blocks.append(0)
            b = ids[key]
            self.block_of.append(b)
            self.blocks[b] |= 1 << c
        self._chi = {}

    def characteristic(self, b: int) -> HybridFormula:
        """A conjunction of literals (or their negations) true exactly on block b."""
        if b in self._chi:
            return self._chi[b]
        full = self.universe.full
        target = self.blocks[b]
        candidates = []
        for vec, make in self.literals:
            if vec & target == target:
                candidates.append((vec, make, False))
            elif vec & target == 0:
                candidates.append((full & ~vec, make, True))
        cur, chosen = full, []
        while cur != target:
            best = max(candidates, key=lambda cand: _popcount(cur & ~cand[0]))
            if cur & ~best[0] == 0:
                raise EvaluationError(f"literals do not isolate block {b}")
            cur &= best[0]
            chosen.append(best)
        formula = conjoin(Not(make()) if negated else make() for _, make, negated in chosen)
        self._chi[b] = formula
        return formula

    def __len__(self) -> int:
        return len(self.blocks)


class Stratum:
    """
    Formulas of degree ≤ d up to equality of truth vectors.

    Attributes:
        degree (int): d.
        partition (Partition): P_d.
    """
    def __init__(self, degree: int, partition: Partition) -> None:
        self.degree = degree
        self.partition = partition

    @property
    def blocks(self) -> List[Vector]:
        return self.partition.blocks

    def block_of(self, c: int) -> int:
        return self.partition.block_of[c]

    @property
    def vector_count(self) -> int:
        """Number of distinct vectors of degree-≤d formulas."""
        return 2 ** len(self.blocks)

    def spans(self, v: Vector) -> bool:
        """Whether some formula of degree ≤ d has vector v."""
        return all(block & v in (0, block) for block in self.blocks)

    def characteristic(self, b: int) -> HybridFormula:
        return self.partition.characteristic(b)

    def representatives(self) -> List[Tuple[HybridFormula, Vector]]:
        """One (formula, vector) pair per block; every degree-≤d vector is a union of these."""
        return [(self.characteristic(b), block) for b, block in enumerate(self.blocks)]

    def formula_for(self, v: Vector) -> HybridFormula:
        """A degree-≤d formula with vector v, as a disjunction of characteristic formulas."""
        if not self.spans(v):
            raise ValueError("vector is not a union of blocks of this stratum")
        return disjoin(self.characteristic(b) for b, block in enumerate(self.blocks) if block & v)

    def __repr__(self) -> str:
        return f"Stratum(degree={self.degree}, blocks={len(self.blocks)})"


def _check_cap(count: int, cap: int, what: str, degree: int) -> None:
    if count > cap:
        raise OracleCapExceeded(f"{count} {what} at degree {degree} exceed the oracle cap of {cap}", stratum=degree)


def _close_under_at(universe: Universe, part: Partition, cap: int, degree: int) -> Partition:
    places = universe.places()
    while places:
        keys = [(part.block_of[c],) + tuple(part.block_of[target[c]] for _, target, _ in places)
                for c in range(universe.size)]
        literals = part.literals + [
            (universe.at(pre, part.blocks[b]), lambda place=place, b=b, prev=part: At(place, prev.characteristic(b)))
            for place, _, pre in places for b in range(len(part))]
        refined = Partition(universe, keys, literals)
        if len(refined) == len(part):
            return part
        _check_cap(len(literals), cap, "literals", degree)
        part = refined
    return part


def _base(universe: Universe) -> Partition:
    atoms = [(v, phi) for v, phi in universe.atom_formulas() if 0 < v < universe.full]
    keys = [tuple((v >> c) & 1 for v, _ in atoms) for c in range(universe.size)]
    return Partition(universe, keys, [(v, lambda phi=phi: phi) for v, phi in atoms])


def _step(universe: Universe, prev: Partition) -> Partition:
    slots = universe.slots
    binders = universe.binders()
    keys = []
    for c in range(universe.size):
        key = [prev.block_of[c], frozenset(prev.block_of[s] for s in universe.succ[c])]
        for binder, j in binders:
            if binder == Feature.DOWN:
                key.append(prev.block_of[universe.bind_of[j][c]])
            else:
                key.append(frozenset(prev.block_of[v] for v in universe.variants_of[j][c]))
        keys.append(tuple(key))
    literals: List[Literal] = []
    for b, block in enumerate(prev.blocks):
        literals.append((block, lambda b=b: prev.characteristic(b)))
        literals.append((universe.dia(block), lambda b=b: Dia(prev.characteristic(b))))
        for binder, j in binders:
            if binder == Feature.DOWN:
                literals.append((universe.down(j, block), lambda b=b, j=j: Down(slots[j], prev.characteristic(b))))
            else:
                literals.append((universe.exists(j, block), lambda b=b, j=j: Exists(slots[j], prev.characteristic(b))))
    return Partition(universe, keys, literals)


def _recheck(universe: Universe, stratum: Stratum) -> None:
    sig = Signature(universe.props, universe.noms)
    models = [m.with_signature(sig) for m in universe.models]
    for formula, block in stratum.representatives():
        if pack(truth_vector(models, universe.k, formula, universe.slots)) != block:
            raise EvaluationError(f"representative {formula} of a degree-{stratum.degree} block "
                                  f"disagrees with the evaluator")


def enumerate_strata(universe: Universe, L: int, cap: Optional[int] = None,
                     recheck: bool = True) -> List[Stratum]:
    """
    Strata 0..L over a universe.

    Args:
        universe (Universe): Models, tuple length and features.
        L (int): Largest degree.
        cap (int, optional): Bound on blocks and literals per stratum.
        recheck (bool): Evaluate every representative with ``truth_vector`` and compare
            it with its block.

    Returns:
        List[Stratum]: Stratum d at index d.

    Raises:
        OracleCapExceeded: With the stratum being built when the cap was hit.
        EvaluationError: If a representative does not hold exactly on its block.
    """
    cap = resolve_limit(cap, ORACLE_CAP_ENV, DEFAULT_ORACLE_CAP)
    part = _close_under_at(universe, _base(universe), cap, 0)
    strata = [Stratum(0, part)]
    for d in range(1, L + 1):
        part = _step(universe, part)
        _check_cap(len(part.literals), cap, "literals", d)
        part = _close_under_at(universe, part, cap, d)
        _check_cap(len(part), cap, "representatives", d)
        strata.append(Stratum(d, part))
    if recheck:
        for stratum in strata:
            _recheck(universe, stratum)
    log.debug(f"[ORACLE] strata sizes {[len(s.blocks) for s in strata]}")
    return strata


def _pair_universe(Mp: PointedModel, Np: PointedModel, F: FeatureSet, k: int, cap: Optional[int]) -> Universe:
    return Universe([Mp.model, Np.model], k, F, resolve_limit(cap, ORACLE_CAP_ENV, DEFAULT_ORACLE_CAP))


def first_split(Mp: PointedModel, Np: PointedModel, F: FeatureSet, k: int, L: int,
                cap: Optional[int] = None) -> Tuple[Universe, List[Stratum], Optional[int]]:
    """
    Strata over the two models and the least degree at which the two seeds fall
    into different blocks (None when they never do up to L).
    """
    universe = _pair_universe(Mp, Np, F, k, cap)
    strata = enumerate_strata(universe, L, cap)
    left, right = universe.seed(0, Mp.point), universe.seed(1, Np.point)
    split = next((s.degree for s in strata if s.block_of(left) != s.block_of(right)), None)
    return universe, strata, split


def agree_up_to(Mp: PointedModel, Np: PointedModel, F: FeatureSet, k: int, L: int,
                cap: Optional[int] = None) -> bool:
    """
    Whether the seeds ((m..m), m) and ((n..n), n) agree on every F-formula of degree
    ≤ L with world variables among x1..xk.

    Raises:
        OracleCapExceeded: When the strata outgrow the cap.
    """
    _, _, split = first_split(Mp, Np, F, k, L, cap)
    log.info(f"[ORACLE] {Mp.model.name or 'M'},{Mp.point} vs {Np.model.name or 'N'},{Np.point} "
             f"k={k} L={L}: {'agree' if split is None else f'split at degree {split}'}")
    return split is None


def axiomatise(Ks: Sequence[PointedModel], F: FeatureSet, L: int, cap: Optional[int] = None,
               probes: Sequence[PointedModel] = (), k: Optional[int] = None) -> HybridFormula:
    """
    Disjunction, over the members of Ks, of the characteristic formula of their degree-L type.

    The type is taken relative to the contexts of the members and of ``probes``; a
    pointed model is read at its constant seed context. Empty Ks gives ``false``.

    Raises:
        OracleCapExceeded: When the strata outgrow the cap.
    """
    if not Ks:
        return BOT
    k = default_k(F, L) if k is None else k
    members = list(Ks) + list(probes)
    models = []
    for pm in members:
        if not any(m is pm.model for m in models):
            models.append(pm.model)
    universe = Universe(models, k, F, resolve_limit(cap, ORACLE_CAP_ENV, DEFAULT_ORACLE_CAP))
    top = enumerate_strata(universe, L, cap)[-1]
    seen = []
    for pm in Ks:
        index = next(i for i, m in enumerate(models) if m is pm.model)
        b = top.block_of(universe.seed(index, pm.point))
        if b not in seen:
            seen.append(b)
    log.info(f"[ORACLE] axiomatisation of {len(Ks)} pointed model(s) uses {len(seen)} type(s)")
    return disjoin(top.characteristic(b) for b in seen)
