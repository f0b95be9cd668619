"""
Truth vectors over the contexts of several models at once.

A vector is an int bitmask; bit ``c`` is the value at global context ``c``. Each model
contributes its ``ContextGrid`` codes shifted by an offset. The modal operators act on
vectors through precomputed preimage masks.
"""

import logging
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from errors import ModelError, OracleCapExceeded
from logic.syntax import Bot, Feature, FeatureSet, HybridFormula, Nom, Prop, Signature, Top, WVar
from settings import slot_names
from world.contexts import ContextGrid
from world.kripke import KripkeModel

log = logging.getLogger(__name__)

Vector = int


def bits(v: Vector) -> Iterator[int]:
    """Indices of the set bits of v, lowest first."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def pack(values: Iterable[bool]) -> Vector:
    """The vector whose bit c is values[c]."""
    return sum(1 << c for c, value in enumerate(values) if value)


class Universe:
    """
    All contexts of tuple length k over a list of models.

    Attributes:
        models (List[KripkeModel]): The models, in order.
        k (int): Tuple length.
        features (FeatureSet): Operators the formula space may use.
        grids (List[ContextGrid]): One grid per model.
        offsets (List[int]): Global index of each model's first context.
        size (int): Total number of contexts.
        full (Vector): The all-true vector.
    """
    def __init__(self, models: Sequence[KripkeModel], k: int, features: FeatureSet, cap: Optional[int] = None,
                 sig: Optional[Signature] = None) -> None:
        """
        Raises:
            OracleCapExceeded: If the models have more contexts than ``cap``.
            ModelError: If ``sig`` names a nominal some model does not interpret.
        """
        self.models = list(models)
        self.k = k
        self.features = features
        self.slots = slot_names(k)
        if sig is None:
            self.props = tuple(sorted({p for m in self.models for p in m.valuation}))
            noms = set.intersection(*(set(m.nominals) for m in self.models)) if self.models else set()
        else:
            self.props, noms = sig.props, set(sig.noms)
            for m in self.models:
                if noms - set(m.nominals):
                    raise ModelError(f"{m!r} does not interpret nominal(s) {sorted(noms - set(m.nominals))}")
        self.noms = tuple(sorted(noms)) if Feature.NOM in features else ()
        total = sum(len(m) ** (k + 1) for m in self.models)
        if cap is not None and total > cap:
            raise OracleCapExceeded(f"{total} evaluation contexts exceed the oracle cap of {cap}")
        self.grids = [ContextGrid(m, k, self.noms, self.props) for m in self.models]
        self.offsets, start = [], 0
        for g in self.grids:
            self.offsets.append(start)
            start += g.size
        self.size = total
        self.full = (1 << total) - 1
        self._build()
        log.debug(f"[ORACLE] universe of {len(self.models)} model(s), k={k}: {total} contexts")

    def _build(self) -> None:
        n = self.size
        self.pred = [0] * n
        self.bind_pre = [[0] * n for _ in range(self.k)]
        self.variant_group = [[0] * n for _ in range(self.k)]
        self.jump_var_pre = [[0] * n for _ in range(self.k)]
        self.jump_nom_pre = [[0] * n for _ in self.noms]
        self.succ: List[Tuple[int, ...]] = []
        self.bind_of = [[] for _ in range(self.k)]
        self.variants_of = [[] for _ in range(self.k)]
        self.jump_var_of = [[] for _ in range(self.k)]
        self.jump_nom_of = [[] for _ in self.noms]
        for g, off in zip(self.grids, self.offsets):
            for c in range(g.size):
                self.succ.append(tuple(off + s for s in g.succ[c]))
                for s in g.succ[c]:
                    self.pred[off + s] |= 1 << (off + c)
            for j in range(self.k):
                for c in range(g.size):
                    self.bind_of[j].append(off + g.bind[j][c])
                    self.variants_of[j].append(tuple(off + v for v in g.variants[j][c]))
                    self.jump_var_of[j].append(off + g.jump_var[j][c])
                    group = 0
                    for v in g.variants[j][c]:
                        group |= 1 << (off + v)
                    self.variant_group[j][off + c] = group
                for c, t in enumerate(g.bind[j]):
                    self.bind_pre[j][off + t] |= 1 << (off + c)
                for c, t in enumerate(g.jump_var[j]):
                    self.jump_var_pre[j][off + t] |= 1 << (off + c)
            for s in range(len(self.noms)):
                for c, t in enumerate(g.jump_nom[s]):
                    self.jump_nom_of[s].append(off + t)
                    self.jump_nom_pre[s][off + t] |= 1 << (off + c)

    def atom_formulas(self) -> List[Tuple[Vector, HybridFormula]]:
        """Vectors of ⊥, ⊤, the propositions, the nominals (with nom) and x1..xk."""
        result = [(0, Bot()), (self.full, Top())]
        for i, p in enumerate(self.props):
            v = 0
            for g, off in zip(self.grids, self.offsets):
                for c in range(g.size):
                    if g.local[c][0][i]:
                        v |= 1 << (off + c)
            result.append((v, Prop(p)))
        for s, name in enumerate(self.noms):
            v = 0
            for g, off in zip(self.grids, self.offsets):
                for c in range(g.size):
                    if g.local[c][1][s]:
                        v |= 1 << (off + c)
            result.append((v, Nom(name)))
        for j, name in enumerate(self.slots):
            v = 0
            for g, off in zip(self.grids, self.offsets):
                for c in range(g.size):
                    if g.wvar[c][j]:
                        v |= 1 << (off + c)
            result.append((v, WVar(name)))
        return result

    def places(self) -> List[Tuple[HybridFormula, List[int], List[int]]]:
        """Jump targets usable by @: (place, target of each context, preimage masks)."""
        if Feature.AT not in self.features:
            return []
        result = [(WVar(name), self.jump_var_of[j], self.jump_var_pre[j]) for j, name in enumerate(self.slots)]
        result += [(Nom(name), self.jump_nom_of[s], self.jump_nom_pre[s]) for s, name in enumerate(self.noms)]
        return result

    def binders(self) -> List[Tuple[Feature, int]]:
        """(binder, slot index) pairs the formula space may use."""
        return [(f, j) for f in (Feature.DOWN, Feature.EXISTS) if f in self.features for j in range(self.k)]

    def neg(self, v: Vector) -> Vector:
        return self.full & ~v

    def dia(self, v: Vector) -> Vector:
        out = 0
        for c in bits(v):
            out |= self.pred[c]
        return out

    def down(self, j: int, v: Vector) -> Vector:
        out = 0
        for c in bits(v):
            out |= self.bind_pre[j][c]
        return out

    def exists(self, j: int, v: Vector) -> Vector:
        out = 0
        for c in bits(v):
            out |= self.variant_group[j][c]
        return out

    def at(self, pre: List[int], v: Vector) -> Vector:
        out = 0
        for c in bits(v):
            out |= pre[c]
        return out

    def is_sentence_like(self, v: Vector) -> bool:
        """True when the value never depends on the assignment."""
        return all(self.exists(j, v) == v for j in range(self.k))

    def seed(self, model_index: int, world: str) -> int:
        """Global index of the constant context ((w, ..., w), w) of one model."""
        return self.offsets[model_index] + self.grids[model_index].constant(world)

    def __repr__(self) -> str:
        return f"Universe(models={len(self.models)}, k={self.k}, contexts={self.size})"
