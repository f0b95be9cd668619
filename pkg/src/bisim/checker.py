"""
Condition checks on coded context pairs, shared by the fixpoint and the verifiers.

A pair is ``(lc, rc)``: the codes of a left and a right context in the ``ContextGrid``
of the matching tuple length. A relation is any container supporting ``in`` on such
tuples. Every check is a generator of ``(tag, detail)`` failures so callers can stop
at the first one or collect all of them.
"""

from typing import Container, Iterator, List, Optional, Tuple

from bisim.conditions import ConditionTag, conds
from errors import FamilyError
from logic.syntax import FeatureSet
from world.contexts import ContextGrid
from world.kripke import KripkeModel, Pair

CodedPair = Tuple[int, int]
Failure = Tuple[ConditionTag, str]


class PairChecker:
    """
    Context grids of two models for tuple lengths 0..K and the active condition set.

    Attributes:
        left (List[ContextGrid]): Grids of the left model, indexed by k.
        right (List[ContextGrid]): Grids of the right model, indexed by k.
        active (FrozenSet[ConditionTag]): cond(F).
    """
    def __init__(self, left: KripkeModel, right: KripkeModel, K: int, features: FeatureSet) -> None:
        props = tuple(sorted(set(left.valuation) | set(right.valuation)))
        noms = tuple(s for s in left.nominals if s in right.nominals)
        self.left_model, self.right_model = left, right
        self.K = K
        self.active = conds(features)
        self.left = [ContextGrid(left, k, noms, props) for k in range(K + 1)]
        self.right = [ContextGrid(right, k, noms, props) for k in range(K + 1)]
        self.props, self.noms = props, noms

    def has(self, tag: ConditionTag) -> bool:
        return tag in self.active

    def local_key(self, side: str, k: int, c: int) -> Tuple:
        """Everything the local conditions compare, for one context."""
        grid = self.left[k] if side == "left" else self.right[k]
        props, noms = grid.local[c]
        return props, grid.wvar[c], noms if self.has(ConditionTag.NOM) else ()

    def local_pairs(self, k: int) -> List[CodedPair]:
        """All pairs at tuple length k passing prop, wvar and (when active) nom, in code order."""
        buckets = {}
        for rc in range(self.right[k].size):
            buckets.setdefault(self.local_key("right", k, rc), []).append(rc)
        return [(lc, rc) for lc in range(self.left[k].size)
                for rc in buckets.get(self.local_key("left", k, lc), ())]

    def encode(self, k: int, pair: Pair) -> CodedPair:
        """
        Raises:
            FamilyError: If a context mentions a world outside its model or has the wrong length.
        """
        left, right = pair
        if len(left[0]) != k or len(right[0]) != k:
            raise FamilyError(f"pair {pair} does not have tuple length {k}")
        try:
            return self.left[k].encode(left), self.right[k].encode(right)
        except KeyError as e:
            raise FamilyError(f"pair {pair} mentions unknown world {e}")

    def decode(self, k: int, pair: CodedPair) -> Pair:
        return self.left[k].decode(pair[0]), self.right[k].decode(pair[1])

    def _world(self, side: str, k: int, c: int) -> str:
        grid = self.left[k] if side == "left" else self.right[k]
        return grid.model.worlds[grid.point[c]]

    def local(self, k: int, pair: CodedPair) -> Iterator[Failure]:
        lc, rc = pair
        gl, gr = self.left[k], self.right[k]
        (lp, ln), (rp, rn) = gl.local[lc], gr.local[rc]
        if lp != rp:
            differing = [p for p, a, b in zip(self.props, lp, rp) if a != b]
            yield ConditionTag.PROP, f"propositions {differing} differ"
        if gl.wvar[lc] != gr.wvar[rc]:
            yield ConditionTag.WVAR, f"slot pattern {gl.wvar[lc]} vs {gr.wvar[rc]}"
        if self.has(ConditionTag.NOM) and ln != rn:
            differing = [s for s, a, b in zip(self.noms, ln, rn) if a != b]
            yield ConditionTag.NOM, f"nominals {differing} hold on one side only"

    def stepping(self, k: int, pair: CodedPair, nxt: Container[CodedPair]) -> Iterator[Failure]:
        """forth, back and the active bind/ex conditions, witnesses taken from ``nxt``."""
        lc, rc = pair
        gl, gr = self.left[k], self.right[k]
        for a in gl.succ[lc]:
            if not any((a, b) in nxt for b in gr.succ[rc]):
                yield ConditionTag.FORTH, f"no successor on the right matches {self._world('left', k, a)}"
                break
        for b in gr.succ[rc]:
            if not any((a, b) in nxt for a in gl.succ[lc]):
                yield ConditionTag.BACK, f"no successor on the left matches {self._world('right', k, b)}"
                break
        if self.has(ConditionTag.BIND):
            for j in range(k):
                if (gl.bind[j][lc], gr.bind[j][rc]) not in nxt:
                    yield ConditionTag.BIND, f"binding x{j + 1} to the current worlds leaves the relation"
                    break
        if self.has(ConditionTag.EX_F):
            yield from self._variants(k, pair, nxt)

    def _variants(self, k: int, pair: CodedPair, nxt: Container[CodedPair]) -> Iterator[Failure]:
        lc, rc = pair
        gl, gr = self.left[k], self.right[k]
        for j in range(k):
            for a in gl.variants[j][lc]:
                if not any((a, b) in nxt for b in gr.variants[j][rc]):
                    yield ConditionTag.EX_F, f"x{j + 1} := {gl.model.worlds[gl.slots[j][a]]} has no match"
                    return
            for b in gr.variants[j][rc]:
                if not any((a, b) in nxt for a in gl.variants[j][lc]):
                    yield ConditionTag.EX_B, f"x{j + 1} := {gr.model.worlds[gr.slots[j][b]]} has no match"
                    return

    def jumps(self, k: int, pair: CodedPair, cur: Container[CodedPair]) -> Iterator[Failure]:
        """The active atv/atn conditions, targets taken from ``cur``."""
        lc, rc = pair
        gl, gr = self.left[k], self.right[k]
        if self.has(ConditionTag.ATV):
            for j in range(k):
                if (gl.jump_var[j][lc], gr.jump_var[j][rc]) not in cur:
                    yield ConditionTag.ATV, f"jumping to x{j + 1} leaves the relation"
                    break
        if self.has(ConditionTag.ATN):
            for s, name in enumerate(self.noms):
                if (gl.jump_nom[s][lc], gr.jump_nom[s][rc]) not in cur:
                    yield ConditionTag.ATN, f"jumping to '{name} leaves the relation"
                    break

    def extension(self, k: int, pair: CodedPair, target: Container[CodedPair]) -> Iterator[Failure]:
        """ext: appending the current worlds must land in ``target`` (tuple length k + 1)."""
        lc, rc = pair
        if (self.left[k].extend(lc), self.right[k].extend(rc)) not in target:
            yield ConditionTag.EXT, f"extended pair is missing at tuple length {k + 1}"


def coded_relation(checker: PairChecker, k: int, pairs, within=None) -> Tuple[set, List[CodedPair]]:
    """
    Encode a relation of named pairs.

    Returns:
        Tuple[set, List[CodedPair]]: Every coded pair, and those selected by ``within`` in sorted order.
    """
    coded = set()
    checked = []
    for pair in pairs:
        c = checker.encode(k, pair)
        coded.add(c)
        if within is None or within(pair):
            checked.append(c)
    return coded, sorted(checked)


def first_failure(failures: Iterator[Failure]) -> Optional[Failure]:
    return next(failures, None)
