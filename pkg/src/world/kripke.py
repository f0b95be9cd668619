"""
Finite Kripke models and the objects built on them: pointed models, assignments,
relations between contexts ((m̄, m), (n̄, n)), first-order expansions and disjoint
unions. Models are read from and written to the ``{"worlds", "rel", "prop", "nom"}``
JSON document.
"""

import json
import logging
from dataclasses import dataclass
from itertools import product
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

import networkx as nx

from errors import ModelError, SignatureError
from logic.syntax import Signature
from settings import LEFT_TAG, RIGHT_TAG

log = logging.getLogger(__name__)

MODEL_KEYS = {"worlds", "rel", "prop", "nom"}

Context = Tuple[Tuple[str, ...], str]
Pair = Tuple[Context, Context]


class KripkeModel:
    """
    Finite Kripke structure over a hybrid signature.

    Attributes:
        worlds (Tuple[str, ...]): World names in declaration order.
        rel (FrozenSet[Tuple[str, str]]): Accessibility relation.
        valuation (Dict[str, FrozenSet[str]]): Proposition -> worlds where it holds.
        nominals (Dict[str, str]): Nominal -> the world it names.
        name (str): Label used in logs and reports.
    """
    def __init__(self, worlds: Iterable[str], rel: Iterable[Tuple[str, str]] = (),
                 valuation: Optional[Mapping[str, Iterable[str]]] = None,
                 nominals: Optional[Mapping[str, str]] = None, name: str = "") -> None:
        """
        Initialize and validate a KripkeModel.

        Args:
            worlds (Iterable[str]): World names, duplicate-free.
            rel (Iterable[Tuple[str, str]]): Edges between listed worlds.
            valuation (Mapping[str, Iterable[str]], optional): Proposition extensions.
            nominals (Mapping[str, str], optional): Nominal interpretations.
            name (str, optional): Label for diagnostics.

        Raises:
            ModelError: On duplicate worlds, an empty world list or dangling references.
        """
        self.worlds = tuple(worlds)
        self.name = name
        if not self.worlds:
            raise ModelError("a model needs at least one world")
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError(f"duplicate world names in {list(self.worlds)}")
        self.index = {w: i for i, w in enumerate(self.worlds)}
        self.rel = frozenset((a, b) for a, b in rel)
        for a, b in self.rel:
            self._check_world(a, "relation")
            self._check_world(b, "relation")
        self.valuation = {p: frozenset(ws) for p, ws in (valuation or {}).items()}
        for p, ws in self.valuation.items():
            for w in ws:
                self._check_world(w, f"valuation of {p}")
        self.nominals = dict(nominals or {})
        for s, w in self.nominals.items():
            self._check_world(w, f"nominal {s}")
        self._successors = {w: tuple(v for v in self.worlds if (w, v) in self.rel) for w in self.worlds}
        self._reach: Optional[FrozenSet[Tuple[str, str]]] = None

    def _check_world(self, w: str, where: str) -> None:
        if w not in self.index:
            raise ModelError(f"unknown world '{w}' in {where}")

    @property
    def signature(self) -> Signature:
        return Signature(tuple(self.valuation), tuple(self.nominals))

    def successors(self, w: str) -> Tuple[str, ...]:
        """Successors of w in declared world order."""
        return self._successors[w]

    def holds(self, prop: str, w: str) -> bool:
        return w in self.valuation[prop]

    def nominal(self, s: str) -> str:
        return self.nominals[s]

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.worlds)
        g.add_edges_from(sorted(self.rel, key=lambda e: (self.index[e[0]], self.index[e[1]])))
        return g

    def reach(self) -> FrozenSet[Tuple[str, str]]:
        """Reflexive transitive closure of the relation, computed once."""
        if self._reach is None:
            closure = nx.transitive_closure(self.graph(), reflexive=True)
            self._reach = frozenset(closure.edges()) | frozenset((w, w) for w in self.worlds)
        return self._reach

    def reachable(self, source: str, target: str) -> bool:
        return (source, target) in self.reach()

    def with_signature(self, sig: Signature) -> "KripkeModel":
        """
        Re-shape the valuation and nominal maps to exactly the symbols of ``sig``.

        Propositions absent from the model get an empty extension.

        Raises:
            ModelError: If a nominal of ``sig`` is not interpreted.
        """
        missing = [s for s in sig.noms if s not in self.nominals]
        if missing:
            raise ModelError(f"nominal(s) {missing} not interpreted in model {self.name or '?'}")
        return KripkeModel(self.worlds, self.rel,
                           {p: self.valuation.get(p, frozenset()) for p in sig.props},
                           {s: self.nominals[s] for s in sig.noms}, self.name)

    def rename(self, prefix: str) -> "KripkeModel":
        return KripkeModel([prefix + w for w in self.worlds],
                           [(prefix + a, prefix + b) for a, b in self.rel],
                           {p: [prefix + w for w in ws] for p, ws in self.valuation.items()},
                           {s: prefix + w for s, w in self.nominals.items()}, self.name)

    def to_json(self) -> Dict[str, Any]:
        order = self.index
        return {
            "worlds": list(self.worlds),
            "rel": [list(e) for e in sorted(self.rel, key=lambda e: (order[e[0]], order[e[1]]))],
            "prop": {p: [w for w in self.worlds if w in ws] for p, ws in self.valuation.items()},
            "nom": dict(self.nominals),
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (self.worlds, self.rel, self.valuation, self.nominals) == \
            (other.worlds, other.rel, other.valuation, other.nominals)

    def __hash__(self) -> int:
        return hash((self.worlds, self.rel))

    def __len__(self) -> int:
        return len(self.worlds)

    def __repr__(self) -> str:
        label = f"{self.name}, " if self.name else ""
        return f"KripkeModel({label}worlds={list(self.worlds)}, edges={len(self.rel)})"


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: str

    def __post_init__(self) -> None:
        if self.point not in self.model.index:
            raise ModelError(f"point '{self.point}' is not a world of {self.model!r}")


@dataclass(frozen=True)
class Assignment:
    """
    A tuple of worlds; position j (1-based) stores the value of the j-th world variable.
    """
    worlds: Tuple[str, ...] = ()

    @property
    def k(self) -> int:
        return len(self.worlds)

    def at(self, j: int) -> str:
        return self.worlds[j - 1]

    def variant(self, j: int, w: str) -> "Assignment":
        """The tuple with position j replaced by w."""
        ws = list(self.worlds)
        ws[j - 1] = w
        return Assignment(tuple(ws))

    def extend(self, w: str) -> "Assignment":
        return Assignment(self.worlds + (w,))

    @classmethod
    def constant(cls, w: str, k: int) -> "Assignment":
        return cls((w,) * k)


class PairRelation:
    """
    A set of context pairs ((m̄, m), (n̄, n)) sharing one tuple length k.

    Attributes:
        k (int): Tuple length of every context.
        pairs (FrozenSet[Pair]): The stored pairs.
    """
    def __init__(self, k: int, pairs: Iterable[Pair] = ()) -> None:
        self.k = k
        self.pairs = frozenset(((tuple(lt), lp), (tuple(rt), rp)) for (lt, lp), (rt, rp) in pairs)
        for (lt, _), (rt, _) in self.pairs:
            if len(lt) != k or len(rt) != k:
                raise ModelError(f"pair tuple lengths {len(lt)}/{len(rt)} do not match k={k}")

    @classmethod
    def lift(cls, pairs: Iterable[Tuple[str, str]]) -> "PairRelation":
        """A plain state relation seen as contexts with empty tuples."""
        return cls(0, [(((), m), ((), n)) for m, n in pairs])

    def states(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset((l[1], r[1]) for l, r in self.pairs)

    def check_worlds(self, left: KripkeModel, right: KripkeModel) -> None:
        """
        Raises:
            ModelError: If a context mentions a world outside its model.
        """
        for (lt, lp), (rt, rp) in self.pairs:
            for w in lt + (lp,):
                left._check_world(w, "left context of a pair")
            for w in rt + (rp,):
                right._check_world(w, "right context of a pair")

    def to_json(self) -> Dict[str, Any]:
        rows = sorted([list(lt) + [lp], list(rt) + [rp]] for (lt, lp), (rt, rp) in self.pairs)
        return {"k": self.k, "pairs": [{"left": l, "right": r} for l, r in rows]}

    @classmethod
    def from_json(cls, data: Union[str, bytes, Mapping[str, Any]]) -> "PairRelation":
        """
        Read the ``{"k": int, "pairs": [{"left": [...], "right": [...]}]}`` document.

        Raises:
            ModelError: On a malformed document.
        """
        doc = json.loads(data) if isinstance(data, (str, bytes)) else data
        try:
            k = int(doc["k"])
            pairs = [((tuple(p["left"][:-1]), p["left"][-1]), (tuple(p["right"][:-1]), p["right"][-1]))
                     for p in doc["pairs"]]
        except (KeyError, TypeError, IndexError, ValueError) as e:
            raise ModelError(f"malformed pair relation: {e}")
        return cls(k, pairs)

    def __iter__(self) -> Iterator[Pair]:
        return iter(sorted(self.pairs))

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PairRelation):
            return NotImplemented
        return self.k == other.k and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash((self.k, self.pairs))

    def __repr__(self) -> str:
        return f"PairRelation(k={self.k}, pairs={len(self.pairs)})"


def load_model(data: Union[str, bytes, Mapping[str, Any]], sig: Optional[Signature] = None,
               name: str = "") -> KripkeModel:
    """
    Build a model from its JSON document.

    Args:
        data (Union[str, bytes, Mapping[str, Any]]): The document, raw or already decoded.
        sig (Signature, optional): Signature to validate against. Inferred from the document when omitted.
        name (str, optional): Label for the resulting model.

    Returns:
        KripkeModel: The validated model, shaped to ``sig``.

    Raises:
        ModelError: On schema violations, unknown worlds, duplicate worlds or uninterpreted nominals.
    """
    try:
        doc = json.loads(data) if isinstance(data, (str, bytes)) else data
    except json.JSONDecodeError as e:
        raise ModelError(f"model is not valid JSON: {e}")
    if not isinstance(doc, Mapping):
        raise ModelError("model document must be a JSON object")
    unknown = set(doc) - MODEL_KEYS
    if unknown:
        raise ModelError(f"unknown key(s) in model document: {sorted(unknown)}")
    if "worlds" not in doc:
        raise ModelError("model document lacks 'worlds'")
    worlds = doc["worlds"]
    rel = doc.get("rel", [])
    props = doc.get("prop", {})
    noms = doc.get("nom", {})
    if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
        raise ModelError("'worlds' must be a list of strings")
    if not isinstance(rel, list) or not all(isinstance(e, list) and len(e) == 2 for e in rel):
        raise ModelError("'rel' must be a list of [source, target] pairs")
    if not isinstance(props, Mapping) or not all(isinstance(v, list) for v in props.values()):
        raise ModelError("'prop' must map proposition names to lists of worlds")
    if not isinstance(noms, Mapping) or not all(isinstance(v, str) for v in noms.values()):
        raise ModelError("'nom' must map nominal names to worlds")
    if sig is None:
        try:
            sig = Signature(tuple(props), tuple(noms))
        except SignatureError as e:
            raise ModelError(str(e))
    else:
        extra = [p for p in props if p not in sig.props] + [s for s in noms if s not in sig.noms]
        if extra:
            raise ModelError(f"symbol(s) {extra} are not in the signature")
    model = KripkeModel(worlds, [tuple(e) for e in rel], props, noms, name)
    model = model.with_signature(sig)
    log.debug(f"[MODEL] loaded {model!r}")
    return model


def load_model_file(path: str, sig: Optional[Signature] = None) -> KripkeModel:
    with open(path, "rb") as f:
        return load_model(f.read(), sig, name=path)


def dump_model(model: KripkeModel, path: str) -> None:
    """Write a model as the JSON document ``load_model_file`` reads back."""
    with open(path, "w") as f:
        json.dump(model.to_json(), f, indent=2)
    log.debug(f"[MODEL] wrote {model!r} to {path}")


class Expansion:
    """
    Interpretations of extra first-order symbols on top of a model.

    Attributes:
        preds (Dict[str, FrozenSet[str]]): Extra unary predicate -> its extension.
        consts (Dict[str, str]): Extra constant -> the world it denotes.
    """
    def __init__(self, preds: Optional[Mapping[str, Iterable[str]]] = None,
                 consts: Optional[Mapping[str, str]] = None) -> None:
        self.preds = {P: frozenset(ws) for P, ws in (preds or {}).items()}
        self.consts = dict(consts or {})

    def merged(self, other: "Expansion") -> "Expansion":
        preds = dict(self.preds)
        preds.update(other.preds)
        consts = dict(self.consts)
        consts.update(other.consts)
        return Expansion(preds, consts)

    def __repr__(self) -> str:
        return f"Expansion(preds={sorted(self.preds)}, consts={sorted(self.consts)})"


class Structure:
    """A model read as a first-order structure, with an expansion for extra symbols."""
    def __init__(self, model: KripkeModel, expansion: Optional[Expansion] = None) -> None:
        self.model = model
        self.expansion = expansion or Expansion()
        for P, ws in self.expansion.preds.items():
            for w in ws:
                model._check_world(w, f"extension of {P}")
        for c, w in self.expansion.consts.items():
            model._check_world(w, f"constant {c}")

    def expand(self, preds: Optional[Mapping[str, Iterable[str]]] = None,
               consts: Optional[Mapping[str, str]] = None) -> "Structure":
        return Structure(self.model, self.expansion.merged(Expansion(preds, consts)))

    def __repr__(self) -> str:
        return f"Structure({self.model!r}, {self.expansion!r})"


def _as_structure(x: Union[KripkeModel, Structure]) -> Structure:
    return x if isinstance(x, Structure) else Structure(x)


def disjoint_union(a: Union[KripkeModel, Structure], b: Union[KripkeModel, Structure],
                   left_pred: Optional[str] = None,
                   right_pred: Optional[str] = None) -> Union[KripkeModel, Structure]:
    """
    Disjoint union of two structures over the same signature.

    Worlds are tagged with ``A:`` and ``B:``, relations and predicate extensions are
    unions, and every constant (nominals and extra constants) keeps its interpretation
    in ``a``.

    Args:
        a (Union[KripkeModel, Structure]): Left part; provides the constants.
        b (Union[KripkeModel, Structure]): Right part.
        left_pred (str, optional): Fresh unary predicate marking the left part.
        right_pred (str, optional): Fresh unary predicate marking the right part.

    Returns:
        Union[KripkeModel, Structure]: A model when both inputs are plain models and no
        marker is requested, otherwise a Structure.

    Raises:
        SignatureError: If the two sides do not share a signature.
    """
    sa, sb = _as_structure(a), _as_structure(b)
    ma, mb = sa.model, sb.model
    if set(ma.valuation) != set(mb.valuation) or set(ma.nominals) != set(mb.nominals) \
            or set(sa.expansion.preds) != set(sb.expansion.preds) \
            or set(sa.expansion.consts) != set(sb.expansion.consts):
        raise SignatureError("disjoint union needs both structures over the same signature")
    ra, rb = ma.rename(LEFT_TAG), mb.rename(RIGHT_TAG)
    valuation = {p: ra.valuation[p] | rb.valuation[p] for p in ma.valuation}
    model = KripkeModel(ra.worlds + rb.worlds, ra.rel | rb.rel, valuation, ra.nominals,
                        f"{ma.name or 'A'}+{mb.name or 'B'}")
    preds = {P: {LEFT_TAG + w for w in sa.expansion.preds[P]} | {RIGHT_TAG + w for w in sb.expansion.preds[P]}
             for P in sa.expansion.preds}
    consts = {c: LEFT_TAG + w for c, w in sa.expansion.consts.items()}
    for marker, part in ((left_pred, ra.worlds), (right_pred, rb.worlds)):
        if marker is not None:
            if marker in preds:
                raise SignatureError(f"marker predicate {marker} already interpreted")
            preds[marker] = set(part)
    if isinstance(a, KripkeModel) and isinstance(b, KripkeModel) and not preds:
        return model
    return Structure(model, Expansion(preds, consts))


def reachability(model: KripkeModel) -> FrozenSet[Tuple[str, str]]:
    """
    Reflexive transitive closure R* of the accessibility relation.

    Args:
        model (KripkeModel): The model.

    Returns:
        FrozenSet[Tuple[str, str]]: All (u, v) with v reachable from u in zero or more steps.
    """
    return model.reach()


def contexts(model: KripkeModel, k: int) -> List[Context]:
    """All (tuple, point) contexts of length k, in lexicographic world order."""
    return [(tuple(t), w) for t in product(model.worlds, repeat=k) for w in model.worlds]
