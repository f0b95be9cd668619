"""Condition tags, the feature-to-condition mapping and verification reports."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional

from logic.syntax import Feature, FeatureSet
from world.kripke import Pair


class ConditionTag(str, Enum):
    PROP = "prop"
    WVAR = "wvar"
    FORTH = "forth"
    BACK = "back"
    NOM = "nom"
    BIND = "bind"
    ATV = "atv"
    ATN = "atn"
    EX_F = "ex_f"
    EX_B = "ex_b"
    EXT = "ext"
    CHAIN = "chain"
    SEED = "seed"


BASE_CONDITIONS = frozenset({ConditionTag.PROP, ConditionTag.WVAR, ConditionTag.FORTH, ConditionTag.BACK})
STRUCTURE_CONDITIONS = frozenset({ConditionTag.CHAIN, ConditionTag.EXT, ConditionTag.SEED})
GATED_CONDITIONS = frozenset({ConditionTag.NOM, ConditionTag.BIND, ConditionTag.ATV, ConditionTag.ATN,
                              ConditionTag.EX_F, ConditionTag.EX_B})

_NOM = frozenset({ConditionTag.NOM})
_BIND = frozenset({ConditionTag.BIND})
_ATV = frozenset({ConditionTag.ATV})
_ATN = frozenset({ConditionTag.ATN})
_EX = frozenset({ConditionTag.EX_F, ConditionTag.EX_B})

# (trigger, granted conditions), one row per clause
COND_CLAUSES = [
    ({Feature.NOM}, _NOM),
    ({Feature.DOWN}, _BIND),
    ({Feature.DOWN, Feature.NOM}, _BIND | _NOM),
    ({Feature.AT}, _ATV),
    ({Feature.AT, Feature.NOM}, _ATV | _ATN | _NOM),
    ({Feature.EXISTS}, _EX),
    ({Feature.EXISTS, Feature.NOM}, _EX | _NOM),
    ({Feature.DOWN, Feature.AT}, _BIND | _ATV),
    ({Feature.DOWN, Feature.AT, Feature.NOM}, _BIND | _ATV | _ATN | _NOM),
    ({Feature.EXISTS, Feature.AT}, _EX | _ATV),
    ({Feature.EXISTS, Feature.AT, Feature.NOM}, GATED_CONDITIONS),
]


def conds(features: FeatureSet) -> FrozenSet[ConditionTag]:
    """
    Conditions required of an F-bisimulation beyond the basic ones.

    Args:
        features (FeatureSet): The hybrid features F.

    Returns:
        FrozenSet[ConditionTag]: Union of the conditions of every triggered clause.
    """
    granted = set()
    for trigger, conditions in COND_CLAUSES:
        if trigger <= features:
            granted |= conditions
    return frozenset(granted)


@dataclass(frozen=True)
class Violation:
    """
    One failed condition.

    Attributes:
        tag (ConditionTag): The condition.
        level (Optional[int]): Level i of the offending pair (None for unlevelled relations).
        k (int): Tuple length.
        pair (Optional[Pair]): The offending pair, None for whole-relation failures.
        detail (str): What is missing.
    """
    tag: ConditionTag
    level: Optional[int]
    k: int
    pair: Optional[Pair]
    detail: str

    def to_json(self) -> Dict[str, Any]:
        doc = {"tag": self.tag.value, "level": self.level, "k": self.k, "detail": self.detail}
        if self.pair is not None:
            (lt, lp), (rt, rp) = self.pair
            doc.update(left=list(lt) + [lp], right=list(rt) + [rp])
        return doc

    def __str__(self) -> str:
        where = f"Z[{self.k}][{self.level}]" if self.level is not None else f"B_{self.k}"
        if self.pair is None:
            return f"({self.tag.value}) at {where}: {self.detail}"
        (lt, lp), (rt, rp) = self.pair
        return f"({self.tag.value}) at {where} pair (({','.join(lt)}),{lp}) ~ (({','.join(rt)}),{rp}): {self.detail}"


@dataclass
class VerifyReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, tag: ConditionTag, level: Optional[int], k: int, pair: Optional[Pair], detail: str) -> None:
        self.violations.append(Violation(tag, level, k, pair, detail))

    def tags(self) -> FrozenSet[ConditionTag]:
        return frozenset(v.tag for v in self.violations)

    def of(self, tag: ConditionTag) -> List[Violation]:
        return [v for v in self.violations if v.tag == tag]

    def to_json(self) -> Dict[str, Any]:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}
