"""
Hybrid formulas: signatures, feature sets, the AST and its analyses.

Propositions are bare lowercase identifiers, nominals carry a leading quote
(``'s``) and world variables a leading question mark (``?x``). Sugar nodes
(``Top``, ``And``, ``Implies``, ``Box``) stay in the tree so printing gives
back what was parsed; ``eliminate_sugar`` rewrites them into the core grammar.
"""

import re
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, FrozenSet, Iterable, Optional, Set, Tuple, Union

from errors import SignatureError

PROP_PATTERN = re.compile(r"[a-z][a-z0-9_]*\Z")
NAME_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
PRED_PATTERN = re.compile(r"[A-Z][A-Z0-9_]*\Z")
KEYWORDS = frozenset({"down", "exists", "forall", "true", "false"})
RELATION = "R"


class Feature(str, Enum):
    NOM = "nom"
    DOWN = "down"
    AT = "at"
    EXISTS = "exists"


FeatureSet = FrozenSet[Feature]
NO_FEATURES: FeatureSet = frozenset()
ALL_FEATURES: FeatureSet = frozenset(Feature)
BINDERS: FeatureSet = frozenset({Feature.DOWN, Feature.EXISTS})


def parse_features(names_text: Union[str, Iterable[str], None]) -> FeatureSet:
    """
    Turn a comma-separated list (or an iterable of names) into a feature set.

    Args:
        names_text (Union[str, Iterable[str], None]): e.g. "down,nom". None or "" is the empty set.

    Returns:
        FeatureSet: The parsed features.

    Raises:
        SignatureError: If a name is not one of nom, down, at, exists.
    """
    if names_text is None:
        return NO_FEATURES
    names = names_text.split(",") if isinstance(names_text, str) else list(names_text)
    result = set()
    for name in names:
        name = name.strip()
        if not name:
            continue
        try:
            result.add(Feature(name))
        except ValueError:
            raise SignatureError(f"unknown feature '{name}' (expected nom, down, at, exists)")
    return frozenset(result)


def format_features(features: FeatureSet) -> str:
    return ",".join(f.value for f in Feature if f in features)


def predicate_name(prop: str) -> str:
    """Name of the unary predicate standing for proposition ``prop``."""
    return prop.upper()


@dataclass(frozen=True)
class Signature:
    """
    A finite hybrid signature, optionally expanded with first-order symbols.

    Attributes:
        props (Tuple[str, ...]): Proposition names, in declaration order.
        noms (Tuple[str, ...]): Nominal names, in declaration order.
        extra_preds (Tuple[str, ...]): Extra unary predicates (first-order side only).
        extra_consts (Tuple[str, ...]): Extra constants (first-order side only).
    """
    props: Tuple[str, ...] = ()
    noms: Tuple[str, ...] = ()
    extra_preds: Tuple[str, ...] = ()
    extra_consts: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for attr in ("props", "noms", "extra_preds", "extra_consts"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        for kind, names in (("proposition", self.props), ("nominal", self.noms),
                            ("predicate", self.extra_preds), ("constant", self.extra_consts)):
            if len(set(names)) != len(names):
                raise SignatureError(f"duplicate {kind} names in {list(names)}")
        for p in self.props:
            if not PROP_PATTERN.match(p) or p in KEYWORDS:
                raise SignatureError(f"invalid proposition name '{p}'")
            if predicate_name(p) == RELATION:
                raise SignatureError(f"proposition '{p}' would clash with the relation symbol R")
        for s in self.noms + self.extra_consts:
            if not NAME_PATTERN.match(s):
                raise SignatureError(f"invalid constant name '{s}'")
        if set(self.props) & set(self.noms):
            raise SignatureError(f"propositions and nominals overlap: {sorted(set(self.props) & set(self.noms))}")
        if set(self.noms) & set(self.extra_consts):
            raise SignatureError("extra constants must not reuse nominal names")
        core_preds = {predicate_name(p) for p in self.props}
        for P in self.extra_preds:
            if not PRED_PATTERN.match(P) or P == RELATION or P in core_preds:
                raise SignatureError(f"invalid or clashing extra predicate '{P}'")

    @property
    def is_core(self) -> bool:
        return not self.extra_preds and not self.extra_consts

    def core(self) -> "Signature":
        return Signature(self.props, self.noms)

    def expand(self, preds: Iterable[str] = (), consts: Iterable[str] = ()) -> "Signature":
        """Return this signature with extra unary predicates and constants declared."""
        return Signature(self.props, self.noms,
                         self.extra_preds + tuple(preds), self.extra_consts + tuple(consts))

    def union(self, other: "Signature") -> "Signature":
        props = self.props + tuple(p for p in other.props if p not in self.props)
        noms = self.noms + tuple(s for s in other.noms if s not in self.noms)
        return Signature(props, noms)

    def prop_of_predicate(self, pred: str) -> Optional[str]:
        for p in self.props:
            if predicate_name(p) == pred:
                return p
        return None


class HybridNode:
    """Base of every hybrid AST node. Printing goes through ``to_text``."""
    derived: ClassVar[bool] = False

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Bot(HybridNode):
    pass


@dataclass(frozen=True)
class Top(HybridNode):
    derived: ClassVar[bool] = True


@dataclass(frozen=True)
class Prop(HybridNode):
    name: str


@dataclass(frozen=True)
class Nom(HybridNode):
    name: str


@dataclass(frozen=True)
class WVar(HybridNode):
    name: str


@dataclass(frozen=True)
class Not(HybridNode):
    body: "HybridFormula"


@dataclass(frozen=True)
class Or(HybridNode):
    left: "HybridFormula"
    right: "HybridFormula"


@dataclass(frozen=True)
class And(HybridNode):
    left: "HybridFormula"
    right: "HybridFormula"
    derived: ClassVar[bool] = True


@dataclass(frozen=True)
class Implies(HybridNode):
    left: "HybridFormula"
    right: "HybridFormula"
    derived: ClassVar[bool] = True


@dataclass(frozen=True)
class Dia(HybridNode):
    body: "HybridFormula"


@dataclass(frozen=True)
class Box(HybridNode):
    body: "HybridFormula"
    derived: ClassVar[bool] = True


@dataclass(frozen=True)
class Down(HybridNode):
    var: str
    body: "HybridFormula"


@dataclass(frozen=True)
class Exists(HybridNode):
    var: str
    body: "HybridFormula"


@dataclass(frozen=True)
class At(HybridNode):
    place: Union[Nom, WVar]
    body: "HybridFormula"

    def __post_init__(self) -> None:
        if not isinstance(self.place, (Nom, WVar)):
            raise TypeError(f"@ needs a nominal or world variable, got {self.place!r}")


HybridFormula = Union[Bot, Top, Prop, Nom, WVar, Not, Or, And, Implies, Dia, Box, Down, Exists, At]

ATOMS = (Bot, Top, Prop, Nom, WVar)
UNARY = (Not, Dia, Box)
BINARY = (Or, And, Implies)
BINDER_NODES = (Down, Exists)
TOP = Top()
BOT = Bot()


def conjoin(formulas: Iterable[HybridFormula]) -> HybridFormula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    result = None
    for phi in formulas:
        result = phi if result is None else And(result, phi)
    return TOP if result is None else result


def disjoin(formulas: Iterable[HybridFormula]) -> HybridFormula:
    """Left-nested disjunction; the empty disjunction is ``false``."""
    result = None
    for phi in formulas:
        result = phi if result is None else Or(result, phi)
    return BOT if result is None else result


def degree(phi: HybridFormula) -> int:
    """
    Modal degree: raised by one by <>, [], down and exists; ~ and @ leave it unchanged.

    Args:
        phi (HybridFormula): Formula to measure.

    Returns:
        int: The degree of phi.
    """
    if isinstance(phi, ATOMS):
        return 0
    if isinstance(phi, (Not, At)):
        return degree(phi.body)
    if isinstance(phi, BINARY):
        return max(degree(phi.left), degree(phi.right))
    if isinstance(phi, (Dia, Box, Down, Exists)):
        return degree(phi.body) + 1
    raise TypeError(f"not a hybrid formula: {phi!r}")


def size(phi: HybridFormula) -> int:
    """Number of nodes, counting an @ place as part of its node."""
    if isinstance(phi, ATOMS):
        return 1
    if isinstance(phi, BINARY):
        return 1 + size(phi.left) + size(phi.right)
    return 1 + size(phi.body)


def free_wvars(phi: HybridFormula) -> Set[str]:
    """
    World variables with a free occurrence. down and exists bind; @?x does not.

    Args:
        phi (HybridFormula): Formula to scan.

    Returns:
        Set[str]: Names of the free world variables.
    """
    if isinstance(phi, WVar):
        return {phi.name}
    if isinstance(phi, (Bot, Top, Prop, Nom)):
        return set()
    if isinstance(phi, At):
        return free_wvars(phi.place) | free_wvars(phi.body)
    if isinstance(phi, BINDER_NODES):
        return free_wvars(phi.body) - {phi.var}
    if isinstance(phi, BINARY):
        return free_wvars(phi.left) | free_wvars(phi.right)
    return free_wvars(phi.body)


def is_sentence(phi: HybridFormula) -> bool:
    return not free_wvars(phi)


def default_k(features: FeatureSet, L: int) -> int:
    """Tuple length a degree-L sentence can need: L when a binder is available, else 0."""
    return L if features & BINDERS else 0


def features(phi: HybridFormula) -> FeatureSet:
    """
    Syntactic feature scan.

    Args:
        phi (HybridFormula): Formula to scan.

    Returns:
        FeatureSet: nom if a nominal occurs (an @ place included), down, at and exists
        if the corresponding operator occurs.
    """
    found = set()

    def visit(node: HybridFormula) -> None:
        if isinstance(node, Nom):
            found.add(Feature.NOM)
        elif isinstance(node, At):
            found.add(Feature.AT)
            visit(node.place)
            visit(node.body)
        elif isinstance(node, Down):
            found.add(Feature.DOWN)
            visit(node.body)
        elif isinstance(node, Exists):
            found.add(Feature.EXISTS)
            visit(node.body)
        elif isinstance(node, BINARY):
            visit(node.left)
            visit(node.right)
        elif isinstance(node, UNARY):
            visit(node.body)

    visit(phi)
    return frozenset(found)


def eliminate_sugar(phi: HybridFormula) -> HybridFormula:
    """
    Rewrite Top, And, Implies and Box with the core constructors.

    Args:
        phi (HybridFormula): Formula possibly containing sugar.

    Returns:
        HybridFormula: An equivalent tree over Bot, Prop, Nom, WVar, Not, Or, Dia, Down, At, Exists.
    """
    if isinstance(phi, Top):
        return Not(BOT)
    if isinstance(phi, (Bot, Prop, Nom, WVar)):
        return phi
    if isinstance(phi, Not):
        return Not(eliminate_sugar(phi.body))
    if isinstance(phi, Or):
        return Or(eliminate_sugar(phi.left), eliminate_sugar(phi.right))
    if isinstance(phi, And):
        return Not(Or(Not(eliminate_sugar(phi.left)), Not(eliminate_sugar(phi.right))))
    if isinstance(phi, Implies):
        return Or(Not(eliminate_sugar(phi.left)), eliminate_sugar(phi.right))
    if isinstance(phi, Dia):
        return Dia(eliminate_sugar(phi.body))
    if isinstance(phi, Box):
        return Not(Dia(Not(eliminate_sugar(phi.body))))
    if isinstance(phi, Down):
        return Down(phi.var, eliminate_sugar(phi.body))
    if isinstance(phi, Exists):
        return Exists(phi.var, eliminate_sugar(phi.body))
    if isinstance(phi, At):
        return At(phi.place, eliminate_sugar(phi.body))
    raise TypeError(f"not a hybrid formula: {phi!r}")


def is_core(phi: HybridFormula) -> bool:
    """True when no sugar node occurs in phi."""
    if phi.derived:
        return False
    if isinstance(phi, (Bot, Prop, Nom, WVar)):
        return True
    if isinstance(phi, BINARY):
        return is_core(phi.left) and is_core(phi.right)
    return is_core(phi.body)


def down_as_exists(phi: HybridFormula) -> HybridFormula:
    """Replace every ``down x . psi`` by ``exists x . (?x & psi)``."""
    if isinstance(phi, ATOMS):
        return phi
    if isinstance(phi, Down):
        return Exists(phi.var, And(WVar(phi.var), down_as_exists(phi.body)))
    if isinstance(phi, Exists):
        return Exists(phi.var, down_as_exists(phi.body))
    if isinstance(phi, At):
        return At(phi.place, down_as_exists(phi.body))
    if isinstance(phi, BINARY):
        return type(phi)(down_as_exists(phi.left), down_as_exists(phi.right))
    return type(phi)(down_as_exists(phi.body))


def place_text(place: Union[Nom, WVar]) -> str:
    return f"'{place.name}" if isinstance(place, Nom) else f"?{place.name}"


def _binder_var(name: str) -> str:
    return f"?{name}" if name in KEYWORDS or not NAME_PATTERN.match(name) else name


def _operand(phi: HybridFormula) -> str:
    # binders extend to the right, so they need parentheses as operands
    text = to_text(phi)
    return f"({text})" if isinstance(phi, BINDER_NODES) else text


def to_text(phi: HybridFormula) -> str:
    """
    Print a formula in the concrete syntax accepted by ``parse_hybrid``.

    Args:
        phi (HybridFormula): Formula to print.

    Returns:
        str: Text that parses back to the same tree.
    """
    if isinstance(phi, Bot):
        return "false"
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Prop):
        return phi.name
    if isinstance(phi, (Nom, WVar)):
        return place_text(phi)
    if isinstance(phi, Not):
        return f"~{_operand(phi.body)}"
    if isinstance(phi, Dia):
        return f"<> {_operand(phi.body)}"
    if isinstance(phi, Box):
        return f"[] {_operand(phi.body)}"
    if isinstance(phi, At):
        return f"@{place_text(phi.place)} {_operand(phi.body)}"
    if isinstance(phi, Or):
        return f"({_operand(phi.left)} | {_operand(phi.right)})"
    if isinstance(phi, And):
        return f"({_operand(phi.left)} & {_operand(phi.right)})"
    if isinstance(phi, Implies):
        return f"({_operand(phi.left)} -> {_operand(phi.right)})"
    if isinstance(phi, Down):
        return f"down {_binder_var(phi.var)} . {to_text(phi.body)}"
    if isinstance(phi, Exists):
        return f"exists {_binder_var(phi.var)} . {to_text(phi.body)}"
    raise TypeError(f"not a hybrid formula: {phi!r}")


def symbols(phi: HybridFormula) -> Tuple[Set[str], Set[str]]:
    """Propositions and nominals occurring in phi."""
    props, noms = set(), set()

    def visit(node: HybridFormula) -> None:
        if isinstance(node, Prop):
            props.add(node.name)
        elif isinstance(node, Nom):
            noms.add(node.name)
        elif isinstance(node, At):
            visit(node.place)
            visit(node.body)
        elif isinstance(node, BINARY):
            visit(node.left)
            visit(node.right)
        elif not isinstance(node, ATOMS):
            visit(node.body)

    visit(phi)
    return props, noms
