"""
First-order formulas over the correspondence signature: one binary relation R,
a unary predicate per proposition, nominals as constants, and equality.
"""

from dataclasses import dataclass
from typing import ClassVar, Set, Union

from logic.syntax import RELATION


class FolNode:
    derived: ClassVar[bool] = False

    def __str__(self) -> str:
        return fol_to_text(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return f"'{self.name}"


Term = Union[Var, Const]


@dataclass(frozen=True)
class FoBot(FolNode):
    pass


@dataclass(frozen=True)
class FoTop(FolNode):
    derived: ClassVar[bool] = True


@dataclass(frozen=True)
class FoPred(FolNode):
    pred: str
    term: Term


@dataclass(frozen=True)
class FoRel(FolNode):
    left: Term
    right: Term


@dataclass(frozen=True)
class FoEq(FolNode):
    left: Term
    right: Term


@dataclass(frozen=True)
class FoNot(FolNode):
    body: "FolFormula"


@dataclass(frozen=True)
class FoOr(FolNode):
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class FoAnd(FolNode):
    left: "FolFormula"
    right: "FolFormula"
    derived: ClassVar[bool] = True


@dataclass(frozen=True)
class FoImplies(FolNode):
    left: "FolFormula"
    right: "FolFormula"
    derived: ClassVar[bool] = True


@dataclass(frozen=True)
class FoExists(FolNode):
    var: str
    body: "FolFormula"


@dataclass(frozen=True)
class FoForall(FolNode):
    var: str
    body: "FolFormula"


FolFormula = Union[FoBot, FoTop, FoPred, FoRel, FoEq, FoNot, FoOr, FoAnd, FoImplies, FoExists, FoForall]

FO_ATOMS = (FoBot, FoTop, FoPred, FoRel, FoEq)
FO_BINARY = (FoOr, FoAnd, FoImplies)
FO_QUANTIFIERS = (FoExists, FoForall)


def _term_vars(*terms: Term) -> Set[str]:
    return {t.name for t in terms if isinstance(t, Var)}


def atom_terms(phi: FolFormula):
    if isinstance(phi, FoPred):
        return (phi.term,)
    if isinstance(phi, (FoRel, FoEq)):
        return (phi.left, phi.right)
    return ()


def free_vars(phi: FolFormula) -> Set[str]:
    if isinstance(phi, FO_ATOMS):
        return _term_vars(*atom_terms(phi))
    if isinstance(phi, FO_QUANTIFIERS):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, FO_BINARY):
        return free_vars(phi.left) | free_vars(phi.right)
    return free_vars(phi.body)


def all_vars(phi: FolFormula) -> Set[str]:
    """Every variable name occurring in phi, bound or free."""
    if isinstance(phi, FO_ATOMS):
        return _term_vars(*atom_terms(phi))
    if isinstance(phi, FO_QUANTIFIERS):
        return all_vars(phi.body) | {phi.var}
    if isinstance(phi, FO_BINARY):
        return all_vars(phi.left) | all_vars(phi.right)
    return all_vars(phi.body)


def predicates(phi: FolFormula) -> Set[str]:
    """Unary predicate names used in phi (R is not included)."""
    if isinstance(phi, FoPred):
        return {phi.pred}
    if isinstance(phi, FO_ATOMS):
        return set()
    if isinstance(phi, FO_BINARY):
        return predicates(phi.left) | predicates(phi.right)
    return predicates(phi.body)


def constants(phi: FolFormula) -> Set[str]:
    if isinstance(phi, FO_ATOMS):
        return {t.name for t in atom_terms(phi) if isinstance(t, Const)}
    if isinstance(phi, FO_BINARY):
        return constants(phi.left) | constants(phi.right)
    return constants(phi.body)


def is_closed(phi: FolFormula) -> bool:
    return not free_vars(phi)


def substitute(phi: FolFormula, var: str, term: Term) -> FolFormula:
    """
    Replace the free occurrences of ``var`` by ``term``.

    Substitution stops under a quantifier binding ``var``. Callers must make sure
    ``term`` is not captured by a quantifier of phi.
    """
    def sub(t: Term) -> Term:
        return term if isinstance(t, Var) and t.name == var else t

    if isinstance(phi, FoPred):
        return FoPred(phi.pred, sub(phi.term))
    if isinstance(phi, (FoRel, FoEq)):
        return type(phi)(sub(phi.left), sub(phi.right))
    if isinstance(phi, (FoBot, FoTop)):
        return phi
    if isinstance(phi, FO_QUANTIFIERS):
        if phi.var == var:
            return phi
        return type(phi)(phi.var, substitute(phi.body, var, term))
    if isinstance(phi, FO_BINARY):
        return type(phi)(substitute(phi.left, var, term), substitute(phi.right, var, term))
    return FoNot(substitute(phi.body, var, term))


def fol_eliminate_sugar(phi: FolFormula) -> FolFormula:
    """Rewrite true, &, -> and forall into false, ~, |, exists."""
    if isinstance(phi, FoTop):
        return FoNot(FoBot())
    if isinstance(phi, FO_ATOMS):
        return phi
    if isinstance(phi, FoNot):
        return FoNot(fol_eliminate_sugar(phi.body))
    if isinstance(phi, FoOr):
        return FoOr(fol_eliminate_sugar(phi.left), fol_eliminate_sugar(phi.right))
    if isinstance(phi, FoAnd):
        return FoNot(FoOr(FoNot(fol_eliminate_sugar(phi.left)), FoNot(fol_eliminate_sugar(phi.right))))
    if isinstance(phi, FoImplies):
        return FoOr(FoNot(fol_eliminate_sugar(phi.left)), fol_eliminate_sugar(phi.right))
    if isinstance(phi, FoExists):
        return FoExists(phi.var, fol_eliminate_sugar(phi.body))
    if isinstance(phi, FoForall):
        return FoNot(FoExists(phi.var, FoNot(fol_eliminate_sugar(phi.body))))
    raise TypeError(f"not a first-order formula: {phi!r}")


def quantifier_depth(phi: FolFormula) -> int:
    if isinstance(phi, FO_ATOMS):
        return 0
    if isinstance(phi, FO_QUANTIFIERS):
        return 1 + quantifier_depth(phi.body)
    if isinstance(phi, FO_BINARY):
        return max(quantifier_depth(phi.left), quantifier_depth(phi.right))
    return quantifier_depth(phi.body)


def _operand(phi: FolFormula) -> str:
    text = fol_to_text(phi)
    return f"({text})" if isinstance(phi, FO_QUANTIFIERS) else text


def fol_to_text(phi: FolFormula) -> str:
    """Print in the concrete syntax accepted by ``parse_fol``."""
    if isinstance(phi, FoBot):
        return "false"
    if isinstance(phi, FoTop):
        return "true"
    if isinstance(phi, FoPred):
        return f"{phi.pred}({phi.term})"
    if isinstance(phi, FoRel):
        return f"{RELATION}({phi.left},{phi.right})"
    if isinstance(phi, FoEq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, FoNot):
        body = phi.body
        text = _operand(body)
        return f"~({text})" if isinstance(body, FoEq) else f"~{text}"
    if isinstance(phi, FoOr):
        return f"({_operand(phi.left)} | {_operand(phi.right)})"
    if isinstance(phi, FoAnd):
        return f"({_operand(phi.left)} & {_operand(phi.right)})"
    if isinstance(phi, FoImplies):
        return f"({_operand(phi.left)} -> {_operand(phi.right)})"
    if isinstance(phi, FoExists):
        return f"exists {phi.var} . {fol_to_text(phi.body)}"
    if isinstance(phi, FoForall):
        return f"forall {phi.var} . {fol_to_text(phi.body)}"
    raise TypeError(f"not a first-order formula: {phi!r}")
