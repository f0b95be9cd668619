"""
Translations between the hybrid and the first-order language.

``st`` is the standard translation with a designated pair of first-order
variables (``stx``/``sty``), ``sbt`` the back translation of one-free-variable
formulas, ``relativise`` bounds quantifiers by a unary predicate and
``psi_sigma`` builds the formula used by the undecidability reduction.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from errors import SignatureError, TranslationError
from logic.fol import (Const, FoAnd, FoBot, FoEq, FoExists, FoForall, FoImplies, FolFormula,
                       FoNot, FoOr, FoPred, FoRel, FoTop, Term, Var, constants, free_vars,
                       predicates, substitute)
from logic.syntax import (KEYWORDS, And, At, Bot, Box, Dia, Down, Exists, HybridFormula, Implies,
                          Nom, Not, Or, Prop, Signature, Top, WVar, predicate_name)
from settings import LEFT_TAG, STX, STY
from world.kripke import KripkeModel, Structure, disjoint_union

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TranslationState:
    """
    The designated first-order variables of the standard translation.

    Attributes:
        x (str): Variable standing for the current world when the target is "x".
        y (str): The other designated variable.
    """
    x: str = STX
    y: str = STY

    def __post_init__(self) -> None:
        if self.x == self.y:
            raise TranslationError("designated variables must differ")

    def pick(self, target: str):
        if target == "x":
            return self.x, self.y
        if target == "y":
            return self.y, self.x
        raise TranslationError(f"target must be 'x' or 'y', got {target!r}")


def _place_term(place: Union[Nom, WVar]) -> Term:
    return Const(place.name) if isinstance(place, Nom) else Var(place.name)


def _check_variables(phi: HybridFormula, state: TranslationState) -> None:
    reserved = {state.x, state.y}

    def visit(node: HybridFormula) -> None:
        name = None
        if isinstance(node, WVar):
            name = node.name
        elif isinstance(node, (Down, Exists)):
            name = node.var
        if name is not None:
            if name in reserved:
                raise TranslationError(f"world variable ?{name} collides with a designated variable")
            if name in KEYWORDS or not name[0].islower():
                raise TranslationError(f"world variable ?{name} is not a valid first-order variable name")
        if isinstance(node, At):
            visit(node.place)
            visit(node.body)
        elif isinstance(node, (Or, And, Implies)):
            visit(node.left)
            visit(node.right)
        elif hasattr(node, "body"):
            visit(node.body)

    visit(phi)


def _st(phi: HybridFormula, cur: str, other: str) -> FolFormula:
    if isinstance(phi, Bot):
        return FoBot()
    if isinstance(phi, Top):
        return FoTop()
    if isinstance(phi, Prop):
        return FoPred(predicate_name(phi.name), Var(cur))
    if isinstance(phi, (Nom, WVar)):
        return FoEq(Var(cur), _place_term(phi))
    if isinstance(phi, Not):
        return FoNot(_st(phi.body, cur, other))
    if isinstance(phi, Or):
        return FoOr(_st(phi.left, cur, other), _st(phi.right, cur, other))
    if isinstance(phi, And):
        return FoAnd(_st(phi.left, cur, other), _st(phi.right, cur, other))
    if isinstance(phi, Implies):
        return FoImplies(_st(phi.left, cur, other), _st(phi.right, cur, other))
    if isinstance(phi, Dia):
        return FoExists(other, FoAnd(FoRel(Var(cur), Var(other)), _st(phi.body, other, cur)))
    if isinstance(phi, Box):
        return FoForall(other, FoImplies(FoRel(Var(cur), Var(other)), _st(phi.body, other, cur)))
    if isinstance(phi, Down):
        return FoExists(phi.var, FoAnd(FoEq(Var(phi.var), Var(cur)), _st(phi.body, cur, other)))
    if isinstance(phi, Exists):
        return FoExists(phi.var, _st(phi.body, cur, other))
    if isinstance(phi, At):
        # jump: the other designated variable names the target world
        return FoExists(other, FoAnd(FoEq(Var(other), _place_term(phi.place)), _st(phi.body, other, cur)))
    raise TypeError(f"not a hybrid formula: {phi!r}")


def st(phi: HybridFormula, target: str = "x", state: Optional[TranslationState] = None) -> FolFormula:
    """
    Standard translation ST_x (or ST_y) of a hybrid formula.

    Args:
        phi (HybridFormula): Formula without designated variable names.
        target (str): "x" or "y", the designated variable standing for the current world.
        state (TranslationState, optional): Designated variable names, stx/sty by default.

    Returns:
        FolFormula: A first-order formula whose free variables are the target and the
        free world variables of phi.

    Raises:
        TranslationError: On a designated-variable collision.
    """
    state = state or TranslationState()
    cur, other = state.pick(target)
    _check_variables(phi, state)
    result = _st(phi, cur, other)
    if cur not in free_vars(result):
        result = FoAnd(result, FoEq(Var(cur), Var(cur)))
    log.debug(f"[TRANSLATE] ST_{cur}({phi}) = {result}")
    return result


def _back_term(term: Term) -> Union[Nom, WVar]:
    return Nom(term.name) if isinstance(term, Const) else WVar(term.name)


def _f(phi: FolFormula, sig: Signature) -> HybridFormula:
    if isinstance(phi, FoBot):
        return Bot()
    if isinstance(phi, FoTop):
        return Top()
    if isinstance(phi, FoPred):
        prop = sig.prop_of_predicate(phi.pred)
        if prop is None:
            raise TranslationError(f"predicate {phi.pred} is not a proposition predicate")
        return At(_back_term(phi.term), Prop(prop))
    if isinstance(phi, FoRel):
        return At(_back_term(phi.left), Dia(_back_term(phi.right)))
    if isinstance(phi, FoEq):
        return At(_back_term(phi.left), _back_term(phi.right))
    if isinstance(phi, FoNot):
        return Not(_f(phi.body, sig))
    if isinstance(phi, FoOr):
        return Or(_f(phi.left, sig), _f(phi.right, sig))
    if isinstance(phi, FoAnd):
        return And(_f(phi.left, sig), _f(phi.right, sig))
    if isinstance(phi, FoImplies):
        return Implies(_f(phi.left, sig), _f(phi.right, sig))
    if isinstance(phi, FoExists):
        return Exists(phi.var, _f(phi.body, sig))
    if isinstance(phi, FoForall):
        return Not(Exists(phi.var, Not(_f(phi.body, sig))))
    raise TypeError(f"not a first-order formula: {phi!r}")


def _signature_of(phi: FolFormula) -> Signature:
    try:
        return Signature(tuple(sorted({P.lower() for P in predicates(phi)})), tuple(sorted(constants(phi))))
    except SignatureError as e:
        raise TranslationError(f"no correspondence signature fits the formula: {e}")


def sbt(phi: FolFormula, sig: Optional[Signature] = None) -> HybridFormula:
    """
    Back translation ``exists x . (?x & F(phi))`` of a formula with one free variable x.

    Args:
        phi (FolFormula): Formula over R, proposition predicates, nominals and equality.
        sig (Signature, optional): Predicates and constants are checked against it. When omitted
            it is read off phi: one proposition per unary predicate (its lower-case name) and one
            nominal per constant.

    Returns:
        HybridFormula: A hybrid sentence true at m exactly when phi holds with x at m.

    Raises:
        TranslationError: If phi does not have exactly one free variable or uses extra symbols.
    """
    free = free_vars(phi)
    if len(free) != 1:
        raise TranslationError(f"back translation needs exactly one free variable, found {sorted(free)}")
    sig = _signature_of(phi) if sig is None else sig.core()
    stray = [c for c in constants(phi) if c not in sig.noms]
    stray += [P for P in predicates(phi) if sig.prop_of_predicate(P) is None]
    if stray:
        raise TranslationError(f"symbol(s) {sorted(stray)} are outside the correspondence signature")
    (x,) = free
    return Exists(x, And(WVar(x), _f(phi, sig)))


def relativise(phi: FolFormula, pred: str) -> FolFormula:
    """
    Bound every quantifier of phi by the unary predicate ``pred``.

    Raises:
        TranslationError: If ``pred`` already occurs in phi.
    """
    if pred in predicates(phi):
        raise TranslationError(f"predicate {pred} already occurs in the formula")
    return _relativise(phi, pred)


def _relativise(phi: FolFormula, pred: str) -> FolFormula:
    if isinstance(phi, (FoBot, FoTop, FoPred, FoRel, FoEq)):
        return phi
    if isinstance(phi, FoNot):
        return FoNot(_relativise(phi.body, pred))
    if isinstance(phi, (FoOr, FoAnd, FoImplies)):
        return type(phi)(_relativise(phi.left, pred), _relativise(phi.right, pred))
    if isinstance(phi, FoExists):
        return FoExists(phi.var, FoAnd(FoPred(pred, Var(phi.var)), _relativise(phi.body, pred)))
    if isinstance(phi, FoForall):
        return FoForall(phi.var, FoImplies(FoPred(pred, Var(phi.var)), _relativise(phi.body, pred)))
    raise TypeError(f"not a first-order formula: {phi!r}")


def psi_sigma(sigma: FolFormula, phi_s: FolFormula, pred: str = "U", const: str = "d",
              sig: Optional[Signature] = None) -> FolFormula:
    """
    Build ``phi_S(x) | ((exists x . U(x)) -> sigma^U)``.

    Args:
        sigma (FolFormula): Closed formula whose validity is being reduced.
        phi_s (FolFormula): Formula with exactly one free variable x.
        pred (str): Fresh unary predicate U marking the appended part.
        const (str): Fresh constant the result is later instantiated with.
        sig (Signature, optional): Signature whose symbols the fresh names must avoid.

    Returns:
        FolFormula: The formula, with the same single free variable as phi_s.

    Raises:
        TranslationError: If sigma is not closed, phi_s has not exactly one free variable,
        or ``pred``/``const`` clash with symbols in use.
    """
    if free_vars(sigma):
        raise TranslationError(f"sigma must be closed, free: {sorted(free_vars(sigma))}")
    free = free_vars(phi_s)
    if len(free) != 1:
        raise TranslationError(f"phi_S needs exactly one free variable, found {sorted(free)}")
    used_preds = predicates(sigma) | predicates(phi_s)
    used_consts = constants(sigma) | constants(phi_s)
    if sig is not None:
        used_preds |= {predicate_name(p) for p in sig.props} | set(sig.extra_preds) - {pred}
        used_consts |= set(sig.noms) | set(sig.extra_consts) - {const}
    if pred in used_preds:
        raise TranslationError(f"predicate {pred} is not fresh")
    if const in used_consts:
        raise TranslationError(f"constant '{const} is not fresh")
    (x,) = free
    return FoOr(phi_s, FoImplies(FoExists(x, FoPred(pred, Var(x))), relativise(sigma, pred)))


def instantiate(phi: FolFormula, const: str) -> FolFormula:
    """Replace the single free variable of phi by the constant ``const``."""
    free = free_vars(phi)
    if len(free) != 1:
        raise TranslationError(f"expected exactly one free variable, found {sorted(free)}")
    (x,) = free
    return substitute(phi, x, Const(const))


class ReductionWitness(NamedTuple):
    left: Structure
    right: Structure
    formula: FolFormula


def invariance_counterexample(sigma: FolFormula, countermodel: KripkeModel,
                              a_model: KripkeModel, a: str, b_model: KripkeModel, b: str,
                              phi_s: FolFormula, pred: str = "U", const: str = "d") -> ReductionWitness:
    """
    Build the two structures of the reduction: A and B each extended by a copy of a
    countermodel C of sigma, with ``pred`` marking the C part and ``const`` naming a / b.

    When sigma fails in C the right disjunct of psi_sigma(d) is false in both structures,
    so psi_sigma(d) holds exactly where phi_S(d) does.

    Returns:
        ReductionWitness: The structures over A and over B and the closed formula psi_sigma(d).
    """
    formula = instantiate(psi_sigma(sigma, phi_s, pred, const, a_model.signature), const)
    left = disjoint_union(a_model, countermodel, right_pred=pred)
    right = disjoint_union(b_model, countermodel, right_pred=pred)
    left = left.expand(consts={const: LEFT_TAG + a})
    right = right.expand(consts={const: LEFT_TAG + b})
    return ReductionWitness(left, right, formula)
