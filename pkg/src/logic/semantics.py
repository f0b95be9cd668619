"""
Satisfaction for hybrid formulas and for first-order formulas over finite models.

Both evaluators are plain structural recursion. Existential clauses scan worlds
and successors in the model's declared order, so the first witness found is
deterministic.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from errors import EvaluationError, ModelError
from logic.fol import (FoAnd, FoBot, FoEq, FoExists, FoForall, FoImplies, FolFormula,
                       FoNot, FoOr, FoPred, FoRel, FoTop, Term, Var)
from logic.syntax import (And, At, Bot, Box, Dia, Down, Exists, HybridFormula, Implies, Nom,
                          Not, Or, Prop, Top, WVar, predicate_name)
from settings import slot_names
from world.kripke import Assignment, KripkeModel, Structure

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HybridContext:
    """
    The triple (model, assignment, point) a hybrid formula is evaluated at.

    Attributes:
        model (KripkeModel): The model.
        assignment (Tuple[str, ...]): World stored in each slot; an ``Assignment`` is unpacked.
        point (str): Current world.
        slots (Tuple[str, ...]): Variable name of each slot, x1..xk unless given.
    """
    model: KripkeModel
    assignment: Tuple[str, ...]
    point: str
    slots: Tuple[str, ...] = field(default=None)

    def __post_init__(self) -> None:
        worlds = self.assignment.worlds if isinstance(self.assignment, Assignment) else self.assignment
        object.__setattr__(self, "assignment", tuple(worlds))
        if self.slots is None:
            object.__setattr__(self, "slots", slot_names(len(self.assignment)))
        else:
            object.__setattr__(self, "slots", tuple(self.slots))
        if len(self.slots) != len(self.assignment):
            raise EvaluationError(f"{len(self.slots)} slot names for a tuple of length {len(self.assignment)}")
        if len(set(self.slots)) != len(self.slots):
            raise EvaluationError(f"duplicate slot names {list(self.slots)}")
        for w in self.assignment + (self.point,):
            if w not in self.model.index:
                raise ModelError(f"'{w}' is not a world of {self.model!r}")

    def environment(self) -> Dict[str, str]:
        return dict(zip(self.slots, self.assignment))


def _resolve_place(model: KripkeModel, env: Mapping[str, str], place: Union[Nom, WVar]) -> str:
    if isinstance(place, Nom):
        if place.name not in model.nominals:
            raise EvaluationError(f"nominal '{place.name}' is not interpreted")
        return model.nominals[place.name]
    if place.name not in env:
        raise EvaluationError(f"world variable ?{place.name} has no slot")
    return env[place.name]


def _sat(model: KripkeModel, env: Dict[str, str], point: str, phi: HybridFormula) -> bool:
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Prop):
        if phi.name not in model.valuation:
            raise EvaluationError(f"proposition '{phi.name}' is not interpreted")
        return point in model.valuation[phi.name]
    if isinstance(phi, (Nom, WVar)):
        return _resolve_place(model, env, phi) == point
    if isinstance(phi, Not):
        return not _sat(model, env, point, phi.body)
    if isinstance(phi, Or):
        return _sat(model, env, point, phi.left) or _sat(model, env, point, phi.right)
    if isinstance(phi, And):
        return _sat(model, env, point, phi.left) and _sat(model, env, point, phi.right)
    if isinstance(phi, Implies):
        return not _sat(model, env, point, phi.left) or _sat(model, env, point, phi.right)
    if isinstance(phi, Dia):
        return any(_sat(model, env, v, phi.body) for v in model.successors(point))
    if isinstance(phi, Box):
        return all(_sat(model, env, v, phi.body) for v in model.successors(point))
    if isinstance(phi, Down):
        return _sat(model, {**env, phi.var: point}, point, phi.body)
    if isinstance(phi, Exists):
        return any(_sat(model, {**env, phi.var: w}, point, phi.body) for w in model.worlds)
    if isinstance(phi, At):
        return _sat(model, env, _resolve_place(model, env, phi.place), phi.body)
    raise TypeError(f"not a hybrid formula: {phi!r}")


def sat_hybrid(ctx: HybridContext, phi: HybridFormula) -> bool:
    """
    Decide M, m̄, m ⊩ phi.

    Args:
        ctx (HybridContext): Model, assignment tuple and current world.
        phi (HybridFormula): Formula whose free world variables are slot names of ctx.

    Returns:
        bool: Whether phi holds.

    Raises:
        EvaluationError: If a free world variable has no slot, or a symbol is uninterpreted.
    """
    return _sat(ctx.model, ctx.environment(), ctx.point, phi)


def find_witness(ctx: HybridContext, phi: HybridFormula) -> Optional[str]:
    """
    First world (in declared order) witnessing a top-level <> or exists.

    Returns:
        Optional[str]: The witness, or None when phi is false or not existential.
    """
    model, env = ctx.model, ctx.environment()
    if isinstance(phi, Dia):
        return next((v for v in model.successors(ctx.point) if _sat(model, env, v, phi.body)), None)
    if isinstance(phi, Exists):
        return next((w for w in model.worlds if _sat(model, {**env, phi.var: w}, ctx.point, phi.body)), None)
    return None


def truth_vector(models: Sequence[KripkeModel], k: int, phi: HybridFormula,
                 slots: Optional[Sequence[str]] = None) -> List[bool]:
    """
    Value of phi at every context (m̄, m) of every model, tuples of length k.

    Contexts are ordered model by model, tuples lexicographically, then points.
    """
    names = tuple(slots) if slots is not None else slot_names(k)
    values = []
    for model in models:
        for t in product(model.worlds, repeat=k):
            env = dict(zip(names, t))
            values.extend(_sat(model, env, w, phi) for w in model.worlds)
    return values


def _term_value(structure: Structure, env: Mapping[str, str], term: Term) -> str:
    if isinstance(term, Var):
        if term.name not in env:
            raise EvaluationError(f"variable {term.name} is not assigned")
        return env[term.name]
    model = structure.model
    if term.name in model.nominals:
        return model.nominals[term.name]
    if term.name in structure.expansion.consts:
        return structure.expansion.consts[term.name]
    raise EvaluationError(f"constant '{term.name} is not interpreted")


def _extension(structure: Structure, pred: str):
    model = structure.model
    for p, ws in model.valuation.items():
        if predicate_name(p) == pred:
            return ws
    if pred in structure.expansion.preds:
        return structure.expansion.preds[pred]
    raise EvaluationError(f"predicate {pred} is not interpreted")


def _fol(structure: Structure, env: Dict[str, str], phi: FolFormula) -> bool:
    if isinstance(phi, FoBot):
        return False
    if isinstance(phi, FoTop):
        return True
    if isinstance(phi, FoPred):
        return _term_value(structure, env, phi.term) in _extension(structure, phi.pred)
    if isinstance(phi, FoRel):
        edge = (_term_value(structure, env, phi.left), _term_value(structure, env, phi.right))
        return edge in structure.model.rel
    if isinstance(phi, FoEq):
        return _term_value(structure, env, phi.left) == _term_value(structure, env, phi.right)
    if isinstance(phi, FoNot):
        return not _fol(structure, env, phi.body)
    if isinstance(phi, FoOr):
        return _fol(structure, env, phi.left) or _fol(structure, env, phi.right)
    if isinstance(phi, FoAnd):
        return _fol(structure, env, phi.left) and _fol(structure, env, phi.right)
    if isinstance(phi, FoImplies):
        return not _fol(structure, env, phi.left) or _fol(structure, env, phi.right)
    if isinstance(phi, FoExists):
        return any(_fol(structure, {**env, phi.var: w}, phi.body) for w in structure.model.worlds)
    if isinstance(phi, FoForall):
        return all(_fol(structure, {**env, phi.var: w}, phi.body) for w in structure.model.worlds)
    raise TypeError(f"not a first-order formula: {phi!r}")


def sat_fol(structure: Union[KripkeModel, Structure], env: Mapping[str, str], phi: FolFormula) -> bool:
    """
    Tarskian satisfaction: P is V(p), R is the accessibility relation, nominals are
    constants, and extra symbols come from the structure's expansion.

    Args:
        structure (Union[KripkeModel, Structure]): The model, possibly expanded.
        env (Mapping[str, str]): Values of the free variables of phi.
        phi (FolFormula): The formula.

    Returns:
        bool: Whether phi holds under env.

    Raises:
        EvaluationError: On an unassigned variable or an uninterpreted symbol.
    """
    if isinstance(structure, KripkeModel):
        structure = Structure(structure)
    for w in env.values():
        if w not in structure.model.index:
            raise ModelError(f"'{w}' is not a world of {structure.model!r}")
    return _fol(structure, dict(env), phi)
