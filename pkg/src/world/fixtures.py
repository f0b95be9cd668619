"""
Small named structures (infinite ones truncated at a depth) and random models for
property tests and sweeps.

Every fixture takes an optional signature. Each declared proposition holds at every
world; nominals name the root world, except in ``fig1`` where ``s`` and ``t`` name
the two roots and the first leaves.
"""

import random
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx

from errors import FixtureError
from logic.syntax import Signature
from world.kripke import KripkeModel, Pair, PairRelation

DEFAULT_FIXTURE_SIG = Signature(("p",))
FIG1_SIG = Signature(("p",), ("s", "t"))


class Figure(NamedTuple):
    left: KripkeModel
    right: KripkeModel
    relation: PairRelation


def _model(name: str, worlds: Sequence[str], rel: Sequence[Tuple[str, str]], sig: Signature,
           named: Optional[Dict[str, str]] = None) -> KripkeModel:
    named = named or {}
    valuation = {p: list(worlds) for p in sig.props}
    nominals = {s: named.get(s, worlds[0]) for s in sig.noms}
    return KripkeModel(worlds, rel, valuation, nominals, name)


def _positive(value: int, what: str) -> int:
    if not isinstance(value, int) or value < 1:
        raise FixtureError(f"{what} must be a positive integer, got {value!r}")
    return value


def fig1(sig: Signature = FIG1_SIG) -> Figure:
    """M: m0 -> m1, m0 -> m2; N: n0 -> n1; B pairs both leaves of M with n1."""
    m = _model("fig1_M", ["m0", "m1", "m2"], [("m0", "m1"), ("m0", "m2")], sig, {"s": "m0", "t": "m1"})
    n = _model("fig1_N", ["n0", "n1"], [("n0", "n1")], sig, {"s": "n0", "t": "n1"})
    return Figure(m, n, PairRelation.lift([("m0", "n0"), ("m1", "n1"), ("m2", "n1")]))


def fig2_chain(length: int, sig: Signature = DEFAULT_FIXTURE_SIG) -> KripkeModel:
    """Chain m0 -> m1 -> ... with ``length`` worlds."""
    _positive(length, "chain length")
    worlds = [f"m{i}" for i in range(length)]
    return _model(f"fig2_chain({length})", worlds, list(zip(worlds, worlds[1:])), sig)


def fig2_cycle(length: int = 2, sig: Signature = DEFAULT_FIXTURE_SIG) -> KripkeModel:
    """Cycle n0 -> n1 -> ... -> n0; length 1 is a single loop."""
    _positive(length, "cycle length")
    worlds = [f"n{i}" for i in range(length)]
    return _model(f"fig2_cycle({length})", worlds, [(worlds[i], worlds[(i + 1) % length]) for i in range(length)], sig)


def fig2(length: int, sig: Signature = DEFAULT_FIXTURE_SIG) -> Figure:
    """The chain against the two-cycle, with B pairing m_i and n_(i mod 2)."""
    chain, cycle = fig2_chain(length, sig), fig2_cycle(2, sig)
    return Figure(chain, cycle, PairRelation.lift([(f"m{i}", f"n{i % 2}") for i in range(length)]))


def fig3_M(depth: int, sig: Signature = DEFAULT_FIXTURE_SIG) -> KripkeModel:
    """m0 sees m1 and m2, and m1 -> m2 -> ... -> m_depth."""
    _positive(depth, "depth")
    worlds = [f"m{i}" for i in range(depth + 1)]
    rel = [("m0", "m1")] + ([("m0", "m2")] if depth >= 2 else [])
    rel += [(f"m{i}", f"m{i + 1}") for i in range(1, depth)]
    return _model(f"fig3_M({depth})", worlds, rel, sig)


def fig3_N(depth: int, sig: Signature = DEFAULT_FIXTURE_SIG) -> KripkeModel:
    """Chain n0 -> n1 -> ... -> n_depth."""
    _positive(depth, "depth")
    worlds = [f"n{i}" for i in range(depth + 1)]
    return _model(f"fig3_N({depth})", worlds, list(zip(worlds, worlds[1:])), sig)


def fig3_U(depth: int, sig: Signature = DEFAULT_FIXTURE_SIG) -> KripkeModel:
    """
    Unravelling of ``fig3_M(depth)`` from m0: the branch u1 -> u2 -> ... copies the path
    through m1, the branch u2p -> u3p -> ... copies the path entering m2 directly.
    """
    _positive(depth, "depth")
    main = [f"u{i}" for i in range(depth + 1)]
    side = [f"u{i}p" for i in range(2, depth + 1)]
    rel = list(zip(main, main[1:]))
    if side:
        rel += [("u0", side[0])] + list(zip(side, side[1:]))
    return _model(f"fig3_U({depth})", main + side, rel, sig)


def _fig3_relation(prefix: str, depth: int, prime: Callable[[int], str]) -> PairRelation:
    pairs = [(f"{prefix}0", "n0")]
    pairs += [(f"{prefix}{i}", f"n{i}") for i in range(1, depth + 1)]
    pairs += [(prime(i + 1), f"n{i}") for i in range(1, depth)]
    return PairRelation.lift(pairs)


def fig3_MN(depth: int, sig: Signature = DEFAULT_FIXTURE_SIG) -> Figure:
    """M against N with B = {(m0,n0)} + {(m_i,n_i)} + {(m_(i+1),n_i)}, restricted to existing worlds."""
    return Figure(fig3_M(depth, sig), fig3_N(depth, sig), _fig3_relation("m", depth, lambda i: f"m{i}"))


def fig3_UN(depth: int, sig: Signature = DEFAULT_FIXTURE_SIG) -> Figure:
    """The unravelling U against N; the second branch pairs u(i+1)p with n_i."""
    return Figure(fig3_U(depth, sig), fig3_N(depth, sig), _fig3_relation("u", depth, lambda i: f"u{i}p"))


FIXTURES: Dict[str, Tuple[Callable, int]] = {
    "fig1": (fig1, 0),
    "fig2": (fig2, 1),
    "fig2_chain": (fig2_chain, 1),
    "fig2_cycle": (fig2_cycle, 0),
    "fig3_M": (fig3_M, 1),
    "fig3_N": (fig3_N, 1),
    "fig3_U": (fig3_U, 1),
    "fig3_MN": (fig3_MN, 1),
    "fig3_UN": (fig3_UN, 1),
}


def fixture_names() -> List[str]:
    return list(FIXTURES)


def fixture(name: str, *params: int, sig: Optional[Signature] = None) -> Union[KripkeModel, Figure]:
    """
    Build a named fixture.

    Args:
        name (str): One of ``fixture_names()``.
        *params (int): Chain length or truncation depth; fig2_cycle takes an optional length.
        sig (Signature, optional): Signature of the produced models.

    Returns:
        Union[KripkeModel, Figure]: A model, or (left, right, relation) for composite fixtures.

    Raises:
        FixtureError: On an unknown name, a missing parameter or a non-positive depth.
    """
    if name not in FIXTURES:
        raise FixtureError(f"unknown fixture '{name}' (known: {', '.join(FIXTURES)})")
    builder, required = FIXTURES[name]
    if len(params) < required:
        raise FixtureError(f"fixture '{name}' needs {required} integer parameter(s)")
    if len(params) > max(required, 1 if name == "fig2_cycle" else 0):
        raise FixtureError(f"too many parameters for fixture '{name}'")
    kwargs = {"sig": sig} if sig is not None else {}
    return builder(*params, **kwargs)


def depth_scope(model: KripkeModel, root: str, bound: int, side: str = "right") -> Callable[[Pair], bool]:
    """
    Predicate on context pairs: true when the current world on ``side`` lies at BFS
    depth below ``bound`` from ``root``. Used to keep condition checks away from the
    frontier of a truncated structure.
    """
    depth = nx.single_source_shortest_path_length(model.graph(), root)
    position = 1 if side == "right" else 0

    def within(pair: Pair) -> bool:
        w = pair[position][1]
        return w in depth and depth[w] < bound

    return within


def is_unravelling_shape(model: KripkeModel, root: str) -> bool:
    """True when the model is a tree rooted at ``root`` (acyclic, unique path to every world)."""
    g = model.graph()
    return nx.is_arborescence(g) and g.in_degree(root) == 0


def random_model(rng: random.Random, size: int, sig: Signature, density: float = 0.4,
                 prefix: str = "w") -> KripkeModel:
    """
    Random model with ``size`` worlds; each edge is present with probability ``density``
    and each proposition holds at each world with probability one half.
    """
    _positive(size, "model size")
    worlds = [f"{prefix}{i}" for i in range(size)]
    rel = [(a, b) for a in worlds for b in worlds if rng.random() < density]
    valuation = {p: [w for w in worlds if rng.random() < 0.5] for p in sig.props}
    nominals = {s: rng.choice(worlds) for s in sig.noms}
    return KripkeModel(worlds, rel, valuation, nominals, f"random({size})")
