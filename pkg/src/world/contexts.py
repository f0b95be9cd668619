from itertools import product
from typing import List, Optional, Tuple

from world.kripke import Context, KripkeModel

Code = int


class ContextGrid:
    """
    Integer encoding of the contexts (m̄, m) of one model at a fixed tuple length.

    A context is read as the base-n number with digits (m̄(1), ..., m̄(k), m), so its
    code is ``tuple_code * n + point``. All moves between contexts that the bisimulation
    conditions and the oracle need are precomputed as code tables.

    Attributes:
        model (KripkeModel): The model.
        k (int): Tuple length.
        n (int): Number of worlds.
        size (int): Number of contexts, n ** (k + 1).
        point (List[int]): Current world index of each context.
        slots (List[List[int]]): slots[j][c] is the world index stored in position j (0-based).
        succ (List[Tuple[int, ...]]): Contexts reached by one step of the relation.
        bind (List[List[int]]): bind[j][c] stores the current world in position j.
        variants (List[List[Tuple[int, ...]]]): variants[j][c] lists every re-binding of position j.
        jump_var (List[List[int]]): jump_var[j][c] moves to the world stored in position j.
        jump_nom (List[List[int]]): jump_nom[s][c] moves to the world named by the s-th nominal.
        local (List[Tuple]): Propositions and nominals true at the current world.
        wvar (List[Tuple[bool, ...]]): For each position, whether it stores the current world.
    """
    def __init__(self, model: KripkeModel, k: int, noms: Optional[Tuple[str, ...]] = None,
                 props: Optional[Tuple[str, ...]] = None) -> None:
        self.model = model
        self.k = k
        self.n = n = len(model.worlds)
        self.size = n ** (k + 1)
        self.props = tuple(model.valuation) if props is None else tuple(props)
        self.noms = tuple(model.nominals) if noms is None else tuple(noms)
        worlds = model.worlds
        index = model.index
        succ_idx = [tuple(index[v] for v in model.successors(w)) for w in worlds]
        prop_bits = [tuple(w in model.valuation.get(p, ()) for p in self.props) for w in worlds]
        nom_idx = [index[model.nominals[s]] for s in self.noms]

        self.point: List[int] = []
        self.slots: List[List[int]] = [[] for _ in range(k)]
        self.succ: List[Tuple[int, ...]] = []
        self.bind: List[List[int]] = [[] for _ in range(k)]
        self.variants: List[List[Tuple[int, ...]]] = [[] for _ in range(k)]
        self.jump_var: List[List[int]] = [[] for _ in range(k)]
        self.jump_nom: List[List[int]] = [[] for _ in self.noms]
        self.local: List[Tuple] = []
        self.wvar: List[Tuple[bool, ...]] = []
        weights = [n ** (k - j) for j in range(k)]  # digit weight of position j inside the code
        for c in range(self.size):
            m = c % n
            base = c - m
            digits = self.decode_tuple(c // n)
            self.point.append(m)
            self.succ.append(tuple(base + v for v in succ_idx[m]))
            for j in range(k):
                d = digits[j]
                self.slots[j].append(d)
                cleared = c - d * weights[j]
                self.bind[j].append(cleared + m * weights[j])
                self.variants[j].append(tuple(cleared + w * weights[j] for w in range(n)))
                self.jump_var[j].append(base + d)
            for s, target in enumerate(nom_idx):
                self.jump_nom[s].append(base + target)
            self.local.append((prop_bits[m], tuple(t == m for t in nom_idx)))
            self.wvar.append(tuple(d == m for d in digits))

    def decode_tuple(self, code: int) -> Tuple[int, ...]:
        digits = []
        for _ in range(self.k):
            code, d = divmod(code, self.n)
            digits.append(d)
        return tuple(reversed(digits))

    def encode(self, ctx: Context) -> Code:
        """
        Code of a named context.

        Raises:
            KeyError: If a world is unknown.
        """
        tup, point = ctx
        code = 0
        for w in tup:
            code = code * self.n + self.model.index[w]
        return code * self.n + self.model.index[point]

    def decode(self, c: Code) -> Context:
        worlds = self.model.worlds
        return tuple(worlds[d] for d in self.decode_tuple(c // self.n)), worlds[c % self.n]

    def constant(self, w: str) -> Code:
        """Code of the seed context ((w, ..., w), w)."""
        return self.encode(((w,) * self.k, w))

    def extend(self, c: Code) -> Code:
        """Code, one tuple length up, of (m̄ followed by m, m)."""
        return c * self.n + c % self.n

    def all_contexts(self) -> List[Context]:
        worlds = self.model.worlds
        return [(tuple(t), w) for t in product(worlds, repeat=self.k) for w in worlds]

    def __repr__(self) -> str:
        return f"ContextGrid({self.model.name or '?'}, k={self.k}, size={self.size})"
