"""
Recursive-descent parsers for the hybrid and the first-order concrete syntax.

Both languages share the connective layer::

    formula := binder | impl
    impl    := disj ["->" formula]
    disj    := conj {"|" conj}
    conj    := unary {"&" unary}

and differ in their binders, prefix operators and atoms. Errors are raised as
``ParseError`` carrying the byte offset of the offending token.
"""

import re
from typing import List, NamedTuple, Optional

from errors import ParseError
from logic.fol import (Const, FoAnd, FoBot, FoEq, FoExists, FoForall, FoImplies,
                       FolFormula, FoNot, FoOr, FoPred, FoRel, FoTop, Term, Var)
from logic.syntax import (KEYWORDS, PROP_PATTERN, RELATION, And, At, Bot, Box, Dia, Down,
                          Exists, HybridFormula, Implies, Nom, Not, Or, Prop, Signature, Top, WVar)

TOKEN_PATTERNS = [
    ("WS", r"\s+"),
    ("IMPLIES", r"->"),
    ("DIA", r"<>"),
    ("BOX", r"\[\]"),
    ("NOM", r"'[A-Za-z_][A-Za-z0-9_]*"),
    ("WVAR", r"\?[A-Za-z_][A-Za-z0-9_]*"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("DOT", r"\."),
    ("NOT", r"~"),
    ("AND", r"&"),
    ("OR", r"\|"),
    ("AT", r"@"),
    ("EQ", r"="),
]
TOKEN_REGEX = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in TOKEN_PATTERNS))


class Token(NamedTuple):
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> List[Token]:
    """
    Split text into tokens, recording byte offsets.

    Args:
        text (str): Formula text.

    Returns:
        List[Token]: Tokens ending with an EOF token.

    Raises:
        ParseError: On a character no token starts with.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        match = TOKEN_REGEX.match(text, pos)
        offset = len(text[:pos].encode("utf-8"))
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", offset)
        if match.lastgroup != "WS":
            tokens.append(Token(match.lastgroup, match.group(), offset))
        pos = match.end()
    tokens.append(Token("EOF", "", len(text.encode("utf-8"))))
    return tokens


class _Parser:
    """Shared connective layer; subclasses provide binders, prefixes and atoms."""

    BINDERS = ()

    def __init__(self, text: str, sig: Signature) -> None:
        self.tokens = tokenize(text)
        self.pos = 0
        self.sig = sig

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _consume(self, kind: Optional[str] = None) -> Token:
        token = self._peek()
        if kind is not None and token.kind != kind:
            if kind == "RPAREN":
                raise ParseError("unbalanced parentheses: expected ')'", token.offset)
            found = token.text or "end of input"
            raise ParseError(f"expected {kind.lower()} but found '{found}'", token.offset)
        self.pos += 1
        return token

    def _at_keyword(self, *words: str) -> bool:
        token = self._peek()
        return token.kind == "IDENT" and token.text in words

    def parse(self):
        if self._peek().kind == "EOF":
            raise ParseError("empty formula", self._peek().offset)
        formula = self.formula()
        token = self._peek()
        if token.kind == "RPAREN":
            raise ParseError("unbalanced parentheses: unexpected ')'", token.offset)
        if token.kind != "EOF":
            raise ParseError(f"unexpected '{token.text}' after formula", token.offset)
        return formula

    def formula(self):
        if self._at_keyword(*self.BINDERS):
            return self.binder()
        return self.impl()

    def impl(self):
        left = self.disj()
        if self._peek().kind == "IMPLIES":
            self._consume()
            return self.make_implies(left, self.formula())
        return left

    def disj(self):
        left = self.conj()
        while self._peek().kind == "OR":
            self._consume()
            left = self.make_or(left, self.conj())
        return left

    def conj(self):
        left = self.operand()
        while self._peek().kind == "AND":
            self._consume()
            left = self.make_and(left, self.operand())
        return left

    def operand(self):
        # a binder may close a conjunction or disjunction on the right
        if self._at_keyword(*self.BINDERS):
            return self.binder()
        return self.unary()

    def bound_variable(self) -> str:
        token = self._peek()
        if token.kind == "WVAR":
            self._consume()
            return token.text[1:]
        if token.kind == "IDENT" and token.text not in KEYWORDS:
            self._consume()
            return token.text
        raise ParseError(f"expected a variable after binder, found '{token.text or 'end of input'}'",
                         token.offset)


class HybridParser(_Parser):
    BINDERS = ("down", "exists")

    make_or = staticmethod(Or)
    make_and = staticmethod(And)
    make_implies = staticmethod(Implies)

    def binder(self) -> HybridFormula:
        keyword = self._consume("IDENT").text
        var = self.bound_variable()
        self._consume("DOT")
        body = self.formula()
        return Down(var, body) if keyword == "down" else Exists(var, body)

    def unary(self) -> HybridFormula:
        token = self._peek()
        if token.kind == "NOT":
            self._consume()
            return Not(self.unary())
        if token.kind == "DIA":
            self._consume()
            return Dia(self.unary())
        if token.kind == "BOX":
            self._consume()
            return Box(self.unary())
        if token.kind == "AT":
            self._consume()
            place = self.place()
            return At(place, self.unary())
        if self._at_keyword(*self.BINDERS):
            return self.binder()
        return self.atom()

    def place(self):
        token = self._peek()
        if token.kind == "NOM":
            return self.nominal(self._consume())
        if token.kind == "WVAR":
            return WVar(self._consume().text[1:])
        raise ParseError("@ must be followed by a nominal or a world variable", token.offset)

    def nominal(self, token: Token) -> Nom:
        name = token.text[1:]
        if name not in self.sig.noms:
            raise ParseError(f"unknown nominal '{name}'", token.offset)
        return Nom(name)

    def atom(self) -> HybridFormula:
        token = self._peek()
        if token.kind == "LPAREN":
            self._consume()
            inner = self.formula()
            self._consume("RPAREN")
            return inner
        if token.kind == "NOM":
            return self.nominal(self._consume())
        if token.kind == "WVAR":
            return WVar(self._consume().text[1:])
        if token.kind == "IDENT":
            self._consume()
            if token.text == "false":
                return Bot()
            if token.text == "true":
                return Top()
            if not PROP_PATTERN.match(token.text) or token.text not in self.sig.props:
                raise ParseError(f"unknown proposition '{token.text}'", token.offset)
            return Prop(token.text)
        if token.kind == "RPAREN":
            raise ParseError("unbalanced parentheses: unexpected ')'", token.offset)
        raise ParseError(f"unexpected '{token.text or 'end of input'}'", token.offset)


class FolParser(_Parser):
    BINDERS = ("exists", "forall")

    make_or = staticmethod(FoOr)
    make_and = staticmethod(FoAnd)
    make_implies = staticmethod(FoImplies)

    def binder(self) -> FolFormula:
        keyword = self._consume("IDENT").text
        token = self._peek()
        if token.kind != "IDENT" or token.text in KEYWORDS or not token.text[0].islower():
            raise ParseError(f"expected a variable after '{keyword}'", token.offset)
        var = self._consume().text
        self._consume("DOT")
        body = self.formula()
        return FoExists(var, body) if keyword == "exists" else FoForall(var, body)

    def unary(self) -> FolFormula:
        if self._peek().kind == "NOT":
            self._consume()
            return FoNot(self.unary())
        if self._at_keyword(*self.BINDERS):
            return self.binder()
        return self.atom()

    def term(self) -> Term:
        token = self._peek()
        if token.kind == "NOM":
            self._consume()
            name = token.text[1:]
            if name not in self.sig.noms and name not in self.sig.extra_consts:
                raise ParseError(f"unknown constant '{name}'", token.offset)
            return Const(name)
        if token.kind == "IDENT" and token.text not in KEYWORDS and token.text[0].islower():
            self._consume()
            return Var(token.text)
        raise ParseError(f"expected a term, found '{token.text or 'end of input'}'", token.offset)

    def arguments(self, name: str, arity: int, offset: int) -> List[Term]:
        self._consume("LPAREN")
        args = [self.term()]
        while self._peek().kind == "COMMA":
            self._consume()
            args.append(self.term())
        self._consume("RPAREN")
        if len(args) != arity:
            raise ParseError(f"{name} takes {arity} argument(s), got {len(args)}", offset)
        return args

    def atom(self) -> FolFormula:
        token = self._peek()
        if token.kind == "LPAREN":
            self._consume()
            inner = self.formula()
            self._consume("RPAREN")
            return inner
        if token.kind == "IDENT" and token.text in ("true", "false"):
            self._consume()
            return FoTop() if token.text == "true" else FoBot()
        if token.kind == "IDENT" and token.text[0].isupper():
            self._consume()
            if token.text == RELATION:
                left, right = self.arguments(RELATION, 2, token.offset)
                return FoRel(left, right)
            if self.sig.prop_of_predicate(token.text) is None and token.text not in self.sig.extra_preds:
                raise ParseError(f"unknown predicate '{token.text}'", token.offset)
            (arg,) = self.arguments(token.text, 1, token.offset)
            return FoPred(token.text, arg)
        if token.kind == "RPAREN":
            raise ParseError("unbalanced parentheses: unexpected ')'", token.offset)
        if token.kind in ("NOM", "IDENT"):
            left = self.term()
            self._consume("EQ")
            return FoEq(left, self.term())
        raise ParseError(f"unexpected '{token.text or 'end of input'}'", token.offset)


def parse_hybrid(text: str, sig: Signature) -> HybridFormula:
    """
    Parse hybrid concrete syntax.

    Args:
        text (str): e.g. "down x . <> <> ?x".
        sig (Signature): Declares the propositions and nominals that may occur.

    Returns:
        HybridFormula: The parsed tree, sugar nodes included.

    Raises:
        ParseError: On lexical errors, unknown symbols or unbalanced parentheses.
    """
    return HybridParser(text, sig).parse()


def parse_fol(text: str, sig: Signature) -> FolFormula:
    """
    Parse first-order concrete syntax over R, the proposition predicates, equality
    and the constants declared by ``sig`` (nominals and extra constants).

    Raises:
        ParseError: As ``parse_hybrid``, plus arity errors for R and unary predicates.
    """
    return FolParser(text, sig).parse()


def infer_signature(text: str, fol: bool = False) -> Signature:
    """
    The smallest signature under which ``text`` can parse: every free identifier is a
    proposition (every predicate other than R, read lower-cased, on the first-order
    side) and every quoted name is a nominal.

    Raises:
        ParseError: On lexical errors.
    """
    tokens = tokenize(text)
    props, noms = [], []
    for before, token, after in zip([None] + tokens, tokens, tokens[1:] + [None]):
        if token.kind == "NOM" and token.text[1:] not in noms:
            noms.append(token.text[1:])
        if token.kind != "IDENT" or token.text in KEYWORDS:
            continue
        if before is not None and before.kind == "IDENT" and before.text in ("down", "exists", "forall"):
            continue
        if fol:
            name = token.text.lower()
            if token.text[0].isupper() and token.text != RELATION and after is not None and after.kind == "LPAREN":
                if PROP_PATTERN.match(name) and name not in props:
                    props.append(name)
        elif PROP_PATTERN.match(token.text) and token.text not in props:
            props.append(token.text)
    return Signature(tuple(props), tuple(n for n in noms if n not in props))
