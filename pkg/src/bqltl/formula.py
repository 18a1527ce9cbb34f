"""Prenex QLTL formulas: syntax tree, parser, printer and structural queries.

Text grammar::

    formula := block* matrix
    block   := ("E" | "A") "{" var ("," var)* "}"

Matrix operators are ``true false ! & | -> <-> X F G U R``. Binding
strength, tightest first: ``! X F G``, then ``U R`` (right-assoc), ``&``,
``|``, ``->`` (right-assoc), ``<->`` (right-assoc). ``#`` starts a comment
running to end of line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import FrozenSet, Iterator, Tuple

from .errors import FormulaSyntaxError

VAR_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")


class Matrix:
    """Base class of quantifier-free LTL nodes."""

    __slots__ = ()

    def children(self) -> Tuple["Matrix", ...]:
        return ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Atom(Matrix):
    name: str


@dataclass(frozen=True)
class Const(Matrix):
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class _Unary(Matrix):
    arg: Matrix

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class _Binary(Matrix):
    left: Matrix
    right: Matrix

    def children(self):
        return (self.left, self.right)


class Not(_Unary):
    pass


class Next(_Unary):
    pass


class Eventually(_Unary):
    pass


class Globally(_Unary):
    pass


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Implies(_Binary):
    pass


class Iff(_Binary):
    pass


class Until(_Binary):
    pass


class Release(_Binary):
    pass


EXISTS = "E"
FORALL = "A"


@dataclass(frozen=True)
class QuantBlock:
    kind: str
    vars: FrozenSet[str]

    def __post_init__(self):
        if self.kind not in (EXISTS, FORALL):
            raise ValueError(f"bad quantifier kind {self.kind!r}")
        if not self.vars:
            raise ValueError("quantifier block must bind at least one variable")
        object.__setattr__(self, "vars", frozenset(self.vars))

    @property
    def existential(self) -> bool:
        return self.kind == EXISTS

    def dual(self) -> "QuantBlock":
        return QuantBlock(FORALL if self.existential else EXISTS, self.vars)


def normalize_prefix(blocks) -> Tuple[QuantBlock, ...]:
    """Merge adjacent blocks of the same kind; drop empty ones."""
    out = []
    for b in blocks:
        if not b.vars:
            continue
        if out and out[-1].kind == b.kind:
            out[-1] = QuantBlock(b.kind, out[-1].vars | b.vars)
        else:
            out.append(b)
    return tuple(out)


@dataclass(frozen=True)
class QuantifiedFormula:
    prefix: Tuple[QuantBlock, ...]
    matrix: Matrix

    def __post_init__(self):
        object.__setattr__(self, "prefix", normalize_prefix(self.prefix))
        seen = set()
        for b in self.prefix:
            if seen & b.vars:
                raise ValueError(f"variables bound twice: {sorted(seen & b.vars)}")
            seen |= b.vars

    @property
    def bound_vars(self) -> FrozenSet[str]:
        return frozenset().union(*(b.vars for b in self.prefix))

    @property
    def existential_vars(self) -> FrozenSet[str]:
        return frozenset().union(*(b.vars for b in self.prefix if b.existential))

    @property
    def universal_vars(self) -> FrozenSet[str]:
        return frozenset().union(*(b.vars for b in self.prefix if not b.existential))

    @property
    def all_vars(self) -> FrozenSet[str]:
        return self.bound_vars | matrix_vars(self.matrix)

    def __str__(self):
        return to_text(self)


# ---------------------------------------------------------------- traversal

def subformulas(m: Matrix) -> Iterator[Matrix]:
    stack = [m]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children())


def matrix_vars(m: Matrix) -> FrozenSet[str]:
    return frozenset(n.name for n in subformulas(m) if isinstance(n, Atom))


def closure_size(m: Matrix) -> int:
    """Number of distinct subformulas."""
    return len(set(subformulas(m)))


def free_vars(f) -> FrozenSet[str]:
    if isinstance(f, Matrix):
        return matrix_vars(f)
    return matrix_vars(f.matrix) - f.bound_vars


def negate(f: QuantifiedFormula) -> QuantifiedFormula:
    """Dual prefix, negated matrix."""
    return QuantifiedFormula(tuple(b.dual() for b in f.prefix), Not(f.matrix))


# ---------------------------------------------------------------------- NNF

def to_nnf(m: Matrix) -> Matrix:
    """Push negations to atoms and expand F, G, ->, <->.

    The result only uses Atom, Not(Atom), Const, And, Or, Next, Until and
    Release.
    """
    return _nnf(m, False)


def _nnf(m: Matrix, neg: bool) -> Matrix:
    if isinstance(m, Atom):
        return Not(m) if neg else m
    if isinstance(m, Const):
        return Const(m.value != neg)
    if isinstance(m, Not):
        return _nnf(m.arg, not neg)
    if isinstance(m, Next):
        return Next(_nnf(m.arg, neg))
    if isinstance(m, And):
        a, b = _nnf(m.left, neg), _nnf(m.right, neg)
        return Or(a, b) if neg else And(a, b)
    if isinstance(m, Or):
        a, b = _nnf(m.left, neg), _nnf(m.right, neg)
        return And(a, b) if neg else Or(a, b)
    if isinstance(m, Implies):
        return _nnf(Or(Not(m.left), m.right), neg)
    if isinstance(m, Iff):
        a, b = m.left, m.right
        if neg:
            return Or(And(_nnf(a, False), _nnf(b, True)), And(_nnf(a, True), _nnf(b, False)))
        return Or(And(_nnf(a, False), _nnf(b, False)), And(_nnf(a, True), _nnf(b, True)))
    if isinstance(m, Until):
        a, b = _nnf(m.left, neg), _nnf(m.right, neg)
        return Release(a, b) if neg else Until(a, b)
    if isinstance(m, Release):
        a, b = _nnf(m.left, neg), _nnf(m.right, neg)
        return Until(a, b) if neg else Release(a, b)
    if isinstance(m, Eventually):
        body = _nnf(m.arg, neg)
        return Release(FALSE, body) if neg else Until(TRUE, body)
    if isinstance(m, Globally):
        body = _nnf(m.arg, neg)
        return Until(TRUE, body) if neg else Release(FALSE, body)
    raise TypeError(f"not a matrix node: {m!r}")


# ----------------------------------------------------------- classification

SIGMA0, PI0, SIGMA1, GENERAL = "Sigma0", "Pi0", "Sigma1", "General"


@dataclass(frozen=True)
class FragmentClass:
    tag: str
    block_count: int


def block_count(prefix) -> int:
    """Existential blocks with a nonempty universal block to their left."""
    count, seen_forall = 0, False
    for b in prefix:
        if b.existential:
            count += seen_forall
        else:
            seen_forall = True
    return count


def classify(f: QuantifiedFormula) -> FragmentClass:
    kinds = [b.kind for b in f.prefix]
    if free_vars(f):
        raise ValueError("classify expects a closed formula; close it first")
    if all(k == EXISTS for k in kinds):
        tag = SIGMA0
    elif all(k == FORALL for k in kinds):
        tag = PI0
    elif kinds == [EXISTS, FORALL]:
        tag = SIGMA1
    else:
        tag = GENERAL
    return FragmentClass(tag, block_count(f.prefix))


def dep(prefix, block: QuantBlock, free=frozenset()) -> FrozenSet[str]:
    """Augmented dependency: ``free`` plus universals left of ``block``."""
    if not block.existential:
        raise ValueError("dep is defined for existential blocks only")
    out = set(free)
    for b in prefix:
        if b == block:
            return frozenset(out)
        if not b.existential:
            out |= b.vars
    raise ValueError("block does not occur in prefix")


# ------------------------------------------------------------------ printer

_BIN_SYM = {And: "&", Or: "|", Implies: "->", Iff: "<->", Until: "U", Release: "R"}
_UN_SYM = {Not: "!", Next: "X", Eventually: "F", Globally: "G"}


def to_text(f) -> str:
    if isinstance(f, QuantifiedFormula):
        blocks = " ".join(f"{b.kind}{{{','.join(sorted(b.vars))}}}" for b in f.prefix)
        body = _print(f.matrix)
        if blocks:
            return f"{blocks} ({body})" if isinstance(f.matrix, _Binary) else f"{blocks} {body}"
        return body
    return _print(f)


def _print(m: Matrix) -> str:
    if isinstance(m, Atom):
        return m.name
    if isinstance(m, Const):
        return "true" if m.value else "false"
    if isinstance(m, _Unary):
        inner = _print(m.arg)
        if isinstance(m.arg, _Binary):
            inner = f"({inner})"
        return f"{_UN_SYM[type(m)]} {inner}"
    if isinstance(m, _Binary):
        parts = []
        for child in (m.left, m.right):
            s = _print(child)
            parts.append(f"({s})" if isinstance(child, _Binary) else s)
        return f"{parts[0]} {_BIN_SYM[type(m)]} {parts[1]}"
    raise TypeError(m)


# ------------------------------------------------------------------- parser

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<op><->|->|[!&|(){},])"
    r"|(?P<ident>[a-z][a-zA-Z0-9_]*)|(?P<upper>[A-Z])"
)
_UPPER_OPS = set("XFGUREA")


def _tokenize(text):
    pos, line, line_start = 0, 1, 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind == "upper":
            if val not in _UPPER_OPS:
                raise FormulaSyntaxError(f"unknown operator {val!r}", line, col)
            kind = "op"
        if kind == "ident" and val in ("true", "false"):
            kind = "const"
        if kind not in ("ws", "comment"):
            tokens.append((kind, val, line, col))
        nl = val.count("\n")
        if nl:
            line += nl
            line_start = pos + val.rfind("\n") + 1
        pos = m.end()
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return FormulaSyntaxError(msg, tok[2], tok[3])

    def expect(self, val):
        tok = self.next()
        if tok[1] != val or tok[0] == "ident":
            raise self.error(f"expected {val!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def is_quant(self):
        tok = self.peek()
        return tok[0] == "op" and tok[1] in ("E", "A") and self.peek(1)[1] == "{"

    def formula(self):
        blocks, bound = [], set()
        while self.is_quant():
            kind = self.next()[1]
            self.expect("{")
            names = []
            while True:
                tok = self.next()
                if tok[0] != "ident":
                    raise self.error("expected variable name", tok)
                if tok[1] in bound or tok[1] in names:
                    raise self.error(f"variable {tok[1]!r} is already bound", tok)
                names.append(tok[1])
                sep = self.next()
                if sep[1] == "}":
                    break
                if sep[1] != ",":
                    raise self.error("expected ',' or '}'", sep)
            bound.update(names)
            blocks.append(QuantBlock(kind, frozenset(names)))
        m = self.iff()
        tok = self.peek()
        if tok[0] != "eof":
            raise self.error(f"unexpected {tok[1]!r}")
        return QuantifiedFormula(tuple(blocks), m)

    def iff(self):
        left = self.implies()
        if self.peek()[1] == "<->":
            self.next()
            return Iff(left, self.iff())
        return left

    def implies(self):
        left = self.disj()
        if self.peek()[1] == "->":
            self.next()
            return Implies(left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[1] == "|":
            self.next()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.temporal()
        while self.peek()[1] == "&":
            self.next()
            left = And(left, self.temporal())
        return left

    def temporal(self):
        left = self.unary()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("U", "R"):
            self.next()
            right = self.temporal()
            return Until(left, right) if tok[1] == "U" else Release(left, right)
        return left

    def unary(self):
        tok = self.peek()
        if self.is_quant():
            raise self.error("quantifier inside matrix (input must be prenex)")
        if tok[0] == "op" and tok[1] in ("!", "X", "F", "G"):
            self.next()
            cls = {"!": Not, "X": Next, "F": Eventually, "G": Globally}[tok[1]]
            return cls(self.unary())
        if tok[0] == "op" and tok[1] == "(":
            self.next()
            inner = self.iff()
            self.expect(")")
            return inner
        if tok[0] == "ident":
            self.next()
            return Atom(tok[1])
        if tok[0] == "const":
            self.next()
            return Const(tok[1] == "true")
        raise self.error(f"unexpected {tok[1] or 'end of input'!r}")


def parse(text: str) -> QuantifiedFormula:
    return _Parser(text).formula()


def parse_matrix(text: str) -> Matrix:
    f = parse(text)
    if f.prefix:
        raise FormulaSyntaxError("expected a quantifier-free matrix", 1, 1)
    return f.matrix
