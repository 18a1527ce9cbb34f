"""Random and handcrafted inputs for the property suites and the CLI.

Everything here takes an explicit ``random.Random`` so a seed fixes the
whole suite.
"""
from __future__ import annotations

from typing import List

from . import formula as fm
from .automata.tree import Apt, Npt
from .automata.word import Nbw
from .trace import powerset

UNARY = (fm.Not, fm.Next, fm.Eventually, fm.Globally)
BINARY = (fm.And, fm.Or, fm.Implies, fm.Iff, fm.Until, fm.Release)


def random_matrix(rng, variables, max_closure=8, depth=3) -> fm.Matrix:
    """A random LTL matrix over ``variables`` with at most ``max_closure``
    distinct subformulas."""
    variables = sorted(variables)
    while True:
        m = _grow(rng, variables, depth)
        if fm.closure_size(m) <= max_closure:
            return m


def _grow(rng, variables, depth):
    r = rng.random()
    if depth == 0 or r < 0.25:
        return fm.Atom(rng.choice(variables))
    if r < 0.55:
        return rng.choice(UNARY)(_grow(rng, variables, depth - 1))
    op = rng.choice(BINARY)
    return op(_grow(rng, variables, depth - 1), _grow(rng, variables, depth - 1))


def _blocks(rng, kinds, max_vars, names=None):
    names = list(names or "abcdefgh")
    out = []
    for k in kinds:
        n = rng.randint(1, max_vars)
        out.append(fm.QuantBlock(k, frozenset(names[:n])))
        names = names[n:]
    return out


def _wrap(rng, prefix, max_closure, all_used=True) -> fm.QuantifiedFormula:
    bound = sorted(frozenset().union(*(b.vars for b in prefix)))
    for _ in range(200):
        m = random_matrix(rng, bound, max_closure)
        if not all_used or fm.matrix_vars(m) == frozenset(bound):
            return fm.QuantifiedFormula(tuple(prefix), m)
    return fm.QuantifiedFormula(tuple(prefix), m)


def random_formula(rng, max_blocks=2, max_vars=2, max_closure=8) -> fm.QuantifiedFormula:
    """Closed prenex formula with 1..max_blocks alternating blocks."""
    n = rng.randint(1, max_blocks)
    first = rng.choice((fm.EXISTS, fm.FORALL))
    kinds = [first if i % 2 == 0 else (fm.FORALL if first == fm.EXISTS else fm.EXISTS) for i in range(n)]
    return _wrap(rng, _blocks(rng, kinds, max_vars), max_closure)


def random_fragment_formula(rng, tag, max_vars=2, max_closure=8) -> fm.QuantifiedFormula:
    """Closed formula in Sigma0 (all existential), Pi0 (all universal) or
    Sigma1 (existential block then universal block)."""
    kinds = {fm.SIGMA0: [fm.EXISTS], fm.PI0: [fm.FORALL], fm.SIGMA1: [fm.EXISTS, fm.FORALL]}[tag]
    return _wrap(rng, _blocks(rng, kinds, max_vars), max_closure)


def random_forall_exists(rng, max_closure=8) -> fm.QuantifiedFormula:
    """``A{x} E{y} psi`` with one variable per block."""
    prefix = [fm.QuantBlock(fm.FORALL, {"x"}), fm.QuantBlock(fm.EXISTS, {"y"})]
    return _wrap(rng, prefix, max_closure)


# ------------------------------------------------------- planning shapes

def _check_split(matrix, groups):
    seen = set()
    for g in groups:
        if not g:
            raise ValueError("every block of the split needs at least one variable")
        if seen & set(g):
            raise ValueError(f"variables in two blocks: {sorted(seen & set(g))}")
        seen |= set(g)
    missing = fm.matrix_vars(matrix) - seen
    if missing:
        raise ValueError(f"matrix variables not covered by the split: {sorted(missing)}")


def conformant(matrix, ys, xs) -> fm.QuantifiedFormula:
    """One plan for every environment behavior: ``E{Y} A{X} psi``."""
    _check_split(matrix, [ys, xs])
    return fm.QuantifiedFormula((fm.QuantBlock(fm.EXISTS, ys), fm.QuantBlock(fm.FORALL, xs)), matrix)


def fond(matrix, xs, ys) -> fm.QuantifiedFormula:
    """Fully observable strategy: ``A{X} E{Y} psi``."""
    _check_split(matrix, [xs, ys])
    return fm.QuantifiedFormula((fm.QuantBlock(fm.FORALL, xs), fm.QuantBlock(fm.EXISTS, ys)), matrix)


def pond(matrix, xs1, ys, xs2) -> fm.QuantifiedFormula:
    """Partially observable strategy, X2 hidden: ``A{X1} E{Y} A{X2} psi``."""
    _check_split(matrix, [xs1, ys, xs2])
    return fm.QuantifiedFormula((fm.QuantBlock(fm.FORALL, xs1), fm.QuantBlock(fm.EXISTS, ys),
                                 fm.QuantBlock(fm.FORALL, xs2)), matrix)


PLANNING = {"conformant": conformant, "fond": fond, "pond": pond}


# ---------------------------------------------------------- micro automata

def random_nbw(rng, alphabet_vars, n_states=3, density=0.35, accepting_p=0.4) -> Nbw:
    letters = powerset(alphabet_vars)
    delta = []
    for _ in range(n_states):
        row = {}
        for a in letters:
            ts = frozenset(t for t in range(n_states) if rng.random() < density)
            if ts:
                row[a] = ts
        delta.append(row)
    acc = frozenset(q for q in range(n_states) if rng.random() < accepting_p)
    return Nbw(frozenset(alphabet_vars), n_states, 0, delta, acc)


def _row(table):
    """Transition row from ``{label_key: [[(state, dir_key), ...], ...]}``."""
    out = {}
    for lab, clauses in table.items():
        out[frozenset(lab)] = tuple(frozenset((s, frozenset(d)) for s, d in c) for c in clauses)
    return out


def micro_apts() -> List[tuple]:
    """Handcrafted tree automata as ``(name, automaton)``. They have one label
    variable ``y`` (or none) and one direction variable ``x`` so the suites
    can enumerate every tree of memory at most 2."""
    T, X = (), ("x",)
    L, D = {"y"}, {"x"}
    both = lambda q: [(q, T), (q, X)]
    return [
        # G y along every branch
        ("always-y", Npt(L, D, 1, 0, [_row({("y",): [both(0)], (): []})], [0])),
        # y infinitely often on every branch
        ("inf-y", Npt(L, D, 2, 0, [_row({("y",): [both(1)], (): [both(0)]})] * 2, [1, 2])),
        # eventually y on every branch
        ("ev-y", Npt(L, D, 2, 0, [_row({("y",): [both(1)], (): [both(0)]}),
                                  _row({("y",): [both(1)], (): [both(1)]})], [1, 2])),
        # label equals the last direction taken
        ("copy-dir", Npt(L, D, 2, 0, [_row({(): [[(0, T), (1, X)]], ("y",): [[(0, T), (1, X)]]}),
                                      _row({("y",): [[(0, T), (1, X)]], (): []})], [0, 0])),
        # label equals the last direction, root must be unlabeled
        ("copy-dir-root", Npt(L, D, 3, 0, [_row({(): [[(1, T), (2, X)]], ("y",): []}),
                                           _row({(): [[(1, T), (2, X)]], ("y",): []}),
                                           _row({("y",): [[(1, T), (2, X)]], (): []})], [0, 0, 0])),
        # two obligations sent into the same direction
        ("and-same-dir", Apt(L, D, 3, 0, [
            _row({("y",): [[(1, T), (2, T), (1, X), (2, X)]], (): [[(1, T), (2, T), (1, X), (2, X)]]}),
            _row({("y",): [both(1)], (): []}),
            _row({("y",): [both(2)], (): [both(2)]})], [0, 0, 0])),
        # G y, and some continuation keeps an odd obligation alive or not
        ("alt-disj", Apt(L, D, 3, 0, [
            _row({("y",): [[(1, T), (2, T)], [(1, T), (2, X)]], (): []}),
            _row({("y",): [both(1)], (): []}),
            _row({("y",): [[(2, T)], [(2, X)]], (): [[]]})], [0, 0, 1])),
        # eventually y on every branch and infinitely often not y on some branch
        ("ev-and-inf-alt", Apt(L, D, 4, 0, [
            _row({("y",): [[(1, T), (1, X), (2, T)], [(1, T), (1, X), (2, X)]],
                  (): [[(0, T), (0, X), (3, T)], [(0, T), (0, X), (3, X)]]}),
            _row({("y",): [both(1)], (): [both(1)]}),
            _row({("y",): [[(2, T)], [(2, X)]], (): [[(3, T)], [(3, X)]]}),
            _row({("y",): [[(2, T)], [(2, X)]], (): [[(3, T)], [(3, X)]]})], [1, 0, 1, 2])),
        ("true", Npt(L, D, 1, 0, [_row({("y",): [[]], (): [[]]})], [0])),
        ("false", Npt(L, D, 1, 0, [_row({("y",): [], (): []})], [0])),
        # every run loops through an odd color
        ("odd-loop", Npt(L, D, 1, 0, [_row({("y",): [both(0)], (): [both(0)]})], [1])),
        # label-free automaton, as produced by a change stage
        ("label-free", Npt((), D, 2, 0, [_row({(): [[(0, T), (1, X)]]}), _row({(): [both(1)]})], [0, 2])),
        # only the root label matters
        ("root-y", Npt(L, D, 2, 0, [_row({("y",): [both(1)], (): []}), _row({("y",): [[]], (): [[]]})], [0, 0])),
    ]
