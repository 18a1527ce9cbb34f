import pytest
from hypothesis import strategies as st

from bqltl import formula as fm
from bqltl.trace import LassoTrace

VARS = ("x", "y")


def matrices(variables=VARS, max_leaves=5):
    atoms = st.sampled_from([fm.Atom(v) for v in variables] + [fm.TRUE, fm.FALSE])
    unary = st.sampled_from([fm.Not, fm.Next, fm.Eventually, fm.Globally])
    binary = st.sampled_from([fm.And, fm.Or, fm.Implies, fm.Iff, fm.Until, fm.Release])

    def extend(children):
        return st.one_of(
            st.builds(lambda op, a: op(a), unary, children),
            st.builds(lambda op, a, b: op(a, b), binary, children, children),
        )

    return st.recursive(atoms, extend, max_leaves=max_leaves)


def small_matrices(variables=VARS, max_closure=8):
    return matrices(variables).filter(lambda m: fm.closure_size(m) <= max_closure)


def letters(variables=VARS):
    return st.frozensets(st.sampled_from(variables))


def lassos(variables=VARS, max_stem=3, max_loop=3):
    return st.builds(
        lambda s, l: LassoTrace(frozenset(variables), tuple(s), tuple(l)),
        st.lists(letters(variables), max_size=max_stem),
        st.lists(letters(variables), min_size=1, max_size=max_loop),
    )


def naive_eval(m, pi, i=0):
    """Direct semantics on a lasso by unrolling; every position past the stem
    repeats after one loop, so searching len(pi) positions ahead suffices."""
    horizon = len(pi) + 1
    if isinstance(m, fm.Atom):
        return m.name in pi.letter(i)
    if isinstance(m, fm.Const):
        return m.value
    if isinstance(m, fm.Not):
        return not naive_eval(m.arg, pi, i)
    if isinstance(m, fm.And):
        return naive_eval(m.left, pi, i) and naive_eval(m.right, pi, i)
    if isinstance(m, fm.Or):
        return naive_eval(m.left, pi, i) or naive_eval(m.right, pi, i)
    if isinstance(m, fm.Implies):
        return (not naive_eval(m.left, pi, i)) or naive_eval(m.right, pi, i)
    if isinstance(m, fm.Iff):
        return naive_eval(m.left, pi, i) == naive_eval(m.right, pi, i)
    if isinstance(m, fm.Next):
        return naive_eval(m.arg, pi, i + 1)
    if isinstance(m, fm.Eventually):
        return any(naive_eval(m.arg, pi, j) for j in range(i, i + horizon))
    if isinstance(m, fm.Globally):
        return all(naive_eval(m.arg, pi, j) for j in range(i, i + horizon))
    if isinstance(m, fm.Until):
        for j in range(i, i + horizon):
            if naive_eval(m.right, pi, j):
                return True
            if not naive_eval(m.left, pi, j):
                return False
        return False
    if isinstance(m, fm.Release):
        return not naive_eval(fm.Until(fm.Not(m.left), fm.Not(m.right)), pi, i)
    raise TypeError(m)


@pytest.fixture
def parse():
    return fm.parse


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


def report_criterion(number, ok, text):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
