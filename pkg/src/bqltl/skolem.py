"""Finite-memory Skolem machines: application, conformance, validation and
the bounded enumeration oracle."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from . import deadline
from . import formula as fm
from .automata.tree import RegularTree, tree_compose
from .automata.word import emptiness, explore_nbw, ltl_to_nbw
from .errors import AlphabetMismatch, ConformanceError, ResourceExceeded
from .trace import LassoTrace, combine, eval_ltl, letter_from_key, letter_key, powerset

BEHAVIORAL = "behavioral"
WEAK_BEHAVIORAL = "weak"

SAT, UNSAT, UNKNOWN = "Sat", "Unsat", "UnknownWithinBounds"


@dataclass
class MealyMachine:
    """Output ``block`` from memory and the current ``reads_now`` letter;
    memory advances on the ``reads`` letter of the same instant."""
    block: FrozenSet[str]
    reads: FrozenSet[str]
    reads_now: FrozenSet[str]
    n_memory: int
    initial: int
    update: List[Dict[FrozenSet[str], int]]
    output: List[Dict[FrozenSet[str], FrozenSet[str]]]

    def __post_init__(self):
        self.block = frozenset(self.block)
        self.reads = frozenset(self.reads)
        self.reads_now = frozenset(self.reads_now)

    def out(self, m, letter) -> FrozenSet[str]:
        return self.output[m][letter & self.reads_now]

    def step(self, m, letter) -> int:
        return self.update[m][letter & self.reads]

    def to_json(self) -> dict:
        return {
            "block": ",".join(sorted(self.block)),
            "memory": list(range(self.n_memory)),
            "initial": self.initial,
            "update": {str(m): {letter_key(l): t for l, t in sorted(self.update[m].items(), key=lambda kv: letter_key(kv[0]))}
                       for m in range(self.n_memory)},
            "output": {str(m): {letter_key(l): sorted(o) for l, o in sorted(self.output[m].items(), key=lambda kv: letter_key(kv[0]))}
                       for m in range(self.n_memory)},
            "reads": sorted(self.reads),
            "readsNow": sorted(self.reads_now),
        }

    @classmethod
    def from_json(cls, data) -> "MealyMachine":
        n = len(data["memory"])
        return cls(
            letter_from_key(data["block"]), frozenset(data["reads"]), frozenset(data["readsNow"]), n,
            data["initial"],
            [{letter_from_key(k): t for k, t in data["update"][str(m)].items()} for m in range(n)],
            [{letter_from_key(k): frozenset(o) for k, o in data["output"][str(m)].items()} for m in range(n)],
        )

    def to_dot(self) -> str:
        lines = ["digraph mealy {", "  init [shape=point];", f"  init -> {self.initial};"]
        for m in range(self.n_memory):
            outs = "; ".join(f"{{{letter_key(l)}}}/{{{letter_key(o)}}}"
                             for l, o in sorted(self.output[m].items(), key=lambda kv: letter_key(kv[0])))
            lines.append(f'  {m} [label="{m}\\n{outs}"];')
            for l, t in sorted(self.update[m].items(), key=lambda kv: letter_key(kv[0])):
                lines.append(f'  {m} -> {t} [label="{{{letter_key(l)}}}"];')
        lines.append("}")
        return "\n".join(lines)


@dataclass
class MealySkolem:
    """One machine per existential block; inputs are the ``universe`` vars
    (free and universal)."""
    universe: FrozenSet[str]
    machines: List[MealyMachine]
    mode: str = BEHAVIORAL

    def __post_init__(self):
        self.universe = frozenset(self.universe)
        for mc in self.machines:
            if not mc.reads <= self.universe or not mc.reads_now <= self.universe:
                raise AlphabetMismatch("machine reads variables outside the free/universal universe")

    @property
    def outputs(self) -> FrozenSet[str]:
        return frozenset().union(*(mc.block for mc in self.machines)) if self.machines else frozenset()

    def initial(self):
        return tuple(mc.initial for mc in self.machines)

    def outputs_at(self, mems, letter) -> FrozenSet[str]:
        out = frozenset()
        for mc, m in zip(self.machines, mems):
            out |= mc.out(m, letter)
        return out

    def advance(self, mems, letter):
        return tuple(mc.step(m, letter) for mc, m in zip(self.machines, mems))

    def memory_size(self) -> int:
        size = 1
        for mc in self.machines:
            size *= mc.n_memory
        return size

    def to_json(self) -> dict:
        return {"mode": self.mode, "universe": sorted(self.universe),
                "machines": [mc.to_json() for mc in self.machines]}

    @classmethod
    def from_json(cls, data) -> "MealySkolem":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(frozenset(data["universe"]), [MealyMachine.from_json(m) for m in data["machines"]],
                   data.get("mode", BEHAVIORAL))

    def to_dot(self) -> str:
        return "\n".join(mc.to_dot() for mc in self.machines)


def apply(theta: MealySkolem, pi: LassoTrace) -> LassoTrace:
    """Extend ``pi`` with the existential values the family produces."""
    if pi.universe != theta.universe:
        raise AlphabetMismatch(f"trace universe {sorted(pi.universe)} differs from {sorted(theta.universe)}")
    seen = {}
    outs = []
    p, mems = 0, theta.initial()
    while (p, mems) not in seen:
        seen[(p, mems)] = len(outs)
        a = pi.letter(p)
        outs.append(theta.outputs_at(mems, a))
        mems = theta.advance(mems, a)
        p = pi.successor(p)
    k = seen[(p, mems)]
    # instant i of the run corresponds to position i of the unrolled trace
    ys = LassoTrace(theta.outputs, tuple(outs[:k]), tuple(outs[k:]))
    xs = LassoTrace(pi.universe, tuple(pi.letter(i) for i in range(k)),
                    tuple(pi.letter(i) for i in range(k, len(outs))))
    return combine(xs, ys)


# -------------------------------------------------------------- conformance

def licensed(prefix, block, mode, free=frozenset()) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """(vars whose past may be read, vars whose present may be read)."""
    now = fm.dep(prefix, block, free)
    if mode == BEHAVIORAL:
        return now, now
    universal = frozenset(free).union(*(b.vars for b in prefix if not b.existential))
    return universal, now


def check_conformance(theta: MealySkolem, prefix, mode, free=frozenset()) -> bool:
    blocks = [b for b in prefix if b.existential]
    if len(blocks) != len(theta.machines):
        return False
    for b, mc in zip(blocks, theta.machines):
        if mc.block != b.vars:
            return False
        past, now = licensed(prefix, b, mode, free)
        if not mc.reads <= past or not mc.reads_now <= now:
            return False
    return True


# -------------------------------------------------------------- validation

@dataclass
class Validation:
    ok: bool
    counterexample: Optional[LassoTrace] = None


def validate(theta: MealySkolem, matrix: fm.Matrix, all_vars=None, negated_nbw=None) -> Validation:
    """Exact check that every input trace, extended by ``theta``, satisfies ``matrix``.

    The machines are run in lockstep with an automaton for the negated
    matrix; the product, read over the inputs, must be empty.
    """
    if all_vars is None:
        all_vars = theta.universe | theta.outputs | fm.matrix_vars(matrix)
    bad = negated_nbw or ltl_to_nbw(fm.Not(matrix), all_vars)
    alpha = bad.alphabet_vars

    def successors(key, letter):
        mems, q = key
        full = (letter | theta.outputs_at(mems, letter)) & alpha
        nxt = theta.advance(mems, letter)
        for q2 in bad.succ(q, full):
            yield (nxt, q2)

    prod = explore_nbw(theta.universe, (theta.initial(), bad.initial), successors,
                       lambda k: k[1] in bad.accepting, stage="validate")
    cex = emptiness(prod)
    if cex is None:
        return Validation(True)
    joint = apply(theta, cex)
    if eval_ltl(matrix, joint):
        raise AssertionError("validation counterexample does not falsify the matrix")
    return Validation(False, cex)


# --------------------------------------------------------------- builders

def constant_machine(block, pi: LassoTrace) -> MealyMachine:
    """Machine that replays a lasso regardless of its inputs."""
    n = len(pi)
    e = frozenset()
    return MealyMachine(frozenset(block), e, e, n, 0,
                        [{e: pi.successor(p)} for p in range(n)],
                        [{e: pi.letter(p) & frozenset(block)} for p in range(n)])


def machine_from_tree(t: RegularTree, block) -> MealyMachine:
    """Mealy reading of a synthesis tree: the label of the child reached by
    the current input is the current output; the root label is unused."""
    dirs = t.directions()
    return MealyMachine(frozenset(block), t.direction_vars, t.direction_vars, t.n_memory, t.initial,
                        [{d: t.update[m][d] for d in dirs} for m in range(t.n_memory)],
                        [{d: t.labels[t.update[m][d]] & frozenset(block) for d in dirs} for m in range(t.n_memory)])


def tree_from_machine(mc: MealyMachine, label_vars=None) -> RegularTree:
    """Inverse of :func:`machine_from_tree` for behavioral machines.

    Tree memory is (machine memory, output just produced); the root carries
    the empty label.
    """
    if mc.reads != mc.reads_now:
        raise ValueError("only machines reading the same vars in past and present map to trees")
    dirs = powerset(mc.reads)
    start = (mc.initial, frozenset())
    index = {start: 0}
    order = [start]
    update = []
    i = 0
    while i < len(order):
        m, _ = order[i]
        i += 1
        row = {}
        for d in dirs:
            k = (mc.step(m, d), mc.out(m, d))
            if k not in index:
                index[k] = len(order)
                order.append(k)
            row[d] = index[k]
        update.append(row)
    return RegularTree(label_vars or mc.block, mc.reads, len(order), 0, update, [o for _, o in order])


def enumerate_machines(block, reads, reads_now, n_memory):
    """All machines with exactly ``n_memory`` states numbered in breadth-first
    order of discovery, in a fixed order."""
    ins = powerset(reads)
    nows = powerset(reads_now)
    outs = powerset(block)
    cells = [(m, a) for m in range(n_memory) for a in ins]
    for targets in itertools.product(range(n_memory), repeat=len(cells)):
        update = [dict() for _ in range(n_memory)]
        for (m, a), t in zip(cells, targets):
            update[m][a] = t
        if not _canonical(update, ins, n_memory):
            continue
        for outv in itertools.product(outs, repeat=n_memory * len(nows)):
            output = [{a: outv[m * len(nows) + j] for j, a in enumerate(nows)} for m in range(n_memory)]
            yield MealyMachine(frozenset(block), frozenset(reads), frozenset(reads_now), n_memory, 0, update, output)


def _canonical(update, ins, n) -> bool:
    seen = [0]
    i = 0
    while i < len(seen):
        m = seen[i]
        i += 1
        for a in ins:
            t = update[m][a]
            if t not in seen:
                if t != len(seen):
                    return False
                seen.append(t)
    return len(seen) == n


@dataclass
class OracleResult:
    status: str
    witness: Optional[MealySkolem] = None
    candidates: int = 0
    exhausted_bound: bool = False


def enumerate_oracle(f: fm.QuantifiedFormula, mode, memory_bound: int, max_candidates: int = 50_000) -> OracleResult:
    """Search machine families with growing memory for a validated witness.

    Never answers Unsat: without a witness the answer is UnknownWithinBounds.
    Families are tried by largest machine size first, then in the fixed
    machine enumeration order.
    """
    if memory_bound < 1:
        raise ValueError("memory bound must be at least 1")
    if fm.free_vars(f):
        raise ValueError("oracle expects a closed formula")
    blocks = [b for b in f.prefix if b.existential]
    universe = f.universal_vars
    all_vars = f.all_vars
    bad = ltl_to_nbw(fm.Not(f.matrix), all_vars)
    specs = [licensed(f.prefix, b, mode) for b in blocks]
    tried = 0
    for k in range(1, memory_bound + 1):
        pools = []
        for b, (past, now) in zip(blocks, specs):
            pools.append([(j, mc) for j in range(1, k + 1) for mc in enumerate_machines(b.vars, past, now, j)])
        for family in itertools.product(*pools):
            if blocks and max(j for j, _ in family) != k:
                continue
            if not blocks and k > 1:
                break
            tried += 1
            deadline.check("oracle")
            if tried > max_candidates:
                return OracleResult(UNKNOWN, None, tried - 1, False)
            theta = MealySkolem(universe, [mc for _, mc in family], mode)
            if validate(theta, f.matrix, all_vars, bad).ok:
                return OracleResult(SAT, theta, tried)
    return OracleResult(UNKNOWN, None, tried, True)


# ------------------------------------------------------------ decomposition

def decompose(joint: RegularTree, prefix, free=frozenset()) -> List[RegularTree]:
    """Split a joint synthesis tree into one tree per existential block that
    branches only over the block's dependency variables."""
    out = []
    for b in prefix:
        if not b.existential:
            continue
        dep_dirs = fm.dep(prefix, b, free) & joint.direction_vars
        hidden = powerset(joint.direction_vars - dep_dirs)
        dirs = powerset(dep_dirs)
        start = frozenset([joint.initial])
        index = {start: 0}
        order = [start]
        update, labels = [], []
        i = 0
        while i < len(order):
            s = order[i]
            i += 1
            labs = {joint.labels[m] & b.vars for m in s}
            if len(labs) > 1:
                raise ConformanceError(f"labels of {sorted(b.vars)} depend on directions outside "
                                       f"{sorted(dep_dirs)}")
            labels.append(labs.pop())
            row = {}
            for d in dirs:
                s2 = frozenset(joint.update[m][d | h] for m in s for h in hidden)
                if s2 not in index:
                    index[s2] = len(order)
                    order.append(s2)
                row[d] = index[s2]
            update.append(row)
        out.append(RegularTree(b.vars, dep_dirs, len(order), 0, update, labels))
    return out


def same_labels(t1: RegularTree, t2: RegularTree) -> bool:
    """Label equality on every node (both trees over the same directions)."""
    if t1.direction_vars != t2.direction_vars:
        raise AlphabetMismatch("trees branch over different directions")
    dirs = t1.directions()
    start = (t1.initial, t2.initial)
    seen = {start}
    work = [start]
    while work:
        a, b = work.pop()
        if t1.labels[a] != t2.labels[b]:
            return False
        for d in dirs:
            k = (t1.update[a][d], t2.update[b][d])
            if k not in seen:
                seen.add(k)
                work.append(k)
    return True


def recompose(parts: List[RegularTree], direction_vars) -> RegularTree:
    """Compose component trees over the full direction set."""
    wide = RegularTree(frozenset(), frozenset(direction_vars), 1, 0,
                       [{d: 0 for d in powerset(direction_vars)}], [frozenset()])
    return tree_compose(wide, *parts)
