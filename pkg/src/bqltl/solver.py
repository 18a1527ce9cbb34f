"""Satisfiability under classic, behavioral and weak-behavioral semantics."""
from __future__ import annotations

import functools
import json
import time
from dataclasses import dataclass, field
from typing import List, Optional

from . import deadline
from . import formula as fm
from . import skolem
from .automata import tree as ta
from .automata import word as wa
from .errors import ResourceExceeded
from .games import build_multi_game, extract_team_strategy, sequentialize, zielonka_solve
from .skolem import SAT, UNKNOWN, UNSAT, MealyMachine, MealySkolem
from .trace import LassoTrace, eval_ltl, powerset

CLASSIC, BEHAVIORAL, WEAK = "classic", "behavioral", "weak"
SEMANTICS = (CLASSIC, BEHAVIORAL, WEAK)


@dataclass
class Budgets:
    state_cap: int = wa.DEFAULT_STATE_CAP
    # alternation removal keeps large states; its own cap bounds memory
    tree_state_cap: int = ta.DEFAULT_TREE_STATE_CAP
    oracle_memory: int = 2
    oracle_candidates: int = 50_000
    time_cap: Optional[float] = None

    def __post_init__(self):
        positive = (self.state_cap, self.tree_state_cap, self.oracle_memory, self.oracle_candidates)
        if min(positive) < 1 or (self.time_cap is not None and self.time_cap <= 0):
            raise ValueError("budgets must be positive")


@dataclass
class Stage:
    name: str
    seconds: float
    size: int


@dataclass
class Verdict:
    status: str
    semantics: str
    witness: object = None
    counterexample: Optional[LassoTrace] = None
    stages: List[Stage] = field(default_factory=list)
    note: str = ""

    @property
    def sat(self) -> bool:
        return self.status == SAT

    def witness_json(self):
        return None if self.witness is None else self.witness.to_json()

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "semantics": self.semantics,
            "witness": self.witness_json(),
            "witnessKind": type(self.witness).__name__ if self.witness is not None else None,
            "stages": [{"name": s.name, "seconds": round(s.seconds, 6), "size": s.size} for s in self.stages],
            "note": self.note,
        }


class _Clock:
    def __init__(self, budgets: Budgets):
        self.budgets = budgets
        self.start = time.perf_counter()
        self.last = self.start
        self.stages: List[Stage] = []

    def mark(self, name, size):
        now = time.perf_counter()
        self.stages.append(Stage(name, now - self.last, size))
        self.last = now
        cap = self.budgets.time_cap
        if cap is not None and now - self.start > cap:
            raise ResourceExceeded(name, cap, f"time cap of {cap}s exceeded after stage '{name}'")


def close_formula(f: fm.QuantifiedFormula) -> fm.QuantifiedFormula:
    free = fm.free_vars(f)
    if not free:
        return f
    return fm.QuantifiedFormula((fm.QuantBlock(fm.EXISTS, free),) + tuple(f.prefix), f.matrix)


def _as_formula(f) -> fm.QuantifiedFormula:
    return fm.parse(f) if isinstance(f, str) else f


def _timed(solver):
    """Run ``solver`` under the budget's wall-clock cap."""
    @functools.wraps(solver)
    def run(f, budgets: Budgets = None) -> "Verdict":
        budgets = budgets or Budgets()
        with deadline.time_limit(budgets.time_cap):
            return solver(f, budgets)
    return run


# ------------------------------------------------------------------ classic

def _complement(a: wa.Nbw, cap) -> wa.Nbw:
    return wa.trim(wa.complement_via_dpw(wa.trim(a), cap))


def _classic_pipeline(matrix, blocks, all_vars, clock, cap):
    """Eliminate ``blocks`` innermost first.

    Keeps an automaton for the formula (pos) and/or for its negation (neg)
    over the still-unquantified variables; a complement is only built when
    the other polarity is needed.
    """
    pos = wa.trim(wa.ltl_to_nbw(matrix, all_vars, cap))
    neg = wa.trim(wa.ltl_to_nbw(fm.Not(matrix), all_vars, cap))
    clock.mark("ltl_to_nbw", pos.n_states + neg.n_states)
    for b in reversed(blocks):
        if b.existential:
            if pos is None:
                pos = _complement(neg, cap)
                clock.mark("complement", pos.n_states)
            pos, neg = wa.trim(wa.project_exists(pos, b.vars)), None
            clock.mark("project", pos.n_states)
        else:
            if neg is None:
                neg = _complement(pos, cap)
                clock.mark("complement", neg.n_states)
            pos, neg = None, wa.trim(wa.project_exists(neg, b.vars))
            clock.mark("project", neg.n_states)
    return pos, neg


@_timed
def solve_classic(f, budgets: Budgets = None) -> Verdict:
    """Sat iff the closed formula holds; with an outermost existential block a
    witness lasso for that block is returned."""
    budgets = budgets or Budgets()
    f = close_formula(_as_formula(f))
    clock = _Clock(budgets)
    blocks = list(f.prefix)
    outer = blocks[0] if blocks and blocks[0].existential else None
    inner = blocks[1:] if outer else blocks
    pos, neg = _classic_pipeline(f.matrix, inner, f.all_vars, clock, budgets.state_cap)
    if outer is not None:
        if pos is None:
            pos = _complement(neg, budgets.state_cap)
            clock.mark("complement", pos.n_states)
        lasso = wa.emptiness(pos)
        clock.mark("emptiness", pos.n_states)
        if lasso is None:
            return Verdict(UNSAT, CLASSIC, stages=clock.stages)
        return Verdict(SAT, CLASSIC, witness=lasso, stages=clock.stages)
    # no variables left: the alphabet is the single empty letter
    if pos is not None:
        sat = wa.emptiness(pos) is not None
    else:
        sat = wa.emptiness(neg) is None
    clock.mark("emptiness", (pos or neg).n_states)
    return Verdict(SAT if sat else UNSAT, CLASSIC, stages=clock.stages)


def validate_classic_witness(f, lasso: LassoTrace, budgets: Budgets = None) -> bool:
    """Re-check a witness lasso for the outermost existential block."""
    budgets = budgets or Budgets()
    f = close_formula(_as_formula(f))
    rest = list(f.prefix[1:])
    if not rest:
        return eval_ltl(f.matrix, lasso)
    if len(rest) == 1:
        # remaining "for all X": no X-trace may falsify the matrix next to the lasso
        bad = wa.ltl_to_nbw(fm.Not(f.matrix), f.all_vars, budgets.state_cap)
        xs = rest[0].vars

        def successors(key, letter):
            q, p = key
            for q2 in bad.succ(q, letter | lasso.letter(p)):
                yield (q2, lasso.successor(p))

        prod = wa.explore_nbw(xs, (bad.initial, 0), successors, lambda k: k[0] in bad.accepting,
                              budgets.state_cap, "validate_lasso")
        return wa.emptiness(prod) is None
    pos, neg = _classic_pipeline(f.matrix, rest, f.all_vars, _Clock(Budgets()), budgets.state_cap)
    if pos is not None:
        return pos.accepts(lasso)
    return not neg.accepts(lasso)


# --------------------------------------------------------------- behavioral

def _lasso_product(d: wa.Dpw, lasso: LassoTrace) -> wa.Dpw:
    """DPW over the remaining variables with ``lasso``'s variables fixed."""
    keep = d.alphabet_vars - lasso.universe
    letters = powerset(keep)
    index = {(d.initial, 0): 0}
    keys = [(d.initial, 0)]
    delta = []
    i = 0
    while i < len(keys):
        q, p = keys[i]
        i += 1
        row = {}
        for a in letters:
            k = (d.step(q, a | lasso.letter(p)), lasso.successor(p))
            if k not in index:
                index[k] = len(keys)
                keys.append(k)
            row[a] = index[k]
        delta.append(row)
    return wa.Dpw(keep, len(keys), 0, delta, [d.color[q] for q, _ in keys])


def _family_from_lasso(f, lasso) -> MealySkolem:
    """Sigma0/Sigma1 witnesses: the first block replays the lasso."""
    machines = [skolem.constant_machine(b.vars, lasso) for b in f.prefix if b.existential]
    return MealySkolem(f.universal_vars, machines, skolem.BEHAVIORAL)


def _word_dpw(f, trailing, clock, cap) -> wa.Dpw:
    """DPW for the matrix; a trailing universal block is folded in as
    "for every value of it" since no output may read it."""
    if trailing is None:
        nbw = wa.trim(wa.ltl_to_nbw(f.matrix, f.all_vars, cap))
        clock.mark("ltl_to_nbw", nbw.n_states)
        d = wa.nbw_to_dpw(nbw, cap)
        clock.mark("nbw_to_dpw", d.n_states)
        return d
    bad = wa.trim(wa.ltl_to_nbw(fm.Not(f.matrix), f.all_vars, cap))
    clock.mark("ltl_to_nbw", bad.n_states)
    bad = wa.trim(wa.project_exists(bad, trailing.vars))
    clock.mark("project", bad.n_states)
    d = wa.nbw_to_dpw(bad, cap).dual()
    clock.mark("nbw_to_dpw", d.n_states)
    return d


@_timed
def solve_behavioral(f, budgets: Budgets = None) -> Verdict:
    budgets = budgets or Budgets()
    f = close_formula(_as_formula(f))
    cls = fm.classify(f)
    if cls.tag != fm.GENERAL:
        v = solve_classic(f, budgets)
        v.semantics = BEHAVIORAL
        v.note = f"{cls.tag}: decided classically"
        if v.sat:
            v.witness = _family_from_lasso(f, v.witness) if v.witness is not None \
                else MealySkolem(f.universal_vars, [], skolem.BEHAVIORAL)
        return v
    return _behavioral_pipeline(f, budgets, cls)


def _pipeline_stages(f, budgets, clock):
    """Run the automata sequence; returns the word DPW, the final automaton
    and the block bookkeeping the witness construction needs."""
    blocks = list(f.prefix)
    lead = blocks[0] if blocks[0].existential else None
    trailing = blocks[-1] if not blocks[-1].existential else None
    core = blocks[1 if lead else 0: -1 if trailing else len(blocks)]
    cap, tree_cap = budgets.state_cap, budgets.tree_state_cap
    d = _word_dpw(f, trailing, clock, cap)
    inputs = frozenset().union(*(b.vars for b in core if not b.existential))
    outputs = f.existential_vars
    a0 = ta.reduce(ta.build_synthesis_apt(d, inputs, outputs))
    clock.mark("synthesis_apt", a0.n_states)
    core_exists = [b for b in core if b.existential]
    if lead is None and len(core_exists) == 1:
        return d, a0, lead, inputs, core_exists
    a = a0
    visible = [frozenset()]  # dependency of each existential block, in order
    seen_universal = frozenset()
    for b in core:
        if b.existential:
            visible.append(seen_universal)
        else:
            seen_universal |= b.vars
    # visible[i] is the dependency of core_exists[i-1]; visible[0] is the lead's
    for k in range(len(core_exists), 0, -1):
        a = ta.reduce(ta.ndet(a, tree_cap))
        clock.mark("ndet", a.n_states)
        a = ta.reduce(ta.change(a, core_exists[k - 1].vars, visible[k - 1]))
        clock.mark("change", a.n_states)
    return d, a, lead, inputs, core_exists


def _behavioral_pipeline(f, budgets, cls) -> Verdict:
    clock = _Clock(budgets)
    d, a, lead, inputs, core_exists = _pipeline_stages(f, budgets, clock)
    if lead is None and len(core_exists) == 1:
        tree = ta.npt_emptiness(a)
        clock.mark("emptiness", a.n_states)
        if tree is None:
            return Verdict(UNSAT, BEHAVIORAL, stages=clock.stages, note="synthesis automaton empty")
        mc = skolem.machine_from_tree(tree.trimmed(), core_exists[0].vars)
        fam = MealySkolem(f.universal_vars, [mc], skolem.BEHAVIORAL)
        return Verdict(SAT, BEHAVIORAL, witness=fam, stages=clock.stages)
    final = ta.apt_emptiness(a, budgets.tree_state_cap)
    clock.mark("emptiness", a.n_states)
    if final is None:
        return Verdict(UNSAT, BEHAVIORAL, stages=clock.stages, note=f"pipeline of {len(core_exists)} stages empty")
    if len(core_exists) > 1:
        return Verdict(SAT, BEHAVIORAL, witness=final.trimmed(), stages=clock.stages,
                       note="witness is the final-stage tree; machine families are extracted for one dependent block only")
    # fix the leading block's lasso and synthesize the dependent block against it;
    # instant k sits at depth k + 1, so reading starts below the root
    final = final.trimmed()
    below = ta.RegularTree(final.label_vars, final.direction_vars, final.n_memory,
                           final.update[final.initial][frozenset()], final.update, final.labels)
    stem, loop = ta.unary_lasso(below)
    lasso = LassoTrace(lead.vars, tuple(stem), tuple(loop))
    d2 = _lasso_product(d, lasso)
    a2 = ta.build_synthesis_apt(d2, inputs, core_exists[0].vars)
    tree = ta.npt_emptiness(a2)
    clock.mark("witness_synthesis", a2.n_states)
    if tree is None:
        raise AssertionError("leading block's lasso admits no strategy for the dependent block")
    fam = MealySkolem(f.universal_vars, [skolem.constant_machine(lead.vars, lasso),
                                          skolem.machine_from_tree(tree.trimmed(), core_exists[0].vars)],
                      skolem.BEHAVIORAL)
    return Verdict(SAT, BEHAVIORAL, witness=fam, stages=clock.stages)


def synthesis_verdict(f, budgets: Budgets = None) -> bool:
    """Realizability of a closed "for all X exists Y" formula via the synthesis automaton."""
    budgets = budgets or Budgets()
    f = close_formula(_as_formula(f))
    kinds = [b.kind for b in f.prefix]
    if kinds != [fm.FORALL, fm.EXISTS]:
        raise ValueError("synthesis route expects a prefix A{X} E{Y}")
    d = wa.nbw_to_dpw(wa.trim(wa.ltl_to_nbw(f.matrix, f.all_vars, budgets.state_cap)), budgets.state_cap)
    a0 = ta.build_synthesis_apt(d, f.prefix[0].vars, f.prefix[1].vars)
    return ta.npt_emptiness(a0) is not None


# ---------------------------------------------------------- weak-behavioral

def _family_from_profile(f, profile) -> MealySkolem:
    game = profile.game
    d = game.dpw
    universal = f.universal_vars
    machines = []
    letters = powerset(universal)
    # memory: DPW states reachable under the profile
    order = [d.initial]
    index = {d.initial: 0}
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        for u in letters:
            q2 = d.step(q, profile.round(q, u))
            if q2 not in index:
                index[q2] = len(order)
                order.append(q2)
    for pi, b in enumerate(f.prefix):
        if not b.existential:
            continue
        past, now = skolem.licensed(f.prefix, b, skolem.WEAK_BEHAVIORAL)
        update, output = [], []
        for q in order:
            update.append({u: index[d.step(q, profile.round(q, u))] for u in letters})
            row = {}
            for a in powerset(now):
                partial = []
                for j in range(pi):
                    if game.teams[j] == 0:
                        partial.append(profile.choose(j, q, partial))
                    else:
                        partial.append(a & game.blocks[j])
                row[a] = profile.choose(pi, q, partial)
            output.append(row)
        machines.append(MealyMachine(b.vars, past, now, len(order), 0, update, output))
    return MealySkolem(universal, machines, skolem.WEAK_BEHAVIORAL)


@_timed
def solve_weak_behavioral(f, budgets: Budgets = None) -> Verdict:
    budgets = budgets or Budgets()
    f = close_formula(_as_formula(f))
    cap = budgets.state_cap
    clock = _Clock(budgets)
    nbw = wa.trim(wa.ltl_to_nbw(f.matrix, f.all_vars, cap))
    clock.mark("ltl_to_nbw", nbw.n_states)
    d = wa.nbw_to_dpw(nbw, cap)
    clock.mark("nbw_to_dpw", d.n_states)
    game = build_multi_game(d, f.prefix)
    seq = sequentialize(game, cap)
    clock.mark("sequentialize", len(seq))
    sol = zielonka_solve(seq)
    clock.mark("zielonka", len(seq))
    if seq.initial not in sol.win_even:
        return Verdict(UNSAT, WEAK, stages=clock.stages)
    profile = extract_team_strategy(game, seq, sol)
    fam = _family_from_profile(f, profile)
    clock.mark("strategy", fam.memory_size())
    return Verdict(SAT, WEAK, witness=fam, stages=clock.stages)


SOLVERS = {CLASSIC: solve_classic, BEHAVIORAL: solve_behavioral, WEAK: solve_weak_behavioral}


def solve(f, semantics=CLASSIC, budgets: Budgets = None) -> Verdict:
    if semantics not in SOLVERS:
        raise ValueError(f"unknown semantics {semantics!r}")
    return SOLVERS[semantics](f, budgets)


# ----------------------------------------------------------------- checks

def validate_verdict(f, v: Verdict, budgets: Budgets = None) -> bool:
    """Re-check the witness of a Sat verdict by an independent route."""
    f = close_formula(_as_formula(f))
    if not v.sat:
        return True
    w = v.witness
    if isinstance(w, MealySkolem):
        mode = skolem.BEHAVIORAL if v.semantics == BEHAVIORAL else skolem.WEAK_BEHAVIORAL
        if not skolem.check_conformance(w, f.prefix, mode):
            return False
        return skolem.validate(w, f.matrix, f.all_vars).ok
    if isinstance(w, LassoTrace):
        return validate_classic_witness(f, w, budgets)
    if isinstance(w, ta.RegularTree):
        # final-stage tree of a long pipeline: rebuild the automaton sequence
        # and check the tree by the membership game
        budgets = budgets or Budgets()
        _, final, _, _, _ = _pipeline_stages(f, budgets, _Clock(Budgets()))
        return ta.membership(final, w)
    # classic verdicts with a universal outermost block carry no witness
    return v.semantics == CLASSIC


@dataclass
class CrossCheck:
    formula: str
    verdicts: dict
    oracle: dict
    violations: List[str]
    witnesses_ok: bool

    def to_json(self) -> dict:
        return {"formula": self.formula, "verdicts": self.verdicts, "oracle": self.oracle,
                "violations": self.violations, "witnessesOk": self.witnesses_ok}


def cross_check(f, budgets: Budgets = None, oracle=True) -> CrossCheck:
    """Run every solver (and optionally the oracle) and test the expected
    relations between their answers. Violations are returned, not raised."""
    budgets = budgets or Budgets()
    f = close_formula(_as_formula(f))
    v = {s: solve(f, s, budgets) for s in SEMANTICS}
    neg = solve_classic(fm.negate(f), budgets)
    status = {s: v[s].status for s in SEMANTICS}
    violations = []
    if (status[CLASSIC] == SAT) == (neg.status == SAT):
        violations.append("determinacy: formula and negation agree")
    if status[BEHAVIORAL] == SAT and status[CLASSIC] != SAT:
        violations.append("behavioral Sat but classic Unsat")
    if status[BEHAVIORAL] == SAT and status[WEAK] != SAT:
        violations.append("behavioral Sat but weak-behavioral Unsat")
    ok = all(validate_verdict(f, v[s], budgets) for s in SEMANTICS) and validate_verdict(fm.negate(f), neg, budgets)
    if not ok:
        violations.append("witness failed validation")
    orc = {}
    if oracle:
        for s, mode in ((BEHAVIORAL, skolem.BEHAVIORAL), (WEAK, skolem.WEAK_BEHAVIORAL)):
            r = skolem.enumerate_oracle(f, mode, budgets.oracle_memory, budgets.oracle_candidates)
            orc[s] = r.status
            if r.status == SAT and status[s] != SAT:
                violations.append(f"oracle found a {s} witness but the solver says Unsat")
    return CrossCheck(str(f), status, orc, violations, ok)


def witness_from_json(data):
    """Rebuild a witness (lasso, machine family or tree) from its JSON form;
    a full verdict record is accepted as well."""
    if isinstance(data, str):
        data = json.loads(data)
    if "status" in data and "witness" in data:
        data = data["witness"]
        if data is None:
            raise ValueError("verdict carries no witness")
    if "machines" in data:
        return MealySkolem.from_json(data)
    if "stem" in data and "loop" in data:
        return LassoTrace.from_json(data)
    if "directionVars" in data and "labels" in data:
        return ta.RegularTree.from_json(data)
    raise ValueError("unrecognized witness format")


def validate_witness(f, data, semantics=None, budgets: Budgets = None) -> bool:
    """Round trip: re-check a serialized witness against ``f``.

    Machine families carry their own mode; lassos are classic witnesses;
    trees come from the behavioral pipeline.
    """
    w = witness_from_json(data)
    if semantics is None:
        if isinstance(w, MealySkolem):
            semantics = BEHAVIORAL if w.mode == skolem.BEHAVIORAL else WEAK
        elif isinstance(w, LassoTrace):
            semantics = CLASSIC
        else:
            semantics = BEHAVIORAL
    return validate_verdict(f, Verdict(SAT, semantics, witness=w), budgets)
