"""Randomized property suites over the three solvers.

Each property draws its formulas from its own seeded generator, so adding
or skipping a property never changes the cases of another. Results hold no
timings, which keeps reports byte-identical for a fixed seed.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import formula as fm
from . import generate as gen
from . import skolem
from .automata import word as wa
from .errors import ResourceExceeded
from .skolem import SAT
from .solver import (BEHAVIORAL, CLASSIC, SEMANTICS, WEAK, Budgets, solve, solve_classic, synthesis_verdict,
                     validate_witness)

EXAMPLES = (
    "A{x} E{y} ((G x) <-> y)",
    "E{y} A{x} (F x <-> F y)",
    "E{y} G (y & X !y)",
)

PROPERTIES = ("determinacy", "lattice", "fragment-collapse", "single-block", "witness-roundtrip")
ORACLE_MEMORY_CAP = 8


@dataclass
class Case:
    prop: str
    index: int
    formula: str
    ok: bool
    detail: Dict[str, str] = field(default_factory=dict)

    def row(self) -> dict:
        return {"property": self.prop, "index": self.index, "formula": self.formula,
                "ok": int(self.ok), **{k: self.detail[k] for k in sorted(self.detail)}}


@dataclass
class SuiteReport:
    seed: int
    n: int
    cases: List[Case]
    stage_sizes: List[dict]
    # wall-clock seconds per property; kept out of every serialized form
    durations: Dict[str, float] = field(default_factory=dict, compare=False)

    def counts(self) -> Dict[str, dict]:
        out = {}
        for c in self.cases:
            d = out.setdefault(c.prop, {"passed": 0, "total": 0})
            d["total"] += 1
            d["passed"] += int(c.ok)
        return out

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cases)

    def summary(self) -> dict:
        return {"seed": self.seed, "n": self.n, "ok": self.ok,
                "properties": self.counts(),
                "failures": [c.row() for c in self.cases if not c.ok]}

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _rng(seed, prop):
    return random.Random(f"{seed}:{prop}")


class _Runner:
    """Solves each (formula, semantics) once and remembers Sat verdicts for
    the round-trip property."""

    def __init__(self, budgets):
        self.budgets = budgets
        self.cache = {}
        self.sat = []
        self.stage_sizes = []

    def solve(self, f, sem):
        key = (fm.to_text(f), sem)
        if key not in self.cache:
            v = solve(f, sem, self.budgets)
            self.cache[key] = v
            for s in v.stages:
                self.stage_sizes.append({"formula": key[0], "semantics": sem, "stage": s.name, "size": s.size})
            if v.sat:
                self.sat.append((f, v))
        return self.cache[key]


def random_formulas(seed, n, prop="determinacy"):
    rng = _rng(seed, prop)
    return [gen.random_formula(rng) for _ in range(n)]


def _guarded(prop, i, f, check) -> Case:
    """Run ``check(f) -> (ok, detail)``; a resource error fails the case."""
    try:
        ok, detail = check(f)
    except ResourceExceeded as e:
        ok, detail = False, {"resource": e.stage}
    return Case(prop, i, fm.to_text(f), ok, detail)


def _determinacy(run, seed, n):
    def check(f):
        pos = run.solve(f, CLASSIC)
        neg = solve_classic(fm.negate(f), run.budgets)
        if neg.sat:
            run.sat.append((fm.negate(f), neg))
        return pos.sat != neg.sat, {"f": pos.status, "not_f": neg.status}

    return [_guarded("determinacy", i, f, check) for i, f in enumerate(random_formulas(seed, n))]


def _lattice(run, seed, n):
    def check(f):
        v = {s: run.solve(f, s).status for s in SEMANTICS}
        b = v[BEHAVIORAL] == SAT
        return (not b or v[CLASSIC] == SAT) and (not b or v[WEAK] == SAT), dict(v)

    cases = random_formulas(seed, n) + [fm.parse(t) for t in EXAMPLES]
    return [_guarded("lattice", i, f, check) for i, f in enumerate(cases)]


def _fragment_collapse(run, seed, n):
    def check(f):
        c, b = run.solve(f, CLASSIC).status, run.solve(f, BEHAVIORAL).status
        return c == b, {"fragment": fm.classify(f).tag, CLASSIC: c, BEHAVIORAL: b}

    rng = _rng(seed, "fragment-collapse")
    tags = (fm.SIGMA0, fm.PI0, fm.SIGMA1)
    fs = [gen.random_fragment_formula(rng, tags[i % 3]) for i in range(n)]
    return [_guarded("fragment-collapse", i, f, check) for i, f in enumerate(fs)]


def single_block_case(f, budgets, max_candidates):
    """Agreement of the tree-automata route, the game route, the synthesis
    automaton and the bounded oracle on one ``A{x} E{y}`` formula."""
    b = solve(f, BEHAVIORAL, budgets)
    w = solve(f, WEAK, budgets)
    syn = SAT if synthesis_verdict(f, budgets) else "Unsat"
    d = wa.nbw_to_dpw(wa.trim(wa.ltl_to_nbw(f.matrix, f.all_vars)))
    bound = min(d.n_states, ORACLE_MEMORY_CAP)
    orc = skolem.enumerate_oracle(f, skolem.BEHAVIORAL, bound, max_candidates)
    statuses = {BEHAVIORAL: b.status, WEAK: w.status, "synthesis": syn, "oracle": orc.status}
    ok = b.status == w.status == syn
    if orc.status == SAT:
        ok = ok and b.sat
    elif b.sat:
        # the oracle must find a witness for every Sat instance
        ok = False
    bad = wa.ltl_to_nbw(fm.Not(f.matrix), f.all_vars)
    for v in (b, w):
        if v.sat:
            ok = ok and skolem.validate(v.witness, f.matrix, f.all_vars, bad).ok
    detail = dict(statuses)
    detail["oracle_bound"] = str(bound)
    detail["oracle_candidates"] = str(orc.candidates)
    return ok, detail, (b, w)


def _single_block(run, seed, n, max_candidates):
    def check(f):
        ok, detail, verdicts = single_block_case(f, run.budgets, max_candidates)
        run.sat.extend((f, v) for v in verdicts if v.sat)
        return ok, detail

    rng = _rng(seed, "single-block")
    fs = [gen.random_forall_exists(rng) for _ in range(n)]
    return [_guarded("single-block", i, f, check) for i, f in enumerate(fs)]


def _roundtrip(run):
    out = []
    for i, (f, v) in enumerate(run.sat):
        data = json.loads(json.dumps(v.to_json()))

        def check(f):
            if data["witness"] is None:
                # classic verdict under a leading universal block: no finite
                # witness exists in general, so re-check through the negation
                ok = v.semantics == CLASSIC and not solve_classic(fm.negate(f), run.budgets).sat
            else:
                ok = validate_witness(f, data, v.semantics, run.budgets)
            return ok, {"semantics": v.semantics, "kind": data["witnessKind"] or "none"}

        out.append(_guarded("witness-roundtrip", i, f, check))
    return out


def run_suite(seed: int = 0, n: int = 20, props=None, budgets: Optional[Budgets] = None,
              max_candidates: int = 20_000, sizes: Optional[Dict[str, int]] = None) -> SuiteReport:
    """Run the selected properties on ``n`` cases each; ``sizes`` overrides
    the case count per property.

    A resource error on one case is recorded as a failed case naming the
    stage, not raised.
    """
    props = list(props or PROPERTIES)
    unknown = (set(props) | set(sizes or ())) - set(PROPERTIES)
    if unknown:
        raise ValueError(f"unknown properties: {sorted(unknown)}")
    size = {p: (sizes or {}).get(p, n) for p in PROPERTIES}
    run = _Runner(budgets or Budgets())
    cases = []
    durations = {}
    steps = {
        "determinacy": lambda: _determinacy(run, seed, size["determinacy"]),
        "lattice": lambda: _lattice(run, seed, size["lattice"]),
        "fragment-collapse": lambda: _fragment_collapse(run, seed, size["fragment-collapse"]),
        "single-block": lambda: _single_block(run, seed, size["single-block"], max_candidates),
        "witness-roundtrip": lambda: _roundtrip(run),
    }
    for p in PROPERTIES:
        if p in props:
            start = time.perf_counter()
            cases.extend(steps[p]())
            durations[p] = time.perf_counter() - start
    return SuiteReport(seed, n, cases, run.stage_sizes, durations)
