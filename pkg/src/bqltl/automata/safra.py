"""Safra-tree determinization with dynamic node naming.

Nodes of a tree are named 1..k so that a parent is named below its children
and an older sibling below a younger one. After each step the names are
compacted, and the step's priority is read off the smallest name that was
either removed (odd) or marked by a vertical merge (even). Priorities here
follow the min-even convention in ``1..2n+1``; callers convert.
"""
from __future__ import annotations

from typing import Callable, FrozenSet, Hashable, Iterable, Optional, Tuple

# frozen tree: (name, label, children) with children a tuple of frozen trees
Tree = Optional[Tuple[int, FrozenSet, tuple]]


class _Node:
    __slots__ = ("name", "label", "children")

    def __init__(self, name, label, children):
        self.name = name
        self.label = label
        self.children = children


def _thaw(t):
    return _Node(t[0], set(t[1]), [_thaw(c) for c in t[2]])


def _freeze(node):
    return (node.name, frozenset(node.label), tuple(_freeze(c) for c in node.children))


def _preorder(node):
    stack = [node]
    while stack:
        v = stack.pop()
        yield v
        stack.extend(reversed(v.children))


class SafraStepper:
    """Deterministic successor function on Safra trees of an NBW.

    ``succ(q, letter)`` returns the NBW successors of state ``q``;
    ``accepting`` is the Büchi set; ``n`` bounds the number of tree nodes.
    """

    def __init__(self, initial: Hashable, succ: Callable[[Hashable, object], Iterable],
                 accepting, n: int):
        self.succ = succ
        self.accepting = frozenset(accepting)
        self.n = n
        self.initial_tree: Tree = (1, frozenset([initial]), ())
        self._cache = {}

    @property
    def neutral(self) -> int:
        return 2 * self.n + 1

    def step(self, tree: Tree, letter) -> Tuple[Tree, int]:
        key = (tree, letter)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._step(tree, letter)
        return hit

    def _step(self, tree, letter):
        n = self.n
        if tree is None:
            return None, self.neutral
        root = _thaw(tree)
        originals = list(_preorder(root))
        for v in originals:
            nxt = set()
            for q in v.label:
                nxt.update(self.succ(q, letter))
            v.label = nxt
        fresh = n + 1
        for v in originals:
            acc = v.label & self.accepting
            if acc:
                v.children.append(_Node(fresh, set(acc), []))
                fresh += 1

        def prune(v, forbidden):
            v.label -= forbidden
            claimed = set()
            for c in v.children:
                prune(c, forbidden | claimed)
                claimed |= c.label

        prune(root, set())
        removed = []

        def drop_empty(v):
            kept = []
            for c in v.children:
                if c.label:
                    drop_empty(c)
                    kept.append(c)
                else:
                    removed.extend(w.name for w in _preorder(c))
            v.children = kept

        if not root.label:
            removed.extend(w.name for w in _preorder(root))
            f = min((x for x in removed if x <= n), default=None)
            return None, (2 * f - 1) if f is not None else self.neutral
        drop_empty(root)
        green = []

        def vmerge(v):
            if v.children and set().union(*(c.label for c in v.children)) == v.label:
                for c in v.children:
                    removed.extend(w.name for w in _preorder(c))
                v.children = []
                green.append(v.name)
            else:
                for c in v.children:
                    vmerge(c)

        vmerge(root)
        e = min((x for x in green if x <= n), default=None)
        f = min((x for x in removed if x <= n), default=None)
        if e is not None and (f is None or e < f):
            prio = 2 * e
        elif f is not None:
            prio = 2 * f - 1
        else:
            prio = self.neutral
        names = sorted(v.name for v in _preorder(root))
        rename = {old: i + 1 for i, old in enumerate(names)}
        for v in _preorder(root):
            v.name = rename[v.name]
        return _freeze(root), prio


def max_color(prio: int, n: int) -> int:
    """Min-even priority in 1..2n+1 to the max-even scale (same parity)."""
    return 2 * n + 2 - prio


def states_of(tree: Tree) -> FrozenSet:
    return frozenset() if tree is None else tree[1]
