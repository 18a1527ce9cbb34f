"""Small graph helpers over adjacency dicts (node -> iterable of successors)."""
from collections import deque

import networkx as nx


def reachable(start, succ):
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in succ(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def nontrivial_sccs(nodes, succ):
    """SCCs that contain at least one edge (a cycle)."""
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    for u in nodes:
        for v in succ(u):
            if v in g:
                g.add_edge(u, v)
    out = []
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1 or any(g.has_edge(u, u) for u in comp):
            out.append(comp)
    return out


def shortest_path(start, goal_pred, edges, allowed=None):
    """BFS over ``edges(u) -> [(label, v)]``; returns (labels, end node) or None.

    Returns the empty path when ``start`` already satisfies ``goal_pred``.
    """
    parent = {start: None}
    queue = deque([start])
    if goal_pred(start):
        return [], start
    while queue:
        u = queue.popleft()
        for lab, v in edges(u):
            if allowed is not None and v not in allowed:
                continue
            if v in parent:
                continue
            parent[v] = (u, lab)
            if goal_pred(v):
                labels = []
                node = v
                while parent[node] is not None:
                    prev, l = parent[node]
                    labels.append(l)
                    node = prev
                return labels[::-1], v
            queue.append(v)
    return None


def cycle_through(node, edges, allowed):
    """Shortest nonempty cycle from ``node`` back to itself inside ``allowed``."""
    best = None
    for lab, v in edges(node):
        if v not in allowed:
            continue
        if v == node:
            return [lab]
        found = shortest_path(v, lambda w: w == node, edges, allowed)
        if found is not None and (best is None or len(found[0]) + 1 < len(best)):
            best = [lab] + found[0]
    return best
