"""Semantic language operations on parity automata.

Complementation of deterministic automata, inclusion with ultimately
periodic counterexamples, the residual preorder and automaton of residuals,
and safe-language inclusion.  Inclusion is decided on the product with the
complement: the product accepts a common word iff for some even pair (x, y)
its restriction to coordinate priorities >= (x, y) has a reachable SCC
containing both a coordinate-1 priority-x and a coordinate-2 priority-y
transition; the witness is a shortest lasso through both.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

from .automaton import (
    EPS,
    Congruence,
    ParityAutomaton,
    Transition,
    UPWord,
    congruence_from_classes,
    tarjan_scc,
)


def complement_det(aut: ParityAutomaton) -> ParityAutomaton:
    """Complement of a deterministic automaton: shift all priorities by one."""
    if not aut.deterministic or aut.has_eps:
        raise ValueError("complement_det needs a deterministic eps-free automaton")
    trans = tuple(replace(t, priority=t.priority + 1) for t in aut.transitions)
    return replace(
        aut,
        transitions=trans,
        priority_range=(aut.d_min + 1, aut.d_max + 1),
    )


# ---------------------------------------------------------------------------
# Product graphs and the even-pair cycle search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _PEdge:
    src: int
    dst: int
    letter: str  # EPS when only the first coordinate moved
    pr1: int
    pr2: int | None  # None when the second coordinate stuttered


def _explore_product(a1: ParityAutomaton, q1: int, a2: ParityAutomaton, q2: int):
    """Reachable product of a1 (may have eps) with deterministic a2.

    Eps moves of a1 stutter a2 and carry no second-coordinate priority.
    Returns (node index map, edge list, start id).
    """
    nodes: dict[tuple[int, int], int] = {}

    def nid(s, t):
        key = (s, t)
        if key not in nodes:
            nodes[key] = len(nodes)
        return nodes[key]

    start = nid(q1, q2)
    edges: list[_PEdge] = []
    queue = deque([(q1, q2)])
    seen = {(q1, q2)}
    while queue:
        s, t = queue.popleft()
        sid = nodes[(s, t)]
        for tr in a1.by_src[s]:
            if tr.is_eps:
                tgt = (tr.dst, t)
                e = _PEdge(sid, nid(*tgt), EPS, tr.priority, None)
            else:
                u = a2.dsucc(t, tr.letter)
                tgt = (tr.dst, u.dst)
                e = _PEdge(sid, nid(*tgt), tr.letter, tr.priority, u.priority)
            edges.append(e)
            if tgt not in seen:
                seen.add(tgt)
                queue.append(tgt)
    return nodes, edges, start


def _even_pair_lasso(nodes, edges, start) -> UPWord | None:
    """Shortest lasso witnessing a cycle accepted by both coordinates.

    Coordinate-2 stutters (pr2 None) are allowed on the cycle but do not
    count towards the required priority-y transition, which automatically
    excludes cycles that are all-eps in coordinate 1.
    """
    n = len(nodes)
    pr1s = sorted({e.pr1 for e in edges})
    pr2s = sorted({e.pr2 for e in edges if e.pr2 is not None})
    best: tuple[int, tuple, tuple] | None = None  # (length, u, v)
    dist_from_start, pred = _bfs_tree(n, edges, start)
    for x in pr1s:
        if x % 2 != 0:
            continue
        for y in pr2s:
            if y % 2 != 0:
                continue
            sub = [
                e
                for e in edges
                if e.pr1 >= x and (e.pr2 is None or e.pr2 >= y)
            ]
            comp_of = _scc_map(n, sub)
            comps_x = {}
            comps_y = {}
            for e in sub:
                if comp_of[e.src] == comp_of[e.dst]:
                    c = comp_of[e.src]
                    if e.pr1 == x:
                        comps_x.setdefault(c, []).append(e)
                    if e.pr2 == y:
                        comps_y.setdefault(c, []).append(e)
            for c in sorted(set(comps_x) & set(comps_y)):
                anchor = comps_x[c][0]
                if dist_from_start[anchor.src] < 0:
                    continue
                cyc = _cycle_through(sub, comp_of, c, comps_x[c], comps_y[c])
                if cyc is None:
                    continue
                entry, cycle_edges = cyc
                u = _path_letters(pred, start, entry)
                v = tuple(e.letter for e in cycle_edges if e.letter != EPS)
                if not v:
                    continue
                cand = (len(u) + len(v), tuple(u), v)
                if best is None or cand < best:
                    best = cand
    if best is None:
        return None
    return UPWord(best[1], best[2]).canonical()


def _bfs_tree(n, edges, start):
    adj = [[] for _ in range(n)]
    for e in edges:
        adj[e.src].append(e)
    dist = [-1] * n
    pred: list[_PEdge | None] = [None] * n
    dist[start] = 0
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for e in adj[v]:
            if dist[e.dst] < 0:
                dist[e.dst] = dist[v] + 1
                pred[e.dst] = e
                queue.append(e.dst)
    return dist, pred


def _path_letters(pred, start, target):
    letters = []
    v = target
    while v != start:
        e = pred[v]
        if e is None:
            return None
        if e.letter != EPS:
            letters.append(e.letter)
        v = e.src
    return tuple(reversed(letters))


def _scc_map(n, edges):
    comps = tarjan_scc(n, ((e.src, e.dst) for e in edges))
    comp_of = [0] * n
    for i, comp in enumerate(comps):
        for q in comp:
            comp_of[q] = i
    return comp_of


def _cycle_through(sub, comp_of, comp, x_edges, y_edges):
    """Shortest cycle inside one SCC through one x-anchor and one y-anchor."""
    adj: dict[int, list[_PEdge]] = {}
    for e in sub:
        if comp_of[e.src] == comp and comp_of[e.dst] == comp:
            adj.setdefault(e.src, []).append(e)

    def shortest(src, dst):
        if src == dst:
            return []
        dist = {src: None}
        queue = deque([src])
        prev = {}
        while queue:
            v = queue.popleft()
            for e in adj.get(v, ()):
                if e.dst not in dist:
                    dist[e.dst] = True
                    prev[e.dst] = e
                    if e.dst == dst:
                        path = []
                        w = dst
                        while w != src:
                            path.append(prev[w])
                            w = prev[w].src
                        return list(reversed(path))
                    queue.append(e.dst)
        return None

    best = None
    for ex in x_edges:
        for ey in y_edges:
            if ex is ey:
                back = shortest(ex.dst, ex.src)
                if back is None:
                    continue
                cyc = [ex] + back
            else:
                mid = shortest(ex.dst, ey.src)
                if mid is None:
                    continue
                back = shortest(ey.dst, ex.src)
                if back is None:
                    continue
                cyc = [ex] + mid + [ey] + back
            if best is None or len(cyc) < len(best):
                best = cyc
    if best is None:
        return None
    return best[0].src, best


def incl_det(a: ParityAutomaton, q: int, b: ParityAutomaton, p: int):
    """L(a from q) included in L(b from p)?  True, or a counterexample UPWord."""
    if not (a.deterministic and b.deterministic):
        raise ValueError("incl_det needs deterministic automata")
    comp = complement_det(b)
    nodes, edges, start = _explore_product(a, q, comp, p)
    witness = _even_pair_lasso(nodes, edges, start)
    return True if witness is None else witness


def incl_nd_in_det(a: ParityAutomaton, b: ParityAutomaton, q=None, p=None):
    """L(a) included in L(b) for possibly nondeterministic, eps-carrying `a`
    and deterministic `b`; eps moves of `a` stutter `b`."""
    if not b.deterministic:
        raise ValueError("right-hand side must be deterministic")
    q = a.initial if q is None else q
    p = b.initial if p is None else p
    comp = complement_det(b)
    nodes, edges, start = _explore_product(a, q, comp, p)
    witness = _even_pair_lasso(nodes, edges, start)
    return True if witness is None else witness


def lang_equal_det(a: ParityAutomaton, b: ParityAutomaton):
    """Language equality of deterministic automata (True or a side+witness)."""
    r = incl_det(a, a.initial, b, b.initial)
    if r is not True:
        return ("left-minus-right", r)
    r = incl_det(b, b.initial, a, a.initial)
    if r is not True:
        return ("right-minus-left", r)
    return True


def lang_empty_from(aut: ParityAutomaton, q: int) -> bool:
    """Is L(aut from q) empty?  Existential over runs (eps allowed)."""
    nodes: dict[int, int] = {}

    def nid(s):
        if s not in nodes:
            nodes[s] = len(nodes)
        return nodes[s]

    nid(q)
    edges = []
    stack, seen = [q], {q}
    while stack:
        s = stack.pop()
        for t in aut.by_src[s]:
            edges.append(
                _PEdge(nodes[s], nid(t.dst), t.letter, t.priority, t.priority)
            )
            if t.dst not in seen:
                seen.add(t.dst)
                stack.append(t.dst)
    n = len(nodes)
    for x in sorted({t.priority for t in aut.transitions}):
        if x % 2 != 0:
            continue
        sub = [e for e in edges if e.pr1 >= x]
        comp_of = _scc_map(n, sub)
        marked = set()
        consuming = set()
        for e in sub:
            if comp_of[e.src] == comp_of[e.dst]:
                if e.pr1 == x:
                    marked.add(comp_of[e.src])
                if e.letter != EPS:
                    consuming.add(comp_of[e.src])
        if marked & consuming:
            return False
    return True


# ---------------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualPreorder:
    rank: dict[int, int]
    total: bool
    incomparable_witness: tuple[int, int, UPWord, UPWord] | None = None
    dropped_unreachable: tuple[int, ...] = ()

    def leq(self, q, p):
        return self.rank[q] <= self.rank[p]

    def same(self, q, p):
        return self.rank[q] == self.rank[p]


def residual_preorder(aut: ParityAutomaton) -> ResidualPreorder:
    """Inclusion preorder on state languages of a deterministic automaton.

    Unreachable states are excluded (reported in `dropped_unreachable`).
    When a pair is incomparable, `total` is False and the witness carries a
    word in each difference.
    """
    reach = sorted(aut.reachable())
    dropped = tuple(q for q in aut.states() if q not in set(reach))
    states = reach
    leq = {}
    cex = {}
    for q in states:
        for p in states:
            if q == p:
                leq[(q, p)] = True
                continue
            r = incl_det(aut, q, aut, p)
            leq[(q, p)] = r is True
            if r is not True:
                cex[(q, p)] = r
    for q in states:
        for p in states:
            if q < p and not leq[(q, p)] and not leq[(p, q)]:
                return ResidualPreorder(
                    rank={},
                    total=False,
                    incomparable_witness=(q, p, cex[(q, p)], cex[(p, q)]),
                    dropped_unreachable=dropped,
                )
    # totally preordered: rank = number of strictly smaller classes
    rank = {}
    for q in states:
        rank[q] = sum(
            1
            for p in states
            if leq[(p, q)] and not leq[(q, p)]
        )
    # normalise ranks to 0..k-1
    values = sorted(set(rank.values()))
    renum = {v: i for i, v in enumerate(values)}
    rank = {q: renum[v] for q, v in rank.items()}
    return ResidualPreorder(rank=rank, total=True, dropped_unreachable=dropped)


def residual_congruence(aut: ParityAutomaton) -> Congruence:
    """Language-equality classes of states (q ~ p iff L(q) = L(p)).

    Requires all states reachable; trim first.  Works for deterministic
    automata via pairwise inclusion both ways.
    """
    groups: list[list[int]] = []
    for q in aut.states():
        placed = False
        for g in groups:
            p = g[0]
            if incl_det(aut, q, aut, p) is True and incl_det(aut, p, aut, q) is True:
                g.append(q)
                placed = True
                break
        if not placed:
            groups.append([q])
    return congruence_from_classes(aut.n_states, groups)


def residual_automaton(aut: ParityAutomaton):
    """Quotient structure of a deterministic automaton by language equality.

    Returns (structure, congruence): the structure is a ParityAutomaton whose
    priorities are all zero placeholders (it is an automaton structure, the
    transitions [u] -a-> [ua]), over the reachable part of `aut`.
    """
    trimmed = aut.trim()
    cong = residual_congruence(trimmed)
    k = cong.n_classes
    seen = set()
    trans = []
    for t in trimmed.transitions:
        key = (cong.class_of[t.src], t.letter, 0, cong.class_of[t.dst])
        if key not in seen:
            seen.add(key)
            trans.append(Transition(*key))
    origin = tuple(
        "+".join(trimmed.origin_label(q) for q in cong.members(c)) for c in range(k)
    )
    structure = ParityAutomaton(
        n_states=k,
        alphabet=trimmed.alphabet,
        initial=cong.class_of[trimmed.initial],
        transitions=tuple(trans),
        priority_range=(0, 0),
        deterministic=True,
        origin=origin,
    )
    return structure, cong


# ---------------------------------------------------------------------------
# Safe languages
# ---------------------------------------------------------------------------


def check_det_over_geq(aut: ParityAutomaton, x: int):
    for q in aut.states():
        for a in aut.alphabet:
            if sum(1 for t in aut.succ(q, a) if t.priority >= x) > 1:
                return f"state {q} has several >= {x} transitions on {a!r}"
    return True


def safe_incl(aut: ParityAutomaton, x: int, q: int, p: int):
    """Is the (<x)-safe language of q included in that of p?

    Requires determinism over transitions with priority >= x.  Returns True
    or a separating finite word (readable (<x)-safely from q but not p).
    """
    ok = check_det_over_geq(aut, x)
    if ok is not True:
        raise ValueError(f"not deterministic over >= {x} transitions: {ok}")

    def step(s, a):
        for t in aut.succ(s, a):
            if t.priority >= x and not t.is_eps:
                return t.dst
        return None

    start = (q, p)
    prev: dict[tuple[int, int], tuple[tuple[int, int], str]] = {start: None}
    queue = deque([start])
    while queue:
        s, t = queue.popleft()
        for a in aut.alphabet:
            s2 = step(s, a)
            if s2 is None:
                continue
            t2 = step(t, a)
            if t2 is None:
                word = [a]
                node = (s, t)
                while prev[node] is not None:
                    node, letter = prev[node]
                    word.append(letter)
                return tuple(reversed(word))
            if (s2, t2) not in prev:
                prev[(s2, t2)] = ((s, t), a)
                queue.append((s2, t2))
    return True


def safe_language_classes(aut: ParityAutomaton, x: int, states) -> list[list[int]]:
    """Group `states` by equal (<x)-safe language."""
    groups: list[list[int]] = []
    for q in states:
        for g in groups:
            p = g[0]
            if safe_incl(aut, x, q, p) is True and safe_incl(aut, x, p, q) is True:
                g.append(q)
                break
        else:
            groups.append([q])
    return groups
