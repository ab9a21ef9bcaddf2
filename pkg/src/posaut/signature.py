"""Procedure 1: turn a deterministic parity automaton into a fully progress
consistent structured signature automaton, or report a positionality failure.

The pipeline loops over even priorities x: saturate the (x-1)-transitions
over the level-(x-2) classes, centralise (<x)-safe components, check that
safe-language inclusion totally orders each class, re-determinise with the
round-robin component rule, and polish x-transitions.  Any shrink triggers a
language check and a restart on the smaller automaton; the total number of
restarts is bounded by d * |Q|.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

from .automaton import (
    Congruence,
    ParityAutomaton,
    Transition,
    access_word,
    congruence_from_classes,
    emit_dpa,
    parse_dpa,
    safe_components,
    tarjan_scc,
    up_membership,
    upword,
)
from .lang import (
    lang_equal_det,
    residual_preorder,
    safe_incl,
)
from .normalform import normalize
from .progress import check_full_progress_consistency, check_progress_consistency
from .witnesses import (
    FullProgressFailure,
    IncomparableResiduals,
    NotPositional,
    PolishLanguageChange,
    Positional,
    ProgressFailure,
    SafeOrderFailure,
    TwoLoopData,
)


class PipelineError(AssertionError):
    """An internal invariant broke outside a restart point; a bug, never a verdict."""


# ---------------------------------------------------------------------------
# Nested preorders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NestedPreorders:
    """Per-priority total preorders, level k+1 refining level k, as rank maps."""

    levels: tuple[dict[int, int], ...]
    d: int

    def rank(self, x: int) -> dict[int, int]:
        return self.levels[x]

    def classes_at(self, x: int, n_states: int) -> Congruence:
        groups: dict[int, list[int]] = {}
        for q in range(n_states):
            groups.setdefault(self.levels[x][q], []).append(q)
        return congruence_from_classes(n_states, groups.values())

    def leq(self, x, q, p):
        return self.levels[x][q] <= self.levels[x][p]

    def lt(self, x, q, p):
        return self.levels[x][q] < self.levels[x][p]

    def same(self, x, q, p):
        return self.levels[x][q] == self.levels[x][p]


@dataclass(frozen=True)
class SignatureAutomaton:
    automaton: ParityAutomaton
    preorders: NestedPreorders
    validated: bool = False

    @property
    def d(self):
        return self.preorders.d


def _dense(keys: dict[int, tuple]) -> dict[int, int]:
    order = sorted(set(keys.values()))
    renum = {k: i for i, k in enumerate(order)}
    return {q: renum[k] for q, k in keys.items()}


def _component_refinement(aut: ParityAutomaton, x: int, prev: dict[int, int]):
    """Refine the level-(x-2) ranks by the order of (<x)-safe components
    (within a class: components sorted by their least member)."""
    comps, _ = safe_components(aut, x)
    keys = {}
    for q in aut.states():
        cls = prev[q]
        members = [p for p in comps.members(comps.class_of[q]) if prev[p] == cls]
        keys[q] = (prev[q], min(members + [q]))
    return _dense(keys)


def _safe_refinement(aut: ParityAutomaton, x: int, prev: dict[int, int]):
    """Refine the level-(x-1) ranks by (<x)-safe-language inclusion.

    Returns the rank map, or an incomparable pair (q, p, sep_qp, sep_pq).
    """
    groups: dict[int, list[int]] = {}
    for q in aut.states():
        groups.setdefault(prev[q], []).append(q)
    keys = {}
    for cls, members in groups.items():
        incl = {}
        for q in members:
            for p in members:
                incl[(q, p)] = True if q == p else safe_incl(aut, x, q, p)
        for q in members:
            for p in members:
                if q < p and incl[(q, p)] is not True and incl[(p, q)] is not True:
                    return ("incomparable", q, p, incl[(q, p)], incl[(p, q)])
        for q in members:
            below = sum(
                1
                for p in members
                if incl[(p, q)] is True and incl[(q, p)] is not True
            )
            keys[q] = (prev[q], below)
    return _dense(keys)


def compute_preorders(aut: ParityAutomaton, d: int | None = None):
    """Semantic nested preorders of a deterministic automaton: level 0 from
    residual inclusion, odd levels from safe components, even levels from
    safe-language inclusion.  Raises if some level fails to be total."""
    if d is None:
        d = aut.d_max
    rp = residual_preorder(aut)
    if not rp.total:
        raise ValueError("residual preorder not total")
    levels = [dict(rp.rank)]
    for x in range(2, d + 1, 2):
        levels.append(_component_refinement(aut, x, levels[x - 2]))
        ranks = _safe_refinement(aut, x, levels[x - 1])
        if isinstance(ranks, tuple):
            raise ValueError(f"safe languages not totally ordered at level {x}")
        levels.append(ranks)
    if len(levels) == d:  # trailing odd level: refine by (<d+1)-safe components
        levels.append(_component_refinement(aut, d + 1, levels[d - 1]))
    return NestedPreorders(tuple(levels[: d + 1]), d)


# ---------------------------------------------------------------------------
# Pipeline stages
# ---------------------------------------------------------------------------


def saturate(aut: ParityAutomaton, x: int, classes: Congruence) -> ParityAutomaton:
    """(x-1)-saturation: fan every (x-1)-transition out to the whole level-(x-2)
    class of its target.  Requires homogeneity and determinism away from x-1."""
    _require_homogeneous(aut)
    _require_det_except(aut, x - 1)
    existing = set(
        (t.src, t.letter, t.priority, t.dst) for t in aut.transitions
    )
    trans = list(aut.transitions)
    for t in aut.transitions:
        if t.priority != x - 1 or t.is_eps:
            continue
        for p2 in classes.members(classes.class_of[t.dst]):
            key = (t.src, t.letter, x - 1, p2)
            if key not in existing:
                existing.add(key)
                trans.append(Transition(*key))
    det = all(
        len([u for u in trans if u.src == t.src and u.letter == t.letter]) == 1
        for t in trans
    )
    return replace(aut, transitions=tuple(trans), deterministic=det)


def _require_homogeneous(aut):
    for q in aut.states():
        for a in aut.alphabet:
            prios = {t.priority for t in aut.succ(q, a)}
            if len(prios) > 1:
                raise ValueError(f"not homogeneous at state {q}, letter {a!r}")


def _require_det_except(aut, y):
    for q in aut.states():
        for a in aut.alphabet:
            ts = [t for t in aut.succ(q, a) if t.priority != y]
            if len(ts) > 1:
                raise ValueError(
                    f"state {q} nondeterministic on {a!r} away from priority {y}"
                )


def _restrict_classes(classes: Congruence, keep: list[int]) -> Congruence:
    groups: dict[int, list[int]] = {}
    for new_id, old in enumerate(keep):
        groups.setdefault(classes.class_of[old], []).append(new_id)
    return congruence_from_classes(len(keep), groups.values())


def safe_centralise(aut: ParityAutomaton, x: int, classes: Congruence):
    """Delete redundant (<x)-safe components until none remains.

    A component S is redundant if some q in S has a level-(x-2)-equivalent
    q' outside S with Safe(q) included in Safe(q').  Incoming transitions are
    redirected along the image of the first discovered safe run.  Returns
    (automaton, classes restricted to the survivors).
    """
    while True:
        comps, _ = safe_components(aut, x)
        target = _find_redundant(aut, x, comps, classes)
        if target is None:
            return aut, classes
        s_class, q0, q0p = target
        s_members = set(comps.members(s_class))
        pick = _pick_map(aut, x, q0, q0p, s_members)
        keep = [q for q in aut.states() if q not in s_members]
        remap = {q: i for i, q in enumerate(keep)}

        def image(q):
            return remap[pick.get(q, q)]

        trans = tuple(
            Transition(remap[t.src], t.letter, t.priority, image(t.dst))
            for t in aut.transitions
            if t.src not in s_members
        )
        trans = tuple(dict.fromkeys(trans))
        origin = tuple(aut.origin_label(q) for q in keep)
        aut = replace(
            aut,
            n_states=len(keep),
            initial=image(aut.initial),
            transitions=trans,
            origin=origin,
            deterministic=False,
        )
        classes = _restrict_classes(classes, keep)


def _find_redundant(aut, x, comps, classes):
    for s_class in range(comps.n_classes):
        members = comps.members(s_class)
        for q in members:
            for qp in aut.states():
                if comps.class_of[qp] == s_class:
                    continue
                if not classes.same(q, qp):
                    continue
                if safe_incl(aut, x, q, qp) is True:
                    return s_class, q, qp
    return None


def _pick_map(aut, x, q0, q0p, s_members):
    """For each state of the doomed component, its image in the witnessing one:
    follow the (deterministic over >=x) safe run of q0' along the access of q0."""
    pick = {q0: q0p}
    prev = {q0: None}
    queue = deque([q0])

    def safe_step(s, a):
        for t in aut.succ(s, a):
            if t.priority >= x:
                return t.dst
        return None

    while queue:
        s = queue.popleft()
        for t in aut.by_src[s]:
            if t.priority < x or t.dst not in s_members or t.dst in pick:
                continue
            img = safe_step(pick[s], t.letter)
            if img is None:
                raise PipelineError("safe run vanished during centralisation")
            pick[t.dst] = img
            queue.append(t.dst)
    for s in s_members:
        if s not in pick:
            # unreachable inside the component via safe steps from q0; map it
            # through any member already picked (component states are safely
            # interconnected, so this only happens for stale states)
            pick[s] = q0p
    return pick


def check_total_safe_order(aut: ParityAutomaton, x: int, classes_xm1: Congruence):
    """Within every level-(x-1) class, all pairs must be safe-comparable."""
    for c in range(classes_xm1.n_classes):
        members = classes_xm1.members(c)
        for q in members:
            for p in members:
                if q >= p:
                    continue
                qp = safe_incl(aut, x, q, p)
                if qp is True:
                    continue
                pq = safe_incl(aut, x, p, q)
                if pq is True:
                    continue
                return (q, p, qp, pq)
    return True


def redeterminise(
    aut: ParityAutomaton,
    x: int,
    classes_xm2: Congruence,
    classes_xm1: Congruence,
    rank_x: dict[int, int],
) -> ParityAutomaton:
    """Resolve the (x-1)-nondeterminism: route each (x-1)-transition to the
    safe-maximal state of the target class in the next component, round-robin
    over the ordered (<x)-safe components."""
    comps, _ = safe_components(aut, x)
    comp_order = sorted(
        range(comps.n_classes), key=lambda c: min(comps.members(c))
    )
    comp_index = {c: i for i, c in enumerate(comp_order)}

    def pick_max(states):
        best = max(rank_x[s] for s in states)
        return min(s for s in states if rank_x[s] == best)

    new_trans = []
    handled = set()
    for t in aut.transitions:
        if t.priority != x - 1 or t.is_eps:
            new_trans.append(t)
            continue
        key = (t.src, t.letter)
        if key in handled:
            continue
        handled.add(key)
        target_class = classes_xm2.class_of[t.dst]
        i_here = comp_index[comps.class_of[t.src]]
        candidates = sorted(
            {
                comp_index[comps.class_of[p]]
                for p in classes_xm2.members(target_class)
            }
        )
        below = [j for j in candidates if j < i_here]
        i_next = max(below) if below else max(candidates)
        chosen_comp = comp_order[i_next]
        cell = [
            p
            for p in classes_xm2.members(target_class)
            if comps.class_of[p] == chosen_comp
        ]
        new_trans.append(Transition(t.src, t.letter, x - 1, pick_max(cell)))
    out = replace(aut, transitions=tuple(new_trans), deterministic=True)
    bad = [m for m in out.validate() if not m.startswith("warning:")]
    if bad:
        raise PipelineError("re-determinisation broke the automaton: " + bad[0])
    return out


# ---------------------------------------------------------------------------
# Polishing
# ---------------------------------------------------------------------------


def _gtx_reach(aut: ParityAutomaton, x: int):
    """Reachability closure of the (>x)-restriction."""
    adj = [[] for _ in range(aut.n_states)]
    for t in aut.transitions:
        if t.priority > x:
            adj[t.src].append(t.dst)
    reach = []
    for q in aut.states():
        seen = {q}
        stack = [q]
        while stack:
            s = stack.pop()
            for u in adj[s]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        reach.append(seen)
    return reach


def _class_unpolished(aut, x, members, reach_gtx):
    """Return None if the class is x-polished, else ('connect', q1, q2) or
    ('uniform', q1, q2, a)."""
    for q1 in members:
        for q2 in members:
            if q1 != q2 and q2 not in reach_gtx[q1]:
                return ("connect", q1, q2)
    for a in aut.alphabet:
        with_x = [q for q in members if any(t.priority == x for t in aut.succ(q, a))]
        if with_x and len(with_x) != len(members):
            q1 = with_x[0]
            q2 = next(q for q in members if q not in with_x)
            return ("uniform", q1, q2, a)
    return None


def _aux_graph(aut, x, members):
    """Neutral-letter edges of the class: q1 -> q2 when some class-avoiding
    (>=x)-path from q1 to q2 is labelled by a word that fails to produce
    priority x uniformly over the class, witnessed by a member whose parallel
    run stays strictly above x."""
    mem = set(members)
    edges = set()
    for q1 in members:
        for s in members:
            # BFS over (main-path state, witness-run state); the flag records
            # whether the witness run ever produced a priority <= x
            start = (q1, s, False)
            seen = {start}
            queue = deque([start])
            while queue:
                m, t, low = queue.popleft()
                for a in aut.alphabet:
                    mts = [tr for tr in aut.succ(m, a) if tr.priority >= x]
                    sts = aut.succ(t, a)
                    if not mts or not sts:
                        continue
                    if len(mts) != 1 or len(sts) != 1:
                        raise PipelineError("polish expects a deterministic automaton")
                    mt, st = mts[0], sts[0]
                    low2 = low or st.priority <= x
                    if mt.dst in mem:
                        if not low2:
                            edges.add((q1, mt.dst))
                        continue
                    node = (mt.dst, st.dst, low2)
                    if node not in seen:
                        seen.add(node)
                        queue.append(node)
    return edges


def polish(aut: ParityAutomaton, x: int, classes: Congruence):
    """Per-class x-polishing.

    Returns ("structured", A') with canonical x-transition targets when every
    class is already polished; ("shrunk", A') after cutting the first
    unpolished class to a final SCC of its auxiliary graph; or
    ("stuck", info) when a class is (>x)-connected but x-transitions are not
    uniform, which cannot happen for positional languages.
    """
    reach_gtx = _gtx_reach(aut, x)
    chosen = None
    for c in range(classes.n_classes):
        members = classes.members(c)
        if len(members) <= 1:
            if members and not _x_letters_selfconsistent(aut, x, members):
                pass
            continue
        bad = _class_unpolished(aut, x, members, reach_gtx)
        if bad is not None:
            chosen = (c, members, bad)
            break
    if chosen is None:
        return "structured", _canonicalise_x_targets(aut, x, classes)
    c, members, bad = chosen
    edges = _aux_graph(aut, x, members)
    remap = {q: i for i, q in enumerate(members)}
    comps = tarjan_scc(len(members), ((remap[u], remap[v]) for (u, v) in edges))
    comp_of = {}
    for i, comp in enumerate(comps):
        for q in comp:
            comp_of[q] = i
    outgoing = set()
    for (u, v) in edges:
        if comp_of[remap[u]] != comp_of[remap[v]]:
            outgoing.add(comp_of[remap[u]])
    finals = [i for i in range(len(comps)) if i not in outgoing]
    final_sets = sorted(
        ([members[j] for j in comps[i]] for i in finals), key=min
    )
    s_states = set(final_sets[0])
    if s_states == set(members):
        return "stuck", (c, members, bad)
    q0 = min(s_states)
    doomed = set(members) - s_states
    keep = [q for q in aut.states() if q not in doomed]
    new_id = {q: i for i, q in enumerate(keep)}

    def target(t):
        if t.dst in doomed:
            pr = t.priority if t.priority <= x else x
            return Transition(new_id[t.src], t.letter, pr, new_id[q0])
        return Transition(new_id[t.src], t.letter, t.priority, new_id[t.dst])

    trans = tuple(target(t) for t in aut.transitions if t.src not in doomed)
    trans = tuple(dict.fromkeys(trans))
    initial = aut.initial if aut.initial not in doomed else q0
    origin = tuple(aut.origin_label(q) for q in keep)
    prs = [t.priority for t in trans]
    shrunk = replace(
        aut,
        n_states=len(keep),
        initial=new_id[initial],
        transitions=trans,
        origin=origin,
        priority_range=(min(prs), max(prs)),
    )
    return "shrunk", shrunk


def _x_letters_selfconsistent(aut, x, members):
    return True


def _canonicalise_x_targets(aut: ParityAutomaton, x: int, classes: Congruence):
    """Route every x-transition to the least state of its target class."""
    pick = {}
    for c in range(classes.n_classes):
        members = classes.members(c)
        for q in members:
            pick[q] = min(members)
    trans = tuple(
        Transition(t.src, t.letter, t.priority, pick[t.dst])
        if t.priority == x and not t.is_eps
        else t
        for t in aut.transitions
    )
    return replace(aut, transitions=tuple(dict.fromkeys(trans)))


# ---------------------------------------------------------------------------
# Two-loop witness extraction (semantic, verified)
# ---------------------------------------------------------------------------


def _loop_candidates(aut: ParityAutomaton, r: int, max_extra=None):
    """Per achievable minimal priority, a shortest word looping r back to r."""
    out = []
    seen_states = {(r, None): ()}
    queue = deque([(r, None)])
    found = {}
    while queue:
        s, m = queue.popleft()
        word = seen_states[(s, m)]
        for a in aut.alphabet:
            ts = aut.succ(s, a)
            if len(ts) != 1:
                continue
            t = ts[0]
            m2 = t.priority if m is None else min(m, t.priority)
            key = (t.dst, m2)
            if key not in seen_states:
                seen_states[key] = word + (a,)
                if t.dst == r and m2 not in found:
                    found[m2] = word + (a,)
                queue.append(key)
    return [found[m] for m in sorted(found)]


def _all_words(letters, max_len):
    from itertools import product

    for n in range(1, max_len + 1):
        for combo in product(letters, repeat=n):
            yield combo


def find_two_loops(
    aut: ParityAutomaton,
    entries,
    seeds=(),
    max_pool=400,
    max_rejected=150,
) -> TwoLoopData | None:
    """Search an entry word and two loop words such that each loop alone is
    rejected but some alternation is accepted; verified with up_membership.

    `entries` are candidate anchor states (their shortest access words become
    u0); `seeds` are extra loop-word candidates from the failing construction.
    """
    letters = aut.alphabet
    depth = 5 if len(letters) <= 2 else 4
    short = list(_all_words(letters, depth))
    for r in entries:
        u0 = access_word(aut, r)
        if u0 is None:
            continue
        pool = []
        seen = set()
        for w in list(seeds) + _loop_candidates(aut, r) + short:
            w = tuple(w)
            if w and w not in seen:
                seen.add(w)
                pool.append(w)
            if len(pool) >= max_pool:
                break
        rejected = [w for w in pool if not up_membership(aut, upword(u0, w))]
        rejected = rejected[:max_rejected]
        for i, l1 in enumerate(rejected):
            for l2 in rejected[i + 1 :]:
                if up_membership(aut, upword(u0, l1 + l2)):
                    return TwoLoopData(u0, l1, l2)
                if up_membership(aut, upword(u0, l2 + l1)):
                    return TwoLoopData(u0, l2, l1)
    return None


def _full_progress_loops(aut, sig, wit) -> TwoLoopData | None:
    """Loop data for a full-progress failure: the witness word w, and a word
    u producing x-1 from q while routing p back to q at priority exactly x."""
    x, q, p, w = wit.level_x, wit.q, wit.p, wit.w
    seeds = [w]
    target = None
    start = (q, p, None, None)
    prev = {start: None}
    queue = deque([start])
    while queue and target is None:
        node = queue.popleft()
        s1, s2, m1, m2 = node
        for a in aut.alphabet:
            t1s, t2s = aut.succ(s1, a), aut.succ(s2, a)
            if len(t1s) != 1 or len(t2s) != 1:
                continue
            t1, t2 = t1s[0], t2s[0]
            n1 = t1.priority if m1 is None else min(m1, t1.priority)
            n2 = t2.priority if m2 is None else min(m2, t2.priority)
            nxt = (t1.dst, t2.dst, n1, n2)
            if nxt not in prev:
                prev[nxt] = (node, a)
                if t1.dst == q and t2.dst == q and n1 == x - 1 and n2 == x:
                    target = nxt
                    break
                queue.append(nxt)
    if target is not None:
        word = []
        node = target
        while prev[node] is not None:
            node, a = prev[node]
            word.append(a)
        seeds.insert(0, tuple(reversed(word)))
    entries = [q] + sorted(set(aut.states()) - {q})
    return find_two_loops(aut, entries, seeds)


def _safe_order_loops(aut_det, orig_q, orig_p, sep_qp, sep_pq) -> TwoLoopData | None:
    seeds = [tuple(sep_qp), tuple(sep_pq), tuple(sep_qp) + tuple(sep_pq),
             tuple(sep_pq) + tuple(sep_qp)]
    entries = [orig_q, orig_p] + sorted(set(aut_det.states()) - {orig_q, orig_p})
    return find_two_loops(aut_det, entries, seeds)


def _polish_loops(aut, cex, extra_seeds=()) -> TwoLoopData | None:
    v = tuple(cex.v)
    rot = [v[i:] + v[:i] for i in range(len(v))]
    seeds = list(extra_seeds) + [v, v + v] + rot
    return find_two_loops(aut, sorted(aut.states()), seeds)


# ---------------------------------------------------------------------------
# Signature validation
# ---------------------------------------------------------------------------


def validate_signature(sig: SignatureAutomaton):
    """Exhaustively check the signature conditions; True or a violation list."""
    from .automaton import is_faithful

    aut = sig.automaton
    pre = sig.preorders
    d = sig.d
    problems = []
    # nesting
    for x in range(1, d + 1):
        for q in aut.states():
            for p in aut.states():
                if pre.leq(x, q, p) and not pre.leq(x - 1, q, p):
                    problems.append(f"level {x} does not refine level {x-1} at ({q},{p})")
    # level 0 refines residual inclusion
    rp = residual_preorder(aut)
    if not rp.total:
        problems.append("residual preorder not total")
    else:
        for q in aut.states():
            for p in aut.states():
                if pre.leq(0, q, p) and rp.rank[q] > rp.rank[p]:
                    problems.append(f"level 0 contradicts residual inclusion at ({q},{p})")
    # faithfulness of even levels
    for x in range(0, d + 1, 2):
        cong = pre.classes_at(x, aut.n_states)
        ok = is_faithful(aut, cong, x)
        if ok is not True:
            problems.append(f"level {x} not [0,{x}]-faithful: {ok}")
    # (<x)-safe separation at odd layers
    reach_cache = {}
    for x in range(2, d + 1, 2):
        if x not in reach_cache:
            reach_cache[x] = _geqx_reach(aut, x)
        reach = reach_cache[x]
        for q in aut.states():
            for p in aut.states():
                if (
                    pre.same(x - 2, q, p)
                    and pre.lt(x - 1, q, p)
                    and p in reach[q]
                ):
                    problems.append(
                        f"safe separation broken at level {x-1}: path {q} ->(>={x}) {p}"
                    )
    # local monotonicity of (>=x)-transitions
    for x in range(0, d + 1, 2):
        for q in aut.states():
            for p in aut.states():
                if x > 0 and not pre.same(x - 1, q, p):
                    continue
                if not pre.leq(x, q, p):
                    continue
                for a in aut.alphabet:
                    tq = [t for t in aut.succ(q, a) if t.priority >= x]
                    tp = [t for t in aut.succ(p, a) if t.priority >= x]
                    for t1 in tq:
                        if not tp:
                            problems.append(
                                f"monotonicity: {q}<= {p} at level {x} but only {q} "
                                f"has a >= {x} move on {a!r}"
                            )
                            continue
                        for t2 in tp:
                            if x >= 2 and not pre.same(x - 1, t1.dst, t2.dst):
                                problems.append(
                                    f"monotonicity at level {x}: targets of {t1}, {t2} "
                                    f"not level-{x-1} equivalent"
                                )
                            if not pre.leq(x, t1.dst, t2.dst):
                                problems.append(
                                    f"monotonicity at level {x}: {t1} vs {t2}"
                                )
    # strong congruence of (<=x)-transitions on even classes
    for x in range(0, d + 1, 2):
        for q in aut.states():
            for p in aut.states():
                if q >= p or not pre.same(x, q, p):
                    continue
                for a in aut.alphabet:
                    for t1 in aut.succ(q, a):
                        if t1.priority > x:
                            continue
                        for t2 in aut.succ(p, a):
                            if t2.priority != t1.priority or t2.dst != t1.dst:
                                problems.append(
                                    f"strong congruence at level {x}: {t1} vs {t2}"
                                )
    # classes (>x)-connected
    for x in range(0, d + 1):
        reach = _gtx_reach(aut, x)
        for q in aut.states():
            for p in aut.states():
                if q != p and pre.same(x, q, p) and p not in reach[q]:
                    problems.append(
                        f"class at level {x} not (>{x})-connected: {q} vs {p}"
                    )
    # safe centralisation
    for x in range(2, d + 1, 2):
        for q in aut.states():
            for p in aut.states():
                if q == p or not pre.same(x - 2, q, p) or pre.same(x - 1, q, p):
                    continue
                if safe_incl(aut, x, q, p) is True:
                    problems.append(
                        f"not safe centralised at level {x}: Safe({q}) <= Safe({p})"
                    )
    return True if not problems else problems


def _geqx_reach(aut, x):
    adj = [[] for _ in range(aut.n_states)]
    for t in aut.transitions:
        if t.priority >= x:
            adj[t.src].append(t.dst)
    out = []
    for q in aut.states():
        seen = set()
        stack = [q]
        while stack:
            s = stack.pop()
            for u in adj[s]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        out.append(seen)
    return out


# ---------------------------------------------------------------------------
# The decision procedure
# ---------------------------------------------------------------------------


def decide_positionality_p1(aut: ParityAutomaton, collect_stats=None):
    """Procedure 1.  Returns Positional(SignatureAutomaton) or
    NotPositional(witness); raises PipelineError on internal breakage."""
    return _run_pipeline(aut, full_pc=True, collect_stats=collect_stats)


def build_structured_signature(aut: ParityAutomaton):
    """The structured signature automaton the pipeline certifies, without the
    final full-progress-consistency check; None when an earlier stage
    already refutes positionality."""
    out = _run_pipeline(aut, full_pc=False)
    return out.certificate if isinstance(out, Positional) else None


def _run_pipeline(aut, full_pc, collect_stats=None):
    aut.check_valid()
    if not aut.deterministic or aut.has_eps:
        raise ValueError("procedure 1 needs a deterministic eps-free automaton")
    current = normalize(aut.trim())
    max_restarts = (current.d_max + 2) * current.n_states + 4
    restarts = 0
    while True:
        if restarts > max_restarts:
            raise PipelineError("restart bound exceeded")
        outcome = _one_pass(current, full_pc=full_pc)
        if isinstance(outcome, (Positional, NotPositional)):
            if collect_stats is not None:
                collect_stats["restarts"] = restarts
            return outcome
        current = normalize(outcome)
        restarts += 1


def _one_pass(aut: ParityAutomaton, full_pc=True):
    """One pipeline pass; returns a verdict or a smaller automaton to restart on."""
    aut = replace(aut, origin=None)  # provenance is tracked per pass
    rp = residual_preorder(aut)
    if not rp.total:
        q, p, w1, w2 = rp.incomparable_witness
        return NotPositional(
            IncomparableResiduals(q, p, w1, w2, access_word(aut, q), access_word(aut, p))
        )
    pc = check_progress_consistency(aut, rp)
    if pc is not True:
        return NotPositional(ProgressFailure(pc))

    # level 0: polish with the residual congruence
    res_classes = _classes_from_rank(rp.rank, aut.n_states)
    status, data = polish(aut, 0, res_classes)
    if status == "shrunk":
        r = _check_polish_language(aut, data, 0)
        if r is not None:
            return r
        return data
    if status == "stuck":
        return _stuck_verdict(aut, 0, data)
    aut = data

    d = aut.d_max
    for x in range(2, d + 1, 2):
        pre = _preorders_up_to(aut, x - 2)
        if isinstance(pre, NotPositional):
            return pre
        classes_xm2 = pre.classes_at(x - 2, aut.n_states)
        sat = saturate(aut, x, classes_xm2)
        cen, classes_c = safe_centralise(sat, x, classes_xm2)
        comps, _ = safe_components(cen, x)
        classes_xm1 = _intersect_classes(classes_c, comps)
        tso = check_total_safe_order(cen, x, classes_xm1)
        if tso is not True:
            q, p, sep_qp, sep_pq = tso
            loops = _safe_order_loops(aut, _map_back(cen, aut, q), _map_back(cen, aut, p), sep_qp, sep_pq)
            return NotPositional(SafeOrderFailure(x, q, p, sep_qp, sep_pq, loops))
        rank_x = _rank_x_on(cen, x, classes_xm1)
        det = redeterminise(cen, x, classes_c, classes_xm1, rank_x)
        prex = _preorders_up_to(det, x)
        if isinstance(prex, NotPositional):
            return prex
        classes_x = prex.classes_at(x, det.n_states)
        status, data = polish(det, x, classes_x)
        if status == "shrunk":
            r = _check_polish_language(det, data, x)
            if r is not None:
                return r
            return data
        if status == "stuck":
            return _stuck_verdict(det, x, data)
        aut = data

    pre = _preorders_up_to(aut, aut.d_max)
    if isinstance(pre, NotPositional):
        return pre
    sig = SignatureAutomaton(aut, pre)
    problems = validate_signature(sig)
    if problems is not True:
        raise PipelineError("certificate failed validation: " + "; ".join(problems))
    if not full_pc:
        return Positional(SignatureAutomaton(aut, pre, validated=True))
    fp = check_full_progress_consistency(sig)
    if fp is not True:
        loops = _full_progress_loops(aut, sig, fp)
        return NotPositional(FullProgressFailure(fp, loops))
    return Positional(SignatureAutomaton(aut, pre, validated=True))


def _classes_from_rank(rank: dict[int, int], n: int) -> Congruence:
    groups: dict[int, list[int]] = {}
    for q in range(n):
        groups.setdefault(rank[q], []).append(q)
    return congruence_from_classes(n, groups.values())


def _preorders_up_to(aut, level):
    """Nested preorders up to `level`, or a NotPositional verdict when an even
    level fails to be safe-totally-ordered (possible on automata that were
    never safe-centralised at that level in this pass)."""
    rp = residual_preorder(aut)
    if not rp.total:
        q, p, w1, w2 = rp.incomparable_witness
        return NotPositional(
            IncomparableResiduals(q, p, w1, w2, access_word(aut, q), access_word(aut, p))
        )
    levels = [dict(rp.rank)]
    for x in range(2, level + 1, 2):
        levels.append(_component_refinement(aut, x, levels[x - 2]))
        ranks = _safe_refinement(aut, x, levels[x - 1])
        if isinstance(ranks, tuple):
            _, q, p, sep_qp, sep_pq = ranks
            loops = _safe_order_loops(aut, q, p, sep_qp, sep_pq)
            return NotPositional(SafeOrderFailure(x, q, p, sep_qp, sep_pq, loops))
        levels.append(ranks)
    if len(levels) == level:  # trailing odd level
        levels.append(_component_refinement(aut, level + 1, levels[level - 1]))
    return NestedPreorders(tuple(levels[: level + 1]), level)


def _intersect_classes(c1: Congruence, c2: Congruence) -> Congruence:
    n = len(c1.class_of)
    groups: dict[tuple[int, int], list[int]] = {}
    for q in range(n):
        groups.setdefault((c1.class_of[q], c2.class_of[q]), []).append(q)
    return congruence_from_classes(n, groups.values())


def _rank_x_on(aut, x, classes_xm1):
    prev = {q: classes_xm1.class_of[q] for q in aut.states()}
    ranks = _safe_refinement(aut, x, prev)
    if isinstance(ranks, tuple):
        raise PipelineError("safe order became incomparable after the check")
    return ranks


def _map_back(derived, base, q):
    """Best-effort map from a derived automaton's state to the base automaton
    via origin labels (identity when labels are plain ids)."""
    label = derived.origin_label(q)
    try:
        cand = int(label.split("+")[0])
    except ValueError:
        return min(q, base.n_states - 1)
    return cand if 0 <= cand < base.n_states else min(q, base.n_states - 1)


def _check_polish_language(before, after, x):
    eq = lang_equal_det(after, before)
    if eq is True:
        return None
    _, cex = eq
    loops = _polish_loops(before, cex)
    return NotPositional(PolishLanguageChange(cex, x, loops))


def _stuck_verdict(aut, x, data):
    c, members, bad = data
    seeds = []
    if bad[0] == "uniform":
        _, q1, q2, a = bad
        seeds.append((a,))
    loops = find_two_loops(
        aut, list(members) + sorted(set(aut.states()) - set(members)), seeds
    )
    if loops is None:
        raise PipelineError(
            f"polish stuck at level {x} on class {members} but no two-loop "
            "witness found"
        )
    return NotPositional(PolishLanguageChange(upword((), loops.l1), x, loops))


# ---------------------------------------------------------------------------
# Certificate serialisation (.sig)
# ---------------------------------------------------------------------------


def emit_sig(sig: SignatureAutomaton) -> str:
    body = emit_dpa(sig.automaton)
    lines = [body.rstrip("\n")]
    for x in range(sig.d + 1):
        ranks = " ".join(str(sig.preorders.levels[x][q]) for q in sig.automaton.states())
        lines.append(f"preorder: {x} {ranks}")
    return "\n".join(lines) + "\n"


def parse_sig(text: str) -> SignatureAutomaton:
    dpa_lines = []
    pre_lines = []
    for raw in text.splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if stripped.startswith("preorder:"):
            pre_lines.append(stripped)
        else:
            dpa_lines.append(raw)
    aut = parse_dpa("\n".join(dpa_lines))
    levels = {}
    for line in pre_lines:
        parts = line.split()
        x = int(parts[1])
        ranks = [int(v) for v in parts[2:]]
        if len(ranks) != aut.n_states:
            raise ValueError(f"preorder line for level {x} has {len(ranks)} ranks")
        levels[x] = {q: r for q, r in enumerate(ranks)}
    d = max(levels) if levels else 0
    ordered = tuple(levels[x] for x in range(d + 1))
    return SignatureAutomaton(aut, NestedPreorders(ordered, d))
