"""Procedure 2: decide positionality by greedily adding eps-transitions.

For every ordered state pair and even priority x, at least one of
q -eps:x-> q' or q' -eps:x+1-> q is addable without growing the language
when the language is positional; a pair where both additions leak words is a
counterexample.  The resulting relations, closed under transitivity and the
priority preference order 1 < 3 < ... < d+1 < d < ... < 2 < 0, form an
eps-complete automaton.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .automaton import EPS, ParityAutomaton, Transition, UPWord
from .lang import incl_nd_in_det
from .witnesses import CompletionFailure, NotPositional, Positional


def preference_rank(y: int, d: int) -> int:
    """Rank in the order 1 < 3 < ... < d+1 < d < ... < 2 < 0 (higher is better)."""
    if y % 2 == 1:
        return (y - 1) // 2
    return (d // 2 + 1) + (d - y) // 2


@dataclass(frozen=True)
class EpsCompleteAutomaton:
    """An automaton with eps-transitions whose odd eps-relations are nested
    total preorders and whose even eps-relations are their strict variants."""

    automaton: ParityAutomaton
    d: int  # even; priorities range in [0, d+1]

    def eps_relation(self, y: int) -> set[tuple[int, int]]:
        return {
            (t.src, t.dst)
            for t in self.automaton.transitions
            if t.is_eps and t.priority == y
        }

    def geq_x(self, x: int) -> set[tuple[int, int]]:
        """q >=_x q'  iff  q -eps:x+1-> q' (x even)."""
        return self.eps_relation(x + 1)


def even_bound(aut: ParityAutomaton) -> int:
    """The even d such that the completion uses priorities in [0, d+1]."""
    d = max(aut.d_max, 0)
    return d if d % 2 == 0 else max(d - 1, 0)


def validate_eps_complete(aut: ParityAutomaton, d: int):
    """Check the eps-complete conditions; True or a list of violations."""
    problems = []
    rel = {
        y: {(t.src, t.dst) for t in aut.transitions if t.is_eps and t.priority == y}
        for y in range(0, d + 2)
    }
    states = list(aut.states())
    for y in range(1, d + 2, 2):
        r = rel[y]
        for q in states:
            if (q, q) not in r:
                problems.append(f"eps:{y} not reflexive at {q}")
        for q in states:
            for p in states:
                if (q, p) not in r and (p, q) not in r:
                    problems.append(f"eps:{y} not total on ({q},{p})")
                for s in states:
                    if (q, p) in r and (p, s) in r and (q, s) not in r:
                        problems.append(f"eps:{y} not transitive via ({q},{p},{s})")
        if y >= 3:
            for pair in r:
                if pair not in rel[y - 2]:
                    problems.append(f"eps:{y} does not refine eps:{y-2} at {pair}")
    for x in range(0, d + 1, 2):
        for q in states:
            for p in states:
                strict = (q, p) in rel[x]
                rev = (p, q) in rel[x + 1]
                if strict == rev:
                    problems.append(
                        f"eps:{x} is not the strict variant of eps:{x+1} at ({q},{p})"
                    )
    return True if not problems else problems


def priority_close(aut: ParityAutomaton, d: int) -> ParityAutomaton:
    """Close under the preference order and eps-letter-eps composition.

    Adds q -a:y'-> q' for every y' below y in the preference order, and the
    composite p -a:min(y1,y2,y3)-> p' for every eps - letter - eps sandwich.
    The composite takes the numeric minimum: a run through it and the run
    through the three simulated steps have the same minimal priority, so the
    language is untouched.  Idempotent.
    """
    trans = set((t.src, t.letter, t.priority, t.dst) for t in aut.transitions)
    changed = True
    while changed:
        changed = False
        new = set()
        for (s, a, y, t) in trans:
            for y2 in range(0, d + 2):
                if preference_rank(y2, d) < preference_rank(y, d):
                    key = (s, a, y2, t)
                    if key not in trans:
                        new.add(key)
        eps_out: dict[int, list[tuple[int, int]]] = {}
        eps_in: dict[int, list[tuple[int, int]]] = {}
        for (s, a, y, t) in trans:
            if a == EPS:
                eps_out.setdefault(s, []).append((y, t))
                eps_in.setdefault(t, []).append((y, s))
        for (s, a, y, t) in trans:
            for (y1, p) in eps_in.get(s, ()):
                for (y3, pp) in eps_out.get(t, ()):
                    key = (p, a, min(y1, y, y3), pp)
                    if key not in trans:
                        new.add(key)
        if new:
            trans |= new
            changed = True
    ordered = list(aut.transitions)
    seen = set((t.src, t.letter, t.priority, t.dst) for t in aut.transitions)
    for key in sorted(trans - seen):
        ordered.append(Transition(*key))
    prs = [t.priority for t in ordered]
    return replace(
        aut,
        transitions=tuple(ordered),
        priority_range=(min(prs), max(prs)),
        deterministic=False,
    )


def merge_top_equivalent(aut: ParityAutomaton, d: int) -> ParityAutomaton:
    """Merge states equivalent for the top eps-relation (lowest id survives).

    After priority closure such states have identical transitions, so the
    merge never alters the language."""
    top = {
        (t.src, t.dst)
        for t in aut.transitions
        if t.is_eps and t.priority == d + 1
    }
    leader = {}
    for q in aut.states():
        for p in aut.states():
            if p >= q:
                break
            if (q, p) in top and (p, q) in top:
                leader[q] = min(leader.get(q, q), p)
    rep = {q: leader.get(q, q) for q in aut.states()}
    keep = sorted({rep[q] for q in aut.states()})
    if len(keep) == aut.n_states:
        return aut
    remap = {q: i for i, q in enumerate(keep)}
    trans = []
    seen = set()
    for t in aut.transitions:
        key = (remap[rep[t.src]], t.letter, t.priority, remap[rep[t.dst]])
        if key not in seen:
            seen.add(key)
            trans.append(Transition(*key))
    origin = tuple(
        "+".join(
            aut.origin_label(q) for q in aut.states() if rep[q] == old
        )
        for old in keep
    )
    return replace(
        aut,
        n_states=len(keep),
        initial=remap[rep[aut.initial]],
        transitions=tuple(trans),
        origin=origin,
        deterministic=False,
    )


def decide_positionality_p2(aut: ParityAutomaton, w_det: ParityAutomaton | None = None):
    """Procedure 2.  `w_det` is an equivalent deterministic automaton (the
    input itself when it is deterministic).  Returns
    Positional(EpsCompleteAutomaton) or NotPositional(CompletionFailure)."""
    if w_det is None:
        if not aut.deterministic or aut.has_eps:
            raise ValueError(
                "nondeterministic input needs an equivalent deterministic automaton"
            )
        w_det = aut
    else:
        chk = incl_nd_in_det(aut, w_det)
        if chk is not True:
            raise ValueError(f"L(A) != L(W_det): extra word {chk}")
    d = even_bound(aut)
    current = replace(aut, priority_range=(0, d + 1), deterministic=False)

    def has(s, y, t):
        return any(
            tr.is_eps and tr.priority == y and tr.dst == t for tr in current.by_src[s]
        )

    for x in range(0, d + 1, 2):
        for q in sorted(current.states()):
            for p in sorted(current.states()):
                if has(q, x, p) or has(p, x + 1, q):
                    continue
                with_even = replace(
                    current,
                    transitions=current.transitions + (Transition(q, EPS, x, p),),
                )
                r1 = incl_nd_in_det(with_even, w_det)
                if r1 is True:
                    current = with_even
                    continue
                with_odd = replace(
                    current,
                    transitions=current.transitions + (Transition(p, EPS, x + 1, q),),
                )
                r2 = incl_nd_in_det(with_odd, w_det)
                if r2 is True:
                    current = with_odd
                    continue
                return NotPositional(CompletionFailure(q, p, x, r1, r2, current))
    current = _close_relations(current, d)
    current = priority_close(current, d)
    current = merge_top_equivalent(current, d)
    current = priority_close(current, d)
    current = _prune_even_eps(current, d)
    check = validate_eps_complete(current, d)
    if check is not True:
        raise AssertionError("completion failed validation: " + "; ".join(check))
    return Positional(EpsCompleteAutomaton(current, d))


def _prune_even_eps(aut: ParityAutomaton, d: int) -> ParityAutomaton:
    """Keep an even eps-edge only when its reversed odd companion is absent.

    Dropping added eps-transitions never grows the language and the greedy
    phase guarantees the kept edges make each even relation exactly the
    strict variant of the odd one above it."""
    odd = {
        y: {(t.src, t.dst) for t in aut.transitions if t.is_eps and t.priority == y}
        for y in range(1, d + 2, 2)
    }
    trans = tuple(
        t
        for t in aut.transitions
        if not (
            t.is_eps
            and t.priority % 2 == 0
            and (t.dst, t.src) in odd.get(t.priority + 1, set())
        )
    )
    return replace(aut, transitions=trans)


def _close_relations(aut: ParityAutomaton, d: int) -> ParityAutomaton:
    """Transitive closure of each eps-relation, then downward closure along
    the preference order (restricted to eps-transitions)."""
    rel = {y: set() for y in range(0, d + 2)}
    for t in aut.transitions:
        if t.is_eps:
            rel[t.priority].add((t.src, t.dst))
    for y in rel:
        changed = True
        while changed:
            changed = False
            for (q, p) in list(rel[y]):
                for (p2, s) in list(rel[y]):
                    if p2 == p and (q, s) not in rel[y]:
                        rel[y].add((q, s))
                        changed = True
    for y in sorted(range(0, d + 2), key=lambda v: -preference_rank(v, d)):
        for y2 in range(0, d + 2):
            if preference_rank(y2, d) < preference_rank(y, d):
                rel[y2] |= rel[y]
    trans = list(aut.transitions)
    seen = set((t.src, t.letter, t.priority, t.dst) for t in trans)
    for y in range(0, d + 2):
        for (q, p) in sorted(rel[y]):
            key = (q, EPS, y, p)
            if key not in seen:
                seen.add(key)
                trans.append(Transition(*key))
    prs = [t.priority for t in trans]
    return replace(
        aut, transitions=tuple(trans), priority_range=(min(prs), max(prs))
    )


def eps_complete_from_signature(sig) -> EpsCompleteAutomaton:
    """Direct construction from a validated fully progress consistent
    signature automaton: q -eps:x+1-> q' whenever q' <=_x q and
    q -eps:x-> q' whenever q' <_x q, for every even x."""
    aut = sig.automaton
    d = sig.d if sig.d % 2 == 0 else max(sig.d - 1, 0)
    trans = list(aut.transitions)
    for x in range(0, d + 1, 2):
        rank = sig.preorders.levels[x]
        for q in aut.states():
            for p in aut.states():
                if rank[p] <= rank[q]:
                    trans.append(Transition(q, EPS, x + 1, p))
                if rank[p] < rank[q]:
                    trans.append(Transition(q, EPS, x, p))
    prs = [t.priority for t in trans]
    out = replace(
        aut,
        transitions=tuple(trans),
        priority_range=(min(prs), max(prs)),
        deterministic=False,
    )
    check = validate_eps_complete(out, d)
    if check is not True:
        raise AssertionError(
            "signature completion not eps-complete: " + "; ".join(check)
        )
    leak = incl_nd_in_det(out, aut)
    if leak is not True:
        raise AssertionError(f"signature completion grew the language: {leak}")
    return EpsCompleteAutomaton(out, d)
