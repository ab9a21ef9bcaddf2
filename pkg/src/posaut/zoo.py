"""A small zoo of hand-built parity automata used by tests and the docs.

Each constructor documents the recognised language.  All automata are
complete and deterministic unless noted.
"""

from __future__ import annotations

from .automaton import ParityAutomaton, build


def aut_accept_all(alphabet=("a", "b")) -> ParityAutomaton:
    """Sigma^omega: one state, every letter priority 0."""
    return build(1, alphabet, 0, [(0, a, 0, 0) for a in alphabet])


def aut_reject_all(alphabet=("a", "b")) -> ParityAutomaton:
    """The empty language: one state, every letter priority 1."""
    return build(1, alphabet, 0, [(0, a, 1, 0) for a in alphabet])


def aut_inf_a_or_fin_bb() -> ParityAutomaton:
    """Words over {a,b,c} with infinitely many a, or no a at all and only
    finitely many bb factors.  Three states, priorities [0,2].

    q1 handles words after the first a (only 'infinitely many a' can hold);
    q3/q2 track bb factors while no a has occurred (q2 = just saw b).
    """
    q1, q2, q3 = 0, 1, 2
    return build(
        3,
        ("a", "b", "c"),
        q3,
        [
            (q1, "a", 0, q1),
            (q1, "b", 1, q1),
            (q1, "c", 1, q1),
            (q2, "a", 0, q1),
            (q2, "b", 1, q3),
            (q2, "c", 2, q3),
            (q3, "a", 0, q1),
            (q3, "b", 2, q2),
            (q3, "c", 2, q3),
        ],
    )


def aut_buchi_a_or_reach_aa() -> ParityAutomaton:
    """InfOften(a) union Reach(aa) over {a,b}; Buchi on top of its three
    residuals [eps] < [a] < [aa]."""
    e, a1, top = 0, 1, 2
    return build(
        3,
        ("a", "b"),
        e,
        [
            (e, "a", 0, a1),
            (e, "b", 1, e),
            (a1, "a", 0, top),
            (a1, "b", 1, e),
            (top, "a", 0, top),
            (top, "b", 0, top),
        ],
    )


def aut_reach_aa() -> ParityAutomaton:
    """Words over {a,b} containing the factor aa (not positional)."""
    s0, s1, s2 = 0, 1, 2
    return build(
        3,
        ("a", "b"),
        s0,
        [
            (s0, "a", 1, s1),
            (s0, "b", 1, s0),
            (s1, "a", 1, s2),
            (s1, "b", 1, s0),
            (s2, "a", 0, s2),
            (s2, "b", 0, s2),
        ],
    )


def aut_reach_two_a() -> ParityAutomaton:
    """Words over {a,b} with at least two occurrences of a (bipositional)."""
    c0, c1, c2 = 0, 1, 2
    return build(
        3,
        ("a", "b"),
        c0,
        [
            (c0, "a", 1, c1),
            (c0, "b", 1, c0),
            (c1, "a", 1, c2),
            (c1, "b", 1, c1),
            (c2, "a", 0, c2),
            (c2, "b", 0, c2),
        ],
    )


def aut_fin_ac_or_fin_bb() -> ParityAutomaton:
    """FinOften(ac) or FinOften(bb) over {a,b,c}; coBuchi with two safe
    components {q1,q2} and {p1,p2}, priority-1 jumps targeting the maximal
    state of the other component.

    q1 = just saw a (an ac may complete), q2 = fresh in the ac-tracker;
    p1 = just saw b, p2 = fresh in the bb-tracker.
    """
    q1, q2, p1, p2 = 0, 1, 2, 3
    return build(
        4,
        ("a", "b", "c"),
        q2,
        [
            (q1, "a", 2, q1),
            (q1, "b", 2, q2),
            (q1, "c", 1, p2),
            (q2, "a", 2, q1),
            (q2, "b", 2, q2),
            (q2, "c", 2, q2),
            (p1, "a", 2, p2),
            (p1, "b", 1, q2),
            (p1, "c", 2, p2),
            (p2, "a", 2, p2),
            (p2, "b", 2, p1),
            (p2, "c", 2, p2),
        ],
    )


def aut_fin_nested_c_factors() -> ParityAutomaton:
    """Words over {a,b,c} with only finitely many positions starting a factor
    of the shape c (a* c b*)+ c, i.e. some tail is factor-free.  This is
    prefix-independent.  CoBuchi with a single safe component; states are
    totally ordered by safe-language inclusion.

    States track the chain of factor-free-so-far suffix subsets (largest
    lineage first); priority 1 fires when the oldest lineage dies.
    """
    t0, t1, t2, t3 = 0, 1, 2, 3
    return build(
        4,
        ("a", "b", "c"),
        t0,
        [
            (t0, "a", 2, t0),
            (t0, "b", 2, t0),
            (t0, "c", 2, t1),
            (t1, "a", 2, t1),
            (t1, "b", 2, t0),
            (t1, "c", 2, t2),
            (t2, "a", 2, t1),
            (t2, "b", 2, t3),
            (t2, "c", 1, t2),
            (t3, "a", 2, t1),
            (t3, "b", 2, t3),
            (t3, "c", 1, t1),
        ],
    )


def aut_tail_const_or_two_c() -> ParityAutomaton:
    """Sigma* a^omega  u  Sigma* b^omega  u  c Sigma* c Sigma^omega over
    {a,b,c}; all safe components are trivial.  Eight states."""
    e0, va, vb, v0, c1, wa, wb, top = range(8)
    return build(
        8,
        ("a", "b", "c"),
        e0,
        [
            (e0, "a", 1, va),
            (e0, "b", 1, vb),
            (e0, "c", 1, c1),
            (va, "a", 2, va),
            (va, "b", 1, vb),
            (va, "c", 1, v0),
            (vb, "a", 1, va),
            (vb, "b", 2, vb),
            (vb, "c", 1, v0),
            (v0, "a", 1, va),
            (v0, "b", 1, vb),
            (v0, "c", 1, v0),
            (c1, "a", 1, wa),
            (c1, "b", 1, wb),
            (c1, "c", 1, top),
            (wa, "a", 2, wa),
            (wa, "b", 1, wb),
            (wa, "c", 1, top),
            (wb, "a", 1, wa),
            (wb, "b", 2, wb),
            (wb, "c", 1, top),
            (top, "a", 2, top),
            (top, "b", 2, top),
            (top, "c", 2, top),
        ],
    )


def aut_first_letter_inf() -> ParityAutomaton:
    """'The first letter occurs infinitely often' over {a,b}: a Buchi
    automaton with incomparable residuals at q_a and q_b."""
    s0, sa, sb = 0, 1, 2
    return build(
        3,
        ("a", "b"),
        s0,
        [
            (s0, "a", 1, sa),
            (s0, "b", 1, sb),
            (sa, "a", 0, sa),
            (sa, "b", 1, sa),
            (sb, "a", 1, sb),
            (sb, "b", 0, sb),
        ],
    )


def aut_min_letter_even(d: int = 4) -> ParityAutomaton:
    """Words over the letters {0..d} whose minimal occurring letter is even
    (bipositional).  State i remembers the minimum seen so far; the initial
    state is the top one."""
    letters = tuple(str(i) for i in range(d + 1))
    trans = []
    for i in range(d + 1):
        for x in range(d + 1):
            j = min(i, x)
            trans.append((i, str(x), j, j))
    return build(d + 1, letters, d, trans)


def aut_parity_letters(d: int = 2) -> ParityAutomaton:
    """The pure parity objective over letters {0..d}: one state, letter x
    produces priority x."""
    letters = tuple(str(i) for i in range(d + 1))
    return build(1, letters, 0, [(0, str(x), x, 0) for x in range(d + 1)])


#: names exposed to the CLI for convenience fixture generation in docs/tests
ZOO = {
    "accept_all": aut_accept_all,
    "reject_all": aut_reject_all,
    "inf_a_or_fin_bb": aut_inf_a_or_fin_bb,
    "buchi_a_or_reach_aa": aut_buchi_a_or_reach_aa,
    "reach_aa": aut_reach_aa,
    "reach_two_a": aut_reach_two_a,
    "fin_ac_or_fin_bb": aut_fin_ac_or_fin_bb,
    "fin_nested_c_factors": aut_fin_nested_c_factors,
    "tail_const_or_two_c": aut_tail_const_or_two_c,
    "first_letter_inf": aut_first_letter_inf,
    "min_letter_even": aut_min_letter_even,
    "parity_letters": aut_parity_letters,
}
