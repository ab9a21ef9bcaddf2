import random

import pytest

from posaut.automaton import build, up_membership, upword
from posaut.lang import (
    complement_det,
    incl_det,
    incl_nd_in_det,
    residual_automaton,
    residual_preorder,
    safe_incl,
)
from posaut.zoo import (
    aut_accept_all,
    aut_buchi_a_or_reach_aa,
    aut_fin_ac_or_fin_bb,
    aut_first_letter_inf,
    aut_inf_a_or_fin_bb,
    aut_reject_all,
)

from conftest import FIXTURES, random_upword


def test_complement_accept_all():
    comp = complement_det(aut_accept_all())
    assert all(t.priority == 1 for t in comp.transitions)
    assert not up_membership(comp, upword((), ("a",)))


def test_complement_buchi_example():
    comp = complement_det(aut_buchi_a_or_reach_aa())
    assert up_membership(comp, upword((), ("b",)))


def test_double_complement(rng):
    for name, (mk, _) in FIXTURES.items():
        aut = mk()
        cc = complement_det(complement_det(aut))
        for _ in range(100):
            u, v = random_upword(rng, aut.alphabet)
            assert up_membership(aut, upword(u, v)) == up_membership(cc, upword(u, v))


def test_incl_reflexive_and_transitive():
    for name in ("inf_a_or_fin_bb", "buchi_a_or_reach_aa", "tail_const_or_two_c"):
        aut = FIXTURES[name][0]()
        rel = {}
        for q in aut.states():
            for p in aut.states():
                rel[(q, p)] = incl_det(aut, q, aut, p) is True
        for q in aut.states():
            assert rel[(q, q)]
            for p in aut.states():
                for s in aut.states():
                    if rel[(q, p)] and rel[(p, s)]:
                        assert rel[(q, s)], (name, q, p, s)


def test_incl_three_priorities():
    aut = aut_inf_a_or_fin_bb()
    # L(q1) (= InfOften(a)) is included in the whole language
    assert incl_det(aut, 0, aut, 2) is True
    cex = incl_det(aut, 2, aut, 0)
    assert cex is not True
    assert up_membership(aut.with_initial(2), cex)
    assert not up_membership(aut.with_initial(0), cex)


def test_incl_counterexamples_verify(rng):
    for name, (mk, _) in FIXTURES.items():
        aut = mk()
        for q in aut.states():
            for p in aut.states():
                r = incl_det(aut, q, aut, p)
                if r is not True:
                    assert up_membership(aut.with_initial(q), r), (name, q, p)
                    assert not up_membership(aut.with_initial(p), r), (name, q, p)


def test_incl_nd_subautomaton():
    aut = aut_buchi_a_or_reach_aa()
    assert incl_nd_in_det(aut, aut) is True


def test_incl_nd_with_bad_eps_loop():
    from posaut.automaton import Transition
    from dataclasses import replace

    aut = aut_buchi_a_or_reach_aa()
    bad = replace(
        aut,
        transitions=aut.transitions + (Transition(0, "eps", 0, 0),),
        deterministic=False,
    )
    cex = incl_nd_in_det(bad, aut)
    assert cex is not True
    assert not up_membership(aut, cex)
    assert up_membership(bad, cex)


def test_residual_preorder_buchi_example():
    rp = residual_preorder(aut_buchi_a_or_reach_aa())
    assert rp.total
    assert rp.rank[0] < rp.rank[1] < rp.rank[2]


def test_residual_preorder_incomparable():
    aut = aut_first_letter_inf()
    rp = residual_preorder(aut)
    assert not rp.total
    q, p, w1, w2 = rp.incomparable_witness
    assert up_membership(aut.with_initial(q), w1)
    assert not up_membership(aut.with_initial(p), w1)
    assert up_membership(aut.with_initial(p), w2)
    assert not up_membership(aut.with_initial(q), w2)
    # the named pair of loop states is incomparable as well
    assert incl_det(aut, 1, aut, 2) is not True
    assert incl_det(aut, 2, aut, 1) is not True


def test_residual_preorder_one_state():
    rp = residual_preorder(aut_accept_all())
    assert rp.total and rp.rank == {0: 0}


def test_residual_monotonicity(rng):
    # q below p implies the w-successors stay ordered, for short words
    import itertools

    for name in ("inf_a_or_fin_bb", "buchi_a_or_reach_aa", "min_letter_even"):
        aut = FIXTURES[name][0]()
        rp = residual_preorder(aut)
        assert rp.total
        for q in aut.states():
            for p in aut.states():
                if rp.rank[q] > rp.rank[p]:
                    continue
                for wlen in range(1, 4):
                    for w in itertools.product(aut.alphabet, repeat=wlen):
                        q2 = aut.run_state(q, w)
                        p2 = aut.run_state(p, w)
                        assert rp.rank[q2] <= rp.rank[p2], (name, q, p, w)


def test_residual_automaton_shapes():
    structure, _ = residual_automaton(aut_inf_a_or_fin_bb())
    assert structure.n_states == 2
    structure, _ = residual_automaton(aut_buchi_a_or_reach_aa())
    assert structure.n_states == 3
    structure, _ = residual_automaton(aut_accept_all())
    assert structure.n_states == 1


def test_safe_incl_reflexive():
    aut = aut_fin_ac_or_fin_bb()
    for q in aut.states():
        assert safe_incl(aut, 2, q, q) is True


def test_safe_incl_acbb():
    aut = aut_fin_ac_or_fin_bb()
    # q1 strictly below q2, p1 strictly below p2
    assert safe_incl(aut, 2, 0, 1) is True
    assert safe_incl(aut, 2, 1, 0) is not True
    assert safe_incl(aut, 2, 2, 3) is True
    assert safe_incl(aut, 2, 3, 2) is not True


def test_safe_incl_three_priorities():
    aut = aut_inf_a_or_fin_bb()
    # within the b,c block: the just-saw-b state is strictly below the fresh one
    assert safe_incl(aut, 2, 1, 2) is True
    sep = safe_incl(aut, 2, 2, 1)
    assert sep is not True
    # the separating word is (<2)-safe from the fresh state only
    q2, q1 = 2, 1
    st, m = aut.run_min_priority(q2, sep)
    assert m >= 2
    part, m2 = None, None
    try:
        part, m2 = aut.run_min_priority(q1, sep)
    except ValueError:
        pass
    assert m2 is None or m2 < 2


def test_safe_language_monotonicity():
    # safe inclusion propagates along safe runs
    import itertools

    aut = aut_fin_ac_or_fin_bb()
    for q in aut.states():
        for p in aut.states():
            if safe_incl(aut, 2, q, p) is not True:
                continue
            for wlen in range(1, 4):
                for w in itertools.product(aut.alphabet, repeat=wlen):
                    q2, m = aut.run_min_priority(q, w)
                    if m is not None and m >= 2:
                        p2, m2 = aut.run_min_priority(p, w)
                        assert m2 >= 2
                        assert safe_incl(aut, 2, q2, p2) is True


def test_safe_incl_requires_determinism_over_geq():
    bad = build(
        2,
        ("a",),
        0,
        [(0, "a", 2, 0), (0, "a", 2, 1), (1, "a", 2, 1)],
        deterministic=False,
    )
    with pytest.raises(ValueError):
        safe_incl(bad, 2, 0, 1)
    # nondeterminism below the threshold is tolerated
    ok = build(
        2,
        ("a",),
        0,
        [(0, "a", 1, 0), (0, "a", 1, 1), (1, "a", 2, 1)],
        deterministic=False,
    )
    assert safe_incl(ok, 2, 0, 1) is True


def test_reject_all_included_everywhere():
    lo = aut_reject_all()
    hi = aut_accept_all()
    assert incl_det(lo, 0, hi, 0) is True
    assert incl_det(hi, 0, lo, 0) is not True
