import dataclasses

import pytest

from approval_bribery import InputError, apply_plan, validate_ci, validate_vi, verify_solution
from approval_bribery.core import BriberyPlan, UnitOperation
from approval_bribery.exact import bb_solve, bb_solve_deletions
from approval_bribery.generators import (
    CubicGraph,
    Rx3cInstance,
    exact_covers,
    gen_cubic_graph,
    gen_random_election,
    gen_rx3c,
    independent_sets,
)
from approval_bribery.reductions import (
    build_plan_from_cover_del_ci,
    build_plan_from_cover_swap_vi,
    build_plan_from_independent_set,
    extract_cover_del_ci,
    extract_cover_swap_vi,
    extract_is_swap_ci,
    reduce_cubic_is_to_swap_ci,
    reduce_rx3c_to_del_ci,
    reduce_rx3c_to_swap_vi,
)

K4 = CubicGraph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
TRIPLE = Rx3cInstance(1, ({0, 1, 2},) * 3)


# -- generators -------------------------------------------------------------------


def test_source_invariants():
    with pytest.raises(InputError):
        Rx3cInstance(1, ({0, 1, 2}, {0, 1, 2}))
    with pytest.raises(InputError):
        Rx3cInstance(1, ({0, 1, 2}, {0, 1, 2}, {0, 1}))
    with pytest.raises(InputError):
        CubicGraph(4, ((0, 1), (0, 2), (0, 3)))
    with pytest.raises(InputError):
        gen_cubic_graph(5, 0)


def test_small_sources_are_forced():
    for seed in range(5):
        assert gen_cubic_graph(4, seed) == K4
        assert gen_rx3c(1, seed) == TRIPLE


def test_generators_are_deterministic():
    assert gen_rx3c(3, 11) == gen_rx3c(3, 11)
    assert gen_cubic_graph(8, 11) == gen_cubic_graph(8, 11)
    assert gen_random_election(4, 5, 0.5, "vi", 2) == gen_random_election(4, 5, 0.5, "vi", 2)


def test_rx3c_generator_yields_both_answers():
    answers = {bool(exact_covers(gen_rx3c(2, seed))) for seed in range(30)}
    assert answers == {True, False}


@pytest.mark.parametrize("domain", ["ci", "vi"])
def test_random_elections_respect_their_witness(domain):
    for seed in range(50):
        election, witness = gen_random_election(5, 5, 0.6, domain, seed)
        check = validate_ci if domain == "ci" else validate_vi
        assert check(election, witness.order).ok


# -- exact cover -> deletions, candidate axis -------------------------------------


def del_ci_audit(bundle):
    """Pre-bribery scores predicted from the gadget layout."""
    src = bundle.source
    n = src.n
    e = bundle.instance.election
    interior = [0] * e.m
    for j, s in enumerate(src.sets):
        for i in s:
            for c in range(j + 1, 5 * n + i):
                interior[c] += 1
    expected = []
    for c, role in enumerate(bundle.candidate_roles):
        if role[0] == "set":
            expected.append(2 + 3 + interior[c])
        elif role[0] == "dummy":
            expected.append(2 + 9 * n)
        elif role[0] == "universe":
            expected.append(3 + interior[c])
        else:
            expected.append(2)
    return expected


def test_del_ci_counts_n1():
    bundle = reduce_rx3c_to_del_ci(TRIPLE)
    inst = bundle.instance
    assert inst.election.m == 9 and inst.election.n == 21
    assert (inst.k, inst.budget) == (2, 9)
    assert sum(r[0] == "fixed" for r in bundle.voter_roles) == 12
    assert validate_ci(inst.election, inst.witness.order).ok
    assert list(inst.election.scores()) == del_ci_audit(bundle)


@pytest.mark.parametrize("seed", range(4))
def test_del_ci_audit_n2(seed):
    bundle = reduce_rx3c_to_del_ci(gen_rx3c(2, seed))
    e = bundle.instance.election
    assert e.m == 17 and list(e.scores()) == del_ci_audit(bundle)
    dummies = [c for c, r in enumerate(bundle.candidate_roles) if r[0] == "dummy"]
    assert all(e.scores()[c] == 2 + 18 for c in dummies)


def test_del_ci_forward_and_back():
    bundle = reduce_rx3c_to_del_ci(TRIPLE)
    plan = build_plan_from_cover_del_ci(bundle, {0})
    report = verify_solution(bundle.instance, plan)
    assert report.valid and report.cost == 9
    after = apply_plan(bundle.instance.election, plan).scores()
    roles = bundle.candidate_roles
    assert all(after[c] == 2 for c, r in enumerate(roles) if r[0] == "universe")
    # the cover set keeps both fixed approvals and all three of its exterior ones
    assert [after[c] for c, r in enumerate(roles) if r[0] == "set"] == [5, 2, 2]
    assert all(after[c] == 2 for c, r in enumerate(roles) if r[0] == "dummy")
    assert sum(s > after[bundle.instance.p] for s in after) == 1
    assert extract_cover_del_ci(bundle, plan) == (0,)


def test_del_ci_rejects_non_cover():
    bundle = reduce_rx3c_to_del_ci(TRIPLE)
    with pytest.raises(InputError):
        build_plan_from_cover_del_ci(bundle, {0, 1})
    with pytest.raises(InputError):
        extract_cover_del_ci(bundle, BriberyPlan())


def test_del_ci_solver_plan_maps_back():
    bundle = reduce_rx3c_to_del_ci(TRIPLE)
    out = bb_solve_deletions(bundle.instance)
    assert out.feasible and out.optimal_cost == 9
    assert extract_cover_del_ci(bundle, out.plan) in {(0,), (1,), (2,)}


def test_del_ci_over_budget_plan_is_rejected():
    bundle = reduce_rx3c_to_del_ci(TRIPLE)
    plan = build_plan_from_cover_del_ci(bundle, {0})
    tight = dataclasses.replace(bundle, instance=bundle.instance.replace(budget=8))
    with pytest.raises(InputError):
        extract_cover_del_ci(tight, plan)


# -- cubic independent set -> swaps, candidate axis -------------------------------


def test_swap_ci_counts_k4():
    bundle = reduce_cubic_is_to_swap_ci(K4, 1)
    inst = bundle.instance
    params = bundle.params
    assert (inst.budget, params["t"], params["L"]) == (3, 4, 6)
    assert inst.election.m == 29 and inst.k == 24
    scores = inst.election.scores()
    assert scores[inst.p] == 3
    assert all(scores[c] == 6 for c in params["vertex_positions"])
    assert validate_ci(inst.election, inst.witness.order).ok


@pytest.mark.parametrize("seed", range(3))
def test_swap_ci_vertices_score_l(seed):
    g = gen_cubic_graph(6, seed)
    bundle = reduce_cubic_is_to_swap_ci(g, 2)
    scores = bundle.instance.election.scores()
    L = bundle.params["L"]
    assert L == 9 and scores[bundle.instance.p] == L - 3
    assert all(scores[c] == L for c in bundle.params["vertex_positions"])


def test_swap_ci_forward_and_back():
    bundle = reduce_cubic_is_to_swap_ci(K4, 1)
    plan = build_plan_from_independent_set(bundle, {0})
    report = verify_solution(bundle.instance, plan)
    assert report.valid and report.cost == 3
    after = apply_plan(bundle.instance.election, plan).scores()
    pos = bundle.params["vertex_positions"]
    assert [after[c] for c in pos] == [3, 6, 6, 6]
    assert extract_is_swap_ci(bundle, plan) == (0,)


def test_swap_ci_rejects_adjacent_vertices():
    bundle = reduce_cubic_is_to_swap_ci(K4, 2)
    with pytest.raises(InputError):
        build_plan_from_independent_set(bundle, {0, 1})
    with pytest.raises(InputError):
        build_plan_from_independent_set(reduce_cubic_is_to_swap_ci(K4, 1), {0, 1})


def test_swap_ci_zero_h():
    bundle = reduce_cubic_is_to_swap_ci(K4, 0)
    plan = build_plan_from_independent_set(bundle, set())
    assert plan.ops == ()
    assert verify_solution(bundle.instance, plan).valid == (bundle.instance.k > K4.n)


def test_swap_ci_k4_solver():
    bundle = reduce_cubic_is_to_swap_ci(K4, 1)
    out = bb_solve(bundle.instance)
    assert out.feasible and out.optimal_cost == 3
    chosen = extract_is_swap_ci(bundle, out.plan)
    assert len(chosen) == 1 and chosen in independent_sets(K4, 1)


@pytest.mark.slow
def test_swap_ci_k4_h2_infeasible():
    assert not bb_solve(reduce_cubic_is_to_swap_ci(K4, 2).instance).feasible


# -- exact cover -> swaps, voter order --------------------------------------------


def test_swap_vi_counts_n1():
    bundle = reduce_rx3c_to_swap_vi(TRIPLE)
    inst = bundle.instance
    e = inst.election
    assert (e.n, e.m, bundle.params["P"], inst.budget, inst.k) == (11, 19, 6, 2, 1)
    assert validate_vi(e, inst.witness.order).ok
    scores = e.scores()
    assert scores[inst.p] == 6
    assert all(scores[x] == 7 for x in bundle.params["universe"])
    assert all(scores[s] == 11 for s in bundle.params["set_double_primed"])
    assert all(scores[s] == 0 for s in bundle.params["set_primed"])


def test_swap_vi_forward_and_back():
    bundle = reduce_rx3c_to_swap_vi(TRIPLE)
    plan = build_plan_from_cover_swap_vi(bundle, {0})
    report = verify_solution(bundle.instance, plan)
    assert report.valid and report.cost == 2
    after = apply_plan(bundle.instance.election, plan)
    scores = after.scores()
    P = bundle.params["P"]
    assert scores[bundle.instance.p] == P
    assert max(scores) == P
    assert scores[bundle.params["set_double_primed"][0]] == P
    assert scores[bundle.params["set_primed"][0]] == 5
    assert validate_vi(after, bundle.instance.witness.order).ok
    assert extract_cover_swap_vi(bundle, plan) == (0,)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_swap_vi_round_trip_n2(seed):
    src = gen_rx3c(2, seed)
    bundle = reduce_rx3c_to_swap_vi(src)
    assert validate_vi(bundle.instance.election, bundle.instance.witness.order).ok
    assert bundle.instance.election.scores()[0] == 13
    for cover in exact_covers(src):
        plan = build_plan_from_cover_swap_vi(bundle, cover)
        assert verify_solution(bundle.instance, plan).cost == 4
        assert extract_cover_swap_vi(bundle, plan) == cover


def test_swap_vi_solver_plan_maps_back():
    bundle = reduce_rx3c_to_swap_vi(TRIPLE)
    out = bb_solve(bundle.instance)
    assert out.feasible and out.optimal_cost == 2
    assert extract_cover_swap_vi(bundle, out.plan) in {(0,), (1,), (2,)}


def test_swap_vi_rejects_invalid_plan():
    bundle = reduce_rx3c_to_swap_vi(TRIPLE)
    with pytest.raises(InputError):
        extract_cover_swap_vi(bundle, [UnitOperation.swap(1, 1, 4)])
    with pytest.raises(InputError):
        build_plan_from_cover_swap_vi(bundle, {0, 1})
