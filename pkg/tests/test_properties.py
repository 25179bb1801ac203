from hypothesis import given, settings
from hypothesis import strategies as st

from approval_bribery import FORBIDDEN, CostModel, apply_plan, validate, verify_solution
from approval_bribery.exact import oracle_solve
from approval_bribery.generators import gen_random_instance
from approval_bribery.poly_solvers import POLY_SOLVERS

SPECS = {
    "add-ci": ("add", "ci"),
    "add-vi": ("add", "vi"),
    "del-vi": ("delete", "vi"),
    "swap2p-ci": ("swap-to-p", "ci"),
    "swap2p-vi": ("swap-to-p", "vi"),
}

instances = st.builds(
    lambda name, m, n, seed, contested: (name, gen_random_instance(m, n, *SPECS[name], seed, contested=contested)),
    st.sampled_from(sorted(SPECS)),
    st.integers(2, 5),
    st.integers(1, 5),
    st.integers(0, 10**6),
    st.booleans(),
)


def cost_or_none(out):
    return out.optimal_cost if out.feasible else None


@settings(max_examples=200, deadline=None)
@given(instances)
def test_plans_verify_and_keep_structure(case):
    name, inst = case
    out = POLY_SOLVERS[name](inst)
    if out.feasible:
        report = verify_solution(inst, out.plan)
        assert report.valid and report.cost == out.optimal_cost
        assert validate(apply_plan(inst.election, out.plan), inst.witness).ok


@settings(max_examples=150, deadline=None)
@given(instances, st.integers(1, 3))
def test_budget_monotone(case, extra):
    name, inst = case
    solve = POLY_SOLVERS[name]
    lo = solve(inst)
    hi = solve(inst.replace(budget=inst.budget + extra))
    if lo.feasible:
        assert hi.feasible and hi.optimal_cost == lo.optimal_cost
    if hi.feasible and hi.optimal_cost <= inst.budget:
        assert lo.feasible


@settings(max_examples=150, deadline=None)
@given(instances)
def test_committee_size_monotone(case):
    name, inst = case
    if inst.k == inst.election.m:
        return
    solve = POLY_SOLVERS[name]
    small, large = solve(inst), solve(inst.replace(k=inst.k + 1))
    if small.feasible:
        assert large.feasible and large.optimal_cost <= small.optimal_cost


@settings(max_examples=100, deadline=None)
@given(instances)
def test_lifting_forbidden_never_hurts(case):
    _, inst = case
    table = {key: (3 if c is FORBIDDEN else c) for key, c in inst.costs.table.items()}
    default = 3 if inst.costs.default_cost is FORBIDDEN else inst.costs.default_cost
    relaxed = inst.replace(costs=CostModel(inst.mode, table, default))
    before, after = oracle_solve(inst), oracle_solve(relaxed)
    if before.feasible:
        assert after.feasible and after.optimal_cost <= before.optimal_cost
