import numpy as np
import pytest

from ralloc import AllEvaluated, EvaluationLedger, brute_force_solve, create_instance, objective_gap, run_sandwich, select_point
from ralloc.instance_gen import generate, random_spec
from ralloc.sandwich import SandwichState, initial_allocation
from ralloc.subsolver import table_objective


def _e1_state(e1, rule_seed=0):
    ledger = EvaluationLedger(e1)
    for i, k in enumerate(initial_allocation(e1)):
        ledger.evaluate(i, k)
    state = SandwichState(e1, ledger, "monotone", rng=np.random.default_rng(rule_seed))
    state.rebuild()
    return state


def test_initial_allocation(e1):
    assert initial_allocation(e1) == (2, 1)
    inst = create_instance((1, 5, 4), 7, 100, [[3, 1], [9, 8, 7, 6, 5, 4], [9, 7, 5, 4, 3]])
    x = initial_allocation(inst)  # targets (3, 2, 2): player 0 overflows by 2
    assert x == (1, 4, 2) and sum(x) == 7


def test_gap_e1_after_init(e1):
    state = _e1_state(e1)
    assert state.x_l == (0, 3)
    assert objective_gap(state) == 104
    assert state.z_lower == 3 and state.z_upper == 107


def test_rule_a_e1(e1):
    assert select_point(_e1_state(e1), "A") == (0, 0)


def test_rule_r_e1(e1):
    state = _e1_state(e1)
    assert select_point(state, "R") == (0, 0)
    assert state.x_u == (2, 1)


def test_rule_rnd_uniform_over_unevaluated(e1):
    state = _e1_state(e1, rule_seed=3)
    picks = {select_point(state, "RND") for _ in range(200)}
    assert picks == set(state.ledger.unevaluated())


def test_forced_choice_and_all_evaluated(e1):
    state = _e1_state(e1)
    remaining = state.ledger.unevaluated()
    for p in remaining[:-1]:
        state.ledger.evaluate(*p)
    state.rebuild()
    for rule in ("RND", "A", "R"):
        assert select_point(state, rule) == remaining[-1]
    state.ledger.evaluate(*remaining[-1])
    state.rebuild()
    assert objective_gap(state) == 0
    with pytest.raises(AllEvaluated):
        select_point(state, "A")


def test_fully_evaluated_at_init():
    inst = create_instance((1, 1, 1), 2, 100, [[5, 1], [6, 3], [4, 2]])
    ledger = EvaluationLedger(inst)
    for i in range(3):
        for k in range(2):
            ledger.evaluate(i, k)
    report = run_sandwich(inst, ledger, rule="A")
    assert report.iterations == 0 and report.info["initial"]["gap"] == 0
    assert report.true_objective == brute_force_solve(inst).value


@pytest.mark.parametrize("rule", ["RND", "A", "R"])
def test_e1_exact(e1, rule):
    report = run_sandwich(e1, rule=rule, seed=1)
    assert report.true_objective == 8
    assert report.evals <= e1.total_points


def test_e1_rule_a_trace(e1):
    report = run_sandwich(e1, rule="A")
    assert report.allocation.x == (1, 2) and report.evals <= 8
    assert report.trace[0].extra["point"] == [0, 0]


@pytest.mark.parametrize("family", ["convex", "monotone"])
def test_exact_with_zero_epsilon(family):
    rng = np.random.default_rng(21)
    for r in range(30):
        inst = generate(random_spec(rng, family))
        opt = brute_force_solve(inst).value
        for rule in ("RND", "A", "R"):
            report = run_sandwich(inst, rule=rule, seed=r)
            assert table_objective(inst, report.allocation.x) == opt
            assert report.objective_lower <= opt <= report.objective_upper
            assert report.iterations <= inst.total_points


def test_interval_and_lower_sequence():
    rng = np.random.default_rng(22)
    for _ in range(20):
        inst = generate(random_spec(rng, "monotone"))
        opt = brute_force_solve(inst).value
        report = run_sandwich(inst, rule="R")
        lows = [report.info["initial"]["lower"]] + [t.lower for t in report.trace]
        assert all(a <= b for a, b in zip(lows, lows[1:]))
        for t in report.trace:
            assert t.lower <= opt <= t.upper


def test_epsilon_optimality():
    rng = np.random.default_rng(23)
    for _ in range(20):
        inst = generate(random_spec(rng, "monotone"))
        opt = brute_force_solve(inst).value
        for eps in (1.0, 5.0, 20.0):
            report = run_sandwich(inst, rule="A", epsilon=eps)
            assert table_objective(inst, report.allocation.x) <= opt + eps
            assert report.info["final_gap"] <= eps


def test_determinism(e1):
    a = run_sandwich(e1, rule="RND", seed=5).to_json()
    b = run_sandwich(e1, rule="RND", seed=5).to_json()
    assert a == b


def test_truncation(e1):
    report = run_sandwich(e1, rule="R", max_iters=1)
    assert report.terminated_early and report.iterations == 1
    assert report.allocation.feasible
    assert report.objective_lower <= 8 <= report.objective_upper


def test_bad_arguments(e1):
    with pytest.raises(ValueError):
        run_sandwich(e1, epsilon=-1)
    with pytest.raises(ValueError):
        run_sandwich(e1, rule="X")
