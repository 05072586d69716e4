import numpy as np
import pytest

from ralloc import (
    EvaluationLedger,
    MissingValue,
    brute_force_solve,
    create_instance,
    immediate_gain,
    monotone_bounds,
    prescient_score,
    run_myopic,
    run_prescient,
)
from ralloc.greedy import uses_removal
from ralloc.instance_gen import generate, random_spec


def _full_ledger(instance):
    ledger = EvaluationLedger(instance)
    for i, bi in enumerate(instance.b):
        for k in range(bi + 1):
            ledger.evaluate(i, k)
    return ledger


def test_immediate_gain(e1):
    ledger = _full_ledger(e1)
    assert immediate_gain(ledger, 0, 0) == 4
    assert immediate_gain(ledger, 0, 1) == 3
    assert immediate_gain(ledger, 1, 2) == 0


def test_immediate_gain_missing(e1):
    ledger = EvaluationLedger(e1)
    ledger.evaluate(0, 0)
    with pytest.raises(MissingValue):
        immediate_gain(ledger, 0, 0)


def test_prescient_score_e2(e2):
    ledger = _full_ledger(e2)
    model = monotone_bounds(e2, ledger)
    assert prescient_score(e2, ledger, model, 1, 0, 0) == 3
    assert prescient_score(e2, ledger, model, 0, 0, 0) == 1


def test_prescient_score_saturated_horizon():
    inst = create_instance((2, 2), 3, 100, [[10, 9, 8], [10, 10, 4]])
    ledger = _full_ledger(inst)
    model = monotone_bounds(inst, ledger)
    # t = B leaves no horizon, so only the immediate gain counts
    assert prescient_score(inst, ledger, model, 1, 1, 3) == immediate_gain(ledger, 1, 1)


def test_myopic_e1_is_suboptimal(e1):
    report = run_myopic(e1)
    assert report.allocation.x == (3, 0)
    assert report.true_objective == 9
    assert report.evals == 6 == 2 * e1.n + e1.B - 1
    assert brute_force_solve(e1).value == 8
    assert report.info["variant"] == "additive"


def test_myopic_removal_on_convex(e4):
    assert uses_removal(e4)
    report = run_myopic(e4)
    assert report.info["variant"] == "removal"
    assert report.allocation.x == (3, 1) and report.true_objective == 9


def test_removal_single_excess_item():
    inst = create_instance((3, 3), 5, 100, [[10, 6, 3, 1], [9, 8, 7.5, 7.2]])
    report = run_myopic(inst)
    assert report.iterations == 1
    assert sum(report.allocation.x) == 5


def test_prescient_beats_myopic_on_e2(e2):
    pr = run_prescient(e2)
    assert [t.allocation for t in pr.trace] == [(0, 1), (0, 2)]
    assert pr.true_objective == 14 == brute_force_solve(e2).value
    assert pr.evals == 6 <= 3 * e2.n + e2.B - 1
    assert run_myopic(e2).true_objective == 18


def test_greedy_exact_on_convex():
    rng = np.random.default_rng(3)
    for r in range(60):
        inst = generate(random_spec(rng, "convex", regime="additive" if r % 2 else "removal"))
        opt = brute_force_solve(inst).value
        assert run_myopic(inst).true_objective == opt
        assert run_prescient(inst).true_objective == opt
        assert run_prescient(inst, bound_mode="convex").true_objective == opt


def test_selected_gains_non_increasing_on_convex():
    rng = np.random.default_rng(4)
    for _ in range(30):
        inst = generate(random_spec(rng, "convex", regime="additive"))
        scores = [t.extra["score"] for t in run_myopic(inst).trace]
        assert all(a >= b for a, b in zip(scores, scores[1:]))


def test_eval_count_bounds():
    rng = np.random.default_rng(6)
    for r in range(80):
        regime = "additive" if r % 2 else "removal"
        inst = generate(random_spec(rng, "monotone", regime=regime))
        n, B, total = inst.n, inst.B, sum(inst.b)
        ledgers = EvaluationLedger(inst), EvaluationLedger(inst)
        my, pr = run_myopic(inst, ledgers[0]), run_prescient(inst, ledgers[1])
        if regime == "additive":
            assert my.evals <= 2 * n + B - 1
            assert pr.evals <= 3 * n + B - 1
        else:
            assert my.evals <= 2 * n + (total - B) - 1
            assert pr.evals <= 3 * n + (total - B) - 1
        for rep, ledger in zip((my, pr), ledgers):
            assert sum(rep.allocation.x) == B and rep.allocation.feasible
            assert rep.evals == sum(int(v.sum()) for v in ledger.v) <= inst.total_points


def test_max_iters_truncates(e1):
    report = run_myopic(e1, max_iters=1)
    assert report.terminated_early and report.iterations == 1
    assert not report.allocation.feasible
