import json

import pytest

from ralloc import (
    Allocation,
    AssumptionViolation,
    EvaluationLedger,
    IndexOutOfRange,
    MissingValue,
    create_instance,
    evaluate_point,
    instance_from_dict,
    instance_to_dict,
    objective_value,
)
from ralloc.core import fold_sum, load_instance, save_instance


def test_valid_instance(e1):
    assert e1.n == 2
    assert e1.total_points == 8
    assert e1.b == (3, 3) and e1.B == 3 and e1.M == 100.0


@pytest.mark.parametrize(
    "b, B, rows, clause",
    [
        ((2, 2), 5, [[3, 2, 1], [3, 2, 1]], "total-budget"),
        ((4, 1), 3, [[5, 4, 3, 2, 1], [1, 0]], "individual-budget"),
        ((2, 2), 3, [[5, 6, 4], [3, 2, 1]], "non-monotone"),
        ((2, 2), 3, [[500, 6, 4], [3, 2, 1]], "range"),
        ((2, 2), 3, [[5, 4, -1], [3, 2, 1]], "range"),
        ((2, 2), 3, [[5, 4], [3, 2, 1]], "shape"),
    ],
)
def test_assumption_clauses(b, B, rows, clause):
    with pytest.raises(AssumptionViolation) as info:
        create_instance(b, B, 100, rows)
    assert info.value.clause == clause


def test_convex_flag_checked():
    with pytest.raises(AssumptionViolation) as info:
        create_instance((3, 3), 3, 100, [[10, 9, 5, 4], [8, 7, 2, 2]], convex=True)
    assert info.value.clause == "non-convex"


def test_non_strict_skips_budget_clauses_only():
    inst = create_instance((4,), 3, 100, [[9, 7, 5, 3, 1]], strict=False)
    assert inst.n == 1
    with pytest.raises(AssumptionViolation):
        create_instance((2,), 1, 100, [[1, 2, 0]], strict=False)


def test_evaluate_point_counts_once(e1):
    ledger = EvaluationLedger(e1)
    assert evaluate_point(e1, ledger, 0, 2) == 3
    assert ledger.eval_count == 1
    assert evaluate_point(e1, ledger, 0, 2) == 3
    assert ledger.eval_count == 1
    assert ledger.per_player_count == [1, 0]
    assert ledger.v[0].tolist() == [False, False, True, False]


def test_evaluate_point_out_of_range(e1):
    ledger = EvaluationLedger(e1)
    with pytest.raises(IndexOutOfRange):
        evaluate_point(e1, ledger, 0, 4)
    with pytest.raises(IndexOutOfRange):
        evaluate_point(e1, ledger, 2, 0)
    assert ledger.eval_count == 0


def test_evaluate_point_rejects_foreign_ledger(e1, e2):
    with pytest.raises(ValueError):
        evaluate_point(e1, EvaluationLedger(e2), 0, 0)


def test_objective_value_from_table(e1):
    rows = e1._costs
    assert objective_value((1, 2), lambda i, k: rows[i][k]) == 8
    assert objective_value((0, 0), lambda i, k: rows[i][k]) == 18


def test_objective_value_missing_point(e1):
    ledger = EvaluationLedger(e1)
    ledger.evaluate(0, 2)
    with pytest.raises(MissingValue):
        objective_value(Allocation((2, 1)), ledger)


def test_fold_sum_order():
    # right fold: 1e16 + (1 + -1e16) differs from the left fold
    assert fold_sum([1e16, 1.0, -1e16]) == 1e16 + (1.0 + -1e16)


def test_allocation_feasibility(e1):
    assert Allocation.of((1, 2), e1).feasible
    assert not Allocation.of((1, 1), e1).feasible
    with pytest.raises(IndexOutOfRange):
        Allocation.of((4, 0), e1)


def test_ledger_invariants_after_mixed_queries(e1):
    ledger = EvaluationLedger(e1)
    for i, k in [(0, 0), (1, 3), (0, 0), (1, 2), (1, 3)]:
        ledger.evaluate(i, k)
    assert ledger.eval_count == sum(int(row.sum()) for row in ledger.v) == 3
    assert ledger.unevaluated()[:2] == [(0, 1), (0, 2)]


def test_json_round_trip(tmp_path, e4):
    path = tmp_path / "e4.json"
    save_instance(e4, path)
    data = json.loads(path.read_text())
    assert set(data) >= {"n", "B", "M", "b", "costs", "convex"}
    back = load_instance(path)
    assert back._costs == e4._costs and back.convex and back.B == 4
    assert instance_to_dict(instance_from_dict(data)) == data


def test_json_n_mismatch():
    with pytest.raises(AssumptionViolation):
        instance_from_dict({"n": 3, "B": 3, "M": 100, "b": [3, 3], "costs": [[3, 2, 1, 0]] * 2})
