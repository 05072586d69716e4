import numpy as np
import pytest

from ralloc import GenSpec, SpecInvalid, generate
from ralloc.core import instance_to_dict, is_convex_row


@pytest.mark.parametrize("seed", range(120))
def test_families_hold_their_properties(seed):
    convex = generate(GenSpec("convex", 4, (6, 3, 9, 2), 10, seed=seed))
    assert convex.convex and all(is_convex_row(r) for r in convex._costs)
    mono = generate(GenSpec("monotone", 3, 7, 9, seed=seed))
    assert all(np.all(np.diff(r) <= 0) for r in mono._costs)
    near = generate(GenSpec("near_convex", 3, 8, 12, seed=seed, perturbation=0.5))
    assert all(np.all(np.diff(r) <= 0) for r in near._costs)
    flat = generate(GenSpec("near_convex", 3, 8, 12, seed=seed, perturbation=0.0))
    assert all(is_convex_row(r) for r in flat._costs)


def test_deterministic_per_seed():
    spec = GenSpec("monotone", 5, 6, 14, seed=42)
    assert instance_to_dict(generate(spec)) == instance_to_dict(generate(spec))
    other = GenSpec("monotone", 5, 6, 14, seed=43)
    assert instance_to_dict(generate(other)) != instance_to_dict(generate(spec))


def test_monotone_family_is_often_non_convex():
    rows = [r for s in range(50) for r in generate(GenSpec("monotone", 3, 8, 12, seed=s))._costs]
    assert sum(not is_convex_row(r) for r in rows) > len(rows) // 2


@pytest.mark.parametrize(
    "spec",
    [
        GenSpec("weird", 3, 5, 6),
        GenSpec("convex", 3, 5, 15),
        GenSpec("convex", 3, 5, 4),
        GenSpec("convex", 3, (5, 5), 6),
        GenSpec("near_convex", 3, 5, 6, perturbation=2.0),
        GenSpec("convex", 3, 5, 6, M=0.0),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(SpecInvalid):
        generate(spec)


def test_spec_dict_round_trip():
    spec = GenSpec("near_convex", 3, (4, 5, 6), 9, M=50.0, seed=3, perturbation=0.2)
    assert GenSpec.from_dict(spec.to_dict()) == spec
