# %% [markdown]
# # Six methods on small worked instances
#
# The greedy methods and 1-Opt are heuristics on non-convex costs; the
# sandwich method with a zero tolerance always certifies the optimum.

# %%
from ralloc import brute_force_solve, create_instance, solve

myopic_trap = create_instance((3, 3), 3, 10, [[10, 6, 3, 1], [8, 7, 2, 2]])
steep_later = create_instance((2, 2), 2, 10, [[10, 9, 8], [10, 10, 4]])

for label, inst in [("myopic trap", myopic_trap), ("late drop", steep_later)]:
    best = brute_force_solve(inst)
    print(f"\n{label}: optimum {best.value} at {best.allocation.x}")
    for method in ("myopic", "prescient", "one-opt", "sw-rnd", "sw-a", "sw-r"):
        r = solve(inst, method)
        print(f"  {method:9s} x={r.allocation.x}  value={r.true_objective}  evals={r.evals}")

# %% [markdown]
# 1-Opt's trace shows which point it probed and the remaining potential `d`
# for an improving single-item move.

# %%
convex = create_instance((3, 3), 4, 10, [[10, 6, 3, 1], [9, 8, 7.5, 7.2]], convex=True)
report = solve(convex, "one-opt")
for entry in report.trace:
    print(entry.to_dict())
print("final", report.allocation.x, report.true_objective, "after", report.evals, "evaluations")
