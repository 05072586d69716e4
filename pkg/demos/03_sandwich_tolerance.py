# %% [markdown]
# # Trading accuracy for evaluations
#
# The sandwich method stops once the upper model and lower model agree to
# within `epsilon` at the lower-bound solution.  A looser tolerance saves
# evaluations and the reported interval still brackets the optimum.

# %%
from ralloc import GenSpec, brute_force_solve, generate, run_sandwich

inst = generate(GenSpec("monotone", n=5, b=8, B=20, seed=11))
optimum = brute_force_solve(inst).value
print(f"{inst.name}: optimum {optimum:.3f}, {inst.total_points} points in total")

for frac in (0.0, 0.01, 0.05, 0.2):
    eps = frac * inst.n * inst.M
    r = run_sandwich(inst, rule="R", epsilon=eps)
    print(
        f"eps={eps:6.1f}  evals={r.evals:3d}  "
        f"interval=[{r.objective_lower:7.3f}, {r.objective_upper:7.3f}]  x={r.allocation.x}"
    )

# %% [markdown]
# The run can also be cut short; the interval is valid at every iteration.

# %%
r = run_sandwich(inst, rule="A", max_iters=5)
print("after 5 iterations:", r.objective_lower, "<=", optimum, "<=", r.objective_upper, r.terminated_early)
