# %% [markdown]
# # Counting evaluations and bounding what we have not seen
#
# Every cost value reaches a method through an `EvaluationLedger`.  From the
# points evaluated so far we can bound every unevaluated point.

# %%
import numpy as np

from ralloc import EvaluationLedger, convex_bounds, create_instance, monotone_bounds

np.set_printoptions(precision=2, suppress=True)

inst = create_instance(
    b=(6, 4), B=6, M=10,
    costs=[[10, 7, 5, 3.5, 2.5, 2, 2], [9, 6, 4, 3, 2.5]],
    convex=True,
)
ledger = EvaluationLedger(inst)
for i, k in [(0, 0), (0, 3), (0, 6), (1, 1)]:
    ledger.evaluate(i, k)
ledger.evaluate(0, 3)  # cached, not counted again
print("distinct evaluations:", ledger.eval_count)

# %% [markdown]
# Monotonicity alone pins each unseen value between its evaluated neighbours.

# %%
mono = monotone_bounds(inst, ledger)
for i in range(inst.n):
    print(f"player {i}  lower {mono.lower[i]}  upper {mono.upper[i]}")

# %% [markdown]
# Convexity adds chords and extrapolated secants, which tighten both sides.

# %%
cvx = convex_bounds(inst, ledger)
for i in range(inst.n):
    print(f"player {i}  lower {cvx.lower[i]}  upper {cvx.upper[i]}")
print("total width, monotone:", sum(float(np.sum(u - l)) for l, u in zip(mono.lower, mono.upper)))
print("total width, convex:  ", sum(float(np.sum(u - l)) for l, u in zip(cvx.lower, cvx.upper)))
