# %% [markdown]
# # A small benchmark
#
# `run_suite` runs every method on every instance and compares against the
# brute-force optimum.  The same configuration can be given to `ralloc bench`
# as JSON.

# %%
import numpy as np

from ralloc import SuiteConfig, random_spec, run_suite
from ralloc.harness import MethodSpec

rng = np.random.default_rng(3)
specs = [random_spec(rng, fam, n_range=(3, 6), b_max=8) for fam in ("convex", "monotone") for _ in range(10)]
methods = [MethodSpec.parse(m) for m in ("myopic", "prescient", "one-opt", "sw-a", "sw-r")]
methods.append(MethodSpec.parse({"id": "sw-r", "epsilon": 5.0}))
rows = run_suite(SuiteConfig(specs, methods, workers=4))

# %%
for family in ("convex", "monotone"):
    print(f"\n{family}")
    for m in methods:
        sub = [r for r in rows if r["method"] == m.label and r["instance_id"].startswith(family)]
        gaps = [r["opt_gap"] for r in sub]
        evals = [r["evals"] for r in sub]
        print(f"  {m.label:22s} mean evals {np.mean(evals):5.1f}  mean gap {np.mean(gaps):6.3f}  exact {sum(g == 0 for g in gaps)}/{len(gaps)}")
