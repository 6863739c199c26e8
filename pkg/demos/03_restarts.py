# %% [markdown]
# # Restarts for strongly convex objectives
#
# Each stage reruns the adaptive method from the previous output, on a
# prox-function recentered there with radius `R_p` and accuracy
# `mu R_p^2 / 2`. The radius halves in squared norm at each stage, so the
# distance to the optimum is certified to shrink geometrically.

# %%
import numpy as np

from mdopt.problems import get_problem
from mdopt.restarts import contraction_audit, solve_restarted
from mdopt.solvers import solve_adaptive

for k in range(1, 6):
    prob = get_problem(f"sc-ex{k}")
    plain = solve_adaptive(prob, prob.prox_setup(), 0.05, keep_trace=False)
    rep = solve_restarted(prob, "adaptive", 0.05)
    x_star = prob.reference["x_star"]
    ok = all(v for _, v in contraction_audit(rep, x_star))
    dist = float(np.sum((rep.output - x_star) ** 2))
    print(f"{prob.name}: plain {plain.iterations:>7}, restarted {rep.total_inner_iterations:>7}, "
          f"contraction {'ok' if ok else 'FAILED'}, |x - x*|^2 = {dist:.2e}")

# %% [markdown]
# The stage-by-stage picture for one example:

# %%
prob = get_problem("sc-ex4")
rep = solve_restarted(prob, "adaptive", 0.05)
for (p, xp), s in zip(rep.points()[1:], rep.chain):
    d2 = float(np.sum((xp - prob.reference["x_star"]) ** 2))
    print(f"p={p}  R_p^2={s.R_p**2:.4f}  eps_p={s.eps_p:.4f}  inner={s.inner.iterations:>5}  |x^p - x*|^2={d2:.2e}")
