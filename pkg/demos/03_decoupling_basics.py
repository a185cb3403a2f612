"""Decoupling in one picture: f, its surrogate g, and the closed-form mean.

f(U) is the trace distance between the channel output and the ideal
product; g(U) is the weighted 2-norm surrogate that dominates it pointwise
and whose Haar second moment has a closed form.
"""

import math

import numpy as np

from decouplab import decoupling, ensembles, quantum
from decouplab.entropy import SmoothingConfig
from decouplab.linalg import shape

rng = np.random.default_rng(3)

# State on A (x) R with A = 4, R = 2; channel traces half of A away.
rho = quantum.random_state(shape(("A", 4), ("R", 2)), rng)
inst = decoupling.DecouplingInstance(
    rho=rho, channel=quantum.trace_out_channel(2, 2), cfg=SmoothingConfig(),
)
w = decoupling.prepare(inst)
print("certified weights: h2(A|R) =", round(w.h2_eps, 4),
      " h2'(B'|B) =", round(w.h2_prime_val, 4),
      " hmax'(B) =", round(w.hmax_prime_val, 4))

# Pointwise: f never exceeds g, and g never exceeds its uniform bound.
ens = ensembles.haar_ensemble(4, seed=0)
rows = []
for i in range(400):
    u = ens.sample(i)
    rows.append((decoupling.f_value(inst, u), decoupling.g_value(inst, u, w)))
f = np.array([r[0] for r in rows])
g = np.array([r[1] for r in rows])
gmax = decoupling.max_g_bound(inst, w)
print("\nover 400 Haar draws:")
print("  max f            =", round(float(f.max()), 6))
print("  max g            =", round(float(g.max()), 6))
print("  f <= g always    :", bool((f <= g + 1e-10).all()))
print("  g <= bound", round(gmax, 4), ":", bool((g <= gmax + 1e-9).all()))

# The Haar mean of g^2 in closed form, against the Monte Carlo estimate.
m = decoupling.haar_expected_g_squared(inst, w)
se = (g**2).std(ddof=1) / math.sqrt(g.size)
print("\nE[g^2] closed form =", round(m.expected_g_squared, 6))
print("E[g^2] Monte Carlo =", round(float((g**2).mean()), 6),
      "+-", round(float(se), 6))
print("coefficients: alpha =", round(m.alpha, 6), " beta =", round(m.beta, 6),
      " eta =", round(m.eta, 6))

# The mean of f itself obeys the square-root entropy bound.
bound = decoupling.dupuis_expectation_bound(inst)
print("\nE[f] =", round(float(f.mean()), 6), "<= bound =", round(bound, 6))

# With smoothing the chain picks up the 14 sqrt(eps) slack but the POVM
# route keeps everything consistent.
eps = 0.01
inst_s = decoupling.DecouplingInstance(
    rho=rho, channel=quantum.trace_out_channel(2, 2),
    cfg=SmoothingConfig(epsilon=eps, delta=0.1),
)
w_s = decoupling.prepare(inst_s)
u = ens.sample(0)
f0 = decoupling.f_value(inst_s, u)
g0 = decoupling.g_value(inst_s, u, w_s)
print("\nsmoothed chain at eps =", eps, ":",
      round(f0, 6), "<=", round(2 * g0 + 14 * math.sqrt(eps), 6),
      "(f <= 2g + 14 sqrt(eps))")
