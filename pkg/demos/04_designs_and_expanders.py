"""How close is an ensemble to Haar? Moment operators tell you exactly.

lambda is the operator-norm gap between an ensemble's t-fold twirl and the
Haar twirl. Exact groups get exact answers (the average runs over every
member); sampled ensembles get Monte Carlo estimates.
"""

from decouplab import ensembles

# The 1-qubit Clifford group is an exact 2-design (even a 3-design);
# lambda only jumps once t reaches 4.
cliff = ensembles.enumerated_ensemble(ensembles.clifford_group(1),
                                      name="clifford")
for t in (1, 2, 3, 4):
    rep = ensembles.qtpe_lambda(cliff, t, samples=0)
    print(f"clifford(1)  t={t}  lambda = {rep.lambda_value:.3e}")
print("exact through t = 3, but not a 4-design")

# The Pauli group only randomizes phases: a 1-design that fails at t = 2.
pauli = ensembles.enumerated_ensemble(ensembles.pauli_group(1), name="pauli")
for t in (1, 2):
    rep = ensembles.qtpe_lambda(pauli, t, samples=0)
    print(f"\npauli(1)     t={t}  lambda = {rep.lambda_value:.3e}"
          f"  monomial deviation = {rep.moment_deviation:.3f}")

# Iterating an ensemble multiplies independent draws; the gap can only
# shrink, since the iterated moment operator is the k-th matrix power.
h = [[2**-0.5, 2**-0.5], [2**-0.5, -(2**-0.5)]]
s = [[1, 0], [0, 1j]]
hs = ensembles.enumerated_ensemble([h, s], name="hs")
print("\n{H, S} iterated, t = 2:")
prev = 2.0
for k in (1, 2, 3, 4):
    it = ensembles.iterate_ensemble(hs, k) if k > 1 else hs
    rep = ensembles.qtpe_lambda(it, 2, samples=0)
    print(f"  k={k}  lambda = {rep.lambda_value:.6f}"
          f"  (monotone: {rep.lambda_value <= prev + 1e-12})")
    prev = rep.lambda_value

# Brickwork circuits, probed at the first moment: one layer leaves a qubit
# untouched on odd rings, so lambda stays pinned at 1; two layers touch
# every qubit and the gap collapses to Monte Carlo noise.
for depth in (1, 2, 4):
    circ = ensembles.random_circuit_ensemble(3, depth, seed=5)
    rep = ensembles.qtpe_lambda(circ, 1, samples=1500)
    print(f"\ncircuit n=3 depth={depth}  t=1 lambda ~ {rep.lambda_value:.4f}"
          f"  ({rep.samples_used} sampled unitaries)")
