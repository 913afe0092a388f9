"""Estimating noise from raw detector counts, no tomography required.

Contextual values turn a stream of outcome labels into moment estimators:
sum_k m^(n)_k p^_k converges to <A^n>, and sum_k [m_k^2 - m^(2)_k] p^_k is
an unbiased estimator of the mean-squared noise.  Sampling is driven by a
counter-based generator, so a (seed, shots) pair fixes every draw.
"""

import numpy as np

from qmeasure import analyze, load_scenario, sample
from qmeasure.operators import HermitianOperator, expectation

scenario = load_scenario("scenarios/theta_pom.json")
report = analyze(scenario)

run = sample(scenario, shots=200_000, seed=7)
print(f"shots = {run.shots}, seed = {run.seed}")
for label, n in run.counts.items():
    print(f"  outcome {label!r}: {n}")

analytic_mean = expectation(scenario.observable_A, scenario.state)
print(f"\nempirical mean  {run.empirical_mean:+.5f} +- {run.empirical_mean_se:.5f}")
print(f"analytic mean   {analytic_mean:+.5f}")

print(f"\nempirical eps^2 {run.empirical_eps_sq:.5f}")
print(f"analytic eps^2  {report.epsilon.mean_squared:.5f}")

print("\nmoment reconstructions from the same counts:")
for n, value in sorted(run.empirical_moments.items()):
    power = np.linalg.matrix_power(scenario.observable_A.matrix, n)
    exact = expectation(HermitianOperator(power), scenario.state)
    print(f"  <A^{n}> ~ {value:+.5f}   (exact {exact:+.5f})")

again = sample(scenario, shots=200_000, seed=7)
print(f"\nsame seed reproduces the run bitwise: {run == again}")
