"""Fast paths against the brute-force oracles, with evaluation counts.

The oracle integrates the regulated Wightman function over the ordered time
domain at three regulator values and extrapolates linearly to zero.  The fast
path needs one-dimensional integrals or closed forms only.

    python3 demos/oracle_comparison.py [alpha beta gamma]
"""

import sys

from udw_harvest import Scenario, compare_methods

alpha, beta, gamma = (float(x) for x in sys.argv[1:4]) if len(sys.argv) >= 4 else (1.0, 5.0, 0.0)
report = compare_methods(Scenario.from_dimensionless(alpha, beta, gamma), 1e-3)
print(report.summary())
print("\nepsilon ladder for M:")
for eps, value in zip(report.epsilons, report.ladder):
    print(f"  eps = {eps:.0e}  M = {value:.12e}")
print(f"successive-difference ratio {report.ladder_ratio.real:.4f}")
