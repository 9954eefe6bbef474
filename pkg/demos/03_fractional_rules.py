"""Compare the two fractional transform rules on the fractional example.

``grid`` expands in powers of v**(1/q) with Caputo factors; ``power``
keeps integer powers of v and reproduces the published fractional values.
At alpha = 1 both coincide with the integer solver.
"""

from fractions import Fraction

from belldae.engine import solve
from belldae.problems import get_example

vs = (0.1, 0.3, 0.5)
for alpha in (Fraction(1), Fraction(9, 10), Fraction(7, 10)):
    for rule in ("power", "grid"):
        report = solve(get_example(5, alpha=alpha, rule=rule).spec)
        row = "  ".join(f"{report.value('w1', v):.9f}" for v in vs)
        print(f"alpha={str(alpha):5s} {rule:5s} w1: {row}")
