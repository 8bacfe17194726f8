"""Write the four reference-curve datasets and print a coarse text view.

fig1-fig3 compare the scaled closed-form M with the independent reference
integral at beta = 1, 5, 10; fig4 shows M+ and M-/i at beta = 5.

    python3 demos/figure_data.py [outdir]
"""

import pathlib
import sys

from udw_harvest import cli
from udw_harvest.acceptance import figure_curves

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "figure_data")
out.mkdir(exist_ok=True)
for which in ("fig1", "fig2", "fig3", "fig4"):
    cli.main(["figures", which, "--out", str(out / f"{which}.csv")])
    print(f"wrote {out / (which + '.csv')}")

for beta in (1.0, 5.0, 10.0):
    gammas, closed, ref = figure_curves(beta, n=11)
    print(f"\nbeta = {beta:g}:  gamma   Re M~ (closed)   Re M~ (reference)")
    for g, c, r in zip(gammas, closed, ref):
        print(f"            {g:5.1f}   {c.real: .6e}   {r.real: .6e}")
