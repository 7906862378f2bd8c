"""Plot the long-format CSV written by `orbitstat discrepancy --emit-plot-data`."""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

src = sys.argv[1] if len(sys.argv) > 1 else "discrepancy_long.csv"
dst = sys.argv[2] if len(sys.argv) > 2 else "discrepancy.png"

df = pd.read_csv(src, comment="#")
wide = df.pivot(index="R", columns="series", values="value")

fig, ax = plt.subplots(figsize=(6, 4))
ax.loglog(wide.index, wide["discrepancy"].abs(), ".", ms=3, label="|count - main term|")
ax.loglog(wide.index, wide.index ** (4 / 3) * abs(wide["discrepancy"]).median() / wide.index.to_series().median() ** (4 / 3),
          "-", lw=1, label="R^(4/3)")
ax.set_xlabel("R")
ax.legend()
fig.tight_layout()
fig.savefig(dst, dpi=150)
print("wrote", dst)
