# %% [markdown]
# # Command line
#
# The `entrorisk` command wraps the library: `synth` writes a synthetic
# panel and `risk`, `diversify`, `scatter` and `evaluate` read one. Outputs
# carry a header with the tool version and resolved configuration.

# %%
from __future__ import annotations

import tempfile
from pathlib import Path

from entrorisk.cli import main

work = Path(tempfile.mkdtemp())
panel = work / "panel.csv"
main(["synth", "--securities", "40", "--years", "12", "--seed", "1", "--out", str(panel)])

# %%
main(["risk", "--panel", str(panel), "--out", str(work / "risk.csv")])
print((work / "risk.csv").read_text().splitlines()[:4])

# %%
main(["diversify", "--panel", str(panel), "--sizes", "1,2,5,10", "--max-per-size", "500",
      "--out", str(work / "div.csv")])
print("\n".join((work / "div.csv").read_text().splitlines()[2:8]))

# %%
main(["evaluate", "--panel", str(panel), "--rolling", "--bootstrap", "200", "--out", str(work / "ev")])
print(sorted(p.name for p in (work / "ev").iterdir()))
