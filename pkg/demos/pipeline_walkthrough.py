"""
The file-based pipeline end to end
==================================

Builds a small synthetic corpus and drives every command through the
same entry point as the ``phonprosody`` console script.
"""

import tempfile
from pathlib import Path

from phonprosody import cli, synth

root = Path(tempfile.mkdtemp(prefix="phonprosody_"))
manifest = synth.write_corpus(root / "corpus", n_utts=15, seed=0)
unseen = synth.write_corpus(root / "corpus", [synth.SyntheticSpeaker("unseen_m", 118.0)],
                            n_utts=8, seed=1, manifest_name="unseen.csv")
out = str(root / "ws")

steps = [
    ["extract", "--manifest", str(manifest)],
    ["augment"],
    ["train-codebook"],
    ["adapt", "--manifest", str(unseen)],
    ["assign-labels"],
    ["sweep"],
    ["train-predictor"],
    ["predict", "--manifest", str(manifest)],
    ["evaluate", "--random-labels", "1"],
]
for step in steps:
    code = cli.main(step + ["--out", out])
    print(f"{step[0]:<16} exit {code}")

print((Path(out) / "report.csv").read_text())
sweep = (Path(out) / "sweep.csv").read_text().splitlines()
print("\n".join(line for line in sweep if line.startswith(("speaker_id", "unseen_m"))))
print("workspace:", out)
