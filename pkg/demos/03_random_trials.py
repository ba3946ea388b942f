"""A few seeded trials on random min-degree-3 graphs at c = 5.4.

Each trial samples a uniform simple graph through the pairing model, grows
a rotation-maximal path from a high-degree start, closes its endpoint set
and checks the deterministic lemmas.  The same seed always gives the same
rows, whatever the number of workers.
"""
import sys
import tempfile

from posa.experiment import ExperimentConfig, run_experiment

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 5
with tempfile.TemporaryDirectory() as out:
    cfg = ExperimentConfig(seed=11, n_list=(1000, 10000), c=5.4, trials=trials, out_dir=out)
    recs, paths = run_experiment(cfg)
    print(f"{'n':>6} {'trial':>5} {'h':>6} {'s':>6} {'t':>5} {'t/s':>6} {'rotations':>9} hard checks")
    for r in recs:
        print(f"{r.n:>6} {r.trial:>5} {r.h:>6} {r.s:>6} {r.t:>5} {r.t / r.s:6.3f} {r.rotations:>9} "
              f"{'pass' if r.hard_ok else 'FAIL'}")
    print("\nfirst lines of", paths["csv"].name)
    print("\n".join(paths["csv"].read_text().splitlines()[:3]))
