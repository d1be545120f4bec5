"""Regenerate the shipped proximity model.

Trains logistic coefficients on two runs of the default office scenario
family and writes them to src/proxigraph/data/default_model.json. Output is
deterministic: rerunning reproduces the file byte for byte.
"""
from pathlib import Path

from proxigraph.sim import calibrate_classifier, office_scenario, run_scenario
from proxigraph.sim.calibrate import labeled_windows

TRAIN_SEEDS = (11, 12)
OUT = Path(__file__).resolve().parents[1] / "src" / "proxigraph" / "data" / "default_model.json"


def main() -> None:
    labeled = []
    for seed in TRAIN_SEEDS:
        output = run_scenario(office_scenario(n_agents=20, duration_min=30, seed=seed))
        labeled.extend(labeled_windows(output))
    model = calibrate_classifier(labeled)
    near = sum(1 for _, y in labeled if y)
    OUT.write_text(model.to_json() + "\n", encoding="utf-8")
    print(f"trained on {len(labeled)} windows ({near} near), wrote {OUT}")


if __name__ == "__main__":
    main()
