"""Search random memoryless models for W_am finer than, or incomparable with, W_sep.

Nothing is asserted: the relation is reported per instance and any model where
W_am does not coarsen W_sep is saved for inspection.
"""
import argparse
import json
from collections import Counter
from pathlib import Path

from umwelt.io import model_to_json
from umwelt.random_models import ModelBounds, model_rng, random_model
from umwelt.refinement import compare_am_sep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=5000)
    ap.add_argument("--max-w", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="am_sep_hits")
    args = ap.parse_args()

    bounds = ModelBounds(max_w=args.max_w)
    tally = Counter()
    out = Path(args.out)
    for k in range(args.count):
        m = random_model(model_rng(args.seed, k), bounds, memoryless=True)
        rep = compare_am_sep(m)
        if rep["equal"]:
            tally["equal"] += 1
        elif rep["am_coarsens_sep"]:
            tally["am strictly coarser"] += 1
        else:
            tally["am not coarser"] += 1
            out.mkdir(exist_ok=True)
            doc = model_to_json(m)
            doc["comparison"] = rep
            (out / f"model-{args.seed}-{k}.json").write_text(json.dumps(doc, indent=2))
    print(json.dumps(dict(sorted(tally.items())), indent=2))


if __name__ == "__main__":
    main()
