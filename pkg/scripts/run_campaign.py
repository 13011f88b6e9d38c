"""Run the property campaign and print per-suite counts, plus how often W_int is strictly coarser."""
import argparse
import json
import time

from umwelt.campaign import SUITES, run_campaign
from umwelt.intrinsic import intrinsic_partition
from umwelt.random_models import ModelBounds, model_rng, random_model
from umwelt.refinement import w_sep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--max-w", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--suites", nargs="+", default=list(SUITES), choices=SUITES)
    ap.add_argument("--witness-dir", default="witnesses")
    args = ap.parse_args()

    start = time.perf_counter()
    summary = run_campaign(args.count, args.max_w, args.seed, witness_dir=args.witness_dir,
                           suites=tuple(args.suites))
    elapsed = time.perf_counter() - start
    bounds = ModelBounds(max_w=args.max_w)
    strict = sum(intrinsic_partition(m).partition != w_sep(m)[0]
                 for m in (random_model(model_rng(args.seed, k), bounds) for k in range(args.count)))
    report = summary.to_json()
    report["strict_containment"] = strict
    report["seconds"] = round(elapsed, 2)
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
