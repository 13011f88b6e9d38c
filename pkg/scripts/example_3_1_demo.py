"""Walk through the five-state example: partitions, invariance witness, alpha' and its certificates."""
from pathlib import Path

from umwelt import (check_invariance, intrinsic_partition, minimize, sensor_process, sigma_beta, w_am, w_sep)
from umwelt.io import load_model

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "example_3_1.json"


def main() -> None:
    model, _ = load_model(FIXTURE)
    print("sigma(beta)     ", sigma_beta(model))
    sep, trace = w_sep(model)
    for n, stage in enumerate(trace.stages):
        print(f"  stage {n}        {stage}")
    print("W_sep           ", sep, f"(fixpoint index {trace.fixpoint_index})")
    print("W_am            ", w_am(model)[0])
    res = intrinsic_partition(model)
    print("W_int           ", res.partition, f"(basis dimension {res.basis.dimension})")
    inv = check_invariance(model, res.partition)
    print("W_int invariant?", inv.ok, inv.to_json())
    for w in model.W.states:
        table = sensor_process(model, w, ("a0",) * 2).table
        print(f"  P(s1 s2 | w={w}) ", {"".join(k): str(v) for k, v in table.items()})
    mod, cert, mini = minimize(model, mc_samples=100_000, seed=0)
    print("selector        ", mod.selector.to_json())
    for w, row in zip(model.W.states, mod.alpha_prime.rows):
        print(f"  alpha'({w})      ", [str(x) for x in row])
    print("equivalent      ", cert.ok, " MC max TV", max(c["tv"] for c in cert.monte_carlo))
    print("W_sep(alpha')   ", mini.sep_modified, " equals W_int:", mini.ok)


if __name__ == "__main__":
    main()
