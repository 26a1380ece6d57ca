"""Compare fixpoint inference against the brute-force closure oracle on random models.

    python scripts/oracle_sweep.py --models 5000 --max-classes 12 --seed 1
"""
import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from oracle import oracle_quantum_classes  # noqa: E402

from quml import format, infer, load  # noqa: E402
from quml.random_models import augment, random_model  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--models", type=int, default=1000)
    ap.add_argument("--max-classes", type=int, default=12)
    ap.add_argument("--p-quantum", type=float, default=0.08)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    mismatches = flips = quantum = total = 0
    t0 = time.perf_counter()
    for i in range(args.models):
        tree = random_model(rng, args.max_classes, args.p_quantum)
        m = load(format(tree))
        qm = infer(m)
        got = {c for c, v in qm.class_of.items() if v.is_quantum}
        if got != oracle_quantum_classes(m):
            mismatches += 1
            print(f"mismatch on model {i}:\n{format(tree)}")
        quantum += len(got)
        total += len(m.classes)
        after = infer(load(format(augment(rng, tree, args.p_quantum))))
        flips += sum(1 for c in got if not after.class_of[c].is_quantum)
    dt = time.perf_counter() - t0
    print(f"models={args.models} classes={total} quantum={quantum} "
          f"mismatches={mismatches} monotonicity_flips={flips} time={dt:.2f}s")
    return 1 if mismatches or flips else 0


if __name__ == "__main__":
    sys.exit(main())
