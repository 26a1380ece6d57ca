"""Throw random byte strings and corpus mutations at the parser; report crashes.

    python scripts/fuzz_parser.py --n 200000 --seed 3
"""
import argparse
import random
import sys
import time
import traceback
from collections import Counter
from importlib.resources import files
from pathlib import Path

from quml import QumlError, parse


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-len", type=int, default=256)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    corpus = [p.read_bytes() for p in sorted(Path(str(files("quml") / "corpus")).glob("*.quml"))]
    outcome: Counter[str] = Counter()
    t0 = time.perf_counter()
    for i in range(args.n):
        if i % 2:
            src = rng.choice(corpus)
            a = rng.randrange(len(src))
            data = src[:a] + rng.randbytes(rng.randint(0, 8)) + src[a + rng.randint(0, 30):]
        else:
            data = rng.randbytes(rng.randint(0, args.max_len))
        try:
            parse(data)
            outcome["accepted"] += 1
        except QumlError as exc:
            outcome["rejected"] += 1
            outcome.update(d.code for d in exc.diagnostics)
        except Exception:  # noqa: BLE001
            outcome["crash"] += 1
            print(f"crash on input {data!r}")
            traceback.print_exc()
    print(f"inputs={args.n} time={time.perf_counter() - t0:.1f}s " +
          " ".join(f"{k}={v}" for k, v in sorted(outcome.items())))
    return 1 if outcome["crash"] else 0


if __name__ == "__main__":
    sys.exit(main())
