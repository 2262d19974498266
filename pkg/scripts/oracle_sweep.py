"""Compare semi-naive against naive evaluation on many random instances.

    python3 scripts/oracle_sweep.py --n 5000 --seed 0
"""

import argparse
import random
import time
from collections import Counter

from nba.engine import infer, naive_infer
from nba.randgen import random_instance


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-individuals", type=int, default=8)
    parser.add_argument("--max-rules", type=int, default=6)
    args = parser.parse_args()

    disagreements = []
    rounds = Counter()
    t_semi = t_naive = 0.0
    for i in range(args.n):
        seed = args.seed + i
        instance = random_instance(random.Random(seed), args.max_individuals, args.max_rules)
        t0 = time.perf_counter()
        a = infer(*instance, strict=False, check=False)
        t1 = time.perf_counter()
        b = naive_infer(*instance, strict=False, check=False)
        t2 = time.perf_counter()
        t_semi += t1 - t0
        t_naive += t2 - t1
        rounds[a.rounds] += 1
        if a.fact_set != b.fact_set or a.traces != b.traces:
            disagreements.append(seed)

    print(f"instances: {args.n}  disagreements: {len(disagreements)}")
    if disagreements:
        print(f"first disagreeing seeds: {disagreements[:10]}")
    print(f"rounds histogram: {dict(sorted(rounds.items()))}")
    print(f"time semi-naive {t_semi:.2f}s  naive {t_naive:.2f}s")


if __name__ == "__main__":
    main()
