"""Check the betweenness/CD identities on seeded random neighborhoods and print a summary."""

import argparse
import random
import time
from collections import Counter

from citedisrupt.oracle import check_identities, random_cd_census, random_cd_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=1000)
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args()

    start = time.perf_counter()
    passed, failed, vacuous = Counter(), Counter(), Counter()
    worst = Counter()
    for seed in range(args.instances):
        census = random_cd_census(random.Random(seed))
        g, v = random_cd_instance(seed, *census)
        for r in check_identities(g, v, args.tol, f"seed{seed}"):
            (passed if r.passed else failed)[r.identity] += 1
            if r.left is None and r.right is None:
                vacuous[r.identity] += 1
            worst[r.identity] = max(worst[r.identity], r.abs_diff)
    for name in sorted(passed | failed):
        print(f"{name:<42} pass {passed[name]:>5}  fail {failed[name]:>3}  "
              f"undefined {vacuous[name]:>4}  max err {worst[name]:.1e}")
    print(f"{args.instances} instances in {time.perf_counter() - start:.1f} s")
    raise SystemExit(1 if sum(failed.values()) else 0)


if __name__ == "__main__":
    main()
