"""Write the CSV data behind every figure into one directory.

Analytic figures take seconds. The mean-versus-max figures (6 and 7) are
simulated and need --replications; they are skipped when it is omitted.

    python scripts/reproduce_all.py --out results --replications 2000
"""

import argparse
import sys
import time

from spatial_aloha import cli, figures


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results")
    parser.add_argument("--replications", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    status = 0
    for name in figures.FIGURES:
        argv = ["reproduce", name, "--out", args.out, "--seed", str(args.seed), "--workers", str(args.workers)]
        if args.replications is not None:
            argv += ["--replications", str(args.replications)]
        elif name in figures.SIMULATION_FIGURES:
            print(f"skipping {name} (needs --replications)")
            continue
        start = time.perf_counter()
        code = cli.main(argv)
        print(f"{name}: exit {code} in {time.perf_counter() - start:.1f}s")
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())
