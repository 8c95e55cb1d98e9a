"""Run the acceptance checks and keep a copy of the report.

    python scripts/run_validation.py --level full --out validation.txt

Exit status follows the CLI: 0 when every criterion passes, 3 otherwise.
"""

import argparse
import sys

from spatial_aloha import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--level", choices=("fast", "full"), default="full")
    parser.add_argument("--out", default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--replications", type=int, default=None, help="override every criterion's default count")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    argv = ["validate", "--level", args.level, "--seed", str(args.seed), "--workers", str(args.workers)]
    if args.out:
        argv += ["--out", args.out]
    if args.replications:
        argv += ["--replications", str(args.replications)]
    return cli.main(argv)


if __name__ == "__main__":
    sys.exit(main())
