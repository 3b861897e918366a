"""Print a timing table over sizes for a few implementations, plus the doubling ratios."""
import argparse
import sys

from moafft.cli import sweep_csv, build_parser, sweep_command

DEFAULT_ENTRIES = "seq:inplace,seq:vector,plan:combined,dist:partitioned,shm:simple-shared"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="6-14")
    ap.add_argument("--entries", default=DEFAULT_ENTRIES)
    ap.add_argument("--m", default="4")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    table = sweep_command(build_parser().parse_args(
        ["sweep", "--sizes", args.sizes, "--entries", args.entries, "--m", args.m,
         "--repeat", str(args.repeat)]))
    sys.stdout.write(sweep_csv(table))
    print()
    for name, pairs in table["doubling"].items():
        ratios = " ".join(f"{p['ratio']:.2f}" for p in pairs)
        print(f"{name:<28} time ratio per doubling: {ratios}")


if __name__ == "__main__":
    main()
