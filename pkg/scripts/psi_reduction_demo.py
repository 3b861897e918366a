"""Show how indexing a composed expression rewrites to indexing its base array."""
import argparse

from moafft.moa import format_literal, iota, psi, reshape, reverse, rho, take


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--index", default="1 2", help="partial index, space separated")
    args = ap.parse_args()
    index = tuple(int(v) for v in args.index.split())

    A = reshape((3, 5, 4), iota(60))
    expr = take(2, reverse(A))
    print("shape of 2 take reverse A:", rho(expr))
    trace = []
    got = psi(index, expr, trace=trace)
    for line in trace:
        print(line)
    print(format_literal(got))


if __name__ == "__main__":
    main()
