"""Tabulate messages and elements moved by each redistribution and distributed template."""
import argparse

import numpy as np

from moafft.fftseq import random_signal
from moafft.msgsim import DistTemplateId, RedistKind, make_states, redistribute, run_distributed
from moafft.plan import validate_config


def block_states(cfg, x):
    states = make_states(cfg)
    for st in states:
        g = np.arange(st.myid * cfg.psize, (st.myid + 1) * cfg.psize)
        st.hold("x", g, x[g])
    return states


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ms", default="2,4,8,16")
    ap.add_argument("--psize", type=int, default=16, help="elements per processor")
    args = ap.parse_args()

    print(f"{'m':>3} {'direct':>7} {'m(m-1)':>7} {'central':>8} {'2(m-1)':>7}")
    for m in (int(v) for v in args.ms.split(",")):
        cfg = validate_config(m * max(args.psize, m), m)
        x = random_signal(cfg.n, 0)
        direct = redistribute(RedistKind.BLOCK_TO_CYCLIC_DIRECT, block_states(cfg, x), cfg).messages
        central = redistribute(RedistKind.BLOCK_TO_CYCLIC_VIA_CENTRAL, block_states(cfg, x), cfg).messages
        print(f"{m:>3} {direct:>7} {m * (m - 1):>7} {central:>8} {2 * (m - 1):>7}")

    print()
    print(f"{'template':<20} {'m':>3} {'messages':>9} {'elements':>9}")
    for m in (int(v) for v in args.ms.split(",")):
        cfg = validate_config(m * max(args.psize, m), m)
        x = random_signal(cfg.n, 0)
        for template in DistTemplateId:
            _, tr = run_distributed(template, x, cfg)
            print(f"{template.value:<20} {m:>3} {tr.messages:>9} {tr.elements_moved:>9}")


if __name__ == "__main__":
    main()
