"""Mordell-Weil sieve for the Weierstrass residue disk of X0+(107) at 61.

Runs the disk instance for each modulus given (default: 122 and 2 * #J(F_61)
= 9362) and prints the verdict with the number of surviving tuples.

    python scripts/x0plus107_sieve.py [--modulus 122 9362]
"""

import argparse
import time
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from qck.cli import load_config, sieve_instance
from qck.mwsieve import sieve_disk

FIX = Path(__file__).resolve().parent.parent / "fixtures" / "x0plus107"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modulus", type=int, nargs="+", default=[122, 9362])
    args = ap.parse_args()
    cfg = load_config(FIX / "config.toml")
    raw = tomllib.loads((FIX / "sieve_weierstrass.toml").read_text())
    for M in args.modulus:
        t = time.time()
        inst, constraint = sieve_instance({**raw, "M": M}, FIX, cfg)
        v = sieve_disk(inst, constraint)
        print(f"M = {M}: {v.status}; {len(v.survivors)} of {v.candidates} candidate tuples survive "
              f"({time.time() - t:.1f} s)")
        for pd in inst.primes:
            print(f"  v = {pd.v}: #J = {pd.order}, quotient {pd.moduli}, image size {len(pd.image)}")


if __name__ == "__main__":
    main()
