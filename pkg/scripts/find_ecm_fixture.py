"""Pick a 40-bit semiprime plus (seed, B1, curves) that both ECM engines factor.

Usage: python3 scripts/find_ecm_fixture.py [B1] [curves]
"""

import json
import random
import sys
import time

from sympy import nextprime

from ecarith.ecm import EcmParams, ecm_stage1


def main(B1: int, curves: int) -> None:
    rng = random.Random(2024)
    while True:
        p = nextprime(rng.getrandbits(20) | 1 << 19)
        q = nextprime(rng.getrandbits(20) | 1 << 19)
        N = p * q
        if N.bit_length() != 40 or p == q:
            continue
        for seed in range(20):
            t0 = time.perf_counter()
            results = [ecm_stage1(EcmParams(N, B1, seed, curves, engine)) for engine in ("montgomery", "fused")]
            elapsed = time.perf_counter() - t0
            if all(r.found for r in results):
                print(
                    json.dumps(
                        {
                            "N": hex(N),
                            "p": hex(min(p, q)),
                            "q": hex(max(p, q)),
                            "B1": B1,
                            "seed": seed,
                            "curves": curves,
                            "seconds": round(elapsed, 3),
                            "factors": [r.factor for r in results],
                            "curves_tried": [r.curves_tried for r in results],
                        }
                    )
                )
                return


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 300, int(sys.argv[2]) if len(sys.argv) > 2 else 30)
