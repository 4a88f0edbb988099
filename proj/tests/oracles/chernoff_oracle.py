#!/usr/bin/env python3
"""Independent oracle for the fixed-confidence sample-size formula.

N(eps, delta) = ceil( ln(2/delta) / (2 eps^2) )

Run to regenerate the constants frozen into tests/smc_test.cpp.
"""
import math


def sample_size(eps: float, delta: float) -> int:
    return math.ceil(math.log(2.0 / delta) / (2.0 * eps * eps))


CASES = [(0.01, 0.05), (0.05, 0.01), (0.5, 0.99)]

if __name__ == "__main__":
    for eps, delta in CASES:
        print(f"eps={eps} delta={delta} -> N={sample_size(eps, delta)}")
