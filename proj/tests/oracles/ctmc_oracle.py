#!/usr/bin/env python3
"""Independent transient-analysis oracle for a small birth-death net.

Model (mirrors the `birth_death` net built in tests/shlpn_test.cpp):
  one place holding 0..3 tokens, initially 1.
  birth:  rate 2.0, enabled while tokens < 3, adds a token
  death:  rate 1.0 * tokens (marking-dependent), removes a token

That is a CTMC on states {0,1,2,3} with generator

      Q[i, i+1] = 2          (i < 3)
      Q[i, i-1] = 1 * i      (i > 0)

State 0 is NOT absorbing here only if birth is enabled at 0; we keep birth
enabled at 0 (guard: tokens < 3), so the chain is irreducible.

The oracle computes the exact transient distribution p(t) = p(0) expm(Q t)
and the expected token count at several probe times, plus the probability
that tokens >= 2 at t — values frozen into tests/smc_test.cpp and
tests/shlpn_test.cpp.
"""
import numpy as np
from scipy.linalg import expm

BIRTH = 2.0
DEATH = 1.0
STATES = 4  # tokens in 0..3


def generator() -> np.ndarray:
    q = np.zeros((STATES, STATES))
    for i in range(STATES):
        if i + 1 < STATES:
            q[i, i + 1] = BIRTH
        if i > 0:
            q[i, i - 1] = DEATH * i
    np.fill_diagonal(q, -q.sum(axis=1))
    return q


def transient(t: float) -> np.ndarray:
    p0 = np.zeros(STATES)
    p0[1] = 1.0  # initial marking: one token
    return p0 @ expm(generator() * t)


if __name__ == "__main__":
    for t in (0.5, 1.0, 2.0):
        p = transient(t)
        mean = float(np.dot(p, np.arange(STATES)))
        p_ge2 = float(p[2] + p[3])
        print(f"t={t}: p={np.array2string(p, precision=12)}")
        print(f"    mean_tokens={mean:.12f}  P(tokens>=2)={p_ge2:.12f}")
