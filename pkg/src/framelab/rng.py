"""Deterministic random-stream derivation.

Every stochastic routine derives an independent generator from
``(seed, domain, index)``, so per-trial results never depend on execution
order or on how much randomness an earlier trial consumed.  Domain tags
keep different uses of the same experiment seed from colliding.
"""

import numpy as np

# Domain tags. Values are frozen: changing them changes every golden output.
MASK = 0      # erasure masks, one stream per trial
INPUT = 1     # deterministic test input vectors
SIGNS = 2     # Bernoulli +-1 draws, one stream per trial
COEFFS = 3    # random coefficient vectors (lambda)
SUBSETS = 4   # sampled column subsets
PROBE = 5     # probe vectors x
FAMILY = 6    # random matrix families
DISTR = 7     # probe-coefficient distribution draws, one stream per trial


def substream(seed, domain, index=0):
    """Return a fresh ``numpy.random.Generator`` keyed by (seed, domain, index)."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, int(domain), int(index)]
    return np.random.default_rng(np.random.SeedSequence(entropy))
