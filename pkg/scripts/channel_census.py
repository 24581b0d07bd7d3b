"""Crossing-count census over random state pairs, per channel.

Prints a frequency table of detected ergotropy-crossing counts for the
damping, flip, and structured-bath channels. Markovian rows should only
ever show counts 0 and 1; the structured bath adds odd counts > 1.
"""

from collections import Counter

import numpy as np

from ergoflux import GADC, BlochVector, NonMarkovADC, Pauli, ergotropy_crossings
from ergoflux.errors import OrderingError

N_PAIRS = 400
SEED = 1

CHANNELS = [
    ("gadc T=0", GADC(gamma_minus=0.1, n_bose=0.0, h_z=1.0)),
    ("gadc hot", GADC(gamma_minus=0.1, n_bose=0.8, h_z=1.0)),
    ("pauli slow-z", Pauli(gamma_perp=0.05, gamma_z=0.005, h_z=1.0)),
    ("structured bath", NonMarkovADC(gamma=0.3, lam=0.03, delta=0.13, h_z=1.0)),
]


def random_pair(rng):
    while True:
        x1, x2 = rng.uniform(0.0, 0.9, 2)
        z1, z2 = rng.uniform(-0.9, 0.9, 2)
        if x1 * x1 + z1 * z1 <= 0.9 and x2 * x2 + z2 * z2 <= 0.9:
            return BlochVector(x1, 0.0, z1), BlochVector(x2, 0.0, z2)


for label, channel in CHANNELS:
    rng = np.random.default_rng(SEED)
    freq = Counter()
    done = 0
    while done < N_PAIRS:
        s1, s2 = random_pair(rng)
        try:
            rep = ergotropy_crossings(s1, s2, channel)
        except OrderingError:
            continue
        freq[rep.count] += 1
        done += 1
    row = "  ".join(f"{k}:{freq[k]}" for k in sorted(freq))
    print(f"{label:18s} {row}")
