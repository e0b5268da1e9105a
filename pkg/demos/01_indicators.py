"""
Average-Hamiltonian indicators of pulse words
==============================================

Five indicators score how well a pulse word cancels disorder, pair
interactions and pulse errors to leading order. Zero is perfect.
"""

import numpy as np

from doess import indicators, sequences

# the 13-code alphabet: Null plus +-X/+-Y rotations by pi, pi/2 and pi/3
for p in sequences.ALPHABET:
    print(p.code, p.axis, round(p.angle, 4))

# XY8 refocuses disorder but leaves the pair term untouched (i3 = 1)
xy8 = sequences.baseline("xy8")
print("XY8   ", np.round(indicators.indicator_vector(xy8), 4))

# the shipped 24-pulse reference word also cancels the pair term
ref = sequences.baseline("droid_r2d2")
print("ref   ", np.round(indicators.indicator_vector(ref), 4))

# a random word does neither
rng = np.random.default_rng(0)
word = sequences.random_codes(rng)
print("random", np.round(indicators.indicator_vector(word), 4))

# the repetition series: indicators of the word repeated r = 1..8 times;
# words with a net rotation average their error terms over repetitions
series = indicators.indicator_series(word, R=8)
print("i1 over repetitions", np.round(series[0], 3))

# batches are vectorized: 10^4 words take well under a second
batch = sequences.random_codes(rng, size=10_000)
ind = indicators.indicator_matrix(batch)
print("fraction passing the 0.25 filter:", np.mean(np.all(ind < 0.25, axis=1)))
