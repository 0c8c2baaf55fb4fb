"""
Moments of a free sum two ways: R-transforms of the summands versus
counting words that reduce to the identity in Z2 * Z3.
"""
from freespec import free_convolution_moments
from freespec.distributions import ArcsineShift, Cyclic
from freespec.oracle import trace_moment

order = 12
seqs = [Cyclic(2).moment_sequence(order), Cyclic(3).moment_sequence(order)]
conv = free_convolution_moments(seqs, order)
words = [trace_moment((2, 3), p) for p in range(order + 1)]

for p, (a, b) in enumerate(zip(conv, words)):
    print(f"m_{p:<2} {str(a):>6} {b:>6}  {'ok' if a == b else 'MISMATCH'}")

# %% two arcsine laws add up to the law of a + a* + b + b*, i.e. the simple
# random walk on the free group with two generators (times 4)
arc = ArcsineShift().moment_sequence(8)
print([int(m) for m in free_convolution_moments([arc, arc], 8)])
