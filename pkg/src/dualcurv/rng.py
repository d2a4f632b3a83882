"""Counter-based random streams for reproducible parallel Monte Carlo.

Every sample index owns a fixed block of one Philox counter keyed by the
user seed, so the value of sample ``i`` never depends on how the index
range was chunked or on the number of worker threads.
"""
import numpy as np

from ._parallel import pmap

CHUNK = 8192


def _uniform_block(seed, start, count, words_per_sample):
    # one Philox counter step yields four 64-bit words
    bitgen = np.random.Philox(key=int(seed) % 2**64)
    bitgen.advance(start * words_per_sample // 4)
    gen = np.random.Generator(bitgen)
    u = gen.random(count * words_per_sample)
    return u.reshape(count, words_per_sample)


def _words(dim):
    return 4 * ((dim + 3) // 4)


def gaussian_block(seed, start, count, dim):
    """Standard normal vectors for sample indices ``start .. start+count-1``.

    Box-Muller on the counter stream; each sample consumes a whole number
    of counter steps.
    """
    words = _words(dim)
    u = _uniform_block(seed, start, count, words)
    u1 = 1.0 - u[:, 0::2]  # (0, 1]
    u2 = u[:, 1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty((count, words))
    z[:, 0::2] = r * np.cos(2.0 * np.pi * u2)
    z[:, 1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:, :dim]


def sphere_block(seed, start, count, dim):
    """Uniform points on the unit sphere (normalised Gaussian vectors)."""
    z = gaussian_block(seed, start, count, dim)
    return z / np.linalg.norm(z, axis=1)[:, None]


def uniform_block(seed, start, count, dim):
    """Uniform points in ``[0, 1)^dim`` on the same counter layout."""
    return _uniform_block(seed, start, count, _words(dim))[:, :dim]


def chunked_sums(func, total, seed, dim, sampler=sphere_block):
    """Evaluate ``func`` on fixed-size chunks of samples and reduce.

    ``func`` maps an ``(m, dim)`` sample array to an ``(m, p)`` array of
    per-sample values. Returns per-column sums and sums of squares, reduced
    pairwise over chunks in index order.
    """
    starts = list(range(0, total, CHUNK))

    def work(start):
        count = min(CHUNK, total - start)
        vals = np.atleast_2d(np.asarray(func(sampler(seed, start, count, dim))))
        if vals.shape[0] != count:
            vals = vals.T
        return vals.sum(axis=0), (vals * vals).sum(axis=0)

    parts = pmap(work, starts)
    return pairwise_sum([p[0] for p in parts]), pairwise_sum([p[1] for p in parts])


def pairwise_sum(values):
    """Tree reduction with a fixed shape determined only by ``len(values)``."""
    values = list(values)
    if not values:
        return 0.0
    while len(values) > 1:
        nxt = [values[i] + values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            nxt.append(values[-1])
        values = nxt
    return values[0]
