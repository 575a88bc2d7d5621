"""Counter-based deterministic randomness built on the splitmix64 mixer.

Every random draw in this package is a pure function of a 64-bit key and a
counter (an edge code, a grid index, a coefficient index).  There is no
stateful generator to advance, so draws are independent of evaluation order,
identical across platforms, and safe to evaluate from any number of workers.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Fixed stream tags.  Each consumer of randomness folds its own tag into the
# user seed so that distinct purposes (edge sampling, trial seeds, initial
# conditions) never share a stream.
EDGE_STREAM_TAG = 0xC2B2AE3D27D4EB4F
ETA_STREAM_TAG = 0x9E6C63D0A52C4B83
TRIAL_TAGS = (
    0xD6E8FEB86659FD93,  # n-grid index
    0xA5A3B1C9063F2D17,  # p-grid index
    0x8CB92BA72F3D8DD7,  # beta-grid index
    0xEF1E2D3C4B5A6987,  # trial index
)


def splitmix64(value: int) -> int:
    """One splitmix64 step on a Python integer (interpreted mod 2**64)."""
    z = (value + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _mix_array(z: np.ndarray) -> np.ndarray:
    """Vectorised splitmix64 step on a uint64 array (wrapping arithmetic)."""
    z = (z + np.uint64(_GOLDEN)) & np.uint64(_MASK64)
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)) & np.uint64(_MASK64)
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)) & np.uint64(_MASK64)
    return z ^ (z >> np.uint64(31))


def _to_unit(z: np.ndarray) -> np.ndarray:
    """Map uint64 words to floats in [0, 1) using the top 53 bits."""
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def pair_uniforms(seed: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Uniform [0,1) variates for vertex pairs, keyed by (seed, i, j).

    The pair code packs i and j into one word (graphs up to 2**32 nodes),
    which is XOR-folded with the seed-derived stream base and passed through
    two mixer rounds.  Evaluating pairs in any order or partition yields the
    same variates.
    """
    base = np.uint64(splitmix64(seed ^ EDGE_STREAM_TAG))
    code = (np.asarray(i, dtype=np.uint64) << np.uint64(32)) | np.asarray(
        j, dtype=np.uint64
    )
    return _to_unit(_mix_array(_mix_array(code ^ base)))


def counter_uniforms(seed: int, tag: int, count: int) -> np.ndarray:
    """Uniform [0,1) stream of `count` values keyed by (seed, tag)."""
    base = np.uint64(splitmix64(seed ^ tag))
    codes = np.arange(count, dtype=np.uint64)
    return _to_unit(_mix_array(_mix_array(codes ^ base)))


def derive_trial_seed(
    master_seed: int, n_index: int, p_index: int, beta_index: int, trial_index: int
) -> int:
    """Per-trial seed as a pure function of the master seed and grid indices.

    Each index is folded in with its own fixed tag, so neighbouring cells and
    trials get unrelated streams and the result does not depend on grid
    shapes or iteration order.
    """
    state = master_seed & _MASK64
    indices = (n_index, p_index, beta_index, trial_index)
    for tag, index in zip(TRIAL_TAGS, indices):
        state = splitmix64(state ^ tag ^ (index & _MASK64))
    return state
