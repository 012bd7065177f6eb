"""Pure-Python versions of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same floating-point accumulation order, so both backends produce
bit-identical results.
"""

import numpy as np

BACKEND = "python"


def combine_masses(a_masks, a_vals, b_masks, b_vals):
    """Accumulate pairwise mass products keyed by intersection.

    Returns ``(products, conflict)`` where ``products`` maps each nonempty
    intersection bitmask to its summed product and ``conflict`` is the total
    product mass that fell on the empty set.
    """
    products = {}
    get = products.get
    conflict = 0.0
    b_pairs = list(zip(b_masks, b_vals))
    for am, av in zip(a_masks, a_vals):
        for bm, bv in b_pairs:
            key = am & bm
            if key:
                products[key] = get(key, 0.0) + av * bv
            else:
                conflict += av * bv
    return products, conflict


def pignistic_masses(masks, vals, size):
    """Split every mass uniformly over the members of its focal set."""
    probs = [0.0] * size
    for mask, val in zip(masks, vals):
        share = val / mask.bit_count()
        while mask:
            low = mask & -mask
            probs[low.bit_length() - 1] += share
            mask ^= low
    return np.array(probs, dtype=np.float64)


def singleton_support(masks, vals, size):
    """Per-element summed mass of the focal sets containing it.

    Returns ``(support, weighted)`` with ``weighted = sum(m(C) * |C|)``.
    """
    support = [0.0] * size
    weighted = 0.0
    for mask, val in zip(masks, vals):
        weighted += val * mask.bit_count()
        while mask:
            low = mask & -mask
            support[low.bit_length() - 1] += val
            mask ^= low
    return np.array(support, dtype=np.float64), weighted
