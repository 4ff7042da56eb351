"""Pure numpy pricing kernels (fallback for the compiled ``_pricing`` extension).

Columns are held in padded ("ELL") form: ``rows[j]`` and ``vals[j]`` list the
nonzeros of column j, padded with value 0.
"""

import numpy as np


def column_dots(rows, vals, y):
    """``d_j = a_j . y`` for every column."""
    return np.einsum("jk,jk->j", vals, y[rows])


def price_dantzig(rows, vals, y):
    """Column with the largest ``|a_j . y|`` and its dot product (first index on ties)."""
    d = column_dots(rows, vals, y)
    j = int(np.argmax(np.abs(d)))
    return j, float(d[j])


def price_bland(rows, vals, y, threshold):
    """Lowest-index column with ``|a_j . y| > threshold``; ``(-1, 0.0)`` if none."""
    d = column_dots(rows, vals, y)
    hits = np.flatnonzero(np.abs(d) > threshold)
    if hits.size == 0:
        return -1, 0.0
    j = int(hits[0])
    return j, float(d[j])


def max_abs_dot(rows, vals, y):
    d = column_dots(rows, vals, y)
    return float(np.max(np.abs(d))) if d.size else 0.0
