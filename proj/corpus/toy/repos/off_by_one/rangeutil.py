# SPDX-License-Identifier: Apache-2.0
"""Integer range helpers."""


def inclusive_range(start, stop):
    """Return the integers from start to stop, both ends included."""
    return list(range(start, stop))


def span(values):
    """Number of integers between min and max of values, inclusive."""
    if not values:
        return 0
    return max(values) - min(values) + 1
