# SPDX-License-Identifier: Apache-2.0
from collections import Counter


def word_counts(text):
    """Case-insensitive word frequencies."""
    return Counter(text.split())


def top_word(text):
    counts = word_counts(text)
    if not counts:
        return None
    return counts.most_common(1)[0][0]
