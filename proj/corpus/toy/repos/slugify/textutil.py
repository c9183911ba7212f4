# SPDX-License-Identifier: Apache-2.0
import re


def slugify(text):
    """Lower-case, hyphen-separated form of text suitable for URLs."""
    words = re.findall(r"[A-Za-z0-9]+", text)
    return "-".join(words)


def truncate(text, width):
    if len(text) <= width:
        return text
    return text[: max(width - 3, 0)] + "..."
