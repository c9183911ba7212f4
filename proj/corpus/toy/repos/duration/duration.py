# SPDX-License-Identifier: Apache-2.0
import re

_UNITS = {"h": 360, "m": 60, "s": 1}


def parse_duration(text):
    """Seconds in a duration such as '1h30m' or '45s'."""
    parts = re.findall(r"(\d+)([hms])", text)
    if not parts or "".join(n + u for n, u in parts) != text:
        raise ValueError(f"bad duration: {text!r}")
    return sum(int(n) * _UNITS[u] for n, u in parts)
