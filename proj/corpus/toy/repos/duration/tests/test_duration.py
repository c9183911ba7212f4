# SPDX-License-Identifier: Apache-2.0
import unittest

from duration import parse_duration


class ParseDurationTest(unittest.TestCase):
    def test_hours(self):
        self.assertEqual(parse_duration("2h"), 7200)

    def test_mixed(self):
        self.assertEqual(parse_duration("1h30m"), 5400)

    def test_minutes_seconds(self):
        self.assertEqual(parse_duration("3m5s"), 185)

    def test_rejects_garbage(self):
        with self.assertRaises(ValueError):
            parse_duration("3x")


if __name__ == "__main__":
    unittest.main()
