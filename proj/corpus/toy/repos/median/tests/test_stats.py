# SPDX-License-Identifier: Apache-2.0
import unittest

from stats import mean, median


class MedianTest(unittest.TestCase):
    def test_odd_length(self):
        self.assertEqual(median([5, 1, 3]), 3)

    def test_even_length(self):
        self.assertEqual(median([4, 1, 3, 2]), 2.5)


class MeanTest(unittest.TestCase):
    def test_mean(self):
        self.assertEqual(mean([1, 2, 3, 4]), 2.5)


if __name__ == "__main__":
    unittest.main()
