# -*- Mode:Python; indent-tabs-mode:nil; tab-width:4; encoding:utf8 -*-
#
# This file is part of abstain.
#
# abstain is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by the
# Free Software Foundation; either version 2 of the License, or (at your
# option) any later version.
#
# abstain is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with abstain; if not, write to the Free Software Foundation,
# Inc., 59 Temple Place, Suite 330, Boston, MA 02111-1307 USA

import math
import unittest

import numpy as np

from . import UnitTestCase
from abstain import errors
from abstain import records
from abstain import uncertainty


def make(kind, values, rid=u"q1"):
    return records.PredictionRecord(rid, u"q", u"SELECT 1", u"SELECT 1", kind, values)


class TokenEntropyTest(UnitTestCase):
    def test_one_hot(self):
        self.assertEqual(uncertainty.token_entropy([1, 0, 0]), 0.0)

    def test_uniform(self):
        self.assertAlmostEqual(uncertainty.token_entropy([0.5, 0.5]), 0.693147, places=6)
        self.assertAlmostEqual(uncertainty.token_entropy([0.25] * 4), 1.386294, places=6)

    def test_bad_vectors(self):
        for dist in ([], [0.5, -0.1, 0.6], [0.2, 0.2]):
            with self.assertRaises(errors.InvariantError):
                uncertainty.token_entropy(dist)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(3)
        for _i in range(20):
            p = rng.dirichlet(np.ones(6))
            self.assertAlmostEqual(uncertainty.token_entropy(p), uncertainty.token_entropy(rng.permutation(p)),
                                   places=12)


class MaxEntropyTest(UnitTestCase):
    def test_entropies(self):
        self.assertAlmostEqual(uncertainty.max_entropy_score(make(records.TOKEN_ENTROPIES, [0.0, 0.6931])), 0.6931)

    def test_one_hot_tokens(self):
        rec = make(records.FULL_DISTRIBUTIONS, [[1.0, 0.0], [0.0, 1.0]])
        self.assertEqual(uncertainty.max_entropy_score(rec), 0.0)

    def test_distributions(self):
        rec = make(records.FULL_DISTRIBUTIONS, [[1, 0], [0.5, 0.5], [0.9, 0.1]])
        self.assertAlmostEqual(uncertainty.max_entropy_score(rec), 0.693147, places=6)

    def test_logprobs_inapplicable(self):
        with self.assertRaises(errors.MethodError):
            uncertainty.max_entropy_score(make(records.CHOSEN_LOGPROBS, [-0.1]))

    def test_flattening_never_decreases(self):
        rng = np.random.default_rng(11)
        for _i in range(50):
            dists = [rng.dirichlet(np.ones(5)) for _j in range(4)]
            base = uncertainty.max_entropy_score(make(records.FULL_DISTRIBUTIONS, [d.tolist() for d in dists]))
            eps = rng.random()
            pos = rng.integers(4)
            dists[pos] = (1 - eps) * dists[pos] + eps * np.full(5, 0.2)
            flat = uncertainty.max_entropy_score(make(records.FULL_DISTRIBUTIONS, [d.tolist() for d in dists]))
            self.assertGreaterEqual(flat, base - 1e-12)
            self.assertLessEqual(flat, math.log(5) + 1e-12)


class NspTest(UnitTestCase):
    def test_certain(self):
        self.assertEqual(uncertainty.nsp_score(make(records.CHOSEN_LOGPROBS, [0.0, 0.0])), 0.0)

    def test_halves(self):
        rec = make(records.CHOSEN_LOGPROBS, [math.log(0.5), math.log(0.5)])
        self.assertAlmostEqual(uncertainty.nsp_score(rec), 0.693147, places=6)

    def test_single_token(self):
        self.assertAlmostEqual(uncertainty.nsp_score(make(records.CHOSEN_LOGPROBS, [math.log(0.1)])),
                               2.302585, places=6)

    def test_from_distributions(self):
        rec = make(records.FULL_DISTRIBUTIONS, [[0.5, 0.5], [0.1, 0.9]])
        self.assertAlmostEqual(uncertainty.nsp_score(rec), -(math.log(0.5) + math.log(0.9)) / 2)

    def test_zero_probability(self):
        with self.assertRaises(errors.MethodError) as cm:
            uncertainty.nsp_score(make(records.CHOSEN_LOGPROBS, [-0.1, float(u"-inf")]))
        self.assertIn(u"position 1", str(cm.exception))

    def test_duplicated_sequence(self):
        lp = [-0.1, -2.0, -0.7]
        one = uncertainty.nsp_score(make(records.CHOSEN_LOGPROBS, lp))
        two = uncertainty.nsp_score(make(records.CHOSEN_LOGPROBS, lp + lp))
        self.assertAlmostEqual(one, two, places=12)

    def test_entropies_inapplicable(self):
        with self.assertRaises(errors.MethodError):
            uncertainty.nsp_score(make(records.TOKEN_ENTROPIES, [0.1]))


class ScoreVectorTest(UnitTestCase):
    def test_write_read(self):
        recs = [make(records.TOKEN_ENTROPIES, [0.1, 0.4], u"a"), make(records.TOKEN_ENTROPIES, [0.2], u"b")]
        sv = uncertainty.score_records(recs, uncertainty.MAX_ENTROPY)
        self.assertEqual(sv.orientation, uncertainty.HIGHER_IS_UNCERTAIN)
        path = self.path(u"scores.jsonl")
        sv.write(path)
        back = uncertainty.ScoreVector.read(path)
        self.assertEqual(back, sv)
        self.assertEqual(back.as_dict(), {u"a": 0.4, u"b": 0.2})
        self.assertEqual(back.subset([u"b"]).ids(), [u"b"])

    def test_unknown_method(self):
        with self.assertRaises(errors.UserError):
            uncertainty.score_records([], u"entropy-sum")


if __name__ == u"__main__":
    unittest.main()
