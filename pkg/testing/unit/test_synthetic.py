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

import unittest

from . import UnitTestCase
from abstain import errors
from abstain import metrics
from abstain import records
from abstain import splits
from abstain import synthetic
from abstain import uncertainty


def auc_of(recs):
    scores = uncertainty.score_records(recs).as_dict()
    return metrics.roc_auc([(scores[r.id], r.label) for r in recs])


class SyntheticTest(UnitTestCase):
    def test_error_count(self):
        recs = synthetic.make_synthetic(2000, 3.0, 0.3, 1)
        errs = sum(r.label for r in recs)
        self.assertTrue(540 <= errs <= 660, errs)

    def test_separated(self):
        self.assertGreater(auc_of(synthetic.make_synthetic(1000, 3.0, 0.3, 2)), 0.99)

    def test_no_separation(self):
        self.assertAlmostEqual(auc_of(synthetic.make_synthetic(2000, 0.0, 0.3, 3)), 0.5, delta=0.05)

    def test_deterministic(self):
        a = synthetic.make_synthetic(50, 1.0, 0.5, 4)
        b = synthetic.make_synthetic(50, 1.0, 0.5, 4)
        self.assertEqual(a, b)
        self.assertNotEqual(a, synthetic.make_synthetic(50, 1.0, 0.5, 5))

    def test_records_are_valid(self):
        path = self.path(u"syn.jsonl")
        written = synthetic.write_synthetic(path, 30, 2.0, 0.4, 6)
        loaded = records.load_log(path)
        self.assertEqual(loaded, written)
        for r in loaded:
            self.assertEqual(records.derive_label(r), r.label)
            self.assertEqual(r.pred_sql == r.gold_sql, r.label == 0)
            splits.lex_sql(r.pred_sql)
            self.assertEqual(uncertainty.max_entropy_score(r), max(r.token_values))

    def test_invalid_parameters(self):
        self.assertRaises(errors.UserError, synthetic.make_synthetic, 5, 1.0, 0.3, 1)
        self.assertRaises(errors.UserError, synthetic.make_synthetic, 100, -1.0, 0.3, 1)
        self.assertRaises(errors.UserError, synthetic.make_synthetic, 100, 1.0, 1.5, 1)


if __name__ == u"__main__":
    unittest.main()
