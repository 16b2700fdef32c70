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
from sklearn import metrics as skmetrics

from . import UnitTestCase
from abstain import errors
from abstain import metrics
from abstain.selective import Decision


def brute_auc(scores, y):
    pos = [s for s, t in zip(scores, y) if t]
    neg = [s for s, t in zip(scores, y) if not t]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def decisions_from(flags):
    return [Decision(u"r%d" % i, bool(a), 0.9 if a else 0.1) for i, a in enumerate(flags)]


def labels_from(ys):
    return dict((u"r%d" % i, int(y)) for i, y in enumerate(ys))


class BrierTest(UnitTestCase):
    def test_perfect(self):
        self.assertEqual(metrics.brier([(1.0, 1), (0.0, 0)]), 0.0)

    def test_half(self):
        self.assertEqual(metrics.brier([(0.5, 1)]), 0.25)

    def test_mean_not_sum(self):
        self.assertAlmostEqual(metrics.brier([(0.8, 1), (0.8, 0)]), 0.34)
        self.assertAlmostEqual(metrics.brier_sum([(0.8, 1), (0.8, 0)]), 0.68)

    def test_empty(self):
        self.assertRaises(errors.DataError, metrics.brier, [])

    def test_out_of_range(self):
        self.assertRaises(errors.InvariantError, metrics.brier, [(1.2, 1)])
        self.assertRaises(errors.InvariantError, metrics.brier, [(0.5, 2)])

    def test_base_rate_minimizes(self):
        rng = np.random.default_rng(3)
        y = (rng.random(300) < 0.3).astype(int)
        rate = float(y.mean())
        best = metrics.brier([(rate, t) for t in y])
        for delta in (-0.01, 0.01):
            self.assertLess(best, metrics.brier([(rate + delta, t) for t in y]))


class FBetaTest(UnitTestCase):
    def test_perfect(self):
        for beta in (0.25, 1.0, 5.0):
            self.assertEqual(metrics.f_beta(metrics.ConfusionCounts(tp=1), beta), 1.0)

    def test_symmetric_counts(self):
        c = metrics.ConfusionCounts(tp=2, fp=1, fn=1)
        for beta in (0.5, 1.0, 2.0):
            self.assertAlmostEqual(metrics.f_beta(c, beta), 2.0 / 3.0)

    def test_asymmetric(self):
        c = metrics.ConfusionCounts(tp=3, fp=2, fn=1)
        self.assertAlmostEqual(metrics.f_beta(c, 2.0), 15.0 / 21.0)

    def test_degenerate(self):
        c = metrics.ConfusionCounts(tn=5)
        self.assertEqual(metrics.f_beta(c, 1.0), 0.0)
        self.assertFalse(c.f_beta_defined)

    def test_negative_beta(self):
        self.assertRaises(errors.UserError, metrics.f_beta, metrics.ConfusionCounts(tp=1), -1.0)

    def test_f1_is_harmonic_mean(self):
        rng = np.random.default_rng(11)
        for _i in range(200):
            tp, fp, fn = (int(v) for v in rng.integers(1, 50, 3))
            c = metrics.ConfusionCounts(tp=tp, fp=fp, fn=fn)
            p, r, _fdr = metrics.precision_recall_fdr(c)
            self.assertAlmostEqual(metrics.f_beta(c, 1.0), 2 * p * r / (p + r))

    def test_sweep(self):
        sweep = metrics.fbeta_sweep(metrics.ConfusionCounts(tp=1))
        self.assertEqual([b for b, _f in sweep], [0.25, 0.5, 1.0, 2.0, 5.0])


class PrecisionRecallTest(UnitTestCase):
    def test_values(self):
        p, r, fdr = metrics.precision_recall_fdr(metrics.ConfusionCounts(tp=8, fp=2, fn=2))
        self.assertAlmostEqual(p, 0.8)
        self.assertAlmostEqual(r, 0.8)
        self.assertAlmostEqual(fdr, 0.2)

    def test_undefined_precision(self):
        p, r, fdr = metrics.precision_recall_fdr(metrics.ConfusionCounts(fn=3))
        self.assertIsNone(p)
        self.assertIsNone(fdr)
        self.assertEqual(r, 0.0)

    def test_perfect(self):
        self.assertEqual(metrics.precision_recall_fdr(metrics.ConfusionCounts(tp=5)), (1.0, 1.0, 0.0))

    def test_from_decisions(self):
        c = metrics.ConfusionCounts.from_decisions(decisions_from([1, 1, 0, 0]), labels_from([1, 0, 1, 0]))
        self.assertEqual(c, metrics.ConfusionCounts(tp=1, fp=1, fn=1, tn=1))
        self.assertEqual(c.total, 4)

    def test_missing_label(self):
        self.assertRaises(errors.LabelError, metrics.ConfusionCounts.from_decisions,
                          decisions_from([1]), {})

    def test_negative_count(self):
        self.assertRaises(errors.InvariantError, metrics.ConfusionCounts, -1)


class RiskCoverageTest(UnitTestCase):
    def test_example(self):
        p = metrics.risk_coverage_at([1, 2, 3], [0, 0, 1], 2.5)
        self.assertAlmostEqual(p.coverage_paper, 2.0 / 3.0)
        self.assertEqual(p.risk_paper, 0.0)
        self.assertEqual(p.risk_selective, 0.0)
        self.assertAlmostEqual(p.coverage_std, 2.0 / 3.0)

    def test_endpoints(self):
        u = [0.1, 0.4, 0.4, 0.9, 1.3]
        y = [0, 0, 1, 1, 0]
        curve = metrics.risk_coverage_curve(zip(u, y))
        first, last = curve[0], curve[-1]
        self.assertEqual(first.gamma, -math.inf)
        self.assertEqual((first.coverage_paper, first.risk_paper, first.coverage_std), (0.0, 0.0, 0.0))
        self.assertIsNone(first.risk_selective)
        self.assertEqual(last.gamma, math.inf)
        self.assertAlmostEqual(last.coverage_paper, 0.6)
        self.assertAlmostEqual(last.risk_paper, 0.4)
        # 4 unique values give 3 midpoints plus the two infinities
        self.assertEqual(len(curve), 5)

    def test_sum_is_answered_fraction(self):
        rng = np.random.default_rng(5)
        u = np.round(rng.random(60), 1)
        y = (rng.random(60) < 0.4).astype(int)
        gammas = [p.gamma for p in metrics.risk_coverage_curve(zip(u, y))]
        self.assertEqual(gammas, sorted(gammas))
        for p in metrics.risk_coverage_curve(zip(u, y)):
            self.assertLessEqual(p.coverage_paper + p.risk_paper, 1.0 + 1e-12)
            self.assertAlmostEqual(p.coverage_paper + p.risk_paper, p.coverage_std)

    def test_empty(self):
        self.assertRaises(errors.DataError, metrics.risk_coverage_curve, [])


class RocTest(UnitTestCase):
    def test_separated(self):
        self.assertEqual(metrics.roc_auc([(0.1, 0), (0.2, 0), (0.8, 1), (0.9, 1)]), 1.0)

    def test_ties(self):
        self.assertEqual(metrics.roc_auc([(0.5, 0), (0.5, 1), (0.5, 0), (0.5, 1)]), 0.5)

    def test_example(self):
        self.assertAlmostEqual(metrics.roc_auc(zip([1, 2, 3, 4], [0, 1, 0, 1])), 0.75)

    def test_single_class(self):
        self.assertRaises(errors.SingleClassError, metrics.roc_auc, [(0.1, 1), (0.2, 1)])
        self.assertRaises(errors.SingleClassError, metrics.roc_curve, [(0.1, 0)])

    def test_matches_brute_force(self):
        rng = np.random.default_rng(17)
        for _i in range(200):
            n = int(rng.integers(2, 60))
            scores = np.round(rng.random(n), 1).tolist()
            y = (rng.random(n) < 0.5).astype(int).tolist()
            if len(set(y)) < 2:
                continue
            self.assertAlmostEqual(metrics.roc_auc(zip(scores, y)), brute_auc(scores, y), places=12)

    def test_matches_sklearn(self):
        rng = np.random.default_rng(23)
        scores = rng.normal(size=500)
        y = (rng.random(500) < 1.0 / (1.0 + np.exp(-scores))).astype(int)
        self.assertAlmostEqual(metrics.roc_auc(zip(scores, y)), skmetrics.roc_auc_score(y, scores), places=12)

    def test_curve_area(self):
        rng = np.random.default_rng(29)
        scores = np.round(rng.random(80), 2)
        y = (rng.random(80) < 0.5).astype(int)
        curve = metrics.roc_curve(zip(scores, y))
        self.assertEqual(curve[0][1:], (0.0, 0.0))
        self.assertEqual(curve[-1][1:], (1.0, 1.0))
        fpr = np.array([c[1] for c in curve])
        tpr = np.array([c[2] for c in curve])
        area = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
        self.assertAlmostEqual(area, metrics.roc_auc(zip(scores, y)))


class ResultExTest(UnitTestCase):
    def test_no_abstention(self):
        ys = [0] * 6 + [1] * 4
        self.assertAlmostEqual(metrics.result_ex(decisions_from([0] * 10), labels_from(ys)), 0.6)

    def test_oracle(self):
        ys = [0, 1, 0, 1, 0]
        self.assertAlmostEqual(metrics.result_ex(decisions_from(ys), labels_from(ys)), 0.6)

    def test_example(self):
        ys = [0] * 6 + [1] * 4
        flags = [0] * 4 + [1] * 6
        self.assertAlmostEqual(metrics.result_ex(decisions_from(flags), labels_from(ys)), 0.4)

    def test_never_above_base(self):
        rng = np.random.default_rng(31)
        for _i in range(50):
            ys = (rng.random(20) < 0.3).astype(int)
            flags = rng.random(20) < 0.5
            base = metrics.result_ex(decisions_from([0] * 20), labels_from(ys))
            self.assertLessEqual(metrics.result_ex(decisions_from(flags), labels_from(ys)), base)

    def test_empty(self):
        self.assertRaises(errors.DataError, metrics.result_ex, [], {})


class RiskReductionTest(UnitTestCase):
    def test_values(self):
        ys = [0] * 6 + [1] * 4
        flags = [0] * 5 + [1] * 4 + [0]
        r = metrics.risk_reduction(decisions_from(flags), labels_from(ys))
        self.assertAlmostEqual(r[u"risk_before"], 0.4)
        self.assertAlmostEqual(r[u"risk_after"], 0.1)
        self.assertAlmostEqual(r[u"relative_reduction"], 0.75)
        self.assertAlmostEqual(r[u"coverage_after"], 0.5)
        self.assertAlmostEqual(r[u"oracle_result_ex"], 0.6)
        self.assertAlmostEqual(r[u"result_ex_loss"], 0.1)

    def test_no_errors(self):
        r = metrics.risk_reduction(decisions_from([0, 1]), labels_from([0, 0]))
        self.assertIsNone(r[u"relative_reduction"])


class ErrorBreakdownTest(UnitTestCase):
    def test_counts(self):
        ys = [1, 1, 1, 0]
        flags = [1, 0, 1, 1]
        answerable = {u"r0": True, u"r1": False, u"r2": False, u"r3": False}
        out = metrics.error_breakdown(decisions_from(flags), labels_from(ys), answerable)
        self.assertEqual(out, {u"answerable_detected": 1, u"answerable_missed": 0,
                               u"unanswerable_detected": 1, u"unanswerable_missed": 1})

    def test_no_flags(self):
        self.assertIsNone(metrics.error_breakdown(decisions_from([1]), labels_from([1]), {}))


class ComplexityTest(UnitTestCase):
    def test_examples(self):
        self.assertEqual(metrics.complexity_features(u"SELECT name FROM singer"), (4, 2))
        self.assertEqual(metrics.complexity_features(u"SELECT 1"), (2, 0))
        self.assertEqual(metrics.complexity_features(u"SELECT a FROM t WHERE a = 1"), (8, 2))

    def test_lex_error(self):
        self.assertRaises(errors.LexError, metrics.complexity_features, u"SELECT 'open")


if __name__ == u"__main__":
    unittest.main()
