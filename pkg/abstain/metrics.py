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

u"""
Evaluation quantities for abstention decisions and calibrated scores.

The positive class is always "error".  Ratios with a zero denominator
come back as None rather than 0, except f_beta which returns 0 and lets
the caller check ConfusionCounts.f_beta_defined.
"""

import math

import numpy as np
from scipy import stats

from abstain import errors
from abstain import log
from abstain import splits

DEFAULT_BETAS = (0.25, 0.5, 1.0, 2.0, 5.0)


class ConfusionCounts(object):
    u"""
    Error-detection confusion counts: an abstention on an error is a true
    positive, an abstention on a correct query a false positive
    """
    __slots__ = (u"tp", u"fp", u"fn", u"tn")

    def __init__(self, tp=0, fp=0, fn=0, tn=0):
        for v in (tp, fp, fn, tn):
            if v < 0:
                raise errors.InvariantError(u"confusion counts must be non-negative")
        self.tp, self.fp, self.fn, self.tn = int(tp), int(fp), int(fn), int(tn)

    @classmethod
    def from_decisions(cls, decisions, labels):
        u"""
        @param decisions: iterable of Decision
        @param labels: dict id -> y_error
        """
        c = cls()
        for d in decisions:
            y = _label(labels, d.id)
            if d.abstain:
                if y:
                    c.tp += 1
                else:
                    c.fp += 1
            elif y:
                c.fn += 1
            else:
                c.tn += 1
        return c

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    @property
    def f_beta_defined(self):
        return self.tp + self.fp + self.fn > 0

    def __eq__(self, other):
        return isinstance(other, ConfusionCounts) and self.as_dict() == other.as_dict()

    def __repr__(self):
        return u"ConfusionCounts(tp=%d, fp=%d, fn=%d, tn=%d)" % (self.tp, self.fp, self.fn, self.tn)

    def as_dict(self):
        return {u"tp": self.tp, u"fp": self.fp, u"fn": self.fn, u"tn": self.tn}


def _label(labels, rid):
    try:
        return labels[rid]
    except KeyError:
        raise errors.LabelError(_(u"no label for %s") % rid)


def _pairs(pairs):
    pairs = list(pairs)
    if not pairs:
        return np.zeros(0), np.zeros(0)
    a = np.asarray(pairs, dtype=float)
    return a[:, 0], a[:, 1]


def _check_probabilities(p, y):
    if np.any(np.isnan(p)) or np.any(p < 0) or np.any(p > 1):
        raise errors.InvariantError(u"calibrated scores must lie in [0, 1]")
    if np.any((y != 0) & (y != 1)):
        raise errors.InvariantError(u"labels must be 0 or 1")


def brier(pairs):
    u"""
    Mean squared difference between calibrated score and label.

    @param pairs: iterable of (u^c, y)
    @raise DataError: empty input
    """
    p, y = _pairs(pairs)
    if p.size == 0:
        raise errors.DataError(_(u"Brier score of an empty sample"))
    _check_probabilities(p, y)
    return float(np.mean((y - p) ** 2))


def brier_sum(pairs):
    u"""Unnormalized Brier score, the plain sum of squared differences"""
    p, y = _pairs(pairs)
    if p.size == 0:
        raise errors.DataError(_(u"Brier score of an empty sample"))
    _check_probabilities(p, y)
    return float(np.sum((y - p) ** 2))


def f_beta(counts, beta):
    u"""
    F-beta score of error detection.  Zero when tp, fp and fn are all zero.
    """
    if beta < 0:
        raise errors.UserError(_(u"beta must be non-negative, got %g") % beta)
    b2 = beta * beta
    num = (1.0 + b2) * counts.tp
    den = num + counts.fp + b2 * counts.fn
    if den == 0:
        return 0.0
    return num / den


def fbeta_sweep(counts, betas=DEFAULT_BETAS):
    return [(float(b), f_beta(counts, b)) for b in betas]


def precision_recall_fdr(counts):
    u"""
    @return: (precision, recall, fdr); undefined entries are None
    """
    precision = recall = fdr = None
    if counts.tp + counts.fp:
        precision = counts.tp / float(counts.tp + counts.fp)
        fdr = 1.0 - precision
    if counts.tp + counts.fn:
        recall = counts.tp / float(counts.tp + counts.fn)
    if precision is None or recall is None:
        log.Debug(u"undefined ratio in %r" % (counts,))
    return precision, recall, fdr


def threshold_candidates(u):
    u"""Midpoints between consecutive unique values, plus both infinities"""
    uniq = np.unique(np.asarray(u, dtype=float))
    mids = (uniq[:-1] + uniq[1:]) / 2.0
    return np.concatenate([[-math.inf], mids, [math.inf]])


class RiskCoveragePoint(object):
    u"""
    Coverage and risk when answering every record with u < gamma.

    The *_paper fractions are over all N records: coverage counts answered
    correct queries, risk answered errors.  coverage_std is the answered
    fraction and risk_selective the error rate among answered records,
    None when nothing is answered.
    """
    __slots__ = (u"gamma", u"coverage_paper", u"coverage_std", u"risk_paper", u"risk_selective")

    def __init__(self, gamma, coverage_paper, coverage_std, risk_paper, risk_selective):
        self.gamma = gamma
        self.coverage_paper = coverage_paper
        self.coverage_std = coverage_std
        self.risk_paper = risk_paper
        self.risk_selective = risk_selective

    def as_tuple(self):
        return (self.gamma, self.coverage_paper, self.coverage_std, self.risk_paper, self.risk_selective)

    def __repr__(self):
        return u"RiskCoveragePoint%r" % (self.as_tuple(),)


def risk_coverage_at(u, y_error, gamma):
    u = np.asarray(u, dtype=float)
    y = np.asarray(y_error, dtype=int)
    n = float(u.size)
    answered = u < gamma
    n_answered = int(answered.sum())
    wrong = int((answered & (y == 1)).sum())
    right = n_answered - wrong
    risk_sel = wrong / float(n_answered) if n_answered else None
    return RiskCoveragePoint(float(gamma), right / n, n_answered / n, wrong / n, risk_sel)


def risk_coverage_curve(points):
    u"""
    Sweep gamma over the midpoints of the unique scores and both
    infinities.

    @param points: iterable of (u, y_error)
    @rtype: list of RiskCoveragePoint, gamma ascending
    """
    u, y = _pairs(points)
    if u.size == 0:
        raise errors.DataError(_(u"risk-coverage curve of an empty sample"))
    return [risk_coverage_at(u, y, g) for g in threshold_candidates(u)]


def _scores_labels(points, what):
    s, y = _pairs(points)
    y = y.astype(int)
    if y.size == 0 or y.min() == y.max():
        raise errors.SingleClassError(_(u"%s needs both classes") % what)
    return s, y


def roc_auc(points):
    u"""
    Area under the ROC curve as the Mann-Whitney statistic, ties counted
    half, computed from mid-ranks.

    @param points: iterable of (score, y) with y = 1 the positive class
    """
    s, y = _scores_labels(points, u"ROC-AUC")
    ranks = stats.rankdata(s)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    u_stat = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u_stat / (n_pos * n_neg))


def roc_curve(points):
    u"""
    ROC points for "positive when score >= t" with t over the unique
    scores, descending, starting from (0, 0) at t = +inf.

    @rtype: list of (threshold, fpr, tpr)
    """
    s, y = _scores_labels(points, u"ROC curve")
    pos = np.sort(s[y == 1])
    neg = np.sort(s[y == 0])
    out = [(math.inf, 0.0, 0.0)]
    for t in np.unique(s)[::-1]:
        tp = pos.size - np.searchsorted(pos, t, side=u"left")
        fp = neg.size - np.searchsorted(neg, t, side=u"left")
        out.append((float(t), fp / float(neg.size), tp / float(pos.size)))
    return out


def result_ex(decisions, labels):
    u"""
    End-to-end execution accuracy after abstention: the fraction of all
    evaluated records that are answered and correct.
    """
    decisions = list(decisions)
    if not decisions:
        raise errors.DataError(_(u"Result EX of an empty sample"))
    good = sum(1 for d in decisions if not d.abstain and not _label(labels, d.id))
    return good / float(len(decisions))


def risk_reduction(decisions, labels):
    u"""
    Compare all-record risk with and without abstention.

    @return: dict with risk_before, risk_after, relative reduction (None
        when there are no errors), coverage before and after, the Result
        EX of an oracle that abstains on exactly the errors and the loss
        against it
    """
    decisions = list(decisions)
    n = float(len(decisions))
    if not n:
        raise errors.DataError(_(u"risk reduction of an empty sample"))
    y = [_label(labels, d.id) for d in decisions]
    errs = sum(y)
    missed = sum(1 for d, e in zip(decisions, y) if e and not d.abstain)
    before, after = errs / n, missed / n
    ex = result_ex(decisions, labels)
    oracle = 1.0 - before
    return {
        u"risk_before": before,
        u"risk_after": after,
        u"relative_reduction": (1.0 - after / before) if errs else None,
        u"coverage_before": oracle,
        u"coverage_after": ex,
        u"oracle_result_ex": oracle,
        u"result_ex_loss": oracle - ex,
    }


def error_breakdown(decisions, labels, answerable):
    u"""
    Split detected and missed errors by whether the question was
    answerable at all.

    @param answerable: dict id -> bool, records without the flag are skipped
    @return: dict of counts, or None when no evaluated record has the flag
    """
    out = {u"unanswerable_detected": 0, u"unanswerable_missed": 0,
           u"answerable_detected": 0, u"answerable_missed": 0}
    seen = False
    for d in decisions:
        flag = answerable.get(d.id)
        if flag is None or not _label(labels, d.id):
            continue
        seen = True
        key = (u"answerable_" if flag else u"unanswerable_") + (u"detected" if d.abstain else u"missed")
        out[key] += 1
    return out if seen else None


def complexity_features(sql, schema=None):
    u"""
    @return: (number of SQL tokens, number of distinct table and column
        identifiers)
    @raise LexError
    """
    return len(splits.lex_sql(sql)), len(splits.schema_elements(sql, schema))
