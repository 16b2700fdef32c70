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
Prediction-log data model, JSON Lines ingestion and execution-match labels.

A prediction log holds one generation per line.  Each record carries
exactly one kind of token information:

  full_distributions  per-position probability vectors over the vocabulary
  token_entropies     per-position entropies in nats
  chosen_logprobs     per-position natural-log probability of the emitted token

Labels follow the error orientation: 1 means the predicted query does not
match the gold query on execution, 0 means it does.
"""

import math

from abstain import errors
from abstain import log
from abstain import util

FULL_DISTRIBUTIONS = u"full_distributions"
TOKEN_ENTROPIES = u"token_entropies"
CHOSEN_LOGPROBS = u"chosen_logprobs"
TOKEN_INFO_KINDS = (FULL_DISTRIBUTIONS, TOKEN_ENTROPIES, CHOSEN_LOGPROBS)

SUM_TOLERANCE = 1e-6


class PredictionRecord(object):
    u"""
    One logged model generation
    """
    __slots__ = (u"id", u"question", u"gold_sql", u"pred_sql",
                 u"token_kind", u"token_values", u"label", u"exec_results",
                 u"answerable")

    def __init__(self, id, question, gold_sql, pred_sql, token_kind, token_values,  # pylint: disable=redefined-builtin
                 label=None, exec_results=None, answerable=None):
        self.id = id
        self.question = question
        self.gold_sql = gold_sql
        self.pred_sql = pred_sql
        self.token_kind = token_kind
        self.token_values = token_values
        self.label = label
        self.exec_results = exec_results
        self.answerable = answerable

    def __eq__(self, other):
        if not isinstance(other, PredictionRecord):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return u"PredictionRecord(%r, %s, label=%r)" % (self.id, self.token_kind, self.label)

    def has_label_source(self):
        return self.label is not None or self.exec_results is not None

    def with_label(self, label):
        u"""Return a copy of self carrying label"""
        return PredictionRecord(self.id, self.question, self.gold_sql, self.pred_sql,
                                self.token_kind, self.token_values, label,
                                self.exec_results, self.answerable)

    def to_dict(self):
        d = {
            u"id": self.id,
            u"question": self.question,
            u"gold_sql": self.gold_sql,
            u"pred_sql": self.pred_sql,
            u"token_info": {self.token_kind: self.token_values},
        }
        if self.label is not None:
            d[u"label"] = self.label
        if self.exec_results is not None:
            d[u"exec_results"] = list(self.exec_results)
        if self.answerable is not None:
            d[u"answerable"] = self.answerable
        return d

    @classmethod
    def from_dict(cls, d):
        u"""
        Build a record from its JSON object and check its invariants.

        @raise InvariantError: naming the record id
        """
        rid = d.get(u"id")
        if not isinstance(rid, str) or not rid:
            raise errors.InvariantError(u"missing or non-string id")
        for field in (u"question", u"gold_sql", u"pred_sql"):
            if not isinstance(d.get(field), str):
                raise errors.InvariantError(u"field %s must be a string" % field, rid)

        token_info = d.get(u"token_info")
        if not isinstance(token_info, dict):
            raise errors.InvariantError(u"token_info must be an object", rid)
        present = [k for k in TOKEN_INFO_KINDS if token_info.get(k) is not None]
        unknown = [k for k in token_info if k not in TOKEN_INFO_KINDS]
        if unknown:
            raise errors.InvariantError(u"unknown token_info variant %s" % u", ".join(sorted(unknown)), rid)
        if len(present) != 1:
            raise errors.InvariantError(u"exactly one token_info variant required, got %d" % len(present), rid)
        kind = present[0]
        values = token_info[kind]
        check_token_values(kind, values, rid)

        label = d.get(u"label")
        if label is not None and (isinstance(label, bool) or label not in (0, 1)):
            raise errors.InvariantError(u"label must be 0 or 1, got %r" % (label,), rid)

        exec_results = d.get(u"exec_results")
        if exec_results is not None:
            if (not isinstance(exec_results, (list, tuple)) or len(exec_results) != 2 or
                    not all(isinstance(s, str) for s in exec_results)):
                raise errors.InvariantError(u"exec_results must be a pair of strings", rid)
            exec_results = tuple(exec_results)

        answerable = d.get(u"answerable")
        if answerable is not None and not isinstance(answerable, bool):
            raise errors.InvariantError(u"answerable must be a boolean", rid)

        return cls(rid, d[u"question"], d[u"gold_sql"], d[u"pred_sql"], kind, values,
                   label, exec_results, answerable)


def check_token_values(kind, values, rid=None):
    u"""Check the invariants of one token_info variant"""
    if not isinstance(values, list) or not values:
        raise errors.InvariantError(u"%s must be a non-empty list" % kind, rid)
    if kind == FULL_DISTRIBUTIONS:
        for pos, dist in enumerate(values):
            if not isinstance(dist, list) or not dist:
                raise errors.InvariantError(u"distribution at position %d is empty" % pos, rid)
            total = 0.0
            for p in dist:
                if not _is_number(p) or not 0.0 <= p <= 1.0:
                    raise errors.InvariantError(u"probability %r at position %d outside [0, 1]" % (p, pos), rid)
                total += p
            if abs(total - 1.0) > SUM_TOLERANCE:
                raise errors.InvariantError(u"distribution at position %d sums to %.9g" % (pos, total), rid)
    elif kind == TOKEN_ENTROPIES:
        for pos, h in enumerate(values):
            if not _is_number(h) or not math.isfinite(h) or h < 0:
                raise errors.InvariantError(u"entropy %r at position %d is not a non-negative number" % (h, pos),
                                            rid)
    else:
        for pos, lp in enumerate(values):
            if not _is_number(lp) or math.isnan(lp) or lp > 0:
                raise errors.InvariantError(u"logprob %r at position %d is not <= 0" % (lp, pos), rid)


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


class LabeledScore(object):
    u"""
    Uncertainty u of one record with its error label
    """
    __slots__ = (u"id", u"u", u"y_error")

    def __init__(self, id, u, y_error):  # pylint: disable=redefined-builtin
        if not math.isfinite(u):
            raise errors.InvariantError(u"uncertainty is not finite", id)
        if y_error not in (0, 1):
            raise errors.InvariantError(u"error label must be 0 or 1", id)
        self.id = id
        self.u = float(u)
        self.y_error = int(y_error)

    @property
    def y_correct(self):
        return 1 - self.y_error

    def __eq__(self, other):
        return (isinstance(other, LabeledScore) and
                (self.id, self.u, self.y_error) == (other.id, other.u, other.y_error))

    def __repr__(self):
        return u"LabeledScore(%r, %r, %d)" % (self.id, self.u, self.y_error)


def load_log(path, labels_path=None):
    u"""
    Read a prediction log.

    @param path: JSON Lines file
    @param labels_path: optional sidecar of {id, label} merged by id
    @rtype: list of PredictionRecord
    @raise LogParseError, InvariantError, DuplicateIdError
    """
    records = []
    seen = set()
    for lineno, obj in util.read_jsonl(path):
        try:
            rec = PredictionRecord.from_dict(obj)
        except errors.InvariantError as e:
            err = errors.InvariantError(u"line %d: %s" % (lineno, e))
            err.record_id = e.record_id
            raise err
        if rec.id in seen:
            raise errors.DuplicateIdError(rec.id, lineno)
        seen.add(rec.id)
        records.append(rec)
    log.Info(_(u"Loaded %d records from %s") % (len(records), path),
             log.InfoCode.log_loaded, u"%d" % len(records))
    if labels_path:
        records = merge_labels(records, load_labels(labels_path))
    return records


def write_log(path, records):
    u"""Write records as JSON Lines in their given order"""
    return util.write_jsonl(path, (r.to_dict() for r in records))


def load_labels(path):
    u"""
    Read a {id, label} sidecar.

    @rtype: dict of id -> 0/1
    """
    labels = {}
    for lineno, obj in util.read_jsonl(path):
        rid = obj.get(u"id")
        label = obj.get(u"label")
        if not isinstance(rid, str):
            raise errors.LogParseError(u"label entry without string id", lineno)
        if isinstance(label, bool) or label not in (0, 1):
            raise errors.InvariantError(u"line %d: label must be 0 or 1" % lineno, rid)
        if rid in labels:
            raise errors.DuplicateIdError(rid, lineno)
        labels[rid] = label
    return labels


def write_labels(path, pairs):
    u"""Write (id, label) pairs as a sidecar"""
    return util.write_jsonl(path, ({u"id": rid, u"label": label} for rid, label in pairs))


def merge_labels(records, labels):
    u"""Attach sidecar labels by id; the sidecar wins over labels in the log"""
    ids = set(r.id for r in records)
    stray = sorted(set(labels) - ids)
    if stray:
        log.Warn(_(u"%d label entries match no record, e.g. %s") % (len(stray), stray[0]))
    merged = []
    for rec in records:
        if rec.id in labels:
            if rec.label is not None and rec.label != labels[rec.id]:
                log.Warn(_(u"Sidecar label overrides log label for %s") % rec.id,
                         log.WarningCode.labels_override, rec.id)
            rec = rec.with_label(labels[rec.id])
        merged.append(rec)
    return merged


def normalize_result(s):
    u"""Trim, case-fold and sort the rows of an execution result string"""
    rows = [row.strip().casefold() for row in s.strip().split(u"\n")]
    return u"\n".join(sorted(rows))


def derive_label(record):
    u"""
    Return the 0/1 error label of a record.

    An explicit label wins.  Otherwise the normalized execution results
    of gold and predicted query are compared: equal means correct (0).

    @raise LabelError: neither label nor exec_results present
    """
    if record.label is not None:
        return 1 if record.label else 0
    if record.exec_results is None:
        raise errors.LabelError(_(u"record %s has neither label nor exec_results") % record.id)
    gold, pred = record.exec_results
    return 0 if normalize_result(gold) == normalize_result(pred) else 1


def labeled_scores(ids, scores, labels):
    u"""
    Pair the uncertainty of each id with its error label.

    @param scores: dict of id -> u
    @param labels: dict of id -> y_error
    @rtype: list of LabeledScore in the order of ids
    @raise LabelError: an id has no label
    """
    pairs = []
    for rid in ids:
        if rid not in labels:
            raise errors.LabelError(_(u"no label for record %s") % rid)
        pairs.append(LabeledScore(rid, scores[rid], labels[rid]))
    return pairs
