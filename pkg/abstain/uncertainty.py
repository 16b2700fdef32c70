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
Sequence-level uncertainty scores from token-level probability information.

Both scores are oriented so that a higher value means a less reliable
generation.  Natural logarithms throughout.
"""

import math

import numpy as np
from scipy import special

from abstain import errors
from abstain import log
from abstain import records
from abstain import util

MAX_ENTROPY = u"max-entropy"
NSP = u"nsp"
METHODS = (MAX_ENTROPY, NSP)

HIGHER_IS_UNCERTAIN = u"higher_is_uncertain"


def token_entropy(dist):
    u"""
    Shannon entropy of one probability vector, in nats, with 0 ln 0 = 0.

    @raise InvariantError: empty vector, entry outside [0, 1] or bad sum
    """
    p = np.asarray(dist, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise errors.InvariantError(u"empty probability vector")
    if np.any(np.isnan(p)) or np.any(p < 0) or np.any(p > 1):
        raise errors.InvariantError(u"probability entries must lie in [0, 1]")
    if abs(p.sum() - 1.0) > records.SUM_TOLERANCE:
        raise errors.InvariantError(u"probabilities sum to %.9g" % p.sum())
    return float(special.entr(p).sum())


def max_entropy_score(record):
    u"""
    Entropy of the least certain output position: a sequence is only as
    reliable as its weakest token.

    @raise MethodError: the record only carries chosen-token logprobs
    """
    if record.token_kind == records.CHOSEN_LOGPROBS:
        raise errors.MethodError(_(u"record %s: max-entropy needs distributions or entropies, "
                                   u"got chosen_logprobs") % record.id)
    if not record.token_values:
        raise errors.MethodError(_(u"record %s: empty token sequence") % record.id)
    if record.token_kind == records.TOKEN_ENTROPIES:
        return float(max(record.token_values))
    try:
        return max(token_entropy(dist) for dist in record.token_values)
    except errors.InvariantError as e:
        raise errors.InvariantError(util.uexc(e), record.id)


def chosen_logprobs(record):
    u"""
    Per-position log probability of the emitted token.  For full
    distributions the emitted token is taken to be the most probable one.
    """
    if record.token_kind == records.CHOSEN_LOGPROBS:
        return np.asarray(record.token_values, dtype=float)
    if record.token_kind == records.FULL_DISTRIBUTIONS:
        with np.errstate(divide=u"ignore"):
            return np.log(np.array([max(dist) for dist in record.token_values], dtype=float))
    raise errors.MethodError(_(u"record %s: nsp needs chosen logprobs or distributions, "
                               u"got token_entropies") % record.id)


def nsp_score(record):
    u"""
    Negated normalized sequence probability, -(1/L) sum ln p_l.

    @raise MethodError: token entropies only, empty sequence, or a
        zero-probability position
    """
    lp = chosen_logprobs(record)
    if lp.size == 0:
        raise errors.MethodError(_(u"record %s: empty token sequence") % record.id)
    bad = np.flatnonzero(~np.isfinite(lp))
    if bad.size:
        raise errors.MethodError(_(u"record %s: zero probability at position %d") % (record.id, bad[0]))
    return float(max(0.0, -lp.mean()))


_SCORERS = {
    MAX_ENTROPY: max_entropy_score,
    NSP: nsp_score,
}


def scorer(method):
    try:
        return _SCORERS[method]
    except KeyError:
        raise errors.UserError(_(u"unknown scoring method %s, expected one of %s")
                               % (method, u", ".join(METHODS)))


class ScoreVector(object):
    u"""
    Uncertainty scores of a set of records, in record order
    """
    orientation = HIGHER_IS_UNCERTAIN

    def __init__(self, entries, method):
        self.entries = []
        for rid, u in entries:
            if not math.isfinite(u):
                raise errors.InvariantError(u"score is not finite", rid)
            self.entries.append((rid, float(u)))
        self.method = method

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        return (isinstance(other, ScoreVector) and
                self.method == other.method and self.entries == other.entries)

    def as_dict(self):
        return dict(self.entries)

    def ids(self):
        return [rid for rid, _u in self.entries]

    def subset(self, ids):
        u"""Scores restricted to ids, keeping record order"""
        keep = set(ids)
        return ScoreVector([(rid, u) for rid, u in self.entries if rid in keep], self.method)

    def write(self, path):
        n = util.write_jsonl(path, ({u"id": rid, u"u": u, u"method": self.method}
                                    for rid, u in self.entries))
        log.Info(_(u"Wrote %d %s scores to %s") % (n, self.method, path),
                 log.InfoCode.scores_written, u"%d" % n)

    @classmethod
    def read(cls, path):
        entries = []
        methods = set()
        seen = set()
        for lineno, obj in util.read_jsonl(path):
            rid, u = obj.get(u"id"), obj.get(u"u")
            if not isinstance(rid, str) or not isinstance(u, (int, float)) or isinstance(u, bool):
                raise errors.LogParseError(u"score entry needs string id and numeric u", lineno)
            if rid in seen:
                raise errors.DuplicateIdError(rid, lineno)
            seen.add(rid)
            methods.add(obj.get(u"method"))
            entries.append((rid, u))
        if len(methods) > 1:
            raise errors.DataError(_(u"score file %s mixes methods %s") % (path, sorted(map(str, methods))))
        return cls(entries, methods.pop() if methods else None)


def score_records(recs, method=MAX_ENTROPY):
    u"""
    Score every record with the named method.

    @rtype: ScoreVector
    """
    fn = scorer(method)
    entries = []
    for n, rec in enumerate(recs, 1):
        entries.append((rec.id, fn(rec)))
        if n % 1000 == 0:
            log.Progress(_(u"Scored %d of %d records") % (n, len(recs)), n, len(recs))
    return ScoreVector(entries, method)
