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
Synthetic prediction logs for tests and demonstrations.

Every record gets a weakest-token entropy drawn from one of two
Gaussians, N(0.5, 0.25) for correct generations and N(0.5 + separation,
0.25) for errors, clipped at 0.  The other positions get smaller
entropies, so the max-entropy score of a record is its weakest-token
entropy.
"""

import numpy as np

from abstain import errors
from abstain import log
from abstain import records

CORRECT_MEAN = 0.5
SPREAD = 0.25
MIN_RECORDS = 10
UNANSWERABLE_RATE = 0.2

TABLES = (u"singer", u"concert", u"stadium", u"patients", u"admissions", u"orders")
COLUMNS = (u"name", u"age", u"country", u"year", u"capacity", u"price", u"gender")


def _gold_query(rng):
    table = TABLES[rng.integers(len(TABLES))]
    shape = rng.integers(4)
    c1, c2 = (COLUMNS[i] for i in rng.choice(len(COLUMNS), 2, replace=False))
    num = int(rng.integers(1, 100))
    if shape == 0:
        return u"SELECT %s FROM %s WHERE %s = %d" % (c1, table, c2, num)
    elif shape == 1:
        return u"SELECT count(*) FROM %s WHERE %s > %d" % (table, c2, num)
    elif shape == 2:
        return u"SELECT %s , %s FROM %s ORDER BY %s DESC LIMIT %d" % (c1, c2, table, c2, num % 10 + 1)
    return u"SELECT T1.%s FROM %s AS T1 JOIN %s AS T2 ON T1.id = T2.id WHERE T2.%s = 'x%d'" % (
        c1, table, TABLES[(TABLES.index(table) + 1) % len(TABLES)], c2, num)


def _wrong_query(rng, gold):
    u"""A plausible but different query"""
    choice = rng.integers(3)
    if choice == 0:
        return gold + u" AND %s < %d" % (COLUMNS[rng.integers(len(COLUMNS))], int(rng.integers(1, 100)))
    elif choice == 1:
        return gold.replace(u"SELECT", u"SELECT DISTINCT", 1)
    return gold.replace(u"FROM", u", %s FROM" % COLUMNS[rng.integers(len(COLUMNS))], 1)


def make_synthetic(n, separation, error_rate, seed):
    u"""
    Generate n labeled records with token_entropies.

    @param separation: distance between the two entropy means, >= 0
    @param error_rate: probability that a record is an error
    @rtype: list of PredictionRecord
    @raise UserError: invalid parameters
    """
    if n < MIN_RECORDS:
        raise errors.UserError(_(u"synthetic logs need at least %d records, got %d") % (MIN_RECORDS, n))
    if separation < 0:
        raise errors.UserError(_(u"separation must be non-negative, got %g") % separation)
    if not 0.0 <= error_rate <= 1.0:
        raise errors.UserError(_(u"error rate must lie in [0, 1], got %g") % error_rate)

    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        is_error = bool(rng.random() < error_rate)
        peak = max(0.0, float(rng.normal(CORRECT_MEAN + separation * is_error, SPREAD)))
        length = int(rng.integers(3, 13))
        entropies = (peak * rng.random(length)).tolist()
        entropies[int(rng.integers(length))] = peak
        gold = _gold_query(rng)
        pred = _wrong_query(rng, gold) if is_error else gold
        answerable = not (is_error and rng.random() < UNANSWERABLE_RATE)
        out.append(records.PredictionRecord(
            u"syn-%05d" % i,
            u"synthetic question %d" % i,
            gold,
            pred,
            records.TOKEN_ENTROPIES,
            [round(h, 9) for h in entropies],
            label=int(is_error),
            answerable=answerable,
        ))
    log.Info(_(u"Generated %d synthetic records, %d errors") % (n, sum(r.label for r in out)),
             log.InfoCode.synthetic_written, u"%d" % n)
    return out


def write_synthetic(path, n, separation, error_rate, seed):
    recs = make_synthetic(n, separation, error_rate, seed)
    records.write_log(path, recs)
    return recs
