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
SQL lexing, template masking and dataset split generators.

The lexer targets the SQLite surface syntax of text-to-SQL corpora.  No
parse tree is built: template masking only needs token classes and the
neighbouring tokens.
"""

import io
import json
import math
import random

from sly import Lexer

from abstain import errors
from abstain import log
from abstain import util

KEYWORD = u"keyword"
IDENTIFIER = u"identifier"
NUMBER = u"number"
STRING_LITERAL = u"string_literal"
OPERATOR = u"operator"
PUNCTUATION = u"punctuation"

TEMPLATE = u"template"
LENGTH = u"length"
IID = u"iid"
KINDS = (TEMPLATE, LENGTH, IID)

# placeholders produced by mask_template; they lex as identifiers
SPECIAL_TOKENS = frozenset([u"TABLE", u"ATTRIBUTE", u"NUMERIC", u"VALUE"])

KEYWORDS = frozenset(u"""
SELECT FROM WHERE AND OR NOT IN LIKE GLOB BETWEEN IS NULL AS JOIN INNER LEFT
RIGHT OUTER FULL CROSS NATURAL ON USING GROUP BY ORDER HAVING LIMIT OFFSET ASC
DESC DISTINCT ALL UNION INTERSECT EXCEPT EXISTS CASE WHEN THEN ELSE END CAST
COUNT SUM AVG MIN MAX ABS ROUND LENGTH LOWER UPPER SUBSTR TRIM REPLACE INSTR
COALESCE IFNULL NULLIF STRFTIME DATETIME JULIANDAY ESCAPE COLLATE INSERT INTO
VALUES UPDATE SET DELETE WITH TRUE FALSE
""".split())

TABLE_PRECEDERS = frozenset([u"FROM", u"JOIN"])


class SqlToken(object):
    u"""One lexed token; position is the offset of its first character"""
    __slots__ = (u"text", u"kind", u"position")

    def __init__(self, text, kind, position=0):
        self.text = text
        self.kind = kind
        self.position = position

    def __eq__(self, other):
        return isinstance(other, SqlToken) and (self.text, self.kind) == (other.text, other.kind)

    def __repr__(self):
        return u"SqlToken(%r, %s)" % (self.text, self.kind)


class SqlLexer(Lexer):
    u"""
    Token rules for lex_sql.  Rules are tried in the order they are
    defined, so longer operators come before their prefixes and numbers
    before the dot.
    """
    tokens = {u"KEYWORD", u"NAME", u"QUOTED", u"NUMBER", u"STRING", u"UNTERMINATED", u"OPERATOR", u"PUNCT"}
    ignore = u" \t\r\n\f\v"

    NUMBER = r"\d+\.\d*|\.\d+|\d+"
    STRING = r"'(?:[^']|'')*'|\"(?:[^\"]|\"\")*\""

    @_(r"['\"]")
    def UNTERMINATED(self, t):
        raise errors.LexError(_(u"unterminated string literal"), t.index)

    @_(r"[^\W\d][\w$]*")
    def NAME(self, t):
        if t.value.upper() in KEYWORDS and t.value not in SPECIAL_TOKENS:
            t.type = u"KEYWORD"
        return t

    QUOTED = r"`[^`]*`|\[[^\]]*\]"
    OPERATOR = r"<>|!=|==|>=|<=|\|\||[=<>+\-*/%]"
    PUNCT = r"[(),.;]"

    def error(self, t):
        raise errors.LexError(_(u"illegal character %r") % t.value[0], self.index)


_KINDS_BY_TYPE = {
    u"KEYWORD": KEYWORD,
    u"NAME": IDENTIFIER,
    u"QUOTED": IDENTIFIER,
    u"NUMBER": NUMBER,
    u"STRING": STRING_LITERAL,
    u"OPERATOR": OPERATOR,
    u"PUNCT": PUNCTUATION,
}


def lex_sql(sql):
    u"""
    Split sql into tokens, consuming every character.

    @raise LexError: empty input, unterminated string literal or a
        character outside the SQL surface syntax
    """
    if not sql or not sql.strip():
        raise errors.LexError(_(u"empty SQL string"), 0)
    return [SqlToken(t.value, _KINDS_BY_TYPE[t.type], t.index) for t in SqlLexer().tokenize(sql)]


def token_texts(sql):
    u"""Case-folded token texts, as compared by the length split"""
    return [t.text.casefold() for t in lex_sql(sql)]


class Schema(object):
    u"""
    Table and column names of one database, compared case-insensitively
    """
    def __init__(self, tables=(), columns=()):
        self.tables = frozenset(t.casefold() for t in tables)
        self.columns = frozenset(c.casefold() for c in columns)

    def is_table(self, name):
        return name.casefold() in self.tables

    @classmethod
    def from_dict(cls, d):
        u"""
        @param d: {"tables": [{"name": ..., "columns": [...]}, ...]}
        """
        tables, columns = [], []
        try:
            for t in d[u"tables"]:
                tables.append(t[u"name"])
                columns.extend(t.get(u"columns", []))
        except (KeyError, TypeError, AttributeError):
            raise errors.DataError(_(u"schema needs a tables list of {name, columns} objects"))
        return cls(tables, columns)

    @classmethod
    def load(cls, path):
        return cls.from_dict(util.read_json(path))


def _classify(tokens, schema):
    u"""Masked text for every token"""
    out = []
    for i, tok in enumerate(tokens):
        if tok.kind == KEYWORD:
            out.append(tok.text.upper())
        elif tok.kind == NUMBER:
            out.append(u"NUMERIC")
        elif tok.kind == STRING_LITERAL:
            out.append(u"VALUE")
        elif tok.kind != IDENTIFIER or tok.text in SPECIAL_TOKENS:
            out.append(tok.text)
        else:
            prev = tokens[i - 1] if i else None
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if prev is not None and prev.kind == KEYWORD and prev.text.upper() == u"AS":
                out.append(u"ATTRIBUTE")
            elif schema is not None:
                out.append(u"TABLE" if schema.is_table(tok.text) else u"ATTRIBUTE")
            elif ((prev is not None and prev.kind == KEYWORD and prev.text.upper() in TABLE_PRECEDERS) or
                  (nxt is not None and nxt.text == u".")):
                out.append(u"TABLE")
            else:
                out.append(u"ATTRIBUTE")
    return out


def mask_template(sql, schema=None):
    u"""
    Replace schema identifiers and literals by placeholders.

    Tables become TABLE, other identifiers (aliases after AS included)
    ATTRIBUTE, numbers NUMERIC and quoted strings VALUE.  Keywords are
    upper-cased; everything else is kept.  Without a schema an identifier
    is a table when it follows FROM or JOIN or precedes a dot.

    @type schema: Schema or None
    @rtype: unicode
    """
    return u" ".join(_classify(lex_sql(sql), schema))


def schema_elements(sql, schema=None):
    u"""Distinct identifiers, case-folded, masked as TABLE or ATTRIBUTE"""
    tokens = lex_sql(sql)
    masked = _classify(tokens, schema)
    return set(t.text.casefold() for t, m in zip(tokens, masked)
               if t.kind == IDENTIFIER and t.text not in SPECIAL_TOKENS and m in (u"TABLE", u"ATTRIBUTE"))


class DatasetItem(object):
    __slots__ = (u"id", u"question", u"sql", u"db_id")

    def __init__(self, rid, question, sql, db_id=u""):
        self.id = rid
        self.question = question
        self.sql = sql
        self.db_id = db_id

    def __repr__(self):
        return u"DatasetItem(%r, %r)" % (self.id, self.sql)

    @classmethod
    def from_dict(cls, d, lineno=None):
        u"""
        Accepts dataset lines ({id, question, sql, db_id}) and prediction
        log lines, whose gold_sql is used
        """
        rid = d.get(u"id")
        sql = d.get(u"sql", d.get(u"gold_sql"))
        if not isinstance(rid, str) or not isinstance(sql, str):
            raise errors.LogParseError(u"dataset item needs string id and sql", lineno)
        item = cls(rid, d.get(u"question", u""), sql, d.get(u"db_id", u""))
        try:
            lex_sql(sql)
        except errors.LexError as e:
            raise errors.InvariantError(util.uexc(e), rid)
        return item


def load_dataset(path):
    items = []
    seen = set()
    for lineno, obj in util.read_jsonl(path):
        item = DatasetItem.from_dict(obj, lineno)
        if item.id in seen:
            raise errors.DuplicateIdError(item.id, lineno)
        seen.add(item.id)
        items.append(item)
    log.Info(_(u"Read %d dataset items from %s") % (len(items), path), log.InfoCode.log_loaded)
    return items


class SplitResult(object):
    u"""
    A partition of dataset ids into train and test.  For the i.i.d. split
    of an evaluation set, train is the known half and test the unknown
    half.
    """
    def __init__(self, train_ids, test_ids, kind, seed=None, diagnostics=None):
        self.train_ids = list(train_ids)
        self.test_ids = list(test_ids)
        overlap = set(self.train_ids) & set(self.test_ids)
        if overlap:
            raise errors.SplitError(_(u"split sides share %d ids, e.g. %s") % (len(overlap), sorted(overlap)[0]))
        if kind not in KINDS:
            raise errors.UserError(_(u"unknown split kind %s, expected one of %s") % (kind, u", ".join(KINDS)))
        self.kind = kind
        self.seed = seed
        self.diagnostics = diagnostics or {}

    @property
    def known_ids(self):
        return self.train_ids

    @property
    def unk_ids(self):
        return self.test_ids

    def side(self, name):
        u"""Ids of a named side: known/train, unk/test or all"""
        if name in (u"known", u"train"):
            return list(self.train_ids)
        elif name in (u"unk", u"test"):
            return list(self.test_ids)
        elif name == u"all":
            return self.train_ids + self.test_ids
        raise errors.UserError(_(u"unknown split side %s, expected known, unk or all") % name)

    def check_subset(self, ids):
        missing = (set(self.train_ids) | set(self.test_ids)) - set(ids)
        if missing:
            raise errors.SplitError(_(u"split names %d ids missing from the data, e.g. %s")
                                    % (len(missing), sorted(missing)[0]))

    def to_dict(self):
        return {u"kind": self.kind, u"seed": self.seed, u"train_ids": self.train_ids,
                u"test_ids": self.test_ids, u"diagnostics": self.diagnostics}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d[u"train_ids"], d[u"test_ids"], d[u"kind"], d.get(u"seed"), d.get(u"diagnostics"))
        except (KeyError, TypeError):
            raise errors.DataError(_(u"split needs train_ids, test_ids and kind"))

    def save(self, path):
        util.ensure_parent(path)
        with io.open(path, u"wt", encoding=u"utf8", newline=u"\n") as fh:
            fh.write(json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + u"\n")
        log.Info(_(u"Wrote %s split (%d train, %d test) to %s")
                 % (self.kind, len(self.train_ids), len(self.test_ids), path),
                 log.InfoCode.split_written)

    @classmethod
    def load(cls, path):
        return cls.from_dict(util.read_json(path))


def _check_fraction(fraction):
    if not 0.0 < fraction < 1.0:
        raise errors.UserError(_(u"fraction must lie strictly between 0 and 1, got %g") % fraction)


def _ceil_count(fraction, n):
    # tolerate float noise such as 0.3 * 100 = 30.000000000000004
    return int(math.ceil(fraction * n - 1e-9))


def template_split(items, test_fraction, seed=1, schema=None):
    u"""
    Split by template so that no template occurs on both sides.

    Template groups are shuffled with seed and moved whole into test
    until test holds at least test_fraction of the items.  The last
    remaining group always stays in train.

    @raise SplitError: fewer than two distinct templates
    """
    _check_fraction(test_fraction)
    items = list(items)
    groups = {}
    for item in items:
        groups.setdefault(mask_template(item.sql, schema), []).append(item.id)
    if len(groups) < 2:
        raise errors.SplitError(_(u"template split needs at least 2 templates, found %d") % len(groups))

    keys = sorted(groups)
    random.Random(seed).shuffle(keys)
    target = test_fraction * len(items)
    test_keys = []
    n_test = 0
    for key in keys[:-1]:
        if n_test >= target - 1e-9:
            break
        test_keys.append(key)
        n_test += len(groups[key])
    if n_test < target - 1e-9:
        log.Warn(_(u"template split reached only %d of %g test items") % (n_test, target))

    test_set = set(test_keys)
    test_ids = [i.id for i in items if mask_template(i.sql, schema) in test_set]
    train_ids = [i.id for i in items if mask_template(i.sql, schema) not in test_set]
    diag = {
        u"n_templates": len(groups),
        u"n_templates_test": len(test_keys),
        u"n_templates_train": len(groups) - len(test_keys),
        u"template_overlap": 0,
        u"achieved_fraction": len(test_ids) / float(len(items)),
    }
    return SplitResult(train_ids, test_ids, TEMPLATE, seed, diag)


def length_split(items, test_fraction):
    u"""
    Put the longest queries in test, then move to train every test item
    with a token train has never seen, until no such item remains.

    @raise SplitError: the repair loop empties the test set
    """
    _check_fraction(test_fraction)
    items = list(items)
    if len(items) < 2:
        raise errors.SplitError(_(u"length split needs at least 2 items"))
    toks = dict((i.id, token_texts(i.sql)) for i in items)
    order = sorted(items, key=lambda i: (len(toks[i.id]), i.id))
    n_test = min(max(_ceil_count(test_fraction, len(items)), 1), len(items) - 1)
    train = [i.id for i in order[:-n_test]]
    test = [i.id for i in order[-n_test:]]
    boundary = len(toks[test[0]])

    vocab = set()
    for rid in train:
        vocab.update(toks[rid])
    moved = []
    while True:
        bad = [rid for rid in test if not vocab.issuperset(toks[rid])]
        if not bad:
            break
        for rid in bad:
            vocab.update(toks[rid])
        moved.extend(bad)
        bad_set = set(bad)
        test = [rid for rid in test if rid not in bad_set]
        train.extend(bad)
        log.Debug(u"length split moved %d items to train" % len(bad))
    if not test:
        raise errors.SplitError(_(u"every test item holds a token unseen in train; test set is empty"))
    if moved:
        log.Warn(_(u"length split moved %d of %d test items to train") % (len(moved), n_test),
                 log.WarningCode.repair_moved)

    unmoved_train = [len(toks[rid]) for rid in train[:len(order) - n_test]]
    test_lens = [len(toks[rid]) for rid in test]
    train_lens = [len(toks[rid]) for rid in train]
    diag = {
        u"achieved_fraction": len(test) / float(len(items)),
        u"proposed_test": n_test,
        u"moved": len(moved),
        u"moved_ids": moved,
        u"boundary_length": boundary,
        u"max_train_length_unmoved": max(unmoved_train) if unmoved_train else 0,
        u"min_test_length": min(test_lens),
        u"mean_train_length": sum(train_lens) / float(len(train_lens)),
        u"mean_test_length": sum(test_lens) / float(len(test_lens)),
        u"test_tokens_covered": True,
    }
    by_id = dict((i.id, n) for n, i in enumerate(items))
    train.sort(key=by_id.get)
    test.sort(key=by_id.get)
    return SplitResult(train, test, LENGTH, None, diag)


def iid_split(ids, fraction, seed=1):
    u"""
    Seeded uniform split into known (the first ceil(fraction * N) ids of
    the shuffle) and unknown.  Both sides keep input order and are never
    empty.

    @raise SplitError: fewer than 2 ids
    """
    _check_fraction(fraction)
    ids = list(ids)
    if len(ids) < 2:
        raise errors.SplitError(_(u"i.i.d. split needs at least 2 ids, got %d") % len(ids))
    shuffled = list(ids)
    random.Random(seed).shuffle(shuffled)
    k = min(max(_ceil_count(fraction, len(ids)), 1), len(ids) - 1)
    known = set(shuffled[:k])
    diag = {u"n_known": k, u"n_unk": len(ids) - k, u"fraction": fraction}
    return SplitResult([i for i in ids if i in known], [i for i in ids if i not in known], IID, seed, diag)


def make_split(kind, items, fraction, seed=1, schema=None):
    if kind == TEMPLATE:
        return template_split(items, fraction, seed, schema)
    elif kind == LENGTH:
        return length_split(items, fraction)
    elif kind == IID:
        return iid_split([i.id for i in items], fraction, seed)
    raise errors.UserError(_(u"unknown split kind %s, expected one of %s") % (kind, u", ".join(KINDS)))
