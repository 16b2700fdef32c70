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
Miscellaneous utilities.
"""

import io
import json
import os
import sys
import traceback

from abstain import config
from abstain import errors
from abstain import log


def exception_traceback(limit=50):
    u"""
    @return A string representation in typical Python format of the
            currently active/raised exception.
    """
    type, value, tb = sys.exc_info()  # pylint: disable=redefined-builtin

    lines = traceback.format_tb(tb, limit)
    lines.extend(traceback.format_exception_only(type, value))

    msg = u"Traceback (innermost last):\n"
    msg = msg + u"%-20s %s" % (u"".join(lines[:-1]), lines[-1])
    return msg


def uexc(e):
    u"""Returns the exception message in Unicode"""
    if e and e.args:
        for m in e.args:
            if isinstance(m, str):
                return m
            elif isinstance(m, bytes):
                return m.decode(u"utf8", u"replace")
        return str(e)
    else:
        return u''


def expand_fn(filename):
    return os.path.expanduser(os.path.expandvars(filename))


def check_exists(path, what=u"file"):
    u"""Raise MissingFileError unless path exists"""
    if path is None or not os.path.exists(path):
        raise errors.MissingFileError(_(u"%s %s does not exist") % (what, path))
    return path


def read_jsonl(path):
    u"""
    Yield (lineno, object) for every non-blank line of a JSON Lines file.

    @param path: file to read, UTF-8
    @raise LogParseError: on invalid JSON or a non-object line
    """
    check_exists(path)
    with io.open(path, u"rt", encoding=u"utf8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except ValueError as e:
                raise errors.LogParseError(uexc(e), lineno)
            if not isinstance(obj, dict):
                raise errors.LogParseError(u"expected a JSON object", lineno)
            yield lineno, obj


def dumps_line(obj):
    u"""Serialize one JSON Lines entry, byte-stable for equal input"""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, allow_nan=False)


def write_jsonl(path, objs):
    u"""Write an iterable of dicts as JSON Lines"""
    ensure_parent(path)
    count = 0
    with io.open(path, u"wt", encoding=u"utf8", newline=u"\n") as fh:
        for obj in objs:
            fh.write(dumps_line(obj) + u"\n")
            count += 1
    log.Debug(_(u"Wrote %d lines to %s") % (count, path))
    return count


def read_json(path):
    check_exists(path)
    with io.open(path, u"rt", encoding=u"utf8") as fh:
        try:
            return json.load(fh)
        except ValueError as e:
            raise errors.LogParseError(u"%s: %s" % (path, uexc(e)))


def ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        os.makedirs(parent)


def release_lockfile():
    if config.lockfile:
        log.Debug(_(u"Releasing lockfile %s") % config.lockpath)
        try:
            config.lockfile.release()
            config.lockfile = None
            os.remove(config.lockpath)
            config.lockpath = u""
        except Exception as e:
            log.Error(u"Could not release lockfile: %s" % uexc(e))
