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
Report emission: the JSON report, the CSV curve files and optional SVG
plots.  JSON and CSV output is byte-identical for identical input.
"""

import csv
import io
import json
import math

from abstain import errors
from abstain import log
from abstain import util

# top-level keys of report.json
REPORT_FIELDS = (u"version", u"config", u"n_records", u"n_errors", u"score_method",
                 u"seeds", u"runs", u"summary", u"artifacts")

# keys of every entry of report["runs"]
RUN_FIELDS = (u"seed", u"split", u"calibrators", u"classifiers")

# keys of every fitted classifier entry of a run
CLASSIFIER_FIELDS = (u"params", u"counts", u"precision", u"recall", u"fdr", u"fbeta",
                     u"f_beta_defined", u"result_ex", u"roc_auc", u"risk", u"error_breakdown")

# keys of every fitted calibrator entry of a run
CALIBRATOR_FIELDS = (u"params", u"brier", u"brier_sum", u"reliability")

CSV_FILES = (u"risk_coverage.csv", u"roc.csv", u"reliability.csv", u"fbeta_heatmap.csv",
             u"complexity_scatter.csv", u"tradeoff.csv")


def jsonable(obj):
    u"""
    Copy obj replacing infinities by "+inf"/"-inf" and NaN by None, so
    the result is strict JSON
    """
    if isinstance(obj, dict):
        return dict((k, jsonable(v)) for k, v in obj.items())
    elif isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    elif isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return u"+inf" if obj > 0 else u"-inf"
    return obj


def write_json(path, obj):
    util.ensure_parent(path)
    text = json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
    with io.open(path, u"wt", encoding=u"utf8", newline=u"\n") as fh:
        fh.write(text + u"\n")
    log.Info(_(u"Wrote report %s") % path, log.InfoCode.report_written)


def format_cell(value):
    u"""CSV text of one value; None is an empty cell"""
    if value is None:
        return u""
    elif isinstance(value, bool):
        return u"true" if value else u"false"
    elif isinstance(value, int):
        return u"%d" % value
    elif isinstance(value, float):
        if math.isinf(value):
            return u"inf" if value > 0 else u"-inf"
        return u"%.10g" % value
    return u"%s" % value


def write_csv(path, header, rows):
    u"""
    Write a header row and the data rows.

    @raise ReportError: a row whose width differs from the header
    """
    header = list(header)
    util.ensure_parent(path)
    count = 0
    with io.open(path, u"wt", encoding=u"utf8", newline=u"") as fh:
        writer = csv.writer(fh, lineterminator=u"\n")
        writer.writerow(header)
        for row in rows:
            row = list(row)
            if len(row) != len(header):
                raise errors.ReportError(_(u"%s: row %d has %d cells, header has %d")
                                         % (path, count + 1, len(row), len(header)))
            writer.writerow([format_cell(v) for v in row])
            count += 1
    log.Info(_(u"Wrote %d rows to %s") % (count, path), log.InfoCode.report_written)
    return count


def _require(obj, fields, where):
    if not isinstance(obj, dict):
        raise errors.ReportError(_(u"%s is not an object") % where)
    missing = [f for f in fields if f not in obj]
    if missing:
        raise errors.ReportError(_(u"%s lacks %s") % (where, u", ".join(missing)))


def validate_report(obj):
    u"""
    Check a report against the published field lists.

    @raise ReportError
    """
    _require(obj, REPORT_FIELDS, u"report")
    for run in obj[u"runs"]:
        where = u"run seed %s" % run.get(u"seed")
        _require(run, RUN_FIELDS, where)
        for name, entry in run[u"calibrators"].items():
            if u"failed" not in entry:
                _require(entry, CALIBRATOR_FIELDS, u"%s calibrator %s" % (where, name))
        for name, entry in run[u"classifiers"].items():
            if u"failed" not in entry:
                _require(entry, CLASSIFIER_FIELDS, u"%s classifier %s" % (where, name))
    return obj


def render_svg(path, series, title, xlabel, ylabel, kind=u"line"):
    u"""
    Plot series of (label, xs, ys) as lines or scatter points into an SVG.

    matplotlib is an optional dependency; without it a warning is logged
    and False returned.
    """
    try:
        import matplotlib
        matplotlib.use(u"Agg")
        from matplotlib import pyplot as plt
    except ImportError:
        log.Warn(_(u"matplotlib is not installed; skipping %s") % path, log.WarningCode.svg_unavailable)
        return False

    matplotlib.rcParams[u"svg.hashsalt"] = u"abstain"
    f, ax = plt.subplots(figsize=(6, 4.5))
    for label, xs, ys in series:
        if kind == u"scatter":
            ax.scatter(xs, ys, s=8, label=label)
        else:
            ax.plot(xs, ys, label=label)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend(loc=u"best", fontsize=u"small")
    util.ensure_parent(path)
    f.savefig(path, format=u"svg", metadata={u"Date": None})
    plt.close(f)
    log.Info(_(u"Wrote plot %s") % path, log.InfoCode.report_written)
    return True
