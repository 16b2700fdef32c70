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
Fit on the known split, evaluate on the unknown split, write the report.

run_pipeline scores a prediction log, draws one i.i.d. known/unknown
split per seed, fits every configured calibrator and selective classifier
on the known half only and evaluates them on the unknown half.  The
evaluation helpers are shared with the evaluate command.
"""

import contextlib
import os

import numpy as np

from abstain import calibrate
from abstain import config
from abstain import errors
from abstain import log
from abstain import metrics
from abstain import records
from abstain import report
from abstain import selective
from abstain import splits
from abstain import uncertainty
from abstain import util

HEADERS = {
    u"risk_coverage.csv": (u"seed", u"score_method", u"classifier", u"gamma", u"coverage_paper",
                           u"coverage_std", u"risk_paper", u"risk_selective"),
    u"roc.csv": (u"seed", u"score_method", u"classifier", u"threshold", u"fpr", u"tpr"),
    u"reliability.csv": (u"seed", u"calibrator", u"bin_center", u"mean_predicted",
                         u"empirical_frequency", u"count"),
    u"fbeta_heatmap.csv": (u"seed", u"classifier", u"beta", u"f_beta", u"defined"),
    u"complexity_scatter.csv": (u"seed", u"classifier", u"id", u"p_error", u"token_length",
                                u"unique_schema_elements", u"y_error"),
    u"tradeoff.csv": (u"seed", u"classifier", u"calibrator", u"result_ex", u"brier"),
}

DEFAULT_OUTPUT_DIR = u"abstain-out"

SUMMARY_HEADER = (u"classifier", u"n_seeds", u"recall", u"fdr", u"result_ex", u"roc_auc", u"f1",
                  u"risk_reduction")


@contextlib.contextmanager
def stage(name):
    u"""Prefix errors raised in the block with the stage name"""
    try:
        yield
    except errors.StageError:
        raise
    except errors.AbstainError as e:
        raise errors.StageError(name, e)


class PipelineConfig(object):
    u"""
    Immutable snapshot of the configuration a pipeline run depends on
    """
    fields = (u"input", u"labels", u"schema", u"score_method", u"calibrators", u"classifiers",
              u"fraction", u"seeds", u"betas", u"n_bins", u"output_dir", u"invert", u"restarts",
              u"threshold_objective", u"threshold_beta", u"isotonic_direction", u"svg")

    # excluded from the report so that equal runs in different places match
    local_fields = (u"output_dir", u"svg")

    def __init__(self, **values):
        for f in self.fields:
            value = values.get(f)
            if isinstance(value, list):
                value = tuple(value)
            object.__setattr__(self, f, value)

    def __setattr__(self, name, value):
        raise AttributeError(u"PipelineConfig is immutable")

    @classmethod
    def from_config(cls):
        values = dict((f, getattr(config, f)) for f in cls.fields)
        values[u"output_dir"] = values[u"output_dir"] or DEFAULT_OUTPUT_DIR
        return cls(**values)

    def as_dict(self):
        return dict((f, list(v) if isinstance(v, tuple) else v)
                    for f, v in ((f, getattr(self, f)) for f in self.fields) if f not in self.local_fields)

    def validate(self):
        u"""
        @raise MissingFileError: an input file is missing
        @raise ConfigError: any other inconsistency
        """
        util.check_exists(self.input, u"prediction log")
        if self.labels:
            util.check_exists(self.labels, u"labels file")
        if self.schema:
            util.check_exists(self.schema, u"schema file")
        if self.score_method not in uncertainty.METHODS:
            raise errors.ConfigError(_(u"unknown scoring method %s") % self.score_method)
        _check_names(u"calibrator", self.calibrators, calibrate.KINDS)
        _check_names(u"classifier", self.classifiers, selective.KINDS)
        if not self.seeds or any(isinstance(s, bool) or not isinstance(s, int) for s in self.seeds):
            raise errors.ConfigError(_(u"seeds must be a non-empty list of integers"))
        if len(set(self.seeds)) != len(self.seeds):
            raise errors.ConfigError(_(u"seeds must not repeat"))
        if not isinstance(self.fraction, float) or not 0.0 < self.fraction < 1.0:
            raise errors.ConfigError(_(u"fraction must lie strictly between 0 and 1"))
        if isinstance(self.n_bins, bool) or not isinstance(self.n_bins, int) or self.n_bins < 1:
            raise errors.ConfigError(_(u"n_bins must be a positive integer"))
        if not self.betas or any(b < 0 for b in self.betas):
            raise errors.ConfigError(_(u"betas must be a non-empty list of non-negative numbers"))
        if self.restarts < 0:
            raise errors.ConfigError(_(u"restarts must be non-negative"))
        if self.threshold_objective not in selective.OBJECTIVES:
            raise errors.ConfigError(_(u"unknown threshold objective %s") % self.threshold_objective)
        if self.isotonic_direction not in (u"increasing", u"decreasing", calibrate.AUTO):
            raise errors.ConfigError(_(u"isotonic direction must be increasing, decreasing or auto"))
        return self

    @property
    def isotonic_increasing(self):
        return {u"increasing": True, u"decreasing": False}.get(self.isotonic_direction, calibrate.AUTO)


def _check_names(what, names, known):
    if not names:
        raise errors.ConfigError(_(u"no %ss selected") % what)
    for name in names:
        if name not in known:
            raise errors.ConfigError(_(u"unknown %s %s, expected one of %s") % (what, name, u", ".join(known)))


class Tables(object):
    u"""Rows of the CSV artifacts, keyed by file name"""
    def __init__(self):
        self.rows = dict((name, []) for name in HEADERS)

    def add(self, name, row):
        self.rows[name].append(row)

    def write(self, directory, stats=None):
        written = []
        for name in sorted(HEADERS):
            path = os.path.join(directory, name)
            report.write_csv(path, HEADERS[name], self.rows[name])
            written.append(name)
            if stats:
                stats.add_artifact(path)
        return written


def check_disjoint(fit_ids, eval_ids):
    u"""
    @raise OverlapError: the fit and evaluation id sets intersect
    """
    both = set(fit_ids) & set(eval_ids)
    if both:
        raise errors.OverlapError(_(u"%d records are in both the fit and the evaluation set, e.g. %s")
                                  % (len(both), sorted(both)[0]))


def evaluate_calibrator(name, cal, entries, labels, n_bins, seed=None, tables=None):
    u"""
    Brier scores and reliability curve of a fitted calibrator.

    @param entries: (id, u) pairs to evaluate on
    @param labels: dict id -> y_error; calibration targets y_correct
    """
    pairs = [(cal.apply(u), 1 - labels[rid]) for rid, u in entries]
    bins = calibrate.reliability_curve(pairs, n_bins)
    if tables is not None:
        for b in bins:
            tables.add(u"reliability.csv", (seed, name) + b.as_tuple())
    empty = sum(1 for b in bins if not b.defined)
    if empty:
        log.Debug(u"%s: %d of %d reliability bins empty" % (name, empty, n_bins))
    return {
        u"params": cal.to_dict()[u"params"],
        u"brier": metrics.brier(pairs),
        u"brier_sum": metrics.brier_sum(pairs),
        u"reliability": [list(b.as_tuple()) for b in bins],
    }


def ranking_scores(decisions, scores, direction=1):
    u"""
    Score used to rank records for the ROC and risk-coverage curves: u
    signed by the direction of the classifier.  A decision without a score
    ranks by its p_error.
    """
    return [direction * scores[d.id] if d.id in scores else d.p_error for d in decisions]


def evaluate_decisions(name, decisions, scores, labels, betas, seed=None, method=None,
                       answerable=None, pred_sql=None, schema=None, tables=None, direction=1):
    u"""
    Every error-detection metric of one classifier's decisions.

    @param scores: dict id -> u
    @param labels: dict id -> y_error
    @param answerable: optional dict id -> bool
    @param pred_sql: optional dict id -> predicted query, for the
        complexity scatter
    @param direction: sign applied to u when ranking, see ranking_scores
    @return: report entry of the classifier
    """
    decisions = list(decisions)
    if not decisions:
        raise errors.DataError(_(u"no decisions to evaluate for %s") % name)
    counts = metrics.ConfusionCounts.from_decisions(decisions, labels)
    y = [labels[d.id] for d in decisions]
    precision, recall, fdr = metrics.precision_recall_fdr(counts)
    if precision is None or recall is None:
        log.Warn(_(u"%s: precision or recall undefined for %r") % (name, counts),
                 log.WarningCode.undefined_ratio, name)
    sweep = metrics.fbeta_sweep(counts, betas)
    rank = ranking_scores(decisions, scores, direction)
    points = list(zip(rank, y))

    try:
        auc = metrics.roc_auc(points)
        roc = metrics.roc_curve(points)
    except errors.SingleClassError:
        log.Warn(_(u"%s: evaluation set has a single class, ROC undefined") % name,
                 log.WarningCode.undefined_ratio, name)
        auc, roc = None, []

    if tables is not None:
        for beta, f in sweep:
            tables.add(u"fbeta_heatmap.csv", (seed, name, beta, f, counts.f_beta_defined))
        for p in metrics.risk_coverage_curve(points):
            tables.add(u"risk_coverage.csv", (seed, method, name) + p.as_tuple())
        for threshold, fpr, tpr in roc:
            tables.add(u"roc.csv", (seed, method, name, threshold, fpr, tpr))
        if pred_sql:
            _complexity_rows(tables, seed, name, decisions, labels, pred_sql, schema)

    return {
        u"params": None,
        u"counts": counts.as_dict(),
        u"precision": precision,
        u"recall": recall,
        u"fdr": fdr,
        u"fbeta": dict((u"%g" % b, f) for b, f in sweep),
        u"f_beta_defined": counts.f_beta_defined,
        u"result_ex": metrics.result_ex(decisions, labels),
        u"roc_auc": auc,
        u"risk": metrics.risk_reduction(decisions, labels),
        u"error_breakdown": metrics.error_breakdown(decisions, labels, answerable or {}),
    }


def _complexity_rows(tables, seed, name, decisions, labels, pred_sql, schema):
    skipped = 0
    for d in decisions:
        sql = pred_sql.get(d.id)
        if sql is None:
            continue
        try:
            length, elements = metrics.complexity_features(sql, schema)
        except errors.LexError as e:
            log.Debug(u"%s: %s" % (d.id, util.uexc(e)))
            skipped += 1
            continue
        tables.add(u"complexity_scatter.csv", (seed, name, d.id, d.p_error, length, elements, labels[d.id]))
    if skipped:
        log.Warn(_(u"%d predicted queries could not be lexed and are left out of the complexity scatter")
                 % skipped, log.WarningCode.unlexable_sql)


def run_seed(cfg, scores, labels, seed, answerable=None, pred_sql=None, schema=None, tables=None, stats=None):
    u"""
    One known/unknown split: fit everything on known, evaluate on unk.

    A calibrator or classifier that cannot be fitted on this split is
    recorded as failed and the run goes on.

    @type scores: uncertainty.ScoreVector
    @return: report entry of the run
    """
    with stage(u"split"):
        split = splits.iid_split(scores.ids(), cfg.fraction, seed)
        check_disjoint(split.known_ids, split.unk_ids)
    if stats:
        stats.add_split(split)
    u_of = scores.as_dict()
    known = records.labeled_scores(split.known_ids, u_of, labels)
    known_err = [(s.u, s.y_error) for s in known]
    known_ok = [(s.u, s.y_correct) for s in known]
    unk = [(rid, u_of[rid]) for rid in split.unk_ids]

    cal_entries = {}
    with stage(u"calibrate"):
        for kind in cfg.calibrators:
            try:
                cal = calibrate.fit(kind, known_ok, invert=cfg.invert, increasing=cfg.isotonic_increasing)
            except errors.FitError as e:
                cal_entries[kind] = _failed(u"calibrator", kind, seed, e)
                continue
            cal_entries[kind] = evaluate_calibrator(kind, cal, unk, labels, cfg.n_bins, seed, tables)

    clf_entries = {}
    with stage(u"classify"):
        for kind in cfg.classifiers:
            try:
                clf = selective.fit(kind, known_err, cfg.threshold_objective, cfg.threshold_beta,
                                    seed=seed, restarts=cfg.restarts)
            except errors.FitError as e:
                clf_entries[kind] = _failed(u"classifier", kind, seed, e)
                continue
            decisions = clf.predict_all(unk)
            if stats:
                stats.add_decisions(decisions)
            entry = evaluate_decisions(kind, decisions, u_of, labels, cfg.betas, seed, scores.method,
                                       answerable, pred_sql, schema, tables, clf.direction)
            entry[u"params"] = clf.to_dict()[u"params"]
            clf_entries[kind] = entry

    if tables is not None:
        for clf_name in cfg.classifiers:
            for cal_name in cfg.calibrators:
                c, k = clf_entries[clf_name], cal_entries[cal_name]
                if u"failed" in c or u"failed" in k:
                    continue
                tables.add(u"tradeoff.csv", (seed, clf_name, cal_name, c[u"result_ex"], k[u"brier"]))

    return {
        u"seed": seed,
        u"split": {u"n_known": len(split.known_ids), u"n_unk": len(split.unk_ids)},
        u"calibrators": cal_entries,
        u"classifiers": clf_entries,
    }


def _failed(what, kind, seed, err):
    msg = util.uexc(err)
    log.Warn(_(u"seed %d: %s %s not fitted: %s") % (seed, what, kind, msg), log.WarningCode.fit_failed, kind)
    return {u"failed": msg}


def _mean(values):
    values = [v for v in values if v is not None]
    if not values:
        return None
    return float(np.mean(values))


def summarize(runs, cfg):
    u"""Average the per-seed metrics of every classifier and calibrator"""
    clfs = {}
    for kind in cfg.classifiers:
        entries = [r[u"classifiers"][kind] for r in runs if u"failed" not in r[u"classifiers"][kind]]
        clfs[kind] = {
            u"n_seeds": len(entries),
            u"recall": _mean(e[u"recall"] for e in entries),
            u"fdr": _mean(e[u"fdr"] for e in entries),
            u"result_ex": _mean(e[u"result_ex"] for e in entries),
            u"roc_auc": _mean(e[u"roc_auc"] for e in entries),
            u"f1": _mean(e[u"fbeta"].get(u"1") for e in entries),
            u"risk_reduction": _mean(e[u"risk"][u"relative_reduction"] for e in entries),
        }
    cals = {}
    for kind in cfg.calibrators:
        entries = [r[u"calibrators"][kind] for r in runs if u"failed" not in r[u"calibrators"][kind]]
        cals[kind] = {
            u"n_seeds": len(entries),
            u"brier": _mean(e[u"brier"] for e in entries),
            u"brier_sum": _mean(e[u"brier_sum"] for e in entries),
        }
    return {u"classifiers": clfs, u"calibrators": cals}


def load_inputs(cfg):
    u"""
    @return: (records, labels dict, answerable dict, pred_sql dict, schema)
    """
    recs = records.load_log(cfg.input, cfg.labels)
    labels = dict((r.id, records.derive_label(r)) for r in recs)
    answerable = dict((r.id, r.answerable) for r in recs if r.answerable is not None)
    pred_sql = dict((r.id, r.pred_sql) for r in recs)
    schema = splits.Schema.load(cfg.schema) if cfg.schema else None
    return recs, labels, answerable, pred_sql, schema


def run_pipeline(cfg, stats=None):
    u"""
    Run every stage and write report.json, the CSV curves, summary.csv
    and, when asked, SVG plots into cfg.output_dir.

    @type cfg: PipelineConfig
    @return: the report object
    @raise StageError: wrapping the error of the failing stage
    """
    with stage(u"config"):
        cfg.validate()
    with stage(u"load"):
        recs, labels, answerable, pred_sql, schema = load_inputs(cfg)
        if len(recs) < 2:
            raise errors.DataError(_(u"the prediction log needs at least 2 records"))
    if stats:
        stats.add_records(labels)
    with stage(u"score"):
        scores = uncertainty.score_records(recs, cfg.score_method)

    tables = Tables()
    runs = []
    for seed in cfg.seeds:
        log.Notice(_(u"Evaluating seed %d") % seed)
        runs.append(run_seed(cfg, scores, labels, seed, answerable, pred_sql, schema, tables, stats))

    with stage(u"report"):
        summary = summarize(runs, cfg)
        artifacts = tables.write(cfg.output_dir, stats)
        artifacts.append(u"summary.csv")
        report.write_csv(os.path.join(cfg.output_dir, u"summary.csv"), SUMMARY_HEADER,
                         [(k,) + tuple(summary[u"classifiers"][k][f] for f in SUMMARY_HEADER[1:])
                          for k in cfg.classifiers])
        artifacts.append(u"report.json")
        obj = {
            u"version": config.version,
            u"config": cfg.as_dict(),
            u"n_records": len(recs),
            u"n_errors": sum(labels.values()),
            u"score_method": cfg.score_method,
            u"seeds": list(cfg.seeds),
            u"runs": runs,
            u"summary": summary,
            u"artifacts": sorted(artifacts),
        }
        report.validate_report(obj)
        report.write_json(os.path.join(cfg.output_dir, u"report.json"), obj)
        if stats:
            stats.add_artifact(u"summary.csv")
            stats.add_artifact(u"report.json")
        if cfg.svg:
            render_plots(cfg.output_dir, tables)
    return obj


def render_plots(directory, tables):
    u"""SVG versions of the curve files, first seed only"""
    def series(name, group_col, x_col, y_col):
        header = HEADERS[name]
        rows = tables.rows[name]
        if not rows:
            return []
        first_seed = rows[0][0]
        gi, xi, yi = header.index(group_col), header.index(x_col), header.index(y_col)
        groups = {}
        for row in rows:
            if row[0] == first_seed and row[xi] is not None and row[yi] is not None:
                xs, ys = groups.setdefault(row[gi], ([], []))
                xs.append(row[xi])
                ys.append(row[yi])
        return [(g, xs, ys) for g, (xs, ys) in sorted(groups.items())]

    report.render_svg(os.path.join(directory, u"risk_coverage.svg"),
                      series(u"risk_coverage.csv", u"classifier", u"coverage_std", u"risk_paper"),
                      u"Risk vs coverage", u"coverage (answered fraction)", u"risk (error fraction)")
    report.render_svg(os.path.join(directory, u"roc.svg"),
                      series(u"roc.csv", u"classifier", u"fpr", u"tpr"),
                      u"ROC", u"false positive rate", u"true positive rate")
    report.render_svg(os.path.join(directory, u"reliability.svg"),
                      series(u"reliability.csv", u"calibrator", u"mean_predicted", u"empirical_frequency"),
                      u"Reliability", u"mean predicted", u"empirical frequency")
    report.render_svg(os.path.join(directory, u"complexity_scatter.svg"),
                      series(u"complexity_scatter.csv", u"classifier", u"token_length", u"p_error"),
                      u"Error probability vs query length", u"SQL tokens", u"p_error", kind=u"scatter")
    report.render_svg(os.path.join(directory, u"tradeoff.svg"),
                      series(u"tradeoff.csv", u"calibrator", u"brier", u"result_ex"),
                      u"Result EX vs Brier", u"Brier", u"Result EX", kind=u"scatter")
