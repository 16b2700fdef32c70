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

u"""Dispatch the abstain commands"""

import os
import platform
import sys

import fasteners

from abstain import __version__
from abstain import calibrate
from abstain import commandline
from abstain import config
from abstain import errors
from abstain import log
from abstain import pipeline
from abstain import records
from abstain import report
from abstain import selective
from abstain import splits
from abstain import statistics
from abstain import synthetic
from abstain import uncertainty
from abstain import util


def log_startup_parms(verbosity=log.INFO):
    u"""
    log Python, abstain, and system versions
    """
    log.Log(u'=' * 80, verbosity)
    log.Log(u"abstain %s" % __version__, verbosity)
    log.Log(u"Args: %s" % u' '.join(sys.argv), verbosity)
    log.Log(u' '.join(platform.uname()), verbosity)
    log.Log(u"%s %s" % (sys.executable or sys.platform, sys.version), verbosity)
    log.Log(u'=' * 80, verbosity)


def print_statistics(stats):
    u"""
    If config.print_statistics, print stats of the finished pipeline run

    @rtype: void
    @return: void
    """
    if config.print_statistics:
        logstring = stats.get_stats_logstring(_(u"Pipeline Statistics"))
        log.Log(logstring, log.NOTICE, force_print=True)


def isotonic_direction():
    return {u"increasing": True, u"decreasing": False}.get(config.isotonic_direction, calibrate.AUTO)


def load_label_map():
    u"""
    Error labels by id, from --labels alone or derived from the log in
    --input (with --labels merged over it)

    @rtype: dict of id -> 0/1
    """
    if config.input:
        recs = records.load_log(config.input, config.labels)
        return dict((r.id, records.derive_label(r)) for r in recs)
    return records.load_labels(config.labels)


def labels_for(ids, labels):
    try:
        return [labels[rid] for rid in ids]
    except KeyError as e:
        raise errors.LabelError(_(u"no label for record %s") % util.uexc(e))


def fit_eval_ids(ids):
    u"""
    Fit and evaluation ids of a calibrate/classify run: the sides named by
    --fit-split/--eval-split of --split, or an i.i.d. split drawn with
    --fraction and --seed

    @rtype: (list, list)
    """
    if config.split:
        split = splits.SplitResult.load(config.split)
        split.check_subset(ids)
    else:
        split = splits.iid_split(ids, config.fraction, config.seed)
    return split.side(config.fit_split), split.side(config.eval_split)


def classifier_path(decisions_path):
    stem, _ext = os.path.splitext(decisions_path)
    return stem + u".classifier.json"


def cmd_score():
    method = config.method or config.score_method
    recs = records.load_log(config.input, config.labels)
    scores = uncertainty.score_records(recs, method)
    scores.write(config.output)
    if config.labels_output:
        n = records.write_labels(config.labels_output, ((r.id, records.derive_label(r)) for r in recs))
        log.Info(_(u"Wrote %d labels to %s") % (n, config.labels_output))


def cmd_calibrate():
    scores = uncertainty.ScoreVector.read(config.scores)
    labels = load_label_map()
    fit_ids, _eval_ids = fit_eval_ids(scores.ids())
    u_of = scores.as_dict()
    data = [(s.u, s.y_correct) for s in records.labeled_scores(fit_ids, u_of, labels)]
    cal = calibrate.fit(config.method, data, invert=config.invert, increasing=isotonic_direction())
    cal.save(config.output)
    log.Info(_(u"Fitted %s calibrator on %d records, saved to %s") % (cal.kind, len(data), config.output),
             log.InfoCode.calibrator_fitted, cal.kind)


def cmd_apply():
    cal = calibrate.Calibrator.load(config.calibration[0])
    scores = uncertainty.ScoreVector.read(config.scores)
    n = util.write_jsonl(config.output, ({u"id": rid, u"u": u, u"u_c": cal.apply(u), u"method": scores.method}
                                         for rid, u in scores))
    log.Info(_(u"Wrote %d calibrated scores to %s") % (n, config.output))


def cmd_classify():
    scores = uncertainty.ScoreVector.read(config.scores)
    labels = load_label_map()
    fit_ids, eval_ids = fit_eval_ids(scores.ids())
    pipeline.check_disjoint(fit_ids, eval_ids)
    u_of = scores.as_dict()
    data = [(s.u, s.y_error) for s in records.labeled_scores(fit_ids, u_of, labels)]
    clf = selective.fit(config.method, data, config.threshold_objective, config.threshold_beta,
                        seed=config.seed, restarts=config.restarts)
    log.Info(_(u"Fitted %s classifier on %d records") % (clf.kind, len(data)),
             log.InfoCode.classifier_fitted, clf.kind)
    decisions = clf.predict_all([(rid, u_of[rid]) for rid in eval_ids])
    selective.write_decisions(config.output, decisions)
    clf.save(classifier_path(config.output))


def cmd_evaluate():
    decisions = selective.read_decisions(config.decisions)
    labels = load_label_map()
    ids = [d.id for d in decisions]
    labels_for(ids, labels)
    if config.split:
        split = splits.SplitResult.load(config.split)
        pipeline.check_disjoint(split.side(config.fit_split), ids)

    scores = {}
    method = None
    if config.scores:
        sv = uncertainty.ScoreVector.read(config.scores)
        scores, method = sv.as_dict(), sv.method
    missing = [d.id for d in decisions if (d.hard or config.calibration) and d.id not in scores]
    if missing:
        raise errors.UserError(_(u"evaluate needs --scores covering every decision, e.g. %s") % missing[0])

    answerable = pred_sql = schema = None
    if config.input:
        recs = records.load_log(config.input, config.labels)
        answerable = dict((r.id, r.answerable) for r in recs if r.answerable is not None)
        pred_sql = dict((r.id, r.pred_sql) for r in recs)
    if config.schema:
        schema = splits.Schema.load(config.schema)

    out = config.out or config.output
    directory = config.output_dir or os.path.dirname(os.path.abspath(out))
    name = config.method or u"decisions"
    tables = pipeline.Tables()
    clf_path = classifier_path(config.decisions)
    clf = selective.SelectiveClassifier.load(clf_path) if os.path.exists(clf_path) else None
    entry = pipeline.evaluate_decisions(name, decisions, scores, labels, config.betas, config.seed, method,
                                        answerable, pred_sql, schema, tables, clf.direction if clf else 1)
    if clf:
        entry[u"params"] = clf.to_dict()[u"params"]

    cals = {}
    for path in config.calibration:
        cal = calibrate.Calibrator.load(path)
        cals[os.path.basename(path)] = pipeline.evaluate_calibrator(
            cal.kind, cal, [(rid, scores[rid]) for rid in ids], labels, config.n_bins, config.seed, tables)

    artifacts = tables.write(directory)
    obj = {
        u"version": config.version,
        u"n_records": len(decisions),
        u"n_errors": sum(labels[rid] for rid in ids),
        u"score_method": method,
        u"classifiers": {name: entry},
        u"calibrators": cals,
        u"artifacts": sorted(artifacts),
    }
    report.write_json(out, obj)
    log.Info(_(u"Wrote evaluation report to %s") % out, log.InfoCode.report_written)


def cmd_split():
    items = splits.load_dataset(config.input)
    schema = splits.Schema.load(config.schema) if config.schema else None
    split = splits.make_split(config.kind, items, config.fraction, config.seed, schema)
    split.save(config.out or config.output)


def cmd_synth():
    recs = synthetic.write_synthetic(config.output, config.synth_n, config.synth_separation,
                                     config.synth_error_rate, config.seed)
    log.Info(_(u"Wrote %d synthetic records to %s") % (len(recs), config.output),
             log.InfoCode.synthetic_written, u"%d" % len(recs))


def cmd_pipeline():
    cfg = pipeline.PipelineConfig.from_config()
    if not os.path.isdir(cfg.output_dir):
        os.makedirs(cfg.output_dir)

    config.lockpath = os.path.join(cfg.output_dir, u"lockfile")
    config.lockfile = fasteners.process_lock.InterProcessLock(config.lockpath)
    log.Debug(_(u"Acquiring lockfile %s") % config.lockpath)
    if not config.lockfile.acquire(blocking=False):
        config.lockfile = None
        log.FatalError(
            u"Another abstain instance is already writing to output directory %s\n" % cfg.output_dir,
            log.ErrorCode.lock_held, exit_status=errors.DATA_EXIT)

    try:
        stats = statistics.StatsPipelineProcess()
        stats.Seeds = len(cfg.seeds)
        pipeline.run_pipeline(cfg, stats)
        stats.close()
        log.Info(_(u"Wrote pipeline report to %s") % cfg.output_dir, log.InfoCode.report_written)
        print_statistics(stats)
    finally:
        util.release_lockfile()


commands = {
    u"apply": cmd_apply,
    u"calibrate": cmd_calibrate,
    u"classify": cmd_classify,
    u"evaluate": cmd_evaluate,
    u"pipeline": cmd_pipeline,
    u"score": cmd_score,
    u"split": cmd_split,
    u"synth": cmd_synth,
}


def dispatch(action):
    log_startup_parms(log.INFO)
    commands[action]()


def main(argv=None):
    u"""
    Start/end here.  Exit status 0 on success, 1 on usage errors, 2 on
    data errors and 30 on anything unexpected.
    """
    log.setup()
    try:
        action = commandline.ProcessCommandLine(sys.argv[1:] if argv is None else argv)
        dispatch(action)

    except KeyboardInterrupt:
        log.FatalError(_(u"INT intercepted...exiting."), log.ErrorCode.generic)

    except errors.AbstainError as e:
        util.release_lockfile()
        log.FatalError(u"%s: %s" % (e.__class__.__name__, util.uexc(e)),
                       e.code, e.__class__.__name__, exit_status=e.exit_status)

    except Exception as e:
        util.release_lockfile()
        # traceback only with sufficient verbosity
        log.Info(_(u"%s") % util.exception_traceback())
        log.FatalError(u"%s: %s" % (e.__class__.__name__, util.uexc(e)),
                       log.ErrorCode.exception, e.__class__.__name__)

    log.shutdown()
    return 0
