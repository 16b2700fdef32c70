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
Selective classifiers over a scalar uncertainty score.

Each classifier decides, per record, whether to answer or abstain, and
reports the probability that the generation is an error.  High u is
always the error side: abstain when the score says "error".
"""

import io
import json
import math

import numpy as np
from scipy import special
from scipy import stats

from abstain import calibrate
from abstain import errors
from abstain import log
from abstain import metrics
from abstain import util

THRESHOLD = u"threshold"
LOGREG = u"logreg"
GMM = u"gmm"
KINDS = (THRESHOLD, LOGREG, GMM)

F1 = u"f1"
FBETA = u"fbeta"
OBJECTIVES = (F1, FBETA)

VAR_FLOOR = 1e-10
EM_TOL = 1e-9
EM_MAX_ITER = 500
MIN_GMM_POINTS = 4
POSTERIOR_TOL = 1e-9


class Decision(object):
    u"""
    Answer-or-abstain outcome for one record.  Hard decisions (threshold)
    carry p_error 0 or 1 and are flagged as such.
    """
    __slots__ = (u"id", u"abstain", u"p_error", u"hard")

    def __init__(self, rid, abstain, p_error, hard=False):
        self.id = rid
        self.abstain = bool(abstain)
        self.p_error = float(p_error)
        self.hard = bool(hard)

    def __eq__(self, other):
        return isinstance(other, Decision) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return u"Decision(%r, abstain=%s, p_error=%.6g)" % (self.id, self.abstain, self.p_error)

    def to_dict(self):
        d = {u"id": self.id, u"abstain": self.abstain, u"p_error": self.p_error}
        if self.hard:
            d[u"hard"] = True
        return d

    @classmethod
    def from_dict(cls, d, lineno=None):
        rid, abstain, p = d.get(u"id"), d.get(u"abstain"), d.get(u"p_error")
        if not isinstance(rid, str) or not isinstance(abstain, bool):
            raise errors.LogParseError(u"decision needs string id and boolean abstain", lineno)
        if not isinstance(p, (int, float)) or isinstance(p, bool) or not 0.0 <= p <= 1.0:
            raise errors.LogParseError(u"decision p_error must be a number in [0, 1]", lineno)
        return cls(rid, abstain, p, d.get(u"hard", False))


def write_decisions(path, decisions):
    n = util.write_jsonl(path, (d.to_dict() for d in decisions))
    log.Info(_(u"Wrote %d decisions to %s") % (n, path))
    return n


def read_decisions(path):
    out = []
    seen = set()
    for lineno, obj in util.read_jsonl(path):
        d = Decision.from_dict(obj, lineno)
        if d.id in seen:
            raise errors.DuplicateIdError(d.id, lineno)
        seen.add(d.id)
        out.append(d)
    return out


def _enc(x):
    if math.isinf(x):
        return u"+inf" if x > 0 else u"-inf"
    return x


def _dec(x):
    if x in (u"+inf", u"inf"):
        return math.inf
    if x == u"-inf":
        return -math.inf
    return float(x)


class SelectiveClassifier(object):
    u"""
    A fitted decision rule over u.

    Parameters by kind:
      threshold  gamma
      logreg     theta0, theta1 (positive class = error)
      gmm        components [{pi, mu, sigma}, {pi, mu, sigma}], error_component
    """
    def __init__(self, kind, params):
        if kind not in KINDS:
            raise errors.UserError(_(u"unknown classifier %s, expected one of %s") % (kind, u", ".join(KINDS)))
        self.kind = kind
        self.params = params
        # diagnostics of the fit, never serialized
        self.history = []

    def __eq__(self, other):
        return isinstance(other, SelectiveClassifier) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return u"SelectiveClassifier(%s, %r)" % (self.kind, self.params)

    @property
    def direction(self):
        u"""
        +1 when a larger u makes this rule more likely to abstain, -1 when
        it makes it less likely
        """
        if self.kind == LOGREG and self.params[u"theta1"] < 0:
            return -1
        return 1

    def predict(self, u, rid=None):
        if self.kind == THRESHOLD:
            return threshold_predict(self.params[u"gamma"], u, rid)
        elif self.kind == LOGREG:
            return logreg_predict(self, u, rid)
        return gmm_predict(self, u, rid)

    def predict_all(self, entries):
        u"""Decisions for an iterable of (id, u)"""
        return [self.predict(u, rid) for rid, u in entries]

    def to_dict(self):
        p = dict(self.params)
        if self.kind == THRESHOLD:
            p[u"gamma"] = _enc(p[u"gamma"])
        return {u"kind": self.kind, u"params": p}

    @classmethod
    def from_dict(cls, d):
        try:
            kind, p = d[u"kind"], dict(d[u"params"])
            if kind == THRESHOLD:
                p[u"gamma"] = _dec(p[u"gamma"])
            clf = cls(kind, p)
            clf.check()
        except (KeyError, TypeError, ValueError):
            raise errors.DataError(_(u"malformed classifier object"))
        return clf

    def check(self):
        if self.kind != GMM:
            return
        comps = self.params[u"components"]
        if len(comps) != 2 or abs(comps[0][u"pi"] + comps[1][u"pi"] - 1.0) > 1e-9:
            raise errors.InvariantError(u"gmm needs two components with weights summing to 1")
        if min(c[u"sigma"] for c in comps) ** 2 < VAR_FLOOR * (1 - 1e-9):
            raise errors.InvariantError(u"gmm component variance below floor")
        mus = [c[u"mu"] for c in comps]
        if self.params[u"error_component"] != int(np.argmax(mus)):
            raise errors.InvariantError(u"gmm error component must have the larger mean")

    def save(self, path):
        util.ensure_parent(path)
        with io.open(path, u"wt", encoding=u"utf8", newline=u"\n") as fh:
            fh.write(json.dumps(self.to_dict(), sort_keys=True, indent=2) + u"\n")

    @classmethod
    def load(cls, path):
        return cls.from_dict(util.read_json(path))


def _split(data):
    data = list(data)
    if not data:
        return np.zeros(0), np.zeros(0, dtype=int)
    a = np.asarray(data, dtype=float)
    return a[:, 0], a[:, 1].astype(int)


def _require_both_classes(y, what):
    if y.size == 0 or y.min() == y.max():
        raise errors.SingleClassError(_(u"%s needs both error and correct examples") % what)


def sweep_counts(u, y_error, gammas):
    u"""
    Confusion counts for "predict error when u >= gamma" at every gamma.

    @return: list of metrics.ConfusionCounts, aligned with gammas
    """
    u = np.asarray(u, dtype=float)
    y = np.asarray(y_error, dtype=int)
    err = np.sort(u[y == 1])
    ok = np.sort(u[y == 0])
    out = []
    for g in gammas:
        tp = err.size - int(np.searchsorted(err, g, side=u"left"))
        fp = ok.size - int(np.searchsorted(ok, g, side=u"left"))
        out.append(metrics.ConfusionCounts(tp, fp, err.size - tp, ok.size - fp))
    return out


def threshold_fit(data, objective=F1, beta=1.0):
    u"""
    Pick the gamma that best detects errors.

    @param data: iterable of (u, y_error)
    @param objective: f1, or fbeta with the given beta
    @return: (gamma, objective value); ties go to the smaller gamma
    """
    if objective not in OBJECTIVES:
        raise errors.UserError(_(u"unknown threshold objective %s") % objective)
    if objective == F1:
        beta = 1.0
    u, y = _split(data)
    _require_both_classes(y, u"threshold fit")
    gammas = metrics.threshold_candidates(u)
    best_g, best_f = None, -1.0
    for g, counts in zip(gammas, sweep_counts(u, y, gammas)):
        f = metrics.f_beta(counts, beta)
        if f > best_f:
            best_g, best_f = float(g), f
    log.Info(_(u"Threshold gamma = %g, F(beta=%g) = %.6g") % (best_g, beta, best_f),
             log.InfoCode.classifier_fitted, THRESHOLD)
    return best_g, best_f


def threshold_predict(gamma, u, rid=None):
    abstain = u >= gamma
    return Decision(rid, abstain, 1.0 if abstain else 0.0, hard=True)


def logreg_fit(data):
    u"""
    Logistic regression of the error label on u.

    @param data: iterable of (u, y_error)
    """
    u, y = _split(data)
    _require_both_classes(y, u"logistic regression")
    theta0, theta1 = calibrate.fit_logistic(u, y)
    log.Info(_(u"Logistic regression theta = (%.6g, %.6g)") % (theta0, theta1),
             log.InfoCode.classifier_fitted, LOGREG)
    return SelectiveClassifier(LOGREG, {u"theta0": theta0, u"theta1": theta1})


def logreg_predict(clf, u, rid=None):
    p = float(special.expit(clf.params[u"theta0"] + clf.params[u"theta1"] * u))
    return Decision(rid, p > 0.5, p)


def mixture_log_likelihood(u, pi, mu, sigma):
    lp = np.log(pi)[None, :] + stats.norm.logpdf(u[:, None], mu[None, :], sigma[None, :])
    return float(special.logsumexp(lp, axis=1).sum())


def em_two_gaussians(u, mu, sigma, pi, tol=EM_TOL, max_iter=EM_MAX_ITER):
    u"""
    Expectation-maximization for a two-component 1-D Gaussian mixture.

    @param u: data points
    @param mu, sigma, pi: initial parameters, arrays of length 2
    @return: (pi, mu, sigma, history) where history lists the
        log-likelihood before the first and after every iteration
    @raise ComponentCollapseError: a component loses all its weight
    @raise FitError: an iteration lowers the log-likelihood
    """
    u = np.asarray(u, dtype=float)
    pi, mu, sigma = (np.array(x, dtype=float) for x in (pi, mu, sigma))
    sigma = np.sqrt(np.maximum(sigma ** 2, VAR_FLOOR))
    history = [mixture_log_likelihood(u, pi, mu, sigma)]
    for it in range(max_iter):
        lp = np.log(pi)[None, :] + stats.norm.logpdf(u[:, None], mu[None, :], sigma[None, :])
        resp = np.exp(lp - special.logsumexp(lp, axis=1)[:, None])
        weight = resp.sum(axis=0)
        if weight.min() <= 1e-12 * u.size:
            raise errors.ComponentCollapseError(
                _(u"mixture component %d lost all weight after %d iterations") % (int(weight.argmin()), it))
        pi = weight / u.size
        mu = resp.T.dot(u) / weight
        var = (resp * (u[:, None] - mu[None, :]) ** 2).sum(axis=0) / weight
        sigma = np.sqrt(np.maximum(var, VAR_FLOOR))
        ll = mixture_log_likelihood(u, pi, mu, sigma)
        if ll < history[-1] - EM_TOL:
            raise errors.FitError(_(u"mixture log-likelihood decreased from %.9g to %.9g after %d iterations")
                                  % (history[-1], ll, it + 1))
        history.append(ll)
        if ll - history[-2] < tol:
            break
    log.Debug(u"EM stopped after %d iterations, log-likelihood %.9g" % (len(history) - 1, history[-1]))
    return pi, mu, sigma, history


def _gmm_classifier(pi, mu, sigma):
    error = int(np.argmax(mu))
    comps = [{u"pi": float(pi[z]), u"mu": float(mu[z]), u"sigma": float(sigma[z])} for z in (0, 1)]
    return SelectiveClassifier(GMM, {u"components": comps, u"error_component": error})


def gmm_fit(scores, seed=0, restarts=0):
    u"""
    Two-component Gaussian mixture over u; the component with the larger
    mean is the error cluster.

    Initialization puts the means at the 25th and 75th percentiles with
    the sample standard deviation and equal weights.  Each restart draws
    two distinct data points as means and keeps the fit with the higher
    log-likelihood.

    @raise DegenerateInputError: fewer than 4 points or all identical
    @raise ComponentCollapseError: both components end on one point
    """
    u = np.asarray(list(scores), dtype=float)
    if u.size < MIN_GMM_POINTS:
        raise errors.DegenerateInputError(_(u"mixture fit needs at least %d scores, got %d")
                                          % (MIN_GMM_POINTS, u.size))
    if u.min() == u.max():
        raise errors.DegenerateInputError(_(u"all %d scores equal %g") % (u.size, u[0]))
    std = float(np.std(u, ddof=1))
    inits = [(np.percentile(u, [25, 75]), [std, std], [0.5, 0.5])]
    rng = np.random.default_rng(seed)
    uniq = np.unique(u)
    for r in range(restarts):
        inits.append((np.sort(rng.choice(uniq, 2, replace=False)), [std, std], [0.5, 0.5]))

    best = None
    for r, (mu0, sigma0, pi0) in enumerate(inits):
        try:
            fitted = em_two_gaussians(u, mu0, sigma0, pi0)
        except errors.ComponentCollapseError as e:
            if r == 0 and not restarts:
                raise
            log.Warn(_(u"mixture start %d skipped: %s") % (r, util.uexc(e)), log.WarningCode.gmm_restart)
            continue
        if r > 0:
            log.Warn(_(u"mixture restart %d reached log-likelihood %.9g") % (r, fitted[3][-1]),
                     log.WarningCode.gmm_restart)
        if best is None or fitted[3][-1] > best[3][-1]:
            best = fitted
    if best is None:
        raise errors.ComponentCollapseError(_(u"every mixture start collapsed"))

    pi, mu, sigma, history = best
    scale = max(1.0, float(np.abs(u).max()))
    if abs(mu[0] - mu[1]) <= 1e-9 * scale and np.all(sigma ** 2 <= VAR_FLOOR * 1.000001):
        raise errors.ComponentCollapseError(_(u"both mixture components collapsed onto %g") % mu[0])
    clf = _gmm_classifier(pi, mu, sigma)
    clf.history = history
    log.Info(_(u"Mixture means (%.6g, %.6g), weights (%.4f, %.4f) after %d iterations")
             % (mu[0], mu[1], pi[0], pi[1], len(history) - 1),
             log.InfoCode.classifier_fitted, GMM)
    return clf


def gmm_posterior(clf, u):
    u"""
    Weighted log densities of both components at u and the posterior
    probability of the error component.
    """
    comps = clf.params[u"components"]
    lp = np.array([math.log(c[u"pi"]) + stats.norm.logpdf(u, c[u"mu"], c[u"sigma"]) for c in comps])
    e = clf.params[u"error_component"]
    p_error = float(np.exp(lp[e] - special.logsumexp(lp)))
    return lp, min(max(p_error, 0.0), 1.0)


def gmm_predict(clf, u, rid=None):
    lp, p_error = gmm_posterior(clf, u)
    e = clf.params[u"error_component"]
    # equal weighted densities answer
    return Decision(rid, lp[e] > lp[1 - e], p_error)


def fit(kind, data, objective=F1, beta=1.0, seed=0, restarts=0):
    u"""
    Fit a classifier of the named kind on (u, y_error) pairs.  The mixture
    ignores the labels.
    """
    if kind == THRESHOLD:
        gamma, _f = threshold_fit(data, objective, beta)
        return SelectiveClassifier(THRESHOLD, {u"gamma": gamma})
    elif kind == LOGREG:
        return logreg_fit(data)
    elif kind == GMM:
        return gmm_fit([u for u, _y in data], seed=seed, restarts=restarts)
    raise errors.UserError(_(u"unknown classifier %s, expected one of %s") % (kind, u", ".join(KINDS)))
