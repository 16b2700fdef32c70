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
Calibration maps from raw uncertainty u to probability of correct, u^c.

Three kinds are supported: MinMax scaling, Platt (two-parameter sigmoid
fitted by ridge-regularized maximum likelihood) and isotonic regression
(least-squares monotone step function solved by pool-adjacent-violators).
"""

import io
import json

import numpy as np
from scipy import special

from abstain import errors
from abstain import log
from abstain import util

MINMAX = u"minmax"
PLATT = u"platt"
ISOTONIC = u"isotonic"
KINDS = (MINMAX, PLATT, ISOTONIC)

AUTO = u"auto"

RIDGE = 1e-6
MAX_NEWTON_ITER = 200
GRAD_TOL = 1e-10


class Calibrator(object):
    u"""
    A fitted monotone map into [0, 1]

    Parameters by kind:
      minmax    u_min, u_max, invert, degenerate
      platt     theta0, theta1
      isotonic  breakpoints a_1..a_{M+1} ascending in u, values theta_1..theta_M
                in the same order, increasing; block j is [a_j, a_{j+1}) for
                an increasing fit and (a_j, a_{j+1}] for a decreasing one
    """
    def __init__(self, kind, params):
        if kind not in KINDS:
            raise errors.UserError(_(u"unknown calibrator %s, expected one of %s") % (kind, u", ".join(KINDS)))
        self.kind = kind
        self.params = params
        self._warned = False

    def __eq__(self, other):
        return isinstance(other, Calibrator) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return u"Calibrator(%s, %r)" % (self.kind, self.params)

    def apply(self, u):
        u"""
        Map scores to calibrated values.

        @param u: scalar or array of raw scores
        @return: same shape as u, values in [0, 1]
        """
        scalar = np.isscalar(u)
        x = np.atleast_1d(np.asarray(u, dtype=float))
        if self.kind == MINMAX:
            out = self._apply_minmax(x)
        elif self.kind == PLATT:
            out = special.expit(self.params[u"theta0"] + self.params[u"theta1"] * x)
        else:
            a = np.asarray(self.params[u"breakpoints"], dtype=float)
            theta = np.asarray(self.params[u"values"], dtype=float)
            side = u"right" if self.params.get(u"increasing", True) else u"left"
            # interior boundaries a_2..a_M; left of a_1 and right of a_{M+1} clamp
            idx = np.searchsorted(a[1:len(theta)], x, side=side)
            out = theta[idx]
        return float(out[0]) if scalar else out

    def _apply_minmax(self, x):
        p = self.params
        if p.get(u"degenerate"):
            if not self._warned:
                log.Warn(_(u"MinMax calibrator was fitted on identical scores; returning 0.5"),
                         log.WarningCode.degenerate_calibrator)
                self._warned = True
            return np.full(x.shape, 0.5)
        out = np.clip((x - p[u"u_min"]) / (p[u"u_max"] - p[u"u_min"]), 0.0, 1.0)
        if p.get(u"invert"):
            out = 1.0 - out
        return out

    def to_dict(self):
        return {u"kind": self.kind, u"params": self.params}

    @classmethod
    def from_dict(cls, d):
        try:
            c = cls(d[u"kind"], d[u"params"])
        except (KeyError, TypeError):
            raise errors.DataError(_(u"malformed calibrator object"))
        c.check()
        return c

    def check(self):
        u"""Assert the invariants of the fitted parameters"""
        p = self.params
        if self.kind == MINMAX:
            if not p.get(u"degenerate") and not p[u"u_min"] < p[u"u_max"]:
                raise errors.InvariantError(u"minmax needs u_min < u_max")
        elif self.kind == ISOTONIC:
            a, theta = p[u"breakpoints"], p[u"values"]
            if len(a) != len(theta) + 1 or not theta:
                raise errors.InvariantError(u"isotonic needs M values and M+1 breakpoints")
            if (any(a[i] > a[i + 1] for i in range(len(a) - 1)) or
                    any(a[i] >= a[i + 1] for i in range(1, len(a) - 2))):
                raise errors.InvariantError(u"isotonic breakpoints must increase")
            sign = 1 if p.get(u"increasing", True) else -1
            if any(sign * (theta[i + 1] - theta[i]) < 0 for i in range(len(theta) - 1)):
                raise errors.InvariantError(u"isotonic values must follow the direction of the fit")
            if any(t < 0 or t > 1 for t in theta):
                raise errors.InvariantError(u"isotonic values must lie in [0, 1]")

    def save(self, path):
        util.ensure_parent(path)
        with io.open(path, u"wt", encoding=u"utf8", newline=u"\n") as fh:
            fh.write(json.dumps(self.to_dict(), sort_keys=True, indent=2) + u"\n")

    @classmethod
    def load(cls, path):
        return cls.from_dict(util.read_json(path))


def calibrator_apply(c, u):
    u"""Apply a fitted calibrator to one score"""
    return c.apply(float(u))


def minmax_fit(scores, invert=False):
    u"""
    Remember the range of the fitting sample.  Identical scores give a
    degenerate calibrator that maps everything to 0.5.
    """
    u = np.asarray(scores, dtype=float)
    if u.size < 2:
        raise errors.FitError(_(u"minmax needs at least 2 scores, got %d") % u.size)
    lo, hi = float(u.min()), float(u.max())
    degenerate = not lo < hi
    if degenerate:
        log.Warn(_(u"All %d fitting scores equal %g; MinMax is degenerate") % (u.size, lo),
                 log.WarningCode.degenerate_calibrator)
    return Calibrator(MINMAX, {u"u_min": lo, u"u_max": hi, u"invert": bool(invert),
                               u"degenerate": degenerate})


def _design(u):
    return np.column_stack([np.ones_like(u), u])


def logistic_loglik(theta, u, y, ridge=RIDGE):
    u"""Ridge-penalized Bernoulli log-likelihood of a sigmoid in u"""
    theta = np.asarray(theta, dtype=float)
    z = theta[0] + theta[1] * np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    ll = np.sum(y * special.log_expit(z) + (1.0 - y) * special.log_expit(-z))
    return float(ll - 0.5 * ridge * np.dot(theta, theta))


def logistic_gradient(theta, u, y, ridge=RIDGE):
    u"""Gradient of logistic_loglik with respect to (theta0, theta1)"""
    theta = np.asarray(theta, dtype=float)
    X = _design(np.asarray(u, dtype=float))
    p = special.expit(X.dot(theta))
    return X.T.dot(np.asarray(y, dtype=float) - p) - ridge * theta


def fit_logistic(u, y, ridge=RIDGE, max_iter=MAX_NEWTON_ITER, tol=GRAD_TOL):
    u"""
    Newton-Raphson maximization of logistic_loglik with backtracking.

    Stops when the gradient norm drops below tol, or when the Newton
    decrement shows the iterate is optimal to machine precision.  When the
    line search finds no step that keeps the objective from falling, the
    current iterate is returned.

    @return: (theta0, theta1)
    @raise SingleClassError, ConvergenceError
    """
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    if u.size < 2:
        raise errors.FitError(_(u"logistic fit needs at least 2 points, got %d") % u.size)
    if y.min() == y.max():
        raise errors.SingleClassError(_(u"logistic fit needs both classes, all labels are %d") % y[0])

    X = _design(u)
    theta = np.zeros(2)
    obj = logistic_loglik(theta, u, y, ridge)
    grad_norm = np.inf
    for it in range(1, max_iter + 1):
        grad = logistic_gradient(theta, u, y, ridge)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm < tol:
            log.Debug(u"logistic fit converged after %d iterations, |g| = %.3g" % (it - 1, grad_norm))
            return float(theta[0]), float(theta[1])
        p = special.expit(X.dot(theta))
        w = p * (1.0 - p)
        hess = X.T.dot(X * w[:, None]) + ridge * np.eye(2)
        step = np.linalg.solve(hess, grad)
        if float(np.dot(grad, step)) < 1e-20:
            log.Debug(u"logistic fit stalled at machine precision after %d iterations, |g| = %.3g"
                      % (it - 1, grad_norm))
            return float(theta[0]), float(theta[1])
        t = 1.0
        while t > 1e-12:
            cand = theta + t * step
            cand_obj = logistic_loglik(cand, u, y, ridge)
            if cand_obj >= obj:
                break
            t *= 0.5
        else:
            log.Debug(u"logistic line search found no ascent after %d iterations, |g| = %.3g"
                      % (it - 1, grad_norm))
            return float(theta[0]), float(theta[1])
        theta, obj = cand, cand_obj
    raise errors.ConvergenceError(_(u"logistic fit did not converge in %d iterations, |g| = %.3g")
                                  % (max_iter, grad_norm), grad_norm)


def platt_fit(data):
    u"""
    Fit a sigmoid from u to the probability of a correct prediction.

    @param data: iterable of (u, y_correct)
    """
    u, y = _unzip(data)
    theta0, theta1 = fit_logistic(u, y)
    log.Info(_(u"Platt calibrator theta = (%.6g, %.6g)") % (theta0, theta1),
             log.InfoCode.calibrator_fitted, PLATT)
    return Calibrator(PLATT, {u"theta0": theta0, u"theta1": theta1})


def pava(values, sums, counts):
    u"""
    Pool adjacent violators on pre-grouped, sorted data.

    @param values: group keys in increasing order
    @param sums: sum of targets per group
    @param counts: number of points per group
    @return: list of blocks [first_key, last_key, sum, count]; block means
        sum/count are non-decreasing
    """
    blocks = []
    for key, s, n in zip(values, sums, counts):
        blocks.append([key, key, s, n])
        # pool while the previous block mean exceeds the last one
        while len(blocks) > 1 and blocks[-2][2] * blocks[-1][3] > blocks[-1][2] * blocks[-2][3]:
            last = blocks.pop()
            prev = blocks[-1]
            prev[1] = last[1]
            prev[2] += last[2]
            prev[3] += last[3]
    return blocks


def isotonic_fit(data, increasing=True):
    u"""
    Least-squares monotone step function from u to y.

    Tied scores are pooled into one group before PAVA runs, so they always
    share a block.  With increasing=False the fit is non-increasing in u:
    PAVA runs over -u and the blocks are flipped back, so breakpoints
    always ascend in u.  AUTO fits both directions and keeps the one with
    the smaller squared error, preferring the increasing fit on ties.

    @param data: iterable of (u, y)
    """
    u, y = _unzip(data)
    if u.size == 0:
        raise errors.FitError(_(u"isotonic fit needs at least one point"))
    if increasing == AUTO:
        up, down = _isotonic_blocks(u, y), _isotonic_blocks(-u, y)
        if _block_sse(down, -u, y) < _block_sse(up, u, y):
            blocks, increasing = down, False
        else:
            blocks, increasing = up, True
    else:
        increasing = bool(increasing)
        blocks = _isotonic_blocks(u if increasing else -u, y)
    breakpoints = [b[0] for b in blocks] + [blocks[-1][1]]
    values = [b[2] / b[3] for b in blocks]
    if not increasing:
        breakpoints = [-a for a in reversed(breakpoints)]
        values = values[::-1]
    log.Info(_(u"Isotonic calibrator with %d blocks, %s in u")
             % (len(blocks), u"increasing" if increasing else u"decreasing"),
             log.InfoCode.calibrator_fitted, ISOTONIC)
    return Calibrator(ISOTONIC, {u"breakpoints": breakpoints, u"values": values, u"increasing": increasing})


def _isotonic_blocks(v, y):
    keys, inverse = np.unique(v, return_inverse=True)
    sums = np.bincount(inverse, weights=y)
    counts = np.bincount(inverse)
    return pava(keys.tolist(), sums.tolist(), counts.tolist())


def _block_sse(blocks, v, y):
    a = [b[0] for b in blocks]
    theta = np.array([b[2] / b[3] for b in blocks])
    fitted = theta[np.searchsorted(a[1:], v, side=u"right")]
    return float(np.sum((y - fitted) ** 2))


def fit(kind, data, invert=False, increasing=AUTO):
    u"""
    Fit a calibrator of the named kind.

    @param data: list of (u, y_correct); MinMax only looks at u
    """
    if kind == MINMAX:
        return minmax_fit([u for u, _y in data], invert=invert)
    elif kind == PLATT:
        return platt_fit(data)
    elif kind == ISOTONIC:
        return isotonic_fit(data, increasing)
    raise errors.UserError(_(u"unknown calibrator %s, expected one of %s") % (kind, u", ".join(KINDS)))


class ReliabilityBin(object):
    u"""
    One equal-width bin of a reliability curve; the means are None
    when the bin is empty
    """
    __slots__ = (u"bin_center", u"mean_predicted", u"empirical_frequency", u"count")

    def __init__(self, bin_center, mean_predicted, empirical_frequency, count):
        self.bin_center = bin_center
        self.mean_predicted = mean_predicted
        self.empirical_frequency = empirical_frequency
        self.count = count

    @property
    def defined(self):
        return self.count > 0

    def as_tuple(self):
        return (self.bin_center, self.mean_predicted, self.empirical_frequency, self.count)

    def __repr__(self):
        return u"ReliabilityBin%r" % (self.as_tuple(),)


def reliability_curve(pairs, n_bins=10):
    u"""
    Bin calibrated scores on [0, 1] and compare the mean prediction with
    the observed frequency of the positive class in every bin.

    @param pairs: iterable of (u^c, y)
    @rtype: list of ReliabilityBin, one per bin, the last bin right-closed
    """
    if n_bins < 1:
        raise errors.UserError(_(u"n_bins must be at least 1"))
    uc, y = _unzip(pairs)
    if uc.size and (np.any(uc < 0) or np.any(uc > 1) or np.any(np.isnan(uc))):
        raise errors.InvariantError(u"calibrated scores must lie in [0, 1]")
    idx = np.minimum(np.floor(uc * n_bins).astype(int), n_bins - 1)
    bins = []
    for b in range(n_bins):
        mask = idx == b
        n = int(mask.sum())
        center = (b + 0.5) / n_bins
        if n:
            bins.append(ReliabilityBin(center, float(uc[mask].mean()), float(y[mask].mean()), n))
        else:
            log.Debug(_(u"Reliability bin %d of %d is empty") % (b + 1, n_bins))
            bins.append(ReliabilityBin(center, None, None, 0))
    return bins


def _unzip(pairs):
    pairs = list(pairs)
    if not pairs:
        return np.zeros(0), np.zeros(0)
    a = np.asarray(pairs, dtype=float)
    return a[:, 0], a[:, 1]
