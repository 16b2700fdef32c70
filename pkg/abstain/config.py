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

u"""Store global configuration information"""

from abstain import __version__


# The current version of abstain
version = __version__

# Prediction log (JSON Lines, one PredictionRecord per line)
input = None  # pylint: disable=redefined-builtin

# Optional sidecar of {id, label} merged into the log by id
labels = None

# Where `score` writes derived labels, if set
labels_output = None

# Score file written by `score` and read by later stages
scores = None

# Decisions file read by `evaluate`
decisions = None

# Saved calibrators read by `apply` and `evaluate`
calibration = []

# Split file written by `split` and read by `calibrate`/`classify`
split = None

# Schema file ({tables: [{name, columns}]}) used for template masking
schema = None

# Generic output path of a single-artifact command
output = None

# Report path of `evaluate`
out = None

# Output directory of `pipeline` (default abstain-out) and of `evaluate` CSV tables
output_dir = None

# Scoring method: max-entropy or nsp
score_method = u"max-entropy"

# Method of the current calibrate/classify command
method = None

# Split kind for `split`: template, length or iid
kind = u"iid"

# Which side of a split to fit on and evaluate on
fit_split = u"known"
eval_split = u"unk"

# Fraction sent to D_known (iid) or to the test side (template, length)
fraction = 0.5

# Seed of the current split; pipeline runs iterate over seeds
seed = 1
seeds = [1]

# Calibrators and selective classifiers exercised by `pipeline`
calibrators = [u"minmax", u"platt", u"isotonic"]
classifiers = [u"threshold", u"logreg", u"gmm"]

# Objective for threshold selection: f1 or fbeta
threshold_objective = u"f1"
threshold_beta = 1.0

# Beta values of the F-beta sweep
betas = [0.25, 0.5, 1.0, 2.0, 5.0]

# Number of equal-width reliability bins on [0, 1]
n_bins = 10

# Flip MinMax so that high uncertainty maps to low probability of correct
invert = False

# Extra random EM restarts for the Gaussian mixture (0 = deterministic init only)
restarts = 0

# Render SVG plots next to the CSV files
svg = False

# Synthetic log generation
synth_n = 200
synth_separation = 3.0
synth_error_rate = 0.3

# If set, print the statistics after every pipeline run
print_statistics = True

# Lock guarding the output directory and its path
lockfile = None
lockpath = u""

# Direction of the isotonic calibrator: increasing, decreasing or auto
isotonic_direction = u"auto"

# JSON file of option values applied before the command line
config_file = None
