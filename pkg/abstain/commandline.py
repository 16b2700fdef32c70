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

u"""Parse command line, check for consistency, and set config"""

from copy import copy
import io
import json
import optparse
import sys

from abstain import config
from abstain import log
from abstain import util

commands = [u"apply",
            u"calibrate",
            u"classify",
            u"evaluate",
            u"pipeline",
            u"score",
            u"split",
            u"synth",
            ]

# options each command cannot run without; tuples mean "one of"
required = {
    u"score": [u"input", u"output"],
    u"calibrate": [u"method", u"scores", (u"labels", u"input"), u"output"],
    u"apply": [u"calibration", u"scores", u"output"],
    u"classify": [u"method", u"scores", (u"labels", u"input"), u"output"],
    u"evaluate": [u"decisions", (u"labels", u"input"), (u"out", u"output")],
    u"split": [u"input", (u"out", u"output")],
    u"synth": [u"output"],
    u"pipeline": [u"input"],
}

sides = [u"known", u"unk", u"all", u"train", u"test"]


# log options handled in log.py.  Add noop to make optparse happy
def noop():
    pass


def check_file(option, opt, value):  # pylint: disable=unused-argument
    return util.expand_fn(value)


def check_fraction(option, opt, value):  # pylint: disable=unused-argument
    try:
        f = float(value)
    except ValueError:
        raise optparse.OptionValueError(u"option %s: invalid fraction value: %r" % (opt, value))
    if not 0.0 < f < 1.0:
        raise optparse.OptionValueError(u"option %s: fraction must lie strictly between 0 and 1" % opt)
    return f


def check_list(option, opt, value):  # pylint: disable=unused-argument
    return [v.strip() for v in value.split(u",") if v.strip()]


def check_intlist(option, opt, value):
    try:
        return [int(v) for v in check_list(option, opt, value)]
    except ValueError:
        raise optparse.OptionValueError(u"option %s: expected comma separated integers: %r" % (opt, value))


def check_floatlist(option, opt, value):
    try:
        return [float(v) for v in check_list(option, opt, value)]
    except ValueError:
        raise optparse.OptionValueError(u"option %s: expected comma separated numbers: %r" % (opt, value))


def check_verbosity(option, opt, value):  # pylint: disable=unused-argument
    fail = False

    value = value.lower()
    if value in [u'e', u'error']:
        verb = log.ERROR
    elif value in [u'w', u'warning']:
        verb = log.WARNING
    elif value in [u'n', u'notice']:
        verb = log.NOTICE
    elif value in [u'i', u'info']:
        verb = log.INFO
    elif value in [u'd', u'debug']:
        verb = log.DEBUG
    else:
        try:
            verb = int(value)
            if verb < 0 or verb > 9:
                fail = True
        except ValueError:
            fail = True

    if fail:
        # TRANSL: In this portion of the usage instructions, "[ewnid]" indicates which
        # characters are permitted (e, w, n, i, or d); the brackets imply their own
        # meaning in regex; i.e., only one of the characters is allowed in an instance.
        raise optparse.OptionValueError(u"Verbosity must be one of: digit [0-9], character [ewnid], "
                                        u"or word ['error', 'warning', 'notice', 'info', 'debug']. "
                                        u"The default is 3 (Notice).")

    return verb


class AbstainOption(optparse.Option):
    TYPES = optparse.Option.TYPES + (u"file", u"fraction", u"list", u"intlist", u"floatlist", u"verbosity",)
    TYPE_CHECKER = copy(optparse.Option.TYPE_CHECKER)
    TYPE_CHECKER[u"file"] = check_file
    TYPE_CHECKER[u"fraction"] = check_fraction
    TYPE_CHECKER[u"list"] = check_list
    TYPE_CHECKER[u"intlist"] = check_intlist
    TYPE_CHECKER[u"floatlist"] = check_floatlist
    TYPE_CHECKER[u"verbosity"] = check_verbosity

    ACTIONS = optparse.Option.ACTIONS + (u"extend",)
    STORE_ACTIONS = optparse.Option.STORE_ACTIONS + (u"extend",)
    TYPED_ACTIONS = optparse.Option.TYPED_ACTIONS + (u"extend",)
    ALWAYS_TYPED_ACTIONS = optparse.Option.ALWAYS_TYPED_ACTIONS + (u"extend",)

    def take_action(self, action, dest, opt, value, values, parser):
        if action == u"extend":
            if not value:
                return
            if hasattr(values, dest) and getattr(values, dest):
                setattr(values, dest, getattr(values, dest) + value)
            else:
                setattr(values, dest, value)
        else:
            optparse.Option.take_action(
                self, action, dest, opt, value, values, parser)


class AbstainOptionParser(optparse.OptionParser):
    u"""Bad option values are command line errors, exit status 1"""
    def error(self, msg):
        command_line_error(msg)


def build_parser():
    u"""Option parser of every command"""
    def set_log_fd(fd):
        if fd < 1:
            raise optparse.OptionValueError(u"log-fd must be greater than zero.")
        log.add_fd(fd)

    def print_ver(o, s, v, p):  # pylint: disable=unused-argument
        print(u"abstain %s" % (config.version))
        sys.exit(0)

    parser = AbstainOptionParser(option_class=AbstainOption, usage=usage())

    # TRANSL: Used in usage help to represent the name of a file. Example:
    # --input <filename>
    parser.add_option(u"--input", type=u"file", metavar=_(u"filename"))

    # Sidecar of {id, label} lines; wins over labels in the log
    parser.add_option(u"--labels", type=u"file", metavar=_(u"filename"))

    # `score` writes derived labels here
    parser.add_option(u"--labels-output", type=u"file", metavar=_(u"filename"))

    # Scoring method for `score`, calibrator for `calibrate`, classifier for `classify`
    parser.add_option(u"--method", type=u"string", metavar=_(u"name"))

    # Scoring method of `pipeline`
    parser.add_option(u"--score-method", type=u"choice", choices=[u"max-entropy", u"nsp"])

    parser.add_option(u"--scores", type=u"file", metavar=_(u"filename"))
    parser.add_option(u"--decisions", type=u"file", metavar=_(u"filename"))
    parser.add_option(u"--output", type=u"file", metavar=_(u"filename"))
    parser.add_option(u"--out", type=u"file", metavar=_(u"filename"))
    parser.add_option(u"--output-dir", type=u"file", metavar=_(u"directory"))

    # Saved calibrators; may be given more than once
    parser.add_option(u"--calibration", type=u"file", action=u"append", metavar=_(u"filename"))

    # Split file and which of its sides to fit on and evaluate on
    parser.add_option(u"--split", type=u"file", metavar=_(u"filename"))
    parser.add_option(u"--fit-split", type=u"choice", choices=sides)
    parser.add_option(u"--eval-split", type=u"choice", choices=sides)

    # Split generation
    parser.add_option(u"--kind", type=u"choice", choices=[u"template", u"length", u"iid"])
    parser.add_option(u"--fraction", type=u"fraction", metavar=_(u"fraction"))
    parser.add_option(u"--seed", type=u"int", metavar=_(u"number"))
    parser.add_option(u"--seeds", type=u"intlist", action=u"extend", metavar=_(u"numbers"))
    parser.add_option(u"--schema", type=u"file", metavar=_(u"filename"))

    # Evaluation
    parser.add_option(u"--betas", type=u"floatlist", action=u"extend", metavar=_(u"numbers"))
    parser.add_option(u"--n-bins", type=u"int", metavar=_(u"number"))
    parser.add_option(u"--calibrators", type=u"list", action=u"extend", metavar=_(u"names"))
    parser.add_option(u"--classifiers", type=u"list", action=u"extend", metavar=_(u"names"))
    parser.add_option(u"--threshold-objective", type=u"choice", choices=[u"f1", u"fbeta"])
    parser.add_option(u"--threshold-beta", type=u"float", metavar=_(u"number"))
    parser.add_option(u"--isotonic-direction", type=u"choice", choices=[u"increasing", u"decreasing", u"auto"])
    parser.add_option(u"--invert", action=u"store_true")
    parser.add_option(u"--restarts", type=u"int", metavar=_(u"number"))
    parser.add_option(u"--svg", action=u"store_true")

    # Synthetic logs
    parser.add_option(u"--n", type=u"int", dest=u"synth_n", metavar=_(u"number"))
    parser.add_option(u"--separation", type=u"float", dest=u"synth_separation", metavar=_(u"number"))
    parser.add_option(u"--error-rate", type=u"float", dest=u"synth_error_rate", metavar=_(u"number"))

    # JSON object of option values, applied before the command line
    parser.add_option(u"--config", type=u"file", dest=u"config_file", metavar=_(u"filename"))

    parser.add_option(u"--verbosity", u"-v", type=u"verbosity", metavar=u"[0-9]",
                      dest=u"", action=u"callback",
                      callback=lambda o, s, v, p: log.setverbosity(v))

    parser.add_option(u"--log-fd", type=u"int", metavar=_(u"file_descriptor"),
                      dest=u"", action=u"callback",
                      callback=lambda o, s, v, p: set_log_fd(v))

    # TRANSL: Used in usage help to represent the name of a file. Example:
    # --log-file <filename>
    parser.add_option(u"--log-file", type=u"file", metavar=_(u"filename"),
                      dest=u"", action=u"callback",
                      callback=lambda o, s, v, p: log.add_file(v))

    # log option to add timestamp and level to log entries
    parser.add_option(u"--log-timestamp", action=u"callback",
                      callback=lambda o, s, v, p: noop())

    # If set, print the statistics after every pipeline run
    parser.add_option(u"--no-print-statistics", action=u"store_false", dest=u"print_statistics")

    parser.add_option(u"-V", u"--version", action=u"callback", callback=print_ver)

    return parser


def config_keys(parser):
    u"""Map JSON config keys (long option names, dashes or underscores) to options"""
    keys = {}
    for opt in parser.option_list:
        if not opt.dest or opt.dest == u"config_file":
            continue
        keys[opt.dest] = opt
        for lo in opt._long_opts:
            keys[lo[2:]] = opt
            keys[lo[2:].replace(u"-", u"_")] = opt
    return keys


def apply_config_file(parser, path):
    u"""Set config from a JSON object of option values"""
    try:
        with io.open(path, u"rt", encoding=u"utf8") as fh:
            obj = json.load(fh)
    except (IOError, OSError, ValueError) as e:
        command_line_error(u"cannot read config file %s: %s" % (path, util.uexc(e)))
    if not isinstance(obj, dict):
        command_line_error(u"config file %s must hold a JSON object" % path)
    keys = config_keys(parser)
    for key in sorted(obj):
        opt = keys.get(key)
        if opt is None:
            command_line_error(u"unknown key '%s' in config file %s" % (key, path))
        value = obj[key]
        try:
            if isinstance(value, str) and opt.type:
                value = opt.check_value(u"--" + key, value)
            elif isinstance(value, list) and opt.action == u"append":
                value = [opt.check_value(u"--" + key, v) for v in value]
            elif opt.type == u"fraction":
                value = check_fraction(opt, u"--" + key, u"%r" % value)
        except optparse.OptionValueError as e:
            command_line_error(util.uexc(e))
        setattr(config, opt.dest, value)
        log.Debug(u"config file sets %s = %r" % (opt.dest, value))


def parse_cmdline_options(arglist):
    u"""Parse argument list, return the command"""
    parser = build_parser()

    # parse the options
    (options, args) = parser.parse_args(arglist)

    if options.config_file:
        config.config_file = options.config_file
        apply_config_file(parser, options.config_file)

    # Copy all arguments and their values to the config module.  Don't copy
    # attributes that are 'hidden' (start with an underscore) or whose name is
    # the empty string (used for arguments that don't directly store a value
    # by using dest="")
    for f in [x for x in dir(options) if x and not x.startswith(u"_")]:
        v = getattr(options, f)
        # Only set if v is not None because None is the default for all the
        # variables.  If user didn't set it, we'll use defaults in config.py
        if v is not None:
            setattr(config, f, v)

    # process first arg as command
    if not args:
        command_line_error(u"no command given, expected one of %s" % u", ".join(commands))
    cmd = args.pop(0)
    possible = [c for c in commands if c.startswith(cmd)]
    # no unique match, that's an error
    if len(possible) > 1:
        command_line_error(u"command '%s' not unique, could be %s" % (cmd, possible))
    elif not possible:
        command_line_error(u"unknown command '%s'" % cmd)
    cmd = possible[0]

    if args:
        command_line_error(u"Too many arguments: %s" % u" ".join(args))
    return cmd


def command_line_error(message):
    u"""Indicate a command line error and exit"""
    log.FatalError(_(u"Command line error: %s") % (message,) + u"\n" +
                   _(u"Enter 'abstain --help' for help screen."),
                   log.ErrorCode.command_line, exit_status=1)


def usage():
    u"""Returns terse usage info."""
    msg = _(u"Usage:\n"
            u"  abstain score     --input LOG --output SCORES [--method max-entropy|nsp] [--labels-output LABELS]\n"
            u"  abstain calibrate --method minmax|platt|isotonic --scores SCORES --labels LABELS --output CALIB\n"
            u"  abstain apply     --calibration CALIB --scores SCORES --output CALIBRATED\n"
            u"  abstain classify  --method threshold|logreg|gmm --scores SCORES --labels LABELS --output DECISIONS\n"
            u"  abstain evaluate  --decisions DECISIONS --scores SCORES --labels LABELS --out REPORT\n"
            u"  abstain split     --kind template|length|iid --input DATASET --fraction F --seed N --out SPLIT\n"
            u"  abstain synth     --n N --separation S --error-rate R --seed N --output LOG\n"
            u"  abstain pipeline  --input LOG [--seeds 1,2,3] [--output-dir DIR] [--svg]\n")
    return msg


def check_consistency(action):
    u"""Final consistency check, see if something wrong with command line"""
    for req in required[action]:
        names = req if isinstance(req, tuple) else (req,)
        if not any(getattr(config, n, None) for n in names):
            command_line_error(u"%s needs %s" % (action, u" or ".join(u"--" + n.replace(u"_", u"-")
                                                                   for n in names)))
    if action == u"apply" and len(config.calibration) != 1:
        command_line_error(u"apply takes exactly one --calibration")
    if action in (u"calibrate", u"classify") and config.split is None:
        log.Info(_(u"No --split given; drawing an i.i.d. split with fraction %g and seed %d")
                 % (config.fraction, config.seed))


def ProcessCommandLine(cmdline_list):
    u"""Process command line, set config, return action

    action will be one of the names in commands.
    """
    action = parse_cmdline_options(cmdline_list)
    check_consistency(action)
    log.Info(_(u"Main action: ") + action)
    return action
