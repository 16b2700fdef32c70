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

import io
import json
import unittest

from . import UnitTestCase
from abstain import commandline
from abstain import config


class CommandlineTestCase(UnitTestCase):
    u"""
    Restores every config value the parser sets
    """
    def setUp(self):
        super(CommandlineTestCase, self).setUp()
        self.saved = dict((k, v) for k, v in vars(config).items() if not k.startswith(u"_"))

    def tearDown(self):
        for k, v in self.saved.items():
            setattr(config, k, v)
        super(CommandlineTestCase, self).tearDown()

    def assertExit(self, args, status=1):
        with self.assertRaises(SystemExit) as cm:
            commandline.ProcessCommandLine(args)
        self.assertEqual(cm.exception.code, status)


class CommandlineTest(CommandlineTestCase):
    u"""
    Test parse_cmdline_options
    """
    def test_full_command(self):
        action = commandline.ProcessCommandLine([u"score", u"--input", u"log.jsonl", u"--output", u"s.jsonl"])
        self.assertEqual(action, u"score")
        self.assertEqual(config.input, u"log.jsonl")
        self.assertEqual(config.output, u"s.jsonl")

    def test_prefix(self):
        action = commandline.ProcessCommandLine([u"pipe", u"--input", u"log.jsonl"])
        self.assertEqual(action, u"pipeline")
        action = commandline.ProcessCommandLine([u"cal", u"--method", u"platt", u"--scores", u"s",
                                                 u"--labels", u"l", u"--output", u"c.json"])
        self.assertEqual(action, u"calibrate")

    def test_ambiguous_prefix(self):
        self.assertExit([u"c", u"--input", u"x"])
        self.assertExit([u"s", u"--input", u"x"])

    def test_unknown_command(self):
        self.assertExit([u"train", u"--input", u"x"])

    def test_no_command(self):
        self.assertExit([u"--input", u"x"])

    def test_extra_arguments(self):
        self.assertExit([u"pipeline", u"--input", u"x", u"extra"])

    def test_required(self):
        self.assertExit([u"score", u"--input", u"log.jsonl"])
        self.assertExit([u"evaluate", u"--decisions", u"d", u"--out", u"r.json"])
        commandline.ProcessCommandLine([u"evaluate", u"--decisions", u"d", u"--input", u"log", u"--out", u"r"])

    def test_apply_takes_one_calibration(self):
        self.assertExit([u"apply", u"--calibration", u"a", u"--calibration", u"b", u"--scores", u"s",
                         u"--output", u"o"])
        commandline.ProcessCommandLine([u"apply", u"--calibration", u"a", u"--scores", u"s", u"--output", u"o"])
        self.assertEqual(config.calibration, [u"a"])

    def test_lists(self):
        commandline.ProcessCommandLine([u"pipeline", u"--input", u"x", u"--seeds", u"1,2", u"--seeds", u"3",
                                        u"--betas", u"0.5, 2", u"--classifiers", u"gmm"])
        self.assertEqual(config.seeds, [1, 2, 3])
        self.assertEqual(config.betas, [0.5, 2.0])
        self.assertEqual(config.classifiers, [u"gmm"])

    def test_bad_values(self):
        self.assertExit([u"pipeline", u"--input", u"x", u"--fraction", u"1.5"])
        self.assertExit([u"pipeline", u"--input", u"x", u"--fraction", u"half"])
        self.assertExit([u"pipeline", u"--input", u"x", u"--seeds", u"1,b"])
        self.assertExit([u"pipeline", u"--input", u"x", u"--kind", u"random"])
        self.assertExit([u"pipeline", u"--input", u"x", u"-v", u"12"])

    def test_fraction(self):
        commandline.ProcessCommandLine([u"split", u"--input", u"d", u"--out", u"s", u"--fraction", u"0.2"])
        self.assertEqual(config.fraction, 0.2)

    def test_synth_options(self):
        commandline.ProcessCommandLine([u"synth", u"--n", u"500", u"--separation", u"1.5",
                                        u"--error-rate", u"0.1", u"--output", u"log.jsonl"])
        self.assertEqual((config.synth_n, config.synth_separation, config.synth_error_rate), (500, 1.5, 0.1))

    def test_defaults_kept(self):
        commandline.ProcessCommandLine([u"pipeline", u"--input", u"x"])
        self.assertEqual(config.seeds, [1])
        self.assertEqual(config.score_method, u"max-entropy")
        self.assertTrue(config.print_statistics)

    def test_no_print_statistics(self):
        commandline.ProcessCommandLine([u"pipeline", u"--input", u"x", u"--no-print-statistics"])
        self.assertFalse(config.print_statistics)

    def test_verbosity(self):
        commandline.ProcessCommandLine([u"pipeline", u"--input", u"x", u"-v", u"debug"])
        self.assertEqual(commandline.log.getverbosity(), commandline.log.DEBUG)

    def test_version(self):
        self.assertExit([u"--version"], 0)


class ConfigFileTest(CommandlineTestCase):
    def write_config(self, obj):
        path = self.path(u"abstain.json")
        with io.open(path, u"w", encoding=u"utf8") as fh:
            fh.write(u"%s" % json.dumps(obj))
        return path

    def test_values(self):
        path = self.write_config({u"seeds": [4, 5], u"n-bins": 20, u"output_dir": u"out", u"svg": True,
                                  u"fraction": 0.25, u"calibrators": [u"platt"]})
        commandline.ProcessCommandLine([u"pipeline", u"--input", u"x", u"--config", path])
        self.assertEqual(config.seeds, [4, 5])
        self.assertEqual(config.n_bins, 20)
        self.assertEqual(config.output_dir, u"out")
        self.assertTrue(config.svg)
        self.assertEqual(config.fraction, 0.25)
        self.assertEqual(config.calibrators, [u"platt"])

    def test_command_line_wins(self):
        path = self.write_config({u"n_bins": 20})
        commandline.ProcessCommandLine([u"pipeline", u"--input", u"x", u"--config", path, u"--n-bins", u"5"])
        self.assertEqual(config.n_bins, 5)

    def test_string_values_checked(self):
        path = self.write_config({u"seeds": u"1,2", u"kind": u"length"})
        commandline.ProcessCommandLine([u"split", u"--input", u"x", u"--out", u"s", u"--config", path])
        self.assertEqual(config.seeds, [1, 2])
        self.assertEqual(config.kind, u"length")

    def test_unknown_key(self):
        path = self.write_config({u"colour": u"blue"})
        self.assertExit([u"pipeline", u"--input", u"x", u"--config", path])

    def test_bad_fraction(self):
        path = self.write_config({u"fraction": 2})
        self.assertExit([u"pipeline", u"--input", u"x", u"--config", path])

    def test_not_an_object(self):
        path = self.write_config([1, 2])
        self.assertExit([u"pipeline", u"--input", u"x", u"--config", path])

    def test_missing_file(self):
        self.assertExit([u"pipeline", u"--input", u"x", u"--config", self.path(u"none.json")])


if __name__ == u"__main__":
    unittest.main()
