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

import unittest

from . import UnitTestCase
from abstain import splits
from abstain.selective import Decision
from abstain.statistics import *  # pylint: disable=redefined-builtin, unused-wildcard-import


class StatsObjTest(UnitTestCase):
    u"""Test StatsObj class"""
    def set_obj(self, s):
        u"""Set values of s's statistics"""
        s.Records = 200
        s.Errors = 50
        s.Known = 100
        s.Unknown = 100
        s.Abstained = 40
        s.Answered = 60
        s.Seeds = 3
        s.ArtifactsWritten = 7
        s.StartTime = 13
        s.EndTime = 14

    def test_get_stats(self):
        u"""Test reading and writing stat objects"""
        s = StatsObj()
        assert s.get_stat(u'Records') is None
        self.set_obj(s)
        assert s.get_stat(u'Records') == 200

        s1 = StatsPipelineProcess()
        assert s1.get_stat(u'Records') == 0
        assert s1.StartTime is not None

    def test_get_stats_string(self):
        u"""Test conversion of stat object into string"""
        s = StatsObj()
        stats_string = s.get_stats_string()
        assert stats_string == u"", stats_string

        self.set_obj(s)
        lines = s.get_stats_string().splitlines()
        assert lines[0].startswith(u"StartTime 13.00 ("), lines[0]
        assert lines[1].startswith(u"EndTime 14.00 ("), lines[1]
        assert lines[2:] == [
            u"ElapsedTime 1.00 (1 second)",
            u"Records 200",
            u"Errors 50 (25.0%)",
            u"Known 100",
            u"Unknown 100",
            u"Abstained 40 (40.0%)",
            u"Answered 60",
            u"Seeds 3",
            u"ArtifactsWritten 7",
        ], lines[2:]

    def test_logstring(self):
        s = StatsObj()
        s.Records = 1
        text = s.get_stats_logstring(u"Pipeline Statistics")
        lines = text.splitlines()
        assert lines[0] == u"--------------[ Pipeline Statistics ]--------------"
        assert lines[1] == u"Records 1"
        assert lines[2] == u"-" * len(lines[0])

    def test_pretty(self):
        assert inttopretty(1) == u"1 second"
        assert inttopretty(0) == u"0 seconds"
        assert inttopretty(3725) == u"1 hour 2 minutes 5 seconds"
        assert inttopretty(7262.5) == u"2 hours 1 minute 2.50 seconds"

class StatsPipelineProcessTest(UnitTestCase):
    def test_counters(self):
        s = StatsPipelineProcess()
        s.add_records({u"a": 1, u"b": 0, u"c": 1})
        s.add_split(splits.SplitResult([u"a"], [u"b", u"c"], splits.IID))
        s.add_decisions([Decision(u"b", True, 0.9), Decision(u"c", False, 0.1)])
        s.add_artifact(u"roc.csv")
        s.close()
        assert (s.Records, s.Errors, s.Known, s.Unknown) == (3, 2, 1, 2)
        assert (s.Abstained, s.Answered, s.ArtifactsWritten) == (1, 1, 1)
        assert s.EndTime >= s.StartTime

    def test_abstained_share_over_seeds(self):
        s = StatsPipelineProcess()
        labels = dict((u"r%d" % i, i % 2) for i in range(10))
        s.add_records(labels)
        # three classifiers on five seeds, each abstaining on 4 of 5 records
        for _seed in range(5):
            for _kind in range(3):
                s.add_decisions([Decision(u"r%d" % i, i < 4, 0.5) for i in range(5)])
        assert (s.Records, s.Abstained, s.Answered) == (10, 60, 15)
        lines = s.get_evalstats_string().splitlines()
        assert u"Abstained 60 (80.0%)" in lines, lines
        assert u"Errors 5 (50.0%)" in lines, lines

    def test_no_decisions(self):
        s = StatsPipelineProcess()
        s.add_records({u"a": 0})
        assert u"Abstained 0" in s.get_evalstats_string().splitlines()


if __name__ == u"__main__":
    unittest.main()
