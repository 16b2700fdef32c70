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

u"""Generate and process run statistics"""

import time


def timetopretty(timeinseconds):
    u"""Return pretty version of time"""
    return time.asctime(time.localtime(timeinseconds))


def inttopretty(seconds):
    u"""Convert num of seconds to readable string like "2 hours"."""
    partlist = []
    hours, seconds = divmod(seconds, 3600)
    if hours > 1:
        partlist.append(u"%d hours" % hours)
    elif hours == 1:
        partlist.append(u"1 hour")

    minutes, seconds = divmod(seconds, 60)
    if minutes > 1:
        partlist.append(u"%d minutes" % minutes)
    elif minutes == 1:
        partlist.append(u"1 minute")

    if seconds == 1:
        partlist.append(u"1 second")
    elif not partlist or seconds > 1:
        if isinstance(seconds, int):
            partlist.append(u"%s seconds" % seconds)
        else:
            partlist.append(u"%.2f seconds" % seconds)
    return u" ".join(partlist)


class StatsObj(object):
    u"""Contains various statistics, provide string conversion functions"""
    stat_eval_attrs = (u'Records',
                       u'Errors',
                       u'Known',
                       u'Unknown',
                       u'Abstained',
                       u'Answered')
    stat_misc_attrs = (u'Seeds',
                       u'ArtifactsWritten')
    stat_time_attrs = (u'StartTime',
                       u'EndTime',
                       u'ElapsedTime')
    stat_attrs = stat_time_attrs + stat_eval_attrs + stat_misc_attrs

    def __init__(self):
        u"""Set attributes to None"""
        for attr in self.stat_attrs:
            self.__dict__[attr] = None

    def get_stat(self, attribute):
        u"""Get a statistic"""
        return self.__dict__[attribute]

    def set_stat(self, attr, value):
        u"""Set attribute to given value"""
        self.__dict__[attr] = value

    def get_stats_string(self):
        u"""Return extended string printing out statistics"""
        return u"%s%s%s" % (self.get_timestats_string(),
                            self.get_evalstats_string(),
                            self.get_miscstats_string())

    def get_timestats_string(self):
        u"""Return portion of statistics string dealing with time"""
        timelist = []
        if self.StartTime is not None:
            timelist.append(u"StartTime %.2f (%s)\n" %
                            (self.StartTime, timetopretty(self.StartTime)))
        if self.EndTime is not None:
            timelist.append(u"EndTime %.2f (%s)\n" %
                            (self.EndTime, timetopretty(self.EndTime)))
        if self.ElapsedTime or (self.StartTime is not None and
                                self.EndTime is not None):
            if self.ElapsedTime is None:
                self.ElapsedTime = self.EndTime - self.StartTime
            timelist.append(u"ElapsedTime %.2f (%s)\n" %
                            (self.ElapsedTime, inttopretty(self.ElapsedTime)))
        return u"".join(timelist)

    def get_evalstats_string(self):
        u"""Return portion of statistics string about records and decisions"""
        lines = []
        for attr in self.stat_eval_attrs:
            val = self.get_stat(attr)
            if val is None:
                continue
            total = self._share_of(attr)
            if total:
                lines.append(u"%s %s (%.1f%%)\n" % (attr, val, 100.0 * val / total))
            else:
                lines.append(u"%s %s\n" % (attr, val))
        return u"".join(lines)

    def _share_of(self, attr):
        u"""
        Denominator of the percentage shown next to attr.  Abstained is a
        share of all decisions over every classifier and seed.
        """
        if attr == u'Errors':
            return self.Records
        elif attr == u'Abstained':
            return (self.Abstained or 0) + (self.Answered or 0)
        return None

    def get_miscstats_string(self):
        u"""Return portion of extended stat string about misc attributes"""
        misc_string = u""
        if self.Seeds is not None:
            misc_string += u"Seeds %s\n" % self.Seeds
        if self.ArtifactsWritten is not None:
            misc_string += u"ArtifactsWritten %d\n" % self.ArtifactsWritten
        return misc_string

    def get_stats_logstring(self, title):
        u"""Like get_stats_string, but add header and footer"""
        header = u"--------------[ %s ]--------------" % title
        footer = u"-" * len(header)
        return u"%s\n%s%s\n" % (header, self.get_stats_string(), footer)


class StatsPipelineProcess(StatsObj):
    u"""Keep track of statistics while a pipeline runs"""
    def __init__(self):
        u"""StatsPipelineProcess initializer - zero counters"""
        StatsObj.__init__(self)
        for attr in StatsObj.stat_eval_attrs:
            self.__dict__[attr] = 0
        self.ArtifactsWritten = 0
        self.StartTime = time.time()

    def add_records(self, labels):
        u"""Count the evaluated records and their errors"""
        self.Records += len(labels)
        self.Errors += sum(1 for y in labels.values() if y)

    def add_split(self, split):
        self.Known += len(split.known_ids)
        self.Unknown += len(split.unk_ids)

    def add_decisions(self, decisions):
        for d in decisions:
            if d.abstain:
                self.Abstained += 1
            else:
                self.Answered += 1

    def add_artifact(self, path):
        self.ArtifactsWritten += 1

    def close(self):
        u"""End collection of data, set EndTime"""
        self.EndTime = time.time()
