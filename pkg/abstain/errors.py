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
Error/exception classes that do not fit naturally anywhere else.
"""

from abstain import log

USAGE_EXIT = 1
DATA_EXIT = 2


class AbstainError(Exception):
    u"""
    Root of all errors abstain raises on purpose.  Carries the log code
    written to machine-readable logs and the process exit status.
    """
    code = log.ErrorCode.generic
    exit_status = DATA_EXIT

    def __init__(self, msg, code=None):
        super(AbstainError, self).__init__(msg)
        if code is not None:
            self.code = code


class UserError(AbstainError):
    u"""
    Subclasses use this in their inheritance hierarchy to signal that
    the error is a user generated one, and that it is therefore
    typically unsuitable to display a full stack trace.
    """
    code = log.ErrorCode.command_line
    exit_status = USAGE_EXIT


class ConfigError(UserError):
    u"""
    Raised when the pipeline configuration is inconsistent.
    """
    code = log.ErrorCode.bad_config


class MissingFileError(UserError):
    u"""
    Raised when an input path named on the command line does not exist.
    """
    code = log.ErrorCode.missing_file


class DataError(AbstainError):
    u"""
    Raised when input data is malformed or unsuitable for an operation.
    """
    pass


class LogParseError(DataError):
    u"""
    Raised when a JSON Lines file cannot be parsed.
    """
    code = log.ErrorCode.log_parse

    def __init__(self, msg, lineno=None):
        if lineno is not None:
            msg = u"line %d: %s" % (lineno, msg)
        super(LogParseError, self).__init__(msg)
        self.lineno = lineno


class InvariantError(DataError):
    u"""
    Raised when a record violates one of its invariants.
    """
    code = log.ErrorCode.invariant_violation

    def __init__(self, msg, record_id=None):
        if record_id is not None:
            msg = u"record %s: %s" % (record_id, msg)
        super(InvariantError, self).__init__(msg)
        self.record_id = record_id


class DuplicateIdError(DataError):
    code = log.ErrorCode.duplicate_id

    def __init__(self, record_id, lineno=None):
        msg = u"duplicate id %s" % (record_id,)
        if lineno is not None:
            msg = u"line %d: %s" % (lineno, msg)
        super(DuplicateIdError, self).__init__(msg)
        self.record_id = record_id


class LabelError(DataError):
    u"""
    Raised when a record has neither a label nor execution results.
    """
    code = log.ErrorCode.missing_label


class MethodError(DataError):
    u"""
    Raised when a scoring method cannot be applied to a record's token info.
    """
    code = log.ErrorCode.inapplicable_method


class FitError(DataError):
    u"""
    Raised when a calibrator or selective classifier cannot be fitted.
    """
    pass


class SingleClassError(FitError):
    code = log.ErrorCode.single_class


class ConvergenceError(FitError):
    code = log.ErrorCode.no_convergence

    def __init__(self, msg, grad_norm=None):
        super(ConvergenceError, self).__init__(msg)
        self.grad_norm = grad_norm


class DegenerateInputError(FitError):
    code = log.ErrorCode.degenerate_input


class ComponentCollapseError(FitError):
    code = log.ErrorCode.component_collapse


class LexError(DataError):
    u"""
    Raised when a SQL string cannot be tokenized.
    """
    code = log.ErrorCode.lex_error

    def __init__(self, msg, position=None):
        if position is not None:
            msg = u"%s at position %d" % (msg, position)
        super(LexError, self).__init__(msg)
        self.position = position


class SplitError(DataError):
    code = log.ErrorCode.split_error


class OverlapError(DataError):
    u"""
    Raised when fit and evaluation id sets intersect.
    """
    code = log.ErrorCode.overlapping_splits


class ReportError(DataError):
    code = log.ErrorCode.bad_report


class StageError(AbstainError):
    u"""
    Wraps an error raised inside a named pipeline stage.  Keeps the code
    and exit status of the wrapped error.
    """
    def __init__(self, stage, err):
        super(StageError, self).__init__(u"[%s] %s" % (stage, err), code=err.code)
        self.stage = stage
        self.exit_status = err.exit_status
        self.wrapped = err
