"""
Module that contains the WaveSplitException class and its subclasses.
"""
############################################################################
#  wavesplitexception.py
#
#  WaveSplit: incoming/outgoing decomposition of radial Schrodinger data.
#
#  WaveSplit is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  WaveSplit is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with WaveSplit.  If not, see <http://www.gnu.org/licenses/>.
#
#
# Purpose:  Exception classes for error reporting within the
#           WaveSplit modules. The class an error is raised with
#           decides the exit code of the command line tool.
#
# History:
# Version 1.0 - Created.
#
############################################################################


class WaveSplitException(Exception):
    exit_code = 3

    def __init__(self, value):
        """
        Init for the WaveSplitException class
        """
        self.value = value

    def __str__(self):
        """
        Return a string representation of the exception
        """
        return repr(self.value)


class WaveSplitValidationException(WaveSplitException):
    """
    Invalid input or configuration: raised before any computation starts.
    """

    exit_code = 2


class WaveSplitNumericalException(WaveSplitException):
    """
    A computation was aborted because its numerical contract was violated.
    """

    exit_code = 3


class WaveSplitAliasingException(WaveSplitNumericalException):
    """
    Content beyond what the grid resolves (band limit or top octave).
    """


class WaveSplitDomainEscapeException(WaveSplitNumericalException):
    """
    Energy reached the outer part of the radial grid during an evolution.
    """


class WaveSplitBlowUpException(WaveSplitNumericalException):
    """
    The sup-norm guard of the nonlinear solver was triggered.
    """


class WaveSplitEmptyBandException(WaveSplitNumericalException):
    """
    A ratio was requested against a frequency band with no energy.
    """


class WaveSplitSuiteException(WaveSplitException):
    def __init__(self, suite_name, error):
        """
        Init for the WaveSplitSuiteException class

        :param suite_name: name of the verification suite which failed.
        :param error: the underlying exception.
        """
        self.suite_name = suite_name
        self.error = error
        self.exit_code = getattr(error, "exit_code", 3)
        super().__init__(f"suite '{suite_name}': {error}")
