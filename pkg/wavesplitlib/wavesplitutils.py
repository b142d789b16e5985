"""
Module that contains the smooth cutoff family and some useful utilities
(slope fitting, atomic output writing and configuration hashing).
"""
############################################################################
#  wavesplitutils.py
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
# Purpose:  Smooth cutoff functions and a set of useful utilities
#           shared by the other modules.
#
# History:
# Version 1.0 - Created.
#
############################################################################

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass

import numpy

from .wavesplitexception import WaveSplitValidationException

logger = logging.getLogger(__name__)

TRANSITION_RATIO = 11.0 / 10.0


def smooth_psi(t):
    """
    The function exp(-1/t) for t > 0 and 0 otherwise.
    """
    t = numpy.asarray(t, dtype=float)
    out = numpy.zeros_like(t)
    pos = t > 0
    out[pos] = numpy.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """
    The canonical smooth step psi(t)/(psi(t)+psi(1-t)); 0 for t <= 0
    and 1 for t >= 1.
    """
    a = smooth_psi(t)
    b = smooth_psi(1.0 - numpy.asarray(t, dtype=float))
    return a / (a + b)


@dataclass(frozen=True)
class CutoffSpec:
    """
    A smooth cutoff family. le(x, a) is 1 for |x| <= a and 0 for
    |x| >= transition_ratio * a; ge is its exact complement and band(x, a)
    is le(x, 2a) - le(x, a).
    """

    transition_ratio: float = TRANSITION_RATIO

    def __post_init__(self):
        if not self.transition_ratio > 1.0:
            raise WaveSplitValidationException(
                "The cutoff transition ratio must be larger than 1."
            )

    def le(self, x, a):
        if a <= 0:
            raise WaveSplitValidationException("Cutoff radius must be positive.")
        x = numpy.abs(numpy.asarray(x, dtype=float))
        t = (x - a) / ((self.transition_ratio - 1.0) * a)
        return 1.0 - smooth_step(t)

    def ge(self, x, a):
        return 1.0 - self.le(x, a)

    def band(self, x, a):
        return self.le(x, 2.0 * a) - self.le(x, a)


DEFAULT_CUTOFF = CutoffSpec()


def chi_le(x, a):
    return DEFAULT_CUTOFF.le(x, a)


def chi_ge(x, a):
    return DEFAULT_CUTOFF.ge(x, a)


def chi_band(x, a):
    return DEFAULT_CUTOFF.band(x, a)


def fit_log2_slope(xs, ys):
    """
    Least-squares slope of log2(ys) against log2(xs).

    :param xs: positive abscissae.
    :param ys: positive values, non-positive entries are rejected.
    :return: (slope, intercept)

    """
    xs = numpy.asarray(xs, dtype=float)
    ys = numpy.asarray(ys, dtype=float)
    if xs.size < 2 or xs.size != ys.size:
        raise WaveSplitValidationException(
            "A slope fit needs at least two (x, y) pairs of equal length."
        )
    if numpy.any(xs <= 0) or numpy.any(ys <= 0):
        raise WaveSplitValidationException("Slope fits need positive values.")
    slope, intercept = numpy.polyfit(numpy.log2(xs), numpy.log2(ys), 1)
    return float(slope), float(intercept)


def fit_index_slope(ks, ys):
    """
    Least-squares slope of log2(ys) against the integer index k
    (i.e. against log2 of 2^k).
    """
    ks = numpy.asarray(ks, dtype=float)
    return fit_log2_slope(numpy.power(2.0, ks), ys)


def rel_error(a, b):
    """
    Relative Euclidean difference |a - b| / |b| (absolute when b is 0).
    """
    a = numpy.asarray(a)
    b = numpy.asarray(b)
    denom = numpy.linalg.norm(b)
    diff = numpy.linalg.norm(a - b)
    if denom == 0.0:
        return float(diff)
    return float(diff / denom)


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_json_default)


def _json_default(obj):
    if isinstance(obj, numpy.generic):
        return obj.item()
    if isinstance(obj, numpy.ndarray):
        return obj.tolist()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def config_hash(config_dict):
    """
    sha256 hex digest of the canonical JSON form of a configuration.
    """
    data = json.dumps(config_dict, sort_keys=True, separators=(",", ":"), default=_json_default)
    return hashlib.sha256(data.encode("utf-8")).hexdigest()


def _atomic_write(out_file, write_func):
    out_dir = os.path.dirname(os.path.abspath(out_file))
    os.makedirs(out_dir, exist_ok=True)
    fd, tmp_file = tempfile.mkstemp(dir=out_dir, prefix=".tmp_", suffix=os.path.basename(out_file))
    try:
        with os.fdopen(fd, "w") as tmp:
            write_func(tmp)
        os.replace(tmp_file, out_file)
    except Exception:
        if os.path.exists(tmp_file):
            os.remove(tmp_file)
        raise
    logger.debug("Written %s", out_file)
    return out_file


def write_json_atomic(out_file, obj):
    """
    Write obj as sorted-key JSON via a temporary file and a rename.
    """
    text = canonical_json(obj)
    return _atomic_write(out_file, lambda tmp: tmp.write(text + "\n"))


def write_csv_atomic(out_file, header, columns):
    """
    Write columns as a CSV file with round-trip float formatting.

    :param header: list of column names.
    :param columns: list of 1D arrays of equal length.

    """
    data = numpy.column_stack([numpy.asarray(c, dtype=float) for c in columns])
    return _atomic_write(
        out_file,
        lambda tmp: numpy.savetxt(
            tmp, data, fmt="%.17g", delimiter=",", header=",".join(header), comments=""
        ),
    )


def read_csv_columns(in_file, header):
    """
    Read a CSV file written by write_csv_atomic, checking the header.

    :return: 2D array with one column per header entry.

    """
    if not os.path.exists(in_file):
        raise WaveSplitValidationException(f"Input file '{in_file}' does not exist.")
    with open(in_file, "r") as csv_file:
        first = csv_file.readline().strip()
    names = [n.strip() for n in first.split(",")]
    if names != list(header):
        raise WaveSplitValidationException(
            f"Input file '{in_file}' has header '{first}', expected '{','.join(header)}'."
        )
    try:
        data = numpy.loadtxt(in_file, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as e:
        raise WaveSplitValidationException(f"Could not parse '{in_file}': {e}")
    if data.shape[1] != len(header):
        raise WaveSplitValidationException(f"Input file '{in_file}' has the wrong number of columns.")
    return data


def write_text_atomic(out_file, text):
    return _atomic_write(out_file, lambda tmp: tmp.write(text))
