#!/usr/bin/env python
"""
Setup script for WaveSplit. Use like this for Unix:

$ python setup.py install

"""
#  This file is part of 'WaveSplit' - incoming/outgoing decomposition of
#  radial Schrodinger data.
#
#  This program is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  This program is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with WaveSplit.  If not, see <http://www.gnu.org/licenses/>.
#
#
# Purpose:  Installation of the WaveSplit software
#
# History:
# Version 1.0 - Created.

import glob

from setuptools import setup

import wavesplitlib

setup(name='wavesplit',
    version=wavesplitlib.WAVESPLIT_VERSION,
    description='Incoming/outgoing decomposition of radial Schrodinger data with verification suites',
    scripts=glob.glob("bin/*.py"),
    packages=['wavesplitlib'],
    install_requires=['numpy', 'scipy', 'sqlalchemy>=1.4'],
    extras_require={'test': ['pytest'], 'doc': ['sphinx', 'sphinx_rtd_theme']},
    python_requires='>=3.8',
    license='LICENSE.txt',
    classifiers=['Intended Audience :: Developers',
                 'Intended Audience :: Science/Research',
                 'Topic :: Scientific/Engineering :: Mathematics',
                 'Operating System :: OS Independent',
                 'Programming Language :: Python :: 3.8',
                 'Programming Language :: Python :: 3.9',
                 'Programming Language :: Python :: 3.10',
                 'Programming Language :: Python :: 3.11'])
