#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# wavesplit documentation build configuration file.
#
# Build with: sphinx-build -b html doc/source doc/build

import os
import sys

import sphinx_rtd_theme

# The package is documented from the source tree, not an installed copy.
sys.path.insert(0, os.path.abspath('../..'))

import wavesplitlib

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.intersphinx',
    'sphinx.ext.coverage',
    'sphinx.ext.mathjax',
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}

autodoc_member_order = 'bysource'

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'wavesplit'
copyright = '{}, {}'.format(wavesplitlib.WAVESPLIT_COPYRIGHT_YEAR, wavesplitlib.WAVESPLIT_COPYRIGHT_NAMES)
version = wavesplitlib.WAVESPLIT_VERSION
release = wavesplitlib.WAVESPLIT_VERSION

exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_title = "WaveSplit"
htmlhelp_basename = 'wavesplitdoc'

# -- Options for LaTeX and manual page output -----------------------------

latex_documents = [
    ('index', 'wavesplit.tex', 'WaveSplit Documentation', wavesplitlib.WAVESPLIT_COPYRIGHT_NAMES, 'manual'),
]

man_pages = [
    ('index', 'wavesplit', 'WaveSplit Documentation', [wavesplitlib.WAVESPLIT_COPYRIGHT_NAMES], 1),
]
