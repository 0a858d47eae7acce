# -*- coding: utf-8 -*-
#
# tiltko documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys
import os

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "numpydoc",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.imgmath",
]

imgmath_image_format = 'svg'

# this is needed for some reason...
# see https://github.com/numpy/numpydoc/issues/69
numpydoc_show_class_members = False

autodoc_default_options = {'members': True}

templates_path = ['_templates']

autosummary_generate = True

source_suffix = '.rst'

master_doc = 'index'

project = u'tiltko'
copyright = u'2026, tiltko contributors'

from tiltko import __version__
version = __version__
release = __version__

exclude_patterns = ['_build', '_templates']

pygments_style = 'sphinx'

# -- Options for HTML output -------------------------------------------------

html_theme = 'alabaster'

html_theme_options = {
    'description': 'Model-X knockoffs for samples drawn under selection or case-control bias',
    # Page and sidebar widths
    'page_width': '1300px',
    'body_max_width': '850px',
    'sidebar_width': '250px',
    # Related links
    'show_related': 'true',
    'show_relbar_bottom': 'true',
    # Font sizes
    'font_size': '15px',
    'code_font_size': '13px'
}

html_sidebars = {
    '**': [
        'about.html',
        'navigation.html',
        'relations.html',
        'searchbox.html',
    ]
}

htmlhelp_basename = 'tiltkodoc'

# -- Options for LaTeX output ------------------------------------------------

latex_engine = 'pdflatex'

latex_documents = [
  ('index', 'tiltko.tex', u'tiltko Documentation',
   u'tiltko contributors', 'manual'),
]

# -- Options for manual page output ------------------------------------------

man_pages = [
    ('index', 'tiltko', u'tiltko Documentation',
     [u'tiltko contributors'], 1)
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/{.major}'.format(
        sys.version_info), None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'pandas': ('https://pandas.pydata.org/docs/', None),
    'sklearn': ('https://scikit-learn.org/stable', None)
}
