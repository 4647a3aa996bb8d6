# Configuration file for the Sphinx documentation builder.
#
# See https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

# Document the source tree even when nlcover is not installed
sys.path.insert(0, os.path.abspath(os.path.join('..', 'src')))


# -- Project information -----------------------------------------------------

project = 'nlcover'
copyright = ' Copyright 2023 The nlcover developers'
author = 'The nlcover developers'


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
]

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

# Links for Fraction, logging, etc.
intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
}

# Render type hints in the parameter descriptions, and only for documented
# parameters
autodoc_typehints = 'description'
autodoc_typehints_description_target = 'documented'

autodoc_member_order = 'bysource'

# -- Options for HTML output -------------------------------------------------

html_theme = 'alabaster'
html_theme_options = {
    'description': 'Solvers for Non-Linear Knapsack-Cover and UFP-Cover',
    'show_relbar_bottom': True,
    'show_related': True,
    'fixed_sidebar': True
}
