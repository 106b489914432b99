#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys

sys.path.insert(0, os.path.abspath("../../"))
sys.path.insert(0, os.path.abspath("./"))

import lobound

master_doc = "index"
project = "lobound"
copyright = "2026, lobound developers"
author = "lobound developers"
description = "Success probability bounds of postselected linear optics gates"

html_theme = "furo"
html_theme_options = {
    "light_css_variables": {"color-brand-primary": "#076678"},
    "dark_css_variables": {"color-brand-primary": "#458588"},
}
highlight_language = "python3"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.autosummary",
    "sphinx.ext.extlinks",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinxext.opengraph",
    "sphinx_copybutton",
    "sphinx.ext.viewcode",
    "sphinx_paramlinks",
    "sphinxcontrib.programoutput",
]

autodoc_default_options = {
    "members": True,
    "member-order": "bysource",
}

version = release = lobound.__version__
html_title = f"{project} <small><b style='color: var(--color-brand-primary)'>{{{release}}}</b></small>"

add_module_names = False
autoclass_content = "both"
autodoc_typehints_format = "short"

autosectionlabel_maxdepth = 2
autosectionlabel_prefix_document = True

extlinks = {"pypi": ("https://pypi.org/project/%s", "%s")}

htmlhelp_basename = "lobounddoc"
latex_elements = {}

latex_documents = [
    (master_doc, "lobound.tex", "lobound Documentation", author, "manual"),
]
man_pages = [(master_doc, "lobound", "lobound Documentation", [author], 1)]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}
