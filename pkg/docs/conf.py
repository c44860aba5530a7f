"""Sphinx configuration for the igacontact documentation."""
from igacontact.version import get_version

project = "igacontact"
copyright = "2026, igacontact developers"
author = "igacontact developers"
version = release = get_version()

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx_rtd_theme",
]

autodoc_member_order = "bysource"
# Array shapes live in the docstrings, annotations are rendered beside them.
autodoc_typehints = "description"
autodoc_mock_imports = ["colorlog", "colorama"]

source_suffix = ".rst"
templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}

html_theme = "sphinx_rtd_theme"
html_title = f"igacontact {release}"
html_theme_options = {"navigation_depth": 3}
