"""SHADE: candidate-label extraction and annotation workflow for MediaWiki wikis."""

__version__ = "0.1.0"
