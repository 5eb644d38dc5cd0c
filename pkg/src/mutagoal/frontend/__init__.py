"""MiniLang lexer, parser, resolver and pretty-printer."""

from mutagoal.frontend.loader import load_project, read_tree
from mutagoal.frontend.parser import parse_program, parse_source
from mutagoal.frontend.printer import pretty_print, render_tree

__all__ = ["load_project", "parse_program", "parse_source", "pretty_print", "read_tree", "render_tree"]
