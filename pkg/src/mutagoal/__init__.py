"""Goal-oriented mutation testing for MiniLang projects."""

__version__ = "0.1.0"
