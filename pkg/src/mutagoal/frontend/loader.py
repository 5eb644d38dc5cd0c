from __future__ import annotations

from pathlib import Path

from mutagoal.frontend.nodes import Program
from mutagoal.frontend.parser import parse_program

SOURCE_SUFFIX = ".mini"


def read_tree(project: str | Path) -> dict[str, str]:
    """Collect ``src/**.mini`` and ``tests/**.mini`` as ``{posix relpath: text}``."""
    root = Path(project)
    tree: dict[str, str] = {}
    for sub in ("src", "tests"):
        base = root / sub
        if not base.is_dir():
            continue
        for path in sorted(base.rglob(f"*{SOURCE_SUFFIX}")):
            tree[path.relative_to(root).as_posix()] = path.read_text(encoding="utf-8")
    return tree


def load_project(project: str | Path) -> Program:
    return parse_program(read_tree(project))
