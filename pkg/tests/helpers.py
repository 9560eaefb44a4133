"""Shared test plumbing: corpus paths, CLI runner, statement splitter."""

from __future__ import annotations

import os
import subprocess
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
CORPUS = REPO / "corpus"
SCHEMA = REPO / "docs" / "check-report.schema.json"


def corpus_files() -> list:
    files = sorted(CORPUS.glob("*.gfo"))
    assert len(files) >= 10, "corpus shrank below ten files"
    return files


def run_cli(*args: str, env_extra: dict | None = None):
    env = dict(os.environ, GFO_COLOR="0")
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        [sys.executable, "-m", "gfo", *args],
        capture_output=True,
        text=True,
        cwd=REPO,
        env=env,
    )
    return proc.returncode, proc.stdout, proc.stderr


def split_statements(text: str) -> list:
    """Split canonical serializer output into top-level statements."""
    statements = []
    current = []
    depth = 0
    for line in text.splitlines():
        current.append(line)
        depth += line.count("{") - line.count("}")
        stripped = line.strip()
        if depth == 0 and (stripped.endswith(";") or stripped.endswith("}")):
            statements.append("\n".join(current))
            current = []
    assert not current, "unterminated trailing statement"
    return statements
