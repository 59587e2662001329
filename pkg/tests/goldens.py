"""Golden fixtures: ``.form``/``.op`` files parse to ``.json``; ``.args`` commands emit ``.out``.

An ``.args`` file holds the argv on its first line (``{fixtures}`` expands to
the fixture directory) and ``exit: N`` on the second.
Run ``python tests/goldens.py`` to rewrite every golden after an intended change.
"""

from __future__ import annotations

import shlex
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from formdeform.cli import run_command  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
ENV = {}  # goldens never depend on the caller's environment


def cases():
    """Yield ``(name, argv, expected_status, golden_path)``."""
    for kind, folder in (("form", "forms"), ("op", "ops")):
        for src in sorted((FIXTURES / folder).glob(f"*.{kind}")):
            argv = ["parse", f"@{src}", "--kind", kind]
            yield f"{folder}/{src.stem}", argv, None, src.with_suffix(".json")
    for src in sorted((FIXTURES / "commands").glob("*.args")):
        line, status = src.read_text().splitlines()[:2]
        argv = shlex.split(line.replace("{fixtures}", str(FIXTURES)))
        yield f"commands/{src.stem}", argv, int(status.split(":")[1]), src.with_suffix(".out")


def run(argv):
    return run_command(argv, ENV)


def regenerate():
    for name, argv, status, golden in cases():
        got_status, text = run(argv)
        if status is not None and got_status != status:
            raise SystemExit(f"{name}: exit {got_status}, expected {status}")
        golden.write_text(text)
        print(f"wrote {golden.relative_to(FIXTURES)} (exit {got_status})")


if __name__ == "__main__":
    regenerate()
