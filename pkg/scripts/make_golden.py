"""Regenerate the golden p1-demo reports used by the CLI tests."""

from __future__ import annotations

import contextlib
import io
from pathlib import Path

from algebroid_forge.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def run(argv: list[str]) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        main(argv)
    return buf.getvalue()


def main_() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for k in ("0", "2", "4"):
        (GOLDEN / f"p1_demo_k{k}.json").write_text(run(["p1-demo", "--k", k, "--json"]))
        (GOLDEN / f"p1_demo_k{k}.txt").write_text(run(["p1-demo", "--k", k]))
    print(f"wrote golden reports to {GOLDEN}")


if __name__ == "__main__":
    main_()
