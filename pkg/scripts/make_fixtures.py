"""Write the reference charts and covers to fixtures/ as deterministic JSON."""

from __future__ import annotations

import argparse
from pathlib import Path

from algebroid_forge import fixtures
from algebroid_forge.io import dumps, dumps_chart


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "src" / "algebroid_forge" / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    charts = {**fixtures.passing_charts(), **fixtures.auxiliary_charts(), **fixtures.failing_charts()}
    for name, s in charts.items():
        (out / f"{name}.json").write_text(dumps_chart(s))
    for name, d in fixtures.covers().items():
        (out / f"{name}.json").write_text(dumps(d))
    print(f"wrote {len(charts) + len(fixtures.covers())} files to {out}")


if __name__ == "__main__":
    main()
