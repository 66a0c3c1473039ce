"""Capture reference storage layouts for the test corpus from the pinned solc-js.

Run once (or after adding corpus files):  python tools/capture_golden_layouts.py
Writes tests/golden/layouts/<stem>.json.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import solc_oracle  # noqa: E402

from seam.frontend import parse  # noqa: E402


def main() -> int:
    if not solc_oracle.available():
        print("solc-js not installed; run: npm install --prefix tools/solcjs", file=sys.stderr)
        return 2
    out_dir = ROOT / "tests" / "golden" / "layouts"
    out_dir.mkdir(parents=True, exist_ok=True)
    ver = solc_oracle.version()
    for path in sorted((ROOT / "tests" / "corpus").glob("*.sol")):
        text = path.read_text()
        name = parse(text).name
        layout = solc_oracle.storage_layout(text, name, path.name)
        doc = {"compiler": ver, "contract": name, "source": path.name, **layout}
        (out_dir / f"{path.stem}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print(f"{path.name}: {len(layout['storage'])} entries")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
