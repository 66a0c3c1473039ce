"""Driver for the pinned reference compiler (solc-js under tools/solcjs)."""

from __future__ import annotations

import json
import os
import shutil
import subprocess
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
SOLCJS_DIR = Path(os.environ.get("SEAM_SOLCJS_DIR", ROOT / "tools" / "solcjs"))


def available() -> bool:
    return shutil.which("node") is not None and (SOLCJS_DIR / "node_modules" / "solc").is_dir()


def version() -> str:
    out = subprocess.run(["node", str(SOLCJS_DIR / "version.js")], capture_output=True, text=True,
                         check=True, cwd=SOLCJS_DIR)
    return out.stdout.strip()


def compile_standard(sources: dict[str, str], outputs=("storageLayout",)) -> dict:
    payload = {
        "language": "Solidity",
        "sources": {name: {"content": text} for name, text in sources.items()},
        "settings": {"outputSelection": {"*": {"*": list(outputs)}}},
    }
    proc = subprocess.run(
        ["node", str(SOLCJS_DIR / "compile.js")],
        input=json.dumps(payload), capture_output=True, text=True, check=True, cwd=SOLCJS_DIR,
    )
    return json.loads(proc.stdout)


def errors(result: dict) -> list[dict]:
    return [e for e in result.get("errors", []) if e.get("severity") == "error"]


def _flatten(storage: list[dict], types: dict) -> list[dict]:
    return [
        {"label": s["label"], "slot": int(s["slot"]), "offset": s["offset"], "type": types[s["type"]]["label"]}
        for s in storage
    ]


def storage_layout(source: str, contract: str, filename: str = "input.sol") -> dict:
    """Top-level entries plus every struct's member layout, as solc reports them."""
    result = compile_standard({filename: source})
    errs = errors(result)
    if errs:
        raise RuntimeError("solc errors: " + "; ".join(e["formattedMessage"] for e in errs))
    layout = result["contracts"][filename][contract]["storageLayout"]
    types = layout.get("types") or {}
    structs = {}
    for info in types.values():
        if info.get("encoding") == "inplace" and "members" in info:
            structs[info["label"]] = {
                "numberOfBytes": int(info["numberOfBytes"]),
                "members": _flatten(info["members"], types),
            }
    return {"storage": _flatten(layout["storage"], types), "structs": structs}
