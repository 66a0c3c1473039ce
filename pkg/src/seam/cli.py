"""Command-line entry point.

Exit codes: 0 success, 1 the run produced error diagnostics (or an unsafe
verdict), 2 usage or I/O problems. Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .codegen import write_bundle
from .diagnostics import (
    ERROR,
    INFO,
    WARNING,
    ClashInNew,
    Diagnostic,
    FacetMapError,
    ForkDetected,
    SchemaError,
    SeamError,
    UnknownVersion,
    UnresolvedPlaceholder,
    VersionGap,
    diagnostics_json,
    has_errors,
)
from .facetizer import FacetizerConfig, load_facet_map
from .pipeline import ConvertResult, convert, run_analysis
from .upgrade import changelog as CL
from .upgrade.compat import validate_upgrade
from .upgrade.manifest import load_manifest, ref_name, signature_index
from .upgrade.plan import check_plan, emit_deployment_plan

EXIT_OK, EXIT_ERRORS, EXIT_USAGE = 0, 1, 2

# failures caused by the invocation or its input files rather than by the analysed contract
_USAGE_ERRORS = (SchemaError, FacetMapError, VersionGap, ForkDetected, UnknownVersion, UnresolvedPlaceholder)

_COLORS = {ERROR: "\033[31m", WARNING: "\033[33m", INFO: "\033[36m"}
_RESET = "\033[0m"


class UsageError(Exception):
    pass


def _use_color(stream) -> bool:
    return "SEAM_NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _render(diag: Diagnostic, path: str, color: bool) -> str:
    text = diag.render(path)
    if color and diag.severity in _COLORS:
        tag = f"{diag.severity}[{diag.code}]"
        text = text.replace(tag, f"{_COLORS[diag.severity]}{tag}{_RESET}", 1)
    return text


def _emit_diagnostics(diags: Sequence[Diagnostic], path: str = "", stream=None) -> None:
    stream = stream or sys.stderr
    color = _use_color(stream)
    for d in diags:
        print(_render(d, path, color), file=stream)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _read_json(path: str, what: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path} is not valid JSON ({exc.msg} at line {exc.lineno})") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(f".{path.name}.tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


# -- convert / analyze --------------------------------------------------------


def _config(args) -> Optional[FacetizerConfig]:
    config = None
    if getattr(args, "config", None):
        try:
            config = FacetizerConfig.from_file(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc.strerror or exc}") from None
        except ValueError as exc:  # JSON / TOML syntax
            raise UsageError(f"config {args.config} is malformed: {exc}") from None
    if getattr(args, "max_facets", None) is not None or getattr(args, "facet_map", None):
        config = config or FacetizerConfig()
        if args.max_facets is not None:
            if args.max_facets < 1:
                raise UsageError("--max-facets must be at least 1")
            config.max_facets = args.max_facets
        if args.facet_map:
            try:
                config.facet_map = load_facet_map(args.facet_map)
            except OSError as exc:
                raise UsageError(f"cannot read {args.facet_map}: {exc.strerror or exc}") from None
            except ValueError as exc:
                raise UsageError(f"facet map {args.facet_map} is malformed: {exc}") from None
    return config


def _analysis_json(result: ConvertResult, source: str) -> dict:
    out = json.loads(diagnostics_json(result.diagnostics))
    out["source"] = source
    out["facets"] = [f.name for f in result.plan.facets] if result.plan else []
    if result.renames:
        out["appliedRenames"] = [r.to_json() for r in result.renames]
    if result.transformed:
        out["appliedTransforms"] = [{"kind": "arrayToMapping", "variable": v} for v in result.transformed]
    return out


def cmd_analyze(args) -> int:
    source = _read_text(args.input)
    result = run_analysis(source, _config(args), fixes=args.apply_fixes)
    if args.format == "json":
        sys.stdout.write(_dump(_analysis_json(result, args.input)))
    else:
        _emit_diagnostics(result.diagnostics, args.input, sys.stdout)
        counts = {s: sum(1 for d in result.diagnostics if d.severity == s) for s in (ERROR, WARNING, INFO)}
        print(f"{args.input}: {counts[ERROR]} error(s), {counts[WARNING]} warning(s), {counts[INFO]} info")
    return EXIT_ERRORS if has_errors(result.diagnostics) else EXIT_OK


def cmd_convert(args) -> int:
    source = _read_text(args.input)
    out = Path(args.output)
    if out.exists() and not out.is_dir():
        raise UsageError(f"output path {out} exists and is not a directory")
    if out.is_dir() and any(out.iterdir()) and not args.force:
        raise UsageError(f"output directory {out} is not empty (use --force to overwrite)")
    label = "<stdin>" if args.input == "-" else args.input
    if args.version < 1:
        raise UsageError("--version must be at least 1")
    result = convert(source, _config(args), fixes=args.apply_fixes, version=args.version, force=args.force)
    _emit_diagnostics(result.diagnostics, label)
    for r in result.renames:
        print(f"renamed {r.old_signature} -> {r.new_signature} (selector {r.new_selector})", file=sys.stderr)
    for v in result.transformed:
        print(f"rewrote state variable '{v}' from an array of structs to a mapping plus counter", file=sys.stderr)
    if result.bundle is None:
        print(f"{label}: not converted because of the errors above", file=sys.stderr)
        return EXIT_ERRORS
    try:
        written = write_bundle(result.bundle, out)
    except OSError as exc:
        raise UsageError(f"cannot write to {out}: {exc.strerror or exc}") from None
    if args.format == "json":
        sys.stdout.write(_dump({
            "output": str(out),
            "files": [str(p.relative_to(out)) for p in written],
            "manifest": result.manifest,
            "diagnostics": [d.to_json() for d in result.diagnostics],
        }))
    else:
        facets = ", ".join(f["name"] for f in result.manifest["facets"]) or "none"
        print(f"wrote {len(written)} file(s) to {out} (version {args.version}; facets: {facets})")
    if not result.ok:
        print(f"{label}: generated despite errors (--force); the output is not safe to deploy", file=sys.stderr)
        return EXIT_ERRORS
    return EXIT_OK


# -- upgrade verbs ------------------------------------------------------------


def cmd_validate(args) -> int:
    old, new = load_manifest(args.old), load_manifest(args.new)
    report = validate_upgrade(old, new)
    if args.format == "json":
        sys.stdout.write(_dump(report.to_json()))
    else:
        _emit_diagnostics(report.findings, "", sys.stdout)
        print(f"verdict: {report.verdict}")
    return EXIT_OK if report.ok else EXIT_ERRORS


def _addresses(path: Optional[str]) -> Optional[dict]:
    if not path:
        return None
    data = _read_json(path, "address file")
    if not isinstance(data, dict) or not all(isinstance(k, str) and isinstance(v, str) for k, v in data.items()):
        raise UsageError(f"address file {path} must map names or placeholders to addresses")
    return data


def _init_args(value: Optional[str]):
    if value is None:
        return None
    if Path(value).is_file():
        data = _read_json(value, "init args file")
    else:
        try:
            data = json.loads(value)
        except json.JSONDecodeError:
            raise UsageError("--init-args must be a JSON array or a path to a file holding one") from None
    if not isinstance(data, list):
        raise UsageError("--init-args must be a JSON array")
    return data


def _plan_path(out: Optional[str], version: int) -> Path:
    name = f"plan.{version}.json"
    if out is None:
        return Path(name)
    p = Path(out)
    return p / name if p.is_dir() or out.endswith(("/", os.sep)) else p


def cmd_plan(args) -> int:
    if args.new is None:
        old, new = None, load_manifest(args.old)
    else:
        old, new = load_manifest(args.old), load_manifest(args.new)
    log = CL.load_changelog(args.changelog)
    findings: list[Diagnostic] = []
    if old is not None:
        report = validate_upgrade(old, new)
        findings = report.findings
        _emit_diagnostics(findings)
        if not report.ok and not args.force:
            print("upgrade rejected: the new version is incompatible (nothing written; --force overrides)",
                  file=sys.stderr)
            return EXIT_ERRORS
    known_before = CL.known_placeholders(log)
    try:
        new_log, cuts = CL.record_upgrade(log, old, new, args.note or "")
    except ClashInNew as exc:
        _emit_diagnostics([exc.to_diagnostic()])
        return EXIT_ERRORS
    plan = emit_deployment_plan(
        old, new, cuts, addresses=_addresses(args.addresses), init_args=_init_args(args.init_args),
        known_addresses=known_before, findings=findings,
    )
    check_plan(plan)
    path = _plan_path(args.output, new["version"])
    _write(path, _dump(plan))
    CL.save_changelog(new_log, args.changelog)
    if args.format == "json":
        sys.stdout.write(_dump(plan))
    else:
        sigs = signature_index(old, new)
        for c in cuts:
            names = ", ".join(sigs.get(s, s) for s in c.selectors)
            print(f"{c.action_name:<7} {c.facet_name} @ {c.facet_address}: {names}")
        if not cuts:
            print("no routing changes")
        print(f"plan written to {path}; changelog {args.changelog} now at version {new['version']}")
        if not plan["complete"]:
            for n in plan["notes"]:
                print(f"note: {n}", file=sys.stderr)
    if has_errors(findings):
        return EXIT_ERRORS
    return EXIT_OK


def cmd_changelog(args) -> int:
    log = CL.load_changelog(args.file, missing_ok=False)
    problems = CL.verify_changelog(log)
    if args.at is not None:
        smap = CL.fold(log, args.at)
        entry = CL.entry_at(log, args.at)
        sigs = signature_index(entry.get("manifest")) if entry.get("manifest") else {}
        if args.format == "json":
            sys.stdout.write(_dump({"version": args.at, "selectors": {
                s: {"facetRef": r, "facet": ref_name(r), "signature": sigs.get(s)} for s, r in sorted(smap.items())
            }}))
        else:
            for s, r in sorted(smap.items()):
                print(f"{s}  {ref_name(r):<24} {sigs.get(s, '')}")
    elif args.format == "json":
        sys.stdout.write(_dump({
            "contractName": log.get("contractName"),
            "entries": [{k: v for k, v in e.items() if k != "manifest"} for e in log["entries"]],
            "problems": [d.to_json() for d in problems],
        }))
    else:
        for e in log["entries"]:
            counts = {0: 0, 1: 0, 2: 0}
            for c in e["cuts"]:
                counts[c["action"]] += len(c["selectors"])
            note = f"  {e['note']}" if e["note"] else ""
            print(f"v{e['version']}  {e['timestampUTC']}  +{counts[0]} ~{counts[1]} -{counts[2]}  "
                  f"{e['entryFingerprint'][:18]}{note}")
        if not log["entries"]:
            print("(empty changelog)")
    _emit_diagnostics(problems)
    return EXIT_ERRORS if problems else EXIT_OK


def cmd_revert(args) -> int:
    log = CL.load_changelog(args.file, missing_ok=False)
    current = load_manifest(args.current)
    cuts, plan = CL.revert_plan(log, args.to, current, addresses=_addresses(args.addresses))
    check_plan(plan)
    path = _plan_path(args.output, plan["version"])
    _write(path, _dump(plan))
    if args.format == "json":
        sys.stdout.write(_dump(plan))
    else:
        for c in cuts:
            print(f"{c.action_name:<7} {c.facet_name} @ {c.facet_address}: {', '.join(c.selectors)}")
        if not cuts:
            print("no routing changes")
        print(f"revert plan written to {path}")
    if plan["irreversible"]:
        _emit_diagnostics([Diagnostic(f["code"], f["severity"], f["message"]) for f in plan["findings"]])
        print(f"error[IRREVERSIBLE_UPGRADE]: reverting to version {args.to} is unsafe for existing storage",
              file=sys.stderr)
        return EXIT_ERRORS
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _add_facetizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--apply-fixes", action="store_true",
                   help="apply suggested selector renames and array-to-mapping rewrites")
    p.add_argument("--max-facets", type=int, metavar="N", help="merge facets until at most N remain")
    p.add_argument("--facet-map", metavar="FILE", help="JSON/TOML function-to-facet overrides")
    p.add_argument("--config", metavar="FILE", help="seam TOML/JSON configuration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seam", description="Solidity to EIP-2535 diamond conversion and "
                                                               "upgrade-safety checks.")
    parser.add_argument("-V", "--tool-version", action="version", version=f"seam {__version__}")
    sub = parser.add_subparsers(dest="verb", metavar="VERB")
    sub.required = True

    p = sub.add_parser("convert", help="convert a contract into a diamond bundle")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, metavar="DIR")
    _add_facetizer_flags(p)
    p.add_argument("--force", action="store_true",
                   help="generate even when error diagnostics remain, and write into a non-empty output directory")
    p.add_argument("--version", type=int, default=1, help="version number recorded in the manifest")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("analyze", help="report diagnostics without generating code")
    p.add_argument("input")
    _add_facetizer_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate-upgrade", help="check that a new manifest is a safe upgrade of an old one")
    p.add_argument("old")
    p.add_argument("new")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", help="emit diamondCut calldata and a deployment plan; record it in the changelog")
    p.add_argument("old", help="old manifest (or the only manifest, for a first deployment)")
    p.add_argument("new", nargs="?")
    p.add_argument("--changelog", required=True, metavar="FILE")
    p.add_argument("--addresses", metavar="FILE", help="JSON map of facet names/placeholders to addresses")
    p.add_argument("--init-args", metavar="JSON", help="initializer arguments as a JSON array (or a file)")
    p.add_argument("--note", help="free-text note stored in the changelog entry")
    p.add_argument("-o", "--output", metavar="PATH", help="plan file or directory (default ./plan.<version>.json)")
    p.add_argument("--force", action="store_true", help="record the upgrade even if it is incompatible")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("changelog", help="show the version chain, or the selector map at one version")
    p.add_argument("file")
    p.add_argument("--at", type=int, metavar="N")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_changelog)

    p = sub.add_parser("revert-plan", help="plan cuts that route the diamond back to an earlier version")
    p.add_argument("file", help="changelog")
    p.add_argument("--to", type=int, required=True, metavar="N")
    p.add_argument("--current", required=True, metavar="MANIFEST")
    p.add_argument("--addresses", metavar="FILE")
    p.add_argument("-o", "--output", metavar="PATH")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_revert)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"seam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _USAGE_ERRORS as exc:
        print(f"seam: error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except SeamError as exc:
        _emit_diagnostics([exc.to_diagnostic()])
        return EXIT_ERRORS
    except OSError as exc:
        print(f"seam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return 130


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
