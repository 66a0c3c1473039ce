"""Emit the diamond, facets, storage libraries, shared library and manifest."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .. import __version__
from ..diagnostics import InternalRewriteError
from ..facetizer import Facet, FacetPlan
from ..frontend import ast as A
from ..hashing import keccak256
from ..layout import diamond_storage_slot, layout_fingerprint, serialize_layout, slot_hex
from ..security import DIAMOND_CORE_SIGNATURES, compute_selector
from .diamond_template import DIAMOND_NAMESPACE, TEMPLATE
from .printer import print_unit

SCHEMA_VERSION = 1
PRAGMA = "^0.8.20"
SHARED_LIB_FILE = "SharedLib.sol"
MANIFEST_FILE = "seam.manifest.json"


def storage_lib_name(facet_name: str) -> str:
    return f"Lib{facet_name}Storage"


def _header(plan: FacetPlan, what: str) -> str:
    return f"{what} generated by seam from contract {plan.unit.name}."


def _license(plan: FacetPlan) -> str:
    return plan.unit.license or "UNLICENSED"


# -- shared symbols ---------------------------------------------------------


def shared_symbols(plan: FacetPlan) -> list[str]:
    """User types and constants hoisted to file level in SharedLib.sol."""
    u = plan.unit
    return [e.name for e in u.enums] + [s.name for s in u.structs] + [c.name for c in u.constants()]


def _strip_scope(plan: FacetPlan):
    """Drop ``Contract.`` qualifiers from type names; the types move to file level."""
    name = plan.unit.name

    def fix(node):
        if isinstance(node, A.UserType) and len(node.path) == 2 and node.path[0] == name:
            return A.UserType((node.path[1],), pos=node.pos)
        return node

    return fix


def _referenced_names(nodes) -> set[str]:
    names: set[str] = set()
    for root in nodes:
        for n in A.walk(root):
            if isinstance(n, A.Ident):
                names.add(n.name)
            elif isinstance(n, A.UserType):
                names.add(n.path[0])
    return names


def _used_events_errors(plan: FacetPlan, fns: list[A.FuncDef]) -> tuple[list[A.EventDef], list[A.ErrorDef]]:
    names = _referenced_names([f.body for f in fns if f.body is not None])
    events = [e for e in plan.unit.events if e.name in names]
    errors = [e for e in plan.unit.errors if e.name in names]
    return events, errors


def _shared_import(plan: FacetPlan, unit: A.SourceUnit, path: str, extra: tuple[str, ...] = ()) -> None:
    used = _referenced_names([unit])
    local = {v.name for v in unit.state_vars} | {s.name for s in unit.structs} | {e.name for e in unit.enums}
    symbols = [s for s in shared_symbols(plan) if s in used and s not in local]
    symbols = sorted(set(symbols) | set(extra))
    if symbols:
        unit.imports.insert(0, A.ImportDirective(path, symbols))


# -- storage library --------------------------------------------------------


def generate_storage_lib(facet: Facet, plan: FacetPlan) -> Optional[str]:
    """``library Lib<Facet>Storage`` with the ``Layout`` struct and its diamond-storage accessor."""
    if not facet.storage_layout.entries:
        return None
    fix = _strip_scope(plan)
    members = [A.VarDecl(A.rewrite(A.deep_copy(v.type), fix), v.name) for v in facet.owned_state_vars]
    if facet.init_flag:
        members.append(A.VarDecl(A.ElementaryType("bool"), facet.init_flag))
    position = A.VarDecl(A.ElementaryType("bytes32"), "POSITION", constant=True,
                         value=A.NumberLit(facet.base_slot_hex))
    position.doc = f'keccak256("{facet.storage_namespace}")'
    ret = A.VarDecl(A.UserType(("Layout",)), "l", location="storage")
    accessor = A.FuncDef("function", "layout", [], [ret], "internal", "pure", A.Block([
        A.VarDeclStmt([A.VarDecl(A.ElementaryType("bytes32"), "position")], A.Ident("POSITION")),
        A.Assembly(("l.slot := position",)),
    ]))
    unit = A.SourceUnit(PRAGMA, "library", storage_lib_name(facet.name),
                        state_vars=[position], structs=[A.StructDef("Layout", members)], functions=[accessor])
    _shared_import(plan, unit, f"./{SHARED_LIB_FILE}")
    return print_unit(unit, _license(plan), _header(plan, f"Diamond storage for {facet.name}"))


# -- function rewriting -----------------------------------------------------


def _accessor_name(f: A.FuncDef) -> str:
    taken = _referenced_names([f]) | {p.name for p in f.params + f.returns if p.name}
    for n in A.walk(f.body) if f.body is not None else ():
        if isinstance(n, A.VarDecl) and n.name:
            taken.add(n.name)
    name = "s"
    while name in taken:
        name = "_" + name
    return name


def rewrite_function(f: A.FuncDef, plan: FacetPlan, owned: set[str], lib: Optional[str],
                     library_fns: set[str], init_flag: Optional[str] = None) -> A.FuncDef:
    """Route owned state through ``<lib>.layout()`` and shared calls through ``SharedLib``."""
    acc = _accessor_name(f)
    touched = False
    scope_fix = _strip_scope(plan)

    def fix(node):
        nonlocal touched
        node = scope_fix(node)
        if isinstance(node, A.Ident) and node.binding is not None:
            kind, decl = node.binding
            if kind == "state":
                if node.name not in owned or lib is None:
                    raise InternalRewriteError(
                        f"'{f.name}' references state variable '{node.name}' outside its facet", node.pos)
                touched = True
                return A.Member(A.Ident(acc, pos=node.pos), node.name, pos=node.pos)
            if kind == "function" and node.name in library_fns:
                return A.Member(A.Ident(plan.shared_library.name, pos=node.pos), node.name, pos=node.pos)
        return node

    out = A.rewrite(A.deep_copy(f), fix)
    out.synthesized = False
    out.getter_of = None
    stmts = list(out.body.stmts) if out.body is not None else []
    if init_flag is not None:
        touched = True
        flag = A.Member(A.Ident(acc), init_flag)
        stmts = [
            A.ExprStmt(A.Call(A.Ident("require"), [A.Unary("!", A.deep_copy(flag)), A.StringLit("already initialized")])),
            A.ExprStmt(A.Assign("=", flag, A.BoolLit(True))),
        ] + stmts
    if touched:
        decl = A.VarDecl(A.UserType((lib, "Layout")), acc, location="storage")
        stmts.insert(0, A.VarDeclStmt([decl], A.Call(A.Member(A.Ident(lib), "layout"), [])))
    out.body = A.Block(stmts, pos=out.body.pos if out.body is not None else None)
    # leftover bare references mean the rewrite missed something
    for n in A.walk(out.body):
        if isinstance(n, A.Ident) and n.binding is not None and n.binding[0] == "state":
            raise InternalRewriteError(f"unrewritten state reference '{n.name}' in '{f.name}'", n.pos)
    return out


# -- facet ------------------------------------------------------------------


def generate_facet(facet: Facet, plan: FacetPlan) -> str:
    lib = storage_lib_name(facet.name) if facet.storage_layout.entries else None
    owned = {v.name for v in facet.owned_state_vars}
    library_fns = {g.name for g in plan.shared_library.internal_functions}
    constants = {c.name: c for c in plan.unit.constants()}
    functions: list[A.FuncDef] = []
    public_constants: list[A.VarDecl] = []
    originals: list[A.FuncDef] = []
    for f in facet.external_functions:
        if f.getter_of is not None and f.getter_of in constants:
            c = A.rewrite(A.deep_copy(constants[f.getter_of]), _strip_scope(plan))
            c.doc = None
            public_constants.append(c)
            continue
        originals.append(f)
        functions.append(rewrite_function(f, plan, owned, lib, library_fns))
    if facet.init_function is not None:
        originals.append(facet.init_function)
        functions.append(rewrite_function(facet.init_function, plan, owned, lib, library_fns, facet.init_flag))
    for f in facet.private_internal_functions:
        originals.append(f)
        functions.append(rewrite_function(f, plan, owned, lib, library_fns))
    events, errors = _used_events_errors(plan, originals)
    fix = _strip_scope(plan)
    unit = A.SourceUnit(PRAGMA, "contract", facet.name,
                        state_vars=public_constants,
                        events=[A.rewrite(A.deep_copy(e), fix) for e in events],
                        errors=[A.rewrite(A.deep_copy(e), fix) for e in errors],
                        functions=functions)
    uses_shared = any(isinstance(n, A.Member) and isinstance(n.expr, A.Ident)
                      and n.expr.name == plan.shared_library.name
                      for f in functions for n in A.walk(f))
    _shared_import(plan, unit, f"../libraries/{SHARED_LIB_FILE}",
                   (plan.shared_library.name,) if uses_shared else ())
    if lib is not None:
        unit.imports.append(A.ImportDirective(f"../libraries/{lib}.sol", [lib]))
    return print_unit(unit, _license(plan), _header(plan, f"Facet {facet.name}"))


# -- shared library ---------------------------------------------------------


def generate_shared_lib(plan: FacetPlan) -> Optional[str]:
    """File-level user types and constants plus ``library SharedLib`` with shared internals."""
    u = plan.unit
    fix = _strip_scope(plan)
    fns = []
    for f in plan.shared_library.internal_functions:
        g = rewrite_function(f, plan, set(), None, set())
        if g.visibility == "private":
            g.visibility = "internal"
        fns.append(g)
    file_level: list[A.Node] = [A.rewrite(A.deep_copy(e), fix) for e in u.enums]
    file_level += [A.rewrite(A.deep_copy(s), fix) for s in u.structs]
    for c in u.constants():
        c = A.rewrite(A.deep_copy(c), fix)
        c.visibility = None
        c.doc = None
        file_level.append(c)
    if not fns and not file_level:
        return None
    events, errors = _used_events_errors(plan, plan.shared_library.internal_functions)
    unit = A.SourceUnit(PRAGMA, "library", plan.shared_library.name,
                        events=[A.rewrite(A.deep_copy(e), fix) for e in events],
                        errors=[A.rewrite(A.deep_copy(e), fix) for e in errors],
                        functions=fns, file_level=file_level)
    return print_unit(unit, _license(plan), _header(plan, "Shared types and internal functions"))


# -- diamond ----------------------------------------------------------------


def generate_diamond(plan: FacetPlan) -> str:
    checks = " || ".join(f"selector == bytes4(0x{compute_selector(s).hex()})" for s in DIAMOND_CORE_SIGNATURES)
    return TEMPLATE.format(
        license=_license(plan),
        pragma=PRAGMA,
        header=_header(plan, "Diamond proxy"),
        position=slot_hex(diamond_storage_slot(DIAMOND_NAMESPACE)),
        namespace=DIAMOND_NAMESPACE,
        core_check=checks,
    )


# -- manifest ---------------------------------------------------------------


def _selector_list(signatures) -> list[dict]:
    items = [{"selector": "0x" + compute_selector(s).hex(), "signature": s} for s in signatures]
    return sorted(items, key=lambda x: (x["selector"], x["signature"]))


def source_hash(*sources: Optional[str]) -> str:
    h = keccak256("\x00".join(s or "" for s in sources).encode("utf-8"))
    return "0x" + h.hex()


def emit_manifest(plan: FacetPlan, version: int = 1, bundle: Optional["GeneratedBundle"] = None) -> dict:
    """Machine-readable record of one version: facets, selectors, layouts and fingerprints."""
    if version < 1:
        raise ValueError("manifest version must be >= 1")
    facets = []
    for facet in sorted(plan.facets, key=lambda f: f.name):
        entry = {
            "name": facet.name,
            "storageNamespace": facet.storage_namespace,
            "baseSlotHex": facet.base_slot_hex,
            "selectors": _selector_list(f.signature() for f in facet.selector_functions()),
            "layout": serialize_layout(facet.storage_layout),
            "layoutFingerprint": "0x" + layout_fingerprint(facet.storage_layout).hex(),
        }
        if bundle is not None:
            entry["sourceHash"] = bundle.facet_hash(facet.name)
        facets.append(entry)
    return {
        "schemaVersion": SCHEMA_VERSION,
        "contractName": plan.unit.name,
        "version": version,
        "toolVersion": f"seam {__version__}",
        "diamondCore": {
            "name": "Diamond",
            "storageNamespace": DIAMOND_NAMESPACE,
            "baseSlotHex": slot_hex(diamond_storage_slot(DIAMOND_NAMESPACE)),
            "selectors": _selector_list(DIAMOND_CORE_SIGNATURES),
        },
        "facets": facets,
        "sharedLibrary": {
            "name": plan.shared_library.name,
            "functions": [f.name for f in plan.shared_library.internal_functions],
        },
    }


def manifest_json(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True) + "\n"


# -- bundle -----------------------------------------------------------------


@dataclass
class GeneratedBundle:
    diamond_source: str
    facet_sources: dict[str, str]
    storage_lib_sources: dict[str, str]
    shared_lib_source: Optional[str]
    manifest: dict = field(default_factory=dict)

    def facet_hash(self, name: str) -> str:
        return source_hash(self.facet_sources[name], self.storage_lib_sources.get(name), self.shared_lib_source)

    def files(self) -> dict[str, str]:
        """Relative path → contents, in a fixed order."""
        out = {"Diamond.sol": self.diamond_source}
        for name in sorted(self.facet_sources):
            out[f"facets/{name}.sol"] = self.facet_sources[name]
        for name in sorted(self.storage_lib_sources):
            out[f"libraries/{storage_lib_name(name)}.sol"] = self.storage_lib_sources[name]
        if self.shared_lib_source is not None:
            out[f"libraries/{SHARED_LIB_FILE}"] = self.shared_lib_source
        if self.manifest:
            out[MANIFEST_FILE] = manifest_json(self.manifest)
        return out


def generate_bundle(plan: FacetPlan, version: int = 1, with_manifest: bool = True) -> GeneratedBundle:
    libs = {}
    for facet in plan.facets:
        src = generate_storage_lib(facet, plan)
        if src is not None:
            libs[facet.name] = src
    bundle = GeneratedBundle(
        diamond_source=generate_diamond(plan),
        facet_sources={f.name: generate_facet(f, plan) for f in plan.facets},
        storage_lib_sources=libs,
        shared_lib_source=generate_shared_lib(plan),
    )
    if with_manifest:
        bundle.manifest = emit_manifest(plan, version, bundle)
    return bundle


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_bundle(bundle: GeneratedBundle, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    written = []
    for rel, text in bundle.files().items():
        p = out / rel
        _atomic_write(p, text)
        written.append(p)
    return written


def check_bundle(bundle: GeneratedBundle) -> list:
    """Re-parse and resolve every generated source; returns the errors found (empty when closed)."""
    from ..diagnostics import SeamError
    from ..frontend import load

    errors = []
    imported: dict = {}
    if bundle.shared_lib_source is not None:
        try:
            shared = load(bundle.shared_lib_source, extended=True)
            imported = {n.name: n for n in shared.file_level if isinstance(n, (A.StructDef, A.EnumDef, A.VarDecl))}
        except SeamError as exc:
            errors.append((f"libraries/{SHARED_LIB_FILE}", exc))
    for rel, text in bundle.files().items():
        if not rel.endswith(".sol") or rel == f"libraries/{SHARED_LIB_FILE}":
            continue
        try:
            load(text, extended=True, imported=imported)
        except SeamError as exc:
            errors.append((rel, exc))
    return errors
