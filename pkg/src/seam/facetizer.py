"""Partition a resolved contract into facets.

Facets are the connected components of the graph whose nodes are the
external/public functions and the storage variables, with an edge from a
function to every variable it touches directly or through internal calls,
and between functions linked by calls. Internal functions reachable from
more than one facet move to the shared library.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .diagnostics import INFO, WARNING, Diagnostic, FacetMapError, Pos
from .frontend import ast as A
from .frontend.types import elementary
from .layout import StorageLayout, compute_layout, diamond_storage_slot, layout_fingerprint, slot_hex, serialize_layout

log = logging.getLogger(__name__)

DEFAULT_NAMESPACE_PREFIX = "seam.storage.v1."
SHARED_LIBRARY_NAME = "SharedLib"
INIT_KEY = "<init>"


@dataclass
class FacetizerConfig:
    max_facets: Optional[int] = None
    facet_map: Optional[dict[str, str]] = None
    namespace_prefix: str = DEFAULT_NAMESPACE_PREFIX

    @classmethod
    def from_file(cls, path: str | Path) -> "FacetizerConfig":
        """Load ``maxFacets``, ``facetMap`` (inline table or path) and ``namespacePrefix`` from TOML or JSON."""
        path = Path(path)
        text = path.read_text()
        if path.suffix == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            data = tomllib.loads(text)
        else:
            data = json.loads(text)
        facet_map = data.get("facetMap")
        if isinstance(facet_map, str):
            facet_map = load_facet_map(path.parent / facet_map)
        return cls(
            max_facets=data.get("maxFacets"),
            facet_map=facet_map,
            namespace_prefix=data.get("namespacePrefix", DEFAULT_NAMESPACE_PREFIX),
        )


def load_facet_map(path: str | Path) -> dict[str, str]:
    """Read a function→facet override file.

    JSON: ``{"addBook": "BookFacet", ...}`` or ``{"BookFacet": ["addBook", ...]}``.
    TOML: either shape at top level.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        data = tomllib.loads(text)
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise FacetMapError(f"{path}: facet map must be an object")
    out: dict[str, str] = {}
    for k, v in data.items():
        if isinstance(v, str):
            out[k] = v
        elif isinstance(v, list) and all(isinstance(x, str) for x in v):
            for fn in v:
                if fn in out and out[fn] != k:
                    raise FacetMapError(f"{path}: function '{fn}' mapped to both '{out[fn]}' and '{k}'")
                out[fn] = k
        else:
            raise FacetMapError(f"{path}: entry '{k}' must be a facet name or a list of function names")
    return out


def fn_key(f: A.FuncDef) -> str:
    """Overload-distinguishing key; unlike the ABI signature it accepts storage-only parameter types."""
    if f.kind != "function":
        return f"<{f.kind}>"
    types = ",".join(p.tdesc.canonical_name if p.tdesc is not None else "?" for p in f.params)
    return f"{f.name}({types})"


def _order(f: A.FuncDef) -> tuple[int, int]:
    return (f.pos.line, f.pos.column) if f.pos else (0, 0)


# -- access graph ------------------------------------------------------------


@dataclass
class AccessGraph:
    unit: A.SourceUnit
    external: list[A.FuncDef]
    internal: list[A.FuncDef]
    variables: list[str]
    # closure edges used for grouping: function key -> variables
    access: dict[str, set[str]]
    # direct call edges: function key -> callee keys
    call_edges: dict[str, set[str]]
    # transitive call closure: function key -> callee keys
    reach: dict[str, set[str]]
    init: Optional[A.FuncDef] = None

    def edges(self) -> list[tuple[str, str, str]]:
        out = []
        for f, vs in sorted(self.access.items()):
            out.extend((f, v, "access") for v in sorted(vs))
        for f, gs in sorted(self.call_edges.items()):
            out.extend((f, g, "call") for g in sorted(gs))
        return out

    def function(self, key: str) -> A.FuncDef:
        for f in self.external + self.internal + ([self.init] if self.init else []):
            if fn_key(f) == key:
                return f
        raise KeyError(key)


def synthesize_initializer(unit: A.SourceUnit) -> Optional[A.FuncDef]:
    """Fold the constructor and state-variable initializers into ``initialize()``."""
    inits = [v for v in unit.storage_vars() if v.value is not None]
    ctor = unit.constructor
    if ctor is None and not inits:
        return None
    stmts: list[A.Node] = []
    for v in inits:
        target = A.Ident(v.name, pos=v.pos)
        target.binding = ("state", v)
        stmts.append(A.ExprStmt(A.Assign("=", target, A.deep_copy(v.value), pos=v.pos), pos=v.pos))
    params: list[A.VarDecl] = []
    mutability = "nonpayable"
    pos = inits[0].pos if inits else None
    if ctor is not None:
        stmts.extend(A.deep_copy(ctor.body.stmts))
        params = A.deep_copy(ctor.params)
        for p in params:
            if p.location is None and p.tdesc is not None and not p.tdesc.is_value_type:
                p.location = "memory"
        mutability = ctor.mutability
        pos = ctor.pos
    f = A.FuncDef("function", "initialize", params, [], "external", mutability, A.Block(stmts, pos=pos), pos=pos)
    f.synthesized = True
    eff = unit.init_effects
    f.reads = set(eff.reads) | (ctor.reads if ctor else set())
    f.writes = set(eff.writes) | (ctor.writes if ctor else set())
    f.calls = set(eff.calls) | (ctor.calls if ctor else set())
    return f


def build_access_graph(unit: A.SourceUnit) -> AccessGraph:
    """Function→variable closure edges and function→function call edges."""
    storage = {v.name for v in unit.storage_vars()}
    external = [f for f in unit.functions if f.is_external]
    internal = [f for f in unit.functions if f.kind == "function" and not f.is_external]
    init = synthesize_initializer(unit)
    all_fns = external + internal + ([init] if init else [])
    by_name: dict[str, list[A.FuncDef]] = {}
    for f in external + internal:
        by_name.setdefault(f.name, []).append(f)
    call_edges: dict[str, set[str]] = {}
    for f in all_fns:
        call_edges[fn_key(f)] = {fn_key(g) for name in f.calls for g in by_name.get(name, [])}
    reach: dict[str, set[str]] = {}
    for f in all_fns:
        k = fn_key(f)
        seen: set[str] = set()
        stack = list(call_edges[k])
        while stack:
            g = stack.pop()
            if g in seen:
                continue
            seen.add(g)
            stack.extend(call_edges.get(g, ()))
        reach[k] = seen
    direct = {fn_key(f): (f.reads | f.writes) & storage for f in all_fns}
    access = {}
    for f in all_fns:
        k = fn_key(f)
        acc = set(direct[k])
        for g in reach[k]:
            acc |= direct.get(g, set())
        access[k] = acc
    variables = [v.name for v in unit.storage_vars()]
    return AccessGraph(unit, external, internal, variables, access, call_edges, reach, init)


# -- partition -------------------------------------------------------------


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller key wins so roots are deterministic
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass
class Facet:
    name: str
    external_functions: list[A.FuncDef]
    private_internal_functions: list[A.FuncDef]
    owned_state_vars: list[A.VarDecl]
    storage_namespace: str
    storage_layout: StorageLayout
    init_function: Optional[A.FuncDef] = None
    init_flag: Optional[str] = None

    @property
    def base_slot_hex(self) -> str:
        return slot_hex(diamond_storage_slot(self.storage_namespace))

    def selector_functions(self) -> list[A.FuncDef]:
        fns = list(self.external_functions)
        if self.init_function is not None:
            fns.append(self.init_function)
        return fns


@dataclass
class SharedLibrary:
    name: str
    internal_functions: list[A.FuncDef] = field(default_factory=list)


@dataclass
class FacetPlan:
    unit: A.SourceUnit
    facets: list[Facet]
    shared_library: SharedLibrary
    init_function: Optional[A.FuncDef] = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def facet(self, name: str) -> Facet:
        for f in self.facets:
            if f.name == name:
                return f
        raise KeyError(name)

    def facet_of_function(self, key: str) -> Optional[Facet]:
        for f in self.facets:
            if any(fn_key(g) == key for g in f.selector_functions() + f.private_internal_functions):
                return f
        return None

    def external_signatures(self) -> list[str]:
        return sorted(g.signature() for f in self.facets for g in f.selector_functions())

    def to_json(self) -> dict:
        return {
            "contract": self.unit.name,
            "facets": [
                {
                    "name": f.name,
                    "externalFunctions": [fn_key(g) for g in f.external_functions],
                    "privateInternalFunctions": [fn_key(g) for g in f.private_internal_functions],
                    "ownedStateVars": [v.name for v in f.owned_state_vars],
                    "storageNamespace": f.storage_namespace,
                    "baseSlot": f.base_slot_hex,
                    "initFunction": fn_key(f.init_function) if f.init_function else None,
                    "layout": serialize_layout(f.storage_layout),
                    "layoutFingerprint": "0x" + layout_fingerprint(f.storage_layout).hex(),
                }
                for f in self.facets
            ],
            "sharedLibrary": {
                "name": self.shared_library.name,
                "internalFunctions": [fn_key(g) for g in self.shared_library.internal_functions],
            },
            "diagnostics": [d.to_json() for d in self.diagnostics],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def name_facet(component: Iterable[A.FuncDef], taken: Optional[set[str]] = None) -> str:
    """Capitalized name of the component's first external function in source order, plus ``Facet``."""
    fns = sorted(component, key=_order)
    first = next((f for f in fns if not (f.synthesized and f.getter_of is None)), fns[0])
    base = first.name[:1].upper() + first.name[1:] + "Facet"
    name = base
    n = 2
    taken = taken if taken is not None else set()
    while name in taken:
        name = f"{base}{n}"
        n += 1
    taken.add(name)
    return name


def _components(graph: AccessGraph) -> list[list[str]]:
    """Node groups (function keys and variable names) after union-find."""
    ext_keys = [fn_key(f) for f in graph.external]
    reachable = set()
    for k in ext_keys:
        reachable |= graph.reach[k]
    if graph.init is not None:
        reachable |= graph.reach[INIT_KEY_OF(graph)]
    orphans = [fn_key(f) for f in graph.internal if fn_key(f) not in reachable]
    roots = ext_keys + orphans + ([INIT_KEY_OF(graph)] if graph.init else [])
    uf = _UnionFind(["f:" + k for k in roots] + ["v:" + v for v in graph.variables])
    ext_set = set(ext_keys)
    for k in roots:
        for v in graph.access[k]:
            uf.union("f:" + k, "v:" + v)
        for g in graph.reach[k]:
            if g in ext_set:
                uf.union("f:" + k, "f:" + g)
    groups: dict[str, list[str]] = {}
    for node in uf.parent:
        groups.setdefault(uf.find(node), []).append(node)
    return list(groups.values())


def INIT_KEY_OF(graph: AccessGraph) -> str:
    return fn_key(graph.init)


def partition_facets(graph: AccessGraph, config: Optional[FacetizerConfig] = None) -> FacetPlan:
    config = config or FacetizerConfig()
    unit = graph.unit
    diags: list[Diagnostic] = []
    var_decls = {v.name: v for v in unit.storage_vars()}
    ext_by_key = {fn_key(f): f for f in graph.external}
    init_key = INIT_KEY_OF(graph) if graph.init else None

    if not graph.external:
        diags.append(Diagnostic("EMPTY_CONTRACT", INFO,
                                f"contract '{unit.name}' has no external or public functions; no facets generated",
                                [unit.pos] if unit.pos else []))
        for v in unit.storage_vars():
            diags.append(Diagnostic("UNUSED_STATE_VAR", WARNING,
                                    f"state variable '{v.name}' is not placed in any facet", [v.pos]))
        return FacetPlan(unit, [], SharedLibrary(SHARED_LIBRARY_NAME, list(graph.internal)), graph.init, diags)

    # groups: list of (function keys, variable names)
    groups: list[tuple[list[str], list[str]]] = []
    for comp in _components(graph):
        fks = [n[2:] for n in comp if n.startswith("f:")]
        vs = [n[2:] for n in comp if n.startswith("v:")]
        groups.append((fks, vs))

    def ext_of(fks: list[str]) -> list[A.FuncDef]:
        return sorted((ext_by_key[k] for k in fks if k in ext_by_key), key=_order)

    facet_groups = [g for g in groups if ext_of(g[0])]
    loose = [g for g in groups if not ext_of(g[0])]
    facet_groups.sort(key=lambda g: _order(ext_of(g[0])[0]))

    # max-facets: merge the two smallest by function count, tie-break by name
    if config.max_facets is not None and config.max_facets >= 1:
        while len(facet_groups) > config.max_facets:
            ranked = sorted(facet_groups, key=lambda g: (len(ext_of(g[0])), name_facet(ext_of(g[0]))))
            a, b = ranked[0], ranked[1]
            merged = (a[0] + b[0], a[1] + b[1])
            facet_groups = [g for g in facet_groups if g is not a and g is not b] + [merged]
            facet_groups.sort(key=lambda g: _order(ext_of(g[0])[0]))

    # loose groups: variables with no external accessor attach to the first facet
    first = facet_groups[0]
    for fks, vs in loose:
        if vs:
            for v in vs:
                accessed = any(v in graph.access[k] for k in fks)
                why = "is accessed only by unreachable internal code" if accessed else "is accessed by no function"
                diags.append(Diagnostic("UNUSED_STATE_VAR", WARNING,
                                        f"state variable '{v}' {why}; attached to the first facet",
                                        [var_decls[v].pos] if var_decls[v].pos else []))
            first[0].extend(fks)
            first[1].extend(vs)
        # groups made only of pure unreachable internals fall through to library placement

    if config.facet_map:
        facet_groups, names = _apply_facet_map(graph, facet_groups, config.facet_map, ext_by_key, init_key)
    else:
        taken: set[str] = set()
        names = [name_facet(ext_of(g[0]), taken) for g in facet_groups]

    # internal function placement
    comp_of_root: dict[str, int] = {}
    for i, (fks, _) in enumerate(facet_groups):
        for k in fks:
            comp_of_root[k] = i
    internal_home: dict[str, set[int]] = {}
    for k, i in comp_of_root.items():
        for g in graph.reach.get(k, ()):
            if g in ext_by_key:
                continue
            internal_home.setdefault(g, set()).add(i)
    library: list[A.FuncDef] = []
    embedded: dict[int, list[A.FuncDef]] = {i: [] for i in range(len(facet_groups))}
    for f in graph.internal:
        k = fn_key(f)
        if k in comp_of_root:
            embedded[comp_of_root[k]].append(f)  # unreachable internal joined through its variables
            continue
        homes = internal_home.get(k, set())
        if len(homes) == 1:
            embedded[next(iter(homes))].append(f)
        else:
            library.append(f)

    facets: list[Facet] = []
    for i, ((fks, vs), name) in enumerate(zip(facet_groups, names)):
        owned = [v for v in unit.storage_vars() if v.name in set(vs)]
        init_fn = graph.init if init_key in fks else None
        ns = config.namespace_prefix + name
        layout_vars = list(owned)
        flag = None
        if init_fn is not None:
            flag = "_initialized"
            while flag in var_decls:
                flag = "_" + flag
            flag_decl = A.VarDecl(A.ElementaryType("bool"), flag)
            flag_decl.tdesc = elementary("bool")
            layout_vars.append(flag_decl)
        layout = compute_layout(layout_vars, table=unit.types, namespace=ns)
        facets.append(Facet(
            name=name,
            external_functions=ext_of(fks),
            private_internal_functions=sorted(embedded[i], key=_order),
            owned_state_vars=owned,
            storage_namespace=ns,
            storage_layout=layout,
            init_function=init_fn,
            init_flag=flag,
        ))
    library.sort(key=_order)
    return FacetPlan(unit, facets, SharedLibrary(SHARED_LIBRARY_NAME, library), graph.init, diags)


def _apply_facet_map(graph, facet_groups, facet_map, ext_by_key, init_key):
    """Re-group external functions per the override map and validate variable ownership."""
    def lookup(f: A.FuncDef) -> Optional[str]:
        return facet_map.get(f.signature()) or facet_map.get(fn_key(f)) or facet_map.get(f.name)

    known = {f.name for f in graph.external} | {f.signature() for f in graph.external}
    for k in facet_map:
        if k not in known:
            raise FacetMapError(f"facet map names unknown external function '{k}'")
    for target in set(facet_map.values()):
        if not target or not (target[0].isalpha() or target[0] == "_") or not target.replace("_", "a").isalnum():
            raise FacetMapError(f"invalid facet name '{target}'")

    taken: set[str] = set(facet_map.values())
    auto_names = []
    for fks, _ in facet_groups:
        exts = [ext_by_key[k] for k in fks if k in ext_by_key]
        unmapped = [f for f in exts if lookup(f) is None]
        auto_names.append(name_facet(unmapped, taken) if unmapped else None)
    assign: dict[str, str] = {}
    for (fks, _), auto in zip(facet_groups, auto_names):
        for k in fks:
            if k in ext_by_key:
                assign[k] = lookup(ext_by_key[k]) or auto
    # roots that are not external functions (init, orphan internals) follow their group's first function
    for (fks, _), auto in zip(facet_groups, auto_names):
        exts = sorted((ext_by_key[k] for k in fks if k in ext_by_key), key=_order)
        for k in fks:
            if k not in ext_by_key:
                assign[k] = assign[fn_key(exts[0])]

    order: list[str] = []
    for fk in sorted(assign, key=lambda k: _order(ext_by_key[k]) if k in ext_by_key else (10**9, 0)):
        if assign[fk] not in order:
            order.append(assign[fk])
    # variable ownership and cross-facet calls
    owners: dict[str, set[str]] = {}
    writers: dict[str, set[str]] = {}
    for k, facet in assign.items():
        f = graph.function(k)
        for v in graph.access[k]:
            owners.setdefault(v, set()).add(facet)
        writes = set(f.writes)
        for g in graph.reach[k]:
            writes |= graph.function(g).writes
        for v in writes & set(graph.variables):
            writers.setdefault(v, set()).add(facet)
        for g in graph.reach[k]:
            if g in assign and assign[g] != facet:
                raise FacetMapError(f"'{k}' in {facet} calls '{g}' in {assign[g]}; cross-facet internal calls are not supported")
    for v, facets in sorted(owners.items()):
        if len(facets) > 1:
            w = sorted(writers.get(v, ()))
            what = f"written by {', '.join(w)}" if len(w) > 1 else f"accessed by {', '.join(sorted(facets))}"
            raise FacetMapError(f"state variable '{v}' is {what}; each variable must live in exactly one facet")
    groups = []
    names = []
    all_vars = {v for _, vs in facet_groups for v in vs}
    placed: set[str] = set()
    for facet in order:
        fks = [k for k, f in assign.items() if f == facet]
        vs = sorted({v for v, fs in owners.items() if fs == {facet}})
        placed |= set(vs)
        groups.append((fks, vs))
        names.append(facet)
    # variables nobody accesses stay with the first facet
    leftover = sorted(all_vars - placed)
    if leftover:
        groups[0][1].extend(leftover)
    return groups, names


def facetize(unit: A.SourceUnit, config: Optional[FacetizerConfig] = None) -> FacetPlan:
    return partition_facets(build_access_graph(unit), config)
