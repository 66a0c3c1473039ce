"""Random single-contract generator with an explicit access/call model.

Every generated function's storage accesses and calls are recorded next to the
source text, so tests can check the facet partition against a brute-force
model that never looks at the parser or the union-find.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from seam.facetizer import facetize
from seam.frontend import load


@dataclass
class GenFunction:
    name: str
    visibility: str  # external | public | internal
    accesses: set[str] = field(default_factory=set)
    calls: list[str] = field(default_factory=list)

    @property
    def is_external(self) -> bool:
        return self.visibility in ("external", "public")


@dataclass
class GenContract:
    name: str
    variables: list[str]
    mapping_vars: set[str]
    initialized: set[str]
    functions: list[GenFunction]  # in source order
    source: str

    def function(self, name: str) -> GenFunction:
        return next(f for f in self.functions if f.name == name)

    @property
    def externals(self) -> list[GenFunction]:
        return [f for f in self.functions if f.is_external]

    @property
    def internals(self) -> list[GenFunction]:
        return [f for f in self.functions if not f.is_external]


def _access_stmt(var: str, is_mapping: bool, rng: random.Random) -> str:
    if is_mapping:
        return rng.choice([f"{var}[x] = x;", f"x = x + {var}[x];", f"{var}[x] += 1;"])
    return rng.choice([f"{var} += x;", f"x = x + {var};", f"{var} = x;"])


def generate(seed: int) -> GenContract:
    rng = random.Random(seed)
    n_vars = rng.randint(0, 7)
    n_pub = rng.randint(1, 6)
    n_int = rng.randint(0, 6)
    variables = [f"v{i}" for i in range(n_vars)]
    mapping_vars = {v for v in variables if rng.random() < 0.3}
    initialized = {v for v in variables if v not in mapping_vars and rng.random() < 0.15}

    internals = [GenFunction(f"h{i}", "internal") for i in range(n_int)]
    pubs = [GenFunction(f"f{i}", rng.choice(["external", "public"])) for i in range(n_pub)]
    callable_pubs = [f for f in pubs if f.visibility == "public"]

    for i, f in enumerate(internals):
        # pure helpers (no accesses) are common so the shared library gets exercised
        if variables and rng.random() < 0.6:
            f.accesses = set(rng.sample(variables, rng.randint(1, min(2, n_vars))))
        # internal → lower-numbered internal only: an acyclic call graph
        if i and rng.random() < 0.4:
            f.calls = sorted(set(rng.sample([g.name for g in internals[:i]], rng.randint(1, min(2, i)))))
    for i, f in enumerate(pubs):
        if variables and rng.random() < 0.75:
            f.accesses = set(rng.sample(variables, rng.randint(1, min(3, n_vars))))
        targets = [g.name for g in internals]
        if rng.random() < 0.2:
            targets += [g.name for g in callable_pubs if g.name != f.name and int(g.name[1:]) < i]
        if targets and rng.random() < 0.6:
            f.calls = sorted(set(rng.sample(targets, rng.randint(1, min(2, len(targets))))))

    functions = internals + pubs
    rng.shuffle(functions)  # interleave helpers and entry points in source order

    lines = ["// SPDX-License-Identifier: MIT", "pragma solidity ^0.8.20;", "", f"contract G{seed} {{"]
    for v in variables:
        if v in mapping_vars:
            lines.append(f"    mapping(uint256 => uint256) {v};")
        elif v in initialized:
            lines.append(f"    uint256 {v} = {rng.randint(1, 99)};")
        else:
            lines.append(f"    uint256 {v};")
    for f in functions:
        lines.append("")
        lines.append(f"    function {f.name}(uint256 x) {f.visibility} returns (uint256) {{")
        for v in sorted(f.accesses):
            lines.append("        " + _access_stmt(v, v in mapping_vars, rng))
        for g in f.calls:
            lines.append(f"        x = x + {g}(x);")
        lines.append("        return x;")
        lines.append("    }")
    lines.append("}")
    return GenContract(f"G{seed}", variables, mapping_vars, initialized, functions, "\n".join(lines) + "\n")


# -- brute-force partition model ---------------------------------------------

INIT = "<init>"


def reach(c: GenContract, name: str) -> set[str]:
    """Every function transitively called by ``name`` (depth-first, no shared machinery)."""
    calls = {f.name: f.calls for f in c.functions}
    calls[INIT] = []
    seen: set[str] = set()
    stack = list(calls[name])
    while stack:
        g = stack.pop()
        if g not in seen:
            seen.add(g)
            stack.extend(calls[g])
    return seen


def expected_partition(c: GenContract) -> tuple[list[set[str]], dict[str, int | None], dict[str, int]]:
    """(external-function groups, internal → group index or None for the shared library, var → group).

    Groups are ordered by the source position of their first external function.
    """
    access = {f.name: set(f.accesses) for f in c.functions}
    if c.initialized:
        access[INIT] = set(c.initialized)
    closure = {k: set(v) for k, v in access.items()}
    for k in list(access):
        for g in reach(c, k):
            closure[k] |= access[g]
    ext_names = [f.name for f in c.externals]
    reachable: set[str] = set()
    for k in ext_names + ([INIT] if c.initialized else []):
        reachable |= reach(c, k)
    orphans = [f.name for f in c.internals if f.name not in reachable]
    roots = ext_names + orphans + ([INIT] if c.initialized else [])

    # breadth-first connected components over roots and variables
    adj: dict[str, set[str]] = {("f", r): set() for r in roots} | {("v", v): set() for v in c.variables}
    for r in roots:
        for v in closure[r]:
            adj[("f", r)].add(("v", v))
            adj[("v", v)].add(("f", r))
        for g in reach(c, r):
            if g in ext_names:
                adj[("f", r)].add(("f", g))
                adj[("f", g)].add(("f", r))
    comps: list[set] = []
    seen: set = set()
    for node in adj:
        if node in seen:
            continue
        comp, queue = set(), [node]
        while queue:
            n = queue.pop()
            if n in comp:
                continue
            comp.add(n)
            queue.extend(adj[n] - comp)
        seen |= comp
        comps.append(comp)

    order = {f.name: i for i, f in enumerate(c.functions)}
    facet_comps = [x for x in comps if any(k == "f" and n in ext_names for k, n in x)]
    facet_comps.sort(key=lambda x: min(order[n] for k, n in x if k == "f" and n in ext_names))
    for x in comps:
        if x not in facet_comps and any(k == "v" for k, _ in x):
            facet_comps[0] |= x  # loose variables (and their orphan accessors) join the first facet

    root_group = {n: i for i, x in enumerate(facet_comps) for k, n in x if k == "f"}
    var_group = {n: i for i, x in enumerate(facet_comps) for k, n in x if k == "v"}
    placement: dict[str, int | None] = {}
    for f in c.internals:
        if f.name in root_group:
            placement[f.name] = root_group[f.name]
            continue
        homes = {root_group[r] for r in root_group if f.name in reach(c, r)}
        placement[f.name] = next(iter(homes)) if len(homes) == 1 else None
    groups = [{n for k, n in x if k == "f" and n in ext_names} for x in facet_comps]
    return groups, placement, var_group


def check_partition(seed: int) -> None:
    c = generate(seed)
    unit = load(c.source)
    plan = facetize(unit)
    groups, placement, var_group = expected_partition(c)

    # external functions: disjoint and exhaustive, grouped as the brute-force model says
    placed = Counter(f.name for facet in plan.facets for f in facet.external_functions)
    assert placed == Counter(f.name for f in c.externals)
    assert [{f.name for f in facet.external_functions} for facet in plan.facets] == groups

    # state variables: disjoint and exhaustive
    owned = Counter(v.name for facet in plan.facets for v in facet.owned_state_vars)
    assert owned == Counter(c.variables)
    assert {v.name: i for i, facet in enumerate(plan.facets) for v in facet.owned_state_vars} == var_group

    # internal functions: exactly one home, matching reachability
    lib = {f.name for f in plan.shared_library.internal_functions}
    for f in c.internals:
        homes = [i for i, facet in enumerate(plan.facets)
                 if f.name in {g.name for g in facet.private_internal_functions}]
        if placement[f.name] is None:
            assert f.name in lib and homes == [], (seed, f.name)
        else:
            assert homes == [placement[f.name]] and f.name not in lib, (seed, f.name)

    # determinism: a fresh parse serializes byte-identically
    assert facetize(load(c.source)).serialize() == plan.serialize()
