"""The convert/analyze pipeline: source → facet plan → diagnostics → bundle + manifest."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .codegen import generate_bundle
from .codegen.generate import GeneratedBundle
from .diagnostics import Diagnostic, SeamError, has_errors, sort_diagnostics
from .facetizer import FacetizerConfig, FacetPlan, facetize
from .frontend import load
from .frontend import ast as A
from .security import (
    RenameSuggestion,
    analyze,
    apply_array_to_mapping_transform,
    apply_selector_renames,
    build_selector_table,
    suggest_all_fixes,
    transformable_arrays,
)


@dataclass
class ConvertResult:
    unit: Optional[A.SourceUnit] = None
    plan: Optional[FacetPlan] = None
    diagnostics: list[Diagnostic] = field(default_factory=list)
    bundle: Optional[GeneratedBundle] = None
    renames: list[RenameSuggestion] = field(default_factory=list)
    transformed: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not has_errors(self.diagnostics)

    @property
    def manifest(self) -> Optional[dict]:
        return self.bundle.manifest if self.bundle else None


def _analyze_unit(unit: A.SourceUnit, config: Optional[FacetizerConfig]) -> tuple[FacetPlan, list[Diagnostic]]:
    plan = facetize(unit, config)
    _, diags = analyze(plan)
    return plan, list(plan.diagnostics) + diags


def apply_fixes(unit: A.SourceUnit, config: Optional[FacetizerConfig] = None
                ) -> tuple[A.SourceUnit, list[RenameSuggestion], list[str]]:
    """Apply every automatic remediation: clash renames, then array→mapping for flagged arrays."""
    plan = facetize(unit, config)
    renames = suggest_all_fixes(build_selector_table(plan))
    if renames:
        unit = apply_selector_renames(unit, renames)
    transformed = []
    for name in transformable_arrays(unit):
        unit = apply_array_to_mapping_transform(unit, name)
        transformed.append(name)
    return unit, renames, transformed


def run_analysis(source: str, config: Optional[FacetizerConfig] = None, *, fixes: bool = False) -> ConvertResult:
    """Front half of the pipeline: everything except code generation."""
    result = ConvertResult()
    try:
        unit = load(source)
        if fixes:
            unit, result.renames, result.transformed = apply_fixes(unit, config)
        result.unit = unit
        result.plan, result.diagnostics = _analyze_unit(unit, config)
    except SeamError as exc:
        result.diagnostics.append(exc.to_diagnostic())
    result.diagnostics = sort_diagnostics(result.diagnostics)
    return result


def convert(source: str, config: Optional[FacetizerConfig] = None, *, fixes: bool = False,
            version: int = 1, force: bool = False) -> ConvertResult:
    """Full pipeline; the bundle is generated only when no error diagnostics remain, unless ``force``.

    ``force`` cannot help when the source did not parse: there is no plan to generate from.
    """
    result = run_analysis(source, config, fixes=fixes)
    if (result.ok or force) and result.plan is not None:
        try:
            result.bundle = generate_bundle(result.plan, version)
        except SeamError as exc:
            result.diagnostics.append(exc.to_diagnostic())
    return result
