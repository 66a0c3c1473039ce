"""Small shared helpers for the test modules."""

from seam.frontend import load
from seam.frontend.types import solc_label
from seam.layout import LayoutEngine, unit_layout


def _row(e, contract: str) -> dict:
    return {"label": e.label, "slot": e.slot, "offset": e.offset, "type": solc_label(e.type, contract)}


def layout_view(source: str) -> dict:
    """Root storage layout plus every struct's member layout, shaped like the reference-compiler goldens."""
    unit = load(source)
    engine = LayoutEngine(unit.types)
    structs = {}
    for name in unit.types.structs:
        members = engine.struct_entries(name)
        slots = max(1, max((m.slot + m.num_slots for m in members), default=0))
        structs[f"struct {unit.name}.{name}"] = {
            "numberOfBytes": 32 * slots,
            "members": [_row(m, unit.name) for m in members],
        }
    return {"storage": [_row(e, unit.name) for e in unit_layout(unit).entries], "structs": structs}
