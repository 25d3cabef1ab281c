"""Deterministic map generation from a string seed.

All randomness in the engine flows through the two primitives here: an
FNV-1a hash that turns the seed string into a 64-bit PRNG state, and an
xorshift64* step. Both are bit-exact across platforms, so a seed string
always produces the same map everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1
_XORSHIFT_MULT = 2685821657736338717
_SPAN = 1 << 64

# A PRNG state is a plain nonzero 64-bit int.


def hash_seed(seed: str) -> int:
    """FNV-1a over the UTF-8 bytes of `seed`; a zero result is remapped."""
    h = _FNV_OFFSET
    for byte in seed.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h if h != 0 else _FNV_OFFSET


def next_random(state: int) -> tuple[int, int]:
    """One xorshift64* step: returns (next_state, 64-bit value)."""
    if not 0 < state <= _MASK64:
        raise ValueError("PRNG state must be a nonzero 64-bit integer")
    x = state
    x ^= x >> 12
    x = (x ^ (x << 25)) & _MASK64
    x ^= x >> 27
    return x, (x * _XORSHIFT_MULT) & _MASK64


@dataclass(frozen=True)
class CellSpec:
    """One map cell: a base block plus up to three overlay layers."""

    block: str
    overlays: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.overlays) > 3:
            raise ValueError("a cell holds at most 3 overlays")


@dataclass
class SceneMap:
    rows: int
    cols: int
    seed: str
    cells: list[list[CellSpec]]

    def cell(self, row: int, col: int) -> CellSpec:
        return self.cells[row][col]


@dataclass(frozen=True)
class Palette:
    """Weight table for the per-cell draws.

    Block weights pick the base sprite; each of the three overlay slots
    fills with its slot probability, and a filled slot picks an overlay
    by the overlay weights.
    """

    blocks: Mapping[str, float]
    overlays: Mapping[str, float] = field(default_factory=dict)
    slot_probs: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("palette has no blocks")
        if any(w < 0 for w in self.blocks.values()) or any(
            w < 0 for w in self.overlays.values()
        ):
            raise ValueError("palette weights must be nonnegative")
        if not any(w > 0 for w in self.blocks.values()):
            raise ValueError("palette needs at least one positive block weight")
        if len(self.slot_probs) != 3:
            raise ValueError("palette needs exactly 3 overlay slot probabilities")
        if any(not 0.0 <= p <= 1.0 for p in self.slot_probs):
            raise ValueError("overlay slot probabilities must lie in [0, 1]")
        if any(p > 0 for p in self.slot_probs) and not any(
            w > 0 for w in self.overlays.values()
        ):
            raise ValueError("positive slot probability needs a positive overlay weight")


def default_palette() -> Palette:
    return Palette(
        blocks={"grass": 3.0, "dirt": 1.0, "stone": 1.0},
        overlays={"bush": 3.0, "tree": 2.0},
        slot_probs=(0.30, 0.12, 0.04),
    )


def palette_from_json(text: str) -> Palette:
    data = json.loads(text)
    probs = data.get("slot_probs", data.get("overlay_prob", 0.0))
    if isinstance(probs, (int, float)):
        probs = [probs] * 3
    return Palette(
        blocks=dict(data.get("blocks", {})),
        overlays=dict(data.get("overlays", {})),
        slot_probs=tuple(float(p) for p in probs),
    )


def load_palette(path) -> Palette:
    with open(path, "r", encoding="utf-8") as fh:
        return palette_from_json(fh.read())


def _cumulative_cuts(weights: Sequence[float]) -> list[Fraction]:
    """Exact cumulative fractions of the total weight, last one == 1."""
    fracs = [Fraction(w) for w in weights]
    total = sum(fracs)
    if total <= 0:
        raise ValueError("all weights are zero")
    acc = Fraction(0)
    cuts = []
    for f in fracs:
        acc += f
        cuts.append(acc / total)
    return cuts


def _thresholds(cuts: Sequence[Fraction], span: int) -> list[int]:
    # floor(span * cut) as exact integers; comparisons against draws stay
    # in integer space so there is no floating-point platform drift.
    return [(span * c.numerator) // c.denominator for c in cuts]


def _pick(thresholds: Sequence[int], names: Sequence[str], value: int) -> str:
    for cut, name in zip(thresholds, names):
        if value < cut:
            return name
    return names[-1]


def generate_map(seed: str, rows: int, cols: int, palette: Palette | None = None) -> SceneMap:
    """Generate a SceneMap deterministically from a seed string.

    Exactly 4 PRNG draws are consumed per cell (1 block pick + 3 overlay
    slot decisions) in row-major order, regardless of outcome. A filled
    slot derives its overlay pick from the same draw that filled it, so
    editing weights never shifts the draw stream. Consequences: adding
    rows leaves all existing cells unchanged, and any two maps share the
    cells of their common row-major flat prefix.
    """
    if rows < 1 or cols < 1:
        raise ValueError("map must be at least 1x1")
    palette = palette or default_palette()

    block_names = list(palette.blocks.keys())
    block_thresholds = _thresholds(_cumulative_cuts(list(palette.blocks.values())), _SPAN)

    overlay_names = list(palette.overlays.keys())
    overlay_cuts = (
        _cumulative_cuts(list(palette.overlays.values())) if overlay_names else []
    )
    slot_spans = [
        (_SPAN * Fraction(p).numerator) // Fraction(p).denominator
        for p in palette.slot_probs
    ]
    # Overlay thresholds nest inside each slot's fill interval [0, slot_span).
    slot_overlay_thresholds = [
        _thresholds(overlay_cuts, span) if span > 0 else [] for span in slot_spans
    ]

    state = hash_seed(seed)
    grid: list[list[CellSpec]] = []
    for _ in range(rows):
        row_cells = []
        for _ in range(cols):
            state, draw = next_random(state)
            block = _pick(block_thresholds, block_names, draw)
            overlays = []
            for slot in range(3):
                state, draw = next_random(state)
                if draw < slot_spans[slot]:
                    overlays.append(
                        _pick(slot_overlay_thresholds[slot], overlay_names, draw)
                    )
            row_cells.append(CellSpec(block, tuple(overlays)))
        grid.append(row_cells)
    return SceneMap(rows=rows, cols=cols, seed=seed, cells=grid)


def scenemap_to_json(scene_map: SceneMap) -> str:
    payload = {
        "seed": scene_map.seed,
        "rows": scene_map.rows,
        "cols": scene_map.cols,
        "cells": [
            [{"b": cell.block, "o": list(cell.overlays)} for cell in row]
            for row in scene_map.cells
        ],
    }
    return json.dumps(payload, separators=(",", ":"))


def scenemap_from_json(text: str) -> SceneMap:
    data = json.loads(text)
    cells = [
        [CellSpec(cell["b"], tuple(cell["o"])) for cell in row]
        for row in data["cells"]
    ]
    scene_map = SceneMap(
        rows=int(data["rows"]), cols=int(data["cols"]), seed=data.get("seed", ""), cells=cells
    )
    if len(cells) != scene_map.rows or any(len(r) != scene_map.cols for r in cells):
        raise ValueError("scene map grid does not match rows/cols")
    return scene_map


def save_scenemap(scene_map: SceneMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scenemap_to_json(scene_map))
        fh.write("\n")


def load_scenemap(path) -> SceneMap:
    with open(path, "r", encoding="utf-8") as fh:
        return scenemap_from_json(fh.read())
