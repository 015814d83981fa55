"""Per-class ranking of prompt weights.

A fitted mapping assigns each (prompt, class) pair a signed weight; sorting
a class's column surfaces which generic prompts the class leans on. Raw
signed weights are ranked (no absolute value): a class whose strongest
weight is not positive has no prompt speaking for it, and the report flags
it as a low-confidence explanation instead of dressing up contra-evidence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .sim_mapper import MappingModel


@dataclass(frozen=True)
class ExplanationEntry:
    prompt_index: int
    prompt_name: str | None
    weight: float


@dataclass(frozen=True)
class ClassExplanation:
    """The top-k prompts for one class, sorted by descending weight."""

    class_index: int
    class_name: str | None
    entries: tuple[ExplanationEntry, ...]
    top_k: int

    def __post_init__(self):
        weights = [e.weight for e in self.entries]
        if weights != sorted(weights, reverse=True):
            raise ValueError("entries must be sorted by descending weight")

    @property
    def low_confidence(self) -> bool:
        """True when not even the best prompt has positive weight."""
        return not self.entries or self.entries[0].weight <= 0


def explain(
    model: MappingModel,
    top_k: int = 4,
    class_names: list[str] | None = None,
) -> list[ClassExplanation]:
    """Rank prompts by weight for every class.

    Returns min(top_k, K) entries per class; equal weights rank by lower
    prompt index.
    """
    if top_k < 1:
        raise ValueError(f"top_k must be at least 1, got {top_k}")
    num_prompts = model.weights.shape[0]
    keep = min(top_k, num_prompts)
    explanations = []
    for c in range(model.num_classes):
        column = model.weights[:, c]
        # stable sort on the negated column keeps ties in index order
        order = np.argsort(-column, kind="stable")[:keep]
        entries = tuple(
            ExplanationEntry(
                prompt_index=int(k),
                prompt_name=model.prompt_names[k] if model.prompt_names else None,
                weight=float(column[k]),
            )
            for k in order
        )
        explanations.append(
            ClassExplanation(
                class_index=c,
                class_name=class_names[c] if class_names else None,
                entries=entries,
                top_k=top_k,
            )
        )
    return explanations


def _bar(proportion: float, width: int = 24) -> str:
    filled = max(0, min(width, round(proportion * width)))
    return "#" * filled


def render_explanations(explanations: list[ClassExplanation], format: str = "markdown") -> str:
    """Render explanations as markdown or json.

    Markdown shows each entry's weight alongside a bar whose length is the
    weight divided by the class's maximum weight, so bars are proportional
    within a class. Classes whose maximum weight is not positive are
    flagged; their proportions are still reported against the absolute
    maximum so the layout stays readable.
    """
    if not explanations:
        raise ValueError("no explanations to render")
    if format == "json":
        payload = [
            {
                "class_index": e.class_index,
                "class_name": e.class_name,
                "low_confidence": e.low_confidence,
                "entries": [
                    {
                        "prompt_index": entry.prompt_index,
                        "prompt_name": entry.prompt_name,
                        "weight": entry.weight,
                    }
                    for entry in e.entries
                ],
            }
            for e in explanations
        ]
        return json.dumps(payload, indent=2) + "\n"
    if format != "markdown":
        raise ValueError(f"unknown explanation format {format!r}")

    lines = []
    for e in explanations:
        title = f"class {e.class_index}"
        if e.class_name:
            title += f" ({e.class_name})"
        lines.append(f"## {title}")
        if e.low_confidence:
            lines.append(
                "_low-confidence explanation: no prompt carries positive weight_"
            )
        top = e.entries[0].weight
        scale = abs(top) if top != 0 else 1.0
        for entry in e.entries:
            label = entry.prompt_name or f"prompt {entry.prompt_index}"
            proportion = entry.weight / scale
            lines.append(
                f"- {label}: weight {entry.weight:+.4f}, "
                f"proportion {proportion:.2f} {_bar(proportion)}"
            )
        lines.append("")
    return "\n".join(lines)
