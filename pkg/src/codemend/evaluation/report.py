"""Evaluation report container with JSON / table / CSV renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class MetricsReport:
    """All metric values for one evaluation run; plain serializable data."""

    detection: dict = field(default_factory=dict)       # {"f1":..., "fpr":...}
    localization: dict = field(default_factory=dict)    # {"mrr":{k:...}, "map":{...}, "fpr":{...}}
    repair: dict = field(default_factory=dict)          # {"em":..., "bleu":...}
    end_to_end: dict = field(default_factory=dict)      # {"bl":..., "pr":..., counts...}
    per_pattern: dict = field(default_factory=dict)     # pattern name -> f1 | None
    counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def keyed(d):
            return {
                k: (keyed(v) if isinstance(v, dict) else v)
                for k, v in ((str(k), v) for k, v in d.items())
            }

        return {
            "detection": keyed(self.detection),
            "localization": keyed(self.localization),
            "repair": keyed(self.repair),
            "end_to_end": keyed(self.end_to_end),
            "per_pattern": keyed(self.per_pattern),
            "counts": keyed(self.counts),
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        return cls(
            detection=data.get("detection", {}),
            localization=data.get("localization", {}),
            repair=data.get("repair", {}),
            end_to_end=data.get("end_to_end", {}),
            per_pattern=data.get("per_pattern", {}),
            counts=data.get("counts", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        return cls.from_dict(json.loads(text))

    # ---------------- renderings ----------------

    def render_table(self) -> str:
        def fmt(v):
            if v is None:
                return "null"
            return f"{v:.4f}" if isinstance(v, float) else str(v)

        lines = ["== detection =="]
        lines.append(f"  F1   {fmt(self.detection.get('f1'))}")
        lines.append(f"  FPR  {fmt(self.detection.get('fpr'))}")
        if self.localization:
            lines.append("== localization ==")
            ks = sorted(self.localization.get("mrr", {}), key=lambda s: int(s) if str(s).isdigit() else s)
            for metric in ("mrr", "map", "fpr"):
                row = "  ".join(
                    f"{metric.upper()}@{k}={fmt(self.localization[metric][k])}" for k in ks
                )
                lines.append(f"  {row}")
        if self.repair:
            lines.append("== repair ==")
            lines.append(f"  EM    {fmt(self.repair.get('em'))}")
            lines.append(f"  BLEU  {fmt(self.repair.get('bleu'))}")
        if self.end_to_end:
            lines.append("== end-to-end (detect -> localize -> repair) ==")
            lines.append(f"  BL  {fmt(self.end_to_end.get('bl'))}")
            lines.append(f"  PR  {fmt(self.end_to_end.get('pr'))}")
            for key in ("n_detected", "n_detected_buggy", "n_false_positives"):
                if key in self.end_to_end:
                    lines.append(f"  {key}  {self.end_to_end[key]}")
        if self.per_pattern:
            lines.append("== per-pattern detection F1 ==")
            for name in sorted(self.per_pattern):
                lines.append(f"  {name:30s} {fmt(self.per_pattern[name])}")
        return "\n".join(lines)

    def per_pattern_csv(self) -> str:
        rows = ["pattern,f1"]
        for name in sorted(self.per_pattern):
            v = self.per_pattern[name]
            rows.append(f"{name},{'' if v is None else f'{v:.6f}'}")
        return "\n".join(rows) + "\n"
