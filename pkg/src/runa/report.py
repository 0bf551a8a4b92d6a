"""Evaluation report assembly and serialization.

The machine-readable report is a key=value sectioned text document whose
bytes are fully determined by the inputs; wall-clock runtime and the
timestamp go to a separate ``.meta`` sidecar so repeated runs stay
byte-identical. Floats are serialized with repr (shortest round-trip).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path


@dataclass
class ScoredRecord:
    record_id: str
    truth: str
    pred_label: str
    sigma: float


@dataclass
class EvalReport:
    method: str
    lam: float
    tau: float | None
    shots: int | None
    tpr: float
    gamma: float
    gamma_source: str  # "calibrated" or "provided"
    fpr95: float
    auroc: float
    records: list[ScoredRecord]
    config: dict = field(default_factory=dict)
    runtime_s: float = 0.0

    def __post_init__(self):
        for name in ("fpr95", "auroc"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    @property
    def n_id(self) -> int:
        return sum(1 for r in self.records if r.truth == "ID")

    @property
    def n_ood(self) -> int:
        return len(self.records) - self.n_id

    def to_text(self) -> str:
        lines = [
            "[run]",
            f"records={len(self.records)}",
            f"id_records={self.n_id}",
            f"ood_records={self.n_ood}",
            f"tpr={self.tpr!r}",
            f"gamma_source={self.gamma_source}",
            f"[method:{self.method}]",
            f"lambda={self.lam!r}",
            f"tau={'' if self.tau is None else repr(self.tau)}",
            f"shots={'' if self.shots is None else self.shots}",
            f"gamma={self.gamma!r}",
            f"fpr95={self.fpr95!r}",
            f"auroc={self.auroc!r}",
            "[config]",
        ]
        for key in sorted(self.config):
            lines.append(f"{key}={self.config[key]}")
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        head = f"{'method':<12} {'lambda':>7} {'tau':>7} {'gamma':>12} {'FPR95':>8} {'AUROC':>8} {'n':>6}"
        tau = "-" if self.tau is None else f"{self.tau:g}"
        row = (
            f"{self.method:<12} {self.lam:>7.3f} {tau:>7} {self.gamma:>12.6f} "
            f"{100 * self.fpr95:>7.2f}% {100 * self.auroc:>7.2f}% {len(self.records):>6}"
        )
        return head + "\n" + row

    def write(self, out_path: str | Path) -> None:
        out_path = Path(out_path)
        out_path.write_text(self.to_text(), encoding="utf-8")
        meta = (
            f"runtime_s={self.runtime_s!r}\n"
            f"written_at={datetime.now(timezone.utc).isoformat()}\n"
        )
        out_path.with_suffix(out_path.suffix + ".meta").write_text(meta, encoding="utf-8")

    def write_scores(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["record_id", "truth", "pred_label", "sigma"])
            for rec in self.records:
                writer.writerow([rec.record_id, rec.truth, rec.pred_label, repr(rec.sigma)])


def read_scores(path: str | Path) -> list[ScoredRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["record_id", "truth", "pred_label", "sigma"]:
            raise ValueError(f"{path}: unexpected scores header {header!r}")
        return [
            ScoredRecord(record_id=r[0], truth=r[1], pred_label=r[2], sigma=float(r[3]))
            for r in reader
            if r
        ]
