"""Command-line harness.

Subcommands: synth, encode-toy, score, calibrate, eval, finetune.
Exit codes: 0 success, 2 usage, 3 data/format error, 4 numeric failure.
RUNA_THREADS caps the number of scoring worker threads; results are
reduced in input order regardless of worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import interchange
from .concept_bank import DEFAULT_TEMPLATE, ConceptBank, build_bank, load_bank, save_bank
from .errors import BadConfig, DataError, FormatError, NoIDRecords, NumericError, SplitOverlap
from .interchange import (
    DetectionRecord,
    EmbeddingTable,
    check_labels_known,
    read_detections,
    write_detections,
    write_embeddings,
)
from .metrics import auroc, calibrate_threshold, fpr_at_tpr
from .raster import BBox, background_blur, crop, read_ppm
from .report import EvalReport, ScoredRecord, read_scores
from .scoring import (
    FusionConfig,
    ProjectionLayer,
    ScoreMethod,
    fuse,
    project,
    score_sims,
    similarities,
)
from .synthetic import SynthConfig, generate_synthetic
from .toy_encoder import ToyEncoderConfig, ToyImageEncoder, ToyTextEncoder
from .training import FewShotConfig, LabeledShot, TrainConfig, sample_few_shot, train

DEFAULT_WORKERS = 4


def scoring_workers() -> int:
    workers = min(DEFAULT_WORKERS, os.cpu_count() or 1)
    cap = os.environ.get("RUNA_THREADS")
    if cap is not None:
        try:
            cap_n = int(cap)
        except ValueError:
            raise BadConfig(f"RUNA_THREADS must be an integer, got {cap!r}") from None
        if cap_n < 1:
            raise BadConfig(f"RUNA_THREADS must be >= 1, got {cap_n}")
        workers = min(workers, cap_n)
    return workers


def _score_records(
    detections: list[DetectionRecord],
    table: EmbeddingTable,
    bank: ConceptBank,
    projection: ProjectionLayer,
    fusion: FusionConfig,
    method: ScoreMethod,
    tau: float | None,
) -> list[ScoredRecord]:
    """Score every detection in input order from precomputed embeddings."""
    check_labels_known(detections, bank.labels)

    def one(item: tuple[int, DetectionRecord]) -> ScoredRecord:
        row, rec = item
        rid = interchange.record_id(rec, row)
        pair = (table.get(f"{rid}.global"), table.get(f"{rid}.regional"))
        for vec in pair:
            if vec.shape[0] != bank.dim:
                raise FormatError(
                    f"record {rid}: embedding dim {vec.shape[0]} != bank dim {bank.dim}"
                )
        fused = fuse(pair[0], pair[1], fusion)
        sims = similarities(project(projection, fused), bank)
        return ScoredRecord(
            record_id=rid,
            truth=rec.truth,
            pred_label=rec.pred_label,
            sigma=score_sims(sims, method, tau),
        )

    items = list(enumerate(detections))
    workers = scoring_workers()
    if workers > 1 and len(items) > 64:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, items))
    return [one(item) for item in items]


def _load_projection_arg(path: str | None, dim: int) -> ProjectionLayer:
    if path is None:
        return ProjectionLayer.identity(dim)
    return ProjectionLayer(weight=interchange.load_projection(path))


def _method_args(args) -> tuple[ScoreMethod, float | None]:
    method = ScoreMethod(args.method)
    tau = args.tau if method is ScoreMethod.MCM else None
    return method, tau


def _build_report(
    scored: list[ScoredRecord],
    args,
    gamma: float | None,
    shots: int | None = None,
    config: dict | None = None,
    runtime_s: float = 0.0,
) -> EvalReport:
    id_scores = [r.sigma for r in scored if r.truth == "ID"]
    ood_scores = [r.sigma for r in scored if r.truth == "OOD"]
    if gamma is None:
        if not id_scores:
            raise NoIDRecords("threshold calibration needs at least one ID record")
        gamma_value = calibrate_threshold(id_scores, args.tpr)
        gamma_source = "calibrated"
    else:
        gamma_value = gamma
        gamma_source = "provided"
    method, tau = _method_args(args)
    return EvalReport(
        method=method.value,
        lam=args.lam,
        tau=tau,
        shots=shots,
        tpr=args.tpr,
        gamma=gamma_value,
        gamma_source=gamma_source,
        fpr95=fpr_at_tpr(id_scores, ood_scores, args.tpr),
        auroc=auroc(id_scores, ood_scores),
        records=scored,
        config=config or {},
        runtime_s=runtime_s,
    )


def _config_echo(args, keys) -> dict:
    return {k: str(getattr(args, k)) for k in keys if getattr(args, k, None) is not None}


# --- subcommands ------------------------------------------------------------

def cmd_synth(args) -> int:
    cfg = SynthConfig(
        classes=args.classes,
        dim=args.dim,
        n_id=args.n_id,
        n_ood=args.n_ood,
        align_noise_deg=args.align_noise,
        spread=args.spread,
        concept_margin=args.concept_margin,
        rotation_misalignment_deg=args.rotation_misalignment,
        scene_align_deg=args.scene_align,
        ood_regional_from_id=args.ood_regional_from_id,
        n_train_per_class=args.n_train_per_class,
        seed=args.seed,
    )
    bank, train_pool, records = generate_synthetic(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    save_bank(bank, out / "bank.tsv")

    eval_dets, eval_embs = [], []
    box = BBox(0, 0, 1, 1)
    for row, rec in enumerate(records):
        det = DetectionRecord(
            image_id=rec.record_id,
            box=box,
            pred_label=rec.pred_label,
            truth=rec.truth,
            truth_label=rec.truth_label,
        )
        eval_dets.append(det)
        rid = interchange.record_id(det, row)
        eval_embs.append((f"{rid}.global", rec.global_emb))
        eval_embs.append((f"{rid}.regional", rec.regional_emb))
    write_detections(out / "eval.csv", eval_dets)
    write_embeddings(out / "eval.tsv", eval_embs)

    train_dets, train_embs = [], []
    for row, shot in enumerate(train_pool):
        label = bank.labels[shot.label]
        det = DetectionRecord(
            image_id=f"shot{row:06d}",
            box=box,
            pred_label=label,
            truth="ID",
            truth_label=label,
        )
        train_dets.append(det)
        rid = interchange.record_id(det, row)
        train_embs.append((f"{rid}.regional", shot.embedding))
    write_detections(out / "train.csv", train_dets)
    write_embeddings(out / "train.tsv", train_embs)

    (out / "synth.json").write_text(
        json.dumps({k: getattr(cfg, k) for k in cfg.__dataclass_fields__}, indent=2, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
    print(f"wrote bank ({bank.size} concepts), {len(records)} eval records, "
          f"{len(train_pool)} train shots to {out}")
    return 0


def cmd_encode_toy(args) -> int:
    detections = read_detections(args.detections)
    cfg = ToyEncoderConfig(dim=args.dim, seed=args.seed)
    image_encoder = ToyImageEncoder(cfg)
    images_dir = Path(args.images_dir)

    rasters: dict[str, object] = {}
    records = []
    for row, rec in enumerate(detections):
        if rec.image_id not in rasters:
            ppm_path = images_dir / f"{rec.image_id}.ppm"
            if not ppm_path.exists():
                raise DataError(f"image not found: {ppm_path}")
            rasters[rec.image_id] = read_ppm(ppm_path.read_bytes())
        img = rasters[rec.image_id]
        rec.box.check_within(img)
        rid = interchange.record_id(rec, row)
        regional = image_encoder.encode(crop(img, rec.box))
        global_emb = image_encoder.encode(background_blur(img, rec.box, args.radius))
        records.append((f"{rid}.global", global_emb))
        records.append((f"{rid}.regional", regional))
    write_embeddings(args.out, records)

    if args.bank_out:
        labels = sorted({rec.pred_label for rec in detections})
        bank = build_bank(labels, ToyTextEncoder(cfg), template=args.template)
        save_bank(bank, args.bank_out)
        print(f"wrote bank of {bank.size} concepts to {args.bank_out}")
    print(f"encoded {len(detections)} detections from {len(rasters)} images to {args.out}")
    return 0


def _scored_from_args(args) -> tuple[list[ScoredRecord], ConceptBank]:
    bank = load_bank(args.bank)
    detections = read_detections(args.detections)
    table = EmbeddingTable.load(args.embeddings)
    projection = _load_projection_arg(args.projection, bank.dim)
    method, tau = _method_args(args)
    scored = _score_records(
        detections, table, bank, projection, FusionConfig(lam=args.lam), method, tau
    )
    return scored, bank


def cmd_score(args) -> int:
    scored, _ = _scored_from_args(args)
    report_stub = EvalReport(
        method=args.method, lam=args.lam, tau=args.tau, shots=None, tpr=args.tpr,
        gamma=0.0, gamma_source="n/a", fpr95=0.0, auroc=0.0, records=scored,
    )
    report_stub.write_scores(args.out)
    print(f"scored {len(scored)} records -> {args.out}")
    return 0


def cmd_calibrate(args) -> int:
    if args.scores:
        scored = read_scores(args.scores)
    else:
        for flag in ("bank", "detections", "embeddings"):
            if getattr(args, flag) is None:
                raise BadConfig(f"calibrate needs --scores or --{flag}")
        scored, _ = _scored_from_args(args)
    id_scores = [r.sigma for r in scored if r.truth == "ID"]
    if not id_scores:
        raise NoIDRecords("no ID records to calibrate on")
    gamma = calibrate_threshold(id_scores, args.tpr)
    print(f"gamma={gamma!r}")
    if args.out:
        Path(args.out).write_text(f"gamma={gamma!r}\n", encoding="utf-8")
    return 0


def cmd_eval(args) -> int:
    started = time.perf_counter()
    scored, _ = _scored_from_args(args)
    config = _config_echo(
        args, ("bank", "embeddings", "detections", "projection", "method", "lam", "tau", "seed")
    )
    report = _build_report(
        scored, args, gamma=args.gamma, config=config,
        runtime_s=time.perf_counter() - started,
    )
    print(report.to_table())
    if args.out:
        report.write(args.out)
    if args.dump_scores:
        report.write_scores(args.dump_scores)
    return 0


def cmd_finetune(args) -> int:
    started = time.perf_counter()
    bank = load_bank(args.bank)
    train_dets = read_detections(args.detections)
    eval_dets = read_detections(args.eval_detections)

    overlap = {d.image_id for d in train_dets} & {d.image_id for d in eval_dets}
    if overlap:
        raise SplitOverlap(
            f"{len(overlap)} record(s) appear in both the train pool and the eval split "
            f"(e.g. {sorted(overlap)[0]!r})"
        )

    train_table = EmbeddingTable.load(args.embeddings)
    eval_table = EmbeddingTable.load(args.eval_embeddings)
    check_labels_known(train_dets, bank.labels)

    pool = []
    for row, rec in enumerate(train_dets):
        if rec.truth != "ID":
            raise DataError(f"train pool row {row} is not an ID record")
        label = rec.truth_label or rec.pred_label
        rid = interchange.record_id(rec, row)
        pool.append(
            LabeledShot(
                embedding=train_table.get(f"{rid}.regional"),
                label=bank.label_index(label),
            )
        )

    shots = sample_few_shot(pool, FewShotConfig(shots=args.shots, seed=args.seed), bank.size)
    train_cfg = TrainConfig(
        batch_size=args.batch_size,
        epochs=args.epochs,
        learning_rate=args.lr,
        loss_tau=args.loss_tau,
        seed=args.seed,
    )
    method, tau = _method_args(args)
    fusion = FusionConfig(lam=args.lam)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = _config_echo(
        args, ("bank", "embeddings", "detections", "eval_detections", "eval_embeddings",
               "method", "lam", "tau", "shots", "seed", "epochs", "batch_size", "lr", "loss_tau")
    )

    def evaluate(projection: ProjectionLayer, name: str) -> EvalReport:
        scored = _score_records(eval_dets, eval_table, bank, projection, fusion, method, tau)
        report = _build_report(
            scored, args, gamma=None, shots=args.shots, config=config,
            runtime_s=time.perf_counter() - started,
        )
        report.write(out / f"report_{name}.txt")
        if args.dump_scores:
            report.write_scores(out / f"scores_{name}.csv")
        return report

    before = evaluate(ProjectionLayer.identity(bank.dim), "zero_shot")
    trained, history = train(shots, bank, train_cfg, ProjectionLayer.identity(bank.dim))
    interchange.save_projection(trained.weight, out / "projection.tsv")
    after = evaluate(trained, "finetuned")

    with (out / "history.csv").open("w", encoding="utf-8") as fh:
        fh.write("epoch,loss\n")
        for epoch, loss in enumerate(history):
            fh.write(f"{epoch},{loss!r}\n")

    print("zero-shot:")
    print(before.to_table())
    print("fine-tuned:")
    print(after.to_table())
    print(f"wrote projection + reports to {out}")
    return 0


# --- parser -----------------------------------------------------------------

def _add_method_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--method", choices=[m.value for m in ScoreMethod], required=required)
    p.add_argument("--tau", type=float, default=1.0, help="MCM temperature (divides similarities)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5,
                   help="fusion weight of the regional embedding")
    p.add_argument("--tpr", type=float, default=0.95, help="target ID true-positive rate")


def _add_data_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--bank", required=required, help="bank manifest path (.tsv)")
    p.add_argument("--embeddings", required=required, help="embeddings manifest path (.tsv)")
    p.add_argument("--detections", required=required, help="detections CSV path")
    p.add_argument("--projection", default=None, help="projection manifest (defaults to identity)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="runa",
        description="Object-level OOD scoring against a concept bank: "
                    "synthesize benchmarks, encode images, score, calibrate, evaluate, fine-tune.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("synth", help="generate a synthetic benchmark (bank, embeddings, detections)")
    p.add_argument("--classes", type=int, default=20)
    p.add_argument("--dim", type=int, default=256)
    p.add_argument("--n-id", type=int, default=2000)
    p.add_argument("--n-ood", type=int, default=2000)
    p.add_argument("--align-noise", type=float, default=15.0, help="prototype/concept angle, degrees")
    p.add_argument("--spread", type=float, default=0.25, help="per-entry Gaussian sample noise")
    p.add_argument("--concept-margin", type=float, default=0.05)
    p.add_argument("--rotation-misalignment", type=float, default=0.0,
                   help="shared rotation of all visual prototypes, degrees")
    p.add_argument("--scene-align", type=float, default=45.0,
                   help="scene prototype/concept angle, degrees")
    p.add_argument("--ood-regional-from-id", action="store_true",
                   help="OOD regional prototypes copy the ID classes (scenes still differ)")
    p.add_argument("--n-train-per-class", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("encode-toy", help="encode PPM detections with the deterministic toy encoder")
    p.add_argument("--images-dir", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--out", required=True, help="output embeddings manifest (.tsv)")
    p.add_argument("--bank-out", default=None, help="also write a toy text bank here")
    p.add_argument("--template", default=DEFAULT_TEMPLATE)
    p.add_argument("--dim", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=1.0, help="background blur radius")
    p.set_defaults(func=cmd_encode_toy)

    p = sub.add_parser("score", help="score records, write per-record sigma CSV")
    _add_data_flags(p)
    _add_method_flags(p)
    p.add_argument("--out", required=True, help="scores CSV path")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("calibrate", help="compute the ID-quantile threshold gamma")
    _add_data_flags(p, required=False)
    _add_method_flags(p, required=False)
    p.add_argument("--scores", default=None, help="reuse a scores CSV instead of rescoring")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("eval", help="score, calibrate, and report FPR95/AUROC")
    _add_data_flags(p)
    _add_method_flags(p)
    p.add_argument("--gamma", type=float, default=None, help="use this threshold instead of calibrating")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="report path")
    p.add_argument("--dump-scores", default=None, help="per-record scores CSV path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("finetune", help="few-shot train the projection; report before/after")
    _add_data_flags(p)
    _add_method_flags(p)
    p.add_argument("--eval-detections", required=True)
    p.add_argument("--eval-embeddings", required=True)
    p.add_argument("--shots", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--lr", type=float, default=5e-6)
    p.add_argument("--loss-tau", type=float, default=0.01)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dump-scores", action="store_true", help="also write per-record score CSVs")
    p.set_defaults(func=cmd_finetune)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
