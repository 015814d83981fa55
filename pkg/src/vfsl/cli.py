"""Command-line surface.

Every failure exits nonzero and prints a single machine-parseable line to
stderr, ``<code>: <message>``, with a distinct exit code per error kind.
``VFSL_THREADS`` caps the linear-algebra thread pools (0 or unset leaves
the default).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .baselines import (
    AssignmentModel,
    CentroidModel,
    assignment_scores,
    centroid_scores,
    fit_blm,
    fit_centroids,
    fit_flm,
)
from .errors import (
    DimensionMismatchError,
    IoFailureError,
    NameCountMismatchError,
    ParseFailureError,
    VfslError,
)
from .harness import SyntheticSpec, TaskSpec, emit_report, evaluate, generate_synthetic
from .interpret import explain, render_explanations
from .matrixio import (
    EmbeddingMatrix,
    LabelVector,
    ShotSet,
    read_csv,
    read_labels,
    read_vfeb,
    write_csv,
    write_labels,
    write_vfeb,
)
from .modelio import load_model, matrix_digest, save_model
from .sim_mapper import MappingModel, SolverConfig, fit, predict, score
from .similarity import SimilarityMatrix, l2_normalize, similarity_matrix


def _read_matrix(path, has_header: bool = False) -> EmbeddingMatrix:
    suffix = Path(path).suffix.lower()
    if suffix == ".vfeb":
        return read_vfeb(path)
    if suffix == ".csv":
        return read_csv(path, has_header=has_header)
    raise ParseFailureError(f"{path}: cannot infer format from suffix {suffix!r}")


def _as_sims(m: EmbeddingMatrix, prompt_names=None) -> SimilarityMatrix:
    return SimilarityMatrix(m.data, image_names=m.names, prompt_names=prompt_names)


def _write_text(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"cannot write {path}: {e.strerror or e}") from e


def _parse_seeds(raw: str) -> tuple[int, ...]:
    seeds = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            seeds.append(int(part))
        except ValueError as e:
            raise ParseFailureError(f"bad seed {part!r} in --seeds") from e
    if not seeds:
        raise ParseFailureError("--seeds is empty")
    return tuple(seeds)


def _cmd_convert(args) -> int:
    matrix = _read_matrix(args.input, has_header=args.has_header)
    suffix = Path(args.output).suffix.lower()
    if suffix == ".vfeb":
        write_vfeb(matrix, args.output)
    elif suffix == ".csv":
        write_csv(matrix, args.output)
    else:
        raise ParseFailureError(
            f"{args.output}: cannot infer output format from suffix {suffix!r}"
        )
    return 0


def _cmd_normalize(args) -> int:
    write_vfeb(l2_normalize(read_vfeb(args.input)), args.output)
    return 0


def _cmd_sim(args) -> int:
    images = read_vfeb(args.images)
    prompts = read_vfeb(args.prompts)
    sims = similarity_matrix(images, prompts)
    write_vfeb(
        EmbeddingMatrix(sims.data, names=sims.image_names), args.output
    )
    return 0


def _load_prompt_bank(args, expected_cols: int):
    """Optional prompt bank for names and a provenance digest."""
    if args.prompts is None:
        return None, None
    bank = read_vfeb(args.prompts)
    if bank.data.shape[0] != expected_cols:
        raise DimensionMismatchError(
            f"{args.prompts} has {bank.data.shape[0]} prompts but the "
            f"similarity matrix has {expected_cols} columns"
        )
    return bank.names, matrix_digest(bank)


def _balanced_shotset(features: EmbeddingMatrix, labels: LabelVector) -> ShotSet:
    counts = np.bincount(labels.labels, minlength=labels.num_classes)
    if not (counts == counts[0]).all() or counts[0] == 0:
        raise ParseFailureError(
            "centroids fit needs the same number of labeled rows per class, "
            f"got per-class counts {counts.tolist()}"
        )
    return ShotSet(
        np.arange(labels.labels.size), labels, shots_per_class=int(counts[0])
    )


def _cmd_fit(args) -> int:
    labels = read_labels(args.labels)
    matrix = read_vfeb(args.input)
    if args.method == "centroids":
        model = fit_centroids(matrix, _balanced_shotset(matrix, labels))
        save_model(model, args.output)
        return 0
    names, digest = _load_prompt_bank(args, matrix.data.shape[1])
    sims = _as_sims(matrix, prompt_names=names)
    if args.method == "sim":
        model = fit(sims, labels, SolverConfig(lam=args.lam))
    elif args.method == "flm":
        model = fit_flm(sims, labels)
    else:
        model = fit_blm(sims, labels, smoothing=args.smoothing)
    save_model(model, args.output, prompt_bank_digest=digest)
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    matrix = read_vfeb(args.input)
    if isinstance(model, MappingModel):
        scores = score(model, _as_sims(matrix))
    elif isinstance(model, AssignmentModel):
        scores = assignment_scores(model, _as_sims(matrix))
    elif isinstance(model, CentroidModel):
        scores = centroid_scores(model, matrix)
    else:  # unreachable with load_model's dispatch
        raise ParseFailureError(f"cannot predict with {type(model).__name__}")
    write_labels(predict(scores), args.output_labels)
    if args.output_scores is not None:
        write_vfeb(
            EmbeddingMatrix(scores.data.astype(np.float32), names=matrix.names),
            args.output_scores,
        )
    return 0


def _cmd_eval(args) -> int:
    features = read_vfeb(args.features)
    labels = read_labels(args.labels)
    prompts = read_vfeb(args.prompts)
    task = TaskSpec(
        shots_per_class=args.shots,
        seeds=_parse_seeds(args.seeds),
        method=args.method,
        lam=args.lam,
    )
    report = evaluate(
        task, features, labels, prompts, dataset=args.dataset, smoothing=args.smoothing
    )
    _write_text(emit_report([report], format=args.format), args.output)
    return 0


def _cmd_interpret(args) -> int:
    model = load_model(args.model)
    if not isinstance(model, MappingModel):
        raise ParseFailureError(
            f"{args.model} holds a {type(model).__name__}; interpretation "
            "needs a fitted sim mapping"
        )
    if args.top_k < 1:
        raise ParseFailureError("--top-k must be at least 1")
    class_names = None
    if args.class_names is not None:
        try:
            text = Path(args.class_names).read_text(encoding="utf-8")
        except OSError as e:
            raise IoFailureError(
                f"cannot read {args.class_names}: {e.strerror or e}"
            ) from e
        class_names = text.splitlines()
        if len(class_names) != model.num_classes:
            raise NameCountMismatchError(
                f"{args.class_names} has {len(class_names)} names for "
                f"{model.num_classes} classes"
            )
    explanations = explain(model, top_k=args.top_k, class_names=class_names)
    _write_text(render_explanations(explanations, format=args.format), args.output)
    return 0


def _cmd_synth(args) -> int:
    spec = SyntheticSpec(
        num_classes=args.classes,
        dim=args.dim,
        prompts=args.prompts,
        shots=args.shots,
        test_per_class=args.test_per_class,
        spread=args.spread,
        seed=args.seed,
    )
    features, labels, prompts = generate_synthetic(spec)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_vfeb(features, out / "features.vfeb")
    write_vfeb(prompts, out / "prompts.vfeb")
    write_labels(labels, out / "labels.txt")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vfsl",
        description=(
            "Vocabulary-free few-shot classification on precomputed "
            "embeddings: fit linear mappings from generic-prompt "
            "similarities to class scores, evaluate them, and inspect "
            "their weights."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("convert", help="convert between CSV and VFEB")
    p.add_argument("--input", required=True, help="source file (.csv or .vfeb)")
    p.add_argument("--output", required=True, help="destination file (.csv or .vfeb)")
    p.add_argument(
        "--has-header",
        action="store_true",
        help="CSV input starts with a header row (first column 'name' holds row names)",
    )
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("normalize", help="L2-normalize every row of a VFEB file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("sim", help="similarity matrix of images against prompts")
    p.add_argument("--images", required=True, help="normalized image features (.vfeb)")
    p.add_argument("--prompts", required=True, help="normalized prompt bank (.vfeb)")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_sim)

    p = sub.add_parser("fit", help="fit a model on support-set data")
    p.add_argument(
        "--input",
        required=True,
        help="training matrix: similarities for sim/flm/blm, embeddings for centroids",
    )
    p.add_argument("--labels", required=True, help="one integer label per line")
    p.add_argument(
        "--method", required=True, choices=["sim", "flm", "blm", "centroids"]
    )
    p.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=1.0,
        help="ridge regularization weight for --method sim (default 1.0)",
    )
    p.add_argument(
        "--smoothing",
        type=float,
        default=1.0,
        help="count smoothing for --method blm (default 1.0)",
    )
    p.add_argument(
        "--prompts",
        default=None,
        help="optional prompt bank (.vfeb) recording names and a digest in the model",
    )
    p.add_argument("--output", required=True, help="model path (.vfeb plus .json sidecar)")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("predict", help="label test items with a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument(
        "--input",
        required=True,
        help="test matrix: similarities for sim/flm/blm models, embeddings for centroids",
    )
    p.add_argument("--output-labels", required=True)
    p.add_argument("--output-scores", default=None, help="optional scores file (.vfeb)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("eval", help="seeded few-shot evaluation protocol")
    p.add_argument("--features", required=True, help="normalized features (.vfeb)")
    p.add_argument("--labels", required=True)
    p.add_argument("--prompts", required=True, help="normalized prompt bank (.vfeb)")
    p.add_argument(
        "--method", required=True, choices=["sim", "flm", "blm", "centroids"]
    )
    p.add_argument("--shots", type=int, default=16, help="shots per class (default 16)")
    p.add_argument("--seeds", default="1,2,3", help="comma-separated (default 1,2,3)")
    p.add_argument("--format", choices=["csv", "json", "markdown"], default="csv")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--smoothing", type=float, default=1.0)
    p.add_argument("--dataset", default="dataset", help="tag in the report")
    p.add_argument("--output", default=None, help="report path (default stdout)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("interpret", help="rank prompts by weight per class")
    p.add_argument("--model", required=True, help="a fitted sim model")
    p.add_argument(
        "--top-k", type=int, default=4, help="prompts per class (default 4)"
    )
    p.add_argument("--format", choices=["markdown", "json"], default="markdown")
    p.add_argument(
        "--class-names", default=None, help="optional file, one class name per line"
    )
    p.add_argument("--output", default=None, help="report path (default stdout)")
    p.set_defaults(func=_cmd_interpret)

    p = sub.add_parser("synth", help="generate a synthetic task as VFEB files")
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--prompts", type=int, default=50)
    p.add_argument("--shots", type=int, default=16)
    p.add_argument("--test-per-class", type=int, default=50)
    p.add_argument("--spread", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--output-dir",
        required=True,
        help="writes features.vfeb, prompts.vfeb, labels.txt",
    )
    p.set_defaults(func=_cmd_synth)

    return parser


def _thread_limit() -> int | None:
    raw = os.environ.get("VFSL_THREADS", "").strip()
    if raw == "":
        return None
    try:
        value = int(raw)
    except ValueError as e:
        raise ParseFailureError(f"VFSL_THREADS={raw!r} is not an integer") from e
    if value < 0:
        raise ParseFailureError(f"VFSL_THREADS must be nonnegative, got {value}")
    return value or None  # 0 means automatic


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        limit = _thread_limit()
        if limit is None:
            return args.func(args)
        with threadpool_limits(limits=limit):
            return args.func(args)
    except VfslError as e:
        print(f"{e.code}: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
