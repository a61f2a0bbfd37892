"""Command line interface: ``ocr build-db | train | recognize | features | wht | eval``.

Exit status is 0 on success, 1 on usage errors and 2 on data errors.
Results go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import ann
from .features import (
    FEATURE_NAMES,
    DatabaseError,
    build_database,
    feature_vector,
    glyph_from_file,
    load_database,
    save_database,
)
from .pipeline import evaluate_fonts, recognize_file
from .raster import EmptyContentError, ImageFormatError
from .wht import flatten, wht2d

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
DATA_ERRORS = (DatabaseError, ImageFormatError, EmptyContentError, ann.ModelFormatError, OSError)

log = logging.getLogger("walshocr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _roi(text: str) -> tuple[int, int, int, int]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y,W,H integers, got {text!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected X,Y,W,H integers, got {text!r}")
    return parts  # type: ignore[return-value]


def _out(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _format_value(name: str, value) -> str:
    if name in ("hsym", "vsym", "sumt"):
        return f"{value:.6f}"
    return str(int(value))


def cmd_build_db(args) -> int:
    db = build_database(args.templates)
    save_database(db, args.out)
    matrix = db.matrix()
    _out("feature " + " ".join(f"{label:>7}" for label in db.labels))
    for name, row in zip(FEATURE_NAMES, matrix):
        cells = (f"{v:7.3f}" if name in ("hsym", "vsym", "sumt") else f"{int(v):7d}" for v in row)
        _out(f"{name:<7} " + " ".join(cells))
    log.info("wrote %d templates to %s", len(db.labels), args.out)
    return EXIT_OK


def cmd_train(args) -> int:
    db = load_database(args.db)
    config = ann.TrainConfig(
        max_epochs=args.epochs,
        goal_sse=args.goal,
        learning_rate=args.lr,
        momentum=args.momentum,
        hidden_count=args.hidden,
        seed=args.seed,
    )
    inputs = np.array(db.vectors, dtype=np.float64)
    targets = ann.make_targets(len(db.labels), config.target_hi, config.target_lo)
    model = ann.init_mlp(config, ann.feature_scaling(inputs), db.labels)

    def report(epoch, err):
        if args.log_every and epoch % args.log_every == 0:
            _out(f"epoch {epoch:5d}  sse {err:.6f}")

    try:
        model, history = ann.train(model, inputs, targets, config, on_epoch=report)
    except ann.TrainingDivergedError as exc:
        log.error("training diverged: %s", exc)
        return EXIT_DATA
    ann.save_model(model, args.out)
    correct = sum(ann.classify(model, x)[0] == label for x, label in zip(inputs, db.labels))
    _out(f"epochs run: {model.epochs_run}")
    _out(f"final sse: {model.final_sse:.6f}")
    _out(f"training-set accuracy: {correct}/{len(db.labels)}")
    return EXIT_OK


def cmd_recognize(args) -> int:
    model = ann.load_model(args.model)
    db = load_database(args.db)
    result = recognize_file(args.image, model, db, roi=args.roi, spaces=args.spaces)
    if not result.per_glyph:
        log.warning("no text found in %s", args.image)
    for line in result.lines:
        _out(line)
    if args.report:
        payload = [
            {
                "line": g.line_index,
                "glyph": g.glyph_index,
                "label": g.label,
                "confidence": g.confidence,
                "runner_up": g.runner_up,
                "row_span": list(g.row_span),
                "col_span": list(g.col_span),
                "features": dict(zip(FEATURE_NAMES, (float(v) for v in g.features))),
            }
            for g in result.per_glyph
        ]
        Path(args.report).write_text(json.dumps({"lines": result.lines, "glyphs": payload}, indent=1) + "\n")
    return EXIT_OK


def cmd_features(args) -> int:
    db = load_database(args.db)
    fv = feature_vector(glyph_from_file(args.image), db)
    for name, value in zip(FEATURE_NAMES, fv):
        _out(f"{name} = {_format_value(name, value)}")
    return EXIT_OK


def cmd_wht(args) -> int:
    coeffs = flatten(wht2d(glyph_from_file(args.image)))
    lines = ["sequency_index,magnitude"]
    lines += [f"{i},{abs(c):.12e}" for i, c in enumerate(coeffs)]
    Path(args.out).write_text("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    model = ann.load_model(args.model)
    db = load_database(args.db)
    if not Path(args.fonts).is_dir():
        raise DatabaseError(f"{args.fonts} is not a directory")
    report = evaluate_fonts(args.fonts, model, db)
    Path(args.out).write_text(report.to_csv())
    _out(f"{'font':<24} {'correct':>7} {'total':>5} {'rate':>7}")
    for row in report.sorted_rows():
        _out(f"{row.font:<24} {row.correct:>7} {row.total:>5} {row.rate!s:>7}")
    if report.rows:
        agg = report.aggregate
        _out(f"{agg.font:<24} {agg.correct:>7} {agg.total:>5} {agg.rate!s:>7}")
    top = report.top_confusions()
    if top:
        _out("top confusions (true -> predicted: count):")
        for (true, pred), n in top:
            _out(f"  {true} -> {pred}: {n}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ocr", description="Feature-vector OCR with a backpropagation network.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-db", help="build the template database")
    p.add_argument("--templates", required=True, help="directory with A.pbm ... Z.pbm, 1.pbm ... 0.pbm")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_db)

    d = ann.TrainConfig()
    p = sub.add_parser("train", help="train the network on the database vectors")
    p.add_argument("--db", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--hidden", type=int, default=d.hidden_count)
    p.add_argument("--lr", type=float, default=d.learning_rate)
    p.add_argument("--momentum", type=float, default=d.momentum)
    p.add_argument("--epochs", "--max-epochs", dest="epochs", type=int, default=d.max_epochs)
    p.add_argument("--goal", type=float, default=d.goal_sse)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--log-every", type=int, default=100, help="print SSE every N epochs (0 disables)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recognize", help="recognize the text on a page image")
    p.add_argument("--model", required=True)
    p.add_argument("--db", required=True)
    p.add_argument("image")
    p.add_argument("--roi", type=_roi, help="X,Y,W,H region of interest")
    p.add_argument("--spaces", action="store_true", help="insert spaces at wide gaps")
    p.add_argument("--report", help="write a per-glyph JSON report here")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("features", help="print the eleven features of a glyph image")
    p.add_argument("--db", required=True)
    p.add_argument("image")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("wht", help="dump the sequency-ordered WHT magnitudes of a glyph")
    p.add_argument("image")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_wht)

    p = sub.add_parser("eval", help="per-font recognition rates")
    p.add_argument("--model", required=True)
    p.add_argument("--db", required=True)
    p.add_argument("--fonts", required=True, help="directory of per-font glyph directories")
    p.add_argument("--out", required=True, help="CSV report path")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ValueError as exc:
        if isinstance(exc, DATA_ERRORS):
            log.error("%s", exc)
            return EXIT_DATA
        log.error("%s", exc)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
