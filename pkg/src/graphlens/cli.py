"""Command-line interface.

Thin shell over the library: every subcommand parses flags, calls the
corresponding library function, and serialises the result. Exit codes:
0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import __version__
from .analysis import contrast_selection
from .bench import run_benchmark
from .dataset import load_csv
from .errors import (
    EigenFailure,
    FitDiverged,
    GraphLensError,
    NonFiniteCoordinates,
)
from .layout import Embedding, LayoutParams, optimize_layout, reembed, spectral_init
from .lenses import GlobalLens, GlobalMask, LocalMask, apply_lens_sequence
from .manifold import METRICS, build_manifold
from .model_io import ModelFile, load_model, save_model

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

NUMERIC_ERRORS = (FitDiverged, EigenFailure, NonFiniteCoordinates)


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def write_embedding_csv(embedding: Embedding, path) -> None:
    with open(path, "w") as fh:
        fh.write("id,x,y\n")
        for i, (x, y) in enumerate(embedding.coords):
            fh.write(f"{i},{float(x)!r},{float(y)!r}\n")


def read_embedding_csv(path) -> Embedding:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
    order = np.argsort(rows[:, 0])
    return Embedding(rows[order, 1:3], init_mode="warm_start")


def _missing_policy(text: str):
    if text in ("error", "drop_rows"):
        return text
    if text.startswith("impute:"):
        return ("knn_impute", int(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError(
        "missing policy must be error, drop_rows, or impute:<k>"
    )


def _check_digest(model: ModelFile, data) -> None:
    if model.dataset_digest and model.dataset_digest != data.digest():
        warnings.warn("dataset digest differs from the one the model was built on")


def _build_parser() -> _Parser:
    parser = _Parser(prog="graphlens", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="build a manifold from a CSV dataset")
    fit.add_argument("--input", required=True)
    fit.add_argument("--metric", choices=METRICS, default="euclidean")
    fit.add_argument("--n-neighbors", type=int, required=True)
    fit.add_argument("--missing", type=_missing_policy, default="error")
    fit.add_argument("--out", required=True)

    lens = sub.add_parser("lens", help="filter a manifold's edges")
    lens_sub = lens.add_subparsers(dest="lens_type", required=True)

    g = lens_sub.add_parser("global", help="segment one dimension, keep neighbours")
    g.add_argument("--model", required=True)
    g.add_argument("--data", required=True)
    g.add_argument("--missing", type=_missing_policy, default="error")
    g.add_argument("--dimension", required=True)
    g.add_argument("--segments", type=int, required=True)
    g.add_argument("--strategy", choices=("regular", "balanced"), default="regular")
    g.add_argument("--circular", action="store_true")
    g.add_argument("--out", required=True)

    gm = lens_sub.add_parser("global-mask", help="intersect with a lens manifold")
    gm.add_argument("--model", required=True)
    gm.add_argument("--data", required=True)
    gm.add_argument("--missing", type=_missing_policy, default="error")
    gm.add_argument("--dimensions", required=True, help="comma-separated columns")
    gm.add_argument("--mask-neighbors", type=int, required=True)
    gm.add_argument("--metric", choices=METRICS, default="euclidean")
    gm.add_argument("--out", required=True)

    lm = lens_sub.add_parser("local-mask", help="keep shortest lens edges per point")
    lm.add_argument("--model", required=True)
    lm.add_argument("--data", required=True)
    lm.add_argument("--missing", type=_missing_policy, default="error")
    lm.add_argument("--dimensions", required=True, help="comma-separated columns")
    lm.add_argument("--mask-neighbors", type=int, required=True)
    lm.add_argument("--metric", choices=METRICS, default="euclidean")
    lm.add_argument("--out", required=True)

    lay = sub.add_parser("layout", help="embed a manifold into 2-D")
    lay.add_argument("--model", required=True)
    lay.add_argument("--epochs", type=int, default=None)
    lay.add_argument("--seed", type=int, default=0)
    lay.add_argument("--init", default="spectral", help="spectral or warm:<emb.csv>")
    lay.add_argument("--repulsion", type=float, default=None)
    lay.add_argument("--out", required=True)

    con = sub.add_parser("contrast", help="rank features differing in a selection")
    con.add_argument("--data", required=True)
    con.add_argument("--selection", required=True, help="file of 0-based indices")
    con.add_argument("--missing", type=_missing_policy, default="error")

    ben = sub.add_parser("bench", help="time the lens filters across sizes")
    ben.add_argument("--sizes", default="100,1000,10000")
    ben.add_argument("--repeats", type=int, default=5)
    ben.add_argument(
        "--lenses",
        default="global_lens,global_mask,local_mask",
        help="comma-separated subset of lens types",
    )
    ben.add_argument("--out", required=True, help="prefix for .jsonl and .csv")

    srv = sub.add_parser("serve", help="run the exploration HTTP service")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--data-dir", default=None)
    srv.add_argument("--max-upload-mb", type=int, default=256)
    return parser


def _cmd_fit(args) -> int:
    data = load_csv(args.input, missing=args.missing)
    manifold = build_manifold(data, args.n_neighbors, args.metric)
    save_model(
        ModelFile(
            manifold,
            metric=args.metric,
            k=args.n_neighbors,
            dataset_digest=data.digest(),
        ),
        args.out,
    )
    print(f"wrote {args.out}: {manifold.n_vertices} vertices, {manifold.n_edges} edges")
    return EXIT_OK


def _cmd_lens(args) -> int:
    model = load_model(args.model)
    data = load_csv(args.data, missing=args.missing)
    _check_digest(model, data)
    if args.lens_type == "global":
        spec = GlobalLens(args.dimension, args.segments, args.strategy, args.circular)
    elif args.lens_type == "global-mask":
        spec = GlobalMask(
            tuple(args.dimensions.split(",")), args.metric, args.mask_neighbors
        )
    else:
        spec = LocalMask(
            tuple(args.dimensions.split(",")), args.metric, args.mask_neighbors
        )
    lensed = apply_lens_sequence(model.manifold, [spec], data)
    save_model(
        ModelFile(lensed, model.metric, model.k, model.dataset_digest, model.params),
        args.out,
    )
    print(f"wrote {args.out}: {lensed.n_edges} of {model.manifold.n_edges} edges kept")
    return EXIT_OK


def _cmd_layout(args) -> int:
    model = load_model(args.model)
    params = LayoutParams(
        n_epochs=args.epochs, seed=args.seed, repulsion_strength=args.repulsion
    )
    if args.init == "spectral":
        init = spectral_init(model.manifold, seed=args.seed)
        embedding = optimize_layout(model.manifold, init, params)
    elif args.init.startswith("warm:"):
        previous = read_embedding_csv(args.init.split(":", 1)[1])
        embedding = reembed(model.manifold, previous, params)
    else:
        print(f"unknown init {args.init!r}; use spectral or warm:<emb.csv>",
              file=sys.stderr)
        return EXIT_USAGE
    write_embedding_csv(embedding, args.out)
    print(f"wrote {args.out}: {embedding.n_points} points")
    return EXIT_OK


def _cmd_contrast(args) -> int:
    data = load_csv(args.data, missing=args.missing)
    selection = np.loadtxt(args.selection, dtype=np.int64, ndmin=1)
    result = contrast_selection(data, selection)
    print("feature,D,p,significant")
    for i, name in enumerate(result.features):
        print(
            f"{name},{result.d_statistics[i]:.6f},{result.p_values[i]:.3e},"
            f"{bool(result.significant[i])}"
        )
    return EXIT_OK


def _cmd_bench(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    lenses = tuple(args.lenses.split(","))
    report = run_benchmark(sizes=sizes, repeats=args.repeats, lenses=lenses)
    report.write_jsonl(args.out + ".jsonl")
    report.write_csv_summary(args.out + ".csv")
    print(f"wrote {args.out}.jsonl ({len(report.rows)} rows) and {args.out}.csv")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, max_upload_mb=args.max_upload_mb)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def cli_main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "fit": _cmd_fit,
        "lens": _cmd_lens,
        "layout": _cmd_layout,
        "contrast": _cmd_contrast,
        "bench": _cmd_bench,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except NUMERIC_ERRORS as exc:
        print(f"graphlens: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except GraphLensError as exc:
        print(f"graphlens: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"graphlens: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
