"""Command-line front-end for the trace-inversion pipeline.

Subcommands: ``train`` (fit the one-neuron model, write its parameter
trace), ``tables`` (print the built-in reference runs), ``reconstruct``
(recover a dataset from a trace), ``verify`` (retrain on a recovered
dataset and compare traces), and ``feasibility`` (equation/unknown
counting for wider networks).

Exit codes: 0 success; 1 runtime failure (training diverged,
verification FAIL); 2 usage or input error; 3 reconstruction finished
without converging (the report is still written).

Dataset and report files share the trace file's line-oriented layout:
a ``magic version`` header, ``key value`` fields, and one
``instance i x y`` record per row.  A reconstruction report carries the
same instance records plus convergence fields, so ``verify`` accepts
``reconstruct`` output directly.
"""

from __future__ import annotations

import argparse
import io
import sys

from .model import Dataset, Params, TrainConfig, TrainingDivergedError, train
from .solver import SolverConfig, solve, verify_reconstruction
from .system import (
    InsufficientTraceError,
    NetworkShape,
    ReconstructionProblem,
    feasibility,
)
from .tables import demo_tables
from .trace import (
    FORMAT_VERSION,
    TraceParseError,
    TraceValidationError,
    format_float,
    iter_records,
    load_trace,
    parse_float,
    parse_int,
    save_trace,
)

DATASET_MAGIC = "traceinv-dataset"
REPORT_MAGIC = "traceinv-report"


def _read_text(source):
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    return text.decode("utf-8") if isinstance(text, bytes) else text


def _write_text(destination, text):
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)


def save_dataset(data, destination):
    """Write a dataset file readable by ``load_dataset``."""
    lines = [f"{DATASET_MAGIC} {FORMAT_VERSION}", f"n {data.n}"]
    for i in range(data.n):
        lines.append(
            f"instance {i} {format_float(data.xs[i])} {format_float(data.ys[i])}"
        )
    _write_text(destination, "\n".join(lines) + "\n")


def save_report(result, destination):
    """Write a reconstruction report; its instance records make it
    loadable by ``load_dataset`` as well."""
    data = result.recovered
    lines = [
        f"{REPORT_MAGIC} {FORMAT_VERSION}",
        f"n {data.n}",
        f"converged {'true' if result.converged else 'false'}",
        f"residual_norm {format_float(result.residual_norm)}",
        f"iterations {result.iterations}",
        f"starts_tried {result.starts_tried}",
    ]
    for i in range(data.n):
        lines.append(
            f"instance {i} {format_float(data.xs[i])} {format_float(data.ys[i])}"
        )
    _write_text(destination, "\n".join(lines) + "\n")


# report-only fields skipped when a report is read back as a dataset
_REPORT_FIELDS = {"converged", "residual_norm", "iterations", "starts_tried"}


def load_dataset(source):
    """Read a dataset from a dataset file or a reconstruction report."""
    text = _read_text(source)
    first = next(
        (ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")),
        "",
    )
    magic = REPORT_MAGIC if first.startswith(REPORT_MAGIC) else DATASET_MAGIC
    n = None
    rows = []
    for lineno, tokens in iter_records(io.StringIO(text), magic):
        key = tokens[0]
        if key == "n":
            if n is not None:
                raise TraceValidationError("field n given twice", rule="duplicate-field")
            if len(tokens) != 2:
                raise TraceParseError("expected 'n <count>'", line=lineno)
            n = parse_int(tokens[1], lineno)
        elif key == "instance":
            if len(tokens) != 4:
                raise TraceParseError("expected 'instance <i> <x> <y>'", line=lineno)
            rows.append(
                (
                    parse_int(tokens[1], lineno),
                    parse_float(tokens[2], lineno),
                    parse_float(tokens[3], lineno),
                )
            )
        elif magic == REPORT_MAGIC and key in _REPORT_FIELDS:
            continue
        else:
            raise TraceParseError(f"unknown record {key!r}", line=lineno)
    if n is None:
        raise TraceValidationError("missing field: n", rule="missing-field")
    if n < 1:
        raise TraceValidationError("n must be >= 1", rule="n-positive")
    if len(rows) != n:
        raise TraceValidationError(
            f"expected {n} instance records, found {len(rows)}", rule="instance-count"
        )
    rows.sort(key=lambda row: row[0])
    if [row[0] for row in rows] != list(range(n)):
        raise TraceValidationError(
            f"instance indices must cover 0..{n - 1} exactly once",
            rule="instance-contiguous",
        )
    return Dataset([row[1] for row in rows], [row[2] for row in rows])


def _destination(path):
    return sys.stdout if path == "-" else path


def _fail(message, code):
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_train(args):
    if args.dataset is not None and (args.x or args.y):
        return _fail("give either --dataset or inline --x/--y values, not both", 2)
    try:
        if args.dataset is not None:
            data = load_dataset(args.dataset)
        else:
            if not args.x or not args.y:
                return _fail("no dataset: pass --dataset FILE or --x/--y pairs", 2)
            if len(args.x) != len(args.y):
                return _fail(
                    f"got {len(args.x)} --x values but {len(args.y)} --y values", 2
                )
            data = Dataset(args.x, args.y)
        cfg = TrainConfig(eta=args.eta, epochs=args.epochs, init=Params(args.w0, args.b0))
    except (OSError, ValueError) as exc:
        return _fail(exc, 2)
    try:
        trace = train(data, cfg, debug=args.debug)
    except TrainingDivergedError as exc:
        return _fail(exc, 1)
    try:
        save_trace(trace, _destination(args.output), digits=args.precision)
    except OSError as exc:
        return _fail(exc, 1)
    return 0


def cmd_tables(args):
    print(demo_tables())
    return 0


def cmd_reconstruct(args):
    try:
        trace = load_trace(args.trace)
        problem = ReconstructionProblem(trace)
        cfg = SolverConfig(
            max_iterations=args.max_iterations,
            residual_tolerance=args.residual_tolerance,
            step_tolerance=args.step_tolerance,
            damping_init=args.damping_init,
            multistart_count=args.multistart_count,
            seed=args.seed,
            box_bounds=tuple(args.box_bounds) if args.box_bounds else None,
            allow_underdetermined=args.allow_underdetermined,
        )
    except (OSError, ValueError) as exc:
        # covers parse/validation errors, bad solver flags, and E < 2
        return _fail(exc, 2)
    try:
        result = solve(problem, cfg)
    except InsufficientTraceError as exc:
        return _fail(exc, 2)
    try:
        save_report(result, _destination(args.output))
    except OSError as exc:
        return _fail(exc, 1)
    if args.output != "-":
        status = "converged" if result.converged else "did not converge"
        print(
            f"{status}: residual max-norm {result.residual_norm:.3e} after "
            f"{result.iterations} iteration(s), {result.starts_tried} start(s); "
            f"report written to {args.output}"
        )
    return 0 if result.converged else 3


def cmd_verify(args):
    try:
        trace = load_trace(args.trace)
        data = load_dataset(args.dataset)
        report = verify_reconstruction(trace, data, threshold=args.threshold)
    except (OSError, ValueError) as exc:
        # covers unreadable files and trace/dataset size mismatch
        return _fail(exc, 2)
    except TrainingDivergedError as exc:
        return _fail(f"retraining on the recovered dataset diverged: {exc}", 1)
    for j in range(trace.epochs):
        print(f"epoch {j}  |dw| {report.dw[j]:.3e}  |db| {report.db[j]:.3e}")
    verdict = "PASS" if report.passed else "FAIL"
    print(
        f"{verdict}: max deviation {report.max_deviation:.3e} "
        f"vs threshold {report.threshold:.1e}"
    )
    return 0 if report.passed else 1


def cmd_feasibility(args):
    try:
        shape = NetworkShape(
            width=args.width,
            layers=args.layers,
            instances=args.instances,
            epochs=args.epochs,
        )
    except ValueError as exc:
        return _fail(exc, 2)
    report = feasibility(shape)
    print(f"unknowns   {report.unknowns}")
    print(f"equations  {report.equations}")
    print(f"feasible   {'yes' if report.feasible else 'no'}")
    print(f"min_epochs {report.min_epochs}")
    print(f"rough bound: epochs >= instances/width = {args.instances / args.width:g}")
    print(report.label)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="traceinv",
        description=(
            "Train a one-neuron tanh model while recording its per-epoch "
            "parameter trace, then reconstruct the training data from the "
            "trace alone."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", help="train the model and write a parameter trace")
    p.add_argument("--x", action="append", type=float, default=[], metavar="X",
                   help="input value; repeat for more instances")
    p.add_argument("--y", action="append", type=float, default=[], metavar="Y",
                   help="target value; one per --x")
    p.add_argument("--dataset", metavar="FILE",
                   help="read instances from a dataset file instead")
    p.add_argument("--eta", type=float, default=0.1, help="learning rate (default 0.1)")
    p.add_argument("--epochs", type=int, default=5,
                   help="number of recorded epochs (default 5)")
    p.add_argument("--w0", type=float, default=0.5, help="initial weight (default 0.5)")
    p.add_argument("--b0", type=float, default=0.5, help="initial bias (default 0.5)")
    p.add_argument("--precision", type=int, default=None, metavar="DIGITS",
                   help="significant digits written to the trace (default: lossless)")
    p.add_argument("--debug", action="store_true",
                   help="also record per-epoch predictions and loss")
    p.add_argument("-o", "--output", default="-", metavar="FILE",
                   help="trace destination (default stdout)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tables", help="print the built-in reference training runs")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("reconstruct", help="recover the training data behind a trace")
    p.add_argument("trace", help="trace file to invert")
    p.add_argument("--max-iterations", type=int, default=200)
    p.add_argument("--residual-tolerance", type=float, default=1e-10,
                   help="max-norm required for convergence (default 1e-10)")
    p.add_argument("--step-tolerance", type=float, default=1e-12)
    p.add_argument("--damping-init", type=float, default=1e-3)
    p.add_argument("--multistart-count", type=int, default=16,
                   help="start points to try before giving up (default 16)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the random start points (default 0)")
    p.add_argument("--box-bounds", nargs=2, type=float, metavar=("LO", "HI"),
                   default=None, help="clip iterates into [LO, HI]")
    p.add_argument("--allow-underdetermined", action="store_true",
                   help="solve in least-squares sense even with fewer equations than unknowns")
    p.add_argument("-o", "--output", default="-", metavar="FILE",
                   help="report destination (default stdout)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("verify",
                       help="retrain on a recovered dataset and compare traces")
    p.add_argument("trace", help="observed trace file")
    p.add_argument("dataset", help="recovered dataset (dataset or report file)")
    p.add_argument("--threshold", type=float, default=1e-8,
                   help="largest per-epoch deviation allowed for PASS (default 1e-8)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("feasibility",
                       help="equation/unknown counting for wider networks")
    p.add_argument("--width", type=int, required=True, help="neurons per layer")
    p.add_argument("--layers", type=int, required=True,
                   help="layer count including the output layer (at least 2)")
    p.add_argument("--instances", type=int, required=True, help="training instances")
    p.add_argument("--epochs", type=int, required=True, help="recorded epochs")
    p.set_defaults(func=cmd_feasibility)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
