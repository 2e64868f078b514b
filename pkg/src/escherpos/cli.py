"""Command-line driver: ``escherpos {generate,evaluate,report,train}``.

Every command reads and writes a data directory (``--out``, default
``data``). It holds:

* ``uios_n{n}.txt``: one area sequence per line, canonical order
* ``coeffs_n{n}.tsv``: tuple coefficients, see :mod:`escherpos.coeffs`
* ``cores_{a-b-c}_n{n}.tsv``: core-type tables, see :mod:`escherpos.cores`

``evaluate``, ``report`` and ``train`` stop with an error when a file they
need is missing, unless ``--compute`` is given, in which case the missing
data is built and saved first.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Sequence

from . import coeffs as coeffs_mod
from .condgraph import (
    VARIANT_CANONICAL,
    VARIANT_LOWER,
    CellResult,
    ConditionGraph,
    canonical_model,
    evaluate_cell,
    predicted_vector,
    read_graph,
    write_graph,
)
from .cores import (
    DEFAULT_CONVENTION,
    CoreConvention,
    CoreTypeTable,
    build_core_table,
    read_core_table,
    write_core_table,
)
from .errors import EscherPosError, InvalidConfig, MissingDataset, UnsupportedLength
from .symfunc import Partition, format_partition, parse_partition, partitions_of
from .trainer import read_config, train, write_history
from .uio import generate_all_uios, read_uio_file, write_uio_file

MODELS = ("pair-canonical", "triple-canonical", "triple-lower", "general", "general-lower")
MODEL_ARITY = {"pair-canonical": (2,), "triple-canonical": (3,), "triple-lower": (3,)}
REPORT_MIN_WEIGHT = 4


def uio_path(out: Path, n: int) -> Path:
    return out / f"uios_n{n}.txt"


def coeff_path(out: Path, n: int) -> Path:
    return out / f"coeffs_n{n}.tsv"


def core_path(out: Path, lam: Sequence[int], n: int) -> Path:
    return out / f"cores_{'-'.join(map(str, lam))}_n{n}.tsv"


class DataStore:
    """Loads dataset files from a directory, optionally building what is missing."""

    def __init__(self, out: Path, compute: bool, conv: CoreConvention = DEFAULT_CONVENTION):
        self.out = out
        self.compute = compute
        self.conv = conv
        self._coeffs: dict[int, dict[Partition, list[int]]] = {}

    def _missing(self, path: Path) -> MissingDataset:
        return MissingDataset(f"{path} not found (run 'generate' or pass --compute)")

    def uios(self, n: int):
        p = uio_path(self.out, n)
        if p.exists():
            return read_uio_file(p)
        if not self.compute:
            raise self._missing(p)
        uios = generate_all_uios(n)
        self.out.mkdir(parents=True, exist_ok=True)
        write_uio_file(p, uios)
        return uios

    def coefficients(self, lam: Partition, n: int) -> list[int]:
        p = coeff_path(self.out, n)
        if n not in self._coeffs:
            self._coeffs[n] = coeffs_mod.read_coefficient_dataset(p)[1] if p.exists() else {}
        data = self._coeffs[n]
        if lam not in data:
            if not self.compute:
                raise self._missing(p) if not p.exists() else MissingDataset(
                    f"{p} has no record for {format_partition(lam)}"
                )
            data[lam] = coeffs_mod.coefficient_vector(lam, self.uios(n))
            self.out.mkdir(parents=True, exist_ok=True)
            coeffs_mod.write_coefficient_dataset(p, n, data)
        return data[lam]

    def core_table(self, lam: Partition, n: int) -> CoreTypeTable:
        p = core_path(self.out, lam, n)
        if p.exists():
            table = read_core_table(p)
            if table.convention == self.conv:
                return table
            if not self.compute:
                raise MissingDataset(f"{p} was built with a different core convention")
        elif not self.compute:
            raise self._missing(p)
        table = build_core_table(lam, n, self.uios(n), self.conv)
        self.out.mkdir(parents=True, exist_ok=True)
        write_core_table(p, table)
        return table


def resolve_model(model: str, lam: Partition) -> ConditionGraph:
    if model.startswith("file:"):
        G = read_graph(model[len("file:") :])
        if G.arity != len(lam):
            raise UnsupportedLength(f"graph arity {G.arity} does not fit {format_partition(lam)}")
        return G
    if model not in MODELS:
        raise InvalidConfig(f"unknown model {model!r}")
    allowed = MODEL_ARITY.get(model)
    if allowed and len(lam) not in allowed:
        raise UnsupportedLength(f"model {model} does not apply to {format_partition(lam)}")
    variant = VARIANT_LOWER if model.endswith("-lower") else VARIANT_CANONICAL
    return canonical_model(lam, variant)


def model_partitions(model: str, n: int, G: ConditionGraph | None = None) -> list[Partition]:
    """Partitions a model's report covers at UIO length ``n``."""
    arities = MODEL_ARITY.get(model, (2, 3, 4)) if G is None else (G.arity,)
    out = []
    for m in range(REPORT_MIN_WEIGHT, n + 1):
        out += [p for p in partitions_of(m) if len(p) in arities]
    return out


def evaluate_model(store: DataStore, G: ConditionGraph, lam: Partition, n: int) -> CellResult:
    table = store.core_table(lam, n)
    truth = store.coefficients(lam, n)
    return evaluate_cell(predicted_vector(G, table), truth)


REPORT_HEADER = ["lambda", "n", "error", "correct", "bound"]


def cells_csv(cells: Sequence[tuple[Partition, int, CellResult]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for lam, n, c in cells:
        w.writerow([format_partition(lam), n, c.error_text, c.correct_text, c.bound])
    return buf.getvalue()


def cells_text(cells: Sequence[tuple[Partition, int, CellResult]]) -> str:
    rows = [REPORT_HEADER] + [
        [format_partition(lam), str(n), c.error_text, c.correct_text, c.bound] for lam, n, c in cells
    ]
    widths = [max(len(r[i]) for r in rows) for i in range(len(REPORT_HEADER))]
    return "".join("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() + "\n" for r in rows)


def check_expected(path: Path, cells: Sequence[tuple[Partition, int, CellResult]]) -> list[str]:
    """Compare against a golden CSV with the report header; returns mismatch messages."""
    if not path.exists():
        raise MissingDataset(f"expectation file {path} not found")
    got = {(format_partition(lam), n): c for lam, n, c in cells}
    problems = []
    with path.open(newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            key = (format_partition(parse_partition(rec["lambda"])), int(rec["n"]))
            c = got.get(key)
            if c is None:
                problems.append(f"{key[0]} n={key[1]}: not evaluated")
                continue
            for fld, val in (("error", c.error_text), ("correct", c.correct_text), ("bound", c.bound)):
                want = (rec.get(fld) or "").strip()
                if want and want != val:
                    problems.append(f"{key[0]} n={key[1]} {fld}: expected {want}, got {val}")
    return problems


def _convention(args) -> CoreConvention:
    return CoreConvention(args.source, args.guard, args.origin)


def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    store = DataStore(out, compute=True, conv=_convention(args))
    uios = generate_all_uios(args.n)
    write_uio_file(uio_path(out, args.n), uios)
    lams = args.lam or coeffs_mod.dataset_partitions(args.n)
    p = coeff_path(out, args.n)
    data = coeffs_mod.read_coefficient_dataset(p)[1] if p.exists() else {}
    for lam in lams:
        data[lam] = coeffs_mod.coefficient_vector(lam, uios)
    coeffs_mod.write_coefficient_dataset(p, args.n, data)
    print(f"wrote {uio_path(out, args.n)} ({len(uios)} UIOs)")
    print(f"wrote {p} ({len(data)} partitions)")
    for lam in args.lam or []:
        print(f"  {format_partition(lam)}: sum {sum(data[lam])}")
        if 2 <= len(lam) <= 4 and sum(lam) <= args.n:
            table = build_core_table(lam, args.n, uios, store.conv)
            write_core_table(core_path(out, lam, args.n), table)
            print(f"wrote {core_path(out, lam, args.n)} ({len(table)} core-types)")
    return 0


def _finish(cells, args) -> int:
    if args.expect:
        problems = check_expected(Path(args.expect), cells)
        for msg in problems:
            print(f"MISMATCH {msg}")
        if problems:
            return 1
        print("all expected cells match")
    return 0


def cmd_evaluate(args) -> int:
    if not args.lam or len(args.lam) != 1:
        raise InvalidConfig("evaluate needs exactly one --lambda")
    lam = args.lam[0]
    store = DataStore(Path(args.out), args.compute, _convention(args))
    G = resolve_model(args.model, lam)
    c = evaluate_model(store, G, lam, args.n)
    print(
        f"lambda={format_partition(lam)} n={args.n} model={args.model} "
        f"error={c.error_text} correct={c.correct_text} bound={c.bound}"
    )
    return _finish([(lam, args.n, c)], args)


def cmd_report(args) -> int:
    out = Path(args.out)
    store = DataStore(out, args.compute, _convention(args))
    G_file = read_graph(args.model[len("file:") :]) if args.model.startswith("file:") else None
    cells = []
    for n in range(REPORT_MIN_WEIGHT, args.n + 1):
        lams = args.lam or model_partitions(args.model, n, G_file)
        for lam in lams:
            if sum(lam) > n:
                continue
            G = G_file if G_file is not None else resolve_model(args.model, lam)
            cells.append((lam, n, evaluate_model(store, G, lam, n)))
    cells.sort(key=lambda c: (len(c[0]), sum(c[0]), tuple(-x for x in c[0]), c[1]))
    name = args.model.replace("file:", "file-").replace("/", "_")
    out.mkdir(parents=True, exist_ok=True)
    (out / f"report_{name}_n{args.n}.csv").write_text(cells_csv(cells), encoding="utf-8")
    text = cells_text(cells)
    (out / f"report_{name}_n{args.n}.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return _finish(cells, args)


def cmd_train(args) -> int:
    if not args.config:
        raise InvalidConfig("train needs --config")
    config = read_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.score_mode is not None:
        config.score_mode = {"lower-bound": "score_2", "l1": "score_1"}.get(args.score_mode, args.score_mode)
    if args.edge_penalty is not None:
        config.edge_penalty = args.edge_penalty
    config = type(config).from_dict(config.to_dict())
    out = Path(args.out)
    store = DataStore(out, args.compute, _convention(args))
    table = store.core_table(config.lam, config.n)
    truth = store.coefficients(config.lam, config.n)
    result = train(config, table, truth)
    stem = f"train_{'-'.join(map(str, config.lam))}_n{config.n}_seed{config.seed}"
    write_history(out / f"{stem}_history.csv", result.history)
    write_graph(out / f"{stem}_graph.txt", result.best_graph)
    print(f"best score {float(result.best_score):.6f}: {result.best_graph.describe()}")
    print(f"wrote {out / (stem + '_history.csv')} and {out / (stem + '_graph.txt')}")
    return 0


def _partition_arg(text: str) -> Partition:
    try:
        return parse_partition(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="escherpos", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="data", help="data directory (default: data)")
    common.add_argument("--source", default=DEFAULT_CONVENTION.source, choices=["rotated", "concat", "first"])
    common.add_argument("--guard", default=DEFAULT_CONVENTION.guard, choices=["nonempty", "literal"])
    common.add_argument("--origin", default=DEFAULT_CONVENTION.origin, type=int, choices=[0, 1])

    g = sub.add_parser("generate", parents=[common], help="write UIO, coefficient and core-type files")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--lambda", dest="lam", type=_partition_arg, action="append")
    g.set_defaults(func=cmd_generate)

    for name, func, helptext in (
        ("evaluate", cmd_evaluate, "score one model on one (lambda, n) cell"),
        ("report", cmd_report, "score a model on every cell up to --n"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--lambda", dest="lam", type=_partition_arg, action="append")
        p.add_argument("--model", default="general", help=f"one of {', '.join(MODELS)} or file:<path>")
        p.add_argument("--expect", help="golden CSV with columns lambda,n,error,correct,bound")
        p.add_argument("--compute", action="store_true", help="build missing data files")
        p.set_defaults(func=func)

    t = sub.add_parser("train", parents=[common], help="cross-entropy search for a condition graph")
    t.add_argument("--config", required=True)
    t.add_argument("--seed", type=int)
    t.add_argument("--score-mode", choices=["score_1", "score_2", "l1", "lower-bound"])
    t.add_argument("--edge-penalty")
    t.add_argument("--compute", action="store_true", help="build missing data files")
    t.set_defaults(func=cmd_train)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EscherPosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
