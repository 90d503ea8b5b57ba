"""``ovc`` command line.

Exit codes: 0 all constraints satisfied (or command succeeded), 1 error,
2 some constraint violated, 3 some constraint undefined and none violated.
Usage errors also exit 1 so that 2 and 3 always describe a report.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import signal
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Sequence

from filelock import FileLock, Timeout

from . import demo
from .aas import NotAProperty, Property, Repository
from .errors import OvcError
from .export import export_ecore_subset, export_xmi_subset
from .model import parse_scalar
from .pipeline import PipelineConfig, fetch_instance_model, fetch_type_model, latest_report, run_pipeline
from .report import ValidationReport, render_json, render_text

LOCK_NAME = ".ovc.lock"
DEFAULT_BIND = "127.0.0.1:8080"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2
EXIT_UNDEFINED = 3


class CliError(OvcError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    store = _Parser(add_help=False)
    store.add_argument(
        "--store",
        default=os.environ.get("OVC_STORE"),
        help="persistence directory (default: $OVC_STORE)",
    )
    ids = _Parser(add_help=False)
    ids.add_argument("--info-submodel", default=demo.INFO_SUBMODEL_ID, help="submodel holding the AML files")
    ids.add_argument("--constraint-submodel", default=demo.CONSTRAINT_SUBMODEL_ID, help="submodel holding the OCL file")
    ids.add_argument("--result-submodel", default=demo.RESULT_SUBMODEL_ID, help="submodel receiving reports")

    parser = _Parser(prog="ovc", description="Validate AAS-held engineering models against OCL invariants.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug output to stderr")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = commands.add_parser("serve", parents=[store, ids], help="run the HTTP service")
    p.add_argument("--bind", default=os.environ.get("OVC_BIND", DEFAULT_BIND), help="host:port (default: $OVC_BIND or %(default)s)")

    p = commands.add_parser("seed-demo", parents=[store], help="create the demo shells and submodels")
    p.add_argument("--variant", choices=demo.VARIANTS, default="successful")

    p = commands.add_parser("validate", parents=[store, ids], help="run the validation pipeline and print the report")
    p.add_argument("--instance", metavar="IDSHORT", help="File element holding the AML instance model")

    p = commands.add_parser("set-prop", parents=[store], help="set a Property value")
    p.add_argument("submodel_id", metavar="SUBMODEL_ID")
    p.add_argument("id_short_path", metavar="ID_SHORT_PATH")
    p.add_argument("value", metavar="VALUE", help="parsed according to the Property's valueType")

    p = commands.add_parser("report", parents=[store, ids], help="print the latest stored report")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = commands.add_parser("export", parents=[store, ids], help="write the Ecore or XMI interchange file")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--ecore", dest="kind", action="store_const", const="ecore", help="type model as Ecore subset")
    kind.add_argument("--xmi", dest="kind", action="store_const", const="xmi", help="static instance model as XMI subset")
    p.add_argument("--instance", metavar="IDSHORT", help="File element holding the AML instance model")
    p.add_argument("out", metavar="OUT", type=Path)
    return parser


def _config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig(args.info_submodel, args.constraint_submodel, args.result_submodel)
    if getattr(args, "instance", None):
        cfg = dataclasses.replace(cfg, instance_file_id_short=args.instance)
    return cfg


@contextmanager
def store_lock(store: Path) -> Iterator[None]:
    """Hold the store's writer lock; fails at once if another process has it."""
    try:
        store.mkdir(parents=True, exist_ok=True)
        lock = FileLock(str(store / LOCK_NAME), timeout=0)
        lock.acquire()
    except Timeout:
        raise CliError(f"store {store} is locked by another writer ({LOCK_NAME} is held)") from None
    except OSError as exc:
        raise CliError(f"cannot use store {store}: {exc}") from exc
    try:
        yield
    finally:
        lock.release()


def exit_code(report: ValidationReport) -> int:
    if report.summary.violated:
        return EXIT_VIOLATED
    if report.summary.undefined:
        return EXIT_UNDEFINED
    return EXIT_OK


def _serve(store: Path, args: argparse.Namespace) -> int:
    from .service import serve

    with store_lock(store):
        repo = Repository.open(store)
        handle = serve(repo, args.bind, _config(args))

        def stop(signum: int, frame: object) -> None:
            raise KeyboardInterrupt

        previous = signal.signal(signal.SIGTERM, stop)
        print(f"serving {handle.url}", flush=True)
        try:
            while not handle.wait(0.5):
                pass
        except KeyboardInterrupt:
            pass
        finally:
            handle.shutdown()
            signal.signal(signal.SIGTERM, previous)
    return EXIT_OK


def _run(args: argparse.Namespace) -> int:
    if not args.store:
        raise CliError("no store given (use --store or set OVC_STORE)")
    store = Path(args.store)
    out = sys.stdout

    if args.command == "serve":
        return _serve(store, args)

    if args.command == "seed-demo":
        with store_lock(store):
            repo = Repository.open(store)
            demo.seed_demo(repo, args.variant)
        print(f"seeded {args.variant} demo into {store}: {len(repo.shells())} shells, {len(repo.submodels())} submodels", file=out)
        return EXIT_OK

    if args.command == "validate":
        with store_lock(store):
            report = run_pipeline(Repository.open(store), _config(args))
        out.write(render_text(report))
        return exit_code(report)

    if args.command == "set-prop":
        with store_lock(store):
            repo = Repository.open(store)
            element = repo.get_element(args.submodel_id, args.id_short_path)
            if not isinstance(element, Property):
                raise NotAProperty(f"{args.id_short_path!r} is a {type(element).__name__}, not a Property")
            try:
                value = parse_scalar(element.value_type, args.value)
            except ValueError as exc:
                raise CliError(f"{args.value!r} is not a valid {element.value_type.value}: {exc}") from None
            updated = repo.set_property_value(args.submodel_id, args.id_short_path, value)
        print(f"{args.id_short_path} = {updated.value!r}", file=out)
        return EXIT_OK

    repo = Repository.open(store)
    cfg = _config(args)
    if args.command == "report":
        report = latest_report(repo, cfg)
        if report is None:
            raise CliError("no report yet")
        out.write(render_json(report) if args.format == "json" else render_text(report))
        return EXIT_OK

    # export
    tm = fetch_type_model(repo, cfg)
    data = export_ecore_subset(tm) if args.kind == "ecore" else export_xmi_subset(fetch_instance_model(repo, cfg, tm))
    try:
        args.out.write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {len(data)} bytes to {args.out}", file=out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (OvcError, ValueError) as exc:
        print(f"ovc: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
