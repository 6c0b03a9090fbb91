"""Command line front end.

Inputs are JSON files, ``-`` for standard input, or ``models:NAME`` for a
built-in value.  Exit status: 0 success or true, 1 a check came back false,
2 a usage or parse error, 3 an internal error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import serialize as ser
from .boxtensor import DABimodule, box, box_morphism, box_typewriter, check_da
from .cmdfunctor import cmd_object, uncmd
from .ddcoeff import check_generalized, dd_check, semi_extend
from .errors import ConeIdentificationFailed, NonTerminatingBoxTensor, TwkError
from .kernel.algebra import Algebra, TensorAlgebra, associativity_failures
from .models import FlipModule, bsd_infty, check_flip
from .report import Report
from .typed import Morphism, TypeDStructure, check_structure, cone, equivalence_report, homotopy_check, reduce
from .typewriter import Typewriter, check_typewriter, star

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def load(source: str):
    if source.startswith("models:"):
        return ser.reserved(source[len("models:"):])
    if source == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {source}: {exc.strerror}") from None
    return ser.decode(ser.loads(text))


def _expect(value, types, what: str):
    if not isinstance(value, types):
        raise UsageError(f"{what}: got {type(value).__name__}")
    return value


def verify_value(value) -> Report:
    if isinstance(value, Algebra):
        report = Report()
        for a, b, c in associativity_failures(value):
            report.add(f"associativity fails on ({value.basis[a]}, {value.basis[b]}, {value.basis[c]})")
        return report
    if isinstance(value, Typewriter):
        return check_typewriter(value)
    if isinstance(value, TypeDStructure):
        return dd_check(value) if isinstance(value.algebra, TensorAlgebra) else check_structure(value)
    if isinstance(value, Morphism):
        report = Report()
        if not value.is_closed():
            report.add("morphism is not closed")
        return report
    if isinstance(value, tuple):  # homotopy document
        H, phi, psi = value
        report = Report()
        if not homotopy_check(H, phi, psi):
            report.add("dH != phi + psi")
        return report
    if isinstance(value, DABimodule):
        return check_da(value)
    if isinstance(value, FlipModule):
        return check_flip(value)
    from .ddcoeff import GeneralizedCoefficientSystem

    if isinstance(value, GeneralizedCoefficientSystem):
        return check_generalized(value)
    if isinstance(value, Report):
        return value
    raise UsageError(f"nothing to verify for {type(value).__name__}")


def _emit(doc: dict, out: Optional[str]) -> None:
    text = ser.dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    report = verify_value(load(args.input))
    _emit(ser.encode_report(report), args.output)
    return EXIT_OK if report else EXIT_FALSE


def cmd_cmd(args) -> int:
    M = _expect(load(args.input), Typewriter, "cmd needs a typewriter")
    _emit(ser.encode(cmd_object(M)), args.output)
    return EXIT_OK


def cmd_uncmd(args) -> int:
    M = _expect(load(args.input), TypeDStructure, "uncmd needs a DD bimodule")
    _emit(ser.encode(uncmd(M)), args.output)
    return EXIT_OK


def cmd_cone(args) -> int:
    phi = _expect(load(args.input), Morphism, "cone needs a morphism")
    _emit(ser.encode(cone(phi)), args.output)
    return EXIT_OK


def cmd_reduce(args) -> int:
    N = _expect(load(args.input), TypeDStructure, "reduce needs a typed or dd structure")
    _emit(ser.encode(reduce(N).reduced), args.output)
    return EXIT_OK


def cmd_equiv(args) -> int:
    a = _expect(load(args.left), TypeDStructure, "equiv needs structures")
    b = _expect(load(args.right), TypeDStructure, "equiv needs structures")
    report = equivalence_report(a, b)
    _emit(ser.encode_report(report, equivalent=report.ok), args.output)
    return EXIT_OK if report else EXIT_FALSE


def cmd_box(args) -> int:
    P = _expect(load(args.da), DABimodule, "box needs a DA bimodule first")
    X = load(args.input)
    cap = args.cap
    if isinstance(X, Typewriter):
        out = box_typewriter(P, X, cap)
    elif isinstance(X, TypeDStructure):
        out = box(P, X, cap)
    elif isinstance(X, Morphism):
        out = box_morphism(P, X, cap)
    else:
        raise UsageError("box pairs with a structure, morphism or typewriter")
    _emit(ser.encode(out), args.output)
    return EXIT_OK


def cmd_star(args) -> int:
    a = _expect(load(args.left), Typewriter, "star needs typewriters")
    b = _expect(load(args.right), Typewriter, "star needs typewriters")
    out = star(a, b)
    _emit(ser.encode(out), args.output)
    if not out.report:
        sys.stderr.write("star: " + "; ".join(out.report.violations) + "\n")
        return EXIT_FALSE
    return EXIT_OK


def cmd_semiextend(args) -> int:
    M = _expect(load(args.input), TypeDStructure, "semiextend needs a DD bimodule")
    G = semi_extend(M)
    if G is None:
        report = Report(["no generalized coefficient system exists"])
        _emit(ser.encode_report(report), args.output)
        return EXIT_FALSE
    _emit(ser.encode(G), args.output)
    return EXIT_OK


def cmd_flip(args) -> int:
    F = _expect(load(args.input), FlipModule, "flip needs a flip module")
    if args.typewriter:
        from .models import div_functor

        _emit(ser.encode(div_functor(F)), args.output)
    else:
        _emit(ser.encode(bsd_infty(F)), args.output)
    return EXIT_OK


def cmd_models(args) -> int:
    if args.name is None:
        doc = ser.encode_report(Report(), names=sorted(ser.RESERVED))
        _emit(doc, args.output)
        return EXIT_OK
    _emit(ser.encode(ser.reserved(args.name)), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, inputs=("input",)):
        p = sub.add_parser(name, help=help_text)
        for inp in inputs:
            p.add_argument(inp)
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        p.set_defaults(func=func)
        return p

    add("verify", cmd_verify, "run the structure check for any document")
    add("cmd", cmd_cmd, "typewriter to DD bimodule")
    add("uncmd", cmd_uncmd, "DD bimodule to typewriter")
    add("cone", cmd_cone, "mapping cone of a closed morphism")
    add("reduce", cmd_reduce, "cancel idempotent arrows")
    add("equiv", cmd_equiv, "decide homotopy equivalence", ("left", "right"))
    p = add("box", cmd_box, "box tensor with a DA bimodule", ("da", "input"))
    p.add_argument("--cap", type=int, default=None, help="path expansion bound (default 64 or $TWK_CAP)")
    add("star", cmd_star, "stack two typewriters", ("left", "right"))
    add("semiextend", cmd_semiextend, "solve for generalized coefficient maps")
    p = add("flip", cmd_flip, "BSD-infinity of a flip module")
    p.add_argument("--typewriter", action="store_true", help="emit the typewriter instead")
    p = sub.add_parser("models", help="list or print built-in values")
    p.add_argument("name", nargs="?")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_models)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ser.ParseError) as exc:
        sys.stderr.write(f"twk: {exc}\n")
        return EXIT_USAGE
    except NonTerminatingBoxTensor as exc:
        sys.stderr.write(f"twk: {exc}\n")
        return EXIT_FALSE
    except ConeIdentificationFailed as exc:
        sys.stderr.write(f"twk: internal error: {exc}\n")
        return EXIT_INTERNAL
    except (TwkError, ValueError) as exc:
        sys.stderr.write(f"twk: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - last-resort guard maps to the internal-error status
        sys.stderr.write(f"twk: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
