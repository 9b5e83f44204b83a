"""Command-line front end.

Every subcommand writes records to stdout. ``--format machine`` emits one
``key=value`` record per line (keys match ``[A-Za-z_][A-Za-z0-9_]*``, values never
contain whitespace or ``=``) and ends with a single ``record=summary`` line.
Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from functools import reduce
from typing import Iterable, Sequence, TextIO

from . import __version__, acceptance, arith
from .errors import MultiquadError
from .galois import build_group, cancellation, degree, frobenius
from .oracle import DEFAULT_PMAX, DEFAULT_TOLERANCE, empirical_pattern_sum
from .patterns import (
    ResidueClass,
    SignPattern,
    count_pattern_group,
    enumerate_pattern_group,
    feasible_patterns,
    main_term_constant,
)
from .subsetlat import (
    ProblemInstance,
    SubgroupClass,
    active_class,
    coset_decomposition,
    subgroup,
)

COMMANDS = (
    "degree",
    "group",
    "frobenius",
    "feasible",
    "density",
    "count-patterns",
    "cosets",
    "cancellation",
    "verify",
)

_KEY = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_BAD_VALUE = re.compile(r"[\s=]")
# options whose value may start with '-' (negative integers)
_SIGNED_OPTS = ("-S", "--set", "--theta", "--moduli", "-d", "-f")


class UsageError(Exception):
    pass


def format_record(pairs: Sequence[tuple[str, object]]) -> str:
    out = []
    for key, value in pairs:
        if not _KEY.match(key):
            raise ValueError(f"bad record key {key!r}")
        text = _format_value(value)
        if _BAD_VALUE.search(text):
            raise ValueError(f"value for {key} contains a separator: {text!r}")
        out.append(f"{key}={text}")
    return " ".join(out)


def _format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}" if math.isfinite(value) else str(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def parse_record(line: str) -> dict[str, str]:
    """Inverse of ``format_record`` (values stay strings)."""
    record = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep or not _KEY.match(key) or "=" in value:
            raise ValueError(f"malformed token {token!r}")
        record[key] = value
    return record


def _subset_text(S: Sequence[int], T: int) -> str:
    return "{" + ",".join(str(a) for i, a in enumerate(S) if T >> i & 1) + "}"


class Emitter:
    def __init__(self, fmt: str, stream: TextIO, command: str):
        self.fmt = fmt
        self.stream = stream
        self.command = command
        self.count = 0

    def record(self, kind: str, *pairs: tuple[str, object], text: str | None = None) -> None:
        self.count += 1
        if self.fmt == "machine":
            self.stream.write(format_record([("record", kind), *pairs]) + "\n")
        else:
            if text is None:
                text = "  ".join(f"{k}: {_format_value(v)}" for k, v in pairs)
            self.stream.write(text + "\n")

    def summary(self, status: str, *pairs: tuple[str, object]) -> None:
        if self.fmt == "machine":
            self.stream.write(
                format_record([("record", "summary"), ("command", self.command), ("status", status), ("records", self.count), *pairs])
                + "\n"
            )


def _int_list(text: str, field: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    out = []
    for pos, tok in enumerate(text.split(","), 1):
        tok = tok.strip()
        try:
            out.append(int(tok))
        except ValueError:
            raise UsageError(f"{field}: item {pos} ({tok!r}) is not an integer") from None
    return out


def _parse_S(text: str | None) -> tuple[int, ...]:
    if text is None:
        raise UsageError("-S: a comma-separated list of non-zero integers is required")
    S = _int_list(text, "-S")
    for pos, a in enumerate(S, 1):
        if a == 0:
            raise UsageError(f"-S: item {pos} is zero")
    return tuple(S)


def _parse_theta(text: str | None, n: int) -> SignPattern | None:
    if text is None:
        return None
    toks = [t.strip() for t in text.split(",")] if text.strip() else []
    signs = []
    for pos, tok in enumerate(toks, 1):
        if tok in ("+1", "1"):
            signs.append(1)
        elif tok == "-1":
            signs.append(-1)
        else:
            raise UsageError(f"--theta: item {pos} ({tok!r}) must be +1, 1 or -1")
    if len(signs) != n:
        raise UsageError(f"--theta: {len(signs)} signs given but -S has {n} elements")
    return SignPattern(tuple(signs))


def _modulus(args: argparse.Namespace, default: int | None = None) -> int:
    if args.moduli is not None:
        if args.d is not None:
            raise UsageError("give either -d or --moduli, not both")
        moduli = _int_list(args.moduli, "--moduli")
        if not moduli:
            raise UsageError("--moduli: at least one modulus is required")
        if any(m < 1 for m in moduli):
            raise UsageError("--moduli: moduli must be positive")
        return reduce(math.lcm, moduli)
    if args.d is None:
        if default is None:
            raise UsageError("-d: a positive modulus is required")
        return default
    if args.d < 1:
        raise UsageError("-d: modulus must be positive")
    return args.d


def _instance(args: argparse.Namespace, default_d: int | None = None) -> ProblemInstance:
    return ProblemInstance(_parse_S(args.S), _modulus(args, default_d))


def _need_f(args: argparse.Namespace) -> int:
    if args.f is None:
        raise UsageError("-f: a residue class representative is required")
    return args.f


def _inst_pairs(inst: ProblemInstance) -> list[tuple[str, object]]:
    return [("S", list(inst.S) or "-"), ("d", inst.d)]


def cmd_degree(args, out: Emitter) -> int:
    inst = _instance(args)
    deg = degree(inst)
    sub = subgroup(inst, active_class(inst.d))
    out.record(
        "degree",
        *_inst_pairs(inst),
        ("degree", deg),
        ("phi", arith.euler_phi(inst.d)),
        ("active", sub.cls),
        ("subgroup_order", len(sub)),
        text=f"[K:Q] = {deg}   (2^{inst.n} * phi({inst.d}) / |{sub.cls}| = {1 << inst.n} * {arith.euler_phi(inst.d)} / {len(sub)})",
    )
    out.summary("ok", ("degree", deg))
    return 0


def cmd_group(args, out: Emitter) -> int:
    inst = _instance(args)
    group = build_group(inst)
    for g in group:
        out.record("element", ("f", g.f), ("signs", str(g.signs) or "-"), text=f"zeta -> zeta^{g.f}   signs {g.signs}")
    out.summary("ok", ("order", group.order))
    if out.fmt != "machine":
        out.stream.write(f"order {group.order}\n")
    return 0


def cmd_frobenius(args, out: Emitter) -> int:
    inst = _instance(args)
    if args.p is None:
        raise UsageError("-p: a prime is required")
    g = frobenius(inst, args.p)
    out.record("frobenius", ("p", args.p), ("f", g.f), ("signs", str(g.signs) or "-"), text=f"Frob_{args.p}: zeta -> zeta^{g.f}   signs {g.signs}")
    out.summary("ok")
    return 0


def _pattern_record(out: Emitter, inst: ProblemInstance, sp: SignPattern, rc: ResidueClass) -> None:
    res = main_term_constant(inst, sp, rc)
    out.record(
        "pattern",
        ("f", rc.f),
        ("theta", str(sp) or "-"),
        ("feasible", res.feasible),
        ("C", res.constant_C),
        ("density", f"{res.density_numerator}/{res.density_denominator}"),
        ("active", res.active),
    )


def cmd_feasible(args, out: Emitter) -> int:
    inst = _instance(args)
    rc = ResidueClass(_need_f(args), inst.d)
    sp = _parse_theta(args.theta, inst.n)
    if sp is None:
        raise UsageError("--theta: a sign pattern is required")
    res = main_term_constant(inst, sp, rc)
    out.record("feasible", ("f", rc.f), ("theta", str(sp) or "-"), ("feasible", res.feasible), ("C", res.constant_C))
    out.summary("ok", ("feasible", res.feasible))
    return 0


def cmd_density(args, out: Emitter) -> int:
    inst = _instance(args)
    rc = ResidueClass(_need_f(args), inst.d)
    sp = _parse_theta(args.theta, inst.n)
    patterns = [sp] if sp is not None else feasible_patterns(inst, rc)
    for pattern in patterns:
        _pattern_record(out, inst, pattern, rc)
        if args.N is not None:
            rep = empirical_pattern_sum(inst, pattern, rc, args.N, args.tolerance)
            out.record(
                "empirical",
                ("f", rc.f),
                ("theta", str(pattern) or "-"),
                ("N", rep.N),
                ("prime_count", rep.prime_count),
                ("expected_count", rep.expected_count),
                ("log_weighted_sum", rep.log_weighted_sum),
                ("theory_main_term", rep.theory_main_term),
                ("relative_error", rep.relative_error),
                ("tolerance", rep.tolerance),
                ("verdict", rep.verdict),
                ("excluded", rep.excluded),
            )
    out.summary("ok", ("patterns", len(patterns)))
    return 0


def cmd_count_patterns(args, out: Emitter) -> int:
    inst = _instance(args)
    count = count_pattern_group(inst)
    pairs = [*_inst_pairs(inst), ("count", count)]
    if args.enumerate:
        pairs.append(("enumerated", len(enumerate_pattern_group(inst))))
    out.record("count", *pairs)
    out.summary("ok", ("count", count))
    return 0


def cmd_cosets(args, out: Emitter) -> int:
    cls = SubgroupClass(args.cls)
    inst = _instance(args, default_d=1 if cls is SubgroupClass.H else None)
    dec = coset_decomposition(inst, subgroup(inst, cls))
    for c in dec.cosets:
        out.record(
            "coset",
            ("representative", c.representative),
            ("rep_subset", _subset_text(inst.S, c.representative)),
            ("members", list(c.members)),
            ("common_sqf", "-" if c.common_sqf is None else c.common_sqf),
        )
    out.summary("ok", ("subgroup", cls), ("subgroup_order", len(dec.subgroup)), ("cosets", len(dec)))
    return 0


def cmd_cancellation(args, out: Emitter) -> int:
    inst = _instance(args)
    rep = cancellation(inst)
    out.record(
        "cancellation",
        *_inst_pairs(inst),
        ("degree", rep.degree),
        ("h_order", rep.h_order),
        ("quotient_order", rep.quotient_order),
        ("full", rep.full),
        ("holds", rep.holds),
    )
    out.summary("ok", ("degree", rep.degree))
    return 0


def cmd_verify(args, out: Emitter) -> int:
    results = acceptance.run_all(p_max=args.pmax, verbose=not args.quiet)
    for r in results:
        out.record(
            "check",
            ("criterion", r.number),
            ("name", r.title.replace(" ", "_")),
            ("passed", r.passed),
            ("seconds", round(r.seconds, 3)),
            text=r.line(),
        )
        for msg in r.failures[:5]:
            print(f"  criterion {r.number}: {msg}", file=sys.stderr)
    ok = all(r.passed for r in results)
    out.summary("ok" if ok else "fail", ("passed", sum(r.passed for r in results)), ("total", len(results)))
    return 0 if ok else 1


HANDLERS = {
    "degree": cmd_degree,
    "group": cmd_group,
    "frobenius": cmd_frobenius,
    "feasible": cmd_feasible,
    "density": cmd_density,
    "count-patterns": cmd_count_patterns,
    "cosets": cmd_cosets,
    "cancellation": cmd_cancellation,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--out", metavar="PATH", help="also write the report to PATH")

    inst = argparse.ArgumentParser(add_help=False)
    inst.add_argument("-S", "--set", dest="S", metavar="A1,A2,...", help="comma-separated non-zero integers")
    inst.add_argument("-d", type=int, help="modulus d")
    inst.add_argument("--moduli", metavar="D1,D2,...", help="use d = lcm of these moduli")

    pattern = argparse.ArgumentParser(add_help=False)
    pattern.add_argument("-f", type=int, help="residue class f mod d")
    pattern.add_argument("--theta", metavar="S1,S2,...", help="signs, each +1 or -1")

    parser = argparse.ArgumentParser(prog="multiquad", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    sub.add_parser("degree", parents=[common, inst], help="field degree [K:Q]")
    sub.add_parser("group", parents=[common, inst], help="list the Galois group")
    p = sub.add_parser("frobenius", parents=[common, inst], help="Frobenius element at a prime")
    p.add_argument("-p", type=int, help="unramified odd prime")
    sub.add_parser("feasible", parents=[common, inst, pattern], help="is a residue pattern realizable in f mod d")
    p = sub.add_parser("density", parents=[common, inst, pattern], help="exact pattern densities")
    p.add_argument("-N", type=int, help="also tally primes in (N, 2N]")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p = sub.add_parser("count-patterns", parents=[common, inst], help="size of the group of admissible (f, theta)")
    p.add_argument("--enumerate", action="store_true", help="also enumerate and report the size")
    p = sub.add_parser("cosets", parents=[common, inst], help="coset decomposition of P(S)")
    p.add_argument("--class", dest="cls", choices=[c.value for c in SubgroupClass], default="H")
    sub.add_parser("cancellation", parents=[common, inst], help="split the degree drop into |H| and |D_i/H|")
    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("--pmax", type=int, default=DEFAULT_PMAX, help="prime bound (env MULTIQUAD_PMAX)")
    p.add_argument("--quiet", action="store_true", help="no progress on stderr")
    return parser


def _join_signed(argv: Iterable[str]) -> list[str]:
    """Rewrite ``-S -1,2`` as ``-S=-1,2`` so argparse does not read a flag."""
    argv = list(argv)
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _SIGNED_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2].isdigit():
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


class _Tee:
    def __init__(self, *streams: TextIO):
        self.streams = streams

    def write(self, text: str) -> None:
        for s in self.streams:
            s.write(text)


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        parser.print_usage(sys.stderr)
        print(f"multiquad: unknown command {argv[0]!r}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(_join_signed(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    handle = None
    stream: TextIO = stdout
    try:
        if args.out:
            handle = open(args.out, "w")
            stream = _Tee(stdout, handle)
        out = Emitter(args.format, stream, args.command)
        return HANDLERS[args.command](args, out)
    except UsageError as exc:
        print(f"multiquad {args.command}: {exc}", file=sys.stderr)
        return 2
    except MultiquadError as exc:
        print(f"multiquad {args.command}: error: {exc}", file=sys.stderr)
        if args.format == "machine":
            stdout.write(format_record([("record", "summary"), ("command", args.command), ("status", "error"), ("records", 0)]) + "\n")
        return 1
    finally:
        if handle is not None:
            handle.close()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
