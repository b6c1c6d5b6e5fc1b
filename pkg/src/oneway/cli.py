"""Command-line interface: ``oneway <subcommand> ...``.

Exit codes: ``0`` success, ``1`` verification, validation or bound
failure, ``2`` usage or format error.  A file argument of ``-`` means
standard input, and ``-o -`` (the default) standard output.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, Sequence

import numpy as np

from .angles import parse_angle
from .circuit import CircuitError
from .cluster import ClusterError, format_decomposition, parse_decomposition, validate_decomposition
from .formats import FormatError, read_text, write_text
from .patterns import (
    Composer,
    MeasurementPattern,
    PatternError,
    adder_circuit,
    circuit_adder,
    circuit_qft,
    decomposition_of,
    distant_cnot_composer,
    euler_chain_9,
    format_pattern,
    gate_carry,
    gate_cnot15,
    gate_controlled_phase,
    gate_crossing,
    gate_distant_cnot,
    gate_hadamard,
    gate_hamiltonian_zn,
    gate_identity_wire,
    gate_phase_s,
    gate_rot_euler,
    gate_rot_x,
    gate_rot_z,
    gate_swap_n,
    gate_toffoli_phase,
    parse_pattern,
    qft_composer,
)
from .runtime import (
    RunError,
    _product_input,
    _tableau_prepare,
    build_schedule,
    execute,
    execute_split,
    resolve_seed,
    resource_report,
)
from .stabilizer import TableauError, extract_graph_state, format_graph_description
from .symbolic import DerivationError
from .verifier import verify

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad arguments detected after parsing."""


# ---------------------------------------------------------------------------
# gen


def _need_n(a: argparse.Namespace, default: int | None = None) -> int:
    n = a.n if a.n is not None else default
    if n is None:
        raise UsageError(f"gate {a.gate!r} needs -n")
    return n


def _angle(a: argparse.Namespace, name: str, default: str) -> float:
    v = getattr(a, name)
    return parse_angle(v if v is not None else default)


GATES: dict[str, Callable[[argparse.Namespace], MeasurementPattern]] = {
    "identity": lambda a: gate_identity_wire(_need_n(a, 2)),
    "rotx": lambda a: gate_rot_x(_angle(a, "angle", "pi/4")),
    "rotz": lambda a: gate_rot_z(_angle(a, "angle", "pi/4")),
    "euler": lambda a: gate_rot_euler(_angle(a, "xi", "pi/4"), _angle(a, "eta", "pi/4"), _angle(a, "zeta", "pi/4")),
    "euler9": lambda a: euler_chain_9(_angle(a, "xi", "pi/4"), _angle(a, "eta", "pi/4"), _angle(a, "zeta", "pi/4")),
    "hadamard": lambda a: gate_hadamard(),
    "phase": lambda a: gate_phase_s(),
    "cnot15": lambda a: gate_cnot15(a.mirrored),
    "swap": lambda a: gate_swap_n(_need_n(a, 2)),
    "hamiltonian": lambda a: gate_hamiltonian_zn(_need_n(a, 4), _angle(a, "angle", "pi/4")),
    "cpg": lambda a: gate_controlled_phase(_angle(a, "angle", "pi/2")),
    "crossing": lambda a: gate_crossing(),
    "toffoli": lambda a: gate_toffoli_phase(_angle(a, "angle", "pi")),
    "carry": lambda a: gate_carry(),
    "distant-cnot": lambda a: gate_distant_cnot(_need_n(a, 1)),
    "qft": lambda a: circuit_qft(_need_n(a), elide=not a.no_elide),
    "adder": lambda a: circuit_adder(_need_n(a), elide=not a.no_elide),
}


def _decomposition_text(a: argparse.Namespace) -> str:
    if a.gate == "qft":
        comp = qft_composer(_need_n(a))
    elif a.gate == "adder":
        c, _ = adder_circuit(_need_n(a))
        comp = Composer(c.n)
        comp.add_circuit(c)
    elif a.gate == "distant-cnot":
        comp = distant_cnot_composer(max(1, _need_n(a, 1)))
    else:
        raise UsageError("--decomposition is available for qft, adder and distant-cnot")
    whole = comp.build(a.gate)
    return format_decomposition(decomposition_of(comp.parts, whole))


def cmd_gen(a: argparse.Namespace) -> int:
    if a.gate not in GATES:
        raise UsageError(f"unknown gate {a.gate!r}; choose from {', '.join(sorted(GATES))}")
    if a.decomposition:
        write_text(a.output, _decomposition_text(a))
        return EXIT_OK
    p = GATES[a.gate](a)
    write_text(a.output, format_pattern(p))
    return EXIT_OK


# ---------------------------------------------------------------------------
# pattern commands


def _load(path: str) -> MeasurementPattern:
    return parse_pattern(read_text(path), base_dir=None if path == "-" else _dirname(path))


def _dirname(path: str) -> str:
    return os.path.dirname(os.path.abspath(path))


def _branch(p: MeasurementPattern, bits: str) -> dict:
    if any(c not in "01" for c in bits):
        raise UsageError("--branch takes a string of 0 and 1")
    measured = p.measured_sites()
    free = p.free_sites()
    if len(bits) == len(measured):
        return {s: int(b) for s, b in zip(measured, bits)}
    if len(bits) == len(free):
        return p.complete_outcomes({s: int(b) for s, b in zip(free, bits)})
    raise UsageError(
        f"--branch needs {len(free)} bits (free sites) or {len(measured)} bits (all measured sites)"
    )


def cmd_run(a: argparse.Namespace) -> int:
    p = _load(a.pattern)
    forced = _branch(p, a.branch) if a.branch else None
    inp = a.input
    if a.window is not None:
        rec = execute_split(p, a.window, seed=a.seed, forced=forced, input_state=_input_vector(p, inp))
    else:
        rec = execute(p, engine=a.engine, seed=a.seed, forced=forced, input_state=inp)
    sys.stdout.write(rec.render())
    return EXIT_OK


def _input_vector(p: MeasurementPattern, label: str | None):
    if label is None:
        return None
    if _product_input(p, label) is None:
        raise UsageError("--input must be a label over 0 1 + -")
    return label


def cmd_verify(a: argparse.Namespace) -> int:
    p = _load(a.pattern)
    if a.exhaustive:
        rep = verify(p, seed=resolve_seed(a.seed), exhaustive_limit=2 ** 62)
    else:
        samples = a.samples if a.samples is not None else 256
        limit = 4096 if a.samples is None else 0
        rep = verify(p, seed=resolve_seed(a.seed), exhaustive_limit=limit, samples=samples)
    sys.stdout.write(rep.render(claims=not a.summary, oracle=a.oracle))
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_schedule(a: argparse.Namespace) -> int:
    p = _load(a.pattern)
    sys.stdout.write(build_schedule(p).render())
    return EXIT_OK


def cmd_reduce(a: argparse.Namespace) -> int:
    p = _load(a.pattern)
    labels = _product_input(p, a.input) if a.input is not None else ["+"] * p.n
    if labels is None:
        raise UsageError("--input must be a label over 0 1 + -")
    forced = _branch(p, a.branch) if a.branch else {}
    rng = np.random.default_rng(resolve_seed(a.seed))
    t = _tableau_prepare(p, labels)
    sched = build_schedule(p)
    for s in sched.rounds[0] if sched.rounds else []:
        t.measure_pauli(s, p.bases[s].kind, forced.get(s), rng, discard=True)
    write_text(a.output, format_graph_description(extract_graph_state(t)))
    return EXIT_OK


def cmd_validate(a: argparse.Namespace) -> int:
    d = parse_decomposition(read_text(a.decomposition))
    rep = validate_decomposition(d)
    sys.stdout.write(rep.render())
    sys.stdout.write(f"summary {'pass' if rep.ok else 'fail'}\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_resources(a: argparse.Namespace) -> int:
    p = _load(a.pattern)
    rep = resource_report(p)
    sys.stdout.write(rep.render())
    return EXIT_OK if rep.ok else EXIT_FAIL


def render_grid(p: MeasurementPattern) -> str:
    """ASCII picture of each ``z`` layer: rows are ``y``, columns are ``x``.

    ``.`` vacant, ``I``/``O`` input and output sites, ``X``/``Y``/``Z``
    Pauli measurements and ``A`` adaptive (tilted) measurements.
    """
    sites = list(p.cluster.sites)
    xs = [s[0] for s in sites]
    ys = [s[1] for s in sites]
    zs = sorted({s[2] for s in sites})
    ins, outs = set(p.inputs), set(p.outputs)
    out = [f"pattern {p.name or '-'}"]
    for z in zs:
        if len(zs) > 1:
            out.append(f"layer z={z}")
        for y in range(min(ys), max(ys) + 1):
            row = []
            for x in range(min(xs), max(xs) + 1):
                s = (x, y, z)
                if s not in p.cluster.sites:
                    row.append(".")
                elif s in ins:
                    row.append("I")
                elif s in outs:
                    row.append("O")
                elif p.bases[s].kind == "XY":
                    row.append("A")
                else:
                    row.append(p.bases[s].kind)
            out.append("".join(row).rstrip("."))
    return "\n".join(out) + "\n"


def cmd_render(a: argparse.Namespace) -> int:
    sys.stdout.write(render_grid(_load(a.pattern)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oneway", description="One-way quantum computer simulator and verifier.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a library pattern")
    g.add_argument("gate", help="library gate name: " + ", ".join(sorted(GATES)))
    g.add_argument("-n", type=int, help="size parameter (wires, bits, length or separation)")
    g.add_argument("--angle", help="rotation or phase angle, e.g. pi/4")
    g.add_argument("--xi")
    g.add_argument("--eta")
    g.add_argument("--zeta")
    g.add_argument("--mirrored", action="store_true", help="cnot15 with control below target")
    g.add_argument("--no-elide", action="store_true", help="keep removable X pairs in qft and adder")
    g.add_argument("--decomposition", action="store_true", help="emit the composition's decomposition instead")
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="execute a pattern once")
    r.add_argument("pattern")
    sel = r.add_mutually_exclusive_group()
    sel.add_argument("--seed", type=int)
    sel.add_argument("--branch", help="outcome bits for the free sites or for all measured sites")
    r.add_argument("--engine", default="auto", choices=["auto", "tableau", "dense", "hybrid"])
    r.add_argument("--window", type=int, help="split execution with at most this many active qubits")
    r.add_argument("--input", help="product input label over 0 1 + - (default all +)")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check the claimed circuit on all or sampled branches")
    v.add_argument("pattern")
    mode = v.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--summary", action="store_true", help="omit per-claim lines")
    v.add_argument("--oracle", action="store_true", help="also print per-input oracle lines")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("schedule", help="print measurement rounds")
    s.add_argument("pattern")
    s.set_defaults(func=cmd_schedule)

    d = sub.add_parser("reduce", help="measure the Pauli round and print the residual graph state")
    d.add_argument("pattern")
    d.add_argument("--seed", type=int)
    d.add_argument("--branch")
    d.add_argument("--input")
    d.add_argument("-o", "--output", default="-")
    d.set_defaults(func=cmd_reduce)

    val = sub.add_parser("validate", help="check a cluster decomposition")
    val.add_argument("decomposition")
    val.set_defaults(func=cmd_validate)

    res = sub.add_parser("resources", help="S, O, T and the overhead bounds")
    res.add_argument("pattern")
    res.set_defaults(func=cmd_resources)

    ren = sub.add_parser("render", help="ASCII picture of the pattern")
    ren.add_argument("pattern")
    ren.set_defaults(func=cmd_render)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE
    try:
        return a.func(a)
    except (RunError, TableauError) as e:
        print(f"oneway: error: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, FormatError, PatternError, CircuitError, ClusterError, DerivationError, ValueError) as e:
        print(f"oneway: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"oneway: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
