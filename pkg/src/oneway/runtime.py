"""Executing measurement patterns: scheduling, engines and resource counts.

A run measures every non-output site, choosing each adaptive angle from
earlier outcomes, then reads the outputs out in the Z basis and
corrects the readout with the byproduct.  Three engines are available:

``tableau``
    Clifford patterns with stabilizer (product) inputs.
``dense``
    Windowed state-vector execution: sites are entangled lazily, so only
    the sites between the measured and the unmeasured regions are active.
``hybrid``
    The Pauli round runs on the tableau; the remaining graph state is
    extracted and the adaptive rounds run on the windowed dense engine.

``auto`` picks ``tableau`` for Clifford patterns, ``hybrid`` for other
patterns with product inputs and ``dense`` otherwise.
"""

from __future__ import annotations

import heapq
import math
import os
import time
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from .byproduct import ByproductOperator, InfoFlowVector, reinterpret_readout
from .patterns import MeasurementPattern, PatternError, evaluate
from .pauli import qubit_key
from .stabilizer import StabilizerTableau, extract_graph_state, lc_gates
from .statevector import DenseState, DenseStateError, WindowedExecutor

Site = Hashable

DEFAULT_CAPACITY = 24
UNIFORM_TOL = 1e-9


class RunError(RuntimeError):
    """A run could not be carried out."""


class CapacityError(RunError):
    """The dense window would exceed the allowed number of active qubits."""


def resolve_seed(seed: int | None) -> int:
    """``seed`` if given, else ``$ONEWAY_SEED``, else 0."""
    if seed is not None:
        return int(seed)
    env = os.environ.get("ONEWAY_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise RunError(f"ONEWAY_SEED is not an integer: {env!r}") from None
    return 0


# ---------------------------------------------------------------------------
# scheduling


@dataclass
class Schedule:
    """Measurement rounds ``Q_0, Q_1, ...``.

    ``Q_0`` holds the Pauli measurements; an adaptive site goes one round
    after the latest adaptive site it depends on (and never into ``Q_0``).
    """

    rounds: list[list[Site]]
    round_of: dict[Site, int]
    forward_cones: dict[Site, set[Site]]

    @property
    def depth(self) -> int:
        """Number of non-empty rounds (at least 1)."""
        return max(1, sum(1 for r in self.rounds if r))

    def render(self) -> str:
        from .parity import render_var

        lines = []
        for t, r in enumerate(self.rounds):
            lines.append(f"round {t} " + " ".join(render_var(s) for s in r))
        lines.append(f"T={self.depth}")
        return "\n".join(lines) + "\n"


def build_schedule(p: MeasurementPattern) -> Schedule:
    """Longest-path layering of the forward-cone order.

    Raises
    ------
    PatternError
        On a dependency cycle or a dependency on an unmeasured site.
    """
    fc = p.forward_cones()
    rnd: dict = {}
    visiting: set = set()

    def level(s) -> int:
        if s in rnd:
            return rnd[s]
        b = p.bases[s]
        if b.kind != "XY":
            rnd[s] = 0
            return 0
        if s in visiting:
            raise PatternError(f"dependency cycle through {s!r}")
        visiting.add(s)
        r = 1
        for d in b.deps:
            if d in p.bases:
                r = max(r, level(d) + 1)
            elif not (isinstance(d, str) and d.startswith("in")):
                raise PatternError(f"{s!r} depends on unmeasured {d!r}")
        visiting.discard(s)
        rnd[s] = r
        return r

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * len(p.bases) + 100))
    try:
        for s in p.bases:
            level(s)
    finally:
        sys.setrecursionlimit(old)
    nr = max(rnd.values(), default=0) + 1
    rounds: list[list] = [[] for _ in range(nr)]
    for s, r in rnd.items():
        rounds[r].append(s)
    for r in rounds:
        r.sort(key=qubit_key)
    return Schedule(rounds, rnd, fc)


# ---------------------------------------------------------------------------
# run records


@dataclass
class Resources:
    S: int
    O: int
    T: int


@dataclass
class RunRecord:
    """Everything a run produced.

    Attributes
    ----------
    outcomes
        Outcome bit per measured site (readout bits are in ``raw_readout``).
    round_times
        Seconds since the start of the run at which each round completed.
    iflow
        Information flow vector; its history holds the byproduct known
        after each round.
    result
        Readout reinterpreted with the byproduct, per output wire.
    output_state
        Output amplitudes (wire 0 most significant) before readout, when
        the engine can provide them.
    """

    seed: int | None
    engine: str
    outcomes: dict[Site, int]
    round_times: list[float]
    iflow: InfoFlowVector
    byproduct: ByproductOperator
    raw_readout: list[int]
    result: list[int]
    resources: Resources
    peak_window: int = 0
    output_state: np.ndarray | None = None
    permutation: list[int] = field(default_factory=list)

    def logical_result(self) -> list[int]:
        """Result bits indexed by logical qubit (undoing the wire permutation)."""
        out = [0] * len(self.result)
        for w, q in enumerate(self.permutation or range(len(self.result))):
            out[q] = self.result[w]
        return out

    def render(self) -> str:
        lines = [f"seed {self.seed if self.seed is not None else '-'}", f"engine {self.engine}"]
        for s in sorted(self.outcomes, key=qubit_key):
            lines.append(f"outcome {' '.join(str(v) for v in s)} {self.outcomes[s]}")
        for i in range(self.byproduct.n):
            lines.append(f"iflow wire={i} x={self.byproduct.x[i]} z={self.byproduct.z[i]}")
        for i, b in enumerate(self.result):
            lines.append(f"result {i} {b}")
        r = self.resources
        lines.append(f"resources S={r.S} O={r.O} T={r.T}")
        lines.append(f"peak {self.peak_window}")
        return "\n".join(lines) + "\n"


def parse_run_record(text: str) -> dict:
    """Read the fields of :meth:`RunRecord.render` back (outcomes, iflow, result, resources)."""
    from .formats import FormatError, iter_lines, parse_int, parse_site

    out: dict = {"outcomes": {}, "iflow": {}, "result": {}, "resources": {}}
    for lineno, toks in iter_lines(text):
        h = toks[0]
        if h == "outcome":
            if len(toks) != 5:
                raise FormatError(lineno, "expected 'outcome x y z s'")
            out["outcomes"][parse_site(toks[1:4], lineno)] = parse_int(toks[4], lineno, "outcome")
        elif h == "iflow":
            kv = dict(t.split("=", 1) for t in toks[1:])
            out["iflow"][int(kv["wire"])] = (int(kv["x"]), int(kv["z"]))
        elif h == "result":
            out["result"][parse_int(toks[1], lineno, "wire")] = parse_int(toks[2], lineno, "bit")
        elif h == "resources":
            out["resources"] = {k: int(v) for k, v in (t.split("=", 1) for t in toks[1:])}
        elif h in ("seed", "engine", "peak"):
            out[h] = toks[1]
        else:
            raise FormatError(lineno, f"unknown record {h!r}")
    return out


# ---------------------------------------------------------------------------
# inputs


def _product_input(p: MeasurementPattern, input_state) -> list[str] | None:
    """Per-wire single-qubit labels if the input is a product stabilizer state."""
    n = p.n
    if input_state is None:
        return ["+"] * n
    if isinstance(input_state, str):
        if len(input_state) != n or any(c not in "01+-" for c in input_state):
            raise RunError(f"input label must be {n} characters from 0 1 + -")
        return list(input_state)
    if isinstance(input_state, (int, np.integer)):
        k = int(input_state)
        if not 0 <= k < 2 ** n:
            raise RunError("computational input out of range")
        return list(format(k, f"0{n}b")) if n else []
    return None


_LABEL_VEC = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
}


def input_vector(p: MeasurementPattern, input_state) -> np.ndarray:
    """Dense input amplitudes on the wires (wire 0 most significant)."""
    labels = _product_input(p, input_state)
    if labels is not None:
        v = np.ones(1, dtype=complex)
        for c in labels:
            v = np.kron(v, _LABEL_VEC[c])
        return v
    v = np.asarray(input_state, dtype=complex).reshape(-1)
    if v.size != 2 ** p.n:
        raise RunError(f"input vector has {v.size} amplitudes, expected {2 ** p.n}")
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:
        raise RunError("zero input vector")
    return v / nrm


# ---------------------------------------------------------------------------
# measurement orders


def _greedy_order(
    sites: Sequence[Site],
    adj: Mapping[Site, set],
    attached: set,
    deps: Mapping[Site, Sequence[Site]],
    rank: Mapping[Site, int] | None = None,
) -> list[Site]:
    """Order that keeps the active window small.

    Repeatedly measures the ready site whose measurement needs the fewest
    fresh attachments (ties broken by round, then lattice order).  A site
    is ready once all its listed dependencies are measured.
    """
    todo = set(sites)
    att = set(attached)
    done: set = set()
    waiting: dict = {}
    missing = {}
    for s in todo:
        m = {d for d in deps.get(s, ()) if d in todo}
        missing[s] = m
        for d in m:
            waiting.setdefault(d, set()).add(s)
    rank = rank or {}

    def cost(s) -> int:
        return (s not in att) + sum(1 for t in adj[s] if t not in att)

    heap: list = []
    for s in todo:
        if not missing[s]:
            heapq.heappush(heap, (cost(s), rank.get(s, 0), qubit_key(s), s))
    order = []
    while heap:
        c, _, _, s = heapq.heappop(heap)
        if s in done:
            continue
        cc = cost(s)
        if cc != c:
            heapq.heappush(heap, (cc, rank.get(s, 0), qubit_key(s), s))
            continue
        order.append(s)
        done.add(s)
        new = ({s} | set(adj[s])) - att
        att |= new
        for t in waiting.get(s, ()):
            missing[t].discard(s)
            if not missing[t]:
                heapq.heappush(heap, (cost(t), rank.get(t, 0), qubit_key(t), t))
        touched = set()
        for a in new:
            touched |= adj[a]
        for t in touched:
            if t in todo and t not in done and not missing[t]:
                heapq.heappush(heap, (cost(t), rank.get(t, 0), qubit_key(t), t))
    if len(order) != len(todo):
        raise RunError("could not order measurements (dependency cycle)")
    return order


def _round_order(sched: Schedule) -> list[Site]:
    return [s for r in sched.rounds for s in r]


# ---------------------------------------------------------------------------
# engines


@dataclass
class _Outcome:
    outcomes: dict
    order: list
    peak: int
    out_state: np.ndarray | None
    readout: list[int]


class _Sampler:
    """Outcome source: forced bits first, then (optionally pre-drawn) random bits."""

    def __init__(self, forced: Mapping[Site, int] | None, rng: np.random.Generator) -> None:
        self.forced = {k: int(v) & 1 for k, v in (forced or {}).items()}
        self.rng = rng
        self.predrawn: set = set()

    def known(self, s) -> bool:
        return s in self.forced

    def predraw(self, s, p: MeasurementPattern, values: Mapping[Site, int]) -> int:
        """Fix the outcome of ``s`` ahead of its measurement."""
        if s in self.forced:
            return self.forced[s]
        e = p.determined.get(s)
        if e is not None:
            known = {**values, **self.forced}
            missing = [v for v in e.vars if v not in known and not (isinstance(v, str) and v.startswith("in"))]
            for v in missing:
                self.predraw(v, p, values)
            self.forced[s] = evaluate(e, {**values, **self.forced})
            return self.forced[s]
        self.forced[s] = int(self.rng.integers(2))
        self.predrawn.add(s)
        return self.forced[s]


def _angle(p: MeasurementPattern, s: Site, values: Mapping[Site, int]) -> float:
    return p.bases[s].effective_angle(values)


def _dense_run(
    p: MeasurementPattern,
    sched: Schedule,
    sampler: _Sampler,
    psi_in: np.ndarray,
    order: list[Site] | None,
    capacity: int,
    readout: bool,
    window_mode: bool,
) -> _Outcome:
    adj = p.cluster.adjacency()
    ex = WindowedExecutor(adj, p.cluster.kappa_map())
    ins = p.inputs
    ex.state.attach_joint(ins, psi_in)
    ex.attached |= set(ins)
    for a, b in p.cluster.edges:
        if a in ex.attached and b in ex.attached:
            ex.state.apply_cz(a, b)
    for s in ins:
        if p.cluster.kappa_of(s):
            ex.state.apply_1q(s, "Z")
    if order is None:
        order = _round_order(sched)
    values: dict = {}
    for s in order:
        b = p.bases[s]
        for d in b.deps:
            if d in p.bases and d not in values:
                if not window_mode:
                    raise RunError(f"{s!r} measured before its dependency {d!r}")
                sampler.predraw(d, p, values)
        ang_vals = dict(values)
        for d in b.deps:
            if d in p.bases and d not in values:
                ang_vals[d] = sampler.forced[d]
        ex.prepare(s)
        if ex.state.n > capacity:
            raise CapacityError(f"active window {ex.state.n} exceeds {capacity}")
        forced = sampler.forced.get(s)
        try:
            out = ex.step(s, b.kind, _angle(p, s, ang_vals), forced, sampler.rng)
        except DenseStateError as e:
            raise RunError(str(e)) from None
        if s in sampler.predrawn and abs(ex.state.last_probability - 0.5) > UNIFORM_TOL:
            raise RunError(
                f"outcome of {s!r} was drawn before measurement but its branch probability is "
                f"{ex.state.last_probability:.6g}, not 1/2"
            )
        values[s] = out
    outs = p.outputs
    for s in outs:
        ex.attach(s)
    if ex.state.n > capacity:
        raise CapacityError(f"active window {ex.state.n} exceeds {capacity}")
    state = ex.state.amplitudes(outs)
    raw = []
    if readout:
        for s in outs:
            raw.append(ex.state.measure_z(s, sampler.forced.get(s), sampler.rng))
    return _Outcome(values, list(order), ex.peak, state, raw)


def _tableau_prepare(p: MeasurementPattern, labels: list[str]) -> StabilizerTableau:
    t = StabilizerTableau()
    ins = {s: labels[i] for i, s in enumerate(p.inputs)}
    for s in p.cluster.sorted_sites():
        if s in ins:
            t.add_qubit(s, ins[s])
        else:
            t.add_qubit(s, "-" if p.cluster.kappa_of(s) else "+")
    for a, b in p.cluster.edges:
        t.core.cz(a, b)
    for s in ins:
        if p.cluster.kappa_of(s):
            t.core.pauli_flip(s, "Z")
    return t


def _tableau_run(p, sched, sampler, labels, readout, want_state) -> _Outcome:
    t = _tableau_prepare(p, labels)
    values = {}
    order = _round_order(sched)
    for s in order:
        b = p.bases[s]
        if b.kind == "XY":
            raise RunError("tableau engine cannot measure adaptive sites")
        values[s] = t.measure_pauli(s, b.kind, sampler.forced.get(s), sampler.rng, discard=True)
    state = None
    if want_state and p.n <= 16:
        state = t.to_statevector(p.outputs)
    raw = []
    if readout:
        for s in p.outputs:
            raw.append(t.measure_pauli(s, "Z", sampler.forced.get(s), sampler.rng))
    return _Outcome(values, order, 0, state, raw)


def _hybrid_run(p, sched, sampler, labels, capacity, readout) -> _Outcome:
    t = _tableau_prepare(p, labels)
    values = {}
    for s in sched.rounds[0]:
        values[s] = t.measure_pauli(s, p.bases[s].kind, sampler.forced.get(s), sampler.rng, discard=True)
    desc = extract_graph_state(t)
    adj: dict = {v: set() for v in desc.vertices}
    for a, b in desc.edges:
        adj[a].add(b)
        adj[b].add(a)
    pre = {v: lc_gates(desc.lc.get(v, "I")) for v in desc.vertices}
    ex = WindowedExecutor(adj, desc.kappa, pre_rotation=pre)
    rest = [s for r in sched.rounds[1:] for s in r]
    deps = {s: [d for d in p.bases[s].deps if d in p.bases] for s in rest}
    order = _greedy_order(rest, adj, set(), deps, sched.round_of)
    for s in order:
        ex.prepare(s)
        if ex.state.n > capacity:
            raise CapacityError(f"active window {ex.state.n} exceeds {capacity}")
        try:
            values[s] = ex.step(s, "XY", _angle(p, s, values), sampler.forced.get(s), sampler.rng)
        except DenseStateError as e:
            raise RunError(str(e)) from None
    # local Cliffords act after every CZ of the graph, so attach all outputs first
    for s in p.outputs:
        ex.attach(s)
    for s in p.outputs:
        for g in pre.get(s, ()):
            ex.state.apply_1q(s, g)
    if ex.state.n > capacity:
        raise CapacityError(f"active window {ex.state.n} exceeds {capacity}")
    state = ex.state.amplitudes(p.outputs)
    raw = []
    if readout:
        for s in p.outputs:
            raw.append(ex.state.measure_z(s, sampler.forced.get(s), sampler.rng))
    return _Outcome(values, list(sched.rounds[0]) + order, ex.peak, state, raw)


def _finish(p, sched, res: _Outcome, seed, engine, t0, readout) -> RunRecord:
    flow = InfoFlowVector(p.n)
    seen: dict = {}
    times = []
    for r in sched.rounds:
        for s in r:
            seen[s] = res.outcomes[s]
        full = {s: seen.get(s, 0) for s in p.bases}
        flow.set([evaluate(e, full) for e in p.byproduct_x], [evaluate(e, full) for e in p.byproduct_z])
        times.append(time.perf_counter() - t0)
    bp = p.byproduct_at(res.outcomes)
    result = reinterpret_readout(res.readout, bp) if readout else []
    rep = resource_counts(p, sched)
    return RunRecord(seed, engine, dict(res.outcomes), times, flow, bp, list(res.readout), result, rep,
                     res.peak, res.out_state, p.permutation())


def resource_counts(p: MeasurementPattern, sched: Schedule | None = None) -> Resources:
    sched = sched or build_schedule(p)
    return Resources(len(p.cluster.sites), len(p.bases), sched.depth)


def execute(
    p: MeasurementPattern,
    engine: str = "auto",
    seed: int | None = None,
    forced: Mapping[Site, int] | None = None,
    input_state=None,
    readout: bool = True,
    capacity: int = DEFAULT_CAPACITY,
) -> RunRecord:
    """Run ``p`` once.

    Parameters
    ----------
    engine
        ``auto``, ``tableau``, ``dense`` or ``hybrid``.
    seed
        Seed for random outcomes (default from ``$ONEWAY_SEED``).
    forced
        Outcome bits to select, per site (measured or output); sites not
        listed are sampled.
    input_state
        ``None`` (all ``|+>``), a string over ``0 1 + -`` per wire, an
        integer computational basis index, or a dense vector.
    readout
        Whether to Z-measure the outputs.
    capacity
        Maximum number of simultaneously active dense qubits.

    The dense engine measures round by round, in the order of the
    schedule.

    Raises
    ------
    RunError
        Unknown engine, non-stabilizer input for the tableau engine,
        contradictory forced outcome.
    CapacityError
        If the dense window exceeds ``capacity``.
    """
    p.validate()
    seed = resolve_seed(seed)
    rng = np.random.default_rng(seed)
    sched = build_schedule(p)
    sampler = _Sampler(forced, rng)
    labels = _product_input(p, input_state) if not isinstance(input_state, np.ndarray) else None
    if engine == "auto":
        if labels is None:
            engine = "dense"
        elif p.is_clifford():
            engine = "tableau"
        else:
            engine = "hybrid"
    t0 = time.perf_counter()
    if engine == "tableau":
        if labels is None:
            raise RunError("tableau engine needs a product input from 0 1 + -")
        res = _tableau_run(p, sched, sampler, labels, readout, True)
    elif engine == "hybrid":
        if labels is None:
            raise RunError("hybrid engine needs a product input from 0 1 + -")
        res = _hybrid_run(p, sched, sampler, labels, capacity, readout)
    elif engine == "dense":
        res = _dense_run(p, sched, sampler, input_vector(p, input_state), None, capacity, readout, False)
    else:
        raise RunError(f"unknown engine {engine!r}")
    return _finish(p, sched, res, seed, engine, t0, readout)


def split_order(p: MeasurementPattern) -> list[Site]:
    """Measurement order used by :func:`execute_split` (window-minimizing)."""
    adj = p.cluster.adjacency()
    sched = build_schedule(p)
    return _greedy_order(list(p.bases), adj, set(p.inputs), {}, None)


def execute_split(
    p: MeasurementPattern,
    max_window: int,
    seed: int | None = None,
    forced: Mapping[Site, int] | None = None,
    input_state=None,
    readout: bool = True,
) -> RunRecord:
    """Run ``p`` with at most ``max_window`` active qubits.

    Sites are prepared in ``|+>`` only when a neighbour is about to be
    measured, and measured in an order that keeps the active region
    small.  When an adaptive site is measured before one of its sign
    dependencies, that dependency's outcome is drawn uniformly in
    advance and later selected; the draw is checked against the actual
    branch probability, which is 1/2 for every deterministic pattern.

    Raises
    ------
    CapacityError
        If no order found stays within ``max_window``.
    """
    p.validate()
    seed = resolve_seed(seed)
    rng = np.random.default_rng(seed)
    sched = build_schedule(p)
    sampler = _Sampler(forced, rng)
    order = split_order(p)
    t0 = time.perf_counter()
    res = _dense_run(p, sched, sampler, input_vector(p, input_state), order, max_window, readout, True)
    return _finish(p, sched, res, seed, "split", t0, readout)


# ---------------------------------------------------------------------------
# resources


@dataclass
class ResourceReport:
    """Counts ``S`` (sites), ``O`` (measured sites), ``T`` (rounds) and bound checks."""

    S: int
    O: int
    T: int
    bounds: dict[str, tuple[int, int, bool]]

    @property
    def ok(self) -> bool:
        return all(v[2] for v in self.bounds.values())

    def render(self) -> str:
        lines = [f"S={self.S}", f"O={self.O}", f"T={self.T}"]
        for k, (lhs, rhs, good) in self.bounds.items():
            lines.append(f"bound {k}: {lhs} <= {rhs} {'pass' if good else 'FAIL'}")
        return "\n".join(lines) + "\n"


def resource_report(p: MeasurementPattern) -> ResourceReport:
    """Resource counts and, with network metadata, the polynomial-overhead bounds.

    ``O <= S`` is always checked.  With ``S_qln``, ``T_qln`` and ``O_qln``
    present: ``T <= 3 T_qln``, ``S <= 24 S_qln^2 T_qln``,
    ``S <= 24 O_qln S_qln`` and ``O <= 24 O_qln S_qln``.
    """
    r = resource_counts(p)
    b: dict = {"O<=S": (r.O, r.S, r.O <= r.S)}
    m = p.meta
    try:
        sq = int(m["S_qln"]) if "S_qln" in m else None
        tq = int(m["T_qln"]) if "T_qln" in m else None
        oq = int(m["O_qln"]) if "O_qln" in m else None
    except ValueError:
        raise RunError("network metadata must be integers") from None
    if tq is not None:
        b["T<=3T_qln"] = (r.T, 3 * tq, r.T <= 3 * tq)
    if sq is not None and tq is not None:
        v = 24 * sq * sq * tq
        b["S<=24S_qln^2T_qln"] = (r.S, v, r.S <= v)
    if sq is not None and oq is not None:
        v = 24 * oq * sq
        b["S<=24O_qlnS_qln"] = (r.S, v, r.S <= v)
        b["O<=24O_qlnS_qln"] = (r.O, v, r.O <= v)
    return ResourceReport(r.S, r.O, r.T, b)


__all__ = [
    "CapacityError",
    "ResourceReport",
    "Resources",
    "RunError",
    "RunRecord",
    "Schedule",
    "build_schedule",
    "execute",
    "execute_split",
    "input_vector",
    "parse_run_record",
    "resolve_seed",
    "resource_counts",
    "resource_report",
    "split_order",
]
