"""Cluster geometry, redundant-site removal and decomposition validation.

A :class:`Cluster` is a set of sites with nearest-neighbour (or arbitrary)
edges, a ``kappa`` bit per site, a role per site and the mapping from
logical wires to their input and output sites.  Sites are 3-tuples of
integers so that one- and two-dimensional layouts embed in the cubic
lattice unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Hashable, Iterable, Mapping, Sequence

from .formats import FormatError, iter_lines, parse_int, parse_site
from .pauli import qubit_key

Site = Hashable
Edge = tuple[Site, Site]

ROLES = ("input", "body", "output", "redundant")


class ClusterError(ValueError):
    """Invalid cluster construction or edit."""


def norm_edge(a: Site, b: Site) -> Edge:
    """Canonical (sorted) form of an undirected edge."""
    if a == b:
        raise ClusterError(f"self-loop at {a!r}")
    return (a, b) if qubit_key(a) <= qubit_key(b) else (b, a)


def lattice_neighbors(s: tuple[int, int, int]) -> list[tuple[int, int, int]]:
    """The six nearest neighbours of a cubic-lattice site."""
    x, y, z = s
    return [
        (x + 1, y, z), (x - 1, y, z),
        (x, y + 1, z), (x, y - 1, z),
        (x, y, z + 1), (x, y, z - 1),
    ]


def induced_lattice_edges(sites: Iterable[tuple[int, int, int]]) -> set[Edge]:
    """All nearest-neighbour pairs within ``sites``."""
    ss = set(sites)
    out = set()
    for s in ss:
        for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            t = (s[0] + d[0], s[1] + d[1], s[2] + d[2])
            if t in ss:
                out.add(norm_edge(s, t))
    return out


@dataclass(frozen=True)
class Cluster:
    """A cluster (graph) with roles and logical-wire metadata.

    Parameters
    ----------
    sites
        Site labels; lattice sites are ``(x, y, z)`` tuples.
    edges
        Undirected edges stored in canonical order.
    kappa
        Sites whose ``kappa`` bit is 1 (their stabilizer generator carries
        a minus sign).
    roles
        Role of every site; missing sites default to ``body``.
    wires
        ``wires[i] = (input_site, output_site)`` for logical qubit ``i``.
    """

    sites: frozenset
    edges: frozenset
    kappa: frozenset = frozenset()
    roles: Mapping[Site, str] = field(default_factory=dict)
    wires: tuple[tuple[Site, Site], ...] = ()

    def __post_init__(self) -> None:
        sites = frozenset(self.sites)
        edges = frozenset(norm_edge(a, b) for a, b in self.edges)
        for a, b in edges:
            if a not in sites or b not in sites:
                raise ClusterError(f"edge ({a!r}, {b!r}) leaves the cluster")
        kappa = frozenset(self.kappa)
        if not kappa <= sites:
            raise ClusterError("kappa set on a site outside the cluster")
        roles = {s: "body" for s in sites}
        for s, r in dict(self.roles).items():
            if s not in sites:
                raise ClusterError(f"role given for unknown site {s!r}")
            if r not in ROLES:
                raise ClusterError(f"unknown role {r!r}")
            roles[s] = r
        wires = tuple((a, b) for a, b in self.wires)
        for i, (a, b) in enumerate(wires):
            if a not in sites or b not in sites:
                raise ClusterError(f"wire {i} endpoint outside the cluster")
            roles[a] = "input" if roles[a] in ("body", "input") else roles[a]
            roles[b] = "output" if roles[b] in ("body", "output") else roles[b]
        ins = [a for a, _ in wires]
        outs = [b for _, b in wires]
        if len(set(ins)) != len(ins) or len(set(outs)) != len(outs):
            raise ClusterError("two wires share an endpoint")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "wires", wires)

    # queries --------------------------------------------------------------
    @property
    def inputs(self) -> list[Site]:
        return [a for a, _ in self.wires]

    @property
    def outputs(self) -> list[Site]:
        return [b for _, b in self.wires]

    @property
    def n_wires(self) -> int:
        return len(self.wires)

    def sorted_sites(self) -> list[Site]:
        return sorted(self.sites, key=qubit_key)

    def neighbors(self, s: Site) -> set[Site]:
        return {b if a == s else a for a, b in self.edges if s in (a, b)}

    def adjacency(self) -> dict[Site, set[Site]]:
        adj: dict = {s: set() for s in self.sites}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def kappa_of(self, s: Site) -> int:
        return 1 if s in self.kappa else 0

    def kappa_map(self) -> dict[Site, int]:
        return {s: 1 for s in self.kappa}

    def role_set(self, role: str) -> set[Site]:
        return {s for s, r in self.roles.items() if r == role}

    def measured_sites(self) -> list[Site]:
        """Sites that are measured when the pattern runs (everything but outputs)."""
        outs = set(self.outputs)
        return [s for s in self.sorted_sites() if s not in outs]

    def is_connected(self) -> bool:
        if not self.sites:
            return True
        adj = self.adjacency()
        start = next(iter(self.sites))
        seen = {start}
        stack = [start]
        while stack:
            for t in adj[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return len(seen) == len(self.sites)

    def relabel(self, mapping: Mapping[Site, Site]) -> "Cluster":
        f = lambda s: mapping.get(s, s)  # noqa: E731
        return Cluster(
            frozenset(f(s) for s in self.sites),
            frozenset((f(a), f(b)) for a, b in self.edges),
            frozenset(f(s) for s in self.kappa),
            {f(s): r for s, r in self.roles.items()},
            tuple((f(a), f(b)) for a, b in self.wires),
        )

    def translate(self, dx: int = 0, dy: int = 0, dz: int = 0) -> "Cluster":
        return self.relabel({s: (s[0] + dx, s[1] + dy, s[2] + dz) for s in self.sites})


def make_lattice_cluster(
    shape: Sequence[int] | Iterable[tuple[int, ...]],
    wires: Sequence[tuple[Site, Site]] = (),
) -> Cluster:
    """Nearest-neighbour cluster on a box or an explicit set of lattice sites.

    Parameters
    ----------
    shape
        Either box dimensions ``(a,)``, ``(a, b)`` or ``(a, b, c)`` giving
        sites ``0 <= x < a`` and so on, or an iterable of coordinate tuples
        (padded to three components).
    wires
        Optional logical-wire endpoints.

    Raises
    ------
    ClusterError
        If the shape is empty or not connected.
    """
    shape = list(shape)
    if shape and all(isinstance(d, int) for d in shape):
        dims = list(shape) + [1] * (3 - len(shape))
        if len(dims) != 3 or any(d < 1 for d in dims):
            raise ClusterError("box dimensions must be 1 to 3 positive integers")
        sites = {(x, y, z) for x in range(dims[0]) for y in range(dims[1]) for z in range(dims[2])}
    else:
        sites = set()
        for s in shape:
            t = tuple(int(v) for v in s)
            if not 1 <= len(t) <= 3:
                raise ClusterError(f"bad coordinate {s!r}")
            sites.add(t + (0,) * (3 - len(t)))
    if not sites:
        raise ClusterError("empty shape")
    c = Cluster(frozenset(sites), frozenset(induced_lattice_edges(sites)), wires=tuple(wires))
    if not c.is_connected():
        raise ClusterError("lattice shape is not connected")
    return c


@dataclass(frozen=True)
class Reduction:
    """Result of :func:`remove_redundant`.

    Attributes
    ----------
    cluster
        The remaining cluster.  Its ``kappa`` is the updated one, or all
        zero when ``normalize`` was requested.
    z_corrections
        Sites that carry an extra ``Z`` relative to the plain cluster state
        on the remaining sites.  With normalization these must be absorbed
        into measurement bases (an ``XY`` angle flips sign, an ``X`` or
        ``Y`` outcome flips); without it they are already in ``kappa``.
    normalized
        Whether ``kappa`` was reset to zero.
    """

    cluster: Cluster
    z_corrections: frozenset
    normalized: bool


def remove_redundant(
    c: Cluster,
    redundant: Iterable[Site],
    outcomes: Mapping[Site, int] | None = None,
    normalize: bool = True,
) -> Reduction:
    """Z-measure ``redundant`` sites and return the cluster on the rest.

    Each remaining site's ``kappa`` is incremented by the sum of the
    outcomes of its removed neighbours (mod 2).

    Raises
    ------
    ClusterError
        If a listed site is unknown or is a wire endpoint.
    """
    red = set(redundant)
    outcomes = dict(outcomes or {})
    for s in red:
        if s not in c.sites:
            raise ClusterError(f"unknown site {s!r}")
        if c.roles.get(s) in ("input", "output"):
            raise ClusterError(f"cannot remove wire endpoint {s!r}")
    for s, v in outcomes.items():
        if s not in red:
            raise ClusterError(f"outcome given for non-removed site {s!r}")
        if v not in (0, 1):
            raise ClusterError("outcomes must be 0 or 1")
    adj = c.adjacency()
    kappa = {s: c.kappa_of(s) for s in c.sites if s not in red}
    for b in red:
        if outcomes.get(b, 0):
            for a in adj[b]:
                if a in kappa:
                    kappa[a] ^= 1
    rest = c.sites - red
    edges = frozenset(e for e in c.edges if e[0] in rest and e[1] in rest)
    roles = {s: r for s, r in c.roles.items() if s in rest}
    flips = frozenset(s for s, k in kappa.items() if k)
    new_kappa = frozenset() if normalize else flips
    return Reduction(Cluster(rest, edges, new_kappa, roles, c.wires), flips, normalize)


# ---------------------------------------------------------------------------
# decomposition into gate subclusters


@dataclass(frozen=True)
class SubCluster:
    """One gate's share of a cluster: its sites, edges and I/O sites."""

    sites: frozenset
    edges: frozenset
    inputs: tuple = ()
    outputs: tuple = ()
    name: str = ""

    @property
    def body(self) -> frozenset:
        return self.sites - set(self.inputs) - set(self.outputs)


@dataclass(frozen=True)
class Decomposition:
    """A parent cluster split into gate subclusters."""

    parent: Cluster
    parts: tuple[SubCluster, ...]


CONSTRAINTS = (
    "vertex_union",
    "edge_union",
    "edges_disjoint",
    "subgraph",
    "induced_subgraph",
    "io_not_connected",
    "one_io",
    "disconnected_bodies",
)


@dataclass
class ValidationReport:
    """Pass/fail per named decomposition constraint, with messages."""

    results: dict[str, bool]
    messages: dict[str, list[str]]

    @property
    def ok(self) -> bool:
        return all(self.results.values())

    def failed(self) -> list[str]:
        return [k for k in CONSTRAINTS if not self.results[k]]

    def render(self) -> str:
        lines = []
        for k in CONSTRAINTS:
            lines.append(f"{k}: {'pass' if self.results[k] else 'FAIL'}")
            for m in self.messages[k]:
                lines.append(f"  {m}")
        return "\n".join(lines) + "\n"


def validate_decomposition(d: Decomposition) -> ValidationReport:
    """Check the eight decomposition constraints; never raises.

    The constraints are:

    ``vertex_union``
        The subclusters cover the parent's sites exactly.
    ``edge_union``
        The subclusters' edges cover the parent's edges exactly.
    ``edges_disjoint``
        No edge is assigned to two subclusters.
    ``subgraph``
        Every assigned edge has both endpoints in its subcluster.
    ``induced_subgraph``
        Each subcluster owns every parent edge between its own sites.
    ``io_not_connected``
        No edge joins two input sites, or two output sites, of one
        subcluster.
    ``one_io``
        Two subclusters share only sites that are an output of one and an
        input of the other.
    ``disconnected_bodies``
        With shared sites removed, no edge joins sites owned by different
        subclusters.
    """
    res = {k: True for k in CONSTRAINTS}
    msg: dict[str, list[str]] = {k: [] for k in CONSTRAINTS}

    def fail(k: str, m: str) -> None:
        res[k] = False
        if len(msg[k]) < 20:
            msg[k].append(m)

    parent = d.parent
    parts = list(d.parts)
    pe = set(parent.edges)
    union_v: set = set()
    for p in parts:
        union_v |= set(p.sites)
    if union_v != set(parent.sites):
        for s in sorted(set(parent.sites) - union_v, key=qubit_key):
            fail("vertex_union", f"site {s!r} belongs to no subcluster")
        for s in sorted(union_v - set(parent.sites), key=qubit_key):
            fail("vertex_union", f"site {s!r} is not in the parent cluster")
    owner: dict = {}
    for i, p in enumerate(parts):
        for a, b in p.edges:
            e = norm_edge(a, b)
            if e in owner:
                fail("edges_disjoint", f"edge {e!r} assigned to parts {owner[e]} and {i}")
            owner.setdefault(e, i)
            if a not in p.sites or b not in p.sites:
                fail("subgraph", f"part {i} edge {e!r} leaves the part")
    for e in sorted(pe - set(owner), key=lambda e: (qubit_key(e[0]), qubit_key(e[1]))):
        fail("edge_union", f"edge {e!r} assigned to no subcluster")
    for e in set(owner) - pe:
        fail("edge_union", f"edge {e!r} is not in the parent cluster")
    for i, p in enumerate(parts):
        own = {norm_edge(a, b) for a, b in p.edges}
        for e in pe:
            if e[0] in p.sites and e[1] in p.sites and e not in own:
                fail("induced_subgraph", f"part {i} lacks edge {e!r} between its own sites")
        for group, what in ((set(p.inputs), "input"), (set(p.outputs), "output")):
            for a, b in own:
                if a in group and b in group:
                    fail("io_not_connected", f"part {i} has an edge between {what} sites {a!r}, {b!r}")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            pi, pj = parts[i], parts[j]
            shared = set(pi.sites) & set(pj.sites)
            allowed = (set(pi.outputs) & set(pj.inputs)) | (set(pj.outputs) & set(pi.inputs))
            for s in sorted(shared - allowed, key=qubit_key):
                fail("one_io", f"parts {i} and {j} share {s!r} which is not output-to-input")
    counts: dict = {}
    for p in parts:
        for s in p.sites:
            counts[s] = counts.get(s, 0) + 1
    excl: dict = {}
    for i, p in enumerate(parts):
        for s in p.sites:
            if counts[s] == 1:
                excl[s] = i
    for a, b in pe:
        if a in excl and b in excl and excl[a] != excl[b]:
            fail("disconnected_bodies", f"edge {(a, b)!r} joins bodies of parts {excl[a]} and {excl[b]}")
    return ValidationReport(res, msg)


# ---------------------------------------------------------------------------
# text format


def _fmt_site(s: Site) -> str:
    if isinstance(s, tuple):
        return " ".join(str(v) for v in s)
    raise ClusterError(f"text format needs coordinate sites, got {s!r}")


def format_cluster(c: Cluster) -> str:
    """Serialize as ``site``, ``edge`` and ``wire`` lines."""
    lines = []
    for s in c.sorted_sites():
        lines.append(f"site {_fmt_site(s)} {c.roles[s]} {c.kappa_of(s)}")
    for a, b in sorted(c.edges, key=lambda e: (qubit_key(e[0]), qubit_key(e[1]))):
        lines.append(f"edge {_fmt_site(a)} {_fmt_site(b)}")
    for i, (a, b) in enumerate(c.wires):
        lines.append(f"wire {i} in: {_fmt_site(a)} out: {_fmt_site(b)}")
    return "\n".join(lines) + "\n"


def parse_cluster(text: str) -> Cluster:
    """Inverse of :func:`format_cluster`.

    Raises
    ------
    FormatError
        On malformed lines, unknown roles or edges to undeclared sites.
    """
    sites: dict = {}
    kappa = set()
    edges = []
    wires: dict[int, tuple] = {}
    for lineno, toks in iter_lines(text):
        head = toks[0]
        if head == "site":
            if len(toks) != 6:
                raise FormatError(lineno, "expected 'site x y z role kappa'")
            s = parse_site(toks[1:4], lineno)
            if toks[4] not in ROLES:
                raise FormatError(lineno, f"unknown role {toks[4]!r}")
            k = parse_int(toks[5], lineno, "kappa")
            if k not in (0, 1):
                raise FormatError(lineno, "kappa must be 0 or 1")
            if s in sites:
                raise FormatError(lineno, f"duplicate site {s!r}")
            sites[s] = toks[4]
            if k:
                kappa.add(s)
        elif head == "edge":
            if len(toks) != 7:
                raise FormatError(lineno, "expected 'edge x1 y1 z1 x2 y2 z2'")
            a, b = parse_site(toks[1:4], lineno), parse_site(toks[4:7], lineno)
            for s in (a, b):
                if s not in sites:
                    raise FormatError(lineno, f"edge endpoint {s!r} not declared")
            if a == b:
                raise FormatError(lineno, "self-loop")
            edges.append((a, b))
        elif head == "wire":
            if len(toks) != 10 or toks[2] != "in:" or toks[6] != "out:":
                raise FormatError(lineno, "expected 'wire i in: x y z out: x y z'")
            i = parse_int(toks[1], lineno, "wire index")
            a, b = parse_site(toks[3:6], lineno), parse_site(toks[7:10], lineno)
            for s in (a, b):
                if s not in sites:
                    raise FormatError(lineno, f"wire endpoint {s!r} not declared")
            if i in wires:
                raise FormatError(lineno, f"duplicate wire {i}")
            wires[i] = (a, b)
        else:
            raise FormatError(lineno, f"unknown record {head!r}")
    if sorted(wires) != list(range(len(wires))):
        raise FormatError(0, "wire indices must be 0..n-1")
    roles = {s: r for s, r in sites.items()}
    try:
        return Cluster(frozenset(sites), frozenset(edges), frozenset(kappa), roles,
                       tuple(wires[i] for i in range(len(wires))))
    except ClusterError as e:
        raise FormatError(0, str(e)) from None


def format_decomposition(d: Decomposition) -> str:
    """Parent cluster lines followed by one ``part <name>`` ... ``end`` block per subcluster.

    Inside a block: ``site x y z``, ``edge x1 y1 z1 x2 y2 z2``,
    ``input x y z`` and ``output x y z`` (inputs and outputs in wire order).
    """
    lines = [format_cluster(d.parent).rstrip("\n")]
    for i, p in enumerate(d.parts):
        lines.append(f"part {p.name or i}")
        for s in sorted(p.sites, key=qubit_key):
            lines.append(f"  site {_fmt_site(s)}")
        for a, b in sorted(p.edges, key=lambda e: (qubit_key(e[0]), qubit_key(e[1]))):
            lines.append(f"  edge {_fmt_site(a)} {_fmt_site(b)}")
        for s in p.inputs:
            lines.append(f"  input {_fmt_site(s)}")
        for s in p.outputs:
            lines.append(f"  output {_fmt_site(s)}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def parse_decomposition(text: str) -> Decomposition:
    """Inverse of :func:`format_decomposition`.

    Part sites and edges are not checked against the parent here; that
    is the validator's job.

    Raises
    ------
    FormatError
        On malformed lines or an unterminated part.
    """
    parent_lines = []
    parts: list[SubCluster] = []
    cur: dict | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if cur is None:
            if toks and toks[0] == "part":
                if len(toks) != 2:
                    raise FormatError(lineno, "expected 'part <name>'")
                cur = {"name": toks[1], "sites": set(), "edges": set(), "input": [], "output": []}
                parent_lines.append("")
            else:
                parent_lines.append(raw)
            continue
        parent_lines.append("")
        if not toks:
            continue
        head = toks[0]
        if head == "end":
            if len(toks) != 1:
                raise FormatError(lineno, "expected 'end'")
            parts.append(SubCluster(frozenset(cur["sites"]), frozenset(cur["edges"]),
                                    tuple(cur["input"]), tuple(cur["output"]), cur["name"]))
            cur = None
        elif head == "site" or head in ("input", "output"):
            if len(toks) != 4:
                raise FormatError(lineno, f"expected '{head} x y z'")
            site = parse_site(toks[1:4], lineno)
            if head == "site":
                cur["sites"].add(site)
            else:
                cur[head].append(site)
        elif head == "edge":
            if len(toks) != 7:
                raise FormatError(lineno, "expected 'edge x1 y1 z1 x2 y2 z2'")
            cur["edges"].add(norm_edge(parse_site(toks[1:4], lineno), parse_site(toks[4:7], lineno)))
        else:
            raise FormatError(lineno, f"unknown part record {head!r}")
    if cur is not None:
        raise FormatError(0, f"part {cur['name']!r} is missing 'end'")
    return Decomposition(parse_cluster("\n".join(parent_lines)), tuple(parts))


def with_roles(c: Cluster, **changes) -> Cluster:
    """Copy of ``c`` with dataclass fields replaced."""
    return replace(c, **changes)


__all__ = [
    "CONSTRAINTS",
    "Cluster",
    "ClusterError",
    "Decomposition",
    "Reduction",
    "SubCluster",
    "ValidationReport",
    "format_cluster",
    "format_decomposition",
    "induced_lattice_edges",
    "lattice_neighbors",
    "make_lattice_cluster",
    "norm_edge",
    "parse_cluster",
    "parse_decomposition",
    "remove_redundant",
    "validate_decomposition",
]
