"""Problem data model and random instance generation.

An instance couples a task graph (precedence constraints plus per-edge data
volumes) with a heterogeneous platform (per-processor execution times,
failure rates, link failure rates and link delays) and optional per-task
deadlines. Random instances are produced by composing the generators below
over a single seeded random stream; the draw order is documented on
``generate_instance`` and never changes, so a seed pins an instance exactly.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FORMAT_MAGIC = "dagsched-instance"
FORMAT_VERSION = "v1"

DATA_VOLUME_RANGE = (1, 10)
FAILURE_RATE_RANGE = (7.5e-06, 1.25e-05)
DEFAULT_LINK_DELAY_RANGE = (0.1, 1.0)
DEFAULT_EXEC_MEAN = 5.0
DISTRIBUTIONS = ("exponential", "normal")

# Draws from either distribution are clamped below at this floor so execution
# times and deadline slacks stay strictly positive. Clamping replaces the
# value after the draw, so the stream position is unaffected.
POSITIVE_FLOOR = 1e-3

# The normal distribution gets sigma = mean / 5; at that spread a negative
# draw is a 5-sigma event, so the clamp above has no measurable effect on the
# sample mean.
NORMAL_SIGMA_FRACTION = 0.2


class CyclicGraphError(ValueError):
    """The precedence relation admits no topological order."""


class InstanceFormatError(ValueError):
    """An instance file is malformed or fails validation."""


class FormatVersionError(InstanceFormatError):
    """An instance file declares an unsupported format version."""


@dataclass(eq=False)
class TaskGraph:
    """Precedence DAG over tasks 0..n_tasks-1.

    predecessors[i] lists the immediate predecessors of task i (sorted).
    data_volume[k, l] is the amount of data task k sends to task l; it is
    positive exactly on the edges of the graph.
    """

    n_tasks: int
    predecessors: tuple[tuple[int, ...], ...]
    data_volume: np.ndarray

    def __post_init__(self):
        self.predecessors = tuple(
            tuple(sorted({int(p) for p in ps})) for ps in self.predecessors
        )
        self.data_volume = np.asarray(self.data_volume, dtype=float)

    @classmethod
    def from_adjacency(cls, adjacency, data_volume=None) -> "TaskGraph":
        """Build a graph from a 0/1 adjacency matrix (entry [k, l] = edge k->l).

        When data_volume is omitted every edge carries volume 1.
        """
        adj = np.asarray(adjacency)
        n = adj.shape[0]
        preds = tuple(
            tuple(int(k) for k in np.nonzero(adj[:, l])[0]) for l in range(n)
        )
        vol = adj.astype(float) if data_volume is None else data_volume
        return cls(n, preds, vol)

    @property
    def n_edges(self) -> int:
        return sum(len(ps) for ps in self.predecessors)

    def successors(self) -> tuple[tuple[int, ...], ...]:
        succ: list[list[int]] = [[] for _ in range(self.n_tasks)]
        for l, ps in enumerate(self.predecessors):
            for k in ps:
                succ[k].append(l)
        return tuple(tuple(s) for s in succ)

    def edges(self) -> list[tuple[int, int, float]]:
        """All (src, dst, volume) triples, sorted by (src, dst)."""
        out = []
        for l, ps in enumerate(self.predecessors):
            for k in ps:
                out.append((k, l, float(self.data_volume[k, l])))
        out.sort()
        return out

    def topological_order(self) -> list[int]:
        """Kahn's algorithm; raises CyclicGraphError when a cycle exists."""
        indeg = [len(ps) for ps in self.predecessors]
        succ = self.successors()
        ready = [i for i in range(self.n_tasks) if indeg[i] == 0]
        order: list[int] = []
        while ready:
            i = ready.pop()
            order.append(i)
            for s in succ[i]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    ready.append(s)
        if len(order) != self.n_tasks:
            raise CyclicGraphError("precedence relation contains a cycle")
        return order

    def __eq__(self, other):
        if not isinstance(other, TaskGraph):
            return NotImplemented
        return (
            self.n_tasks == other.n_tasks
            and self.predecessors == other.predecessors
            and np.array_equal(self.data_volume, other.data_volume)
        )


@dataclass(eq=False)
class Platform:
    """Heterogeneous processors with unreliable processors and links.

    exec_time[i, j] is the execution time of task i on processor j.
    proc_failure[j] and link_failure[k, j] are failure rates per time unit;
    link_delay[k, j] is transfer time per volume unit between processors k
    and j. Both link matrices are zero on the diagonal (a processor talks to
    itself for free and never drops the data) and need not be symmetric.
    """

    n_procs: int
    exec_time: np.ndarray
    proc_failure: np.ndarray
    link_failure: np.ndarray
    link_delay: np.ndarray

    def __post_init__(self):
        self.exec_time = np.asarray(self.exec_time, dtype=float)
        self.proc_failure = np.asarray(self.proc_failure, dtype=float)
        self.link_failure = np.asarray(self.link_failure, dtype=float)
        self.link_delay = np.asarray(self.link_delay, dtype=float)

    def __eq__(self, other):
        if not isinstance(other, Platform):
            return NotImplemented
        return (
            self.n_procs == other.n_procs
            and np.array_equal(self.exec_time, other.exec_time)
            and np.array_equal(self.proc_failure, other.proc_failure)
            and np.array_equal(self.link_failure, other.link_failure)
            and np.array_equal(self.link_delay, other.link_delay)
        )


@dataclass(eq=False)
class Instance:
    """A scheduling problem: graph + platform + optional per-task deadlines."""

    graph: TaskGraph
    platform: Platform
    deadlines: np.ndarray | None = None

    def __post_init__(self):
        if self.deadlines is not None:
            self.deadlines = np.asarray(self.deadlines, dtype=float)

    @property
    def n_tasks(self) -> int:
        return self.graph.n_tasks

    @property
    def n_procs(self) -> int:
        return self.platform.n_procs

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        if self.graph != other.graph or self.platform != other.platform:
            return False
        if (self.deadlines is None) != (other.deadlines is None):
            return False
        if self.deadlines is None:
            return True
        return np.array_equal(self.deadlines, other.deadlines)


def validate(instance: Instance) -> list[str]:
    """Check every structural invariant; returns one message per violation."""
    out: list[str] = []
    g, p = instance.graph, instance.platform
    n, m = g.n_tasks, p.n_procs
    if n < 1:
        out.append("n_tasks must be >= 1")
    if m < 1:
        out.append("n_procs must be >= 1")

    structure_ok = True
    if len(g.predecessors) != n:
        out.append(
            f"predecessors has {len(g.predecessors)} entries, expected {n}"
        )
        structure_ok = False
    else:
        bad = sorted(
            {
                k
                for ps in g.predecessors
                for k in ps
                if not 0 <= k < n
            }
        )
        if bad:
            out.append(f"predecessor indices out of range: {bad}")
            structure_ok = False
        if any(i in ps for i, ps in enumerate(g.predecessors)):
            out.append("self-edges are not allowed")
            structure_ok = False

    if structure_ok and n >= 1:
        try:
            g.topological_order()
        except CyclicGraphError:
            out.append("precedence relation contains a cycle")

    if g.data_volume.shape != (n, n):
        out.append(
            f"data_volume has shape {g.data_volume.shape}, expected {(n, n)}"
        )
    else:
        if np.any(g.data_volume < 0):
            out.append("data volumes must be non-negative")
        if np.any(np.diagonal(g.data_volume) != 0):
            out.append("data_volume diagonal must be zero")
        if structure_ok:
            expected = np.zeros((n, n), dtype=bool)
            for l, ps in enumerate(g.predecessors):
                for k in ps:
                    expected[k, l] = True
            if np.any((g.data_volume > 0) != expected):
                out.append(
                    "data_volume must be positive exactly on the graph edges"
                )

    if p.exec_time.shape != (n, m):
        out.append(
            f"exec_time has shape {p.exec_time.shape}, expected {(n, m)}"
        )
    elif np.any(p.exec_time <= 0):
        out.append("execution times must be strictly positive")

    if p.proc_failure.shape != (m,):
        out.append(
            f"proc_failure has shape {p.proc_failure.shape}, expected {(m,)}"
        )
    elif np.any(p.proc_failure < 0):
        out.append("processor failure rates must be non-negative")

    for name, mat in (("link_failure", p.link_failure), ("link_delay", p.link_delay)):
        if mat.shape != (m, m):
            out.append(f"{name} has shape {mat.shape}, expected {(m, m)}")
            continue
        if np.any(mat < 0):
            out.append(f"{name} entries must be non-negative")
        if np.any(np.diagonal(mat) != 0):
            out.append(f"{name} diagonal must be zero")

    if instance.deadlines is not None:
        d = instance.deadlines
        if d.shape != (n,):
            out.append(f"deadlines has shape {d.shape}, expected {(n,)}")
        elif np.any(d <= 0):
            out.append("deadlines must be strictly positive")

    return out


def generate_pmethod(n_tasks: int, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """Random DAG adjacency matrix: strict upper triangle iid Bernoulli(epsilon).

    epsilon = 0 gives an edgeless graph, epsilon = 1 a total order with
    n(n-1)/2 edges; the expected edge count is epsilon * n(n-1)/2. The result
    is acyclic by construction because edges only go from lower to higher
    index. A full n x n block of uniforms is drawn and masked, so the stream
    advances by the same amount regardless of epsilon.
    """
    if n_tasks < 1:
        raise ValueError("n_tasks must be >= 1")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    u = rng.random((n_tasks, n_tasks))
    return np.triu(u < epsilon, k=1).astype(np.int64)


def _draw_positive(dist: str, mean: float, size, rng: np.random.Generator):
    if mean <= 0:
        raise ValueError(f"mean must be positive, got {mean}")
    if dist == "exponential":
        x = rng.exponential(mean, size)
    elif dist == "normal":
        x = rng.normal(mean, NORMAL_SIGMA_FRACTION * mean, size)
    else:
        raise ValueError(f"unknown distribution {dist!r}; use one of {DISTRIBUTIONS}")
    return np.maximum(x, POSITIVE_FLOOR)


def generate_exec_times(
    n_tasks: int, n_procs: int, dist: str, mean: float, rng: np.random.Generator
) -> np.ndarray:
    """Per-task, per-processor execution times drawn iid from dist."""
    if n_tasks < 1 or n_procs < 1:
        raise ValueError("n_tasks and n_procs must be >= 1")
    return _draw_positive(dist, mean, (n_tasks, n_procs), rng)


def generate_data_volumes(adjacency, rng: np.random.Generator) -> np.ndarray:
    """Integer data volumes, uniform on [1, 10], on the edges of adjacency.

    Non-edges get volume 0. A full matrix of integers is drawn and masked so
    the stream position does not depend on the edge pattern.
    """
    adj = np.asarray(adjacency)
    lo, hi = DATA_VOLUME_RANGE
    vals = rng.integers(lo, hi + 1, size=adj.shape)
    return np.where(adj > 0, vals, 0).astype(float)


def generate_failure_rates(
    n_procs: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Processor and link failure rates, uniform on [7.5e-6, 1.25e-5].

    Draw order: the processor vector first, then the full link matrix; the
    link diagonal is zeroed afterwards.
    """
    lo, hi = FAILURE_RATE_RANGE
    proc = rng.uniform(lo, hi, n_procs)
    link = rng.uniform(lo, hi, (n_procs, n_procs))
    np.fill_diagonal(link, 0.0)
    return proc, link


def generate_link_delays(
    n_procs: int,
    rng: np.random.Generator,
    delay_range: tuple[float, float] = DEFAULT_LINK_DELAY_RANGE,
) -> np.ndarray:
    """Per-link transfer delays, uniform on delay_range, zero diagonal."""
    lo, hi = delay_range
    if not 0 <= lo <= hi:
        raise ValueError(f"invalid delay range {delay_range}")
    delays = rng.uniform(lo, hi, (n_procs, n_procs))
    np.fill_diagonal(delays, 0.0)
    return delays


def generate_deadlines(
    instance: Instance, dist: str, rng: np.random.Generator
) -> np.ndarray:
    """Per-task deadlines loose enough to be meetable but not vacuous.

    For task i the deadline is

        d_i = tE_i + max_j exec_time(i, j) + slack_i + comm_i

    where tE_i is an assignment-independent earliest-start bound (0 for
    sources, otherwise max over predecessors p of tE_p + min_j exec_time(p, j)),
    slack_i is a random draw from dist with mean equal to task i's mean
    execution time (clamped at the positive floor), and comm_i bounds the
    inbound communication: max over predecessors of volume(p, i) times the
    largest link delay on the platform. Slack draws happen in ascending task
    order, one per task.
    """
    g = instance.graph
    exec_time = instance.platform.exec_time
    n = g.n_tasks
    min_exec = exec_time.min(axis=1)
    te = [0.0] * n
    for i in g.topological_order():
        ps = g.predecessors[i]
        if ps:
            te[i] = max(te[p] + min_exec[p] for p in ps)
    max_delay = float(instance.platform.link_delay.max())
    deadlines = np.empty(n, dtype=float)
    for i in range(n):
        slack = float(_draw_positive(dist, float(exec_time[i].mean()), None, rng))
        comm = max(
            (float(g.data_volume[p, i]) * max_delay for p in g.predecessors[i]),
            default=0.0,
        )
        deadlines[i] = te[i] + float(exec_time[i].max()) + slack + comm
    return deadlines


def generate_instance(
    n_tasks: int,
    n_procs: int,
    epsilon: float,
    dist: str = "exponential",
    mean: float = DEFAULT_EXEC_MEAN,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
    link_delay_range: tuple[float, float] = DEFAULT_LINK_DELAY_RANGE,
    with_deadlines: bool = True,
) -> Instance:
    """Generate a complete random instance from one seeded stream.

    Draw order (fixed): adjacency, execution times, data volumes, processor
    failure rates, link failure rates, link delays, then one deadline slack
    per task. Identical seeds therefore reproduce identical instances.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    if n_procs < 1:
        raise ValueError("n_procs must be >= 1")
    adj = generate_pmethod(n_tasks, epsilon, rng)
    exec_time = generate_exec_times(n_tasks, n_procs, dist, mean, rng)
    volumes = generate_data_volumes(adj, rng)
    proc_fail, link_fail = generate_failure_rates(n_procs, rng)
    delays = generate_link_delays(n_procs, rng, link_delay_range)
    graph = TaskGraph.from_adjacency(adj, volumes)
    platform = Platform(n_procs, exec_time, proc_fail, link_fail, delays)
    inst = Instance(graph, platform)
    if with_deadlines:
        inst = Instance(graph, platform, generate_deadlines(inst, dist, rng))
    return inst


def _fmt_row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def dumps_instance(instance: Instance) -> str:
    """Serialize to the versioned text format (see README for the layout).

    Floats are written with repr, which round-trips exactly, so
    save -> load -> save is byte-identical.
    """
    g, p = instance.graph, instance.platform
    lines = [
        f"{FORMAT_MAGIC} {FORMAT_VERSION}",
        f"n_tasks {g.n_tasks}",
        f"n_procs {p.n_procs}",
    ]
    edges = g.edges()
    lines.append(f"edges {len(edges)}")
    for k, l, v in edges:
        lines.append(f"{k} {l} {repr(v)}")
    lines.append("exec_time")
    for i in range(g.n_tasks):
        lines.append(_fmt_row(p.exec_time[i]))
    lines.append("proc_failure")
    lines.append(_fmt_row(p.proc_failure))
    lines.append("link_failure")
    for j in range(p.n_procs):
        lines.append(_fmt_row(p.link_failure[j]))
    lines.append("link_delay")
    for j in range(p.n_procs):
        lines.append(_fmt_row(p.link_delay[j]))
    if instance.deadlines is None:
        lines.append("deadlines none")
    else:
        lines.append("deadlines")
        lines.append(_fmt_row(instance.deadlines))
    lines.append("end")
    return "\n".join(lines) + "\n"


class _Reader:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        self.pos = 0

    def next_line(self, field: str) -> str:
        if self.pos >= len(self.lines):
            raise InstanceFormatError(
                f"unexpected end of file while reading {field}"
            )
        line = self.lines[self.pos]
        self.pos += 1
        return line


def _parse_labeled_int(reader: _Reader, label: str) -> int:
    line = reader.next_line(label)
    parts = line.split()
    if len(parts) != 2 or parts[0] != label:
        raise InstanceFormatError(f"expected '{label} <int>', got {line!r}")
    try:
        return int(parts[1])
    except ValueError:
        raise InstanceFormatError(
            f"field {label}: not an integer: {parts[1]!r}"
        ) from None


def _parse_floats(line: str, count: int, field: str) -> list[float]:
    parts = line.split()
    if len(parts) != count:
        raise InstanceFormatError(
            f"field {field}: expected {count} values, got {len(parts)}"
        )
    try:
        return [float(x) for x in parts]
    except ValueError:
        raise InstanceFormatError(f"field {field}: not a number in {line!r}") from None


def _parse_matrix(reader: _Reader, label: str, rows: int, cols: int) -> np.ndarray:
    header = reader.next_line(label)
    if header.strip() != label:
        raise InstanceFormatError(f"expected section {label!r}, got {header!r}")
    mat = np.empty((rows, cols), dtype=float)
    for r in range(rows):
        mat[r] = _parse_floats(reader.next_line(label), cols, f"{label} row {r}")
    return mat


def loads_instance(text: str) -> Instance:
    """Parse the text format; raises InstanceFormatError on any problem."""
    reader = _Reader(text)
    header = reader.next_line("header")
    parts = header.split()
    if len(parts) != 2 or parts[0] != FORMAT_MAGIC:
        raise InstanceFormatError(f"field header: expected {FORMAT_MAGIC!r} line")
    if parts[1] != FORMAT_VERSION:
        raise FormatVersionError(
            f"unsupported format version {parts[1]!r}, expected {FORMAT_VERSION!r}"
        )
    n = _parse_labeled_int(reader, "n_tasks")
    m = _parse_labeled_int(reader, "n_procs")
    if n < 0 or m < 0:
        raise InstanceFormatError("n_tasks and n_procs must be non-negative")
    n_edges = _parse_labeled_int(reader, "edges")
    volume = np.zeros((max(n, 0), max(n, 0)), dtype=float)
    preds: list[list[int]] = [[] for _ in range(max(n, 0))]
    seen: set[tuple[int, int]] = set()
    for e in range(n_edges):
        line = reader.next_line(f"edge {e}")
        parts = line.split()
        if len(parts) != 3:
            raise InstanceFormatError(
                f"field edge {e}: expected 'src dst volume', got {line!r}"
            )
        try:
            k, l = int(parts[0]), int(parts[1])
            v = float(parts[2])
        except ValueError:
            raise InstanceFormatError(
                f"field edge {e}: not numeric: {line!r}"
            ) from None
        if not (0 <= k < n and 0 <= l < n):
            raise InstanceFormatError(
                f"field edge {e}: endpoint out of range in {line!r}"
            )
        if (k, l) in seen:
            raise InstanceFormatError(f"field edge {e}: duplicate edge ({k}, {l})")
        seen.add((k, l))
        preds[l].append(k)
        volume[k, l] = v
    exec_time = _parse_matrix(reader, "exec_time", n, m)
    proc_fail = _parse_matrix(reader, "proc_failure", 1, m)[0]
    link_fail = _parse_matrix(reader, "link_failure", m, m)
    link_delay = _parse_matrix(reader, "link_delay", m, m)
    dl_line = reader.next_line("deadlines")
    deadlines = None
    if dl_line.strip() == "deadlines none":
        pass
    elif dl_line.strip() == "deadlines":
        deadlines = np.array(
            _parse_floats(reader.next_line("deadlines"), n, "deadlines")
        )
    else:
        raise InstanceFormatError(
            f"field deadlines: expected 'deadlines' or 'deadlines none', got {dl_line!r}"
        )
    if reader.next_line("end").strip() != "end":
        raise InstanceFormatError("missing 'end' marker (truncated file?)")

    graph = TaskGraph(n, tuple(tuple(ps) for ps in preds), volume)
    platform = Platform(m, exec_time, proc_fail, link_fail, link_delay)
    inst = Instance(graph, platform, deadlines)
    problems = validate(inst)
    if problems:
        raise InstanceFormatError(
            "instance fails validation: " + "; ".join(problems)
        )
    return inst


def save_instance(instance: Instance, path) -> None:
    """Write the instance atomically (temp file + rename)."""
    _atomic_write_text(Path(path), dumps_instance(instance))


def load_instance(path) -> Instance:
    return loads_instance(Path(path).read_text())


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
