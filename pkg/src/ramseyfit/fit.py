"""Construction and certification of n-fit graphs.

Pipeline: sample G(2n-1, 1/2) -> check (a)-(c) -> trim surplus edges ->
switching repair -> certify (A)-(D).

Randomness
----------
All random draws come from NumPy's ``PCG64`` bit generator (the published
PCG XSL RR 128/64 permutation generator) seeded with the 64-bit build seed.
``sample_uniform_graph`` takes one raw 64-bit output per vertex pair, in the
order (0,1), (0,2), ..., (0,N-1), (1,2), ...; the pair is an edge iff the
draw is below 2**63.  The switching step uses an independent PCG64 stream
seeded with ``seed ^ SWITCH_STREAM``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, asdict
from typing import Iterable

import numpy as np

from .errors import ConstructionFailure, InputError, RepairFailure
from .graph import Graph, bits
from .spectral import (
    EXACT_DISCREPANCY_LIMIT,
    discrepancy_from_norm,
    max_discrepancy,
    sampled_max_discrepancy,
    spectral_discrepancy_bound,
)

__all__ = [
    "ToleranceProfile",
    "TargetDegreeProfile",
    "Trim",
    "Switch",
    "Join",
    "RepairLog",
    "PropertyCheck",
    "PseudorandomReport",
    "ConditionResult",
    "FitCertificate",
    "Status",
    "fit_edge_count",
    "sample_uniform_graph",
    "check_pseudorandom_properties",
    "trim_surplus_edges",
    "switch_repair",
    "build_fit_graph",
    "certify_fit",
    "replay_build",
]

SEED_LIMIT = 1 << 64
SWITCH_STREAM = 0x9E3779B97F4A7C15
DEFAULT_DISC_SAMPLES = 10_000


class Status:
    PROVEN = "proven"
    SAMPLED = "sampled-consistent"
    FAILED = "failed"


def fit_edge_count(n: int) -> int:
    """ceil((n+1)(2n-1)/2)."""
    return ((n + 1) * (2 * n - 1) + 1) // 2


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise InputError("seed must be a 64-bit unsigned integer")
    return seed


@dataclass(frozen=True)
class ToleranceProfile:
    """Exponents of the desk-scale thresholds, all scaled by ``multiplier``.

    ``deg_exponent`` bounds degrees and codegrees of the raw sample,
    ``sample_disc_exponent`` its set-pair discrepancy, ``codeg_exponent`` and
    ``disc_exponent`` the final conditions (C) and (D).
    """

    deg_exponent: float = 0.6
    codeg_exponent: float = 0.7
    disc_exponent: float = 1.7
    sample_disc_exponent: float = 1.6
    multiplier: float = 1.0

    def __post_init__(self):
        for name in ("deg_exponent", "codeg_exponent", "disc_exponent", "sample_disc_exponent"):
            if not 0 < getattr(self, name) < 2:
                raise InputError(f"{name} must lie in (0, 2)")
        if not self.multiplier > 0:
            raise InputError("multiplier must be positive")

    def threshold(self, n: int, exponent: float) -> float:
        return self.multiplier * n ** exponent


@dataclass(frozen=True)
class TargetDegreeProfile:
    n: int
    target: tuple[int, ...]

    @classmethod
    def for_n(cls, n: int) -> "TargetDegreeProfile":
        if n < 2:
            raise InputError("n must be at least 2")
        t = [n + 1] * (2 * n - 1)
        if n % 2 == 0:
            t[0] = n + 2
        return cls(n, tuple(t))

    @classmethod
    def custom(cls, targets: Iterable[int], n: int = 0) -> "TargetDegreeProfile":
        """Arbitrary per-vertex targets (used for small hand-built instances)."""
        return cls(n, tuple(int(t) for t in targets))

    def __len__(self) -> int:
        return len(self.target)


# -- repair log ---------------------------------------------------------


@dataclass(frozen=True)
class Trim:
    vertex: int
    removed: tuple[int, int]
    kind: str = "trim"


@dataclass(frozen=True)
class Switch:
    """Delete ``removed`` = (w', w''), add (v', w') and (v'', w'').

    The degenerate variant has ``v1 == v2`` and raises that vertex by two.
    """

    v1: int
    v2: int
    removed: tuple[int, int]
    added: tuple[tuple[int, int], tuple[int, int]]
    kind: str = "switch"


@dataclass(frozen=True)
class Join:
    """Fallback when no switch exists: add the edge between two deficient vertices."""

    v1: int
    v2: int
    kind: str = "join"


@dataclass
class RepairLog:
    ops: list = field(default_factory=list)
    touches: list[int] = field(default_factory=list)

    @classmethod
    def fresh(cls, vertex_count: int) -> "RepairLog":
        return cls([], [0] * vertex_count)

    def extend(self, other: "RepairLog") -> "RepairLog":
        return RepairLog(self.ops + other.ops, list(other.touches))

    def replay(self, g: Graph) -> Graph:
        rows = list(g.rows)
        for op in self.ops:
            if isinstance(op, Trim):
                _remove(rows, *op.removed)
            elif isinstance(op, Switch):
                _remove(rows, *op.removed)
                for e in op.added:
                    _add(rows, *e)
            elif isinstance(op, Join):
                _add(rows, op.v1, op.v2)
            else:  # pragma: no cover
                raise TypeError(f"unknown repair op {op!r}")
        return Graph._trusted(g.n, rows)

    def summary(self) -> dict:
        kinds = Counter(op.kind for op in self.ops)
        return {
            "trims": kinds.get("trim", 0),
            "switches": kinds.get("switch", 0),
            "joins": kinds.get("join", 0),
            "max_touch": max(self.touches, default=0),
        }

    def to_json(self) -> list[dict]:
        return [asdict(op) for op in self.ops]


def _remove(rows, u, v):
    if not (rows[u] >> v) & 1:
        raise RepairFailure(f"cannot delete missing edge ({u}, {v})")
    rows[u] &= ~(1 << v)
    rows[v] &= ~(1 << u)


def _add(rows, u, v):
    if u == v or (rows[u] >> v) & 1:
        raise RepairFailure(f"cannot add edge ({u}, {v})")
    rows[u] |= 1 << v
    rows[v] |= 1 << u


# -- sampling and (a)-(c) ------------------------------------------------


def sample_uniform_graph(n: int, seed: int) -> Graph:
    """G(2n-1, 1/2) drawn deterministically from PCG64(seed); see module doc."""
    if n < 2:
        raise InputError("n must be at least 2")
    seed = _check_seed(seed)
    N = 2 * n - 1
    raw = np.random.PCG64(seed).random_raw(N * (N - 1) // 2)
    keep = raw < np.uint64(1 << 63)
    iu, ju = np.triu_indices(N, k=1)  # row-major = canonical pair order
    rows = [0] * N
    for u, v in zip(iu[keep].tolist(), ju[keep].tolist()):
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph._trusted(N, rows)


@dataclass
class PropertyCheck:
    passed: bool
    threshold: float
    worst_deviation: float
    witness: tuple

    @property
    def slack(self) -> float:
        return self.threshold - self.worst_deviation


@dataclass
class PseudorandomReport:
    degree: PropertyCheck
    codegree: PropertyCheck
    discrepancy: PropertyCheck

    @property
    def passed(self) -> bool:
        return self.degree.passed and self.codegree.passed and self.discrepancy.passed

    def to_json(self) -> dict:
        out = {}
        for key in ("degree", "codegree", "discrepancy"):
            c = getattr(self, key)
            out[key] = {
                "passed": c.passed,
                "threshold": c.threshold,
                "worst_deviation": c.worst_deviation,
                "slack": c.slack,
                "witness": _jsonable(c.witness),
            }
        return out


def _jsonable(x):
    if isinstance(x, (frozenset, set)):
        return sorted(int(v) for v in x)
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _codegree_extremes(g: Graph, center: float) -> tuple[float, tuple[int, int]]:
    a = g.adjacency_matrix(np.int32)
    co = (a @ a).astype(np.float64)
    dev = np.abs(co - center)
    np.fill_diagonal(dev, -1.0)
    flat = int(dev.argmax())
    v, w = divmod(flat, g.n)
    return float(dev[v, w]), (min(v, w), max(v, w))


def check_pseudorandom_properties(g: Graph, n: int, tol: ToleranceProfile | None = None,
                                  samples: int = DEFAULT_DISC_SAMPLES,
                                  seed: int = 0) -> PseudorandomReport:
    """Properties (a)-(c) of the raw random sample.

    (a) and (b) are checked over every vertex / pair; (c) over ``samples``
    random sets S, each paired with its exactly worst T.
    """
    tol = tol or ToleranceProfile()
    if g.n != 2 * n - 1:
        raise InputError(f"expected {2 * n - 1} vertices for n={n}, got {g.n}")
    t_deg = tol.threshold(n, tol.deg_exponent)
    degs = g.degrees()
    devs = [abs(d - n) for d in degs]
    worst_v = max(range(g.n), key=lambda v: (devs[v], -v))
    deg = PropertyCheck(devs[worst_v] <= t_deg, t_deg, float(devs[worst_v]), (worst_v, degs[worst_v]))

    if g.n >= 2:
        cdev, pair = _codegree_extremes(g, n / 2)
    else:
        cdev, pair = 0.0, ()
    cod = PropertyCheck(cdev <= t_deg, t_deg, cdev, pair)

    t_disc = tol.threshold(n, tol.sample_disc_exponent)
    val, S, T = sampled_max_discrepancy(g, samples, seed)
    disc = PropertyCheck(val <= t_disc, t_disc, val, (S, T))
    return PseudorandomReport(deg, cod, disc)


# -- degree repair -------------------------------------------------------


def trim_surplus_edges(g: Graph, profile: TargetDegreeProfile,
                       touches: list[int] | None = None) -> tuple[Graph, RepairLog]:
    """Delete surplus edges so no vertex exceeds its target degree.

    Vertices are processed in increasing id; each surplus edge goes to the
    neighbour with the fewest touches so far, ties to the smaller id.
    """
    if len(profile) != g.n:
        raise InputError("degree profile does not match the vertex count")
    rows = list(g.rows)
    log = RepairLog([], list(touches) if touches is not None else [0] * g.n)
    t = log.touches
    for v in range(g.n):
        surplus = rows[v].bit_count() - profile.target[v]
        if surplus <= 0:
            continue
        order = sorted(bits(rows[v]), key=lambda w: (t[w], w))
        for w in order[:surplus]:
            _remove(rows, v, w)
            t[v] += 1
            t[w] += 1
            log.ops.append(Trim(v, (min(v, w), max(v, w))))
    return Graph._trusted(g.n, rows), log


def _least_touched(mask: int, touches: list[int], k: int) -> list[int]:
    return sorted(bits(mask), key=lambda w: (touches[w], w))[:k]


def _crossing_edges(rows, left: list[int], right_mask: int) -> list[tuple[int, int]]:
    out = []
    for a in left:
        for b in bits(rows[a] & right_mask):
            out.append((a, b))
    return out


def switch_repair(g: Graph, profile: TargetDegreeProfile, seed: int = 0,
                  touches: list[int] | None = None,
                  debug: bool = False) -> tuple[Graph, RepairLog]:
    """Raise every degree to its target by edge switchings.

    Each step pairs the two most deficient vertices v', v'' (ties by id),
    takes W' / W'' as the ceil(n/10) least-touched vertices of
    N(v'')\\N(v') and N(v')\\N(v''), and replaces a crossing edge w'w'' by
    v'w' and v''w''.  If no crossing edge exists the candidate sets are
    widened to everything once; if that fails and v'v'' is a non-edge the
    two are joined directly, otherwise RepairFailure is raised.  A lone
    vertex short by two or more uses the degenerate variant: an edge among
    its non-neighbours is deleted and both ends attached to it.
    """
    if len(profile) != g.n:
        raise InputError("degree profile does not match the vertex count")
    rows = list(g.rows)
    deficit = [profile.target[v] - rows[v].bit_count() for v in range(g.n)]
    if any(d < 0 for d in deficit):
        raise InputError("switch_repair needs every degree at or below its target")
    if sum(deficit) % 2:
        raise InputError("total degree deficiency must be even")
    log = RepairLog([], list(touches) if touches is not None else [0] * g.n)
    t = log.touches
    rng = np.random.Generator(np.random.PCG64(_check_seed(seed) ^ SWITCH_STREAM))
    k = max(1, math.ceil(profile.n / 10)) if profile.n else max(1, math.ceil(g.n / 20))
    full = (1 << g.n) - 1

    def pick(cands):
        return cands[int(rng.integers(len(cands)))]

    while True:
        short = sorted((v for v in range(g.n) if deficit[v] > 0), key=lambda v: (-deficit[v], v))
        if not short:
            break
        before = [r.bit_count() for r in rows] if debug else None
        if len(short) == 1:
            v = short[0]
            pool = full & ~rows[v] & ~(1 << v)
            cands = []
            for width in (k, None):
                chosen = _least_touched(pool, t, width if width else g.n)
                cmask = sum(1 << w for w in chosen)
                cands = [(a, b) for (a, b) in _crossing_edges(rows, chosen, cmask) if a < b]
                if cands:
                    break
            if not cands:
                raise RepairFailure(f"no edge among the non-neighbours of {v}")
            a, b = pick(cands)
            _remove(rows, a, b)
            _add(rows, v, a)
            _add(rows, v, b)
            t[v] += 2
            t[a] += 2
            t[b] += 2
            deficit[v] -= 2
            log.ops.append(Switch(v, v, (a, b), ((v, a), (v, b))))
            if debug:
                _assert_only_changed(before, rows, {v: 2})
            continue
        v1, v2 = short[0], short[1]
        pool1 = rows[v2] & ~rows[v1] & ~(1 << v1)  # W' candidates
        pool2 = rows[v1] & ~rows[v2] & ~(1 << v2)  # W'' candidates
        cands = []
        for width in (k, g.n):
            w1 = _least_touched(pool1, t, width)
            w2 = _least_touched(pool2, t, width)
            cands = _crossing_edges(rows, w1, sum(1 << w for w in w2))
            if cands:
                break
        if cands:
            a, b = pick(cands)
            _remove(rows, a, b)
            _add(rows, v1, a)
            _add(rows, v2, b)
            for x in (v1, v2):
                t[x] += 1
            t[a] += 2
            t[b] += 2
            log.ops.append(Switch(v1, v2, (min(a, b), max(a, b)), ((v1, a), (v2, b))))
        elif not (rows[v1] >> v2) & 1:
            _add(rows, v1, v2)
            t[v1] += 1
            t[v2] += 1
            log.ops.append(Join(v1, v2))
        else:
            raise RepairFailure(f"no switch available for deficient pair ({v1}, {v2})")
        deficit[v1] -= 1
        deficit[v2] -= 1
        if debug:
            _assert_only_changed(before, rows, {v1: 1, v2: 1})
    out = Graph._trusted(g.n, rows)
    assert out.degrees() == list(profile.target), "switch repair missed the degree profile"
    return out, log


def _assert_only_changed(before, rows, expected: dict[int, int]) -> None:
    after = [r.bit_count() for r in rows]
    for v, (b, a) in enumerate(zip(before, after)):
        assert a - b == expected.get(v, 0), f"switch changed degree of {v} by {a - b}"


# -- certification -------------------------------------------------------


@dataclass
class ConditionResult:
    status: str
    slack: float
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "slack": self.slack, "detail": self.detail}


@dataclass
class FitCertificate:
    n: int
    A: ConditionResult
    B: ConditionResult
    C: ConditionResult
    D: ConditionResult
    seed: int | None = None
    retries_used: int = 0
    repair_log: RepairLog | None = None
    sample_checks: dict | None = None
    multiplier: float = 1.0

    @property
    def conditions(self) -> dict[str, ConditionResult]:
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D}

    @property
    def any_failed(self) -> bool:
        return any(c.status == Status.FAILED for c in self.conditions.values())

    @property
    def all_proven(self) -> bool:
        return all(c.status == Status.PROVEN for c in self.conditions.values())

    @property
    def exit_code(self) -> int:
        if self.any_failed:
            return 1
        return 0 if self.all_proven else 2

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "multiplier": self.multiplier,
            "seed": self.seed,
            "retries_used": self.retries_used,
            "conditions": {k: c.to_json() for k, c in self.conditions.items()},
            "repair_log": self.repair_log.summary() if self.repair_log else None,
            "sample_checks": self.sample_checks,
        }


def certify_fit(g: Graph, n: int, tol: ToleranceProfile | None = None,
                samples: int = DEFAULT_DISC_SAMPLES, sample_seed: int = 0) -> FitCertificate:
    """Check conditions (A)-(D).

    (A)-(C) are exact.  (D) is exact for graphs of at most
    ``EXACT_DISCREPANCY_LIMIT`` vertices; otherwise it is ``proven`` when the
    spectral bound already implies it, ``sampled-consistent`` when
    ``samples`` random S (each with its worst T) stay inside the threshold,
    and ``failed`` with the worst pair seen.
    """
    tol = tol or ToleranceProfile()
    N = 2 * n - 1
    m_target = fit_edge_count(n)

    ok_a = g.n == N and g.edge_count == m_target
    a_res = ConditionResult(
        Status.PROVEN if ok_a else Status.FAILED,
        0.0 if ok_a else -float(abs(g.edge_count - m_target) + abs(g.n - N)),
        {"vertices": g.n, "edges": g.edge_count, "required_vertices": N, "required_edges": m_target},
    )

    degs = g.degrees()
    expected = Counter({n + 1: N}) if n % 2 else Counter({n + 1: N - 1, n + 2: 1})
    got = Counter(degs)
    ok_b = g.n == N and got == expected
    bad = [v for v, d in enumerate(degs) if d < n + 1 or d > n + 2]
    if not ok_b and not bad:
        bad = [v for v, d in enumerate(degs) if d == n + 2]
    worst = max((abs(d - (n + 1)) for d in degs), default=0)
    b_res = ConditionResult(
        Status.PROVEN if ok_b else Status.FAILED,
        0.0 if ok_b else -float(worst),
        {"min_degree": min(degs, default=0), "max_degree": max(degs, default=0),
         "offending_vertices": bad[:20]},
    )

    t_codeg = tol.threshold(n, tol.codeg_exponent)
    if g.n >= 2:
        cdev, pair = _codegree_extremes(g, n / 2)
    else:
        cdev, pair = 0.0, ()
    c_res = ConditionResult(
        Status.PROVEN if cdev <= t_codeg else Status.FAILED,
        t_codeg - cdev,
        {"threshold": t_codeg, "max_deviation": cdev, "worst_pair": list(pair)},
    )

    d_res = _certify_discrepancy(g, n, tol, samples, sample_seed)
    return FitCertificate(n, a_res, b_res, c_res, d_res, multiplier=tol.multiplier)


def _certify_discrepancy(g: Graph, n: int, tol: ToleranceProfile, samples: int,
                         sample_seed: int) -> ConditionResult:
    t_disc = tol.threshold(n, tol.disc_exponent)
    if g.n <= EXACT_DISCREPANCY_LIMIT:
        val, S, T = max_discrepancy(g)
        status = Status.PROVEN if val <= t_disc else Status.FAILED
        return ConditionResult(status, t_disc - val, {
            "method": "exhaustive", "threshold": t_disc, "max_deviation": val,
            "witness": {"S": sorted(S), "T": sorted(T)},
        })
    rep = spectral_discrepancy_bound(g)
    bound = discrepancy_from_norm(rep.certified_bound, g.n)
    spectral = {
        "norm_estimate": rep.spectral_norm_estimate,
        "certified_norm": rep.certified_bound,
        "norm_threshold": (t_disc - g.n / 2) / g.n,
        "residual": rep.residual,
        "iterations": rep.iterations,
        "converged": rep.converged,
    }
    if rep.converged and bound <= t_disc:
        return ConditionResult(Status.PROVEN, t_disc - bound, {
            "method": "spectral", "threshold": t_disc, "bound": bound, "spectral": spectral,
        })
    val, S, T = sampled_max_discrepancy(g, samples, sample_seed)
    detail = {"method": "sampled", "samples": samples, "threshold": t_disc,
              "max_deviation": val, "spectral": spectral}
    if val <= t_disc:
        return ConditionResult(Status.SAMPLED, t_disc - val, detail)
    detail["witness"] = {"S": sorted(S), "T": sorted(T)}
    return ConditionResult(Status.FAILED, t_disc - val, detail)


# -- full pipeline -------------------------------------------------------


def _attempt(n: int, seed: int, tol: ToleranceProfile, samples: int, strict_precheck: bool):
    sample = sample_uniform_graph(n, seed)
    pre = check_pseudorandom_properties(sample, n, tol, samples=samples, seed=seed)
    if strict_precheck and not pre.passed:
        return None, None, pre, "sample violates (a)-(c)"
    profile = TargetDegreeProfile.for_n(n)
    trimmed, log1 = trim_surplus_edges(sample, profile)
    try:
        repaired, log2 = switch_repair(trimmed, profile, seed, touches=log1.touches)
    except RepairFailure as exc:
        return None, None, pre, f"repair failed: {exc}"
    log = log1.extend(log2)
    cert = certify_fit(repaired, n, tol, samples=samples, sample_seed=seed)
    cert.repair_log = log
    return repaired, cert, pre, None


def build_fit_graph(n: int, seed: int, tol: ToleranceProfile | None = None,
                    max_retries: int = 3, samples: int = DEFAULT_DISC_SAMPLES,
                    strict_precheck: bool = False) -> tuple[Graph, FitCertificate]:
    """Sample, repair and certify an n-fit graph, retrying with seed+1.

    The raw-sample checks (a)-(c) are recorded in the certificate; they only
    trigger a retry when ``strict_precheck`` is set, since at desk scale they
    fail routinely while the final conditions still hold.  A retry happens
    on repair failure or on any ``failed`` condition.
    """
    if n < 3:
        raise InputError("n must be at least 3")
    if max_retries < 0:
        raise InputError("max_retries must be nonnegative")
    tol = tol or ToleranceProfile()
    seed = _check_seed(seed)
    last_cert, reason = None, None
    for attempt in range(max_retries + 1):
        s = (seed + attempt) % SEED_LIMIT
        graph, cert, pre, reason = _attempt(n, s, tol, samples, strict_precheck)
        if cert is not None:
            cert.seed = s
            cert.retries_used = attempt
            cert.sample_checks = pre.to_json()
            last_cert = cert
            if not cert.any_failed:
                return graph, cert
            reason = "certification failed: " + ",".join(
                k for k, c in cert.conditions.items() if c.status == Status.FAILED)
    raise ConstructionFailure(
        f"no {n}-fit graph after {max_retries + 1} attempts from seed {seed} ({reason})",
        last_cert)


def replay_build(n: int, cert: FitCertificate) -> Graph:
    """Rebuild the certified graph from its seed and repair log."""
    if cert.seed is None or cert.repair_log is None:
        raise InputError("certificate carries no seed / repair log")
    return cert.repair_log.replay(sample_uniform_graph(n, cert.seed))
