"""Sweeps of the pole size t -> 0 along configurable pole paths, plus CSV/JSON output."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

from .bounds import arg_condition, chain_certificate, lower_bound_constant
from .constructions import (build_axis_case, build_generic_case, build_resonant_case,
                            certify_nodes, resonant_constant)
from .core import Method, NodeTriple, PoleConfig
from .errors import ConfigError, DomainError, HypothesisViolated, LemlabError
from .green import BidiskPoint, g1, g2, g3
from .optimizer import OptimizerOptions, lempert_upper_via_nodes

CSV_VERSION = "lemlab-v1"
CSV_COLUMNS = (
    "t", "eps1_re", "eps1_im", "eps2_re", "eps2_im", "optimizer_value", "method",
    "axis_cost", "generic_cost", "resonant_cost", "g1", "g2", "g3",
    "three_half_log_z", "two_log_z", "residual", "boundary_sup", "feasible_starts",
    "verdict", "error",
)
DOMINANCE_TOL = 1e-6
# operational slacks of the acceptance bands (artifact choices)
BAND_WIDTH = 1.0
LOWER_SLACK = 0.5
RESONANT_SLACK = 0.2


class PathKind(str, Enum):
    EQUAL = "Equal"
    RESONANT = "Resonant"
    GENERIC = "Generic"
    CUSTOM = "Custom"


def parse_complex(v):
    """Accepts a number, a string such as '0.3-0.1j', or an [re, im] pair."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex pairs need two entries, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    try:
        return complex(v.replace(" ", "") if isinstance(v, str) else v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read {v!r} as a complex number") from exc


def complex_pair(w):
    return [w.real, w.imag]


@dataclass(frozen=True)
class SweepSpec:
    z: BidiskPoint
    path: PathKind = PathKind.GENERIC
    t0: float = 1e-2
    ratio: float = 0.1
    count: int = 5
    c0: float = 1.0
    options: OptimizerOptions = field(default_factory=OptimizerOptions)
    seed: int = 0
    directions: tuple = (1 + 0j, 1 + 0j)     # Generic path: eps = (t u1, t u2)
    custom: tuple = ()                         # Custom path: ((eps1, eps2), ...)
    gamma_scale: float = 1.0                   # Resonant path: gamma(t) = gamma_scale * t
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "path", PathKind(self.path))
        if self.path is PathKind.CUSTOM:
            if not self.custom:
                raise ConfigError("a Custom path needs an explicit list of poles")
        else:
            if not (0 < self.t0 < 1 and 0 < self.ratio < 1 and self.count >= 1):
                raise ConfigError("need 0 < t0 < 1, 0 < ratio < 1 and count >= 1")
        if not self.c0 > 0:
            raise ConfigError("c0 must be positive")
        if self.path is PathKind.GENERIC:
            u1, u2 = self.directions
            if abs(abs(u1) - 1) > 1e-12 or abs(abs(u2) - 1) > 1e-12:
                raise ConfigError("Generic path directions must have modulus 1")
            if self.z.z1 != 0 and self.z.z2 != 0 and arg_condition(self.z, PoleConfig(u1 / 2, u2 / 2)) < self.c0:
                raise ConfigError("Generic path directions violate the argument condition for c0")
        try:
            poles = self.poles()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        ts = [t for t, _ in poles]
        if any(b >= a for a, b in zip(ts, ts[1:])):
            raise ConfigError("t must be strictly decreasing along the sweep")

    def schedule(self):
        return [self.t0 * self.ratio ** k for k in range(self.count)]

    def poles(self):
        """List of (t, PoleConfig) in sweep order."""
        if self.path is PathKind.CUSTOM:
            out = []
            for e1, e2 in self.custom:
                p = PoleConfig(parse_complex(e1), parse_complex(e2))
                out.append((p.norm, p))
            return out
        out = []
        for t in self.schedule():
            if self.path is PathKind.EQUAL:
                p = PoleConfig(t, t)
            elif self.path is PathKind.GENERIC:
                p = PoleConfig(t * self.directions[0], t * self.directions[1])
            else:
                if self.z.z1 == 0 or self.z.z2 == 0:
                    raise ConfigError("the Resonant path needs z1 != 0 and z2 != 0")
                mu = self.z.z2 / self.z.z1
                p = PoleConfig(t, -(mu - self.gamma_scale * t) * t)
            out.append((t, p))
        return out

    def with_options(self, **kw):
        return replace(self, options=replace(self.options, **kw))


@dataclass
class SweepRecord:
    t: float
    eps1: complex
    eps2: complex
    optimizer_value: float = None
    axis_cost: float = None
    generic_cost: float = None
    resonant_cost: float = None
    g1: float = None
    g2: float = None
    g3: float = None
    three_half_log_z: float = None
    two_log_z: float = None
    residual: float = None
    boundary_sup: float = None
    feasible_starts: int = None
    wall_time: float = None
    method: str = None
    verdict: str = None
    nodes: NodeTriple = None
    error: str = None
    raw_costs: dict = field(default_factory=dict)

    @property
    def construction_costs(self):
        return {k: v for k, v in (("axis", self.axis_cost), ("generic", self.generic_cost),
                                  ("resonant", self.resonant_cost)) if v is not None}

    def dominance_ok(self, tol=DOMINANCE_TOL):
        if self.optimizer_value is None:
            return True
        return all(self.optimizer_value <= c + tol for c in self.construction_costs.values())

    def to_dict(self, timing=False):
        d = {
            "t": self.t, "eps1": complex_pair(self.eps1), "eps2": complex_pair(self.eps2),
            "optimizer_value": self.optimizer_value, "method": self.method,
            "axis_cost": self.axis_cost, "generic_cost": self.generic_cost,
            "resonant_cost": self.resonant_cost, "raw_construction_costs": self.raw_costs,
            "g1": self.g1, "g2": self.g2, "g3": self.g3,
            "three_half_log_z": self.three_half_log_z, "two_log_z": self.two_log_z,
            "residual": self.residual, "boundary_sup": self.boundary_sup,
            "feasible_starts": self.feasible_starts, "verdict": self.verdict,
            "nodes": [complex_pair(v) for v in self.nodes.as_tuple()] if self.nodes else None,
            "error": self.error,
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d


def _constructions(z, p, c0):
    """Certified costs of the explicit constructions that apply at (z, eps)."""
    out, raw, warm = {}, {}, []
    builders = (("axis", Method.AXIS, lambda: build_axis_case(z, p)),
                ("generic", Method.GENERIC, lambda: build_generic_case(z, p, c0=c0)),
                ("resonant", Method.RESONANT, lambda: build_resonant_case(z, p)))
    for name, method, build in builders:
        try:
            res = build()
            cert = certify_nodes(res.nodes, p, z)
        except LemlabError:
            continue
        raw[name] = res.cost
        out[name] = cert.cost
        warm.append((cert.cost, method, cert.nodes))
    return out, raw, warm


def eval_point(z: BidiskPoint, p: PoleConfig, opts: OptimizerOptions = None, c0=1.0, t=None):
    """One sweep record: Green bounds, construction costs and the optimizer value."""
    opts = opts or OptimizerOptions()
    start = time.perf_counter()
    rec = SweepRecord(t if t is not None else p.norm, p.eps1, p.eps2)
    rec.g1, rec.g2, rec.g3 = g1(z), g2(z), g3(z)
    lz = math.log(z.norm) if z.norm > 0 else -math.inf
    rec.three_half_log_z, rec.two_log_z = 1.5 * lz, 2 * lz
    costs, rec.raw_costs, warm = _constructions(z, p, c0)
    rec.axis_cost = costs.get("axis")
    rec.generic_cost = costs.get("generic")
    rec.resonant_cost = costs.get("resonant")
    try:
        est = lempert_upper_via_nodes(z, p, replace(opts, use_constructions=False), warm)
    except LemlabError as exc:
        rec.error = exc.code
    else:
        rec.optimizer_value = est.value
        rec.method = est.method.value
        rec.residual, rec.boundary_sup = est.residual, est.boundary_sup
        rec.feasible_starts = est.feasible_starts
        rec.verdict = est.verdict.value
        rec.nodes = est.nodes
    rec.wall_time = time.perf_counter() - start
    return rec


def _eval_task(args):
    return eval_point(*args)


def regime_target(z: BidiskPoint, p: PoleConfig, c0):
    """2 log|z| on the axes and in the resonant direction, (3/2) log|z| otherwise."""
    lz = math.log(z.norm)
    if z.z1 == 0 or z.z2 == 0 or arg_condition(z, p) < c0:
        return "two_log_z", 2 * lz
    return "three_half_log_z", 1.5 * lz


@dataclass(frozen=True)
class SweepSummary:
    target_name: str
    target: float
    band_min: float
    band_max: float
    allowed_min: float
    allowed_max: float
    failures: int
    dominance_ok: bool

    @property
    def width(self):
        return self.band_max - self.band_min

    @property
    def ok(self):
        return (self.failures == 0 and self.dominance_ok and self.width <= BAND_WIDTH
                and self.allowed_min <= self.band_min and self.band_max <= self.allowed_max)

    def to_dict(self):
        d = asdict(self)
        d.update(width=self.width, ok=self.ok)
        return d


def summarize(spec: SweepSpec, records):
    last = records[len(records) // 2:]
    _, p_last = spec.poles()[-1]
    name, target = regime_target(spec.z, p_last, spec.c0)
    vals = [r.optimizer_value - target for r in last if r.optimizer_value is not None]
    lo, hi = (min(vals), max(vals)) if vals else (math.nan, math.nan)
    if name == "three_half_log_z":
        c_low = lower_bound_constant(spec.c0).C
        ups = [r.generic_cost - target for r in last if r.generic_cost is not None]
        c_up = max(ups) if ups else BAND_WIDTH
        allowed = (-c_low - LOWER_SLACK, c_up + LOWER_SLACK)
    else:
        allowed = (-RESONANT_SLACK, resonant_constant() + RESONANT_SLACK)
    return SweepSummary(name, target, lo, hi, allowed[0], allowed[1],
                        sum(r.error is not None for r in records),
                        all(r.dominance_ok() for r in records))


def run_sweep(spec: SweepSpec):
    """Records in sweep order (t decreasing) and the summary band."""
    opts = replace(spec.options, seed=spec.seed)
    tasks = [(spec.z, p, opts, spec.c0, t) for t, p in spec.poles()]
    if spec.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(spec.jobs) as ex:
            records = list(ex.map(_eval_task, tasks))
    else:
        records = [_eval_task(a) for a in tasks]
    return records, summarize(spec, records)


def verify_certificates(spec: SweepSpec, records=None, cost_offset=0.0):
    """Chain certificates at each record's best nodes; ``cost_offset`` lowers the claimed cost."""
    if records is None:
        records, _ = run_sweep(spec)
    consts = lower_bound_constant(spec.c0)
    out = []
    for r in records:
        entry = {"t": r.t}
        if r.nodes is None:
            entry["status"] = r.error or "no_nodes"
        else:
            p = PoleConfig(r.eps1, r.eps2)
            try:
                rep = chain_certificate(spec.z, p, r.nodes, spec.c0, consts,
                                        cost=r.optimizer_value - cost_offset)
            except HypothesisViolated as exc:
                entry.update(status=exc.code, message=str(exc))
            else:
                entry.update(status="checked", report=rep)
        out.append(entry)
    return out


# -- output ----------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    buf.write(CSV_VERSION + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        row = {
            "t": r.t, "eps1_re": r.eps1.real, "eps1_im": r.eps1.imag,
            "eps2_re": r.eps2.real, "eps2_im": r.eps2.imag,
            "optimizer_value": r.optimizer_value, "method": r.method,
            "axis_cost": r.axis_cost, "generic_cost": r.generic_cost,
            "resonant_cost": r.resonant_cost, "g1": r.g1, "g2": r.g2, "g3": r.g3,
            "three_half_log_z": r.three_half_log_z, "two_log_z": r.two_log_z,
            "residual": r.residual, "boundary_sup": r.boundary_sup,
            "feasible_starts": r.feasible_starts, "verdict": r.verdict, "error": r.error,
        }
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(text):
    lines = text.splitlines()
    if not lines or lines[0] != CSV_VERSION:
        raise ConfigError(f"not a {CSV_VERSION} table")
    return list(csv.DictReader(lines[1:]))


def plot_data(records):
    """(log t, optimizer_value) pairs as text, one per line."""
    return "".join("%.17g %.17g\n" % (math.log(r.t), r.optimizer_value)
                   for r in records if r.optimizer_value is not None)


def _json_default(o):
    if isinstance(o, complex):
        return complex_pair(o)
    if hasattr(o, "to_dict"):
        return o.to_dict()
    if isinstance(o, Enum):
        return o.value
    raise TypeError(type(o).__name__)


def to_json(obj, **kw):
    return json.dumps(obj, default=_json_default, **kw)
