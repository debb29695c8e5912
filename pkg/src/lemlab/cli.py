"""``lemlab`` command line: eval, sweep, construct, verify, lower-bound-constant.

Settings come from an optional JSON file (``--config``), overridden by flags.
Exit codes: 0 success, 1 numerical failure, 2 invalid configuration,
3 acceptance band violated (``sweep --check``), 4 contradiction witness found.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace

from . import experiments as ex
from .bounds import audit_constants, lower_bound_constant
from .constructions import (build_axis_case, build_generic_case, build_resonant_case,
                            certify_nodes, rescale_to_bidisk)
from .core import PoleConfig, interpolation_conditions, node_feasible, normalized_cost
from .errors import ConfigError, DomainError, LemlabError
from .green import BidiskPoint
from .maps import verify_map
from .optimizer import OptimizerOptions

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BAND, EXIT_WITNESS = 0, 1, 2, 3, 4

_OPT_FIELDS = {f.name for f in fields(OptimizerOptions)}


def _pair(text, what):
    parts = [s for s in text.split(",") if s.strip()]
    if len(parts) != 2:
        raise ConfigError(f"--{what} needs two comma-separated complex numbers, got {text!r}")
    return tuple(ex.parse_complex(s.strip()) for s in parts)


def load_config(args):
    """Merge the JSON file with the flag overrides into a plain dict."""
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("the config file must hold a JSON object")
    for key in ("path", "t0", "ratio", "count", "c0", "seed", "jobs", "gamma_scale"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if getattr(args, "z", None):
        cfg["z"] = list(_pair(args.z, "z"))
    if getattr(args, "eps", None):
        cfg["eps"] = list(_pair(args.eps, "eps"))
    for key in ("starts", "evals"):
        v = getattr(args, key, None)
        if v is not None:
            cfg.setdefault("optimizer", {})[key] = v
    return cfg


def _point(cfg):
    if "z" not in cfg:
        raise ConfigError("z is required")
    z = cfg["z"]
    if isinstance(z, dict):
        z = [z.get("z1"), z.get("z2")]
    if not isinstance(z, (list, tuple)) or len(z) != 2:
        raise ConfigError("z must be a pair of complex values")
    try:
        return BidiskPoint(ex.parse_complex(z[0]), ex.parse_complex(z[1]))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _poles(cfg):
    if "eps" not in cfg:
        raise ConfigError("eps is required")
    e = cfg["eps"]
    if not isinstance(e, (list, tuple)) or len(e) != 2:
        raise ConfigError("eps must be a pair of complex values")
    try:
        return PoleConfig(ex.parse_complex(e[0]), ex.parse_complex(e[1]))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _options(cfg):
    raw = dict(cfg.get("optimizer", {}))
    bad = set(raw) - _OPT_FIELDS
    if bad:
        raise ConfigError(f"unknown optimizer options: {sorted(bad)}")
    if "seed" in cfg:
        raw["seed"] = int(cfg["seed"])
    try:
        return OptimizerOptions(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def sweep_spec(cfg) -> ex.SweepSpec:
    known = {"z", "path", "t0", "ratio", "count", "c0", "seed", "optimizer", "directions",
             "custom", "gamma_scale", "jobs", "eps"}
    bad = set(cfg) - known
    if bad:
        raise ConfigError(f"unknown config keys: {sorted(bad)}")
    kw = {"z": _point(cfg), "options": _options(cfg)}
    for key, cast in (("t0", float), ("ratio", float), ("count", int), ("c0", float),
                      ("seed", int), ("gamma_scale", float), ("jobs", int)):
        if key in cfg:
            kw[key] = cast(cfg[key])
    if "path" in cfg:
        try:
            kw["path"] = ex.PathKind(cfg["path"])
        except ValueError as exc:
            raise ConfigError(f"unknown path {cfg['path']!r}") from exc
    if "directions" in cfg:
        kw["directions"] = tuple(ex.parse_complex(u) for u in cfg["directions"])
    if "custom" in cfg:
        kw["custom"] = tuple((ex.parse_complex(a), ex.parse_complex(b)) for a, b in cfg["custom"])
    try:
        return ex.SweepSpec(**kw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------

def cmd_eval(args, cfg):
    z, p = _point(cfg), _poles(cfg)
    rec = ex.eval_point(z, p, _options(cfg), float(cfg.get("c0", 1.0)))
    _emit(ex.to_json(rec.to_dict(args.timing), indent=2) + "\n", args.out)
    return EXIT_OK if rec.error is None else EXIT_FAIL


def cmd_sweep(args, cfg):
    spec = sweep_spec(cfg)
    records, summary = ex.run_sweep(spec)
    if args.format == "csv":
        _emit(ex.records_to_csv(records), args.out)
    else:
        _emit(ex.to_json({"records": [r.to_dict(args.timing) for r in records],
                          "summary": summary}, indent=2) + "\n", args.out)
    if args.emit_plotdata:
        with open(args.emit_plotdata, "w") as fh:
            fh.write(ex.plot_data(records))
    if args.check:
        sys.stderr.write(ex.to_json(summary) + "\n")
        if not summary.ok:
            return EXIT_BAND
    return EXIT_OK


def cmd_construct(args, cfg):
    z, p = _point(cfg), _poles(cfg)
    c0 = float(cfg.get("c0", 1.0))
    kind = args.kind
    if kind == "auto":
        kind = "axis" if (z.z1 == 0 or z.z2 == 0) else "generic"
    out = {"kind": kind}
    if kind == "resonant":
        r = build_resonant_case(z, p)
        out.update(nodes=r.nodes.as_tuple(), cost=r.cost, C_res=r.C_res, xi=r.xi,
                   xi_prime=r.xi_prime, gamma_drift=r.gamma_drift, verdict=r.report.verdict,
                   w=r.w_canonical, w_bounds_ok=r.w_bounds_ok)
    else:
        r = build_axis_case(z, p) if kind == "axis" else build_generic_case(z, p, c0=c0)
        chk = verify_map(r.map, interpolation_conditions(r.nodes, p, z))
        out.update(nodes=r.nodes.as_tuple(), cost=r.cost, gamma=r.gamma, residual=chk.residual,
                   boundary_sup=chk.boundary_sup)
        try:
            m2, n2 = rescale_to_bidisk(r.map, r.nodes)
        except LemlabError as exc:
            out["rescaled"] = exc.to_dict()
        else:
            c2 = verify_map(m2, interpolation_conditions(n2, p, z))
            out["rescaled"] = {"nodes": n2.as_tuple(), "residual": c2.residual,
                               "boundary_sup": c2.boundary_sup,
                               "verdict": node_feasible(n2, p, z).verdict}
            out["rescaled"]["cost"] = normalized_cost(n2)
    cert = certify_nodes(r.nodes, p, z)
    out["certified"] = {"nodes": cert.nodes.as_tuple(), "cost": cert.cost, "scale": cert.scale,
                        "verdict": cert.verdict}
    _emit(ex.to_json(out, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args, cfg):
    spec = sweep_spec(cfg)
    entries = ex.verify_certificates(spec, cost_offset=args.cost_offset)
    witness = any(e.get("report") is not None and e["report"].contradiction_witness for e in entries)
    payload = {"certificates": entries, "witness_found": witness}
    if args.audit:
        a = audit_constants(lower_bound_constant(spec.c0), args.audit, spec.seed)
        payload["audit"] = {"samples": a.samples, "premise_true": a.premise_true,
                            "violations": a.violations, "ok": a.ok}
    _emit(ex.to_json(payload, indent=2) + "\n", args.out)
    return EXIT_WITNESS if witness else EXIT_OK


def cmd_lower_bound_constant(args, cfg):
    c0 = float(cfg.get("c0", 1.0))
    if not c0 > 0:
        raise ConfigError("c0 must be positive")
    k = lower_bound_constant(c0)
    _emit(ex.to_json({"c0": k.c0, "CH_prime": k.CH_prime, "C": k.C,
                      "c1_audit": k.c1_audit, "c2_audit": k.c2_audit}, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="lemlab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--z", help="point of the bidisk, e.g. '0.3,0.3j'")
    common.add_argument("--eps", help="poles (eps1, eps2), e.g. '1e-4,1e-4'")
    common.add_argument("--path", choices=[k.value for k in ex.PathKind])
    common.add_argument("--t0", type=float)
    common.add_argument("--ratio", type=float)
    common.add_argument("--count", type=int)
    common.add_argument("--c0", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--gamma-scale", dest="gamma_scale", type=float)
    common.add_argument("--starts", type=int, help="optimizer starts")
    common.add_argument("--evals", type=int, help="optimizer evaluations per start")
    common.add_argument("--jobs", type=int, help="sweep points evaluated in parallel")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--timing", action="store_true", help="include wall_time in JSON")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="evaluate one point")
    sp = sub.add_parser("sweep", parents=[common], help="sweep t -> 0 along a pole path")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--check", action="store_true", help="exit 3 if the acceptance band fails")
    sp.add_argument("--emit-plotdata", dest="emit_plotdata", metavar="FILE")
    cp = sub.add_parser("construct", parents=[common], help="run one explicit construction")
    cp.add_argument("--kind", choices=("auto", "axis", "generic", "resonant"), default="auto")
    vp = sub.add_parser("verify", parents=[common], help="chain certificates over a sweep")
    vp.add_argument("--cost-offset", dest="cost_offset", type=float, default=0.0,
                    help="lower every claimed cost by this amount (fault injection)")
    vp.add_argument("--audit", type=int, default=0, metavar="N",
                    help="also audit the absolute constants on N random datasets")
    sub.add_parser("lower-bound-constant", parents=[common], help="print C'_H and C for c0")
    return ap


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "construct": cmd_construct,
            "verify": cmd_verify, "lower-bound-constant": cmd_lower_bound_constant}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return EXIT_CONFIG
    except LemlabError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
