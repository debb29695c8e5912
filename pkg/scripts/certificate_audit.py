#!/usr/bin/env python3
"""Audit the lower-bound constants and run chain certificates over a sweep."""
import argparse
import json

from lemlab import experiments as ex
from lemlab.bounds import audit_constants, lower_bound_constant
from lemlab.cli import sweep_spec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--cost-offset", type=float, default=0.0)
    args = ap.parse_args()
    with open(args.config) as fh:
        spec = sweep_spec(json.load(fh))
    consts = lower_bound_constant(spec.c0)
    audit = audit_constants(consts, args.samples, spec.seed)
    print(f"C'_H={consts.CH_prime}  C={consts.C:.6f}  audit ok={audit.ok}")
    print(f"  premise true: {audit.premise_true}")
    print(f"  violations:   {audit.violations}")
    for e in ex.verify_certificates(spec, cost_offset=args.cost_offset):
        rep = e.get("report")
        if rep is None:
            print(f"t={e['t']:.1e}  {e['status']}")
            continue
        print(f"t={e['t']:.1e}  hypothesis={rep.hypothesis}  chain={rep.chain_holds}  "
              f"witness={rep.contradiction_witness}")


if __name__ == "__main__":
    main()
