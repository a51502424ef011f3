"""Command-line front end.

Subcommands:

- ``session``   one in-process session, audit record as JSON on stdout
- ``sweep``     run a JSON sweep spec, emit CSV
- ``serve``     host the sending side of one networked session
- ``connect``   run the receiving side against a waiting sender
- ``oracle``    exact brute-force enumerations (no simulation)
- ``quantile``  upper-tail standard normal quantile

Every random run takes an explicit ``--seed`` so results are quotable
and reproducible; there is deliberately no wall-clock fallback.
"""

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction

from . import experiments, netsession, oracle
from .protocol import (
    MODE_STRICT,
    MODE_TOLERANT,
    SessionConfig,
    outcome_record,
    run_session,
)
from .stats import normal_quantile


def _config_args(parser: argparse.ArgumentParser, sender: bool) -> None:
    parser.add_argument("--s", type=int, default=0, help="message length (data slots)")
    parser.add_argument("--r", type=int, required=True, help="probing slots")
    parser.add_argument("--mode", choices=(MODE_STRICT, MODE_TOLERANT),
                        default=MODE_STRICT)
    parser.add_argument("--alpha", type=float, default=0.05,
                        help="significance level of the tolerant-mode test")
    parser.add_argument("--omega-known", action="store_true",
                        help="tolerant mode: test against --omega instead of estimating")
    parser.add_argument("--s-est", type=int, default=0,
                        help="calibration probes (tolerant mode, estimated disturbance)")
    parser.add_argument("--seed", type=int, required=True,
                        help="session seed (runs are fully reproducible)")
    if sender:
        parser.add_argument("--p", type=float, default=0.0,
                            help="simulated attack probability per qubit")
        parser.add_argument("--omega", type=float, default=0.0,
                            help="simulated disturbance probability per qubit")
        parser.add_argument("--message", default=None,
                            help="bit string of length --s")


def _build_config(args, sender: bool) -> SessionConfig:
    return SessionConfig(
        s=args.s,
        r=args.r,
        mode=args.mode,
        p=getattr(args, "p", 0.0),
        omega=getattr(args, "omega", 0.0),
        alpha=args.alpha,
        omega_known=args.omega_known,
        s_est=args.s_est,
        seed=args.seed,
        message=getattr(args, "message", None),
    )


def _cmd_session(args) -> int:
    config = _build_config(args, sender=True)
    outcome = run_session(config)
    print(json.dumps(outcome_record(config, outcome), sort_keys=True))
    return 0


def _cmd_sweep(args) -> int:
    with open(args.specfile) as fh:
        spec = experiments.SweepSpec.from_json(fh.read())
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        spec = replace(spec, **overrides)
    result = experiments.run_sweep(spec)
    if args.out == "-":
        experiments.emit_csv(result, sys.stdout)
    else:
        experiments.emit_csv(result, args.out)
    return 0


def _cmd_serve(args) -> int:
    config = _build_config(args, sender=True)

    def announce(addr):
        print(f"listening on {addr[0]}:{addr[1]}", file=sys.stderr, flush=True)

    outcome = netsession.serve_alice(config, args.host, args.port,
                                     timeout=args.timeout, on_listening=announce)
    print(json.dumps(outcome_record(config, outcome), sort_keys=True))
    return 0


def _cmd_connect(args) -> int:
    config = _build_config(args, sender=False)
    outcome = netsession.connect_bob(config, args.host, args.port,
                                     timeout=args.timeout)
    print(json.dumps({
        "status": outcome.status.value,
        "recovered": outcome.recovered,
        "detail": outcome.detail,
    }, sort_keys=True))
    return 0


def _cmd_oracle(args) -> int:
    if args.what in ("decode-table", "tc-table"):
        print("e1 e2 i -> u")
        for e1, e2, i, u in oracle.decode_table():
            print(f" {e1}  {e2} {i} ->  {u}")
        return 0
    p = Fraction(args.attack_prob)
    omega = Fraction(args.disturbance)
    exact = oracle.detection_probability_exact(p, args.probes, omega)
    per_probe = oracle.probe_positive_probability(p, omega)
    print(f"per-probe mismatch probability: {per_probe} = {float(per_probe)!r}")
    print(f"detection probability over {args.probes} probes: "
          f"{exact} = {float(exact)!r}")
    return 0


def _cmd_quantile(args) -> int:
    print(f"{normal_quantile(args.alpha):.10f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sqdc",
        description="Simulator of entanglement-based direct communication "
                    "with probe-based attack detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_session = sub.add_parser("session", help="run one in-process session")
    _config_args(p_session, sender=True)
    p_session.set_defaults(func=_cmd_session)

    p_sweep = sub.add_parser("sweep", help="run a sweep spec, write CSV")
    p_sweep.add_argument("specfile", help="JSON sweep specification")
    p_sweep.add_argument("--out", default="-", help="CSV path, - for stdout")
    p_sweep.add_argument("--trials", type=int, default=None,
                         help="override trials per grid point")
    p_sweep.add_argument("--workers", type=int, default=None,
                         help="override worker process count")
    p_sweep.add_argument("--seed", type=int, default=None,
                         help="override the base seed")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_serve = sub.add_parser("serve", help="host the sending side of a session")
    _config_args(p_serve, sender=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=0,
                         help="0 picks a free port (announced on stderr)")
    p_serve.add_argument("--timeout", type=float, default=netsession.DEFAULT_TIMEOUT)
    p_serve.set_defaults(func=_cmd_serve)

    p_connect = sub.add_parser("connect", help="run the receiving side")
    _config_args(p_connect, sender=False)
    p_connect.add_argument("--host", default="127.0.0.1")
    p_connect.add_argument("--port", type=int, required=True)
    p_connect.add_argument("--timeout", type=float, default=netsession.DEFAULT_TIMEOUT)
    p_connect.set_defaults(func=_cmd_connect)

    p_oracle = sub.add_parser(
        "oracle", help="exact enumerations (no simulation involved)")
    p_oracle.add_argument("what",
                          choices=("decode-table", "tc-table", "detection"),
                          help="decode-table (alias tc-table): the 8-row "
                               "bit-inference table; detection: exact "
                               "detection probability by brute force")
    p_oracle.add_argument("--probes", type=int, default=1)
    p_oracle.add_argument("--attack-prob", default="1",
                          help="rational or decimal, e.g. 3/5 or 0.6")
    p_oracle.add_argument("--disturbance", default="0")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_quantile = sub.add_parser("quantile",
                                help="upper-tail standard normal quantile")
    p_quantile.add_argument("alpha", type=float)
    p_quantile.set_defaults(func=_cmd_quantile)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
