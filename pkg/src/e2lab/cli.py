"""Command-line entry point: ``e2lab <command> [options]``.

Global options go before the command. Options left unset on the command
line fall back to ``param.<command>.<option>`` in the config file. Exit codes:
0 success, 1 failed check, 2 usage or config error, 3 resource ceiling.
"""
import argparse
import math
import os
import random
import sys

from . import lattice
from .acceptance import run_suite
from .apps import dioph_search, palindrome_e2_count
from .arith import NAMED, ContinuedFraction
from .config import FORMATS, RunConfig, apply_env
from .errors import E2LabError, UsageError
from .instance import InstanceParams, count_e2_in_A, derive_params, enumerate_A
from .sums import (
    check_tau,
    coefficient_from_name,
    exponent_fit,
    s10,
    to_json,
    type1,
    type1_smooth,
    type1_variant,
    type2,
    write_csv,
    zerosum_check,
    CSV_FIELDS,
)
from .weight import poisson_check

SUM_COMMANDS = {"type1": type1, "type1-smooth": type1_smooth, "type1-variant": type1_variant, "type2": type2}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    ap = _Parser(prog="e2lab", description="Numerical experiments on semiprimes in structured sets.")
    ap.add_argument("--config", help="key=value config file")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--output", help="output directory; without it results go to stdout")
    ap.add_argument("--format", choices=FORMATS)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("params", help="validate and print an instance record")
    p.add_argument("--tau", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--z", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--delta", type=float)

    p = sub.add_parser("enumerate", help="stream the members of A or count its semiprimes")
    p.add_argument("--instance", help="instance record file")
    p.add_argument("--count-e2", action="store_true")

    for name in SUM_COMMANDS:
        p = sub.add_parser(name, help=f"evaluate the {name} sum")
        p.add_argument("--instance")
        p.add_argument("--M", type=float)
        p.add_argument("--N", type=float)
        p.add_argument("--coeff", help="one, varpi, varpi-minus-one, zero or random-sign")
        p.add_argument("--oracle", action="store_true", help="cross-check against the naive loop")
        if name == "type2":
            p.add_argument("--bypass-window", action="store_true")

    p = sub.add_parser("lattice", help="shortest-vector levels or moments of Psi")
    p.add_argument("--q", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--M", type=float)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--levels", action="store_true")
    mode.add_argument("--moments", action="store_true")
    p.add_argument("--instance")
    p.add_argument("--N", type=float)

    p = sub.add_parser("poisson-check", help="both Poisson identities for the bump")
    p.add_argument("--samples", type=int)

    p = sub.add_parser("zerosum", help="largest truncated j-sum over random samples")
    p.add_argument("--instance")
    p.add_argument("--N", type=float)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("s10", help="aggregate of twisted prime sums and its exponent")
    p.add_argument("--N", type=int, nargs="+")
    p.add_argument("--samples", type=int, help="number of random c*l values")
    p.add_argument("--per-n2", help="file for the per-n2 magnitudes")

    p = sub.add_parser("dioph", help="certified semiprimes n with ||n alpha|| <= n^-tau")
    p.add_argument("--alpha", help="sqrt2, phi, e, or a file of partial quotients")
    p.add_argument("--tau")
    p.add_argument("--qmin", type=int)
    p.add_argument("--qmax", type=int)
    p.add_argument("--near-factor", type=float)

    p = sub.add_parser("palindrome", help="semiprime counts among 3-digit palindromes")
    p.add_argument("--b", type=int)
    p.add_argument("--bmax", type=int)

    p = sub.add_parser("suite", help="run an experiment suite")
    p.add_argument("name", choices=["acceptance"])
    p.add_argument("--no-repeat", action="store_true", help="skip the determinism rerun")
    return ap


_DEFAULTS = {
    "poisson-check": {"samples": 100},
    "zerosum": {"samples": 100},
    "s10": {"samples": 1},
    "dioph": {"alpha": "sqrt2", "tau": "1/3", "near_factor": 2.0},
    "type1": {"coeff": "one"},
    "type1-smooth": {"coeff": "one"},
    "type1-variant": {"coeff": "varpi"},
    "type2": {"coeff": "one"},
}

_REQUIRED = {
    "enumerate": ("instance",),
    "type1": ("instance", "M", "N"),
    "type1-smooth": ("instance", "M", "N"),
    "type1-variant": ("instance", "M", "N"),
    "type2": ("instance", "M", "N"),
    "lattice": ("M",),
    "zerosum": ("instance", "N"),
    "s10": ("N",),
    "dioph": ("qmin", "qmax"),
    "palindrome": ("b",),
}


def _fill_from_config(parser, args, cfg):
    """Unset command options take ``param.<command>.<dest>`` from the config, then built-in defaults."""
    sub = parser._subparsers._group_actions[0].choices[args.command]
    for action in sub._actions:
        dest = action.dest
        if dest == "help" or getattr(args, dest, None) not in (None, False):
            continue
        raw = cfg.params.get(f"{args.command}.{dest}")
        if raw is not None:
            if action.nargs == "+":
                value = [action.type(v) for v in raw.split(",")]
            elif action.type is not None:
                value = action.type(raw)
            elif isinstance(action, argparse._StoreTrueAction):
                value = raw.lower() in ("1", "true", "yes")
            else:
                value = raw
            setattr(args, dest, value)
        elif dest in _DEFAULTS.get(args.command, {}):
            setattr(args, dest, _DEFAULTS[args.command][dest])
    missing = [f"--{d.replace('_', '-')}" for d in _REQUIRED.get(args.command, ()) if getattr(args, d, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing {', '.join(missing)}")


def _config_sets_output(path):
    if not path:
        return False
    with open(path, encoding="utf-8") as fh:
        return any(line.partition("=")[0].strip() == "output" for line in fh)


def make_config(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    apply_env(cfg)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("workers must be >= 1")
        cfg.workers = args.workers
    if args.format is not None:
        cfg.format = args.format
    if args.output is not None:
        cfg.output = args.output
    return cfg


class Emitter:
    """Writes rows to <output>/<name>.<format> when an output directory was given, else to stdout."""

    def __init__(self, cfg, to_dir, stdout=None):
        self.cfg = cfg
        self.to_dir = to_dir
        self.stdout = stdout or sys.stdout

    def text(self, rows, fields=None):
        if self.cfg.format == "json":
            return to_json(rows)
        return write_csv(rows, fields)

    def emit(self, name, rows, fields=None):
        text = self.text(rows, fields)
        if self.to_dir:
            os.makedirs(self.cfg.output, exist_ok=True)
            path = os.path.join(self.cfg.output, f"{name}.{self.cfg.format}")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            print(path, file=sys.stderr)
        else:
            self.stdout.write(text)


def load_alpha(source):
    if source in NAMED:
        return NAMED[source]
    if not os.path.exists(source):
        raise UsageError(f"alpha must be one of {sorted(NAMED)} or a file of partial quotients, got {source!r}")
    with open(source, encoding="utf-8") as fh:
        text = fh.read().replace(",", " ").split()
    try:
        quotients = [int(t) for t in text]
    except ValueError as exc:
        raise UsageError(f"{source}: partial quotients must be integers") from exc
    if not quotients or any(a < 1 for a in quotients[1:]):
        raise UsageError(f"{source}: need a0 followed by positive partial quotients")
    return ContinuedFraction(quotients, name=os.path.basename(source))


# --- commands --------------------------------------------------------------------

def cmd_params(args, cfg, out):
    check_tau(args.tau)
    p = derive_params(args.tau, args.q, args.a, z=args.z, x=args.x,
                      delta=args.delta if args.delta is not None else cfg.delta)
    out.stdout.write(p.to_record())
    return 0


def cmd_enumerate(args, cfg, out):
    p = InstanceParams.load(args.instance)
    if args.count_e2:
        count, ratio = count_e2_in_A(p)
        out.emit("enumerate", [{"q": p.q, "a": p.a, "z": p.z, "x": p.x, "count_e2": count, "ratio": ratio}])
        return 0
    for block in enumerate_A(p):
        out.stdout.write("".join(f"{n}\n" for n in block.tolist()))
    return 0


def cmd_sum(args, cfg, out):
    p = InstanceParams.load(args.instance)
    coeff = coefficient_from_name(args.coeff, seed=cfg.seed)
    fn = SUM_COMMANDS[args.command]
    if args.command == "type2":
        rep = fn(args.M, args.N, p, alpha=coeff, oracle=args.oracle, bypass_window=args.bypass_window,
                 workers=cfg.workers)
    else:
        rep = fn(coeff, args.M, args.N, p, oracle=args.oracle, workers=cfg.workers)
    out.emit(args.command.replace("-", "_"), [rep.row()], list(CSV_FIELDS))
    if args.oracle and rep.oracle_rel_diff > cfg.tol("oracle"):
        print(f"oracle mismatch: relative difference {rep.oracle_rel_diff:.3g}", file=sys.stderr)
        return 1
    return 0


def cmd_lattice(args, cfg, out):
    if args.moments:
        if args.instance is None or args.N is None:
            raise UsageError("lattice --moments needs --instance and --N")
        p = InstanceParams.load(args.instance)
        for name, given, have in (("q", args.q, p.q), ("a", args.a, p.a)):
            if given is not None and given % p.q != have:
                raise UsageError(f"--{name} {given} disagrees with the instance ({have})")
        s, s1 = lattice.moment_sums(args.M, p, args.N, workers=cfg.workers)
        out.emit("moments", [{"q": p.q, "a": p.a, "M": args.M, "N": args.N, "sum_psi_sq": s, "sum_psi1_sq": s1,
                              "psi1_over_z2": s1 / p.z**2, "psi_scaled": s * p.q / (args.N * p.z**3)}])
        return 0
    if args.q is None or args.a is None:
        raise UsageError("lattice --levels needs --q and --a")
    if math.gcd(args.q, args.a) != 1:
        raise UsageError(f"gcd(q, a) = {math.gcd(args.q, args.a)} != 1")
    dist = lattice.level_distribution(args.M, args.q, args.a)
    out.emit("levels", [{"level": l, "count": dist[l]} for l in sorted(dist)])
    return 0


def cmd_poisson(args, cfg, out):
    rng = random.Random(cfg.seed)
    rows, worst = [], 0.0
    for i in range(args.samples):
        v, u = (1.0, 0.0) if i == 0 else (rng.uniform(0.1, 10), rng.uniform(-2, 2))
        for form in (1, 2):
            lhs, rhs, d = poisson_check(v, u, form=form)
            worst = max(worst, d)
            rows.append({"v": v, "u": u, "form": form, "lhs_re": complex(lhs).real, "lhs_im": complex(lhs).imag,
                         "rhs_re": complex(rhs).real, "rhs_im": complex(rhs).imag, "discrepancy": d})
    out.emit("poisson", rows)
    print(f"max discrepancy {worst:.3g}", file=sys.stderr)
    return 0 if worst <= cfg.tol("poisson") else 1


def cmd_zerosum(args, cfg, out):
    p = InstanceParams.load(args.instance)
    rng = random.Random(cfg.seed)
    lo, hi = int(args.N) + 1, int(2 * args.N)
    rows = []
    for _ in range(args.samples):
        n1, n2 = rng.randint(lo, hi), rng.randint(lo, hi)
        t, k = rng.uniform(-50, 50), rng.randint(-1000, 1000)
        rows.append({"N": args.N, "t": t, "k": k, "n1": n1, "n2": n2, "abs_sum": zerosum_check(t, k, n1, n2, p)})
    out.emit("zerosum", rows)
    print(f"max |sum| {max(r['abs_sum'] for r in rows):.3g} (N/z = {args.N / p.z:.3g})", file=sys.stderr)
    return 0


def cmd_s10(args, cfg, out):
    rng = random.Random(cfg.seed)
    cls = [rng.randint(1, 10**6) for _ in range(args.samples)]
    rows, per_n2 = [], []
    for cl in cls:
        results = [s10(N, cl) for N in args.N]
        for r in results:
            rows.append({"N": r.N, "cl": cl, "aggregate": r.aggregate, "exponent": r.exponent,
                         "argmax_prime": r.argmax_prime, "full_sum": r.full_sum})
            per_n2 += [{"N": r.N, "cl": cl, "n2": n2, "abs_inner": abs(v)}
                       for n2, v in zip(r.n2.tolist(), r.inner.tolist())]
        if len(results) > 1:
            rows.append({"N": "fit", "cl": cl, "aggregate": None, "exponent": exponent_fit(results),
                         "argmax_prime": None, "full_sum": None})
    out.emit("s10", rows)
    if args.per_n2:
        with open(args.per_n2, "w", encoding="utf-8", newline="") as fh:
            fh.write(out.text(per_n2))
    return 0


def cmd_dioph(args, cfg, out):
    alpha = load_alpha(args.alpha)
    res = dioph_search(alpha, args.tau, args.qmin, args.qmax, near_factor=args.near_factor, workers=cfg.workers)
    fields = ["n", "p1", "p2", "q_of_convergent", "distance", "bound"]
    out.emit("dioph", [s.row() for s in res.solutions], fields)
    print(f"{len(res.solutions)} solutions, {len(res.near_misses)} near misses, convergent denominators "
          f"{[p.q for p in res.instances]}", file=sys.stderr)
    return 0


def cmd_palindrome(args, cfg, out):
    bmax = args.bmax if args.bmax is not None else args.b
    if bmax < args.b:
        raise UsageError("--bmax must be >= --b")
    rows = []
    for b in range(args.b, bmax + 1):
        count, ratio = palindrome_e2_count(b)
        rows.append({"b": b, "count": count, "density_ratio": ratio})
    out.emit("palindrome", rows, ["b", "count", "density_ratio"])
    return 0


def cmd_suite(args, cfg, out):
    outcomes = run_suite(cfg, repeat=not args.no_repeat)
    failed = [o.number for o in outcomes if not o.passed]
    print(f"{len(outcomes) - len(failed)}/{len(outcomes)} passed" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


COMMANDS = {"params": cmd_params, "enumerate": cmd_enumerate, "lattice": cmd_lattice,
            "poisson-check": cmd_poisson, "zerosum": cmd_zerosum, "s10": cmd_s10, "dioph": cmd_dioph,
            "palindrome": cmd_palindrome, "suite": cmd_suite}
COMMANDS.update({name: cmd_sum for name in SUM_COMMANDS})


def main(argv=None, stdout=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = make_config(args)
        _fill_from_config(parser, args, cfg)
        to_dir = args.output is not None or "E2LAB_OUTPUT_DIR" in os.environ or _config_sets_output(args.config)
        out = Emitter(cfg, to_dir=to_dir, stdout=stdout)
        return COMMANDS[args.command](args, cfg, out)
    except E2LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except BrokenPipeError:
        return 0
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
