"""Command line front end over the spectral pipeline.

Every command reads a JSON model file, prints machine readable output
(JSON or CSV) with floats at 17 significant digits, and is fully
deterministic: the same invocation produces byte identical output, no
matter the thread count. Exit codes: 0 success, 1 usage error, 2
validation or domain failure.
"""

import argparse
import math
import os
import sys

import numpy as np

from .correlation import (
    build_symbol,
    corr_sq_from_symbol,
    decay_fit,
    edge_probability,
    edge_probability_torus,
    widom_limit,
)
from .errors import IspecError, NearSingular, NonPositiveResidual, TooLarge
from .fishergraph import EDGE_TAGS, fisher_graph
from .model import HIGH_TEMP, parse_model, replicate, weights
from .oracle import enumerate_dimer, enumerate_spin, lee_yang_check
from .spectral import (
    CORNERS,
    assemble,
    corner_pfaffians,
    critical_beta,
    eval_P,
    grid_values,
    torus_partition,
)


def _fmt(x):
    """Floats at 17 significant digits, round-trip exact."""
    return "%.17g" % float(x)


def _json(obj):
    """Tiny serializer so float formatting stays under our control."""
    if isinstance(obj, dict):
        inner = ",".join('"%s":%s' % (k, _json(v)) for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_json(v) for v in obj) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return '"%s"' % obj
    return _fmt(obj)


def _emit(args, text):
    """Write the artifact to --output, or stdout when it is '-'."""
    if not text.endswith("\n"):
        text += "\n"
    if getattr(args, "output", "-") != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def _threads(args):
    if args.threads is not None:
        if args.threads < 1:
            raise ValueError("--threads must be a positive integer")
        return args.threads
    env = os.environ.get("ISPEC_THREADS", "")
    if not env:
        return 1
    try:
        val = int(env)
    except ValueError:
        raise ValueError("ISPEC_THREADS must be an integer, got %r" % env)
    if val < 1:
        raise ValueError("ISPEC_THREADS must be positive, got %r" % env)
    return val


def _parse_edge(text):
    parts = text.split(",")
    if len(parts) not in (3, 5):
        raise ValueError(
            "edge must be TAG,i,j or TAG,i,j,fx,fy; got %r" % text
        )
    tag = parts[0].strip().upper()
    if tag not in EDGE_TAGS:
        raise ValueError("unknown edge tag %r (one of %s)" % (tag, sorted(EDGE_TAGS)))
    try:
        nums = [int(p) for p in parts[1:]]
    except ValueError:
        raise ValueError("edge indices must be integers in %r" % text)
    key = (tag, nums[0], nums[1])
    if len(nums) == 4:
        return (key, (nums[2], nums[3]))
    return key


def _parse_cover(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError("cover must be s,t; got %r" % text)
    try:
        s, t = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError("cover factors must be integers in %r" % text)
    if s < 1 or t < 1:
        raise ValueError("cover factors must be positive, got %r" % text)
    return s, t


def _cmd_critical_temp(args):
    model = _load_model(args.model)
    beta, report, iterations = critical_beta(model, tol=args.tol)
    payload = {
        "beta_c": beta,
        "corner": [report.argmin[0], report.argmin[1]],
        "pf": [report.pf[c] for c in CORNERS],
        "iterations": iterations,
    }
    _emit(args, _json(payload))
    return 0


def _cmd_correlate(args):
    model = _load_model(args.model)
    threads = _threads(args)
    symbol = build_symbol(
        model, args.beta, M=args.symbol_grid, K_max=args.bandwidth, threads=threads
    )
    l0 = symbol.blockDim // 2
    if args.nmax < l0:
        raise ValueError("--nmax %d is below the period %d" % (args.nmax, l0))
    seps = list(range(l0, args.nmax + 1, l0))
    rows = ["N,corr_sq,corr"]
    series = []
    for sep in seps:
        corr_sq = corr_sq_from_symbol(symbol, sep)
        series.append((sep, corr_sq))
        rows.append("%d,%s,%s" % (sep, _fmt(corr_sq), _fmt(math.sqrt(max(corr_sq, 0.0)))))
    G, E = widom_limit(symbol, args.trunc)
    alpha = None
    residuals = [(sep, abs(cs - E)) for sep, cs in series]
    try:
        alpha = decay_fit(residuals, limit=0.0)[0]
    except (ValueError, NonPositiveResidual):
        alpha = None
    summary = _json({"G": G, "E": E, "alpha": alpha})
    csv_text = "\n".join(rows) + "\n"
    if args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(csv_text)
        sys.stdout.write(summary + "\n")
    else:
        sys.stdout.write(csv_text + summary + "\n")
    return 0


def _cmd_spectral_scan(args):
    model = _load_model(args.model)
    threads = _threads(args)
    op = assemble(model, args.beta)
    vals = grid_values(op, args.grid, threads=threads)
    rows = ["ia,ib,abs_p"]
    for a in range(args.grid):
        for b in range(args.grid):
            rows.append("%d,%d,%s" % (a, b, _fmt(vals[a, b])))
    _emit(args, "\n".join(rows))
    return 0


def _cmd_edge_corr(args):
    model = _load_model(args.model)
    edges = [_parse_edge(e) for e in args.edge]
    if args.torus is not None:
        s, t = _parse_cover(args.torus)
        prob = edge_probability_torus(model, args.beta, edges, s, t)
        torus = [s, t]
    else:
        prob = edge_probability(model, args.beta, edges, M=args.fourier_grid)
        torus = None
    listed = []
    for item in edges:
        if len(item) == 2 and isinstance(item[0], tuple):
            (tag, i, j), (fx, fy) = item
        else:
            (tag, i, j), (fx, fy) = item, (0, 0)
        listed.append([tag, i, j, fx, fy])
    _emit(args, _json({"edges": listed, "probability": prob, "torus": torus}))
    return 0


def _cmd_lee_yang(args):
    model = _load_model(args.model)
    s, t = _parse_cover(args.cover)
    deviation = lee_yang_check(model, args.beta, s, t)
    sites = s * model.m * t * model.n
    ok = deviation <= args.tol
    _emit(
        args,
        _json({"max_deviation": deviation, "sites": sites, "pass": ok}),
    )
    return 0 if ok else 2


def _pick_cover(model, site_cap):
    for s, t in ((2, 2), (2, 1), (1, 2), (1, 1)):
        if s * t * model.m * model.n <= site_cap:
            return s, t
    return None


def _cmd_validate(args):
    model = _load_model(args.model)
    beta = args.beta
    lines = []
    failed = 0

    def record(name, ok, detail):
        nonlocal failed
        word = "PASS" if ok else "FAIL"
        if ok is None:
            word = "SKIP"
        elif not ok:
            failed += 1
        lines.append("%s %s (%s)" % (word, name, detail))

    spin_cover = _pick_cover(model, min(args.max_sites, 20))
    if spin_cover is None:
        record("partition-identity", None, "model too large for spin enumeration")
    else:
        s, t = spin_cover
        z_spin, _, _ = enumerate_spin(model, beta, s, t)
        cover = replicate(model, s, t)
        sites = cover.m * cover.n
        cosh_prod = float(
            np.prod(np.cosh(beta * np.asarray(cover.Jh)))
            * np.prod(np.cosh(beta * np.asarray(cover.Jv)))
        )
        z_pred = 2.0**sites * cosh_prod * torus_partition(assemble(cover, beta))
        rel = abs(z_pred - z_spin) / abs(z_spin)
        record(
            "partition-identity",
            rel < 1e-10,
            "cover %dx%d rel err %.2e" % (s, t, rel),
        )

    dimer_cover = _pick_cover(model, 6)
    if dimer_cover is None:
        record("dimer-corners", None, "model too large for dimer enumeration")
        record("edge-probability", None, "model too large for dimer enumeration")
    else:
        s, t = dimer_cover
        cover = replicate(model, s, t)
        graph = fisher_graph(cover, weights(cover, beta, HIGH_TEMP), 1, 1)
        z_enum, probs, _ = enumerate_dimer(graph)
        z_pf = torus_partition(assemble(cover, beta))
        rel = abs(z_pf - z_enum) / abs(z_enum)
        record(
            "dimer-corners",
            rel < 1e-10,
            "cover %dx%d rel err %.2e" % (s, t, rel),
        )
        try:
            worst = 0.0
            for idx in _probe_edges(graph):
                p = edge_probability_torus(model, beta, [graph.edges[idx].key], s, t)
                worst = max(worst, abs(p - probs[idx]))
            record("edge-probability", worst < 1e-10, "worst abs err %.2e" % worst)
        except NearSingular:
            record("edge-probability", None, "beta too close to critical")

    op = assemble(model, beta)
    rep = corner_pfaffians(op)
    worst = 0.0
    for theta, tau in CORNERS:
        det = eval_P(op, (-1.0) ** theta, (-1.0) ** tau).real
        scale = max(abs(det), 1.0)
        worst = max(worst, abs(rep.pf[(theta, tau)] ** 2 - det) / scale)
    record("pfaffian-squares", worst < 1e-8, "worst rel err %.2e" % worst)

    try:
        symbol = build_symbol(model, beta, M=128, K_max=16)
        c = float(np.prod((1.0 - symbol.lineWeights**2) ** 2))
        G, _ = widom_limit(symbol, 8)
        err = abs(G * c - 1.0)
        record("symbol-determinant", err < 1e-6, "|G*c - 1| = %.2e" % err)
    except NearSingular:
        record("symbol-determinant", None, "beta too close to critical")

    bc1 = critical_beta(model, tol=args.tol)[0]
    bc2 = critical_beta(replicate(model, 2, 1), tol=args.tol)[0]
    err = abs(bc1 - bc2)
    record("critical-replication", err < 10 * args.tol, "|diff| = %.2e" % err)

    if model.m * model.n <= min(args.max_sites, 16):
        dev = lee_yang_check(model, beta, 1, 1)
        record("lee-yang-circle", dev < 1e-8, "max radial dev %.2e" % dev)
    else:
        record("lee-yang-circle", None, "model too large for enumeration")

    lines.append("%d checks failed" % failed)
    _emit(args, "\n".join(lines))
    return 2 if failed else 0


def _probe_edges(graph):
    """A few representative edge indices: one intra, one H, one V."""
    picked = {}
    for idx, e in enumerate(graph.edges):
        kind = e.key[0] if e.key[0] in ("H", "V") else "intra"
        picked.setdefault(kind, idx)
    return sorted(picked.values())


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _build_parser():
    parser = _Parser(
        prog="ispec",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, threads=False):
        p.add_argument("model", help="path to a JSON model file")
        p.add_argument(
            "--output",
            default="-",
            help="output path, '-' for stdout (default: %(default)s)",
        )
        if threads:
            p.add_argument(
                "--threads",
                type=int,
                default=None,
                help="worker threads; falls back to ISPEC_THREADS, then 1",
            )

    p = sub.add_parser(
        "critical-temp", help="inverse critical temperature by Pfaffian bisection"
    )
    common(p)
    p.add_argument(
        "--tol",
        type=float,
        default=1e-10,
        help="bisection tolerance on beta (default: %(default)s)",
    )
    p.set_defaults(func=_cmd_critical_temp)

    p = sub.add_parser(
        "correlate", help="spin correlations along the vertical axis, CSV + summary"
    )
    common(p, threads=True)
    p.add_argument(
        "--beta", type=float, required=True, help="inverse temperature (required)"
    )
    p.add_argument(
        "--nmax",
        type=int,
        default=64,
        help="largest separation; rows run over multiples of the period "
        "(default: %(default)s)",
    )
    p.add_argument(
        "--symbol-grid",
        type=int,
        default=256,
        help="circle sample count for the symbol (default: %(default)s)",
    )
    p.add_argument(
        "--bandwidth",
        type=int,
        default=64,
        help="kept Fourier bandwidth of the symbol (default: %(default)s)",
    )
    p.add_argument(
        "--trunc",
        type=int,
        default=32,
        help="Hankel window for the Widom constant (default: %(default)s)",
    )
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser(
        "spectral-scan", help="|det K| over a uniform grid on the unit torus, CSV"
    )
    common(p, threads=True)
    p.add_argument(
        "--beta", type=float, required=True, help="inverse temperature (required)"
    )
    p.add_argument(
        "--grid",
        type=int,
        default=32,
        help="grid points per circle (default: %(default)s)",
    )
    p.set_defaults(func=_cmd_spectral_scan)

    p = sub.add_parser(
        "edge-corr", help="dimer edge occupation probabilities, JSON"
    )
    common(p)
    p.add_argument(
        "--beta", type=float, required=True, help="inverse temperature (required)"
    )
    p.add_argument(
        "--edge",
        action="append",
        required=True,
        help="edge as TAG,i,j or TAG,i,j,fx,fy; repeatable (required)",
    )
    p.add_argument(
        "--torus",
        default=None,
        help="finite cover as s,t; omit for the infinite volume (default: infinite)",
    )
    p.add_argument(
        "--fourier-grid",
        type=int,
        default=64,
        help="grid points per circle for the inverse transform "
        "(default: %(default)s)",
    )
    p.set_defaults(func=_cmd_edge_corr)

    p = sub.add_parser(
        "validate", help="cross-check the pipeline against brute force oracles"
    )
    common(p)
    p.add_argument(
        "--beta",
        type=float,
        default=0.3,
        help="inverse temperature for the checks (default: %(default)s)",
    )
    p.add_argument(
        "--max-sites",
        type=int,
        default=16,
        help="site budget for exhaustive enumeration (default: %(default)s)",
    )
    p.add_argument(
        "--tol",
        type=float,
        default=1e-10,
        help="critical temperature tolerance (default: %(default)s)",
    )
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser(
        "lee-yang", help="unit-circle deviation of the field polynomial roots, JSON"
    )
    common(p)
    p.add_argument(
        "--beta",
        type=float,
        default=0.3,
        help="inverse temperature (default: %(default)s)",
    )
    p.add_argument(
        "--cover",
        default="1,1",
        help="torus cover as s,t (default: %(default)s)",
    )
    p.add_argument(
        "--tol",
        type=float,
        default=1e-8,
        help="allowed radial deviation (default: %(default)s)",
    )
    p.set_defaults(func=_cmd_lee_yang)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TooLarge as exc:
        print("error: TooLarge: %s" % exc, file=sys.stderr)
        return 2
    except IspecError as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
