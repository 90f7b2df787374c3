"""Command-line front end.

    resumkit weights   GRAPH [--method brute|dc|symbolic|mc] [--samples N] [--seed S]
    resumkit sectors   GRAPH --tree l1,l2,l3
    resumkit psd-check GRAPH --tree l1,l2,l5 (--w l1=0.5,... | --samples N --seed S)
    resumkit symanzik  GRAPH
    resumkit amplitude GRAPH --dim 1.0 --mass 1.0 --samples 1e6 --seed 7 [--sector-decomposed]
    resumkit phi4-lve  --order 2 [--lambda 0.05] [--labeled]
    resumkit selftest

Results go to stdout as JSON (or CSV for tabular commands); diagnostics go
to stderr.  Runs with the same arguments produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import lve, positivity, symanzik, weights
from .errors import ResumkitError
from .graph import Multigraph
from .serialize import document, dumps, float_text, load_graph, rational

class UsageError(ResumkitError):
    kind = "usage"


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    method: str = "dc"
    tree: str | None = None
    w: str | None = None
    dim: float | None = None
    mass: str = "1"
    order: int = 2
    lam: float | None = None
    labeled: bool = False
    sector_decomposed: bool = False
    samples: int | None = None
    seed: int | None = None
    brute_force_max_edges: int = weights.DEFAULT_MAX_EDGES
    symbolic_max_tree_edges: int = weights.DEFAULT_MAX_TREE_EDGES
    vacuum_order_cap: int = lve.DEFAULT_ORDER_CAP
    threads: int = 1
    format: str = "json"

    def validate(self) -> None:
        for name in ("brute_force_max_edges", "symbolic_max_tree_edges", "vacuum_order_cap", "threads"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if self.samples is not None and self.samples < 1:
            raise UsageError("--samples must be >= 1")

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("threads")  # does not affect results
        return d


def _tree_arg(spec: str | None) -> frozenset[str]:
    if not spec:
        raise UsageError("--tree is required")
    return frozenset(s.strip() for s in spec.split(",") if s.strip())


def _need_seed(cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise UsageError("stochastic commands require --seed")
    return cfg.seed


def _weight_entry(w) -> dict:
    if isinstance(w, weights.ConstructiveWeight):
        return {"w": str(w), "N": w.sector_count}
    return {"estimate": w.estimate, "std_error": w.std_error}


def _graph_summary(g: Multigraph) -> dict:
    return {"vertices": g.num_vertices, "edges": g.num_edges, "edge_order": list(g.edge_labels)}


def cmd_weights(cfg: RunConfig) -> dict:
    g = load_graph(cfg.input)
    if cfg.method == "mc":
        _need_seed(cfg)
    table = weights.weight_table(
        g, cfg.method, samples=cfg.samples or 100_000, seed=cfg.seed,
        max_edges=cfg.brute_force_max_edges, max_tree_edges=cfg.symbolic_max_tree_edges,
        threads=cfg.threads)
    out = {"graph": _graph_summary(g), "method": cfg.method,
           "total_sectors": math.factorial(g.num_edges),
           "trees": {weights.tree_label(g, t): _weight_entry(w) for t, w in table.items()}}
    if cfg.method == "mc":
        out["sum_estimate"] = sum(w.estimate for w in table.values())
    else:
        out["sum"] = rational(sum((w.value for w in table.values()), Fraction(0)))
    return out


def cmd_sectors(cfg: RunConfig) -> dict:
    g = load_graph(cfg.input)
    t = _tree_arg(cfg.tree)
    secs = weights.sectors_for_tree(g, t, cfg.brute_force_max_edges)
    return {"graph": _graph_summary(g), "tree": weights.tree_label(g, t), "count": len(secs),
            "total_sectors": math.factorial(g.num_edges),
            "w": rational(Fraction(len(secs), math.factorial(g.num_edges))),
            "sectors": [",".join(s) for s in secs]}


def _parse_w(spec: str) -> dict[str, Fraction]:
    out = {}
    for item in spec.split(","):
        if "=" not in item:
            raise UsageError(f"--w entries look like l1=0.5, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = Fraction(v.strip())
        except ValueError as exc:
            raise UsageError(f"bad weakening value {v!r}") from exc
    return out


def cmd_psd_check(cfg: RunConfig) -> dict:
    g = load_graph(cfg.input)
    t = _tree_arg(cfg.tree)
    if cfg.w is not None:
        w = _parse_w(cfg.w)
        m = positivity.build_weakening_matrix(g, t, w)
        rep = positivity.check_psd(m)
        parts = positivity.block_decomposition(g, t, w)
        return {"tree": weights.tree_label(g, t), "mode": "exact",
                "w": {k: rational(v) for k, v in sorted(w.items())},
                "vertices": list(m.vertices),
                "matrix": [[rational(x) for x in row] for row in m.entries],
                "psd": rep["psd"], "min_eigenvalue": rep["min_eigenvalue"],
                "order": list(parts.order),
                "coefficients": [rational(c) for c in parts.coefficients],
                "partitions": [[sorted(b) for b in p] for p in parts.partitions],
                "reconstruction_residual": rational(positivity.reconstruction_residual(m, parts))}
    if cfg.samples is None:
        raise UsageError("psd-check needs either --w or --samples with --seed")
    import numpy as np
    rng = np.random.default_rng(_need_seed(cfg))
    labels = sorted(t)
    lo = math.inf
    worst_residual = 0.0
    all_psd = True
    for _ in range(cfg.samples):
        w = dict(zip(labels, (float(x) for x in rng.random(len(labels)))))
        m = positivity.build_weakening_matrix(g, t, w)
        rep = positivity.check_psd(m)
        lo = min(lo, rep["min_eigenvalue"])
        all_psd &= rep["psd"]
        res = positivity.reconstruction_residual(m, positivity.block_decomposition(g, t, w))
        worst_residual = max(worst_residual, float(res))
    return {"tree": weights.tree_label(g, t), "mode": "float", "samples": cfg.samples,
            "psd": all_psd, "min_eigenvalue": lo, "reconstruction_residual": worst_residual}


def cmd_symanzik(cfg: RunConfig) -> dict:
    g = load_graph(cfg.input)
    poly = symanzik.symanzik_polynomial(g)
    return {"graph": _graph_summary(g), "count": len(poly), "degree": poly.degree,
            "matrix_tree_count": rational(symanzik.spanning_tree_count_matrix_tree(g)),
            "monomials": poly.to_list()}


def cmd_amplitude(cfg: RunConfig) -> dict:
    g = load_graph(cfg.input)
    if cfg.dim is None:
        raise UsageError("--dim is required")
    seed = _need_seed(cfg)
    try:
        mass = Fraction(cfg.mass)
    except ValueError as exc:
        raise UsageError(f"bad mass {cfg.mass!r}") from exc
    params = symanzik.ModelParams(cfg.dim, mass)
    try:
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    samples = cfg.samples or 100_000
    if cfg.sector_decomposed:
        est = symanzik.amplitude_sector_decomposed(g, params, samples, seed, cfg.brute_force_max_edges)
    else:
        est = symanzik.amplitude_parametric(g, params, samples, seed, threads=cfg.threads)
    return {"graph": _graph_summary(g),
            "estimator": "sector-decomposed" if cfg.sector_decomposed else "parametric",
            "dimension": cfg.dim, "mass": rational(mass), "samples": est.samples,
            "estimate": est.estimate, "std_error": est.std_error,
            "exact": None if est.exact is None else rational(est.exact),
            "diagnostics": est.diagnostics}


def _series(series: dict[int, Fraction]) -> dict[str, str]:
    return {str(n): rational(c) for n, c in sorted(series.items())}


def cmd_phi4_lve(cfg: RunConfig) -> dict:
    rep = lve.lve_repack(cfg.order, cap=cfg.vacuum_order_cap, labeled=cfg.labeled)
    out = {"order": cfg.order,
           "shapes": {s: _series(v) for s, v in rep.shapes.items()},
           "totals": _series(rep.totals),
           "oracle": _series(rep.oracle),
           "matches_oracle": rep.totals == rep.oracle,
           "z_totals": _series(rep.z_totals),
           "stats": {str(n): s for n, s in rep.stats.items()}}
    if cfg.labeled:
        out["labeled"] = {k: _series(v) for k, v in rep.labeled.items()}
    if cfg.lam is not None:
        out["evaluation"] = {"lambda": cfg.lam, **rep.evaluate(cfg.lam)}
    return out


def selftest_checks() -> list[tuple[str, bool]]:
    from .fixtures import BUBBLE, G_EYE
    t123, t125 = {"l1", "l2", "l3"}, {"l1", "l2", "l5"}
    checks = []
    for name, fn in (("brute", weights.weight_bruteforce),
                     ("dc", weights.weight_deletion_contraction),
                     ("symbolic", weights.weight_symbolic)):
        a, b = fn(G_EYE, t123), fn(G_EYE, t125)
        checks.append((f"{name}: w(T123)=1/15, N=48", a.value == Fraction(1, 15) and a.sector_count == 48))
        checks.append((f"{name}: w(T125)=11/120, N=66", b.value == Fraction(11, 120) and b.sector_count == 66))
    table = weights.weight_table(G_EYE, "dc")
    checks.append(("g_eye weights sum to 1", sum(w.value for w in table.values()) == 1))
    checks.append(("simplex integrals 1/120, 1/48",
                   weights.simplex_monomial_integral([3, 0, 0]) == Fraction(1, 120)
                   and weights.simplex_monomial_integral([1, 1, 1]) == Fraction(1, 48)))
    checks.append(("U(g_eye) has 12 monomials",
                   len(symanzik.symanzik_polynomial(G_EYE)) == 12
                   == symanzik.spanning_tree_count_matrix_tree(G_EYE)))
    est = symanzik.amplitude_parametric(BUBBLE, symanzik.ModelParams(0, Fraction(2)), 10, 1)
    checks.append(("D=0 amplitude is m^-2E", est.exact == Fraction(1, 16) and est.std_error == 0))
    rep = lve.lve_repack(2)
    checks.append(("LVE totals -3/2, 12", rep.totals == {1: Fraction(-3, 2), 2: Fraction(12)}))
    rng = random.Random(0)
    from .census import random_tree
    ok = True
    for _ in range(50):
        tr = random_tree(rng, rng.randint(2, 8))
        w = {label: Fraction(rng.randint(0, 999), 1000) for label in tr.edge_labels}
        m = positivity.build_weakening_matrix(tr, tr.edge_labels, w)
        ok &= positivity.check_psd(m)["min_eigenvalue"] > 0
        ok &= positivity.reconstruction_residual(m, positivity.block_decomposition(tr, tr.edge_labels, w)) == 0
    checks.append(("weakening matrices positive definite, exact reconstruction", bool(ok)))
    return checks


def cmd_selftest(cfg: RunConfig) -> dict:
    checks = selftest_checks()
    return {"checks": [{"name": n, "pass": bool(p)} for n, p in checks],
            "all_pass": all(p for _, p in checks)}


HANDLERS = {
    "weights": cmd_weights,
    "sectors": cmd_sectors,
    "psd-check": cmd_psd_check,
    "symanzik": cmd_symanzik,
    "amplitude": cmd_amplitude,
    "phi4-lve": cmd_phi4_lve,
    "selftest": cmd_selftest,
}


def run(cfg: RunConfig) -> dict:
    """Execute one command and return its result document."""
    cfg.validate()
    result = HANDLERS[cfg.command](cfg)
    return document(cfg.command, cfg.echo(), result)


# -- csv ----------------------------------------------------------------------

def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    res = doc["result"]
    if doc["command"] == "weights":
        if res["method"] == "mc":
            out.writerow(["tree", "estimate", "std_error"])
            for tree, e in res["trees"].items():
                out.writerow([tree, float_text(e["estimate"]), float_text(e["std_error"])])
        else:
            out.writerow(["tree", "w", "N"])
            for tree, e in res["trees"].items():
                out.writerow([tree, e["w"], e["N"]])
    elif doc["command"] == "sectors":
        out.writerow(["sector"])
        for s in res["sectors"]:
            out.writerow([s])
    elif doc["command"] == "symanzik":
        out.writerow(["monomial"])
        for m in res["monomials"]:
            out.writerow(["*".join(m) or "1"])
    elif doc["command"] == "phi4-lve":
        out.writerow(["shape", "order", "coefficient"])
        for shape, series in res["shapes"].items():
            for n, c in series.items():
                out.writerow([shape, n, c])
    else:
        raise UsageError(f"csv output is not available for {doc['command']}")
    return buf.getvalue()


# -- argument parsing -----------------------------------------------------------

def _samples(s: str) -> int:
    x = float(s)
    if x != int(x) or x < 1:
        raise argparse.ArgumentTypeError(f"sample count must be a positive integer, got {s}")
    return int(x)


def _env_threads() -> int:
    try:
        return max(1, int(os.environ.get("RESUMKIT_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $RESUMKIT_THREADS or 1)")
    common.add_argument("--max-edges", dest="brute_force_max_edges", type=int,
                        default=weights.DEFAULT_MAX_EDGES, help="brute-force sector cap")
    common.add_argument("--max-tree-edges", dest="symbolic_max_tree_edges", type=int,
                        default=weights.DEFAULT_MAX_TREE_EDGES, help="symbolic evaluation cap")
    common.add_argument("--order-cap", dest="vacuum_order_cap", type=int,
                        default=lve.DEFAULT_ORDER_CAP, help="largest vacuum graph order")

    p = argparse.ArgumentParser(prog="resumkit", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("weights", parents=[common], help="constructive weight table")
    s.add_argument("input")
    s.add_argument("--method", choices=weights.METHODS, default="dc")
    s.add_argument("--samples", type=_samples)
    s.add_argument("--seed", type=int)

    s = sub.add_parser("sectors", parents=[common], help="sectors whose leading tree is --tree")
    s.add_argument("input")
    s.add_argument("--tree", required=True)

    s = sub.add_parser("psd-check", parents=[common], help="weakening matrix positivity")
    s.add_argument("input")
    s.add_argument("--tree", required=True)
    s.add_argument("--w")
    s.add_argument("--samples", type=_samples)
    s.add_argument("--seed", type=int)

    s = sub.add_parser("symanzik", parents=[common], help="Kirchhoff-Symanzik polynomial")
    s.add_argument("input")

    s = sub.add_parser("amplitude", parents=[common], help="parametric amplitude estimate")
    s.add_argument("input")
    s.add_argument("--dim", type=float, required=True)
    s.add_argument("--mass", default="1")
    s.add_argument("--samples", type=_samples)
    s.add_argument("--seed", type=int)
    s.add_argument("--sector-decomposed", action="store_true")

    s = sub.add_parser("phi4-lve", parents=[common], help="zero-dimensional phi^4 tree repacking")
    s.add_argument("--order", type=int, default=2)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--labeled", action="store_true", help="also emit per-labeled-tree series")

    sub.add_parser("selftest", parents=[common], help="quick reproduction of the reference values")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    known = {f for f in RunConfig.__dataclass_fields__}
    kwargs = {k: v for k, v in vars(ns).items() if k in known and v is not None}
    cfg = RunConfig(**kwargs)
    if ns.threads is None:
        cfg.threads = _env_threads()
    return cfg


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        doc = run(cfg)
        text = to_csv(doc) if cfg.format == "csv" else dumps(doc)
    except (ResumkitError, ValueError) as exc:
        kind = getattr(exc, "kind", "value")
        sys.stderr.write(json.dumps({"error": {"kind": kind, "message": str(exc)}}) + "\n")
        return 2
    sys.stdout.write(text)
    if cfg.command == "selftest" and not doc["result"]["all_pass"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
