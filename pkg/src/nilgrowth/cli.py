"""Command-line entry point: ``nilgrowth <command> [options]``.

Every command writes one report (CSV or JSON) to --out or stdout.  Exit
statuses: 0 when every asserted bound holds, 2 for usage errors, 3 when a
budget is exhausted, 4 for a bound violation (counterexample on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from . import geometry, groups, harmonious as harm, heisenberg as heis, lie, suites
from ._rational import fmt_q, parse_vec
from .convex import box, graded_box, l1_ball, l2_ball, polytope
from .errors import BoundViolation, NilgrowthError, UsageError
from .lattice import index as lattice_index, span_z
from .report import emit_report, to_jsonable

COMMANDS = ("lie", "lattice", "harmonious", "growth", "relations", "verify")
SUITES = ("minkowski", "exploration", "adversarial", "index", "subgroup", "bch", "tao-relations", "lemmas")


# -- argument parsing helpers ----------------------------------------------------

def parse_range(text):
    """'2..4' -> [2, 3, 4]; '2,3' -> [2, 3]."""
    text = str(text).strip()
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if lo > hi:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad integer range {text!r} (expected a..b or a,b,c)")


def parse_ints(text):
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad integer list {text!r}")


def parse_rows(text):
    """'1,0;0,1/2' -> [[1, 0], [0, 1/2]] as Fractions."""
    rows = [parse_vec(r) for r in str(text).split(";") if r.strip()]
    if not rows:
        raise UsageError("empty vector list")
    return rows


def parse_body(text, d=None):
    """Body specs: box:h1,h2 | l1:r[:w1,w2] | l2:r | polytope:v1;v2 | graded:deg1,deg2:lam."""
    kind, _, rest = str(text).partition(":")
    parts = rest.split(":")
    try:
        if kind == "box":
            return box(parse_vec(parts[0]))
        if kind == "l1":
            w = parse_vec(parts[1]) if len(parts) > 1 else None
            dim = len(w) if w else d
            if dim is None:
                raise UsageError("l1 body needs weights or a lattice to fix the dimension")
            return l1_ball(dim, Fraction(parts[0]), w)
        if kind == "l2":
            if d is None:
                raise UsageError("l2 body needs a lattice to fix the dimension")
            return l2_ball(d, Fraction(parts[0]))
        if kind == "polytope":
            return polytope(parse_rows(rest))
        if kind == "graded":
            return graded_box(parse_ints(parts[0]), Fraction(parts[1]))
    except (IndexError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad body spec {text!r}: {exc}")
    raise UsageError(f"unknown body kind in {text!r} (box, l1, l2, polytope, graded)")


def _common(p):
    p.add_argument("--config", help="JSON file whose keys override command-line flags")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--budget-points", type=int, default=None,
                   help="point/element budget (env NILGROWTH_BUDGET_POINTS)")


def build_parser():
    ap = argparse.ArgumentParser(prog="nilgrowth", description="Exact experiments on nilpotent growth.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lie", help="Hall bases, BCH products and Zassenhaus terms")
    _common(p)
    p.add_argument("--op", choices=("basis", "bch", "zassenhaus"), default="basis")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--step", type=int, default=3)
    p.add_argument("--x", help="coordinates of X in the Hall basis")
    p.add_argument("--y", help="coordinates of Y in the Hall basis")

    p = sub.add_parser("lattice", help="successive minima, Minkowski ratios, nested exploration")
    _common(p)
    p.add_argument("--op", choices=("minkowski", "explore", "index", "covolume"), default="minkowski")
    p.add_argument("--basis", help="generators 'v1;v2;...' with rational entries")
    p.add_argument("--sub", help="sublattice generators for --op index")
    p.add_argument("--body", action="append", default=[], help="body spec; repeat for explore")
    p.add_argument("--example", choices=("adversarial-d4",), help="built-in exploration instance")

    p = sub.add_parser("harmonious", help="harmonious sandwiches and Følner counts in H(R)")
    _common(p)
    p.add_argument("--op", choices=("sandwich", "check", "folner"), default="sandwich")
    p.add_argument("--gens", default="1,0,0;0,1,0", help="integer Heisenberg triples a,b,c")
    p.add_argument("--basis", help="log-lattice basis for --op check (a,b,c coordinates)")
    p.add_argument("--C1", type=int)
    p.add_argument("--C2", type=int)
    p.add_argument("--lam", default="32")

    p = sub.add_parser("growth", help="ball sizes and the Tao example")
    _common(p)
    p.add_argument("--group", default="abelian",
                   help="abelian | heisenberg | heisenberg-mod | heisenberg-tao | path to a group JSON")
    p.add_argument("--moduli", default="0,0", help="abelian moduli, 0 for Z")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--n-max", type=int, default=10)

    p = sub.add_parser("relations", help="abelian relation scales and subgroup exploration")
    _common(p)
    p.add_argument("--abelian", help="moduli n1,n2,... of the abelian group")
    p.add_argument("--prescribed", help="scales to realize, e.g. 2,5,9")
    p.add_argument("--subgroup", help="subgroup generators 'g1;g2' inside --group")
    p.add_argument("--group", default="heisenberg", help="abelian | heisenberg | heisenberg-mod")
    p.add_argument("--moduli", default="0,0")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--max-scale", type=int, default=10)

    p = sub.add_parser("verify", help="seeded verification suites")
    _common(p)
    p.add_argument("--suite", choices=SUITES, default="minkowski")
    p.add_argument("--dims", default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--N", type=int, default=3)
    return ap


def apply_config(args, parser):
    if not args.config:
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc.strerror or exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {args.config} is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    if cfg.get("command", args.command) != args.command:
        raise UsageError(f"config is for command {cfg['command']!r}, not {args.command!r}")
    for key, val in cfg.items():
        if key in ("command", "config"):
            continue
        name = key.replace("-", "_")
        if not hasattr(args, name):
            raise UsageError(f"unknown config key {key!r} for command {args.command}")
        if name == "body" and isinstance(val, str):
            val = [val]
        if isinstance(val, list) and name in ("dims", "moduli", "abelian", "prescribed"):
            val = ",".join(str(x) for x in val)
        setattr(args, name, val)
    return args


# -- commands ------------------------------------------------------------------------

def _header(args, randomized=False):
    h = {"command": args.command}
    if randomized:
        h.update({"prng": suites.PRNG_NAME, "prng_version": suites.PRNG_VERSION, "seed": args.seed})
    return h


def cmd_lie(args):
    B = lie.build_hall_basis(args.k, args.step)
    if args.op == "basis":
        return {"rows": lie.basis_table_rows(B), "columns": ["index", "degree", "tree", "brackets"],
                "summary": {"basis_id": B.basis_id, "dims_by_degree": B.dims_by_degree()}}
    if args.op == "zassenhaus":
        rows = [{"degree": t.degree, "coefficient": t.coefficient, "monomial": t.monomial}
                for grp in lie.zassenhaus_terms(args.step) for t in grp]
        return {"rows": rows, "columns": ["degree", "coefficient", "monomial"], "summary": {"step": args.step}}
    if not args.x or not args.y:
        raise UsageError("--op bch needs --x and --y")
    X, Y = B.element(parse_vec(args.x)), B.element(parse_vec(args.y))
    Z = lie.bch(X, Y)
    rows = [{"index": i, "x": a, "y": b, "bch": c} for i, (a, b, c) in enumerate(zip(X.coords, Y.coords, Z.coords))]
    return {"rows": rows, "columns": ["index", "x", "y", "bch"],
            "summary": {"basis_id": B.basis_id, "bch": [fmt_q(c) for c in Z.coords]}}


def _lattice_from(args):
    if not args.basis:
        raise UsageError("--basis is required")
    rows = parse_rows(args.basis)
    return span_z(rows, len(rows[0]))


def cmd_lattice(args):
    if args.op == "explore":
        if args.example == "adversarial-d4":
            L, bodies = suites.adversarial_d4()
        else:
            L = _lattice_from(args)
            bodies = [parse_body(b, L.ambient_dim) for b in args.body]
            if not bodies:
                raise UsageError("--op explore needs at least one --body")
        rep = geometry.explore(L, bodies, budget=args.budget_points)
        out = {"rows": rep.rows(), "columns": ["scale", "rank", "covolume", "changed", "index_from_previous"],
               "summary": {k: v for k, v in rep.to_json().items() if k != "chain"}}
        if not rep.verdict:
            raise BoundViolation(f"{rep.change_count} changes exceed the bound {rep.bound}",
                                 counterexample=rep.to_json())
        return out
    L = _lattice_from(args)
    if args.op == "covolume":
        c = L.covolume() if L.rank else Fraction(0)
        return {"rows": [{"rank": L.rank, "covolume": c}], "columns": ["rank", "covolume"],
                "summary": {"rank": L.rank, "covolume": c, "basis": L.to_json()}}
    if args.op == "index":
        if not args.sub:
            raise UsageError("--op index needs --sub")
        S = span_z(parse_rows(args.sub), L.ambient_dim)
        ix = lattice_index(S, L)
        ix = "inf" if ix == math.inf else ix
        return {"rows": [{"index": ix}], "columns": ["index"], "summary": {"index": ix}}
    if len(args.body) != 1:
        raise UsageError("--op minkowski needs exactly one --body")
    K = parse_body(args.body[0], L.ambient_dim)
    r = geometry.minkowski_second_check(L, K, args.budget_points)
    row = r.to_json()
    if not r.verdict:
        raise BoundViolation("Minkowski ratio outside [1, d!]", counterexample=row)
    return {"rows": [row], "columns": list(row.keys()), "summary": row}


def _heis_gens(text):
    gens = []
    for r in parse_rows(text):
        if len(r) != 3 or any(x.denominator != 1 for x in r):
            raise UsageError(f"Heisenberg generators are integer triples a,b,c; got {text!r}")
        gens.append(tuple(int(x) for x in r))
    return gens


def cmd_harmonious(args):
    H = lie.heisenberg_algebra()
    if args.op == "check":
        if not args.basis:
            raise UsageError("--op check needs --basis")
        L = harm.GradedLattice(H, span_z(parse_rows(args.basis), 3))
        v = harm.is_harmonious(L).to_json()
        return {"rows": [v], "columns": ["status", "is_additive_subgroup", "is_bracket_closed", "is_group_closed"],
                "summary": v}
    if args.op == "folner":
        Zlog = harm.GradedLattice(H, span_z([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3))
        lam = Fraction(args.lam)
        n = harm.folner_count(Zlog, lam, args.budget_points)
        q = H.homogeneous_dimension()
        ratio = Fraction(n) / lam**q
        row = {"lambda": lam, "count": n, "q": q, "count_over_lambda_q": float(ratio),
               "relative_error": float(abs(ratio - 8) / 8)}
        return {"rows": [row], "columns": list(row.keys()), "summary": row}
    gens = _heis_gens(args.gens)
    consts = harm.default_constants(2, args.C1, args.C2)
    logs = [H.element(heis.to_log(g)) for g in gens]
    rep = harm.index_sandwich_bound_check(logs, consts, gamma_spec={"generators": [list(g) for g in gens]},
                                          budget=args.budget_points)
    data = rep.to_json()
    if not rep.verdict:
        raise BoundViolation("index sandwich bound failed", counterexample=data)
    return {"rows": [data], "columns": list(data.keys()), "summary": data}


def _group(args):
    name = args.group
    if name.endswith(".json") or os.path.sep in name:
        try:
            with open(name, encoding="utf-8") as fh:
                return groups.group_from_json(json.load(fh))
        except OSError as exc:
            raise UsageError(f"cannot read group spec {name}: {exc.strerror or exc}")
    if name == "abelian":
        return groups.abelian_group(parse_ints(args.moduli))
    if name == "heisenberg":
        return groups.heisenberg_group()
    if name == "heisenberg-mod":
        return groups.heisenberg_mod_group(args.m)
    raise UsageError(f"unknown group {name!r}")


def cmd_growth(args):
    if args.group == "heisenberg-tao":
        prof = groups.tao_example_profile(args.N, args.n_max, args.budget_points)
        rels = groups.tao_relation_check(args.N, 50, suites.make_rng(args.seed))
        max_len = max(r[1] for r in rels)
        summary = {"N": args.N, "n_max": args.n_max, "slope_n_le_N": prof.slope_low,
                   "slope_n_gt_N": prof.slope_high, "relations_checked": len(rels),
                   "relations_hold": all(r[2] for r in rels), "max_relation_length": max_len}
        bad = [r for r in rels if not r[2] or r[1] > 5]
        if bad:
            raise BoundViolation("a displayed relation failed", counterexample=list(bad[0]))
        return {"rows": prof.rows(), "columns": ["n", "size", "log_ratio"], "summary": summary,
                "randomized": True}
    G = _group(args)
    prof = groups.growth_profile(G, args.n_max, args.budget_points)
    K = {r: q for r, q in prof.ratios.items()}
    return {"rows": prof.rows(), "columns": ["radius", "size", "ratio_3r"],
            "summary": {"group": G.to_json(), "sizes": prof.sizes, "K": K}}


def cmd_relations(args):
    if args.prescribed:
        target = parse_ints(args.prescribed)
        moduli = groups.prescribed_scale_moduli(target)
        rep = groups.abelian_relation_scales(moduli, args.max_scale)
        extra = {"moduli": moduli, "prescribed": target, "realized": rep.change_scales == sorted(target)}
        if not extra["realized"]:
            raise BoundViolation("prescribed scales not realized", counterexample={**extra, **rep.to_json()})
    elif args.abelian:
        moduli = parse_ints(args.abelian)
        rep = groups.abelian_relation_scales(moduli, args.max_scale)
        extra = {"moduli": moduli}
    elif args.subgroup:
        G = _group(args)
        gens = [tuple(int(x) for x in r) for r in parse_rows(args.subgroup)]
        rep = groups.subgroup_scales(G, gens, args.max_scale, args.budget_points)
        extra = {"group": G.to_json()}
    else:
        raise UsageError("relations needs one of --abelian, --prescribed or --subgroup")
    summary = {**rep.to_json(), **extra}
    summary.pop("objects", None)
    return {"rows": rep.rows(), "columns": ["scale", "canonical_hash", "changed"], "summary": summary,
            "default_format": "json"}


def cmd_verify(args):
    s, seed, b = args.suite, args.seed, args.budget_points
    dims = parse_range(args.dims) if args.dims else None
    if s == "minkowski":
        dims = dims or [2, 3, 4]
        if any(d < 1 or d > 4 for d in dims):
            raise UsageError("Minkowski suite supports 1 <= d <= 4")
        rows = suites.minkowski_suite(seed, dims, args.trials or 500, b)
        cols = ["trial", "dim", "body", "rho", "rho_lower", "rho_upper", "bound", "verdict"]
    elif s == "exploration":
        rows = suites.exploration_suite(seed, dims or [1, 2, 3, 4], args.trials or 500, b)
        cols = ["trial", "dim", "changes", "bound", "verdict"]
    elif s == "adversarial":
        L, bodies = suites.adversarial_d4()
        rep = geometry.explore(L, bodies, budget=b)
        best, _ = suites.adversarial_search(seed, 2, args.trials or 300, b)
        rows = [{"case": "d4-axis-opening", "dim": 4, "changes": rep.change_count, "bound": rep.bound,
                 "verdict": rep.verdict},
                {"case": "d2-search", "dim": 2, "changes": best, "bound": geometry.exploration_bound(2),
                 "verdict": best <= geometry.exploration_bound(2)}]
        cols = ["case", "dim", "changes", "bound", "verdict"]
    elif s == "index":
        rows = suites.index_pair_suite(seed, args.trials or 10, b)
        cols = ["trial", "sub", "super", "additive_index", "multiplicative_index", "verdict"]
    elif s == "subgroup":
        rows = suites.subgroup_scale_suite(seed, args.trials or 100, budget=b)
        cols = ["run", "group", "generators", "change_scales", "changes", "verdict"]
    elif s == "bch":
        rows = bch_suite(seed, args.trials or 200)
        cols = ["k", "step", "trials", "zassenhaus_ok", "associative_ok", "verdict"]
    elif s == "tao-relations":
        rels = groups.tao_relation_check(args.N, args.trials or 50, suites.make_rng(seed))
        rows = [{"family": n, "length": ln, "verdict": ok and ln <= 5} for n, ln, ok in rels]
        cols = ["family", "length", "verdict"]
    else:
        rows = lemma_rows()
        cols = ["lemma", "case", "verdict"]
    out = {"rows": rows, "columns": cols, "randomized": True, "default_format": "csv",
           "summary": {"suite": s, "runs": len(rows), "all_pass": all(r["verdict"] for r in rows)}}
    if not out["summary"]["all_pass"]:
        out["violation"] = f"suite {s}: a bound failed"
    return out


def bch_suite(seed, trials=200):
    """Zassenhaus factorization and BCH associativity on random rational pairs."""
    rng = suites.make_rng(seed)
    rows = []
    for k, s in ((2, 2), (2, 3), (2, 4), (3, 2)):
        B = lie.build_hall_basis(k, s)
        z_ok = a_ok = True
        for _ in range(trials):
            X, Y, W = (B.element([suites._frac(rng, -3, 3) for _ in range(B.dim)]) for _ in range(3))
            z_ok &= lie.zassenhaus_product(X, Y) == X + Y
            a_ok &= lie.bch(lie.bch(X, Y), W) == lie.bch(X, lie.bch(Y, W))
        rows.append({"k": k, "step": s, "trials": trials, "zassenhaus_ok": z_ok, "associative_ok": a_ok,
                     "verdict": z_ok and a_ok})
    return rows


def lemma_rows():
    rows = []
    inj = [("n=5,k=2", groups.injectivity_radius_check(5, 2).isomorphic is True),
           ("n=100,k=5", groups.injectivity_radius_check(100, 5).isomorphic is True),
           ("n=5,k=4 wraparound", groups.injectivity_radius_check(5, 4, strict=False).isomorphic is False)]
    gen = [("Z/6, H=2Z/6", groups.finite_index_generating_check(groups.abelian_group([6]), [(2,)]).generates),
           ("Z/6, H=G", groups.finite_index_generating_check(groups.abelian_group([6]), [(1,)]).generates),
           ("Heis mod 3, H=center",
            groups.finite_index_generating_check(groups.heisenberg_mod_group(3), [(0, 0, 1)]).generates)]
    chains = lemma_chain_examples()
    rows += [{"lemma": "injectivity", "case": c, "verdict": v} for c, v in inj]
    rows += [{"lemma": "generating", "case": c, "verdict": v} for c, v in gen]
    rows += [{"lemma": "chain", "case": c, "verdict": v} for c, v in chains]
    return rows


def lemma_chain_examples():
    """The three chain-count cases: index-4 subchain, identical chains, doubling indices."""
    H = [span_z([(1, 0), (0, 4)]), span_z([(1, 0), (0, 2)]), span_z([(1, 0), (0, 1)]),
         span_z([(1, 0), (0, Fraction(1, 2))])]
    a = groups.chain_count_check(H, [L.scaled(2) for L in H])
    b = groups.chain_count_check(H, H)
    # H_i = 2^-i Z against the constant subchain Z: index 2^i, four distinct terms
    D = [span_z([(Fraction(1, 2**i),)]) for i in range(4)]
    c = groups.chain_count_check(D, [span_z([(1,)])] * 4)
    return [("2*H_i subchain", a.holds and a.bound == 3 * a.distinct_sub),
            ("identical chains", b.holds and b.bound == b.distinct_sub),
            ("doubling indices", c.holds and c.bound - c.distinct <= 1)]


HANDLERS = {"lie": cmd_lie, "lattice": cmd_lattice, "harmonious": cmd_harmonious, "growth": cmd_growth,
            "relations": cmd_relations, "verify": cmd_verify}


def run(args):
    """Execute a parsed configuration; returns (report text, violation or None)."""
    if args.budget_points is not None and args.budget_points <= 0:
        raise UsageError("--budget-points must be positive")
    res = HANDLERS[args.command](args)
    fmt = args.format or res.get("default_format", "csv")
    header = _header(args, res.get("randomized", False))
    if fmt == "csv":
        header.update({k: v for k, v in res.get("summary", {}).items() if not isinstance(v, (dict, list))})
        text = emit_report(res["rows"], "csv", args.out, res.get("columns"), header)
    else:
        text = emit_report(res.get("summary", {}), "json", args.out, header=header)
    if res.get("violation"):
        bad = [r for r in res["rows"] if not r["verdict"]]
        return text, BoundViolation(res["violation"], counterexample=bad)
    return text, None


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = apply_config(args, parser)
        text, violation = run(args)
    except BoundViolation as exc:
        return _report_violation(exc)
    except NilgrowthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if not args.out:
        sys.stdout.write(text)
    return _report_violation(violation) if violation else 0


def _report_violation(exc):
    print(f"bound violation: {exc}", file=sys.stderr)
    print(json.dumps(to_jsonable(exc.counterexample), indent=2), file=sys.stderr)
    return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
