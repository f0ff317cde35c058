"""Command-line entry point.

Subcommands: classify, grow, cut-spheres, distort, persist, sep-profile.
Parameters come from flags or from a JSON manifest
(``{"graph": path, "command": name, "params": {...}, "output_dir": dir}``).
Randomised commands require a seed, and rerunning a manifest with the same
seed reproduces the output files byte for byte; wall-clock timings are only
written when --timings is passed (main CSV column plus a sidecar), since
they are not reproducible.

Exit codes: 0 success, 1 error, 2 at least one verdict undecided.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import cayley, cuts
from .classify import classify_all
from .graphs import GraphFormatError, LabeledGraph, parse_graph
from .words import GraphProduct, WordError


class CliError(Exception):
    pass


def _load_graph(path: str) -> LabeledGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read graph file: {exc}") from exc
    try:
        return parse_graph(text)
    except GraphFormatError as exc:
        raise CliError(f"bad graph document: {exc}") from exc


def _load_manifest(ns: argparse.Namespace, command: str) -> dict:
    params: dict = {}
    if ns.manifest:
        try:
            doc = json.loads(Path(ns.manifest).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read manifest: {exc}") from exc
        if not isinstance(doc, dict) or "graph" not in doc:
            raise CliError("manifest must be an object with a 'graph' path")
        if doc.get("command") not in (None, command):
            raise CliError(
                f"manifest is for command {doc.get('command')!r}, not {command!r}"
            )
        params = dict(doc.get("params", {}))
        params["graph"] = doc["graph"]
        if "output_dir" in doc:
            params["output_dir"] = doc["output_dir"]
    return params


def _param(params: dict, ns: argparse.Namespace, name: str, default=None):
    flag = getattr(ns, name.replace("-", "_"), None)
    if flag is not None:
        return flag
    if name in params:
        return params[name]
    return default


def _require_seed(params: dict, ns: argparse.Namespace) -> int:
    seed = _param(params, ns, "seed")
    if seed is None:
        raise CliError("seed required: randomized runs must fix --seed (or manifest params.seed)")
    return int(seed)


def _out_dir(params: dict, ns: argparse.Namespace) -> Path:
    out = _param(params, ns, "output_dir", ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_lines(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n")


def _resolve_cap_param(params: dict, ns: argparse.Namespace) -> Optional[int]:
    cap = _param(params, ns, "element_cap")
    return int(cap) if cap is not None else None


# -- subcommands ---------------------------------------------------------------


def cmd_classify(ns: argparse.Namespace) -> int:
    params = _load_manifest(ns, "classify")
    graph_file = _param(params, ns, "graph")
    if not graph_file:
        raise CliError("a graph file is required")
    g = _load_graph(graph_file)
    verdicts, skipped = classify_all(g)
    report = {
        "schema_version": 1,
        "graph_file": str(graph_file),
        "vertices": g.n,
        "edges": len(g.edges),
        "verdicts": {k: v.to_json() for k, v in verdicts.items()},
        "skipped": skipped,
    }
    out = _out_dir(params, ns)
    json_path = out / "classify.json"
    json_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    for name, v in verdicts.items():
        witness = "" if v.witness is None else f"  witness={v.witness}"
        print(f"{name}: {v.value}{witness}")
    for name, reason in skipped.items():
        print(f"{name}: not applicable ({reason})")
    print(f"wrote {json_path}")
    return 2 if any(v.value == "undecided" for v in verdicts.values()) else 0


def cmd_grow(ns: argparse.Namespace) -> int:
    params = _load_manifest(ns, "grow")
    graph_file = _param(params, ns, "graph")
    if not graph_file:
        raise CliError("a graph file is required")
    n_max = int(_param(params, ns, "n_max", 10))
    gp = GraphProduct(_load_graph(graph_file))
    table = cayley.growth_table(
        gp, n_max, engine=_param(params, ns, "engine", "auto"), cap=_resolve_cap_param(params, ns)
    )
    out = _out_dir(params, ns)
    csv_path = out / "grow.csv"
    _write_lines(csv_path, table.csv_rows())
    print(f"alpha_hat={table.alpha_hat:.6g} r2={table.fit.r2:.6g} flag={table.flag}")
    print(f"wrote {csv_path}")
    return 0


def cmd_cut_spheres(ns: argparse.Namespace) -> int:
    params = _load_manifest(ns, "cut-spheres")
    graph_file = _param(params, ns, "graph")
    if not graph_file:
        raise CliError("a graph file is required")
    seed = _require_seed(params, ns)
    t = int(_param(params, ns, "t", 2))
    delta = float(_param(params, ns, "delta", 0.5))
    n_min = int(_param(params, ns, "n_min", t + 1))
    n_max = int(_param(params, ns, "n_max", 8))
    gp = GraphProduct(_load_graph(graph_file))
    table = cuts.cut_growth_experiment(
        gp,
        t=t,
        delta=delta,
        n_range=range(n_min, n_max + 1),
        seed=seed,
        engine=_param(params, ns, "engine", "auto"),
        cap=_resolve_cap_param(params, ns),
        max_pairs=int(_param(params, ns, "pairs", 8)),
        depth_policy=_param(params, ns, "depth_policy", "deep"),
    )
    out = _out_dir(params, ns)
    csv_path = out / "cut_spheres.csv"
    with_timings = bool(getattr(ns, "timings", False))
    _write_lines(csv_path, table.csv_rows(include_timings=with_timings))
    dat_path = out / "cut_spheres.dat"
    dat = ["# n size upper lower"]
    for r in table.rows:
        dat.append(f"{r.n} {r.size} {r.upper if r.upper is not None else 'nan'} "
                   f"{r.lower if r.lower is not None else 'nan'}")
    _write_lines(dat_path, dat)
    if with_timings:
        timings = ["n,runtime_ms"] + [f"{r.n},{r.runtime_ms}" for r in table.rows]
        _write_lines(out / "cut_spheres.timings.csv", timings)
    if table.truncated:
        print(f"table truncated: {table.truncated}")
    print(
        f"lambda_upper={table.lambda_upper.slope:.6g} "
        f"lambda_lower={table.lambda_lower.slope:.6g} flag={table.fit_flag}"
    )
    print(f"wrote {csv_path} and {dat_path}")
    return 0


def cmd_distort(ns: argparse.Namespace) -> int:
    params = _load_manifest(ns, "distort")
    graph_file = _param(params, ns, "graph")
    if not graph_file:
        raise CliError("a graph file is required")
    seed = _require_seed(params, ns)
    n = int(_param(params, ns, "n", 8))
    t = int(_param(params, ns, "t", 2))
    gp = GraphProduct(_load_graph(graph_file))
    min_ext = _param(params, ns, "min_extrinsic")
    report = cayley.distortion_report(
        gp,
        n,
        t,
        n_pairs=int(_param(params, ns, "pairs", 24)),
        seed=seed,
        delta_proxy=float(_param(params, ns, "delta_proxy", 2.0)),
        min_extrinsic=float(min_ext) if min_ext is not None else None,
        include_self_pair=bool(_param(params, ns, "self_pair", False)),
        engine=_param(params, ns, "engine", "auto"),
        cap=_resolve_cap_param(params, ns),
    )
    out = _out_dir(params, ns)
    csv_path = out / "distort.csv"
    _write_lines(csv_path, report.csv_rows())
    print(f"mu_hat={report.fit.slope:.6g} threshold={report.threshold:.6g} flag={report.flag}")
    print(f"wrote {csv_path}")
    return 0


def cmd_persist(ns: argparse.Namespace) -> int:
    params = _load_manifest(ns, "persist")
    graph_file = _param(params, ns, "graph")
    if not graph_file:
        raise CliError("a graph file is required")
    seed = _require_seed(params, ns)
    r = int(_param(params, ns, "r", 5))
    t = int(_param(params, ns, "t", 1))
    gp = GraphProduct(_load_graph(graph_file))
    report = cayley.persistence_check(
        gp,
        r,
        t,
        n_pairs=int(_param(params, ns, "pairs", 20)),
        seed=seed,
        engine=_param(params, ns, "engine", "auto"),
        cap=_resolve_cap_param(params, ns),
    )
    out = _out_dir(params, ns)
    csv_path = out / "persist.csv"
    _write_lines(csv_path, report.csv_rows())
    print(
        f"family_size={report.family_size} threshold={report.threshold:.6g} "
        f"all_above_floor={report.all_ok}"
    )
    print(f"wrote {csv_path}")
    return 0


def cmd_sep_profile(ns: argparse.Namespace) -> int:
    params = _load_manifest(ns, "sep-profile")
    graph_file = _param(params, ns, "graph")
    if not graph_file:
        raise CliError("a graph file is required")
    seed = _require_seed(params, ns)
    n_max = int(_param(params, ns, "n_max", 6))
    t = int(_param(params, ns, "t", 2))
    gp = GraphProduct(_load_graph(graph_file))
    table = cuts.sep_profile_estimate(
        gp,
        n_max,
        t=t,
        seed=seed,
        engine=_param(params, ns, "engine", "auto"),
        cap=_resolve_cap_param(params, ns),
    )
    out = _out_dir(params, ns)
    csv_path = out / "sep_profile.csv"
    _write_lines(csv_path, table.csv_rows())
    for flag in table.flags:
        print(f"warning: {flag}")
    print(f"epsilon_hat={table.epsilon_hat.slope:.6g}")
    print(f"wrote {csv_path}")
    return 0


# -- parser ---------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", help="JSON manifest with graph/params/output_dir")
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--output-dir", dest="output_dir", help="directory for output files")
    p.add_argument("--engine", choices=["auto", "fast", "python"], default=None)
    p.add_argument(
        "--element-cap",
        dest="element_cap",
        type=int,
        default=None,
        help=f"enumeration cap (also via ${cayley.CAP_ENV_VAR})",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coarsesep",
        description="Graph products of finite groups: classification and coarse-separation experiments",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="run all classification verdicts")
    _add_common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("grow", help="ball/sphere growth table")
    _add_common(p)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.set_defaults(fn=cmd_grow)

    p = sub.add_parser("cut-spheres", help="cut bounds for thickened spheres")
    _add_common(p)
    p.add_argument("--n-min", dest="n_min", type=int, default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--pairs", type=int, default=None)
    p.add_argument("--depth-policy", dest="depth_policy", default=None,
                   help="far-pair probe depth: deep | half | none | <int>")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock times in the main CSV (breaks byte determinism)")
    p.set_defaults(fn=cmd_cut_spheres)

    p = sub.add_parser("distort", help="intrinsic vs extrinsic distances on a thickened sphere")
    _add_common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--pairs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--delta-proxy", dest="delta_proxy", type=float, default=None)
    p.add_argument("--min-extrinsic", dest="min_extrinsic", type=float, default=None)
    p.add_argument("--self-pair", dest="self_pair", action="store_const", const=True, default=None)
    p.set_defaults(fn=cmd_distort)

    p = sub.add_parser("persist", help="overlap of neighbouring thickened spheres")
    _add_common(p)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--pairs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_persist)

    p = sub.add_parser("sep-profile", help="separation profile lower-bound estimate")
    _add_common(p)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_sep_profile)

    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.fn(ns)
    except (CliError, GraphFormatError, WordError, cuts.CutError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except cayley.CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
