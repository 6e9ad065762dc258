"""Command-line front end: ``netpower <family> <measure> [flags]``.

Every run writes one result document (JSON) with the keys ``manifest``,
``measure``, ``parameters`` and ``scores``; failures write the same document
with ``scores`` null and an ``error`` entry. Exit codes: 0 success, 1 invalid
input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, centrality, concentration, flow, hybrid, optimize, report, voting
from .errors import InputMismatch, InvalidOption, NetPowerError, ParseError, ValidationError
from .io import file_digest, load_network, read_document, write_document

FAMILIES = {
    "centrality": tuple(centrality.MEASURES),
    "voting": ("shapley-shubik", "banzhaf", "banzhaf-raw", "johnston", "phi", "pi", "pi-prime"),
    "concentration": ("hhi", "top-k", "nci", "ultimate-control"),
    "flow": ("ncv", "nncv", "pagerank", "katz", "alpha-icon"),
    "optimize": ("min-cost", "constraints"),
    "hybrid": ("npi", "npf"),
    "report": ("taxonomy",),
}
INPUT_FLAGS = ("--graph", "--nodes")
UNRECORDED = ("--out", "--timing")  # do not change the computation


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are input errors (exit 1), not numerical ones
        raise InvalidOption(message)


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidOption(f"expected a comma-separated list of numbers, got {text!r}") from None


def _names(text: str) -> list:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="netpower", description="Power and control measures on ownership networks.")
    p.add_argument("family", help=f"one of {', '.join(FAMILIES)} or replay")
    p.add_argument("measure", help="measure name (for replay: path of a result document)")
    p.add_argument("--version", action="version", version=f"netpower {__version__}")
    g = p.add_argument_group("inputs and outputs")
    g.add_argument("--graph", help="edge CSV: source,target,weight")
    g.add_argument("--nodes", help="node CSV: id,kind,value")
    g.add_argument("--out", help="write the result document here instead of stdout")
    g.add_argument("--ownership", action="store_true", help="edges are ownership shares")
    g.add_argument("--undirected", action="store_true", help="treat edges as undirected")
    g.add_argument("--timing", action="store_true", help="record wall time in the manifest")
    c = p.add_argument_group("centrality")
    c.add_argument("--normalized", action="store_true")
    c.add_argument("--weighted", action="store_true")
    c.add_argument("--direction", choices=centrality.DIRECTIONS, default="both")
    c.add_argument("--per-component", action="store_true")
    v = p.add_argument_group("voting")
    v.add_argument("--weights", help="comma-separated voting weights (or shares for concentration)")
    v.add_argument("--players", help="comma-separated player names for --weights")
    v.add_argument("--quota", type=float, default=None)
    v.add_argument("--strict", action="store_true", help="winning needs more than the quota")
    v.add_argument("--target", help="use the shareholders of this node")
    k = p.add_argument_group("concentration")
    k.add_argument("--top-k", type=int, default=None)
    k.add_argument("--H", type=float, default=None)
    k.add_argument("--threshold", type=float, default=None)
    k.add_argument("--rule", choices=concentration.UC_RULES, default="weakest-link")
    f = p.add_argument_group("flow")
    f.add_argument("--damping", type=float, default=0.85)
    f.add_argument("--attenuation", type=float, default=None)
    o = p.add_argument_group("optimize")
    o.add_argument("--targets")
    o.add_argument("--variant", choices=optimize.VARIANTS, default="ic")
    o.add_argument("--alpha", type=float, default=0.5, help="control threshold per node")
    o.add_argument("--prices", choices=("uniform", "value"), default="uniform")
    h = p.add_argument_group("hybrid")
    h.add_argument("--iterations", type=int, default=10_000)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--pivot-rule", choices=("shapley", "johnston"), default="shapley")
    h.add_argument("--d", type=float, default=0.5)
    h.add_argument("--exclude-own", action="store_true", help="leave out each node's own value")
    return p


# ---------------------------------------------------------------------------
# per-family runners: each returns (parameters, scores, details)


def _network(args, base: Path | None, ownership: bool | None = None):
    if not args.graph and not args.nodes:
        raise InvalidOption("--graph and/or --nodes is required")
    own = args.ownership if ownership is None else ownership
    return load_network(_resolve(args.nodes, base), _resolve(args.graph, base), ownership=own, directed=not args.undirected)


def _run_centrality(args, base):
    net = _network(args, base)
    opts = centrality.CentralityOptions(args.normalized, args.weighted, args.direction, args.per_component)
    sv = centrality.MEASURES[args.measure](net, opts)
    return sv.parameters, sv.scores, None


def _profile_doc(prof: voting.PowerProfile):
    details = {"exact": None, "raw": None, "notes": prof.notes}
    if prof.exact is not None:
        details["exact"] = {p: str(Fraction(x)) for p, x in zip(prof.players, prof.exact)}
    if prof.raw_values is not None:
        details["raw"] = dict(zip(prof.players, map(float, prof.raw_values)))
    return {"index": prof.index}, prof.as_dict(), details


def _run_voting(args, base):
    m = args.measure
    if m in ("phi", "pi", "pi-prime"):
        net = _network(args, base, ownership=True)
        cs = voting.ControlStructure(net, 0.5 if args.quota is None else args.quota)
        prof = voting.karos_peters_phi(cs) if m == "phi" else voting.mercik_lobos_pi(cs, m.replace("-", "_"))
        return _profile_doc(prof)
    if args.weights:
        if args.quota is None:
            raise InvalidOption("--quota is required with --weights")
        players = _names(args.players) if args.players else None
        game = voting.WeightedVotingGame(tuple(_floats(args.weights)), args.quota, players, args.strict)
    elif args.target:
        net = _network(args, base, ownership=True)
        cs = voting.ControlStructure(net, 0.5 if args.quota is None else args.quota)
        game = voting.shareholder_game(cs, args.target)
    else:
        raise InvalidOption("give --weights with --quota, or a network with --target")
    fn = {
        "shapley-shubik": voting.shapley_shubik,
        "banzhaf": voting.banzhaf,
        "banzhaf-raw": lambda g: voting.banzhaf(g, normalized=False),
        "johnston": voting.johnston,
    }[m]
    params, scores, details = _profile_doc(fn(game))
    params.update(quota=float(game.quota), strict=game.strict)
    return params, scores, details


def _distribution(args, base):
    if args.weights:
        ids = _names(args.players) if args.players else None
        return concentration.ShareDistribution.from_amounts(_floats(args.weights), ids)
    net = _network(args, base)
    if args.target:
        return concentration.distribution_from_shareholders(net, args.target)
    return concentration.distribution_from_values(net)


def _run_concentration(args, base):
    m = args.measure
    if m == "ultimate-control":
        net = _network(args, base, ownership=True)
        thr = 0.20 if args.threshold is None else args.threshold
        uc = concentration.ultimate_control(net, thr, args.rule)
        details = {"chains": uc.chains, "ties": uc.ties}
        return {"threshold": thr, "rule": args.rule}, dict(uc.owners), details
    dist = _distribution(args, base)
    if m == "hhi":
        return {}, {"hhi": float(concentration.hhi(dist))}, None
    if m == "top-k":
        k = 1 if args.top_k is None else args.top_k
        return {"k": k}, {"top_k": concentration.top_k(dist, k)}, None
    H = 0.8 if args.H is None else args.H
    res = concentration.nci(dist, H)
    return {"H": H}, {"nci_percentage": res.percentage}, {"members": res.members}


def _run_flow(args, base):
    m = args.measure
    opts = flow.PropagationOptions(damping=args.damping, attenuation=args.attenuation, weighted=args.weighted)
    if m in ("ncv", "nncv"):
        net = _network(args, base, ownership=True)
        sv = (flow.ncv if m == "ncv" else flow.nncv)(net)
        return sv.parameters, sv.scores, None
    if m == "pagerank":
        net = _network(args, base)
        sv = flow.pagerank(net, opts)
        return sv.parameters, sv.scores, None
    if m == "katz":
        net = _network(args, base)
        res = flow.katz_influence(net, opts)
        return res.scores.parameters, res.scores.scores, {"T": res.T, "ids": net.ids}
    net = _network(args, base, ownership=True)
    thr = 0.0 if args.threshold is None else args.threshold
    res = flow.alpha_icon_controllers(net, opts, thr)
    return {"attenuation": res.attenuation, "threshold": thr}, res.controllers, {"stakes": res.stakes}


def _run_optimize(args, base):
    net = _network(args, base, ownership=True)
    if not args.targets:
        raise InvalidOption("--targets is required")
    prices = {i: (net.node(i).value if args.prices == "value" else 1.0) for i in net.ids}
    prob = optimize.AcquisitionProblem(net, tuple(_names(args.targets)), args.alpha, prices, args.variant)
    params = {"variant": prob.variant, "targets": prob.targets, "alpha": args.alpha, "prices": args.prices}
    if args.measure == "constraints":
        return params, None, optimize.variant_constraints(prob)
    plan = optimize.solve_min_cost_control(prob)
    details = {"controlled": plan.controlled, "total_cost": plan.total_cost, "order": plan.order}
    return params, plan.purchases, details


def _run_hybrid(args, base):
    net = _network(args, base, ownership=True)
    cfg = hybrid.SimulationConfig(
        args.iterations, args.d, 0.5 if args.quota is None else args.quota, args.seed, args.pivot_rule, not args.exclude_own
    )
    if args.measure == "npi":
        res = hybrid.npi(net, cfg)
        return res.scores.parameters, res.scores.scores, {"pivot_frequency": res.pivot_frequency}
    res = hybrid.npf(net, cfg)
    details = {"ids": net.ids, "flow": res.flow, "intermediary": res.intermediary.scores}
    return res.scores.parameters, res.scores.scores, details


def _run_report(args, base):
    net = _network(args, base, ownership=True)
    cfg = report.ReportConfig(
        iterations=args.iterations,
        seed=args.seed,
        quota=0.5 if args.quota is None else args.quota,
        top_k=3 if args.top_k is None else args.top_k,
    )
    rep = report.taxonomy_report(net, cfg)
    scores = {f["family"]: f["scores"] for f in rep["families"]}
    return {"measures": cfg.measures, "iterations": cfg.iterations, "seed": cfg.seed}, scores, rep


RUNNERS = {
    "centrality": _run_centrality,
    "voting": _run_voting,
    "concentration": _run_concentration,
    "flow": _run_flow,
    "optimize": _run_optimize,
    "hybrid": _run_hybrid,
    "report": _run_report,
}


# ---------------------------------------------------------------------------
# manifest and replay


def _resolve(path: str | None, base: Path | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    if base is not None and not p.is_absolute():
        p = base / p
    return p


def _recorded_command(argv: list) -> list:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        name = tok.split("=", 1)[0]
        if name in UNRECORDED:
            skip = name == "--out" and "=" not in tok
            continue
        out.append(tok)
    return ["netpower", *out]


def _manifest(argv, args, base) -> dict:
    inputs = []
    for role in ("nodes", "graph"):
        path = getattr(args, role, None)
        if path:
            resolved = _resolve(path, base)
            try:
                digest = file_digest(resolved)
            except OSError:
                digest = None
            inputs.append({"role": role, "path": path, "sha256": digest})
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("family", "measure", "out", "timing")}
    stochastic = args.family == "hybrid" or (args.family == "report" and "hybrid" in report.DEFAULT_MEASURES)
    return {
        "command": _recorded_command(argv),
        "inputs": inputs,
        "parameters": params,
        "seed": args.seed if stochastic else None,
        "version": __version__,
        "timing": None,
    }


def execute(argv: list, base: Path | None = None) -> tuple[dict, int]:
    """Run one command; returns the result document and the exit code."""
    start = time.perf_counter()
    doc = {"manifest": {"command": ["netpower", *argv]}, "measure": None, "parameters": {}, "scores": None}
    try:
        args = build_parser().parse_args(argv)
        doc["manifest"] = _manifest(argv, args, base)
        if args.family not in FAMILIES:
            raise InvalidOption(f"unknown family {args.family!r}; expected one of {', '.join(FAMILIES)}")
        if args.measure not in FAMILIES[args.family]:
            raise InvalidOption(
                f"unknown {args.family} measure {args.measure!r}; expected one of {', '.join(FAMILIES[args.family])}"
            )
        doc["measure"] = f"{args.family}/{args.measure}"
        params, scores, details = RUNNERS[args.family](args, base)
        doc["parameters"] = params
        doc["scores"] = scores
        if details is not None:
            doc["details"] = details
        code = 0
    except NetPowerError as exc:
        doc["error"] = {"code": exc.code, "message": str(exc), "exit_code": exc.exit_code}
        code = exc.exit_code
    if "--timing" in argv:
        doc["manifest"]["timing"] = {"seconds": time.perf_counter() - start}
    return doc, code


def replay(document_path: str | Path) -> tuple[dict, int]:
    """Re-run the command recorded in a result document.

    Relative input paths are resolved against the document's directory, and
    input digests must match the recorded ones.
    """
    path = Path(document_path)
    try:
        doc = read_document(path)
    except OSError as exc:
        raise ParseError(f"cannot read document: {exc.strerror}", path=str(path)) from None
    except ValueError as exc:
        raise ParseError(f"not a result document: {exc}", path=str(path)) from None
    manifest = doc.get("manifest", doc)
    command = manifest.get("command")
    if not isinstance(command, list) or not command or command[0] != "netpower":
        raise ValidationError("document has no recorded netpower command")
    base = path.parent
    for entry in manifest.get("inputs", []):
        p = _resolve(entry["path"], base)
        if entry.get("sha256") is not None:
            try:
                now = file_digest(p)
            except OSError:
                raise InputMismatch(f"input {entry['path']} is missing") from None
            if now != entry["sha256"]:
                raise InputMismatch(f"input {entry['path']} changed since the run was recorded")
    return execute(command[1:], base)


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = None
    if "--out" in argv:
        i = argv.index("--out")
        out = argv[i + 1] if i + 1 < len(argv) else None
    if argv[:1] == ["replay"]:
        if len(argv) < 2:
            print("usage: netpower replay DOCUMENT [--out PATH]", file=sys.stderr)
            return 1
        try:
            doc, code = replay(argv[1])
        except NetPowerError as exc:
            print(f"error: {exc.code}: {exc}", file=sys.stderr)
            return exc.exit_code
    else:
        if any(a in ("-h", "--help", "--version") for a in argv):
            build_parser().parse_args(argv)  # prints and exits 0
        doc, code = execute(argv)
    text = write_document(doc, out)
    if out is None:
        sys.stdout.write(text)
    if code:
        err = doc["error"]
        print(f"error: {err['code']}: {err['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
