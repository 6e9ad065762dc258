"""Side-by-side comparison of one representative measure per family."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import centrality, concentration, flow, hybrid, optimize, voting
from .errors import NetPowerError, TooLarge
from .graph import Network, ScoreVector, shareholders_of

# Qualitative ratings per method group: (ultimate controllers, intermediary power, family)
RATINGS = {
    "degree/eigenvector/closeness": ("Poor", "Poor", "centrality"),
    "betweenness/flow-betweenness": ("Fair", "Good", "centrality"),
    "pagerank": ("Fair", "Good", "flow"),
    "katz/alpha-icon": ("Excellent", "Fair", "flow"),
    "ss/banzhaf/johnston": ("Fair (single firm)", "Poor", "voting"),
    "phi/pi/pi-prime": ("Good", "Fair", "voting"),
    "hhi/top-k": ("Good", "Poor", "concentration"),
    "ncv/nncv": ("Good", "Fair", "flow"),
    "npi": ("Excellent", "Fair", "hybrid"),
    "npf": ("Good", "Excellent", "hybrid"),
    "ic/ccp": ("Good", "Good", "optimize"),
}

DEFAULT_MEASURES = {
    "centrality": "betweenness",
    "flow": "katz",
    "voting": "pi",
    "concentration": "ultimate-control",
    "hybrid": "npi",
    "optimize": "ic",
}

RATING_OF_MEASURE = {
    "degree": "degree/eigenvector/closeness",
    "eigenvector": "degree/eigenvector/closeness",
    "closeness": "degree/eigenvector/closeness",
    "betweenness": "betweenness/flow-betweenness",
    "flow-betweenness": "betweenness/flow-betweenness",
    "pagerank": "pagerank",
    "katz": "katz/alpha-icon",
    "ncv": "ncv/nncv",
    "nncv": "ncv/nncv",
    "phi": "phi/pi/pi-prime",
    "pi": "phi/pi/pi-prime",
    "pi-prime": "phi/pi/pi-prime",
    "ultimate-control": "hhi/top-k",
    "npi": "npi",
    "npf": "npf",
    "ic": "ic/ccp",
    "ccp": "ic/ccp",
}

UC_CAPABLE = {"Good", "Excellent"}
OPTIMIZE_LIMIT = 12


@dataclass
class ReportConfig:
    measures: dict = field(default_factory=lambda: dict(DEFAULT_MEASURES))
    iterations: int = 2000
    seed: int = 0
    quota: float = 0.5
    top_k: int = 3


def _zeros(net: Network, name: str) -> ScoreVector:
    return ScoreVector(name, net.ids, np.zeros(net.n))


def _from_profile(net: Network, prof: voting.PowerProfile, name: str) -> ScoreVector:
    vals = dict(zip(prof.players, prof.values))
    return ScoreVector(name, net.ids, np.array([float(vals.get(i, 0.0)) for i in net.ids]))


def _score(net: Network, family: str, measure: str, cfg: ReportConfig) -> ScoreVector:
    if family == "centrality":
        return centrality.MEASURES[measure](net)
    if family == "flow":
        if measure == "katz":
            return flow.katz_influence(net).scores
        return {"ncv": flow.ncv, "nncv": flow.nncv, "pagerank": flow.pagerank}[measure](net)
    if family == "voting":
        cs = voting.ControlStructure(net, cfg.quota)
        if measure == "phi":
            return _from_profile(net, voting.karos_peters_phi(cs), "phi")
        variant = "pi" if measure == "pi" else "pi_prime"
        return _from_profile(net, voting.mercik_lobos_pi(cs, variant), measure)
    if family == "concentration":
        uc = concentration.ultimate_control(net)
        counts = {i: 0 for i in net.ids}
        for node, owner in uc.owners.items():
            if owner != node:
                counts[owner] += 1
        return ScoreVector("ultimate-control", net.ids, np.array([counts[i] for i in net.ids], dtype=float))
    if family == "hybrid":
        # own endowments are left out so the column ranks what a node controls
        sim = hybrid.SimulationConfig(cfg.iterations, quota=cfg.quota, seed=cfg.seed, own_endowments=False)
        if measure == "npf":
            return hybrid.npf(net, sim).intermediary
        return hybrid.npi(net, sim).scores
    if family == "optimize":
        return _optimize_usage(net, measure, cfg)
    raise ValueError(family)


def _optimize_usage(net: Network, variant: str, cfg: ReportConfig) -> ScoreVector:
    """How often each node is brought under control in the cheapest plan for a single firm."""
    if net.n > OPTIMIZE_LIMIT + 1:
        raise TooLarge(f"optimization section is limited to {OPTIMIZE_LIMIT + 1} nodes")
    used = np.zeros(net.n)
    for t in net.ids:
        if net.node(t).kind != "firm":
            continue
        prob = optimize.AcquisitionProblem(net, (t,), cfg.quota, 1.0, variant)
        try:
            plan = optimize.solve_min_cost_control(prob)
        except NetPowerError:
            continue
        for k, i in enumerate(net.ids):
            if i != t and plan.controlled[i]:
                used[k] += 1
    return ScoreVector(variant, net.ids, used)


def _top_person(net: Network, sv: ScoreVector) -> str | None:
    persons = [i for i in sv.ranking() if net.node(i).kind == "person"]
    pool = persons or sv.ranking()
    if not pool or not np.any(sv.values):
        return None
    return pool[0]


def taxonomy_report(net: Network, config: ReportConfig | None = None) -> dict:
    """One representative per family, rankings side by side and their rank correlations.

    Families that cannot be evaluated on ``net`` are reported as all zeros
    with a warning instead of failing the whole report.
    """
    cfg = config or ReportConfig()
    warnings = []
    if not net.edges:
        warnings.append("network has no edges; every section is zero")
    profiles: dict[str, ScoreVector] = {}
    for family, measure in cfg.measures.items():
        try:
            profiles[family] = _score(net, family, measure, cfg)
        except NetPowerError as exc:
            warnings.append(f"{family}/{measure}: {exc.code}: {exc}")
            profiles[family] = _zeros(net, measure)

    uc = None
    try:
        uc = concentration.ultimate_control(net)
    except NetPowerError as exc:
        warnings.append(f"ultimate control: {exc.code}: {exc}")

    families = []
    for family, sv in profiles.items():
        measure = cfg.measures[family]
        rating = RATINGS.get(RATING_OF_MEASURE.get(measure, ""), ("n/a", "n/a", family))
        families.append(
            {
                "family": family,
                "measure": measure,
                "scores": sv.scores,
                "ranking": sv.ranking(),
                "uc_rating": rating[0],
                "ip_rating": rating[1],
                "uc_capable": rating[0] in UC_CAPABLE,
                "top_controller": _top_person(net, sv),
            }
        )

    pairs = []
    for a, b in combinations(profiles, 2):
        cmp = hybrid.compare_profiles(profiles[a], profiles[b], cfg.top_k)
        pairs.append({"a": a, "b": b, "spearman": cmp.spearman, "top_k_overlap": cmp.top_k_overlap})

    firm_hhi = {}
    for j in net.ids if net.ownership else ():
        if shareholders_of(net, j):
            firm_hhi[j] = float(concentration.hhi(concentration.distribution_from_shareholders(net, j)))

    return {
        "families": families,
        "correlations": pairs,
        "ultimate_owners": dict(uc.owners) if uc else {},
        "shareholder_hhi": firm_hhi,
        "ratings": {k: {"uc": v[0], "ip": v[1], "family": v[2]} for k, v in RATINGS.items()},
        "warnings": warnings,
    }
