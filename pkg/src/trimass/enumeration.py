"""Exhaustive enumeration of three-reaction quadratic trimolecular networks.

For each species count n the scan generates every unordered triple of
distinct reactions (bimolecular sources, trimolecular targets) in which all
n species appear somewhere, and reports the networks admitting a periodic
orbit for some rate constants.

Only rank-two networks with a strictly positive kernel vector can be
positive, so the scan is factored through stoichiometric columns: reactions
are grouped by their net-change vector, column triples are filtered exactly
(rank two plus one-signed kernel, both integer arithmetic), and only the
surviving groups are expanded to reaction triples, deduplicated by canonical
form and classified.  Everything else counts as Never without being
materialized.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .classify import Admits, PeriodicVerdict, classify_trimolecular, classify_trimolecular_slow
from .network import ReactionNetwork, canonical_reaction_key, network_from_reactions

Reaction = Tuple[Tuple[int, ...], Tuple[int, ...]]


def complexes(n: int, max_molecularity: int) -> List[Tuple[int, ...]]:
    """All coefficient vectors over n species with molecularity <= bound."""
    out: List[Tuple[int, ...]] = []

    def rec(prefix: List[int], remaining: int, idx: int) -> None:
        if idx == n:
            out.append(tuple(prefix))
            return
        for v in range(remaining + 1):
            prefix.append(v)
            rec(prefix, remaining - v, idx + 1)
            prefix.pop()

    rec([], max_molecularity, 0)
    return out


def all_reactions(n: int, max_source: int = 2, max_target: int = 3) -> List[Reaction]:
    sources = complexes(n, max_source)
    targets = complexes(n, max_target)
    return [(s, t) for s in sources for t in targets if s != t]


@dataclass
class SpeciesCountScan:
    n: int
    num_reactions: int
    raw_triples: int                      # C(R, 3): distinct-reaction triples
    column_triples: int                   # rank-2, one-signed-kernel column sets
    candidate_triples: int                # expanded reaction triples
    covering_triples: int                 # ... in which all n species appear
    distinct_networks: int                # after canonical dedup
    oscillatory: List[Tuple] = field(default_factory=list)   # canonical keys


@dataclass
class EnumerationReport:
    n_max: int
    scans: List[SpeciesCountScan]
    networks: List[ReactionNetwork]       # ForSomeKappa, deterministic order
    verdicts: List[PeriodicVerdict]

    @property
    def total_oscillatory(self) -> int:
        return len(self.networks)

    def to_json_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "per_species_count": [
                {
                    "n": s.n,
                    "reactions": s.num_reactions,
                    "raw_triples": s.raw_triples,
                    "column_triples": s.column_triples,
                    "candidate_triples": s.candidate_triples,
                    "covering_triples": s.covering_triples,
                    "distinct_networks": s.distinct_networks,
                    "oscillatory": len(s.oscillatory),
                }
                for s in self.scans
            ],
            "total_oscillatory": self.total_oscillatory,
            "networks": [
                {
                    "reactions": net.render(),
                    "species": list(net.species),
                    "family": verdict.matched_family.name.value,
                    "parameters": dict(verdict.matched_family.parameters),
                    "kappa_condition": verdict.kappa_condition,
                }
                for net, verdict in zip(self.networks, self.verdicts)
            ],
        }


def _column_triples(cols: np.ndarray) -> List[Tuple[int, int, int]]:
    """Index triples (a < b < c) whose columns have rank two and a kernel
    vector with all components of one strict sign.  Exact integer tests."""
    C, n = cols.shape
    out: List[Tuple[int, int, int]] = []
    for a in range(C):
        ga = cols[a]
        for b in range(a + 1, C):
            gb = cols[b]
            pq = None
            for p in range(n):
                for q in range(p + 1, n):
                    D = int(ga[p]) * int(gb[q]) - int(ga[q]) * int(gb[p])
                    if D != 0:
                        pq = (p, q, D)
                        break
                if pq:
                    break
            if pq is None:
                continue  # columns proportional: no one-signed kernel
            p, q, D = pq
            rest = cols[b + 1:]
            if len(rest) == 0:
                continue
            # kernel of [ga gb gc] from rows (p, q): u = (-ah, -bh, D)
            ah = rest[:, p] * gb[q] - rest[:, q] * gb[p]
            bh = ga[p] * rest[:, q] - ga[q] * rest[:, p]
            mask = (ah < 0) & (bh < 0) if D > 0 else (ah > 0) & (bh > 0)
            if not mask.any():
                continue
            idxs = np.nonzero(mask)[0]
            ok = np.ones(len(idxs), dtype=bool)
            for r in range(n):
                if r == p or r == q:
                    continue
                ok &= D * rest[idxs, r] == ah[idxs] * ga[r] + bh[idxs] * gb[r]
            for ci in idxs[ok]:
                out.append((a, b, b + 1 + int(ci)))
    return out


def _scan_chunk(args) -> Tuple[int, int, Dict[Tuple, None]]:
    """Expand a chunk of column triples to covering reaction triples and
    canonicalize them.  Returns (candidates, covering, canonical keys)."""
    triples, groups, reactions, masks, full, n = args
    seen: Dict[Tuple, None] = {}
    candidates = 0
    covering = 0
    for (a, b, c) in triples:
        la, lb, lc = groups[a], groups[b], groups[c]
        candidates += len(la) * len(lb) * len(lc)
        ma = masks[la][:, None, None]
        mb = masks[lb][None, :, None]
        mc = masks[lc][None, None, :]
        cov = (ma | mb | mc) == full
        for ia, ib, ic in zip(*np.nonzero(cov)):
            covering += 1
            rxs = (reactions[la[ia]], reactions[lb[ib]], reactions[lc[ic]])
            seen.setdefault(canonical_reaction_key(rxs, n))
    return candidates, covering, seen


def scan_species_count(n: int, workers: int = 1) -> Tuple[SpeciesCountScan, Dict[Tuple, None]]:
    """Column-factored scan for a fixed species count with exact coverage."""
    reactions = all_reactions(n)
    R = len(reactions)
    full = (1 << n) - 1
    masks = np.zeros(R, dtype=np.int64)
    col_index: Dict[Tuple[int, ...], int] = {}
    groups: List[List[int]] = []
    col_list: List[Tuple[int, ...]] = []
    for ridx, (s, t) in enumerate(reactions):
        m = 0
        for i in range(n):
            if s[i] or t[i]:
                m |= 1 << i
        masks[ridx] = m
        g = tuple(t[i] - s[i] for i in range(n))
        if g not in col_index:
            col_index[g] = len(col_list)
            col_list.append(g)
            groups.append([])
        groups[col_index[g]].append(ridx)
    cols = np.array(col_list, dtype=np.int64)
    triples = _column_triples(cols)

    if workers > 1 and len(triples) > workers:
        chunk = math.ceil(len(triples) / workers)
        parts = [triples[i:i + chunk] for i in range(0, len(triples), chunk)]
        with Pool(workers) as pool:
            results = pool.map(
                _scan_chunk,
                [(part, groups, reactions, masks, full, n) for part in parts],
            )
    else:
        results = [_scan_chunk((triples, groups, reactions, masks, full, n))]

    candidates = sum(r[0] for r in results)
    covering = sum(r[1] for r in results)
    seen: Dict[Tuple, None] = {}
    for _, _, part in results:
        seen.update(part)
    scan = SpeciesCountScan(
        n=n,
        num_reactions=R,
        raw_triples=math.comb(R, 3),
        column_triples=len(triples),
        candidate_triples=candidates,
        covering_triples=covering,
        distinct_networks=len(seen),
    )
    return scan, seen


def enumerate_trimolecular(
    n_max: int,
    workers: int = 1,
    check_slow_path: bool = False,
) -> EnumerationReport:
    """Classify every three-reaction quadratic trimolecular network on up to
    n_max species (each species appearing in some complex), after exact
    canonical-form deduplication.

    With check_slow_path the lemma-dispatch classifier is run on every
    distinct network and any disagreement with the template route raises.
    """
    if not 2 <= n_max <= 5:
        raise ValueError("n_max must be between 2 and 5")
    scans: List[SpeciesCountScan] = []
    hits: List[ReactionNetwork] = []
    verdicts: List[PeriodicVerdict] = []
    for n in range(1, n_max + 1):
        scan, seen = scan_species_count(n, workers=workers)
        for key in sorted(seen):
            net = network_from_reactions([(s, tuple(si + ci for si, ci in zip(s, c))) for (s, c) in key])
            verdict = classify_trimolecular(net)
            if check_slow_path:
                slow = classify_trimolecular_slow(net)
                if slow.admits_periodic != verdict.admits_periodic:
                    raise AssertionError(f"classifier routes disagree on {net.render()}")
            if verdict.admits_periodic == Admits.FOR_SOME_KAPPA:
                scan.oscillatory.append(key)
                hits.append(net)
                verdicts.append(verdict)
        scans.append(scan)
    return EnumerationReport(n_max=n_max, scans=scans, networks=hits, verdicts=verdicts)
