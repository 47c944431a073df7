"""N-party planning: spanning tree, 3-party segments, rates, reconciliation.

A group of N parties is linked by a minimum-total-length spanning tree.
The tree is decomposed into segments of three consecutive parties (plus at
most one two-party segment when N is even); adjacent segments overlap in
exactly one shared party, every party belongs to at least one segment, and
for odd N the segment count n satisfies 2n + 1 = N.  Each segment runs the
three-party protocol on its two links; shared parties then chain the
per-segment keys into one group key by public XOR announcements.

Segmentation uses a deepest-leaf-first greedy ordering with backtracking,
so it is deterministic and always returns a valid decomposition when one
exists (guaranteed on trees of practical key-agreement size; the search is
exact, so pathological shapes cost time, not correctness).
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import PlanningError, UsageError, ValidationError
from .keyrate import (
    ChannelParams,
    asymptotic_rate,
    dw_rate_closed,
    optimize_intensity,
    sift_probability,
    transmittance_from_distance,
)


def _id_key(party):
    """Deterministic sort key for party ids of mixed types."""
    if isinstance(party, bool):
        return (1, str(party))
    if isinstance(party, (int, float)):
        return (0, float(party), "")
    return (1, 0.0, str(party))


@dataclass(frozen=True)
class Segment:
    """One protocol instance: (end, center, end), or a degenerate pair.

    members are stored in path order, so members[1] is the center for
    3-party segments.  arm_distances holds the party-to-party distance of
    each link in km (two links for a triple, one for a pair).
    """

    members: tuple
    center: object
    arm_distances: tuple

    @property
    def is_pair(self) -> bool:
        return len(self.members) == 2


@dataclass(frozen=True)
class NetworkPlan:
    tree_edges: tuple
    segments: tuple
    intra_announcers: tuple  # segment centers, one per segment
    inter_announcers: tuple  # parties shared between segments
    bottleneck_distance: float
    per_segment_rate: tuple
    network_rate: float


@dataclass(frozen=True)
class PartyGraph:
    """Parties with optional planar coordinates and optional explicit edges."""

    parties: tuple
    coordinates: dict
    edges: tuple  # (a, b, km)

    @classmethod
    def build(cls, parties, edges=None) -> "PartyGraph":
        """parties: ids, or (id, x, y) triples; edges: (a, b, km) or None.

        Without explicit edges, every pair of parties is connected at its
        Euclidean distance, which requires coordinates for everyone.
        """
        ids = []
        coords = {}
        for p in parties:
            if isinstance(p, (tuple, list)):
                pid, x, y = p
                coords[pid] = (float(x), float(y))
            else:
                pid = p
            if pid in ids:
                raise ValidationError(f"duplicate party id {pid!r}")
            ids.append(pid)
        if len(ids) < 2:
            raise ValidationError("a network needs at least two parties")
        if edges is None:
            missing = [p for p in ids if p not in coords]
            if missing:
                raise ValidationError(
                    f"parties without coordinates need explicit edges: {missing}"
                )
            edges = [
                (a, b, math.dist(coords[a], coords[b]))
                for a, b in combinations(ids, 2)
            ]
        known = set(ids)
        clean = []
        for a, b, km in edges:
            if a not in known or b not in known:
                raise ValidationError(f"edge ({a!r}, {b!r}) references unknown party")
            if a == b:
                raise ValidationError(f"self-loop on party {a!r}")
            if km <= 0:
                raise ValidationError(f"edge ({a!r}, {b!r}) must have distance > 0, got {km!r}")
            clean.append((a, b, float(km)))
        return cls(parties=tuple(ids), coordinates=coords, edges=tuple(clean))

    @classmethod
    def from_json(cls, text: str) -> "PartyGraph":
        """Parse {"parties": [{"id", "x"?, "y"?}, ...], "edges"?: [{"a","b","km"}]}."""
        doc = json.loads(text)
        if "parties" not in doc:
            raise ValidationError('network document needs a "parties" list')
        parties = []
        for entry in doc["parties"]:
            if isinstance(entry, dict):
                if "id" not in entry:
                    raise ValidationError(f"party entry missing id: {entry!r}")
                if "x" in entry and "y" in entry:
                    parties.append((entry["id"], entry["x"], entry["y"]))
                else:
                    parties.append(entry["id"])
            else:
                parties.append(entry)
        edges = None
        if "edges" in doc and doc["edges"] is not None:
            edges = [(e["a"], e["b"], e["km"]) for e in doc["edges"]]
        return cls.build(parties, edges)


def minimum_network(graph: PartyGraph) -> list:
    """Minimum-total-length spanning tree edges, via Kruskal.

    Ties are broken by (distance, smaller id pair) so the result is
    deterministic.  Raises PlanningError listing the components when the
    graph is disconnected.
    """
    edges = []
    for a, b, km in graph.edges:
        lo, hi = sorted((a, b), key=_id_key)
        edges.append((km, lo, hi))
    edges.sort(key=lambda e: (e[0], _id_key(e[1]), _id_key(e[2])))

    parent = {p: p for p in graph.parties}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for km, a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            tree.append((a, b, km))
    if len(tree) != len(graph.parties) - 1:
        comps = {}
        for p in graph.parties:
            comps.setdefault(find(p), []).append(p)
        groups = sorted(
            (sorted(c, key=_id_key) for c in comps.values()),
            key=lambda c: _id_key(c[0]),
        )
        raise PlanningError(f"graph is disconnected; components: {groups}")
    return tree


def _tree_maps(tree_edges):
    adj = {}
    dist = {}
    for a, b, km in tree_edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
        dist[(a, b)] = dist[(b, a)] = float(km)
    return adj, dist


def _sharing_connected(member_sets) -> bool:
    n = len(member_sets)
    if n <= 1:
        return True
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if j not in seen and member_sets[i] & member_sets[j]:
                seen.add(j)
                queue.append(j)
    return len(seen) == n


def segment_tree(tree_edges) -> list:
    """Decompose a spanning tree into overlapping 3-party segments.

    Returns Segments in discovery order.  Every vertex is covered, each
    triple is a 3-vertex path in the tree, two segments never share more
    than one vertex, the segment-sharing graph is connected, and the
    counts are exact: (N-1)/2 triples for odd N, (N-2)/2 triples plus one
    pair for even N.
    """
    adj, dist = _tree_maps(tree_edges)
    nodes = sorted(adj, key=_id_key)
    n_nodes = len(nodes)
    if n_nodes < 2:
        raise PlanningError("need at least two parties to form a segment")
    if len(tree_edges) != n_nodes - 1:
        raise PlanningError(f"expected a tree, got {len(tree_edges)} edges over {n_nodes} vertices")

    if n_nodes == 2:
        a, b = nodes
        return [Segment(members=(a, b), center=a, arm_distances=(dist[(a, b)],))]

    # BFS depths from the smallest id; deepest uncovered vertices are
    # settled first so segments grow from the leaves inward.
    root = nodes[0]
    depth = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in depth:
                depth[w] = depth[v] + 1
                queue.append(w)

    triple_target = (n_nodes - 1) // 2 if n_nodes % 2 else (n_nodes - 2) // 2
    pair_target = 0 if n_nodes % 2 else 1

    # Every 3-vertex path and edge of the tree, in deterministic order;
    # used as bridge candidates once everything is covered.
    all_triples = []
    for w in nodes:
        for a, b in combinations(sorted(adj[w], key=_id_key), 2):
            all_triples.append((a, w, b))
    all_triples.sort(
        key=lambda t: (tuple(_id_key(v) for v in sorted(t, key=_id_key)), _id_key(t[1]))
    )
    all_pairs = sorted(
        (tuple(sorted((a, b), key=_id_key)) for a, b, _km in tree_edges),
        key=lambda p: (_id_key(p[0]), _id_key(p[1])),
    )

    segments = []  # (members_in_path_order, member_set)
    covered = set()

    def shares_ok(member_set):
        return all(len(member_set & s) <= 1 for _, s in segments)

    def sharing_components():
        label = list(range(len(segments)))

        def find(i):
            while label[i] != i:
                label[i] = label[label[i]]
                i = label[i]
            return i

        for i in range(len(segments)):
            for j in range(i + 1, len(segments)):
                if segments[i][1] & segments[j][1]:
                    label[find(i)] = find(j)
        return [find(i) for i in range(len(segments))]

    def place_bridges():
        """All parties covered; add zero-coverage segments until the counts
        are exact and the sharing graph is connected.

        With exact counts the total overlap is pinned at (segments - 1), so
        any usable bridge must merge at least two sharing components."""
        triples = sum(1 for m, _ in segments if len(m) == 3)
        pairs = len(segments) - triples
        if triples == triple_target and pairs == pair_target:
            if _sharing_connected([s for _, s in segments]):
                return [m for m, _ in segments]
            return None
        cands = []
        if triples < triple_target:
            cands.extend((t, 3) for t in all_triples)
        if pairs < pair_target:
            cands.extend((p, 2) for p in all_pairs)
        labels = sharing_components()
        for members, _size in cands:
            member_set = set(members)
            if not shares_ok(member_set):
                continue
            touched = {
                labels[i] for i, (_, s) in enumerate(segments) if member_set & s
            }
            if len(touched) < 2:
                continue
            segments.append((members, member_set))
            result = place_bridges()
            if result is not None:
                return result
            segments.pop()
        return None

    def solve():
        uncovered = [v for v in nodes if v not in covered]
        if not uncovered:
            return place_bridges()
        u = min(uncovered, key=lambda v: (-depth[v], _id_key(v)))

        neighbors = sorted(adj[u], key=_id_key)
        cands = []
        for a, b in combinations(neighbors, 2):
            cands.append((a, u, b))
        for w in neighbors:
            for z in sorted(adj[w], key=_id_key):
                if z != u:
                    cands.append((u, w, z))
        ideal = 3 if not segments else 2
        cands.sort(
            key=lambda t: (
                abs(len(set(t) - covered) - ideal),
                tuple(_id_key(v) for v in sorted(t, key=_id_key)),
                _id_key(t[1]),
            )
        )

        triples = sum(1 for m, _ in segments if len(m) == 3)
        pairs = len(segments) - triples
        trials = [(t, 3) for t in cands]
        if pairs < pair_target:
            trials.extend(((u, w), 2) for w in neighbors)

        for members, size in trials:
            if size == 3 and triples >= triple_target:
                continue
            member_set = set(members)
            if not shares_ok(member_set):
                continue
            segments.append((members, member_set))
            newly = member_set - covered
            covered.update(newly)
            result = solve()
            if result is not None:
                return result
            covered.difference_update(newly)
            segments.pop()
        return None

    plan = solve()
    if plan is None:
        raise PlanningError(
            f"no valid segment decomposition found for this {n_nodes}-vertex tree"
        )

    out = []
    for idx, members in enumerate(plan):
        if len(members) == 3:
            a, c, b = members
            if _id_key(b) < _id_key(a):
                a, b = b, a
            out.append(
                Segment(
                    members=(a, c, b),
                    center=c,
                    arm_distances=(dist[(a, c)], dist[(c, b)]),
                )
            )
        else:
            a, b = sorted(members, key=_id_key)
            others = [set(m) for j, m in enumerate(plan) if j != idx]
            shared = sorted(
                (v for v in members if any(v in o for o in others)), key=_id_key
            )
            center = shared[0] if shared else min(members, key=_id_key)
            out.append(
                Segment(members=(a, b), center=center, arm_distances=(dist[(a, b)],))
            )
    return out


def _link_mu(eta: float, mu_policy) -> float:
    if isinstance(mu_policy, (int, float)):
        return float(mu_policy)
    mu_star, _ = optimize_intensity(eta, mu_policy)
    return mu_star


def segment_rate(segment: Segment, mu_policy, delta_ec: float = 0.0) -> float:
    """Bits per pulse for one segment under the loss-only analysis.

    mu_policy is either a fixed intensity used on every link or a grid of
    candidate intensities optimized per link.
    """
    etas = [transmittance_from_distance(d) for d in segment.arm_distances]
    mus = [_link_mu(eta, mu_policy) for eta in etas]
    if segment.is_pair:
        return sift_probability(mus[0], etas[0]) * dw_rate_closed(mus[0], etas[0], delta_ec)
    params = ChannelParams(mu1=mus[0], mu2=mus[1], eta1=etas[0], eta2=etas[1])
    return asymptotic_rate(params, delta_ec).r_infinity


def plan_rates(segments, mu_policy=0.2, delta_ec: float = 0.0, tree_edges=()) -> NetworkPlan:
    """Predict per-segment and network rates; the network runs at the min.

    The bottleneck distance is the longest link of the rate-limiting
    segment (the nearest-neighbor hop the whole network waits for).
    """
    segments = list(segments)
    if not segments:
        raise UsageError("plan_rates needs at least one segment")
    rates = [segment_rate(s, mu_policy, delta_ec) for s in segments]
    worst = min(range(len(segments)), key=lambda i: rates[i])
    membership = {}
    for seg in segments:
        for p in seg.members:
            membership[p] = membership.get(p, 0) + 1
    shared = tuple(sorted((p for p, k in membership.items() if k > 1), key=_id_key))
    return NetworkPlan(
        tree_edges=tuple(tree_edges),
        segments=tuple(segments),
        intra_announcers=tuple(s.center for s in segments),
        inter_announcers=shared,
        bottleneck_distance=max(segments[worst].arm_distances),
        per_segment_rate=tuple(rates),
        network_rate=rates[worst],
    )


def plan_network(graph: PartyGraph, mu_policy=0.2, delta_ec: float = 0.0) -> NetworkPlan:
    """Full pipeline: spanning tree, segmentation, per-segment rates."""
    tree = minimum_network(graph)
    segments = segment_tree(tree)
    return plan_rates(segments, mu_policy, delta_ec, tree_edges=tree)


# --- key reconciliation across segments -------------------------------------


def _segment_adjacency_tree(plan: NetworkPlan):
    """BFS tree over segments (nodes) connected by shared parties."""
    sets = [set(s.members) for s in plan.segments]
    n = len(sets)
    parent = {0: None}
    order = [0]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if j not in parent and sets[i] & sets[j]:
                parent[j] = i
                order.append(j)
                queue.append(j)
    if len(order) != n:
        raise PlanningError("segments do not chain into one connected group")
    return parent, order


def reconcile_network(segment_keys, plan: NetworkPlan):
    """Chain per-segment keys into one group key via public XOR announcements.

    All keys are truncated to the shortest; each announcement is the XOR of
    a parent segment's key with a child segment's key along the segment
    adjacency tree rooted at segment 0.  Returns (global_key, announcements)
    where each announcement is (parent_index, child_index, xor_bits).  The
    group key is segment 0's truncated key; every other segment recovers it
    by XOR-ing its own key with the announcements on its path to the root.
    """
    keys = [np.asarray(k, dtype=np.uint8) for k in segment_keys]
    if not keys:
        raise UsageError("reconcile_network needs at least one segment key")
    if len(keys) != len(plan.segments):
        raise ValidationError(
            f"got {len(keys)} keys for {len(plan.segments)} segments"
        )
    n_bits = min(len(k) for k in keys)
    keys = [k[:n_bits] for k in keys]
    parent, order = _segment_adjacency_tree(plan)
    announcements = [
        (parent[j], j, keys[parent[j]] ^ keys[j]) for j in order if parent[j] is not None
    ]
    return keys[0], announcements


def derive_global_key(plan: NetworkPlan, announcements, segment_index: int, segment_key):
    """Recover the group key from one segment's own key plus the announcements."""
    parent = {child: (par, bits) for par, child, bits in announcements}
    if announcements:
        n_bits = len(announcements[0][2])
    else:
        n_bits = len(segment_key)
    key = np.asarray(segment_key, dtype=np.uint8)[:n_bits]
    seg = segment_index
    while seg != 0:
        if seg not in parent:
            raise ValidationError(f"segment {seg} is not linked by any announcement")
        par, bits = parent[seg]
        key = key ^ bits
        seg = par
    return key
