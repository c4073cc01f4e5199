"""Constructive partition procedures: planted instances, random slicing,
refinement, vertex-class equalization, exact-refinement reconstruction, and
controlled perturbation.

Every choice that a proof leaves arbitrary is made deterministic here:
lowest-index-first for vertex redistribution and label rerouting, sorted
iteration plus seed substreams for the randomized steps, so identical
inputs give bit-identical outputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .addresses import address_space
from .errors import ConstructionError, InputError
from .hypergraph import KGraph
from .partitions import PartitionFamily
from .regularity import RegularityInstance, check_regular_sampled
from .rng import substream


# ---------------------------------------------------------------------------
# planted instances

@dataclass(frozen=True)
class PlantSpec:
    instance: RegularityInstance
    n: int
    seed: int
    measure_epsilon: bool = False
    trials: int = 20

    def __post_init__(self):
        if self.n < self.instance.a[0] * self.instance.k:
            raise InputError(
                f"n={self.n} below a1*k={self.instance.a[0] * self.instance.k}"
            )


def _equipartition(n: int, parts: int):
    """Consecutive-id classes with sizes floor(n/parts) or +1."""
    base, extra = divmod(n, parts)
    out = []
    start = 0
    for i in range(parts):
        size = base + (1 if i < extra else 0)
        out.append(frozenset(range(start, start + size)))
        start += size
    return tuple(out)


def plant(spec: PlantSpec):
    """Generate (H, F, achieved epsilon-hat) satisfying the instance by
    construction: uniform class labels per polyad, independent d(x)-biased
    edges per top-level polyad."""
    R = spec.instance
    k, a, n = R.k, R.a, spec.n
    vcs = _equipartition(n, a[0])
    level_classes = {}
    for j in range(2, k):
        partial = PartitionFamily(k, n, a, vcs, level_classes)
        level_classes[j] = {}
        for x in address_space(j, j - 1, a):
            pk = sorted(partial.polyad_cliques(x, j))
            if not pk:
                continue
            rng = substream(spec.seed, "label", j, x.encode())
            buckets = {b: set() for b in range(1, a[j - 1] + 1)}
            for L in pk:
                buckets[rng.randrange(a[j - 1]) + 1].add(L)
            for b, edges in buckets.items():
                level_classes[j][(x, b)] = frozenset(edges)
    F = PartitionFamily(k, n, a, vcs, level_classes)

    edges = set()
    top_addresses = address_space(k, k - 1, a)
    for x in top_addresses:
        d = R.d(x)
        pk = sorted(F.polyad_cliques(x, k))
        rng = substream(spec.seed, "edge", x.encode())
        for L in pk:
            if rng.random() < d:
                edges.add(L)
    H = KGraph(k, n, frozenset(edges))

    eps_hat = None
    if spec.measure_epsilon:
        eps_hat = Fraction(0)
        for x in top_addresses:
            v = check_regular_sampled(
                H, F.polyad(x), R.epsilon, R.d(x), spec.trials,
                substream(spec.seed, "measure", x.encode()).randrange(2**63),
            )
            if v.worst_witness:
                eps_hat = max(eps_hat, v.worst_witness[1])
    return H, F, eps_hat


# ---------------------------------------------------------------------------
# slicing

def _assign_classes(items, probs, rng):
    """Independent assignment to classes 1..s with the given probabilities;
    class 0 collects the remainder."""
    cuts = []
    acc = Fraction(0)
    for p in probs:
        acc += Fraction(p)
        cuts.append(acc)
    buckets = {i: set() for i in range(len(probs) + 1)}
    for it in items:
        u = rng.random()
        for i, c in enumerate(cuts, start=1):
            if u < c:
                buckets[i].add(it)
                break
        else:
            buckets[0].add(it)
    return buckets


def slice(Hk: KGraph, Hk1, d, eps, probs, seed, *,
          recheck=True, trials=40, retry_cap=5):
    """Random partition of H^(k) into classes of relative densities p_i·d.

    Each class i >= 1 is re-verified (3*eps, p_i*d)-regular by the sampled
    checker; failures retry with fresh substreams up to retry_cap.
    Returns the list [class_0, class_1, ..., class_s].
    """
    probs = [Fraction(p) for p in probs]
    if any(p < 0 for p in probs) or sum(probs) > 1:
        raise InputError(f"probabilities {probs} are not sub-stochastic")
    d, eps = Fraction(d), Fraction(eps)
    base = sorted(Hk.edges)
    last_fail = None
    for attempt in range(retry_cap):
        rng = substream(seed, "slice", attempt)
        buckets = _assign_classes(base, probs, rng)
        classes = [
            KGraph(Hk.k, Hk.n, frozenset(buckets[i]))
            for i in range(len(probs) + 1)
        ]
        if not recheck:
            return classes
        ok = True
        for i, p in enumerate(probs, start=1):
            v = check_regular_sampled(
                classes[i], Hk1, 3 * eps, p * d, trials,
                substream(seed, "recheck", attempt, i).randrange(2**63),
            )
            if not v.regular:
                ok, last_fail = False, i
                break
        if ok:
            return classes
    raise ConstructionError(
        "slicing", f"class {last_fail} failed (3eps, p*d)-regularity "
        f"after {retry_cap} attempts"
    )


# ---------------------------------------------------------------------------
# refinement

def refine_family(F: PartitionFamily, b, seed) -> PartitionFamily:
    """Refine F to the finer shape b (componentwise divisible by F.a):
    vertex classes split by ascending id; each level class is split into
    equal-probability parts inside each new polyad, keeping label blocks so
    the output refines F exactly."""
    b = tuple(int(x) for x in b)
    if len(b) != len(F.a) or any(bi % ai for ai, bi in zip(F.a, b)):
        raise InputError(f"shape {b} is not componentwise divisible by {F.a}")
    k, n = F.k, F.n
    r1 = b[0] // F.a[0]
    vcs = []
    for c in F.vertex_classes:
        ids = sorted(c)
        base, extra = divmod(len(ids), r1)
        start = 0
        for t in range(r1):
            size = base + (1 if t < extra else 0)
            vcs.append(frozenset(ids[start:start + size]))
            start += size
    vcs = tuple(vcs)

    level_classes = {}
    for j in range(2, k):
        partial = PartitionFamily(k, n, b, vcs, level_classes)
        rj = b[j - 1] // F.a[j - 1]
        level_classes[j] = {}
        for y in address_space(j, j - 1, b):
            pk = sorted(partial.polyad_cliques(y, j))
            if not pk:
                continue
            # cliques of one new polyad share their crossing status in F:
            # either all sat in old classes (split those, keeping label
            # blocks) or none did (fresh sets: slice over all b_j labels;
            # these classes land in the refinement catch-all).
            by_old = {}
            for L in pk:
                hit = F.containing_class(L)
                by_old.setdefault(None if hit is None else hit[1], []).append(L)
            if None in by_old and len(by_old) > 1:
                raise InputError(
                    f"polyad at {y.encode()} mixes covered and uncovered sets"
                )
            for c, chunk in by_old.items():
                # shuffled round-robin: uniform marginals, near-equal part
                # sizes, so no label starves on small chunks
                rng = substream(seed, "refine", j, y.encode(), c)
                chunk = list(chunk)
                rng.shuffle(chunk)
                parts = b[j - 1] if c is None else rj
                for pos, L in enumerate(chunk):
                    t = pos % parts
                    new_b = t + 1 if c is None else (c - 1) * rj + t + 1
                    key = (y, new_b)
                    level_classes[j].setdefault(key, set()).add(L)
            for (yy, nb), edges in list(level_classes[j].items()):
                level_classes[j][(yy, nb)] = frozenset(edges)
    out = PartitionFamily(k, n, b, vcs, level_classes, relaxed=F.relaxed)
    # a chunk smaller than its part count starves a label; possible only at
    # degenerate scales — reported through the relaxed flag, never masked
    emptied = any(
        not out.level_classes[j].get((y, bb))
        for j in range(2, k)
        for y in out.class_addresses(j)
        if out.polyad_cliques(y, j)
        for bb in range(1, b[j - 1] + 1)
    )
    if emptied:
        out = PartitionFamily(k, n, b, vcs, level_classes, relaxed=True)
    return out


# ---------------------------------------------------------------------------
# equalization

def equalize(F: PartitionFamily, H: KGraph = None) -> PartitionFamily:
    """Restore vertex-class sizes to the floor/ceil window, rebuilding the
    level classes against the moved vertices.  Surviving j-sets keep their
    class; j-sets whose address changed fall into the residue label a_j."""
    k, n, a = F.k, F.n, F.a
    targets = [(n + i) // a[0] for i in range(a[0])]
    keep = []
    pool = []
    for i, c in enumerate(F.vertex_classes):
        ids = sorted(c)
        m = min(len(ids), targets[i])
        keep.append(ids[:m])
        pool.extend(ids[m:])
    pool.sort()
    p = 0
    for i in range(a[0]):
        need = targets[i] - len(keep[i])
        if need > 0:
            keep[i].extend(pool[p:p + need])
            p += need
    vcs = tuple(frozenset(c) for c in keep)

    level_classes = {}
    for j in range(2, k):
        partial = PartitionFamily(k, n, a, vcs, level_classes)
        level_classes[j] = {}
        for x in address_space(j, j - 1, a):
            pk = sorted(partial.polyad_cliques(x, j))
            if not pk:
                continue
            buckets = {bb: set() for bb in range(1, a[j - 1] + 1)}
            for L in pk:
                hit = F.containing_class(L)
                if hit is not None and hit[0] == x:
                    buckets[hit[1]].add(L)
                else:
                    buckets[a[j - 1]].add(L)
            for bb, edges in buckets.items():
                level_classes[j][(x, bb)] = frozenset(edges)
    out = PartitionFamily(k, n, a, vcs, level_classes, relaxed=F.relaxed)
    for j in range(2, k):
        for (x, bb), edges in out.level_classes[j].items():
            if not edges and out.polyad_cliques(x, j):
                raise ConstructionError(
                    "equalize", f"class ({x.encode()},{bb}) emptied by the rebuild"
                )
    return out


# ---------------------------------------------------------------------------
# reconstruction of exact refinement

def reconstruct(O: PartitionFamily, P: PartitionFamily, nu) -> PartitionFamily:
    """Given P nu-refining O, build O' with P refining O' exactly and every
    class within nu^(1/2)·C(n, j) of its O counterpart.

    Per level, each P-class is routed to the overlap-maximizing O-class;
    routes pointing at a polyad-incompatible target are corrected to the
    best label inside the P-class's actual polyad address (lowest label on
    ties)."""
    from .partitions import family_refines

    nu = Fraction(nu)
    measured = family_refines(P, O)
    if measured["max"] > nu:
        raise InputError(
            f"measured refinement distance {measured['max']} exceeds nu={nu}"
        )
    k, n, a = O.k, O.n, O.a
    vcs = [set() for _ in range(a[0])]
    for c in P.vertex_classes:
        overlaps = [len(c & oc) for oc in O.vertex_classes]
        tgt = max(range(a[0]), key=lambda i: (overlaps[i], -i))
        vcs[tgt] |= c
    vcs = tuple(frozenset(c) for c in vcs)

    level_classes = {}
    for j in range(2, k):
        partial = PartitionFamily(k, n, a, vcs, level_classes)
        level_classes[j] = {}
        o_classes = O.level_classes[j]
        for q_key, q_edges in sorted(P.level_classes[j].items()):
            if not q_edges:
                continue
            rep = min(q_edges)
            try:
                x_new = partial.unique_polyad_address(rep, j - 1)
            except InputError:
                # the whole class is non-crossing for the coarse shape and
                # belongs to the refinement catch-all, not to any O' class
                continue
            best_b, best_hit = a[j - 1], -1
            for bb in range(1, a[j - 1] + 1):
                hit = len(q_edges & o_classes.get((x_new, bb), frozenset()))
                if hit > best_hit or (hit == best_hit and bb < best_b):
                    best_b, best_hit = bb, hit
            key = (x_new, best_b)
            level_classes[j][key] = level_classes[j].get(key, frozenset()) | q_edges
    return PartitionFamily(
        k, n, a, vcs, level_classes, relaxed=O.relaxed or P.relaxed
    )


# ---------------------------------------------------------------------------
# controlled perturbation

def perturb_family(F: PartitionFamily, nu, seed) -> PartitionFamily:
    """Move up to nu·C(n, j) j-sets between classes of the same polyad at
    each level (vertices between classes when k = 2); axiom (vii) survives
    by construction."""
    nu = Fraction(nu)
    k, n, a = F.k, F.n, F.a
    emptied = False

    if k == 2:
        budget = int(nu * n)
        classes = [set(c) for c in F.vertex_classes]
        rng = substream(seed, "perturb", 1)
        for _ in range(budget):
            src = rng.randrange(a[0])
            if not classes[src]:
                continue
            dst = rng.randrange(a[0] - 1)
            if dst >= src:
                dst += 1
            v = min(classes[src])
            classes[src].discard(v)
            classes[dst].add(v)
        emptied = any(not c for c in classes)
        return PartitionFamily(
            k, n, a, tuple(frozenset(c) for c in classes), {},
            relaxed=F.relaxed or emptied,
        )

    level_classes = {j: dict(F.level_classes[j]) for j in range(2, k)}
    for j in range(2, k):
        budget = int(nu * comb(n, j))
        rng = substream(seed, "perturb", j)
        addresses = sorted(
            {x for (x, bb), e in level_classes[j].items() if e},
            key=lambda x: x.encode(),
        )
        if not addresses or a[j - 1] < 2:
            continue
        classes = {key: set(e) for key, e in level_classes[j].items()}
        for _ in range(budget):
            x = addresses[rng.randrange(len(addresses))]
            src = rng.randrange(a[j - 1]) + 1
            pool = classes.get((x, src))
            if not pool:
                continue
            dst = rng.randrange(a[j - 1] - 1) + 1
            if dst >= src:
                dst += 1
            L = min(pool)
            pool.discard(L)
            classes.setdefault((x, dst), set()).add(L)
        for key, e in classes.items():
            level_classes[j][key] = frozenset(e)
        if any(
            not level_classes[j].get((x, bb))
            for x in addresses
            for bb in range(1, a[j - 1] + 1)
        ):
            emptied = True
    return PartitionFamily(
        k, n, a, F.vertex_classes, level_classes, relaxed=F.relaxed or emptied
    )
