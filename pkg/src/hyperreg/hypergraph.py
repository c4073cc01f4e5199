"""Uniform hypergraphs: cliques, induced substructures, induced-copy counting.

A k-graph lives on the dense vertex set [0, n).  Edges are stored as
strictly sorted k-tuples; instances are immutable after construction so
they can be shared freely across concurrent workers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import CapabilityError, InputError

Edge = tuple  # strictly sorted tuple of vertex ids

DEFAULT_PATTERN_CAP = 8  # largest pattern order for isomorphism scans


def _canon_edge(e) -> Edge:
    t = tuple(sorted(e))
    if len(set(t)) != len(t):
        raise InputError(f"edge {e} has repeated vertices")
    return t


@dataclass(frozen=True)
class KGraph:
    """An immutable k-uniform hypergraph on vertex set [0, n)."""

    k: int
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"uniformity must be >= 1, got {self.k}")
        if self.n < 0:
            raise InputError(f"vertex count must be >= 0, got {self.n}")
        canon = frozenset(_canon_edge(e) for e in self.edges)
        for e in canon:
            if len(e) != self.k:
                raise InputError(f"edge {e} has size {len(e)}, expected {self.k}")
            if e[0] < 0 or e[-1] >= self.n:
                raise InputError(f"edge {e} out of vertex range [0, {self.n})")
        object.__setattr__(self, "edges", canon)

    @classmethod
    def complete(cls, k: int, n: int) -> "KGraph":
        return cls(k, n, frozenset(itertools.combinations(range(n), k)))

    @classmethod
    def empty(cls, k: int, n: int) -> "KGraph":
        return cls(k, n, frozenset())

    def __len__(self):
        return len(self.edges)

    def __contains__(self, e):
        return tuple(sorted(e)) in self.edges

    def vertices(self):
        return range(self.n)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def adjacency_masks(self) -> dict:
        """For k=2 only: per-vertex neighbour bitmasks (int bitsets)."""
        if self.k != 2:
            raise InputError("adjacency_masks is a 2-graph helper")
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj


def crossing_sets(classes, j: int) -> set:
    """All j-sets meeting each vertex class at most once.

    `classes` is a sequence of disjoint vertex collections.  Returns the
    empty set rather than raising when j exceeds the number of classes.
    """
    if j < 1:
        raise InputError(f"j must be >= 1, got {j}")
    classes = [sorted(c) for c in classes if c]
    seen = set()
    for c in classes:
        for v in c:
            if v in seen:
                raise InputError("vertex classes are not disjoint")
            seen.add(v)
    out = set()
    for chosen in itertools.combinations(classes, j):
        for combo in itertools.product(*chosen):
            out.add(tuple(sorted(combo)))
    return out


def cliques_naive(H: KGraph, ell: int) -> set:
    """Reference oracle: scan every ell-subset of the vertex set."""
    if ell < H.k:
        raise InputError(f"ell={ell} below uniformity {H.k}")
    out = set()
    for S in itertools.combinations(range(H.n), ell):
        if all(sub in H.edges for sub in itertools.combinations(S, H.k)):
            out.add(S)
    return out


def cliques(H: KGraph, ell: int) -> set:
    """All ell-sets whose k-subsets are all edges of H.

    Bit-parallel: candidate extensions are tracked as integer bitsets and
    narrowed by precomputed (k-1)-shadow extension masks.  Must agree with
    cliques_naive on every instance (gated in the test suite).
    """
    k = H.k
    if ell < k:
        raise InputError(f"ell={ell} below uniformity {k}")
    if ell == k:
        return set(H.edges)
    if k == 1:
        verts = sorted(v for (v,) in H.edges)
        return set(itertools.combinations(verts, ell))

    # ext[T] for a (k-1)-tuple T: bitmask of v with T+{v} an edge
    ext: dict = {}
    for e in H.edges:
        for i in range(k):
            T = e[:i] + e[i + 1:]
            ext[T] = ext.get(T, 0) | (1 << e[i])

    full = (1 << H.n) - 1
    out = set()

    def extend(stack, cand):
        if len(stack) == ell:
            out.add(tuple(stack))
            return
        # not enough room left to reach ell vertices
        c = cand
        while c:
            v = c & (-c)
            u = v.bit_length() - 1
            c ^= v
            new_cand = cand & ~((1 << (u + 1)) - 1)
            if len(stack) + 1 >= k - 1:
                for T in itertools.combinations(stack, k - 2):
                    new_cand &= ext.get(tuple(sorted(T + (u,))), 0)
                    if not new_cand:
                        break
            if len(stack) + 1 == ell:
                out.add(tuple(stack + [u]))
            elif new_cand:
                extend(stack + [u], new_cand)

    extend([], full)
    return out


def induce(H: KGraph, Q) -> KGraph:
    """H[Q] with vertices relabelled to [0, |Q|) by ascending original id."""
    Q = sorted(set(Q))
    for v in Q:
        if v < 0 or v >= H.n:
            raise InputError(f"vertex {v} out of range [0, {H.n})")
    relabel = {v: i for i, v in enumerate(Q)}
    qset = set(Q)
    new_edges = frozenset(
        tuple(relabel[v] for v in e) for e in H.edges if qset.issuperset(e)
    )
    return KGraph(H.k, len(Q), new_edges)


def sym_diff_distance(G: KGraph, H: KGraph) -> int:
    if G.n != H.n or G.k != H.k:
        raise InputError("distance needs equal vertex count and uniformity")
    return len(G.edges ^ H.edges)


# ---------------------------------------------------------------------------
# induced-subgraph isomorphism and Pr(F, H)

def _degree_multiset(H: KGraph):
    return tuple(sorted(H.degree(v) for v in range(H.n)))


def are_induced_isomorphic(F: KGraph, G: KGraph) -> bool:
    """Exhaustive bijection search with degree-sequence pruning."""
    if F.k != G.k or F.n != G.n or len(F.edges) != len(G.edges):
        return False
    if _degree_multiset(F) != _degree_multiset(G):
        return False
    fdeg = [F.degree(v) for v in range(F.n)]
    gdeg = [G.degree(v) for v in range(G.n)]
    gverts = list(range(G.n))
    for perm in itertools.permutations(gverts):
        if any(fdeg[i] != gdeg[perm[i]] for i in range(F.n)):
            continue
        if all(tuple(sorted(perm[v] for v in e)) in G.edges for e in F.edges):
            return True
    return False


def automorphism_count(F: KGraph) -> int:
    fdeg = [F.degree(v) for v in range(F.n)]
    count = 0
    for perm in itertools.permutations(range(F.n)):
        if any(fdeg[i] != fdeg[perm[i]] for i in range(F.n)):
            continue
        if all(tuple(sorted(perm[v] for v in e)) in F.edges for e in F.edges):
            count += 1
    return count


@lru_cache(maxsize=None)
def _canonical_edges(k: int, n: int, edges: frozenset) -> frozenset:
    best = None
    for perm in itertools.permutations(range(n)):
        mapped = frozenset(tuple(sorted(perm[v] for v in e)) for e in edges)
        key = tuple(sorted(mapped))
        if best is None or key < best:
            best = key
    return frozenset(best)


def canonical_form(F: KGraph) -> KGraph:
    """Lexicographically minimal relabelling; usable as an iso-class key."""
    return KGraph(F.k, F.n, _canonical_edges(F.k, F.n, F.edges))


def all_iso_classes(ell: int, k: int) -> list:
    """One representative per isomorphism class of k-graphs on ell vertices."""
    slots = list(itertools.combinations(range(ell), k))
    seen = {}
    for r in range(len(slots) + 1):
        for chosen in itertools.combinations(slots, r):
            G = KGraph(k, ell, frozenset(chosen))
            key = tuple(sorted(canonical_form(G).edges))
            if key not in seen:
                seen[key] = G
    return list(seen.values())


def _count_induced_triples_2graph(H: KGraph):
    """Exact triple census of a 2-graph via wedge/triangle identities.

    Returns (c0, c1, c2, c3): triples spanning exactly i edges.
    """
    adj = H.adjacency_masks()
    n = H.n
    triangles = 0
    for u, v in H.edges:
        triangles += (adj[u] & adj[v]).bit_count()
    triangles //= 3
    wedges = sum(comb(adj[v].bit_count(), 2) for v in range(n))
    c2 = wedges - 3 * triangles
    c1 = len(H.edges) * (n - 2) - 2 * c2 - 3 * triangles
    c0 = comb(n, 3) - c1 - c2 - triangles
    return c0, c1, c2, triangles


def count_induced(F: KGraph, H: KGraph, allow_large: bool = False) -> Fraction:
    """Pr(F, H): induced copies of F in H divided by C(n, ell)."""
    ell = F.n
    if F.k != H.k:
        raise InputError("pattern and host uniformity differ")
    if ell > H.n:
        raise InputError(f"pattern on {ell} vertices exceeds host on {H.n}")
    if ell > DEFAULT_PATTERN_CAP and not allow_large:
        raise CapabilityError(
            f"pattern order {ell} exceeds the cap {DEFAULT_PATTERN_CAP}; "
            "pass allow_large=True to override"
        )
    total = comb(H.n, ell)
    if total == 0:
        return Fraction(0)

    if H.k == 2 and ell == 3:
        c0, c1, c2, c3 = _count_induced_triples_2graph(H)
        by_edges = {0: c0, 1: c1, 2: c2, 3: c3}
        m = len(F.edges)
        if m in (0, 3):
            return Fraction(by_edges[m], total)
        # one edge and the path are the unique classes with 1 resp. 2 edges
        return Fraction(by_edges[m], total)

    target = tuple(sorted(canonical_form(F).edges))
    hits = 0
    for S in itertools.combinations(range(H.n), ell):
        sub = induce(H, S)
        if len(sub.edges) != len(F.edges):
            continue
        if tuple(sorted(canonical_form(sub).edges)) == target:
            hits += 1
    return Fraction(hits, total)


def count_induced_family(family, H: KGraph, allow_large: bool = False) -> Fraction:
    """Pr(F, H) summed over a family of pairwise non-isomorphic patterns."""
    members = list(family)
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            if are_induced_isomorphic(members[i], members[j]):
                raise InputError("family contains isomorphic duplicates")
    return sum(
        (count_induced(F, H, allow_large=allow_large) for F in members),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# complexes

@dataclass(frozen=True)
class Complex:
    """A stack of underlying layers: a vertex partition plus j-graphs.

    `vertex_classes` plays the role of layer 1; `layers[j]` for j >= 2 is a
    j-uniform KGraph whose edges cross the vertex partition and whose
    (j-1)-shadows sit inside the layer below.
    """

    vertex_classes: tuple  # tuple of frozensets
    layers: dict  # j -> KGraph, for j = 2..k

    def __post_init__(self):
        object.__setattr__(
            self, "vertex_classes", tuple(frozenset(c) for c in self.vertex_classes)
        )
        object.__setattr__(self, "layers", dict(self.layers))
        self.validate()

    @property
    def k(self) -> int:
        return max(self.layers) if self.layers else 1

    def layer(self, j: int) -> KGraph:
        return self.layers[j]

    def validate(self):
        cls_of = {}
        for i, c in enumerate(self.vertex_classes):
            for v in c:
                if v in cls_of:
                    raise InputError("vertex classes overlap")
                cls_of[v] = i
        for j in sorted(self.layers):
            Hj = self.layers[j]
            if Hj.k != j:
                raise InputError(f"layer {j} has uniformity {Hj.k}")
            for e in Hj.edges:
                if len({cls_of.get(v) for v in e}) != j or None in {
                    cls_of.get(v) for v in e
                }:
                    raise InputError(f"layer-{j} edge {e} does not cross the partition")
                if j > 2:
                    below = self.layers[j - 1]
                    for sub in itertools.combinations(e, j - 1):
                        if sub not in below.edges:
                            raise InputError(
                                f"layer-{j} edge {e} not underlain at {sub}"
                            )


# ---------------------------------------------------------------------------
# text serialization: header "k n", one edge per line

def kgraph_to_text(H: KGraph) -> str:
    lines = [f"{H.k} {H.n}"]
    for e in sorted(H.edges):
        lines.append(" ".join(str(v) for v in e))
    return "\n".join(lines) + "\n"


def kgraph_from_text(text: str) -> KGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty hypergraph file")
    try:
        k, n = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise InputError(f"bad header line 1: {lines[0]!r}") from exc
    edges = []
    for idx, ln in enumerate(lines[1:], start=2):
        try:
            e = tuple(int(x) for x in ln.split())
        except ValueError as exc:
            raise InputError(f"bad edge at line {idx}: {ln!r}") from exc
        edges.append(e)
    return KGraph(k, n, frozenset(edges))
