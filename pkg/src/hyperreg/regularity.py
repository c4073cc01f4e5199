"""Relative density, (eps, d)-regularity checking, equitable families,
regularity instances, and the density-function metric.

All verdict arithmetic is exact rational; the sampled checker is one-sided
(it can refute regularity with a concrete witness but never certifies it).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .addresses import AddressVector, address_space
from .errors import CapabilityError, InputError
from .hypergraph import KGraph, cliques
from .partitions import PartitionFamily, VertexClassGraph
from .rng import substream

DEFAULT_EXHAUSTIVE_CAP = 24
RETENTION_DENSITIES = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


@dataclass
class RegularityVerdict:
    regular: bool
    measured_density: Fraction
    worst_witness: object  # (witness, deviation) or None
    mode: str
    certified: bool

    def __bool__(self):
        return self.regular


def _clique_set(Hk1, k: int) -> set:
    if isinstance(Hk1, VertexClassGraph):
        return Hk1.cliques(k)
    return cliques(Hk1, k)


def relative_density(Hk: KGraph, Hk1) -> Fraction:
    """|H^(k) ∩ K_k(H^(k-1))| / |K_k(H^(k-1))|, 0 on empty clique sets."""
    kk = _clique_set(Hk1, Hk.k)
    if not kk:
        return Fraction(0)
    return Fraction(sum(1 for e in kk if e in Hk.edges), len(kk))


def _crossing_adjacency(Hk: KGraph, classes):
    """Per-vertex bitmasks of Hk restricted to class-crossing pairs."""
    cls_of = {}
    for i, c in enumerate(classes):
        for v in c:
            cls_of[v] = i
    adj = {v: 0 for v in cls_of}
    for u, v in Hk.edges:
        if u in cls_of and v in cls_of and cls_of[u] != cls_of[v]:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    return adj


def _pair_verdict_terms(smask: int, class_masks, adj):
    """(crossing pair count, edge count) inside the vertex subset smask."""
    parts = [(smask & m).bit_count() for m in class_masks]
    pairs = 0
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            pairs += parts[i] * parts[j]
    edges = 0
    m = smask
    while m:
        low = m & (-m)
        v = low.bit_length() - 1
        m ^= low
        edges += (adj.get(v, 0) & smask).bit_count()
    return pairs, edges // 2


def _judge(count, kq, d, eps):
    """Deviation of an edge count from d*kq, as a fraction of kq."""
    return abs(Fraction(count) - d * kq) / kq


def check_regular_exhaustive(
    Hk: KGraph, Hk1, eps, d, exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP
) -> RegularityVerdict:
    """Scan every sub-(k-1)-graph Q; exact and certified.

    For k = 2 the quantifier runs over vertex subsets of the class
    structure, with K_2(Q) the crossing pairs inside the subset.
    """
    eps, d = Fraction(eps), Fraction(d)
    dens = relative_density(Hk, Hk1)
    if isinstance(Hk1, VertexClassGraph):
        verts = sorted(Hk1.vertex_set())
        if len(verts) > exhaustive_cap:
            raise CapabilityError(
                f"{len(verts)} ground vertices exceed the exhaustive cap "
                f"{exhaustive_cap}; use check_regular_sampled"
            )
        class_masks = [sum(1 << v for v in c) for c in Hk1.classes]
        adj = _crossing_adjacency(Hk, Hk1.classes)
        total = sum(
            len(a) * len(b) for a, b in itertools.combinations(Hk1.classes, 2)
        )
        if total == 0:
            return RegularityVerdict(True, dens, None, "exhaustive", True)
        worst = None
        for bits in itertools.product((0, 1), repeat=len(verts)):
            smask = sum(1 << v for v, keep in zip(verts, bits) if keep)
            pairs, edges = _pair_verdict_terms(smask, class_masks, adj)
            if pairs == 0 or Fraction(pairs) < eps * total:
                continue
            dev = _judge(edges, pairs, d, eps)
            if worst is None or dev > worst[1]:
                worst = (tuple(v for v, keep in zip(verts, bits) if keep), dev)
        regular = worst is None or worst[1] <= eps
        return RegularityVerdict(regular, dens, worst, "exhaustive", True)

    base = sorted(Hk1.edges)
    if len(base) > exhaustive_cap:
        raise CapabilityError(
            f"{len(base)} sub-edges exceed the exhaustive cap {exhaustive_cap}; "
            "use check_regular_sampled"
        )
    total = len(_clique_set(Hk1, Hk.k))
    if total == 0:
        return RegularityVerdict(True, dens, None, "exhaustive", True)
    worst = None
    for r in range(len(base) + 1):
        for sub in itertools.combinations(base, r):
            Q = KGraph(Hk1.k, Hk1.n, frozenset(sub))
            kq_set = cliques(Q, Hk.k)
            kq = len(kq_set)
            if kq == 0 or Fraction(kq) < eps * total:
                continue
            hits = sum(1 for e in kq_set if e in Hk.edges)
            dev = _judge(hits, kq, d, eps)
            if worst is None or dev > worst[1]:
                worst = (frozenset(sub), dev)
    regular = worst is None or worst[1] <= eps
    return RegularityVerdict(regular, dens, worst, "exhaustive", True)


def check_regular_sampled(
    Hk: KGraph, Hk1, eps, d, trials: int, seed: int
) -> RegularityVerdict:
    """Randomized refuter: draws Q by independent retention at several
    densities; a returned witness is always a genuine violation, but a
    regular verdict is uncertified."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    eps, d = Fraction(eps), Fraction(d)
    dens = relative_density(Hk, Hk1)
    mode = f"sampled({trials},{seed})"

    if isinstance(Hk1, VertexClassGraph):
        class_masks = [sum(1 << v for v in c) for c in Hk1.classes]
        adj = _crossing_adjacency(Hk, Hk1.classes)
        total = sum(
            len(a) * len(b) for a, b in itertools.combinations(Hk1.classes, 2)
        )
        if total == 0:
            return RegularityVerdict(True, dens, None, mode, False)
        verts = sorted(Hk1.vertex_set())
        worst = None
        for p in RETENTION_DENSITIES:
            for t in range(trials):
                rng = substream(seed, "retain", str(p), t)
                if p == 1:
                    kept = verts
                else:
                    kept = [v for v in verts if rng.random() < p]
                smask = sum(1 << v for v in kept)
                pairs, edges = _pair_verdict_terms(smask, class_masks, adj)
                if pairs == 0 or Fraction(pairs) < eps * total:
                    continue
                dev = _judge(edges, pairs, d, eps)
                if worst is None or dev > worst[1]:
                    worst = (tuple(kept), dev)
        regular = worst is None or worst[1] <= eps
        return RegularityVerdict(regular, dens, worst, mode, False)

    base = sorted(Hk1.edges)
    total = len(_clique_set(Hk1, Hk.k))
    if total == 0:
        return RegularityVerdict(True, dens, None, mode, False)
    worst = None
    for p in RETENTION_DENSITIES:
        for t in range(trials):
            rng = substream(seed, "retain", str(p), t)
            if p == 1:
                sub = base
            else:
                sub = [e for e in base if rng.random() < p]
            Q = KGraph(Hk1.k, Hk1.n, frozenset(sub))
            kq_set = cliques(Q, Hk.k)
            kq = len(kq_set)
            if kq == 0 or Fraction(kq) < eps * total:
                continue
            hits = sum(1 for e in kq_set if e in Hk.edges)
            dev = _judge(hits, kq, d, eps)
            if worst is None or dev > worst[1]:
                worst = (frozenset(sub), dev)
    regular = worst is None or worst[1] <= eps
    return RegularityVerdict(regular, dens, worst, mode, False)


def check_regular(Hk, Hk1, eps, d, *, trials=40, seed=0, exhaustive_cap=DEFAULT_EXHAUSTIVE_CAP):
    """Exhaustive when the quantifier fits under the cap, sampled otherwise."""
    try:
        return check_regular_exhaustive(Hk, Hk1, eps, d, exhaustive_cap)
    except CapabilityError:
        return check_regular_sampled(Hk, Hk1, eps, d, trials, seed)


# ---------------------------------------------------------------------------
# complexes and equitable families

def _layer_pair(C, j: int, lam):
    """The (layer j, layer j-1) pair of the complex restricted to the class
    index subset lam (0-based indices into C.vertex_classes)."""
    classes = [C.vertex_classes[i] for i in lam]
    allowed = frozenset().union(*classes)
    top = KGraph(
        j,
        C.layers[j].n,
        frozenset(e for e in C.layers[j].edges if allowed.issuperset(e)),
    )
    if j == 2:
        below = VertexClassGraph(tuple(classes))
    else:
        below = KGraph(
            j - 1,
            C.layers[j - 1].n,
            frozenset(e for e in C.layers[j - 1].edges if allowed.issuperset(e)),
        )
    return top, below


def check_complex_regular(
    C, eps, d_vec, *, trials=40, seed=0, exhaustive_cap=DEFAULT_EXHAUSTIVE_CAP
):
    """Layer-by-layer regularity, per j-subset of classes for multipartite
    layers; returns {(j, lam): verdict} plus the worst deviation under 'worst'."""
    eps = Fraction(eps)
    ell = len(C.vertex_classes)
    out = {}
    worst = None
    for pos, j in enumerate(sorted(C.layers)):
        if j < 2:
            continue
        d = Fraction(d_vec[pos]) if not isinstance(d_vec, dict) else Fraction(d_vec[j])
        for lam in itertools.combinations(range(ell), j):
            top, below = _layer_pair(C, j, lam)
            v = check_regular(
                top, below, eps, d,
                trials=trials, seed=substream(seed, "layer", j, lam).randrange(2**63),
                exhaustive_cap=exhaustive_cap,
            )
            out[(j, lam)] = v
            if not v.regular and (
                worst is None or (v.worst_witness and v.worst_witness[1] > worst)
            ):
                worst = v.worst_witness[1] if v.worst_witness else None
    out["ok"] = all(v.regular for k2, v in out.items() if k2 != "ok")
    return out


@dataclass
class EquitabilityReport:
    ok: bool
    failures: list = field(default_factory=list)
    measured_lambda: Fraction = Fraction(0)
    worst_deviation: Fraction = Fraction(0)

    def __bool__(self):
        return self.ok


def check_equitable_family(
    F: PartitionFamily, eta, eps, lam, *, trials=40, seed=0,
    exhaustive_cap=DEFAULT_EXHAUSTIVE_CAP,
) -> EquitabilityReport:
    """(eta, eps, lambda)-equitability: class-count floor, size window, and
    per-address polyad-complex regularity at densities (1/a_2, ..)."""
    eta, eps, lam = Fraction(eta), Fraction(eps), Fraction(lam)
    fails = []
    if Fraction(F.a[0]) < 1 / eta:
        fails.append(f"(i): a1={F.a[0]} below 1/eta={1 / eta}")
    target = Fraction(F.n, F.a[0])
    measured = F.class_sizes_balanced()
    for i, c in enumerate(F.vertex_classes, start=1):
        if abs(Fraction(len(c)) - target) > lam * target:
            fails.append(f"(ii): |V_{i}|={len(c)} outside (1±{lam})·n/a1")
    worst = Fraction(0)
    if F.k >= 3:
        d_vec = [Fraction(1, F.a[j - 1]) for j in range(2, F.k)]
        for x in address_space(F.k, F.k - 1, F.a):
            C = F.polyad_complex(x)
            res = check_complex_regular(
                C, eps, d_vec, trials=trials,
                seed=substream(seed, "addr", x.encode()).randrange(2**63),
                exhaustive_cap=exhaustive_cap,
            )
            if not res["ok"]:
                fails.append(f"(iii): complex at {x.encode()} not regular")
    return EquitabilityReport(not fails, fails, measured, worst)


# ---------------------------------------------------------------------------
# density functions and regularity instances

class DensityFunction:
    """Total map from the (k, k-1)-address space over a to [0,1] rationals."""

    def __init__(self, a, values):
        self.a = tuple(int(x) for x in a)
        self.k = len(self.a) + 1
        space = address_space(self.k, self.k - 1, self.a)
        vals = {}
        for x in space:
            if x not in values:
                raise InputError(f"density function misses address {x.encode()}")
            v = Fraction(values[x])
            if not 0 <= v <= 1:
                raise InputError(f"density {v} at {x.encode()} outside [0,1]")
            vals[x] = v
        if len(values) != len(space):
            extra = set(values) - set(space)
            raise InputError(f"density function has foreign addresses: {extra}")
        self.values = vals

    @classmethod
    def constant(cls, a, value) -> "DensityFunction":
        a = tuple(a)
        k = len(a) + 1
        return cls(a, {x: Fraction(value) for x in address_space(k, k - 1, a)})

    def __call__(self, x: AddressVector) -> Fraction:
        try:
            return self.values[x]
        except KeyError:
            raise InputError(f"address {x.encode()} outside the domain") from None

    def __eq__(self, other):
        return (
            isinstance(other, DensityFunction)
            and self.a == other.a
            and self.values == other.values
        )

    def items(self):
        return sorted(self.values.items())


def density_distance(d1: DensityFunction, d2: DensityFunction) -> Fraction:
    """k! · prod a_i^{-C(k,i)} · sum |d1 - d2|; always <= 1."""
    if d1.a != d2.a:
        raise InputError("density functions live over different shapes")
    k = d1.k
    scale = Fraction(factorial(k))
    for i in range(1, k):
        scale /= Fraction(d1.a[i - 1]) ** comb(k, i)
    return scale * sum(
        abs(v - d2.values[x]) for x, v in d1.values.items()
    )


def epsilon_cl(gamma, d0, k: int, ell: int) -> Fraction:
    """Configurable counting-lemma constant: conservative and monotone."""
    gamma, d0 = Fraction(gamma), Fraction(d0)
    return gamma * d0 ** (comb(ell, k) * 2**k) / (factorial(ell) * 2 ** (2**ell))


def epsilon_ri_bound(t: int, k: int, eps_cl=epsilon_cl) -> Fraction:
    """Default instance-complexity bound: decreasing in t and k, tending to
    0, and strictly below t^(-4^k) · eps_cl(1/t, 1/t, k-1, k) / 4."""
    if t < 1 or k < 2:
        raise InputError("need t >= 1 and k >= 2")
    t = Fraction(t)
    return t ** (-(4**k)) * eps_cl(1 / t, 1 / t, k - 1, k) / 8


class RegularityInstance:
    """A target shape a with per-address densities and a tolerance epsilon.

    The theoretical complexity bound on epsilon collapses below any usable
    tolerance at desk scale, so it is enforced only on request via
    enforce_bound / check_epsilon_bound.
    """

    def __init__(self, epsilon, a, d: DensityFunction, enforce_bound: bool = False):
        self.epsilon = Fraction(epsilon)
        self.a = tuple(int(x) for x in a)
        self.k = len(self.a) + 1
        self.d = d
        if not 0 < self.epsilon <= 1:
            raise InputError(f"epsilon {self.epsilon} outside (0, 1]")
        if self.a[0] < self.k:
            raise InputError(f"a1={self.a[0]} below k={self.k}")
        if d.a != self.a:
            raise InputError("density function shape differs from instance shape")
        if enforce_bound and not self.check_epsilon_bound():
            raise InputError(
                f"epsilon {self.epsilon} exceeds the complexity bound "
                f"{epsilon_ri_bound(max(self.a), self.k)}"
            )

    def check_epsilon_bound(self) -> bool:
        return self.epsilon <= epsilon_ri_bound(max(self.a), self.k)

    @property
    def complexity(self) -> Fraction:
        return 1 / self.epsilon

    def __eq__(self, other):
        return (
            isinstance(other, RegularityInstance)
            and (self.epsilon, self.a) == (other.epsilon, other.a)
            and self.d == other.d
        )


# ---------------------------------------------------------------------------
# instance witnesses

@dataclass
class WitnessReport:
    ok: bool
    failures: list = field(default_factory=list)
    worst_deviation: Fraction = Fraction(0)
    per_address: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _size_window_ok(F: PartitionFamily):
    lo = F.n // F.a[0]
    return all(len(c) in (lo, lo + 1) for c in F.vertex_classes)


def check_instance_witness(
    H: KGraph, R: RegularityInstance, F: PartitionFamily, *,
    trials=40, seed=0, exhaustive_cap=DEFAULT_EXHAUSTIVE_CAP,
) -> WitnessReport:
    """Does F witness that H satisfies R?  Equitability at eta = 1/a1 with
    the floor/ceil size window, plus (epsilon, d(x))-regularity of H with
    respect to every top-level polyad."""
    if F.a != R.a:
        raise InputError(f"family shape {F.a} differs from instance shape {R.a}")
    fails = []
    if not _size_window_ok(F):
        sizes = sorted(len(c) for c in F.vertex_classes)
        fails.append(f"equitability: class sizes {sizes} leave the floor/ceil window")
    if F.k >= 3:
        eq = check_equitable_family(
            F, Fraction(1, F.a[0]), R.epsilon, Fraction(1),
            trials=trials, seed=substream(seed, "equit").randrange(2**63),
            exhaustive_cap=exhaustive_cap,
        )
        fails.extend(f for f in eq.failures if not f.startswith("(ii)"))
    per_address = {}
    worst = Fraction(0)
    for x in address_space(F.k, F.k - 1, F.a):
        polyad = F.polyad(x)
        v = check_regular(
            H, polyad, R.epsilon, R.d(x),
            trials=trials, seed=substream(seed, "poly", x.encode()).randrange(2**63),
            exhaustive_cap=exhaustive_cap,
        )
        per_address[x] = v
        if v.worst_witness:
            worst = max(worst, v.worst_witness[1])
        if not v.regular:
            fails.append(f"regularity: address {x.encode()} refuted at d={R.d(x)}")
    return WitnessReport(not fails, fails, worst, per_address)


def check_perfectly_regular(
    H: KGraph, F: PartitionFamily, eps, *, trials=40, seed=0,
    exhaustive_cap=DEFAULT_EXHAUSTIVE_CAP,
):
    """Is H (eps, d)-regular with respect to every top-level polyad for SOME
    density?  Fits d(x) := measured relative density and checks at it;
    returns (report, fitted DensityFunction)."""
    eps = Fraction(eps)
    fitted = {}
    fails = []
    per_address = {}
    worst = Fraction(0)
    for x in address_space(F.k, F.k - 1, F.a):
        polyad = F.polyad(x)
        d = relative_density(H, polyad)
        fitted[x] = d
        v = check_regular(
            H, polyad, eps, d,
            trials=trials, seed=substream(seed, "perf", x.encode()).randrange(2**63),
            exhaustive_cap=exhaustive_cap,
        )
        per_address[x] = v
        if v.worst_witness:
            worst = max(worst, v.worst_witness[1])
        if not v.regular:
            fails.append(f"address {x.encode()} not regular at its own density")
    report = WitnessReport(not fails, fails, worst, per_address)
    return report, DensityFunction(F.a, fitted)


# ---------------------------------------------------------------------------
# serialization

def instance_to_text(R: RegularityInstance) -> str:
    head = f"{R.epsilon} " + " ".join(str(x) for x in R.a)
    lines = [head]
    for x, v in R.d.items():
        lines.append(f"{x.encode()} {v}")
    return "\n".join(lines) + "\n"


def instance_from_text(text: str) -> RegularityInstance:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty instance file")
    head = lines[0].split()
    try:
        epsilon = Fraction(head[0])
        a = tuple(int(x) for x in head[1:])
    except (ValueError, IndexError, ZeroDivisionError) as exc:
        raise InputError(f"bad header line 1: {lines[0]!r}") from exc
    values = {}
    for idx, ln in enumerate(lines[1:], start=2):
        try:
            enc, val = ln.split()
            values[AddressVector.decode(enc)] = Fraction(val)
        except (ValueError, InputError, ZeroDivisionError) as exc:
            raise InputError(f"bad density line {idx}: {ln!r}") from exc
    return RegularityInstance(epsilon, a, DensityFunction(a, values))
