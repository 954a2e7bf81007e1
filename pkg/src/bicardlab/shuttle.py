"""Opportune pairs and the shuttle permutation carrying X onto a relatively finite Z.

At finite scale ``|A| ⊴ |B|`` means ``B`` is nonempty or ``A`` is empty.  The
shuttle is built in four stages; each stage and each of its sub-steps fixes
the running X or the running Y setwise, so the E-class of X never changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .relations import InvariantRelation, sample
from .universe import Concept, PartialInjection, Permutation, UniverseError, induced_permutation


class PreconditionError(ValueError):
    """A hypothesis of the shuttle construction does not hold."""


def _tri(a: int, b: int) -> bool:
    return b >= 1 or a == 0


def _same(X: Concept, Y: Concept) -> None:
    X._check(Y)


def tri_le_concepts(X: Concept, Y: Concept) -> bool:
    """Some finite multiple of |Y| covers |X|."""
    _same(X, Y)
    return _tri(len(X), len(Y))


def _require_equal_size(X: Concept, Y: Concept) -> None:
    _same(X, Y)
    if len(X) != len(Y):
        raise PreconditionError(f"|X| = {len(X)} differs from |Y| = {len(Y)}")


def almost_complementary(X: Concept, Y: Concept) -> bool:
    """None of |Y-X|, |X-Y| is dominated by |X&Y| or by |M-(X|Y)|."""
    _require_equal_size(X, Y)
    both, ext = len(X & Y), len((X | Y).complement())
    only_x, only_y = len(X - Y), len(Y - X)
    return not (_tri(only_y, both) or _tri(only_x, both) or _tri(only_x, ext) or _tri(only_y, ext))


def symmetric_pair(X: Concept, Y: Concept) -> bool:
    """Some Z of the same size, distinct from X and Y, with |Z-(X|Y)| dominated by neither difference."""
    _require_equal_size(X, Y)
    k, n = len(X), X.n
    union = (X | Y).bits
    only_x, only_y = len(X - Y), len(Y - X)
    for bits in range(1 << n):
        if bits.bit_count() != k or bits in (X.bits, Y.bits):
            continue
        outside = (bits & ~union).bit_count()
        if not _tri(outside, only_x) and not _tri(outside, only_y):
            return True
    return False


def opportune(E: InvariantRelation, X: Concept, Y: Concept) -> bool:
    """Distinct, E-related, equal size, neither almost complementary nor symmetric."""
    _same(X, Y)
    if X == Y or len(X) != len(Y) or not E.holds(X, Y):
        return False
    return not almost_complementary(X, Y) and not symmetric_pair(X, Y)


def relatively_finite(X: Concept, Y: Concept) -> bool:
    _same(X, Y)
    return len(X - Y) == len(Y - X)


def normalize_bijection(X: Concept, Z: Concept, f: Mapping[int, int]) -> dict[int, int]:
    """Turn any bijection X -> Z into one fixing X & Z pointwise.

    Each element of X - Z follows f through X & Z until it leaves X, so
    every point of Z - X keeps exactly one preimage.
    """
    _same(X, Z)
    if sorted(f) != list(X.elements) or sorted(f.values()) != list(Z.elements):
        raise PreconditionError("f is not a bijection from X onto Z")
    both = set((X & Z).elements)
    out = {x: x for x in both}
    for x in (X - Z).elements:
        y = f[x]
        while y in both:
            y = f[y]
        out[x] = y
    return out


@dataclass(frozen=True)
class SubStep:
    name: str
    perm: Permutation
    fixes: str  # "X" or "Y": which running set it fixes setwise


@dataclass(frozen=True)
class Stage:
    tag: str
    zone: tuple[int, ...]
    perm: Permutation
    X: Concept
    Y: Concept
    route: Optional[str] = None
    substeps: tuple[SubStep, ...] = ()

    @property
    def moved(self) -> frozenset[int]:
        return self.perm.moved()


@dataclass(frozen=True)
class ShuttleTrace:
    X: Concept
    Y: Concept
    Z: Concept
    f: tuple[tuple[int, int], ...]
    stages: tuple[Stage, ...]
    final: Permutation
    notes: tuple[str, ...] = field(default=())

    def pretty(self) -> str:
        return format_trace(self)


STAGE_TAGS = ("AtoX", "ExtoX", "AtoS", "ExttoS")


def _apply(p: Permutation, A: Concept) -> Concept:
    bits = 0
    for e in A.elements:
        bits |= 1 << p(e)
    return Concept(bits, A.n)


def _swap(n: int, pairs) -> Permutation:
    return induced_permutation(PartialInjection(tuple(pairs)), n)


def _fixing(p: Permutation, X: Concept, Y: Concept) -> str:
    if _apply(p, X) == X:
        return "X"
    if _apply(p, Y) == Y:
        return "Y"
    raise AssertionError(f"sub-step {p} fixes neither running set")


def _three_step(
    n: int, zone: list[int], g: Mapping[int, int], W: list[int], X: Concept, Y: Concept, label: str
) -> tuple[Permutation, tuple[SubStep, ...], Concept, Concept]:
    """Shuttle ``zone`` onto ``g(zone)`` through the helper region W, |W| copies at a time.

    Block j pairs the j-th run of |W| zone points with W (h_j); then
    p_j swaps W with rng h_j, q_j swaps rng h_j with its g-image, and r_j swaps
    g(rng h_j) with dom h_j.  Their product s_j fixes W and swaps z with g(z).
    """
    total = Permutation.identity(n)
    steps = []
    width = len(W)
    blocks = -(-len(zone) // width) if zone else 0
    for j in range(blocks):
        chunk = zone[j * width : (j + 1) * width]
        h = {W[i]: z for i, z in enumerate(chunk)}
        p = _swap(n, h.items())
        q = _swap(n, ((z, g[z]) for z in chunk))
        r = _swap(n, ((w, g[z]) for w, z in h.items()))
        for name, perm in ((f"p_{j}", p), (f"q_{j}", q), (f"r_{j}", r)):
            steps.append(SubStep(f"{label}:{name}", perm, _fixing(perm, X, Y)))
            X, Y = _apply(perm, X), _apply(perm, Y)
            total = total.then(perm)
    return total, tuple(steps), X, Y


def shuttle(
    E: InvariantRelation, X: Concept, Y: Concept, Z: Concept, f: Mapping[int, int], *, check: bool = True
) -> ShuttleTrace:
    """Build π with π(X) = Z and π(X) E X, for an opportune pair (X, Y) and Z relatively finite to X.

    ``f`` is a bijection X -> Z fixing X & Z pointwise (see ``normalize_bijection``).
    """
    n = E.n
    for A in (X, Y, Z):
        if A.n != n:
            raise UniverseError(f"concept over n={A.n} for relation over n={n}")
    if not opportune(E, X, Y):
        raise PreconditionError("X, Y are not opportune for E")
    if not relatively_finite(X, Z):
        raise PreconditionError("Z is not relatively finite to X")
    if sorted(f) != list(X.elements) or sorted(f.values()) != list(Z.elements):
        raise PreconditionError("f is not a bijection from X onto Z")
    if any(f[x] != x for x in (X & Z).elements):
        raise PreconditionError("f does not fix X & Z pointwise")

    g = {z: x for x, z in f.items()}  # Z -> X
    XmY, XaY = X - Y, X & Y
    zone1 = [z for z in (Z - X).elements if z in Y and g[z] in XmY]
    zone2 = [z for z in (Z - X).elements if z not in Y and g[z] in XmY]
    zone3 = [z for z in (Z - X).elements if z in Y and g[z] in XaY]
    zone4 = [z for z in (Z - X).elements if z not in Y and g[z] in XaY]

    stages: list[Stage] = []
    notes: list[str] = []
    cur_x, cur_y = X, Y

    # stage 1: Z1 sits in Y-X and g sends it into X-Y
    both = list((cur_x & cur_y).elements)
    ext = list((cur_x | cur_y).complement().elements)
    if _tri(len(zone1), len(both)):
        route, W = "X&Y", both
    else:
        route, W = "M-(X|Y)", ext
    if zone1 and _tri(len(zone1), len(both)) and _tri(len(zone1), len(ext)):
        notes.append("AtoX: both helper regions available, took X&Y")
    p1, subs, nx, ny = _three_step(n, zone1, g, W, cur_x, cur_y, "AtoX")
    stages.append(Stage("AtoX", tuple(zone1), p1, nx, ny, route, subs))
    cur_x, cur_y = nx, ny

    # stages 2 and 3: a single induced swap that fixes Y
    for tag, zone in (("ExtoX", zone2), ("AtoS", zone3)):
        p = _swap(n, ((z, g[z]) for z in zone))
        fixes = _fixing(p, cur_x, cur_y)
        cur_x, cur_y = _apply(p, cur_x), _apply(p, cur_y)
        stages.append(Stage(tag, tuple(zone), p, cur_x, cur_y, None, (SubStep(tag, p, fixes),)))

    # stage 4: Z4 lies outside X3|Y3 and g sends it into X3&Y3
    only_x = list((cur_x - cur_y).elements)
    only_y = list((cur_y - cur_x).elements)
    if _tri(len(zone4), len(only_x)):
        route, W = "X-Y", only_x
    else:
        route, W = "Y-X", only_y
    p4, subs, nx, ny = _three_step(n, zone4, g, W, cur_x, cur_y, "ExttoS")
    stages.append(Stage("ExttoS", tuple(zone4), p4, nx, ny, route, subs))

    final = Permutation.identity(n)
    for st in stages:
        final = final.then(st.perm)
    trace = ShuttleTrace(X, Y, Z, tuple(sorted(f.items())), tuple(stages), final, tuple(notes))
    if check:
        verify_trace(E, trace)
    return trace


def verify_trace(E: InvariantRelation, trace: ShuttleTrace) -> None:
    """Raise AssertionError unless the trace meets every post-condition."""
    g = {z: x for x, z in trace.f}
    cur = trace.X
    for st in trace.stages:
        expected = frozenset(st.zone) | frozenset(g[z] for z in st.zone)
        assert st.perm.moved() == expected, f"{st.tag} moves {sorted(st.perm.moved())}, expected {sorted(expected)}"
        cur = _apply(st.perm, cur)
        assert cur == st.X, f"{st.tag}: recorded X does not match"
        assert E.holds(trace.X, cur), f"{st.tag} left the E-class of X"
    assert _apply(trace.final, trace.X) == trace.Z, "composite does not carry X onto Z"


def format_trace(trace: ShuttleTrace) -> str:
    lines = [f"X = {trace.X}  Y = {trace.Y}  Z = {trace.Z}"]
    lines.append("f = " + ", ".join(f"{x}->{z}" for x, z in trace.f))
    for i, st in enumerate(trace.stages, 1):
        route = f" via {st.route}" if st.route and st.zone else ""
        lines.append(f"pi_{i} [{st.tag}{route}] Z_{i} = {{{','.join(map(str, st.zone))}}}  perm = {st.perm}")
        for sub in st.substeps:
            if not sub.perm.is_identity():
                lines.append(f"    {sub.name} = {sub.perm}  (fixes {sub.fixes})")
        lines.append(f"    X_{i} = {st.X}  Y_{i} = {st.Y}")
    lines.append(f"pi = {trace.final}")
    lines.extend(f"note: {n}" for n in trace.notes)
    return "\n".join(lines)


@dataclass
class SweepReport:
    instances: int = 0
    attempts: int = 0
    failures: list = field(default_factory=list)
    by_n: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "instances": self.instances,
            "attempts": self.attempts,
            "failures": len(self.failures),
            "by_n": {str(k): v for k, v in sorted(self.by_n.items())},
        }


def random_instance(E: InvariantRelation, rng) -> Optional[tuple[Concept, Concept, Concept, dict[int, int]]]:
    """A random opportune (X, Y), a random Z relatively finite to X, and a normalized f."""
    n = E.n
    x = int(rng.integers(0, 1 << n))
    k = x.bit_count()
    row = E.matrix[x]
    ys = [y for y in range(1 << n) if row[y] and y != x and y.bit_count() == k]
    if not ys:
        return None
    X, Y = Concept(x, n), Concept(ys[int(rng.integers(0, len(ys)))], n)
    if not opportune(E, X, Y):
        return None
    zs = [z for z in range(1 << n) if z.bit_count() == k]
    Z = Concept(zs[int(rng.integers(0, len(zs)))], n)
    targets = list(Z.elements)
    rng.shuffle(targets)
    f = normalize_bijection(X, Z, dict(zip(X.elements, targets)))
    return X, Y, Z, f


def shuttle_sweep(count: int, seed: int = 0, *, min_n: int = 3, max_n: int = 6, pool: int = 300) -> SweepReport:
    """Run the shuttle on ``count`` random instances drawn from sampled relations."""
    rng = np.random.default_rng(seed)
    rels = {n: [E for E in set(sample(n, seed + n, pool)) if E.class_count < 1 << n] for n in range(min_n, max_n + 1)}
    for n in rels:
        rels[n].sort(key=lambda E: E.key)
    sizes = [n for n in rels if rels[n]]
    rep = SweepReport()
    while rep.instances < count and rep.attempts < 200 * count:
        rep.attempts += 1
        n = sizes[int(rng.integers(0, len(sizes)))]
        E = rels[n][int(rng.integers(0, len(rels[n])))]
        inst = random_instance(E, rng)
        if inst is None:
            continue
        X, Y, Z, f = inst
        try:
            trace = shuttle(E, X, Y, Z, f)
        except (AssertionError, PreconditionError) as exc:
            rep.failures.append((E, X, Y, Z, f, str(exc)))
        else:
            if not E.holds(X, Z) or _apply(trace.final, X) != Z:
                rep.failures.append((E, X, Y, Z, f, "final image not E-related"))
        rep.instances += 1
        rep.by_n[n] = rep.by_n.get(n, 0) + 1
    return rep
