"""t-designs: containers, exhaustive verification, constructions, automorphisms.

All verification is by exhaustive counting. The pair-count engine behind
:func:`verify_t_design` fixes the first ``t - 2`` points of each t-subset and
reads the remaining pair counts off ``N_S^T N_S`` where ``N_S`` is the
integer incidence matrix of the blocks through those points.
"""

from __future__ import annotations

import logging
from collections import Counter, deque
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .core import Hand, ParameterError, binomial, hand, to_mask
from .gf import FieldSpec, field, prime_power, subfield_elements

log = logging.getLogger(__name__)


class UnsupportedParameters(ParameterError):
    pass


class TooLargeForExactSearch(ParameterError):
    pass


@dataclass(frozen=True)
class Design:
    v: int
    k: int
    blocks: tuple[Hand, ...]
    multiset: bool = False

    def __post_init__(self):
        if not self.v > self.k >= 1:
            raise ParameterError(f"need v > k >= 1, got v={self.v}, k={self.k}")
        blocks = tuple(sorted(hand(b) for b in self.blocks))
        for b in blocks:
            if len(b) != self.k or b[0] < 0 or b[-1] >= self.v:
                raise ParameterError(f"block {b} is not a {self.k}-subset of [0, {self.v})")
        if not self.multiset and any(x == y for x, y in zip(blocks, blocks[1:])):
            raise ParameterError("repeated block in a simple design")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, v: int, blocks: Iterable[Iterable[int]], multiset: bool = False):
        blocks = [hand(b) for b in blocks]
        if not blocks:
            raise ParameterError("a design needs at least one block")
        return cls(v, len(blocks[0]), tuple(blocks), multiset)

    def __len__(self):
        return len(self.blocks)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(to_mask(b) for b in self.blocks)

    @cached_property
    def incidence(self) -> np.ndarray:
        """Block-by-point 0/1 matrix (int64)."""
        n = np.zeros((len(self.blocks), self.v), dtype=np.int64)
        for i, b in enumerate(self.blocks):
            n[i, list(b)] = 1
        return n


# -- verification --------------------------------------------------------------


def _subset_counts(d: Design, t: int):
    """Yield the containment count of every t-subset, grouped in numpy chunks."""
    if t == 0:
        yield np.array([len(d.blocks)])
        return
    inc = d.incidence
    if t == 1:
        yield inc.sum(axis=0)
        return
    for s in combinations(range(d.v), t - 2):
        start = s[-1] + 1 if s else 0
        if d.v - start < 2:
            continue
        sub = inc[inc[:, list(s)].all(axis=1)] if s else inc
        sub = sub[:, start:]
        pairs = sub.T @ sub
        yield pairs[np.triu_indices(d.v - start, 1)]


def verify_t_design(d: Design, t: int) -> int | None:
    """λ if every t-subset of points lies in exactly λ blocks, else None."""
    if t < 0 or t > d.k:
        raise ParameterError(f"strength t={t} outside [0, k={d.k}]")
    lam = None
    for chunk in _subset_counts(d, t):
        if chunk.size == 0:
            continue
        lo, hi = int(chunk.min()), int(chunk.max())
        if lo != hi or (lam is not None and lo != lam):
            return None
        lam = lo
    return lam


@dataclass(frozen=True)
class LevelSummary:
    min: int
    max: int

    @property
    def constant(self) -> int | None:
        return self.min if self.min == self.max else None


@dataclass(frozen=True)
class DesignProfile:
    levels: dict[int, LevelSummary]

    @property
    def strength(self) -> int:
        t = -1
        for s in sorted(self.levels):
            if self.levels[s].constant is None:
                break
            t = s
        return t

    def lam(self, s: int) -> int | None:
        return self.levels[s].constant


def design_profile(d: Design) -> DesignProfile:
    """Min/max block-containment count over all s-subsets, for s = 0..k.

    Counts come from enumerating the s-subsets of every block, so the cost is
    about ``len(blocks) * 2**k``.
    """
    levels = {}
    for s in range(d.k + 1):
        counts = Counter()
        for b in d.blocks:
            counts.update(combinations(b, s))
        lo = min(counts.values()) if len(counts) == binomial(d.v, s) else 0
        levels[s] = LevelSummary(lo, max(counts.values()))
    return DesignProfile(levels)


def lambda_s(v: int, k: int, t: int, lam: int, s: int) -> Fraction:
    """Blocks of a t-(v,k,λ) design containing a fixed s-subset, s <= t."""
    if s > t:
        raise ParameterError("need s <= t")
    return Fraction(lam * binomial(v - s, t - s), binomial(k - s, t - s))


def lambda_i_j(v: int, k: int, t: int, lam: int, i: int, j: int) -> Fraction:
    """Blocks containing a fixed i-set and missing a disjoint j-set, i + j <= t."""
    if i + j > t:
        raise ParameterError("need i + j <= t")
    return Fraction(lam * binomial(v - i - j, k - i), binomial(v - t, k - t))


def containment_patterns(masks: Sequence[int], window: int) -> Counter:
    """How many blocks meet ``window`` in each exact sub-pattern.

    ``result[y]`` is the number of blocks that contain the points of ``y`` and
    none of ``window & ~y``.
    """
    return Counter(m & window for m in masks)


def block_intersection_sizes(d: Design) -> Counter:
    out = Counter()
    masks = d.masks
    for i, m in enumerate(masks):
        for m2 in masks[i + 1:]:
            out[(m & m2).bit_count()] += 1
    return out


def point_degrees(d: Design) -> list[int]:
    return [int(x) for x in d.incidence.sum(axis=0)]


# -- constructions -------------------------------------------------------------


def build_trivial_design(v: int, k: int, t: int, lam: int = 1) -> Design:
    if not v > k >= t >= 0 or lam < 1:
        raise UnsupportedParameters(f"trivial design needs v > k >= t and λ >= 1, got {(v, k, t, lam)}")
    blocks = [b for b in combinations(range(v), k) for _ in range(lam)]
    return Design(v, k, tuple(blocks), multiset=lam > 1)


def build_sts(v: int) -> Design:
    """Steiner triple system: Bose for v ≡ 3 (mod 6), Skolem for v ≡ 1 (mod 6)."""
    if v < 7 or v % 6 not in (1, 3):
        raise UnsupportedParameters(f"STS(v) needs v ≡ 1,3 mod 6 and v >= 7, got v={v}")
    blocks = []
    if v % 6 == 3:
        n = v // 3
        half = (n + 1) // 2

        def op(x, y):
            return (x + y) * half % n

        pt = lambda x, i: x + n * i  # noqa: E731
        for x in range(n):
            blocks.append((pt(x, 0), pt(x, 1), pt(x, 2)))
        for x, y in combinations(range(n), 2):
            for i in range(3):
                blocks.append((pt(x, i), pt(y, i), pt(op(x, y), (i + 1) % 3)))
    else:
        order = (v - 1) // 3
        m = order // 2

        def op(x, y):
            s = (x + y) % order
            return s // 2 if s % 2 == 0 else (s - 1) // 2 + m

        pt = lambda x, i: x + order * i  # noqa: E731
        inf = v - 1
        for x in range(m):
            blocks.append((pt(x, 0), pt(x, 1), pt(x, 2)))
            for i in range(3):
                blocks.append((inf, pt(x + m, i), pt(x, (i + 1) % 3)))
        for x, y in combinations(range(order), 2):
            for i in range(3):
                blocks.append((pt(x, i), pt(y, i), pt(op(x, y), (i + 1) % 3)))
    return Design.from_blocks(v, blocks)


_AG32 = "3456 2567 2347 1457 1367 1246 1235 0467 0357 0245 0236 0156 0134 0127"

_STS9_LARGE_SET = """\
123 145 169 178 249 257 268 348 356 379 467 589
124 136 158 179 235 267 289 349 378 457 468 569
125 137 149 168 238 247 269 346 359 458 567 789
126 139 148 157 234 259 278 358 367 456 479 689
127 135 146 189 239 248 256 347 368 459 578 679
128 134 159 167 236 245 279 357 389 469 478 568
129 138 147 156 237 246 258 345 369 489 579 678"""


def builtin_ag32() -> Design:
    """The 14 planes of AG(3,2) on points 0..7, as listed in the source table."""
    return Design.from_blocks(8, [[int(ch) for ch in word] for word in _AG32.split()])


@dataclass(frozen=True)
class LargeSet:
    v: int
    k: int
    members: tuple[Design, ...]


def builtin_large_set_sts9() -> LargeSet:
    """Seven STS(9) partitioning all 84 triples; source points 1..9 become 0..8."""
    members = tuple(
        Design.from_blocks(9, [[int(ch) - 1 for ch in word] for word in row.split()])
        for row in _STS9_LARGE_SET.splitlines()
    )
    return LargeSet(9, 3, members)


def _check_small_prime_power(q: int, cap: int, what: str) -> FieldSpec:
    if q > cap or prime_power(q) is None:
        raise UnsupportedParameters(f"{what} needs a prime power q <= {cap}, got q={q}")
    return field(q)


def _projective_points(f: FieldSpec, dim: int) -> list[tuple[int, ...]]:
    """Normalized vectors (first nonzero coordinate 1) of GF(q)^dim, sorted."""
    pts = []
    for vec in product(range(f.q), repeat=dim):
        nz = [x for x in vec if x]
        if nz and nz[0] == 1:
            pts.append(vec)
    return pts


def _dot(f: FieldSpec, u, x) -> int:
    acc = 0
    for a, b in zip(u, x):
        acc = f.add(acc, f.mul(a, b))
    return acc


def build_projective_plane(q: int) -> Design:
    """Lines of PG(2,q): a symmetric 2-(q²+q+1, q+1, 1) design."""
    f = _check_small_prime_power(q, 16, "projective plane")
    pts = _projective_points(f, 3)
    blocks = [[i for i, x in enumerate(pts) if _dot(f, u, x) == 0] for u in pts]
    return Design.from_blocks(len(pts), blocks)


def build_paley_hadamard(q: int) -> Design:
    """Translates of the nonzero squares of GF(q), q ≡ 3 (mod 4)."""
    if q % 4 != 3:
        raise UnsupportedParameters(f"Paley design needs q ≡ 3 mod 4, got q={q}")
    f = _check_small_prime_power(q, 1 << 12, "Paley design")
    squares = sorted({f.mul(x, x) for x in range(1, q)})
    blocks = [[f.add(s, a) for s in squares] for a in range(q)]
    return Design.from_blocks(q, blocks)


def build_inversive_plane(q: int) -> Design:
    """Orbit of the subline GF(q) ∪ {∞} of PG(1, q²); ∞ has id q².

    The orbit is closed under x -> x + 1, x -> g·x and x -> 1/x, which
    generate the full fractional-linear group.
    """
    _check_small_prime_power(q, 16, "inversive plane")
    f = field(q * q)
    inf = q * q
    g = f.primitive_element()
    shift = [f.add(x, 1) for x in range(inf)] + [inf]
    scale = [f.mul(g, x) for x in range(inf)] + [inf]
    invert = [inf] + [f.inv(x) for x in range(1, inf)] + [0]
    gens = (shift, scale, invert)

    base = tuple(sorted([e.value for e in subfield_elements(f, q)] + [inf]))
    seen = {base}
    queue = deque([base])
    while queue:
        b = queue.popleft()
        for perm in gens:
            img = tuple(sorted(perm[x] for x in b))
            if img not in seen:
                seen.add(img)
                queue.append(img)
    return Design(inf + 1, q + 1, tuple(seen))


def _gf2_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def golay_generator() -> int:
    """Degree-11 factor of x^23 - 1 over GF(2) (bit i holds the x^i coefficient).

    Both quadratic-residue factors are found by trial division; the one whose
    coefficient list (constant term first) is lexicographically smaller wins.
    """
    target = (1 << 23) | 1
    found = [g for g in range(1 << 11, 1 << 12) if g & 1 and _gf2_mod(target, g) == 0]
    if len(found) != 2:
        raise AssertionError(f"expected two degree-11 factors, found {len(found)}")
    return min(found, key=lambda g: [(g >> i) & 1 for i in range(12)])


def golay_codewords() -> list[int]:
    """All 4096 words of the extended binary Golay code as 24-bit masks."""
    g = golay_generator()
    rows = []
    for i in range(12):
        w = g << i
        rows.append(w | ((w.bit_count() & 1) << 23))
    words = [0]
    for r in rows:
        words += [w ^ r for w in words]
    return words


def build_witt_24() -> Design:
    """Octads of the extended Golay code: the Steiner system S(5,8,24)."""
    blocks = []
    for w in golay_codewords():
        if w.bit_count() == 8:
            blocks.append([i for i in range(24) if w >> i & 1])
    return Design.from_blocks(24, blocks)


def derived_design(d: Design, x: int) -> Design:
    """Blocks through x with x deleted; points above x shift down by one."""
    if not 0 <= x < d.v:
        raise ParameterError(f"point {x} not in [0, {d.v})")
    blocks = [[y if y < x else y - 1 for y in b if y != x] for b in d.blocks if x in b]
    if not blocks:
        raise ParameterError(f"point {x} lies in no block")
    return Design(d.v - 1, d.k - 1, tuple(tuple(b) for b in blocks), d.multiset)


# -- automorphisms -------------------------------------------------------------


def is_automorphism(d: Design, perm: Sequence[int]) -> bool:
    mult = Counter(d.masks)
    for m, cnt in mult.items():
        img = 0
        for x in range(d.v):
            if m >> x & 1:
                img |= 1 << perm[x]
        if mult.get(img) != cnt:
            return False
    return True


def _point_maps(d: Design, target: Counter):
    """Yield every point permutation sending the blocks of d onto ``target``.

    Points are assigned in increasing order; as soon as every point of a block
    has an image, that image must be a block of equal multiplicity.
    """
    mult = Counter(d.masks)
    closing = [[] for _ in range(d.v)]
    for m, cnt in mult.items():
        closing[m.bit_length() - 1].append((m, cnt))
    image = [0] * d.v
    used = [False] * d.v

    def ok(i):
        for m, cnt in closing[i]:
            img = 0
            for x in range(i + 1):
                if m >> x & 1:
                    img |= 1 << image[x]
            if target.get(img) != cnt:
                return False
        return True

    def extend(i):
        if i == d.v:
            yield tuple(image)
            return
        for y in range(d.v):
            if not used[y]:
                used[y] = True
                image[i] = y
                if ok(i):
                    yield from extend(i + 1)
                used[y] = False

    yield from extend(0)


def automorphism_count(d: Design, limit: int = 12) -> int:
    """|Aut(D)| by backtracking over point images."""
    if d.v > limit:
        raise TooLargeForExactSearch(f"v={d.v} exceeds the exact-search cap {limit}")
    return sum(1 for _ in _point_maps(d, Counter(d.masks)))


def find_isomorphism(d: Design, other: Design, limit: int = 12) -> tuple[int, ...] | None:
    """A relabeling taking the block multiset of d to that of other, or None."""
    if d.v > limit:
        raise TooLargeForExactSearch(f"v={d.v} exceeds the exact-search cap {limit}")
    if (d.v, d.k, len(d)) != (other.v, other.k, len(other)):
        return None
    return next(_point_maps(d, Counter(other.masks)), None)


def relabel(d: Design, perm: Sequence[int]) -> Design:
    return Design.from_blocks(d.v, [[perm[x] for x in b] for b in d.blocks], d.multiset)


# -- large sets ----------------------------------------------------------------


@dataclass
class LargeSetReport:
    t: int
    member_lambdas: list[int | None]
    expected_members: int
    member_count: int
    missing: int
    repeated: int
    problems: list[str] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.problems


def verify_large_set(ls: LargeSet, t: int) -> LargeSetReport:
    lams = [verify_t_design(m, t) for m in ls.members]
    seen = Counter(b for m in ls.members for b in m.blocks)
    total = binomial(ls.v, ls.k)
    repeated = sum(c - 1 for c in seen.values() if c > 1)
    missing = total - len(seen)
    expected = binomial(ls.v - t, ls.k - t)
    problems = []
    for i, lam in enumerate(lams):
        if lam != 1:
            problems.append(f"member {i} is not a {t}-({ls.v},{ls.k},1) design")
    if missing or repeated:
        problems.append(f"blocks do not partition all {ls.k}-subsets: "
                        f"{missing} missing, {repeated} repeated")
    if len(ls.members) != expected:
        problems.append(f"{len(ls.members)} members, expected {expected}")
    return LargeSetReport(t, lams, expected, len(ls.members), missing, repeated, problems)

