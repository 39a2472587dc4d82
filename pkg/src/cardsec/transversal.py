"""Orthogonal arrays, transversal designs and the transversal card-deal variant.

Point encoding: group i (0-based) owns the ids ``[i*v, (i+1)*v)``, so symbol x
in column i of an orthogonal array becomes card ``i*v + x``. A 1-based pair
(x, i) from a printed table therefore maps to ``(i-1)*v + (x-1)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .core import Hand, ParameterError, SplitMix64, hand
from .designs import UnsupportedParameters
from .gf import FieldSpec, field as gf_field, prime_power
from .strategy import Announcement, Informative, Strategy, is_informative


class ColumnsDependent(ParameterError):
    def __init__(self, columns):
        super().__init__(f"columns {columns} of the generator are linearly dependent")
        self.columns = columns


class NotLinear(ParameterError):
    pass


@dataclass(frozen=True)
class OrthogonalArray:
    q: int
    t: int
    k: int
    lam: int
    rows: tuple[tuple[int, ...], ...]
    generator: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        rows = tuple(sorted(tuple(r) for r in self.rows))
        if len(rows) != self.lam * self.q ** self.t:
            raise ParameterError(f"{len(rows)} rows, expected λq^t = {self.lam * self.q ** self.t}")
        for r in rows:
            if len(r) != self.k or min(r) < 0 or max(r) >= self.q:
                raise ParameterError(f"row {r} is not a {self.k}-tuple over [0, {self.q})")
        object.__setattr__(self, "rows", rows)


@dataclass(frozen=True)
class OAWitness:
    columns: tuple[int, ...]
    symbols: tuple[int, ...]
    count: int


@dataclass(frozen=True)
class OACheck:
    ok: bool
    witness: OAWitness | None = None

    def __bool__(self):
        return self.ok


def verify_oa(oa: OrthogonalArray) -> OACheck:
    """Every t-column projection must hit each t-tuple exactly λ times."""
    for cols in combinations(range(oa.k), oa.t):
        counts = Counter(tuple(r[c] for c in cols) for r in oa.rows)
        for tup in product(range(oa.q), repeat=oa.t):
            if counts.get(tup, 0) != oa.lam:
                return OACheck(False, OAWitness(cols, tup, counts.get(tup, 0)))
    return OACheck(True)


@dataclass(frozen=True)
class TransversalDesign:
    v: int
    k: int
    t: int
    lam: int
    blocks: tuple[Hand, ...]

    def __post_init__(self):
        blocks = tuple(sorted(hand(b) for b in self.blocks))
        for b in blocks:
            if len(b) != self.k or [x // self.v for x in b] != list(range(self.k)) \
                    or b[-1] >= self.k * self.v:
                raise ParameterError(f"block {b} does not meet every group exactly once")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return self.k * self.v

    def group(self, x: int) -> int:
        return x // self.v

    def groups(self) -> list[range]:
        return [range(i * self.v, (i + 1) * self.v) for i in range(self.k)]

    def as_announcement(self) -> Announcement:
        return Announcement(self.n, self.k, self.blocks)


def is_partial_transversal(cards: Sequence[int], v: int) -> bool:
    gs = [x // v for x in cards]
    return len(set(gs)) == len(gs)


def partial_transversals(v: int, k: int, size: int, exclude: Sequence[int] = ()):
    """All partial transversals of the given size, in lexicographic order."""
    banned = set(exclude)
    pool = [x for x in range(k * v) if x not in banned]
    for combo in combinations(pool, size):
        if is_partial_transversal(combo, v):
            yield combo


def verify_td(td: TransversalDesign) -> int | None:
    """λ if every partial transversal of size t lies in exactly λ blocks."""
    counts = Counter()
    for b in td.blocks:
        counts.update(combinations(b, td.t))
    lam = None
    for y in partial_transversals(td.v, td.k, td.t):
        c = counts.get(y, 0)
        if lam is None:
            lam = c
        elif c != lam:
            return None
    return lam


def oa_to_td(oa: OrthogonalArray) -> TransversalDesign:
    blocks = tuple(tuple(i * oa.q + x for i, x in enumerate(r)) for r in oa.rows)
    return TransversalDesign(oa.q, oa.k, oa.t, oa.lam, blocks)


def td_to_oa(td: TransversalDesign, generator=None) -> OrthogonalArray:
    rows = []
    for b in td.blocks:
        groups = [x // td.v for x in b]
        if sorted(groups) != list(range(td.k)):
            raise ParameterError(f"block {b} does not meet every group exactly once")
        rows.append(tuple(x % td.v for x in sorted(b)))
    return OrthogonalArray(td.v, td.t, td.k, td.lam, tuple(rows), generator)


# -- linear arrays ------------------------------------------------------------


def _rank(f: FieldSpec, vectors: list[list[int]]) -> int:
    rows = [list(v) for v in vectors]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = f.inv(rows[rank][col])
        rows[rank] = [f.mul(inv, x) for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                fac = rows[i][col]
                rows[i] = [f.sub(x, f.mul(fac, y)) for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def oa_from_generator(matrix: Sequence[Sequence[int]], t: int, q: int) -> OrthogonalArray:
    """All GF(q)-linear combinations of the rows of ``matrix``.

    Entries are field element ids. Every t columns must be independent; the
    result is an OA_{q^(l-t)}(t, k, q) that keeps ``matrix`` as its linearity
    witness.
    """
    f = gf_field(q)
    ell, k = len(matrix), len(matrix[0])
    for cols in combinations(range(k), t):
        if _rank(f, [[matrix[r][c] for r in range(ell)] for c in cols]) < t:
            raise ColumnsDependent(cols)
    rows = []
    for coeffs in product(range(q), repeat=ell):
        row = [0] * k
        for a, mrow in zip(coeffs, matrix):
            if a:
                row = [f.add(x, f.mul(a, y)) for x, y in zip(row, mrow)]
        rows.append(tuple(row))
    return OrthogonalArray(q, t, k, q ** (ell - t), tuple(rows),
                           tuple(tuple(r) for r in matrix))


def vandermonde(t: int, q: int, columns: int | None = None) -> list[list[int]]:
    """Rows x^0 .. x^(t-1) evaluated at the first ``columns`` field elements."""
    f = gf_field(q)
    cols = range(q if columns is None else columns)
    return [[f.pow(x, i) for x in cols] for i in range(t)]


def reed_solomon_oa(t: int, q: int) -> OrthogonalArray:
    if not 2 <= t <= q <= 16 or prime_power(q) is None:
        raise UnsupportedParameters(f"Reed-Solomon OA needs 2 <= t <= q <= 16, q a prime power; got t={t}, q={q}")
    return oa_from_generator(vandermonde(t, q), t, q)


def coset_large_set(oa: OrthogonalArray) -> list[OrthogonalArray]:
    """Translates of a linear OA covering GF(q)^k; member 0 is ``oa`` itself."""
    if oa.generator is None:
        raise NotLinear("array carries no generator matrix")
    if oa.q ** oa.k > 10 ** 6:
        raise UnsupportedParameters("coset enumeration capped at q^k <= 10^6")
    f = gf_field(oa.q)
    seen = set()
    members = []
    for u in product(range(oa.q), repeat=oa.k):
        if u in seen:
            continue
        coset = [tuple(f.add(x, y) for x, y in zip(u, r)) for r in oa.rows]
        seen.update(coset)
        members.append(OrthogonalArray(oa.q, oa.t, oa.k, oa.lam, tuple(coset),
                                       oa.generator if not any(u) else None))
    return members


def delete_groups(td: TransversalDesign, keep: int) -> TransversalDesign:
    if not td.t <= keep <= td.k:
        raise ParameterError(f"need t <= keep <= k, got keep={keep}")
    blocks = tuple(b[:keep] for b in td.blocks)
    return TransversalDesign(td.v, keep, td.t, td.lam, blocks)


def td_counts(v: int, k: int, t: int, lam: int, s: int) -> int:
    if s > t:
        raise ParameterError("need s <= t")
    return lam * v ** (t - s)


def td_counts_avoiding(v: int, k: int, t: int, lam: int, i: int, j: int) -> int:
    if i + j > t:
        raise ParameterError("need i + j <= t")
    return lam * v ** (t - i - j) * (v - 1) ** j


# -- the transversal deal ------------------------------------------------------


@dataclass(frozen=True)
class TransversalDeal:
    alice: Hand
    bob: Hand
    cathy: Hand
    v: int

    def __post_init__(self):
        k = len(self.alice)
        cards = sorted(self.alice + self.bob + self.cathy)
        if cards != list(range(k * self.v)):
            raise ParameterError("hands must partition the deck")
        if sorted(x // self.v for x in self.alice) != list(range(k)):
            raise ParameterError("Alice must hold one card from each pile")
        if not is_partial_transversal(self.cathy, self.v):
            raise ParameterError("Cathy holds two cards from one pile")


def random_transversal_deal(v: int, k: int, c: int, seed: int) -> TransversalDeal:
    if not 1 <= c <= k or v < 2:
        raise ParameterError(f"need 1 <= c <= k and v >= 2, got v={v}, k={k}, c={c}")
    rng = SplitMix64(seed)
    alice = [i * v + rng.below(v) for i in range(k)]
    piles = list(range(k))
    rng.shuffle(piles)
    cathy = []
    for i in sorted(piles[:c]):
        rest = [x for x in range(i * v, (i + 1) * v) if x != alice[i]]
        cathy.append(rng.choice(rest))
    taken = set(alice) | set(cathy)
    bob = [x for x in range(k * v) if x not in taken]
    return TransversalDeal(hand(alice), hand(bob), hand(cathy), v)


def expected_posterior(v: int, c: int, h_c: Sequence[int], y: Sequence[int]) -> Fraction:
    """Closed-form Pr[Y ⊆ H_A] for a TD announcement; depends on shared piles."""
    ell = len({x // v for x in h_c} - {x // v for x in y})
    return Fraction(1, v ** (len(y) + ell - c) * (v - 1) ** (c - ell))


@dataclass(frozen=True)
class PosteriorWitness:
    h_c: Hand
    y: Hand
    count: int
    p_size: int
    expected: Fraction


@dataclass
class TransversalVerdict:
    c: int
    delta: int
    weak: bool
    formula: bool
    weak_witness: PosteriorWitness | None = None
    formula_witness: PosteriorWitness | None = None
    posteriors: list[Fraction] = field(default_factory=list)
    checked_cathy_hands: int = 0
    infeasible_cathy_hands: int = 0
    skipped_non_transversal: int = 0

    @property
    def passed(self) -> bool:
        return self.weak and self.formula


def check_transversal_security(td: TransversalDesign, c: int, delta: int) -> TransversalVerdict:
    """Exhaustive posteriors of partial transversals given every Cathy hand.

    Y ranges over partial transversals outside H_C, including those sharing a
    pile with H_C; δ'-subsets holding two cards of one pile have posterior 0
    under any TD announcement and are only counted.
    """
    if not 1 <= c <= td.t - 1:
        raise ParameterError(f"need 1 <= c <= t-1, got c={c}, t={td.t}")
    if not 1 <= delta <= td.t - c:
        raise ParameterError(f"need 1 <= delta <= t-c, got delta={delta}")
    v = td.v
    out = TransversalVerdict(c, delta, True, True)
    values = set()
    masks = [sum(1 << x for x in b) for b in td.blocks]
    for h_c in partial_transversals(v, td.k, c):
        hm = sum(1 << x for x in h_c)
        cands = [b for b, m in zip(td.blocks, masks) if not m & hm]
        if not cands:
            out.infeasible_cathy_hands += 1
            continue
        out.checked_cathy_hands += 1
        p_size = len(cands)
        held = set(h_c)
        others = [x for x in range(td.n) if x not in held]
        for dp in range(1, delta + 1):
            counts = Counter()
            for b in cands:
                counts.update(combinations(b, dp))
            for y in combinations(others, dp):
                if not is_partial_transversal(y, v):
                    out.skipped_non_transversal += 1
                    continue
                cnt = counts.get(y, 0)
                exp = expected_posterior(v, c, h_c, y)
                post = Fraction(cnt, p_size)
                values.add(post)
                if out.weak and not 0 < cnt < p_size:
                    out.weak = False
                    out.weak_witness = PosteriorWitness(h_c, y, cnt, p_size, exp)
                if out.formula and post != exp:
                    out.formula = False
                    out.formula_witness = PosteriorWitness(h_c, y, cnt, p_size, exp)
    out.posteriors = sorted(values)
    return out


def informative_by_deals(td: TransversalDesign, c: int) -> bool:
    """Bob identifies Alice's hand in every transversal deal consistent with ``td``."""
    masks = [sum(1 << x for x in b) for b in td.blocks]
    full = (1 << td.n) - 1
    for h_c in partial_transversals(td.v, td.k, c):
        hm = sum(1 << x for x in h_c)
        for m in masks:
            if m & hm:
                continue
            bob = full & ~(m | hm)
            if sum(1 for m2 in masks if not m2 & bob) != 1:
                return False
    return True


@dataclass
class ToolkitReport:
    a: int
    c: int
    q: int
    t: int
    member_count: int
    expected_members: int
    partition_ok: bool
    informative: list[Informative]
    informative_by_deals: list[bool]
    security: list[TransversalVerdict]

    @property
    def optimal(self) -> bool:
        return self.member_count == self.expected_members

    @property
    def passed(self) -> bool:
        return (self.optimal and self.partition_ok and all(self.informative)
                and all(self.informative_by_deals) and all(s.passed for s in self.security))


def transversal_large_set(a: int, c: int, q: int) -> list[TransversalDesign]:
    """Coset large set of the Reed-Solomon TD_1(a-c, a, q), as q^c members."""
    if prime_power(q) is None or q > 16 or q < a or c < 1 or 2 * c > a - 1:
        raise UnsupportedParameters(
            f"need a prime power q with a <= q <= 16 and 1 <= c <= (a-1)/2; got a={a}, c={c}, q={q}")
    t = a - c
    oa = oa_from_generator(vandermonde(t, q, columns=a), t, q)
    return [oa_to_td(m) for m in coset_large_set(oa)]


def _large_set_report(members: Sequence[TransversalDesign], a: int, c: int, v: int,
                      delta: int) -> ToolkitReport:
    seen = Counter(b for td in members for b in td.blocks)
    partition_ok = len(seen) == v ** a and all(n == 1 for n in seen.values())
    informative = [is_informative(td.as_announcement(), c) for td in members]
    by_deals = [informative_by_deals(td, c) for td in members]
    security = [check_transversal_security(td, c, delta) for td in members]
    return ToolkitReport(a, c, v, a - c, len(members), v ** c, partition_ok,
                         informative, by_deals, security)


def transversal_toolkit(a: int, c: int, q: int) -> tuple[list[TransversalDesign], ToolkitReport]:
    """Optimal transversal strategy from a Reed-Solomon large set, fully checked."""
    members = transversal_large_set(a, c, q)
    return members, _large_set_report(members, a, c, q, a - 2 * c)


def verify_transversal_strategy(strategy: Strategy, delta: int) -> ToolkitReport:
    """Check a transversal strategy whose announcements are TD_1(a-c, a, v)s."""
    v, a, c = strategy.pile_size, strategy.a, strategy.c
    if v is None:
        raise ParameterError("strategy has no pile size")
    members = [TransversalDesign(v, a, a - c, 1, ann.hands) for ann in strategy.announcements]
    return _large_set_report(members, a, c, v, delta)


def transversal_strategy(members: Sequence[TransversalDesign], c: int) -> Strategy:
    td = members[0]
    n, a = td.n, td.k
    return Strategy(n, a, n - a - c, c, tuple(m.as_announcement() for m in members), pile_size=td.v)
