"""Announcements, strategies and the exhaustive informativeness/security checks.

A security check walks every Cathy hand H_C in lexicographic order, keeps the
announcement's hands that avoid H_C, and counts how many of those contain
each δ'-subset Y of the remaining cards. Counts come from integer matrix
products over the surviving hands, so every comparison is exact.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import factorial
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import (Hand, ParameterError, SplitMix64, binomial, check_deal_sizes, hand,
                   random_deal, to_mask)
from .designs import Design, automorphism_count, verify_t_design

log = logging.getLogger(__name__)

PERFECT, WEAK, INSECURE = "perfect", "weak", "insecure"


class ParameterBound(ParameterError):
    pass


class NonIntegerParameters(ParameterError):
    pass


class NoCandidate(ValueError):
    pass


class Ambiguous(ValueError):
    def __init__(self, count: int):
        super().__init__(f"{count} hands are consistent with Bob's hand")
        self.count = count


class ImpossibleHand(ValueError):
    pass


@dataclass(frozen=True)
class Announcement:
    n: int
    a: int
    hands: tuple[Hand, ...]

    def __post_init__(self):
        hands = tuple(sorted(hand(h) for h in self.hands))
        if not hands:
            raise ParameterError("an announcement needs at least one hand")
        for h in hands:
            if len(h) != self.a or h[0] < 0 or h[-1] >= self.n:
                raise ParameterError(f"hand {h} is not an {self.a}-subset of [0, {self.n})")
        if any(x == y for x, y in zip(hands, hands[1:])):
            raise ParameterError("announcement repeats a hand")
        object.__setattr__(self, "hands", hands)

    @classmethod
    def from_design(cls, d: Design) -> "Announcement":
        return cls(d.v, d.k, d.blocks)

    def as_design(self) -> Design:
        return Design(self.n, self.a, self.hands)

    def __len__(self):
        return len(self.hands)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(to_mask(h) for h in self.hands)

    @cached_property
    def incidence(self) -> np.ndarray:
        m = np.zeros((len(self.hands), self.n), dtype=np.int64)
        for i, h in enumerate(self.hands):
            m[i, list(h)] = 1
        return m


@dataclass(frozen=True)
class Strategy:
    n: int
    a: int
    b: int
    c: int
    announcements: tuple[Announcement, ...]
    pile_size: int | None = None  # set for transversal deals: a piles of this size

    def __post_init__(self):
        check_deal_sizes(self.n, self.a, self.b, self.c)
        if self.pile_size is not None and self.pile_size * self.a != self.n:
            raise ParameterError(f"{self.a} piles of {self.pile_size} cards do not make n={self.n}")
        for ann in self.announcements:
            if (ann.n, ann.a) != (self.n, self.a):
                raise ParameterError("announcement deck or hand size differs from the strategy")

    @property
    def m(self) -> int:
        return len(self.announcements)

    def options(self, h: Hand) -> list[int]:
        """g(H_A): indices of the announcements containing ``h``."""
        return [i for i, ann in enumerate(self.announcements) if h in self._hand_sets[i]]

    @cached_property
    def _hand_sets(self) -> list[frozenset]:
        return [frozenset(ann.hands) for ann in self.announcements]

    def possible_hands(self):
        """Every hand Alice can be dealt, in lexicographic order."""
        if self.pile_size is None:
            return combinations(range(self.n), self.a)
        v = self.pile_size
        return product(*[range(i * v, (i + 1) * v) for i in range(self.a)])


# -- basic queries -------------------------------------------------------------


def p_set(y: Iterable[int], ann: Announcement) -> list[Hand]:
    """Hands of the announcement that avoid every card of ``y``."""
    ym = to_mask(y)
    return [h for h, m in zip(ann.hands, ann.masks) if not m & ym]


@dataclass(frozen=True)
class Informative:
    ok: bool
    witness: tuple[Hand, Hand] | None = None

    def __bool__(self):
        return self.ok


def is_informative(ann: Announcement, c: int) -> Informative:
    """True iff no two hands share a - c or more cards."""
    if ann.a <= c:
        raise ParameterBound(f"informative announcements need a > c, got a={ann.a}, c={c}")
    bound = ann.a - c
    masks = ann.masks
    for i, m in enumerate(masks):
        for j in range(i + 1, len(masks)):
            if (m & masks[j]).bit_count() >= bound:
                return Informative(False, (ann.hands[i], ann.hands[j]))
    return Informative(True)


def bob_deduce(ann: Announcement, h_b: Sequence[int]) -> Hand:
    cands = p_set(h_b, ann)
    if not cands:
        raise NoCandidate("no announced hand avoids Bob's cards")
    if len(cands) > 1:
        raise Ambiguous(len(cands))
    return cands[0]


def cathy_posterior(ann: Announcement, h_c: Sequence[int]) -> dict[Hand, Fraction]:
    cands = p_set(h_c, ann)
    if not cands:
        raise ImpossibleHand(f"Cathy cannot hold {tuple(h_c)} under this announcement")
    p = Fraction(1, len(cands))
    return {h: p for h in cands}


def card_posteriors(ann: Announcement, h_c: Sequence[int]) -> dict[int, Fraction]:
    """Pr[x in H_A | announcement, H_C] for every card x outside H_C."""
    cands = p_set(h_c, ann)
    if not cands:
        raise ImpossibleHand(f"Cathy cannot hold {tuple(h_c)} under this announcement")
    counts = Counter(x for h in cands for x in h)
    held = set(h_c)
    return {x: Fraction(counts[x], len(cands)) for x in range(ann.n) if x not in held}


# -- security ------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    h_c: Hand
    y: Hand
    count: int
    p_size: int


@dataclass
class SecurityVerdict:
    level: str
    delta: int
    requested: str
    constants: list[tuple[int, Fraction]] = field(default_factory=list)
    witness: Witness | None = None
    checked_cathy_hands: int = 0
    infeasible_cathy_hands: int = 0

    @property
    def passed(self) -> bool:
        return self.witness is None


def perfect_constant(a: int, b: int, dp: int) -> Fraction:
    return Fraction(binomial(a, dp), binomial(a + b, dp))


def first_bad_subset(sub: np.ndarray, dp: int, ok: Callable[[np.ndarray], np.ndarray]):
    """Lexicographically first dp-subset of columns whose row count fails ``ok``.

    ``sub`` is a 0/1 hands-by-cards matrix. Returns ``(columns, count)`` or None.
    """
    ncols = sub.shape[1]
    if dp == 1:
        counts = sub.sum(axis=0)
        bad = ~ok(counts)
        if bad.any():
            j = int(np.argmax(bad))
            return (j,), int(counts[j])
        return None
    for s in combinations(range(ncols), dp - 2):
        start = s[-1] + 1 if s else 0
        width = ncols - start
        if width < 2:
            continue
        rows = sub[sub[:, list(s)].all(axis=1)] if s else sub
        block = rows[:, start:]
        pairs = block.T @ block
        iu = np.triu_indices(width, 1)
        vals = pairs[iu]
        bad = ~ok(vals)
        if bad.any():
            j = int(np.argmax(bad))
            return s + (start + int(iu[0][j]), start + int(iu[1][j])), int(vals[j])
    return None


def _scan_cathy_hands(ann: Announcement, hcs: Sequence[Hand], delta: int, make_ok):
    """Return (first witness or None, checked, infeasible) over ``hcs`` in order."""
    inc = ann.incidence
    checked = infeasible = 0
    for h_c in hcs:
        keep = ~inc[:, list(h_c)].any(axis=1) if h_c else np.ones(len(ann), dtype=bool)
        p_size = int(keep.sum())
        if p_size == 0:
            infeasible += 1
            continue
        checked += 1
        held = set(h_c)
        others = [x for x in range(ann.n) if x not in held]
        sub = inc[keep][:, others]
        for dp in range(1, delta + 1):
            hit = first_bad_subset(sub, dp, make_ok(dp, p_size))
            if hit is not None:
                cols, count = hit
                return Witness(h_c, tuple(others[i] for i in cols), count, p_size), checked, infeasible
    return None, checked, infeasible


def _run_scan(ann, c, delta, make_ok, workers):
    hcs = list(combinations(range(ann.n), c))
    if workers <= 1 or len(hcs) < 2 * workers:
        return _scan_cathy_hands(ann, hcs, delta, make_ok)
    size = -(-len(hcs) // workers)
    chunks = [hcs[i:i + size] for i in range(0, len(hcs), size)]
    with ThreadPoolExecutor(workers) as pool:
        results = list(pool.map(lambda ch: _scan_cathy_hands(ann, ch, delta, make_ok), chunks))
    # chunks are in lexicographic order, so the first chunk with a failure holds
    # the global first failure; later chunks were scanned past it and their
    # counters are discarded to match the sequential result.
    checked = infeasible = 0
    for wit, ch, inf in results:
        checked += ch
        infeasible += inf
        if wit is not None:
            return wit, checked, infeasible
    return None, checked, infeasible


def _weak_ok(dp, p_size):
    return lambda counts: (counts >= 1) & (counts <= p_size - 1)


def _perfect_ok(a, b):
    def make(dp, p_size):
        num, den = binomial(a, dp), binomial(a + b, dp)
        return lambda counts: counts * den == num * p_size
    return make


def check_announcement_security(ann: Announcement, c: int, delta: int,
                                level: str = PERFECT, workers: int = 1) -> SecurityVerdict:
    """Exhaustive weak or perfect δ-security of one announcement against Cathy."""
    a, n = ann.a, ann.n
    b = n - a - c
    if not 1 <= delta <= a:
        raise ParameterError(f"need 1 <= delta <= a, got delta={delta}, a={a}")
    if c < 1 or b < 1:
        raise ParameterError(f"deal sizes (a,b,c)=({a},{b},{c}) are not valid")
    if level not in (PERFECT, WEAK):
        raise ParameterError(f"unknown security level {level!r}")
    if level == PERFECT:
        wit, checked, infeasible = _run_scan(ann, c, delta, _perfect_ok(a, b), workers)
        if wit is None:
            consts = [(dp, perfect_constant(a, b, dp)) for dp in range(1, delta + 1)]
            return SecurityVerdict(PERFECT, delta, level, consts, None, checked, infeasible)
        weak_wit, _, _ = _run_scan(ann, c, delta, _weak_ok, workers)
        got = WEAK if weak_wit is None else INSECURE
        return SecurityVerdict(got, delta, level, [], wit, checked, infeasible)
    wit, checked, infeasible = _run_scan(ann, c, delta, _weak_ok, workers)
    return SecurityVerdict(WEAK if wit is None else INSECURE, delta, level, [], wit,
                           checked, infeasible)


def max_perfect_delta(ann: Announcement, c: int, workers: int = 1) -> int:
    """Largest δ for which the announcement is perfectly δ-secure (0 if none)."""
    best = 0
    for delta in range(1, ann.a + 1):
        if ann.n - ann.a - c < 1:
            break
        if check_announcement_security(ann, c, delta, PERFECT, workers).level != PERFECT:
            break
        best = delta
    return best


# -- strategies ----------------------------------------------------------------


@dataclass
class StrategyReport:
    m: int
    covered: bool
    missing: int
    first_missing: Hand | None
    multiplicity_min: int
    multiplicity_max: int
    informative: list[Informative]
    security: list[SecurityVerdict]

    @property
    def gamma(self) -> int | None:
        if self.covered and self.multiplicity_min == self.multiplicity_max:
            return self.multiplicity_min
        return None

    @property
    def passed(self) -> bool:
        return (self.covered and self.gamma is not None
                and all(self.informative) and all(v.passed for v in self.security))


def hand_multiplicities(strategy: Strategy) -> Counter:
    return Counter(h for ann in strategy.announcements for h in ann.hands)


def verify_strategy(strategy: Strategy, delta: int, level: str = PERFECT,
                    workers: int = 1) -> StrategyReport:
    """Coverage, equitability, informativeness and security of every announcement."""
    if strategy.pile_size is not None:
        raise ParameterError("transversal strategies are checked by verify_transversal_strategy")
    mult = hand_multiplicities(strategy)
    counts = [mult.get(h, 0) for h in strategy.possible_hands()]
    first_missing = None
    if 0 in counts:
        first_missing = next(h for h in strategy.possible_hands() if h not in mult)
    informative = []
    for ann in strategy.announcements:
        informative.append(is_informative(ann, strategy.c) if strategy.a > strategy.c
                           else Informative(False))
    security = [check_announcement_security(ann, strategy.c, delta, level, workers)
                for ann in strategy.announcements]
    missing = counts.count(0)
    return StrategyReport(strategy.m, missing == 0, missing, first_missing,
                          min(counts), max(counts), informative, security)


def orbit_strategy_params(d: Design, t: int, c: int, limit: int = 12) -> tuple[int, int]:
    """(m, γ) of the strategy formed by all images of ``d`` under S_n."""
    n, a = d.v, d.k
    if not 1 <= c <= min(t - 1, a - t):
        raise ParameterError(f"need 1 <= c <= min(t-1, a-t), got c={c}, t={t}, a={a}")
    if verify_t_design(d, t) != 1:
        raise ParameterError(f"design is not a {t}-({n},{a},1) design")
    aut = automorphism_count(d, limit)
    m, r = divmod(factorial(n), aut)
    if r:
        raise NonIntegerParameters(f"{n}! is not divisible by |Aut| = {aut}")
    gamma, r = divmod(m, binomial(n - t, a - t))
    if r:
        raise NonIntegerParameters(f"m = {m} is not divisible by C({n - t}, {a - t})")
    return m, gamma


@dataclass(frozen=True)
class Bounds:
    min_announcements: int
    max_perfect_delta_informative: int
    informative_possible: bool
    informative_weak1_possible: bool


def bounds(a: int, b: int, c: int, n: int) -> Bounds:
    check_deal_sizes(n, a, b, c)
    return Bounds(
        min_announcements=binomial(n - a + c, c),
        max_perfect_delta_informative=max(a - 2 * c, 0),
        informative_possible=a > c,
        informative_weak1_possible=a > c + 1 and c < b,
    )


# -- simulation ----------------------------------------------------------------


@dataclass
class SimulationSummary:
    trials: int
    bob_successes: int
    posterior_values: list[Fraction]
    max_deviation: Fraction | None

    @property
    def bob_success_rate(self) -> Fraction | None:
        return Fraction(self.bob_successes, self.trials) if self.trials else None


def simulate(strategy: Strategy, trials: int, seed: int, deal_fn=None,
             expected_fn=None) -> SimulationSummary:
    """Play the announcement protocol ``trials`` times.

    Each trial draws a deal, picks an announcement uniformly from g(H_A), lets
    Bob deduce Alice's hand and records Cathy's exact per-card posteriors.
    ``expected_fn(deal, card)`` gives the reference posterior: the perfect
    constant a/(a+b) for ordinary deals, the pile-dependent closed form for
    transversal ones.
    """
    rng = SplitMix64(seed)
    n, a, b, c = strategy.n, strategy.a, strategy.b, strategy.c
    if strategy.pile_size is not None:
        from .transversal import expected_posterior, random_transversal_deal

        v = strategy.pile_size
        deal_fn = deal_fn or (lambda s: random_transversal_deal(v, a, c, s))
        expected_fn = expected_fn or (lambda deal, x: expected_posterior(v, c, deal.cathy, (x,)))
    if deal_fn is None:
        deal_fn = lambda s: random_deal(n, a, b, c, s)  # noqa: E731
    if expected_fn is None:
        const = Fraction(a, a + b)
        expected_fn = lambda deal, x: const  # noqa: E731
    successes = 0
    values = set()
    worst = None
    for _ in range(trials):
        deal = deal_fn(rng.next_u64())
        opts = strategy.options(deal.alice)
        if not opts:
            raise ParameterError(f"no announcement contains Alice's hand {deal.alice}")
        ann = strategy.announcements[rng.choice(opts)]
        try:
            if bob_deduce(ann, deal.bob) == deal.alice:
                successes += 1
        except (NoCandidate, Ambiguous):
            pass
        for x, post in card_posteriors(ann, deal.cathy).items():
            values.add(post)
            dev = abs(post - expected_fn(deal, x))
            if worst is None or dev > worst:
                worst = dev
    return SimulationSummary(trials, successes, sorted(values), worst)
