"""Unions of parallel hyperplanes of AG(d+1, p) as announcements.

Points of the geometry are the vectors of GF(p)^(d+1) in lexicographic order
of their element ids. A parallel class is indexed by its normal vector u,
normalized so the first nonzero coordinate is 1; class i holds the p
hyperplanes ``u·x = c`` ordered by c.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

from .core import Hand, ParameterError
from .designs import Design, UnsupportedParameters, verify_t_design
from .gf import field, prime_power
from .strategy import PERFECT, Announcement, check_announcement_security


@dataclass(frozen=True)
class AffineGeometry:
    p: int
    d: int
    points: tuple[tuple[int, ...], ...]
    classes: tuple[tuple[Hand, ...], ...]

    @property
    def r(self) -> int:
        return len(self.classes)

    def hyperplane_design(self) -> Design:
        return Design.from_blocks(len(self.points), [b for cls in self.classes for b in cls])


def build_affine_geometry(p: int, d: int) -> AffineGeometry:
    if prime_power(p) is None or p > 16 or d < 1 or p ** (d + 1) > 1 << 12:
        raise UnsupportedParameters(
            f"need a prime power p <= 16, d >= 1 and p^(d+1) <= 4096; got p={p}, d={d}")
    f = field(p)
    dim = d + 1
    points = tuple(product(range(p), repeat=dim))
    classes = []
    for u in points:
        nz = [x for x in u if x]
        if not nz or nz[0] != 1:
            continue
        planes = [[] for _ in range(p)]
        for idx, x in enumerate(points):
            acc = 0
            for ui, xi in zip(u, x):
                acc = f.add(acc, f.mul(ui, xi))
            planes[acc].append(idx)
        classes.append(tuple(tuple(pl) for pl in planes))
    return AffineGeometry(p, d, points, tuple(classes))


@dataclass(frozen=True)
class GeometricAnnouncement:
    geometry: AffineGeometry
    s: int
    blocks: tuple[Hand, ...]

    @property
    def n(self) -> int:
        return len(self.geometry.points)

    @property
    def a(self) -> int:
        return self.s * self.geometry.p ** self.geometry.d

    def as_design(self) -> Design:
        return Design(self.n, self.a, self.blocks)

    def as_announcement(self) -> Announcement:
        return Announcement(self.n, self.a, self.blocks)

    def parameters(self) -> dict:
        p, d, s = self.geometry.p, self.geometry.d, self.s
        return {"p": p, "d": d, "s": s, "r": self.geometry.r,
                "lambda_formula_value": predicted_lambda(p, d, s)}


def predicted_lambda(p: int, d: int, s: int) -> int:
    num = comb(p - 1, s - 1) * (s * p ** d - 1)
    if num % (p - 1):
        raise ParameterError("pair index is not an integer")
    return num // (p - 1)


def predicted_block_count(p: int, d: int, s: int) -> int:
    return comb(p, s) * (p ** (d + 1) - 1) // (p - 1)


def build_geometric_announcement(p: int, d: int, s: int) -> GeometricAnnouncement:
    """Every union of s hyperplanes taken from one parallel class."""
    if not 1 <= s < p:
        raise ParameterError(f"need 1 <= s < p, got s={s}, p={p}")
    geo = build_affine_geometry(p, d)
    blocks = []
    for cls in geo.classes:
        for chosen in combinations(range(p), s):
            blocks.append(tuple(sorted(x for j in chosen for x in cls[j])))
    return GeometricAnnouncement(geo, s, tuple(sorted(blocks)))


def is_three_design_predicted(p: int, s: int) -> bool:
    return p == 2 * s


@dataclass
class GeometricSecurity:
    p: int
    d: int
    s: int
    c: int
    max_perfect_delta: int
    predicted_delta: int
    failing_delta_witness: object = None
    # max{c+s, cs} <= p, quoted from earlier work on the protocol; recorded, not checked
    prior_condition: bool = False
    # c < s*p^d - s^2*p^(d-1), the weak-security parameter condition
    informative_condition: bool = False

    @property
    def matches_prediction(self) -> bool:
        return self.max_perfect_delta == self.predicted_delta


def check_geometric_security(p: int, d: int, s: int, c: int, workers: int = 1) -> GeometricSecurity:
    """Largest perfectly secure δ for Cathy holding c cards, against the design strength."""
    ann = build_geometric_announcement(p, d, s).as_announcement()
    if not 1 <= c < ann.a:
        raise ParameterError(f"need 1 <= c < s*p^d = {ann.a}, got c={c}")
    if ann.n - ann.a - c < 1:
        raise ParameterError("Bob would hold no cards")
    t_max = 3 if is_three_design_predicted(p, s) else 2
    best, witness = 0, None
    for delta in range(1, ann.a - c + 1):
        verdict = check_announcement_security(ann, c, delta, PERFECT, workers)
        if verdict.level != PERFECT:
            witness = verdict.witness
            break
        best = delta
    return GeometricSecurity(p, d, s, c, best, max(t_max - c, 0), witness,
                             prior_condition(p, s, c), informative_condition(p, d, s, c))


def prior_condition(p: int, s: int, c: int) -> bool:
    return max(c + s, c * s) <= p


def informative_condition(p: int, d: int, s: int, c: int) -> bool:
    return c < s * p ** d - s * s * p ** (d - 1)


def geometric_strength(p: int, d: int, s: int) -> tuple[int | None, int | None]:
    """(λ at t=2, λ at t=3 or None) by exhaustive verification.

    Blocks of size 2 contain no 3-subset at all, which counts as a 3-design
    with λ = 0.
    """
    design = build_geometric_announcement(p, d, s).as_design()
    three = verify_t_design(design, 3) if design.k >= 3 else 0
    return verify_t_design(design, 2), three
