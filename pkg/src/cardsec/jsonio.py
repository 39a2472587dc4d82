"""JSON shapes for designs, announcements, strategies, arrays and verdicts.

Documents are dumped with sorted keys so equal objects give equal bytes. The
loader picks a shape from the keys present and reports malformed input as
``SchemaError(path, field, reason)``.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .core import ParameterError
from .designs import Design, LargeSet
from .strategy import Announcement, SecurityVerdict, Strategy, Witness
from .transversal import OrthogonalArray, TransversalDesign

SCHEMA = 1


class SchemaError(ValueError):
    def __init__(self, path: str, field: str, reason: str):
        super().__init__(f"{path}: field '{field}': {reason}")
        self.path = path
        self.field = field


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def frac(x: Fraction | None):
    if x is None:
        return None
    return {"num": x.numerator, "den": x.denominator}


# -- encoders ------------------------------------------------------------------


def design_doc(d: Design) -> dict:
    return {"v": d.v, "k": d.k, "blocks": [list(b) for b in d.blocks]}


def large_set_doc(ls: LargeSet, t: int) -> dict:
    return {"v": ls.v, "k": ls.k, "t": t, "members": [design_doc(m) for m in ls.members]}


def announcement_doc(ann: Announcement) -> dict:
    return {"n": ann.n, "a": ann.a, "hands": [list(h) for h in ann.hands]}


def strategy_doc(s: Strategy) -> dict:
    doc = {"n": s.n, "a": s.a, "b": s.b, "c": s.c,
           "announcements": [announcement_doc(x) for x in s.announcements]}
    if s.pile_size is not None:
        doc["pile_size"] = s.pile_size
    return doc


def oa_doc(oa: OrthogonalArray) -> dict:
    doc = {"q": oa.q, "t": oa.t, "k": oa.k, "lambda": oa.lam, "rows": [list(r) for r in oa.rows]}
    if oa.generator is not None:
        doc["generator"] = [list(r) for r in oa.generator]
    return doc


def td_doc(td: TransversalDesign) -> dict:
    return {"v": td.v, "k": td.k, "t": td.t, "lambda": td.lam,
            "blocks": [list(b) for b in td.blocks]}


def witness_doc(w: Witness | None):
    if w is None:
        return None
    return {"h_c": list(w.h_c), "y": list(w.y), "count": w.count, "p_size": w.p_size}


def verdict_doc(v: SecurityVerdict) -> dict:
    return {
        "level": v.level,
        "delta": v.delta,
        "requested": v.requested,
        "constants": [{"delta_prime": dp, "num": x.numerator, "den": x.denominator}
                      for dp, x in v.constants],
        "witness": witness_doc(v.witness),
        "checked_cathy_hands": v.checked_cathy_hands,
        "infeasible_cathy_hands": v.infeasible_cathy_hands,
    }


# -- decoders ------------------------------------------------------------------


class _Reader:
    def __init__(self, path: str):
        self.path = path

    def fail(self, field: str, reason: str):
        raise SchemaError(self.path, field, reason)

    def int_(self, doc: dict, key: str, where: str = "") -> int:
        name = where + key
        if key not in doc:
            self.fail(name, "missing")
        x = doc[key]
        if not isinstance(x, int) or isinstance(x, bool):
            self.fail(name, f"expected an integer, got {type(x).__name__}")
        return x

    def rows(self, doc: dict, key: str, where: str = "") -> list[tuple[int, ...]]:
        name = where + key
        if key not in doc:
            self.fail(name, "missing")
        x = doc[key]
        if not isinstance(x, list):
            self.fail(name, "expected a list of integer lists")
        out = []
        for i, row in enumerate(x):
            if not isinstance(row, list) or not all(
                    isinstance(e, int) and not isinstance(e, bool) for e in row):
                self.fail(f"{name}[{i}]", "expected a list of integers")
            out.append(tuple(row))
        return out

    def items(self, doc: dict, key: str, where: str = "") -> list[dict]:
        name = where + key
        x = doc.get(key)
        if not isinstance(x, list) or not x or not all(isinstance(e, dict) for e in x):
            self.fail(name, "expected a nonempty list of objects")
        return x

    def build(self, field: str, fn, *args, **kw):
        try:
            return fn(*args, **kw)
        except ParameterError as e:
            self.fail(field, str(e))

    # shapes

    def design(self, doc: dict, where: str = "") -> Design:
        v = self.int_(doc, "v", where)
        k = self.int_(doc, "k", where)
        blocks = self.rows(doc, "blocks", where)
        for i, b in enumerate(blocks):
            if len(b) != k:
                self.fail(f"{where}blocks[{i}]", f"has {len(b)} points, expected k={k}")
            if any(not 0 <= x < v for x in b):
                self.fail(f"{where}blocks[{i}]", f"point outside [0, {v})")
        if not blocks:
            self.fail(where + "blocks", "empty")
        multiset = len(set(blocks)) != len(blocks)
        return self.build(where + "blocks", Design.from_blocks, v, blocks, multiset)

    def announcement(self, doc: dict, where: str = "") -> Announcement:
        n = self.int_(doc, "n", where)
        a = self.int_(doc, "a", where)
        hands = self.rows(doc, "hands", where)
        for i, h in enumerate(hands):
            if len(h) != a or any(not 0 <= x < n for x in h) or len(set(h)) != a:
                self.fail(f"{where}hands[{i}]", f"not an {a}-subset of [0, {n})")
        return self.build(where + "hands", Announcement, n, a, hands)

    def strategy(self, doc: dict) -> Strategy:
        n, a = self.int_(doc, "n"), self.int_(doc, "a")
        b, c = self.int_(doc, "b"), self.int_(doc, "c")
        anns = tuple(self.announcement(x, f"announcements[{i}].")
                     for i, x in enumerate(self.items(doc, "announcements")))
        pile = self.int_(doc, "pile_size") if doc.get("pile_size") is not None else None
        return self.build("announcements", Strategy, n, a, b, c, anns, pile)

    def large_set(self, doc: dict) -> tuple[LargeSet, int]:
        v, k, t = self.int_(doc, "v"), self.int_(doc, "k"), self.int_(doc, "t")
        members = tuple(self.design(x, f"members[{i}].")
                        for i, x in enumerate(self.items(doc, "members")))
        for i, m in enumerate(members):
            if (m.v, m.k) != (v, k):
                self.fail(f"members[{i}]", f"is a ({m.v},{m.k}) design, expected ({v},{k})")
        return LargeSet(v, k, members), t

    def oa(self, doc: dict) -> OrthogonalArray:
        q, t, k, lam = (self.int_(doc, x) for x in ("q", "t", "k", "lambda"))
        rows = self.rows(doc, "rows")
        gen = tuple(self.rows(doc, "generator")) if "generator" in doc else None
        return self.build("rows", OrthogonalArray, q, t, k, lam, rows, gen)

    def td(self, doc: dict) -> TransversalDesign:
        v, k, t, lam = (self.int_(doc, x) for x in ("v", "k", "t", "lambda"))
        blocks = self.rows(doc, "blocks")
        return self.build("blocks", TransversalDesign, v, k, t, lam, blocks)


def detect_kind(doc) -> str | None:
    if not isinstance(doc, dict):
        return None
    keys = set(doc)
    if "announcements" in keys:
        return "strategy"
    if "members" in keys:
        return "large_set"
    if "hands" in keys:
        return "announcement"
    if "rows" in keys:
        return "oa"
    if "blocks" in keys:
        return "td" if {"t", "lambda"} <= keys else "design"
    return None


def load(path: str):
    """(kind, object, extra) for the JSON artifact at ``path``.

    ``extra`` is the large-set strength for large sets and None otherwise.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise SchemaError(path, "<file>", e.strerror or str(e)) from None
    except json.JSONDecodeError as e:
        raise SchemaError(path, "<document>", f"invalid JSON at line {e.lineno}: {e.msg}") from None
    return parse(doc, path)


def parse(doc, path: str = "<input>"):
    r = _Reader(path)
    kind = detect_kind(doc)
    if kind is None:
        r.fail("<document>", "not a Design, LargeSet, Announcement, Strategy, OA or TD object")
    if kind == "large_set":
        ls, t = r.large_set(doc)
        return kind, ls, t
    obj = {"strategy": r.strategy, "announcement": r.announcement, "oa": r.oa,
           "td": r.td, "design": r.design}[kind](doc)
    return kind, obj, None
