"""JSON files holding one exact section.

Layout::

    {"k": 6, "l": 1, "tag": "scriptV",
     "terms": [{"upper": [1], "lower": [1, 1, 2, 3, 4],
                "monomial": [0, 1, 0, 0, 0, 0], "re": "3/1", "im": "-1/2"}, ...]}

Rationals are always written as "p/q" strings.  Terms are sorted by
(upper, lower, monomial) so equal sections serialize to equal bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from gmpy2 import mpq

from .complex_ops import SCRIPT_V, V, Section
from .exact import ExactComplex
from .poly_field import NVARS, Poly6
from .tensor_core import INDICES, IndexProfile

__all__ = ["SectionFormatError", "section_to_dict", "section_from_dict", "dumps", "loads", "write", "read"]


class SectionFormatError(ValueError):
    pass


def _rat(x: mpq) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_rat(s) -> mpq:
    if not isinstance(s, str):
        raise SectionFormatError(f"rational must be a string, got {s!r}")
    try:
        return mpq(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise SectionFormatError(f"bad rational {s!r}") from exc


def section_to_dict(f: Section) -> dict:
    terms = []
    for (lower, upper), poly in f.components.items():
        for exp, c in poly.terms.items():
            terms.append(
                {
                    "upper": list(upper),
                    "lower": list(lower),
                    "monomial": list(exp),
                    "re": _rat(c.re),
                    "im": _rat(c.im),
                }
            )
    terms.sort(key=lambda t: (t["upper"], t["lower"], t["monomial"]))
    return {"k": f.profile.k, "l": f.profile.l, "tag": f.tag, "terms": terms}


def section_from_dict(doc) -> Section:
    if not isinstance(doc, dict):
        raise SectionFormatError("top level must be an object")
    try:
        k, l, tag, terms = doc["k"], doc["l"], doc["tag"], doc["terms"]
    except KeyError as exc:
        raise SectionFormatError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(k, int) or not isinstance(l, int):
        raise SectionFormatError("k and l must be integers")
    if tag not in (V, SCRIPT_V):
        raise SectionFormatError(f"tag must be 'V' or 'scriptV', got {tag!r}")
    try:
        prof = IndexProfile(k, l)
    except ValueError as exc:
        raise SectionFormatError(str(exc)) from None
    comps: dict = {}
    for t in terms:
        try:
            upper, lower, mono = tuple(t["upper"]), tuple(t["lower"]), tuple(t["monomial"])
            c = ExactComplex(_parse_rat(t["re"]), _parse_rat(t["im"]))
        except (KeyError, TypeError) as exc:
            raise SectionFormatError(f"malformed term {t!r}") from exc
        if any(a not in INDICES for a in upper + lower):
            raise SectionFormatError(f"indices must lie in 1..4: {t!r}")
        if list(lower) != sorted(lower):
            raise SectionFormatError(f"lower indices must be nondecreasing: {lower}")
        if any(a >= b for a, b in zip(upper, upper[1:])):
            raise SectionFormatError(f"upper indices must be strictly increasing: {upper}")
        if len(upper) != prof.q or len(lower) != prof.p:
            raise SectionFormatError(f"term {t!r} does not fit profile {prof}")
        if len(mono) != NVARS or any(not isinstance(e, int) or e < 0 for e in mono):
            raise SectionFormatError(f"monomial must be 6 nonnegative integers: {mono}")
        poly = comps.setdefault((lower, upper), {})
        poly[mono] = poly.get(mono, 0) + c
    polys = {key: Poly6({e: c for e, c in t.items() if c}) for key, t in comps.items()}
    try:
        return Section(prof, polys, tag)
    except ValueError as exc:
        raise SectionFormatError(str(exc)) from None


def dumps(f: Section) -> str:
    """Valid JSON with one term per line."""
    doc = section_to_dict(f)
    head = json.dumps({k: doc[k] for k in ("k", "l", "tag")})[:-1]
    if not doc["terms"]:
        return head + ', "terms": []}\n'
    lines = ",\n  ".join(json.dumps(t) for t in doc["terms"])
    return f'{head}, "terms": [\n  {lines}\n]}}\n'


def loads(text: str) -> Section:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SectionFormatError(f"invalid JSON: {exc}") from None
    return section_from_dict(doc)


def write(f: Section, path) -> None:
    Path(path).write_text(dumps(f))


def read(path) -> Section:
    return loads(Path(path).read_text())
