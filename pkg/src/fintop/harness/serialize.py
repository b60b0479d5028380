"""JSON reading and writing.

References between documents are either inline objects, names defined in
the enclosing fixture, or file paths relative to the referring document.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from fintop._canon import canon
from fintop.errors import InputError
from fintop.fincat import FinCategory, Morphism, validate_category
from fintop.presheaf import NatTrans, Presheaf, validate_nat_trans, validate_presheaf

__all__ = [
    "Fixture",
    "Loader",
    "load_document",
    "load_fixture",
    "detect_kind",
    "category_to_json",
    "presheaf_to_json",
    "nat_trans_to_json",
    "dumps",
]


def dumps(obj):
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def detect_kind(doc):
    if not isinstance(doc, dict):
        raise InputError("document is not a JSON object")
    if "presheaves" in doc or "expected" in doc:
        return "fixture"
    if "objects" in doc:
        return "category"
    if "covers" in doc:
        return "topology"
    if "components" in doc:
        return "nat_trans"
    if "sets" in doc:
        return "presheaf"
    raise InputError("cannot tell what kind of document this is")


def _require(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"missing key {key!r}", where)
    return doc[key]


@dataclass
class Fixture:
    name: str
    description: str = ""
    categories: dict = field(default_factory=dict)
    presheaves: dict = field(default_factory=dict)
    arrows: dict = field(default_factory=dict)
    topologies: dict = field(default_factory=dict)
    expected: list = field(default_factory=list)
    roles: dict = field(default_factory=dict)

    @property
    def f(self):
        return self.arrows[self.roles.get("f", "f")]

    @property
    def h(self):
        return self.arrows[self.roles.get("h", "h")]

    @property
    def topology(self):
        name = self.roles.get("topology", "J")
        return self.topologies.get(name)

    def expected_value(self, query):
        for e in self.expected:
            if e["query"] == query:
                return e["value"]
        raise KeyError(query)


class Loader:
    def __init__(self, base_dir=".", validate=True):
        self.base_dir = Path(base_dir)
        self.validate = validate
        self.names = {"category": {}, "presheaf": {}, "nat_trans": {}, "topology": {}}
        self._files = {}

    def _ref(self, ref, kind, where):
        if isinstance(ref, dict):
            return self.parse(ref, kind, where)
        if not isinstance(ref, str):
            raise InputError(f"bad {kind} reference", where)
        if ref in self.names[kind]:
            return self.names[kind][ref]
        path = (self.base_dir / ref).resolve()
        if not path.is_file():
            raise InputError(f"unknown {kind} reference {ref!r}", where)
        key = (str(path), kind)
        if key not in self._files:
            sub = Loader(path.parent, self.validate)
            sub._files = self._files
            self._files[key] = sub.parse(_read_json(path), kind, str(path))
        return self._files[key]

    def parse(self, doc, kind=None, where="<doc>"):
        kind = kind or detect_kind(doc)
        return getattr(self, f"_parse_{kind}")(doc, where)

    def _parse_category(self, doc, where):
        objects = _require(doc, "objects", where)
        try:
            arrows = [Morphism(m["id"], m["dom"], m["cod"]) for m in doc.get("morphisms", [])]
            compose = [(e["g"], e["f"], e["gf"]) for e in doc.get("compose", [])]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed morphism or compose entry ({exc})", where) from None
        known = set(map(str, objects))
        for m in arrows:
            if m.dom not in known or m.cod not in known:
                raise InputError(f"morphism {m.id!r} has an undeclared endpoint", where)
        c = FinCategory.from_generators([str(o) for o in objects], arrows, compose)
        if self.validate:
            rep = validate_category(c)
            if not rep.ok:
                raise InputError(rep.summary(), where)
        return c

    def _parse_presheaf(self, doc, where):
        c = self._ref(_require(doc, "category", where), "category", f"{where}.category")
        sets = _require(doc, "sets", where)
        action = doc.get("action", {})
        try:
            P = Presheaf(
                c,
                {x: [str(a) for a in sets.get(x, [])] for x in c.objects},
                {m: {str(k): str(v) for k, v in mp.items()} for m, mp in action.items()},
            )
        except Exception as exc:
            raise InputError(f"malformed presheaf ({exc})", where) from None
        if self.validate:
            rep = validate_presheaf(P)
            if not rep.ok:
                raise InputError(rep.summary(), where)
        return P

    def _parse_nat_trans(self, doc, where):
        P = self._ref(_require(doc, "source", where), "presheaf", f"{where}.source")
        Q = self._ref(_require(doc, "target", where), "presheaf", f"{where}.target")
        comps = _require(doc, "components", where)
        try:
            t = NatTrans(P, Q, {x: {str(k): str(v) for k, v in comps.get(x, {}).items()} for x in P.base.objects})
        except Exception as exc:
            raise InputError(f"malformed transformation ({exc})", where) from None
        if self.validate:
            rep = validate_nat_trans(t)
            if not rep.ok:
                raise InputError(rep.summary(), where)
        return t

    def _parse_topology(self, doc, where):
        from fintop.sheaves import GrothTopology, saturate, validate_topology

        c = self._ref(_require(doc, "category", where), "category", f"{where}.category")
        covers = _require(doc, "covers", where)
        try:
            gens = {x: [frozenset(s) for s in covers.get(x, [])] for x in c.objects}
        except TypeError:
            raise InputError("malformed covers", where) from None
        for x, sieves in gens.items():
            for s in sieves:
                bad = [m for m in s if m not in c._mor or c.cod(m) != x]
                if bad:
                    raise InputError(f"arrow {bad[0]!r} is not an arrow into {x}", where)
        if doc.get("saturate", False):
            J = saturate(c, gens)
        else:
            J = GrothTopology(c, gens)
        if self.validate:
            rep = validate_topology(J)
            if not rep.ok:
                raise InputError(rep.summary(), where)
        return J

    def _parse_fixture(self, doc, where):
        fx = Fixture(name=doc.get("name", where), description=doc.get("description", ""))
        for key, kind, store in (
            ("categories", "category", fx.categories),
            ("presheaves", "presheaf", fx.presheaves),
            ("arrows", "nat_trans", fx.arrows),
            ("topologies", "topology", fx.topologies),
        ):
            for name, sub in doc.get(key, {}).items():
                obj = self._ref(sub, kind, f"{where}.{key}.{name}")
                if kind == "presheaf" and obj.name is None:
                    obj.name = name
                store[name] = obj
                self.names[kind][name] = obj
        fx.expected = list(doc.get("expected", []))
        fx.roles = dict(doc.get("roles", {}))
        return fx


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON ({exc.msg} at line {exc.lineno})", str(path)) from None
    except OSError as exc:
        raise InputError(str(exc), str(path)) from None


def load_document(path, validate=True):
    """Load any supported document; returns ``(kind, object)``."""
    path = Path(path)
    doc = _read_json(path)
    kind = detect_kind(doc)
    return kind, Loader(path.parent, validate).parse(doc, kind, str(path))


def load_fixture(path, validate=True):
    kind, obj = load_document(path, validate)
    if kind != "fixture":
        raise InputError("not a fixture document", str(path))
    return obj


def category_to_json(c):
    return {
        "objects": list(c.objects),
        "morphisms": [
            {"id": m.id, "dom": m.dom, "cod": m.cod} for m in c.morphisms if not c.is_identity(m.id)
        ],
        "compose": [
            {"g": g, "f": f, "gf": gf}
            for (g, f), gf in c.compose_table.items()
            if not c.is_identity(g) and not c.is_identity(f)
        ],
    }


def presheaf_to_json(P, category_ref=None):
    c = P.base
    return {
        "category": category_ref if category_ref is not None else category_to_json(c),
        "sets": {x: [canon(a) for a in P.sets[x]] for x in c.objects},
        "action": {
            m.id: {canon(a): canon(b) for a, b in P.action[m.id].items()}
            for m in c.morphisms
            if not c.is_identity(m.id)
        },
    }


def nat_trans_to_json(t, source_ref=None, target_ref=None):
    return {
        "source": source_ref if source_ref is not None else presheaf_to_json(t.source),
        "target": target_ref if target_ref is not None else presheaf_to_json(t.target),
        "components": {
            x: {canon(a): canon(b) for a, b in comp.items()} for x, comp in t.components.items()
        },
    }
