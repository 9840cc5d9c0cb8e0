"""JSON schemas and (de)serialization for every value the CLI exchanges.

Complex numbers are [re, im] pairs of decimal doubles throughout; no string
parsing.  Composition tensors are nested arrays indexed [i][j][k] for the
coefficient of basis vector k of Hom(A,C) in b_i . b_j; involution matrices
are indexed [row][col] with rows over the opposite Hom-set.  Spaceoid point
ids are strings, unique within a document.
"""

from __future__ import annotations

import json

import numpy as np

from .cstarcat import FiniteCStarCategory, HilbertBimodule, StarFunctor, one_object_category
from .errors import SchemaError
from .spaceoid import FiniteSpaceoid, SpaceoidMorphism


# ---------------------------------------------------------------------------
# complex leaves
# ---------------------------------------------------------------------------

def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]

def array_to_json(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return complex_to_json(a[()])
    return [array_to_json(row) for row in a]

def _expect(cond, path, message):
    if not cond:
        raise SchemaError(path, message)

def json_to_complex(v, path):
    _expect(isinstance(v, (list, tuple)) and len(v) == 2, path,
            "expected [re, im] pair")
    _expect(all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v),
            path, "re/im must be numbers")
    _expect(all(np.isfinite(x) for x in v), path, "entries must be finite")
    return complex(v[0], v[1])

def json_to_array(v, shape, path):
    """Nested [re, im] arrays into a complex ndarray of the given shape."""
    out = np.zeros(shape, dtype=complex)
    if 0 in shape:
        return out
    def fill(node, idx, dims):
        if not dims:
            out[idx] = json_to_complex(node, f"{path}{list(idx)}")
            return
        _expect(isinstance(node, list) and len(node) == dims[0],
                f"{path}{list(idx)}", f"expected list of length {dims[0]}")
        for i, sub in enumerate(node):
            fill(sub, idx + (i,), dims[1:])
    fill(v, (), list(shape))
    return out


def _pair_key(A, B):
    return f"{A}|{B}"

def _split_key(key, parts, path):
    bits = key.split("|")
    _expect(len(bits) == parts, path, f"expected {parts} '|'-separated labels")
    return tuple(bits)


# ---------------------------------------------------------------------------
# categories
# ---------------------------------------------------------------------------

def category_to_json(cat: FiniteCStarCategory):
    objs = list(cat.objects)
    doc = {
        "objects": objs,
        "dims": {_pair_key(A, B): cat.dim(A, B) for A in objs for B in objs},
        "comp": {},
        "invol": {},
        "units": {A: array_to_json(cat.unit(A)) for A in objs},
    }
    for (A, B, C), T in sorted(cat.comp.items()):
        if T.size:
            doc["comp"][f"{A}|{B}|{C}"] = array_to_json(T)
    for (A, B), J in sorted(cat.invol.items()):
        if J.size:
            doc["invol"][_pair_key(A, B)] = array_to_json(J)
    return doc


def category_from_json(doc, path="category"):
    _expect(isinstance(doc, dict), path, "expected object")
    for key in ("objects", "dims", "units"):
        _expect(key in doc, path, f"missing field '{key}'")
    objs = doc["objects"]
    _expect(isinstance(objs, list) and objs and
            all(isinstance(o, str) for o in objs), f"{path}.objects",
            "expected nonempty list of strings")
    dims = {}
    for key, val in doc["dims"].items():
        A, B = _split_key(key, 2, f"{path}.dims.{key}")
        _expect(isinstance(val, int) and val >= 0, f"{path}.dims.{key}",
                "expected nonnegative integer")
        dims[(A, B)] = val
    for A in objs:
        for B in objs:
            _expect((A, B) in dims, f"{path}.dims", f"missing '{A}|{B}'")
    comp = {}
    for key, val in doc.get("comp", {}).items():
        A, B, C = _split_key(key, 3, f"{path}.comp.{key}")
        shape = (dims[(A, B)], dims[(B, C)], dims[(A, C)])
        comp[(A, B, C)] = json_to_array(val, shape, f"{path}.comp.{key}")
    invol = {}
    for key, val in doc.get("invol", {}).items():
        A, B = _split_key(key, 2, f"{path}.invol.{key}")
        shape = (dims[(B, A)], dims[(A, B)])
        invol[(A, B)] = json_to_array(val, shape, f"{path}.invol.{key}")
    units = {}
    for A in objs:
        _expect(A in doc["units"], f"{path}.units", f"missing '{A}'")
        units[A] = json_to_array(doc["units"][A], (dims[(A, A)],),
                                 f"{path}.units.{A}")
    try:
        return FiniteCStarCategory(objs, dims, comp, invol, units)
    except ValueError as exc:
        raise SchemaError(path, str(exc))


# ---------------------------------------------------------------------------
# spaceoids
# ---------------------------------------------------------------------------

def point_id(S: FiniteSpaceoid, handle):
    A, B, _ = handle
    return f"{A}|{B}|{S.target(handle)}|{S.source(handle)}"


def spaceoid_to_json(S: FiniteSpaceoid):
    doc = {
        "objects": list(S.objects),
        "base_sets": {A: list(S.base_sets[A]) for A in S.objects},
        "points": {},
        "phases": [],
    }
    for (A, B), pts in sorted(S.points.items()):
        doc["points"][_pair_key(A, B)] = [
            {"id": point_id(S, (A, B, i)), "t": t, "s": s,
             "nu": complex_to_json(S.nu_of((A, B, i)))}
            for i, (t, s) in enumerate(pts)
        ]
    for (h1, h2), c in sorted(S.cphase.items()):
        doc["phases"].append({"p": point_id(S, h1), "q": point_id(S, h2),
                              "c": complex_to_json(c)})
    return doc


def spaceoid_from_json(doc, path="spaceoid"):
    _expect(isinstance(doc, dict), path, "expected object")
    for key in ("objects", "base_sets"):
        _expect(key in doc, path, f"missing field '{key}'")
    objs = doc["objects"]
    _expect(isinstance(objs, list) and objs and
            all(isinstance(o, str) for o in objs), f"{path}.objects",
            "expected nonempty list of strings")
    base = {}
    for A in objs:
        _expect(A in doc["base_sets"], f"{path}.base_sets", f"missing '{A}'")
        labels = doc["base_sets"][A]
        _expect(isinstance(labels, list) and labels, f"{path}.base_sets.{A}",
                "expected nonempty list")
        base[A] = [str(x) for x in labels]
    points = {}
    nu = {}
    ids = {}
    for key, lst in doc.get("points", {}).items():
        A, B = _split_key(key, 2, f"{path}.points.{key}")
        _expect(A != B, f"{path}.points.{key}", "diagonal points are implicit")
        _expect(isinstance(lst, list), f"{path}.points.{key}", "expected list")
        pts = []
        for i, entry in enumerate(lst):
            here = f"{path}.points.{key}[{i}]"
            _expect(isinstance(entry, dict) and {"id", "t", "s"} <= set(entry),
                    here, "expected {id, t, s[, nu]}")
            pid = str(entry["id"])
            _expect(pid not in ids, here, f"duplicate point id '{pid}'")
            ids[pid] = (A, B, i)
            pts.append((str(entry["t"]), str(entry["s"])))
            if "nu" in entry:
                nu[(A, B, i)] = json_to_complex(entry["nu"], f"{here}.nu")
        points[(A, B)] = pts
    cphase = {}
    for n, entry in enumerate(doc.get("phases", [])):
        here = f"{path}.phases[{n}]"
        _expect(isinstance(entry, dict) and {"p", "q", "c"} <= set(entry),
                here, "expected {p, q, c}")
        for which in ("p", "q"):
            _expect(str(entry[which]) in ids, f"{here}.{which}",
                    f"unknown point id '{entry[which]}'")
        h1, h2 = ids[str(entry["p"])], ids[str(entry["q"])]
        _expect(h1[1] == h2[0], here, "phase pair is not adjacent")
        cphase[(h1, h2)] = json_to_complex(entry["c"], f"{here}.c")
    try:
        return FiniteSpaceoid(objs, base, points, nu, cphase)
    except ValueError as exc:
        raise SchemaError(path, str(exc))


# ---------------------------------------------------------------------------
# bimodules
# ---------------------------------------------------------------------------

def _algebra_to_json(alg: FiniteCStarCategory):
    lbl = alg.objects[0]
    return {
        "dim": alg.dim(lbl, lbl),
        "comp": array_to_json(alg.comp[(lbl, lbl, lbl)]),
        "invol": array_to_json(alg.invol[(lbl, lbl)]),
        "unit": array_to_json(alg.unit(lbl)),
    }


def _algebra_from_json(doc, label, path):
    _expect(isinstance(doc, dict), path, "expected object")
    for key in ("dim", "comp", "invol", "unit"):
        _expect(key in doc, path, f"missing field '{key}'")
    d = doc["dim"]
    _expect(isinstance(d, int) and d >= 1, f"{path}.dim", "expected positive integer")
    comp = json_to_array(doc["comp"], (d, d, d), f"{path}.comp")
    invol = json_to_array(doc["invol"], (d, d), f"{path}.invol")
    unit = json_to_array(doc["unit"], (d,), f"{path}.unit")
    return one_object_category(comp, invol, unit, label)


def bimodule_to_json(M: HilbertBimodule):
    return {
        "algA": _algebra_to_json(M.algA),
        "algB": _algebra_to_json(M.algB),
        "module_dim": M.module_dim,
        "left_action": array_to_json(M.left_action),
        "right_action": array_to_json(M.right_action),
        "ipA": array_to_json(M.ipA),
        "ipB": array_to_json(M.ipB),
    }


def bimodule_from_json(doc, path="bimodule"):
    _expect(isinstance(doc, dict), path, "expected object")
    for key in ("algA", "algB", "module_dim", "left_action", "right_action",
                "ipA", "ipB"):
        _expect(key in doc, path, f"missing field '{key}'")
    algA = _algebra_from_json(doc["algA"], "algA", f"{path}.algA")
    algB = _algebra_from_json(doc["algB"], "algB", f"{path}.algB")
    m = doc["module_dim"]
    _expect(isinstance(m, int) and m >= 0, f"{path}.module_dim",
            "expected nonnegative integer")
    da = algA.dim("algA", "algA")
    db = algB.dim("algB", "algB")
    try:
        return HilbertBimodule(
            algA, algB, m,
            json_to_array(doc["left_action"], (da, m, m), f"{path}.left_action"),
            json_to_array(doc["right_action"], (m, db, m), f"{path}.right_action"),
            json_to_array(doc["ipA"], (m, m, da), f"{path}.ipA"),
            json_to_array(doc["ipB"], (m, m, db), f"{path}.ipB"))
    except ValueError as exc:
        raise SchemaError(path, str(exc))


# ---------------------------------------------------------------------------
# functors and morphisms
# ---------------------------------------------------------------------------

def functor_to_json(F: StarFunctor):
    return {
        "kind": "star_functor",
        "source": category_to_json(F.source),
        "target": category_to_json(F.target),
        "obj_map": dict(F.obj_map),
        "hom_maps": {
            _pair_key(A, B): array_to_json(H)
            for (A, B), H in sorted(F.hom_maps.items()) if H.size
        },
    }


def functor_from_json(doc, path="functor"):
    _expect(isinstance(doc, dict), path, "expected object")
    _expect(doc.get("kind") == "star_functor", f"{path}.kind",
            "expected 'star_functor'")
    for key in ("source", "target", "obj_map", "hom_maps"):
        _expect(key in doc, path, f"missing field '{key}'")
    src = category_from_json(doc["source"], f"{path}.source")
    tgt = category_from_json(doc["target"], f"{path}.target")
    obj_map = doc["obj_map"]
    _expect(isinstance(obj_map, dict), f"{path}.obj_map", "expected object")
    _expect(sorted(obj_map) == sorted(src.objects), f"{path}.obj_map",
            "keys must be the source objects")
    _expect(sorted(obj_map.values()) == sorted(tgt.objects), f"{path}.obj_map",
            "values must enumerate the target objects")
    homs = {}
    for A in src.objects:
        for B in src.objects:
            key = _pair_key(A, B)
            shape = (tgt.dim(obj_map[A], obj_map[B]), src.dim(A, B))
            if key in doc["hom_maps"]:
                homs[(A, B)] = json_to_array(doc["hom_maps"][key], shape,
                                             f"{path}.hom_maps.{key}")
            else:
                _expect(0 in shape, f"{path}.hom_maps", f"missing '{key}'")
                homs[(A, B)] = np.zeros(shape, dtype=complex)
    return StarFunctor(src, tgt, dict(obj_map), homs)


def morphism_to_json(m: SpaceoidMorphism):
    return {
        "kind": "spaceoid_morphism",
        "source": spaceoid_to_json(m.source),
        "target": spaceoid_to_json(m.target),
        "obj_map": dict(m.obj_map),
        "base_maps": {A: dict(m.base_maps[A]) for A in m.source.objects},
        "scalars": {
            point_id(m.source, h): complex_to_json(m.scalar(h))
            for h in m.source.all_points()
        },
    }


def morphism_from_json(doc, path="morphism"):
    _expect(isinstance(doc, dict), path, "expected object")
    _expect(doc.get("kind") == "spaceoid_morphism", f"{path}.kind",
            "expected 'spaceoid_morphism'")
    for key in ("source", "target", "obj_map", "base_maps"):
        _expect(key in doc, path, f"missing field '{key}'")
    src = spaceoid_from_json(doc["source"], f"{path}.source")
    tgt = spaceoid_from_json(doc["target"], f"{path}.target")
    obj_map = doc["obj_map"]
    _expect(isinstance(obj_map, dict), f"{path}.obj_map", "expected object")
    _expect(sorted(obj_map) == sorted(src.objects), f"{path}.obj_map",
            "keys must be the source objects")
    _expect(set(obj_map.values()) <= set(tgt.objects), f"{path}.obj_map",
            "values must be target objects")
    base_maps = {}
    for A in src.objects:
        _expect(A in doc["base_maps"], f"{path}.base_maps", f"missing '{A}'")
        bm = doc["base_maps"][A]
        _expect(isinstance(bm, dict), f"{path}.base_maps.{A}", "expected object")
        base_maps[A] = {str(k): str(v) for k, v in bm.items()}
    ids = {point_id(src, h): h for h in src.all_points()}
    scalars = {}
    for pid, val in doc.get("scalars", {}).items():
        _expect(pid in ids, f"{path}.scalars.{pid}", "unknown point id")
        scalars[ids[pid]] = json_to_complex(val, f"{path}.scalars.{pid}")
    return SpaceoidMorphism(src, tgt, dict(obj_map), base_maps, scalars)


# ---------------------------------------------------------------------------
# gelfand data
# ---------------------------------------------------------------------------

def gelfand_to_json(G):
    return {
        "diag": {A: array_to_json(M) for A, M in sorted(G.diag.items())},
        "hom": {_pair_key(A, B): array_to_json(M)
                for (A, B), M in sorted(G.hat.items()) if M.size},
        "frames": {_pair_key(A, B): array_to_json(M)
                   for (A, B), M in sorted(G.frames.items()) if M.size},
    }


# ---------------------------------------------------------------------------
# document detection
# ---------------------------------------------------------------------------

def detect_kind(doc) -> str:
    if not isinstance(doc, dict):
        raise SchemaError("$", "top-level value must be an object")
    if doc.get("kind") in ("star_functor", "spaceoid_morphism"):
        return doc["kind"]
    if "dims" in doc:
        return "category"
    if "base_sets" in doc:
        return "spaceoid"
    if "algA" in doc:
        return "bimodule"
    raise SchemaError("$", "cannot determine document kind")


def load_document(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} column {exc.colno}", exc.msg)
    kind = detect_kind(doc)
    parser = {
        "category": category_from_json,
        "spaceoid": spaceoid_from_json,
        "bimodule": bimodule_from_json,
        "star_functor": functor_from_json,
        "spaceoid_morphism": morphism_from_json,
    }[kind]
    return kind, parser(doc)


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)
