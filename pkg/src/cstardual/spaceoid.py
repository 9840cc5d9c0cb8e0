"""Finite spaceoids: groupoids of partial bijections carrying a rank-one
line-bundle structure.

Off-diagonal points are graphs of partial bijections between the finite base
sets; each point carries a one-dimensional fiber described, in a fixed unit
frame, by a composition phase ``c(p, q)`` per composable pair and an
involution phase ``nu(p)`` with ``(u_p)* = nu(p) u_{p*}``.  Diagonal Hom-sets
are implicit: they are always the full diagonal with canonical unit fibers,
which removes a class of invalid states.

A point of Hom(A,B) is addressed by the handle ``(A, B, i)`` with ``i`` the
index into the canonical (sorted by target/source labels) point order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .cstarcat import ValidationReport
from .errors import EndpointMismatch, InvalidMorphism, InvalidSpaceoid
from .numlin import DEFAULT_TOL, Tolerance

_PHASE_TOL = 1e-9


def _is_phase(z, tol=_PHASE_TOL) -> bool:
    return abs(abs(z) - 1.0) <= tol


class FiniteSpaceoid:
    """Finite non-full spaceoid.

    Parameters
    ----------
    objects : iterable of labels.
    base_sets : dict label -> iterable of base point labels (nonempty).
    points : dict (A, B) -> list of (target, source) label pairs, A != B.
        Lists are normalized to the canonical order sorted by (t, s); the
        ``nu``/``cphase`` keys are re-indexed accordingly.
    nu : dict (A, B, i) -> complex involution phase, defaults to 1.
    cphase : dict ((A,B,i), (B,C,j)) -> complex composition phase for
        composable off-diagonal pairs, defaults to 1.
    """

    def __init__(self, objects, base_sets, points, nu=None, cphase=None):
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("duplicate object labels")
        self.base_sets = {}
        for A in self.objects:
            labels = tuple(str(x) for x in base_sets[A])
            if len(set(labels)) != len(labels):
                raise ValueError(f"duplicate base labels at {A}")
            self.base_sets[A] = labels
        self.points = {}
        order_map = {}
        for A, B in product(self.objects, repeat=2):
            if A == B:
                continue
            raw = [(str(t), str(s)) for t, s in points.get((A, B), [])]
            canon = sorted(raw)
            order_map[(A, B)] = {old: canon.index(ts) for old, ts in enumerate(raw)}
            self.points[(A, B)] = canon
        self.nu = {}
        for (A, B, i), value in (nu or {}).items():
            self.nu[(A, B, order_map[(A, B)][i])] = complex(value)
        self.cphase = {}
        for (h1, h2), value in (cphase or {}).items():
            A, B, i = h1
            B2, C, j = h2
            k1 = (A, B, order_map[(A, B)][i])
            k2 = (B2, C, order_map[(B2, C)][j])
            self.cphase[(k1, k2)] = complex(value)
        self._index = {
            key: {ts: i for i, ts in enumerate(lst)} for key, lst in self.points.items()
        }
        for A, B in self.points:
            for i in range(len(self.points[(A, B)])):
                self.nu.setdefault((A, B, i), 1.0 + 0.0j)
        for h1, h2 in self._composable_pairs():
            self.cphase.setdefault((h1, h2), 1.0 + 0.0j)

    # -- geometry -------------------------------------------------------------

    def hom_points(self, A, B):
        """Handles of Hom(A,B) points in canonical order (A != B)."""
        return [(A, B, i) for i in range(len(self.points[(A, B)]))]

    def all_points(self):
        return [h for (A, B) in sorted(self.points) for h in self.hom_points(A, B)]

    def target(self, handle) -> str:
        A, B, i = handle
        return self.points[(A, B)][i][0]

    def source(self, handle) -> str:
        A, B, i = handle
        return self.points[(A, B)][i][1]

    def lookup(self, A, B, t, s):
        """Handle of the point of Hom(A,B) with the given target/source."""
        i = self._index[(A, B)].get((t, s))
        return None if i is None else (A, B, i)

    def star(self, handle):
        A, B, i = handle
        t, s = self.points[(A, B)][i]
        inv = self.lookup(B, A, s, t)
        if inv is None:
            raise InvalidSpaceoid(f"point {handle} has no inverse in Hom({B},{A})")
        return inv

    def compose(self, h1, h2):
        """Composite handle of h1 . h2, None when it lands on a diagonal or
        the pair is not composable; raises InvalidSpaceoid when closure fails.
        """
        A, B, _ = h1
        B2, C, _ = h2
        if B != B2:
            raise EndpointMismatch(f"{h1} and {h2} are not adjacent")
        if self.source(h1) != self.target(h2):
            return None
        if A == C:
            return None  # composite is the implicit identity at target(h1)
        out = self.lookup(A, C, self.target(h1), self.source(h2))
        if out is None:
            raise InvalidSpaceoid(f"closure fails: {h1} . {h2} has no composite point")
        return out

    def composable(self, h1, h2) -> bool:
        return h1[1] == h2[0] and self.source(h1) == self.target(h2)

    def c(self, h1, h2) -> complex:
        return self.cphase[(h1, h2)]

    def nu_of(self, handle) -> complex:
        return self.nu[handle]

    def _composable_pairs(self):
        pairs = []
        for A, B in sorted(self.points):
            for h1 in self.hom_points(A, B):
                for C in self.objects:
                    if C == B:
                        continue
                    for h2 in self.hom_points(B, C):
                        if self.source(h1) == self.target(h2):
                            pairs.append((h1, h2))
        return pairs

    # -- components -----------------------------------------------------------

    def components(self):
        """Maximal pair subgroupoids plus singleton components for unlinked
        base points, in deterministic order."""
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

        for A in self.objects:
            for x in self.base_sets[A]:
                parent[(A, x)] = (A, x)
        for A, B in self.points:
            for t, s in self.points[(A, B)]:
                union((A, t), (B, s))
        groups = {}
        for node in parent:
            groups.setdefault(find(node), []).append(node)
        comps = []
        for root in sorted(groups):
            nodes = groups[root]
            objs = sorted({A for A, _ in nodes})
            if len(nodes) != len(objs):
                raise InvalidSpaceoid(
                    f"component at {root} holds two base points of one object")
            diag = {A: x for A, x in nodes}
            pts = {}
            for A, B in permutations(objs, 2):
                h = self.lookup(A, B, diag[A], diag[B])
                if h is not None:
                    pts[(A, B)] = h
            comps.append(Component(tuple(objs), diag, pts))
        return comps

    def component_signature(self):
        """Multiset of linked object tuples, for isomorphism pruning."""
        sig = {}
        for comp in self.components():
            if len(comp.objects) > 1:
                sig[comp.objects] = sig.get(comp.objects, 0) + 1
        return sig


@dataclass
class Component:
    objects: tuple
    diag: dict    # object -> base point label
    points: dict  # (A, B) -> handle; the full pair groupoid when valid


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate_spaceoid(S: FiniteSpaceoid, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Exhaustive check of the spaceoid invariants; failures carry witnesses."""
    report = ValidationReport()
    ptol = max(_PHASE_TOL, tol.abs_eps)

    for A in S.objects:
        report.record("base_nonempty", len(S.base_sets[A]) > 0, f"({A})")

    for (A, B), pts in S.points.items():
        targets = [t for t, _ in pts]
        sources = [s for _, s in pts]
        report.record("target_injective", len(set(targets)) == len(targets), f"({A},{B})")
        report.record("source_injective", len(set(sources)) == len(sources), f"({A},{B})")
        ok_lbl = all(t in S.base_sets[A] and s in S.base_sets[B] for t, s in pts)
        report.record("labels_in_base", ok_lbl, f"({A},{B})")
    if not report.ok:
        return report

    for (A, B), pts in S.points.items():
        for i, (t, s) in enumerate(pts):
            inv = S.lookup(B, A, s, t)
            report.record("inverse_present", inv is not None, f"({A},{B}) point {i}")

    closure_ok = True
    for h1, h2 in S._composable_pairs():
        if h1[0] == h2[1]:
            ok = S.source(h2) == S.target(h1)
        else:
            try:
                S.compose(h1, h2)
                ok = True
            except InvalidSpaceoid:
                ok = False
        closure_ok = closure_ok and ok
        report.record("closure", ok, f"{h1}.{h2}")

    for h in S.all_points():
        report.record("nu_unimodular", _is_phase(S.nu_of(h), ptol), str(h),
                      abs(abs(S.nu_of(h)) - 1.0))
    for (h1, h2), cval in S.cphase.items():
        report.record("c_unimodular", _is_phase(cval, ptol), f"{h1},{h2}",
                      abs(abs(cval) - 1.0))

    if closure_ok and all(S.lookup(B, A, s, t) is not None
                          for (A, B), pts in S.points.items() for t, s in pts):
        _check_cocycle(S, report, ptol)
        try:
            S.components()
            report.record("holonomy_trivial", True, "")
        except InvalidSpaceoid as exc:
            report.record("holonomy_trivial", False, str(exc))

    # Vacuous on finite discrete base spaces: every section vanishes at
    # infinity and every map converges at infinity.  Kept as named checks so
    # the axiom-to-check map stays one-to-one.
    report.record("sections_vanish_at_infinity", True, "finite base")
    report.record("converging_at_infinity", True, "finite base")
    return report


def _check_cocycle(S, report, ptol):
    for h in S.all_points():
        dev = abs(S.nu_of(S.star(h)) - S.nu_of(h))
        report.record("nu_symmetric", dev <= 10 * ptol, str(h), dev)

    pairs = S._composable_pairs()
    for h1, h2 in pairs:
        h12 = S.compose(h1, h2)
        if h12 is None:
            # lands on the diagonal unit; positivity pins c(p, p*)
            if h2 == S.star(h1):
                dev = abs(S.c(h1, h2) - np.conj(S.nu_of(h1)))
                report.record("c_matches_nu_on_units", dev <= 10 * ptol,
                              f"{h1},{h2}", dev)
            continue
        lhs = np.conj(S.c(h1, h2)) * S.nu_of(h12)
        rhs = S.nu_of(h1) * S.nu_of(h2) * S.c(S.star(h2), S.star(h1))
        dev = abs(lhs - rhs)
        report.record("involution_antimultiplicative", dev <= 10 * ptol,
                      f"{h1},{h2}", dev)

    for h1, h2 in pairs:
        B, C = h2[0], h2[1]
        h12 = S.compose(h1, h2)
        for D in S.objects:
            if D == C:
                continue
            for h3 in S.hom_points(C, D):
                if S.source(h2) != S.target(h3):
                    continue
                h23 = S.compose(h2, h3)
                # c(h1,h2) c(h1.h2, h3) = c(h2,h3) c(h1, h2.h3) with
                # c(identity, .) = c(., identity) = 1 on diagonal composites
                lhs = S.c(h1, h2) * (S.c(h12, h3) if h12 is not None else 1.0)
                rhs = S.c(h2, h3) * (S.c(h1, h23) if h23 is not None else 1.0)
                dev = abs(lhs - rhs)
                report.record("cocycle", dev <= 10 * ptol, f"{h1},{h2},{h3}", dev)


# ---------------------------------------------------------------------------
# gauge transformations
# ---------------------------------------------------------------------------

def apply_gauge(S: FiniteSpaceoid, lam: dict) -> FiniteSpaceoid:
    """Rescale the unit frames by per-point phases: u'_p = lam[p] u_p.

    Missing entries default to 1.  Phases transform as
    c' = c lam_p lam_q / lam_{p.q} and nu' = nu conj(lam_p) / lam_{p*};
    composites landing on the canonically framed diagonal divide by 1.
    """
    get = lambda h: complex(lam.get(h, 1.0))
    nu = {}
    for h in S.all_points():
        nu[h] = S.nu_of(h) * np.conj(get(h)) / get(S.star(h))
    cphase = {}
    for (h1, h2), cval in S.cphase.items():
        h12 = S.compose(h1, h2)
        denom = get(h12) if h12 is not None else 1.0
        cphase[(h1, h2)] = cval * get(h1) * get(h2) / denom
    return FiniteSpaceoid(S.objects, S.base_sets, S.points, nu, cphase)


def gauge_fix(S: FiniteSpaceoid):
    """Trivialize the cocycle on every maximal pair subgroupoid.

    Frames on the star of edges out of each component's least object are the
    spanning tree; the remaining frames are products of tree frames.  On the
    result every stored phase is 1 (pair-groupoid cohomology is trivial).
    Returns ``(S_fixed, lam)`` with ``lam`` the applied per-point phase
    change.  Idempotent.
    """
    lam = {}
    for comp in S.components():
        if len(comp.objects) < 2:
            continue
        root = comp.objects[0]
        others = [o for o in comp.objects if o != root]
        for o in others:
            h_ro = comp.points[(root, o)]
            h_or = comp.points[(o, root)]
            lam[h_ro] = 1.0 + 0.0j
            lam[h_or] = S.nu_of(h_ro)
        for o1, o2 in permutations(others, 2):
            h = comp.points[(o1, o2)]
            h_1r = comp.points[(o1, root)]
            h_r2 = comp.points[(root, o2)]
            lam[h] = lam[h_1r] * lam[h_r2] * S.c(h_1r, h_r2)
    return apply_gauge(S, lam), lam


def is_gauge_trivial(S: FiniteSpaceoid, tol=_PHASE_TOL) -> bool:
    return all(abs(v - 1.0) <= 100 * tol for v in S.nu.values()) and \
        all(abs(v - 1.0) <= 100 * tol for v in S.cphase.values())


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

@dataclass
class SpaceoidMorphism:
    """Bundle morphism: base maps forward, fiber scalars backward.

    ``scalars[p]`` expresses, in the unit frames, the fiberwise linear map
    from the pulled-back fiber over the image of p to the fiber over p.
    Diagonal fibers carry canonical units, so their scalar is fixed at 1 and
    only off-diagonal points are stored.  The point map is determined by the
    base maps: groupoid functoriality forces target/source compatibility.
    """

    source: FiniteSpaceoid
    target: FiniteSpaceoid
    obj_map: dict
    base_maps: dict  # A -> {x -> f(x)}
    scalars: dict = field(default_factory=dict)  # source handle -> complex

    def point_map(self, handle):
        A, B, _ = handle
        A2, B2 = self.obj_map[A], self.obj_map[B]
        t2 = self.base_maps[A][self.source.target(handle)]
        s2 = self.base_maps[B][self.source.source(handle)]
        out = self.target.lookup(A2, B2, t2, s2)
        if out is None:
            raise InvalidMorphism(f"point {handle} has no image in Hom({A2},{B2})")
        return out

    def scalar(self, handle) -> complex:
        return complex(self.scalars.get(handle, 1.0))


def identity_morphism(S: FiniteSpaceoid) -> SpaceoidMorphism:
    return SpaceoidMorphism(
        S, S, {A: A for A in S.objects},
        {A: {x: x for x in S.base_sets[A]} for A in S.objects}, {})


def validate_morphism(m: SpaceoidMorphism, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Groupoid-functor and fiberwise *-functor conditions, plus the two
    at-infinity conditions that hold vacuously over finite bases."""
    report = ValidationReport()
    ptol = max(_PHASE_TOL, tol.abs_eps)
    src, tgt = m.source, m.target

    ok = sorted(m.obj_map.keys()) == sorted(src.objects) and \
        sorted(m.obj_map.values()) == sorted(tgt.objects)
    report.record("object_bijective", ok, str(m.obj_map))
    if not ok:
        return report
    for A in src.objects:
        bm = m.base_maps.get(A, {})
        ok = all(x in bm and bm[x] in tgt.base_sets[m.obj_map[A]]
                 for x in src.base_sets[A])
        report.record("base_map_total", ok, f"({A})")
    if not report.ok:
        return report

    images = {}
    for h in src.all_points():
        try:
            images[h] = m.point_map(h)
            report.record("point_map_defined", True, str(h))
        except InvalidMorphism as exc:
            report.record("point_map_defined", False, str(exc))
    if not report.ok:
        return report

    for h in src.all_points():
        dev = abs(abs(m.scalar(h)) - 1.0)
        report.record("scalar_unimodular", dev <= 10 * ptol, str(h), dev)
        lhs = tgt.nu_of(images[h]) * m.scalar(src.star(h))
        rhs = np.conj(m.scalar(h)) * src.nu_of(h)
        dev = abs(lhs - rhs)
        report.record("scalar_involution", dev <= 10 * ptol, str(h), dev)

    for h1, h2 in src._composable_pairs():
        h12 = src.compose(h1, h2)
        g1, g2 = images[h1], images[h2]
        lhs = (m.scalar(h12) if h12 is not None else 1.0) * tgt.c(g1, g2)
        rhs = m.scalar(h1) * m.scalar(h2) * src.c(h1, h2)
        dev = abs(lhs - rhs)
        report.record("scalar_multiplicative", dev <= 10 * ptol, f"{h1},{h2}", dev)

    # Components must map onto components covering exactly the corresponding
    # objects; otherwise the pull-back of sections fails to be multiplicative
    # (a composite would pull back past a point with no factorization).  This
    # is the spectrum-side shadow of the non-degeneracy condition on functors.
    comp_of_src = {}
    for comp in src.components():
        for A, x in comp.diag.items():
            comp_of_src[(A, x)] = comp.objects
    comp_of_tgt = {}
    for comp in tgt.components():
        for A, x in comp.diag.items():
            comp_of_tgt[(A, x)] = comp.objects
    for A in src.objects:
        for x in src.base_sets[A]:
            image_objs = tuple(sorted(m.obj_map[o] for o in comp_of_src[(A, x)]))
            target_objs = comp_of_tgt[(m.obj_map[A], m.base_maps[A][x])]
            report.record("component_preserving", image_objs == target_objs,
                          f"({A},{x}): {image_objs} vs {target_objs}")

    report.record("converging_at_infinity", True, "finite base")
    report.record("vanishing_at_infinity", True, "finite base")
    return report


def compose_morphisms(fst: SpaceoidMorphism, snd: SpaceoidMorphism) -> SpaceoidMorphism:
    """Composite of fst : E1 -> E2 with snd : E2 -> E3.

    Object, base and point maps compose; frame scalars multiply along the
    chain: the result scalar at p is fst's scalar at p times snd's scalar at
    the image of p.
    """
    if fst.target is not snd.source:
        raise EndpointMismatch("morphisms do not share the middle spaceoid")
    obj = {A: snd.obj_map[fst.obj_map[A]] for A in fst.source.objects}
    base = {}
    for A in fst.source.objects:
        mid = fst.obj_map[A]
        base[A] = {x: snd.base_maps[mid][fst.base_maps[A][x]]
                   for x in fst.source.base_sets[A]}
    scalars = {}
    for h in fst.source.all_points():
        scalars[h] = fst.scalar(h) * snd.scalar(fst.point_map(h))
    return SpaceoidMorphism(fst.source, snd.target, obj, base, scalars)


def morphisms_equal(m1: SpaceoidMorphism, m2: SpaceoidMorphism, tol=1e-6):
    """(equal, max scalar deviation); maps must agree exactly."""
    if m1.source is not m2.source or m1.target is not m2.target:
        return False, float("inf")
    if m1.obj_map != m2.obj_map or m1.base_maps != m2.base_maps:
        return False, float("inf")
    dev = 0.0
    for h in m1.source.all_points():
        if m1.point_map(h) != m2.point_map(h):
            return False, float("inf")
        dev = max(dev, abs(m1.scalar(h) - m2.scalar(h)))
    return dev <= tol, dev


def invert_morphism(m: SpaceoidMorphism) -> SpaceoidMorphism:
    """Inverse of an invertible morphism (bijective object/base/point maps)."""
    obj = {v: k for k, v in m.obj_map.items()}
    if len(obj) != len(m.obj_map):
        raise InvalidMorphism("object map is not a bijection")
    base = {}
    for A in m.source.objects:
        A2 = m.obj_map[A]
        fwd = m.base_maps[A]
        if len(set(fwd.values())) != len(fwd) or \
                set(fwd.values()) != set(m.target.base_sets[A2]):
            raise InvalidMorphism(f"base map at {A} is not a bijection")
        base[A2] = {v: k for k, v in fwd.items()}
    scalars = {}
    for h in m.source.all_points():
        scalars[m.point_map(h)] = 1.0 / m.scalar(h)
    return SpaceoidMorphism(m.target, m.source, obj, base, scalars)


# ---------------------------------------------------------------------------
# isomorphism search
# ---------------------------------------------------------------------------

def spaceoids_isomorphic(S1: FiniteSpaceoid, S2: FiniteSpaceoid,
                         tol: Tolerance = DEFAULT_TOL):
    """Invertible morphism S1 -> S2, or None when no isomorphism exists.

    Both sides are gauge-fixed first, so only combinatorics branch: object
    bijections compatible with the base-set sizes and the multiset of linked
    components; point matching inside a component is then forced by sources
    and targets.  Exhaustive over object bijections, capped at 8 objects.
    """
    if len(S1.objects) != len(S2.objects):
        return None
    if len(S1.objects) > 8:
        raise ValueError("isomorphism search capped at 8 objects")
    F1, lam1 = gauge_fix(S1)
    F2, lam2 = gauge_fix(S2)
    comps1 = [c for c in F1.components() if len(c.objects) > 1]
    comps2 = [c for c in F2.components() if len(c.objects) > 1]

    src_objs = sorted(S1.objects)
    for perm in permutations(sorted(S2.objects)):
        obj_map = dict(zip(src_objs, perm))
        if any(len(S1.base_sets[A]) != len(S2.base_sets[obj_map[A]])
               for A in S1.objects):
            continue
        sig1 = {}
        for comp in comps1:
            key = tuple(sorted(obj_map[o] for o in comp.objects))
            sig1.setdefault(key, []).append(comp)
        sig2 = {}
        for comp in comps2:
            sig2.setdefault(comp.objects, []).append(comp)
        if {k: len(v) for k, v in sig1.items()} != \
                {k: len(v) for k, v in sig2.items()}:
            continue
        base = {A: {} for A in S1.objects}
        for key in sig1:
            for c1, c2 in zip(sig1[key], sig2[key]):
                for o in c1.objects:
                    base[o][c1.diag[o]] = c2.diag[obj_map[o]]
        feasible = True
        for A in S1.objects:
            used = set(base[A].values())
            free1 = [x for x in F1.base_sets[A] if x not in base[A]]
            free2 = [x for x in F2.base_sets[obj_map[A]] if x not in used]
            if len(free1) != len(free2):
                feasible = False
                break
            base[A].update(dict(zip(free1, free2)))
        if not feasible:
            continue
        relabel = SpaceoidMorphism(F1, F2, obj_map, base, {})
        if not validate_morphism(relabel, tol).ok:
            continue
        to_fixed = SpaceoidMorphism(
            S1, F1, {A: A for A in S1.objects},
            {A: {x: x for x in S1.base_sets[A]} for A in S1.objects},
            dict(lam1))
        from_fixed = SpaceoidMorphism(
            F2, S2, {A: A for A in S2.objects},
            {A: {x: x for x in S2.base_sets[A]} for A in S2.objects},
            {h: 1.0 / complex(lam2.get(h, 1.0)) for h in F2.all_points()})
        m = compose_morphisms(compose_morphisms(to_fixed, relabel), from_fixed)
        if validate_morphism(m, tol).ok:
            return m
    return None
