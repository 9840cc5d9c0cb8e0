"""Finite-dimensional commutative C*-categories as structure tensors.

A category is stored per Hom-set: composition tensors ``comp[(A,B,C)]`` with
``comp[i,j,k]`` the coefficient of basis vector k of Hom(A,C) in b_i . b_j,
conjugate-linear involution matrices ``invol[(A,B)]`` acting as
``x* = J @ conj(x)``, and unit vectors on the diagonals.  Characters of the
diagonal algebras are extracted numerically and everything downstream
(corners, orbit classes, norms, the spectrum construction) is built on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import (
    BimoduleAxiomViolation,
    CornerDimensionExceedsOne,
    DiagonalNotSemisimple,
    HolonomyViolation,
)
from .numlin import DEFAULT_TOL, Tolerance, hermitian_eig, max_abs, simultaneous_diag
from .rng import Xoshiro256StarStar

_FALLBACK_SEED = 0xA1C0DE


# ---------------------------------------------------------------------------
# validation reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckFailure:
    check: str
    witness: str
    deviation: float = 0.0


@dataclass
class ValidationReport:
    """Outcome of an axiom sweep; failures carry witness indices."""

    checks_run: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, check: str, ok: bool, witness: str = "", deviation: float = 0.0):
        self.checks_run.append(check)
        if not ok:
            self.failures.append(CheckFailure(check, witness, deviation))

    def to_json(self):
        return {
            "valid": self.ok,
            "checks_run": sorted(set(self.checks_run)),
            "failures": [
                {"check": f.check, "witness": f.witness, "deviation": f.deviation}
                for f in self.failures
            ],
        }

    def __str__(self):
        if self.ok:
            return f"valid ({len(self.checks_run)} checks)"
        lines = [f"INVALID ({len(self.failures)} failures)"]
        lines += [f"  {f.check}: {f.witness} (dev {f.deviation:.3g})" for f in self.failures]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# the category
# ---------------------------------------------------------------------------

class FiniteCStarCategory:
    """Finite commutative C*-category given by structure tensors.

    Instances are treated as immutable after construction; characters and
    minimal idempotents are cached lazily.
    """

    def __init__(self, objects, dims, comp, invol, units):
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("duplicate object labels")
        self.dims = {}
        for A, B in product(self.objects, repeat=2):
            if (A, B) not in dims:
                raise ValueError(f"missing dimension for Hom-set ({A},{B})")
            d = int(dims[(A, B)])
            if d < 0:
                raise ValueError(f"negative dimension for Hom-set ({A},{B})")
            self.dims[(A, B)] = d
        self.comp = {}
        for A, B, C in product(self.objects, repeat=3):
            shape = (self.dims[(A, B)], self.dims[(B, C)], self.dims[(A, C)])
            T = comp.get((A, B, C))
            T = np.zeros(shape, dtype=complex) if T is None else np.asarray(T, dtype=complex)
            if T.shape != shape:
                raise ValueError(f"comp tensor ({A},{B},{C}) has shape {T.shape}, want {shape}")
            self.comp[(A, B, C)] = T
        self.invol = {}
        for A, B in product(self.objects, repeat=2):
            shape = (self.dims[(B, A)], self.dims[(A, B)])
            J = invol.get((A, B))
            J = np.zeros(shape, dtype=complex) if J is None else np.asarray(J, dtype=complex)
            if J.shape != shape:
                raise ValueError(f"invol matrix ({A},{B}) has shape {J.shape}, want {shape}")
            self.invol[(A, B)] = J
        self.units = {}
        for A in self.objects:
            u = np.asarray(units[A], dtype=complex)
            if u.shape != (self.dims[(A, A)],):
                raise ValueError(f"unit of {A} has wrong length")
            self.units[A] = u
        self._characters = {}
        self._idempotents = {}
        self._matchings = {}

    # -- basic operations ---------------------------------------------------

    def dim(self, A, B) -> int:
        return self.dims[(A, B)]

    def compose(self, A, B, C, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.comp[(A, B, C)])

    def star(self, A, B, x):
        return self.invol[(A, B)] @ np.conj(x)

    def unit(self, A):
        return self.units[A]

    def hom_pairs(self):
        return [(A, B) for A in self.objects for B in self.objects]

    def off_diagonal_pairs(self):
        return [(A, B) for A, B in self.hom_pairs() if A != B]

    # -- action matrices ------------------------------------------------------

    def left_mult_matrix(self, A, a):
        """Matrix of x -> a . x on the diagonal algebra at A."""
        return np.einsum("i,ijk->kj", a, self.comp[(A, A, A)])

    def left_action_matrix(self, A, B, a):
        """Matrix of x -> a . x : Hom(A,B) -> Hom(A,B) for a in Hom(A,A)."""
        return np.einsum("i,ijk->kj", a, self.comp[(A, A, B)])

    def right_action_matrix(self, A, B, b):
        """Matrix of x -> x . b : Hom(A,B) -> Hom(A,B) for b in Hom(B,B)."""
        return np.einsum("j,ijk->ki", b, self.comp[(A, B, B)])

    # -- characters -----------------------------------------------------------

    def characters(self, A, tol: Tolerance = DEFAULT_TOL):
        """Characters of the diagonal at A, cached on first use (subsequent
        calls reuse the first tolerance)."""
        if A not in self._characters:
            self._characters[A] = _diagonal_characters(self, A, tol)
        return self._characters[A]

    def character_matrix(self, A, tol: Tolerance = DEFAULT_TOL):
        """Rows are character value tuples on the diagonal basis at A."""
        chars = self.characters(A, tol)
        return np.array([c.values for c in chars])

    def idempotents(self, A, tol: Tolerance = DEFAULT_TOL):
        """Columns are coordinates of the minimal idempotents, ordered like
        the characters (column k satisfies char_j(e_k) = delta_jk)."""
        if A not in self._idempotents:
            omega = self.character_matrix(A, tol)
            self._idempotents[A] = np.linalg.solve(omega, np.eye(omega.shape[0]))
        return self._idempotents[A]

    def corner_matching(self, A, B, tol: Tolerance = DEFAULT_TOL):
        if (A, B) not in self._matchings:
            self._matchings[(A, B)] = _corner_matching(self, A, B, tol)
        return self._matchings[(A, B)]


@dataclass(frozen=True)
class DiagonalCharacter:
    """Multiplicative unital functional on one diagonal algebra."""

    object: str
    index: int
    values: np.ndarray  # value tuple on the diagonal basis

    def __call__(self, x):
        return complex(np.dot(self.values, x))


def _char_sort_key(values):
    return tuple((float(v.real), float(v.imag)) for v in values)


def _finish_characters(cat, A, omega, tol):
    """Validate raw character rows and return them canonically ordered."""
    d = cat.dim(A, A)
    scale = 1.0 + max_abs(omega)
    check_tol = 1e3 * tol.abs_eps * scale * scale
    T = cat.comp[(A, A, A)]
    lhs = np.einsum("ijm,km->kij", T, omega)
    rhs = np.einsum("ki,kj->kij", omega, omega)
    if max_abs(lhs - rhs) > check_tol:
        raise DiagonalNotSemisimple(
            f"functionals on {A} are not multiplicative (dev {max_abs(lhs - rhs):g})")
    if max_abs(omega @ cat.unit(A) - 1.0) > check_tol:
        raise DiagonalNotSemisimple(f"functionals on {A} are not unital")
    for k in range(d):
        for l in range(k + 1, d):
            if max_abs(omega[k] - omega[l]) < 10 * check_tol:
                raise DiagonalNotSemisimple(f"characters {k},{l} on {A} coincide")
    rows = sorted(range(d), key=lambda k: _char_sort_key(omega[k]))
    return [DiagonalCharacter(A, i, omega[rows[i]].copy()) for i in range(d)]


def _characters_by_gram(cat, A, tol):
    """Characters through the canonical inner product <x,y> = phi(x* y) with
    phi = tr o L.  In a *-orthonormal basis the left-multiplication operators
    become normal, so the family is handled by simultaneous_diag."""
    d = cat.dim(A, A)
    if d == 0:
        raise DiagonalNotSemisimple(f"diagonal at {A} is zero-dimensional")
    eye = np.eye(d)
    lmats = [cat.left_mult_matrix(A, eye[i]) for i in range(d)]
    phi = np.array([np.trace(L) for L in lmats])
    stars = [cat.star(A, A, eye[i]) for i in range(d)]
    gram = np.empty((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            gram[i, j] = phi @ cat.compose(A, A, A, stars[i], eye[j])
    if max_abs(gram - gram.conj().T) > 1e3 * tol.abs_eps * (1.0 + max_abs(gram)):
        raise DiagonalNotSemisimple(f"canonical form on {A} is not Hermitian")
    evals, V = hermitian_eig(gram, tol)
    if evals[0] <= (tol.rel_eps * evals[-1] + tol.abs_eps):
        raise DiagonalNotSemisimple(f"canonical form on {A} is degenerate")
    root = np.sqrt(evals)
    C = (root[:, None] * V.conj().T)
    Cinv = V * (1.0 / root)[None, :]
    tilde = [C @ L @ Cinv for L in lmats]
    U = simultaneous_diag(tilde, tol)
    omega = np.array([np.einsum("ik,ij,jk->k", np.conj(U), Lt, U) for Lt in tilde]).T
    return _finish_characters(cat, A, omega, tol)


def _characters_by_similarity(cat, A, tol):
    """Fallback for algebras that are semisimple but not *-consistent:
    joint eigenvalues of the left-multiplication family through a random
    element's (possibly non-unitary) eigenbasis."""
    d = cat.dim(A, A)
    eye = np.eye(d)
    lmats = [cat.left_mult_matrix(A, eye[i]) for i in range(d)]
    rng = Xoshiro256StarStar(_FALLBACK_SEED)
    for _ in range(8):
        coeffs = np.array([rng.uniform() * 2 - 1 for _ in range(d)])
        Lrand = sum(c * L for c, L in zip(coeffs, lmats))
        evals, V = np.linalg.eig(Lrand)
        if np.linalg.cond(V) > 1e8:
            continue
        Vinv = np.linalg.inv(V)
        omega = np.empty((d, d), dtype=complex)
        good = True
        for i, L in enumerate(lmats):
            D = Vinv @ L @ V
            off = max_abs(D - np.diag(np.diag(D)))
            if off > 1e-6 * (1.0 + max_abs(L)):
                good = False
                break
            omega[:, i] = np.diag(D)
        if good:
            return _finish_characters(cat, A, omega, tol)
    raise DiagonalNotSemisimple(f"no joint eigenbasis for the diagonal at {A}")


def _diagonal_characters(cat, A, tol):
    try:
        return _characters_by_gram(cat, A, tol)
    except DiagonalNotSemisimple:
        return _characters_by_similarity(cat, A, tol)


def characters_of_diagonal(cat: FiniteCStarCategory, A, tol: Tolerance = DEFAULT_TOL):
    """All characters of the diagonal algebra at A, in the canonical order
    (lexicographic by value tuple on the given basis)."""
    return cat.characters(A, tol)


# ---------------------------------------------------------------------------
# corners
# ---------------------------------------------------------------------------

def corner_projection_matrix(cat, A, B, p: DiagonalCharacter, q: DiagonalCharacter,
                             tol: Tolerance = DEFAULT_TOL):
    """Matrix of x -> e_p . x . e_q on Hom(A,B)."""
    e_p = cat.idempotents(A, tol)[:, p.index]
    e_q = cat.idempotents(B, tol)[:, q.index]
    return cat.right_action_matrix(A, B, e_q) @ cat.left_action_matrix(A, B, e_p)


def corner(cat, A, B, p: DiagonalCharacter, q: DiagonalCharacter,
           tol: Tolerance = DEFAULT_TOL):
    """Orthonormal basis (columns) of the corner e_p . Hom(A,B) . e_q.

    The corner of a valid commutative C*-category has dimension 0 or 1;
    anything larger raises CornerDimensionExceedsOne.
    """
    K = corner_projection_matrix(cat, A, B, p, q, tol)
    if K.size == 0:
        return np.zeros((cat.dim(A, B), 0), dtype=complex)
    scale = 1.0 + max_abs(cat.idempotents(A, tol)) * max_abs(cat.idempotents(B, tol))
    zero_tol = 1e-6 * scale
    norms = np.linalg.norm(K, axis=0)
    jmax = int(np.argmax(norms))
    if norms[jmax] <= zero_tol:
        return np.zeros((cat.dim(A, B), 0), dtype=complex)
    u = K[:, jmax] / norms[jmax]
    residual = K - np.outer(u, u.conj() @ K)
    if max_abs(residual) > zero_tol * max(1.0, max_abs(K)):
        raise CornerDimensionExceedsOne(
            f"corner ({A},{B}) at characters ({p.index},{q.index}) has dimension > 1")
    return u[:, None]


def _corner_matching(cat, A, B, tol):
    """Partial bijection between diagonal characters induced by nonzero
    corners: dict p_index -> (q_index, frame vector)."""
    chars_a = cat.characters(A, tol)
    chars_b = cat.characters(B, tol)
    match = {}
    for p in chars_a:
        for q in chars_b:
            basis = corner(cat, A, B, p, q, tol)
            if basis.shape[1] == 0:
                continue
            if p.index in match:
                raise HolonomyViolation(
                    f"character {p.index} of {A} matches two characters of {B}")
            match[p.index] = (q.index, basis[:, 0])
    seen = {}
    for pi, (qi, _) in match.items():
        if qi in seen:
            raise HolonomyViolation(
                f"character {qi} of {B} matches two characters of {A}")
        seen[qi] = pi
    return match


# ---------------------------------------------------------------------------
# norm
# ---------------------------------------------------------------------------

def cstar_norm(cat, A, B, x, tol: Tolerance = DEFAULT_TOL) -> float:
    """The unique C*-norm: sqrt of the spectral radius of x* . x."""
    x = np.asarray(x, dtype=complex)
    y = cat.compose(B, A, B, cat.star(A, B, x), x)
    omega = cat.character_matrix(B, tol)
    if omega.size == 0 or y.size == 0:
        return 0.0
    vals = omega @ y
    return float(np.sqrt(max(0.0, np.max(vals.real))))


# ---------------------------------------------------------------------------
# category validation
# ---------------------------------------------------------------------------

def _axiom_tol(tol, *scales):
    s = 1.0
    for x in scales:
        s = max(s, x)
    return 1e2 * tol.abs_eps * s * s


def validate_category(cat: FiniteCStarCategory, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Exhaustive axiom sweep on all basis tuples.

    Failures are report entries with witness indices, never exceptions;
    positivity is checked by evaluating the characters of each diagonal on
    x* . x for every basis element x of every Hom-set.
    """
    report = ValidationReport()
    objs = cat.objects
    tmax = max([1.0] + [max_abs(T) for T in cat.comp.values()])
    jmax = max([1.0] + [max_abs(J) for J in cat.invol.values()])
    atol = _axiom_tol(tol, tmax, jmax)

    for A, B, C, D in product(objs, repeat=4):
        if cat.dim(A, B) * cat.dim(B, C) * cat.dim(C, D) == 0:
            continue  # no basis triples to check
        T1, T2 = cat.comp[(A, B, C)], cat.comp[(A, C, D)]
        T3, T4 = cat.comp[(B, C, D)], cat.comp[(A, B, D)]
        lhs = np.einsum("ijk,klm->ijlm", T1, T2)
        rhs = np.einsum("jln,inm->ijlm", T3, T4)
        dev = max_abs(lhs - rhs)
        report.record("associativity", dev <= atol, f"({A},{B},{C},{D})", dev)

    for A, B in cat.hom_pairs():
        d = cat.dim(A, B)
        left = np.einsum("i,ijk->kj", cat.unit(A), cat.comp[(A, A, B)])
        right = np.einsum("j,ijk->ki", cat.unit(B), cat.comp[(A, B, B)])
        dev = max(max_abs(left - np.eye(d)), max_abs(right - np.eye(d)))
        report.record("unit_law", dev <= atol, f"({A},{B})", dev)

    for A, B in cat.hom_pairs():
        J, Jb = cat.invol[(A, B)], cat.invol[(B, A)]
        dev = max_abs(Jb @ np.conj(J) - np.eye(cat.dim(A, B)))
        report.record("involution_involutive", dev <= atol, f"({A},{B})", dev)

    for A in objs:
        dev = max_abs(cat.star(A, A, cat.unit(A)) - cat.unit(A))
        report.record("involution_unit", dev <= atol, f"({A})", dev)

    for A, B, C in product(objs, repeat=3):
        if cat.dim(A, B) * cat.dim(B, C) == 0:
            continue  # no basis pairs to check
        T = cat.comp[(A, B, C)]
        Jab, Jbc, Jac = cat.invol[(A, B)], cat.invol[(B, C)], cat.invol[(A, C)]
        lhs = np.einsum("pr,ijr->ijp", Jac, np.conj(T))
        rhs = np.einsum("qj,pi,qpm->ijm", Jbc, Jab, cat.comp[(C, B, A)])
        dev = max_abs(lhs - rhs)
        report.record("involution_antimultiplicative", dev <= atol, f"({A},{B},{C})", dev)

    for A in objs:
        T = cat.comp[(A, A, A)]
        dev = max_abs(T - np.transpose(T, (1, 0, 2)))
        report.record("diagonal_commutative", dev <= atol, f"({A})", dev)

    chars = {}
    for A in objs:
        try:
            chars[A] = cat.characters(A, tol)
            report.record("diagonal_semisimple", True, f"({A})")
        except DiagonalNotSemisimple as exc:
            report.record("diagonal_semisimple", False, f"({A}): {exc}")

    for A, B in cat.hom_pairs():
        if B not in chars:
            continue
        d = cat.dim(A, B)
        omega = np.array([c.values for c in chars[B]])
        for i in range(d):
            x = np.eye(d)[i]
            y = cat.compose(B, A, B, cat.star(A, B, x), x)
            vals = omega @ y
            norm2 = float(np.max(np.abs(vals))) if vals.size else 0.0
            bound = 1e-7 * (1.0 + norm2)
            neg = float(np.min(vals.real)) if vals.size else 0.0
            imag = max_abs(vals.imag) if vals.size else 0.0
            ok = neg >= -bound and imag <= bound
            report.record("positivity", ok, f"({A},{B}) basis {i}",
                          max(0.0, -neg) + imag)
    return report


# ---------------------------------------------------------------------------
# orbit classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitClass:
    """Maximal compatible system of diagonal characters together with the
    Hom-sets on which the corresponding functionals vanish."""

    assignment: tuple  # ((object, character index), ...) in object order
    zero_homs: frozenset  # ordered pairs (A, B), A != B

    def char_index(self, A) -> int:
        return dict(self.assignment)[A]

    def to_json(self):
        return {
            "assignment": {A: k for A, k in self.assignment},
            "zero_homs": sorted(f"{A}|{B}" for A, B in self.zero_homs),
        }


def _check_match_coherence(cat, tol):
    """Transitivity of the corner matching across object triples."""
    for A, B, C in product(cat.objects, repeat=3):
        if len({A, B, C}) != 3:
            continue
        mab = {p: q for p, (q, _) in cat.corner_matching(A, B, tol).items()}
        mbc = {p: q for p, (q, _) in cat.corner_matching(B, C, tol).items()}
        mac = {p: q for p, (q, _) in cat.corner_matching(A, C, tol).items()}
        for p, q in mab.items():
            if q in mbc and mac.get(p) != mbc[q]:
                raise HolonomyViolation(
                    f"matching through {B} disagrees with direct matching {A}->{C}"
                    f" at character {p}")


def enumerate_orbit_classes(cat: FiniteCStarCategory, tol: Tolerance = DEFAULT_TOL):
    """One class per choice of a character for every object; the class records
    which off-diagonal Hom-sets the associated functionals vanish on.

    Deterministic order (lexicographic in the canonical character order).
    A class whose characters are pairwise matched restricts to a genuine
    scalar *-functor on the corresponding component; across unmatched pairs
    the data is a formal character system bookkeeping the vanishing Hom-sets
    (the phase torsor makes any nonzero values non-canonical there).
    """
    objs = sorted(cat.objects)
    _check_match_coherence(cat, tol)
    matches = {}
    for A, B in product(objs, repeat=2):
        if A != B:
            matches[(A, B)] = {p: q for p, (q, _) in cat.corner_matching(A, B, tol).items()}
    classes = []
    for combo in product(*(range(cat.dim(A, A)) for A in objs)):
        pick = dict(zip(objs, combo))
        zero = set()
        for A, B in matches:
            if matches[(A, B)].get(pick[A]) != pick[B]:
                zero.add((A, B))
        classes.append(OrbitClass(tuple(sorted(pick.items())), frozenset(zero)))
    return classes


# ---------------------------------------------------------------------------
# *-functors
# ---------------------------------------------------------------------------

@dataclass
class StarFunctor:
    """Object-bijective morphism of categories: per-Hom-set linear maps."""

    source: FiniteCStarCategory
    target: FiniteCStarCategory
    obj_map: dict
    hom_maps: dict  # (A, B) -> matrix (d_target, d_source)

    def image_pair(self, A, B):
        return (self.obj_map[A], self.obj_map[B])

    def apply(self, A, B, x):
        return self.hom_maps[(A, B)] @ np.asarray(x, dtype=complex)

    def then(self, other: "StarFunctor") -> "StarFunctor":
        """Composite functor: first self, then other."""
        if other.source is not self.target:
            raise ValueError("functors are not composable")
        obj = {A: other.obj_map[self.obj_map[A]] for A in self.source.objects}
        homs = {}
        for A, B in self.source.hom_pairs():
            homs[(A, B)] = other.hom_maps[self.image_pair(A, B)] @ self.hom_maps[(A, B)]
        return StarFunctor(self.source, other.target, obj, homs)


def identity_functor(cat: FiniteCStarCategory) -> StarFunctor:
    homs = {(A, B): np.eye(cat.dim(A, B), dtype=complex) for A, B in cat.hom_pairs()}
    return StarFunctor(cat, cat, {A: A for A in cat.objects}, homs)


def check_star_functor(F: StarFunctor, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Verify functor axioms on all basis pairs."""
    report = ValidationReport()
    src, tgt = F.source, F.target
    vals = list(F.obj_map.values())
    ok = (sorted(F.obj_map.keys()) == sorted(src.objects)
          and sorted(vals) == sorted(tgt.objects))
    report.record("object_bijective", ok, str(F.obj_map))
    if not ok:
        return report
    hmax = max([1.0] + [max_abs(H) for H in F.hom_maps.values()])
    tmax = max([1.0] + [max_abs(T) for T in src.comp.values()]
               + [max_abs(T) for T in tgt.comp.values()])
    atol = _axiom_tol(tol, hmax, tmax)

    for A in src.objects:
        dev = max_abs(F.apply(A, A, src.unit(A)) - tgt.unit(F.obj_map[A]))
        report.record("functor_unit", dev <= atol, f"({A})", dev)

    for A, B, C in product(src.objects, repeat=3):
        T = src.comp[(A, B, C)]
        if 0 in T.shape:
            continue
        A2, B2, C2 = F.obj_map[A], F.obj_map[B], F.obj_map[C]
        Hab, Hbc, Hac = F.hom_maps[(A, B)], F.hom_maps[(B, C)], F.hom_maps[(A, C)]
        lhs = np.einsum("ijk,pk->ijp", T, Hac)
        rhs = np.einsum("pi,qj,pqm->ijm", Hab, Hbc, tgt.comp[(A2, B2, C2)])
        dev = max_abs(lhs - rhs)
        report.record("functor_composition", dev <= atol, f"({A},{B},{C})", dev)

    for A, B in src.hom_pairs():
        A2, B2 = F.image_pair(A, B)
        lhs = F.hom_maps[(B, A)] @ src.invol[(A, B)]
        rhs = tgt.invol[(A2, B2)] @ np.conj(F.hom_maps[(A, B)])
        dev = max_abs(lhs - rhs)
        report.record("functor_involution", dev <= atol, f"({A},{B})", dev)
    return report


def check_non_degenerate(F: StarFunctor, tol: Tolerance = DEFAULT_TOL):
    """Non-degeneracy gate: every functional that is nonzero on a target
    Hom-set must pull back to a nonzero functional.

    Returns ``(True, None)`` or ``(False, (orbit_class, A, B))`` where the
    witness class is one concrete functional family exhibiting the failure.
    A functional's restriction to Hom(A',B') is nonzero exactly when its
    character pair is matched by a nonzero corner, so the gate quantifies
    over matched pairs rather than over all orbit classes.
    """
    src, tgt = F.source, F.target
    for A, B in src.off_diagonal_pairs():
        A2, B2 = F.image_pair(A, B)
        matching = tgt.corner_matching(A2, B2, tol)
        if not matching:
            continue
        H = F.hom_maps[(A, B)]
        for p_idx, (q_idx, frame) in matching.items():
            p = tgt.characters(A2, tol)[p_idx]
            q = tgt.characters(B2, tol)[q_idx]
            K = corner_projection_matrix(tgt, A2, B2, p, q, tol)
            functional = (frame.conj() @ K) / (frame.conj() @ frame)
            pulled = functional @ H
            if max_abs(pulled) <= 1e-6 * (1.0 + max_abs(functional)) :
                witness = _witness_class(tgt, {A2: p_idx, B2: q_idx}, tol)
                return False, (witness, A, B)
    return True, None


def _witness_class(cat, pins, tol):
    objs = sorted(cat.objects)
    assignment = {A: pins.get(A, 0) for A in objs}
    zero = set()
    for A, B in product(objs, repeat=2):
        if A == B:
            continue
        match = {p: q for p, (q, _) in cat.corner_matching(A, B, tol).items()}
        if match.get(assignment[A]) != assignment[B]:
            zero.add((A, B))
    return OrbitClass(tuple(sorted(assignment.items())), frozenset(zero))


# ---------------------------------------------------------------------------
# Hilbert C*-bimodules and the linking category
# ---------------------------------------------------------------------------

LINK_LEFT = "A"
LINK_RIGHT = "B"


@dataclass
class HilbertBimodule:
    """Bimodule over two commutative unital algebras with two inner products.

    ``ipA[i, j]`` holds the coordinates of the left inner product of basis
    vectors i and j (linear in i, conjugate-linear in j); ``ipB[i, j]`` the
    right inner product (conjugate-linear in i, linear in j).
    """

    algA: FiniteCStarCategory  # one-object category
    algB: FiniteCStarCategory  # one-object category
    module_dim: int
    left_action: np.ndarray   # (dimA, m, m): (a, x) -> a.x
    right_action: np.ndarray  # (m, dimB, m): (x, b) -> x.b
    ipA: np.ndarray           # (m, m, dimA)
    ipB: np.ndarray           # (m, m, dimB)

    def __post_init__(self):
        for alg in (self.algA, self.algB):
            if len(alg.objects) != 1:
                raise ValueError("bimodule algebras must be one-object categories")
        self.left_action = np.asarray(self.left_action, dtype=complex)
        self.right_action = np.asarray(self.right_action, dtype=complex)
        self.ipA = np.asarray(self.ipA, dtype=complex)
        self.ipB = np.asarray(self.ipB, dtype=complex)
        m, da, db = self.module_dim, self.dimA, self.dimB
        if self.left_action.shape != (da, m, m):
            raise ValueError("left_action tensor has wrong shape")
        if self.right_action.shape != (m, db, m):
            raise ValueError("right_action tensor has wrong shape")
        if self.ipA.shape != (m, m, da):
            raise ValueError("ipA tensor has wrong shape")
        if self.ipB.shape != (m, m, db):
            raise ValueError("ipB tensor has wrong shape")

    @property
    def dimA(self):
        return self.algA.dim(self.algA.objects[0], self.algA.objects[0])

    @property
    def dimB(self):
        return self.algB.dim(self.algB.objects[0], self.algB.objects[0])


def one_object_category(comp, invol, unit, label="A") -> FiniteCStarCategory:
    comp = np.asarray(comp, dtype=complex)
    return FiniteCStarCategory(
        (label,), {(label, label): comp.shape[0]}, {(label, label, label): comp},
        {(label, label): invol}, {label: unit})


def linking_category(M: HilbertBimodule, tol: Tolerance = DEFAULT_TOL) -> FiniteCStarCategory:
    """Two-object category [[algA, M], [M*, algB]] with composition from the
    module actions and inner products.

    The dual basis of M* mirrors the basis of M, so the (A,A) and (B,B)
    corners reproduce the input algebras with identical structure constants.
    The assembled category is validated; failures raise
    BimoduleAxiomViolation.
    """
    A, B = LINK_LEFT, LINK_RIGHT
    a_lbl, b_lbl = M.algA.objects[0], M.algB.objects[0]
    da, db, m = M.dimA, M.dimB, M.module_dim
    Ta = M.algA.comp[(a_lbl, a_lbl, a_lbl)]
    Tb = M.algB.comp[(b_lbl, b_lbl, b_lbl)]
    Ja = M.algA.invol[(a_lbl, a_lbl)]
    Jb = M.algB.invol[(b_lbl, b_lbl)]

    comp = {
        (A, A, A): Ta, (B, B, B): Tb,
        (A, A, B): M.left_action,   # a . x
        (A, B, B): M.right_action,  # x . b
        (A, B, A): M.ipA,           # x . y* = <x,y>_A
        (B, A, B): M.ipB,           # y* . x = <y,x>_B (bilinear in dual coords)
    }
    # y* . a = (a* . y)*   and   b . y* = (y . b*)*
    star_a = lambda v: Ja @ np.conj(v)
    star_b = lambda v: Jb @ np.conj(v)
    T_baa = np.zeros((m, da, m), dtype=complex)
    for k in range(da):
        a_star = star_a(np.eye(da)[k])
        act = np.einsum("i,ijk->jk", a_star, M.left_action)  # row j: a* . y_j
        T_baa[:, k, :] = np.conj(act)
    comp[(B, A, A)] = T_baa
    T_bba = np.zeros((db, m, m), dtype=complex)
    for k in range(db):
        b_star = star_b(np.eye(db)[k])
        act = np.einsum("j,ijk->ik", b_star, M.right_action)  # y -> y . b*
        T_bba[k, :, :] = np.conj(act)
    comp[(B, B, A)] = T_bba

    invol = {
        (A, A): Ja, (B, B): Jb,
        (A, B): np.eye(m, dtype=complex),
        (B, A): np.eye(m, dtype=complex),
    }
    units = {A: M.algA.unit(a_lbl), B: M.algB.unit(b_lbl)}
    dims = {(A, A): da, (A, B): m, (B, A): m, (B, B): db}
    cat = FiniteCStarCategory((A, B), dims, comp, invol, units)

    _check_bimodule_axioms(M, cat, tol)
    report = validate_category(cat, tol)
    if not report.ok:
        first = report.failures[0]
        raise BimoduleAxiomViolation(
            f"linking category fails {first.check} at {first.witness}")
    return cat


def _check_bimodule_axioms(M: HilbertBimodule, cat, tol):
    A, B = LINK_LEFT, LINK_RIGHT
    m = M.module_dim
    eye = np.eye(m)
    scale = 1.0 + max(max_abs(M.ipA), max_abs(M.ipB), max_abs(M.left_action),
                      max_abs(M.right_action))
    atol = _axiom_tol(tol, scale)
    for i, j, k in product(range(m), repeat=3):
        lhs = cat.compose(A, A, B, M.ipA[i, j], eye[k])
        rhs = cat.compose(A, B, B, eye[i], M.ipB[j, k])
        if max_abs(lhs - rhs) > atol:
            raise BimoduleAxiomViolation(
                f"compatibility <x,y>_A.z = x.<y,z>_B fails at basis ({i},{j},{k})")
    for i, j in product(range(m), repeat=2):
        if max_abs(cat.star(A, A, M.ipA[i, j]) - M.ipA[j, i]) > atol:
            raise BimoduleAxiomViolation(f"left inner product not hermitian at ({i},{j})")
        if max_abs(cat.star(B, B, M.ipB[i, j]) - M.ipB[j, i]) > atol:
            raise BimoduleAxiomViolation(f"right inner product not hermitian at ({i},{j})")
    for alg_obj, ip, lbl in ((M.algA, M.ipA, "left"), (M.algB, M.ipB, "right")):
        obj = alg_obj.objects[0]
        try:
            omega = alg_obj.character_matrix(obj, tol)
        except DiagonalNotSemisimple as exc:
            raise BimoduleAxiomViolation(f"{lbl} algebra not semisimple: {exc}")
        for c in range(omega.shape[0]):
            # Gram matrix of the inner product evaluated through one character;
            # positivity of <x,x> for all x is positive semidefiniteness here.
            W = np.einsum("ijd,d->ij", ip, omega[c])
            H = (W + W.conj().T) / 2
            evals, _ = hermitian_eig(H, tol)
            if evals.size and evals[0] < -1e-7 * (1.0 + evals[-1]):
                raise BimoduleAxiomViolation(
                    f"{lbl} inner product not positive at character {c}")
