"""The two sides of the duality: the section functor (spaceoid to category)
and the spectrum functor (category to spaceoid), on objects and morphisms.

Sections are exact: the structure constants of the section category are the
stored phases, so all numerical error of a round trip lives in the spectrum
direction (characters, corners, frame extraction).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .cstarcat import (
    FiniteCStarCategory,
    StarFunctor,
    check_non_degenerate,
    corner_projection_matrix,
    cstar_norm,
)
from .errors import (
    DegenerateFunctor,
    HolonomyViolation,
    InvalidMorphism,
    InvalidSpaceoid,
)
from .numlin import DEFAULT_TOL, Tolerance, max_abs
from .spaceoid import FiniteSpaceoid, SpaceoidMorphism, validate_morphism, validate_spaceoid

_MATCH_TOL = 1e-6  # character matching across two diagonalizations


# ---------------------------------------------------------------------------
# section functor, on objects
# ---------------------------------------------------------------------------

def diag_basis(S: FiniteSpaceoid, A):
    """Basis labels of the diagonal Hom-set of the section category."""
    return sorted(S.base_sets[A])


def sections_category(S: FiniteSpaceoid, tol: Tolerance = DEFAULT_TOL,
                      check: bool = True) -> FiniteCStarCategory:
    """Category of sections of a finite spaceoid.

    One generator per point: indicator sections delta_p on off-diagonal
    Hom-sets and delta_x per base point on diagonals.  Composition extends by
    zero where no composite point exists; identities are the all-ones
    sections.
    """
    if check:
        report = validate_spaceoid(S, tol)
        if not report.ok:
            raise InvalidSpaceoid(f"cannot take sections: {report}")

    objs = S.objects
    dbase = {A: diag_basis(S, A) for A in objs}
    dindex = {A: {x: i for i, x in enumerate(dbase[A])} for A in objs}
    dims = {}
    for A, B in product(objs, repeat=2):
        dims[(A, B)] = len(dbase[A]) if A == B else len(S.points[(A, B)])

    comp = {}
    for A, B, C in product(objs, repeat=3):
        T = np.zeros((dims[(A, B)], dims[(B, C)], dims[(A, C)]), dtype=complex)
        if A == B == C:
            for i in range(len(dbase[A])):
                T[i, i, i] = 1.0
        elif A == B:
            for j, h in enumerate(S.hom_points(B, C)):
                T[dindex[A][S.target(h)], j, j] = 1.0
        elif B == C:
            for i, h in enumerate(S.hom_points(A, B)):
                T[i, dindex[B][S.source(h)], i] = 1.0
        elif A == C:
            for i, h1 in enumerate(S.hom_points(A, B)):
                for j, h2 in enumerate(S.hom_points(B, A)):
                    if S.composable(h1, h2) and S.source(h2) == S.target(h1):
                        T[i, j, dindex[A][S.target(h1)]] = S.c(h1, h2)
        else:
            for i, h1 in enumerate(S.hom_points(A, B)):
                for j, h2 in enumerate(S.hom_points(B, C)):
                    if not S.composable(h1, h2):
                        continue
                    h12 = S.lookup(A, C, S.target(h1), S.source(h2))
                    if h12 is None:
                        continue  # zero extension off the composable locus
                    T[i, j, h12[2]] = S.c(h1, h2)
        comp[(A, B, C)] = T

    invol = {}
    for A, B in product(objs, repeat=2):
        if A == B:
            invol[(A, B)] = np.eye(dims[(A, B)], dtype=complex)
        else:
            J = np.zeros((dims[(B, A)], dims[(A, B)]), dtype=complex)
            for i, h in enumerate(S.hom_points(A, B)):
                J[S.star(h)[2], i] = S.nu_of(h)
            invol[(A, B)] = J

    units = {A: np.ones(len(dbase[A]), dtype=complex) for A in objs}
    return FiniteCStarCategory(objs, dims, comp, invol, units)


# ---------------------------------------------------------------------------
# section functor, on morphisms (contravariant)
# ---------------------------------------------------------------------------

def gamma_on_morphism(m: SpaceoidMorphism, tol: Tolerance = DEFAULT_TOL,
                      cats=None, check: bool = True) -> StarFunctor:
    """Pull-back functor on sections induced by a spaceoid morphism.

    A generator delta_q of the target's sections pulls back to the sum of
    F_p delta_p over the preimage points p.  Contravariant: the returned
    functor runs from sections of the morphism's target to sections of its
    source.  ``cats`` may supply the two section categories to keep functor
    endpoints shared across calls.
    """
    if check:
        report = validate_morphism(m, tol)
        if not report.ok:
            raise InvalidMorphism(f"cannot pull back sections: {report}")
    src_cat = cats[0] if cats else sections_category(m.target, tol, check=False)
    dst_cat = cats[1] if cats else sections_category(m.source, tol, check=False)

    inv_obj = {v: k for k, v in m.obj_map.items()}
    homs = {}
    for A2, B2 in product(m.target.objects, repeat=2):
        A, B = inv_obj[A2], inv_obj[B2]
        H = np.zeros((dst_cat.dim(A, B), src_cat.dim(A2, B2)), dtype=complex)
        if A2 == B2:
            tgt_idx = {x: j for j, x in enumerate(diag_basis(m.target, A2))}
            for i, x in enumerate(diag_basis(m.source, A)):
                H[i, tgt_idx[m.base_maps[A][x]]] = 1.0
        else:
            for i, h in enumerate(m.source.hom_points(A, B)):
                H[i, m.point_map(h)[2]] = m.scalar(h)
        homs[(A2, B2)] = H
    return StarFunctor(src_cat, dst_cat, inv_obj, homs)


# ---------------------------------------------------------------------------
# spectrum functor, on objects
# ---------------------------------------------------------------------------

@dataclass
class GelfandData:
    """Coordinates of the transformed basis sections in the chosen frames.

    ``diag[A][k, i]`` is the value of basis element i of the diagonal at A on
    the k-th canonical character (equivalently at the k-th base point of the
    spectrum).  ``hat[(A, B)][i, n]`` is the value of basis element i of
    Hom(A,B) at the n-th spectrum point, in that point's unit frame, and
    ``frames[(A, B)][n]`` is the frame vector itself in Hom(A,B) coordinates.
    """

    diag: dict
    hat: dict
    frames: dict

    def point_label(self, k: int) -> str:
        return f"{k:02d}"


def _frame_vector(cat, A, B, basis_vec, tol):
    """Normalize a corner generator: C*-norm one, first nonzero coordinate
    positive real."""
    nrm = cstar_norm(cat, A, B, basis_vec, tol)
    if nrm <= 1e-6:
        raise HolonomyViolation(
            f"corner generator in Hom({A},{B}) has vanishing norm; "
            f"input is not a valid commutative C*-category")
    u = basis_vec / nrm
    mags = np.abs(u)
    first = int(np.argmax(mags > 1e-8 * np.max(mags)))
    return u * (np.conj(u[first]) / abs(u[first]))


def _project_coeff(frame, w, tol, context):
    """Coefficient of w against the one-dimensional frame; the residual must
    vanish for the input to be a valid commutative category."""
    denom = np.vdot(frame, frame)
    coeff = np.vdot(frame, w) / denom
    residual = max_abs(w - coeff * frame)
    scale = 1.0 + max_abs(w)
    if residual > 1e-6 * scale:
        raise HolonomyViolation(f"projection residual {residual:g} at {context}")
    return complex(coeff)


def spectral_spaceoid(C: FiniteCStarCategory, tol: Tolerance = DEFAULT_TOL):
    """Spectrum of a finite commutative C*-category.

    Base points are the canonical characters of the diagonals; Hom(A,B)
    points are the character pairs with nonzero corner, frames are the
    corner generators normalized to C*-norm one with deterministic phase,
    and the cocycle is read off by composing and involuting frames.

    Returns ``(S, G)`` with ``G`` the section coordinates of every basis
    element (the data of the transform into the section category of S).
    """
    objs = C.objects
    gd = GelfandData(diag={}, hat={}, frames={})
    base_sets = {}
    for A in objs:
        omega = C.character_matrix(A, tol)
        gd.diag[A] = omega
        base_sets[A] = [gd.point_label(k) for k in range(omega.shape[0])]

    points = {}
    frames = {}
    for A, B in product(objs, repeat=2):
        if A == B:
            continue
        matching = C.corner_matching(A, B, tol)
        pts = []
        for p_idx in sorted(matching):
            q_idx, gen = matching[p_idx]
            pts.append((gd.point_label(p_idx), gd.point_label(q_idx)))
            frames[(A, B, gd.point_label(p_idx), gd.point_label(q_idx))] = \
                _frame_vector(C, A, B, gen, tol)
        points[(A, B)] = pts
        total = len(pts)
        if total != C.dim(A, B):
            raise HolonomyViolation(
                f"corner dimensions over Hom({A},{B}) sum to {total}, "
                f"dimension is {C.dim(A, B)}")

    S = FiniteSpaceoid(objs, base_sets, points)

    frame_by_handle = {}
    for A, B in S.points:
        for h in S.hom_points(A, B):
            frame_by_handle[h] = frames[(A, B, S.target(h), S.source(h))]

    nu = {}
    cphase = {}
    try:
        for h in S.all_points():
            A, B, _ = h
            hs = S.star(h)
            w = C.star(A, B, frame_by_handle[h])
            nu[h] = _project_coeff(frame_by_handle[hs], w, tol, f"nu{h}")
        for h1, h2 in S._composable_pairs():
            A, B, _ = h1
            _, Cobj, _ = h2
            w = C.compose(A, B, Cobj, frame_by_handle[h1], frame_by_handle[h2])
            h12 = S.compose(h1, h2)
            if h12 is None:
                # composite lands on the diagonal: project on the idempotent
                p_idx = int(S.target(h1))
                e_p = C.idempotents(A, tol)[:, p_idx]
                cphase[(h1, h2)] = _project_coeff(e_p, w, tol, f"c{h1},{h2}")
            else:
                cphase[(h1, h2)] = _project_coeff(
                    frame_by_handle[h12], w, tol, f"c{h1},{h2}")
    except InvalidSpaceoid as exc:
        # matching produced no inverse/composite point: invalid input category
        raise HolonomyViolation(str(exc))

    S = FiniteSpaceoid(objs, base_sets, S.points, nu, cphase)
    for A, B in S.points:
        gd.frames[(A, B)] = np.array(
            [frame_by_handle[h] for h in S.hom_points(A, B)]) \
            if S.points[(A, B)] else np.zeros((0, C.dim(A, B)), dtype=complex)
        hat = np.zeros((C.dim(A, B), len(S.points[(A, B)])), dtype=complex)
        for n, h in enumerate(S.hom_points(A, B)):
            p = C.characters(A, tol)[int(S.target(h))]
            q = C.characters(B, tol)[int(S.source(h))]
            K = corner_projection_matrix(C, A, B, p, q, tol)
            frame = frame_by_handle[h]
            denom = np.vdot(frame, frame).real
            hat[:, n] = (frame.conj() @ K) / denom
        gd.hat[(A, B)] = hat
    return S, gd


# ---------------------------------------------------------------------------
# spectrum functor, on morphisms (contravariant)
# ---------------------------------------------------------------------------

def _match_character(omega_rows, values, context):
    devs = [max_abs(row - values) for row in omega_rows]
    best = int(np.argmin(devs))
    if devs[best] > _MATCH_TOL * (1.0 + max_abs(values)):
        raise InvalidMorphism(
            f"no character matches the pulled-back functional at {context} "
            f"(best deviation {devs[best]:g})")
    return best


def sigma_on_morphism(F: StarFunctor, tol: Tolerance = DEFAULT_TOL,
                      spectra=None) -> SpaceoidMorphism:
    """Spectrum of a non-degenerate *-functor.

    The point map sends a spectrum point of the functor's target category to
    the point named by the pulled-back characters; frame scalars express the
    functor's fiber action in the chosen frames.  Raises DegenerateFunctor
    when the non-degeneracy gate fails (the point map would lose a point).
    ``spectra`` may supply ((S_src, G_src), (S_tgt, G_tgt)) precomputed for
    the functor's source and target categories.
    """
    ok, witness = check_non_degenerate(F, tol)
    if not ok:
        cls, A, B = witness
        raise DegenerateFunctor(
            f"functional {dict(cls.assignment)} vanishes after pull-back on "
            f"Hom({A},{B})")
    src, tgt = F.source, F.target
    (S1, G1) = spectra[0] if spectra else spectral_spaceoid(src, tol)
    (S2, G2) = spectra[1] if spectra else spectral_spaceoid(tgt, tol)

    inv_obj = {v: k for k, v in F.obj_map.items()}
    base_maps = {}
    for A2 in tgt.objects:
        A = inv_obj[A2]
        omega_src = G1.diag[A]
        bm = {}
        for k, row in enumerate(G2.diag[A2]):
            pull = row @ F.hom_maps[(A, A)]
            idx = _match_character(omega_src, pull, f"({A2}, char {k})")
            bm[G2.point_label(k)] = G1.point_label(idx)
        base_maps[A2] = bm

    m = SpaceoidMorphism(S2, S1, inv_obj, base_maps, {})
    scalars = {}
    for h in S2.all_points():
        A2, B2, _ = h
        A, B = inv_obj[A2], inv_obj[B2]
        target_handle = m.point_map(h)
        u1 = G1.frames[(A, B)][target_handle[2]]
        y = F.hom_maps[(A, B)] @ u1
        p = tgt.characters(A2, tol)[int(S2.target(h))]
        q = tgt.characters(B2, tol)[int(S2.source(h))]
        K = corner_projection_matrix(tgt, A2, B2, p, q, tol)
        u2 = G2.frames[(A2, B2)][h[2]]
        scalars[h] = _project_coeff(u2, K @ y, tol, f"scalar{h}")
    m.scalars = scalars
    return m
