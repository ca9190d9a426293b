"""Enumeration of effective classes up to a grading bound.

An effective class pairs integrally and nonnegatively with every extra-vector
divisor, and the columns where it pairs outside Z>=0 must span a cone of the
fan.  That forces, for some full-dimensional cone, the pairings on the
complementary columns to be nonnegative integers; those pairings are dual
coordinates, so enumeration reduces to a finite scan of integer multiplier
tuples per cone, merged and deduplicated.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import ValidationError, ConsistencyError
from .fan import BoxElement, ToricData, zero_box
from .series import frac

MODULE = "class-enumerator"


@dataclass(frozen=True)
class EffClass:
    coords: tuple     # coordinates in the kernel basis
    pairings: tuple   # pairing with every divisor column
    grade: Fraction
    sector: BoxElement

    def key(self):
        return self.coords

    def is_zero(self):
        return all(c == 0 for c in self.coords)


def _is_nonneg_int(x: Fraction) -> bool:
    return x.denominator == 1 and x >= 0


def _is_neg_int(x: Fraction) -> bool:
    return x.denominator == 1 and x < 0


def sector(data: ToricData, pairings) -> BoxElement:
    """Box element attached to a class: ray-wise fractional parts of the
    negated pairings, located in the cone its support spans."""
    op = "sector"
    pairings = [frac(p) for p in pairings]
    support = []
    coeffs = []
    for i, p in enumerate(pairings):
        f = (-p) - (-p).__floor__()
        if f != 0:
            if data.is_extra(i):
                raise ValidationError(MODULE, op,
                                      "fractional pairing on an extra-vector "
                                      "column: class is not admissible", i)
            support.append(i)
            coeffs.append(f)
    if not support:
        return zero_box(data.n)
    if not any(set(support) <= set(c) for c in data.max_cones):
        raise ValidationError(MODULE, op,
                              "fractional-support rays do not span a cone",
                              support)
    vec = tuple(
        sum(int(data.column_vector(i)[k]) * c for i, c in zip(support, coeffs))
        for k in range(data.n))
    ivec = tuple(int(x) for x in vec)
    if any(Fraction(i) != x for i, x in zip(ivec, vec)):
        raise ConsistencyError(MODULE, op, "sector vector is not integral", vec)
    for b in data.boxes:
        if b.vector == ivec:
            return b
    raise ConsistencyError(MODULE, op,
                           "sector vector is not a known box element", ivec)


def eff_class(data: ToricData, coords) -> EffClass:
    coords = tuple(frac(c) for c in coords)
    pairings = tuple(data.pairings_from_coords(coords))
    return EffClass(coords=coords, pairings=pairings,
                    grade=data.grade(coords), sector=sector(data, pairings))


def dual_class(data: ToricData, j) -> EffClass:
    """The effective class dual to extra column j."""
    pairings = data.dual_class_pairings(j)
    return eff_class(data, data.coords_from_pairings(pairings))


def is_effective(data: ToricData, pairings) -> bool:
    """Membership test straight from the definition."""
    pairings = [frac(p) for p in pairings]
    bad = [i for i, p in enumerate(pairings) if not _is_nonneg_int(p)]
    if any(data.is_extra(i) for i in bad):
        return False
    return any(set(bad) <= set(c) for c in data.max_cones)


def enumerate_effective(data: ToricData, bound) -> list:
    """All nonzero effective classes with grade <= bound, in canonical order.

    Aborts when the grading fails to be positive on some admissible generator,
    or (plain fans) when an enumerated class has a negative coordinate: both
    mean the kernel basis was not adapted to the effective cone and a nef
    basis must be supplied.
    """
    op = "enumerate_effective"
    bound = frac(bound)
    r = data.r
    if r == 0 or bound <= 0:
        return []
    found = {}
    from .fan import _keff_generators
    for cone, comp, gens in _keff_generators(data.fan, data.gamma, data.max_cones):
        grades = [sum(g, Fraction(0)) for g in gens]
        for g, w in zip(gens, grades):
            if w <= 0:
                raise ValidationError(
                    MODULE, op,
                    "grading is not positive on an admissible class; supply a "
                    "nef basis via basis_p", {"cone": cone, "generator": g,
                                              "grade": str(w)})
        # scan multiplier tuples mu >= 0 with sum mu_i * grade_i <= bound
        def scan(i, coords, used):
            if i == r:
                if used == 0:
                    return
                key = tuple(coords)
                if key not in found:
                    found[key] = None
                return
            top = int((bound - used) / grades[i])
            for mu in range(top + 1):
                scan(i + 1,
                     [c + mu * g for c, g in zip(coords, gens[i])],
                     used + mu * grades[i])

        scan(0, [Fraction(0)] * r, Fraction(0))
    out = []
    for key in found:
        cls = eff_class(data, key)
        if cls.grade <= 0 or cls.grade > bound:
            continue
        if data.infinity_column is None and any(c < 0 for c in cls.coords):
            raise ValidationError(
                MODULE, op,
                "enumerated effective class has a negative coordinate; supply "
                "a nef basis via basis_p", cls.coords)
        if not is_effective(data, cls.pairings):
            raise ConsistencyError(MODULE, op,
                                   "enumerated class fails the membership test",
                                   cls.pairings)
        out.append(cls)
    out.sort(key=lambda c: (c.grade, c.coords))
    return out


def brute_force_effective(data: ToricData, bound, denominator=None) -> list:
    """Independent grid enumeration for small kernel ranks (test oracle).

    Scans all coordinate tuples with the box-denominator cleared inside a box
    large enough to contain every class of grade <= bound, keeping those that
    pass the membership predicate.
    """
    bound = frac(bound)
    r = data.r
    if r == 0:
        return []
    if r > 2:
        raise ValidationError(MODULE, "brute_force_effective",
                              "grid oracle only supports kernel rank <= 2", r)
    if denominator is None:
        denominator = 1
        for b in data.boxes:
            for c in b.coefficients:
                denominator = denominator * c.denominator // gcd(
                    denominator, c.denominator)
    lim = int(bound * denominator) * (data.m_prime + 2)
    out = []
    for combo in itertools.product(range(-lim, lim + 1), repeat=r):
        coords = [Fraction(k, denominator) for k in combo]
        if all(c == 0 for c in coords):
            continue
        grade = sum(coords, Fraction(0))
        if grade <= 0 or grade > bound:
            continue
        pairings = data.pairings_from_coords(coords)
        if is_effective(data, pairings):
            out.append(eff_class(data, coords))
    out.sort(key=lambda c: (c.grade, c.coords))
    return out


# ---------------------------------------------------------------------------
# filters feeding the mirror-map series


def _degree_zero(data: ToricData, cls: EffClass) -> bool:
    """Vanishing of the anticanonical pairing (sum over every column)."""
    return data.rho_hat_pairing(cls.pairings) == 0


def filter_g_smooth(data: ToricData, classes, j) -> list:
    """Classes feeding the ray-indexed series: trivial sector, the chosen ray
    pairing a negative integer, every other column a nonnegative integer, and
    anticanonical degree zero."""
    out = []
    for cls in classes:
        if not cls.sector.is_zero():
            continue
        if not _degree_zero(data, cls):
            continue
        if not _is_neg_int(cls.pairings[j]):
            continue
        if all(_is_nonneg_int(p) for i, p in enumerate(cls.pairings) if i != j):
            out.append(cls)
    return out


def filter_g_orbi(data: ToricData, classes, j) -> list:
    """Classes feeding the twisted-sector series of extra column j: sector
    equal to that box element, no column pairing to a negative integer
    (fractional negative pairings are admitted), anticanonical degree zero."""
    target = data.column_vector(j)
    out = []
    for cls in classes:
        if cls.sector.is_zero() or cls.sector.vector != tuple(target):
            continue
        if not _degree_zero(data, cls):
            continue
        if any(_is_neg_int(p) for p in cls.pairings):
            continue
        out.append(cls)
    return out
