"""Mirror-map series, forward coordinate change, and its formal inverse.

The building blocks are one scalar series per column: rays pick up the
divisor-linear z^-1 extraction, extra vectors the twisted-sector one.  Each
flat coordinate variable corresponds to a curve class c, and its relation is

    log q_c = sum_b (p_b . c) log y_b + sum_{j in rays} (divisor_j . c) g_j(y)

with the tau relation tau_v = g_v(y) for every extra vector.  On compactified
data the added variable's curve class is the compactified disk class; the
non-infinity relations must restrict to the plain mirror map of the base fan,
which is asserted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .effective import dual_class, enumerate_effective
from .errors import ConsistencyError, ValidationError
from .fan import CompactifiedData, ToricData, verify_semi_fano
from .hyper import y_monomial, z_extract
from .series import Series, frac, invert_map, mono, mono_grade

MODULE = "mirror-maps"


def closed_form_ray_coefficient(pairings, j, skip=()):
    """Coefficient of a ray-series class in closed form:
    (-1)^(p-1) (-p-1)! / prod_{i != j} (pairing_i)! for pairing p < 0 at j."""
    p = frac(pairings[j])
    assert p.denominator == 1 and p < 0
    num = Fraction((-1) ** (int(-p) - 1)) * factorial(int(-p) - 1)
    den = Fraction(1)
    for i, q in enumerate(pairings):
        if i == j or i in skip:
            continue
        q = frac(q)
        assert q.denominator == 1 and q >= 0
        den *= factorial(int(q))
    return num / den


def g_series(data: ToricData, j: int, order, classes=None, cd=None) -> Series:
    """Scalar mirror-map series of column j (ray or extra vector)."""
    op = "g_series"
    if not (0 <= j < data.m_prime):
        raise ValidationError(MODULE, op, f"column {j} out of range", j)
    order = frac(order)
    if classes is None:
        classes = enumerate_effective(data, order)
    weights = data.y_weights()
    out = Series.zero(weights, order)
    is_ray = j < data.m
    target_vec = None if is_ray else tuple(data.column_vector(j))
    for cls in classes:
        zf = z_extract(data, cls, cd=cd)
        kind = zf.classify(cls)
        if kind is None:
            continue
        if is_ray and kind == ("divisor", j):
            skip = ()
            if data.infinity_column is not None:
                # divisor-linear terms never pair with the added divisor
                assert cls.pairings[data.infinity_column] == 0
                skip = (data.infinity_column,)
            expected = closed_form_ray_coefficient(cls.pairings, j, skip=skip)
            if zf.scalar != expected:
                raise ConsistencyError(MODULE, op,
                                       "ray coefficient disagrees with its "
                                       "closed form",
                                       {"pairings": cls.pairings,
                                        "got": zf.scalar, "want": expected})
        elif not is_ray and kind[0] == "sector" and \
                kind[1].vector == target_vec:
            pass
        else:
            continue
        out = out + Series.monomial(y_monomial(data, cls), zf.scalar,
                                    weights, order)
    return out


@dataclass
class Relation:
    """One forward relation: target = monomial(y) * exp(correction(y)),
    or target = series(y) for twisted-sector targets."""
    target: str
    kind: str              # "flat" or "twisted"
    series: Series         # the full right-hand side
    monomial: tuple = ()   # flat only
    correction: Series | None = None  # flat only
    curve_class: tuple = ()  # flat only: coordinates of the curve class

    def to_json(self):
        d = {"target": self.target, "kind": self.kind,
             "series": self.series.to_json()}
        return d


@dataclass
class MirrorMap:
    data: ToricData
    order: Fraction
    g: dict                      # column -> Series
    relations: list
    cd: CompactifiedData | None = None
    _inverse: dict | None = field(default=None, repr=False)

    def relation_for(self, target):
        for rel in self.relations:
            if rel.target == target:
                return rel
        raise KeyError(target)

    def target_weights(self):
        w = {}
        for rel in self.relations:
            if rel.kind == "flat":
                w[rel.target] = mono_grade(rel.monomial, self.data.y_weights())
            else:
                w[rel.target] = rel.series.min_grade()
        return w

    def inverse(self):
        if self._inverse is None:
            self._inverse = inverse_mirror_map(self)
        return self._inverse

    def to_json(self):
        return {
            "order": str(self.order),
            "g": {str(j): s.to_json() for j, s in sorted(self.g.items())},
            "relations": [r.to_json() for r in self.relations],
        }


def _require_cy_semifano(data: ToricData, op):
    if data.cy_covector is None:
        raise ValidationError(MODULE, op,
                              "fan is not Calabi-Yau: no covector pairs to 1 "
                              "with every ray and extra vector", None)
    verify_semi_fano(data)
    if not data.split_ok:
        raise ValidationError(MODULE, op,
                              "kernel basis is not adapted to the extra "
                              "vectors (their divisor classes must vanish on "
                              "the flat prefix); supply basis_p", None)


def _flat_relation(data: ToricData, target, curve_coords, g, order) -> Relation:
    """Assemble target = prod_b y_b^{p_b.c} * exp(sum_j (D_j.c) g_j)."""
    weights = data.y_weights()
    names = data.y_vars()
    curve_coords = [frac(x) for x in curve_coords]
    m = mono(*((names[b], curve_coords[b]) for b in range(data.r)))
    pairings = data.pairings_from_coords(curve_coords)
    corr = Series.zero(weights, frac(order))
    for j in range(data.m):  # rays of this fan, including an added ray
        c = frac(pairings[j])
        if c != 0 and not g[j].is_zero():
            corr = corr + g[j] * c
    series = Series.monomial(m, 1, weights, frac(order)) * corr.exp()
    return Relation(target=target, kind="flat", series=series, monomial=m,
                    correction=corr, curve_class=tuple(curve_coords))


def _twisted_relations(data: ToricData, g, order):
    out = []
    for j in data.extra_columns():
        gj = g[j]
        if gj.is_zero():
            raise ConsistencyError(MODULE, "toric_mirror_map",
                                   f"twisted series of column {j} vanished; "
                                   "raise the order", j)
        lead_m, lead_c, _ = gj.factor_unit()
        dual = dual_class(data, j)
        expect = y_monomial(data, dual)
        if lead_m != expect or lead_c != 1:
            raise ConsistencyError(MODULE, "toric_mirror_map",
                                   "twisted series does not start at its dual "
                                   "class with coefficient 1",
                                   {"lead": lead_m, "expect": expect})
        out.append(Relation(target=data.tau_name(j), kind="twisted", series=gj))
    return out


def toric_mirror_map(data: ToricData, order) -> MirrorMap:
    """Forward mirror map of a Calabi-Yau semi-Fano fan."""
    op = "toric_mirror_map"
    _require_cy_semifano(data, op)
    order = frac(order)
    classes = enumerate_effective(data, order)
    g = {j: g_series(data, j, order, classes=classes)
         for j in range(data.m_prime)}
    relations = []
    for a in range(data.r_prime):
        coords = [Fraction(int(b == a)) for b in range(data.r)]
        relations.append(_flat_relation(data, f"q{a + 1}", coords, g, order))
    relations.extend(_twisted_relations(data, g, order))
    return MirrorMap(data=data, order=order, g=g, relations=relations)


def relative_mirror_map(cd: CompactifiedData, order) -> MirrorMap:
    """Forward mirror map of the compactified pair.

    Computed with the same machinery on the compactified fan; afterwards the
    non-infinity relations are asserted to coincide with the plain mirror map
    of the base fan, and the infinity relation matches the disk-class case
    split: for a ray disk it is the base ray series on top of the new flat
    variable, for a box disk the dual-class monomial migrates into the
    relation and its correction is the cone-weighted sum of ray series.
    """
    op = "relative_mirror_map"
    _require_cy_semifano(cd.base, op)
    order = frac(order)
    bar = cd.bar
    classes = enumerate_effective(bar, order)
    g = {j: g_series(bar, j, order, classes=classes, cd=cd)
         for j in range(bar.m_prime)}
    relations = []
    for a in range(bar.r_prime):
        coords = [Fraction(int(b == a)) for b in range(bar.r)]
        relations.append(_flat_relation(bar, f"q{a + 1}", coords, g, order))
    beta_coords = bar.coords_from_pairings(cd.beta_bar)
    rel_inf = _flat_relation(bar, "qinf", beta_coords, g, order)
    relations.append(rel_inf)
    relations.extend(_twisted_relations(bar, g, order))

    # the added ray's own series must vanish: its pairing with every
    # enumerated class is nonnegative
    if not g[cd.infinity_ray].is_zero():
        raise ConsistencyError(MODULE, op,
                               "added ray acquired a nonzero series",
                               g[cd.infinity_ray].to_json())

    # restriction consistency with the base mirror map
    base_mm = toric_mirror_map(cd.base, order)
    bar_weights = bar.y_weights()
    for a in range(bar.r_prime):
        got = relations[a]
        want = base_mm.relation_for(f"q{a + 1}")
        if not got.series.same_terms(_reweight(want.series, bar_weights)):
            raise ConsistencyError(MODULE, op,
                                   "flat relation differs from the base "
                                   "mirror map", got.target)
    for j in cd.base.extra_columns():
        got = next(r for r in relations
                   if r.kind == "twisted" and r.target == cd.base.tau_name(j))
        want = base_mm.relation_for(cd.base.tau_name(j))
        if not got.series.same_terms(_reweight(want.series, bar_weights)):
            raise ConsistencyError(MODULE, op,
                                   "twisted relation differs from the base "
                                   "mirror map", got.target)

    # disk-class case split
    kind, idx = cd.disk
    names = bar.y_vars()
    if kind == "ray":
        if rel_inf.monomial != mono((names[-1], 1)):
            raise ConsistencyError(MODULE, op,
                                   "ray-disk relation has a nontrivial "
                                   "monomial part", rel_inf.monomial)
        base_g = base_mm.g[idx]
        if not rel_inf.correction.same_terms(_reweight(base_g, bar_weights)):
            raise ConsistencyError(MODULE, op,
                                   "ray-disk correction is not the base ray "
                                   "series", idx)
    else:
        dual = dual_class(cd.base, idx)
        expo = mono_grade(rel_inf.monomial, bar_weights)
        want_mono = mono((names[-1], 1),
                         *((names[b], -dual.coords[b])
                           for b in range(cd.base.r)))
        if rel_inf.monomial != want_mono:
            raise ConsistencyError(MODULE, op,
                                   "box-disk relation monomial is not the "
                                   "dual-class twist of the new variable",
                                   {"got": rel_inf.monomial,
                                    "want": want_mono})
        support, coeffs = cd.base.extra_cone_data(idx)
        want = Series.zero(bar_weights, order)
        for i, c in zip(support, coeffs):
            want = want + g[cd.col_map[i]] * c
        if not rel_inf.correction.same_terms(want):
            raise ConsistencyError(MODULE, op,
                                   "box-disk correction is not the "
                                   "cone-weighted ray sum", idx)
        if expo <= 0:
            raise ConsistencyError(MODULE, op,
                                   "compactified flat variable has "
                                   "non-positive weight", expo)
    return MirrorMap(data=bar, order=order, g=g, relations=relations, cd=cd)


def _reweight(series: Series, weights) -> Series:
    """Recast a series into a larger variable space with the same weights on
    shared variables."""
    for v, w in series.weights.items():
        if weights.get(v) != w:
            raise ConsistencyError(MODULE, "reweight",
                                   f"variable {v} missing or reweighted", v)
    return Series(weights, series.order, dict(series.terms))


def inverse_mirror_map(mm: MirrorMap, order=None) -> dict:
    """Formal inverse assignment y_b -> series in the flat/twisted variables.

    Delegates to the generic fixed-point inversion; the round trip is
    verified there.
    """
    order = mm.order if order is None else frac(order)
    rels = [(r.target, r.series) for r in mm.relations]
    return invert_map(rels, order)
