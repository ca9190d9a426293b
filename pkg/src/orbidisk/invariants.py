"""Disk potentials, individual invariants, and the two-route cross-check.

The potential of a ray disk class is exp(-g(y)) with y replaced by the
inverse mirror map; a box disk class contributes its dual-class monomial times
exp of minus the cone-weighted ray series.  The same series is reproduced
along an independent route on the compactified fan: invert the relative
mirror map and read off the compactifying monomial divided by its flat
variable.  The two must agree exactly, term by term.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .effective import dual_class
from .errors import ConsistencyError
from .fan import CompactifiedData, ToricData, parse_disk_selector
from .hyper import relative_ifunction_oracle, y_monomial
from .mirrormap import (MirrorMap, inverse_mirror_map, relative_mirror_map,
                        toric_mirror_map)
from .series import Series, frac, mono, mono_pow

MODULE = "invariants"


@dataclass
class DiskPotential:
    disk: tuple             # ("ray", i) or ("box", j)
    series: Series          # in flat/twisted variables
    normalization: str      # "1+delta" or "tau+delta"
    data: ToricData

    def to_json(self):
        return {
            "disk": f"{self.disk[0]}:{self.disk[1]}",
            "normalization": self.normalization,
            "series": self.series.to_json(),
        }


def disk_potential(data: ToricData, disk, order, mirror: MirrorMap = None
                   ) -> DiskPotential:
    """Generating series of the invariants attached to one basic disk class."""
    op = "disk_potential"
    if isinstance(disk, str):
        disk = parse_disk_selector(disk, data)
    kind, idx = disk
    order = frac(order)
    if mirror is None:
        mirror = toric_mirror_map(data, order)
    inverse = mirror.inverse()
    weights = data.y_weights()

    if kind == "ray":
        gj = mirror.g[idx]
        pot = (-(gj.substitute(inverse))).exp() if not gj.is_zero() else \
            _one_in_target(mirror, order)
        if pot.constant_term() != 1:
            raise ConsistencyError(MODULE, op,
                                   "ray potential does not start at 1",
                                   pot.constant_term())
        return DiskPotential(disk=disk, series=pot, normalization="1+delta",
                             data=data)

    # box disk: dual-class monomial times exp of minus the cone-weighted sum
    dual = dual_class(data, idx)
    support, coeffs = data.extra_cone_data(idx)
    expo = Series.zero(weights, order)
    for i, c in zip(support, coeffs):
        expo = expo + mirror.g[i] * c
    head = Series.monomial(y_monomial(data, dual), 1, weights, order)
    pot = head.substitute(inverse)
    if not expo.is_zero():
        pot = pot * (-(expo.substitute(inverse))).exp()
    lead_m, lead_c, _ = pot.factor_unit(op)
    tau = mono((data.tau_name(idx), 1))
    if lead_m != tau or lead_c != 1:
        raise ConsistencyError(MODULE, op,
                               "box potential does not start at its twisted "
                               "variable with coefficient 1",
                               {"lead": lead_m, "coeff": lead_c})
    return DiskPotential(disk=disk, series=pot, normalization="tau+delta",
                         data=data)


def _one_in_target(mirror: MirrorMap, order):
    weights = mirror.target_weights()
    return Series.constant(1, weights, frac(order))


# ---------------------------------------------------------------------------
# invariant extraction


@dataclass
class InvariantTable:
    disk: tuple
    entries: dict   # (alpha tuple, ((label, count), ...)) -> Fraction
    data: ToricData

    def value(self, alpha, insertions=()):
        key = (tuple(int(a) for a in alpha),
               tuple(sorted((str(l), int(k)) for l, k in insertions)))
        return self.entries.get(key, Fraction(0))

    def to_json(self):
        from .series import frac_str
        rows = []
        for (alpha, ins), val in sorted(self.entries.items()):
            rows.append({"alpha": list(alpha),
                         "insertions": {l: k for l, k in ins},
                         "value": frac_str(val)})
        return rows


def extract_invariants(dp: DiskPotential) -> InvariantTable:
    """Unpack a potential into individual invariant values.

    The coefficient of q^alpha prod tau_v^{k_v} carries the invariant with
    l = sum k_v insertions divided by prod k_v! (unordered insertions), so the
    table entry multiplies the factorials back in.
    """
    op = "extract_invariants"
    data = dp.data
    tau_boxes = {}
    for j in data.extra_columns():
        name = data.tau_name(j)
        box = next(b for b in data.boxes
                   if b.vector == tuple(data.column_vector(j)))
        tau_boxes[name] = box.label()
    q_names = [f"q{a + 1}" for a in range(data.r_prime)]
    entries = {}
    for m, coeff in dp.series.terms.items():
        alpha = [Fraction(0)] * data.r_prime
        counts = {}
        for v, e in m:
            if v in tau_boxes:
                counts[tau_boxes[v]] = e
            elif v in q_names:
                alpha[q_names.index(v)] = e
            else:
                raise ConsistencyError(MODULE, op,
                                       f"unexpected variable {v} in potential",
                                       v)
        if any(a.denominator != 1 or a < 0 for a in alpha) or \
                any(k.denominator != 1 or k < 0 for k in counts.values()):
            raise ConsistencyError(MODULE, op,
                                   "non-representable exponent in potential "
                                   "monomial", m)
        mult = Fraction(1)
        for k in counts.values():
            mult *= factorial(int(k))
        key = (tuple(int(a) for a in alpha),
               tuple(sorted((l, int(k)) for l, k in counts.items())))
        entries[key] = coeff * mult
    return InvariantTable(disk=dp.disk, entries=entries, data=data)


# ---------------------------------------------------------------------------
# the independent route through the compactified fan


def oracle_potential(cd: CompactifiedData, order) -> Series:
    """The same potential out of the compactified mirror map alone.

    Inverts the relative mirror map, evaluates the compactifying-class
    monomial under the inverse and strips its flat variable.  Runs the
    hypergeometric summation check along the way.
    """
    op = "oracle_potential"
    order = frac(order)
    bar = cd.bar
    beta_coords = bar.coords_from_pairings(cd.beta_bar)
    w_inf = sum((frac(c) for c in beta_coords), Fraction(0))
    if w_inf <= 0:
        raise ConsistencyError(MODULE, op,
                               "disk class has non-positive grade", w_inf)
    bar_order = order + w_inf
    relative_ifunction_oracle(cd, bar_order)
    mm = relative_mirror_map(cd, bar_order)
    inverse = inverse_mirror_map(mm)

    names = bar.y_vars()
    dinf_coords = bar.coords_from_pairings(cd.d_infinity)
    head = mono(*((names[b], dinf_coords[b]) for b in range(bar.r)))
    val = Series.monomial(head, 1, bar.y_weights(), bar_order)
    val = val.substitute(inverse)
    out = val.mul_monomial(mono_pow(mono(("qinf", 1)), -1))
    for m in out.terms:
        if any(v == "qinf" for v, _ in m):
            raise ConsistencyError(MODULE, op,
                                   "flat compactification variable failed to "
                                   "cancel", m)
    # re-express without the qinf variable
    weights = {v: w for v, w in out.weights.items() if v != "qinf"}
    return Series(weights, min(out.order, order), dict(out.terms))


def compare_potentials(cd: CompactifiedData, order, mirror: MirrorMap = None):
    """Both derivations of the potential; they must agree exactly.

    Returns (disk_potential, oracle_series).  Raises ConsistencyError with
    the first differing monomial on mismatch.
    """
    op = "compare_potentials"
    order = frac(order)
    dp = disk_potential(cd.base, cd.disk, order, mirror=mirror)
    oracle = oracle_potential(cd, order)
    a, b = dp.series, oracle
    if set(a.weights) != set(b.weights):
        shared = {v: w for v, w in a.weights.items()}
        for v, w in b.weights.items():
            shared.setdefault(v, w)
        a = Series(shared, a.order, dict(a.terms))
        b = Series(shared, b.order, dict(b.terms))
    if not a.same_terms(b, up_to=order):
        raise ConsistencyError(MODULE, op,
                               "potential disagrees with its compactified "
                               "derivation", a.first_difference(b))
    return dp, oracle
