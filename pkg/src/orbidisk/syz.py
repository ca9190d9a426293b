"""Instanton-corrected mirror potential and its Landau-Ginzburg presentation.

The coefficient of each lattice exponent is a monomial in the flat variables,
pinned down by the exponent relations of the kernel basis once a gauge is
chosen (the torus action lets the coefficients on one full-dimensional cone be
set to 1).  The lattice exponents are reduced to n-1 effective coordinates by
splitting the lattice along the Calabi-Yau covector.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .effective import dual_class
from .errors import ConsistencyError, ValidationError
from .fan import ToricData
from .invariants import DiskPotential
from .series import frac, frac_str

MODULE = "syz-builder"


@dataclass(frozen=True)
class GaugeChoice:
    cone: tuple  # ray indices of a listed full-dimensional cone

    @classmethod
    def for_data(cls, data: ToricData, cone_index=None):
        if cone_index is None:
            cone_index = 0
        cones = data.max_cones
        if not (0 <= cone_index < len(cones)):
            raise ValidationError(MODULE, "gauge", f"no maximal cone {cone_index}",
                                  cone_index)
        return cls(cone=tuple(cones[cone_index]))


def _q_exponents_of_dual(data: ToricData, j):
    """Flat-variable exponent vector of the dual-class monomial of extra j."""
    d = dual_class(data, j)
    return [d.coords[a] for a in range(data.r_prime)]


def solve_coefficient_system(data: ToricData, gauge: GaugeChoice) -> dict:
    """Monomial coefficients per column, as flat-variable exponent vectors.

    Gauge-fixed columns get the empty exponent vector (coefficient 1).  The
    exponent relations determine the rest uniquely; a rank-deficient system is
    reported with a kernel witness.
    """
    op = "solve_coefficient_system"
    if tuple(sorted(gauge.cone)) not in {tuple(sorted(c)) for c in data.max_cones}:
        raise ValidationError(MODULE, op, "gauge cone is not a listed maximal cone",
                              gauge.cone)
    r, rp = data.r, data.r_prime
    unknowns = [i for i in range(data.m) if i not in gauge.cone] + \
        list(data.extra_columns())
    if len(unknowns) != r:
        raise ConsistencyError(MODULE, op, "gauge does not fix n coefficients",
                               unknowns)
    if r == 0:
        return {i: [] for i in range(data.m_prime)}
    a = [[data.gamma[row][u] for u in unknowns] for row in range(r)]
    if linalg.rank_rational(a) != r:
        witness = linalg.integer_kernel_basis(a)
        raise ConsistencyError(MODULE, op,
                               "residual gauge freedom after fixing a cone",
                               witness)
    ainv = linalg.invert_rational(a)
    # right-hand side per relation row, one exponent slot per flat variable
    rhs = []
    for row in range(r):
        if row < rp:
            rhs.append([Fraction(int(k == row)) for k in range(rp)])
        else:
            vec = [Fraction(0)] * rp
            for j in data.extra_columns():
                mja = data.gamma[row][j]
                if mja:
                    dq = _q_exponents_of_dual(data, j)
                    for k in range(rp):
                        vec[k] -= mja * dq[k]
            rhs.append(vec)
    sol = {i: [Fraction(0)] * rp for i in range(data.m_prime)}
    for ui, u in enumerate(unknowns):
        sol[u] = [sum(ainv[ui][row] * rhs[row][k] for row in range(r))
                  for k in range(rp)]
    for i in gauge.cone:
        sol[i] = [Fraction(0)] * rp
    _verify_coefficient_relations(data, sol)
    return {i: sol[i] for i in range(data.m_prime)}


def _verify_coefficient_relations(data: ToricData, sol):
    """Substitute the solved exponents back into the defining relations."""
    op = "solve_coefficient_system"
    r, rp = data.r, data.r_prime
    for row in range(r):
        lhs = [Fraction(0)] * rp
        cols = range(data.m) if row < rp else range(data.m_prime)
        for i in cols:
            mia = data.gamma[row][i]
            if mia:
                for k in range(rp):
                    lhs[k] += mia * sol[i][k]
        if row < rp:
            want = [Fraction(int(k == row)) for k in range(rp)]
        else:
            want = [Fraction(0)] * rp
            for j in data.extra_columns():
                mja = data.gamma[row][j]
                if mja:
                    dq = _q_exponents_of_dual(data, j)
                    for k in range(rp):
                        want[k] -= mja * dq[k]
        if lhs != want:
            raise ConsistencyError(MODULE, op,
                                   "solved coefficients violate a defining "
                                   "relation", {"row": row, "lhs": lhs,
                                                "want": want})


def covector_splitting(data: ToricData):
    """(basis of the covector's kernel sublattice, section vector w).

    Every lattice exponent b splits as w + (b - w) with the difference in the
    kernel sublattice; its coordinates there are the reduced exponents."""
    op = "mirror_potential"
    v = data.cy_covector
    if v is None:
        raise ValidationError(MODULE, op, "Calabi-Yau covector required", None)
    n = data.n
    basis = linalg.integer_kernel_basis([list(v)])
    s, u, vm = linalg.smith_normal_form([list(v)])
    if abs(s[0][0]) != 1:
        raise ConsistencyError(MODULE, op, "covector is not primitive", v)
    sign = s[0][0] * u[0][0]
    w = [sign * vm[i][0] for i in range(n)]
    if sum(vi * wi for vi, wi in zip(v, w)) != 1:
        raise ConsistencyError(MODULE, op, "covector section failed", w)
    return basis, w


def reduced_exponent(data: ToricData, basis, w, b):
    """Coordinates of b - w over the kernel sublattice basis."""
    n = data.n
    target = [b[i] - w[i] for i in range(n)]
    a = [[basis[j][i] for j in range(len(basis))] for i in range(n)]
    x = linalg.solve_rational(a, target)
    if x is None or any(c.denominator != 1 for c in x):
        raise ConsistencyError(MODULE, "mirror_potential",
                               "exponent does not reduce integrally", b)
    return [int(c) for c in x]


@dataclass
class MirrorPotential:
    data: ToricData
    gauge: GaugeChoice
    coefficients: dict        # column -> exponent vector over flat variables
    terms: list               # (column, lattice vector, reduced, series)
    basis: list               # kernel sublattice basis (columns)
    section: list             # w


def mirror_potential(data: ToricData, potentials: dict, gauge: GaugeChoice,
                     order) -> MirrorPotential:
    """Assemble the corrected potential from per-class disk potentials.

    `potentials` maps ("ray", i) / ("box", j) to DiskPotential; one entry per
    ray and per extra vector is required.
    """
    op = "mirror_potential"
    order = frac(order)
    sol = solve_coefficient_system(data, gauge)
    basis, w = covector_splitting(data)
    terms = []
    for i in range(data.m_prime):
        key = ("ray", i) if i < data.m else ("box", i)
        if key not in potentials:
            raise ValidationError(MODULE, op,
                                  f"missing disk potential for {key}", key)
        dp = potentials[key]
        if not isinstance(dp, DiskPotential) or dp.disk != key:
            raise ValidationError(MODULE, op,
                                  f"potential for {key} belongs to {getattr(dp, 'disk', None)}",
                                  key)
        vec = tuple(data.column_vector(i))
        red = reduced_exponent(data, basis, w, vec)
        terms.append((i, vec, tuple(red), dp.series.truncate(
            min(order, dp.series.order))))
    return MirrorPotential(data=data, gauge=gauge, coefficients=sol,
                           terms=terms, basis=basis, section=w)


def emit_lg_model(mp: MirrorPotential) -> dict:
    """Serialized Landau-Ginzburg presentation uv = G, superpotential u."""
    data = mp.data
    q_names = [f"q{a + 1}" for a in range(data.r_prime)]
    doc = {
        "equation": "uv = G",
        "W": "u",
        "gauge": {"cone": list(mp.gauge.cone)},
        "covector_basis": {
            "kernel_basis": [list(b) for b in mp.basis],
            "section": list(mp.section),
            "covector": list(data.cy_covector),
        },
        "terms": [],
    }
    for i, vec, red, series in mp.terms:
        coeff = {q_names[k]: frac_str(e)
                 for k, e in enumerate(mp.coefficients[i]) if e != 0}
        doc["terms"].append({
            "column": i,
            "exponent": list(vec),
            "reduced_exponent": list(red),
            "C": coeff,
            "series": series.to_json(),
        })
    return doc


def gauge_character(data: ToricData, sol_a: dict, sol_b: dict):
    """Covector family relating two gauge solutions.

    Returns u with sol_b[i] - sol_a[i] = <u, column_i> for every column, one
    exponent vector per flat variable; raises if no such character exists.
    """
    op = "gauge_character"
    n, rp = data.n, data.r_prime
    rows = []
    rhs = []
    for i in range(data.m_prime):
        rows.append(list(data.column_vector(i)))
        rhs.append([sol_b[i][k] - sol_a[i][k] for k in range(rp)])
    out = []
    for k in range(rp):
        x = linalg.solve_rational(rows, [r[k] for r in rhs])
        if x is None:
            raise ConsistencyError(MODULE, op,
                                   "gauge solutions are not related by a "
                                   "character", k)
        out.append(x)
    return out
