"""Exact multivariate truncated power series with rational exponents.

A series is a finite map monomial -> Fraction together with a positive weight
per variable (the grading) and a truncation order: terms of grade > order are
absent and undefined, terms of grade <= order are exact.  All arithmetic is
over Q; nothing here ever touches a float.

Monomials are stored as sorted tuples of (variable, exponent) pairs with no
zero exponents, so they are hashable and canonically ordered.
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil

from .errors import ValidationError, ConsistencyError

MODULE = "series-engine"


def _err(op, msg, datum=None):
    return ValidationError(MODULE, op, msg, datum)


def var_key(v: str):
    """Canonical variable order: alphabetic prefix, finite indices, 'inf' last."""
    i = 0
    while i < len(v) and not (v[i].isdigit() or v[i:] == "inf"):
        i += 1
    prefix, suffix = v[:i], v[i:]
    if suffix == "inf":
        return (prefix, 1, 0)
    return (prefix, 0, int(suffix) if suffix else -1)


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def frac_str(x: Fraction) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s)
    if isinstance(s, int):
        return Fraction(s)
    raise _err("parse", f"not a rational: {s!r}", s)


# ---------------------------------------------------------------------------
# monomials

ONE_MONO: tuple = ()


def mono(*pairs) -> tuple:
    """Build a monomial from (var, exponent) pairs; zero exponents dropped."""
    items = [(v, frac(e)) for v, e in pairs if frac(e) != 0]
    items.sort(key=lambda p: var_key(p[0]))
    return tuple(items)


def mono_mul(a: tuple, b: tuple) -> tuple:
    d = dict(a)
    for v, e in b:
        e2 = d.get(v, Fraction(0)) + e
        if e2 == 0:
            d.pop(v, None)
        else:
            d[v] = e2
    return tuple(sorted(d.items(), key=lambda p: var_key(p[0])))


def mono_pow(m: tuple, k) -> tuple:
    k = frac(k)
    if k == 0:
        return ONE_MONO
    return tuple((v, e * k) for v, e in m)


def mono_grade(m: tuple, weights: dict) -> Fraction:
    return sum((weights[v] * e for v, e in m), Fraction(0))


def mono_str(m: tuple) -> str:
    if not m:
        return "1"
    parts = []
    for v, e in m:
        if e == 1:
            parts.append(v)
        elif e.denominator == 1 and e > 0:
            parts.append(f"{v}^{e.numerator}")
        else:
            parts.append(f"{v}^({frac_str(e)})")
    return "*".join(parts)


# ---------------------------------------------------------------------------


class Series:
    """Truncated series: exact coefficients up to a grade bound.

    weights: var -> positive Fraction, the grading of each variable.
    order:   grade bound (inclusive).
    terms:   monomial -> nonzero Fraction, every stored grade in [0, order].
    """

    __slots__ = ("weights", "order", "terms")

    def __init__(self, weights: dict, order, terms: dict | None = None):
        self.weights = {v: frac(w) for v, w in weights.items()}
        for v, w in self.weights.items():
            if w <= 0:
                raise _err("grading", f"weight of {v} must be positive", w)
        self.order = frac(order)
        t = {}
        if terms:
            for m, c in terms.items():
                c = frac(c)
                if c == 0:
                    continue
                g = mono_grade(m, self.weights)
                if g < 0:
                    raise _err("grading", f"monomial {mono_str(m)} has negative grade", g)
                if g > self.order:
                    continue
                t[m] = c
        self.terms = t

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, weights, order):
        return cls(weights, order)

    @classmethod
    def constant(cls, c, weights, order):
        return cls(weights, order, {ONE_MONO: frac(c)})

    @classmethod
    def variable(cls, v, weights, order):
        return cls(weights, order, {mono((v, 1)): Fraction(1)})

    @classmethod
    def monomial(cls, m, c, weights, order):
        return cls(weights, order, {m: frac(c)})

    # -- helpers ------------------------------------------------------------

    def _check_compatible(self, other, op):
        if self.weights != other.weights:
            raise _err(op, "grading mismatch between operands",
                       (self.weights, other.weights))

    def grade_of(self, m):
        return mono_grade(m, self.weights)

    def coefficient(self, m) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get(ONE_MONO, Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def min_grade(self):
        """Smallest grade among stored terms, or None for the zero series."""
        if not self.terms:
            return None
        return min(self.grade_of(m) for m in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda kv: (self.grade_of(kv[0]), kv[0]))

    def same_terms(self, other, up_to=None) -> bool:
        """Exact equality of coefficients up to min(self.order, other.order, up_to)."""
        bound = min(self.order, other.order)
        if up_to is not None:
            bound = min(bound, frac(up_to))
        a = {m: c for m, c in self.terms.items() if self.grade_of(m) <= bound}
        b = {m: c for m, c in other.terms.items() if other.grade_of(m) <= bound}
        return a == b

    def first_difference(self, other):
        """First (grade, monomial, coeff_self, coeff_other) where the two differ."""
        bound = min(self.order, other.order)
        monos = set(self.terms) | set(other.terms)
        diffs = []
        for m in monos:
            g = self.grade_of(m)
            if g > bound:
                continue
            a, b = self.coefficient(m), other.coefficient(m)
            if a != b:
                diffs.append((g, m, a, b))
        if not diffs:
            return None
        return min(diffs)

    def __eq__(self, other):
        return (isinstance(other, Series) and self.weights == other.weights
                and self.order == other.order and self.terms == other.terms)

    def __hash__(self):
        raise TypeError("Series is not hashable")

    def __repr__(self):
        return f"Series({self.text()}, order={frac_str(self.order)})"

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            cs = frac_str(c)
            ms = mono_str(m)
            if ms == "1":
                parts.append(cs)
            elif cs == "1":
                parts.append(ms)
            elif cs == "-1":
                parts.append(f"-{ms}")
            else:
                parts.append(f"{cs}*{ms}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    # -- ring operations ----------------------------------------------------

    def __neg__(self):
        return Series(self.weights, self.order, {m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Series.constant(other, self.weights, self.order)
        self._check_compatible(other, "add")
        order = min(self.order, other.order)
        t = dict(self.terms)
        for m, c in other.terms.items():
            c2 = t.get(m, Fraction(0)) + c
            if c2 == 0:
                t.pop(m, None)
            else:
                t[m] = c2
        return Series(self.weights, order, t)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Series.constant(other, self.weights, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = frac(other)
            if c == 0:
                return Series.zero(self.weights, self.order)
            return Series(self.weights, self.order,
                          {m: c * x for m, x in self.terms.items()})
        self._check_compatible(other, "mul")
        order = min(self.order, other.order)
        t = {}
        grades_b = {m: other.grade_of(m) for m in other.terms}
        for ma, ca in self.terms.items():
            ga = self.grade_of(ma)
            for mb, cb in other.terms.items():
                if ga + grades_b[mb] > order:
                    continue
                m = mono_mul(ma, mb)
                c2 = t.get(m, Fraction(0)) + ca * cb
                if c2 == 0:
                    t.pop(m, None)
                else:
                    t[m] = c2
        return Series(self.weights, order, t)

    __rmul__ = __mul__

    def mul_monomial(self, m: tuple, c=1):
        """Multiply by an exact monomial; the truncation bound shifts with it."""
        g = mono_grade(m, self.weights)
        t = {}
        c = frac(c)
        for ma, ca in self.terms.items():
            t[mono_mul(ma, m)] = ca * c
        return Series(self.weights, self.order + g, t)

    def truncate(self, order):
        order = frac(order)
        if order > self.order:
            raise _err("truncate", "cannot extend a series beyond its known order",
                       (self.order, order))
        return Series(self.weights, order, self.terms)

    def pow_int(self, k: int):
        if k < 0:
            raise _err("pow", "negative integer power of a general series", k)
        result = Series.constant(1, self.weights, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- transcendental operations ------------------------------------------

    def exp(self):
        """exp of a series with zero constant term; exact truncated sum."""
        if self.constant_term() != 0:
            raise _err("exp", "exp requires zero constant term", self.constant_term())
        out = Series.constant(1, self.weights, self.order)
        if self.is_zero():
            return out
        step = self.min_grade()
        kmax = int(ceil(self.order / step)) if step > 0 else 0
        power = Series.constant(1, self.weights, self.order)
        fact = 1
        for k in range(1, kmax + 1):
            power = power * self
            fact *= k
            if power.is_zero():
                break
            out = out + power * Fraction(1, fact)
        return out

    def log_one_plus(self):
        """log(1 + s) for s with zero constant term."""
        if self.constant_term() != 0:
            raise _err("log", "log_one_plus requires zero constant term",
                       self.constant_term())
        out = Series.zero(self.weights, self.order)
        if self.is_zero():
            return out
        step = self.min_grade()
        kmax = int(ceil(self.order / step)) if step > 0 else 0
        power = Series.constant(1, self.weights, self.order)
        for k in range(1, kmax + 1):
            power = power * self
            if power.is_zero():
                break
            out = out + power * Fraction((-1) ** (k - 1), k)
        return out

    def pow_frac(self, alpha):
        """Raise to a rational power.

        Integer alpha >= 0 works on any series.  Otherwise the series must
        factor as monomial * (1 + positive-grade), with leading coefficient 1.
        """
        alpha = frac(alpha)
        if alpha.denominator == 1 and alpha >= 0:
            return self.pow_int(int(alpha))
        lead_m, lead_c, unit = self.factor_unit("pow")
        if lead_c != 1:
            raise _err("pow", "fractional power needs leading coefficient 1", lead_c)
        res = (unit.log_one_plus() * alpha).exp()
        return res.mul_monomial(mono_pow(lead_m, alpha))

    def factor_unit(self, op="factor"):
        """Write self = c * m * (1 + u) with u of positive grade.

        Returns (m, c, u).  Requires a unique minimal-grade term.
        """
        if self.is_zero():
            raise _err(op, "cannot factor the zero series")
        items = self.sorted_terms()
        g0 = self.grade_of(items[0][0])
        leads = [it for it in items if self.grade_of(it[0]) == g0]
        if len(leads) > 1:
            raise _err(op, "leading monomial is not unique",
                       [mono_str(m) for m, _ in leads])
        lead_m, lead_c = leads[0]
        inv_m = mono_pow(lead_m, -1)
        unit_terms = {}
        for m, c in items[1:]:
            unit_terms[mono_mul(m, inv_m)] = c / lead_c
        unit = Series(self.weights, self.order - g0, unit_terms)
        return lead_m, lead_c, unit

    # -- substitution ---------------------------------------------------------

    def substitute(self, assignment: dict):
        """Simultaneous substitution var -> Series.

        Every variable occurring in self must be assigned.  Soundness of the
        truncation requires each image's minimal grade to be at least the
        weight of the variable it replaces; this is checked.
        """
        used = sorted({v for m in self.terms for v, _ in m}, key=var_key)
        for v in used:
            if v not in assignment:
                raise _err("substitute", f"unassigned variable {v}", v)
        images = {v: assignment[v] for v in used}
        if images:
            first = next(iter(images.values()))
            tw, torder = first.weights, min(s.order for s in images.values())
        elif assignment:
            first = next(iter(assignment.values()))
            tw, torder = first.weights, self.order
        else:
            tw, torder = self.weights, self.order
        for v, s in images.items():
            if s.weights != tw:
                raise _err("substitute", "assigned series use different gradings", v)
            mg = s.min_grade()
            if mg is not None and mg < self.weights[v]:
                raise _err("substitute",
                           f"image of {v} has grade {mg} below its weight "
                           f"{self.weights[v]}; truncation would be unsound", v)
        order = min(self.order, torder)
        # factor the images needed at fractional or negative exponents once;
        # pure monomial parts combine by exponent arithmetic so that interim
        # negative grades cancel before any series is built
        factored = {}
        for m in self.terms:
            for v, e in m:
                if (e.denominator != 1 or e < 0) and v not in factored:
                    lead_m, lead_c, unit = images[v].factor_unit("substitute")
                    if lead_c != 1:
                        raise _err("substitute",
                                   f"image of {v} must have leading "
                                   f"coefficient 1 for fractional powers",
                                   lead_c)
                    factored[v] = (lead_m, unit)
        out = Series.zero(tw, order)
        for m, c in self.terms.items():
            term = Series.constant(c, tw, order)
            mono_acc = ONE_MONO
            for v, e in m:
                img = images[v]
                if e.denominator == 1 and e >= 0:
                    term = term * img.pow_int(int(e))
                else:
                    lead_m, unit = factored[v]
                    mono_acc = mono_mul(mono_acc, mono_pow(lead_m, e))
                    if not unit.is_zero():
                        term = term * (unit.log_one_plus() * e).exp()
            if mono_acc:
                term = term.mul_monomial(mono_acc)
                if term.order > order:
                    term = term.truncate(order)
            out = out + term
        return out

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "grading": {v: frac_str(w) for v, w in
                        sorted(self.weights.items(), key=lambda kv: var_key(kv[0]))},
            "order": frac_str(self.order),
            "terms": [
                {"exponents": {v: frac_str(e) for v, e in m},
                 "coeff": frac_str(c)}
                for m, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, d) -> "Series":
        weights = {v: parse_frac(w) for v, w in d["grading"].items()}
        terms = {}
        for t in d["terms"]:
            m = mono(*((v, parse_frac(e)) for v, e in t["exponents"].items()))
            terms[m] = parse_frac(t["coeff"])
        return cls(weights, parse_frac(d["order"]), terms)


# ---------------------------------------------------------------------------
# formal inversion of triangular coordinate changes


def invert_map(relations, order, weights=None):
    """Invert a formal coordinate change given by target = series-in-sources.

    relations: list of (target_variable, Series in the source variables).
    Each relation must factor as (monomial in sources) * (unit series with
    constant term 1); the matrix of leading exponents must be invertible.
    Fixed-point iteration refines the answer one grade step at a time.

    Returns {source_variable: Series in the target variables}; the composite
    relations(result) = identity is verified exactly before returning.
    """
    from .linalg import invert_rational

    op = "invert_map"
    if not relations:
        return {}
    src_weights = relations[0][1].weights
    sources = sorted(src_weights, key=var_key)
    if len(relations) != len(sources):
        raise _err(op, f"{len(relations)} relations for {len(sources)} source variables",
                   sources)
    targets = [t for t, _ in relations]
    if len(set(targets)) != len(targets):
        raise _err(op, "duplicate target variable", targets)

    factored = []
    for t, s in relations:
        if s.weights != src_weights:
            raise _err(op, "relations use different source gradings", t)
        m, c, unit = s.factor_unit(op)
        if c != 1:
            raise _err(op, f"relation for {t} has leading coefficient {c}, want 1", t)
        factored.append((t, m, unit))

    exp_matrix = [[dict(m).get(v, Fraction(0)) for v in sources]
                  for _, m, _ in factored]
    inv = invert_rational(exp_matrix)
    if inv is None:
        raise _err(op, "non-triangular system: leading exponent matrix is singular",
                   exp_matrix)

    if weights is None:
        weights = {t: mono_grade(m, src_weights) for t, m, _ in factored}
    for t, w in weights.items():
        if w <= 0:
            raise _err(op, f"target {t} would have non-positive weight {w}", t)

    order = frac(order)
    # a base monomial is exact to any order; orders of the corrected
    # assignments then settle to what the relation data honestly supports
    # (weight of the variable plus the smallest relative unit order involved),
    # which can exceed the requested order and is needed for verification
    top = order + max(src_weights.values()) + 1
    base_mono = {}
    base = {}
    for b, v in enumerate(sources):
        m = mono(*((factored[t][0], inv[b][t]) for t in range(len(factored))))
        base_mono[v] = m
        base[v] = Series.monomial(m, 1, weights, top)

    # smallest grade step contributed by any unit correction
    steps = []
    for _, m, unit in factored:
        mg = unit.min_grade()
        if mg is not None:
            steps.append(mg)
    assign = dict(base)
    if steps:
        max_iter = int(ceil(top / min(steps))) + 1
        for _ in range(max_iter):
            new = {}
            units_at = [unit.substitute(assign) for _, _, unit in factored]
            for b, v in enumerate(sources):
                # multiply the unit corrections at their relative order, then
                # shift by the base monomial: the product of a unit known to
                # relative order k with a monomial of grade w is exact to k + w
                prod = None
                for t in range(len(factored)):
                    u = units_at[t]
                    if u.is_zero() or inv[b][t] == 0:
                        continue
                    f = (1 + u).pow_frac(-inv[b][t])
                    prod = f if prod is None else prod * f
                if prod is None:
                    new[v] = base[v]
                else:
                    new[v] = prod.mul_monomial(base_mono[v])
            if all(new[v].same_terms(assign[v]) for v in sources):
                assign = new
                break
            assign = new

    # verify round trip: relation series evaluated at the assignment give back
    # exactly the target variables
    for (t, s), (_, m, unit) in zip(relations, factored):
        lhs = s.substitute(assign)
        rhs = Series.variable(t, weights, lhs.order)
        if not lhs.same_terms(rhs):
            raise ConsistencyError(MODULE, op,
                                   f"inversion failed to stabilize for {t}",
                                   lhs.first_difference(rhs))
    return assign
