"""Exact feasibility engine for partial augmentations of torsion units.

A normalized torsion unit of order n in an integral group ring carries one
integer partial augmentation per conjugacy class, and every power of the
unit carries its own vector.  Three families of exact conditions cut the
candidate vectors down:

* the augmentations sum to 1, vanish at the identity and at classes whose
  element order does not divide n, and obey congruences modulo the primes
  dividing n;
* for every character and every n-th root of unity, the eigenvalue
  multiplicity recovered by averaging traces over cyclotomic fields must
  be a non-negative integer bounded by the degree;
* callers may install extra constraint providers contributing linear
  equalities or per-candidate filters.

``solve`` enumerates exhaustively over a provably complete bounding box,
level by level along the divisor lattice of n, and returns the surviving
chains together with a certificate of the bounds it used.
"""

import math
from fractions import Fraction
from math import gcd

import numpy

from .cyclotomic import (CYC_ZERO, cyc_add, cyc_conjugate, cyc_equal,
                         cyc_scale, cyc_sum, root_trace, trace_times_root)
from .errors import DataInconsistencyError
from .grouptab import exponent
from .numtheory import divisors, euler_phi, is_prime, lcm, prime_divisors


# ---------------------------------------------------------------------------
# small exact helpers

def _field_trace(x, m, j):
    """Trace of x * zeta_m^j from Q(zeta_m) down to Q.

    x must lie in Q(zeta_m); a value stored at an inflated conductor is
    handled by dividing out the relative field degree.
    """
    big = lcm(x.conductor, m)
    t = trace_times_root(x, m, j)
    if big != m:
        t *= Fraction(euler_phi(m), euler_phi(big))
    return t


def _as_int(value, what):
    if value.denominator != 1:
        raise DataInconsistencyError(f"{what} is not an integer: {value}")
    return int(value)


def _ceil_div(a, b):
    return -((-a) // b)


def support_classes(table, n):
    """Labels that may carry a nonzero augmentation for a unit of order n."""
    return tuple(c.label for c in table.classes
                 if c.element_order > 1 and n % c.element_order == 0)


def _support_indices(table, n):
    return [ci for ci, c in enumerate(table.classes)
            if c.element_order > 1 and n % c.element_order == 0]


# ---------------------------------------------------------------------------
# augmentation vectors and chains

class AugmentationVector:
    """Partial augmentations of one normalized unit of a fixed order.

    Entries are keyed by class label; classes absent from the mapping have
    augmentation zero.  Construction validates the vector against a table:
    the entries must sum to 1, the identity class is excluded, and every
    listed class must have element order dividing the unit order.
    """

    __slots__ = ("unit_order", "_items", "_map")

    def __init__(self, table, unit_order, entries):
        unit_order = int(unit_order)
        if unit_order < 2:
            raise ValueError("unit order must be at least 2")
        pairs = []
        total = 0
        for label, value in entries.items():
            value = int(value)
            if value == 0:
                continue
            try:
                ci = table.class_index(label)
            except KeyError:
                raise ValueError(f"unknown class label {label!r}") from None
            order = table.classes[ci].element_order
            if order == 1:
                raise ValueError("the identity class carries no augmentation")
            if unit_order % order != 0:
                raise ValueError(
                    f"class {label!r} has element order {order}, which does "
                    f"not divide the unit order {unit_order}")
            pairs.append((ci, label, value))
            total += value
        if total != 1:
            raise ValueError(f"augmentations sum to {total}, expected 1")
        pairs.sort()
        object.__setattr__(self, "unit_order", unit_order)
        object.__setattr__(self, "_items",
                           tuple((lab, v) for _, lab, v in pairs))
        object.__setattr__(self, "_map", {lab: v for _, lab, v in pairs})

    def __setattr__(self, name, value):
        raise AttributeError("AugmentationVector is immutable")

    @classmethod
    def indicator(cls, table, label, unit_order=None):
        """The vector of a genuine group element: 1 at its class."""
        ci = table.class_index(label)
        if unit_order is None:
            unit_order = table.classes[ci].element_order
        return cls(table, unit_order, {label: 1})

    def items(self):
        return self._items

    def as_dict(self):
        return dict(self._items)

    def get(self, label, default=0):
        return self._map.get(label, default)

    def __eq__(self, other):
        if not isinstance(other, AugmentationVector):
            return NotImplemented
        return (self.unit_order == other.unit_order
                and self._items == other._items)

    def __hash__(self):
        return hash((self.unit_order, self._items))

    def __repr__(self):
        body = ", ".join(f"{lab}: {v}" for lab, v in self._items)
        return f"AugmentationVector({self.unit_order}, {{{body}}})"


class CandidateChain:
    """Augmentation vectors for a unit and all of its proper powers.

    The chain of a unit of order n holds one vector per divisor m of n
    with m > 1, the vector of the power of order m.  All proper divisors
    must be present; the vector at n itself may be left out, in which
    case the top-level unknowns stay symbolic.
    """

    __slots__ = ("unit_order", "_vectors")

    def __init__(self, table, unit_order, vectors):
        n = int(unit_order)
        if n < 2:
            raise ValueError("unit order must be at least 2")
        stored = {}
        for m, vec in vectors.items():
            m = int(m)
            if m <= 1 or n % m != 0:
                raise ValueError(f"{m} is not a divisor > 1 of {n}")
            if not isinstance(vec, AugmentationVector):
                raise TypeError("chain entries must be AugmentationVectors")
            if vec.unit_order != m:
                raise ValueError(
                    f"vector at order {m} was built for order {vec.unit_order}")
            stored[m] = vec
        for m in divisors(n):
            if 1 < m < n and m not in stored:
                raise ValueError(f"chain is missing the vector for order {m}")
        object.__setattr__(self, "unit_order", n)
        object.__setattr__(self, "_vectors",
                           {m: stored[m] for m in sorted(stored)})

    def __setattr__(self, name, value):
        raise AttributeError("CandidateChain is immutable")

    @classmethod
    def from_element(cls, table, label):
        """The chain induced by a group element through the power maps."""
        ci = table.class_index(label)
        n = table.classes[ci].element_order
        if n < 2:
            raise ValueError("the identity induces no chain")
        vectors = {}
        for m in divisors(n):
            if m == 1:
                continue
            pc = table.power_class(ci, n // m)
            vectors[m] = AugmentationVector.indicator(
                table, table.classes[pc].label, m)
        return cls(table, n, vectors)

    @property
    def is_complete(self):
        return self.unit_order in self._vectors

    @property
    def top(self):
        return self._vectors.get(self.unit_order)

    def vector(self, m):
        try:
            return self._vectors[m]
        except KeyError:
            raise ValueError(f"chain holds no vector for order {m}") from None

    def proper_orders(self):
        return tuple(m for m in self._vectors if m != self.unit_order)

    def items(self):
        return tuple(self._vectors.items())

    def as_report_dict(self):
        return {str(m): vec.as_dict() for m, vec in self._vectors.items()}

    def __eq__(self, other):
        if not isinstance(other, CandidateChain):
            return NotImplemented
        return (self.unit_order == other.unit_order
                and self._vectors == other._vectors)

    def __hash__(self):
        return hash((self.unit_order, tuple(self._vectors.items())))

    def __repr__(self):
        return (f"CandidateChain({self.unit_order}, "
                f"orders={list(self._vectors)})")


def adams_transform(table, chain, j):
    """The chain of the j-th power of the unit, for j coprime to its order.

    Every vector is pushed forward along the power maps: the augmentation
    at a class moves to the class of the j-th powers of its elements.
    """
    n = chain.unit_order
    if gcd(j, n) != 1:
        raise ValueError(f"{j} is not coprime to the unit order {n}")
    vectors = {}
    for m, vec in chain.items():
        acc = {}
        for label, value in vec.items():
            ci = table.class_index(label)
            target = table.classes[table.power_class(ci, j % m)].label
            acc[target] = acc.get(target, 0) + value
        vectors[m] = AugmentationVector(table, m, acc)
    return CandidateChain(table, n, vectors)


# ---------------------------------------------------------------------------
# linear forms and constraints

class LinearForm:
    """A rational-linear expression in augmentation unknowns."""

    __slots__ = ("coefficients", "constant")

    def __init__(self, coefficients, constant=0):
        coeffs = {}
        for label, value in coefficients.items():
            value = Fraction(value)
            if value:
                coeffs[str(label)] = value
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "constant", Fraction(constant))

    def __setattr__(self, name, value):
        raise AttributeError("LinearForm is immutable")

    def evaluate(self, assignment):
        total = self.constant
        for label, coeff in self.coefficients.items():
            total += coeff * assignment.get(label, 0)
        return total

    def __add__(self, other):
        if not isinstance(other, LinearForm):
            return NotImplemented
        coeffs = dict(self.coefficients)
        for label, value in other.coefficients.items():
            coeffs[label] = coeffs.get(label, Fraction(0)) + value
        return LinearForm(coeffs, self.constant + other.constant)

    def __neg__(self):
        return LinearForm({l: -v for l, v in self.coefficients.items()},
                          -self.constant)

    def __sub__(self, other):
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self + (-other)

    def __rmul__(self, scalar):
        scalar = Fraction(scalar)
        return LinearForm(
            {l: scalar * v for l, v in self.coefficients.items()},
            scalar * self.constant)

    def __eq__(self, other):
        if not isinstance(other, LinearForm):
            return NotImplemented
        return (self.coefficients == other.coefficients
                and self.constant == other.constant)

    def __hash__(self):
        return hash((tuple(sorted(self.coefficients.items())), self.constant))

    def as_constraint(self, kind, provenance, modulus=None):
        return Constraint(kind, self.coefficients, self.constant,
                          modulus=modulus, provenance=provenance)

    def __repr__(self):
        body = " + ".join(f"{v}*{l}" for l, v in self.coefficients.items())
        return f"LinearForm({body or '0'} + {self.constant})"


_CONSTRAINT_KINDS = ("equality", "nonnegativity", "congruence")


class Constraint:
    """One exact condition on the augmentation unknowns.

    The underlying form is sum(coefficients[label] * eps[label]) + constant
    and the kind fixes its reading: equal to zero, non-negative, or
    divisible by the modulus.  The provenance tag is carried verbatim into
    solver reports.
    """

    __slots__ = ("kind", "_coeffs", "constant", "modulus", "provenance")

    def __init__(self, kind, coefficients, constant, modulus=None,
                 provenance=""):
        if kind not in _CONSTRAINT_KINDS:
            raise ValueError(f"unknown constraint kind {kind!r}")
        if kind == "congruence":
            if not isinstance(modulus, int) or modulus < 2:
                raise ValueError("congruence constraints need a modulus >= 2")
        elif modulus is not None:
            raise ValueError(f"{kind} constraints carry no modulus")
        coeffs = []
        for label, value in coefficients.items():
            value = Fraction(value)
            if value:
                coeffs.append((str(label), value))
        coeffs.sort()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "_coeffs", tuple(coeffs))
        object.__setattr__(self, "constant", Fraction(constant))
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "provenance", provenance)

    def __setattr__(self, name, value):
        raise AttributeError("Constraint is immutable")

    def items(self):
        return self._coeffs

    @property
    def coefficients(self):
        return dict(self._coeffs)

    def holds(self, assignment):
        total = self.constant
        for label, coeff in self._coeffs:
            total += coeff * assignment.get(label, 0)
        if self.kind == "equality":
            return total == 0
        if self.kind == "nonnegativity":
            return total >= 0
        return total.denominator == 1 and int(total) % self.modulus == 0

    def __eq__(self, other):
        if not isinstance(other, Constraint):
            return NotImplemented
        return (self.kind == other.kind and self._coeffs == other._coeffs
                and self.constant == other.constant
                and self.modulus == other.modulus
                and self.provenance == other.provenance)

    def __hash__(self):
        return hash((self.kind, self._coeffs, self.constant, self.modulus,
                     self.provenance))

    def __repr__(self):
        body = " + ".join(f"{v}*{l}" for l, v in self._coeffs)
        tail = f" (mod {self.modulus})" if self.kind == "congruence" else ""
        return (f"Constraint({self.kind}, {body or '0'} + {self.constant}"
                f"{tail}, {self.provenance!r})")


class ConstraintProvider:
    """Hook contributing extra constraints at one level of the solver.

    Subclasses override ``equalities`` to add linear constraints on the
    unknowns of the level (the lower chain is fixed and complete there),
    or ``admits`` to veto fully assembled chains, or both.  ``unit_order``
    restricts the provider to the level of that order; None applies it at
    every level.  ``describe`` yields placeholder constraints so that the
    provider's provenance shows up in reports.
    """

    provenance = "extra"
    unit_order = None

    def equalities(self, table, n, lower_chain):
        return []

    def admits(self, table, n, chain):
        return True

    def describe(self):
        return [Constraint("equality", {}, 0, provenance=self.provenance)]


# ---------------------------------------------------------------------------
# character values and eigenvalue multiplicities

def char_value(table, chi_index, vector):
    """The character value of a unit: sum of eps_g * chi(g) over classes."""
    total = CYC_ZERO
    for label, value in vector.items():
        try:
            ci = table.class_index(label)
        except KeyError:
            raise ValueError(f"unknown class label {label!r}") from None
        total = cyc_add(total, cyc_scale(table.value(chi_index, ci), value))
    return total


def lp_multiplicity(table, chain, chi_index, xi_exponent):
    """Multiplicity of zeta_n^xi_exponent as an eigenvalue of the unit.

    Averages the traces of chi at the powers of the unit over the divisor
    lattice of n, exactly.  With a complete chain the result is a Fraction;
    if the top vector is absent the top-level unknowns stay symbolic and a
    LinearForm over them is returned instead.
    """
    n = chain.unit_order
    k = xi_exponent % n
    total = Fraction(table.degree(chi_index))
    for m in chain.proper_orders():
        x = char_value(table, chi_index, chain.vector(m))
        total += _field_trace(x, m, -k)
    if chain.is_complete:
        x = char_value(table, chi_index, chain.vector(n))
        return (total + _field_trace(x, n, -k)) / n
    coeffs = {}
    for ci in _support_indices(table, n):
        a = _field_trace(table.value(chi_index, ci), n, -k)
        coeffs[table.classes[ci].label] = a / n
    return LinearForm(coeffs, total / n)


def base_constraints(table, n):
    """Structural constraints every augmentation vector of order n obeys.

    Emits the augmentation sum and one congruence per prime r dividing n
    with r < n, taken over the classes of element order exactly r.  The
    support restriction is carried by the unknown set itself.  When n does
    not divide the exponent of the group the single returned constraint is
    unsatisfiable, recording that no unit of order n exists at all.
    """
    if n < 2:
        raise ValueError("unit order must be at least 2")
    if exponent(table) % n != 0:
        return [Constraint("equality", {}, 1, provenance="Lemma 2.3")]
    sup = support_classes(table, n)
    out = [Constraint("equality", {lab: 1 for lab in sup}, -1,
                      provenance="§2.1")]
    for r in prime_divisors(n):
        if r == n:
            continue
        labs = [lab for lab in sup
                if table.classes[table.class_index(lab)].element_order == r]
        if labs:
            out.append(Constraint("congruence", {lab: 1 for lab in labs}, 0,
                                  modulus=r, provenance="Lemma 2.2"))
    return out


# ---------------------------------------------------------------------------
# the solver

class _Level:
    __slots__ = ("m", "indices", "labels", "orders", "box", "mu_rows",
                 "congs")

    def __init__(self, m, indices, labels, orders, box, mu_rows, congs):
        self.m = m
        self.indices = indices
        self.labels = labels
        self.orders = orders
        self.box = box
        self.mu_rows = mu_rows
        self.congs = congs


def _level_box(table, m, indices, slack):
    """Exact integer bounds on each unknown, derived from the constraint
    that every multiplicity lies between 0 and the character degree."""
    box = []
    for ci in indices:
        c = table.classes[ci]
        centralizer = table.group_order // c.class_size
        lo = Fraction(0)
        hi = Fraction(0)
        for chi in range(table.num_classes):
            conj = cyc_conjugate(table.value(chi, ci))
            phi_big = euler_phi(lcm(conj.conductor, m))
            traces = [trace_times_root(conj, m, k) / phi_big
                      for k in range(m)]
            degree = table.degree(chi)
            lo += degree * min(traces)
            hi += degree * max(traces)
        box.append((math.ceil(lo / centralizer) - slack,
                    math.floor(hi / centralizer) + slack))
    return box


def _prepare_level(table, m, box_slack):
    indices = _support_indices(table, m)
    labels = tuple(table.classes[ci].label for ci in indices)
    orders = tuple(table.classes[ci].element_order for ci in indices)
    box = _level_box(table, m, indices, box_slack)
    mu_rows = []
    for chi in range(table.num_classes):
        rows = []
        for k in range(m):
            rows.append(tuple(
                _as_int(_field_trace(table.value(chi, ci), m, -k),
                        "a multiplicity coefficient")
                for ci in indices))
        mu_rows.append((table.degree(chi), rows))
    congs = []
    for r in prime_divisors(m):
        if r == m:
            continue
        pos = tuple(i for i, o in enumerate(orders) if o == r)
        if pos:
            congs.append((r, pos))
    return _Level(m, indices, labels, orders, box, mu_rows, congs)


def _compile_constraint(table, con, level):
    """Turn a Constraint into an integer form over the level's unknowns.

    Coefficients at classes outside the support are dropped: those
    augmentations are identically zero at this level.
    """
    position = {lab: i for i, lab in enumerate(level.labels)}
    nvars = len(level.labels)
    coeffs = [Fraction(0)] * nvars
    for label, value in con.items():
        try:
            table.class_index(label)
        except KeyError:
            raise ValueError(f"unknown class label {label!r}") from None
        i = position.get(label)
        if i is not None:
            coeffs[i] = value
    if con.kind == "congruence":
        if any(v.denominator != 1 for v in coeffs) \
                or con.constant.denominator != 1:
            raise ValueError("congruence constraints need integer "
                             "coefficients")
        return (tuple(int(v) for v in coeffs), int(con.constant),
                None, None, con.modulus)
    scale = lcm(con.constant.denominator,
                *(v.denominator for v in coeffs)) if coeffs else 1
    ints = tuple(int(v * scale) for v in coeffs)
    const = int(con.constant * scale)
    if con.kind == "equality":
        return (ints, const, 0, 0, 0)
    return (ints, const, 0, None, 0)


def _class_traces(table, chi, order, memo):
    """Per-class trace rows: trace of chi(c) times every root of ``order``.

    Character values are algebraic integers, so each trace must land in
    Z; a non-integral trace exposes inconsistent data.
    """
    key = ("class", chi, order)
    got = memo.get(key)
    if got is None:
        rows = {}
        for ci, cls in enumerate(table.classes):
            if cls.element_order > 1 and order % cls.element_order == 0:
                x = table.characters[chi][ci]
                rows[cls.label] = tuple(
                    _as_int(_field_trace(x, order, j), "a power trace")
                    for j in range(order))
        got = rows
        memo[key] = got
    return got


def _lower_traces(table, chi, order, vec, memo):
    """Traces of chi(power vector) times every root of that order, as ints.

    The trace is linear in the augmentations, so the vector's row is an
    integer combination of per-class rows; that keeps the cyclotomic
    arithmetic out of the per-vector path entirely.  Memoized per solve
    call because merge combinations reuse the same vectors many times.
    """
    key = (chi, order, vec)
    got = memo.get(key)
    if got is None:
        rows = _class_traces(table, chi, order, memo)
        acc = [0] * order
        for label, eps in vec.items():
            row = rows[label]
            for j in range(order):
                acc[j] += eps * row[j]
        got = tuple(acc)
        memo[key] = got
    return got


def _compile_forms(table, level, lower_chain, providers, memo):
    m = level.m
    raw = []
    lower_orders = [m // d for d in divisors(m) if 1 < d < m]
    for chi in range(table.num_classes):
        degree, rows = level.mu_rows[chi]
        traces = [_lower_traces(table, chi, od, lower_chain.vector(od), memo)
                  for od in lower_orders]
        top = m * degree
        for k in range(m):
            b = degree
            for od, tr in zip(lower_orders, traces):
                b += tr[(-k) % od]
            raw.append((rows[k], b, 0, top, m))
    for r, pos in level.congs:
        coeffs = tuple(1 if i in pos else 0 for i in range(len(level.labels)))
        raw.append((coeffs, 0, None, None, r))
    for provider in providers:
        for con in provider.equalities(table, m, lower_chain):
            raw.append(_compile_constraint(table, con, level))
    return raw


def _eliminate_last(raw, pinned_bounds):
    """Substitute the last unknown with 1 minus the sum of the others."""
    out = []
    for coeffs, const, lo, hi, mod in raw:
        last = coeffs[-1]
        out.append((tuple(a - last for a in coeffs[:-1]), const + last,
                    lo, hi, mod))
    nfree = len(out[0][0]) if out else 0
    out.append(((-1,) * nfree, 1, pinned_bounds[0], pinned_bounds[1], 0))
    seen = {}
    for form in out:
        seen.setdefault(form, None)
    return list(seen)


def _tighten_boxes(forms, boxes):
    """Interval propagation to a fixpoint; returns None when a box empties.

    Each pass is cheap (a few integer operations per form and variable),
    so the pass cap is generous; propagation normally stalls long before
    reaching it.
    """
    for _ in range(500):
        changed = False
        for coeffs, const, lo_f, hi_f, _mod in forms:
            if lo_f is None and hi_f is None:
                continue
            cmin = []
            cmax = []
            for b, (l, h) in zip(coeffs, boxes):
                x, y = b * l, b * h
                if x > y:
                    x, y = y, x
                cmin.append(x)
                cmax.append(y)
            tmin = const + sum(cmin)
            tmax = const + sum(cmax)
            for i, b in enumerate(coeffs):
                if b == 0:
                    continue
                rest_min = tmin - cmin[i]
                rest_max = tmax - cmax[i]
                l, h = boxes[i]
                if hi_f is not None:
                    limit = hi_f - rest_min
                    if b > 0:
                        h = min(h, limit // b)
                    else:
                        l = max(l, _ceil_div(limit, b))
                if lo_f is not None:
                    limit = lo_f - rest_max
                    if b > 0:
                        l = max(l, _ceil_div(limit, b))
                    else:
                        h = min(h, limit // b)
                if (l, h) != boxes[i]:
                    if l > h:
                        return None
                    boxes[i] = (l, h)
                    changed = True
        if not changed:
            break
    return boxes


def _pack_forms(forms, boxes):
    nfree = len(boxes)
    packed = []
    for coeffs, const, lo_f, hi_f, mod in forms:
        smin = [0] * (nfree + 1)
        smax = [0] * (nfree + 1)
        for i in reversed(range(nfree)):
            b = coeffs[i]
            x, y = b * boxes[i][0], b * boxes[i][1]
            if x > y:
                x, y = y, x
            smin[i] = smin[i + 1] + x
            smax[i] = smax[i + 1] + y
        mod_from = nfree
        if mod:
            for i in reversed(range(nfree)):
                if coeffs[i] % mod:
                    break
                mod_from = i
        packed.append((coeffs, const, lo_f, hi_f, mod, smin, smax, mod_from))
    return packed


def _enumerate(boxes, packed, on_leaf):
    nfree = len(boxes)
    start = []
    for coeffs, const, lo_f, hi_f, mod, smin, smax, mod_from in packed:
        if hi_f is not None and const + smin[0] > hi_f:
            return 0
        if lo_f is not None and const + smax[0] < lo_f:
            return 0
        if mod and mod_from <= 0 and const % mod:
            return 0
        start.append(const)
    values = [0] * nfree
    nodes = 0

    def walk(depth, partial):
        nonlocal nodes
        if depth == nfree:
            on_leaf(tuple(values))
            return
        lo, hi = boxes[depth]
        nxt = depth + 1
        for val in range(lo, hi + 1):
            nodes += 1
            carried = []
            ok = True
            for f, (coeffs, _c, lo_f, hi_f, mod, smin, smax,
                    mod_from) in enumerate(packed):
                v = partial[f] + coeffs[depth] * val
                if hi_f is not None and v + smin[nxt] > hi_f:
                    ok = False
                    break
                if lo_f is not None and v + smax[nxt] < lo_f:
                    ok = False
                    break
                if mod and nxt >= mod_from and v % mod:
                    ok = False
                    break
                carried.append(v)
            if ok:
                values[depth] = val
                walk(nxt, carried)

    walk(0, start)
    return nodes


def _merge_lowers(per_level, m):
    """Consistent unions of survivor chains at the maximal proper divisors.

    Chains from different branches of the divisor lattice must agree on
    the levels they share, so each pool is joined on the tuple of shared
    vectors rather than by filtering the full product.
    """
    maximal = sorted({m // r for r in prime_divisors(m)} - {1})
    if not maximal:
        return [{}]
    merged = [dict(cm) for cm in per_level[maximal[0]]]
    for d in maximal[1:]:
        pool = per_level[d]
        if not pool or not merged:
            return []
        shared = tuple(e for e in divisors(d)
                       if e > 1 and e in merged[0])
        buckets = {}
        for cm in pool:
            buckets.setdefault(tuple(cm[e] for e in shared), []).append(cm)
        joined = []
        for acc in merged:
            for cm in buckets.get(tuple(acc[e] for e in shared), ()):
                union = dict(acc)
                union.update(cm)
                joined.append(union)
        merged = joined
    return merged


def _chain_key(chain_map):
    return tuple(sorted((d, vec.items()) for d, vec in chain_map.items()))


def _bulk_join(pools, maximal):
    """Vectorized equi-join of the survivor pools on shared divisor levels.

    Returns index arrays (one per pool) describing every consistent
    union, plus the ownership map saying which pool supplies the vector
    of each covered level.  None means no union exists.
    """
    registry = {}
    vec_lists = {}

    def vec_id(d, vec):
        reg = registry.setdefault(d, {})
        got = reg.get(vec)
        if got is None:
            got = len(reg)
            reg[vec] = got
            vec_lists.setdefault(d, []).append(vec)
        return got

    pool_cols = []
    for pool, big in zip(pools, maximal):
        own = [e for e in divisors(big) if e > 1]
        cols = {e: numpy.array([vec_id(e, cm[e]) for cm in pool],
                               dtype=numpy.int64) for e in own}
        pool_cols.append((own, cols))

    selections = [numpy.arange(len(pools[0]), dtype=numpy.int64)]
    covered = {e: 0 for e in pool_cols[0][0]}
    for pos in range(1, len(pools)):
        own, cols = pool_cols[pos]
        shared = [e for e in own if e in covered]
        radix = 1
        acc_key = numpy.zeros(len(selections[0]), dtype=numpy.int64)
        pool_key = numpy.zeros(len(pools[pos]), dtype=numpy.int64)
        for e in shared:
            owner = covered[e]
            acc_ids = pool_cols[owner][1][e][selections[owner]]
            acc_key = acc_key + radix * acc_ids
            pool_key = pool_key + radix * cols[e]
            radix *= len(registry.get(e, {})) + 1
        acc_parts = []
        pool_parts = []
        for key in numpy.unique(pool_key):
            acc_rows = numpy.nonzero(acc_key == key)[0]
            if not len(acc_rows):
                continue
            pool_rows = numpy.nonzero(pool_key == key)[0]
            acc_parts.append(numpy.repeat(acc_rows, len(pool_rows)))
            pool_parts.append(numpy.tile(pool_rows, len(acc_rows)))
        if not acc_parts:
            return None
        take = numpy.concatenate(acc_parts)
        selections = [sel[take] for sel in selections]
        selections.append(numpy.concatenate(pool_parts))
        for e in own:
            covered.setdefault(e, pos)
    return selections, covered, vec_lists, pool_cols


def _orbit_maps(table, per_level, maximal, m):
    """Index permutations of each pool under the coprime power maps.

    Plain multiplicity and congruence constraints are stable under
    replacing a unit by its j-th power for j coprime to the order, so
    every pool is closed under the induced pushforward; the maps let the
    join be partitioned into power-map orbits.  None signals a pool that
    is not closed (possible once extra providers shaped it), in which
    case the caller must fall back to testing every union.
    """
    maps = []
    for d in maximal:
        pool = per_level[d]
        index = {_chain_key(cm): i for i, cm in enumerate(pool)}
        perms = {}
        for j in range(2, m):
            if gcd(j, m) != 1:
                continue
            arr = numpy.empty(len(pool), dtype=numpy.int64)
            for i, cm in enumerate(pool):
                chain = CandidateChain(table, d, cm)
                moved = adams_transform(table, chain, j)
                pos = index.get(_chain_key(dict(moved.items())))
                if pos is None:
                    return None
                arr[i] = pos
            perms[j] = arr
        maps.append(perms)
    return maps


def _orbit_representatives(maps, selections, pools, m):
    """One join row per power-map orbit, as sorted row indices."""
    canon = None
    js = [1] + sorted(maps[0])
    for j in js:
        key = numpy.zeros(len(selections[0]), dtype=numpy.int64)
        for pos in range(len(pools)):
            ids = selections[pos] if j == 1 else maps[pos][j][selections[pos]]
            key = key * len(pools[pos]) + ids
        canon = key if canon is None else numpy.minimum(canon, key)
    _, first = numpy.unique(canon, return_index=True)
    return numpy.sort(first)


# ---------------------------------------------------------------------------
# joined-pool funnel: residue lattice, dual bound certificates, enumeration
#
# A join too large for row-by-row search is decided in bulk.  All stages
# below are exact: linear programming only proposes bound certificates,
# whose validity is then an integer identity independent of any rounding.

_FUNNEL_MIN = 1500
_CERT_DEN = 1 << 20
_CERT_SAMPLE = 96


class _FunnelUnavailable(Exception):
    """Raised when a magnitude guard rules out the vectorized funnel."""


class _FunnelData:
    """Shared arrays of one joined level, in full unknown space.

    coeff/static/mdeg describe the distinct multiplicity forms: for join
    row r and unknown vector x every form must satisfy
    0 <= static + trace(r) + coeff . x <= mdeg and be divisible by m.
    congs lists residue constraints (modulus, positions, scale) that hold
    with constant 0.  contrib holds per-pool trace summands so the
    constant vector of any row batch is a couple of gathers.
    """

    __slots__ = ("m", "nvars", "coeff", "static", "mdeg", "box", "congs",
                 "pools", "selections", "contrib")

    def __init__(self, m, nvars, coeff, static, mdeg, box, congs, pools,
                 selections, contrib):
        self.m = m
        self.nvars = nvars
        self.coeff = coeff
        self.static = static
        self.mdeg = mdeg
        self.box = box
        self.congs = congs
        self.pools = pools
        self.selections = selections
        self.contrib = contrib

    def b_of(self, rows):
        b = self.static[numpy.newaxis, :].repeat(len(rows), axis=0)
        for pos in range(len(self.pools)):
            b += self.contrib[pos][self.selections[pos][rows]]
        return b

    def b_bound(self):
        bound = numpy.abs(self.static).astype(numpy.int64)
        for mat in self.contrib:
            if len(mat):
                bound += numpy.abs(mat).max(axis=0)
        return bound


def _exact_inverse(rows):
    """Inverse of a small nonsingular integer matrix.

    Returns (num, den) with den > 0 and the inverse equal to num / den
    entrywise, so downstream products stay in integer arithmetic.
    """
    n = len(rows)
    aug = [[Fraction(v) for v in row] +
           [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(rows)]
    for c in range(n):
        piv = None
        for r in range(c, n):
            if aug[r][c]:
                piv = r
                break
        if piv is None:
            raise DataInconsistencyError("lattice basis is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        scale = aug[c][c]
        aug[c] = [v / scale for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    den = 1
    for row in aug:
        for v in row[n:]:
            den = lcm(den, v.denominator)
    num = [[int(v * den) for v in row[n:]] for row in aug]
    return num, den


def _lll_reduce(rows):
    """Shorter basis of the integer lattice spanned by the given rows.

    Size reduction and swap decisions follow floating-point Gram-Schmidt
    data, but every basis update is an integer elementary operation, so
    the spanned lattice never changes, regardless of rounding.
    """
    basis = numpy.array(rows, dtype=numpy.int64)
    n = len(basis)
    k = 1
    guard = 0
    while k < n and guard < 10000:
        guard += 1
        bf = basis.astype(float)
        star = numpy.zeros((n, n))
        norms = numpy.zeros(n)
        mu = numpy.zeros((n, n))
        for i in range(n):
            v = bf[i].copy()
            for j in range(i):
                if norms[j] > 0:
                    mu[i, j] = bf[i] @ star[j] / norms[j]
                    v -= mu[i, j] * star[j]
            star[i] = v
            norms[i] = v @ v
        changed = False
        for j in range(k - 1, -1, -1):
            r = int(round(mu[k, j]))
            if r:
                basis[k] -= r * basis[j]
                changed = True
        if changed:
            continue
        if norms[k] >= (0.75 - mu[k, k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            basis[[k - 1, k]] = basis[[k, k - 1]]
            k = max(k - 1, 1)
    return basis


def _diagonalize(rows):
    """Diagonal form S = U A V of an integer matrix by elementary ops.

    Returns (diag, U) where diag holds the nc leading diagonal entries
    and U is the full row transform; V is returned as well since the
    column transform identifies the unknown-space change of basis.
    """
    a = [list(map(int, r)) for r in rows]
    nr = len(a)
    nc = len(a[0])
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]
    for k in range(nc):
        while True:
            best = None
            for i in range(k, nr):
                row = a[i]
                for j in range(k, nc):
                    val = row[j]
                    if val and (best is None or abs(val) < best[0]):
                        best = (abs(val), i, j)
            if best is None:
                diag = [a[i][i] if i < nr else 0 for i in range(nc)]
                return diag, u, v
            _, bi, bj = best
            if bi != k:
                a[k], a[bi] = a[bi], a[k]
                u[k], u[bi] = u[bi], u[k]
            if bj != k:
                for row in a:
                    row[k], row[bj] = row[bj], row[k]
                for row in v:
                    row[k], row[bj] = row[bj], row[k]
            p = a[k][k]
            clean = True
            for i in range(k + 1, nr):
                q = a[i][k] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[k])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[k])]
                if a[i][k]:
                    clean = False
            for j in range(k + 1, nc):
                q = a[k][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[k]
                    for row in v:
                        row[j] -= q * row[k]
                if a[k][j]:
                    clean = False
            if clean:
                break
    diag = [a[i][i] if i < nr else 0 for i in range(nc)]
    return diag, u, v


class _ResidueLattice:
    """All residue constraints of a level, folded into one lattice coset.

    The unknown vectors satisfying every divisibility constraint of a
    given join row form a coset s + L of a fixed lattice L; only the
    shift s depends on the row constants.  shifts() reports which rows
    admit a shift at all and returns one shift per admissible row.
    """

    __slots__ = ("m", "nvars", "basis", "inv_num", "inv_den", "urows",
                 "gvec", "quot", "inv_mod", "vmat", "nf")

    def __init__(self, fd):
        m = fd.m
        nf = len(fd.coeff)
        rows = [list(map(int, r)) for r in fd.coeff]
        for modulus, positions, scale in fd.congs:
            rows.append([scale if i in positions else 0
                         for i in range(fd.nvars)])
        diag, u, v = _diagonalize(rows)
        quot = [m // gcd(s, m) for s in diag]
        basis = [[v[r][i] * quot[i] for r in range(fd.nvars)]
                 for i in range(fd.nvars)]
        if max(abs(x) for row in basis for x in row) > (1 << 31):
            raise _FunnelUnavailable
        red = _lll_reduce(basis)
        inv_num, inv_den = _exact_inverse(red.tolist())
        if max(abs(x) for row in inv_num for x in row) > (1 << 44) or \
                inv_den > (1 << 44):
            raise _FunnelUnavailable
        self.m = m
        self.nvars = fd.nvars
        self.nf = nf
        self.basis = red
        self.inv_num = numpy.array(inv_num, dtype=numpy.int64)
        self.inv_den = inv_den
        ident = red @ self.inv_num
        expect = inv_den * numpy.eye(fd.nvars, dtype=numpy.int64)
        if not (ident == expect).all():
            raise DataInconsistencyError("lattice inverse failed self-check")
        umat = numpy.array(u, dtype=numpy.int64)
        if numpy.abs(umat).max() > (1 << 31):
            raise _FunnelUnavailable
        self.urows = umat[:, :nf]
        gv = []
        iv = []
        for i in range(len(rows)):
            s = diag[i] if i < fd.nvars else 0
            g = gcd(s, m)
            gv.append(g)
            if i < fd.nvars and m // g > 1:
                iv.append(pow((s // g) % (m // g), -1, m // g))
            else:
                iv.append(0)
        self.gvec = numpy.array(gv, dtype=numpy.int64)
        self.quot = numpy.array(quot, dtype=numpy.int64)
        self.inv_mod = numpy.array(iv[:fd.nvars], dtype=numpy.int64)
        self.vmat = numpy.array(v, dtype=numpy.int64)

    def shifts(self, b):
        m = self.m
        rhs = (-(b @ self.urows.T)) % m
        ok = (rhs % self.gvec[numpy.newaxis, :] == 0).all(axis=1)
        lead = rhs[:, :self.nvars]
        t0 = (lead // self.gvec[:self.nvars]) * self.inv_mod % \
            numpy.maximum(self.quot, 1)
        shift = t0 @ self.vmat.T
        close = shift.astype(float) @ self.inv_num.astype(float) \
            / self.inv_den
        close = numpy.rint(numpy.clip(close, -(2.0 ** 40), 2.0 ** 40))
        close = close.astype(numpy.int64)
        if len(close):
            worst = int(numpy.abs(close).max()) * \
                max(int(numpy.abs(self.basis).max()), 1) * self.nvars
            if worst >= (1 << 62):
                raise _FunnelUnavailable
        shift = shift - close @ self.basis
        if len(shift) and int(numpy.abs(shift).max()) > (1 << 13):
            raise _FunnelUnavailable
        return ok, shift


def _certificate_groups(fd, sample_b, lo_static, hi_static):
    """Pooled dual bound certificates proposed by sampled linear programs.

    Each certificate (K, w) proves den * (sign * x_var) >= K + w . b for
    every row constant vector b, by the integer chain
    den*c.x = d.x + nu - w.(C x) with d.x bounded over the static box and
    w.(C x) bounded by the window constraints; LP rounding only affects
    how tight K is, never its validity.
    """
    from scipy.optimize import linprog

    den = _CERT_DEN
    nf, nv = fd.coeff.shape
    a_float = fd.coeff.astype(float)
    a_ub = numpy.vstack([a_float, -a_float])
    a_eq = numpy.ones((1, nv))
    bounds = list(zip(lo_static.tolist(), hi_static.tolist()))
    pool = {}
    for b in sample_b:
        b_ub = numpy.concatenate([fd.mdeg - b, b]).astype(float)
        for var in range(nv):
            for sgn in (1, -1):
                c = numpy.zeros(nv)
                c[var] = sgn
                res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq,
                              b_eq=[1.0], bounds=bounds, method="highs")
                if res.status != 0 or res.ineqlin.marginals is None:
                    continue
                lam = numpy.clip(-res.ineqlin.marginals, 0.0, None) * den
                if not numpy.isfinite(lam).all() or lam.max() > 2 ** 32:
                    continue
                y = numpy.rint(lam).astype(numpy.int64)
                nu = float(res.eqlin.marginals[0]) * den
                if not numpy.isfinite(nu) or abs(nu) > 2 ** 50:
                    continue
                nu = int(round(nu))
                y1 = y[:nf]
                w = y1 - y[nf:]
                ci = numpy.zeros(nv, dtype=numpy.int64)
                ci[var] = sgn
                dnum = ci * den - nu + w @ fd.coeff
                dmin = int(numpy.where(dnum > 0, dnum * lo_static,
                                       dnum * hi_static).sum())
                knum = dmin + nu - int(y1 @ fd.mdeg)
                key = (var, sgn, w.tobytes())
                prev = pool.get(key)
                if prev is None or knum > prev[0]:
                    pool[key] = (knum, w)
    groups = {}
    for (var, sgn, _), (knum, w) in pool.items():
        groups.setdefault((var, sgn), []).append((knum, w))
    packed = []
    bbound = fd.b_bound()
    for (var, sgn), items in sorted(groups.items()):
        kvec = numpy.array([k for k, _ in items], dtype=numpy.int64)
        wmat = numpy.array([w for _, w in items], dtype=numpy.int64)
        safe = (numpy.abs(wmat) @ bbound) + numpy.abs(kvec) < (1 << 52)
        if not safe.all():
            kvec = kvec[safe]
            wmat = wmat[safe]
        if len(kvec):
            packed.append((var, sgn, kvec, wmat))
    return packed


def _prune_certificates(groups, sample_b):
    kept = []
    for var, sgn, kvec, wmat in groups:
        t = sample_b.astype(float) @ wmat.T.astype(float) + kvec
        used = numpy.unique(t.argmax(axis=1))
        kept.append((var, sgn, kvec[used], wmat[used]))
    return kept


def _apply_certificates(groups, b, lo, hi):
    den = _CERT_DEN
    bf = b.astype(float)
    for var, sgn, kvec, wmat in groups:
        t = bf @ wmat.T.astype(float) + kvec
        best = numpy.rint(t.max(axis=1)).astype(numpy.int64)
        if sgn > 0:
            bound = -((-best) // den)
            lo[:, var] = numpy.maximum(lo[:, var], bound)
        else:
            bound = (-best) // den
            hi[:, var] = numpy.minimum(hi[:, var], bound)
    return (lo <= hi).all(axis=1)


class _SweepPack:
    """Precomputed residue data for the vectorized window sweep."""

    __slots__ = ("coeff", "cpos", "cneg", "modv", "clamp_lo", "clamp_hi",
                 "act", "pin", "ncong")

    def __init__(self, fd):
        big = numpy.int64(1) << 40
        extra = []
        mods = []
        for modulus, positions, scale in fd.congs:
            extra.append([scale if i in positions else 0
                          for i in range(fd.nvars)])
            mods.append(fd.m)
        self.ncong = len(extra)
        if extra:
            coeff = numpy.vstack([fd.coeff,
                                  numpy.array(extra, dtype=numpy.int64)])
        else:
            coeff = fd.coeff
        nf = len(fd.coeff)
        self.coeff = coeff
        self.cpos = numpy.where(coeff > 0, coeff, 0)
        self.cneg = numpy.where(coeff < 0, coeff, 0)
        self.modv = numpy.concatenate([
            numpy.full(nf, fd.m, dtype=numpy.int64),
            numpy.array(mods, dtype=numpy.int64)])
        self.clamp_lo = numpy.concatenate([
            numpy.zeros(nf, dtype=numpy.int64),
            numpy.full(len(extra), -big, dtype=numpy.int64)])
        self.clamp_hi = numpy.concatenate([
            fd.mdeg, numpy.full(len(extra), big, dtype=numpy.int64)])
        rows = coeff.tolist()
        self.act = []
        self.pin = []
        for j, row in enumerate(rows):
            mj = int(self.modv[j])
            pre = [mj]
            for c in row:
                pre.append(gcd(pre[-1], c))
            suf = [mj]
            for c in reversed(row):
                suf.append(gcd(suf[-1], c))
            suf.reverse()
            for i, c in enumerate(row):
                if not c:
                    continue
                self.act.append((j, i, c))
                g = gcd(pre[i], suf[i + 1])
                if g > 1:
                    gg = gcd(abs(c), g)
                    q = g // gg
                    if q > 1:
                        inv = pow((c // gg) % q, -1, q)
                        self.pin.append((j, i, gg, q, inv))


def _window_sweep(pack, b, lo, hi, rounds):
    """Interval and residue propagation over per-row boxes.

    Every tightening is implied by constraints that hold for all integer
    solutions of the row, so rows reported dead have none and surviving
    boxes still contain every solution.
    """
    n = len(b)
    if pack.ncong:
        b = numpy.hstack([b, numpy.zeros((n, pack.ncong),
                                         dtype=numpy.int64)])
    alive = numpy.ones(n, dtype=bool)
    for _ in range(rounds):
        fmin = b + lo @ pack.cpos.T + hi @ pack.cneg.T
        fmax = b + hi @ pack.cpos.T + lo @ pack.cneg.T
        wlo = numpy.maximum(fmin, pack.clamp_lo[numpy.newaxis, :])
        whi = numpy.minimum(fmax, pack.clamp_hi[numpy.newaxis, :])
        wlo = -(-wlo // pack.modv) * pack.modv
        whi = (whi // pack.modv) * pack.modv
        alive &= (wlo <= whi).all(axis=1)
        changed = False
        for j, i, c in pack.act:
            if c > 0:
                tmin = c * lo[:, i]
                tmax = c * hi[:, i]
            else:
                tmin = c * hi[:, i]
                tmax = c * lo[:, i]
            lo_n = wlo[:, j] - (fmax[:, j] - tmax)
            hi_n = whi[:, j] - (fmin[:, j] - tmin)
            if c > 0:
                nl = -((-lo_n) // c)
                nh = hi_n // c
            else:
                nl = -((-hi_n) // c)
                nh = lo_n // c
            upd = nl > lo[:, i]
            if upd.any():
                lo[upd, i] = nl[upd]
                changed = True
            upd = nh < hi[:, i]
            if upd.any():
                hi[upd, i] = nh[upd]
                changed = True
        for j, i, gg, q, inv in pack.pin:
            if gg > 1:
                alive &= (b[:, j] % gg) == 0
            r0 = (-(b[:, j] // gg) * inv) % q
            nl = lo[:, i] + ((r0 - lo[:, i]) % q)
            nh = hi[:, i] - ((hi[:, i] - r0) % q)
            upd = nl > lo[:, i]
            if upd.any():
                lo[upd, i] = nl[upd]
                changed = True
            upd = nh < hi[:, i]
            if upd.any():
                hi[upd, i] = nh[upd]
                changed = True
        s_lo = lo.sum(axis=1)
        s_hi = hi.sum(axis=1)
        alive &= (s_lo <= 1) & (s_hi >= 1)
        lo = numpy.maximum(lo, 1 - (s_hi[:, numpy.newaxis] - hi))
        hi = numpy.minimum(hi, 1 - (s_lo[:, numpy.newaxis] - lo))
        alive &= (lo <= hi).all(axis=1)
        if not changed:
            break
    return alive, lo, hi


def _enumerate_cosets(lat, lo, hi, shift):
    """All integer points of each row's lattice coset inside its box.

    Enumerates coordinates over the reduced basis, largest vector first,
    pruning with exact interval bounds that include the fixed-sum
    constraint as an extra tracked coordinate.  Returns (row ids, points,
    node count); the points satisfy box, sum and every residue
    constraint of their row, leaving only window checks to the caller.
    """
    n = len(lo)
    nvars = lat.nvars
    rl = lo - shift
    rh = hi - shift
    apos = numpy.where(lat.inv_num > 0, lat.inv_num, 0)
    aneg = lat.inv_num - apos
    num_lo = rl @ apos + rh @ aneg
    num_hi = rh @ apos + rl @ aneg
    t_lo = -((-num_lo) // lat.inv_den)
    t_hi = num_hi // lat.inv_den
    if t_lo.size and max(-int(t_lo.min()), int(t_hi.max()), 0) > (1 << 20):
        raise _FunnelUnavailable
    order = numpy.argsort(-(lat.basis * lat.basis).sum(axis=1))
    t_lo = t_lo[:, order]
    t_hi = t_hi[:, order]
    ext = numpy.concatenate([lat.basis[order],
                             lat.basis[order].sum(axis=1)[:, None]], axis=1)
    target = 1 - shift.sum(axis=1)
    box_lo = numpy.concatenate([rl, target[:, None]], axis=1)
    box_hi = numpy.concatenate([rh, target[:, None]], axis=1)
    width = nvars + 1
    rest_min = numpy.zeros((n, nvars + 1, width), dtype=numpy.int64)
    rest_max = numpy.zeros((n, nvars + 1, width), dtype=numpy.int64)
    for k in range(nvars - 1, -1, -1):
        vk = ext[k]
        a = t_lo[:, k:k + 1] * vk[numpy.newaxis, :]
        c = t_hi[:, k:k + 1] * vk[numpy.newaxis, :]
        rest_min[:, k] = rest_min[:, k + 1] + numpy.minimum(a, c)
        rest_max[:, k] = rest_max[:, k + 1] + numpy.maximum(a, c)
    sidx = numpy.arange(n, dtype=numpy.int64)
    pt = numpy.zeros((n, width), dtype=numpy.int64)
    nodes = 0
    for k in range(nvars):
        vk = ext[k]
        tl = t_lo[sidx, k].copy()
        th = t_hi[sidx, k].copy()
        gap_lo = box_lo[sidx] - pt - rest_max[sidx, k + 1]
        gap_hi = box_hi[sidx] - pt - rest_min[sidx, k + 1]
        for c in numpy.nonzero(vk)[0]:
            v = int(vk[c])
            if v > 0:
                tl = numpy.maximum(tl, -((-gap_lo[:, c]) // v))
                th = numpy.minimum(th, gap_hi[:, c] // v)
            else:
                tl = numpy.maximum(tl, -((-gap_hi[:, c]) // v))
                th = numpy.minimum(th, gap_lo[:, c] // v)
        cnt = numpy.maximum(th - tl + 1, 0)
        keep = cnt > 0
        sidx = sidx[keep]
        pt = pt[keep]
        tl = tl[keep]
        cnt = cnt[keep]
        if not len(sidx):
            break
        if int(cnt.sum()) > (1 << 23):
            raise _FunnelUnavailable
        idx = numpy.repeat(numpy.arange(len(sidx)), cnt)
        base = numpy.repeat(
            numpy.concatenate([[0], numpy.cumsum(cnt)[:-1]]), cnt)
        tval = tl[idx] + (numpy.arange(len(idx)) - base)
        sidx = sidx[idx]
        pt = pt[idx] + tval[:, numpy.newaxis] * vk[numpy.newaxis, :]
        nodes += len(sidx)
    if not len(sidx):
        return sidx, numpy.empty((0, nvars), dtype=numpy.int64), nodes
    return sidx, pt[:, :nvars] + shift[sidx], nodes


def _funnel_candidates(fd, rows):
    """Every solution of every listed join row, found in bulk.

    Boxes are first narrowed per row by pooled dual bound certificates
    and by window and residue propagation; the remaining boxes are then
    enumerated through the residue lattice, and candidates re-checked
    against every window.  Returns (row indices, solution matrix, nodes)
    with one entry per (row, solution) pair; rows without solutions are
    dropped.
    """
    lat = _ResidueLattice(fd)
    pack = _SweepPack(fd)
    lo_static = numpy.array([b[0] for b in fd.box], dtype=numpy.int64)
    hi_static = numpy.array([b[1] for b in fd.box], dtype=numpy.int64)
    stride = max(len(rows) // _CERT_SAMPLE, 1)
    sample_b = fd.b_of(rows[::stride][:_CERT_SAMPLE])
    groups = _certificate_groups(fd, sample_b, lo_static, hi_static)
    groups = _prune_certificates(groups, sample_b)

    nodes = 0
    step = 16384
    out_rows = []
    out_sols = []
    second = None
    cur = rows
    for round_two in (False, True):
        kept_rows = []
        kept_lo = []
        kept_hi = []
        for start in range(0, len(cur), step):
            chunk = cur[start:start + step]
            b = fd.b_of(chunk)
            lo = lo_static[numpy.newaxis, :].repeat(len(chunk), axis=0)
            hi = hi_static[numpy.newaxis, :].repeat(len(chunk), axis=0)
            ok = _apply_certificates(groups, b, lo, hi)
            chunk = chunk[ok]
            if not len(chunk):
                continue
            kept_rows.append(chunk)
            kept_lo.append(lo[ok])
            kept_hi.append(hi[ok])
        if not kept_rows:
            return (numpy.empty(0, dtype=numpy.int64),
                    numpy.empty((0, fd.nvars), dtype=numpy.int64), nodes)
        cur = numpy.concatenate(kept_rows)
        if round_two or len(cur) <= _CERT_SAMPLE:
            break
        stride = max(len(cur) // _CERT_SAMPLE, 1)
        second = fd.b_of(cur[::stride][:_CERT_SAMPLE])
        more = _certificate_groups(fd, second, lo_static, hi_static)
        merged = {}
        for var, sgn, kvec, wmat in groups + more:
            got = merged.get((var, sgn))
            if got is None:
                merged[(var, sgn)] = [kvec, wmat]
            else:
                got[0] = numpy.concatenate([got[0], kvec])
                got[1] = numpy.vstack([got[1], wmat])
        groups = [(var, sgn, kv, wm)
                  for (var, sgn), (kv, wm) in sorted(merged.items())]
        groups = _prune_certificates(groups, second)
    boxes_lo = numpy.concatenate(kept_lo)
    boxes_hi = numpy.concatenate(kept_hi)

    for start in range(0, len(cur), step):
        chunk = cur[start:start + step]
        b = fd.b_of(chunk)
        lo = boxes_lo[start:start + step]
        hi = boxes_hi[start:start + step]
        ok, lo, hi = _window_sweep(pack, b, lo, hi, 3)
        chunk = chunk[ok]
        if not len(chunk):
            continue
        b = b[ok]
        lo = lo[ok]
        hi = hi[ok]
        live, shift = lat.shifts(b)
        chunk = chunk[live]
        if not len(chunk):
            continue
        lo = lo[live]
        hi = hi[live]
        shift = shift[live]
        b = b[live]
        sub = 4096
        for s2 in range(0, len(chunk), sub):
            part = slice(s2, s2 + sub)
            sidx, sols, count = _enumerate_cosets(
                lat, lo[part], hi[part], shift[part])
            nodes += count
            if not len(sidx):
                continue
            bpart = b[part][sidx]
            values = bpart + sols @ fd.coeff.T
            good = ((values >= 0) &
                    (values <= fd.mdeg[numpy.newaxis, :])).all(axis=1)
            if not good.any():
                continue
            out_rows.append(chunk[part][sidx[good]])
            out_sols.append(sols[good])
    if not out_rows:
        return (numpy.empty(0, dtype=numpy.int64),
                numpy.empty((0, fd.nvars), dtype=numpy.int64), nodes)
    return numpy.concatenate(out_rows), numpy.vstack(out_sols), nodes


def _label_power_permutation(table, level, j):
    """Position permutation sending each unknown class to its j-th power."""
    nvars = len(level.labels)
    where = {lab: i for i, lab in enumerate(level.labels)}
    perm = numpy.empty(nvars, dtype=numpy.int64)
    for i, ci in enumerate(level.indices):
        perm[i] = where[table.power_class(ci, j)]
    return perm


def _orbit_closure_bulk(table, level, fd, covered, maps, sol_rows, sols):
    """Expand representative-row solutions over the power-map orbits.

    A vector solves a join row exactly when its power pushforward solves
    the pushforward row, so the full survivor set is the image of the
    representative solutions under every coprime power map, deduplicated
    on (lower selection, top vector).
    """
    m = level.m
    nvars = fd.nvars
    npools = len(fd.pools)
    js = [1] + sorted(maps[0])
    blocks = []
    for j in js:
        cols = []
        for pos in range(npools):
            sel = fd.selections[pos][sol_rows]
            if j != 1:
                sel = maps[pos][j][sel]
            cols.append(sel)
        perm = _label_power_permutation(table, level, j)
        moved = numpy.empty_like(sols)
        moved[:, perm] = sols
        blocks.append(numpy.column_stack(cols + [moved]))
    if len(sols):
        sample = {lab: int(v)
                  for lab, v in zip(level.labels, sols[0]) if v}
        base = {}
        for e, owner in covered.items():
            base[e] = fd.pools[owner][int(fd.selections[owner][sol_rows[0]])][e]
        base[m] = AugmentationVector(table, m, sample)
        chain = CandidateChain(table, m, base)
        for j in js[1:]:
            perm = _label_power_permutation(table, level, j)
            direct = dict(adams_transform(table, chain, j).items())
            expected = numpy.empty(nvars, dtype=numpy.int64)
            expected[perm] = sols[0]
            got = {lab: int(v)
                   for lab, v in zip(level.labels, expected) if v}
            if dict(direct[m].items()) != got:
                raise DataInconsistencyError(
                    "power pushforward disagrees with the transform")
    stacked = numpy.unique(numpy.vstack(blocks), axis=0)
    survivors = []
    owners = sorted(covered.items())
    for rec in stacked:
        cm = {}
        for e, owner in owners:
            cm[e] = fd.pools[owner][int(rec[owner])][e]
        entries = {lab: int(v)
                   for lab, v in zip(level.labels, rec[npools:]) if v}
        cm[m] = AugmentationVector(table, m, entries)
        survivors.append(cm)
    return survivors


def _bulk_search(table, level, per_level, providers, memo):
    """Feasibility search over a joined pool too large to test one by one.

    The join rows are screened in bulk: a row passes only if some value
    of a pivot unknown keeps every multiplicity form inside its window
    and on its residue when all remaining unknowns range over the box.
    That test is a relaxation of the leaf conditions, so screened-out
    rows admit no assignment at all.  A modest number of surviving rows
    goes through the exact per-row search; a large residue is decided by
    the vectorized funnel instead.  Without active providers the rows
    are first reduced to power-map orbit representatives and the
    survivors of each representative are expanded back over their
    orbits afterwards.
    """
    m = level.m
    nvars = len(level.labels)
    free = nvars - 1
    maximal = sorted({m // r for r in prime_divisors(m)} - {1})
    pools = [per_level[d] for d in maximal]
    if any(not pool for pool in pools):
        return [], 0
    join = _bulk_join(pools, maximal)
    if join is None:
        return [], 0
    selections, covered, vec_lists, pool_cols = join
    total = len(selections[0])

    maps = None if providers else _orbit_maps(table, per_level, maximal, m)
    if maps is None:
        rows = numpy.arange(total, dtype=numpy.int64)
    else:
        rows = _orbit_representatives(maps, selections, pools, m)

    # static parts of the multiplicity forms in full unknown space; only
    # the lower chain contribution to each constant varies across rows
    ncols = table.num_classes * m
    coeff_full = numpy.empty((ncols, nvars), dtype=numpy.int64)
    static_full = numpy.empty(ncols, dtype=numpy.int64)
    mdeg = numpy.empty(ncols, dtype=numpy.int64)
    col = 0
    for chi in range(table.num_classes):
        degree, rws = level.mu_rows[chi]
        for k in range(m):
            row = rws[k]
            for i in range(nvars):
                coeff_full[col, i] = row[i]
            static_full[col] = degree
            mdeg[col] = m * degree
            col += 1

    trace_mats = {}
    gather = numpy.empty(ncols, dtype=numpy.int64)
    for d, vecs in vec_lists.items():
        base = numpy.empty((len(vecs), table.num_classes * d),
                           dtype=numpy.int64)
        for v, vec in enumerate(vecs):
            c = 0
            for chi in range(table.num_classes):
                tr = _lower_traces(table, chi, d, vec, memo)
                for k in range(d):
                    base[v, c] = tr[k]
                    c += 1
        c = 0
        for chi in range(table.num_classes):
            off = chi * d
            for k in range(m):
                gather[c] = off + ((-k) % d)
                c += 1
        trace_mats[d] = base[:, gather]

    stack = [coeff_full.T, static_full[None, :], mdeg[None, :]]
    stack.extend(trace_mats[d] for d in sorted(trace_mats))
    _, col_idx = numpy.unique(numpy.vstack(stack), axis=1, return_index=True)
    col_idx = numpy.sort(col_idx)
    coeff_full = coeff_full[col_idx]
    static_full = static_full[col_idx]
    mdeg = mdeg[col_idx]

    # screen in eliminated space, where the fixed augmentation sum is
    # already substituted into every form
    coeff = coeff_full[:, :free] - coeff_full[:, free:]
    static = static_full + coeff_full[:, free]

    contrib = []
    for pos, (own, cols) in enumerate(pool_cols):
        owned = [e for e in own if covered[e] == pos]
        mat = numpy.zeros((len(pools[pos]), len(col_idx)), dtype=numpy.int64)
        for e in owned:
            mat += trace_mats[e][:, col_idx][cols[e]]
        contrib.append(mat)

    # pivot: the unknown pinned by the most single-variable forms, since
    # those forms decide feasibility of a row almost by themselves
    nonzero = coeff != 0
    tally = numpy.zeros(free, dtype=numpy.int64)
    for j in numpy.nonzero(nonzero.sum(axis=1) == 1)[0]:
        tally[int(numpy.nonzero(coeff[j])[0][0])] += 1
    if tally.any():
        pivot = int(tally.argmax())
    else:
        widths = [hi - lo for lo, hi in level.box[:free]]
        pivot = min(range(free), key=lambda i: (widths[i], i))

    los = numpy.array([level.box[i][0] for i in range(free)],
                      dtype=numpy.int64)
    his = numpy.array([level.box[i][1] for i in range(free)],
                      dtype=numpy.int64)
    lopart = numpy.where(coeff > 0, coeff * los, coeff * his)
    hipart = numpy.where(coeff > 0, coeff * his, coeff * los)
    cp = coeff[:, pivot].copy()
    rest_min = lopart.sum(axis=1) - lopart[:, pivot]
    rest_max = hipart.sum(axis=1) - hipart[:, pivot]
    others = coeff.copy()
    others[:, pivot] = 0
    pinned_mod = (others % m == 0).all(axis=1)

    # the eliminated-unknown bound admits only some pivot values, since
    # its form is constant minus the sum of the free unknowns
    lo_last, hi_last = level.box[-1]
    all_lo = int(los.sum() - los[pivot])
    all_hi = int(his.sum() - his[pivot])
    vals = [v for v in range(int(los[pivot]), int(his[pivot]) + 1)
            if 1 - v - all_hi <= hi_last and 1 - v - all_lo >= lo_last]

    alive = []
    step = 131072
    for start in range(0, len(rows), step):
        chunk = rows[start:start + step]
        b = static[numpy.newaxis, :].repeat(len(chunk), axis=0)
        for pos in range(len(pools)):
            b += contrib[pos][selections[pos][chunk]]
        ok_any = numpy.zeros(len(chunk), dtype=bool)
        for v in vals:
            f = b + cp[numpy.newaxis, :] * v
            ok = (f + rest_max[numpy.newaxis, :] >= 0)
            ok &= (f + rest_min[numpy.newaxis, :] <= mdeg[numpy.newaxis, :])
            ok[:, pinned_mod] &= (f[:, pinned_mod] % m == 0)
            ok_any |= ok.all(axis=1)
        alive.append(chunk[ok_any])
    alive = numpy.concatenate(alive) if alive else numpy.empty(0, dtype=int)

    if maps is not None and len(alive) > _FUNNEL_MIN:
        fd = _FunnelData(
            m, nvars, coeff_full, static_full, mdeg,
            [tuple(b) for b in level.box],
            [(r, frozenset(pos), m // r) for r, pos in level.congs],
            pools, selections, contrib)
        try:
            sol_rows, sols, nodes = _funnel_candidates(fd, alive)
        except _FunnelUnavailable:
            pass
        else:
            survivors = _orbit_closure_bulk(table, level, fd, covered,
                                            maps, sol_rows, sols)
            return survivors, nodes

    survivors = []
    seen = set()
    nodes = 0
    js = [1] + (sorted(maps[0]) if maps else [])
    for row in alive:
        union = {}
        for e, owner in covered.items():
            cm = pools[owner][selections[owner][row]]
            union[e] = cm[e]
        found, explored = _search_level(table, level, union, providers, memo)
        nodes += explored
        for cm in found:
            if maps is None:
                survivors.append(cm)
                continue
            chain = CandidateChain(table, m, cm)
            for j in js:
                moved = cm if j == 1 else \
                    dict(adams_transform(table, chain, j).items())
                key = _chain_key(moved)
                if key not in seen:
                    seen.add(key)
                    survivors.append(moved)
    return survivors, nodes


def _search_level(table, level, lower, providers, memo):
    m = level.m
    nvars = len(level.indices)
    if nvars == 0:
        return [], 0
    lower_chain = CandidateChain(table, m, lower)
    raw = _compile_forms(table, level, lower_chain, providers, memo)
    forms = _eliminate_last(raw, level.box[-1])
    boxes = _tighten_boxes(forms, [tuple(b) for b in level.box[:-1]])
    if boxes is None:
        return [], 0
    # enumerate narrow variables first; wide ones prune better at depth
    order = sorted(range(len(boxes)),
                   key=lambda i: (boxes[i][1] - boxes[i][0], i))
    boxes = [boxes[i] for i in order]
    forms = [(tuple(coeffs[i] for i in order), const, lo, hi, mod)
             for coeffs, const, lo, hi, mod in forms]
    packed = _pack_forms(forms, boxes)
    survivors = []

    def on_leaf(free_values):
        full = [0] * (nvars - 1)
        for slot, value in zip(order, free_values):
            full[slot] = value
        full.append(1 - sum(free_values))
        entries = {lab: v for lab, v in zip(level.labels, full) if v}
        vec = AugmentationVector(table, m, entries)
        chain_map = dict(lower)
        chain_map[m] = vec
        chain = CandidateChain(table, m, chain_map)
        for provider in providers:
            if not provider.admits(table, m, chain):
                return
        survivors.append(chain_map)

    nodes = _enumerate(boxes, packed, on_leaf)
    return survivors, nodes


class SolutionSet:
    """Outcome of a feasibility search: surviving chains plus certificate.

    An empty survivor tuple means the constraint system is infeasible,
    which is the verdict of interest.  The certificate records the exact
    bounding box enumerated at every level and how it was derived.
    """

    __slots__ = ("group", "unit_order", "survivors", "constraints",
                 "certificate")

    def __init__(self, group, unit_order, survivors, constraints,
                 certificate):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "unit_order", unit_order)
        object.__setattr__(self, "survivors", tuple(survivors))
        object.__setattr__(self, "constraints", tuple(constraints))
        object.__setattr__(self, "certificate", certificate)

    def __setattr__(self, name, value):
        raise AttributeError("SolutionSet is immutable")

    @property
    def is_infeasible(self):
        return not self.survivors

    def __len__(self):
        return len(self.survivors)

    def __iter__(self):
        return iter(self.survivors)

    def _constraint_pairs(self):
        pairs = []
        for con in self.constraints:
            pair = {"kind": con.kind, "provenance": con.provenance}
            if pair not in pairs:
                pairs.append(pair)
        return pairs

    def to_json_document(self):
        bounds = {
            str(m): {lab: [lo, hi] for lab, (lo, hi) in sorted(level.items())}
            for m, level in sorted(self.certificate["bounds"].items())
        }
        return {
            "problem": {"group": self.group, "n": self.unit_order},
            "constraints": self._constraint_pairs(),
            "survivors": [chain.as_report_dict() for chain in self.survivors],
            "certificate": {
                "bounds": bounds,
                "box_slack": self.certificate["box_slack"],
                "derived_from": self.certificate["derived_from"],
                "search_nodes": self.certificate["search_nodes"],
            },
        }

    def to_markdown(self):
        lines = [f"# units of order {self.unit_order} in {self.group}", ""]
        if self.survivors:
            lines.append(f"**verdict:** {len(self.survivors)} candidate "
                         f"chain(s) survive every constraint")
        else:
            lines.append("**verdict:** infeasible, no augmentation chain "
                         "satisfies every constraint")
        lines += ["", "## constraints", "", "| kind | provenance |",
                  "| --- | --- |"]
        for pair in self._constraint_pairs():
            lines.append(f"| {pair['kind']} | {pair['provenance']} |")
        if self.survivors:
            lines += ["", "## survivors", ""]
            for i, chain in enumerate(self.survivors, 1):
                lines += [f"### chain {i}", "",
                          "| order | augmentations |", "| --- | --- |"]
                for m, vec in chain.items():
                    body = ", ".join(f"{lab}: {v}" for lab, v in vec.items())
                    lines.append(f"| {m} | {body} |")
                lines.append("")
        lines += ["## certificate", "",
                  f"- bounding box derived from: "
                  f"{self.certificate['derived_from']}",
                  f"- box slack: {self.certificate['box_slack']}",
                  f"- search nodes: {self.certificate['search_nodes']}", ""]
        for m, level in sorted(self.certificate["bounds"].items()):
            body = ", ".join(f"{lab} in [{lo}, {hi}]"
                             for lab, (lo, hi) in sorted(level.items()))
            lines.append(f"- order {m}: {body}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        state = "infeasible" if self.is_infeasible else \
            f"{len(self.survivors)} survivors"
        return (f"SolutionSet({self.group!r}, n={self.unit_order}, {state})")


def solve(table, n, extra_constraint_providers=(), box_slack=0):
    """Enumerate all augmentation chains of order n allowed by the table.

    Works bottom-up over the divisors m of n: at each level every vector
    inside the exact bounding box is tested against the non-negativity,
    integrality and degree bounds of all multiplicities for all table
    characters, the prime congruences, and the installed providers; the
    survivors feed the next level as fixed power chains.  An empty result
    proves no unit of order n exists over this table.  ``box_slack``
    enlarges every box coordinate symmetrically and exists so that the
    completeness of the certificate can be exercised by tests.
    """
    if n < 2:
        raise ValueError("unit order must be at least 2")
    if box_slack < 0:
        raise ValueError("box slack must be non-negative")
    providers = tuple(extra_constraint_providers)
    base = base_constraints(table, n)
    certificate = {
        "derived_from": "0 <= multiplicity <= degree over every table "
                        "character",
        "box_slack": box_slack,
        "bounds": {},
        "search_nodes": 0,
    }
    reported = list(base)
    infeasible_marker = any(c.kind == "equality" and not c.items()
                            and c.constant != 0 for c in base)
    if infeasible_marker:
        return SolutionSet(table.descriptor, n, (), reported, certificate)
    per_level = {}
    nodes = 0
    applied = []
    memo = {}
    for m in divisors(n):
        if m == 1:
            continue
        level = _prepare_level(table, m, box_slack)
        certificate["bounds"][m] = {
            lab: bounds for lab, bounds in zip(level.labels, level.box)}
        active = [p for p in providers
                  if p.unit_order is None or p.unit_order == m]
        for p in active:
            if p not in applied:
                applied.append(p)
        maximal = {m // r for r in prime_divisors(m)} - {1}
        pool_product = 1
        for d in maximal:
            pool_product *= len(per_level[d])
        if maximal and pool_product > 20000 and len(level.indices) > 1:
            survivors, explored = _bulk_search(table, level, per_level,
                                               active, memo)
            nodes += explored
        else:
            survivors = []
            for lower in _merge_lowers(per_level, m):
                found, explored = _search_level(table, level, lower, active,
                                                memo)
                survivors.extend(found)
                nodes += explored
        per_level[m] = survivors
    certificate["search_nodes"] = nodes
    for p in applied:
        reported.extend(p.describe())
    chains = tuple(CandidateChain(table, n, cm) for cm in per_level[n])
    return SolutionSet(table.descriptor, n, chains, tuple(reported),
                       certificate)


# ---------------------------------------------------------------------------
# trace identity diagnostics

def _parse_split(split):
    try:
        p, q = split
    except (TypeError, ValueError):
        raise ValueError("split must be a pair of distinct primes") from None
    p, q = int(p), int(q)
    if p == q or not is_prime(p) or not is_prime(q):
        raise ValueError("split must be a pair of distinct primes")
    return p, q


def _character_rows(table, selection):
    if isinstance(selection, int):
        rows = (selection,)
    else:
        rows = tuple(int(r) for r in selection)
    if not rows:
        raise ValueError("empty character selection")
    for r in rows:
        if not 0 <= r < table.num_classes:
            raise ValueError(f"character index {r} out of range")
    return rows


def _rows_value(table, rows, class_index):
    return cyc_sum([table.value(r, class_index) for r in rows])


def lemma41_identity_check(table, chi, psi, split, chain, xi_exponent):
    """Diagnostic for the trace identity linking two multiplicity values.

    chi and psi are character selections (an index, or a list of indices
    summed row-wise) and split = (p, q') factors the unit order n = p*q'.
    The check first verifies the hypothesis that chi and psi agree on all
    classes of element order prime to q', and that the table realizes
    orders p and q' but not n.  When everything holds it evaluates, for
    the given chain and root exponent, both the difference of the two
    multiplicities and the difference of the corresponding trace sums,
    and confirms they agree up to the factor n, so that equality of the
    multiplicities is exactly equivalent to equality of the trace sums.
    On a hypothesis failure it reports the violating classes and abstains.
    """
    p, q = _parse_split(split)
    n = p * q
    chi_rows = _character_rows(table, chi)
    psi_rows = _character_rows(table, psi)
    violations = tuple(
        c.label for ci, c in enumerate(table.classes)
        if c.element_order % q != 0
        and not cyc_equal(_rows_value(table, chi_rows, ci),
                          _rows_value(table, psi_rows, ci)))
    orders = {c.element_order for c in table.classes}
    structure = {
        "has_order_p": p in orders,
        "has_order_q": q in orders,
        "has_order_pq": n in orders,
    }
    report = {
        "unit_order": n,
        "split": (p, q),
        "hypothesis_holds": not violations,
        "violating_classes": violations,
        "order_structure": structure,
        "equivalence_verified": None,
        "mu_values": None,
        "mu_difference": None,
        "identity_sides": None,
        "trace_identity_difference": None,
    }
    structure_ok = (structure["has_order_p"] and structure["has_order_q"]
                    and not structure["has_order_pq"])
    if violations or not structure_ok:
        return report
    if chain.unit_order != n or not chain.is_complete:
        raise ValueError(f"a complete chain of order {n} is required")
    k = xi_exponent % n

    def multiplicity(rows):
        return sum(lp_multiplicity(table, chain, r, k) for r in rows)

    def trace_side(rows):
        value_q = cyc_sum([char_value(table, r, chain.vector(q))
                           for r in rows])
        total = _field_trace(value_q, q, -k)
        for label, eps in chain.vector(n).items():
            ci = table.class_index(label)
            if table.classes[ci].element_order != q:
                continue
            total += eps * _field_trace(_rows_value(table, rows, ci), n, -k)
        return total

    mu_chi = multiplicity(chi_rows)
    mu_psi = multiplicity(psi_rows)
    side_chi = trace_side(chi_rows)
    side_psi = trace_side(psi_rows)
    report["mu_values"] = (mu_chi, mu_psi)
    report["mu_difference"] = mu_chi - mu_psi
    report["identity_sides"] = (side_chi, side_psi)
    report["trace_identity_difference"] = side_chi - side_psi
    report["equivalence_verified"] = \
        n * (mu_chi - mu_psi) == side_chi - side_psi
    return report


def corollary42_deduce(table, chi, psi, split, epsilon_y=None):
    """Whether equal multiplicities force chi = psi at the order-q' class.

    Requires exactly one class y of element order q', agreement of chi and
    psi on all classes of order prime to q', and a table realizing orders
    p and q' but not p*q'.  The deduction rests on the factor
    1 + eps_y * r staying nonzero, where r is the ratio of two root
    traces; this is confirmed for every root of unity of order dividing
    p*q', either symbolically for all eps_y divisible by q' (the default)
    or for one concrete value.  Returns False, deducing nothing, when any
    hypothesis fails.
    """
    p, q = _parse_split(split)
    n = p * q
    chi_rows = _character_rows(table, chi)
    psi_rows = _character_rows(table, psi)
    if epsilon_y is not None:
        epsilon_y = int(epsilon_y)
        if epsilon_y % q != 0:
            raise ValueError(
                f"epsilon_y must be divisible by {q}, got {epsilon_y}")
    singles = [c for c in table.classes if c.element_order == q]
    if len(singles) != 1:
        return False
    for ci, c in enumerate(table.classes):
        if c.element_order % q == 0:
            continue
        if not cyc_equal(_rows_value(table, chi_rows, ci),
                         _rows_value(table, psi_rows, ci)):
            return False
    orders = {c.element_order for c in table.classes}
    if p not in orders or q not in orders or n in orders:
        return False
    for k in range(n):
        denominator = int(root_trace(q, -k))
        numerator = int(root_trace(n, -k))
        # the only trace values a q'-th root admits; both are -1 mod q'
        if denominator not in (q - 1, -1):
            return False
        if epsilon_y is not None:
            if denominator + epsilon_y * numerator == 0:
                return False
    return True
