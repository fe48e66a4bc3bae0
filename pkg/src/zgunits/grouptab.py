"""Conjugacy classes, exact character tables, and principal 2-block shapes.

Built-in tables cover PSL(2,q) and PGL(2,q) for odd prime powers q >= 5.
Externally computed tables enter through :func:`ingest_table`, which
validates a JSON document against the same invariants the built-ins obey.

Built-in conventions, fixed so that fixtures stay stable:

* Class order is identity, involution(s), unipotent(s), split torus
  classes by ascending parameter, nonsplit torus classes by ascending
  parameter.  For PGL the split involution precedes the nonsplit one.
* Labels are the element order followed by a letter in class order
  ("1a", "2a", "5b", ...).
* The first half-degree character takes the value (delta + g)/2 on the
  first unipotent class, where g is the Gauss square root of delta*q;
  the second takes (delta - g)/2 there, and the two swap on the other
  unipotent class.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .cyclotomic import (
    CYC_ONE,
    CYC_ZERO,
    CyclotomicNumber,
    compress,
    cyc_add,
    cyc_conjugate,
    cyc_equal,
    cyc_from_payload,
    cyc_mul,
    cyc_neg,
    cyc_scale,
    cyc_sum,
    cyc_to_payload,
    from_rational,
    galois_apply,
    gauss_sqrt,
    zeta,
)
from .errors import (
    AmbiguousBlockError,
    BlockDataError,
    DataInconsistencyError,
    MissingBlockDataError,
    OrthogonalityError,
    PowerMapError,
    SchemaError,
    TableShapeError,
    UnsupportedInputError,
)
from .numtheory import factorize, is_prime_power, is_square_in_field, lcm, v2

KLEIN_FOUR = "KleinFour"
DIHEDRAL8 = "Dihedral8"
OTHER_KIND = "Other"
_DEFECT_KINDS = (KLEIN_FOUR, DIHEDRAL8, OTHER_KIND)
_MEMBER_COUNT = {KLEIN_FOUR: 4, DIHEDRAL8: 5}


def _letter(i):
    out = ""
    i += 1
    while i > 0:
        i, r = divmod(i - 1, 26)
        out = chr(ord("a") + r) + out
    return out


def _sign_pow(k):
    return Fraction(-1) if k % 2 else Fraction(1)


def _zsum(t, a):
    """zeta_t^a + zeta_t^(-a)."""
    return cyc_add(zeta(t, a % t), zeta(t, (-a) % t))


class ClassData:
    """One conjugacy class.

    ``power_maps`` maps each prime dividing the group exponent to the
    label of the class containing the r-th powers.
    """

    __slots__ = ("label", "element_order", "class_size", "power_maps")

    def __init__(self, label, element_order, class_size, power_maps):
        if not isinstance(label, str) or not label:
            raise ValueError("class label must be a nonempty string")
        if not isinstance(element_order, int) or element_order < 1:
            raise ValueError("element order must be a positive integer")
        if not isinstance(class_size, int) or class_size < 1:
            raise ValueError("class size must be a positive integer")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "element_order", element_order)
        object.__setattr__(self, "class_size", class_size)
        object.__setattr__(self, "power_maps", dict(power_maps))

    def __setattr__(self, name, value):
        raise AttributeError("ClassData is immutable")

    def __eq__(self, other):
        if not isinstance(other, ClassData):
            return NotImplemented
        return (self.label == other.label
                and self.element_order == other.element_order
                and self.class_size == other.class_size
                and self.power_maps == other.power_maps)

    __hash__ = None

    def __repr__(self):
        return (f"ClassData({self.label!r}, order={self.element_order}, "
                f"size={self.class_size})")


class CharacterTable:
    """Square table of exact character values over ordered classes.

    Instances are immutable after construction and validated up front:
    identity class first, sizes summing to the group order, power maps
    compatible with element orders, and exact row orthogonality.
    """

    __slots__ = ("group_order", "descriptor", "conductor", "classes",
                 "characters", "_family", "_q", "_kp_index", "_power_fn",
                 "_label_index", "_power_cache", "_block", "_block_cache",
                 "_degrees")

    def __init__(self, group_order, descriptor, classes, characters,
                 conductor, family=None, q=None, kp_index=None,
                 power_fn=None, block=None):
        classes = tuple(classes)
        characters = tuple(tuple(row) for row in characters)
        label_index = {}
        for i, c in enumerate(classes):
            if c.label in label_index:
                raise TableShapeError(f"duplicate class label {c.label!r}")
            label_index[c.label] = i
        _validate_shape(group_order, classes, characters)
        _validate_power_maps(classes, label_index)
        _validate_conductor(conductor, characters)
        _validate_row_orthogonality(group_order, classes, characters)
        object.__setattr__(self, "group_order", group_order)
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "characters", characters)
        object.__setattr__(self, "_family", family)
        object.__setattr__(self, "_q", q)
        object.__setattr__(self, "_kp_index", kp_index)
        object.__setattr__(self, "_power_fn", power_fn)
        object.__setattr__(self, "_label_index", label_index)
        object.__setattr__(self, "_power_cache", {})
        object.__setattr__(self, "_block", block)
        object.__setattr__(self, "_block_cache", None)
        object.__setattr__(
            self, "_degrees",
            tuple(int(row[0].as_rational()) for row in characters))

    def __setattr__(self, name, value):
        raise AttributeError("CharacterTable is immutable")

    def __eq__(self, other):
        if not isinstance(other, CharacterTable):
            return NotImplemented
        if (self.group_order != other.group_order
                or self.descriptor != other.descriptor
                or self.conductor != other.conductor
                or self.classes != other.classes):
            return False
        return all(cyc_equal(a, b)
                   for ra, rb in zip(self.characters, other.characters)
                   for a, b in zip(ra, rb))

    __hash__ = None

    def __repr__(self):
        return (f"CharacterTable({self.descriptor!r}, "
                f"{len(self.classes)} classes)")

    @property
    def num_classes(self):
        return len(self.classes)

    def degree(self, chi_index):
        return self._degrees[chi_index]

    def class_index(self, label):
        try:
            return self._label_index[label]
        except KeyError:
            raise KeyError(f"no class labeled {label!r}") from None

    def value(self, chi_index, class_index):
        return self.characters[chi_index][class_index]

    def power_class(self, class_index, e):
        """Index of the class containing g^e for g in the given class."""
        order = self.classes[class_index].element_order
        e %= order
        key = (class_index, e)
        cached = self._power_cache.get(key)
        if cached is not None:
            return cached
        if e == 0:
            result = 0
        elif e == 1:
            result = class_index
        elif self._power_fn is not None:
            result = self._kp_index[self._power_fn(class_index, e)]
        else:
            d = gcd(e, order)
            if d > 1:
                r = min(factorize(d))
                label = self.classes[class_index].power_maps[r]
                result = self.power_class(self._label_index[label], e // r)
            else:
                result = self._match_galois_power(class_index, e)
        self._power_cache[key] = result
        return result

    def _match_galois_power(self, class_index, e):
        """Class of g^e for e coprime to the order of g, found by
        matching the Galois-transformed column against the table."""
        order = self.classes[class_index].element_order
        modulus = lcm(order, *(row[class_index].conductor
                               for row in self.characters))
        j = e % order
        while gcd(j, modulus) != 1:
            j += order
        target = [galois_apply(row[class_index], j) for row in self.characters]
        hits = []
        for ci, c in enumerate(self.classes):
            if c.element_order != order:
                continue
            if all(cyc_equal(row[ci], want)
                   for row, want in zip(self.characters, target)):
                hits.append(ci)
        if len(hits) != 1:
            raise PowerMapError(
                f"power {e} of class {self.classes[class_index].label!r} "
                f"matches {len(hits)} columns")
        return hits[0]

    def to_document(self, block=None):
        doc = {
            "format": 1,
            "group_order": str(self.group_order),
            "descriptor": self.descriptor,
            "conductor": str(self.conductor),
            "classes": [
                {
                    "label": c.label,
                    "element_order": str(c.element_order),
                    "class_size": str(c.class_size),
                    "power_maps": {str(r): lab
                                   for r, lab in sorted(c.power_maps.items())},
                }
                for c in self.classes
            ],
            "characters": [[cyc_to_payload(v) for v in row]
                           for row in self.characters],
        }
        if block is not None:
            doc["block"] = {
                "members": [str(m) for m in block.member_characters],
                "decomposition_matrix": [[str(e) for e in row]
                                         for row in block.decomposition_matrix],
                "defect": str(block.defect),
                "defect_group_kind": block.defect_group_kind,
                "sylow2_kind": block.defect_group_kind,
            }
        return doc


class BlockShape:
    """Shape data of a 2-block: members, decomposition matrix, defect."""

    __slots__ = ("member_characters", "decomposition_matrix", "defect",
                 "defect_group_kind", "trivial_row", "member_degrees")

    def __init__(self, member_characters, decomposition_matrix, defect,
                 defect_group_kind, trivial_row, member_degrees):
        member_characters = tuple(member_characters)
        decomposition_matrix = tuple(tuple(row) for row in decomposition_matrix)
        member_degrees = tuple(member_degrees)
        if defect_group_kind not in _DEFECT_KINDS:
            raise ValueError(f"unknown defect group kind {defect_group_kind!r}")
        if not isinstance(defect, int) or defect < 0:
            raise ValueError("defect must be a non-negative integer")
        if len(decomposition_matrix) != len(member_characters):
            raise ValueError("decomposition matrix must have one row per member")
        if len(member_degrees) != len(member_characters):
            raise ValueError("need one degree per member character")
        widths = {len(row) for row in decomposition_matrix}
        if len(widths) > 1:
            raise ValueError("decomposition matrix rows differ in length")
        for row in decomposition_matrix:
            for entry in row:
                if not isinstance(entry, int) or entry < 0:
                    raise ValueError("decomposition numbers must be >= 0")
        if not 0 <= trivial_row < len(member_characters):
            raise ValueError("trivial row index out of range")
        object.__setattr__(self, "member_characters", member_characters)
        object.__setattr__(self, "decomposition_matrix", decomposition_matrix)
        object.__setattr__(self, "defect", defect)
        object.__setattr__(self, "defect_group_kind", defect_group_kind)
        object.__setattr__(self, "trivial_row", trivial_row)
        object.__setattr__(self, "member_degrees", member_degrees)

    def __setattr__(self, name, value):
        raise AttributeError("BlockShape is immutable")

    def __eq__(self, other):
        if not isinstance(other, BlockShape):
            return NotImplemented
        return (self.member_characters == other.member_characters
                and self.decomposition_matrix == other.decomposition_matrix
                and self.defect == other.defect
                and self.defect_group_kind == other.defect_group_kind
                and self.trivial_row == other.trivial_row
                and self.member_degrees == other.member_degrees)

    __hash__ = None

    def __repr__(self):
        return (f"BlockShape({self.defect_group_kind}, defect={self.defect}, "
                f"members={self.member_characters})")


# ---------------------------------------------------------------------------
# construction-time validation


def _validate_shape(group_order, classes, characters):
    k = len(classes)
    if k == 0:
        raise TableShapeError("table has no classes")
    if len(characters) != k:
        raise TableShapeError(
            f"table is not square: {len(characters)} characters, {k} classes")
    for row in characters:
        if len(row) != k:
            raise TableShapeError("character row length differs from class count")
    first = classes[0]
    if first.element_order != 1 or first.class_size != 1:
        raise TableShapeError("first class must be the identity")
    if sum(c.element_order == 1 for c in classes) != 1:
        raise TableShapeError("exactly one class may have element order 1")
    total = sum(c.class_size for c in classes)
    if total != group_order:
        raise TableShapeError(
            f"class sizes sum to {total}, group order is {group_order}")
    for row in characters:
        v = row[0]
        if not v.is_rational():
            raise TableShapeError("character degree is irrational")
        deg = v.as_rational()
        if deg.denominator != 1 or deg <= 0:
            raise TableShapeError(f"character degree {deg} is not a positive integer")


def _validate_power_maps(classes, label_index):
    exponent_ = lcm(*(c.element_order for c in classes))
    primes = set(factorize(exponent_))
    for c in classes:
        if set(c.power_maps) != primes:
            raise PowerMapError(
                f"class {c.label!r} must map exactly the primes {sorted(primes)}")
        for r, target_label in c.power_maps.items():
            ti = label_index.get(target_label)
            if ti is None:
                raise PowerMapError(
                    f"class {c.label!r} maps prime {r} to missing class "
                    f"{target_label!r}")
            want = c.element_order // gcd(c.element_order, r)
            got = classes[ti].element_order
            if got != want:
                raise PowerMapError(
                    f"class {c.label!r} to the power {r} should have order "
                    f"{want}, target {target_label!r} has order {got}")


def _validate_conductor(conductor, characters):
    if not isinstance(conductor, int) or conductor < 1:
        raise SchemaError("conductor must be a positive integer")
    for row in characters:
        for v in row:
            if conductor % v.conductor != 0:
                raise SchemaError(
                    f"value of conductor {v.conductor} does not divide the "
                    f"declared table conductor {conductor}")


def _validate_row_orthogonality(group_order, classes, characters):
    sizes = [Fraction(c.class_size) for c in classes]
    conj = [[cyc_conjugate(v) for v in row] for row in characters]
    k = len(characters)
    for i in range(k):
        for j in range(i, k):
            terms = [cyc_scale(cyc_mul(characters[i][ci], conj[j][ci]),
                               sizes[ci]) for ci in range(k)]
            want = group_order if i == j else 0
            if not cyc_equal(cyc_sum(terms), from_rational(want)):
                raise OrthogonalityError(
                    f"rows {i} and {j} violate orthogonality")


def verify_column_orthogonality(table):
    """Raise OrthogonalityError unless exact column orthogonality holds."""
    k = table.num_classes
    conj = [[cyc_conjugate(v) for v in row] for row in table.characters]
    for ci in range(k):
        for cj in range(ci, k):
            total = cyc_sum([cyc_mul(table.characters[r][ci], conj[r][cj])
                             for r in range(k)])
            if ci == cj:
                want = Fraction(table.group_order, table.classes[ci].class_size)
            else:
                want = Fraction(0)
            if not cyc_equal(total, from_rational(want)):
                raise OrthogonalityError(
                    f"columns {ci} and {cj} violate orthogonality")


# ---------------------------------------------------------------------------
# built-in tables


def _validate_q(q, family):
    pf = is_prime_power(q)
    if pf is None or pf[0] == 2 or q < 5:
        raise UnsupportedInputError(
            f"{family}(2,q) tables need an odd prime power q >= 5, got {q}")
    return pf


def _assemble(group_order, descriptor, kps, orders, sizes, rows, family, q,
              power_fn):
    # store built-in values at their minimal conductors, so that rational
    # entries really have conductor 1 and 2-rational entries an odd one
    rows = [tuple(compress(v) for v in row) for row in rows]
    exponent_ = lcm(*orders)
    primes = sorted(factorize(exponent_))
    labels = []
    seen = {}
    for o in orders:
        labels.append(f"{o}{_letter(seen.setdefault(o, 0))}")
        seen[o] += 1
    kp_index = {kp: i for i, kp in enumerate(kps)}
    fn = lambda ci, e: power_fn(kps[ci][0], kps[ci][1], e)
    classes = []
    for ci, kp in enumerate(kps):
        maps = {}
        for r in primes:
            maps[r] = labels[kp_index[power_fn(kp[0], kp[1], r)]]
        classes.append(ClassData(labels[ci], orders[ci], sizes[ci], maps))
    return CharacterTable(group_order, descriptor, classes, rows, exponent_,
                          family=family, q=q, kp_index=kp_index, power_fn=fn)


@lru_cache(maxsize=None)
def psl2_table(q):
    """Exact character table of PSL(2,q), q an odd prime power >= 5."""
    p, f = _validate_q(q, "PSL")
    delta = 1 if q % 4 == 1 else -1
    t1, t2 = (q - 1) // 2, (q + 1) // 2
    group_order = q * (q * q - 1) // 2

    kps = [("id", 0)]
    if delta == 1:
        kps.append(("split", t1 // 2))
    else:
        kps.append(("nonsplit", t2 // 2))
    kps += [("uni", 1), ("uni", 2)]
    # for the even torus order (t+1)//2 == t//2, so the involution
    # parameter t//2 falls outside the range in both parity cases
    split_regular = list(range(1, (t1 + 1) // 2))
    nonsplit_regular = list(range(1, (t2 + 1) // 2))
    kps += [("split", l) for l in split_regular]
    kps += [("nonsplit", m) for m in nonsplit_regular]

    def order_of(kind, t):
        if kind == "id":
            return 1
        if kind == "uni":
            return p
        tt = t1 if kind == "split" else t2
        return tt // gcd(t, tt)

    def size_of(kind, t):
        if kind == "id":
            return 1
        if kind == "uni":
            return (q * q - 1) // 2
        tt = t1 if kind == "split" else t2
        full = q * (q + 1) if kind == "split" else q * (q - 1)
        return full // 2 if 2 * t == tt else full

    orders = [order_of(*kp) for kp in kps]
    sizes = [size_of(*kp) for kp in kps]

    gamma = gauss_sqrt(q)
    half_hi = cyc_scale(cyc_add(from_rational(delta), gamma), Fraction(1, 2))
    half_lo = cyc_scale(cyc_add(from_rational(delta), cyc_neg(gamma)),
                        Fraction(1, 2))

    def row(fn):
        return tuple(fn(kind, t) for kind, t in kps)

    def half_char(on_first, on_second):
        def fn(kind, t):
            if kind == "id":
                return from_rational(Fraction(q + delta, 2))
            if kind == "uni":
                return on_first if t == 1 else on_second
            if kind == "split":
                return (from_rational(_sign_pow(t)) if delta == 1
                        else CYC_ZERO)
            return (from_rational(-_sign_pow(t)) if delta == -1
                    else CYC_ZERO)
        return fn

    def steinberg(kind, t):
        if kind == "id":
            return from_rational(q)
        if kind == "uni":
            return CYC_ZERO
        return CYC_ONE if kind == "split" else from_rational(-1)

    def principal(i):
        def fn(kind, t):
            if kind == "id":
                return from_rational(q + 1)
            if kind == "uni":
                return CYC_ONE
            if kind == "split":
                return _zsum(t1, i * t)
            return CYC_ZERO
        return fn

    def discrete(j):
        def fn(kind, t):
            if kind == "id":
                return from_rational(q - 1)
            if kind == "uni":
                return from_rational(-1)
            if kind == "split":
                return CYC_ZERO
            return cyc_neg(_zsum(t2, j * t))
        return fn

    rows = [row(lambda kind, t: CYC_ONE),
            row(half_char(half_hi, half_lo)),
            row(half_char(half_lo, half_hi)),
            row(steinberg)]
    rows += [row(principal(i)) for i in range(1, len(split_regular) + 1)]
    rows += [row(discrete(j)) for j in range(1, len(nonsplit_regular) + 1)]

    def power_fn(kind, t, e):
        if kind == "id":
            return ("id", 0)
        if kind == "uni":
            if e % p == 0:
                return ("id", 0)
            return ("uni", t if is_square_in_field(e, p, f) else 3 - t)
        tt = t1 if kind == "split" else t2
        target = (t * e) % tt
        target = min(target, tt - target)
        return (kind, target) if target else ("id", 0)

    return _assemble(group_order, f"PSL(2,{q})", kps, orders, sizes, rows,
                     "PSL", q, power_fn)


@lru_cache(maxsize=None)
def pgl2_table(q):
    """Exact character table of PGL(2,q), q an odd prime power >= 5."""
    p, f = _validate_q(q, "PGL")
    group_order = q * (q * q - 1)
    ts, tn = q - 1, q + 1

    kps = [("id", 0), ("split", ts // 2), ("nonsplit", tn // 2), ("uni", 1)]
    kps += [("split", k) for k in range(1, ts // 2)]
    kps += [("nonsplit", m) for m in range(1, tn // 2)]

    def order_of(kind, t):
        if kind == "id":
            return 1
        if kind == "uni":
            return p
        tt = ts if kind == "split" else tn
        return tt // gcd(t, tt)

    def size_of(kind, t):
        if kind == "id":
            return 1
        if kind == "uni":
            return q * q - 1
        tt = ts if kind == "split" else tn
        full = q * (q + 1) if kind == "split" else q * (q - 1)
        return full // 2 if 2 * t == tt else full

    orders = [order_of(*kp) for kp in kps]
    sizes = [size_of(*kp) for kp in kps]

    def row(fn):
        return tuple(fn(kind, t) for kind, t in kps)

    def sgn(kind, t):
        if kind in ("id", "uni"):
            return CYC_ONE
        return from_rational(_sign_pow(t))

    def steinberg(kind, t):
        if kind == "id":
            return from_rational(q)
        if kind == "uni":
            return CYC_ZERO
        return CYC_ONE if kind == "split" else from_rational(-1)

    def steinberg_sgn(kind, t):
        if kind == "id":
            return from_rational(q)
        if kind == "uni":
            return CYC_ZERO
        sign = _sign_pow(t)
        return from_rational(sign if kind == "split" else -sign)

    def principal(i):
        def fn(kind, t):
            if kind == "id":
                return from_rational(q + 1)
            if kind == "uni":
                return CYC_ONE
            if kind == "split":
                return _zsum(ts, i * t)
            return CYC_ZERO
        return fn

    def discrete(j):
        def fn(kind, t):
            if kind == "id":
                return from_rational(q - 1)
            if kind == "uni":
                return from_rational(-1)
            if kind == "split":
                return CYC_ZERO
            return cyc_neg(_zsum(tn, j * t))
        return fn

    rows = [row(lambda kind, t: CYC_ONE), row(sgn), row(steinberg),
            row(steinberg_sgn)]
    rows += [row(principal(i)) for i in range(1, ts // 2)]
    rows += [row(discrete(j)) for j in range(1, tn // 2)]

    def power_fn(kind, t, e):
        if kind == "id":
            return ("id", 0)
        if kind == "uni":
            return ("id", 0) if e % p == 0 else ("uni", 1)
        tt = ts if kind == "split" else tn
        target = (t * e) % tt
        target = min(target, tt - target)
        return (kind, target) if target else ("id", 0)

    return _assemble(group_order, f"PGL(2,{q})", kps, orders, sizes, rows,
                     "PGL", q, power_fn)


# ---------------------------------------------------------------------------
# table-level queries


def involution_class_count(table):
    """Number of conjugacy classes of element order 2."""
    return sum(1 for c in table.classes if c.element_order == 2)


def exponent(table):
    """Least common multiple of the element orders."""
    return lcm(*(c.element_order for c in table.classes))


def character_height(chi_index, block, group_order):
    """Height h of a block member: v2(degree) = v2(|G|) - defect + h."""
    try:
        pos = block.member_characters.index(chi_index)
    except ValueError:
        raise ValueError(
            f"character {chi_index} is not a member of the block") from None
    h = v2(block.member_degrees[pos]) - v2(group_order) + block.defect
    if h < 0:
        raise DataInconsistencyError(
            f"character {chi_index} has negative height {h}")
    return h


# ---------------------------------------------------------------------------
# principal 2-block shapes


def _odd_class_indices(table):
    return [ci for ci, c in enumerate(table.classes)
            if c.element_order % 2 == 1]


def _check_member_heights(table, block):
    for m in block.member_characters:
        character_height(m, block, table.group_order)


def _psl_block(table):
    q = table._q
    if q % 8 == 3:
        matrix = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))
        shift = Fraction(1)
    else:
        matrix = ((1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 1, 1))
        shift = Fraction(-1)
    members = (0, 1, 2, 3)
    # on odd-order classes the Steinberg row must match the sum of the
    # half-degree rows plus or minus the trivial one, as the matrix says
    for ci in _odd_class_indices(table):
        combined = cyc_add(cyc_add(table.value(1, ci), table.value(2, ci)),
                           from_rational(shift))
        if not cyc_equal(table.value(3, ci), combined):
            raise DataInconsistencyError(
                f"block identity fails on class {table.classes[ci].label}")
    block = BlockShape(members, matrix, 2, KLEIN_FOUR, 0,
                       tuple(table.degree(m) for m in members))
    if block.defect != v2(table.group_order):
        raise DataInconsistencyError("principal block defect mismatch")
    _check_member_heights(table, block)
    return block


def _pgl_block(table):
    q = table._q
    d = 0 if q % 8 == 3 else 2
    odd = _odd_class_indices(table)
    targets = [cyc_add(table.value(2, ci), from_rational(d - 1)) for ci in odd]
    hits = []
    for r in range(table.num_classes):
        if r in (0, 1, 2, 3):
            continue
        if all(cyc_equal(table.value(r, ci), want)
               for ci, want in zip(odd, targets)):
            hits.append(r)
    if len(hits) != 1:
        raise AmbiguousBlockError(
            f"expected one height-1 member for q={q}, found {len(hits)}")
    members = (0, 1, hits[0], 2, 3)
    matrix = ((1, 0), (1, 0), (d, 1), (1, 1), (1, 1))
    block = BlockShape(members, matrix, 3, DIHEDRAL8, 0,
                       tuple(table.degree(m) for m in members))
    if block.defect != v2(table.group_order):
        raise DataInconsistencyError("principal block defect mismatch")
    _check_member_heights(table, block)
    return block


def principal_2block(table):
    """Shape of the principal 2-block.

    Built-in tables get the generic shape for q = 3, 5 (mod 8); ingested
    tables must have carried explicit block data.
    """
    if table._block is not None:
        return table._block
    if table._block_cache is not None:
        return table._block_cache
    if table._family is None:
        raise MissingBlockDataError(
            "ingested table carries no principal block data")
    q = table._q
    if q % 8 not in (3, 5):
        raise UnsupportedInputError(
            f"principal 2-block shape is only covered for q = 3, 5 (mod 8); "
            f"q={q} has a larger defect group")
    block = _psl_block(table) if table._family == "PSL" else _pgl_block(table)
    object.__setattr__(table, "_block_cache", block)
    return block


# ---------------------------------------------------------------------------
# ingestion and export


def _need(doc, key, kind, where):
    if key not in doc:
        raise SchemaError(f"{where} is missing the {key!r} field")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"{where} field {key!r} has the wrong type")
    return value


def _parse_int(text, where, minimum=None):
    if not isinstance(text, str):
        raise SchemaError(f"{where} must be a decimal string")
    stripped = text[1:] if text.startswith("-") else text
    if not stripped.isdigit():
        raise SchemaError(f"{where} is not a decimal integer: {text!r}")
    value = int(text)
    if minimum is not None and value < minimum:
        raise SchemaError(f"{where} must be at least {minimum}, got {value}")
    return value


def _parse_class(doc, i):
    where = f"class {i}"
    if not isinstance(doc, dict):
        raise SchemaError(f"{where} is not an object")
    extra = set(doc) - {"label", "element_order", "class_size", "power_maps"}
    if extra:
        raise SchemaError(f"{where} has unknown fields {sorted(extra)}")
    label = _need(doc, "label", str, where)
    order = _parse_int(_need(doc, "element_order", str, where),
                       f"{where} element_order", minimum=1)
    size = _parse_int(_need(doc, "class_size", str, where),
                      f"{where} class_size", minimum=1)
    raw_maps = _need(doc, "power_maps", dict, where)
    maps = {}
    for key, target in raw_maps.items():
        r = _parse_int(key, f"{where} power_maps key", minimum=2)
        if not isinstance(target, str):
            raise SchemaError(f"{where} power map target must be a label string")
        maps[r] = target
    return ClassData(label, order, size, maps)


def _parse_block(doc, table_size, group_order, degrees, characters):
    where = "block"
    if not isinstance(doc, dict):
        raise BlockDataError(f"{where} is not an object")
    extra = set(doc) - {"members", "decomposition_matrix", "defect",
                        "defect_group_kind", "sylow2_kind"}
    if extra:
        raise BlockDataError(f"{where} has unknown fields {sorted(extra)}")
    for key in ("members", "decomposition_matrix", "defect",
                "defect_group_kind", "sylow2_kind"):
        if key not in doc:
            raise BlockDataError(f"{where} is missing the {key!r} field")
    kind = doc["defect_group_kind"]
    if kind not in _DEFECT_KINDS:
        raise BlockDataError(f"unknown defect group kind {kind!r}")
    if doc["sylow2_kind"] != kind:
        raise BlockDataError(
            "principal block defect group must match the Sylow-2 kind")
    try:
        members = [_parse_int(m, "block member index", minimum=0)
                   for m in doc["members"]]
        defect = _parse_int(doc["defect"], "block defect", minimum=0)
        matrix = [[_parse_int(e, "decomposition number", minimum=0)
                   for e in row] for row in doc["decomposition_matrix"]]
    except SchemaError as exc:
        raise BlockDataError(str(exc)) from None
    if len(set(members)) != len(members):
        raise BlockDataError("block members repeat")
    if any(m >= table_size for m in members):
        raise BlockDataError("block member index out of range")
    want = _MEMBER_COUNT.get(kind)
    if want is not None and len(members) != want:
        raise BlockDataError(
            f"{kind} blocks have {want} members, got {len(members)}")
    if defect != v2(group_order):
        raise BlockDataError(
            f"principal block defect must be v2(|G|)={v2(group_order)}, "
            f"got {defect}")
    trivial_index = None
    for r in range(table_size):
        if all(cyc_equal(v, CYC_ONE) for v in characters[r]):
            trivial_index = r
            break
    if trivial_index is None or trivial_index not in members:
        raise BlockDataError("trivial character must be a block member")
    member_degrees = tuple(degrees[m] for m in members)
    try:
        block = BlockShape(members, matrix, defect, kind,
                           members.index(trivial_index), member_degrees)
    except ValueError as exc:
        raise BlockDataError(str(exc)) from None
    for m in members:
        h = v2(degrees[m]) - v2(group_order) + defect
        if h < 0:
            raise BlockDataError(f"member {m} would have negative height {h}")
    return block


def ingest_table(document):
    """Parse and validate a character-table document.

    Raises a distinct IngestError subclass per failure mode: SchemaError,
    TableShapeError, OrthogonalityError, PowerMapError,
    CyclotomicFormatError, BlockDataError.
    """
    if not isinstance(document, dict):
        raise SchemaError("table document must be a JSON object")
    extra = set(document) - {"format", "group_order", "descriptor",
                             "conductor", "classes", "characters", "block"}
    if extra:
        raise SchemaError(f"document has unknown fields {sorted(extra)}")
    fmt = _need(document, "format", None, "document")
    if fmt not in (1, "1"):
        raise SchemaError(f"unsupported format version {fmt!r}")
    group_order = _parse_int(_need(document, "group_order", str, "document"),
                             "group_order", minimum=1)
    descriptor = _need(document, "descriptor", str, "document")
    conductor = _parse_int(_need(document, "conductor", str, "document"),
                           "conductor", minimum=1)
    raw_classes = _need(document, "classes", list, "document")
    raw_characters = _need(document, "characters", list, "document")
    classes = [_parse_class(c, i) for i, c in enumerate(raw_classes)]
    characters = []
    for row in raw_characters:
        if not isinstance(row, list):
            raise SchemaError("each character must be a list of values")
        characters.append(tuple(cyc_from_payload(v) for v in row))
    table = CharacterTable(group_order, descriptor, classes, characters,
                           conductor)
    if "block" in document:
        degrees = [table.degree(r) for r in range(table.num_classes)]
        block = _parse_block(document["block"], table.num_classes,
                             group_order, degrees, table.characters)
        object.__setattr__(table, "_block", block)
    return table


def export_table(table, block=None):
    """Write a table (and optional block shape) as a schema document."""
    if block is None:
        block = table._block
    return table.to_document(block)
