"""Tests for class data, character tables, and principal 2-blocks.

The independent oracle here works directly with projective 2x2 matrices
over F_q: it enumerates group elements, splits them into conjugacy
classes by orbit search, and reads off element orders and class sizes.
"""

import json

import pytest

from zgunits.cyclotomic import cyc_equal, from_rational, zeta
from zgunits.errors import (
    BlockDataError,
    CyclotomicFormatError,
    MissingBlockDataError,
    OrthogonalityError,
    PowerMapError,
    SchemaError,
    TableShapeError,
    UnsupportedInputError,
)
from zgunits.grouptab import (
    character_height,
    export_table,
    exponent,
    ingest_table,
    involution_class_count,
    pgl2_table,
    principal_2block,
    psl2_table,
    verify_column_orthogonality,
)


# ---------------------------------------------------------------------------
# brute-force oracle over projective matrices


def field_tables(q):
    """Addition and multiplication tables of F_q, elements indexed
    0..q-1 with 0 -> zero and 1 -> one.  Prime fields use plain modular
    arithmetic; prime powers use polynomials modulo an irreducible."""
    p = 2
    while q % p:
        p += 1
    f, m = 0, q
    while m % p == 0:
        m //= p
        f += 1
    assert m == 1, "q must be a prime power"
    if f == 1:
        add = [[(a + b) % p for b in range(p)] for a in range(p)]
        mul = [[(a * b) % p for b in range(p)] for a in range(p)]
        return add, mul
    assert f in (2, 3), "root test only certifies degrees 2 and 3"
    import itertools
    poly = None
    for tail in itertools.product(range(p), repeat=f):
        candidate = list(tail) + [1]
        if all(sum(c * pow(x, i, p) for i, c in enumerate(candidate)) % p
               for x in range(p)):
            poly = candidate
            break
    els = [tuple(reversed(t)) for t in itertools.product(range(p), repeat=f)]
    els.sort(key=lambda t: tuple(reversed(t)))
    index = {e: i for i, e in enumerate(els)}

    def polymul(a, b):
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] += x * y
        for e in range(2 * f - 2, f - 1, -1):
            c = prod[e] % p
            prod[e] = 0
            for i in range(f):
                prod[e - f + i] -= c * poly[i]
        return tuple(x % p for x in prod[:f])

    add = [[index[tuple((x + y) % p for x, y in zip(a, b))] for b in els]
           for a in els]
    mul = [[index[polymul(a, b)] for b in els] for a in els]
    return add, mul


def projective_class_profile(q, det_one):
    """Sorted (element_order, class_size) pairs of PSL(2,q) (det_one) or
    PGL(2,q), from scratch."""
    add, mul = field_tables(q)
    neg = [next(b for b in range(q) if add[a][b] == 0) for a in range(q)]
    inv = [None] + [next(b for b in range(1, q) if mul[a][b] == 1)
                    for a in range(1, q)]

    def matmul(a, b):
        return (add[mul[a[0]][b[0]]][mul[a[1]][b[2]]],
                add[mul[a[0]][b[1]]][mul[a[1]][b[3]]],
                add[mul[a[2]][b[0]]][mul[a[3]][b[2]]],
                add[mul[a[2]][b[1]]][mul[a[3]][b[3]]])

    def det(m):
        return add[mul[m[0]][m[3]]][neg[mul[m[1]][m[2]]]]

    def matinv(m):
        di = inv[det(m)]
        return (mul[m[3]][di], mul[neg[m[1]]][di],
                mul[neg[m[2]]][di], mul[m[0]][di])

    scalars = sorted({1, neg[1]}) if det_one else list(range(1, q))

    def canon(m):
        return min(tuple(mul[lam][x] for x in m) for lam in scalars)

    elements = set()
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    dt = det((a, b, c, d))
                    if dt == 0 or (det_one and dt != 1):
                        continue
                    elements.add(canon((a, b, c, d)))

    gens = [(1, t, 0, 1) for t in range(1, q)]
    gens += [(1, 0, t, 1) for t in range(1, q)]
    if not det_one:
        gens += [(t, 0, 0, 1) for t in range(2, q)]
    gens = [(g, matinv(g)) for g in gens]

    profile = []
    seen = set()
    for x in sorted(elements):
        if x in seen:
            continue
        orbit = {x}
        frontier = [x]
        while frontier:
            y = frontier.pop()
            for g, gi in gens:
                z = canon(matmul(matmul(g, y), gi))
                if z not in orbit:
                    orbit.add(z)
                    frontier.append(z)
        seen |= orbit
        m, order = x, 1
        while not (m[1] == 0 and m[2] == 0 and m[0] == m[3]):
            m = matmul(m, x)
            order += 1
        profile.append((order, len(orbit)))
    return sorted(profile)


def table_class_profile(table):
    return sorted((c.element_order, c.class_size) for c in table.classes)


@pytest.mark.parametrize("q", [5, 7, 9, 11])
def test_psl_classes_match_matrix_brute_force(q):
    table = psl2_table(q)
    assert table_class_profile(table) == projective_class_profile(q, True)


@pytest.mark.parametrize("q", [5, 7, 9])
def test_pgl_classes_match_matrix_brute_force(q):
    table = pgl2_table(q)
    assert table_class_profile(table) == projective_class_profile(q, False)


# ---------------------------------------------------------------------------
# built-in structure


def test_psl_class_and_degree_shapes():
    t5 = psl2_table(5)
    assert len(t5.classes) == 5
    assert sorted(t5.degree(r) for r in range(5)) == [1, 3, 3, 4, 5]
    assert len(psl2_table(11).classes) == 8
    for q in (5, 7, 9, 13, 27):
        t = psl2_table(q)
        assert len(t.classes) == (q + 5) // 2
        assert t.group_order == q * (q * q - 1) // 2


def test_pgl_class_and_degree_shapes():
    t5 = pgl2_table(5)
    assert len(t5.classes) == 7
    assert sorted(t5.degree(r) for r in range(7)) == [1, 1, 4, 4, 5, 5, 6]
    assert len(pgl2_table(7).classes) == 9
    for q in (5, 7, 9, 13, 27):
        t = pgl2_table(q)
        assert len(t.classes) == q + 2
        assert t.group_order == q * (q * q - 1)


def test_builtin_rejects_bad_q():
    for q in (3, 4, 6, 8, 15, 2):
        with pytest.raises(UnsupportedInputError):
            psl2_table(q)
        with pytest.raises(UnsupportedInputError):
            pgl2_table(q)


@pytest.mark.parametrize("q", [5, 7, 9, 11, 13])
def test_column_orthogonality(q):
    verify_column_orthogonality(psl2_table(q))
    verify_column_orthogonality(pgl2_table(q))


def test_first_class_is_identity_and_labels_are_stable():
    t = psl2_table(13)
    assert t.classes[0].label == "1a"
    assert t.classes[0].element_order == 1
    assert [c.label for c in t.classes] == \
        ["1a", "2a", "13a", "13b", "6a", "3a", "7a", "7b", "7c"]


def test_exponent_and_involution_counts():
    assert exponent(psl2_table(5)) == 30
    assert exponent(pgl2_table(5)) == 60
    assert involution_class_count(psl2_table(5)) == 1
    assert involution_class_count(pgl2_table(5)) == 2


# ---------------------------------------------------------------------------
# power maps


def test_power_map_entries_match_known_values():
    t = psl2_table(7)
    assert t.classes[t.class_index("7a")].power_maps[3] == "7b"
    assert t.classes[t.class_index("7a")].power_maps[2] == "7a"
    assert t.classes[t.class_index("4a")].power_maps[2] == "2a"
    # over F_9 every integer is a square, so cubing classes stay put
    t9 = psl2_table(9)
    assert t9.classes[t9.class_index("3a")].power_maps[2] == "3a"
    assert t9.classes[t9.class_index("3b")].power_maps[5] == "3b"


@pytest.mark.parametrize("q,family", [(5, "PSL"), (7, "PSL"), (9, "PSL"),
                                      (5, "PGL"), (7, "PGL")])
def test_power_maps_compose(q, family):
    t = psl2_table(q) if family == "PSL" else pgl2_table(q)
    from zgunits.numtheory import prime_divisors
    primes = prime_divisors(exponent(t))
    for ci in range(t.num_classes):
        for r in primes:
            for s in primes:
                step = t.power_class(t.power_class(ci, r), s)
                assert step == t.power_class(ci, r * s)


def test_power_classes_respect_orders():
    t = pgl2_table(9)
    for ci, c in enumerate(t.classes):
        for e in range(2 * c.element_order):
            target = t.classes[t.power_class(ci, e)]
            want = c.element_order // __import__("math").gcd(c.element_order, e)
            assert target.element_order == want


def test_galois_power_path_matches_parameter_path():
    for build in (psl2_table, pgl2_table):
        original = build(7)
        copy = ingest_table(export_table(original))
        for ci, c in enumerate(original.classes):
            for e in range(c.element_order):
                assert original.power_class(ci, e) == copy.power_class(ci, e)


# ---------------------------------------------------------------------------
# principal 2-blocks


def test_psl_block_members_and_heights():
    t = psl2_table(11)
    b = principal_2block(t)
    assert b.member_degrees == (1, 5, 5, 11)
    assert b.decomposition_matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1),
                                      (1, 1, 1))
    assert b.defect == 2 and b.defect_group_kind == "KleinFour"
    assert [character_height(m, b, t.group_order)
            for m in b.member_characters] == [0, 0, 0, 0]

    t13 = psl2_table(13)
    b13 = principal_2block(t13)
    assert b13.member_degrees == (1, 7, 7, 13)
    assert b13.decomposition_matrix == ((1, 0, 0), (1, 1, 0), (1, 0, 1),
                                        (1, 1, 1))


def test_pgl_block_members_and_heights():
    t = pgl2_table(5)
    b = principal_2block(t)
    assert b.member_degrees == (1, 1, 6, 5, 5)
    assert b.decomposition_matrix == ((1, 0), (1, 0), (2, 1), (1, 1), (1, 1))
    assert b.defect == 3 and b.defect_group_kind == "Dihedral8"
    assert character_height(b.member_characters[2], b, t.group_order) == 1
    # q = 3 (mod 8) drops the defect-zero column entry
    b11 = principal_2block(pgl2_table(11))
    assert b11.decomposition_matrix[2] == (0, 1)
    assert b11.member_degrees[2] == 10


def test_block_height_one_member_is_unique_and_two_rational():
    for q in (5, 11, 13, 19, 27, 29):
        table = pgl2_table(q)
        block = principal_2block(table)
        degrees = [table.degree(m) for m in block.member_characters]
        assert degrees.count(q + (0 if q % 8 == 3 else 2) - 1) >= 1
        for m in block.member_characters:
            for ci, c in enumerate(table.classes):
                if c.element_order % 2 == 0:
                    assert table.value(m, ci).conductor % 2 == 1


def test_block_unsupported_for_other_q():
    for q in (7, 9, 17, 25):
        with pytest.raises(UnsupportedInputError):
            principal_2block(psl2_table(q))
        with pytest.raises(UnsupportedInputError):
            principal_2block(pgl2_table(q))


def test_ingested_table_without_block_data():
    table = ingest_table(export_table(psl2_table(11)))
    with pytest.raises(MissingBlockDataError):
        principal_2block(table)


def test_character_height_rejects_non_members():
    t = pgl2_table(5)
    b = principal_2block(t)
    outside = [r for r in range(t.num_classes)
               if r not in b.member_characters][0]
    with pytest.raises(ValueError):
        character_height(outside, b, t.group_order)


# ---------------------------------------------------------------------------
# ingestion


def identity_document():
    return {
        "format": 1,
        "group_order": "1",
        "descriptor": "trivial group",
        "conductor": "1",
        "classes": [{"label": "1a", "element_order": "1",
                     "class_size": "1", "power_maps": {}}],
        "characters": [[{"conductor": "1", "coefficients": [["0", "1", "1"]]}]],
    }


def cyclic5_document():
    classes = [{"label": "1a", "element_order": "1", "class_size": "1",
                "power_maps": {"5": "1a"}}]
    for i in range(1, 5):
        classes.append({"label": f"5{'abcd'[i - 1]}", "element_order": "5",
                        "class_size": "1", "power_maps": {"5": "1a"}})
    rows = []
    for j in range(5):
        row = []
        for i in range(5):
            e = (i * j) % 5
            row.append({"conductor": "5", "coefficients": [[str(e), "1", "1"]]})
        rows.append(row)
    return {"format": 1, "group_order": "5", "descriptor": "cyclic of order 5",
            "conductor": "5", "classes": classes, "characters": rows}


def test_identity_only_fixture():
    table = ingest_table(identity_document())
    assert exponent(table) == 1
    assert involution_class_count(table) == 0


def test_odd_cyclic_fixture():
    table = ingest_table(cyclic5_document())
    assert involution_class_count(table) == 0
    assert exponent(table) == 5
    # Galois matching: squaring the generator class lands on zeta^2 column
    ci = table.power_class(table.class_index("5a"), 2)
    assert table.classes[ci].label == "5b"
    assert cyc_equal(table.value(1, ci), zeta(5, 2))


@pytest.mark.parametrize("q,build", [(5, psl2_table), (9, psl2_table),
                                     (5, pgl2_table), (11, pgl2_table)])
def test_export_ingest_round_trip(q, build):
    table = build(q)
    doc = json.loads(json.dumps(export_table(table)))
    assert ingest_table(doc) == table


def test_round_trip_preserves_block():
    table = pgl2_table(13)
    block = principal_2block(table)
    doc = json.loads(json.dumps(export_table(table, block)))
    again = ingest_table(doc)
    assert principal_2block(again) == block


def test_ingest_rejects_non_square_table():
    doc = export_table(psl2_table(5))
    doc["characters"] = doc["characters"][:-1]
    with pytest.raises(TableShapeError):
        ingest_table(doc)


def test_ingest_rejects_duplicate_character_row():
    doc = export_table(psl2_table(5))
    doc["characters"][1] = doc["characters"][0]
    with pytest.raises(OrthogonalityError):
        ingest_table(doc)


def test_ingest_rejects_wrong_class_sizes():
    doc = export_table(psl2_table(5))
    doc["classes"][2]["class_size"] = "13"
    with pytest.raises(TableShapeError):
        ingest_table(doc)


def test_ingest_rejects_broken_power_maps():
    doc = export_table(psl2_table(5))
    doc["classes"][2]["power_maps"]["5"] = "3a"
    with pytest.raises(PowerMapError):
        ingest_table(doc)
    doc = export_table(psl2_table(5))
    doc["classes"][2]["power_maps"]["5"] = "9z"
    with pytest.raises(PowerMapError):
        ingest_table(doc)


def test_ingest_rejects_malformed_values():
    doc = export_table(psl2_table(5))
    doc["characters"][0][0] = {"conductor": "x", "coefficients": []}
    with pytest.raises(CyclotomicFormatError):
        ingest_table(doc)


def test_ingest_rejects_schema_violations():
    doc = export_table(psl2_table(5))
    doc["surprise"] = 1
    with pytest.raises(SchemaError):
        ingest_table(doc)
    doc = export_table(psl2_table(5))
    doc["format"] = 2
    with pytest.raises(SchemaError):
        ingest_table(doc)
    doc = export_table(psl2_table(5))
    doc["group_order"] = 60
    with pytest.raises(SchemaError):
        ingest_table(doc)


def test_ingest_rejects_inconsistent_block_data():
    table = pgl2_table(5)
    block = principal_2block(table)

    doc = export_table(table, block)
    doc["block"]["defect"] = "2"
    with pytest.raises(BlockDataError):
        ingest_table(doc)

    doc = export_table(table, block)
    doc["block"]["sylow2_kind"] = "KleinFour"
    with pytest.raises(BlockDataError):
        ingest_table(doc)

    doc = export_table(table, block)
    doc["block"]["members"] = doc["block"]["members"][:-1]
    doc["block"]["decomposition_matrix"] = \
        doc["block"]["decomposition_matrix"][:-1]
    with pytest.raises(BlockDataError):
        ingest_table(doc)

    doc = export_table(table, block)
    doc["block"]["members"][0] = "4"
    with pytest.raises(BlockDataError):
        ingest_table(doc)


def test_ingest_requires_identity_first():
    doc = export_table(psl2_table(5))
    doc["classes"] = doc["classes"][1:] + doc["classes"][:1]
    for row in doc["characters"]:
        row[:] = row[1:] + row[:1]
    with pytest.raises(TableShapeError):
        ingest_table(doc)


def test_steinberg_values_match_torus_membership():
    t = psl2_table(13)
    st = 3
    assert cyc_equal(t.value(st, 0), from_rational(13))
    assert cyc_equal(t.value(st, t.class_index("2a")), from_rational(1))
    assert cyc_equal(t.value(st, t.class_index("7a")), from_rational(-1))
    assert cyc_equal(t.value(st, t.class_index("13a")), from_rational(0))
