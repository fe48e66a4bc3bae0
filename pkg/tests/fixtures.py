"""Small exactly-known character tables used across the test modules.

Each fixture is built as an ingest document so the loader path is the
one exercised everywhere.  The tables are classical: the symmetric
group on three letters, the alternating group on four letters, and the
Frobenius group of order twenty.
"""

from fractions import Fraction

from zgunits.grouptab import ingest_table


def payload(*terms):
    """Cyclotomic payload from (conductor, exponent, value) terms.

    A bare integer or Fraction stands for a rational payload.
    """
    if len(terms) == 1 and isinstance(terms[0], (int, Fraction)):
        value = Fraction(terms[0])
        coeffs = [["0", str(value.numerator), str(value.denominator)]]
        return {"conductor": "1", "coefficients": coeffs if value else []}
    conductor = terms[0][0]
    coeffs = []
    for cond, exponent, value in terms:
        if cond != conductor:
            raise ValueError("mixed conductors in one payload")
        value = Fraction(value)
        coeffs.append([str(exponent), str(value.numerator),
                       str(value.denominator)])
    return {"conductor": str(conductor), "coefficients": coeffs}


def s3_document():
    return {
        "format": 1,
        "group_order": "6",
        "descriptor": "S3",
        "conductor": "1",
        "classes": [
            {"label": "1a", "element_order": "1", "class_size": "1",
             "power_maps": {"2": "1a", "3": "1a"}},
            {"label": "2a", "element_order": "2", "class_size": "3",
             "power_maps": {"2": "1a", "3": "2a"}},
            {"label": "3a", "element_order": "3", "class_size": "2",
             "power_maps": {"2": "3a", "3": "1a"}},
        ],
        "characters": [
            [payload(1), payload(1), payload(1)],
            [payload(1), payload(-1), payload(1)],
            [payload(2), payload(0), payload(-1)],
        ],
    }


def a4_document():
    w = lambda k: payload((3, k, 1))
    w2 = lambda j, k: payload((3, j, 1), (3, k, 1))
    return {
        "format": 1,
        "group_order": "12",
        "descriptor": "A4",
        "conductor": "3",
        "classes": [
            {"label": "1a", "element_order": "1", "class_size": "1",
             "power_maps": {"2": "1a", "3": "1a"}},
            {"label": "2a", "element_order": "2", "class_size": "3",
             "power_maps": {"2": "1a", "3": "2a"}},
            {"label": "3a", "element_order": "3", "class_size": "4",
             "power_maps": {"2": "3b", "3": "1a"}},
            {"label": "3b", "element_order": "3", "class_size": "4",
             "power_maps": {"2": "3a", "3": "1a"}},
        ],
        "characters": [
            [payload(1), payload(1), payload(1), payload(1)],
            [payload(1), payload(1), w(1), w(2)],
            [payload(1), payload(1), w(2), w(1)],
            [payload(3), payload(-1), payload(0), payload(0)],
        ],
    }


def f20_document():
    i = lambda k: payload((4, k, 1))
    return {
        "format": 1,
        "group_order": "20",
        "descriptor": "F20",
        "conductor": "4",
        "classes": [
            {"label": "1a", "element_order": "1", "class_size": "1",
             "power_maps": {"2": "1a", "5": "1a"}},
            {"label": "2a", "element_order": "2", "class_size": "5",
             "power_maps": {"2": "1a", "5": "2a"}},
            {"label": "4a", "element_order": "4", "class_size": "5",
             "power_maps": {"2": "2a", "5": "4a"}},
            {"label": "4b", "element_order": "4", "class_size": "5",
             "power_maps": {"2": "2a", "5": "4b"}},
            {"label": "5a", "element_order": "5", "class_size": "4",
             "power_maps": {"2": "5a", "5": "1a"}},
        ],
        "characters": [
            [payload(1), payload(1), payload(1), payload(1), payload(1)],
            [payload(1), payload(-1), i(1), i(3), payload(1)],
            [payload(1), payload(1), payload(-1), payload(-1), payload(1)],
            [payload(1), payload(-1), i(3), i(1), payload(1)],
            [payload(4), payload(0), payload(0), payload(0), payload(-1)],
        ],
    }


def s3_table():
    return ingest_table(s3_document())


def a4_table():
    return ingest_table(a4_document())


def f20_table():
    return ingest_table(f20_document())
