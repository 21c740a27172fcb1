"""JSON (de)serialization shared by the command line interface.

Lattice files:      {"gram": [[int]], "name": "..."}
Sublattice files:   {"basis": [[int]]}  (columns in ambient coordinates)
Rationals are "num/den" strings; LogLinear values render both symbolically
and numerically at the requested precision.  Coset selectors are indices
into the documented coset order (zero coset first, then lexicographic on
the elementary-divisor coordinates).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .imq import LogLinear
from .lattice import QuadLattice


def frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def parse_frac(s) -> Fraction:
    return Fraction(str(s))


def load_lattice(path) -> QuadLattice:
    with open(path) as fh:
        blob = json.load(fh)
    if "gram" not in blob:
        raise ValueError(f"{path}: missing 'gram'")
    return QuadLattice(blob["gram"], name=blob.get("name"))


def load_sublattice_basis(path):
    with open(path) as fh:
        blob = json.load(fh)
    if "basis" not in blob:
        raise ValueError(f"{path}: missing 'basis'")
    return blob["basis"]


def loglinear_json(value: LogLinear, field=None, dps=30):
    blob = value.to_json()
    try:
        blob["value"] = float(value.evaluate(field, dps=dps))
    except ValueError:
        blob["value"] = None
    return blob


def coset_label(coset) -> str:
    return ",".join(str(c) for c in coset.visible_coords())


def qexp_json(form):
    """Schema for a vector-valued q-expansion: exponents as "num/den",
    coefficient vectors in the group's coset order."""
    group = form.group
    return {
        "weight": frac_str(form.weight),
        "variant": form.variant,
        "elementary_divisors": list(group.elementary_divisors),
        "coset_order": [list(c.visible_coords()) for c in group.elements()],
        "cutoff": frac_str(form.cutoff),
        "coefficients": [
            {"exponent": frac_str(m), "vector": [str(v) for v in vec]}
            for m, vec in sorted(form.coeffs.items())
        ],
    }


def parse_principal_part(text, group):
    """Parse {"m,cosetindex": coeff} into a PrincipalPart; "const" keys the
    constant coefficient c+(0,0)."""
    from .qseries import PrincipalPart

    blob = json.loads(text) if isinstance(text, str) else text
    entries = {}
    constant = Fraction(0)
    for key, coeff in blob.items():
        if key == "const":
            constant = parse_frac(coeff)
            continue
        m_str, idx_str = key.split(",")
        m = parse_frac(m_str)
        mu = group.coset_by_index(int(idx_str))
        entries[(m, mu.coords)] = entries.get((m, mu.coords), Fraction(0)) + parse_frac(coeff)
    return PrincipalPart(group, entries, constant=constant)
