"""Named example states with known optimal overlaps.

Terms are written as wedge monomials in the order they are usually quoted;
``FermionState`` sorts each monomial and applies the permutation sign.
"""

import math
import re

from .errors import UnknownName
from .fock import FermionState, normalize

S23, S13 = math.sqrt(2 / 3), math.sqrt(1 / 3)


def ghz(a=S23, b=S13, n=3):
    """a|1..N> + b|N+1..2N> on 2N orbitals."""
    n = int(n)
    return normalize(FermionState(2 * n, n, {
        tuple(range(1, n + 1)): a,
        tuple(range(n + 1, 2 * n + 1)): b,
    }))


def example2(a=S23, b=S13, n=3):
    """a|1 2..N> + b|1 N+1..2N-1>: orbital 1 is always occupied."""
    n = int(n)
    return normalize(FermionState(2 * n - 1, n, {
        tuple(range(1, n + 1)): a,
        (1,) + tuple(range(n + 1, 2 * n)): b,
    }))


def example3(a=0.8, b=0.5, c=math.sqrt(0.11)):
    return normalize(FermionState(7, 3, {(1, 2, 3): a, (3, 4, 5): b, (5, 6, 7): c}))


def example3b(a=0.8, b=0.5, c=math.sqrt(0.11)):
    """Four-fermion chain a|1234> + b|4567> + c|7891> on nine orbitals."""
    return normalize(FermionState(9, 4, {(1, 2, 3, 4): a, (4, 5, 6, 7): b, (7, 8, 9, 1): c}))


def example4(a=0.6, b=0.48, c=0.64):
    """Two fermions in three orbitals, a|12> + b|23> + c|31>."""
    return normalize(FermionState(3, 2, {(1, 2): a, (2, 3): b, (3, 1): c}))


def eq36():
    """(|124> + |153> + |623>)/sqrt(3); optimal overlap 4/9."""
    return normalize(FermionState(6, 3, {(1, 2, 4): 1, (1, 5, 3): 1, (6, 2, 3): 1}))


def fourterm():
    """(|123> + |154> + |653> + |624>)/2; optimal overlap 1/2."""
    return normalize(FermionState(6, 3, {(1, 2, 3): 1, (1, 5, 4): 1, (6, 5, 3): 1, (6, 2, 4): 1}))


def cyclic():
    """Sum of the six cyclically consecutive triples over sqrt(6); optimal overlap 3/4."""
    terms = {tuple((i + k) % 6 + 1 for k in range(3)): 1 for i in range(6)}
    return normalize(FermionState(6, 3, terms))


BUILTINS = {
    "ghz": ghz,
    "example2": example2,
    "example3": example3,
    "example3b": example3b,
    "example4": example4,
    "eq36": eq36,
    "fourterm": fourterm,
    "cyclic": cyclic,
}

_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$")


def _number(text):
    text = text.strip()
    m = re.fullmatch(r"sqrt\((.+)\)", text)
    if m:
        return math.sqrt(_number(m.group(1)))
    if "/" in text:
        num, den = text.split("/", 1)
        return _number(num) / _number(den)
    return float(text)


def builtin_state(name, *args, **kwargs):
    """Build a catalog state, e.g. ``builtin_state("ghz", 0.8, 0.6, 4)``.

    ``name`` may also carry its arguments, as in ``"ghz(sqrt(2/3), sqrt(1/3), 3)"``.
    """
    m = _CALL.match(str(name))
    if not m:
        raise UnknownName(f"cannot parse state name {name!r}")
    key, argtext = m.group(1).lower(), m.group(2)
    if key not in BUILTINS:
        raise UnknownName(f"unknown builtin state {key!r}; choose from {', '.join(BUILTINS)}")
    if argtext and argtext.strip():
        try:
            args = tuple(_number(x) for x in argtext.split(",")) + tuple(args)
        except ValueError:
            raise UnknownName(f"bad arguments in {name!r}") from None
    return BUILTINS[key](*args, **kwargs)
