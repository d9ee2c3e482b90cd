"""Reader and writer for the ``.fst`` plain-text state format.

Layout::

    # comment lines and trailing comments start with '#'
    d N
    j1 j2 ... jN re im
    ...

Indices are 1-based. Index sets may be given unsorted (the amplitude picks
up the permutation sign); the same set may not appear twice.
"""

from pathlib import Path

from .errors import BadShape, ParseError
from .fock import FermionState, canonical_order, normalize


def loads(text, normalize_on_load=False):
    header = None
    amps = {}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 2:
                raise ParseError("header must be 'd N'", lineno)
            try:
                d, n = int(fields[0]), int(fields[1])
            except ValueError:
                raise ParseError(f"header fields are not integers: {line!r}", lineno) from None
            if d < 1 or not 0 <= n <= d:
                raise ParseError(f"invalid shape d={d}, N={n}", lineno)
            header = (d, n)
            continue
        d, n = header
        if len(fields) != n + 2:
            raise ParseError(f"expected {n} indices and 2 numbers, got {len(fields)} fields", lineno)
        try:
            idx = tuple(int(x) for x in fields[:n])
        except ValueError:
            raise ParseError(f"non-integer orbital index in {line!r}", lineno) from None
        try:
            re, im = float(fields[n]), float(fields[n + 1])
        except ValueError:
            raise ParseError(f"non-numeric amplitude in {line!r}", lineno) from None
        if any(k < 1 or k > d for k in idx):
            raise ParseError(f"orbital index out of range 1..{d}", lineno)
        try:
            key, sign = canonical_order(idx)
        except BadShape as exc:
            raise ParseError(str(exc), lineno) from None
        if key in seen:
            raise ParseError(f"index set {key} already given on line {seen[key]}", lineno)
        seen[key] = lineno
        amps[key] = sign * complex(re, im)
    if header is None:
        raise ParseError("missing 'd N' header")
    state = FermionState(header[0], header[1], amps)
    return normalize(state) if normalize_on_load else state


def load(path, normalize_on_load=False):
    return loads(Path(path).read_text(encoding="utf-8"), normalize_on_load=normalize_on_load)


def dumps(state, comment=None):
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in str(comment).splitlines())
    lines.append(f"{state.d} {state.n}")
    for key, value in state.amplitudes.items():
        lines.append(" ".join(map(str, key)) + (" " if key else "") + f"{value.real!r} {value.imag!r}")
    return "\n".join(lines) + "\n"


def dump(state, path, comment=None):
    Path(path).write_text(dumps(state, comment), encoding="utf-8")
