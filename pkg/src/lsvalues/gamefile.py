"""Reading and writing games and weight tables as JSON.

Game schema::

    {"n": 3, "values": {"1": 0.0, "2": 0.0, "3": 0.0, "1,2": 1.0, ...}}

Coalition keys are comma-separated, strictly increasing, 1-based player
indices.  All 2**n - 1 nonempty coalitions must appear exactly once; the
empty coalition is never written (its value is 0 by convention).  Diagonal
weight files use the same key scheme; full weight matrices are written as
an array of 2**n - 1 rows.
"""

import json

import numpy as np

from .errors import GameFormatError
from .games import MAX_PLAYERS, Game, coalition_label, coalition_size


def _reject_duplicate_keys(pairs):
    seen = set()
    out = {}
    for key, value in pairs:
        if key in seen:
            raise GameFormatError(f"duplicate key {key!r}")
        seen.add(key)
        out[key] = value
    return out


def _loads(text, what):
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"{what} is not valid JSON: {exc}") from None


def parse_coalition_key(key, n):
    """Bitmask for a coalition key like ``"1,3"``; raises GameFormatError."""
    if not isinstance(key, str) or key == "":
        raise GameFormatError("empty coalition key (the empty set is not stored)")
    mask = 0
    previous = 0
    for token in key.split(","):
        token = token.strip()
        if token == "0":
            raise GameFormatError(
                f"malformed coalition key {key!r}: player indices are 1-based"
            )
        # canonical decimal only: no signs, no leading zeros, ASCII digits
        if not (token.isascii() and token.isdigit() and not token.startswith("0")):
            raise GameFormatError(f"malformed coalition key {key!r}")
        i = int(token)
        if i <= previous:
            raise GameFormatError(
                f"malformed coalition key {key!r}: indices must be strictly increasing"
            )
        if i > n:
            raise GameFormatError(
                f"malformed coalition key {key!r}: player {i} out of range for n={n}"
            )
        mask |= 1 << (i - 1)
        previous = i
    return mask


def _check_number(value, context):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise GameFormatError(f"{context} must be a number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise GameFormatError(f"{context} must be finite, got {value!r}")
    return value


def _parse_header(data, what):
    if not isinstance(data, dict):
        raise GameFormatError(f"{what} must be a JSON object")
    extra = set(data) - {"n", "values"}
    if extra:
        raise GameFormatError(f"unknown keys in {what}: {sorted(extra)}")
    if "n" not in data or "values" not in data:
        raise GameFormatError(f'{what} must have keys "n" and "values"')
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise GameFormatError(f'"n" must be an integer, got {n!r}')
    if n < 1:
        raise GameFormatError(f'"n" must be at least 1, got {n}')
    if n > MAX_PLAYERS:
        raise GameFormatError(f'"n" = {n} exceeds the {MAX_PLAYERS}-player cap')
    if not isinstance(data["values"], dict):
        raise GameFormatError(f'"values" in {what} must be an object')
    return n, data["values"]


def _parse_table(text, what):
    n, values = _parse_header(_loads(text, what), what)
    table = np.empty((1 << n) - 1)
    seen = np.zeros((1 << n) - 1, dtype=bool)
    for key, raw in values.items():
        mask = parse_coalition_key(key, n)
        if seen[mask - 1]:
            raise GameFormatError(f"duplicate coalition {coalition_label(mask)}")
        table[mask - 1] = _check_number(raw, f"value of coalition {key!r}")
        seen[mask - 1] = True
    for mask in range(1, (1 << n)):
        if not seen[mask - 1]:
            raise GameFormatError(f"missing coalition {coalition_label(mask)}")
    return n, table


def parse_game(text):
    """Game from JSON text; raises GameFormatError on any schema violation."""
    n, table = _parse_table(text, "game file")
    return Game(n, table)


def _ordered_masks(n):
    return sorted(range(1, 1 << n), key=lambda m: (coalition_size(m), m))


def serialize_game(v):
    """JSON text in the game schema, coalitions ordered by size then mask."""
    return serialize_table(v.n, v.table)


def serialize_table(n, table):
    """JSON text for any coalition-indexed table (games, interaction coefficients)."""
    table = np.asarray(table, dtype=np.float64).ravel()
    values = {coalition_label(m): float(table[m - 1]) for m in _ordered_masks(n)}
    return json.dumps({"n": n, "values": values}, indent=2) + "\n"


def parse_diagonal_weights(text):
    """(n, per-coalition weight vector) from a diagonal weight file."""
    return _parse_table(text, "weight file")


def parse_weight_matrix(text):
    """(n, full symmetric weight matrix) from a matrix weight file."""
    data = _loads(text, "weight matrix file")
    if not isinstance(data, list) or not data:
        raise GameFormatError("weight matrix file must be a nonempty array of rows")
    size = len(data)
    n = (size + 1).bit_length() - 1
    if (1 << n) - 1 != size:
        raise GameFormatError(
            f"weight matrix must have 2**n - 1 rows, got {size}"
        )
    W = np.empty((size, size))
    for r, row in enumerate(data):
        if not isinstance(row, list) or len(row) != size:
            raise GameFormatError(f"weight matrix row {r} must have {size} entries")
        for c, raw in enumerate(row):
            W[r, c] = _check_number(raw, f"weight matrix entry [{r}][{c}]")
    return n, W
