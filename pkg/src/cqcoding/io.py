"""JSON file formats for matrices, channels and codes.

Matrix literal: nested arrays of ``[re, im]`` pairs, row-major. A vector
literal is a flat array of ``[re, im]`` pairs; bare real numbers are also
accepted on input.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import operators as ops
from .channel import CqChannel
from .coding import Code


class FormatError(ValueError):
    """Malformed channel, code or matrix literal."""


def _complex(entry) -> complex:
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry
    ):
        return complex(entry[0], entry[1])
    raise FormatError(f"expected [re, im] pair, got {entry!r}")


def parse_vector(literal) -> np.ndarray:
    if not isinstance(literal, list) or not literal:
        raise FormatError("vector literal must be a non-empty array")
    return np.array([_complex(e) for e in literal], dtype=complex)


def parse_matrix(literal) -> np.ndarray:
    if not isinstance(literal, list) or not literal or not all(isinstance(r, list) for r in literal):
        raise FormatError("matrix literal must be an array of rows")
    width = len(literal[0])
    if any(len(r) != width for r in literal):
        raise FormatError("matrix literal rows have unequal length")
    return np.array([[_complex(e) for e in row] for row in literal], dtype=complex)


def matrix_literal(matrix) -> list:
    m = np.asarray(matrix, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def channel_from_dict(record: dict) -> CqChannel:
    try:
        dim = int(record["dim"])
        inputs = record["inputs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"channel record needs 'dim' and 'inputs': {exc}") from exc
    labels, states = [], []
    for item in inputs:
        if "state" in item:
            state = parse_matrix(item["state"])
        elif "ket" in item:
            state = ops.ket_to_density(parse_vector(item["ket"]))
        else:
            raise FormatError(f"input {item.get('label')!r} needs 'state' or 'ket'")
        if state.shape != (dim, dim):
            raise FormatError(f"input {item.get('label')!r} has shape {state.shape}, expected dim {dim}")
        labels.append(str(item["label"]))
        states.append(state)
    try:
        return CqChannel(tuple(labels), tuple(states))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def channel_to_dict(channel: CqChannel) -> dict:
    return {
        "dim": channel.d,
        "inputs": [
            {"label": label, "state": matrix_literal(state)}
            for label, state in zip(channel.labels, channel.states)
        ],
    }


def load_channel(path) -> CqChannel:
    try:
        record = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read channel file {path}: {exc}") from exc
    return channel_from_dict(record)


def format_word(word, labels) -> str:
    return ",".join(labels[x] for x in word)


def parse_word(text: str, labels) -> tuple[int, ...]:
    index = {label: i for i, label in enumerate(labels)}
    try:
        return tuple(index[t] for t in text.split(",")) if text else ()
    except KeyError as exc:
        raise FormatError(f"unknown label {exc.args[0]!r} in word {text!r}") from exc


def code_to_dict(code: Code, channel: CqChannel, lam: float, channel_ref: str = "") -> dict:
    return {
        "n": code.n,
        "channel_ref": channel_ref,
        "codewords": [format_word(w, channel.labels) for w in code.codewords],
        "decoder": [matrix_literal(D) for D in code.decoder],
        "lambda": lam,
    }


def code_from_dict(record: dict, channel: CqChannel) -> tuple[Code, float]:
    """Returns the code and its declared error target ``lambda``.

    Raises:
        FormatError: malformed record.
        coding.InvalidCodeError: decoder is not a sub-POVM.
    """
    try:
        n = int(record["n"])
        words = [parse_word(w, channel.labels) for w in record["codewords"]]
        decoder = [parse_matrix(D) for D in record["decoder"]]
        lam = float(record["lambda"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"code record needs n, codewords, decoder, lambda: {exc}") from exc
    return Code(n, channel.d**n, words, decoder), lam


def save_json(path, record: dict):
    Path(path).write_text(json.dumps(record, indent=1) + "\n")


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
