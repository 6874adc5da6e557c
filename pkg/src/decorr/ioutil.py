"""FASTA input, alphabet configuration, CSV/JSON/SVG output."""

from __future__ import annotations

import csv
import io
import json
import os
import string
import warnings
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import IoFailure, MalformedConfig, MalformedFasta, UnknownSymbol
from .seqcore import MAX_ALPHABET, Sequence

#: Default nucleotide encoding.
DNA_TABLE = {"C": 1, "A": 2, "T": 3, "G": 4}

_GENERIC_TOKENS = string.ascii_uppercase + string.ascii_lowercase + string.digits


@dataclass(frozen=True)
class FastaRecord:
    header: str
    residues: str
    codes: np.ndarray

    def sequence(self) -> Sequence:
        return Sequence(self.codes)


def _open(path, mode):
    try:
        return open(path, mode, newline="" if "w" in mode else None, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot open {path}: {exc.strerror}") from exc


def parse_fasta(stream, symbol_table=None, on_unknown="error"):
    """Parse FASTA text into records encoded through ``symbol_table``.

    Tokens are single characters, matched case-insensitively; whitespace
    and CR/LF line ends are ignored. Unknown tokens raise
    :class:`UnknownSymbol` (1-based position within the record) unless
    ``on_unknown="drop"``, which removes them and emits a warning.
    """
    if on_unknown not in ("error", "drop"):
        raise ValueError("on_unknown must be 'error' or 'drop'")
    table = {k.upper(): int(v) for k, v in (symbol_table or DNA_TABLE).items()}
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    records = []
    header, chunks = None, []

    def finish():
        residues = "".join(chunks).upper()
        if not residues:
            raise MalformedFasta(f"record {header!r} has no residues")
        codes, kept = [], []
        for i, tok in enumerate(residues, start=1):
            code = table.get(tok)
            if code is None:
                if on_unknown == "error":
                    raise UnknownSymbol(tok, i, header)
                continue
            codes.append(code)
            kept.append(tok)
        dropped = len(residues) - len(kept)
        if dropped:
            warnings.warn(f"dropped {dropped} unknown symbol(s) from record {header!r}",
                          stacklevel=3)
        if not codes:
            raise MalformedFasta(f"record {header!r} is empty after dropping unknown symbols")
        records.append(FastaRecord(header, "".join(kept), np.array(codes, dtype=np.int64)))

    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if header is not None:
                finish()
            header = line[1:].strip()
            if not header:
                raise MalformedFasta(f"line {lineno}: empty header")
            chunks = []
        elif header is None:
            raise MalformedFasta(f"line {lineno}: sequence data before the first header")
        else:
            chunks.append("".join(line.split()))
    if header is None:
        raise MalformedFasta("no FASTA records found")
    finish()
    return records


def read_fasta(path, symbol_table=None, on_unknown="error"):
    with _open(path, "r") as fh:
        return parse_fasta(fh, symbol_table, on_unknown)


def token_table(M, symbol_table=None):
    """Token for each code ``1..M``: inverse of ``symbol_table`` or a default."""
    if symbol_table is not None:
        inverse = {int(v): k for k, v in symbol_table.items()}
        missing = [c for c in range(1, M + 1) if c not in inverse]
        if missing:
            raise MalformedConfig(f"symbol table has no token for codes {missing}")
        return {c: inverse[c] for c in range(1, M + 1)}
    if M <= len(DNA_TABLE):
        return {v: k for k, v in DNA_TABLE.items() if v <= M}
    if M <= len(_GENERIC_TOKENS):
        return {c: _GENERIC_TOKENS[c - 1] for c in range(1, M + 1)}
    raise MalformedConfig(f"no default tokens for M={M}; supply an alphabet config")


def default_table(M):
    """Forward table matching :func:`token_table` for ``M`` symbols."""
    return {tok: code for code, tok in token_table(M).items()}


def write_fasta(path, records, symbol_table=None, M=None, width=60):
    """Write ``(header, codes)`` pairs as FASTA."""
    records = list(records)
    if M is None:
        M = max(int(np.max(codes)) for _, codes in records)
    tokens = token_table(M, symbol_table)
    with _open(path, "w") as fh:
        for header, codes in records:
            text = "".join(tokens[int(c)] for c in np.asarray(codes))
            fh.write(f">{header}\n")
            for i in range(0, len(text), width):
                fh.write(text[i:i + width] + "\n")


def parse_alphabet_config(stream):
    """Read ``TOKEN=CODE`` lines (``#`` starts a comment) into a dict."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    table = {}
    for lineno, line in enumerate(stream, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        token, sep, code = (part.strip() for part in line.partition("="))
        if not sep or len(token) != 1 or token.isspace():
            raise MalformedConfig(f"line {lineno}: expected a single-character TOKEN=CODE")
        try:
            value = int(code)
        except ValueError:
            raise MalformedConfig(f"line {lineno}: code {code!r} is not an integer") from None
        if token.upper() in table:
            raise MalformedConfig(f"line {lineno}: token {token!r} defined twice")
        table[token.upper()] = value
    if not table:
        raise MalformedConfig("alphabet config defines no tokens")
    if len(set(table.values())) > MAX_ALPHABET:
        raise MalformedConfig(f"more than {MAX_ALPHABET} distinct codes")
    return table


def read_alphabet_config(path):
    with _open(path, "r") as fh:
        return parse_alphabet_config(fh)


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v.is_integer() and abs(v) < 2 ** 53:
        return str(int(v))
    return "%.17g" % v


def write_signal_csv(signal, path, smoothed=None):
    """One row per displacement: ``displacement,value[,smoothed]``."""
    values = np.asarray(signal.values)
    rows = [signal.displacements, values]
    header = ["displacement", "value"]
    if smoothed is not None:
        rows.append(np.asarray(getattr(smoothed, "values", smoothed)))
        header.append("smoothed")
    with _open(path, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*rows):
            writer.writerow([_fmt(x) for x in row])


def read_signal_csv(path):
    """Inverse of :func:`write_signal_csv`: dict of column name to array."""
    with _open(path, "r") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = [[] for _ in header]
        for row in reader:
            for col, cell in zip(cols, row):
                col.append(cell)

    def convert(cells):
        try:
            return np.array([int(c) for c in cells], dtype=np.int64)
        except ValueError:
            return np.array([float(c) for c in cells], dtype=np.float64)

    return {name: convert(col) for name, col in zip(header, cols)}


def dump_report(report, include_timing=False) -> str:
    doc = report.to_dict(include_timing) if hasattr(report, "to_dict") else report
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_report(report, path, include_timing=False):
    """Key-sorted JSON. Timing is left out unless asked for, so repeated runs
    give byte-identical files."""
    with _open(path, "w") as fh:
        fh.write(dump_report(report, include_timing))


def write_rows_csv(path, header, rows):
    with _open(path, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) if isinstance(x, (int, float, np.number)) else x
                             for x in row])


def render_plot(signals, path, labels=None, title=None, width=800, panel_height=180):
    """Write an SVG with one stacked panel (one polyline) per signal.

    ``signals`` items are :class:`CoincidenceSignal`-like objects or
    ``(displacements, values)`` pairs. Each panel marks ``p = 0`` with a
    dashed vertical line.
    """
    if hasattr(signals, "values") or isinstance(signals, tuple):
        signals = [signals]
    series = []
    for sig in signals:
        if isinstance(sig, tuple):
            x, y = sig
        else:
            x, y = sig.displacements, sig.values
        series.append((np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)))
    labels = list(labels) if labels is not None else [f"signal {i + 1}" for i in range(len(series))]

    margin_l, margin_r, margin_t, gap = 60, 20, 30 if title else 10, 30
    plot_w = width - margin_l - margin_r
    height = margin_t + len(series) * (panel_height + gap)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14">{escape(title)}</text>')
    for k, ((x, y), label) in enumerate(zip(series, labels)):
        top = margin_t + k * (panel_height + gap)
        inner = panel_height - 20
        x0, x1 = x.min(), x.max()
        y0, y1 = min(0.0, y.min()), y.max()
        sx = plot_w / (x1 - x0) if x1 > x0 else 0.0
        sy = inner / (y1 - y0) if y1 > y0 else 0.0

        def px(v):
            return margin_l + (v - x0) * sx

        def py(v):
            return top + 10 + inner - (v - y0) * sy

        out.append(f'<g id="panel{k}">')
        out.append(f'<rect x="{margin_l}" y="{top}" width="{plot_w}" height="{panel_height}" '
                   'fill="none" stroke="#999"/>')
        out.append(f'<text x="{margin_l + 4}" y="{top + 14}" font-family="sans-serif" '
                   f'font-size="11">{escape(str(label))}</text>')
        out.append(f'<text x="{margin_l - 4}" y="{py(y1) + 4:.1f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{_fmt(y1)}</text>')
        if x0 <= 0 <= x1:
            out.append(f'<line class="zero-axis" x1="{px(0):.2f}" y1="{top}" x2="{px(0):.2f}" '
                       f'y2="{top + panel_height}" stroke="red" stroke-dasharray="4 3"/>')
        points = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="black" stroke-width="0.8" points="{points}"/>')
        out.append("</g>")
    out.append("</svg>")
    with _open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
