"""Command line front end.

Texts are raw bytes; each byte is one alphabet symbol.  Exit status is 0 on
success, 1 on a usage error and 2 when an input is malformed or a position
is out of range.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import List, Optional

from . import editor, encoder, index, lz77, slp
from .grammar_store import Char, GrammarStore, Pair, RunOf, StoreError
from .lcp_parse import DEFAULT_PARAMS

HEADER = "SIGENC 1"


class DataError(Exception):
    pass


class UsageError(Exception):
    pass


# -- encoding files ------------------------------------------------------------


def dump_encoding(enc: encoder.Encoding) -> str:
    store = enc.store
    out = [HEADER, f"N {enc.text_len}", f"S {enc.start if enc.start is not None else '-'}"]
    for e in store.signatures():
        x = store.assgn(e)
        if isinstance(x, Char):
            out.append(f"{e} C {x.code}")
        elif isinstance(x, Pair):
            out.append(f"{e} P {x.left} {x.right}")
        else:
            out.append(f"{e} R {x.base} {x.exp}")
    return "\n".join(out) + "\n"


def load_encoding(text: str) -> encoder.Encoding:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 3 or lines[0] != HEADER:
        raise DataError(f"not an encoding file (expected '{HEADER}' header)")
    try:
        if not lines[1].startswith("N "):
            raise ValueError
        n = int(lines[1][2:])
        if not lines[2].startswith("S "):
            raise ValueError
        start = None if lines[2][2:] == "-" else int(lines[2][2:])
    except ValueError:
        raise DataError("bad N or S line") from None
    store = GrammarStore()
    last = 0
    for no, line in enumerate(lines[3:], 4):
        parts = line.split(" ")
        try:
            e = int(parts[0])
            tag = parts[1]
            args = [int(p) for p in parts[2:]]
            if tag == "C" and len(args) == 1:
                x = Char(args[0])
            elif tag == "P" and len(args) == 2:
                x = Pair(*args)
            elif tag == "R" and len(args) == 2:
                x = RunOf(*args)
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise DataError(f"line {no}: cannot parse {line!r}") from None
        if e <= last:
            raise DataError(f"line {no}: ids must ascend")
        last = e
        try:
            store.intern_with_id(e, x)
        except (StoreError, ValueError) as exc:
            raise DataError(f"line {no}: {exc}") from None
    enc = encoder.Encoding(store, DEFAULT_PARAMS)
    if start is None:
        if n != 0 or len(store):
            raise DataError("empty encoding must have N 0 and no signatures")
        return enc
    if start not in store:
        raise DataError(f"start signature {start} is not defined")
    enc.set_start(start)
    if enc.text_len != n:
        raise DataError(f"N is {n} but the start derives {enc.text_len} characters")
    # everything in the file must hang off the start
    for e in store.signatures():
        if store.refcount(e) == 0:
            raise DataError(f"signature {e} is not reachable from the start")
    try:
        store.audit()
        encoder.audit(enc)
    except StoreError as exc:
        raise DataError(f"encoding fails its audit: {exc}") from None
    return enc


# -- helpers -------------------------------------------------------------------


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _write_bytes(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def _read_text(path: str) -> str:
    return _read_bytes(path).decode("latin-1")


def _load(path: str) -> encoder.Encoding:
    return load_encoding(_read_text(path))


def _save(path: str, enc: encoder.Encoding) -> None:
    _write_bytes(path, dump_encoding(enc).encode("ascii"))


def _out(data: bytes, path: Optional[str] = None) -> None:
    if path:
        _write_bytes(path, data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _arg_text(s: str) -> str:
    # command line strings map back to the bytes the shell passed in
    return os.fsencode(s).decode("latin-1")


# -- subcommands ---------------------------------------------------------------


def cmd_build(a) -> None:
    enc = encoder.encode_string(_read_text(a.input))
    _save(a.output, enc)


def cmd_extract(a) -> None:
    enc = _load(a.enc)
    n = enc.text_len
    length = a.len if a.len is not None else n - a.pos + 1
    if length == 0 and 1 <= a.pos <= n + 1:
        _out(b"")
        return
    if enc.start is None:
        raise encoder.RangeError("the text is empty")
    _out(encoder.extract(enc, enc.start, a.pos, length).encode("latin-1"))


def cmd_search(a) -> None:
    enc = _load(a.enc)
    p = _arg_text(a.pattern)
    if not p:
        raise UsageError("pattern must not be empty")
    idx = index.build_index(enc)
    occ = index.search(enc, idx, p)
    _out((" ".join(map(str, occ)) + "\n").encode())


def cmd_lce(a) -> None:
    enc = _load(a.enc)
    if enc.start is None:
        raise encoder.RangeError("the text is empty")
    s = enc.start
    if a.backward:
        n = encoder.lce_backward(enc, s, s, a.i, a.j)
    else:
        if a.i > enc.text_len or a.j > enc.text_len:
            raise encoder.RangeError("position outside the text")
        n = encoder.lce_forward(enc, s, s, a.i, a.j)
    _out(f"{n}\n".encode())


def cmd_insert(a) -> None:
    enc = _load(a.enc)
    if (a.text is None) == (a.file is None):
        raise UsageError("give exactly one of --text and --file")
    y = _arg_text(a.text) if a.text is not None else _read_text(a.file)
    if not y:
        raise UsageError("inserted text must not be empty")
    d = editor.insert_str(enc, a.pos, y)
    _save(a.output or a.enc, enc)
    _out(f"added {len(d.added)} removed {len(d.removed)}\n".encode())


def cmd_delete(a) -> None:
    enc = _load(a.enc)
    d = editor.delete_range(enc, a.pos, a.len)
    _save(a.output or a.enc, enc)
    _out(f"added {len(d.added)} removed {len(d.removed)}\n".encode())


def cmd_lz77(a) -> None:
    if (a.input is None) == (a.enc is None):
        raise UsageError("give exactly one of -i and -e")
    src = _read_text(a.input) if a.input is not None else _load(a.enc)
    _out(lz77.format_factors(lz77.factorize(src)), a.output)


def cmd_from_lz77(a) -> None:
    factors = lz77.parse_factors(_read_bytes(a.input))
    enc = lz77.from_factors(factors)
    _save(a.output, enc)


def cmd_import_slp(a) -> None:
    program = slp.parse_slp(_read_text(a.input))
    enc, mapping = slp.import_slp(program)
    slp.release_mapping(enc, mapping)
    _save(a.output, enc)


def cmd_export_slp(a) -> None:
    enc = _load(a.enc)
    _out(slp.serialize_slp(slp.export_slp(enc)).encode("ascii"), a.output)


def cmd_stats(a) -> None:
    enc = _load(a.enc)
    n = enc.text_len
    lines = [f"N {n}", f"w {len(enc.store)}", f"height {enc.height}"]
    if a.with_z:
        z = len(lz77.factorize(enc)) if n else 0
        lines.append(f"z {z}")
        if z:
            ratio = len(enc.store) / (z * (math.log2(n) + 1) * 5)
            lines.append(f"ratio {ratio:.6f}")
        else:
            lines.append("ratio -")
    _out(("\n".join(lines) + "\n").encode())


# -- argument parsing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sigenc", description="Dynamic compressed text index on signature encodings.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("build", help="encode a text file")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("extract", help="print a substring")
    s.add_argument("-e", "--enc", required=True)
    s.add_argument("--pos", type=int, default=1)
    s.add_argument("--len", type=int)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("search", help="list occurrences of a pattern")
    s.add_argument("-e", "--enc", required=True)
    s.add_argument("-p", "--pattern", required=True)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("lce", help="longest common extension of two positions")
    s.add_argument("-e", "--enc", required=True)
    s.add_argument("--i", type=int, required=True)
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--backward", action="store_true")
    s.set_defaults(func=cmd_lce)

    s = sub.add_parser("insert", help="insert a string before a position")
    s.add_argument("-e", "--enc", required=True)
    s.add_argument("--pos", type=int, required=True)
    s.add_argument("--text")
    s.add_argument("--file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_insert)

    s = sub.add_parser("delete", help="delete a substring")
    s.add_argument("-e", "--enc", required=True)
    s.add_argument("--pos", type=int, required=True)
    s.add_argument("--len", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_delete)

    s = sub.add_parser("lz77", help="LZ77 factors of a text or an encoding")
    s.add_argument("-i", "--input")
    s.add_argument("-e", "--enc")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_lz77)

    s = sub.add_parser("from-lz77", help="encode from LZ77 factors")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_from_lz77)

    s = sub.add_parser("import-slp", help="encode the text of an SLP")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_import_slp)

    s = sub.add_parser("export-slp", help="write the encoding as an SLP")
    s.add_argument("-e", "--enc", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_export_slp)

    s = sub.add_parser("stats", help="size figures")
    s.add_argument("-e", "--enc", required=True)
    s.add_argument("--with-z", action="store_true")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        a.func(a)
    except UsageError as exc:
        print(f"sigenc: error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"sigenc: {exc}", file=sys.stderr)
        return 2
    except encoder.RangeError as exc:
        print(f"sigenc: out of range: {exc}", file=sys.stderr)
        return 2
    except (lz77.FactorFormatError, slp.SlpFormatError) as exc:
        print(f"sigenc: bad input: {exc}", file=sys.stderr)
        return 2
    except UnicodeEncodeError:
        print("sigenc: text holds characters outside one byte", file=sys.stderr)
        return 2
    return 0


def run(argv: List[str]) -> int:
    """Like ``main`` but turns argparse exits into return codes."""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
