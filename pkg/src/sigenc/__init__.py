"""Dynamic compressed text index on signature encodings."""

from .editor import EditDelta, delete_range, gc, insert_str, merge_pow
from .encoder import (Encoding, PowSeq, audit, encode_string, extract, lce_backward, lce_forward,
                      lcp_of, lcs_of, uniq_pow)
from .grammar_store import Char, GrammarStore, Pair, RunOf
from .index import Index, build_index, search
from .lcp_parse import DEFAULT_PARAMS, ParserParams
from .lz77 import Literal, Ref, factorize, from_factors
from .slp import Slp, export_slp, import_slp, parse_slp, serialize_slp

__version__ = "0.1.0"
