"""Render a generalized Riemann scheme as a TeX array."""

import logging
from typing import List, Tuple

from .kz import GeneralizedRiemannScheme

logger = logging.getLogger(__name__)


def format_value(value: complex, digits: int = 6) -> str:
    """Real values print plainly; complex values as a+bi."""
    re = 0.0 if abs(value.real) < 10 ** -(digits + 3) else value.real
    im = 0.0 if abs(value.imag) < 10 ** -(digits + 3) else value.imag
    if im == 0:
        return f"{re:.{digits}g}"
    if re == 0:
        return f"{im:.{digits}g}i"
    sign = "+" if im > 0 else "-"
    return f"{re:.{digits}g}{sign}{abs(im):.{digits}g}i"


def format_entry(value: complex, multiplicity: int, digits: int = 6) -> str:
    """[v]_{k}; a simple eigenvalue is written without brackets."""
    text = format_value(value, digits)
    if multiplicity == 1:
        return text
    return f"[{text}]_{{{multiplicity}}}"


def _block(columns: List[Tuple[str, List[str]]], opening: str, closing: str) -> str:
    height = max(len(entries) for _, entries in columns)
    lines = [" & ".join(f"A_{{{key}}}" for key, _ in columns) + r"\\"]
    for row in range(height):
        cells = [entries[row] if row < len(entries) else "" for _, entries in columns]
        lines.append(" & ".join(cells) + r"\\")
    spec = "c" * len(columns)
    body = "\n".join(lines)
    return f"\\left{opening}\\begin{{array}}{{{spec}}}\n{body}\n\\end{{array}}\\right{closing}"


def emit_tex(scheme: GeneralizedRiemannScheme, div: int = 5, digits: int = 6) -> str:
    """One column per residue pair, split into row blocks of div columns."""
    if div < 1:
        raise ValueError(f"div must be positive, got {div}")
    columns = [
        (key, [format_entry(v, m, digits) for v, m in scheme.pairs[key]])
        for key in sorted(scheme.pairs)
    ]
    if not columns:
        return ""
    chunks = [columns[k : k + div] for k in range(0, len(columns), div)]
    parts = []
    for index, chunk in enumerate(chunks):
        opening = r"\{" if index == 0 else "."
        closing = r"\}" if index == len(chunks) - 1 else "."
        parts.append(_block(chunk, opening, closing))
    logger.debug(f"emit_tex: {len(columns)} columns in {len(chunks)} blocks")
    return "\n\\\\\n".join(parts) + "\n"
