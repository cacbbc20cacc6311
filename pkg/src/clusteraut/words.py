"""Words over named generators.

A word is a tuple of letters ``(name, +1)`` or ``(name, -1)``.  Words are
read as compositions from right to left when evaluated, so ``a f`` means
``a o f``.

Text syntax: whitespace-separated tokens ``name``, ``name^-1`` or
``name^k``; parenthesised groups with an optional power such as
``(a f)^5``; ``id`` for the empty word; a relation is ``lhs = rhs``.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .errors import WordSyntaxError

Letter = tuple[str, int]
Word = tuple[Letter, ...]

_TOKEN = re.compile(r"\s*(?:(\()|(\))(?:\^(-?\d+))?|([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?)")


def inverse_word(word: Sequence[Letter]) -> Word:
    return tuple((name, -e) for name, e in reversed(word))


def free_reduce(word: Iterable[Letter], involutions: frozenset[str] = frozenset()) -> Word:
    """Cancel x x^-1 pairs; names in ``involutions`` also cancel x x and use exponent +1."""
    out: list[Letter] = []
    for name, e in word:
        if name in involutions:
            e = 1
        if out and out[-1][0] == name and (out[-1][1] == -e or name in involutions):
            out.pop()
        else:
            out.append((name, e))
    return tuple(out)


def power_word(word: Sequence[Letter], k: int) -> Word:
    base = tuple(word) if k >= 0 else inverse_word(word)
    return base * abs(k)


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "id", "1", "e"):
        return ()
    stack: list[list[Letter]] = [[]]
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise WordSyntaxError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise WordSyntaxError(f"unbalanced ')' in {text!r}")
            group = stack.pop()
            stack[-1].extend(power_word(group, int(m.group(3) or 1)))
        else:
            name = m.group(4)
            if name == "id":
                continue
            stack[-1].extend(power_word(((name, 1),), int(m.group(5) or 1)))
    if len(stack) != 1:
        raise WordSyntaxError(f"unbalanced '(' in {text!r}")
    return tuple(stack[0])


def parse_relation(text: str) -> tuple[Word, Word]:
    parts = text.split("=")
    if len(parts) > 2:
        raise WordSyntaxError(f"more than one '=' in {text!r}")
    lhs = parse_word(parts[0])
    rhs = parse_word(parts[1]) if len(parts) == 2 else ()
    return lhs, rhs


def _letters_text(word: Sequence[Letter]) -> str:
    out = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        name, e = word[i]
        k = (j - i) * e
        out.append(name if k == 1 else f"{name}^{k}")
        i = j
    return " ".join(out)


def format_word(word: Sequence[Letter]) -> str:
    """Readable form with power detection, e.g. ``(a f)^5`` or ``f^-2``."""
    word = tuple(word)
    if not word:
        return "id"
    n = len(word)
    for period in range(1, n // 2 + 1):
        if n % period == 0 and word == word[:period] * (n // period):
            inner = _letters_text(word[:period])
            if period == 1 or " " not in inner:
                return _letters_text(word)
            return f"({inner})^{n // period}"
    return _letters_text(word)


def cyclic_reduce(word: Sequence[Letter], involutions: frozenset[str] = frozenset()) -> Word:
    w = list(free_reduce(word, involutions))
    while len(w) > 1:
        (a, e), (b, f) = w[0], w[-1]
        if a == b and (e == -f or a in involutions):
            w = list(free_reduce(w[1:-1], involutions))
        else:
            break
    return tuple(w)


def _letter_order(letter: Letter) -> tuple[str, int]:
    # positive letters sort before their inverses
    return (letter[0], 0 if letter[1] > 0 else 1)


def canonical_relator(word: Sequence[Letter], involutions: frozenset[str] = frozenset()) -> Word:
    """Least rotation of the relator or its inverse, after cyclic reduction."""
    w = cyclic_reduce(word, involutions)
    if not w:
        return ()
    best = None
    for cand in (w, free_reduce(inverse_word(w), involutions)):
        for i in range(len(cand)):
            rot = cand[i:] + cand[:i]
            key = [_letter_order(x) for x in rot]
            if best is None or key < best[0]:
                best = (key, rot)
    return best[1]


def shortlex_key(word: Sequence[Letter]) -> tuple:
    return (len(word), [_letter_order(x) for x in word])


def word_names(word: Iterable[Letter]) -> set[str]:
    return {name for name, _ in word}
