"""Porter suffix-stripping stemmer.

Implements the classic 1980 algorithm in its canonical form, i.e. with the
three widely adopted adjustments every reference implementation carries:
step 2 rewrites "bli" -> "ble" (instead of "abli" -> "able"), step 2 gains
the "logi" -> "log" rule, and words of length <= 2 are left alone. This is
the variant the published test vocabulary was generated with.

Tokens containing anything other than ASCII letters (sentinels such as
"<digit>", hyphenated forms, stray punctuation) are returned unchanged.
"""

from __future__ import annotations

_VOWELS = "aeiou"


def _is_cons(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Count VC sequences: [C](VC)^m[V] gives m."""
    n = len(stem)
    i = 0
    while True:
        if i >= n:
            return 0
        if not _is_cons(stem, i):
            break
        i += 1
    i += 1
    m = 0
    while True:
        while True:
            if i >= n:
                return m
            if _is_cons(stem, i):
                break
            i += 1
        i += 1
        m += 1
        while True:
            if i >= n:
                return m
            if not _is_cons(stem, i):
                break
            i += 1
        i += 1


def _has_vowel(stem: str) -> bool:
    return any(not _is_cons(stem, i) for i in range(len(stem)))


def _ends_double_cons(stem: str) -> bool:
    return len(stem) >= 2 and stem[-1] == stem[-2] and _is_cons(stem, len(stem) - 1)


def _ends_cvc(stem: str) -> bool:
    """True when the stem ends consonant-vowel-consonant, last not w/x/y."""
    i = len(stem) - 1
    if i < 2 or not _is_cons(stem, i) or _is_cons(stem, i - 1) or not _is_cons(stem, i - 2):
        return False
    return stem[i] not in "wxy"


def _step1ab(w: str) -> str:
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-3] + "i"
    elif w.endswith("ss"):
        pass
    elif w.endswith("s"):
        w = w[:-1]
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    elif w.endswith("ed") and _has_vowel(w[:-2]):
        w = _step1ab_fixup(w[:-2])
    elif w.endswith("ing") and _has_vowel(w[:-3]):
        w = _step1ab_fixup(w[:-3])
    return w


def _step1ab_fixup(stem: str) -> str:
    if stem.endswith(("at", "bl", "iz")):
        return stem + "e"
    if _ends_double_cons(stem) and stem[-1] not in "lsz":
        return stem[:-1]
    if _measure(stem) == 1 and _ends_cvc(stem):
        return stem + "e"
    return stem


def _step1c(w: str) -> str:
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"
    return w


# (suffix, replacement) pairs; within each step, the first matching suffix
# decides, and the rewrite fires only when the remaining stem's measure
# clears the step's bar. Longer suffixes precede the suffixes they contain.
_STEP2 = (
    ("ational", "ate"), ("tional", "tion"),
    ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"),
    ("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous"),
    ("ization", "ize"), ("ation", "ate"), ("ator", "ate"),
    ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous"),
    ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    ("logi", "log"),
)

_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"),
    ("iciti", "ic"), ("ical", "ic"), ("ful", ""), ("ness", ""),
)

_STEP4 = (
    "al", "ance", "ence", "er", "ic", "able", "ible",
    "ant", "ement", "ment", "ent", "ion", "ou",
    "ism", "ate", "iti", "ous", "ive", "ize",
)


def _apply_rules(w: str, rules) -> str:
    for suffix, replacement in rules:
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 0:
                w = stem + replacement
            break
    return w


def _step4(w: str) -> str:
    for suffix in _STEP4:
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if suffix == "ion" and not stem.endswith(("s", "t")):
                continue
            if _measure(stem) > 1:
                w = stem
            break
    return w


def _step5(w: str) -> str:
    if w.endswith("e"):
        m = _measure(w)
        if m > 1 or (m == 1 and not _ends_cvc(w[:-1])):
            w = w[:-1]
    if w.endswith("ll") and _measure(w) > 1:
        w = w[:-1]
    return w


def stem(token: str) -> str:
    """Stem one lowercase token; non-alphabetic tokens pass through."""
    if len(token) <= 2 or not token.isascii() or not token.isalpha():
        return token
    w = token.lower()
    w = _step1ab(w)
    w = _step1c(w)
    w = _apply_rules(w, _STEP2)
    w = _apply_rules(w, _STEP3)
    w = _step4(w)
    w = _step5(w)
    return w
