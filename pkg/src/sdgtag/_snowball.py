"""Snowball stemmer for English (Porter2).

Pure-Python implementation of Martin Porter's English Snowball algorithm
(http://snowball.tartarus.org/algorithms/english/stemmer.html). R1/R2 are
tracked as tail strings updated in lockstep with the word, which reproduces
the positional region semantics of the reference implementation.
"""

from __future__ import annotations

_VOWELS = "aeiouy"
_DOUBLES = ("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")
_LI_ENDINGS = "cdeghkmnrt"

_STEP0_SUFFIXES = ("'s'", "'s", "'")
_STEP1A_SUFFIXES = ("sses", "ied", "ies", "us", "ss", "s")
_STEP1B_SUFFIXES = ("eedly", "ingly", "edly", "eed", "ing", "ed")
_STEP2_SUFFIXES = (
    "ization", "ational", "fulness", "ousness", "iveness", "tional",
    "biliti", "lessli", "entli", "ation", "alism", "aliti", "ousli",
    "iviti", "fulli", "enci", "anci", "abli", "izer", "ator", "alli",
    "bli", "ogi", "li",
)
_STEP3_SUFFIXES = (
    "ational", "tional", "alize", "icate", "iciti", "ative", "ical",
    "ness", "ful",
)
_STEP4_SUFFIXES = (
    "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent",
    "ism", "ate", "iti", "ous", "ive", "ize", "ion", "al", "er", "ic",
)

# Irregular stems plus forms that must survive suffix stripping untouched.
_SPECIAL = {
    "skis": "ski", "skies": "sky", "dying": "die", "lying": "lie",
    "tying": "tie", "idly": "idl", "gently": "gentl", "ugly": "ugli",
    "early": "earli", "only": "onli", "singly": "singl",
    "sky": "sky", "news": "news", "howe": "howe", "atlas": "atlas",
    "cosmos": "cosmos", "bias": "bias", "andes": "andes",
    "inning": "inning", "innings": "inning",
    "outing": "outing", "outings": "outing",
    "canning": "canning", "cannings": "canning",
    "herring": "herring", "herrings": "herring",
    "earring": "earring", "earrings": "earring",
    "proceed": "proceed", "proceeds": "proceed",
    "proceeded": "proceed", "proceeding": "proceed",
    "exceed": "exceed", "exceeds": "exceed",
    "exceeded": "exceed", "exceeding": "exceed",
    "succeed": "succeed", "succeeds": "succeed",
    "succeeded": "succeed", "succeeding": "succeed",
}


def _replace_suffix(s: str, suffix: str, repl: str) -> str:
    return s[: -len(suffix)] + repl


def _standard_regions(word: str) -> tuple[str, str]:
    r1 = ""
    r2 = ""
    for i in range(1, len(word)):
        if word[i] not in _VOWELS and word[i - 1] in _VOWELS:
            r1 = word[i + 1:]
            break
    for i in range(1, len(r1)):
        if r1[i] not in _VOWELS and r1[i - 1] in _VOWELS:
            r2 = r1[i + 1:]
            break
    return r1, r2


def stem(word: str) -> str:
    """Return the English Snowball stem of a single lowercase word."""
    word = word.lower()
    if len(word) <= 2:
        return word
    if word in _SPECIAL:
        return _SPECIAL[word]

    word = (
        word.replace("’", "'").replace("‘", "'").replace("‛", "'")
    )
    if word.startswith("'"):
        word = word[1:]

    # y acting as a consonant is upper-cased so it is excluded from vowel sets.
    if word.startswith("y"):
        word = "Y" + word[1:]
    for i in range(1, len(word)):
        if word[i] == "y" and word[i - 1] in _VOWELS:
            word = word[:i] + "Y" + word[i + 1:]

    if word.startswith(("gener", "commun", "arsen")):
        r1 = word[6:] if word.startswith("commun") else word[5:]
        r2 = ""
        for i in range(1, len(r1)):
            if r1[i] not in _VOWELS and r1[i - 1] in _VOWELS:
                r2 = r1[i + 1:]
                break
    else:
        r1, r2 = _standard_regions(word)

    # Step 0: possessive endings.
    for suffix in _STEP0_SUFFIXES:
        if word.endswith(suffix):
            word = word[: -len(suffix)]
            r1 = r1[: -len(suffix)]
            r2 = r2[: -len(suffix)]
            break

    # Step 1a: plural endings.
    for suffix in _STEP1A_SUFFIXES:
        if word.endswith(suffix):
            if suffix == "sses":
                word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
            elif suffix in ("ied", "ies"):
                cut = 2 if len(word[: -len(suffix)]) > 1 else 1
                word, r1, r2 = word[:-cut], r1[:-cut], r2[:-cut]
            elif suffix == "s":
                if any(ch in _VOWELS for ch in word[:-2]):
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
            break

    # Step 1b: -ed/-ing endings.
    for suffix in _STEP1B_SUFFIXES:
        if word.endswith(suffix):
            if suffix in ("eed", "eedly"):
                if r1.endswith(suffix):
                    word = _replace_suffix(word, suffix, "ee")
                    r1 = _replace_suffix(r1, suffix, "ee") if len(r1) >= len(suffix) else ""
                    r2 = _replace_suffix(r2, suffix, "ee") if len(r2) >= len(suffix) else ""
            elif any(ch in _VOWELS for ch in word[: -len(suffix)]):
                word = word[: -len(suffix)]
                r1 = r1[: -len(suffix)]
                r2 = r2[: -len(suffix)]
                if word.endswith(("at", "bl", "iz")):
                    word += "e"
                    r1 += "e"
                    if len(word) > 5 or len(r1) >= 3:
                        r2 += "e"
                elif word.endswith(_DOUBLES):
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
                elif _is_short(word, r1):
                    word += "e"
                    if r1:
                        r1 += "e"
                    if r2:
                        r2 += "e"
            break

    # Step 1c: final y preceded by a consonant.
    if len(word) > 2 and word[-1] in "yY" and word[-2] not in _VOWELS:
        word = word[:-1] + "i"
        r1 = r1[:-1] + "i" if r1 else ""
        r2 = r2[:-1] + "i" if r2 else ""

    # Step 2: derivational suffixes, first layer (must lie in R1).
    for suffix in _STEP2_SUFFIXES:
        if word.endswith(suffix):
            if r1.endswith(suffix):
                if suffix == "tional":
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix in ("enci", "anci", "abli"):
                    word = word[:-1] + "e"
                    r1 = r1[:-1] + "e" if r1 else ""
                    r2 = r2[:-1] + "e" if r2 else ""
                elif suffix == "entli":
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix in ("izer", "ization"):
                    word, r1, r2 = _rewrite(word, r1, r2, suffix, "ize", r2_pad="")
                elif suffix in ("ational", "ation", "ator"):
                    word, r1, r2 = _rewrite(word, r1, r2, suffix, "ate", r2_pad="e")
                elif suffix in ("alism", "aliti", "alli"):
                    word, r1, r2 = _rewrite(word, r1, r2, suffix, "al", r2_pad="")
                elif suffix == "fulness":
                    word, r1, r2 = word[:-4], r1[:-4], r2[:-4]
                elif suffix in ("ousli", "ousness"):
                    word, r1, r2 = _rewrite(word, r1, r2, suffix, "ous", r2_pad="")
                elif suffix in ("iveness", "iviti"):
                    word, r1, r2 = _rewrite(word, r1, r2, suffix, "ive", r2_pad="e")
                elif suffix in ("biliti", "bli"):
                    word, r1, r2 = _rewrite(word, r1, r2, suffix, "ble", r2_pad="")
                elif suffix == "ogi" and word[-4] == "l":
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
                elif suffix in ("fulli", "lessli"):
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix == "li" and word[-3] in _LI_ENDINGS:
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
            break

    # Step 3: derivational suffixes, second layer (must lie in R1).
    for suffix in _STEP3_SUFFIXES:
        if word.endswith(suffix):
            if r1.endswith(suffix):
                if suffix == "tional":
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix == "ational":
                    word, r1, r2 = _rewrite(word, r1, r2, suffix, "ate", r2_pad="")
                elif suffix == "alize":
                    word, r1, r2 = word[:-3], r1[:-3], r2[:-3]
                elif suffix in ("icate", "iciti", "ical"):
                    word, r1, r2 = _rewrite(word, r1, r2, suffix, "ic", r2_pad="")
                elif suffix in ("ful", "ness"):
                    word = word[: -len(suffix)]
                    r1 = r1[: -len(suffix)]
                    r2 = r2[: -len(suffix)]
                elif suffix == "ative" and r2.endswith(suffix):
                    word, r1, r2 = word[:-5], r1[:-5], r2[:-5]
            break

    # Step 4: residual suffixes (must lie in R2).
    for suffix in _STEP4_SUFFIXES:
        if word.endswith(suffix):
            if r2.endswith(suffix):
                if suffix == "ion":
                    if word[-4] in "st":
                        word, r1, r2 = word[:-3], r1[:-3], r2[:-3]
                else:
                    word = word[: -len(suffix)]
                    r1 = r1[: -len(suffix)]
                    r2 = r2[: -len(suffix)]
            break

    # Step 5: final -e / -ll cleanup.
    if r2.endswith("l") and word[-2] == "l":
        word = word[:-1]
    elif r2.endswith("e"):
        word = word[:-1]
    elif r1.endswith("e"):
        if len(word) >= 4 and (
            word[-2] in _VOWELS
            or word[-2] in "wxY"
            or word[-3] not in _VOWELS
            or word[-4] in _VOWELS
        ):
            word = word[:-1]

    return word.replace("Y", "y")


def _rewrite(word: str, r1: str, r2: str, suffix: str, repl: str, r2_pad: str) -> tuple[str, str, str]:
    """Replace a suffix on the word and both region strings.

    When a region is shorter than the removed suffix its start lies inside
    the replaced span; r2_pad carries the tail of the replacement that then
    falls back into R2.
    """
    word = _replace_suffix(word, suffix, repl)
    r1 = _replace_suffix(r1, suffix, repl) if len(r1) >= len(suffix) else ""
    r2 = _replace_suffix(r2, suffix, repl) if len(r2) >= len(suffix) else r2_pad
    return word, r1, r2


def _is_short(word: str, r1: str) -> bool:
    """True when R1 is empty and the word ends in a short syllable."""
    if r1:
        return False
    if (
        len(word) >= 3
        and word[-1] not in _VOWELS
        and word[-1] not in "wxY"
        and word[-2] in _VOWELS
        and word[-3] not in _VOWELS
    ):
        return True
    return len(word) == 2 and word[0] in _VOWELS and word[1] not in _VOWELS
