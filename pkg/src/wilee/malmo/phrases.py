"""Noun-phrase extraction over the Adjective*Noun+ pattern."""

from __future__ import annotations

from dataclasses import dataclass

from .tagger import ADJ_TAGS, NOUN_TAGS, TaggedToken, parse_pretagged, tag_text


@dataclass(frozen=True)
class NounPhrase:
    words: tuple[str, ...]  # lowercase tokens
    source_span: tuple[int, int]  # char range in the description


def phrases_from_tokens(tokens: list[TaggedToken]) -> list[NounPhrase]:
    """Maximal non-overlapping JJ*NN+ runs, scanned left to right."""
    out: list[NounPhrase] = []
    n = len(tokens)
    i = 0
    while i < n:
        j = i
        while j < n and tokens[j].tag in ADJ_TAGS:
            j += 1
        if j < n and tokens[j].tag in NOUN_TAGS:
            k = j
            while k < n and tokens[k].tag in NOUN_TAGS:
                k += 1
            out.append(
                NounPhrase(
                    words=tuple(t.text.lower() for t in tokens[i:k]),
                    source_span=(tokens[i].span[0], tokens[k - 1].span[1]),
                )
            )
            i = k
        else:
            # Adjectives with no noun head contribute nothing.
            i = max(j, i + 1)
    return out


def extract_noun_phrases(text: str, pretagged: bool = False) -> list[NounPhrase]:
    tokens = parse_pretagged(text) if pretagged else tag_text(text)
    return phrases_from_tokens(tokens)
