"""Tokenize, part-of-speech tag, and extract base noun phrases.

A base noun phrase is a maximal token span whose tag sequence matches
zero or more adjectives followed by one or more nouns. Phrase keys are
the lowercased, single-space-joined token texts; they are not stemmed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Protocol, Sequence

TokenSpan = tuple[str, int, int]  # (text, start offset, end offset)

ADJECTIVE_TAGS = frozenset({"JJ", "JJR", "JJS"})
NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})

_PUNCT = set(".,;:!?()[]{}\"'")
_SENTENCE_END = {".", "!", "?"}


@dataclass(frozen=True)
class Token:
    text: str
    tag: str
    span: tuple[int, int]


@dataclass(frozen=True)
class BasePhrase:
    tokens: tuple[Token, ...]

    @property
    def key(self) -> str:
        return " ".join(t.text for t in self.tokens).lower()


def tokenize(text: str) -> list[TokenSpan]:
    """Split on whitespace, detaching leading/trailing punctuation.

    Hyphenated words stay whole; internal apostrophes are kept.
    """
    tokens: list[TokenSpan] = []
    start = 0
    i = 0
    n = len(text)
    while i <= n:
        if i == n or text[i].isspace():
            if i > start:
                tokens.extend(_split_chunk(text, start, i))
            start = i + 1
        i += 1
    return tokens


def _split_chunk(text: str, start: int, end: int) -> list[TokenSpan]:
    leading: list[TokenSpan] = []
    while start < end and text[start] in _PUNCT:
        leading.append((text[start], start, start + 1))
        start += 1
    trailing: list[TokenSpan] = []
    while end > start and text[end - 1] in _PUNCT:
        trailing.append((text[end - 1], end - 1, end))
        end -= 1
    core = [(text[start:end], start, end)] if end > start else []
    return leading + core + list(reversed(trailing))


class PosTagger(Protocol):
    def tag(self, tokens: Sequence[TokenSpan]) -> list[Token]: ...


# Closed-class words that can never start or continue a noun phrase.
_CLOSED_CLASS: dict[str, str] = {}
for _tag, _words in {
    "DT": "the a an this that these those each every either neither some any no all both another such",
    "CC": "and or but nor so yet plus",
    "IN": (
        "of in on at by for with from to into onto over under between through during "
        "about against among within without across after before behind below above near "
        "upon via per as if than like unless until while whereas since"
    ),
    "PRP": (
        "i you he she it we they me him her us them my your his its our their mine "
        "yours hers ours theirs itself themselves oneself"
    ),
    "MD": "can could will would shall should may might must",
    "VB": (
        "is are was were be been being am has have had do does did done get gets got "
        "make makes made use uses see sees saw show shows shown describe describes "
        "explain explains discuss discusses implement implements introduce introduces "
        "cover covers include includes require requires provide provides allow allows "
        "write writes consider considers compare compares apply applies contain contains"
    ),
    "RB": (
        "not also very too only just often usually sometimes never always however "
        "rather quite then thus hence there here when where why how again most more "
        "once twice now well everywhere anywhere somewhere nowhere elsewhere"
    ),
}.items():
    for _w in _words.split():
        _CLOSED_CLASS[_w] = _tag

# Adjectives the suffix rules would mis-tag, mostly -ed participles that act
# as modifiers in technical phrases ("linked list", "directed graph").
_ADJECTIVES = frozenset(
    (
        "linked directed undirected weighted unweighted sorted unsorted balanced "
        "unbalanced ordered unordered distributed shared fixed signed unsigned nested "
        "typed untyped structured unstructured advanced object-oriented efficient "
        "common new old good bad high low first last next simple fast slow many few "
        "several important different various main general large small big greedy "
        "binary abstract parallel concurrent sequential"
    ).split()
)

# Nouns the suffix rules would otherwise tag as verbs, adverbs or adjectives.
_NOUNS = frozenset(
    (
        "programming computing engineering processing learning testing debugging "
        "modeling scheduling caching hashing sorting searching indexing networking "
        "routing encoding decoding mining clustering threading training building "
        "string strings meaning setting settings mapping mappings speed assembly "
        "family logic topic topics arithmetic statistics heuristic heuristics "
        "graphics metrics semantics mechanics terminal interval literal traversal "
        "removal retrieval"
    ).split()
)

_JJ_SUFFIXES = ("ous", "ful", "ive", "ic", "al")


class RuleTagger:
    """Deterministic tagger: lexicon, suffix rules, capitalization, noun fallback.

    Tag noise is tolerated downstream; determinism is the point. Swap in a
    statistical tagger through the :class:`PosTagger` interface if needed.
    """

    def tag(self, tokens: Sequence[TokenSpan]) -> list[Token]:
        tagged: list[Token] = []
        for index, (text, start, end) in enumerate(tokens):
            sentence_initial = index == 0 or tokens[index - 1][0] in _SENTENCE_END
            tagged.append(Token(text, self._tag_word(text, sentence_initial), (start, end)))
        return tagged

    def _tag_word(self, text: str, sentence_initial: bool) -> str:
        if not any(c.isalnum() for c in text):
            return text
        if text[0].isdigit():
            return "CD"
        word = text.lower()
        if word in _CLOSED_CLASS:
            return _CLOSED_CLASS[word]
        if word in _NOUNS:
            return _plural_noun_tag(word)
        if word in _ADJECTIVES:
            return "JJ"
        if word.endswith("ly") and len(word) > 3:
            return "RB"
        if word.endswith("ing") and len(word) > 5:
            return "VBG"
        if word.endswith("ed") and len(word) > 4:
            return "VBN"
        if word.endswith(_JJ_SUFFIXES):
            return "JJ"
        if text[0].isupper() and not sentence_initial:
            return "NNP"
        return _plural_noun_tag(word)


def _plural_noun_tag(word: str) -> str:
    if word.endswith("s") and len(word) > 3 and not word.endswith(("ss", "us", "is")):
        return "NNS"
    return "NN"


_DEFAULT_TAGGER = RuleTagger()


def pos_tag(tokens: Sequence[TokenSpan], tagger: PosTagger | None = None) -> list[Token]:
    """Assign exactly one tag per token using the given (default: bundled) tagger."""
    return (tagger or _DEFAULT_TAGGER).tag(tokens)


def iter_base_phrases(tagged: Sequence[Token]) -> list[BasePhrase]:
    """Leftmost-longest, non-overlapping adjective*-noun+ spans."""
    phrases: list[BasePhrase] = []
    i = 0
    n = len(tagged)
    while i < n:
        j = i
        while j < n and tagged[j].tag in ADJECTIVE_TAGS:
            j += 1
        k = j
        while k < n and tagged[k].tag in NOUN_TAGS:
            k += 1
        if k > j:
            phrases.append(BasePhrase(tuple(tagged[i:k])))
            i = k
        else:
            i += 1
    return phrases


def extract_bnps(tagged: Sequence[Token]) -> Counter[str]:
    """Multiset of base-noun-phrase keys found in ``tagged``."""
    return Counter(p.key for p in iter_base_phrases(tagged))


def text_phrases(text: str, tagger: PosTagger | None = None) -> Counter[str]:
    """Tokenize, tag, and chunk ``text`` in one step."""
    return extract_bnps(pos_tag(tokenize(text), tagger))


def parse_pretagged(text: str) -> list[list[Token]]:
    """Parse the token-per-line "text<TAB>tag" format; blank line = sentence break.

    Lets alternate taggers (or tests) bypass the bundled one. Spans are
    synthesized over a space-joined reconstruction of each sentence.
    """
    sentences: list[list[Token]] = []
    current: list[Token] = []
    offset = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            if current:
                sentences.append(current)
                current = []
            offset = 0
            continue
        if "\t" not in line:
            raise ValueError(f"line {line_no}: expected 'text<TAB>tag'")
        token_text, tag = line.split("\t", 1)
        token_text, tag = token_text.strip(), tag.strip()
        if not token_text or not tag:
            raise ValueError(f"line {line_no}: empty token or tag")
        current.append(Token(token_text, tag, (offset, offset + len(token_text))))
        offset += len(token_text) + 1
    if current:
        sentences.append(current)
    return sentences


def pretagged_phrases(text: str) -> Counter[str]:
    """Phrase multiset of a pre-tagged document; chunks never cross sentences."""
    counts: Counter[str] = Counter()
    for sentence in parse_pretagged(text):
        counts.update(extract_bnps(sentence))
    return counts
