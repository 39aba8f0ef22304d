"""Story records as they move through the curation pipeline."""

from dataclasses import dataclass, field, asdict


@dataclass(frozen=True)
class RawStory:
    """One archived news report, as crawled."""

    id: str
    title: str
    body: str
    community: str = ""
    published: str = ""  # ISO date; empty when unknown

    @classmethod
    def from_dict(cls, d: dict) -> "RawStory":
        return cls(
            id=str(d["id"]),
            title=d.get("title", ""),
            body=d["body"],
            community=d.get("community", ""),
            published=d.get("published", ""),
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Token:
    """A word-level token recorded as a character interval into the body."""

    surface: str
    char_start: int
    char_end: int

    def to_list(self) -> list:
        return [self.surface, self.char_start, self.char_end]


@dataclass
class Story:
    """An accepted, scrubbed story with its word-level tokenization."""

    id: str
    title: str
    body: str
    word_count: int
    stem_hits: int
    tokens: list[Token]
    community: str = ""
    published: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "body": self.body,
            "word_count": self.word_count,
            "stem_hits": self.stem_hits,
            "tokens": [t.to_list() for t in self.tokens],
            "community": self.community,
            "published": self.published,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Story":
        return cls(
            id=str(d["id"]),
            title=d.get("title", ""),
            body=d["body"],
            word_count=d["word_count"],
            stem_hits=d["stem_hits"],
            tokens=[Token(t[0], t[1], t[2]) for t in d["tokens"]],
            community=d.get("community", ""),
            published=d.get("published", ""),
        )

    def validate(self) -> None:
        prev_end = 0
        for tok in self.tokens:
            if not (0 <= tok.char_start < tok.char_end <= len(self.body)):
                raise ValueError(f"token interval out of bounds in story {self.id}")
            if tok.char_start < prev_end:
                raise ValueError(f"overlapping token intervals in story {self.id}")
            if self.body[tok.char_start : tok.char_end] != tok.surface:
                raise ValueError(f"token surface mismatch in story {self.id}")
            prev_end = tok.char_end


REJECTION_REASONS = ("too_long", "too_few_stems", "duplicate_title", "multi_report", "other")


@dataclass
class FilterReport:
    """Accounting of one filter_archive run: every input ends up somewhere."""

    input_count: int = 0
    accepted: int = 0
    rejected: dict[str, int] = field(
        default_factory=lambda: {r: 0 for r in REJECTION_REASONS}
    )

    def reject(self, reason: str) -> None:
        if reason not in self.rejected:
            reason = "other"
        self.rejected[reason] += 1

    def check(self) -> None:
        total = self.accepted + sum(self.rejected.values())
        if total != self.input_count:
            raise AssertionError(
                f"filter report does not balance: {total} != {self.input_count}"
            )

    def to_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "accepted": self.accepted,
            "rejected": dict(self.rejected),
        }
