"""Subword tokenizer for the from-scratch encoder.

Vocabulary words map to single pieces; out-of-vocabulary words fall back
to character pieces (first char, then ##-continuations), so multi-piece
words exist and the subword-to-word alignment is exercised for real.
Word-level inputs come from the corpus tokenizer's character intervals.
"""

import json
import string
from pathlib import Path

PAD, UNK, CLS, SEP, MASK = "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"
SPECIAL_TOKENS = (PAD, UNK, CLS, SEP, MASK)


class SubwordTokenizer:
    def __init__(self, vocab: list[str]):
        if list(vocab[: len(SPECIAL_TOKENS)]) != list(SPECIAL_TOKENS):
            raise ValueError("vocab must start with the special tokens")
        self.vocab = list(vocab)
        self.token_to_id = {t: i for i, t in enumerate(self.vocab)}
        self.pad_id = self.token_to_id[PAD]
        self.unk_id = self.token_to_id[UNK]
        self.cls_id = self.token_to_id[CLS]
        self.sep_id = self.token_to_id[SEP]
        self.mask_id = self.token_to_id[MASK]

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    @classmethod
    def train(cls, word_lists: list[list[str]], min_count: int = 1, max_words: int = 8000):
        """Build a vocabulary from word-tokenized texts (lowercased)."""
        counts: dict[str, int] = {}
        chars: set[str] = set(string.ascii_lowercase + string.digits)
        for words in word_lists:
            for w in words:
                w = w.lower()
                counts[w] = counts.get(w, 0) + 1
                chars.update(w)
        words = [w for w, c in counts.items() if c >= min_count]
        words.sort(key=lambda w: (-counts[w], w))
        words = words[:max_words]
        char_pieces = sorted(chars) + ["##" + c for c in sorted(chars)]
        vocab = list(SPECIAL_TOKENS) + sorted(set(words)) + [
            p for p in char_pieces if p not in set(words)
        ]
        return cls(vocab)

    def pieces_for_word(self, word: str) -> list[int]:
        word = word.lower()
        pid = self.token_to_id.get(word)
        if pid is not None:
            return [pid]
        ids = []
        for i, ch in enumerate(word):
            piece = ch if i == 0 else "##" + ch
            ids.append(self.token_to_id.get(piece, self.unk_id))
        return ids or [self.unk_id]

    def encode_words(self, words: list[str], max_length: int) -> tuple[list[int], list[int | None]]:
        """Encode a word sequence as [CLS] pieces... [SEP], truncated.

        Returns (input_ids, word_ids) where word_ids[i] is the index of the
        source word for piece i, or None at the special-marker positions.
        """
        ids: list[int] = [self.cls_id]
        word_ids: list[int | None] = [None]
        budget = max_length - 2  # room for CLS and SEP
        for wi, word in enumerate(words):
            pieces = self.pieces_for_word(word)
            if len(ids) - 1 + len(pieces) > budget:
                break
            ids.extend(pieces)
            word_ids.extend([wi] * len(pieces))
        ids.append(self.sep_id)
        word_ids.append(None)
        return ids, word_ids

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({"vocab": self.vocab}, ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SubwordTokenizer":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data["vocab"])
