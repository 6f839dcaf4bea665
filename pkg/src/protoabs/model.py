"""Categorical message model.

A message is a fixed-arity tuple of field tokens.  Tokens are plain strings
of the form "KEY=VALUE"; the reserved token ABSENT pads short messages on
the right so that every message in a corpus has the same arity and
positional Hamming comparison is well defined.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ArityMismatch, EmptyCorpus

ABSENT = "ABSENT"

UNLABELED = -1

DEFAULT_ARITY = 32


@dataclass(frozen=True)
class Message:
    fields: tuple
    source_id: str = ""

    @property
    def arity(self):
        return len(self.fields)


def message_equal(a, b):
    """Positional equality over field tokens; source_id is ignored."""
    if len(a.fields) != len(b.fields):
        raise ArityMismatch(
            "cannot compare messages of arity %d and %d" % (len(a.fields), len(b.fields))
        )
    return a.fields == b.fields


class Corpus:
    """Immutable collection of equal-arity messages.

    Besides the message tuples a corpus carries per-position vocabularies
    (symbols in first-occurrence order) and an integer code matrix used by
    the numeric modules.
    """

    def __init__(self, messages, arity):
        if not messages:
            raise EmptyCorpus("corpus must contain at least one message")
        for m in messages:
            if m.arity != arity:
                raise ArityMismatch(
                    "message %r has arity %d, corpus arity is %d"
                    % (m.source_id, m.arity, arity)
                )
        self.messages = tuple(messages)
        self.arity = arity
        self.vocabulary = tuple(
            tuple(_first_occurrence(m.fields[f] for m in self.messages))
            for f in range(arity)
        )
        self._index = [
            {tok: c for c, tok in enumerate(vocab)} for vocab in self.vocabulary
        ]
        codes = np.empty((len(self.messages), arity), dtype=np.int32)
        for i, m in enumerate(self.messages):
            for f, tok in enumerate(m.fields):
                codes[i, f] = self._index[f][tok]
        codes.setflags(write=False)
        self.codes = codes
        # lexicographic rank of each code, per position (mode tie-breaking)
        self.lex_rank = tuple(
            _lex_ranks(vocab) for vocab in self.vocabulary
        )

    def __len__(self):
        return len(self.messages)

    def encode(self, message):
        """Code row for a message over this corpus' vocabulary.

        Raises KeyError if the message uses a symbol unknown at some
        position (centroids produced from corpus members never do).
        """
        if message.arity != self.arity:
            raise ArityMismatch("message arity %d != corpus arity %d" % (message.arity, self.arity))
        return np.array(
            [self._index[f][tok] for f, tok in enumerate(message.fields)],
            dtype=np.int32,
        )

    def to_dict(self):
        return {
            "arity": self.arity,
            "messages": [
                {"fields": list(m.fields), "source_id": m.source_id}
                for m in self.messages
            ],
        }

    @classmethod
    def from_dict(cls, d):
        msgs = [
            Message(fields=tuple(row["fields"]), source_id=row.get("source_id", ""))
            for row in d["messages"]
        ]
        return cls(msgs, d["arity"])


def _first_occurrence(items):
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def _lex_ranks(vocab):
    order = sorted(range(len(vocab)), key=lambda c: vocab[c])
    ranks = np.empty(len(vocab), dtype=np.int64)
    for rank, c in enumerate(order):
        ranks[c] = rank
    return ranks


@dataclass(frozen=True)
class LabelVector:
    labels: tuple
    n_classes: int

    def __post_init__(self):
        for l in self.labels:
            if l != UNLABELED and not (0 <= l < self.n_classes):
                raise ValueError("label %r out of range 0..%d" % (l, self.n_classes - 1))

    def __len__(self):
        return len(self.labels)

    def to_dict(self):
        return {"n_classes": self.n_classes, "labels": list(self.labels)}

    @classmethod
    def from_dict(cls, d):
        return cls(labels=tuple(int(x) for x in d["labels"]), n_classes=int(d["n_classes"]))


def build_corpus(raw_messages, arity=DEFAULT_ARITY, source_ids=None):
    """Truncate each raw token list to `arity` and pad with ABSENT.

    `raw_messages` is a sequence of token lists; tokens must not use the
    reserved ABSENT symbol themselves.
    """
    if arity < 1:
        raise ValueError("arity must be >= 1")
    raw_messages = list(raw_messages)
    if not raw_messages:
        raise EmptyCorpus("no raw messages given")
    msgs = []
    for i, tokens in enumerate(raw_messages):
        tokens = list(tokens)[:arity]
        if ABSENT in tokens:
            raise ValueError("the token %r is reserved for padding" % ABSENT)
        tokens += [ABSENT] * (arity - len(tokens))
        sid = source_ids[i] if source_ids is not None else "msg%d" % i
        msgs.append(Message(fields=tuple(tokens), source_id=sid))
    return Corpus(msgs, arity)
