#!/usr/bin/env python3
"""Regenerates classic_tasks.jsonl and curated_corpus.jsonl.

Each classic task has a ground truth and one or more synonyms: different
patterns that also accept every positive and reject every negative under
search semantics. The corpus holds the synonyms but never the ground truths,
padded with seeded filler to 1000 entries.
"""

import json
import random
import re
from pathlib import Path

HERE = Path(__file__).resolve().parent

# id, source, ground truth, synonyms, positives, negatives
CLASSIC = [
    ("email", "regexlib", r"^[\w.+-]+@[\w-]+\.[\w.-]+$",
     [r"^[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}$"],
     ["john.doe@example.com", "a+b@mail.co.uk"], ["john.example.com", "a@b", "@x.com"]),
    ("ipv4", "oss", r"^(?:(?:25[0-5]|2[0-4]\d|[01]?\d?\d)\.){3}(?:25[0-5]|2[0-4]\d|[01]?\d?\d)$",
     [r"^((25[0-5]|2[0-4][0-9]|1[0-9][0-9]|[1-9]?[0-9])\.){3}(25[0-5]|2[0-4][0-9]|1[0-9][0-9]|[1-9]?[0-9])$"],
     ["192.168.0.1", "10.0.0.255"], ["256.1.1.1", "1.2.3", "1.2.3.4.5"]),
    ("iso-date", "oss", r"^\d{4}-\d{2}-\d{2}$",
     [r"^[0-9]{4}-(0[1-9]|1[0-2])-(0[1-9]|[12][0-9]|3[01])$"],
     ["2023-01-15", "1999-12-31"], ["2023/01/15", "23-01-15", "2023-1-15"]),
    ("hex-color", "regexlib", r"^#(?:[0-9a-fA-F]{3}){1,2}$",
     [r"^#([A-Fa-f0-9]{6}|[A-Fa-f0-9]{3})$"],
     ["#fff", "#1A2b3C"], ["fff", "#ffff", "#ggg"]),
    ("us-zip", "regexlib", r"^\d{5}(?:-\d{4})?$",
     [r"^[0-9]{5}(-[0-9]{4})?$"],
     ["12345", "12345-6789"], ["1234", "123456", "12345-678"]),
    ("time-24h", "oss", r"^(?:[01]\d|2[0-3]):[0-5]\d$",
     [r"^([01][0-9]|2[0-3]):([0-5][0-9])$"],
     ["00:00", "23:59", "09:30"], ["24:00", "12:60", "9:30"]),
    ("integer", "oss", r"^-?\d+$",
     [r"^[-]?[0-9]+$"],
     ["0", "-42", "123"], ["1.5", "abc", "--1"]),
    ("decimal", "oss", r"^-?\d+\.\d+$",
     [r"^[-]?[0-9]+[.][0-9]+$"],
     ["3.14", "-0.5"], ["3", "3.", "abc"]),
    ("hex-number", "oss", r"^0[xX][0-9a-fA-F]+$",
     [r"^0[xX][A-Fa-f0-9]+$"],
     ["0x1F", "0XdeadBEEF"], ["1F", "0x", "0xZZ"]),
    ("us-phone", "regexlib", r"^\(\d{3}\) \d{3}-\d{4}$",
     [r"^\([0-9]{3}\) [0-9]{3}-[0-9]{4}$"],
     ["(555) 123-4567"], ["555-123-4567", "(555)123-4567", "(55) 123-4567"]),
    ("username", "regexlib", r"^[a-z0-9_-]{3,16}$",
     [r"^[a-z0-9_\-]{3,16}$"],
     ["john_doe", "user-01"], ["ab", "John", "this_is_way_too_long_name"]),
    ("slug", "oss", r"^[a-z0-9]+(?:-[a-z0-9]+)*$",
     [r"^[a-z0-9]+(-[a-z0-9]+)*$"],
     ["hello-world", "a1-b2-c3"], ["Hello-World", "hello--world", "-hello"]),
    ("url", "oss", r"^https?://[\w.-]+(?:/\S*)?$",
     [r"^(http|https)://[A-Za-z0-9.-]+(/[^\s]*)?$"],
     ["http://example.com", "https://a.b.org/path?q=1"], ["ftp://example.com", "example.com", "http//x.com"]),
    ("mac-address", "regexlib", r"^(?:[0-9A-Fa-f]{2}:){5}[0-9A-Fa-f]{2}$",
     [r"^([0-9a-fA-F]{2}:){5}([0-9a-fA-F]{2})$"],
     ["00:1A:2b:3C:4d:5E"], ["00:1A:2b:3C:4d", "00-1A-2b-3C-4d-5E", "00:1A:2b:3C:4d:5G"]),
    ("uuid", "oss", r"^[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}$",
     [r"^[0-9a-f]{8}(-[0-9a-f]{4}){3}-[0-9a-f]{12}$"],
     ["123e4567-e89b-12d3-a456-426614174000"],
     ["123e4567e89b12d3a456426614174000", "123e4567-e89b-12d3-a456-42661417400g"]),
    ("semver", "oss", r"^\d+\.\d+\.\d+$",
     [r"^[0-9]+\.[0-9]+\.[0-9]+$"],
     ["1.0.0", "10.20.30"], ["1.0", "1.0.0.0", "v1.0.0"]),
    ("card-groups", "regexlib", r"^\d{4}(?: \d{4}){3}$",
     [r"^[0-9]{4} [0-9]{4} [0-9]{4} [0-9]{4}$"],
     ["1234 5678 9012 3456"], ["1234567890123456", "1234 5678 9012 345"]),
    ("ca-postal", "regexlib", r"^[A-Za-z]\d[A-Za-z] ?\d[A-Za-z]\d$",
     [r"^[A-Za-z][0-9][A-Za-z]\s?[0-9][A-Za-z][0-9]$"],
     ["K1A 0B1", "m5v3l9"], ["K1A0B", "123 456"]),
    ("html-tag", "oss", r"<([a-z]+)[^>]*>",
     [r"<[a-z]+[^>]*>"],
     ["<div class=x>", "a <b> c"], ["no tags here", "< div>"]),
    ("us-ssn", "regexlib", r"^\d{3}-\d{2}-\d{4}$",
     [r"^[0-9]{3}-[0-9]{2}-[0-9]{4}$"],
     ["123-45-6789"], ["123456789", "12-345-6789"]),
]

LOOPBACK_IPV4 = r"^127(?:\.(?:25[0-5]|2[0-4][\d]|[01]?[\d][\d]?)){3}$"

CORPUS_SOURCES = ["oss-project", "regexlib", "so-post", "so-comment"]
LETTERS = "abcxyz01-_@:/"
CLASSES = ["[a-z]", "[0-9]", "[a-f0-9]", "[A-Za-z]", r"\d", r"\w", r"\s", ".", "[^@]", r"\.", "[xyz]"]
QUANTS = ["?", "*", "+", "{2}", "{1,3}", "{2,}", "{0,2}"]


def satisfies(pattern, positives, negatives):
    rx = re.compile(pattern)
    return all(rx.search(p) for p in positives) and not any(rx.search(n) for n in negatives)


def filler(rng):
    parts = []
    for _ in range(rng.randint(1, 6)):
        roll = rng.random()
        if roll < 0.45:
            atom = "".join(rng.choice(LETTERS) for _ in range(rng.randint(1, 3)))
        elif roll < 0.85:
            atom = rng.choice(CLASSES)
        else:
            atom = "(?:" + "|".join("".join(rng.choice(LETTERS) for _ in range(rng.randint(1, 3)))
                                   for _ in range(rng.randint(2, 3))) + ")"
        if rng.random() < 0.4:
            if len(atom) > 1 and atom[0] not in "[\\(":
                atom = "(?:" + atom + ")"
            atom += rng.choice(QUANTS)
        parts.append(atom)
    body = "".join(parts)
    if rng.random() < 0.5:
        body = "^" + body
    if rng.random() < 0.5:
        body += "$"
    return body


def main():
    tasks, corpus = [], []
    grounds = set()
    for tid, source, ground, synonyms, pos, neg in CLASSIC:
        assert satisfies(ground, pos, neg), tid
        grounds.add(ground)
        for k, syn in enumerate(synonyms):
            assert syn != ground and satisfies(syn, pos, neg), (tid, syn)
            corpus.append({"pattern": syn, "source": CORPUS_SOURCES[k % 2 if source == "oss" else 1 + k % 3],
                           "origin": f"curated/{tid}/{k}"})
        tasks.append({"id": tid, "ground_truth": ground, "positives": pos, "negatives": neg, "source": source})
    corpus.append({"pattern": LOOPBACK_IPV4, "source": "oss-project", "origin": "curated/ipv4-loopback"})

    rng = random.Random(20240917)
    seen = {e["pattern"] for e in corpus} | grounds
    while len(corpus) < 1000:
        p = filler(rng)
        if p in seen:
            continue
        seen.add(p)
        corpus.append({"pattern": p, "source": rng.choice(CORPUS_SOURCES), "origin": f"filler/{len(corpus)}"})

    with open(HERE / "classic_tasks.jsonl", "w") as f:
        for t in tasks:
            f.write(json.dumps(t) + "\n")
    with open(HERE / "curated_corpus.jsonl", "w") as f:
        for e in corpus:
            f.write(json.dumps(e) + "\n")


if __name__ == "__main__":
    main()
