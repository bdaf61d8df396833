#!/usr/bin/env python3
"""Generate the bundled mini parallel corpus under data/mini/.

The target side ("zz") is a toy language: every source word maps through a
deterministic letter substitution, and each sentence is emitted in reverse
word order. Because windows are symmetric, the two sides share co-occurrence
structure, so the full pipeline produces a meaningful (non-degenerate)
evaluation without any external data or network access.

Run once from the repository root:
    python3 scripts/gen_mini_corpus.py
"""
import json
import random
import unicodedata
from pathlib import Path

SEED = 20260810
OUT = Path(__file__).resolve().parent.parent / "data" / "mini"

TOPICS = {
    "animals": ["cat", "dog", "bird", "horse", "sheep", "goat", "fish", "mouse",
                "bear", "wolf", "fox", "deer"],
    "food": ["bread", "cheese", "apple", "honey", "milk", "soup", "fruit",
             "grain", "meat", "salt", "berry", "cake"],
    "nature": ["river", "forest", "mountain", "stone", "cloud", "rain", "wind",
               "valley", "meadow", "lake", "snow", "storm"],
    "village": ["house", "barn", "market", "bridge", "garden", "fence", "road",
                "mill", "tower", "well", "gate", "yard"],
    "people": ["farmer", "baker", "hunter", "child", "elder", "neighbor",
               "miller", "shepherd", "weaver", "smith", "trader", "guest"],
    "actions": ["builds", "carries", "watches", "feeds", "follows", "finds",
                "gathers", "keeps", "makes", "sells", "brings", "grows"],
    "qualities": ["old", "young", "small", "large", "quiet", "bright", "dark",
                  "heavy", "light", "warm", "cold", "green"],
    "time": ["morning", "evening", "winter", "summer", "spring", "autumn",
             "today", "night", "noon", "dawn"],
    "accented": ["café", "état", "señor", "naïve",
                 "über", "rôle"],
}
FUNCTION_WORDS = ["the", "a", "and", "near", "with", "over", "under", "beside",
                  "from", "into", "while", "then"]

SUBST = str.maketrans("abcdefghijklmnopqrstuvwxyz", "ptkysufomarinebdlgzhvwjcxq")


def mangle(word: str) -> str:
    """Deterministic injective source->target word mapping."""
    base = "".join(reversed(word.lower()))
    out = base.translate(SUBST)
    # Keep non-ascii letters as themselves so accents survive the trip.
    return unicodedata.normalize("NFC", out)


def main() -> None:
    rng = random.Random(SEED)
    OUT.mkdir(parents=True, exist_ok=True)

    vocab = sorted({w for pool in TOPICS.values() for w in pool} | set(FUNCTION_WORDS))
    topic_names = sorted(TOPICS)

    en_lines = []
    zz_lines = []
    for _ in range(1000):
        topic = TOPICS[rng.choice(topic_names)]
        second = TOPICS[rng.choice(topic_names)]
        length = rng.randint(5, 11)
        words = []
        for _ in range(length):
            roll = rng.random()
            if roll < 0.45:
                words.append(rng.choice(topic))
            elif roll < 0.70:
                words.append(rng.choice(second))
            else:
                words.append(rng.choice(FUNCTION_WORDS))

        # Reversal preserves windowed co-occurrence; mild dropout keeps the
        # two sides from being perfectly isomorphic, so retrieval is not
        # trivially saturated.
        zz_words = [mangle(w) for w in reversed(words)
                    if rng.random() >= 0.12] or [mangle(words[0])]

        # Surface noise for the tokenizer: casing, punctuation, digits.
        noisy = list(words)
        noisy[0] = noisy[0].capitalize()
        if rng.random() < 0.25:
            i = rng.randrange(len(noisy))
            noisy[i] = noisy[i] + ","
        if rng.random() < 0.15:
            noisy.insert(rng.randrange(len(noisy) + 1), str(rng.randint(2, 1999)))
        if rng.random() < 0.08:
            i = rng.randrange(len(noisy))
            noisy[i] = noisy[i].upper()
        tail = rng.choice([".", ".", "!", "?", ""])
        en_lines.append(" ".join(noisy) + tail)

        zz_noisy = list(zz_words)
        zz_noisy[0] = zz_noisy[0].capitalize()
        if rng.random() < 0.12:
            zz_noisy.insert(rng.randrange(len(zz_noisy) + 1), str(rng.randint(2, 999)))
        zz_tail = rng.choice([".", ".", "!", ""])
        zz_lines.append(" ".join(zz_noisy) + zz_tail)

    (OUT / "en.txt").write_text("\n".join(en_lines) + "\n", encoding="utf-8")
    (OUT / "zz.txt").write_text("\n".join(zz_lines) + "\n", encoding="utf-8")

    # Static translation table: a few multiword entries and a few missing
    # words keep the dictionary build's skip counters honest.
    table_lines = []
    for i, w in enumerate(vocab):
        if i % 23 == 7:
            continue  # untranslatable
        if i % 19 == 3:
            table_lines.append(f"{w}\t{mangle(w)} {mangle(w + 'x')}")  # phrase
        else:
            table_lines.append(f"{w}\t{mangle(w)}")
    (OUT / "static_dict.tsv").write_text("\n".join(table_lines) + "\n", encoding="utf-8")

    config = {
        "language_pair": "en-zz",
        "paths": {
            "source_corpus": "en.txt",
            "target_corpus": "zz.txt",
            "work_dir": "work",
        },
        "token_rules": {"lowercase": True, "unicode_nfc": True, "min_token_length": 1},
        "sgns": {
            "dimension": 64,
            "window": 5,
            "epochs": 10,
            "negatives": 5,
            "min_count": 5,
            "learning_rate": 0.025,
            "min_learning_rate": 1e-4,
            "seed": 1,
            "threads": 1,
        },
        "split": {"train_fraction": 0.7, "seed": 7},
        "normalize": True,
        "retrieval": [
            {"mode": "nn"},
            {"mode": "csls", "k": 10},
            {"mode": "isf", "beta": 30.0},
            {"mode": "inn"},
        ],
        "top_n": 10,
        "threads": 1,
        "backend": {"kind": "static", "table": "static_dict.tsv"},
    }
    (OUT / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(en_lines)} sentence pairs, {len(vocab)} vocabulary words -> {OUT}")


if __name__ == "__main__":
    main()
