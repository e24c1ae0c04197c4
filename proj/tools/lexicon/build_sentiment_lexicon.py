#!/usr/bin/env python3
"""Builds data/lexicon/sentiment_default.tsv.

Source: the Pattern adjective lexicon (en-sentiment.xml, PDDL public domain),
as shipped inside the textblob wheel. Per-sense values are averaged per word
form. Multi-word and hyphenated forms are dropped (the tokenizer splits on
whitespace and hyphens), identity terms are dropped so that group mentions
carry no polarity of their own, and a small supplementary set of nouns and
verbs common in discussions of discrimination is appended.

usage: build_sentiment_lexicon.py path/to/en-sentiment.xml > sentiment_default.tsv
"""

import re
import sys
import xml.etree.ElementTree as ET
from collections import defaultdict

NEGATORS = [
    "not", "no", "never", "none", "nobody", "nothing", "neither", "nor",
    "nowhere", "without", "cannot", "can't", "don't", "doesn't", "didn't",
    "isn't", "aren't", "wasn't", "weren't", "won't", "wouldn't", "shouldn't",
    "couldn't", "hasn't", "haven't", "hadn't", "ain't", "mustn't",
]

INTENSIFIERS = {
    "very": 1.3, "really": 2.0, "definitely": 2.0, "especially": 2.0,
    "seriously": 2.0, "extremely": 1.5, "highly": 1.5, "incredibly": 1.5,
    "deeply": 1.3, "truly": 1.3, "particularly": 1.3, "quite": 1.2,
    "somewhat": 0.7, "slightly": 0.5,
}

# Group identity terms. Kept out of the sentiment lexicon on purpose.
IDENTITY = {
    "black", "white", "brown", "yellow", "red", "asian", "african", "american",
    "hispanic", "latino", "latina", "native", "indigenous", "jewish", "muslim",
    "christian", "gay", "lesbian", "female", "male", "feminine", "masculine",
    "colored", "negro", "foreign", "immigrant", "ethnic", "racial", "oriental",
    "transgender", "queer", "straight", "old", "young",
}

SUPPLEMENT = {
    # token: (polarity, subjectivity)
    "discrimination": (-0.6, 0.6), "racism": (-0.7, 0.7), "sexism": (-0.7, 0.7),
    "oppression": (-0.7, 0.7), "injustice": (-0.7, 0.7), "inequality": (-0.5, 0.5),
    "inequity": (-0.5, 0.5), "prejudice": (-0.6, 0.7), "stereotype": (-0.4, 0.6),
    "stereotypes": (-0.4, 0.6), "bias": (-0.4, 0.5), "violence": (-0.7, 0.5),
    "brutality": (-0.8, 0.6), "exclusion": (-0.5, 0.5), "marginalization": (-0.5, 0.5),
    "segregation": (-0.6, 0.5), "harassment": (-0.7, 0.6), "hatred": (-0.8, 0.8),
    "trauma": (-0.6, 0.6), "struggle": (-0.3, 0.5), "struggles": (-0.3, 0.5),
    "barriers": (-0.3, 0.4), "hardship": (-0.5, 0.6), "suffering": (-0.6, 0.7),
    "massacre": (-0.9, 0.6), "exploitation": (-0.6, 0.6), "poverty": (-0.4, 0.4),
    "threat": (-0.4, 0.5), "failure": (-0.5, 0.5), "crisis": (-0.5, 0.5),
    "harm": (-0.5, 0.5), "harms": (-0.5, 0.5), "damage": (-0.5, 0.5),
    "progress": (0.4, 0.4), "achievement": (0.5, 0.5), "achievements": (0.5, 0.5),
    "accomplishments": (0.5, 0.5), "resilience": (0.5, 0.6), "empowerment": (0.5, 0.6),
    "celebrate": (0.6, 0.6), "celebrated": (0.5, 0.5), "celebration": (0.6, 0.6),
    "pride": (0.5, 0.7), "justice": (0.4, 0.5), "equality": (0.4, 0.5),
    "equity": (0.4, 0.5), "inclusion": (0.4, 0.5), "opportunity": (0.4, 0.4),
    "opportunities": (0.4, 0.4), "success": (0.6, 0.5), "leadership": (0.3, 0.4),
    "courage": (0.6, 0.7), "legacy": (0.3, 0.4), "contributions": (0.4, 0.4),
    "innovation": (0.5, 0.5), "dignity": (0.5, 0.6), "respect": (0.5, 0.6),
    "support": (0.3, 0.4), "thrive": (0.6, 0.6), "flourished": (0.6, 0.6),
    "inspire": (0.6, 0.7), "inspired": (0.6, 0.7), "triumph": (0.7, 0.7),
    "hope": (0.4, 0.6), "freedom": (0.5, 0.5), "fairness": (0.5, 0.5),
}


# Forms the C++ tokenizer keeps as exactly one word.
SINGLE_WORD = re.compile(r"[a-z0-9\u00c0-\u024f]+")


def main(path: str) -> None:
    root = ET.parse(path).getroot()
    senses = defaultdict(list)
    for w in root.iter("word"):
        form = w.get("form").lower()
        if not SINGLE_WORD.fullmatch(form):
            continue
        senses[form].append((float(w.get("polarity")), float(w.get("subjectivity"))))

    skip = set(NEGATORS) | set(INTENSIFIERS) | IDENTITY
    entries = {}
    for form, vals in senses.items():
        if form in skip or "'" in form:
            continue
        pol = sum(v[0] for v in vals) / len(vals)
        sub = sum(v[1] for v in vals) / len(vals)
        entries[form] = (round(pol, 4), round(sub, 4))
    for form, val in SUPPLEMENT.items():
        entries.setdefault(form, val)

    out = sys.stdout
    out.write("# token\tpolarity\tsubjectivity\tkind\tmultiplier\n")
    out.write("# Derived from the Pattern adjective lexicon (PDDL) plus a supplementary set.\n")
    for form in sorted(entries):
        pol, sub = entries[form]
        out.write(f"{form}\t{pol:g}\t{sub:g}\tentry\n")
    for form in NEGATORS:
        out.write(f"{form}\t0\t0\tnegator\n")
    for form, mult in INTENSIFIERS.items():
        out.write(f"{form}\t0\t0\tintensifier\t{mult:g}\n")


if __name__ == "__main__":
    main(sys.argv[1])
