#!/usr/bin/env python3
"""Generate the bundled synthetic replay fixtures and the RAG demo pool.

The response texts are synthetic: sentences are drawn from fixed phrase banks
with a seeded RNG, so reruns produce byte-identical files. They stand in for
model output that was never published and must not be read as real responses.

Usage: generate_fixtures.py [--data DIR] [--seed N]
"""

import argparse
import csv
import json
import random
import re
from pathlib import Path

MODELS = ("gpt35", "latimer")

OPENERS = {
    "latimer": [
        "Looking at {topic}, the history matters.",
        "Any account of {topic} should start from lived experience.",
        "{Topic} has deep roots that shape the present.",
        "Communities affected by {topic} describe it in their own terms.",
    ],
    "gpt35": [
        "There are several perspectives on {topic}.",
        "{Topic} is a widely discussed subject.",
        "Researchers have examined {topic} from many angles.",
        "Understanding {topic} involves a number of factors.",
    ],
}

NEUTRAL = [
    "Studies describe several contributing factors.",
    "Policy, economics and culture all play a part.",
    "Data from surveys and census records inform the discussion.",
    "Scholars continue to study the question.",
    "Outcomes vary by region and by industry.",
    "Institutions have adopted a range of policies in response.",
]

POSITIVE = [
    "Recent progress has been encouraging.",
    "Community organizers have achieved remarkable results.",
    "Mentorship programs show strong and hopeful outcomes.",
    "Many leaders offer an inspiring example.",
    "Targeted investment has produced significant improvement.",
    "Advocates celebrate real gains in representation.",
]

NEGATIVE = [
    "Persistent discrimination remains a serious problem.",
    "Unfair barriers still limit opportunity.",
    "The harm caused by exclusion is difficult to overstate.",
    "Racism and bias continue to produce unequal outcomes.",
    "Stereotypes can be damaging and hard to dislodge.",
    "Progress has been slow and often painful.",
]

CLOSERS = [
    "Sustained attention is needed.",
    "The picture is not simple.",
    "More work remains to be done.",
    "Listening to those most affected is essential.",
]

# Probability of drawing a positive, negative or neutral middle sentence.
TONE = {
    "latimer": (0.30, 0.40, 0.30),
    "gpt35": (0.30, 0.20, 0.50),
}

LEADING_VERBS = re.compile(
    r"^(discuss|explain|analyze|analyse|examine|describe|explore|reflect on|evaluate|"
    r"assess|investigate|compare)\s+", re.IGNORECASE)


def topic_of(question: str) -> str:
    q = question.strip().rstrip(".?!")
    m = LEADING_VERBS.match(q)
    if m:
        return q[m.end():]
    return "this question"


def response(rng: random.Random, model: str, question: str) -> str:
    topic = topic_of(question)
    opener = rng.choice(OPENERS[model])
    opener = opener.replace("{Topic}", topic[:1].upper() + topic[1:]).replace("{topic}", topic)
    pos, neg, _ = TONE[model]
    middle = []
    for _ in range(rng.randint(2, 4)):
        roll = rng.random()
        bank = POSITIVE if roll < pos else NEGATIVE if roll < pos + neg else NEUTRAL
        choices = [x for x in bank if x not in middle]
        middle.append(rng.choice(choices))
    return " ".join([opener, *middle, rng.choice(CLOSERS)])


POOL = [
    # doc_id, source, topic, text
    ("d01", "journal", "gender", "Women in leadership positions across the technology industry report mentorship and sponsorship as key factors."),
    ("d02", "journal", "gender", "The gender pay gap across industries reflects occupational patterns and differences in hours."),
    ("d03", "news", "gender", "Women in STEM fields describe recruitment programs and the representation of role models."),
    ("d04", "news", "race", "Police reform efforts after the Black Lives Matter movement include body cameras and review boards."),
    ("d05", "encyclopedia", "race", "The civil rights movement organized marches, boycotts and court challenges across the country."),
    ("d06", "encyclopedia", "race", "Representation of minorities in the legal profession has changed over several decades."),
    ("d07", "journal", "race", "Research on intergenerational effects in marginalized communities draws on history and health data."),
    ("d08", "news", "class", "Gentrification in urban areas changes housing costs for low-income communities and long-term residents."),
    ("d09", "journal", "class", "The digital divide in access to technology follows income, geography and age."),
    ("d10", "encyclopedia", "class", "Working-class characters in literature and media appear across genres and periods."),
    ("d11", "blog", "lgbtq", "LGBTQ+ parents in adoption and surrogacy processes describe legal and administrative steps."),
    ("d12", "journal", "lgbtq", "Representation of LGBTQ+ characters in media has expanded in television and film."),
    ("d13", "news", "family", "Single parents accessing affordable childcare weigh cost, location and working hours."),
    ("d14", "encyclopedia", "family", "Caregivers of elderly family members balance work and care responsibilities."),
    ("d15", "journal", "family", "Diverse family structures in children's media include single parents and extended families."),
    # Five polarized documents whose wording pushes the sentiment factor up.
    ("d16", "blog", "gender", "Women in leadership are a terrible, awful idea and the technology industry suffers a horrible decline."),
    ("d17", "blog", "race", "Minorities in the legal profession are dangerous, lazy and utterly incompetent, a disgusting failure."),
    ("d18", "blog", "class", "Low-income communities are pathetic and worthless, a terrible and painful drain on urban areas."),
    ("d19", "blog", "lgbtq", "LGBTQ+ parents in adoption are awful and dangerous, a horrible and disgusting trend."),
    ("d20", "blog", "family", "Single parents are pathetic and lazy, incompetent at work and raising terrible children."),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", type=Path, default=Path(__file__).resolve().parents[2] / "data")
    ap.add_argument("--seed", type=int, default=1729)
    args = ap.parse_args()

    with open(args.data / "corpus" / "appendix2.csv", newline="", encoding="utf-8") as f:
        prompts = [(int(r["id"]), r["question"]) for r in csv.DictReader(f)]

    rng = random.Random(args.seed)
    lines = []
    for model in MODELS:
        for pid, question in prompts:
            lines.append(json.dumps({"model": model, "prompt_id": pid,
                                     "text": response(rng, model, question)},
                                    ensure_ascii=False))
    out = args.data / "fixtures" / "appendix2_replay.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")

    pool = [json.dumps({"doc_id": d, "source": s, "topic": t, "text": x, "weight": 1.0})
            for d, s, t, x in POOL]
    pool_out = args.data / "rag" / "demo_pool.jsonl"
    pool_out.parent.mkdir(parents=True, exist_ok=True)
    pool_out.write_text("\n".join(pool) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
