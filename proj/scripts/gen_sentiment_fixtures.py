#!/usr/bin/env python3
"""Regenerate data/fixtures/sentiment_fixtures.jsonl with the reference
vaderSentiment package (pip install vaderSentiment==3.3.2).

The C++ scorer is checked against these records; this script is only run
offline when the fixture set changes.
"""
import json
import random
import sys
from pathlib import Path

from vaderSentiment.vaderSentiment import SentimentIntensityAnalyzer

HANDWRITTEN = [
    "",
    "table",
    "I felt excluded.",
    "The book was good.",
    "The book was only kind of good.",
    "At least it isn't a horrible book.",
    "The plot was good, but the characters are uncompelling and the dialog is not great.",
    "Today SUX!",
    "Today only kinda sux! But I'll get by, lol",
    "Make sure you :) or :D today!",
    "Not bad at all",
    "Sentiment analysis has never been good.",
    "Sentiment analysis has never been this good!",
    "Other sentiment analysis tools can be quite bad.",
    "Without a doubt, excellent idea.",
    "Roger Dodger is one of the least compelling variations on this theme.",
    "Roger Dodger is at least compelling as a variation on the theme.",
    "Not such a badass after all.",
    "No problem at all, the staff were great",
    "no",
    "No, I don't think so.",
    "I have no friends here and no support.",
    "My advisor is AMAZING but the department is a MESS.",
    "It was okay I guess???",
    "Why is housing so expensive?!?!",
    "I love my classes!!!!!",
    "I hate the parking situation on campus.",
    "The dining hall food is terrible and overpriced.",
    "Honestly the professors here are really helpful and kind.",
    "Greek life feels very exclusive and it makes me sad.",
    "I'm not happy with the mental health resources.",
    "The counseling center was not helpful at all.",
    "We never felt welcome in the dorms.",
    "I never felt so welcome anywhere.",
    "The library is a great place to study.",
    "It's fine.",
    "N/A",
    "idk",
    "Everything is kind of stressful right now but my friends help me a lot.",
    "I was absolutely thrilled when I got into the research lab.",
    "I barely passed and I feel awful about it.",
    "The campus is beautiful, but the tuition is ridiculous.",
    "Last semester in the library I waited two hours for help.",
    "Professor Smith's EECS 280 lectures often run overtime.",
    "Our club lost funding and we were devastated.",
    "I think the advising system is broken.",
    "My roommate and I get along really well.",
    "The bus stop near my dorm is always crowded.",
    "It's the bomb, honestly.",
    "Yeah right, like they care.",
    "I'm somewhat satisfied with my program.",
    "The workload is extremely heavy and I am exhausted.",
    "I felt supported by my teammates during finals week.",
    "Discrimination is a real problem here.",
    "I'm proud of what we accomplished this year.",
    "Not great, not terrible.",
    "Nothing good has happened to me here.",
    "Without support, I would have dropped out.",
    "I'd say it's sort of okay.",
    "The new gym is AWESOME!",
    "The wifi is SO BAD in the dorms",
    "😀 great experience",
    "I feel lonely 😢 most weekends",
]

SUBJECTS = [
    "my advisor", "the dining hall", "campus housing", "the counseling center",
    "my professors", "the career fair", "our student union", "the library staff",
    "Greek life", "the registrar", "my lab group", "the financial aid office",
    "the commute", "the orientation program", "my classes",
]
ADJECTIVES = [
    "helpful", "frustrating", "amazing", "terrible", "fine", "welcoming",
    "stressful", "unfair", "supportive", "confusing", "wonderful", "awful",
    "useless", "great", "disappointing", "friendly", "hostile", "okay",
    "boring", "excellent",
]
BOOSTERS = ["", "", "very ", "really ", "extremely ", "kind of ", "somewhat ",
            "slightly ", "totally ", "incredibly ", "barely "]
NEGATORS = ["", "", "", "not ", "never ", "isn't ".replace("isn't ", "")]
OPENERS = ["", "", "Honestly, ", "I think ", "I feel like ", "To be honest ",
           "We all agree ", "Sometimes "]
ENDINGS = [".", ".", "!", "!!", "?", "??", "...", "!!!"]
CLAUSES = [
    "", "", "", " but I still like it here", " and I am worried about it",
    " but nobody listens", " and that makes me happy",
    " but it could be worse", " and I hate that",
]


def synth(rng):
    subj = rng.choice(SUBJECTS)
    adj = rng.choice(ADJECTIVES)
    boost = rng.choice(BOOSTERS)
    neg = rng.choice(NEGATORS)
    opener = rng.choice(OPENERS)
    clause = rng.choice(CLAUSES)
    end = rng.choice(ENDINGS)
    verb = "is" if not subj.endswith("s") or subj.startswith("the") else "are"
    if subj in ("my professors", "my classes"):
        verb = "are"
    text = f"{opener}{subj} {verb} {neg}{boost}{adj}{clause}{end}"
    if rng.random() < 0.15:
        text = text.replace(adj, adj.upper())
    return text[0].upper() + text[1:]


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "data/fixtures/sentiment_fixtures.jsonl")
    rng = random.Random(20241015)
    texts = list(HANDWRITTEN)
    seen = set(texts)
    while len(texts) < 320:
        t = synth(rng)
        if t not in seen:
            seen.add(t)
            texts.append(t)
    analyzer = SentimentIntensityAnalyzer()
    with out.open("w", encoding="utf-8") as f:
        for t in texts:
            compound = analyzer.polarity_scores(t)["compound"]
            f.write(json.dumps({"text": t, "compound": compound}, ensure_ascii=False) + "\n")
    print(f"wrote {len(texts)} fixtures to {out}")


if __name__ == "__main__":
    main()
