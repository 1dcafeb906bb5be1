#!/usr/bin/env python3
"""Regenerates the demonstration lexicon and the fixture corpora.

Output is deterministic; rerunning leaves the files byte-identical.
"""

import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

LEXICON = {
    "function": "the a an of to in on at by for with from as and or but if than then that this these those "
                "which who whom whose what when where why how it its he she they them his her their we our you your",
    "pronoun": "i me my mine we us our he him his she her they them their it its you your yours",
    "posemo": "good great brilliant excellent amazing wonderful beautiful best love* lovely nice happy* glad "
              "admir* superb outstanding fine pleas* delight* gorgeous perfect* splendid",
    "negemo": "bad awful terribl* horribl* hate* hatred ugly worst evil cruel* disgrac* shame* sad* fear* "
              "angry anger* nasty vicious tragic* disaster* corrupt*",
    "anger": "hate* hatred angry anger* rage* furious hostil* vicious cruel* attack* fight* violen*",
    "certain": "always never certain* clearly definite* undoubt* obvious* absolute* truly fact* proven "
               "indeed sure* doubtless total*",
    "tentat": "maybe perhaps possibl* probabl* seem* appear* guess* suppos* unclear uncertain* allegedly "
              "reportedly apparent* somewhat",
    "insight": "know* think* believ* realiz* understand* consider* discover* learn* recogni* reveal* "
               "acknowledg* admit* claim*",
    "cause": "because caus* effect* hence therefore thus reason* result* lead* led origin*",
    "discrep": "should would could must need* ought want* hope* wish*",
    "social": "friend* family people person* public citizen* community* neighbo* team* member* crowd*",
    "family": "mother father brother sister son daughter wife husband famil* cousin* uncle aunt",
    "work": "job* work* career* employ* office* senator* council* director* manager* engineer* "
            "company* business*",
    "money": "money cash tax* toll* pay* paid cost* price* wealth* rich* poor* budget* fund* economic*",
    "power": "power* control* leader* dominat* ruler* govern* command* authorit* influen* elite*",
    "achieve": "achiev* win* won success* accomplish* master* victor* triumph* award* champion*",
    "relig": "god* church* faith* pray* holy* sacred* spirit* saint* bless* worship*",
    "death": "death* dead die* died dying kill* murder* funeral* grave* suicide*",
    "space": "above below over under near far around between inside outside bridge* river* city cities "
             "town* street* road*",
    "time": "year* month* day* week* today yesterday tomorrow century* decade* until since before after "
            "opened founded",
    "number": "one two three four five six seven eight nine ten first second third hundred* thousand* "
              "million* billion*",
    "percept": "see* saw look* watch* hear* heard listen* feel* felt touch* taste* smell*",
}


def write_lexicon():
    lines = ["# Demonstration category lexicon in the LIWC dictionary style.",
             "# pattern<TAB>categories; a trailing * matches any continuation."]
    patterns = {}
    for category, words in LEXICON.items():
        for w in words.split():
            patterns.setdefault(w, [])
            if category not in patterns[w]:
                patterns[w].append(category)
    for w in sorted(patterns):
        lines.append(f"{w}\t{','.join(patterns[w])}")
    (HERE / "lexicon" / "demo_lexicon.tsv").write_text("\n".join(lines) + "\n")
    return len(patterns)


SUBJECTS = {
    "person": ["The senator", "The mayor", "The author", "The director", "The coach", "The singer",
               "The painter", "The governor"],
    "place": ["The bridge", "The museum", "The harbor", "The old town", "The cathedral", "The stadium",
              "The park", "The library"],
    "event": ["The festival", "The election", "The strike", "The trial", "The ceremony", "The summit",
              "The parade", "The tournament"],
}

NEUTRAL_PREDICATES = [
    "was founded in {year}.",
    "opened to the public in {year}.",
    "was described in a report published in {year}.",
    "is located near the river.",
    "received funding from the city council in {year}.",
    "was renovated between {year} and {year2}.",
    "has been the subject of two books.",
    "was mentioned in the annual budget of {year}.",
    "moved to a new site in {year}.",
    "held its first meeting in {year}.",
]

BIASED_PREDICATES = [
    "is without doubt the most brilliant in the country.",
    "was a shameful disaster for everyone involved.",
    "gave a truly amazing performance in {year}.",
    "is clearly the worst example of its kind.",
    "was ruined by corrupt officials in {year}.",
    "is an absolutely beautiful masterpiece.",
    "was a vicious attack on decent people.",
    "remains a glorious triumph of the human spirit.",
    "is obviously a terrible waste of public money.",
    "was notoriously incompetent during {year}.",
]


def fill(template, rng):
    year = rng.randint(1890, 2015)
    return template.format(year=year, year2=year + rng.randint(1, 9))


def write_corpora():
    rng = random.Random(20180501)
    biased, pool = [], []
    n = 0
    for article_type, subjects in SUBJECTS.items():
        for i in range(20):
            subject = rng.choice(subjects)
            text = f"{subject} {fill(rng.choice(BIASED_PREDICATES), rng)}"
            n += 1
            biased.append({"id": f"b{n:03d}", "text": text, "label": "biased", "confidence": 1.0,
                           "article_type": article_type, "source": "crowd_pov"})
    n = 0
    for article_type, subjects in SUBJECTS.items():
        for i in range(45):
            subject = rng.choice(subjects)
            text = f"{subject} {fill(rng.choice(NEUTRAL_PREDICATES), rng)}"
            n += 1
            pool.append({"id": f"f{n:03d}", "text": text, "label": "neutral", "confidence": 1.0,
                         "article_type": article_type, "source": "featured"})
    for name, rows in (("biased.jsonl", biased), ("featured_pool.jsonl", pool)):
        with open(HERE / "fixtures" / name, "w") as out:
            for r in rows:
                out.write(json.dumps(r) + "\n")
    # Unlabelled input for classify/attention.
    with open(HERE / "fixtures" / "unlabelled.jsonl", "w") as out:
        for r in biased[:3] + pool[:3]:
            out.write(json.dumps({"id": r["id"], "text": r["text"]}) + "\n")


# 4 workers x 6 items, one rating missing, used by the agreement example.
JUDGMENTS = [
    ("w1", "i1", "biased"), ("w2", "i1", "biased"), ("w3", "i1", "biased"), ("w4", "i1", "neutral"),
    ("w1", "i2", "neutral"), ("w2", "i2", "neutral"), ("w3", "i2", "neutral"), ("w4", "i2", "neutral"),
    ("w1", "i3", "biased"), ("w2", "i3", "neutral"), ("w3", "i3", "dont_know"), ("w4", "i3", "biased"),
    ("w1", "i4", "neutral"), ("w2", "i4", "neutral"), ("w3", "i4", "biased"),
    ("w1", "i5", "biased"), ("w2", "i5", "biased"), ("w3", "i5", "biased"), ("w4", "i5", "biased"),
    ("w1", "i6", "dont_know"), ("w2", "i6", "neutral"), ("w3", "i6", "neutral"), ("w4", "i6", "biased"),
]


def write_judgments():
    with open(HERE / "fixtures" / "judgments.jsonl", "w") as out:
        for w, i, r in JUDGMENTS:
            out.write(json.dumps({"worker_id": w, "item_id": i, "rating": r}) + "\n")


if __name__ == "__main__":
    count = write_lexicon()
    write_corpora()
    write_judgments()
    print(f"lexicon patterns: {count}")
