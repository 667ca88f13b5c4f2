#!/usr/bin/env python3
"""Writes jesse_replay.json: scripted replies for one full pipeline run."""
import json
import os

SENTENCE = "Jesse was pet sitting for Addison, so Jesse came to Addison’s house and walked their dog."

explicit = ["(Jesse, petSittingFor, Addison)", "(Jesse, goesTo, house)", "(Jesse, walks, dog)", "(Addison, owns, dog)"]
implicit_ok = ["(Addison, livesIn, house)", "(Addison, is, away)", "(dog, isAt, house)", "(Jesse, likes, dogs)"]
validated = explicit + implicit_ok

ES = ["event", "event", "event", "state", "state", "state", "state", "state"]

# Ordered-pair tags; anything absent is none.
tags = {
    (1, 2): "before", (2, 1): "after",
    (0, 1): "while", (1, 0): "while",
    (0, 2): "while", (2, 0): "while",
    (0, 5): "while", (5, 0): "while",
    (2, 3): "while", (3, 2): "before",  # inconsistent, reconciles to none
}


def batches(n, size=12):
    fwd = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rev = [(j, i) for (i, j) in fwd]
    out = []
    for group in (fwd, rev):
        out += [group[k:k + size] for k in range(0, len(group), size)]
    return out


def temporal_reply(batch):
    items = []
    for i, j in batch:
        items.append("(%s, %s) -> <%s>" % (validated[i], validated[j], tags.get((i, j), "none")))
    return "[" + ", ".join(items) + "]"


reject = "no; The text does not imply that Addison is the legal owner of the house."
replies = {
    "entity_extraction": ["Jesse <per>; Addison <per>; house <fac>; dog <ani>"],
    "explicit_extraction": [
        "[(Jesse, petSittingFor, Addison) `Jesse was pet sitting for Addison`; (Jesse, goesTo, house) `Jesse came to "
        "Addison’s house`; (Jesse, walks, dog) `walked their dog`; (Addison, owns, dog) `their dog`]"
    ],
    "implicit_extraction": [
        "[(Addison, owns, house), (Addison, is, away), (dog, isAt, house), (dog, wants, (dog, goesOut, <none>)), "
        "(Jesse, likes, dogs), (Addison, owns, dog)]"
    ],
    # one verdict per duplicate check, in the order the candidates reach step 4
    "duplicate_removal": ["no", "no", "no", "no", "no", "no", "no", "no", "yes"],
    "inference_challenge": [
        reject,
        "yes",
        "yes",
        "yes",
        "no; Nothing in the text says the dog wants to go out.",
        "no; The text does not say the dog needs anything.",
        "no; Being walked does not show what the dog wants.",
        "yes",
    ],
    "inference_correction": [
        "(Addison, livesIn, house)",
        "(dog, needs, (dog, goesOut, <none>))",
        "(dog, wants, (dog, walks, <none>))",
    ],
    "inference_explanation": [
        "[(Jesse, goesTo, house)]",
        "[(Jesse, petSittingFor, Addison)]",
        "[(Jesse, petSittingFor, Addison), (Jesse, goesTo, house)]",
        "[(Jesse, walks, dog), (Jesse, cameTo, house)]",
    ],
    "event_state_grounding": [
        "[" + "; ".join("%s <%s> `none`" % (t, k) for t, k in zip(validated, ES)) + "]"
    ],
    "temporal_relations": [temporal_reply(b) for b in batches(len(validated))],
}

out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "jesse_replay.json")
with open(out, "w", encoding="utf-8") as f:
    json.dump({"sentence": SENTENCE, "replies": replies}, f, ensure_ascii=False, indent=2)
    f.write("\n")
print(out, sum(len(v) for v in replies.values()), "replies")
