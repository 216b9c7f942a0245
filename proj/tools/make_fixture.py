#!/usr/bin/env python3
"""Writes the bundled synthetic survey fixture (data/fixture_127.csv).

127 records: 104 valid journeys (86 purchase, 18 non-purchase) and 23 that
cleansing must reject. The output is deterministic.
"""

import argparse
import random
from pathlib import Path

ACCEPTED = 104
PURCHASES = 86
ST2_TOTAL = 137  # mean st2 length 137 / 104 = 1.32

REJECTED = [
    # NoOutcome
    "c,e,g", "a", "c,e", "b,f,h", "d,g", "c,c,e", "a,e,f,g", "b", "c,g,e,h",
    # EventAfterOutcome
    "c,i,e", "c,e,i,g", "b,k,c", "c,g,j,a",
    # IllegalTransition (journey does not open with an awareness item)
    "e,c,g,k", "g,b,i", "f,e,i", "h,j",
    # PostPurchaseItem
    "c,e,i,l", "c,g,j,m", "d,l,e,i",
    # UnknownSymbol
    "c,z,i", "c,e,x,k",
    # TooLong
    "c,e,f,g,h,e,f,g,h,e,f,i",
]

# Hand-picked pairs for the counterfactual examples: (base, counterfactual).
CASES = [
    ("c,c,e,g,k", "c,b,e,g,i"),
    ("d,e,f,k", "c,e,f,i"),
    ("d,g,h,k", "d,g,e,j"),
    ("b,k", "c,i"),
]

ST1_PURCHASE = ["c"] * 5 + ["a"] * 3 + ["b"] * 2 + ["d"]
ST1_NON = ["d"] * 4 + ["b"] * 3 + ["a"]
ST2_PURCHASE = ["e"] * 4 + ["g"] * 4 + ["f"] * 2 + ["h"]
ST2_NON = ["h"] * 4 + ["f"] * 3 + ["e"]


def st1_of(items):
    return [x for x in items if x in "abcd"]


def st2_of(items):
    return [x for x in items if x in "efgh"]


def make_journey(rng, st2_len, purchase):
    st1_pool = ST1_PURCHASE if purchase else ST1_NON
    st2_pool = ST2_PURCHASE if purchase else ST2_NON
    st1 = [rng.choice(st1_pool) for _ in range(1 if rng.random() < 0.75 else 2)]
    st2 = [rng.choice(st2_pool) for _ in range(st2_len)]
    items = list(st1) + st2
    # Occasional return to awareness after consideration.
    if st2_len >= 2 and rng.random() < 0.15:
        items.insert(len(st1) + 1, rng.choice(st1_pool))
    outcome = ("i" if rng.random() < 0.7 else "j") if purchase else "k"
    return items + [outcome]


def st2_lengths(rng, n, total, purchase_flags):
    lengths = [rng.choice([0, 1, 1, 1, 2, 2, 3]) if p else rng.choice([0, 0, 1]) for p in purchase_flags]
    lengths[0] = 6
    lengths[1] = 0
    while sum(lengths) != total:
        i = rng.randrange(2, n)
        if sum(lengths) < total and lengths[i] < 5:
            lengths[i] += 1
        elif sum(lengths) > total and lengths[i] > 0:
            lengths[i] -= 1
    return lengths


def build(seed):
    rng = random.Random(seed)
    fixed = [j for pair in CASES for j in pair]
    fixed_purchase = sum(1 for j in fixed if not j.endswith("k"))
    fixed_st2 = sum(len(st2_of(j.split(","))) for j in fixed)

    n_random = ACCEPTED - len(fixed)
    purchase_flags = [True] * (PURCHASES - fixed_purchase) + [False] * (n_random - (PURCHASES - fixed_purchase))
    rng.shuffle(purchase_flags)
    lengths = st2_lengths(rng, n_random, ST2_TOTAL - fixed_st2, purchase_flags)

    seen = set(fixed)
    journeys = []
    for st2_len, purchase in zip(lengths, purchase_flags):
        while True:
            items = make_journey(rng, st2_len, purchase)
            key = ",".join(items)
            # The first case base must stay the only journey with awareness c,c.
            if st1_of(items) == ["c", "c"] or key in seen:
                continue
            seen.add(key)
            journeys.append(key)
            break

    # The case-1 counterfactual goes first so it wins every tie by index.
    accepted = [CASES[0][1]]
    rest = journeys + [j for pair in CASES for j in pair if j != CASES[0][1]]
    rng.shuffle(rest)
    accepted += rest

    rows = [(j, True) for j in accepted]
    for bad in REJECTED:
        rows.insert(rng.randrange(1, len(rows) + 1), (bad, False))
    return [f"r{idx:03d},{items}" for idx, (items, _) in enumerate(rows, start=1)]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20240607)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "fixture_127.csv")
    args = parser.parse_args()
    rows = build(args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
