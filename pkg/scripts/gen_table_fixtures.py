#!/usr/bin/env python3
"""Write the published benchmark comparison tables to tests/data/.

Two tables: the 18-dataset zero-shot comparison (7 model columns) and the
7-dataset out-of-domain comparison. Each fixture carries the per-cell
scores, the published Average row, and the published delta annotations for
the fine-tuned columns, so the report renderer can be checked against
exactly what was printed.
"""
from __future__ import annotations

import json
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

# dataset, NuNerZero-span, S-v2.1, S-News, dS, M-v2.1, M-News, dM, L-v2.1, L-News, dL
TABLE_18 = [
    ("ACE 2005",           23.6, 32.8, 23.2, "-9.6", 31.3, 23.3, "-8.0", 33.3, 28.9, "-4.4"),
    ("AnatEM",             29.2, 35.1, 36.5, "+1.4", 29.2, 36.8, "+7.6", 24.7, 34.8, "+10.1"),
    ("Broad Tweet Corpus", 60.2, 63.0, 69.2, "+6.2", 63.9, 67.7, "+3.8", 59.9, 69.2, "+9.3"),
    ("CoNLL 2003",         63.6, 59.8, 60.9, "+1.1", 61.5, 63.0, "+1.5", 59.5, 56.4, "-3.1"),
    ("FabNER",             24.0, 17.9, 18.9, "+1.0", 17.0, 20.6, "+3.6", 19.2, 22.5, "+3.3"),
    ("FindVehicle",        43.7, 38.0, 43.1, "+5.1", 36.0, 38.7, "+2.7", 51.9, 52.9, "+1.0"),
    ("GENIA_NER",          55.0, 47.7, 47.2, "-0.5", 55.4, 54.0, "-1.4", 55.3, 55.0, "-0.3"),
    ("HarveyNER",          24.9, 18.3, 23.1, "+4.8", 23.2, 26.7, "+3.5", 18.7, 15.8, "-2.9"),
    ("MultiNERD",          63.9, 57.3, 68.3, "+11.0", 55.3, 67.1, "+11.8", 48.7, 64.0, "+15.3"),
    ("Ontonotes",          31.6, 28.1, 35.1, "+7.0", 25.7, 33.2, "+7.5", 19.5, 32.0, "+12.5"),
    ("PolyglotNER",        42.8, 40.4, 43.9, "+3.5", 42.1, 45.3, "+3.2", 39.6, 42.5, "+2.9"),
    ("TweetNER7",          40.1, 36.5, 35.6, "-0.9", 38.2, 38.6, "+0.4", 36.1, 35.5, "-0.6"),
    ("WikiANN en",         58.1, 55.3, 53.6, "-1.7", 55.5, 53.0, "-2.5", 55.5, 52.5, "-3.0"),
    ("WikiNeural",         72.3, 64.7, 76.0, "+11.3", 67.5, 77.9, "+10.4", 62.9, 70.3, "+7.4"),
    ("bc2gm",              52.7, 50.4, 49.4, "-1.0", 54.0, 54.6, "+0.6", 45.2, 46.9, "+1.7"),
    ("bc4chemd",           50.8, 49.0, 49.4, "+0.4", 47.3, 51.1, "+3.8", 53.1, 55.1, "+2.0"),
    ("bc5cdr",             69.7, 66.1, 70.9, "+4.8", 67.0, 72.5, "+5.5", 68.4, 71.2, "+2.8"),
    ("ncbi",               61.4, 56.6, 57.9, "+1.3", 60.3, 64.5, "+4.2", 59.7, 65.5, "+5.8"),
]
AVERAGES_18 = {
    "NuNerZero-span": "48.2", "S-v2.1": "45.4", "S-News": "47.9",
    "M-v2.1": "46.1", "M-News": "49.4", "L-v2.1": "45.1", "L-News": "48.4",
}
AVERAGE_DELTAS_18 = {"S-News": "+2.5", "M-News": "+3.3", "L-News": "+3.3"}

# dataset, S-v2.1, S-News, dS, M-v2.1, M-News, dM, L-v2.1, L-News, dL
TABLE_OOD = [
    ("AI",         52.6, 57.0, "+4.4", 52.0, 57.1, "+5.1", 53.4, 57.0, "+3.6"),
    ("Literature", 64.9, 63.5, "-1.4", 62.6, 64.3, "+1.7", 57.9, 60.4, "+2.5"),
    ("Music",      66.7, 64.7, "-2.0", 68.9, 70.3, "+1.4", 67.1, 65.2, "-1.9"),
    ("Politics",   64.3, 65.6, "+1.3", 65.7, 67.1, "+1.4", 64.9, 62.9, "-2.0"),
    ("Science",    64.3, 63.9, "-0.4", 65.2, 67.9, "+2.7", 62.0, 65.9, "+3.9"),
    ("Movie",      47.2, 46.9, "-0.3", 46.5, 45.2, "-1.3", 51.3, 56.6, "+5.3"),
    ("Restaurant", 20.8, 25.7, "+4.9", 30.9, 35.1, "+4.2", 46.0, 41.8, "-4.2"),
]
AVERAGES_OOD = {
    "S-v2.1": "54.4", "S-News": "55.3", "M-v2.1": "56.0",
    "M-News": "58.1", "L-v2.1": "57.5", "L-News": "58.5",
}
AVERAGE_DELTAS_OOD = {"S-News": "+0.9", "M-News": "+2.1", "L-News": "+1.0"}


def main() -> None:
    models_18 = ["NuNerZero-span", "S-v2.1", "S-News", "M-v2.1", "M-News", "L-v2.1", "L-News"]
    scores_18: dict[str, dict[str, float]] = {m: {} for m in models_18}
    deltas_18: dict[str, dict[str, str]] = {m: {} for m in ("S-News", "M-News", "L-News")}
    for row in TABLE_18:
        name = row[0]
        scores_18["NuNerZero-span"][name] = row[1]
        scores_18["S-v2.1"][name] = row[2]
        scores_18["S-News"][name] = row[3]
        deltas_18["S-News"][name] = row[4]
        scores_18["M-v2.1"][name] = row[5]
        scores_18["M-News"][name] = row[6]
        deltas_18["M-News"][name] = row[7]
        scores_18["L-v2.1"][name] = row[8]
        scores_18["L-News"][name] = row[9]
        deltas_18["L-News"][name] = row[10]
    (DATA / "table_18ner.json").write_text(json.dumps({
        "datasets": [r[0] for r in TABLE_18],
        "models": models_18,
        "scores": scores_18,
        "baselines": {"S-News": "S-v2.1", "M-News": "M-v2.1", "L-News": "L-v2.1"},
        "expected_deltas": deltas_18,
        "expected_averages": AVERAGES_18,
        "expected_average_deltas": AVERAGE_DELTAS_18,
    }, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")

    models_ood = ["S-v2.1", "S-News", "M-v2.1", "M-News", "L-v2.1", "L-News"]
    scores_ood: dict[str, dict[str, float]] = {m: {} for m in models_ood}
    deltas_ood: dict[str, dict[str, str]] = {m: {} for m in ("S-News", "M-News", "L-News")}
    for row in TABLE_OOD:
        name = row[0]
        scores_ood["S-v2.1"][name] = row[1]
        scores_ood["S-News"][name] = row[2]
        deltas_ood["S-News"][name] = row[3]
        scores_ood["M-v2.1"][name] = row[4]
        scores_ood["M-News"][name] = row[5]
        deltas_ood["M-News"][name] = row[6]
        scores_ood["L-v2.1"][name] = row[7]
        scores_ood["L-News"][name] = row[8]
        deltas_ood["L-News"][name] = row[9]
    (DATA / "table_ood.json").write_text(json.dumps({
        "datasets": [r[0] for r in TABLE_OOD],
        "models": models_ood,
        "scores": scores_ood,
        "baselines": {"S-News": "S-v2.1", "M-News": "M-v2.1", "L-News": "L-v2.1"},
        "expected_deltas": deltas_ood,
        "expected_averages": AVERAGES_OOD,
        "expected_average_deltas": AVERAGE_DELTAS_OOD,
    }, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {DATA / 'table_18ner.json'} and {DATA / 'table_ood.json'}")


if __name__ == "__main__":
    main()
