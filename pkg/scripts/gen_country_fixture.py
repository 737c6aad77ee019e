#!/usr/bin/env python3
"""Write the published per-country dataset counts to tests/data/.

125 countries with full/train/validation/test article counts; totals
5049/3589/730/730. Used by the diversification and table tests.
"""
from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "country_distribution.json"

# name, full, train, validation, test
ROWS = [
    ("United States", 129, 86, 22, 21),
    ("Canada", 129, 100, 20, 9),
    ("United Arab Emirates", 129, 92, 12, 25),
    ("Australia", 129, 102, 14, 13),
    ("Austria", 129, 91, 17, 21),
    ("Switzerland", 129, 87, 21, 21),
    ("Lebanon", 129, 91, 17, 21),
    ("Colombia", 129, 91, 16, 22),
    ("Türkiye", 129, 92, 13, 24),
    ("Malaysia", 129, 87, 18, 24),
    ("Brazil", 129, 89, 26, 14),
    ("Portugal", 129, 103, 17, 9),
    ("Nigeria", 129, 101, 21, 7),
    ("Venezuela", 129, 87, 24, 18),
    ("Ukraine", 129, 91, 13, 25),
    ("Spain", 129, 93, 22, 14),
    ("India", 129, 79, 24, 26),
    ("Egypt", 129, 97, 13, 19),
    ("France", 129, 90, 24, 15),
    ("Russia", 129, 83, 24, 22),
    ("Germany", 129, 93, 15, 21),
    ("Argentina", 129, 87, 24, 18),
    ("Mexico", 129, 88, 23, 18),
    ("United Kingdom", 129, 93, 25, 11),
    ("Italy", 129, 99, 16, 14),
    ("Saudi Arabia", 118, 91, 13, 14),
    ("Chile", 103, 77, 14, 12),
    ("Norway", 100, 74, 11, 15),
    ("Peru", 86, 66, 10, 10),
    ("Dominican Republic", 83, 63, 8, 12),
    ("Pakistan", 83, 49, 13, 21),
    ("Ireland", 83, 59, 15, 9),
    ("Sweden", 77, 62, 9, 6),
    ("Tuvalu", 72, 43, 16, 13),
    ("Jordan", 63, 52, 5, 6),
    ("Philippines", 62, 27, 7, 28),
    ("Kazakhstan", 47, 30, 4, 13),
    ("Denmark", 45, 30, 7, 8),
    ("Ecuador", 41, 27, 6, 8),
    ("South Africa", 38, 30, 4, 4),
    ("China", 36, 26, 7, 3),
    ("El Salvador", 29, 19, 5, 5),
    ("Belarus", 28, 23, 2, 3),
    ("Singapore", 26, 14, 5, 7),
    ("Morocco", 26, 23, 2, 1),
    ("Costa Rica", 25, 19, 4, 2),
    ("Honduras", 24, 18, 1, 5),
    ("Paraguay", 23, 20, 1, 2),
    ("Netherlands", 23, 14, 6, 3),
    ("Belgium", 23, 20, 3, 0),
    ("Israel", 19, 10, 7, 2),
    ("Guatemala", 18, 12, 1, 5),
    ("Iraq", 18, 14, 1, 3),
    ("Uruguay", 18, 16, 1, 1),
    ("Qatar", 17, 12, 5, 0),
    ("Panama", 16, 12, 3, 1),
    ("Japan", 16, 9, 2, 5),
    ("Bolivia", 15, 10, 2, 3),
    ("Kuwait", 14, 8, 4, 2),
    ("Senegal", 14, 11, 3, 0),
    ("New Zealand", 14, 12, 2, 0),
    ("Algeria", 13, 9, 1, 3),
    ("Iceland", 13, 8, 4, 1),
    ("Iran", 11, 6, 2, 3),
    ("Kenya", 11, 7, 1, 3),
    ("Ghana", 11, 7, 1, 3),
    ("Sierra Leone", 10, 8, 2, 0),
    ("Luxembourg", 10, 8, 0, 2),
    ("Cuba", 10, 5, 2, 3),
    ("South Korea", 10, 8, 1, 1),
    ("Macau", 9, 7, 1, 1),
    ("Puerto Rico", 9, 6, 2, 1),
    ("Nicaragua", 9, 6, 1, 2),
    ("Bangladesh", 9, 6, 3, 0),
    ("Yemen", 8, 6, 2, 0),
    ("Palestine", 8, 5, 2, 1),
    ("Azerbaijan", 8, 6, 1, 1),
    ("Syria", 8, 6, 0, 2),
    ("Sri Lanka", 7, 4, 3, 0),
    ("Hong Kong", 7, 6, 0, 1),
    ("Latvia", 7, 2, 2, 3),
    ("Micronesia, Fed. Sts.", 7, 4, 1, 2),
    ("Croatia", 6, 6, 0, 0),
    ("EU", 5, 4, 0, 1),
    ("Oman", 5, 4, 1, 0),
    ("Estonia", 5, 3, 1, 1),
    ("Thailand", 4, 2, 0, 2),
    ("Indonesia", 4, 3, 0, 1),
    ("Armenia", 3, 1, 2, 0),
    ("Kyrgyz Republic", 3, 3, 0, 0),
    ("Libya", 3, 3, 0, 0),
    ("Tunisia", 3, 3, 0, 0),
    ("Malta", 3, 3, 0, 0),
    ("Taiwan", 3, 3, 0, 0),
    ("Tokelau", 2, 2, 0, 0),
    ("Finland", 2, 2, 0, 0),
    ("Poland", 2, 2, 0, 0),
    ("Anguilla", 2, 2, 0, 0),
    ("Afghanistan", 2, 1, 1, 0),
    ("Uzbekistan", 2, 1, 0, 1),
    ("Bahrain", 2, 1, 0, 1),
    ("Angola", 2, 0, 1, 1),
    ("Romania", 1, 0, 1, 0),
    ("Mauritania", 1, 1, 0, 0),
    ("Georgia", 1, 1, 0, 0),
    ("Benin", 1, 1, 0, 0),
    ("Hungary", 1, 1, 0, 0),
    ("British Indian Ocean Territory", 1, 1, 0, 0),
    ("St. Lucia", 1, 1, 0, 0),
    ("Fiji", 1, 1, 0, 0),
    ("Sudan", 1, 1, 0, 0),
    ("Mozambique", 1, 1, 0, 0),
    ("Greece", 1, 1, 0, 0),
    ("Uganda", 1, 1, 0, 0),
    ("Nepal", 1, 1, 0, 0),
    ("Sao Tome and Principe", 1, 0, 1, 0),
    ("Laos", 1, 1, 0, 0),
    ("Reunion", 1, 1, 0, 0),
    ("Sint Maarten", 1, 1, 0, 0),
    ("Burundi", 1, 0, 0, 1),
    ("Barbados", 1, 0, 0, 1),
    ("Lithuania", 1, 0, 0, 1),
    ("Bulgaria", 1, 0, 0, 1),
    ("San Marino", 1, 0, 0, 1),
    ("Zambia", 1, 1, 0, 0),
]


def main() -> None:
    assert len(ROWS) == 125, len(ROWS)
    for name, full, train, val, test in ROWS:
        assert full == train + val + test, name
    totals = [sum(r[i] for r in ROWS) for i in range(1, 5)]
    assert totals == [5049, 3589, 730, 730], totals
    assert sum(1 for r in ROWS if r[1] == 129) == 25

    payload = {
        "countries": [
            {"name": n, "full": f, "train": tr, "validation": v, "test": te}
            for n, f, tr, v, te in ROWS
        ],
        "totals": {"full": 5049, "train": 3589, "validation": 730, "test": 730},
    }
    OUT.write_text(json.dumps(payload, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {OUT}: {len(ROWS)} countries, totals {totals}")


if __name__ == "__main__":
    main()
