#!/usr/bin/env python3
"""Regenerate the 30-article toy corpus used by the end-to-end tests.

Layout: 6 time buckets x 2 story groups (3 + 2 members). Group members share
the first 280 body characters, so the mock enrichment produces identical
summaries inside a group and the hash-based mock embeddings become exact
duplicates; each group then clusters at full membership probability. Three
extra lines exercise the ingest filters: two disallowed languages and one
malformed record.
"""
from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "toy_corpus.jsonl"

WINDOW_START = datetime(2024, 3, 1, 0, 0, tzinfo=timezone.utc)
BUCKET_STEP = timedelta(hours=2, minutes=24)  # (14h - 2h) / 5

STORIES = [
    ("Summit on river safety", "Mayor Elena Vargas opened the Riverside Safety Summit in Lyon on Friday, joined by engineers from the Danube Water Board and observers from the European Flood Council. The summit reviewed levee inspections, sensor networks along the Rhone, and a proposal by Professor Karl Jansen to publish flood telemetry in open dashboards for downstream towns."),
    ("Chip plant announcement", "Nordic Semiconductors confirmed plans to build a wafer fabrication plant outside Tallinn, a project valued at 2.1 billion euros. Chief executive Marta Ilves told reporters that the Baltic Industry Fund and the city of Tallinn would share infrastructure costs, while analysts from Berenberg Capital questioned the timeline for cleanroom certification."),
    ("Football cup final", "Rapid Bucharest defeated Atletico Oviedo 3-1 in the Continental Cup final at Estadio Azul, with striker Jonas Petrescu scoring twice before halftime. Coach Miguel Santana praised goalkeeper Andrei Motta for a decisive save in the 77th minute, and the Federation of European Football confirmed record attendance of 61,400 spectators."),
    ("Museum restitution", "The Maritime Museum of Lisbon agreed to return twelve carved panels to the National Heritage Trust of Ghana after a two-year provenance review led by curator Ana Beltrao. The panels, removed from Cape Coast in 1902, will travel to Accra in May, and the Gulbenkian Foundation will fund a joint conservation laboratory."),
    ("Volcanic ash advisory", "The Icelandic Meteorological Office raised the aviation alert for the Grimsvotn volcano to orange on Tuesday, citing tremor swarms recorded by the Reykjavik Seismic Network. Airlines including Skandia Air rerouted North Atlantic corridors, and geophysicist Ragnar Olafsson warned that ash plumes could reach cruising altitudes within hours."),
    ("Wheat harvest report", "The Grain Council of Ukraine reported a wheat harvest of 22.4 million tonnes, four percent above the Odessa Exchange forecast. Minister Iryna Kovalenko credited drought-resistant cultivars developed at the Kharkiv Agrarian Institute, while traders at Cargill Europe watched Black Sea freight rates climb for a third consecutive week."),
    ("Deep sea cable", "Atlantic Loop Communications finished laying a 7,200 kilometre submarine cable between Halifax and Porto, promising 340 terabits of capacity. Project director Sofia Almeida said the landing station in Porto survived its first storm season, and the Portuguese Communications Authority scheduled spectrum hearings for the overland extension."),
    ("Opera premiere", "Soprano Lucia Moretti premiered The Glass Orchard at Teatro San Carlo on Saturday, a commission from composer Henrik Dahl marking the house's 287th season. Director Paolo Rossini staged the second act inside a rotating greenhouse, and the Naples Conservatory orchestra performed under visiting conductor Amelie Durand."),
    ("Rail strike talks", "Negotiators from the Transport Workers Union and Deutsche Regionalbahn resumed talks in Frankfurt after a 48-hour strike stranded commuters across Hesse. Mediator Claus Weber proposed a staged wage settlement, while the Federal Labour Court declined an injunction request and freight operators warned of backlogs at the Hamburg port."),
    ("Coral nursery success", "Marine biologists at the Coral Restoration Alliance transplanted 18,000 nursery-grown fragments onto the Veracruz reef system, the largest single outplanting recorded by the Gulf Science Consortium. Dr. Paula Mendez said survival rates reached 84 percent, and the Mexican Navy assigned two patrol vessels to protect the site."),
    ("Quantum computing grant", "The Helvetic Science Foundation awarded 90 million francs to a consortium led by ETH Zurich to build a 500-qubit research machine named Matterhorn One. Physicist Nadia Bruni will direct the programme, with cryogenics supplied by Linde Engineering and error-correction software from the Zurich Institute of Informatics."),
    ("Desert solar array", "Saharan Light Energy switched on a 900 megawatt solar array near Ouarzazate, feeding the Maghreb Interconnect grid for the first time. Chairman Yousef Benani toured the site with delegates from the African Development Bank, and engineers reported that the molten-salt storage tanks held output steady past midnight."),
]

# Per-article countries, laid out so the full corpus histogram is
# US 8, GB 5, DE 5, FR 4, ES 3, IT 2, SE 2, NO 1.
COUNTRIES = [
    "United States", "United Kingdom", "Germany",
    "United States", "France",
    "United States", "Spain", "Germany",
    "United Kingdom", "United States",
    "Germany", "Italy", "United States",
    "France", "Sweden",
    "United Kingdom", "United States", "Norway",
    "Germany", "Spain",
    "Italy", "United States", "France",
    "United Kingdom", "Sweden",
    "Germany", "United States", "Spain",
    "France", "United Kingdom",
]

LANGUAGES = ["en"] * 30
for idx, lang in ((2, "de"), (6, "es"), (13, "fr"), (20, "it"), (24, "sv")):
    LANGUAGES[idx] = lang

DOMAINS = [
    ("lyonheraldo.example", 120), ("citydesk.example", 45), ("rheinpost.example", 300),
    ("beaconwire.example", 12), ("parisjournal.example", None),
]


def main() -> None:
    lines = []
    art_index = 0
    for bucket in range(6):
        bucket_start = WINDOW_START + bucket * BUCKET_STEP
        for group, members in (("a", 3), ("b", 2)):
            story_title, story_body = STORIES[bucket * 2 + (0 if group == "a" else 1)]
            for member in range(members):
                domain, rank = DOMAINS[(art_index + member) % len(DOMAINS)]
                body = story_body[:280] + (
                    f" Continued coverage part {member + 1} follows with additional"
                    f" regional reaction and archived material from desk {member + 1}."
                )
                record = {
                    "id": f"art-{bucket}{group}{member}",
                    "title": f"{story_title} ({member + 1})",
                    "summary": "",
                    "body": body,
                    "language": LANGUAGES[art_index],
                    "country": COUNTRIES[art_index],
                    "source_domain": domain,
                    "domain_rank": rank,
                    "published_at": (bucket_start + timedelta(minutes=10 + 25 * member))
                    .strftime("%Y-%m-%dT%H:%M:%SZ"),
                }
                lines.append(json.dumps(record, ensure_ascii=False))
                art_index += 1

    # Disallowed languages: dropped by the language filter, not rejected.
    for i, (lang, country) in enumerate((("fi", "Finland"), ("ja", "Japan"))):
        lines.append(json.dumps({
            "id": f"art-foreign-{i}",
            "title": "Untranslatable dispatch",
            "summary": "",
            "body": "Short piece in an unsupported language." * 3,
            "language": lang,
            "country": country,
            "source_domain": "elsewhere.example",
            "domain_rank": 900,
            "published_at": "2024-03-01T05:00:00Z",
        }, ensure_ascii=False))
    # Malformed record: no id, lands in the rejects report.
    lines.append(json.dumps({
        "title": "Orphan line", "summary": "", "body": "x", "language": "en",
        "country": "United States", "source_domain": "broken.example",
        "published_at": "2024-03-01T05:00:00Z",
    }))

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(lines)} lines)")


if __name__ == "__main__":
    main()
