#!/usr/bin/env python3
"""Regenerates the committed reference fixtures under tests/fixtures/.

two_blobs.json     two isotropic 2D Gaussian blobs with labels from scikit-learn's HDBSCAN
hdbscan_mixed.json blobs of varying density plus uniform noise, labels for several settings
tfidf_corpora.json three small corpora with the top-m terms from a brute-force TF-IDF scorer

Run from the repository root:  python3 tools/fixtures/make_fixtures.py
"""
import json
import math
import re
from pathlib import Path

import numpy as np
from sklearn.cluster import HDBSCAN

ROOT = Path(__file__).resolve().parents[2]
OUT = ROOT / "tests" / "fixtures"


def two_blobs():
    rng = np.random.default_rng(20250101)
    sigma = 1.0
    a = rng.normal(loc=(0.0, 0.0), scale=sigma, size=(50, 2))
    b = rng.normal(loc=(10.0 * sigma, 0.0), scale=sigma, size=(50, 2))
    pts = np.vstack([a, b])
    truth = [0] * 50 + [1] * 50
    labels = HDBSCAN(min_cluster_size=5, min_samples=5).fit_predict(pts)
    return {
        "min_cluster_size": 5,
        "min_samples": 5,
        "points": [
            {"id": f"p{i:03d}", "x": float(p[0]), "y": float(p[1]), "blob": truth[i]}
            for i, p in enumerate(pts)
        ],
        "reference_labels": [int(l) for l in labels],
    }


def hdbscan_mixed():
    rng = np.random.default_rng(7)
    parts = [
        rng.normal(loc=(0.0, 0.0), scale=0.3, size=(40, 2)),
        rng.normal(loc=(4.0, 1.0), scale=0.8, size=(60, 2)),
        rng.normal(loc=(-3.0, 5.0), scale=1.5, size=(50, 2)),
        rng.uniform(low=-8.0, high=10.0, size=(30, 2)),
    ]
    pts = np.vstack(parts)
    cases = []
    for mcs, ms in ((5, 5), (10, 10), (15, 5), (8, 3)):
        labels = HDBSCAN(min_cluster_size=mcs, min_samples=ms).fit_predict(pts)
        cases.append({"min_cluster_size": mcs, "min_samples": ms, "labels": [int(l) for l in labels]})
    return {
        "points": [{"id": f"q{i:03d}", "x": float(p[0]), "y": float(p[1])} for i, p in enumerate(pts)],
        "cases": cases,
    }


def load_stopwords():
    words = set()
    for line in (ROOT / "data" / "stopwords_en.txt").read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return words


STOP = load_stopwords()


def tokens(text):
    out = []
    for tok in re.split(r"[^0-9A-Za-z\x80-\U0010ffff]+", text.lower()):
        if len(tok.encode("utf-8")) >= 2 and tok not in STOP:
            out.append(tok)
    return out


def brute_force_top_terms(docs, cluster, m):
    n = len(docs)
    doc_tokens = [tokens(d) for d in docs]
    cluster_tokens = []
    for i in cluster:
        cluster_tokens.extend(tokens(docs[i]))
    scored = []
    for term in sorted(set(cluster_tokens)):
        tf = sum(1 for t in cluster_tokens if t == term)
        df = sum(1 for toks in doc_tokens if term in toks)
        scored.append((-(tf * math.log(n / df)), term))
    scored.sort()
    return [t for _, t in scored[:m]]


def tfidf_corpora():
    degenerate = {"name": "single_document", "docs": ["covid covid vaccine"], "cluster": [0], "m": 3}

    filler = ["the world today", "people around the world", "great news today", "what a week for people",
              "reading a new book", "climate and energy", "teachers and students", "a visit to the farm",
              "energy storage matters", "data and tools"]
    pandemic = ["pandemic preparedness saves lives", "the next pandemic is coming",
                "pandemic response and covid vaccines", "lessons from the pandemic",
                "investing to stop a pandemic early"]
    docs = []
    for i in range(15):
        docs.append(filler[i % len(filler)] + f" item{i % 4}")
    cluster = []
    for p in pandemic:
        cluster.append(len(docs))
        docs.append(p)
    pandemic_corpus = {"name": "pandemic_20", "docs": docs, "cluster": cluster, "m": 3}

    art = ["Blue woman portrait with melancholy expression", "woman in blue, seated, sad expression",
           "horse in a calm sky landscape", "Horse grazing under calm sky", "horse and rider, calm field",
           "cubist guitar and bottle", "geometric guitar still life", "cubist violin, geometric shapes",
           "minotaur sketch in ink", "minotaur and woman sketch", "still life with fruit bowl",
           "colorful still life with jug"]
    art_corpus = {"name": "paintings_12", "docs": art, "cluster": [5, 6, 7], "m": 4}

    out = []
    for c in (degenerate, pandemic_corpus, art_corpus):
        c = dict(c)
        c["expected"] = brute_force_top_terms(c["docs"], c["cluster"], c["m"])
        out.append(c)
    return out


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "two_blobs.json").write_text(json.dumps(two_blobs(), indent=1) + "\n")
    (OUT / "hdbscan_mixed.json").write_text(json.dumps(hdbscan_mixed(), indent=1) + "\n")
    (OUT / "tfidf_corpora.json").write_text(json.dumps(tfidf_corpora(), indent=1) + "\n")


if __name__ == "__main__":
    main()
