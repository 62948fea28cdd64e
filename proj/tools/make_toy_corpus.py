#!/usr/bin/env python3
# Apache License, Version 2.0, refer to LICENSE.txt
"""Writes the bundled toy corpus: fictional authors, five research themes,
two year windows. Output is deterministic for a given --seed."""

import argparse
import json
import random

THEMES = {
    "vision": [
        "image", "segmentation", "convolutional", "pixel", "object", "detection",
        "camera", "texture", "edge", "contour", "scene", "recognition", "visual",
        "feature", "descriptor", "stereo", "depth", "tracking", "video", "motion",
    ],
    "neural": [
        "neural", "network", "neuron", "layer", "backpropagation", "weight",
        "activation", "hidden", "recurrent", "gradient", "training", "perceptron",
        "synaptic", "spiking", "learning", "architecture", "dropout", "deep",
        "memory", "connection",
    ],
    "optimization": [
        "convex", "optimization", "constraint", "objective", "solver", "linear",
        "programming", "duality", "lagrangian", "iterative", "convergence",
        "minimization", "penalty", "quadratic", "projection", "sparse", "regularization",
        "bound", "stochastic", "descent",
    ],
    "bayesian": [
        "bayesian", "posterior", "prior", "inference", "likelihood", "sampling",
        "markov", "chain", "dirichlet", "latent", "variational", "mixture",
        "probabilistic", "hierarchical", "gibbs", "marginal", "uncertainty",
        "distribution", "estimation", "conjugate",
    ],
    "fuzzy": [
        "fuzzy", "rule", "membership", "controller", "linguistic", "logic",
        "inference", "system", "control", "set", "approximate", "reasoning",
        "defuzzification", "expert", "knowledge", "decision", "uncertain",
        "granular", "hybrid", "adaptive",
    ],
}

PHRASES = {
    "vision": ["object detection", "image segmentation", "feature descriptor"],
    "neural": ["neural network", "hidden layer", "deep learning"],
    "optimization": ["convex optimization", "linear programming", "stochastic descent"],
    "bayesian": ["markov chain", "posterior inference", "dirichlet prior"],
    "fuzzy": ["fuzzy logic", "membership function", "rule base"],
}

GENERIC = [
    "method", "approach", "result", "experiment", "performance", "proposed",
    "paper", "problem", "model", "data", "analysis", "framework", "evaluation",
    "algorithm", "benchmark", "study", "efficient", "robust", "novel", "application",
]

FILLER = ["the", "of", "and", "a", "in", "we", "for", "with", "is", "on", "this", "to", "are", "that"]

FIRST = [
    "Ada", "Bram", "Cora", "Dov", "Elin", "Farid", "Greta", "Hugo", "Ines", "Jonas",
    "Kira", "Lior", "Mara", "Nils", "Olya", "Pavel", "Quinn", "Rhea", "Soren", "Tamsin",
    "Ulla", "Viggo", "Wren", "Xavi", "Yara", "Zeno", "Aurel", "Bettina", "Cyrus", "Dagny",
]
LAST = [
    "Alcott", "Brandt", "Castell", "Drummond", "Eskildsen", "Falk", "Gorski", "Halloran",
    "Ibarra", "Jensby", "Korhonen", "Lindqvist", "Moravec", "Nakata", "Oyelaran", "Pryce",
    "Quarles", "Rosales", "Sandoval", "Thorsen", "Umberg", "Varga", "Whitlock", "Xiong",
    "Yilmaz", "Zorn", "Abernathy", "Bexley", "Carvalho", "Delacroix",
]

VENUES = ["Journal of Toy Learning", "Toy Transactions on Patterns", "Annals of Small Data"]


def sentence(rng, theme, n_words):
    words = []
    for _ in range(n_words):
        r = rng.random()
        if r < 0.45:
            words.append(rng.choice(THEMES[theme]))
        elif r < 0.6:
            words.append(rng.choice(PHRASES[theme]))
        elif r < 0.75:
            words.append(rng.choice(GENERIC))
        else:
            words.append(rng.choice(FILLER))
    return " ".join(words)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/toy_corpus.jsonl")
    ap.add_argument("--seed", type=int, default=20240501)
    ap.add_argument("--docs-per-window", type=int, default=64)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    themes = sorted(THEMES)
    authors = [f"{FIRST[i]} {LAST[i]}" for i in range(30)]
    home = {a: themes[i % len(themes)] for i, a in enumerate(authors)}
    by_theme = {t: [a for a in authors if home[a] == t] for t in themes}

    records = []
    windows = [(1997, 2001), (2002, 2006)]
    for w, (lo, hi) in enumerate(windows):
        for i in range(args.docs_per_window):
            theme = themes[(i + w) % len(themes)]
            n_auth = rng.choice([1, 1, 2, 2, 3])
            team = rng.sample(by_theme[theme], min(n_auth, len(by_theme[theme])))
            if rng.random() < 0.25:
                other = rng.choice(authors)
                if other not in team:
                    team.append(other)
            title = sentence(rng, theme, rng.randint(5, 9)).capitalize()
            abstract = ". ".join(
                sentence(rng, theme, rng.randint(10, 18)).capitalize()
                for _ in range(rng.randint(3, 6))
            ) + "."
            if rng.random() < 0.2:
                abstract += f" Evaluated on {rng.randint(2, 99)} benchmark sets in {lo + i % 5}."
            rec = {
                "id": f"toy-{w + 1}-{i + 1:03d}",
                "title": title,
                "abstract": abstract,
                "authors": team,
                "year": lo + i % (hi - lo + 1),
            }
            if rng.random() < 0.8:
                rec["venue"] = rng.choice(VENUES)
            records.append(rec)

    with open(args.out, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
