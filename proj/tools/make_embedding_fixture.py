#!/usr/bin/env python3
"""Regenerate data/fixtures/embeddings_1k.txt.

Trains GloVe vectors (Pennington et al. weighted least-squares objective,
full-batch AdaGrad) on English prose harvested from documentation installed
on the build host, then writes the 1000 most frequent terms in GloVe text
format. Harvest order and training are fully seeded, so reruns on the same
host reproduce the committed fixture byte for byte.

Usage: python3 tools/make_embedding_fixture.py [--dim 300] [--out PATH]
"""

import argparse
import ast
import glob
import os
import re
import sys
from collections import Counter

import numpy as np

TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z]+")  # letters only, length >= 2


def harvest_metadata():
    """Package long-descriptions (README bodies) from installed wheels."""
    chunks = []
    for path in sorted(glob.glob(
            "/usr/local/lib/python3.10/dist-packages/*.dist-info/METADATA")):
        try:
            with open(path, encoding="utf-8", errors="ignore") as fh:
                text = fh.read()
        except OSError:
            continue
        _, _, body = text.partition("\n\n")
        chunks.append(body)
    return chunks


def harvest_docstrings(packages, max_files_per_pkg=400):
    chunks = []
    for pkg in packages:
        root = os.path.join("/usr/local/lib/python3.10/dist-packages", pkg)
        if not os.path.isdir(root):
            continue
        files = sorted(glob.glob(os.path.join(root, "**", "*.py"),
                                 recursive=True))[:max_files_per_pkg]
        for path in files:
            try:
                with open(path, encoding="utf-8", errors="ignore") as fh:
                    tree = ast.parse(fh.read())
            except (OSError, SyntaxError, ValueError):
                continue
            for node in ast.walk(tree):
                if isinstance(node, (ast.Module, ast.ClassDef,
                                     ast.FunctionDef, ast.AsyncFunctionDef)):
                    doc = ast.get_docstring(node)
                    if doc and len(doc) > 80:
                        chunks.append(doc)
    return chunks


def harvest_share_doc(max_files=3000):
    chunks = []
    pats = ["/usr/share/doc/*/README", "/usr/share/doc/*/README.*",
            "/usr/share/doc/*/copyright"]
    files = sorted(f for pat in pats for f in glob.glob(pat))[:max_files]
    for path in files:
        if path.endswith((".gz", ".bz2")):
            continue
        try:
            if os.path.getsize(path) > 500_000:
                continue
            with open(path, encoding="utf-8", errors="ignore") as fh:
                chunks.append(fh.read())
        except OSError:
            continue
    return chunks


def build_cooccurrence(token_ids, vocab_size, window=8):
    """Symmetric co-occurrence matrix with 1/distance weighting."""
    X = np.zeros(vocab_size * vocab_size)
    ids = np.asarray(token_ids, dtype=np.int64)
    for d in range(1, window + 1):
        a, b = ids[:-d], ids[d:]
        mask = (a >= 0) & (b >= 0)
        a, b = a[mask], b[mask]
        w = np.full(len(a), 1.0 / d)
        X += np.bincount(a * vocab_size + b, weights=w,
                         minlength=vocab_size * vocab_size)
        X += np.bincount(b * vocab_size + a, weights=w,
                         minlength=vocab_size * vocab_size)
    return X.reshape(vocab_size, vocab_size)


def train_glove(X, dim, iters=600, lr=0.05, x_max=100.0, alpha=0.75,
                seed=20240901):
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    mask = X > 0
    logX = np.where(mask, np.log(np.where(mask, X, 1.0)), 0.0)
    F = np.where(mask, np.minimum(1.0, (X / x_max) ** alpha), 0.0)

    W = (rng.random((n, dim)) - 0.5) / dim
    Wc = (rng.random((n, dim)) - 0.5) / dim
    b = np.zeros((n, 1))
    bc = np.zeros((1, n))
    gW = np.full((n, dim), 1e-8)
    gWc = np.full((n, dim), 1e-8)
    gb = np.full((n, 1), 1e-8)
    gbc = np.full((1, n), 1e-8)

    nnz = float(mask.sum())
    for it in range(iters):
        E = F * (W @ Wc.T + b + bc - logX)
        dW = 2.0 * (E @ Wc)
        dWc = 2.0 * (E.T @ W)
        db = 2.0 * E.sum(axis=1, keepdims=True)
        dbc = 2.0 * E.sum(axis=0, keepdims=True)
        gW += dW * dW
        gWc += dWc * dWc
        gb += db * db
        gbc += dbc * dbc
        W -= lr * dW / np.sqrt(gW)
        Wc -= lr * dWc / np.sqrt(gWc)
        b -= lr * db / np.sqrt(gb)
        bc -= lr * dbc / np.sqrt(gbc)
        if it % 50 == 0 or it == iters - 1:
            cost = float((E * (W @ Wc.T + b + bc - logX)).sum() / nnz)
            print(f"  iter {it:4d}  cost {cost:.5f}", file=sys.stderr)
    return W + Wc


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=300)
    ap.add_argument("--iters", type=int, default=600)
    ap.add_argument("--vocab", type=int, default=1000)
    ap.add_argument("--out", default=os.path.join(
        os.path.dirname(__file__), "..", "data", "fixtures",
        "embeddings_1k.txt"))
    args = ap.parse_args()

    print("harvesting text ...", file=sys.stderr)
    chunks = []
    chunks += harvest_metadata()
    chunks += harvest_docstrings([
        "numpy", "scipy", "sklearn", "pandas", "matplotlib", "statsmodels",
        "sympy", "networkx", "joblib", "requests", "rich", "jsonschema",
        "sqlalchemy", "seaborn", "skimage", "attr", "click", "pydantic",
    ])
    chunks += harvest_share_doc()
    tokens = [t.lower() for t in TOKEN_RE.findall("\n".join(chunks))]
    print(f"  {len(tokens)} tokens harvested", file=sys.stderr)

    freq = Counter(tokens)
    vocab = [w for w, _ in sorted(freq.items(),
                                  key=lambda kv: (-kv[1], kv[0]))[:args.vocab]]
    vocab_index = {w: i for i, w in enumerate(vocab)}
    print(f"  vocab {len(vocab)}, min count {freq[vocab[-1]]}",
          file=sys.stderr)

    print("building co-occurrence ...", file=sys.stderr)
    ids = [vocab_index.get(t, -1) for t in tokens]
    X = build_cooccurrence(ids, len(vocab))
    print(f"  {int((X > 0).sum())} nonzero pairs", file=sys.stderr)

    print(f"training GloVe d={args.dim} ...", file=sys.stderr)
    vectors = train_glove(X, args.dim, iters=args.iters)

    out = os.path.abspath(args.out)
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for i, word in enumerate(vocab):
            comps = " ".join(f"{v:.5f}" for v in vectors[i])
            fh.write(f"{word} {comps}\n")
    print(f"wrote {out}", file=sys.stderr)


if __name__ == "__main__":
    main()
