#!/usr/bin/env python3
"""Compare the compiled and pure-numpy training backends.

Both backends implement the same update schedule, but they draw negatives
and sum gradients in different orders, so equal seeds give different (each
deterministic) embeddings.  This script times both on one synthetic workload
and cross-checks that they optimize equally well: the trained objective
values must agree closely, and the non-negativity constraint must hold.
The workload is a random sparse co-occurrence table -- training cost depends
only on the event count, the vocabulary size and the dimension, not on where
the counts came from.

Example::

    python3 benchmarks/bench_train.py --events 200000 --dim 50
    python3 benchmarks/bench_train.py --backends compiled --events 5000000
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np
from scipy import sparse

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hyperdive.cooccur import CoocStats
from hyperdive.errors import HyperdiveError
from hyperdive.trainer import (
    TrainConfig,
    backend_name,
    objective_value,
    train_dive,
    train_sgns,
)


def make_workload(vocab_size, n_events, seed):
    """Random sparse pair counts whose values sum to ``n_events``."""
    rng = np.random.default_rng(seed)
    # Aim for ~3 counts per stored pair; duplicates merge in COO->CSR.
    n_cells = max(1, n_events // 3)
    rows = rng.integers(0, vocab_size, n_cells)
    cols = rng.integers(0, vocab_size, n_cells)
    counts = rng.geometric(1 / 3.0, n_cells)
    matrix = sparse.coo_matrix(
        (counts, (rows, cols)), shape=(vocab_size, vocab_size)
    ).tocsr()
    surplus = int(matrix.sum()) - n_events
    if surplus > 0:  # trim the largest cell so the total is exact
        top = int(np.argmax(matrix.data))
        matrix.data[top] = max(1, matrix.data[top] - surplus)
    return CoocStats.from_pair_counts(matrix, window=20)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--vocab", type=int, default=5_000)
    parser.add_argument("--events", type=int, default=150_000,
                        help="positive training events per epoch")
    parser.add_argument("--dim", type=int, default=50)
    parser.add_argument("--epochs", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--kind", choices=("dive", "sgns"), default="dive")
    parser.add_argument("--backends", default="compiled,numpy",
                        help="comma-separated subset of: compiled, numpy")
    args = parser.parse_args(argv)

    backends = [b.strip() for b in args.backends.split(",") if b.strip()]
    stats = make_workload(args.vocab, args.events, args.seed)
    events = int(stats.pairs.data.sum())
    config = TrainConfig(dim=args.dim, epochs=args.epochs)
    train = train_dive if args.kind == "dive" else train_sgns
    print(f"workload: |V|={stats.vocab_size} events/epoch={events} "
          f"dim={args.dim} epochs={args.epochs} kind={args.kind}")
    print(f"default backend on this machine: {backend_name()}")

    results = {}
    for backend in backends:
        start = time.perf_counter()
        emb = train(stats, config, seed=args.seed, backend=backend)
        elapsed = time.perf_counter() - start
        value = objective_value(emb, stats, config.neg_ratio)
        results[backend] = (elapsed, value)
        if args.kind == "dive" and (
            emb.word_vecs.min() < 0 or emb.ctx_vecs.min() < 0
        ):
            print(f"{backend}: FAILED non-negativity check")
            return 1
        rate = events * args.epochs / elapsed
        print(f"{backend:>9}: {elapsed:8.2f}s total  "
              f"{elapsed / args.epochs:8.2f}s/epoch  {rate:12,.0f} events/s  "
              f"objective {value:.4f}")

    if len(results) > 1:
        names = list(results)
        base_time = results[names[-1]][0]
        for name in names[:-1]:
            print(f"speedup {name} vs {names[-1]}: "
                  f"{base_time / results[name][0]:.1f}x")
        values = [results[n][1] for n in names]
        spread = max(values) - min(values)
        rel = spread / max(1e-12, abs(min(values)))
        status = "agree" if rel < 0.01 else "DISAGREE"
        print(f"objective values {status} (relative spread {rel:.2e})")
        if rel >= 0.01:
            return 1
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except HyperdiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(1)
