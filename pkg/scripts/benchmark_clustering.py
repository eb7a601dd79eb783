"""Clustering scale benchmark.

Times ward_cluster on a synthetic float32 matrix and reports wall time
plus peak resident memory. The shipping target is 50,000 x 768 into
K=400 in under 600 s and 16 GB:

    python3 scripts/benchmark_clustering.py --n 50000 --d 768 --k 400
"""

import argparse
import resource
import time

import numpy as np

from conceptlens.cluster import ward_cluster


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=20_000)
    parser.add_argument("--d", type=int, default=768)
    parser.add_argument("--k", type=int, default=400)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--planted", type=int, default=0,
                        help="number of planted centers (0 = pure noise)")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    if args.planted:
        centers = rng.normal(scale=2.0, size=(args.planted, args.d)).astype(np.float32)
        assignment = rng.integers(0, args.planted, size=args.n)
        x = centers[assignment] + rng.normal(size=(args.n, args.d)).astype(np.float32)
    else:
        x = rng.normal(size=(args.n, args.d)).astype(np.float32)
    print(f"matrix {x.shape} {x.dtype}, {x.nbytes / 1e6:.0f} MB")

    started = time.monotonic()
    dendrogram, concepts = ward_cluster(x, args.k)
    elapsed = time.monotonic() - started

    peak_gib = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024**2
    sizes = sorted((c.size for c in concepts), reverse=True)
    print(f"wall time      {elapsed:.1f} s")
    print(f"peak RSS       {peak_gib:.2f} GiB")
    print(f"merges         {len(dendrogram.merges)}")
    print(f"concepts       {len(concepts)}  sizes {sizes[:5]} ... {sizes[-5:]}")
    print(f"final cost     {dendrogram.merges[-1][2]:.3e}")


if __name__ == "__main__":
    main()
