"""Time the compiled and pure-Python set-system kernels on random families.

    python benchmarks/bench_kernels.py --sets 200 --width 32 --repeat 20
"""

from __future__ import annotations

import argparse
import random
import timeit

from mirrorgame._kernels import _pykernels, compiled


def even_family(rng: random.Random, count: int, width: int) -> list[int]:
    out: set[int] = set()
    while len(out) < count:
        s = rng.getrandbits(width)
        if s and s.bit_count() % 2 == 0:
            out.add(s)
    return sorted(out)


def oddtown_family(width: int) -> list[int]:
    # star {1, i}: pairwise intersections are exactly {1}
    return [1 | (1 << i) for i in range(1, width)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sets", type=int, default=200)
    ap.add_argument("--width", type=int, default=32)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")

    rng = random.Random(args.seed)
    fam = even_family(rng, args.sets, args.width)
    odd = oddtown_family(args.width)
    cases = [
        ("gf2_rank", lambda k: k.gf2_rank(fam)),
        ("even_pairs", lambda k: k.even_pairs(fam)),
        ("is_oddtown", lambda k: k.is_oddtown(odd)),
    ]
    print(f"{'kernel':<12}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, call in cases:
        assert call(_pykernels) == call(compiled)
        t_py = min(timeit.repeat(lambda: call(_pykernels), number=1, repeat=args.repeat)) * 1e3
        t_c = min(timeit.repeat(lambda: call(compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<12}{t_py:>12.3f}{t_c:>12.3f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
