"""Throughput of the compiled keccak-256 kernel against the pure-Python fallback.

    python3 benchmarks/bench_keccak.py [--repeat N]

Reports, per input size, the best-of-N time per digest and the speed-up, plus the
cost of a workload typical for the tool: hashing every signature of a contract.
"""

import argparse
import os
import timeit

from seam import _keccak_py

try:
    from seam import _keccak_ext
except ImportError:
    _keccak_ext = None

SIZES = [4, 32, 64, 136, 1024, 16384]
SIGNATURES = [f"function{i}(address,uint256,bytes32[])".encode() for i in range(200)]


def best_per_call(fn, arg, repeat: int) -> float:
    timer = timeit.Timer(lambda: fn(arg))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = [("python", _keccak_py.keccak256)]
    if _keccak_ext is not None:
        backends.append(("cython", _keccak_ext.keccak256))
    else:
        print("compiled kernel not built; only the pure-Python backend is measured")

    print(f"{'bytes':>7} " + " ".join(f"{name + ' (us)':>14}" for name, _ in backends) + "   speed-up")
    for size in SIZES:
        data = os.urandom(size)
        times = [best_per_call(fn, data, args.repeat) for _, fn in backends]
        cells = " ".join(f"{t * 1e6:14.2f}" for t in times)
        ratio = f"{times[0] / times[-1]:9.1f}x" if len(times) > 1 else ""
        print(f"{size:>7} {cells}  {ratio}")

    print(f"\nselector table for {len(SIGNATURES)} signatures:")
    for name, fn in backends:
        t = min(timeit.repeat(lambda: [fn(s)[:4] for s in SIGNATURES], repeat=args.repeat, number=5)) / 5
        print(f"  {name:<7} {t * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
