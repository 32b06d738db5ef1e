"""SCWS bias and precision@10 as a function of pool size.

    python3 scripts/run_pool_sweep.py [outdir]
"""
import sys
from pathlib import Path

from scws import cli

SIZES = "16,64,256,1000,4000,16000,65536"


def main(outdir: str = "results") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    cli.main(["pool-sweep", "--task", "bias", "--sizes", SIZES, "--out", str(out / "pool_bias.csv")])
    cli.main(["pool-sweep", "--task", "precision", "--sizes", SIZES, "--synthetic", "500,1000,0.05,1.5",
              "--k", "512", "--out", str(out / "pool_precision.csv")])
    for name in ("pool_bias.csv", "pool_precision.csv"):
        print((out / name).read_text(), end="")


if __name__ == "__main__":
    main(*sys.argv[1:])
