"""precision@10 against exact WJS neighbours for K in 64..1024, all schemes.

    python3 scripts/run_retrieval.py [outdir]
"""
import sys
from pathlib import Path

from scws import cli


def main(outdir: str = "results") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "retrieval.csv"
    cli.main(["knn", "--synthetic", "1000,1000,0.05,1.5", "--k", "64,128,256,512,1024",
              "--kappa", "10", "--queries", "200", "--out", str(path)])
    print(path.read_text(), end="")


if __name__ == "__main__":
    main(*sys.argv[1:])
