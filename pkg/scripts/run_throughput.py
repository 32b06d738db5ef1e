"""Sketch + 8-bit vectorisation wall time per scheme on synthetic corpora.

    python3 scripts/run_throughput.py [outdir] [threads]
"""
import sys
from pathlib import Path

from scws import cli

CORPORA = ["2000,20000,0.01,1.5", "2000,2000,0.1,1.5", "5000,100000,0.001,1.5"]


def main(outdir: str = "results", threads: str = "1") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for i, spec in enumerate(CORPORA):
        path = out / f"throughput_{i}.csv"
        cli.main(["bench", "--synthetic", spec, "--k", "1000", "--threads", threads,
                  "--repeats", "2", "--out", str(path)])
        print(path.read_text(), end="")


if __name__ == "__main__":
    main(*sys.argv[1:])
