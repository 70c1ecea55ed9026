#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Regenerate the committed benchmark AIGs.

The gate-level netlists come from the `circuitgraph` wheel (ISCAS85 and the
EPFL control suite). Each one is read by Yosys, optimized and mapped to an
AND-inverter graph by ABC (`abc -g AND`), and written as binary AIGER.

Requirements: `pip install yowasp-yosys` and a downloaded circuitgraph wheel:

    pip download --no-deps -d /tmp/pp circuitgraph
    python3 scripts/make_fixtures.py /tmp/pp/circuitgraph-*.whl
"""

import os
import shutil
import subprocess
import sys
import tempfile
import zipfile

ISCAS85 = ["c17", "c432", "c499", "c880", "c1355", "c1908", "c2670", "c3540",
           "c5315", "c6288", "c7552"]
# file stem in circuitgraph -> benchmark name
EPFL = {"arbiter": "arbiter", "cavlc": "cavlc", "ctrl": "ctrl", "dec": "dec",
        "i2c": "i2c", "int2float": "int2float", "memctrl": "mem_ctrl",
        "priority_ckt": "priority", "router": "router", "voter": "voter",
        "sin": "sin"}


def convert(src, top, dst, workdir):
    # the WASM build only sees its working directory
    env = dict(os.environ, TMPDIR=".")
    script = (f"read_verilog {os.path.basename(src)}; "
              f"synth -flatten -top {top} -noabc; "
              f"abc -g AND; opt_clean; aigmap; opt_clean; "
              f"write_aiger -symbols out.aig")
    subprocess.run(["yowasp-yosys", "-q", "-p", script], check=True, env=env,
                   cwd=workdir)
    shutil.move(os.path.join(workdir, "out.aig"), dst)


def main():
    wheel = sys.argv[1]
    root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..",
                        "benchmarks")
    only = set(sys.argv[2:])
    with tempfile.TemporaryDirectory() as work, zipfile.ZipFile(wheel) as z:
        jobs = [(c, c, "iscas85") for c in ISCAS85]
        jobs += [(stem, name, "epfl") for stem, name in EPFL.items()]
        for stem, name, suite in jobs:
            if only and name not in only:
                continue
            src = os.path.join(work, stem + ".v")
            with open(src, "wb") as f:
                f.write(z.read(f"circuitgraph/netlists/{stem}.v"))
            dst = os.path.abspath(os.path.join(root, suite, name + ".aig"))
            print(f"{name}: {stem}.v -> {dst}", flush=True)
            convert(src, stem, dst, work)


if __name__ == "__main__":
    main()
