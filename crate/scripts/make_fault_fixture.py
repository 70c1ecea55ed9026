#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Derive the fault-injected netlist fixture.

Synthesizes c17, then detaches input 1 of cell 3 and leaves it on a floating
net. The result must fail `xsfq sim`.

    cargo build --release
    python3 scripts/make_fault_fixture.py target/release/xsfq
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
CELL, PORT = 3, 1


def main(xsfq):
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([xsfq, "synth", str(ROOT / "benchmarks/iscas85/c17.aig"), "-o", tmp],
                       check=True, stdout=subprocess.DEVNULL)
        netlist = json.loads((Path(tmp) / "c17.netlist.json").read_text())
    old = netlist["cells"][CELL]["inputs"][PORT]
    sink = {"type": "cell", "cell": CELL, "port": PORT}
    netlist["nets"][old]["sinks"].remove(sink)
    netlist["nets"].append({"name": f"floating.c{CELL}.{PORT}", "driver": {"type": "floating"}, "sinks": [sink]})
    netlist["cells"][CELL]["inputs"][PORT] = len(netlist["nets"]) - 1
    netlist["name"] = "c17_fault"
    out = ROOT / "benchmarks/fixtures/c17_fault.netlist.json"
    out.write_text(json.dumps(netlist, indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "target/release/xsfq")
