"""Execute every config under configs/, collecting artifacts under out/."""

import glob
import json
import os
import sys

from ergoflux.cli import main

here = os.path.dirname(os.path.abspath(__file__))
configs = sorted(glob.glob(os.path.join(here, "..", "configs", "*.json")))
if not configs:
    sys.exit("no configs found")

failures = 0
for path in configs:
    with open(path) as fh:
        command = json.load(fh)["command"]
    print(f"== {os.path.basename(path)}")
    code = main([command, "--config", path])
    if code != 0:
        failures += 1
        print(f"   exited {code}", file=sys.stderr)

sys.exit(1 if failures else 0)
