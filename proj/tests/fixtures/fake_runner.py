#!/usr/bin/env python3
# Stand-in for the sandbox runner. Behavior is picked by a MODE=<name> token
# inside the candidate source file.
import argparse
import json
import sys
import time

ap = argparse.ArgumentParser()
ap.add_argument("--source", required=True)
ap.add_argument("--timeout", type=float, required=True)
args = ap.parse_args()

with open(args.source) as fh:
    source = fh.read()
request = json.load(sys.stdin)
mode = "echo"
for token in source.split():
    if token.startswith("MODE="):
        mode = token[5:]

m = len(request["v"])
if mode == "echo":
    # one uniform action; its cost reports how many logs arrived
    print(json.dumps({"setting": [[1.0 / m] * m + [float(len(request["content"]))]]}))
elif mode == "timeout-arg":
    print(json.dumps({"setting": [[1.0] + [0.0] * (m - 1) + [args.timeout]]}))
elif mode == "hang":
    time.sleep(3600)
elif mode == "self-timeout":
    print(json.dumps({"error": {"kind": "timeout", "detail": "solver exceeded %g s" % args.timeout}}))
elif mode == "raise":
    print(json.dumps({"error": {"kind": "crash", "detail": "ValueError: boom"}}))
elif mode == "budget":
    print(json.dumps({"error": {"kind": "budget", "detail": "memory limit"}}))
elif mode == "garbage":
    print("this is not json")
elif mode == "protocol":
    sys.stderr.write("bad request\n")
    sys.exit(2)
elif mode == "die":
    sys.exit(7)
elif mode == "negative-cost":
    print(json.dumps({"setting": [[1.0] + [0.0] * (m - 1) + [-1.0]]}))
elif mode == "wrong-width":
    print(json.dumps({"setting": [[1.0] * (m + 3)]}))
elif mode == "truth":
    # a fixed two-action answer for a 2-outcome instance
    print(json.dumps({"setting": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.5]]}))
sys.stdout.flush()
