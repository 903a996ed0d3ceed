"""Minimal generator bridge for protocol tests.

Usage: stub_bridge.py SCRATCH_DIR MODE
MODE: ok | hang | garbage | error | wrong-id | bad-handshake | die
"""
import json
import os
import sys
import time

FIXTURE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "car.obj")


def main():
    scratch, mode = sys.argv[1], sys.argv[2]
    if mode == "bad-handshake":
        print("hello", flush=True)
        return
    print(json.dumps({"ready": True, "model": "stub"}), flush=True)
    count = 0
    for line in sys.stdin:
        try:
            req = json.loads(line)
            rid = req["id"]
        except (ValueError, KeyError):
            print(json.dumps({"id": "unknown", "status": "error", "mesh_paths": [], "message": "bad request"}), flush=True)
            continue
        if mode == "hang":
            time.sleep(60)
        if mode == "die":
            sys.exit(3)
        if mode == "error":
            print(json.dumps({"id": rid, "status": "error", "mesh_paths": [], "message": "model exploded"}), flush=True)
            continue
        paths = []
        for _ in range(req["batch"]):
            count += 1
            path = os.path.join(scratch, "mesh-%d-%d.obj" % (os.getpid(), count))
            with open(path, "w") as out:
                if mode == "garbage":
                    out.write("v 0 0 0\nf 1 2 3\n")
                else:
                    with open(FIXTURE) as src:
                        out.write(src.read())
            paths.append(path)
        rid = "nope" if mode == "wrong-id" else rid
        print(json.dumps({"id": rid, "status": "ok", "mesh_paths": paths, "message": ""}), flush=True)


main()
