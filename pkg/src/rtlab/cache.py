"""Append-only JSONL result cache keyed by input fingerprints.

Each line stores one record: fingerprint, operation name, payload,
artifact version, timestamp.  Lines are written with a single write call
so concurrent writers never interleave; corrupt lines are skipped with a
warning and never fatal.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import time


def fingerprint(op: str, params: dict, version: str) -> str:
    blob = json.dumps(
        {"op": op, "params": params, "version": version},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:32]


class ResultCache:
    def __init__(self, path: str):
        self.path = path
        self._index = None

    def _load(self):
        if self._index is not None:
            return
        self._index = {}
        if not os.path.exists(self.path):
            return
        bad = 0
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    self._index[rec["fingerprint"]] = rec["payload"]
                except (ValueError, KeyError, TypeError):
                    bad += 1
        if bad:
            print(f"# cache: skipped {bad} corrupt line(s) in {self.path}", file=sys.stderr)

    def lookup(self, fp: str):
        self._load()
        return self._index.get(fp)

    def store(self, fp: str, op: str, payload: dict, version: str):
        self._load()
        rec = {
            "fingerprint": fp,
            "op": op,
            "payload": payload,
            "version": version,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        line = json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n"
        d = os.path.dirname(self.path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line)
        self._index[fp] = payload
