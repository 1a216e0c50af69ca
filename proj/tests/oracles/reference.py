#!/usr/bin/env python3
# Copyright 2026 The duplexflow Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent reference for the pinned hash, the portable RNG and the gap
sampler. Written from the protocol document, not from the C++ sources; its
output is frozen in tests/golden/oracle_values.json.

    python3 tests/oracles/reference.py > tests/golden/oracle_values.json
    python3 tests/oracles/reference.py --check tests/golden/oracle_values.json
"""

import json
import math
import os
import struct
import sys

MASK = (1 << 64) - 1


class Mt19937_64:
    n, m = 312, 156

    def __init__(self, seed):
        self.mt = [seed & MASK]
        for i in range(1, self.n):
            prev = self.mt[-1]
            self.mt.append((6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK)
        self.idx = self.n

    def _twist(self):
        upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
        for i in range(self.n):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % self.n] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + self.m) % self.n] ^ xa
        self.idx = 0

    def next(self):
        if self.idx >= self.n:
            self._twist()
        y = self.mt[self.idx]
        self.idx += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK


LN2 = 0.693147180559945309417232121458176568
SQRT_HALF = 0.707106781186547524400844362104849039


def portable_log(x):
    m, e = math.frexp(x)
    if m < SQRT_HALF:
        m *= 2.0
        e -= 1
    s = (m - 1.0) / (m + 1.0)
    s2 = s * s
    term, total = s, 0.0
    for k in range(1, 42, 2):
        total += term / k
        term *= s2
    return 2.0 * total + e * LN2


class Rng:
    def __init__(self, seed):
        self.eng = Mt19937_64(seed)

    def uniform01(self):
        return float(self.eng.next() >> 11) * 2.0 ** -53

    def normal(self, mean, std):
        while True:
            u = 2.0 * self.uniform01() - 1.0
            v = 2.0 * self.uniform01() - 1.0
            s = u * u + v * v
            if s >= 1.0 or s == 0.0:
                continue
            return mean + std * (u * math.sqrt(-2.0 * portable_log(s) / s))


FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a(data):
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK
    return h


def splitmix64(x):
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK
    x ^= x >> 31
    return x


def pinned_hash(tag, seed, session, turn, index):
    data = (tag.encode() + b"\0" + struct.pack("<Q", seed) + session.encode() + b"\0" +
            struct.pack("<Q", turn) + struct.pack("<Q", index))
    return splitmix64(fnv1a(data))


def to_ms(t):
    # Round half away from zero, as llround does.
    return int(math.floor(abs(t) * 1000.0 + 0.5)) * (1 if t >= 0 else -1)


def annotate(timeline, seed, mean=0.6, std=0.4, clamp=0.0, eps=0.2):
    segs = timeline["segments"]
    eps_ms = to_ms(eps)

    def talked_through(inner, outer):
        return (to_ms(outer["start_s"]) < to_ms(inner["start_s"]) and
                to_ms(outer["end_s"]) >= to_ms(inner["end_s"]) + eps_ms)

    def contained(seg):
        return any(o["channel"] != seg["channel"] and talked_through(seg, o) for o in segs)

    backchannels = [[s["start_s"], s["end_s"]] for s in segs
                    if s["channel"] == "user" and contained(s)]
    turns = [s for s in segs if not contained(s)]
    rng = Rng(seed)
    a_on, u_on = [], []
    for prev, nxt in zip(turns, turns[1:]):
        if prev["channel"] == "user" and nxt["channel"] == "assistant":
            a_on.append(prev["end_s"])
        elif prev["channel"] == "assistant" and nxt["channel"] == "user":
            onset = prev["end_s"] + max(clamp, rng.normal(mean, std))
            if onset <= timeline["duration_s"]:
                u_on.append(onset)
    return {"assistant_turn_onsets": sorted(a_on), "user_turn_onsets": sorted(u_on),
            "backchannel_intervals": backchannels}


def build():
    out = {
        "mt19937_64_seed_5489_first": Mt19937_64(5489).next(),
        "pinned_hash": [
            {"tag": t, "seed": s, "session": ss, "turn": tu, "index": i,
             "value": pinned_hash(t, s, ss, tu, i)}
            for (t, s, ss, tu, i) in [("speech", 1, "s", 0, 0), ("text", 7, "s0", 3, 11),
                                      ("semantic", 0, "", 0, 0),
                                      ("jitter", 42, "abc", 2, 9)]
        ],
        "mock_speech_tokens_seed1_s_turn0_V1024":
            [pinned_hash("speech", 1, "s", 0, i) % 1024 for i in range(5)],
        "portable_log": [{"x": x, "value": portable_log(x)}
                         for x in (0.5, 1e-300, 0.123456789, 0.9999999, 3.0)],
        "normal_seed42_first5": [],
        "user_onset_after_assistant_5p0": [],
    }
    r = Rng(42)
    out["normal_seed42_first5"] = [r.normal(0.6, 0.4) for _ in range(5)]
    # Timeline assistant [2.5, 5.0], user [5.8, 7.0]: one assistant -> user
    # hand-over, so the first clamped draw gives the onset.
    for seed in range(5):
        g = max(0.0, Rng(seed).normal(0.6, 0.4))
        out["user_onset_after_assistant_5p0"].append({"seed": seed, "onset": 5.0 + g})
    here = os.path.dirname(os.path.abspath(__file__))
    with open(os.path.join(here, "..", "..", "configs", "closed_loop_timeline.json")) as f:
        timeline = json.load(f)
    out["closed_loop_labels_seed7"] = annotate(timeline, 7)
    return out


def main(argv):
    out = build()
    if len(argv) == 3 and argv[1] == "--check":
        with open(argv[2]) as f:
            frozen = json.load(f)
        if frozen != out:
            for key in sorted(set(frozen) | set(out)):
                if frozen.get(key) != out.get(key):
                    print("mismatch in", key, file=sys.stderr)
            return 1
        print("oracle values match", argv[2])
        return 0
    print(json.dumps(out, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
