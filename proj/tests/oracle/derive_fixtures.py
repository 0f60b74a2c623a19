# Copyright 2026 The detmetrics Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Recomputes the golden fixture values in exact rational arithmetic.

Shares no code with the C++ library. With --write the results are frozen
into fixtures.json; with --check the frozen file must match exactly.
"""

import argparse
import json
import sys
from fractions import Fraction as F

HALF = F(1, 2)


def iou(a, b):
    ix = max(F(0), min(a[2], b[2]) - max(a[0], b[0]))
    iy = max(F(0), min(a[3], b[3]) - max(a[1], b[1]))
    inter = ix * iy
    area = lambda r: (r[2] - r[0]) * (r[3] - r[1])
    return inter / (area(a) + area(b) - inter)


def greedy(gts, dets, tau, s=None):
    """Score-ordered greedy matching; returns (tp lqs, fp, fn)."""
    kept = [d for d in dets if s is None or d[1] >= s]
    kept.sort(key=lambda d: -d[1])
    taken = set()
    lqs, fp = [], 0
    for box, _ in kept:
        best = None
        for g, gbox in enumerate(gts):
            q = iou(gbox, box)
            if g in taken or not q > tau:
                continue
            if best is None or q > best[1]:
                best = (g, q)
        if best is None:
            fp += 1
        else:
            taken.add(best[0])
            lqs.append(best[1])
    return lqs, fp, len(gts) - len(taken)


def lrp(lqs, fp, fn, tau):
    z = len(lqs) + fp + fn
    return (sum((1 - q) / (1 - tau) for q in lqs) + fp + fn) / z


def components(lqs, fp, fn):
    tp = len(lqs)
    return {
        "loc": sum(1 - q for q in lqs) / tp if tp else None,
        "fp": F(fp, tp + fp) if tp + fp else None,
        "fn": F(fn, tp + fn) if tp + fn else None,
    }


def pq(lqs, fp, fn):
    return sum(lqs, F(0)) / (len(lqs) + HALF * fp + HALF * fn)


def pr_points(pattern, num_gts):
    points, tp = [], 0
    for i, hit in enumerate(pattern, start=1):
        tp += hit
        points.append((F(tp, num_gts), F(tp, i)))
    return points


def envelope(points):
    return [(r, max(p for _, p in points[i:])) for i, (r, _) in
            enumerate(points)]


def ap_exact(points):
    total, prev = F(0), F(0)
    for r, p in points:
        total += (r - prev) * p
        prev = r
    return total


def ap_101(points):
    total = F(0)
    for i in range(101):
        target = F(i, 100)
        hit = next((p for r, p in points if r >= target), F(0))
        total += hit
    return total / 101


def derive():
    out = {}
    lqs, fp, fn = [F(3, 4)], 1, 1
    out["lrp_one_tp_one_fp_one_fn"] = lrp(lqs, fp, fn, HALF)
    out["pq_one_tp_one_fp_one_fn"] = pq(lqs, fp, fn)
    out["pq_error_one_tp_one_fp_one_fn"] = 1 - pq(lqs, fp, fn)

    gts = [(F(0), F(0), F(10), F(10)), (F(20), F(20), F(30), F(30))]
    dets = [((F(0), F(0), F(10), F(8)), F(9, 10)),
            ((F(50), F(50), F(60), F(60)), F(1, 2)),
            ((F(20), F(20), F(30), F(26)), F(3, 10))]
    scores = sorted({s for _, s in dets}, reverse=True)
    best = None
    values = []
    for s in scores:
        m = greedy(gts, dets, HALF, s)
        v = lrp(*m, HALF)
        values.append(v)
        if best is None or v < best[0]:
            best = (v, s, m)
    out["olrp_fixture"] = best[0]
    out["olrp_fixture_s_star"] = best[1]
    comp = components(*best[2])
    out["olrp_fixture_loc"] = comp["loc"]
    out["olrp_fixture_fp"] = comp["fp"]
    out["olrp_fixture_fn"] = comp["fn"]
    out["alrp_fixture"] = sum(values) / len(values)
    out["lrp_fixture_all_dets"] = lrp(*greedy(gts, dets, HALF), HALF)

    env = envelope(pr_points([1, 0, 1], 2))
    out["ap_exact_tp_fp_tp"] = ap_exact(env)
    out["ap_101_tp_fp_tp"] = ap_101(env)

    sparse = pr_points([1, 0, 0, 0, 0, 1, 1], 5)
    out["sparse_ap_exact"] = ap_exact(envelope(sparse))
    out["sparse_ap_101"] = ap_101(envelope(sparse))
    out["sparse_ap_101_raw"] = ap_101(sparse)

    # Surface cell: mean lq 3/4, ten TPs, five FPs and five FNs.
    lqs, fp, fn = [F(3, 4)] * 10, 5, 5
    out["surface_lrp"] = lrp(lqs, fp, fn, HALF)
    out["surface_pq_error"] = 1 - pq(lqs, fp, fn)
    precision, recall = F(10, 10 + fp), F(10, 10 + fn)
    out["surface_pr_error"] = 1 - precision * recall
    return out


def serialise(values):
    return {
        k: {"value": float(v), "exact": f"{v.numerator}/{v.denominator}"}
        for k, v in sorted(values.items())
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("path")
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--write", action="store_true")
    mode.add_argument("--check", action="store_true")
    args = parser.parse_args()
    derived = serialise(derive())
    if args.write:
        with open(args.path, "w") as f:
            json.dump(derived, f, indent=2)
            f.write("\n")
        return 0
    with open(args.path) as f:
        frozen = json.load(f)
    if frozen != derived:
        for key in sorted(set(frozen) | set(derived)):
            if frozen.get(key) != derived.get(key):
                print(f"mismatch: {key}: frozen {frozen.get(key)} "
                      f"derived {derived.get(key)}")
        return 1
    print(f"{len(derived)} fixture values match")
    return 0


if __name__ == "__main__":
    sys.exit(main())
