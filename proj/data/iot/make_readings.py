#!/usr/bin/env python3
# Copyright 2026 The ctxclean Authors.
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

# Regenerates readings.csv. Deterministic: the output depends only on SEED.
import csv
import datetime
import math
import random
import sys

SEED = 7
ROWS = 1000


def main(path):
    rng = random.Random(SEED)
    start = datetime.datetime(2026, 3, 1, 0, 0, 0)
    pairs = [("ds18b20_1", "device_in_1", "zone_a"), ("ds18b20_2", "device_in_2", "zone_b")]
    with open(path, "w", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["ts_in_1", "ts_main", "system", "device", "sensing_device", "temp_in_1", "temp_in_2"])
        for i in range(ROWS):
            at = start + datetime.timedelta(hours=i)
            lag = datetime.timedelta(seconds=rng.randint(1, 9))
            sensing, device, system = pairs[i % 2]
            base = 21.0 + 4.0 * math.sin(2 * math.pi * (at.hour - 9) / 24)
            t1 = round(base * 2) / 2
            t2 = t1 + rng.choice([-0.5, 0.0, 0.0, 0.0, 0.5])
            writer.writerow([at.isoformat(), (at + lag).isoformat(), system, device, sensing, f"{t1:.1f}", f"{t2:.1f}"])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "readings.csv")
