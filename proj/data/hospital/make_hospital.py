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

# Regenerates hospital.csv. Deterministic: the output depends only on SEED.
import csv
import random
import sys

SEED = 11

PROVIDERS = [
    ("10018", "callahan eye foundation hospital", "1720 university blvd", "birmingham", "al", "35233", "2053258100"),
    ("10019", "helen keller memorial hospital", "1300 south montgomery avenue", "sheffield", "al", "35660", "2563864556"),
    ("10021", "dale medical center", "126 hospital ave", "ozark", "al", "36360", "3347742601"),
    ("10022", "cherokee medical center", "400 northwood dr", "centre", "al", "35960", "2569275531"),
    ("10023", "baptist medical center south", "2105 east south boulevard", "montgomery", "al", "36116", "3342882100"),
    ("10024", "jackson medical center", "220 hospital drive", "jackson", "al", "36545", "2512462900"),
    ("10025", "george h lanier memorial hospital", "4800 48th st", "valley", "al", "36854", "3347564111"),
    ("10027", "elba general hospital", "987 drayton street", "elba", "al", "36323", "3348972257"),
]

MEASURES = [
    ("ami-1", "aspirin at arrival", "heart attack"),
    ("ami-2", "aspirin prescribed at discharge", "heart attack"),
    ("hf-1", "discharge instructions", "heart failure"),
    ("pn-2", "pneumococcal vaccination", "pneumonia"),
    ("scip-inf-1", "prophylactic antibiotic received within one hour", "surgical infection prevention"),
]


def main(path):
    rng = random.Random(SEED)
    with open(path, "w", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["ProviderNumber", "HospitalName", "Address1", "City", "State", "ZipCode", "PhoneNumber",
                         "MeasureCode", "MeasureName", "Condition", "Stateavg"])
        for provider in PROVIDERS:
            for measure in rng.sample(MEASURES, 4):
                number, name, address, city, state, zipcode, phone = provider
                code, measure_name, condition = measure
                writer.writerow([number, name, address, city, state, zipcode, phone, code, measure_name, condition,
                                 f"{state}_{code}"])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "hospital.csv")
