import csv
import math
import statistics

TRAIN_IN = "@TRAIN_IN@"
TEST_IN = "@TEST_IN@"
PRED_OUT = "@PRED_OUT@"
TARGET = "@TARGET@"
TEMPERATURE = @TEMPERATURE@


def load(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


train = load(TRAIN_IN)
test = load(TEST_IN)
median = statistics.median(float(r["x3"]) for r in train if r["x3"].strip())


def vector(r):
    x1, x2 = float(r["x1"]), float(r["x2"])
    x3 = float(r["x3"]) if r["x3"].strip() else median
    return [x1, x2, x3 / 10.0, x1 * x2, 1.0 if r["color"] == "red" else 0.0]


labels = sorted({r[TARGET] for r in train})
centroids = {}
for label in labels:
    members = [vector(r) for r in train if r[TARGET] == label]
    centroids[label] = [sum(col) / len(members) for col in zip(*members)]

with open(PRED_OUT, "w", newline="") as f:
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow([f"proba_{label}" for label in labels])
    for r in test:
        v = vector(r)
        weights = [math.exp(-math.dist(v, centroids[label]) / TEMPERATURE) for label in labels]
        total = sum(weights)
        writer.writerow([f"{w / total:.12f}" for w in weights])
