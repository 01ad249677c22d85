import csv

TRAIN_IN = "@TRAIN_IN@"
TEST_IN = "@TEST_IN@"
TRAIN_OUT = "@TRAIN_OUT@"
TEST_OUT = "@TEST_OUT@"
COLORS = ["blue", "green", "red"]


def load(path):
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        return reader.fieldnames, list(reader)


def expand(fields, rows):
    out_fields = [c for c in fields if c != "color"] + ["x1x2"] + [f"color_{c}" for c in COLORS]
    for r in rows:
        r["x1x2"] = f"{float(r['x1']) * float(r['x2']):.6f}"
        for c in COLORS:
            r[f"color_{c}"] = "1" if r["color"] == c else "0"
        del r["color"]
    return out_fields, rows


def save(path, fields, rows):
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


for src, dst in ((TRAIN_IN, TRAIN_OUT), (TEST_IN, TEST_OUT)):
    fields, rows = load(src)
    save(dst, *expand(fields, rows))
