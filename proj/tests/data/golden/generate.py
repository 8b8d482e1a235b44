#!/usr/bin/env python3
"""Regenerates corpus.jsonl and labels.tsv.

Each document is built to trip one rule (or none); the label column is the
intended outcome, written down by construction rather than by running the filters.
"""
import json
import pathlib

HERE = pathlib.Path(__file__).parent
docs = []  # (id, kind, language, content, expected)


def src(i, lang, content, expected):
    docs.append((f"s{i:02d}", "source_code", lang, content, expected))


def txt(i, content, expected):
    docs.append((f"t{i:02d}", "text", None, content, expected))


src(1, "python", """def mean(values):
    \"\"\"Arithmetic mean of a non-empty list.\"\"\"
    total = 0.0
    for v in values:
        total += v
    return total / len(values)


if __name__ == "__main__":
    print(mean([1, 2, 3]))
""", "keep")
src(2, "c", """#include <stdio.h>

/* Print the first n squares. */
int main(void) {
    int n = 5;
    for (int i = 1; i <= n; ++i) {
        printf("%d\\n", i * i);
    }
    return 0;
}
""", "keep")
src(3, "python", "".join(f"https://example.com/files/archive-{i:03d}.tar.gz\n" for i in range(20)), "url_ip_ratio")
src(4, "shell", "".join(f"10.0.{i}.{i + 1}\n" for i in range(20)), "url_ip_ratio")
src(5, "python", "".join(f"maintainer{i:02d}@example.org\n" for i in range(20)), "pii_ratio")
src(6, "python", "".join(f"555-201-{4500 + i}\n" for i in range(20)), "pii_ratio")
src(7, "python", "x = 1\n" + "\x01\x02\x03\x04 payload\n" * 1 + "y = [\x05\x06\x07\x08]\n", "garbled")
src(8, "c", "int v�� = 0; // ����\nchar *s = \"���\";\n", "garbled")
src(9, "python", "print('hello world')\n" * 20, "duplication")
src(10, "python", "tick tick tick tick tick tick tick tick tick tick\n", "duplication")
src(11, "python", "BLOB = '" + "".join(f"{i:04x}" for i in range(300)) + "'\nprint(len(BLOB))\n", "max_line_len")
# Exactly 1000 characters on the long line: at the limit, not over it.
long_line = "K = '" + "".join(f"{i:04x}" for i in range(248)) + "'"
assert len(long_line) == 998
long_line += "  "
assert len(long_line) == 1000
src(12, "python", long_line + "\n" + "".join(f"k{i} = {i}\n" for i in range(14)), "keep")
src(13, "python", "".join(" ".join(f"w{i}_{j}" for j in range(25)) + "\n" for i in range(10)), "avg_line_len")
src(14, "java", """package demo;

import java.util.List;

/** Sums integers. */
public final class Summer {
    private Summer() {}

    public static int sum(List<Integer> xs) {
        int s = 0;
        for (int x : xs) {
            s += x;
        }
        return s;
    }
}
""", "keep")
src(15, "go", """package fetch

// Docs: https://pkg.go.dev/net/http
import "net/http"

// Get issues a GET request and returns the status code.
func Get(url string) (int, error) {
	resp, err := http.Get(url)
	if err != nil {
		return 0, err
	}
	defer resp.Body.Close()
	return resp.StatusCode, nil
}
""", "keep")
src(16, "javascript", """// Release cut on 2024-03-01.
const RELEASE = "v1.4.0";

function banner(name) {
  return `${name} ${RELEASE}`;
}

module.exports = { banner };
""", "keep")
src(17, "shell", """#!/bin/sh
set -eu
# Build then run the unit tests.
mkdir -p build
cd build
cmake ..
make -j4
ctest --output-on-failure
""", "keep")
# Average line length exactly 100: at the limit, not over it.
lines18 = [f"v{i:02d} = '" + "".join(f"{i:02d}{j:02d}" for j in range(23)) + "'" for i in range(6)]
lines18 = [l + " " * (100 - len(l)) if len(l) < 100 else l[:100] for l in lines18]
assert all(len(l) == 100 for l in lines18)
src(18, "python", "\n".join(lines18), "keep")

txt(1, """The river rose slowly through the night, and by morning the lower fields were under water.
Farmers moved their animals to the ridge while the village council met in the church hall.
Nobody could remember a flood this early in the season.
""", "keep")
txt(2, """Our release notes describe every change in detail.
They are published with each version of the library.
Read them online at https://example.com/notes before upgrading.
Older notes remain available in the archive section.
Questions can be raised on the mailing list.
""", "keep")
txt(3, """The architecture has three layers.
![architecture diagram](figures/layers.png)
Each layer talks only to its neighbours.
""", "image_reference")
txt(4, """<p>The team photo from the summer offsite.</p>
<IMG src="team.jpg" alt="team">
<p>Thanks to everyone who came.</p>
""", "image_reference")
txt(5, """Lorem ipsum dolor sit amet, consectetur adipiscing elit.
Sed do eiusmod tempor incididunt ut labore et dolore magna aliqua.
""", "placeholder")
txt(6, """Welcome to our product page.
Your text here.
Contact sales for pricing.
""", "placeholder")
txt(7, """See the [setup guide](setup.md) before you begin.
The [configuration reference](config.md) lists every option.
Known problems are tracked in [the issue list](issues.md).
Everything else is covered in the manual.
""", "link_density")
txt(8, "".join(f"https://mirror{i}.example.net/pub/dataset-{i:03d}.zip\n" for i in range(15)), "url_ip_ratio")
txt(9, "".join(f"contact.person{i:02d}@example.com\n" for i in range(15)), "pii_ratio")
txt(10, "Subscribe to our newsletter today!\n" * 12, "duplication")
txt(11, "R�sum� of the caf� meeting ����\n���� notes\n", "garbled")
txt(12, " ".join(f"token{i}" for i in range(120)) + "\n", "keep")

assert len(docs) == 30, len(docs)


def line(id_, kind, lang, content):
    rec = {"id": id_, "kind": kind, "content": content}
    if lang:
        rec["language"] = lang
    return json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n"


# The full corpus plus one file per kind, since each filter accepts one kind.
outputs = {"corpus.jsonl": None, "source.jsonl": "source_code", "text.jsonl": "text"}
for name, only in outputs.items():
    with open(HERE / name, "w", encoding="utf-8") as f:
        for id_, kind, lang, content, _ in docs:
            if only is None or kind == only:
                f.write(line(id_, kind, lang, content))
with open(HERE / "labels.tsv", "w", encoding="utf-8") as f:
    f.write("# id\texpected (keep or the first failing rule)\n")
    for id_, _, _, _, expected in docs:
        f.write(f"{id_}\t{expected}\n")
