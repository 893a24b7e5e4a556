#!/usr/bin/env python3
"""Generate the planted synthetic corpus and its expected results.

Every expected value is known by construction: each planted group is a list
of canonical code lines (no blank or bracket-only lines), so its normalized
line count is len(lines) and its alphanumeric projection is the concatenated
alphanumerics of those lines. Copies are rendered with cosmetic noise
(bracket-only lines, blank lines, trailing blanks, CRLF, spacing around
punctuation) that normalization must remove, and embedded as fenced,
indented or <pre><code> blocks.

Writes planted_corpus.jsonl and planted_expected.json next to this script.
Re-running with the same seed reproduces both files byte for byte.
"""

import json
import random
import statistics
from datetime import datetime, timedelta, timezone
from pathlib import Path

SEED = 20191017
HERE = Path(__file__).resolve().parent

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def alnum(text: str) -> str:
    return "".join(c for c in text if c.isascii() and c.isalnum())


rng = random.Random(SEED)

WORDS = ["value", "count", "index", "buffer", "result", "item", "node", "total",
         "cursor", "handler", "stream", "config", "record", "entry", "token"]


def code_lines(tag: str, n: int) -> list:
    """n canonical lines, unique to `tag` through their alphanumerics."""
    lines = []
    for i in range(n):
        w = rng.choice(WORDS)
        style = i % 4
        if style == 0:
            lines.append(f"int {w}_{tag}_{i} = compute{tag}({i});")
        elif style == 1:
            lines.append(f"    if ({w}_{tag} < {i}) {{")
        elif style == 2:
            lines.append(f"        {w}_{tag}.add(\"{tag}-{i}\"); // step {i}")
        else:
            lines.append(f"    }} // end {tag} {i}")
    return lines


def noisy(lines: list, variant: int) -> str:
    """Render lines with noise that normalization removes."""
    if variant == 0:
        return "\n".join(lines)
    out = []
    for i, line in enumerate(lines):
        if variant in (1, 3) and i % 3 == 0:
            out.append("{")
        if variant in (2, 3) and i % 4 == 1:
            out.append("")
            out.append("   ")
        l2 = line
        if variant == 2:
            l2 = line.replace("(", " ( ").replace(";", " ;")
        out.append(l2 + ("  \t" if i % 2 == 0 else ""))
        if variant in (1, 3) and i % 5 == 4:
            out.append("  ]  ")
            out.append("})")
    text = "\n".join(out) + "\n\n"
    if variant == 3:
        text = text.replace("\n", "\r\n")
    return text


def html_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def embed(raw: str, style: str) -> str:
    if style == "fenced":
        return "```java\n" + raw + "\n```"
    if style == "tilde":
        return "~~~\n" + raw + "\n~~~"
    if style == "indented":
        return "\n".join(("    " + l) if l.strip() else "" for l in raw.replace("\r\n", "\n").split("\n"))
    if style == "pre":
        return "<pre><code>" + html_escape(raw) + "</code></pre>"
    raise ValueError(style)


# ---------------------------------------------------------------------------
# Threads and posts

N_THREADS = 60
BASE = datetime(2012, 4, 1, tzinfo=timezone.utc)

posts = []  # dicts in output order
threads = []  # list of lists of post indices
next_id = 1000
for t in range(N_THREADS):
    q_date = BASE + timedelta(days=t * 11, hours=rng.randrange(24))
    qid = next_id
    next_id += 1
    members = []
    posts.append({"post_id": qid, "post_type": "question", "creation_date": q_date,
                  "author_id": 100 + t, "score": rng.randrange(-2, 30),
                  "parts": [], "thread": qid})
    members.append(len(posts) - 1)
    n_answers = 2 if t < 40 else 3
    for a in range(n_answers):
        aid = next_id
        next_id += 1
        a_date = q_date + timedelta(hours=3 + a * 7 + rng.randrange(5), minutes=rng.randrange(60))
        posts.append({"post_id": aid, "post_type": "answer", "parent_id": qid,
                      "creation_date": a_date, "author_id": 500 + (t * 3 + a) % 90,
                      "score": rng.randrange(0, 50), "parts": [], "thread": qid})
        members.append(len(posts) - 1)
    threads.append(members)

STYLES = ["fenced", "tilde", "indented", "pre"]


def place(post_idx: int, lines: list, variant: int = 0, style: str = None) -> None:
    style = style or rng.choice(STYLES)
    posts[post_idx]["parts"].append(("code", embed(noisy(lines, variant), style), lines))


def prose(post_idx: int, text: str) -> None:
    posts[post_idx]["parts"].append(("prose", text, None))


groups = []  # expected planted groups


def plant(name: str, nloc: int, placements: list, variants=None) -> dict:
    lines = code_lines(name, nloc)
    # the noise-free rendering goes to the earliest post
    placements = sorted(placements, key=lambda i: (posts[i]["creation_date"], posts[i]["post_id"]))
    for k, p in enumerate(placements):
        variant = 0 if k == 0 else (variants[k % len(variants)] if variants else rng.randrange(4))
        place(p, lines, variant)
    g = {"name": name, "nloc": nloc, "lines": lines, "posts": placements}
    groups.append(g)
    return g


def q(t):  # question of thread t
    return threads[t][0]


def ans(t, k):  # k-th answer of thread t
    return threads[t][1 + k]


# Thread-count 1..5 groups over threads 0..39, plus the 45-post group over 40..54.
plant("Big60", 60, [q(0), ans(1, 0), ans(2, 1), q(3), ans(4, 0), ans(4, 1)])
plant("Svc45", 45, [ans(5, 0), q(6), ans(7, 1), ans(8, 0)])
plant("Doc24", 24, [ans(9, 0), ans(10, 0), q(11)])
plant("Pair25a", 25, [ans(12, 0), ans(13, 1), ans(14, 0)])
plant("Pair25b", 25, [ans(15, 0), q(16)], variants=[3])
plant("Dup22", 22, [ans(17, 0), ans(17, 1), q(18)])
plant("Edge20", 20, [ans(19, 0), ans(20, 1)])
plant("Under19", 19, [q(21), ans(22, 0)])
plant("Small8", 8, [ans(23, 0), ans(1, 0)])
plant("Six6", 6, [ans(25, 0), q(26), ans(27, 1)])
plant("Five5", 5, [ans(28, 0), q(0)])
plant("Tiny3", 3, [ans(30, 0), ans(31, 1), q(32), ans(33, 0)])
plant("Lone30", 30, [ans(34, 0), ans(34, 1)])
plant("TieA21", 21, [ans(35, 0), ans(36, 0)])
plant("TieB21", 21, [ans(37, 1), ans(38, 0)])

# Same-author clone chain: one author answers five threads with one snippet.
vba_posts = [ans(t, 1) for t in (39, 1, 3, 6, 9)]
for i, p in enumerate(vba_posts):
    posts[p]["author_id"] = 777
    posts[p]["creation_date"] = datetime(2016, 9, 16, tzinfo=timezone.utc) + timedelta(days=i * 170)
plant("Vba28", 28, vba_posts)

# 45 posts over 15 threads (every post of threads 40..54), 3 of them citing
# the tutorial site.
hive_posts = [p for t in range(40, 55) for p in threads[t]][:45]
assert len(hive_posts) == 45
plant("Hive35", 35, hive_posts)

# Decoys: one alphanumeric changed, each in a single thread.
def mutate(lines, where, old, new):
    out = list(lines)
    assert old in out[where]
    out[where] = out[where].replace(old, new, 1)
    return out


by_name = {g["name"]: g for g in groups}
decoys = [
    ("DecoyBig60", mutate(by_name["Big60"]["lines"], 8, "compute", "compite"), ans(55, 0)),
    ("DecoySvc45", mutate(by_name["Svc45"]["lines"], 4, "compute", "Compute"), q(56)),
    ("DecoyPair25a", mutate(by_name["Pair25a"]["lines"], 0, "= ", "= 1"), ans(57, 1)),
    ("DecoyHive35", mutate(by_name["Hive35"]["lines"], 8, "compute", "computed"), ans(58, 0)),
]
for name, lines, p in decoys:
    place(p, lines, 0)
    groups.append({"name": name, "nloc": len(lines), "lines": lines, "posts": [p]})

# Attribution evidence.
hive_linked = [hive_posts[2], hive_posts[17], hive_posts[31]]
for p in hive_linked:
    prose(p, "Adapted from [this tutorial](https://www.androidhive.info/2012/05/"
             "how-to-connect-android-with-php-mysql/).")
prose(hive_posts[5], "The tutorial on `http://www.androidhive.info/` covers this too.")
prose(hive_posts[9], "Related: https://stackoverflow.com/a/39532855 and "
                     "[this question](https://stackoverflow.com/q/10000).")
doc_linked = [by_name["Doc24"]["posts"][1]]
for p in doc_linked:
    prose(p, "See https://developer.android.com/training/articles/security-ssl.html.")
prose(by_name["Vba28"]["posts"][2], "Same approach as in my other answer "
      "<a href=\"https://stackoverflow.com/a/52040136\">here</a>.")

# Singletons, empty blocks and prose-only posts.
singleton_count = 0
for idx, post in enumerate(posts):
    r = rng.random()
    if not post["parts"] and r < 0.55:
        lines = code_lines(f"Uniq{singleton_count}", rng.randrange(1, 40))
        singleton_count += 1
        place(idx, lines, rng.randrange(4))
        groups.append({"name": f"Uniq{singleton_count - 1}", "nloc": len(lines),
                       "lines": lines, "posts": [idx]})
    elif not post["parts"] and r < 0.65:
        # Bracket-only block: normalizes to nothing, never indexed.
        posts[idx]["parts"].append(("code", embed("{\n}\n  ()\n", "fenced"), None))
    if rng.random() < 0.3:
        prose(idx, "Use the `foo()` call; it returns `null` when empty.")

# A wiki-type post whose code must be ignored.
wiki_id = next_id
next_id += 1
posts.append({"post_id": wiki_id, "post_type": "tag_wiki", "creation_date": BASE,
              "author_id": 1, "score": 0, "thread": wiki_id,
              "parts": [("code", embed("\n".join(by_name["Big60"]["lines"]), "fenced"), None)]})

# ---------------------------------------------------------------------------
# Bodies, block indices and occurrences

def render(post):
    chunks = ["Some explanation of the problem."]
    block_idx = 0
    occ = []
    prev = None
    for kind, text, lines in post["parts"]:
        if kind == "code":
            if prev == "code":
                chunks.append("Or alternatively:")
            chunks.append(text)
            if lines is not None:
                occ.append((block_idx, tuple(lines)))
            block_idx += 1
        else:
            chunks.append(text)
        prev = kind
    chunks.append("Hope this helps.")
    return "\n\n".join(chunks) + "\n", occ


records = []
occurrences_by_lines = {}
for post in posts:
    body, occ = render(post)
    rec = {"post_id": post["post_id"], "post_type": post["post_type"]}
    if "parent_id" in post:
        rec["parent_id"] = post["parent_id"]
    rec["creation_date"] = post["creation_date"].strftime("%Y-%m-%dT%H:%M:%SZ")
    rec["author_id"] = post["author_id"]
    rec["score"] = post["score"]
    rec["body"] = body
    records.append(rec)
    if post["post_type"] not in ("question", "answer"):
        continue
    for block_idx, lines in occ:
        occurrences_by_lines.setdefault(lines, []).append(
            {"post_id": post["post_id"], "block_index": block_idx, "thread_id": post["thread"],
             "creation_date": rec["creation_date"], "author_id": post["author_id"]})

# Distinct projections must match distinct planted line lists.
projections = {}
for lines in occurrences_by_lines:
    projections.setdefault(alnum("".join(lines)), []).append(lines)
assert all(len(v) == 1 for v in projections.values()), "planted projections collide"

expected_groups = []
for g in groups:
    occ = sorted(occurrences_by_lines[tuple(g["lines"])],
                 key=lambda o: (o["creation_date"], o["post_id"], o["block_index"]))
    projection = alnum("".join(g["lines"]))
    thread_ids = sorted({o["thread_id"] for o in occ})
    eg = {
        "name": g["name"],
        "nloc": g["nloc"],
        "fingerprint": format(fnv1a64(projection.encode()), "016x"),
        "thread_ids": thread_ids,
        "occurrences": [[o["post_id"], o["block_index"]] for o in occ],
        "earliest_post_id": occ[0]["post_id"],
        "content": "\n".join(l.rstrip() for l in g["lines"]),
    }
    authors = {}
    for o in occ:
        authors.setdefault(o["author_id"], set()).add(o["thread_id"])
    eg["same_author_chain"] = any(
        len(ts) >= 2 and sum(1 for o in occ if o["author_id"] == a) >= 2
        for a, ts in authors.items())
    expected_groups.append(eg)

eg_by_name = {g["name"]: g for g in expected_groups}
post_id_of = lambda idx: posts[idx]["post_id"]


def attribution(group, domain, linked):
    ids = sorted({p for p, _ in eg_by_name[group]["occurrences"]})
    linked_ids = sorted(post_id_of(i) for i in linked)
    return {"group": group, "domain": domain, "attributed": linked_ids,
            "unattributed": [i for i in ids if i not in linked_ids]}


def rank_key(g):
    return (-len(g["thread_ids"]), -g["nloc"], int(g["fingerprint"], 16), g["content"])


def filtered(min_nloc):
    return sorted((g for g in expected_groups
                   if len(g["thread_ids"]) >= 2 and g["nloc"] >= min_nloc), key=rank_key)


def distribution(values):
    q1, q2, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return {"mean": statistics.fmean(values), "sd": statistics.stdev(values),
            "median": q2, "iqr": q3 - q1}


strict = filtered(20)
loose = filtered(6)
histogram = {}
for g in strict:
    histogram[str(len(g["thread_ids"]))] = histogram.get(str(len(g["thread_ids"])), 0) + 1
cloned = sum(1 for g in expected_groups if len(g["thread_ids"]) >= 2)

expected = {
    "seed": SEED,
    "posts": len(records),
    "threads": N_THREADS,
    "distinct_fingerprints": len(expected_groups),
    "cloned_fingerprints": cloned,
    "cloned_fraction": cloned / len(expected_groups),
    "filtered_count_by_threshold": {"6": len(loose), "20": len(strict)},
    "histogram_min_nloc_20": histogram,
    "ranking_min_nloc_20": [g["fingerprint"] for g in strict],
    "ranking_min_nloc_6": [g["fingerprint"] for g in loose],
    "nloc_min_nloc_20": distribution([g["nloc"] for g in strict]),
    "threads_min_nloc_20": distribution([len(g["thread_ids"]) for g in strict]),
    "pct_more_than_two_threads_min_nloc_20":
        sum(1 for g in strict if len(g["thread_ids"]) > 2) / len(strict),
    "attribution": [
        attribution("Hive35", "androidhive.info", hive_linked),
        attribution("Doc24", "developer.android.com", doc_linked),
    ],
    "planted_groups": [g for g in expected_groups if not g["name"].startswith("Uniq")],
    "singleton_groups": [g["fingerprint"] for g in expected_groups if g["name"].startswith("Uniq")],
}

with open(HERE / "planted_corpus.jsonl", "w", encoding="utf-8", newline="\n") as f:
    for rec in records:
        f.write(json.dumps(rec, ensure_ascii=False) + "\n")
with open(HERE / "planted_expected.json", "w", encoding="utf-8", newline="\n") as f:
    json.dump(expected, f, indent=2)
    f.write("\n")

print(f"{len(records)} posts, {N_THREADS} threads, {len(expected_groups)} distinct snippets, "
      f"{cloned} cloned, {len(strict)} at nloc>=20, {len(loose)} at nloc>=6")
