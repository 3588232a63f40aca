#!/usr/bin/env python3
"""Independent one-off oracle for the golden fixture files.

Re-implements corpus reading, the four cleaning rules, multinomial naive
Bayes, probability averaging, argmax and the evaluation metrics from first
principles, without sharing any code with the Rust crates. Outputs:

  preprocess_50.golden.tsv        cleaned text for preprocess_50.conll
  mini_test.nb_word.golden.tsv    word 1-2 NB predictions on mini_test.conll
  mini_test.nb_word.labels.tsv    argmax labels of the file above
  mini_pipeline.golden.json       report for word+char NB ensemble on mini_test
"""
import json
import math
import unicodedata
from pathlib import Path

HERE = Path(__file__).resolve().parent
LABELS = ["negative", "neutral", "positive"]


def read_conll(path):
    tweets, cur = [], None
    for line in path.read_text(encoding="utf-8").split("\n"):
        if line == "":
            if cur is not None:
                tweets.append(cur)
                cur = None
            continue
        fields = line.split("\t")
        if cur is None:
            assert fields[0] == "meta"
            cur = {"uid": fields[1], "gold": fields[2] if len(fields) == 3 else None, "tokens": []}
        else:
            cur["tokens"].append(fields[0])
    if cur is not None:
        tweets.append(cur)
    return tweets


def is_link(tok):
    t = tok.lower()
    return t.startswith("http://") or t.startswith("https://") or t.startswith("www.") or "t.co/" in t


def clean(tokens):
    out = []
    for tok in tokens:
        if is_link(tok):
            continue
        tok = "".join(c for c in tok if unicodedata.category(c) != "Nd")
        tok = "".join(c for c in tok if unicodedata.category(c).startswith("L") or c.isspace())
        for piece in tok.split():
            piece = piece.lower()
            if piece:
                out.append(piece)
    return " ".join(out)


def ngrams(text, unit, lo, hi):
    items = (text.split(" ") if text else []) if unit == "word" else list(text)
    sep = " " if unit == "word" else ""
    grams = []
    for n in range(lo, hi + 1):
        for i in range(len(items) - n + 1):
            grams.append(sep.join(items[i:i + n]))
    return grams


class NB:
    def __init__(self, docs, unit, lo, hi, alpha=1.0):
        self.unit, self.lo, self.hi, self.alpha = unit, lo, hi, alpha
        self.class_docs = [0, 0, 0]
        counts = [dict(), dict(), dict()]
        for text, c in docs:
            self.class_docs[c] += 1
            for g in ngrams(text, unit, lo, hi):
                counts[c][g] = counts[c].get(g, 0) + 1
        vocab = set()
        for d in counts:
            vocab |= set(d)
        self.vocab = vocab
        self.counts = counts
        self.totals = [sum(d.values()) for d in counts]

    def predict(self, text):
        total_docs = sum(self.class_docs)
        v = len(self.vocab)
        scores = []
        for c in range(3):
            if self.class_docs[c] == 0:
                scores.append(-math.inf)
                continue
            s = math.log(self.class_docs[c] / total_docs)
            for g in ngrams(text, self.unit, self.lo, self.hi):
                if g in self.vocab:
                    s += math.log((self.counts[c].get(g, 0) + self.alpha) / (self.totals[c] + self.alpha * v))
            scores.append(s)
        m = max(scores)
        e = [math.exp(s - m) if s != -math.inf else 0.0 for s in scores]
        z = sum(e)
        return [x / z for x in e]


def argmax(p):
    best = 0
    for i in (1, 2):
        if p[i] > p[best]:
            best = i
    return best


def metrics(gold, pred):
    res = {"per_class": {}}
    f1s, ps, rs = [], [], []
    for c in range(3):
        tp = sum(1 for g, p in zip(gold, pred) if g == c and p == c)
        pc = sum(1 for p in pred if p == c)
        gc = sum(1 for g in gold if g == c)
        prec = tp / pc if pc else 0.0
        rec = tp / gc if gc else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        res["per_class"][LABELS[c]] = {"precision": prec, "recall": rec, "f1": f1}
        ps.append(prec); rs.append(rec); f1s.append(f1)
    res["macro_precision"] = sum(ps) / 3
    res["macro_recall"] = sum(rs) / 3
    res["macro_f1"] = sum(f1s) / 3
    res["accuracy"] = sum(1 for g, p in zip(gold, pred) if g == p) / len(gold)
    res["n"] = len(gold)
    res["confusion"] = [[sum(1 for g, p in zip(gold, pred) if g == a and p == b) for b in range(3)] for a in range(3)]
    return res


def write_preds(path, model_id, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("uid\tmodel\tp_negative\tp_neutral\tp_positive\n")
        for uid, p in rows:
            fh.write(f"{uid}\t{model_id}\t{p[0]:.6f}\t{p[1]:.6f}\t{p[2]:.6f}\n")


def main():
    pre = read_conll(HERE / "preprocess_50.conll")
    with open(HERE / "preprocess_50.golden.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("uid\tclean_text\n")
        for t in pre:
            fh.write(f"{t['uid']}\t{clean(t['tokens'])}\n")

    train = read_conll(HERE / "mini_train.conll")
    test = read_conll(HERE / "mini_test.conll")
    docs = [(clean(t["tokens"]), LABELS.index(t["gold"].lower())) for t in train]
    test_clean = [(t["uid"], clean(t["tokens"])) for t in test]
    gold = [LABELS.index(t["gold"].lower()) for t in test]

    word = NB(docs, "word", 1, 2)
    char = NB(docs, "char", 2, 4)
    word_rows = [(uid, word.predict(text)) for uid, text in test_clean]
    char_rows = [(uid, char.predict(text)) for uid, text in test_clean]
    write_preds(HERE / "mini_test.nb_word.golden.tsv", "nb-word-1-2", word_rows)
    with open(HERE / "mini_test.nb_word.labels.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("uid\tlabel\n")
        for uid, p in word_rows:
            fh.write(f"{uid}\t{LABELS[argmax(p)]}\n")

    ens = [[(a + b) / 2 for a, b in zip(pw, pc)] for (_, pw), (_, pc) in zip(word_rows, char_rows)]
    report = metrics(gold, [argmax(p) for p in ens])
    report["model_id"] = "ensemble(nb-char-2-4,nb-word-1-2)"
    report["word_only_macro_f1"] = metrics(gold, [argmax(p) for _, p in word_rows])["macro_f1"]
    report["char_only_macro_f1"] = metrics(gold, [argmax(p) for _, p in char_rows])["macro_f1"]
    counts = [sum(1 for _, c in docs if c == k) for k in range(3)]
    majority = max(range(3), key=lambda k: (counts[k], -k))
    report["majority_macro_f1"] = metrics(gold, [majority] * len(gold))["macro_f1"]
    (HERE / "mini_pipeline.golden.json").write_text(json.dumps(report, indent=2) + "\n")
    print(json.dumps({k: report[k] for k in ("macro_f1", "accuracy", "word_only_macro_f1", "char_only_macro_f1", "majority_macro_f1")}))


if __name__ == "__main__":
    main()
