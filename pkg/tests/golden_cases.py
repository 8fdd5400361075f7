"""The CLI invocations whose outputs are frozen under tests/golden/.

Shared by make_goldens.py (writer) and test_cli.py (checker). Order matters:
the supervise case writes the silver file that the distribution case reads.
"""

from pathlib import Path

from kompet import golden

HERE = Path(__file__).parent
GOLDEN_DIR = HERE / "golden"
DATA_DIR = HERE / "data"


def cases():
    corpus = str(golden.corpus_path())
    tax = str(golden.taxonomy_path())
    gold = str(golden.gold_path())
    silver = str(GOLDEN_DIR / "silver.jsonl")
    preds = str(DATA_DIR / "preds.tsv")
    runs = str(DATA_DIR / "runs.json")
    annot_a = str(DATA_DIR / "annot_a.jsonl")
    annot_b = str(DATA_DIR / "annot_b.jsonl")
    return [
        ("stats.txt", ["stats", "--corpus", corpus]),
        ("stats.json", ["stats", "--corpus", corpus, "--json"]),
        ("split.txt", ["split", "--corpus", corpus, "--sizes", "3,1,1", "--seed", "7"]),
        ("split.json", ["split", "--corpus", corpus, "--sizes", "3,1,1", "--seed", "7", "--json"]),
        ("silver.jsonl", ["supervise", "--corpus", corpus, "--taxonomy", tax]),
        ("distribution.txt", ["distribution", "--labeled", silver]),
        ("distribution.json", ["distribution", "--labeled", silver, "--json"]),
        ("evaluate.txt", ["evaluate", "--pred", preds, "--gold", gold, "--confusion"]),
        (
            "evaluate.json",
            ["evaluate", "--pred", preds, "--gold", gold, "--confusion", "--normalize", "row", "--json"],
        ),
        ("compare.tsv", ["compare", "--runs", runs, "--seed", "0"]),
        ("compare.json", ["compare", "--runs", runs, "--seed", "0", "--json"]),
        ("agreement_token.txt", ["agreement", "--level", "token", "--views", annot_a, annot_b]),
        (
            "agreement_span.json",
            ["agreement", "--level", "span", "--views", annot_a, annot_b, "--json"],
        ),
        ("taxonomy_validate.txt", ["taxonomy", "validate", "--file", tax, "--language", "da"]),
        (
            "taxonomy_validate.json",
            ["taxonomy", "validate", "--file", tax, "--language", "da", "--json"],
        ),
    ]
