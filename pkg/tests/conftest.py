import io

import pytest

from kompet import golden, load_taxonomy, parse_corpus
from kompet.cli import dispatch
from kompet.taxonomy import TaxonomyConcept, TaxonomyIndex


@pytest.fixture(scope="session")
def golden_corpus():
    return parse_corpus(golden.corpus_path())


@pytest.fixture(scope="session")
def golden_index():
    return load_taxonomy(golden.taxonomy_path(), "da")


def run_cli(argv):
    """Run one CLI command in-process; returns (exit_code, stdout_text)."""
    buf = io.StringIO()
    code = dispatch(argv, out=buf)
    return code, buf.getvalue()


def concept(code, kind="skill", label=None, alts=(), parent=None, lang="da"):
    return TaxonomyConcept(
        code=code,
        uri=f"https://example.org/esco/{code}",
        kind=kind,
        preferred_label={lang: label if label is not None else code},
        alt_labels={lang: list(alts)} if alts else {},
        description=None,
        parent_code=parent,
    )


def index_of(*concepts, language="da"):
    return TaxonomyIndex(concepts, language)
