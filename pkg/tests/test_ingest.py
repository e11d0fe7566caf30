import pytest

from mesobib.ingest import (
    Corpus,
    PublicationRecord,
    author_key,
    corpus_stats,
    extract_country,
    filter_corpus,
    is_anonymous,
    parse_field_tagged,
    parse_tabular,
    write_tabular,
)

WOS_BLOCK = """\
PT J
AU Smith, J
   Lee, K
TI Some title
PY 2001
C1 Univ Somewhere, Dept Chem, Boston, MA 02115 USA
NR 12
ER

AU Anon
PY 1999
NR 7
ER
"""


def test_author_key_normalization():
    assert author_key("Smith, J") == "SMITH_J"
    assert author_key("  Smith ,  J. K. ") == "SMITH_JK"
    assert author_key("van der Berg, A") == "VAN DER BERG_A"
    assert author_key("Smith_J") == "SMITH_J"
    assert author_key("Anon") == "ANON"


def test_author_key_idempotent():
    for raw in ("Smith, J", "LEE, K-H", "O'Brien, M.", "Tanaka_Y"):
        key = author_key(raw)
        assert author_key(key) == key


def test_is_anonymous():
    assert is_anonymous(author_key("Anon"))
    assert is_anonymous(author_key("ANON"))
    assert not is_anonymous(author_key("Anonsen, B"))


def test_parse_field_tagged_basic():
    result = parse_field_tagged(WOS_BLOCK)
    assert len(result.records) == 2
    rec = result.records[0]
    assert rec.authors == ("SMITH_J", "LEE_K")
    assert rec.year == 2001
    assert rec.countries == ("USA",)
    assert rec.n_references == 12
    # the Anon-only record is still emitted; filtering happens downstream
    assert result.records[1].authors == ("ANON",)


def test_parse_field_tagged_trailing_block_without_er():
    text = "AU Smith, J\n   Lee, K\nPY 2003\nNR 5\n"
    result = parse_field_tagged(text)
    assert len(result.records) == 1
    assert result.records[0].year == 2003


def test_parse_field_tagged_missing_year_is_warning():
    text = "AU Smith, J\nNR 5\nER\nAU Lee, K\n   Kim, S\nPY 2000\nNR 9\nER\n"
    result = parse_field_tagged(text)
    assert len(result.records) == 1
    assert len(result.warnings) == 1
    assert "PY" in result.warnings[0]


def test_parse_field_tagged_empty_input():
    result = parse_field_tagged("")
    assert result.records == ()
    assert result.warnings == ()


def test_parse_field_tagged_duplicate_authors_collapse():
    text = "AU Smith, J\n   Smith, J\nPY 2000\nNR 3\nER\n"
    result = parse_field_tagged(text)
    assert result.records[0].authors == ("SMITH_J",)


def test_extract_country():
    assert extract_country("Univ Somewhere, Boston, MA 02115 USA") == "USA"
    assert extract_country("Max Planck Inst, D-12489 Berlin, Germany.") == "GERMANY"
    assert extract_country("Acad Sinica, Beijing, Peoples R China") == "CHINA"
    assert extract_country("   ") is None


TABULAR = """\
record_id,year,authors,countries,n_references
p1,1995,Smith_J;Lee_K,USA;USA,10
p2,1996,Kim_S;Park_H;Kim_S,SOUTH KOREA,4
"""


def test_parse_tabular_basic():
    result = parse_tabular(TABULAR)
    assert len(result.records) == 2
    rec = result.records[0]
    assert rec.authors == ("SMITH_J", "LEE_K")
    assert rec.countries == ("USA", "USA")
    assert rec.n_references == 10
    # duplicate author collapses to one occurrence
    assert result.records[1].authors == ("KIM_S", "PARK_H")


def test_parse_tabular_missing_column_names_column():
    with pytest.raises(ValueError, match="countries"):
        parse_tabular("record_id,year,authors,n_references\np1,1995,A_B;C_D,3\n")


def test_parse_tabular_bad_rows_skipped_with_warning():
    text = (
        "record_id,year,authors,countries,n_references\n"
        "p1,notayear,A_B;C_D,,3\n"
        "p2,1999,,,3\n"
        "p3,1999,A_B;C_D,,3\n"
        "p3,2000,E_F;G_H,,3\n"
    )
    result = parse_tabular(text)
    assert [r.record_id for r in result.records] == ["p3"]
    assert len(result.warnings) == 3


def test_tabular_round_trip_idempotent():
    first = parse_tabular(TABULAR)
    text = write_tabular(first.records)
    second = parse_tabular(text)
    assert second.records == first.records
    assert write_tabular(second.records) == text


def _rec(rid, authors, n_refs=10, year=2000):
    return PublicationRecord(rid, year, tuple(authors), (), n_refs)


def test_filter_corpus_rules():
    records = [
        _rec("a", ["X_A"]),  # single author
        _rec("b", ["X_A", "ANON"], n_refs=5),  # one real author after Anon drop
        _rec("c", ["X_A", "X_B"], n_refs=1),  # single reference
        _rec("d", ["X_A", "X_B"], n_refs=2),
        _rec("e", ["X_A", "X_B", "ANON"], n_refs=9),
    ]
    result = filter_corpus(records)
    assert [r.record_id for r in result.corpus.records] == ["d", "e"]
    assert result.dropped_author_rule == 2
    assert result.dropped_reference_rule == 1
    # anonymous keys removed from kept records
    assert result.corpus.records[1].authors == ("X_A", "X_B")


def test_filter_corpus_idempotent_and_shrinking():
    records = [_rec(f"r{i}", ["X_A", "X_B"], n_refs=i) for i in range(6)]
    once = filter_corpus(records)
    twice = filter_corpus(once.corpus.records)
    assert twice.corpus.records == once.corpus.records
    assert len(once.corpus.records) <= len(records)


def test_filter_corpus_empty_output_is_legal():
    result = filter_corpus([_rec("a", ["X_A"])])
    assert result.corpus.records == ()
    assert result.corpus.time_span is None


def test_time_span_brackets_years():
    records = [_rec("a", ["X_A", "X_B"], year=1993), _rec("b", ["X_C", "X_D"], year=2001)]
    corpus = filter_corpus(records).corpus
    assert corpus.time_span == (1993, 2001)


def test_every_author_maps_to_a_record():
    records = [_rec("a", ["X_A", "X_B"]), _rec("b", ["X_B", "X_C"])]
    corpus = filter_corpus(records).corpus
    mapping = corpus.author_records()
    for rec in corpus.records:
        for key in rec.authors:
            assert rec.record_id in mapping[key]
    assert set(mapping) == {"X_A", "X_B", "X_C"}


def test_corpus_stats():
    corpus = filter_corpus(
        [
            _rec("a", ["A_A", "B_B", "C_C"]),
            _rec("b", ["A_A", "B_B", "D_D"]),
            _rec("c", ["A_A", "B_B", "C_C", "D_D"]),
        ]
    ).corpus
    stats = corpus_stats(corpus)
    assert stats.record_count == 3
    assert stats.author_count == 4
    assert stats.mean_authors == pytest.approx(10 / 3)
    assert stats.median_authors == 3


def test_corpus_stats_even_count_median_midpoint():
    corpus = filter_corpus([_rec("a", ["A_A", "B_B"]), _rec("b", ["A_A", "B_B", "C_C", "D_D"])]).corpus
    assert corpus_stats(corpus).median_authors == 3.0


def test_corpus_stats_single_and_empty():
    corpus = filter_corpus([_rec("a", ["A_A", "B_B"])]).corpus
    stats = corpus_stats(corpus)
    assert (stats.mean_authors, stats.median_authors) == (2.0, 2.0)
    empty = corpus_stats(Corpus(records=(), time_span=None))
    assert (empty.record_count, empty.author_count, empty.mean_authors, empty.median_authors) == (0, 0, 0.0, 0.0)
