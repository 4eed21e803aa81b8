import pytest

from relmine.corpus import (Document, ParagraphSplit, SegmentationConfig, UnitKind,
                            document_from_dict, document_to_dict, ingest_text,
                            segment)
from relmine.errors import EmptyDocumentError, EncodingError, SegmentationError
from relmine.textnorm import fold, tokenize_line

from conftest import data_path


def test_tokenize_basic():
    doc = ingest_text("Blé\ntendre.".encode(), "d1")
    assert len(doc.lines) == 2
    assert [t.surface for t in doc.tokens] == ["Blé", "tendre", "."]
    assert [t.word_index for t in doc.tokens] == [0, 1, 2]


def test_tokenize_joiners_and_numbers():
    surfaces = [s for s, _ in tokenize_line("d'hiver ray-grass 0,27 10-2012 T. durum")]
    assert surfaces == ["d'hiver", "ray-grass", "0,27", "10", "-", "2012",
                        "T", ".", "durum"]


def test_fold_strips_accents_and_case():
    assert fold("Blé") == "ble"
    assert fold("BLÉ") == "ble"
    assert fold("piétin Échaudage") == "pietin echaudage"
    assert fold("d’hiver") == "d'hiver"


def test_empty_document_rejected():
    with pytest.raises(EmptyDocumentError):
        ingest_text(b"", "empty")
    with pytest.raises(EmptyDocumentError):
        ingest_text(b"  \n\t\n", "blank")


def test_encoding_strict_and_lossy():
    bad = "Blé".encode("latin-1")
    with pytest.raises(EncodingError):
        ingest_text(bad, "bad")
    doc = ingest_text(bad, "bad", strict=False)
    assert doc.tokens


def test_line_initial_flag():
    with open(data_path("bsv", "bsv_2010_10_bourgogne.txt"), "rb") as handle:
        doc = ingest_text(handle.read(), "bsv1")
    ble = [t for t in doc.tokens if t.surface == "Blé"]
    assert ble and all(t.is_line_initial for t in ble)


def test_char_offsets_within_lines():
    doc = ingest_text("  un deux\ntrois".encode(), "d")
    for token in doc.tokens:
        line = doc.lines[token.line_index]
        assert 0 <= token.char_offset < len(line)
        assert line[token.char_offset:].startswith(token.surface)


@pytest.fixture
def segmented_bsv(matcher):
    with open(data_path("bsv", "bsv_2011_03_centre.txt"), "rb") as handle:
        doc = ingest_text(handle.read(), "bsv3")
    cfg = SegmentationConfig(header_line_count=10, main_entity_category="p",
                             avoid_start_phrases=["Raisonner la lutte contre"])
    return segment(doc, cfg, matcher)


def test_segment_kinds_and_titles(segmented_bsv):
    kinds = [u.kind for u in segmented_bsv.text_units]
    assert kinds == [UnitKind.HEADER, UnitKind.SECTION, UnitKind.AVOID,
                     UnitKind.SECTION]
    section = segmented_bsv.text_units[1]
    start, end = section.title_span
    assert segmented_bsv.surface_span(start, end) == "Céréales"
    assert segmented_bsv.text_units[0].unit_id == 0


def test_segment_section_title_covers_line_initial_match(matcher):
    with open(data_path("bsv", "bsv_2010_10_bourgogne.txt"), "rb") as handle:
        doc = ingest_text(handle.read(), "bsv1")
    cfg = SegmentationConfig(header_line_count=10, main_entity_category="p")
    seg = segment(doc, cfg, matcher)
    sections = [u for u in seg.text_units if u.kind is UnitKind.SECTION]
    titles = [seg.surface_span(*u.title_span) for u in sections]
    assert titles == ["Blé", "Orge"]


def test_segment_no_boundaries_single_paragraph(matcher):
    doc = ingest_text("un deux\ntrois quatre\ncinq".encode(), "p1")
    cfg = SegmentationConfig(header_line_count=0, main_entity_category="p",
                             paragraph_split=ParagraphSplit.BLANK_LINE)
    seg = segment(doc, cfg, matcher)
    assert len(seg.text_units) == 1
    unit = seg.text_units[0]
    assert unit.kind is UnitKind.PARAGRAPH
    assert (unit.start_word, unit.end_word) == (0, len(doc.tokens) - 1)


def test_segment_blank_line_split(matcher):
    doc = ingest_text("un deux\n\ntrois".encode(), "p2")
    cfg = SegmentationConfig(header_line_count=0, paragraph_split=ParagraphSplit.BLANK_LINE)
    seg = segment(doc, cfg, matcher)
    assert [(u.start_word, u.end_word) for u in seg.text_units] == [(0, 1), (2, 2)]


def test_segment_sentence_split(matcher):
    doc = ingest_text("Un deux. Trois quatre! Cinq".encode(), "p3")
    cfg = SegmentationConfig(header_line_count=0, paragraph_split=ParagraphSplit.SENTENCE)
    seg = segment(doc, cfg, matcher)
    # tokens: Un deux . Trois quatre ! Cinq
    spans = [(u.start_word, u.end_word) for u in seg.text_units]
    assert spans == [(0, 2), (3, 5), (6, 6)]


def test_segment_idempotent(segmented_bsv, matcher):
    cfg = SegmentationConfig(header_line_count=10, main_entity_category="p",
                             avoid_start_phrases=["Raisonner la lutte contre"])
    again = segment(segmented_bsv, cfg, matcher)
    assert again.text_units == segmented_bsv.text_units


def test_every_body_word_in_exactly_one_unit(segmented_bsv):
    for token in segmented_bsv.tokens:
        holders = [u for u in segmented_bsv.text_units if u.contains(token.word_index)]
        assert len(holders) == 1


def test_avoid_end_phrase_closes_block(matcher):
    text = ("Blé\nrien à signaler.\n"
            "Raisonner la lutte contre les taupins\ntexte à éviter\n"
            "Retour aux observations\nsuite normale du texte")
    doc = ingest_text(text.encode(), "a1")
    cfg = SegmentationConfig(header_line_count=0, main_entity_category="p",
                             avoid_start_phrases=["Raisonner la lutte contre"],
                             avoid_end_phrases=["Retour aux observations"])
    seg = segment(doc, cfg, matcher)
    kinds = [u.kind for u in seg.text_units]
    assert kinds == [UnitKind.SECTION, UnitKind.AVOID, UnitKind.PARAGRAPH]


def test_header_must_fit(matcher):
    doc = ingest_text("a\nb\nc".encode(), "h")
    with pytest.raises(SegmentationError):
        segment(doc, SegmentationConfig(header_line_count=3), matcher)


def test_document_json_round_trip(segmented_bsv):
    data = document_to_dict(segmented_bsv)
    back = document_from_dict(data)
    assert back == segmented_bsv
    assert document_to_dict(back) == data


def test_reingest_reproduces_word_indices(segmented_bsv):
    raw = "\n".join(segmented_bsv.lines).encode()
    again = ingest_text(raw, segmented_bsv.doc_id)
    assert [t.word_index for t in again.tokens] == \
        [t.word_index for t in segmented_bsv.tokens]
    assert [t.surface for t in again.tokens] == \
        [t.surface for t in segmented_bsv.tokens]
