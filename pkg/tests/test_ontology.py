import json

import pytest

from curralign.ontology import (
    CategoryKind,
    DuplicateIdError,
    GuidelineParseError,
    UnknownIdError,
    apply_unit_summaries,
    context_of,
    dump_guideline,
    guideline_to_dict,
    parse_guideline,
    rateable_categories,
)
from conftest import guideline_with_totals, small_guideline_dict


def test_empty_areas_gives_zero_categories():
    g = parse_guideline(json.dumps({"name": "empty", "areas": []}))
    assert g.categories == []
    assert rateable_categories(g) == []


def test_fixture_counts_rateable_and_headings():
    tree = {
        "name": "tiny",
        "areas": [
            {
                "id": "KA1",
                "title": "Area",
                "units": [
                    {
                        "id": "KU1",
                        "title": "Unit",
                        "items": [
                            {"id": "t1", "kind": "topic", "text": "first topic"},
                            {"id": "t2", "kind": "topic", "text": "second topic"},
                        ],
                    }
                ],
            }
        ],
    }
    g = parse_guideline(json.dumps(tree))
    headings = [c for c in g.categories if c.kind is CategoryKind.HEADING]
    assert len(rateable_categories(g)) == 2
    assert len(headings) == 2
    assert len(g.categories) == 4


def test_guideline_scale_count_includes_headings():
    # 10 areas + 80 units = 90 heading rows; 2700 items; 2790 total.
    g = guideline_with_totals(areas=10, units=80, items=2700)
    assert len(g.categories) == 2790
    assert len(rateable_categories(g)) == 2700


def test_duplicate_id_rejected():
    tree = small_guideline_dict()
    tree["areas"][0]["units"][0]["items"][0]["id"] = "DS/Lists/linked"
    with pytest.raises(DuplicateIdError, match="DS/Lists/linked"):
        parse_guideline(json.dumps(tree))


def test_malformed_document_reports_path():
    tree = small_guideline_dict()
    del tree["areas"][0]["units"][1]["items"][0]["text"]
    with pytest.raises(GuidelineParseError) as excinfo:
        parse_guideline(json.dumps(tree))
    assert "areas[0].units[1].items[0]" in str(excinfo.value)


def test_invalid_json_is_a_parse_error():
    with pytest.raises(GuidelineParseError, match="invalid JSON"):
        parse_guideline(b"{not json")


def test_outcome_level_present_iff_outcome():
    tree = small_guideline_dict()
    tree["areas"][0]["units"][0]["items"][0]["level"] = "usage"  # a topic
    with pytest.raises(GuidelineParseError):
        parse_guideline(json.dumps(tree))
    tree = small_guideline_dict()
    del tree["areas"][0]["units"][0]["items"][1]["level"]  # an outcome
    with pytest.raises(GuidelineParseError):
        parse_guideline(json.dumps(tree))


def test_rateable_categories_preserve_file_order(small_guideline):
    ids = [c.id for c in rateable_categories(small_guideline)]
    assert ids == [
        "AL/Sorting/quicksort",
        "AL/Sorting/dp",
        "AL/Graphs/graph",
        "AL/Graphs/bfs",
        "DS/Lists/linked",
        "DS/Lists/functions",
    ]
    assert all(c.kind is not CategoryKind.HEADING for c in rateable_categories(small_guideline))


def test_context_of_topic(small_guideline):
    assert context_of(small_guideline, "AL/Sorting/quicksort") == ("Algorithms", "Sorting")


def test_context_of_unit_heading_is_itself(small_guideline):
    assert context_of(small_guideline, "AL/Sorting") == ("Algorithms", "Sorting")


def test_context_of_unknown_id(small_guideline):
    with pytest.raises(UnknownIdError):
        context_of(small_guideline, "nope")


def test_context_of_rejects_area_ids(small_guideline):
    with pytest.raises(ValueError, match="knowledge area"):
        context_of(small_guideline, "AL")


def test_context_agrees_with_tree_ancestry(small_guideline):
    for area in small_guideline.areas:
        for unit in area.units:
            assert context_of(small_guideline, unit.id) == (area.title, unit.title)
            for cat in unit.categories:
                assert context_of(small_guideline, cat.id) == (area.title, unit.title)


def test_parse_serialize_parse_round_trip(small_guideline):
    again = parse_guideline(dump_guideline(small_guideline))
    assert again.name == small_guideline.name
    assert again.areas == small_guideline.areas
    assert guideline_to_dict(again) == small_guideline_dict()


def test_total_is_rateable_plus_headings(small_guideline):
    headings = [c for c in small_guideline.categories if c.kind is CategoryKind.HEADING]
    assert len(small_guideline.categories) == len(rateable_categories(small_guideline)) + len(
        headings
    )


def test_summaries_start_absent_and_apply(small_guideline):
    assert all(u.summary is None for a in small_guideline.areas for u in a.units)
    apply_unit_summaries(small_guideline, {"AL/Sorting": "Sorting things."})
    assert small_guideline.unit("AL/Sorting").summary == "Sorting things."
    with pytest.raises(UnknownIdError):
        apply_unit_summaries(small_guideline, {"missing": "x"})
    with pytest.raises(ValueError, match="empty summary"):
        apply_unit_summaries(small_guideline, {"AL/Graphs": ""})
