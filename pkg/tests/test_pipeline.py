import json

import pytest

from curralign.lexical import RankedClassification
from curralign.llm import LlmEndpoint, MockTransport, QueryLog, TransportError
from curralign.pipeline import (
    ALL_METHODS,
    ConfigError,
    RunConfig,
    ingest_corpus,
    load_result,
    load_results_dir,
    result_filename,
    run_classify,
    save_result,
)
from conftest import small_guideline_dict
from test_embedding import MINI_TABLE


@pytest.fixture
def workspace(tmp_path):
    guideline_path = tmp_path / "guideline.json"
    guideline_path.write_text(json.dumps(small_guideline_dict()))
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "graphs.txt").write_text(
        "Graph algorithms. Graph algorithms everywhere in this network lecture."
    )
    (corpus / "lists.txt").write_text("Linked list operations via linked list demos.")
    (corpus / "empty.txt").write_text("")
    embeddings = tmp_path / "mini.vec"
    embeddings.write_text(MINI_TABLE)
    out = tmp_path / "out"
    return {
        "guideline": guideline_path,
        "corpus": corpus,
        "embeddings": embeddings,
        "out": out,
        "tmp": tmp_path,
    }


def config(workspace, methods, **overrides) -> RunConfig:
    settings = dict(
        guideline_path=str(workspace["guideline"]),
        corpus_dir=str(workspace["corpus"]),
        methods=methods,
        out_dir=str(workspace["out"]),
        embeddings_path=str(workspace["embeddings"]),
    )
    settings.update(overrides)
    return RunConfig(**settings)


def test_classify_lexical_writes_one_file_per_doc_method(workspace):
    report = run_classify(config(workspace, ["count-unweighted", "count-weighted"]))
    files = sorted(p.name for p in workspace["out"].glob("*__*.json"))
    assert len(files) == 6  # 3 docs x 2 methods
    assert report["results_written"] == 6
    assert report["failures"] == {}


def test_result_schema(workspace):
    run_classify(config(workspace, ["count-unweighted"]))
    record = json.loads(
        (workspace["out"] / result_filename("graphs", "count-unweighted")).read_text()
    )
    assert record["document_id"] == "graphs"
    assert record["method"] == "count-unweighted"
    assert record["k"] == 20
    assert record["entries"][0]["rank"] == 1
    assert {"category_id", "score", "rank"} <= set(record["entries"][0])
    assert len(record["entries"]) <= 20


def test_classify_embedding_method_agrees_with_lexical_on_exact_hits(workspace):
    run_classify(config(workspace, ["embedding-unweighted-all", "count-unweighted"]))
    semantic = load_result(workspace["out"] / result_filename("graphs", "embedding-unweighted-all"))
    lexical = load_result(workspace["out"] / result_filename("graphs", "count-unweighted"))
    assert semantic.entries[0][0] == "AL/Graphs/graph"
    assert semantic.entries[0][1] >= lexical.entries[0][1]


def test_missing_embeddings_is_config_error_before_work(workspace):
    bad = config(workspace, ["embedding-unweighted-all"], embeddings_path=None)
    with pytest.raises(ConfigError, match="embedding"):
        run_classify(bad)
    assert not workspace["out"].exists()


def test_unknown_method_rejected(workspace):
    with pytest.raises(ConfigError, match="unknown methods"):
        run_classify(config(workspace, ["count-sideways"]))


def test_llm_method_without_endpoint_is_config_error(workspace):
    with pytest.raises(ConfigError, match="endpoint"):
        run_classify(config(workspace, ["llm-binary"]))


def test_classify_llm_with_mock_transport(workspace):
    def respond(prompt):
        asked_about = prompt.split("Does this document cover")[1]
        return "yes" if "Graph algorithms" in asked_about else "no"

    transport = MockTransport(default=respond)
    report = run_classify(
        config(
            workspace,
            ["llm-binary"],
            endpoint=LlmEndpoint(base_url="http://unused", model_name="m"),
        ),
        transport=transport,
    )
    assert report["failures"] == {}
    graphs = load_result(workspace["out"] / result_filename("graphs", "llm-binary"))
    assert [cid for cid, _ in graphs.entries] == ["AL/Graphs/graph"]
    record = json.loads((workspace["out"] / result_filename("graphs", "llm-binary")).read_text())
    assert record["query_log"]["queries_issued"] == 6


def test_empty_document_with_llm_method_writes_empty_result(workspace):
    transport = MockTransport(default="no")
    run_classify(
        config(
            workspace,
            ["llm-binary"],
            endpoint=LlmEndpoint(base_url="http://unused", model_name="m"),
        ),
        transport=transport,
    )
    record = json.loads((workspace["out"] / result_filename("empty", "llm-binary")).read_text())
    assert record["entries"] == []
    assert record["query_log"]["queries_issued"] == 0
    # no prompt ever contained the empty document
    assert all("empty" not in p for p in transport.prompts)


def test_per_document_failure_recorded_and_run_continues(workspace):
    transport = MockTransport(
        rules=[("network lecture", TransportError("down"))], default="no"
    )
    report = run_classify(
        config(
            workspace,
            ["llm-binary"],
            endpoint=LlmEndpoint(base_url="http://unused", model_name="m", max_retries=0),
        ),
        transport=transport,
    )
    assert "graphs" in report["failures"]["llm-binary"]
    # the failed document has no results file; others do
    assert not (workspace["out"] / result_filename("graphs", "llm-binary")).exists()
    assert (workspace["out"] / result_filename("lists", "llm-binary")).exists()


def test_classify_is_bit_reproducible(workspace, tmp_path):
    methods = ["count-unweighted", "count-weighted", "embedding-unweighted-all"]
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    run_classify(config(workspace, methods, out_dir=str(out_a)))
    run_classify(config(workspace, methods, out_dir=str(out_b)))
    files_a = sorted(out_a.iterdir())
    files_b = sorted(out_b.iterdir())
    assert [p.name for p in files_a] == [p.name for p in files_b]
    for a, b in zip(files_a, files_b):
        assert a.read_bytes() == b.read_bytes()


def test_ingest_corpus_rejects_pdf_with_text_extractor(workspace):
    (workspace["corpus"] / "slides.pdf").write_bytes(b"%PDF-1.4 junk")
    with pytest.raises(ConfigError, match="extractor"):
        ingest_corpus(workspace["corpus"], "text")


def test_ingest_corpus_requires_documents(tmp_path):
    empty = tmp_path / "none"
    empty.mkdir()
    with pytest.raises(ConfigError, match="no .txt or .pdf"):
        ingest_corpus(empty, "a")


def test_ingest_corpus_sorted_order(workspace):
    documents = ingest_corpus(workspace["corpus"], "text")
    assert [d.id for d in documents] == ["empty", "graphs", "lists"]


def test_load_results_dir_groups_by_method(workspace):
    run_classify(config(workspace, ["count-unweighted", "count-weighted"]))
    by_method = load_results_dir(workspace["out"])
    assert set(by_method) == {"count-unweighted", "count-weighted"}
    assert [r.document_id for r in by_method["count-unweighted"]] == ["empty", "graphs", "lists"]


def test_save_and_load_result_round_trip(tmp_path):
    ranked = RankedClassification("doc", "count-unweighted", [("c1", 2.0), ("c2", 1.0)])
    save_result(tmp_path, ranked, 20, QueryLog(queries_issued=3))
    again = load_result(tmp_path / result_filename("doc", "count-unweighted"))
    assert again == ranked


def test_method_roster_is_closed():
    assert set(ALL_METHODS) == {
        "count-unweighted",
        "count-weighted",
        "embedding-unweighted-all",
        "embedding-unweighted-best",
        "embedding-weighted-all",
        "embedding-weighted-best",
        "llm-binary",
        "llm-5point",
        "llm-5pointbatch",
        "llm-5pointcontext",
        "llm-prune-5pointcontext",
    }


def test_load_results_dir_skips_reports_and_other_json(workspace):
    run_classify(config(workspace, ["count-unweighted"]))
    # evaluation reports written into the same directory must not break loading
    (workspace["out"] / "report__count-unweighted.json").write_text(
        json.dumps({"method": "count-unweighted", "mean_recall": 1.0})
    )
    by_method = load_results_dir(workspace["out"])
    assert set(by_method) == {"count-unweighted"}
    assert len(by_method["count-unweighted"]) == 3
