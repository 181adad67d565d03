"""Command-line entry points: classify, evaluate, compare, summarize-units, serve."""

from __future__ import annotations

import asyncio
import json
import logging
import sys
from pathlib import Path

import click

from .evaluation import (
    load_gold,
    evaluate_corpus,
    recall_difference_distribution,
    write_cdf_csv,
    write_histogram_csv,
    EvaluationError,
    EvaluationReport,
)
from .llm import LlmEndpoint
from .methods import classify_whole, summarize_units, PromptBudgetError
from .ontology import load_guideline
from .pipeline import (
    ALL_METHODS,
    ConfigError,
    RunConfig,
    ingest_corpus,
    load_results_dir,
    load_run_report,
    run_classify,
)


def _endpoint_from_options(url: str | None, model: str, max_in_flight: int, timeout: float,
                           max_retries: int) -> LlmEndpoint | None:
    endpoint = LlmEndpoint.from_env(
        model_name=model,
        max_in_flight=max_in_flight,
        timeout=timeout,
        max_retries=max_retries,
    )
    if url:
        endpoint.base_url = url
    return endpoint if endpoint.base_url else None


llm_options = [
    click.option("--llm-url", default=None, help="Chat-completion base URL (or LLM_BASE_URL)."),
    click.option("--llm-model", default="default", show_default=True),
    click.option("--max-in-flight", default=40, show_default=True),
    click.option("--timeout", default=120.0, show_default=True),
    click.option("--max-retries", default=2, show_default=True),
]


def with_llm_options(command):
    for option in reversed(llm_options):
        command = option(command)
    return command


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log at INFO level.")
def main(verbose: bool) -> None:
    """Rank curriculum-guideline categories for course documents."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)


@main.command()
@click.option("--guideline", "guideline_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--method", "methods", multiple=True, required=True,
              help=f"One of: {', '.join(ALL_METHODS)}. Repeatable.")
@click.option("--k", default=20, show_default=True)
@click.option("--extractor", type=click.Choice(["a", "b", "text"]), default="a",
              show_default=True, help="PDF backend; .txt files are always read as plain text.")
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True), default=None)
@click.option("--threshold", default=0.3, show_default=True,
              help="Embedding match distance threshold.")
@click.option("--match", "match_mode", type=click.Choice(["all", "best"]), default="all",
              show_default=True, help="Variant used when --method embedding is given.")
@click.option("--weighted", type=click.Choice(["true", "false"]), default="false",
              show_default=True, help="Variant used when --method embedding is given.")
@click.option("--summaries", "summaries_path", type=click.Path(exists=True), default=None,
              help="Unit summaries file from summarize-units (prune method).")
@click.option("--out", "out_dir", required=True, type=click.Path())
@with_llm_options
def classify(guideline_path, corpus_dir, methods, k, extractor, embeddings_path, threshold,
             match_mode, weighted, summaries_path, out_dir, llm_url, llm_model,
             max_in_flight, timeout, max_retries) -> None:
    """Classify every document in the corpus with the selected methods."""
    expanded = [
        f"embedding-{'weighted' if weighted == 'true' else 'unweighted'}-{match_mode}"
        if m == "embedding" else m
        for m in methods
    ]
    config = RunConfig(
        guideline_path=guideline_path,
        corpus_dir=corpus_dir,
        methods=expanded,
        out_dir=out_dir,
        k=k,
        extractor=extractor,
        embeddings_path=embeddings_path,
        threshold=threshold,
        summaries_path=summaries_path,
        endpoint=_endpoint_from_options(llm_url, llm_model, max_in_flight, timeout, max_retries),
    )
    try:
        report = run_classify(config)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"wrote {report['results_written']} result files to {out_dir}")
    for method, failures in report["failures"].items():
        for doc_id, message in failures.items():
            click.echo(f"FAILED {method} on {doc_id}: {message}", err=True)
    if report["failures"]:
        click.echo("some documents failed; see run_report.json", err=True)


@main.command()
@click.option("--results", "results_dir", required=True, type=click.Path(exists=True))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--k", default=20, show_default=True)
@click.option("--csv", "emit_csv", is_flag=True, help="Also write gold-size histogram CSVs.")
@click.option("--out", "out_dir", default=None, type=click.Path(),
              help="Report directory (default: the results directory).")
def evaluate(results_dir, gold_path, k, emit_csv, out_dir) -> None:
    """Compute recall@k of each method found in the results directory."""
    gold = load_gold(gold_path)
    by_method = load_results_dir(results_dir)
    failures = load_run_report(results_dir).get("failures", {})
    out = Path(out_dir or results_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not by_method:
        raise click.ClickException(f"no result files in {results_dir}")
    for method, results in sorted(by_method.items()):
        try:
            report = evaluate_corpus(
                results, gold, k, method=method, failed_ids=failures.get(method, {})
            )
        except EvaluationError as exc:
            raise click.ClickException(str(exc)) from exc
        report_path = out / f"report__{method}.json"
        report.save(report_path)
        click.echo(
            f"{method}: mean recall@{k} {report.mean_recall:.4f} "
            f"(micro {report.micro_recall:.4f}) over {len(report.per_document_recall)} documents"
        )
        if emit_csv:
            write_histogram_csv(report.gold_sizes, out / f"gold_sizes__{method}.csv")


@main.command()
@click.option("--report-a", required=True, type=click.Path(exists=True))
@click.option("--report-b", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Write the difference CDF as CSV here.")
def compare(report_a, report_b, out_path) -> None:
    """Per-document recall difference between two evaluation reports."""
    a = _load_report(report_a)
    b = _load_report(report_b)
    try:
        distribution = recall_difference_distribution(a, b)
    except EvaluationError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(
        f"{a.method} vs {b.method}: {distribution.share_negative:.0%} worse, "
        f"{distribution.share_zero:.0%} equal, {distribution.share_positive:.0%} better"
    )
    if out_path:
        write_cdf_csv(distribution, out_path)
        click.echo(f"wrote CDF to {out_path}")


def _load_report(path: str) -> EvaluationReport:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    from .evaluation import GoldSizeHistogram, HistogramBin

    return EvaluationReport(
        method=raw["method"],
        k=raw["k"],
        per_document_recall=raw["per_document_recall"],
        mean_recall=raw["mean_recall"],
        micro_recall=raw["micro_recall"],
        gold_sizes=GoldSizeHistogram(
            bin_width=raw["gold_sizes"]["bin_width"],
            bins=[HistogramBin(*b) for b in raw["gold_sizes"]["bins"]],
            mean=raw["gold_sizes"]["mean"],
        ),
        failed_documents=raw.get("failed_documents", []),
        query_stats=raw.get("query_stats"),
    )


@main.command("summarize-units")
@click.option("--guideline", "guideline_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@with_llm_options
def summarize_units_cmd(guideline_path, out_path, llm_url, llm_model, max_in_flight,
                        timeout, max_retries) -> None:
    """Pre-generate knowledge-unit summaries for the prune method."""
    endpoint = _endpoint_from_options(llm_url, llm_model, max_in_flight, timeout, max_retries)
    if endpoint is None:
        raise click.ClickException("an endpoint is required (LLM_BASE_URL or --llm-url)")
    guideline = load_guideline(guideline_path)
    summaries = asyncio.run(summarize_units(guideline, endpoint))
    Path(out_path).write_text(
        json.dumps(summaries, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    click.echo(f"wrote {len(summaries)} unit summaries to {out_path}")


@main.command("whole-guideline")
@click.option("--guideline", "guideline_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--extractor", type=click.Choice(["a", "b", "text"]), default="a")
@click.option("--k", default=20, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@with_llm_options
def whole_guideline(guideline_path, corpus_dir, extractor, k, out_dir, llm_url, llm_model,
                    max_in_flight, timeout, max_retries) -> None:
    """Experimental: the whole document and whole guideline in one query.

    Refuses when the assembled prompt exceeds the endpoint budget.
    """
    endpoint = _endpoint_from_options(llm_url, llm_model, max_in_flight, timeout, max_retries)
    if endpoint is None:
        raise click.ClickException("an endpoint is required (LLM_BASE_URL or --llm-url)")
    guideline = load_guideline(guideline_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    from .pipeline import save_result

    for document in ingest_corpus(corpus_dir, extractor):
        try:
            ranked, query_log = classify_whole(document, guideline, endpoint, k)
        except PromptBudgetError as exc:
            raise click.ClickException(str(exc)) from exc
        save_result(out, ranked, k, query_log)
        click.echo(f"{document.id}: {len(ranked.entries)} categories")


@main.command()
@click.option("--results", "results_dir", required=True, type=click.Path(exists=True))
@click.option("--guideline", "guideline_path", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-dir", default=None, type=click.Path(),
              help="Static review UI build (default: ./frontend/dist when present).")
def serve(results_dir, guideline_path, port, host, ui_dir) -> None:
    """Serve classification results to the review UI."""
    import uvicorn

    from .service import create_app

    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        ui_dir = default_ui if default_ui.is_dir() else None
    guideline = load_guideline(guideline_path)
    app = create_app(results_dir, guideline, ui_dir=ui_dir)
    try:
        uvicorn.run(app, host=host, port=port)
    except OSError as exc:
        click.echo(f"cannot bind {host}:{port}: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
