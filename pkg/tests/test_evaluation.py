import random

import pytest

from helpers import brute_force_average_precision
from spokensearch.evaluation import (
    average_precision,
    evaluate_query,
    evaluate_run,
    format_conditions_table,
    format_results_table,
    load_qrels,
    load_run,
    mean_result,
    precision_recall,
)


class TestSetMeasures:
    def test_three_of_five_retrieved_four_relevant(self):
        retrieved = ["d1", "d2", "d3", "d4", "d5"]
        relevant = {"d1", "d3", "d5", "d9"}
        p, r = precision_recall(retrieved, relevant)
        assert p == pytest.approx(0.60)
        assert r == pytest.approx(0.75)

    def test_exact_match(self):
        retrieved = ["a", "b"]
        p, r = precision_recall(retrieved, {"a", "b"})
        assert p == 1.0 and r == 1.0

    def test_nothing_retrieved(self):
        assert precision_recall([], {"a"}) == (0.0, 0.0)

    def test_no_relevant(self):
        assert precision_recall(["a"], set()) == (0.0, 0.0)


class TestAveragePrecision:
    def test_perfect_ranking(self):
        assert average_precision(["a", "b"], {"a", "b"}) == 1.0

    def test_relevant_at_rank_two(self):
        assert average_precision(["x", "a"], {"a"}) == pytest.approx(0.5)

    def test_matches_brute_force_definition(self):
        rng = random.Random(14)
        docs = [f"d{i}" for i in range(30)]
        for _ in range(200):
            retrieved = rng.sample(docs, rng.randint(0, 20))
            relevant = set(rng.sample(docs, rng.randint(0, 10)))
            assert average_precision(retrieved, relevant) == pytest.approx(
                brute_force_average_precision(retrieved, relevant)
            )


class TestRunEvaluation:
    def test_missing_query_counts_zero_relevant(self, caplog):
        run = {"q1": ["a"], "q2": ["b"]}
        qrels = {"q1": {"a"}}
        with caplog.at_level("WARNING"):
            results = evaluate_run(run, qrels)
        assert results[1].precision == 0.0
        assert results[1].recall == 0.0
        assert any("q2" in message for message in caplog.messages)

    def test_mean(self):
        results = [
            evaluate_query("q1", ["a"], {"a"}),
            evaluate_query("q2", ["x"], {"a"}),
        ]
        mean = mean_result(results)
        assert mean.precision == pytest.approx(0.5)

    def test_load_run_orders_by_rank(self, tmp_path):
        path = tmp_path / "run.tsv"
        path.write_text("q1\tdB\t2\nq1\tdA\t1\nq2\tdC\t1\n", "utf-8")
        run = load_run(path)
        assert run == {"q1": ["dA", "dB"], "q2": ["dC"]}

    def test_load_qrels(self, tmp_path):
        path = tmp_path / "qrels.tsv"
        path.write_text("q1\tdA\nq1\tdB\n", "utf-8")
        assert load_qrels(path) == {"q1": {"dA", "dB"}}

    def test_bad_run_line(self, tmp_path):
        path = tmp_path / "run.tsv"
        path.write_text("q1 only-two\n", "utf-8")
        with pytest.raises(ValueError):
            load_run(path)


class TestReportFormat:
    def test_per_query_table_layout(self):
        results = [evaluate_query("q1", ["a", "b"], {"a"})]
        table = format_results_table(results)
        lines = table.splitlines()
        assert lines[0].split() == ["query", "P", "%", "R", "%", "AP", "%"]
        assert "50.00" in lines[1]
        assert lines[-1].startswith("mean")

    def test_conditions_table_renders_fixture_row(self):
        # Report-formatting fixture only: these numbers come from a human
        # study and are never produced by this package.
        table = format_conditions_table(
            ["S", "V", "T", "C"],
            [
                ("Avg. P. %", [47.15, 41.33, 43.94, 42.27]),
                ("Avg. R. %", [64.84, 60.31, 52.61, 49.62]),
                ("Avg. T. (sec.)", [17.64, 21.55, 21.69, 25.48]),
            ],
        )
        lines = table.splitlines()
        assert len(lines) == 4
        header, p_row, r_row, t_row = lines
        assert header.split() == ["S", "V", "T", "C"]
        assert p_row.split()[-4:] == ["47.15", "41.33", "43.94", "42.27"]
        # Columns line up: every value sits at the same offset per column.
        s_col = header.index("S")
        assert p_row[s_col - 1] != " " or p_row[s_col] != ""
        widths = [len(cell) for cell in (header, p_row, r_row, t_row)]
        assert widths[0] == widths[1] == widths[2] == widths[3]
