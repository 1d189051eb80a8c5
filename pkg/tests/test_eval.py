import pytest
from hypothesis import given, strategies as st

from devrec.errors import EmptyRun, ParseError
from devrec.evaluate import (
    dcg_at_k,
    evaluate_run,
    load_qrels,
    load_queries,
    ndcg_at_k,
    precision_at_k,
    recall_at_k,
    reciprocal_rank,
)


def load_minibench(fixtures_dir):
    judgments = load_qrels(fixtures_dir / "minibench_qrels.tsv")
    run: dict[str, list[str]] = {}
    for line in (fixtures_dir / "minibench_run.tsv").read_text().splitlines():
        query_id, _, doc_id = line.strip().partition("\t")
        run.setdefault(query_id, []).append(doc_id)
    return run, judgments


# --- parsing ----------------------------------------------------------------


def test_load_qrels_minibench(fixtures_dir):
    judgments = load_qrels(fixtures_dir / "minibench_qrels.tsv")
    assert judgments[("q1", "d1")] == 3
    assert judgments[("q2", "d8")] == 2
    assert len(judgments) == 8


def test_load_qrels_rejects_bad_grade(tmp_path):
    path = tmp_path / "qrels.tsv"
    path.write_text("q1\td1\t7\n")
    with pytest.raises(ParseError):
        load_qrels(path)


def test_load_qrels_rejects_duplicates(tmp_path):
    path = tmp_path / "qrels.tsv"
    path.write_text("q1\td1\t1\nq1\td1\t2\n")
    with pytest.raises(ParseError):
        load_qrels(path)


def test_load_queries(data_dir):
    queries = load_queries(data_dir / "eval-queries.tsv")
    assert queries["qA"] == "tutorials on MAD methodologies"
    assert list(queries) == ["qA", "qB"]


# --- metric definitions -----------------------------------------------------


def test_ideal_ordering_gives_ndcg_one():
    grades = {"a": 3, "b": 2, "c": 1, "d": 0}
    ideal = ["a", "b", "c", "d"]
    assert ndcg_at_k(ideal, grades, 4) == pytest.approx(1.0, abs=1e-12)


def test_precision_recall_counting_example():
    # top-2 contains 1 relevant of 2 judged-relevant
    ranked = ["rel1", "junk", "rel2"]
    relevant = {"rel1", "rel2"}
    assert precision_at_k(ranked, relevant, 2) == 0.5
    assert recall_at_k(ranked, relevant, 2) == 0.5


def test_reciprocal_rank():
    assert reciprocal_rank(["x", "rel", "y"], {"rel"}) == 0.5
    assert reciprocal_rank(["x", "y"], {"rel"}) == 0.0


def test_minibench_hand_computed_values(fixtures_dir):
    """Frozen spreadsheet-style oracle.

    q1 qrels: d1:3 d2:2 d3:1 d4:0 d5:0; run d2,d4,d1,d5,d3 at k=5:
      P@5 = 3/5, R@5 = 3/3, MRR = 1 (d2 at rank 1)
      DCG  = 3/log2(2) + 7/log2(4) + 1/log2(6)            = 6.886852807234542
      IDCG = 7/log2(2) + 3/log2(3) + 1/log2(4)            = 9.392789260714373
      nDCG = 0.7332063582049065
    q2 qrels: d6:1 d7:0 d8:2; run d7,d8,d9,d6,d10:
      P@5 = 2/5, R@5 = 2/2, MRR = 1/2 (d8 at rank 2)
      DCG  = 3/log2(3) + 1/log2(5)                        = 2.3234658187877653
      IDCG = 3/log2(2) + 1/log2(3)                        = 3.6309297535714578
      nDCG = 0.639909328045346
    """
    run, judgments = load_minibench(fixtures_dir)
    report = evaluate_run(run, judgments, k=5)

    q1 = report.per_query["q1"]
    assert q1["P@5"] == 0.6
    assert q1["R@5"] == 1.0
    assert q1["MRR"] == 1.0
    assert q1["nDCG@5"] == pytest.approx(0.7332063582049065, abs=1e-12)

    q2 = report.per_query["q2"]
    assert q2["P@5"] == 0.4
    assert q2["R@5"] == 1.0
    assert q2["MRR"] == 0.5
    assert q2["nDCG@5"] == pytest.approx(0.639909328045346, abs=1e-12)

    assert report.macro["P@5"] == 0.5
    assert report.macro["R@5"] == 1.0
    assert report.macro["MRR"] == 0.75
    assert report.macro["nDCG@5"] == pytest.approx(0.6865578431251262, abs=1e-12)
    assert report.skipped_queries == []


def test_queries_without_relevant_docs_are_skipped_and_counted():
    run = {"q1": ["d1"], "q2": ["d2"]}
    judgments = {("q1", "d1"): 2, ("q2", "d2"): 0}
    report = evaluate_run(run, judgments, k=1)
    assert report.skipped_queries == ["q2"]
    assert "q2" not in report.per_query
    assert report.macro["P@1"] == 1.0  # averaged over q1 only


def test_empty_run_raises():
    with pytest.raises(EmptyRun):
        evaluate_run({}, {}, k=5)


def test_duplicates_in_run_rejected():
    with pytest.raises(ValueError):
        evaluate_run({"q": ["d", "d"]}, {("q", "d"): 1}, k=2)


# --- invariants ---------------------------------------------------------------


def test_ndcg_swap_down_monotone():
    grades = {"a": 3, "b": 0, "c": 2}
    better = ndcg_at_k(["a", "c", "b"], grades, 3)
    worse = ndcg_at_k(["a", "b", "c"], grades, 3)  # relevant c pushed past junk b
    assert worse < better <= 1.0


def test_permuting_below_k_leaves_precision_unchanged():
    relevant = {"r1", "r2"}
    base = ["r1", "x", "r2", "y", "z"]
    permuted = ["r1", "x", "r2", "z", "y"]
    assert precision_at_k(base, relevant, 3) == precision_at_k(permuted, relevant, 3)


@given(
    st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=12),
    st.integers(min_value=1, max_value=12),
)
def test_metrics_stay_in_unit_interval(grade_list, k):
    docs = [f"d{i}" for i in range(len(grade_list))]
    grades = dict(zip(docs, grade_list))
    relevant = {d for d, g in grades.items() if g >= 1}
    ranked = list(docs)
    assert 0.0 <= precision_at_k(ranked, relevant, k) <= 1.0
    assert 0.0 <= recall_at_k(ranked, relevant, k) <= 1.0
    assert 0.0 <= reciprocal_rank(ranked, relevant) <= 1.0
    assert 0.0 <= ndcg_at_k(ranked, grades, k) <= 1.0 + 1e-12


def test_dcg_formula_spot_check():
    # grades [2, 0, 3] -> 3/log2(2) + 0 + 7/log2(4) = 3 + 3.5
    assert dcg_at_k([2, 0, 3], 3) == pytest.approx(6.5, abs=1e-12)
