import pytest

from runa.report import EvalReport, ScoredRecord, read_scores


def make_report(**overrides):
    records = [
        ScoredRecord("img0#0", "ID", "dog", -0.8123456789012345),
        ScoredRecord("img0#1", "OOD", "cat", -0.25),
        ScoredRecord("img1#2", "ID", "dog", -0.75),
    ]
    kwargs = dict(
        method="max-sim", lam=0.5, tau=None, shots=None, tpr=0.95,
        gamma=-0.75, gamma_source="calibrated", fpr95=0.0, auroc=1.0,
        records=records, config={"bank": "bank.tsv"}, runtime_s=1.25,
    )
    kwargs.update(overrides)
    return EvalReport(**kwargs)


def test_report_text_is_deterministic():
    assert make_report().to_text() == make_report(runtime_s=99.0).to_text()


def test_report_text_sections():
    text = make_report().to_text()
    assert "[run]" in text and "[method:max-sim]" in text and "[config]" in text
    assert "records=3" in text
    assert "id_records=2" in text
    assert "gamma=-0.75" in text
    assert "auroc=1.0" in text


def test_report_write_splits_meta(tmp_path):
    report = make_report()
    report.write(tmp_path / "report.txt")
    body = (tmp_path / "report.txt").read_text()
    meta = (tmp_path / "report.txt.meta").read_text()
    assert "runtime" not in body
    assert "runtime_s=1.25" in meta
    assert "written_at=" in meta


def test_report_validates_metric_range():
    with pytest.raises(ValueError):
        make_report(auroc=1.5)
    with pytest.raises(ValueError):
        make_report(fpr95=-0.1)


def test_scores_round_trip(tmp_path):
    report = make_report()
    report.write_scores(tmp_path / "scores.csv")
    loaded = read_scores(tmp_path / "scores.csv")
    assert loaded == report.records


def test_scores_full_precision(tmp_path):
    report = make_report()
    report.write_scores(tmp_path / "scores.csv")
    got = read_scores(tmp_path / "scores.csv")[0].sigma
    assert got == -0.8123456789012345
