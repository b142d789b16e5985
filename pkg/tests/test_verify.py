"""
Tests for wavesplitlib.wavesplitverify. The suites run on a small corpus
here; the full-size runs are marked slow.
"""

import json
import math

import numpy
import pytest

import wavesplitlib
from wavesplitlib.wavesplitexception import WaveSplitSuiteException, WaveSplitValidationException
from wavesplitlib.wavesplitgrid import KERNEL_SPHERE_MEASURE, make_grid
from wavesplitlib.wavesplitverify import (
    PROVENANCE,
    EstimateReport,
    VerifyConfig,
    _finite_or_none,
    build_corpus,
    corpus_members,
    read_reports,
    refinement_check,
    reports_to_json,
    run_all,
    run_suite,
    suite_cone,
    suite_l2_bound,
    suite_matching,
    suite_reconstruction,
    suite_smoothing,
    suite_sum_space,
    suite_support,
    summarise_reports,
    write_reports,
)
from wavesplitlib.wavesplitwaves import SUPPORT_TOL


@pytest.fixture(scope="module")
def corpus():
    return build_corpus(make_grid(3, r_max=8.0, M=1024), seed=7, count=12)


def _small_cfg(**kwargs):
    base = dict(d=3, resolution="low", corpus_size=6)
    base.update(kwargs)
    return VerifyConfig(**base)


def test_corpus_is_deterministic():
    grid = make_grid(3, r_max=8.0, M=1024)
    a = corpus_members(grid, seed=7, count=16)
    b = corpus_members(grid, seed=7, count=16)
    c = corpus_members(grid, seed=8, count=16)
    assert len(a) == 16
    assert a == b
    assert [m.name for m in a] == [m.name for m in c]
    random_a = [m.params for m in a if m.kind == "random"]
    random_c = [m.params for m in c if m.kind == "random"]
    assert random_a and random_a != random_c


def test_corpus_contents(corpus):
    assert len(corpus.members) == 12
    kinds = {m.kind for m in corpus.members}
    assert kinds == {"bump", "gaussian", "random"}
    for name, f in corpus.items():
        assert numpy.all(numpy.isfinite(f.values))
        assert corpus.top_octave_fractions[name] <= 1e-6
    for member in corpus.members:
        if member.kind in ("bump", "gaussian"):
            assert corpus.support_fractions[member.name] <= SUPPORT_TOL


def test_corpus_subset(corpus):
    sub = corpus.subset(3)
    assert [m.name for m in sub.members] == [m.name for m in corpus.members[:3]]
    for name, f in sub.items():
        numpy.testing.assert_array_equal(f.values, corpus.functions[name].values)


def test_verify_config():
    cfg = _small_cfg()
    cfg.validate()
    assert cfg.grid_size() == (1024, 8.0)
    assert _small_cfg(M=512).grid_size() == (512, 8.0)
    assert cfg.grid().size == 1024
    for bad in (dict(resolution="huge"), dict(corpus_size=0), dict(kappa=-1.0), dict(d=6)):
        with pytest.raises(WaveSplitValidationException):
            _small_cfg(**bad).validate()


def test_reconstruction_passes(corpus):
    report = suite_reconstruction(corpus)
    assert report.suite_name == "reconstruction"
    assert report.passed
    identities = {c["params"]["identity"] for c in report.cases}
    assert identities == {"out+in", "conjugacy", "plus+minus"}
    for case in report.cases:
        assert case["measured"] <= case["bound_or_fit"]


def test_reconstruction_detects_wrong_kappa(corpus):
    report = suite_reconstruction(corpus.subset(2), kappa=1.01 * KERNEL_SPHERE_MEASURE[3])
    assert not report.passed
    out_in = [c["measured"] for c in report.cases if c["params"]["identity"] == "out+in"]
    for value in out_in:
        assert value == pytest.approx(0.0201, rel=1e-6)


@pytest.mark.parametrize(
    "name, anchor",
    [
        ("reconstruction", "f_{out}(r)+f_{in}(r)"),
        ("l2_bound", "boundedness of incoming/outgoing projection"),
        ("matching", "almost equivalent to the frequency cutoff"),
        ("support", "almost supported outside of the ball"),
        ("cone", "with the frequency dependent velocity"),
        ("sum_space", "incoming and outgoing decomposition"),
        ("smoothing", "has the ``smoothing effect''"),
    ],
)
def test_suite_anchors(name, anchor):
    assert anchor in PROVENANCE[name]


def test_reports_carry_their_anchor(corpus):
    report = suite_reconstruction(corpus.subset(1))
    assert report.provenance == PROVENANCE["reconstruction"]


@pytest.mark.parametrize("suite", [suite_l2_bound, suite_matching, suite_support])
def test_band_suites_report(corpus, suite):
    report = suite(corpus)
    assert report.cases
    assert report.passed, report.tolerance_spec
    assert report.provenance == PROVENANCE[report.suite_name]
    for case in report.cases:
        assert set(case) == {"params", "measured", "bound_or_fit"}
    # The report survives strict JSON.
    json.loads(reports_to_json([report]))


def test_matching_and_support_slopes(corpus):
    assert suite_matching(corpus).fitted_slope <= -0.5
    assert suite_support(corpus).fitted_slope <= -1.5


def test_sum_space_suite(corpus):
    report = suite_sum_space(corpus)
    assert report.passed, report.tolerance_spec
    Ns = sorted({c["params"]["N"] for c in report.cases})
    assert Ns == [8, 16]
    for case in report.cases:
        measured = case["measured"]
        assert measured["normalised"] > 0.0
        assert measured["target_energy"] > 0.0
        assert measured["band_norm"] > 0.0


@pytest.mark.slow
def test_smoothing_suite(corpus):
    report = suite_smoothing(corpus)
    assert report.suite_name == "smoothing"
    assert report.passed, report.tolerance_spec
    assert report.cases[-1]["params"] == {"boundary_fraction": "t_max"}
    for case in report.cases[:-1]:
        assert len(case["measured"]["linear"]) == 4
        assert case["measured"]["linear_slope"] < 0.0


@pytest.mark.slow
def test_cone_suite(corpus):
    report = suite_cone(corpus)
    assert report.suite_name == "cone"
    assert report.passed, report.tolerance_spec
    forward_cases = [c for c in report.cases if c["params"].get("t") == "crossing"]
    mirrored = [c for c in report.cases if c["params"].get("t") == "-crossing"]
    assert len(forward_cases) == 4
    assert len(mirrored) == 4
    # Real data: the mirrored measurement equals the forward one.
    for fwd, back in zip(forward_cases, mirrored):
        assert back["params"]["j"] == fwd["params"]["j"]
        assert back["measured"]["in"] == pytest.approx(fwd["measured"]["out"], rel=1e-6, abs=1e-9)
        assert back["measured"]["out"] == pytest.approx(fwd["measured"]["in"], rel=1e-6, abs=1e-9)
    sides = sorted(c["params"]["side"] for c in report.cases if "side" in c["params"])
    assert sides == ["in", "in", "out", "out"]


def test_run_suite_errors():
    with pytest.raises(WaveSplitValidationException):
        run_suite("nonsense", 7, _small_cfg())
    # A grid far too coarse for the corpus bumps.
    with pytest.raises(WaveSplitSuiteException) as info:
        run_suite("reconstruction", 7, _small_cfg(M=64))
    assert info.value.suite_name == "reconstruction"
    assert info.value.exit_code == 3


def test_run_all():
    with pytest.raises(WaveSplitValidationException):
        run_all(7, _small_cfg(), ["reconstruction", "nonsense"])
    reports = run_all(7, _small_cfg(), ["reconstruction"])
    assert [r.suite_name for r in reports] == ["reconstruction"]
    assert reports[0].passed


@pytest.mark.slow
def test_run_all_passes_at_low_resolution():
    cfg = VerifyConfig(d=3, resolution="low", corpus_size=32)
    reports = run_all(7, cfg)
    assert [r.suite_name for r in reports] == list(wavesplitlib.WAVESPLIT_SUITES_LIST)
    failed = [r.suite_name for r in reports if not r.passed]
    assert not failed, summarise_reports(reports)


def test_refinement_check(corpus):
    with pytest.raises(WaveSplitValidationException):
        refinement_check("cone", corpus)
    result = refinement_check("reconstruction", corpus, n_members=2)
    assert result["suite"] == "reconstruction"
    assert result["monotone"]


def test_finite_or_none():
    obj = {"a": [1.0, math.inf, {"b": numpy.float64(math.nan)}], "c": "x", "d": 3}
    assert _finite_or_none(obj) == {"a": [1.0, None, {"b": None}], "c": "x", "d": 3}


def test_report_round_trip(tmp_path):
    report = EstimateReport(
        "matching",
        [
            {"params": {"k0": 3}, "measured": 0.25, "bound_or_fit": None},
            {"params": {"k0": 2}, "measured": 0.5, "bound_or_fit": None},
        ],
        -1.0,
        True,
        "slope <= -0.5",
        "anchor",
    )
    as_dict = report.to_dict()
    assert [c["params"]["k0"] for c in as_dict["cases"]] == [2, 3]
    assert EstimateReport.from_dict(as_dict).to_dict() == as_dict

    out_file = str(tmp_path / "reports.json")
    write_reports([report], out_file)
    with open(out_file) as f:
        first = f.read()
    write_reports([report], out_file)
    with open(out_file) as f:
        assert f.read() == first
    assert [r.to_dict() for r in read_reports(out_file)] == [as_dict]


def test_summarise_reports():
    passed = EstimateReport("reconstruction", [], None, True, "tol", "anchor")
    failed = EstimateReport("support", [], -1.0, False, "tol", "anchor")
    lines = summarise_reports([passed, failed])
    assert lines[0].startswith("[PASS] reconstruction")
    assert "[FAIL] support" in lines[3]
    assert "slope=-1" in lines[3]
    assert lines[-1] == "1 of 2 suites passed."
