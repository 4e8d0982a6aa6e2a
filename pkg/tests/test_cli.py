"""Tests for the command line, configuration, artifact storage and TeX output."""

import json

import pytest
from hyperflux.__main__ import EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, EXIT_VALIDATION, run
from hyperflux.config import Config
from hyperflux.errors import GenericityError, HyperfluxError
from hyperflux.gamma import gamma_ratio
from hyperflux.kz import GeneralizedRiemannScheme
from hyperflux.scheme_tex import emit_tex, format_entry, format_value
from hyperflux.series import TruncatedSeries
from hyperflux.storage import ArtifactStore
from hyperflux.verify import Verifier


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Run from an empty directory with no hyperflux overrides in the environment."""
    monkeypatch.chdir(tmp_path)
    for key in ("HYPERFLUX_TOL", "HYPERFLUX_SEED", "HYPERFLUX_OUTPUT_DIR"):
        monkeypatch.delenv(key, raising=False)
    return tmp_path


def test_series_command(workdir, capsys):
    """series prints the coefficient list as JSON."""
    code = run(["series", "--kind", "F1", "--params", "a=0.3,b=0.7,bp=0.4,c=1.9", "--trunc", "3"])
    assert code == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert (data["n"], data["D"]) == (2, 3)
    assert data["coeffs"][0] == {"m": [0, 0], "re": 1.0, "im": 0.0}


def test_series_writes_artifact(workdir):
    """--output stores the series under series/."""
    code = run(
        [
            "series", "--kind", "Gauss", "--params", "a=0.3,b=0.7,c=1.9", "--route", "K",
            "--output", str(workdir / "out"),
        ]
    )
    assert code == EXIT_OK
    assert list((workdir / "out" / "series").glob("Gauss-*.json"))


def test_series_bad_params(workdir):
    """Unknown parameter names are a validation failure."""
    assert run(["series", "--kind", "F1", "--params", "z=1"]) == EXIT_VALIDATION


def test_usage_error_exit_code(workdir):
    """Missing arguments exit with status 64."""
    with pytest.raises(SystemExit) as info:
        run(["series"])
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        run([])
    assert info.value.code == EXIT_USAGE


def test_transform_command(workdir, capsys, fixtures_dir):
    """K of (1-x)^(-0.3) starts with Gamma(lambda)/Gamma(lambda+mu)."""
    code = run(
        [
            "transform",
            "--input", str(fixtures_dir / "sample_series.json"),
            "--spec", str(fixtures_dir / "sample_spec.json"),
            "--direction", "K",
        ]
    )
    assert code == EXIT_OK
    out = TruncatedSeries.from_json(json.loads(capsys.readouterr().out))
    assert abs(out.coefficient((0,)) - gamma_ratio([0.6], [1.4])) <= 1e-13


def test_transform_missing_file(workdir, fixtures_dir):
    """Unreadable input files are validation failures."""
    code = run(
        [
            "transform", "--input", "missing.json",
            "--spec", str(fixtures_dir / "sample_spec.json"), "--direction", "L",
        ]
    )
    assert code == EXIT_VALIDATION


def test_kz_pipeline_command(workdir, capsys):
    """The (1,1,1) pipeline reports rank 3 and writes the scheme as TeX."""
    tex = workdir / "scheme.tex"
    code = run(["kz-pipeline", "--pqr", "1,1,1", "--seed", "3", "--emit", str(tex)])
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["rank"] == 3
    assert report["idx_x"] == report["idx_x_formula"] == 2
    assert report["validate"]["passed"]
    assert "A_{01}" in tex.read_text(encoding="utf-8")


def test_kz_pipeline_bad_pqr(workdir):
    """(p, q, r) must be positive."""
    assert run(["kz-pipeline", "--pqr", "0,1,1"]) == EXIT_VALIDATION
    assert run(["kz-pipeline", "--pqr", "1,1"]) == EXIT_VALIDATION


def test_kz_scheme_command(workdir, capsys, fixtures_dir):
    """A stored rank-one family validates and reports its scheme."""
    code = run(["kz-scheme", "--family", str(fixtures_dir / "sample_family.json")])
    assert code == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["scheme"]["N"] == 1
    assert data["validate"]["passed"]


def test_verify_suite(workdir, capsys):
    """The transform identities pass at their default tolerance."""
    assert run(["verify", "--suite", "transforms", "--seed", "1"]) == EXIT_OK
    stats = json.loads(capsys.readouterr().out)
    assert stats["checks"] == stats["passed"] > 0


def test_verify_full_transforms_suite(workdir):
    """--full runs 200 multiplier-law draws on top of the K/L identities, all passing."""
    report = Verifier(Config(seed=4), full=True).run("transforms")
    checks = report["suites"]["transforms"]["checks"]
    laws = [c for c in checks if c["name"].startswith("multiplier law")]
    assert len(laws) == 200
    assert report["stats"]["checks"] == report["stats"]["passed"] == 300


@pytest.mark.slow
def test_verify_full_catalog_draws_more(workdir):
    """--full draws five parameter sets per catalog route."""
    quick = Verifier(Config(seed=2)).run("catalog")["stats"]
    full = Verifier(Config(seed=2), full=True).run("catalog")["stats"]
    assert full["checks"] == 5 * quick["checks"]
    assert full["passed"] == full["checks"]


def test_verify_operators_suite(workdir):
    """All four Appell systems and the monomial annihilators pass after transport."""
    report = Verifier(Config(seed=6)).run("operators")
    names = [c["name"] for c in report["suites"]["operators"]["checks"]]
    for kind in ("F1", "F2", "F3", "F4"):
        assert any(name.startswith(f"transported {kind} ") for name in names)
    assert any(name.startswith("transported monomial") for name in names)
    assert report["stats"]["checks"] == report["stats"]["passed"]


def test_verify_genericity_failure_is_a_tolerance_failure(workdir, monkeypatch):
    """A non-generic pipeline draw fails its check and exits 3, as kz-pipeline does."""

    def non_generic(*args, **kwargs):
        raise GenericityError("quotient rank 2, expected 3")

    monkeypatch.setattr("hyperflux.verify.pipeline_pqr", non_generic)
    monkeypatch.setattr("hyperflux.__main__.pipeline_pqr", non_generic)
    report = Verifier(Config(), full=False).run("kz")
    assert report["stats"]["errors"] == 0
    assert report["stats"]["failed"] == len(Verifier(Config())._pqr_cases())
    assert run(["verify", "--suite", "ode", "--seed", "1"]) == EXIT_TOLERANCE
    assert run(["kz-pipeline", "--pqr", "1,1,1"]) == EXIT_TOLERANCE


def test_verify_tolerance_override(workdir, monkeypatch):
    """HYPERFLUX_TOL=0 makes every rounding error a tolerance failure."""
    monkeypatch.setenv("HYPERFLUX_TOL", "0")
    assert run(["verify", "--suite", "transforms", "--seed", "1"]) == EXIT_TOLERANCE


def test_config_load(workdir, monkeypatch):
    """YAML values load and environment variables win."""
    path = workdir / "config.yaml"
    path.write_text(
        "seed: 4\n"
        "tolerances:\n  series: 1.0e-9\n"
        "quadrature:\n  nodes: 32\n"
        "kz:\n  tex_div: 3\n",
        encoding="utf-8",
    )
    monkeypatch.setenv("HYPERFLUX_SEED", "9")
    monkeypatch.setenv("HYPERFLUX_TOL", "1e-3")
    config = Config.load(str(path))
    assert config.seed == 9
    assert config.tolerances.series == 1e-9
    assert config.tolerances.pick(1e-12) == 1e-3
    assert config.quadrature.nodes == 32
    assert config.quadrature.max_nodes == 512
    assert config.kz.tex_div == 3


def test_config_defaults(workdir):
    """No file means defaults."""
    config = Config.load(None)
    assert config.tolerances.check is None
    assert config.tolerances.pick(1e-7) == 1e-7
    assert config.series.trunc == 10


def test_artifact_store(workdir, fixtures_dir):
    """Series and families round-trip through the output directory."""
    store = ArtifactStore(Config(output_dir=str(workdir / "artifacts")))
    store.ensure_directories()
    series = TruncatedSeries.from_dict(1, 3, {(1,): 0.5j})
    path = store.save_series("half", series)
    assert store.load_series(path).coefficient((1,)) == 0.5j
    family = store.load_family(fixtures_dir / "sample_family.json")
    store.save_family("seed", family)
    assert [p.name for p in store.list_artifacts("families")] == ["seed.json"]
    assert store.list_artifacts("schemes") == []
    with pytest.raises(HyperfluxError):
        store.path_for("plots", "x")
    with pytest.raises(HyperfluxError):
        ArtifactStore.read_json(workdir / "nothing.json")


def test_format_entries():
    """Repeated eigenvalues carry their multiplicity."""
    assert format_entry(0.5 + 0j, 2) == "[0.5]_{2}"
    assert format_entry(1 + 0j, 1) == "1"
    assert format_value(0.5 - 2j) == "0.5-2i"


def test_emit_tex_blocks():
    """Columns split into blocks of div with braces only on the outside."""
    scheme = GeneralizedRiemannScheme(
        2,
        {
            "01": [(0j, 2)],
            "02": [(0j, 1), (0.5 + 0j, 1)],
            "03": [(1 + 0j, 1), (-1 + 0j, 1)],
        },
    )
    tex = emit_tex(scheme, div=2)
    assert tex.count(r"\begin{array}") == 2
    assert tex.startswith(r"\left\{")
    assert tex.rstrip().endswith(r"\right\}")
    assert "[0]_{2}" in tex
    with pytest.raises(ValueError):
        emit_tex(scheme, div=0)
