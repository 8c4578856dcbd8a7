from unittest.mock import MagicMock

import pytest
from pytest import approx

from cube_core.generators import generate
from cube_core.transform import mu_measure
from cube_invariance.polynomials import MultilinearPoly
from cube_product.spaces import ProductFunction
from function_sources.generator_source import GeneratorSource
from verification_core.converters import (
    CUBE,
    POLY,
    PRODUCT,
    as_input,
    coerce_value,
    instance_id,
    parse_assignments,
    parse_sweep,
    sweep_points,
)
from verification_core.manager import VerificationManager
from verification_core.models import CheckResult, Instance, Report, RunConfig, VerdictRow
from verification_core.registry import COMMANDS, lookup, operations

# Library operations each of these command families must reach.
REQUIRED_OPERATIONS = {
    "transform": ["forward_transform"],
    "influences": ["influence_table", "equivalence_suite", "globalness"],
    "stability": ["noise_stability", "noise_sensitivity_check", "calcrho_identity_check", "warmup_check"],
    "check-hyper": ["thm13_check", "hypref_bound_check", "qnorm_bound_check", "replacement_step_check"],
    "isoperimetry": ["kahn_kalai_variant_search", "bourgain_witness_search", "sharpness_tables"],
    "threshold": ["measure_curve", "russo_check", "m_global_certify", "sharp_threshold_check", "noise_route_check"],
    "product": ["es_decompose", "laplacian", "es_hyper_check", "holder_term_check"],
    "invariance": ["invariance_bound_check", "telescoping_sum"],
}


@pytest.fixture
def manager() -> VerificationManager:
    return VerificationManager(GeneratorSource("dictator"), MagicMock())


def test_every_operation_belongs_to_one_command():
    for op, commands in operations().items():
        assert len(commands) == 1, (op, commands)


def test_every_checker_names_its_operations():
    for command in COMMANDS.values():
        for checker in command.checkers:
            assert checker.operations, (command.name, checker.theorem)
    _, lambda_form = lookup("check-hyper", "35")
    assert lambda_form is not None and lambda_form.operations == ("thm13_check",)


@pytest.mark.parametrize("command", sorted(REQUIRED_OPERATIONS))
def test_commands_reach_their_operations(command: str):
    ops = operations()
    for op in REQUIRED_OPERATIONS[command]:
        assert ops.get(op) == [command]


def test_lookup_defaults_and_errors():
    _, checker = lookup("check-hyper")
    assert checker is not None and checker.theorem == "13"
    assert lookup("zoo") == (COMMANDS["zoo"], None)
    with pytest.raises(ValueError, match="Unknown command"):
        lookup("nope")
    with pytest.raises(ValueError, match="no theorem"):
        lookup("check-hyper", "99")
    with pytest.raises(ValueError, match="takes no theorem"):
        lookup("zoo", "13")


def test_resolve_rejects_unknown_parameters():
    _, checker = lookup("threshold", "curve")
    assert checker is not None
    assert checker.resolve({"grid": 16})["grid"] == 16
    with pytest.raises(ValueError, match="bogus"):
        checker.resolve({"bogus": 1})


@pytest.mark.parametrize(
    ("raw", "expected"),
    [("3", 3), (" 0.25 ", 0.25), ("1e-3", 0.001), ("auto", "auto"), ("0.1/0.5", "0.1/0.5")],
)
def test_coerce_value(raw: str, expected):
    assert coerce_value(raw) == expected


def test_parse_assignments():
    assert parse_assignments(["q=4", "rho=auto"]) == {"q": 4, "rho": "auto"}
    assert parse_assignments(None) == {}
    with pytest.raises(ValueError, match="key=value"):
        parse_assignments(["q"])


def test_sweep_points_follow_sorted_keys():
    """Keys are expanded in sorted order, values in the order given."""
    sweep = parse_sweep("s=3,2; p=0.1,0.2")
    assert sweep == {"s": [3, 2], "p": [0.1, 0.2]}
    assert sweep_points(sweep) == [
        {"p": 0.1, "s": 3},
        {"p": 0.1, "s": 2},
        {"p": 0.2, "s": 3},
        {"p": 0.2, "s": 2},
    ]
    assert sweep_points({}) == [{}]


@pytest.mark.parametrize("text", ["p", "=1,2", "p=0.1;p=0.2", "p=,"])
def test_parse_sweep_rejects(text: str):
    with pytest.raises(ValueError):
        parse_sweep(text)


def test_instance_id():
    assert instance_id("f.tt", {}) == "f.tt"
    assert instance_id("tribes:s=2", {"w": 3, "p": 0.2}) == "tribes:s=2@p=0.2,w=3"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"output_format": "xml"},
        {"source_kind": "generator"},
        {"tolerance": 0.0},
        {"n_cap": 0},
        {"seed": -1},
        {"sweep": {"p": []}},
    ],
)
def test_run_config_validation(kwargs: dict):
    with pytest.raises(ValueError):
        RunConfig(command="check-hyper", **kwargs)


def test_as_input_lifts_cube_functions():
    f = generate("antitribes", s=2, w=2, p=0.2)
    instance = Instance("antitribes", f)
    assert as_input(instance, CUBE) is f
    lifted = as_input(instance, PRODUCT)
    assert isinstance(lifted, ProductFunction)
    assert lifted.space.n == 4
    assert lifted.expectation() == approx(mu_measure(f))
    poly = as_input(instance, POLY)
    assert isinstance(poly, MultilinearPoly) and poly.n == 4
    with pytest.raises(ValueError):
        as_input(Instance("poly", poly), CUBE)


def test_report_exit_status():
    def verdict(passed: bool, asserted: bool) -> VerdictRow:
        return VerdictRow("f", "13", {}, 1.0, 0.0 if not passed else 2.0, 0.0, passed, asserted)

    assert Report("check-hyper", [], [verdict(True, True), verdict(False, False)]).exit_status == 0
    report = Report("check-hyper", [], [verdict(False, True)])
    assert report.exit_status == 1 and len(report.failures) == 1


def test_check_result_margin():
    assert CheckResult("13", 1.0, 3.0, True).margin == approx(2.0)


def test_check_hyper_on_antitribes_passes():
    source = GeneratorSource("antitribes:s=2,w=3", p=0.2)
    config = RunConfig(command="check-hyper", theorem="13", source_kind="generator", source=source.spec)
    report = VerificationManager(source, MagicMock()).run(config)
    assert len(report.verdicts) == 1
    verdict = report.verdicts[0]
    assert verdict.instance == "antitribes:s=2,w=3@p=0.2"
    assert verdict.theorem == "13"
    assert verdict.passed and verdict.asserted
    assert verdict.runtime_ms is None
    assert report.exit_status == 0


def test_sweep_runs_in_order(manager: VerificationManager):
    config = RunConfig(
        command="threshold",
        theorem="curve",
        source_kind="generator",
        source="dictator",
        params={"grid": 3},
        sweep={"n": [2, 1]},
    )
    report = manager.run(config)
    assert [row["instance"] for row in report.rows] == ["dictator@n=2"] * 3 + ["dictator@n=1"] * 3
    for row in report.rows:
        assert row["mu"] == approx(row["p"])


def test_swept_checker_parameters_reach_the_verdict(manager: VerificationManager):
    config = RunConfig(
        command="threshold",
        theorem="russo",
        source_kind="generator",
        source="dictator",
        sweep={"at": [0.3, 0.6]},
        timings=True,
    )
    report = manager.run(config)
    assert [v.params["at"] for v in report.verdicts] == [0.3, 0.6]
    assert all(v.passed and v.asserted for v in report.verdicts)
    assert all(v.runtime_ms is not None for v in report.verdicts)


def test_unknown_parameter_is_a_config_error(manager: VerificationManager):
    config = RunConfig(command="check-hyper", source_kind="generator", source="dictator", params={"bogus": 1})
    with pytest.raises(ValueError, match="bogus"):
        manager.run(config)


def test_zoo_needs_no_source():
    report = VerificationManager(None, MagicMock()).run(RunConfig(command="zoo"))
    names = [row["name"] for row in report.rows]
    assert "antitribes" in names and "dictator" in names
    assert report.verdicts == []


def test_commands_need_a_source():
    with pytest.raises(ValueError, match="function source"):
        VerificationManager(None, MagicMock()).run(RunConfig(command="threshold"))


def test_run_and_write_hands_the_report_to_the_writer(manager: VerificationManager):
    stream = MagicMock()
    config = RunConfig(command="transform", source_kind="generator", source="dictator")
    status = manager.run_and_write(config, stream)
    assert status == 0
    writer = manager.report_writer
    writer.write.assert_called_once()
    report, written_to = writer.write.call_args.args
    assert report.command == "transform" and written_to is stream
