import pytest

from yodkit.text_core import TextStats

_acceptance: dict[str, str] = {}


def make_stats(
    asl=1.0, asw=1.0, awl_chars=1.0, awl_syllables=None, phw=0.0, pc=0, sc=1,
    h3=0.0, h4=0.0, h5=0.0, h6=0.0,
) -> TextStats:
    """TextStats built from averages, for exercising formulas directly."""
    return TextStats(
        sentence_count=sc,
        word_count=max(1, round(asl * sc)),
        asl=asl,
        asw=asw,
        awl_chars=awl_chars,
        awl_syllables=asw if awl_syllables is None else awl_syllables,
        phw=phw,
        polysyllable_count=pc,
        h3=h3, h4=h4, h5=h5, h6=h6,
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion id and title")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = dict(report.user_properties).get("criterion")
    if label:
        _acceptance[label] = "PASS" if report.passed else "FAIL"


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker and ("criterion", marker.args[0]) not in item.user_properties:
        item.user_properties.append(("criterion", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_acceptance, key=lambda s: int(s.split()[0][1:])):
        terminalreporter.write_line(f"{_acceptance[label]}  {label}")
