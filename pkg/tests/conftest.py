import pytest

from toricmds import catalog, mdscones

# Criterion lines recorded by test_acceptance, echoed after the run.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def atlas_of():
    """Memoized chamber atlas factory shared by the whole session.

    The two 95-chamber atlases take a few seconds each; every test that
    needs one goes through this cache.
    """
    cache: dict[str, mdscones.ChamberAtlas] = {}

    def get(name: str) -> mdscones.ChamberAtlas:
        if name not in cache:
            cache[name] = mdscones.chamber_atlas(catalog.get(name))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def contractions_of(atlas_of):
    """Memoized rational-contraction lists keyed by catalog name."""
    cache: dict[str, list] = {}

    def get(name: str):
        if name not in cache:
            cache[name] = mdscones.rational_contractions(atlas_of(name))
        return cache[name]

    return get


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
