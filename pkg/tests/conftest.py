import contextlib
import io

import pytest

from logbarrier import cli, continuation, corpus


@pytest.fixture(scope="session")
def problems():
    return {name: corpus.builtin(name).problem for name in corpus.names()}


@pytest.fixture(scope="session")
def traces(problems):
    # one full continuation run per builtin; several modules assert
    # different slices of the same paths
    return {name: continuation.solve(p) for name, p in problems.items()}


@pytest.fixture(scope="session")
def run_cli():
    def run(argv):
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli.main([str(a) for a in argv])
        return code, out.getvalue(), err.getvalue()

    return run
