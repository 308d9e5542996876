import pytest

from interp_workbench import corpus


@pytest.fixture(scope="session")
def proofs():
    return corpus.build_proof_corpus()


@pytest.fixture(scope="session")
def translations():
    return corpus.build_translations()


@pytest.fixture(scope="session")
def mutations(proofs):
    return corpus.build_mutations(proofs)


@pytest.fixture(scope="session")
def toy_models():
    return corpus.toy_models()
