import pytest

from sgf.cli import suite_seed
from sgf.config import RunConfig, build_model, default_class_specs
from sgf.events import gen_synthetic
from sgf.network import online_learn

TRAIN_PER_CLASS = 15
TEST_PER_CLASS = 10
SUITE_BASE_SEED = 1


def train_suite_model(noise_density, train_per_class=TRAIN_PER_CLASS,
                      base_seed=SUITE_BASE_SEED):
    """Train a fresh model on the 10-class synthetic suite, single pass."""
    cfg = RunConfig()
    specs = default_class_specs(noise_density=noise_density)
    model = build_model(cfg)
    samples = (
        (gen_synthetic(spec, suite_seed(base_seed, cid, k, False)), cid)
        for cid, spec in sorted(specs.items())
        for k in range(train_per_class)
    )
    online_learn(samples, model)
    return model, specs


def suite_test_samples(specs, test_per_class=TEST_PER_CLASS,
                       base_seed=SUITE_BASE_SEED):
    for cid, spec in sorted(specs.items()):
        for k in range(test_per_class):
            yield gen_synthetic(spec, suite_seed(base_seed, cid, k, True)), cid


@pytest.fixture(scope="session")
def clean_suite():
    """(model, specs) trained on the clean suite; shared across tests."""
    return train_suite_model(0.0)
