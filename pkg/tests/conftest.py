import pytest

from pooleval.synthetic import make_collection


@pytest.fixture(scope="session")
def small_collection():
    """Desk-scale collection shared by tests that only read it."""
    return make_collection(
        topic_count=4,
        noise_topic_count=1,
        pooling_system_count=4,
        scored_system_count=3,
        docs_per_topic=40,
        highly_relevant=8,
        somewhat_relevant=6,
        distractors_per_topic=8,
        run_depth=40,
        k=20,
        k_google=4,
        k_noise=4,
        seed=5,
    )
