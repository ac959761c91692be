import random

import pytest

from jrsched import Instance, Job

R1 = frozenset({1})


def walkthrough_instance(joint_cost=1, item_cost=1):
    """Three jobs (p=4,1,1 released at 0,3,7) on one resource."""
    return Instance(
        1,
        joint_cost,
        (item_cost,),
        (Job(1, 0, 4, R1), Job(2, 3, 1, R1), Job(3, 7, 1, R1)),
    )


def single_job_instance(order_cost):
    return Instance(1, order_cost, (0,), (Job(1, 0, 1, R1),))


def regular_instance(n, order_cost):
    return Instance(1, order_cost, (0,), tuple(Job(j, j, 1, R1) for j in range(1, n + 1)))


def random_instance(
    rng: random.Random,
    n: int,
    s: int = 1,
    max_processing: int = 1,
    max_weight: int = 1,
    max_release: int = 8,
    equal_processing: int | None = None,
    distinct_releases: bool = False,
    cost_choices=(0, 1, 2, 5, 10),
) -> Instance:
    releases = list(range(max(max_release + 1, n)))
    rng.shuffle(releases)
    jobs = []
    for job_id in range(1, n + 1):
        release = releases.pop() if distinct_releases else rng.randint(0, max_release)
        if equal_processing is not None:
            processing = equal_processing
        else:
            processing = rng.randint(1, max_processing)
        size = rng.randint(1, s)
        jobs.append(
            Job(
                job_id,
                release,
                processing,
                frozenset(rng.sample(range(1, s + 1), size)),
                rng.randint(1, max_weight),
            )
        )
    joint = rng.choice(cost_choices)
    items = tuple(rng.choice(cost_choices) for _ in range(s))
    return Instance(s, joint, items, tuple(jobs))


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
