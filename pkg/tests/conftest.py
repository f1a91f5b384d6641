import numpy as np
import pytest

from tgexplain import Event, EventStore, PlantedSpec, build


@pytest.fixture
def chain_store():
    """a-b (t=1), b-c (t=2), c-d target at t=3."""
    return EventStore(
        [
            Event(id=0, source=0, destination=1, timestamp=1.0, attributes=(0.0,)),
            Event(id=1, source=1, destination=2, timestamp=2.0, attributes=(0.0,)),
            Event(id=2, source=2, destination=3, timestamp=3.0, attributes=(0.0,)),
        ]
    )


@pytest.fixture
def small_bench():
    """20-event planted instance with 2 singletons and 1 dependent pair."""
    spec = PlantedSpec(
        n_nodes=8,
        n_events=20,
        singletons=((2, 1.0), (5, 0.5)),
        pairs=(((8, 11), 1.5),),
        tau=50.0,
        bias=1.0,
        noise_scale=0.0,
        seed=1,
    )
    return build(spec)


def random_store(rng: np.random.Generator, n_events: int, n_nodes: int) -> EventStore:
    """Random small event store, some node events mixed in."""
    events = []
    for i in range(n_events):
        src = int(rng.integers(n_nodes))
        if rng.random() < 0.2:
            dst = None
        else:
            dst = int(rng.integers(n_nodes))
            if dst == src:
                dst = (dst + 1) % n_nodes
        events.append(
            Event(
                id=i,
                source=src,
                destination=dst,
                timestamp=float(np.round(rng.uniform(0, 10), 1)),
                attributes=(float(rng.normal()),),
            )
        )
    return EventStore(events)
