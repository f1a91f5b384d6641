"""Immutable event store for continuous-time dynamic graphs.

A CTDG is a time-ordered stream of events. Each event is an interaction
between two nodes (edge event) or a change to a single node (node event,
destination is None). The store is built once and never mutated, so any
number of concurrent searches can read from it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Optional, Sequence

from .errors import DataError

DATASET_FORMATS = ("jodie-csv", "events-jsonl")


@dataclass(frozen=True)
class Event:
    """One timestamped interaction or node-change record."""

    id: int
    source: int
    destination: Optional[int]
    timestamp: float
    attributes: tuple[float, ...]
    label: Optional[int] = None

    @property
    def nodes(self) -> tuple[int, ...]:
        """Nodes this event is incident to (node events carry only the source)."""
        if self.destination is None:
            return (self.source,)
        return (self.source, self.destination)


class EventStore:
    """Events sorted by (timestamp, id) plus a node -> incident-events index."""

    def __init__(self, events: Iterable[Event]):
        evs = sorted(events, key=lambda e: (e.timestamp, e.id))
        seen: set[int] = set()
        dim = None
        for e in evs:
            if e.id < 0:
                raise DataError(f"event id {e.id} is negative")
            if e.id in seen:
                raise DataError(f"duplicate event id {e.id}")
            seen.add(e.id)
            if not math.isfinite(e.timestamp) or e.timestamp < 0:
                raise DataError(f"event {e.id}: non-finite or negative timestamp")
            if dim is None:
                dim = len(e.attributes)
            elif len(e.attributes) != dim:
                raise DataError(
                    f"event {e.id}: attribute length {len(e.attributes)} != {dim}"
                )
        self.events: tuple[Event, ...] = tuple(evs)
        self.attribute_dim: int = dim if dim is not None else 0
        self._by_id = {e.id: e for e in evs}
        self._timestamps = [e.timestamp for e in evs]
        node_index: dict[int, list[int]] = {}
        for e in evs:
            for node in e.nodes:
                node_index.setdefault(node, []).append(e.id)
        self.node_index: dict[int, list[int]] = node_index

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __contains__(self, event_id: int) -> bool:
        return event_id in self._by_id

    def event(self, event_id: int) -> Event:
        try:
            return self._by_id[event_id]
        except KeyError:
            raise DataError(f"unknown event id {event_id}") from None

    def events_before(self, t: float) -> list[int]:
        """Ids of all events with timestamp strictly before t, in store order."""
        cut = bisect_left(self._timestamps, t)
        return [e.id for e in self.events[:cut]]

    def nodes(self) -> list[int]:
        return sorted(self.node_index)


@dataclass(frozen=True)
class ComputationGraph:
    """The L-hop, strictly-earlier candidate event set for one target event."""

    target_event_id: int
    t_k: float
    candidate_ids: tuple[int, ...]
    hops: int

    def __len__(self) -> int:
        return len(self.candidate_ids)


def extract_computation_graph(
    store: EventStore, target_event_id: int, hops: int
) -> ComputationGraph:
    """Expand the target's nodes hop by hop over strictly-earlier events.

    frontier 0 is the target's own nodes; each hop collects every earlier
    event incident to the frontier and folds the touched nodes back in.
    No recency cutoff: the whole temporal window before t_k is eligible.
    """
    if hops < 1:
        raise DataError(f"hops must be >= 1, got {hops}")
    target = store.event(target_event_id)
    t_k = target.timestamp
    frontier = set(target.nodes)
    collected: set[int] = set()
    for _ in range(hops):
        new_events = set()
        for node in frontier:
            for eid in store.node_index.get(node, ()):
                ev = store._by_id[eid]
                if ev.timestamp < t_k and eid != target_event_id:
                    new_events.add(eid)
        for eid in new_events:
            frontier.update(store._by_id[eid].nodes)
        collected |= new_events
    ordered = sorted(collected, key=lambda i: (store._by_id[i].timestamp, i))
    return ComputationGraph(
        target_event_id=target_event_id,
        t_k=t_k,
        candidate_ids=tuple(ordered),
        hops=hops,
    )


def load_events(stream: IO, fmt: str) -> EventStore:
    """Parse a dataset stream into an EventStore.

    `jodie-csv`: header line then rows source,dest,timestamp,state_label,f0,...
    Item (destination) ids are offset by max(source)+1 so the bipartite user
    and item namespaces never collide.
    `events-jsonl`: one object per line with keys src, dst (null allowed),
    t, attrs, optional label.
    """
    if fmt not in DATASET_FORMATS:
        raise DataError(f"unknown dataset format {fmt!r}")
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    raw = stream.read()
    if isinstance(raw, bytes):
        text = raw.decode("utf-8")
    else:
        text = raw
    if fmt == "jodie-csv":
        return _load_jodie_csv(text)
    return _load_events_jsonl(text)


def _parse_time(value, line_no: int) -> float:
    try:
        t = float(value)
    except (TypeError, ValueError):
        raise DataError(f"line {line_no}: bad timestamp {value!r}") from None
    if not math.isfinite(t):
        raise DataError(f"line {line_no}: non-finite timestamp {value!r}")
    if t < 0:
        raise DataError(f"line {line_no}: negative timestamp {value!r}")
    return t


def _load_jodie_csv(text: str) -> EventStore:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DataError("line 1: missing header")
    parsed = []  # (source, raw_dest, t, label, attrs)
    dim = None
    for line_no, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < 4:
            raise DataError(f"line {line_no}: expected at least 4 fields")
        try:
            src = int(row[0])
            dst = int(row[1])
            label = int(float(row[3]))
            attrs = tuple(float(v) for v in row[4:])
        except ValueError as exc:
            raise DataError(f"line {line_no}: malformed row ({exc})") from None
        t = _parse_time(row[2], line_no)
        if dim is None:
            dim = len(attrs)
        elif len(attrs) != dim:
            raise DataError(
                f"line {line_no}: attribute length {len(attrs)} != {dim}"
            )
        parsed.append((src, dst, t, label, attrs))
    if not parsed:
        return EventStore([])
    offset = max(p[0] for p in parsed) + 1
    events = [
        Event(
            id=i,
            source=src,
            destination=dst + offset,
            timestamp=t,
            attributes=attrs,
            label=label,
        )
        for i, (src, dst, t, label, attrs) in enumerate(parsed)
    ]
    return EventStore(events)


def _load_events_jsonl(text: str) -> EventStore:
    events = []
    dim = None
    idx = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {line_no}: invalid JSON ({exc.msg})") from None
        try:
            src = int(obj["src"])
            dst = obj["dst"]
            attrs = tuple(float(v) for v in obj["attrs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"line {line_no}: malformed row ({exc})") from None
        t = _parse_time(obj.get("t"), line_no)
        if dst is not None:
            dst = int(dst)
        if dim is None:
            dim = len(attrs)
        elif len(attrs) != dim:
            raise DataError(
                f"line {line_no}: attribute length {len(attrs)} != {dim}"
            )
        label = obj.get("label")
        events.append(
            Event(
                id=obj.get("id", idx),
                source=src,
                destination=dst,
                timestamp=t,
                attributes=attrs,
                label=None if label is None else int(label),
            )
        )
        idx += 1
    return EventStore(events)


def dump_events_jsonl(store: EventStore, stream: IO[str]) -> None:
    """Write a store back out in events-jsonl format, id order."""
    for ev in sorted(store.events, key=lambda e: e.id):
        obj = {
            "id": ev.id,
            "src": ev.source,
            "dst": ev.destination,
            "t": ev.timestamp,
            "attrs": list(ev.attributes),
        }
        if ev.label is not None:
            obj["label"] = ev.label
        stream.write(json.dumps(obj) + "\n")
