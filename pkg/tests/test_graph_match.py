import random
from datetime import datetime, timedelta, timezone

from conftest import PlantedAttack, build_store, iso, write_ndjson
from conftest import T1059_SRC, T1552_PUTTY_SRC
from oracles import oracle_best_witness_count, oracle_edge_pairs

from wilee.dsl import ThreatDescription
from wilee.hunt import (
    NdjsonProxy,
    build_graph,
    execute_all,
    match,
    obligations_for,
    schedule,
)
from wilee.hunt.matcher import _support_index
from wilee.interpreter import concretize
from wilee.stores import IocDb


def hunt(impl, events, model, window_seconds=60.0, db=None):
    """Run schedule -> execute -> graph -> match over in-memory events."""

    class ListProxy:
        def __init__(self, items):
            from wilee.hunt.proxy import event_from_json

            self.items = [event_from_json(doc) for doc in items]

        def scan(self, entity_class):
            return [e for e in self.items if e.entity_class == entity_class]

    descriptors = schedule(impl, model)
    proxy = ListProxy(events)
    results = execute_all(descriptors, proxy, db or IocDb())
    graph = build_graph(results, descriptors, window_seconds)
    return graph, match(graph, impl)


def putty_impl(model):
    store = build_store(
        model,
        [
            ("T1552.002", ("credential-access",), "SME", T1552_PUTTY_SRC),
            ("T1059.001", ("execution",), "SME", T1059_SRC),
        ],
    )
    desc = ThreatDescription.from_steps("putty_hunt", ["T1552.002", "T1059.001"])
    return concretize(desc, store).implementations[0]


def event(eid, ts, host, cls, fields, links=()):
    return {
        "event_id": eid,
        "timestamp": ts,
        "host": host,
        "entity_class": cls,
        "fields": fields,
        "links": [{"verb": v, "target": t} for v, t in links],
    }


ATTACK = [
    event("reg1", "2026-03-01T06:00:00Z", "ws-002", "WinRegistryKey",
          {"Hive": "Software\\SimonTatham\\Putty\\Sessions"}),
    event("proc1", "2026-03-01T06:00:20Z", "ws-002", "Process",
          {"name": "TrojanSpy.Win32.TRICKBOT.AZ"}),
    event("cmd1", "2026-03-01T06:05:00Z", "ws-002", "Process",
          {"command_line": 'Get-Process -Name "powershell" | Stop-Process'}),
]


# ---------------------------------------------------------------------------
# build_graph
# ---------------------------------------------------------------------------


def test_no_results_empty_graph(model):
    impl = putty_impl(model)
    graph, result = hunt(impl, [], model)
    assert graph.nodes == () and graph.edges == ()
    assert result.confirmed is False and result.score == 0.0


def test_one_relation_two_nodes_one_edge(model):
    impl = putty_impl(model)
    graph, _ = hunt(impl, ATTACK[:2], model)
    assert len(graph.nodes) == 2
    assert len(graph.edges) == 1
    (edge,) = graph.edges
    assert edge.verb == "observed"
    assert edge.kind == "window"
    assert edge.technique_id == "T1552.002"
    assert edge.step_index == 0
    assert edge.timestamp.isoformat().startswith("2026-03-01T06:00:20")


def test_explicit_links_cross_hosts_and_windows(model):
    impl = putty_impl(model)
    far_apart = [
        event("reg1", "2026-03-01T06:00:00Z", "ws-A", "WinRegistryKey",
              {"Hive": "Software\\SimonTatham\\Putty\\Sessions"}),
        event("proc1", "2026-03-01T09:00:00Z", "ws-B", "Process",
              {"name": "TrojanSpy.Win32.TRICKBOT.AZ"}, links=[("observed", "reg1")]),
    ]
    graph, _ = hunt(impl, far_apart, model)
    (edge,) = graph.edges
    assert edge.kind == "link"


def test_window_rule_requires_same_host_and_time(model):
    impl = putty_impl(model)
    cross_host = [
        event("reg1", "2026-03-01T06:00:00Z", "ws-A", "WinRegistryKey",
              {"Hive": "Software\\SimonTatham\\Putty\\Sessions"}),
        event("proc1", "2026-03-01T06:00:20Z", "ws-B", "Process",
              {"name": "TrojanSpy.Win32.TRICKBOT.AZ"}),
    ]
    graph, _ = hunt(impl, cross_host, model)
    assert graph.edges == ()
    too_late = [
        ATTACK[0],
        event("proc1", "2026-03-01T06:02:00Z", "ws-002", "Process",
              {"name": "TrojanSpy.Win32.TRICKBOT.AZ"}),
    ]
    graph, _ = hunt(impl, too_late, model)
    assert graph.edges == ()


def test_edge_count_matches_pairwise_oracle(model):
    rng = random.Random(1414)
    impl = putty_impl(model)
    events = []
    for i in range(30):
        host = rng.choice(("h1", "h2"))
        moment = iso(
            datetime(2026, 3, 1, 6, 0, rng.randrange(0, 59), tzinfo=timezone.utc)
        )
        if rng.random() < 0.5:
            events.append(
                event(f"r{i}", moment, host, "WinRegistryKey",
                      {"Hive": "Software\\SimonTatham\\Putty\\Sessions"})
            )
        else:
            links = [("observed", f"r{j}") for j in range(i) if rng.random() < 0.1]
            events.append(
                event(f"p{i}", moment, host, "Process",
                      {"name": "TrojanSpy.Win32.TRICKBOT.AZ"}, links=links)
            )
    graph, _ = hunt(impl, events, model)
    from wilee.hunt.proxy import event_from_json

    parsed = [event_from_json(doc) for doc in events]
    sources = [e for e in parsed if e.entity_class == "Process"]
    targets = [e for e in parsed if e.entity_class == "WinRegistryKey"]
    expected_pairs = oracle_edge_pairs(sources, targets, "observed", 60.0)
    got_pairs = {(e.source_event, e.target_event) for e in graph.edges}
    assert got_pairs == expected_pairs


# ---------------------------------------------------------------------------
# match
# ---------------------------------------------------------------------------


def test_full_witness_in_order_confirms(model):
    impl = putty_impl(model)
    _, result = hunt(impl, ATTACK, model)
    assert result.confirmed is True
    assert result.score == 1.0
    assert result.step_scores == (1.0, 1.0)
    assert result.host == "ws-002"
    assert len(result.witness) == 2  # one edge + one node obligation


def test_empty_graph_scores_zero(model):
    impl = putty_impl(model)
    _, result = hunt(impl, [], model)
    assert result.confirmed is False
    assert result.score == 0.0


def test_reverse_temporal_order_not_confirmed(model):
    impl = putty_impl(model)
    reordered = [
        event("cmd1", "2026-03-01T06:00:00Z", "ws-002", "Process",
              {"command_line": 'Get-Process -Name "powershell" | Stop-Process'}),
        event("reg1", "2026-03-01T08:00:00Z", "ws-002", "WinRegistryKey",
              {"Hive": "Software\\SimonTatham\\Putty\\Sessions"}),
        event("proc1", "2026-03-01T08:00:10Z", "ws-002", "Process",
              {"name": "TrojanSpy.Win32.TRICKBOT.AZ"}),
    ]
    _, result = hunt(impl, reordered, model)
    assert result.confirmed is False
    assert result.score == 0.5  # one of the two obligations, never both


def test_step_timestamp_ties_allowed(model):
    impl = putty_impl(model)
    simultaneous = [
        event("reg1", "2026-03-01T06:00:00Z", "ws-002", "WinRegistryKey",
              {"Hive": "Software\\SimonTatham\\Putty\\Sessions"}),
        event("proc1", "2026-03-01T06:00:00Z", "ws-002", "Process",
              {"name": "TrojanSpy.Win32.TRICKBOT.AZ"}),
        event("cmd1", "2026-03-01T06:00:00Z", "ws-002", "Process",
              {"command_line": 'Get-Process -Name "powershell" | Stop-Process'}),
    ]
    _, result = hunt(impl, simultaneous, model)
    assert result.confirmed is True


def test_witness_must_share_one_host(model):
    impl = putty_impl(model)
    split = [
        ATTACK[0],
        ATTACK[1],
        event("cmd1", "2026-03-01T06:05:00Z", "other-host", "Process",
              {"command_line": 'Get-Process -Name "powershell" | Stop-Process'}),
    ]
    _, result = hunt(impl, split, model)
    assert result.confirmed is False
    assert result.score == 0.5


def test_score_monotone_under_event_addition(model):
    impl = putty_impl(model)
    events = list(ATTACK)
    _, base = hunt(impl, events[:1], model)
    previous = base.score
    for upto in range(2, len(events) + 1):
        _, result = hunt(impl, events[:upto], model)
        assert result.score >= previous
        previous = result.score
    # Random background arrivals never lower the score either.
    for i in range(20):
        events.append(
            event(f"noise{i}", "2026-03-01T07:00:00Z", "ws-002", "File",
                  {"path": f"C:\\tmp\\{i}"})
        )
        _, result = hunt(impl, events, model)
        assert result.score >= previous
        previous = result.score


def test_planted_completeness_and_minimality(model):
    impl = putty_impl(model)
    _, full = hunt(impl, ATTACK, model)
    assert full.confirmed is True
    for skip in range(len(ATTACK)):
        pruned = [e for i, e in enumerate(ATTACK) if i != skip]
        _, result = hunt(impl, pruned, model)
        assert result.confirmed is False, f"deleting witness {skip} must refute"


def test_dp_matches_exhaustive_witness_enumeration(model):
    """Randomized cross-check of the frontier search against brute force."""
    rng = random.Random(60486)
    impl = putty_impl(model)
    per_step = obligations_for(impl)
    total = sum(len(o) for o in per_step)
    hive = "Software\\SimonTatham\\Putty\\Sessions"
    cmd = 'Get-Process -Name "powershell" | Stop-Process'
    for trial in range(60):
        events = []
        counter = 0
        for _ in range(rng.randrange(0, 9)):
            counter += 1
            second = rng.randrange(0, 50) * 10
            moment = iso(
                datetime(2026, 3, 1, 6, 0, 0, tzinfo=timezone.utc)
                + timedelta(seconds=second)
            )
            host = rng.choice(("h1", "h2"))
            kind = rng.randrange(3)
            if kind == 0:
                events.append(event(f"e{counter}", moment, host, "WinRegistryKey", {"Hive": hive}))
            elif kind == 1:
                events.append(event(f"e{counter}", moment, host, "Process",
                                    {"name": "TrojanSpy.Win32.TRICKBOT.AZ"}))
            else:
                events.append(event(f"e{counter}", moment, host, "Process", {"command_line": cmd}))
        graph, result = hunt(impl, events, model)
        best = 0
        for host in graph.hosts():
            index = _support_index(graph, host)
            per_step_items = [
                [[ts for ts, _ in index.get(ob.key, [])] for ob in obligations]
                for obligations in per_step
            ]
            best = max(best, oracle_best_witness_count(per_step_items))
        expected = best / total if total else 0.0
        assert abs(result.score - expected) < 1e-12, f"trial {trial}"


def test_hunt_over_big_planted_log(model, big_log_events, tmp_path):
    impl = putty_impl(model)
    log = write_ndjson(tmp_path / "events.ndjson", big_log_events)
    proxy = NdjsonProxy(log)
    descriptors = schedule(impl, model)
    results = execute_all(descriptors, proxy, IocDb())
    graph = build_graph(results, descriptors)
    result = match(graph, impl)
    assert result.confirmed is True
    # The witness items must trace back to exactly the planted events.
    events_by_edge = {e.edge_id: {e.source_event, e.target_event} for e in graph.edges}
    events_by_node = {n.node_id: {n.event_id} for n in graph.nodes}
    witnessed = set()
    for item in result.witness:
        witnessed |= events_by_edge.get(item) or events_by_node[item]
    assert witnessed == set(PlantedAttack.build().witness_ids)
