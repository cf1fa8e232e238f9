from __future__ import annotations

import pytest

from audiospace.netsim import Delivery, Network, NetworkConfigError, NetworkModel

GROUPS = {1: 1, 2: 1, 3: 1, 4: 2}


def test_model_validation():
    with pytest.raises(NetworkConfigError):
        NetworkModel(latency_ms=(5, 2))
    with pytest.raises(NetworkConfigError):
        NetworkModel(latency_ms=(-1, 2))
    with pytest.raises(NetworkConfigError):
        NetworkModel(loss_prob=1.5)
    with pytest.raises(NetworkConfigError):
        NetworkModel(dup_prob=-0.1)
    with pytest.raises(NetworkConfigError):
        NetworkModel(beacon_period_ms=0)
    assert NetworkModel().is_identity
    assert not NetworkModel(latency_ms=(0, 1)).is_identity


def test_identity_network_delivers_instantly_in_order():
    net = Network(NetworkModel(), GROUPS)
    net.send(1, b"a", 100)
    net.send(2, b"b", 100)
    out = net.advance(100)
    assert out == [
        Delivery(100, 2, b"a"),
        Delivery(100, 3, b"a"),
        Delivery(100, 1, b"b"),
        Delivery(100, 3, b"b"),
    ]


def test_group_isolation():
    net = Network(NetworkModel(), GROUPS)
    net.send(4, b"x", 0)
    assert net.advance(10) == []  # device 4 is alone in group 2
    net.send(1, b"y", 0)
    assert all(d.dest_id != 4 for d in net.advance(10))


def test_sender_never_receives_its_own_datagram():
    net = Network(NetworkModel(), GROUPS)
    net.send(2, b"m", 5)
    assert all(d.dest_id != 2 for d in net.advance(5))


def test_same_seed_same_deliveries():
    model = NetworkModel(seed=42, latency_ms=(10, 200), loss_prob=0.3, dup_prob=0.2)

    def run():
        net = Network(model, GROUPS)
        for t in range(0, 1000, 50):
            net.send(1 + (t // 50) % 3, bytes([t % 256]), t)
        return net.advance(10_000), vars(net.stats)

    assert run() == run()


def test_different_seed_differs():
    def run(seed):
        net = Network(NetworkModel(seed=seed, latency_ms=(0, 500)), GROUPS)
        for t in range(0, 500, 20):
            net.send(1, bytes([t % 256]), t)
        return net.advance(10_000)

    assert run(1) != run(2)


def test_total_loss():
    net = Network(NetworkModel(seed=1, loss_prob=1.0), GROUPS)
    for t in range(10):
        net.send(1, b"z", t)
    assert net.advance(100) == []
    assert net.stats.copies_dropped == 20
    assert net.stats.delivered == 0


def test_total_duplication():
    net = Network(NetworkModel(seed=1, dup_prob=1.0), GROUPS)
    net.send(1, b"z", 0)
    out = net.advance(0)
    assert len(out) == 4  # two destinations, each twice
    assert net.stats.copies_duplicated == 2


def test_latency_bounds_hold():
    net = Network(NetworkModel(seed=9, latency_ms=(20, 120)), GROUPS)
    for t in range(0, 2000, 10):
        net.send(1, t.to_bytes(2, "big"), t)
    for d in net.advance(10_000):
        sent = int.from_bytes(d.datagram, "big")
        assert 20 <= d.deliver_at_ms - sent <= 120


def test_deliveries_come_out_time_sorted():
    net = Network(NetworkModel(seed=3, latency_ms=(0, 300)), GROUPS)
    for t in range(0, 300, 7):
        net.send(1, b"s", t)
    times = [d.deliver_at_ms for d in net.advance(10_000)]
    assert times == sorted(times)


def test_advance_is_inclusive_and_peek_matches():
    net = Network(NetworkModel(latency_ms=(50, 50)), GROUPS)
    net.send(1, b"p", 0)
    assert net.peek() == 50
    assert net.advance(49) == []
    assert len(net.advance(50)) == 2
    assert net.peek() is None
    assert net.pending == 0


def test_reordering_emerges_from_jitter():
    # with wide jitter some later sends must overtake earlier ones
    net = Network(NetworkModel(seed=8, latency_ms=(0, 400)), {1: 1, 2: 1})
    for i in range(50):
        net.send(1, bytes([i]), i * 10)
    order = [d.datagram[0] for d in net.advance(10_000)]
    assert order != sorted(order)


def test_rng_draw_order_is_per_destination():
    # replacing a lost destination draw must not shift later destinations:
    # identical prefix of sends yields identical deliveries regardless of
    # what is sent afterwards
    model = NetworkModel(seed=77, latency_ms=(10, 90), loss_prob=0.4, dup_prob=0.3)
    a = Network(model, GROUPS)
    b = Network(model, GROUPS)
    a.send(1, b"one", 0)
    b.send(1, b"one", 0)
    b.send(2, b"two", 1)
    assert a.advance(0) == [d for d in b.advance(0) if d.datagram == b"one"]
