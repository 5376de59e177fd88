"""Smoke test for the Python bindings."""

import json

import noisy_radio as nr


def main():
    path = nr.Topology.generate(json.dumps({"family": "path", "d": 12}))
    assert path.n == 13 and path.diameter == 12

    # Two neighbors of node 1 broadcast at once: node 1 hears noise.
    tri = nr.Topology(3, [(0, 1), (1, 2)])
    assert tri.step([0, 2]) == [None, None, None]
    assert tri.step([0]) == [None, 0, None]

    g = nr.Gbst(path)
    assert g.verify() == []
    assert g.r_max == 1

    assert "fastbc" in nr.policies()
    trace = nr.run(path, "fastbc", kind="sender", p=0.5, seed=3)
    assert trace["completion"] is not None
    assert trace["interference_events"] == 0

    cfg = {
        "topology": {"family": "star", "n": 16},
        "policy": "rs-star",
        "fault": {"kind": "receiver", "p": 0.5},
        "k": 8,
        "trials": 10,
    }
    result = nr.run_experiment(json.dumps(cfg))
    assert result["success_rate"] == 1.0
    again = nr.rerun(json.dumps(result))
    assert [t["rounds"] for t in again["trials"]] == [t["rounds"] for t in result["trials"]]

    csv = nr.sweep(json.dumps(cfg), "k", [4, 8])
    assert csv.count("\n") == 3

    gap = nr.gap(json.dumps({
        "topology": {"family": "single_link"},
        "fault": {"kind": "sender", "p": 0.5},
        "k": 32,
        "trials": 20,
        "routing": {"policy": "single-link-adaptive"},
        "coding": {"policy": "rs-single-link"},
    }))
    assert 0.5 <= gap["ratio"] <= 2.0

    msgs = [bytes([i, i + 1, i + 2, 7]) for i in range(4)]
    packets = nr.rs_encode(msgs, 9)
    assert nr.rs_decode(packets[5:], 4, 4) == msgs
    assert nr.rlnc_roundtrip(msgs, 12, seed=1) == msgs
    assert nr.rlnc_roundtrip(msgs, 2) is None

    budget, bound = nr.chernoff_budget(64, 0.5)
    assert budget == 192.0 and bound < 1 / 64

    print("smoke test ok:", path, f"fastbc rounds {trace['completion']}, gap {gap['ratio']:.2f}")


if __name__ == "__main__":
    main()
