//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any fails. Numeric arguments select criteria (`-- 3 7`).

use std::time::Instant;

use noisy_radio::algos::{activity_violations, build, default_phase, pipeline_activity, Fastbc, SenderFaultRoutingTransform};
use noisy_radio::algos::{FaultCodingTransform, Shape};
use noisy_radio::coding::{rlnc_encode, RlncState, RsCode};
use noisy_radio::gbst::{build_gbst, verify_gbst};
use noisy_radio::graph::{Graph, NodeId, Topology};
use noisy_radio::harness::{
    fit_scaling, gap_report, quantile, rerun, run_experiment, ExperimentConfig, FitModel, GapConfig, Side,
};
use noisy_radio::rng::{Coins, Purpose};
use noisy_radio::sim::{
    run_schedule, run_schedule_with, step_with_oracle, FaultKind, FaultModel, FaultOracle, Forced, Oblivious, Packet,
    RoundAction, RoundOutcome, RunOptions,
};
use noisy_radio::topo::*;
use serde_json::{json, Value};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn completions(t: &Topology, name: &str, params: &Value, k: usize, f: &FaultModel, trials: u64, max: u64) -> Vec<Option<u64>> {
    (0..trials)
        .map(|s| {
            let mut b = build(name, params, t, k, f).unwrap();
            run_schedule(t, b.schedule.as_mut(), b.k, f, s, max).unwrap().completion
        })
        .collect()
}

fn censored(v: &[Option<u64>], max: u64) -> Vec<u64> {
    v.iter().map(|x| x.unwrap_or(max)).collect()
}

fn median(v: &[Option<u64>], max: u64) -> f64 {
    quantile(&censored(v, max), 0.5).unwrap() as f64
}

fn mean_of(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn failures(v: &[Option<u64>]) -> usize {
    v.iter().filter(|x| x.is_none()).count()
}

// 1. Channel semantics

struct Table {
    sender: u32,
    receiver: u32,
}

impl FaultOracle for Table {
    fn sender_fault(&self, _: u64, node: NodeId) -> bool {
        self.sender >> node & 1 == 1
    }
    fn receiver_fault(&self, _: u64, node: NodeId) -> bool {
        self.receiver >> node & 1 == 1
    }
}

/// Connected labeled graphs on `n` nodes.
fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let e: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            let g = Graph::from_edges(n, &e).ok()?;
            Topology::new(g.clone(), 0).ok().map(|_| g)
        })
        .collect()
}

/// What `v` hears under the plain collision rule plus the fault tables.
fn brute_force(g: &Graph, pattern: u32, kind: FaultKind, sf: u32, rf: u32, v: usize) -> Option<usize> {
    let speakers: Vec<usize> = (0..g.node_count()).filter(|&u| pattern >> u & 1 == 1 && g.has_edge(u, v)).collect();
    if speakers.len() != 1 {
        return None;
    }
    let b = speakers[0];
    let lost = match kind {
        FaultKind::Faultless => false,
        FaultKind::Sender => sf >> b & 1 == 1,
        FaultKind::Receiver => rf >> v & 1 == 1,
    };
    (!lost).then_some(b)
}

fn channel_oracle() -> Verdict {
    let (mut cases, mut mismatches) = (0u64, 0u64);
    let kinds = [FaultModel::faultless(), FaultModel::sender(0.5), FaultModel::receiver(0.5)];
    for n in 1..=5 {
        let full = (1u32 << n) - 1;
        for g in connected_graphs(n) {
            for pattern in 0..=full {
                let actions: Vec<RoundAction> = (0..n)
                    .map(|u| {
                        if pattern >> u & 1 == 1 {
                            RoundAction::Broadcast(Packet::message(u as u32, n))
                        } else {
                            RoundAction::Silent
                        }
                    })
                    .collect();
                for model in &kinds {
                    for table in 0..=full {
                        let oracle = Table { sender: table, receiver: table };
                        let out = step_with_oracle(&g, &actions, model, &oracle, 1).unwrap();
                        for v in 0..n {
                            cases += 1;
                            let speaking = pattern >> v & 1 == 1;
                            let ok = if speaking {
                                let want = model.kind != FaultKind::Sender || table >> v & 1 == 0;
                                out.outcomes[v].is_none() && out.sender_ok[v] == Some(want)
                            } else {
                                let want = brute_force(&g, pattern, model.kind, table, table, v);
                                let got = match &out.outcomes[v] {
                                    Some(RoundOutcome::Received { packet, from }) => {
                                        (*packet == Packet::message(*from as u32, n)).then_some(*from)
                                    }
                                    _ => None,
                                };
                                out.sender_ok[v].is_none() && got == want
                            };
                            mismatches += !ok as u64;
                        }
                    }
                    // Uniform coins either way agree with the all-zero and all-one tables.
                    for forced in [false, true] {
                        let a = step_with_oracle(&g, &actions, model, &Forced(forced), 1).unwrap();
                        let t = if forced { full } else { 0 };
                        let b = step_with_oracle(&g, &actions, model, &Table { sender: t, receiver: t }, 1).unwrap();
                        cases += 1;
                        mismatches += (a != b) as u64;
                    }
                }
            }
        }
    }
    verdict(mismatches == 0, format!("{cases} checks, {mismatches} mismatches"))
}

// 2. GBST suite

fn gbst_suite() -> Verdict {
    let (mut bad_rank, mut bad_verify, mut interference, mut incomplete) = (0, 0, 0u64, 0);
    for i in 0..200u64 {
        let n = 8 + (i as usize * 97) % 505;
        let density = (1 + i % 4) as f64 * 1.5 * (n as f64).ln() / n as f64;
        let t = make_random_connected(n, density.min(1.0), 1000 + i).unwrap();
        let g = build_gbst(&t);
        if g.r_max() > (n as f64).log2().ceil() as u32 {
            bad_rank += 1;
        }
        if !verify_gbst(&g).is_empty() {
            bad_verify += 1;
        }
        let f = FaultModel::faultless();
        let mut s = Oblivious::routing(Fastbc::new(&g, default_phase(n)));
        let tr = run_schedule(&t, &mut s, 1, &f, i, 1 << 22).unwrap();
        interference += tr.interference_events;
        incomplete += !tr.completed() as usize;
    }
    verdict(
        bad_rank == 0 && bad_verify == 0 && interference == 0 && incomplete == 0,
        format!("r_max violations {bad_rank}, verify failures {bad_verify}, fast-round interference {interference}, incomplete {incomplete}"),
    )
}

// 3. Decay robustness

fn decay_robustness() -> Verdict {
    const MAX: u64 = 1 << 24;
    let (mut worst, mut worst_at) = (0.0f64, String::new());
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for m in 6..=10 {
        let n = 1usize << m;
        for (family, t) in [("star", make_star(n - 1).unwrap()), ("path", make_path(n - 1).unwrap())] {
            let clean = median(&completions(&t, "decay", &Value::Null, 1, &FaultModel::faultless(), 101, MAX), MAX);
            let noisy = median(&completions(&t, "decay", &Value::Null, 1, &FaultModel::receiver(0.5), 101, MAX), MAX);
            let ratio = noisy / clean;
            if ratio > worst {
                worst = ratio;
                worst_at = format!("{family} n={n} ({noisy}/{clean})");
            }
            xs.push(t.eccentricity() as f64 * m as f64);
            ys.push(clean);
        }
    }
    let fit = fit_scaling(&xs, &ys, FitModel::Linear).unwrap();
    verdict(
        worst <= 2.5 && fit.residual < 0.10,
        format!("worst noisy/faultless median {worst:.2} at {worst_at}; D log n fit slope {:.2} residual {:.4}", fit.slope, fit.residual),
    )
}

// 4. FASTBC deterioration

/// Mean rounds per hop along the path, from the first path node informed to the last.
fn per_hop(t: &Topology, d: usize, f: &FaultModel, trials: u64) -> f64 {
    let hops: Vec<f64> = (0..trials)
        .map(|s| {
            let mut b = build("fastbc", &Value::Null, t, 1, f).unwrap();
            let tr = run_schedule(t, b.schedule.as_mut(), 1, f, s, 1 << 26).unwrap();
            let (a, z) = (tr.first_informed[1].unwrap(), tr.first_informed[d].unwrap());
            (z - a) as f64 / (d - 1) as f64
        })
        .collect();
    mean_of(&hops)
}

fn fastbc_deterioration() -> Verdict {
    let mut clean = Vec::new();
    let mut noisy = Vec::new();
    for m in [7usize, 9, 11, 14] {
        let n = 1usize << m;
        let d = n / 2;
        let t = make_ranked_path(d, m - 2, 0).unwrap();
        clean.push((n, per_hop(&t, d, &FaultModel::faultless(), 3)));
        if m == 7 || m == 14 {
            noisy.push(per_hop(&t, d, &FaultModel::sender(0.5), 10));
        }
    }
    let ratio = noisy[1] / noisy[0];
    let clean_ok = clean.iter().all(|&(_, h)| (2.0..=3.0).contains(&h));
    let shown: Vec<String> = clean.iter().map(|(n, h)| format!("{n}:{h:.2}")).collect();
    verdict(
        (1.6..=2.4).contains(&ratio) && clean_ok,
        format!(
            "noisy per-hop {:.1} -> {:.1} (ratio {ratio:.2}); faultless per-hop {}",
            noisy[0],
            noisy[1],
            shown.join(" ")
        ),
    )
}

// 5. Robust FASTBC linearity

fn d_slope(name: &str, params: &Value, m: usize, f: &FaultModel, trials: u64) -> f64 {
    let n = 1usize << m;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for dm in 6..=11 {
        let d = 1usize << dm;
        let t = generate(&ranked_path_spec(n, d, m - 3).unwrap()).unwrap().topology;
        let r = completions(&t, name, params, 1, f, trials, 1 << 26);
        xs.push(d as f64);
        ys.push(mean_of(&censored(&r, 1 << 26).iter().map(|&x| x as f64).collect::<Vec<_>>()));
    }
    fit_scaling(&xs, &ys, FitModel::Linear).unwrap().slope
}

fn robust_linearity() -> Verdict {
    let robust = json!({ "c": 16 });
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, f) in [("sender", FaultModel::sender(0.5)), ("receiver", FaultModel::receiver(0.5))] {
        let (r12, r14) = (d_slope("robust-fastbc", &robust, 12, &f, 3), d_slope("robust-fastbc", &robust, 14, &f, 3));
        let (p12, p14) = (d_slope("fastbc", &Value::Null, 12, &f, 3), d_slope("fastbc", &Value::Null, 14, &f, 3));
        let rc = (r14 - r12).abs() / r12;
        let pc = (p14 - p12).abs() / p12;
        pass &= rc < 0.25 && pc > 0.60;
        parts.push(format!("{label}: robust {r12:.1} -> {r14:.1} ({:+.0}%), plain {p12:.1} -> {p14:.1} ({:+.0}%)", rc * 100.0, pc * 100.0));
    }
    verdict(pass, parts.join("; "))
}

// 6. RS / RLNC properties

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << m).filter(|s| s.count_ones() as usize == k).map(|s| (0..m).filter(|&i| s >> i & 1 == 1).collect()).collect()
}

fn coding_properties() -> Verdict {
    let mut s = Coins::new(6).stream(0, Purpose::Harness);
    let (mut checked, mut rs_bad) = (0u64, 0u64);
    for k in 1..=8 {
        for m in k..=12 {
            let code = RsCode::new(k, m).unwrap();
            let sources: Vec<Vec<u16>> = (0..k).map(|_| (0..3).map(|_| s.next_u64() as u16).collect()).collect();
            let packets = code.encode(&sources).unwrap();
            for idx in subsets(m, k) {
                let mut got: Vec<_> = idx.iter().map(|&i| packets[i].clone()).collect();
                got.reverse();
                checked += 1;
                rs_bad += (code.decode(&got).ok().as_ref() != Some(&sources)) as u64;
            }
        }
    }
    let (k, trials) = (32usize, 1000u64);
    let mut ok = 0;
    for seed in 0..trials {
        let coins = Coins::new(seed);
        let mut src = coins.stream(0, Purpose::Messages);
        let msgs: Vec<Vec<u8>> = (0..k).map(|_| (0..16).map(|_| src.next_u8()).collect()).collect();
        let full = RlncState::with_sources(&msgs);
        let mut enc = coins.stream(1, Purpose::Encode);
        let mut rx = RlncState::new(k, 16);
        for _ in 0..k + 10 {
            rx.absorb(&rlnc_encode(&full, &mut enc).unwrap()).unwrap();
        }
        ok += (rx.is_full() && rx.decode().ok().as_ref() == Some(&msgs)) as u64;
    }
    let rate = ok as f64 / trials as f64;
    verdict(
        rs_bad == 0 && rate >= 0.99,
        format!("RS {checked} subsets, {rs_bad} failures; RLNC k=32 with k+10 packets decodes {ok}/{trials}"),
    )
}

// 7. Star gap

fn star_gap() -> Verdict {
    let (n, k) = (1024usize, 256usize);
    let cfg = GapConfig {
        topology: TopologySpec::Star { n },
        fault: FaultModel::receiver(0.5),
        k,
        // Enough trials to resolve the (1 - 1/k)-quantile.
        trials: k as u64,
        seed: 0,
        max_rounds: 1 << 24,
        delta: None,
        routing: Side { policy: "star-adaptive".into(), params: Value::Null },
        coding: Side { policy: "rs-star".into(), params: Value::Null },
    };
    let r = match gap_report(&cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("gap undefined: {e}")),
    };
    let log_n = (n as f64).log2();
    let (qr, qc) = (r.routing.quantile_rounds as f64, r.coding.quantile_rounds as f64);
    verdict(
        qr >= 0.25 * k as f64 * log_n && qc <= 4.0 * k as f64 && r.ratio >= 0.5 * log_n,
        format!(
            "routing q{:.3} rounds {qr} (need >= {}), coding {qc} (need <= {}), gap {:.2} (need >= {})",
            r.routing.quantile_level,
            0.25 * k as f64 * log_n,
            4 * k,
            r.ratio,
            0.5 * log_n
        ),
    )
}

// 8. Single link

fn single_link() -> Verdict {
    let t = make_single_link();
    let f = FaultModel::sender(0.5);
    let per_msg = |name: &str, k: usize, trials: u64| {
        let r = completions(&t, name, &Value::Null, k, &f, trials, 1 << 26);
        mean_of(&censored(&r, 1 << 26).iter().map(|&x| x as f64).collect::<Vec<_>>()) / k as f64
    };
    let (r64, r1024) = (per_msg("single-link-repetition", 64, 40), per_msg("single-link-repetition", 1024, 10));
    let ratio = r1024 / r64;
    let adaptive = per_msg("single-link-adaptive", 256, 200);
    let target = 1.0 / (1.0 - f.p);
    let cfg = GapConfig {
        topology: TopologySpec::SingleLink,
        fault: f,
        k: 256,
        trials: 200,
        seed: 0,
        max_rounds: 1 << 24,
        delta: None,
        routing: Side { policy: "single-link-adaptive".into(), params: Value::Null },
        coding: Side { policy: "rs-single-link".into(), params: Value::Null },
    };
    let gap = gap_report(&cfg).map(|g| g.ratio).unwrap_or(f64::NAN);
    verdict(
        (1.4..=1.9).contains(&ratio) && (adaptive - target).abs() <= 0.1 * target && (0.5..=2.0).contains(&gap),
        format!("repetition per-message {r64:.1} -> {r1024:.1} (ratio {ratio:.2}); adaptive {adaptive:.3}/message; gap {gap:.3}"),
    )
}

// 9. Pipelining

fn pipelining() -> Verdict {
    let t = make_layered(8, 16).unwrap();
    let k = 64;
    let n = t.node_count() as f64;
    let budget = (24.0 * k as f64 * n.log2().powi(2)) as u64;
    let trials = 1000u64;
    let f = FaultModel::receiver(0.5);
    let r = completions(&t, "pipeline", &Value::Null, k, &f, trials, budget);
    let fails = failures(&r);
    let violations = activity_violations(&pipeline_activity(8));
    let allowed = trials as f64 / k as f64;
    verdict(
        fails as f64 <= allowed && violations == 0,
        format!(
            "budget {budget}, median {:.0}, failures {fails}/{trials} (allowed {allowed:.1}), activity violations {violations}",
            median(&r, budget)
        ),
    )
}

// 10. Transformations

fn fastbc_base(t: &Topology) -> Box<dyn noisy_radio::sim::Schedule> {
    Box::new(Oblivious::routing(Fastbc::new(&build_gbst(t), default_phase(t.node_count()))))
}

fn transforms() -> Verdict {
    let (eta, trials) = (0.25, 200u64);
    let mut parts = Vec::new();
    let mut pass = true;

    // Routing on a 32-node path, one base message, x copies.
    let t = make_path(31).unwrap();
    let f = FaultModel::sender(0.5);
    let x = 96;
    let (mut fails, mut over) = (0, 0);
    for seed in 0..trials {
        let mut s = SenderFaultRoutingTransform::new(fastbc_base(&t), x, eta, &f).unwrap();
        let tr = run_schedule(&t, &mut s, x, &f, seed, 1 << 24).unwrap();
        let bound = s.base_rounds() as f64 * x as f64 * (1.0 + eta) / (1.0 - f.p);
        match tr.completion {
            Some(c) => over += (c as f64 > bound) as u64,
            None => fails += 1,
        }
    }
    let ok = fails as f64 <= trials as f64 / x as f64 && over == 0;
    pass &= ok;
    parts.push(format!("routing x={x}: failures {fails}/{trials}, over bound {over}"));

    // Coding on a 64-leaf star, four base messages.
    let t = make_star(64).unwrap();
    let (k_base, x) = (4, 120);
    for f in [FaultModel::sender(0.5), FaultModel::receiver(0.5)] {
        let mut fails = 0;
        let mut errors = 0;
        for seed in 0..trials {
            let mut s = FaultCodingTransform::new(Shape::Star, x, eta, &f).unwrap();
            let tr = run_schedule(&t, &mut s, k_base * x, &f, seed, 1 << 24).unwrap();
            fails += !tr.completed() as u64;
            errors += tr.decode_errors;
        }
        let ok = fails as f64 <= trials as f64 / (k_base * x) as f64 && errors == 0;
        pass &= ok;
        parts.push(format!("coding {:?} x={x}: failures {fails}/{trials}, decode errors {errors}", f.kind));
    }

    // At p = 0 both reproduce the base schedule round for round.
    let t = make_path(15).unwrap();
    let f = FaultModel::sender(0.0);
    let mut s = SenderFaultRoutingTransform::new(fastbc_base(&t), 1, 0.0, &f).unwrap();
    let tr = run_schedule_with(&t, &mut s, 1, &f, 9, 1 << 20, RunOptions::full()).unwrap();
    let base = s.base_trace().unwrap();
    let (a, b) = (tr.log.as_ref().unwrap(), base.log.as_ref().unwrap());
    let routing_eq = tr.complete_at == base.complete_at
        && a.len() <= b.len()
        && a.iter().zip(b).all(|(x, y)| x.deliveries == y.deliveries);
    let t = make_star(12).unwrap();
    let f = FaultModel::faultless();
    let base = run_schedule(&t, &mut noisy_radio::algos::RsBroadcast::star(), 5, &f, 3, 1 << 20).unwrap();
    let mut s = FaultCodingTransform::new(Shape::Star, 1, 0.0, &f).unwrap();
    let tr = run_schedule(&t, &mut s, 5, &f, 3, 1 << 20).unwrap();
    let coding_eq = tr.complete_at == base.complete_at && tr.completion == base.completion;
    pass &= routing_eq && coding_eq;
    parts.push(format!("p=0 trace equality: routing {routing_eq}, coding {coding_eq}"));
    verdict(pass, parts.join("; "))
}

// 11. WCT proxy

fn wct_proxy() -> Verdict {
    let mut cs = Vec::new();
    for m in [10usize, 12, 14] {
        let TopologySpec::Wct { cluster_count, cluster_size, sender_count, link_prob, seed, scales } =
            TopologySpec::wct_for(1 << m, 1)
        else {
            unreachable!()
        };
        let w = make_wct(cluster_count, cluster_size, sender_count, link_prob, seed, scales).unwrap();
        cs.push(mean_collision_free_fraction(&w, 1000, 3) * m as f64);
    }
    let c = mean_of(&cs);
    let stable = cs.iter().all(|&x| (x - c).abs() <= 0.3 * c);

    let f = FaultModel::receiver(0.5);
    let k = 32;
    let mut gaps = Vec::new();
    for (m, trials) in [(10usize, 3u64), (12, 2)] {
        let t = generate(&TopologySpec::wct_for(1 << m, 1)).unwrap().topology;
        let mean_rounds = |name: &str| {
            let r = completions(&t, name, &Value::Null, k, &f, trials, 1 << 24);
            mean_of(&censored(&r, 1 << 24).iter().map(|&x| x as f64).collect::<Vec<_>>())
        };
        let (routing, coding) = (mean_rounds("pipeline"), mean_rounds("rlnc-decay"));
        gaps.push((m, routing, coding, routing / coding));
    }
    let growth = gaps[1].3 / gaps[0].3;
    let shown: Vec<String> = gaps.iter().map(|(m, r, c, g)| format!("2^{m}: {r:.0}/{c:.0} = {g:.2}")).collect();
    verdict(
        stable && growth >= 1.5,
        format!(
            "C = {} (mean {c:.3}); routing/coding rounds {}; growth {growth:.2}",
            cs.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", "),
            shown.join(", ")
        ),
    )
}

// 12. Reproducibility

fn reproducibility() -> Verdict {
    let cases = [
        (TopologySpec::Path { d: 20 }, "decay", FaultModel::receiver(0.5), 1),
        (TopologySpec::Star { n: 16 }, "rs-star", FaultModel::sender(0.5), 8),
        (TopologySpec::Layered { d: 3, width: 4 }, "pipeline", FaultModel::receiver(0.5), 4),
        (TopologySpec::RandomConnected { n: 40, edge_prob: 0.15, seed: 3 }, "rlnc-decay", FaultModel::sender(0.5), 4),
        (TopologySpec::BinaryTree { depth: 5 }, "robust-fastbc", FaultModel::sender(0.5), 1),
    ];
    let mut bad = Vec::new();
    for (topology, policy, fault, k) in cases {
        let mut cfg = ExperimentConfig::new(topology, policy, fault, k);
        cfg.trials = 20;
        cfg.seed = 77;
        let first = run_experiment(&cfg).unwrap();
        let again = rerun(&first.to_json()).unwrap();
        let rounds = |r: &noisy_radio::harness::ExperimentResult| r.trials.iter().map(|t| (t.seed, t.rounds, t.completed)).collect::<Vec<_>>();
        if rounds(&first) != rounds(&again) {
            bad.push(policy);
        }
    }
    verdict(bad.is_empty(), format!("5 configs re-run from JSON, mismatched: {bad:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("channel semantics oracle", channel_oracle),
        ("GBST suite", gbst_suite),
        ("Decay robustness", decay_robustness),
        ("FASTBC deterioration", fastbc_deterioration),
        ("Robust FASTBC linearity", robust_linearity),
        ("RS/RLNC properties", coding_properties),
        ("star gap", star_gap),
        ("single-link suite", single_link),
        ("pipelining", pipelining),
        ("transformations", transforms),
        ("WCT proxy", wct_proxy),
        ("reproducibility", reproducibility),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {id:>2} {name}: {} [{:.1}s]", v.detail, t0.elapsed().as_secs_f64());
        failed += !v.pass as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
