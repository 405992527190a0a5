//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints one PASS/FAIL line; exits non-zero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oppnet::config::{parse_config, ScenarioConfig};
use oppnet::engine::{run_scenario, EngineConfig, RecordKind, Simulation};
use oppnet::matrix::{run_matrix, MatrixFilter};
use oppnet::metrics::{compute_metrics, emit_csv, AggregateRow, Metric};
use oppnet::routing::{build_router, ProtocolKind, ProtocolParams};
use oppnet::social::{ego_betweenness, kclique_communities, ProphetParams, ProphetState, SocialState, Tracks};
use oppnet::sources::{gen_community_schedule, gen_workload, select_pairs, CommunityParams, Contact, ContactSequence};
use oppnet::sources::{WorkloadEntry, WorkloadParams, WorkloadSequence};
use oppnet::types::{MessageId, NodeId, Roster, SimTime, SECONDS_PER_DAY};

use common::*;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

const DAY: SimTime = SECONDS_PER_DAY;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenarios() -> Vec<Scenario> {
    (1..=20).map(random_scenario).collect()
}

fn unlimited(s: &Scenario) -> EngineConfig {
    EngineConfig::unlimited(s.ttl, s.contacts.duration())
}

fn journey_oracle() -> Outcome {
    let started = Instant::now();
    let params = ProtocolParams::default();
    let mut total = 0;
    let mut reachable = 0;
    for (i, s) in scenarios().iter().enumerate() {
        let intervals = s.contacts.intervals();
        let expected: BTreeSet<MessageId> = s
            .workload
            .entries()
            .iter()
            .filter(|w| {
                journey_exists(&intervals, NODES as usize, w.src, w.dst, w.create_time, w.create_time + s.ttl)
            })
            .map(|w| w.id)
            .collect();
        let got = delivered_set(&run_logged(s, unlimited(s), ProtocolKind::Epidemic, &params));
        ensure(got == expected, || {
            format!(
                "scenario {}: epidemic delivered {:?}, oracle {:?}",
                i + 1,
                got.symmetric_difference(&expected).collect::<Vec<_>>(),
                expected.len()
            )
        })?;
        total += s.workload.len();
        reachable += expected.len();
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{reachable}/{total} messages reachable, sets equal, {elapsed:.2?}"))
}

fn epidemic_dominance() -> Outcome {
    let params = ProtocolParams::default();
    let mut checked = 0;
    for (i, s) in scenarios().iter().enumerate() {
        let epidemic = delivered_set(&run_logged(s, unlimited(s), ProtocolKind::Epidemic, &params));
        for kind in ProtocolKind::ALL {
            if kind == ProtocolKind::Epidemic {
                continue;
            }
            let other = delivered_set(&run_logged(s, unlimited(s), kind, &params));
            let extra: Vec<_> = other.difference(&epidemic).collect();
            ensure(extra.is_empty(), || format!("scenario {}: {kind} delivered {extra:?} beyond epidemic", i + 1))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} protocol runs are subsets of epidemic"))
}

/// Steps the run event by event and checks token sums and holder counts.
fn check_tokens(s: &Scenario, cfg: EngineConfig, kind: ProtocolKind, copies: u32) -> Result<usize, String> {
    let router = build_router(kind, &ProtocolParams::default(), s.contacts.roster());
    let mut sim = Simulation::new(cfg, &s.contacts, &s.workload, router)
        .unwrap()
        .with_record_log();
    let mut ever: BTreeMap<MessageId, BTreeSet<NodeId>> = BTreeMap::new();
    let mut seen_records = 0;
    let mut dropped: BTreeSet<MessageId> = BTreeSet::new();
    while let Some(t) = sim.step() {
        for r in &sim.records()[seen_records..] {
            if r.kind == RecordKind::Dropped {
                dropped.insert(r.message);
            }
        }
        seen_records = sim.records().len();
        let mut sums: BTreeMap<MessageId, u32> = BTreeMap::new();
        for node in sim.nodes() {
            for m in node.buffer.iter() {
                *sums.entry(m.id).or_default() += m.tokens;
                ever.entry(m.id).or_default().insert(node.id);
            }
        }
        for (id, sum) in sums {
            let exact = !dropped.contains(&id);
            ensure(sum <= copies && (!exact || sum == copies), || {
                format!("{kind} at t={t}: message {id} holds {sum} tokens")
            })?;
        }
    }
    for (id, holders) in &ever {
        ensure(holders.len() <= copies as usize, || {
            format!("{kind}: message {id} reached {} holders", holders.len())
        })?;
    }
    Ok(ever.values().map(BTreeSet::len).max().unwrap_or(0))
}

fn token_conservation() -> Outcome {
    let mut runs = 0;
    let mut widest = 0;
    for s in scenarios() {
        let open = unlimited(&s);
        let narrow = EngineConfig {
            bandwidth: Some(2_000),
            ..open
        };
        let tight = EngineConfig {
            buffer_capacity: Some(20_000),
            ..narrow
        };
        for cfg in [open, narrow, tight] {
            for kind in [ProtocolKind::SprayAndWait, ProtocolKind::SprayAndFocus, ProtocolKind::Ebr] {
                widest = widest.max(check_tokens(&s, cfg, kind, 10)?);
                runs += 1;
            }
        }
    }
    ensure(widest > 1, || "no message was ever replicated".into())?;
    Ok(format!("{runs} runs checked after every event, at most {widest} holders"))
}

fn cost_oracle() -> Outcome {
    let run = |intervals: Vec<Contact>| {
        let contacts = ContactSequence::from_intervals(intervals, Roster::unlabeled(3), 1_000).unwrap();
        let workload = WorkloadSequence::new(vec![WorkloadEntry {
            create_time: 10,
            id: MessageId(1),
            src: NodeId(0),
            dst: NodeId(2),
            size: 1_000,
        }])
        .unwrap();
        let cfg = EngineConfig {
            buffer_capacity: Some(2_000_000),
            bandwidth: Some(1_375_000),
            ..EngineConfig::unlimited(DAY, 1_000)
        };
        let report = run_scenario(cfg, &contacts, &workload, ProtocolKind::Epidemic, &ProtocolParams::default()).unwrap();
        compute_metrics(&report).cost
    };
    let c = |a: u32, b: u32, start: SimTime, end: SimTime| Contact {
        a: NodeId(a),
        b: NodeId(b),
        start,
        end,
    };
    let chain = run(vec![c(0, 1, 0, 100), c(1, 2, 200, 300)]);
    let direct = run(vec![c(0, 2, 0, 100)]);
    ensure(chain == Some(1.0), || format!("relay chain cost {chain:?}"))?;
    ensure(direct == Some(0.0), || format!("direct cost {direct:?}"))?;
    Ok("relay chain 1.0, direct 0.0".into())
}

fn analytics_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..200 {
        let n = rng.random_range(2..=12);
        let p = rng.random_range(0.3..0.9);
        let g = random_graph(&mut rng, n, p);
        let k = rng.random_range(3..=5);
        let got = kclique_communities(&g, k);
        let want = percolation_oracle(&g, k);
        ensure(got == want, || format!("graph {i} (n={n}, k={k}): {got:?} vs {want:?}"))?;
    }
    let mut worst_bet: f64 = 0.0;
    for i in 0..200 {
        let n = rng.random_range(2..=8);
        let p = rng.random_range(0.1..0.9);
        let inner = random_graph(&mut rng, n, p);
        let mut edges: Vec<(usize, usize)> = inner.edges().collect();
        edges.extend((1..n).map(|v| (0, v)));
        let g = oppnet::social::graph::UGraph::from_edges(n, edges);
        let err = (ego_betweenness(&g, 0) - betweenness_oracle(&g, 0)).abs();
        ensure(err <= 1e-9, || format!("ego graph {i}: error {err}"))?;
        worst_bet = worst_bet.max(err);
    }
    let mut worst_rank: f64 = 0.0;
    for i in 0..20 {
        let n = rng.random_range(2..=15);
        let p = rng.random_range(0.2..0.8);
        let g = random_graph(&mut rng, n, p);
        let params = ProtocolParams::default().social;
        let tracks = Tracks {
            peoplerank: true,
            ..Default::default()
        };
        let mut social = SocialState::new(&Roster::unlabeled(n as u32), params, tracks);
        let mut t = 0;
        let len = params.familiar_threshold + 300;
        for _ in 0..300 {
            for (u, v) in g.edges() {
                let (a, b) = (NodeId(u as u32), NodeId(v as u32));
                social.on_contact_up(a, b, t);
                social.on_contact_down(a, b, t, t + len);
                t += len + 1;
            }
        }
        let want = peoplerank_fixed_point(&g, params.damping);
        for (u, w) in want.iter().enumerate() {
            let got = social.node(NodeId(u as u32)).peoplerank.rank();
            let err = (got - w).abs();
            ensure(err <= 1e-6, || format!("rank graph {i} node {u}: {got} vs {w}"))?;
            worst_rank = worst_rank.max(err);
        }
    }
    Ok(format!(
        "200 k-clique graphs exact, ego betweenness max error {worst_bet:e}, PeopleRank max error {worst_rank:e}"
    ))
}

fn prophet_bounds() -> Outcome {
    let params = ProphetParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 12;
    let mut nodes = vec![ProphetState::default(); n];
    let mut now = 0;
    for op in 0..10_000 {
        now += rng.random_range(0..120);
        let a = rng.random_range(0..n);
        if rng.random_bool(0.5) {
            let b = (a + rng.random_range(1..n)) % n;
            nodes[a].age(now, &params);
            nodes[b].age(now, &params);
            nodes[a].meet(NodeId(b as u32), &params);
            nodes[b].meet(NodeId(a as u32), &params);
            let (ta, tb) = (nodes[a].table().clone(), nodes[b].table().clone());
            nodes[a].transit(NodeId(a as u32), NodeId(b as u32), &tb, &params);
            nodes[b].transit(NodeId(b as u32), NodeId(a as u32), &ta, &params);
        } else {
            nodes[a].age(now, &params);
        }
        for s in &nodes {
            for (&dst, &p) in s.table() {
                ensure((0.0..=1.0).contains(&p), || format!("operation {op}: P({dst}) = {p}"))?;
            }
        }
    }
    let mut s = ProphetState::default();
    s.meet(NodeId(1), &params);
    let p0 = s.predictability(NodeId(1));
    s.age(300, &params);
    let err = (s.predictability(NodeId(1)) - p0 * 0.98f64.powi(10)).abs();
    ensure(err <= 1e-12, || format!("aging error {err}"))?;
    Ok(format!("10000 operations in [0,1], aging error {err:e}"))
}

fn community_inputs(days: SimTime, seed: u64) -> (ContactSequence, WorkloadSequence) {
    let params = CommunityParams {
        duration: days * DAY,
        ..Default::default()
    };
    let contacts = gen_community_schedule(&params, seed).unwrap();
    let wp = WorkloadParams {
        msgs_per_day: 100,
        duration: days * DAY,
        ..Default::default()
    };
    let workload = gen_workload(&wp, &select_pairs(contacts.roster(), None, seed), seed).unwrap();
    (contacts, workload)
}

fn dlife_scaling() -> Outcome {
    let (contacts, workload) = community_inputs(5, 3);
    let cfg = EngineConfig {
        buffer_capacity: Some(2_000_000),
        bandwidth: Some(1_375_000),
        ..EngineConfig::unlimited(2 * DAY, contacts.duration())
    };
    let mut lines = Vec::new();
    for kind in [ProtocolKind::DLife, ProtocolKind::DLifeComm] {
        let log = |scale: f64| {
            let mut params = ProtocolParams::default();
            params.social.duration_scale = scale;
            let router = build_router(kind, &params, contacts.roster());
            Simulation::new(cfg, &contacts, &workload, router)
                .unwrap()
                .with_decision_log()
                .run()
                .decisions()
                .to_vec()
        };
        let (base, scaled) = (log(1.0), log(7.0));
        let forwards = base.iter().filter(|d| !d.decision.is_skip()).count();
        ensure(forwards > 0 && forwards < base.len(), || {
            format!("{kind}: degenerate log ({forwards} of {})", base.len())
        })?;
        let first_diff = base.iter().zip(&scaled).position(|(x, y)| x != y);
        ensure(base.len() == scaled.len() && first_diff.is_none(), || {
            format!(
                "{kind}: logs differ ({} vs {} entries, first difference at {first_diff:?})",
                base.len(),
                scaled.len()
            )
        })?;
        lines.push(format!("{kind} {} decisions identical", base.len()));
    }
    Ok(lines.join(", "))
}

const QUALITATIVE: &str = r#"
name = "community-desk"
protocols = ["epidemic", "prophet", "spray-and-wait", "bubble-rap", "dlife", "dlifecomm"]
warmup = "2d"

[contacts]
source = "community"
node_count = 30
group_count = 6
duration = "12d"

[workload]
source = "generate"
msgs_per_day = 100
"#;

fn mean(rows: &[AggregateRow], protocol: ProtocolKind, ttl: SimTime, metric: Metric) -> f64 {
    rows.iter()
        .find(|r| r.protocol == protocol.name() && r.ttl == ttl && r.metric == metric)
        .and_then(|r| r.mean)
        .unwrap_or(f64::NAN)
}

fn qualitative() -> Outcome {
    use ProtocolKind::*;
    let started = Instant::now();
    let cfg = parse_config(QUALITATIVE, Path::new(".")).map_err(|e| e.to_string())?;
    ensure(cfg.seeds.len() == 10 && cfg.buffer.0 == Some(2_000_000), || "unexpected defaults".into())?;
    let out = run_matrix(&cfg, &MatrixFilter::default(), None).map_err(|e| e.to_string())?;
    ensure(out.failures.is_empty(), || format!("failed cells: {:?}", out.failures))?;
    let rows = &out.rows;
    let mut problems = Vec::new();
    let mut table = Vec::new();
    for &ttl in &cfg.ttls {
        let cost = |p| mean(rows, p, ttl, Metric::Cost);
        let costs: Vec<(ProtocolKind, f64)> = cfg.protocols.iter().map(|&p| (p, cost(p))).collect();
        table.push(format!(
            "ttl {}d cost {}",
            ttl / DAY,
            costs.iter().map(|(p, c)| format!("{p}={c:.2}")).collect::<Vec<_>>().join(" ")
        ));
        if costs.iter().any(|&(p, c)| p != Epidemic && !(c < cost(Epidemic))) {
            problems.push(format!("ttl {}d: epidemic cost not highest", ttl / DAY));
        }
        if costs.iter().any(|&(p, c)| p != SprayAndWait && !(c > cost(SprayAndWait))) {
            problems.push(format!("ttl {}d: spray-and-wait cost not lowest", ttl / DAY));
        }
        if ttl >= 4 * DAY {
            for p in [BubbleRap, DLife, DLifeComm] {
                if !(cost(p) < cost(Prophet)) {
                    problems.push(format!("ttl {}d: {p} cost {:.2} not below prophet {:.2}", ttl / DAY, cost(p), cost(Prophet)));
                }
            }
        }
        let (le, lp) = (mean(rows, Epidemic, ttl, Metric::Latency), mean(rows, Prophet, ttl, Metric::Latency));
        if !(le < lp) {
            problems.push(format!("ttl {}d: epidemic latency {le:.0} not below prophet {lp:.0}", ttl / DAY));
        }
    }
    let elapsed = started.elapsed();
    if elapsed >= Duration::from_secs(300) {
        problems.push(format!("took {elapsed:?}"));
    }
    for line in &table {
        println!("    {line}");
    }
    if problems.is_empty() {
        Ok(format!("all orderings hold over {} cells, {elapsed:.1?}", out.reports.len()))
    } else {
        Err(problems.join("; "))
    }
}

fn determinism() -> Outcome {
    let text = r#"
protocols = ["epidemic", "prophet", "spray-and-focus", "ebr", "bubble-rap", "simbet", "dlifecomm"]
ttls = ["1d", "3d"]
seeds = [1, 2, 3]
warmup = "1d"
[contacts]
source = "community"
node_count = 20
group_count = 4
duration = "5d"
[workload]
source = "generate"
msgs_per_day = 60
"#;
    let cfg: ScenarioConfig = parse_config(text, Path::new(".")).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (i, jobs) in [1, 3, 8].into_iter().enumerate() {
        let out = run_matrix(&cfg, &MatrixFilter::default(), Some(jobs)).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("run{i}.csv"));
        emit_csv(&out.rows, &path).map_err(|e| e.to_string())?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), || "CSV bytes differ between reruns".into())?;
    Ok(format!("3 reruns byte-identical ({} bytes)", outputs[0].len()))
}

fn warmup_accounting() -> Outcome {
    let warmup = 2 * DAY;
    let (contacts, workload) = community_inputs(6, 5);
    let slice = workload.slice_from(warmup);
    let expected_created = workload.entries().iter().filter(|w| w.create_time >= warmup).count() as u64;
    let mut lines = Vec::new();
    for kind in [ProtocolKind::Epidemic, ProtocolKind::Prophet, ProtocolKind::SprayAndWait, ProtocolKind::DLife] {
        let base = EngineConfig::unlimited(DAY, contacts.duration());
        let params = ProtocolParams::default();
        let full = run_scenario(EngineConfig { warmup, ..base }, &contacts, &workload, kind, &params)
            .map_err(|e| e.to_string())?;
        let sliced = run_scenario(base, &contacts, &slice, kind, &params).map_err(|e| e.to_string())?;
        ensure(full.created == expected_created, || {
            format!("{kind}: created {} but {expected_created} messages follow the warmup", full.created)
        })?;
        let (mut a, mut b) = (full.latencies.clone(), sliced.latencies.clone());
        a.sort_unstable();
        b.sort_unstable();
        ensure(
            full.created == sliced.created && full.delivered == sliced.delivered && a == b,
            || {
                format!(
                    "{kind}: warmup run {}/{} vs slice run {}/{}",
                    full.delivered, full.created, sliced.delivered, sliced.created
                )
            },
        )?;
        lines.push(format!("{kind} {}/{}", full.delivered, full.created));
    }
    Ok(format!(
        "{} of {} messages after warmup; delivered/created match the slice: {}",
        expected_created,
        workload.len(),
        lines.join(", ")
    ))
}

fn main() {
    let checks: [Check; 10] = [
        ("journey oracle equivalence", journey_oracle),
        ("epidemic dominance", epidemic_dominance),
        ("spray token conservation", token_conservation),
        ("cost formula oracle", cost_oracle),
        ("analytics oracles", analytics_oracles),
        ("prophet bounds and aging", prophet_bounds),
        ("dlife duration scaling invariance", dlife_scaling),
        ("qualitative ordering", qualitative),
        ("determinism", determinism),
        ("warmup accounting", warmup_accounting),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
