use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Result, SimError};
use crate::spec::{NetworkSpec, Topology, BATCHES, WARMUP_FRACTION};
use crate::stats::{BatchClock, Interval};

const SYNTHETIC: u32 = u32::MAX;
const ES_KEY: u64 = 0xFFFF_FFFF;
const SYNTH_KEY: u64 = 0xFFFF_0000;

/// Independent ChaCha stream for one source or server. Streams are keyed by
/// role and device index, so adding devices never shifts existing streams.
fn substream(seed: u64, role: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((role << 32) | key);
    rng
}

fn exp_sample(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e / rate
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    owner: u32,
    generated: f64,
    primary: bool,
}

#[derive(Debug, Clone, Copy)]
enum Next {
    Deliver,
    Forward(usize),
}

#[derive(Debug, Clone, Copy)]
enum Route {
    Split {
        p: f64,
        local: usize,
        offload: usize,
    },
    To(usize),
}

struct Server {
    name: String,
    rate: f64,
    next: Next,
    content: Option<Packet>,
    epoch: u64,
    since: f64,
    busy: Vec<f64>,
    busy_primary: Vec<f64>,
    rng: ChaCha8Rng,
}

struct Source {
    rate: f64,
    route: Route,
    owner: u32,
    primary: bool,
    rng: ChaCha8Rng,
}

struct Monitor {
    name: String,
    freshest: f64,
    since: f64,
    area: Vec<f64>,
    deliveries: u64,
    stale: u64,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Arrival(usize),
    Completion(usize, u64),
}

impl Kind {
    fn rank(&self) -> u8 {
        match self {
            Kind::Arrival(_) => 0,
            Kind::Completion(..) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: Kind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.kind.rank().cmp(&self.kind.rank()))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Time-average age at one monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorEstimate {
    pub name: String,
    pub aoi: Interval,
    /// Deliveries after warm-up, stale ones included.
    pub deliveries: u64,
    /// Deliveries older than the monitor's content, ignored.
    pub stale: u64,
}

/// Busy fraction of one server, total and with a primary packet in service.
#[derive(Debug, Clone, PartialEq)]
pub struct ServerEstimate {
    pub name: String,
    pub busy: Interval,
    pub busy_primary: Interval,
    pub busy_secondary: Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub topology: &'static str,
    pub seed: u64,
    pub horizon: f64,
    pub monitors: Vec<MonitorEstimate>,
    pub servers: Vec<ServerEstimate>,
    pub events: u64,
}

impl SimEstimate {
    pub fn monitor(&self, name: &str) -> Option<&MonitorEstimate> {
        self.monitors.iter().find(|m| m.name == name)
    }

    pub fn server(&self, name: &str) -> Option<&ServerEstimate> {
        self.servers.iter().find(|s| s.name == name)
    }

    /// Mean of the per-monitor age estimates.
    pub fn mean_aoi(&self) -> f64 {
        self.monitors.iter().map(|m| m.aoi.mean).sum::<f64>() / self.monitors.len() as f64
    }

    pub fn total_deliveries(&self) -> u64 {
        self.monitors.iter().map(|m| m.deliveries).sum()
    }
}

struct Network {
    servers: Vec<Server>,
    sources: Vec<Source>,
    monitors: Vec<Monitor>,
}

impl Network {
    fn new() -> Self {
        Self {
            servers: Vec::new(),
            sources: Vec::new(),
            monitors: Vec::new(),
        }
    }

    fn server(&mut self, seed: u64, key: u64, name: String, rate: f64, next: Next) -> usize {
        self.servers.push(Server {
            name,
            rate,
            next,
            content: None,
            epoch: 0,
            since: 0.0,
            busy: vec![0.0; BATCHES],
            busy_primary: vec![0.0; BATCHES],
            rng: substream(seed, 2, key),
        });
        self.servers.len() - 1
    }

    fn source(&mut self, seed: u64, key: u64, rate: f64, route: Route, owner: u32, primary: bool) {
        self.sources.push(Source {
            rate,
            route,
            owner,
            primary,
            rng: substream(seed, 1, key),
        });
    }

    fn monitor(&mut self, name: String) -> u32 {
        self.monitors.push(Monitor {
            name,
            freshest: 0.0,
            since: 0.0,
            area: vec![0.0; BATCHES],
            deliveries: 0,
            stale: 0,
        });
        (self.monitors.len() - 1) as u32
    }

    /// Device with transmitter `T[i]` feeding `es` and local processor `L[i]`.
    /// Returns the transmitter index.
    #[allow(clippy::too_many_arguments)]
    fn device(
        &mut self,
        seed: u64,
        key: u64,
        tag: &str,
        lambda: f64,
        p: f64,
        mu1: f64,
        mu2: f64,
        es: usize,
        primary: bool,
    ) -> usize {
        let owner = self.monitor(format!("D[{tag}]"));
        let t = self.server(seed, 2 * key, format!("T[{tag}]"), mu1, Next::Forward(es));
        let l = self.server(seed, 2 * key + 1, format!("L[{tag}]"), mu2, Next::Deliver);
        self.source(
            seed,
            key,
            lambda,
            Route::Split {
                p,
                local: l,
                offload: t,
            },
            owner,
            primary,
        );
        t
    }

    fn build(spec: &NetworkSpec) -> Self {
        let seed = spec.seed;
        let mut net = Network::new();
        match &spec.topology {
            Topology::EquitableFull { devices, mu3 } => {
                let es = net.server(seed, ES_KEY, "ES".into(), *mu3, Next::Deliver);
                for (i, d) in devices.iter().enumerate() {
                    net.device(
                        seed,
                        i as u64,
                        &i.to_string(),
                        d.lambda,
                        d.p,
                        d.mu1,
                        d.mu2,
                        es,
                        false,
                    );
                }
            }
            Topology::EquitableFaithful {
                device: d,
                mu3,
                lambda_e,
            } => {
                let es = net.server(seed, ES_KEY, "ES".into(), *mu3, Next::Deliver);
                net.device(seed, 0, "0", d.lambda, d.p, d.mu1, d.mu2, es, false);
                net.source(seed, SYNTH_KEY, *lambda_e, Route::To(es), SYNTHETIC, false);
            }
            Topology::PriorityFull {
                primary: pd,
                secondaries,
                mu3,
            } => {
                let es = net.server(seed, ES_KEY, "ES".into(), *mu3, Next::Deliver);
                let tp = net.device(seed, 0, "P", pd.lambda, pd.p, pd.mu1, pd.mu2, es, true);
                for (i, s) in secondaries.iter().enumerate() {
                    let key = i as u64 + 1;
                    let owner = net.monitor(format!("D[{i}]"));
                    let l = net.server(seed, 2 * key + 1, format!("L[{i}]"), s.mu2, Next::Deliver);
                    net.source(
                        seed,
                        key,
                        s.lambda,
                        Route::Split {
                            p: s.p,
                            local: l,
                            offload: tp,
                        },
                        owner,
                        false,
                    );
                }
            }
            Topology::PriorityFaithfulPrimary {
                primary: pd,
                mu3,
                lambda_s,
            } => {
                let es = net.server(seed, ES_KEY, "ES".into(), *mu3, Next::Deliver);
                let tp = net.device(seed, 0, "P", pd.lambda, pd.p, pd.mu1, pd.mu2, es, true);
                net.source(seed, SYNTH_KEY, *lambda_s, Route::To(tp), SYNTHETIC, false);
            }
            Topology::PriorityFaithfulSecondary {
                device: s,
                mu1,
                mu3,
                lambda_e,
                lambda_p_bar,
            } => {
                let es = net.server(seed, ES_KEY, "ES".into(), *mu3, Next::Deliver);
                let tp = net.server(seed, 0, "T[P]".into(), *mu1, Next::Forward(es));
                let owner = net.monitor("D[0]".into());
                let l = net.server(seed, 3, "L[0]".into(), s.mu2, Next::Deliver);
                net.source(
                    seed,
                    1,
                    s.lambda,
                    Route::Split {
                        p: s.p,
                        local: l,
                        offload: tp,
                    },
                    owner,
                    false,
                );
                net.source(seed, SYNTH_KEY, *lambda_e, Route::To(tp), SYNTHETIC, false);
                net.source(
                    seed,
                    SYNTH_KEY + 1,
                    *lambda_p_bar,
                    Route::To(tp),
                    SYNTHETIC,
                    true,
                );
            }
        }
        net
    }
}

/// One delivery at a monitor: age just before and just after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgeJump {
    pub time: f64,
    pub before: f64,
    pub after: f64,
}

struct Trace {
    monitor: usize,
    cap: usize,
    jumps: Vec<AgeJump>,
}

struct Engine {
    trace: Option<Trace>,
    net: Network,
    heap: BinaryHeap<Event>,
    seq: u64,
    clock: BatchClock,
    events: u64,
}

impl Engine {
    fn push(&mut self, time: f64, kind: Kind) {
        self.seq += 1;
        self.heap.push(Event {
            time,
            seq: self.seq,
            kind,
        });
    }

    fn account_server(&mut self, k: usize, now: f64) {
        let clock = self.clock;
        let s = &mut self.net.servers[k];
        if let Some(pk) = s.content {
            let (busy, busy_primary) = (&mut s.busy, &mut s.busy_primary);
            clock.split(s.since, now, |i, a, b| {
                busy[i] += b - a;
                if pk.primary {
                    busy_primary[i] += b - a;
                }
            });
        }
        s.since = now;
    }

    fn account_monitor(&mut self, m: usize, now: f64) {
        let clock = self.clock;
        let mon = &mut self.net.monitors[m];
        let g = mon.freshest;
        let area = &mut mon.area;
        clock.split(mon.since, now, |i, a, b| {
            area[i] += (b - a) * (0.5 * (a + b) - g);
        });
        mon.since = now;
    }

    fn offer(&mut self, k: usize, pk: Packet, now: f64) {
        let s = &self.net.servers[k];
        if let Some(cur) = s.content {
            if cur.primary && !pk.primary {
                return;
            }
        }
        self.account_server(k, now);
        let s = &mut self.net.servers[k];
        s.content = Some(pk);
        s.epoch += 1;
        let epoch = s.epoch;
        if s.rate > 0.0 {
            let dt = exp_sample(&mut s.rng, s.rate);
            self.push(now + dt, Kind::Completion(k, epoch));
        }
    }

    fn complete(&mut self, k: usize, epoch: u64, now: f64) {
        if self.net.servers[k].epoch != epoch || self.net.servers[k].content.is_none() {
            return;
        }
        self.account_server(k, now);
        let s = &mut self.net.servers[k];
        let pk = s.content.take().expect("checked above");
        match s.next {
            Next::Forward(j) => self.offer(j, pk, now),
            Next::Deliver => {
                if pk.owner == SYNTHETIC {
                    return;
                }
                let m = pk.owner as usize;
                self.account_monitor(m, now);
                let counted = now >= self.clock.start;
                let mon = &mut self.net.monitors[m];
                if let Some(tr) = self
                    .trace
                    .as_mut()
                    .filter(|tr| tr.monitor == m && tr.jumps.len() < tr.cap)
                {
                    tr.jumps.push(AgeJump {
                        time: now,
                        before: now - mon.freshest,
                        after: now - mon.freshest.max(pk.generated),
                    });
                }
                if counted {
                    mon.deliveries += 1;
                }
                if pk.generated > mon.freshest {
                    mon.freshest = pk.generated;
                } else if counted {
                    mon.stale += 1;
                }
            }
        }
    }

    fn arrive(&mut self, src: usize, now: f64) {
        let s = &mut self.net.sources[src];
        let dt = exp_sample(&mut s.rng, s.rate);
        let target = match s.route {
            Route::To(k) => k,
            Route::Split { p, local, offload } => {
                if s.rng.random::<f64>() < p {
                    local
                } else {
                    offload
                }
            }
        };
        let pk = Packet {
            owner: s.owner,
            generated: now,
            primary: s.primary,
        };
        self.push(now + dt, Kind::Arrival(src));
        self.offer(target, pk, now);
    }
}

/// Runs one simulation. Deterministic in `(spec, spec.seed)`.
pub fn simulate(spec: &NetworkSpec) -> Result<SimEstimate> {
    run(spec, None).map(|(est, _)| est)
}

/// Runs `spec` and records the first `cap` deliveries at monitor `monitor`.
pub fn sample_path(
    spec: &NetworkSpec,
    monitor: usize,
    cap: usize,
) -> Result<(SimEstimate, Vec<AgeJump>)> {
    run(
        spec,
        Some(Trace {
            monitor,
            cap,
            jumps: Vec::new(),
        }),
    )
}

fn run(spec: &NetworkSpec, trace: Option<Trace>) -> Result<(SimEstimate, Vec<AgeJump>)> {
    spec.validate()?;
    let horizon = spec.horizon;
    let clock = BatchClock::new(WARMUP_FRACTION * horizon, horizon, BATCHES);
    let mut eng = Engine {
        trace,
        net: Network::build(spec),
        heap: BinaryHeap::new(),
        seq: 0,
        clock,
        events: 0,
    };
    for i in 0..eng.net.sources.len() {
        let s = &mut eng.net.sources[i];
        if s.rate > 0.0 {
            let dt = exp_sample(&mut s.rng, s.rate);
            eng.push(dt, Kind::Arrival(i));
        }
    }
    while let Some(ev) = eng.heap.pop() {
        if ev.time > horizon {
            break;
        }
        eng.events += 1;
        match ev.kind {
            Kind::Arrival(src) => eng.arrive(src, ev.time),
            Kind::Completion(k, epoch) => eng.complete(k, epoch, ev.time),
        }
    }
    for k in 0..eng.net.servers.len() {
        eng.account_server(k, horizon);
    }
    for m in 0..eng.net.monitors.len() {
        eng.account_monitor(m, horizon);
    }

    let width = clock.width;
    let mut monitors = Vec::with_capacity(eng.net.monitors.len());
    for m in &eng.net.monitors {
        if m.deliveries == 0 {
            return Err(SimError::Degenerate {
                monitor: m.name.clone(),
                deliveries: 0,
            });
        }
        monitors.push(MonitorEstimate {
            name: m.name.clone(),
            aoi: Interval::from_batches(&m.area, width),
            deliveries: m.deliveries,
            stale: m.stale,
        });
    }
    let servers = eng
        .net
        .servers
        .iter()
        .map(|s| ServerEstimate {
            name: s.name.clone(),
            busy: Interval::from_batches(&s.busy, width),
            busy_primary: Interval::from_batches(&s.busy_primary, width),
            busy_secondary: Interval::from_batches(
                &s.busy
                    .iter()
                    .zip(&s.busy_primary)
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
                width,
            ),
        })
        .collect();
    let est = SimEstimate {
        topology: spec.topology.tag(),
        seed: spec.seed,
        horizon,
        monitors,
        servers,
        events: eng.events,
    };
    Ok((est, eng.trace.map(|t| t.jumps).unwrap_or_default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::EquitableDevice;

    fn local_only(lambda: f64, horizon: f64, seed: u64) -> NetworkSpec {
        NetworkSpec::new(
            Topology::EquitableFaithful {
                device: EquitableDevice {
                    lambda,
                    p: 1.0,
                    mu1: 1.0,
                    mu2: 1.0,
                },
                mu3: 15.0,
                lambda_e: 0.0,
            },
            horizon,
            seed,
        )
    }

    #[test]
    fn single_lcfs_preemptive_server() {
        let est = simulate(&local_only(2.0, 2e5, 11)).unwrap();
        let m = &est.monitors[0];
        assert!(m.aoi.contains_3sigma(1.5), "{:?}", m.aoi);
        assert_eq!(est.server("T[0]").unwrap().busy.mean, 0.0);
    }

    #[test]
    fn same_seed_same_estimate() {
        let a = simulate(&local_only(2.0, 1e4, 5)).unwrap();
        let b = simulate(&local_only(2.0, 1e4, 5)).unwrap();
        assert_eq!(a, b);
        let c = simulate(&local_only(2.0, 1e4, 6)).unwrap();
        assert_ne!(a.monitors[0].aoi.mean, c.monitors[0].aoi.mean);
    }

    #[test]
    fn silent_device_is_degenerate() {
        let err = simulate(&local_only(0.0, 100.0, 1)).unwrap_err();
        assert!(matches!(err, SimError::Degenerate { ref monitor, .. } if monitor == "D[0]"));
    }

    #[test]
    fn bad_horizon_is_rejected() {
        assert!(matches!(
            simulate(&local_only(1.0, 0.0, 1)),
            Err(SimError::InvalidParameter { ref field, .. }) if field == "horizon"
        ));
    }

    #[test]
    fn events_are_ordered_by_time_then_kind_then_sequence() {
        let mut heap = BinaryHeap::new();
        heap.push(Event {
            time: 1.0,
            seq: 1,
            kind: Kind::Completion(0, 0),
        });
        heap.push(Event {
            time: 1.0,
            seq: 2,
            kind: Kind::Arrival(0),
        });
        heap.push(Event {
            time: 0.5,
            seq: 3,
            kind: Kind::Completion(0, 0),
        });
        heap.push(Event {
            time: 1.0,
            seq: 0,
            kind: Kind::Arrival(1),
        });
        let order: Vec<u64> = std::iter::from_fn(|| heap.pop().map(|e| e.seq)).collect();
        assert_eq!(order, vec![3, 0, 2, 1]);
    }
}
