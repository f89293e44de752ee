//! Piecewise-linear stochastic hybrid system over a finite-state Markov chain.
//!
//! The continuous state is the age vector `x = [x_0, x_1, .., x_n]` where
//! coordinate 0 is the monitor. In discrete state `s` every coordinate with
//! `growth[k] = true` grows at unit rate. A transition replaces the age
//! vector by `x' = x A`, where each column of `A` selects at most one source
//! coordinate.

use std::fmt;

use crate::error::{Result, ShsError};

/// Index of a discrete state (0-based; `s_1` in the tables is `StateId(0)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0 + 1)
    }
}

/// Which physical event drives a transition. Carried alongside the numeric
/// rate so that balance equations can be regenerated symbolically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RateSymbol {
    /// Own arrival routed to the local processor, `lambda * p`.
    LocalArrival,
    /// Own arrival routed to the transmitter, `lambda * (1 - p)`.
    OffloadArrival,
    /// Exogenous traffic from other equitable-access users.
    Exogenous,
    /// Primary-user offload stream seen by a secondary user.
    PrimaryOffload,
    /// Transmitter service completion.
    Transmit,
    /// Local processor service completion.
    LocalService,
    /// Edge server service completion.
    EdgeService,
}

impl fmt::Display for RateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RateSymbol::LocalArrival => "lambda*p",
            RateSymbol::OffloadArrival => "lambda*(1-p)",
            RateSymbol::Exogenous => "lambda_e",
            RateSymbol::PrimaryOffload => "lambda_P*(1-p_P)",
            RateSymbol::Transmit => "mu1",
            RateSymbol::LocalService => "mu2",
            RateSymbol::EdgeService => "mu3",
        };
        f.write_str(s)
    }
}

/// Age reset map: `x'_k = x[sources[k]]`, or `0` when `sources[k]` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResetMap {
    sources: Vec<Option<usize>>,
}

impl ResetMap {
    pub fn new(sources: Vec<Option<usize>>) -> Self {
        Self { sources }
    }

    pub fn sources(&self) -> &[Option<usize>] {
        &self.sources
    }

    pub fn dim(&self) -> usize {
        self.sources.len()
    }

    /// Binary matrix with `A[j][k] = 1` iff `x'_k = x_j`.
    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.sources.len();
        let mut m = vec![vec![0u8; n]; n];
        for (k, src) in self.sources.iter().enumerate() {
            if let Some(j) = src {
                m[*j][k] = 1;
            }
        }
        m
    }

    /// Inverse of [`ResetMap::to_matrix`]; rejects matrices that are not
    /// square, have entries outside {0,1}, or have a column sum above one.
    pub fn from_matrix(matrix: &[Vec<u8>]) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(ShsError::MalformedModel(
                "reset matrix is not square".into(),
            ));
        }
        let mut sources = vec![None; n];
        for (k, slot) in sources.iter_mut().enumerate() {
            for (j, row) in matrix.iter().enumerate() {
                match row[k] {
                    0 => {}
                    1 if slot.is_none() => *slot = Some(j),
                    1 => {
                        return Err(ShsError::MalformedModel(format!(
                            "reset matrix column {k} selects more than one source"
                        )))
                    }
                    v => {
                        return Err(ShsError::MalformedModel(format!(
                            "reset matrix entry {v} is not binary"
                        )))
                    }
                }
            }
        }
        Ok(Self { sources })
    }

    /// Applies the map to an age vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.sources
            .iter()
            .map(|s| s.map_or(0.0, |j| x[j]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateInfo {
    pub label: String,
    pub growth: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub from: StateId,
    pub to: StateId,
    pub symbol: RateSymbol,
    pub rate: f64,
    pub reset: ResetMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShsModel {
    n_servers: usize,
    states: Vec<StateInfo>,
    transitions: Vec<Transition>,
}

impl ShsModel {
    /// Validates and assembles a model.
    pub fn new(
        n_servers: usize,
        states: Vec<StateInfo>,
        transitions: Vec<Transition>,
    ) -> Result<Self> {
        let dim = n_servers + 1;
        if states.is_empty() {
            return Err(ShsError::MalformedModel("model has no states".into()));
        }
        for (i, s) in states.iter().enumerate() {
            if s.growth.len() != dim {
                return Err(ShsError::MalformedModel(format!(
                    "state s{} growth vector has length {}, expected {dim}",
                    i + 1,
                    s.growth.len()
                )));
            }
            if !s.growth[0] {
                return Err(ShsError::MalformedModel(format!(
                    "monitor age must grow in every state (s{})",
                    i + 1
                )));
            }
        }
        let mut has_outgoing = vec![false; states.len()];
        for t in &transitions {
            if t.from.0 >= states.len() || t.to.0 >= states.len() {
                return Err(ShsError::MalformedModel(format!(
                    "transition {} -> {} references an unknown state",
                    t.from, t.to
                )));
            }
            if !(t.rate.is_finite() && t.rate >= 0.0) {
                return Err(ShsError::MalformedModel(format!(
                    "transition {} -> {} ({}) has invalid rate {}",
                    t.from, t.to, t.symbol, t.rate
                )));
            }
            if t.reset.dim() != dim || t.reset.sources().iter().flatten().any(|&j| j >= dim) {
                return Err(ShsError::MalformedModel(format!(
                    "transition {} -> {} has a reset map of the wrong size",
                    t.from, t.to
                )));
            }
            has_outgoing[t.from.0] = true;
        }
        if let Some(i) = has_outgoing.iter().position(|h| !h) {
            return Err(ShsError::MalformedModel(format!(
                "state s{} has no outgoing transition",
                i + 1
            )));
        }
        Ok(Self {
            n_servers,
            states,
            transitions,
        })
    }

    pub fn n_servers(&self) -> usize {
        self.n_servers
    }

    /// Length of the age vector, monitor included.
    pub fn age_dim(&self) -> usize {
        self.n_servers + 1
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[StateInfo] {
        &self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Total outgoing rate of each state, self-loops included.
    pub fn exit_rates(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.states.len()];
        for t in &self.transitions {
            out[t.from.0] += t.rate;
        }
        out
    }

    /// Same model with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut m = self.clone();
        for t in &mut m.transitions {
            t.rate *= factor;
        }
        m
    }
}

/// Transition-table row builder used by the topology modules.
pub(crate) struct TableBuilder {
    n_servers: usize,
    states: Vec<StateInfo>,
    transitions: Vec<Transition>,
}

impl TableBuilder {
    pub(crate) fn new(n_servers: usize) -> Self {
        Self {
            n_servers,
            states: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub(crate) fn state(&mut self, label: &str, growth: &[u8]) {
        self.states.push(StateInfo {
            label: label.to_owned(),
            growth: growth.iter().map(|&g| g == 1).collect(),
        });
    }

    /// One table row; `from`/`to` use the 1-based numbering of the tables.
    pub(crate) fn row(
        &mut self,
        from: usize,
        symbol: RateSymbol,
        rate: f64,
        to: usize,
        reset: [Option<usize>; 4],
    ) {
        self.transitions.push(Transition {
            from: StateId(from - 1),
            to: StateId(to - 1),
            symbol,
            rate,
            reset: ResetMap::new(reset.to_vec()),
        });
    }

    pub(crate) fn build(self) -> Result<ShsModel> {
        ShsModel::new(self.n_servers, self.states, self.transitions)
    }
}
