//! Undirected communication graphs and switching schedules.
//!
//! Vertices are 0-based in code; config files and the CLI use 1-based labels.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is disconnected (second eigenvalue {0:e})")]
    Disconnected(f64),
    #[error("switching schedule: {0}")]
    Schedule(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Topology {
    /// Builds a graph from 0-based edges. Each edge is stored as (min, max).
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, NetworkError> {
        let mut seen = BTreeSet::new();
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(NetworkError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(NetworkError::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(NetworkError::DuplicateEdge(e.0, e.1));
            }
            norm.push(e);
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &norm {
            adj[a].push(b);
            adj[b].push(a);
        }
        for nb in adj.iter_mut() {
            nb.sort_unstable();
        }
        Ok(Topology {
            n,
            edges: norm,
            adj,
        })
    }

    /// Builds a graph from 1-based edge labels.
    pub fn from_one_based(n: usize, edges: &[[usize; 2]]) -> Result<Self, NetworkError> {
        let mut zero = Vec::with_capacity(edges.len());
        for e in edges {
            if e[0] == 0 || e[1] == 0 {
                return Err(NetworkError::VertexOutOfRange { vertex: 0, n });
            }
            zero.push((e[0] - 1, e[1] - 1));
        }
        Topology::new(n, &zero)
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Topology::new(n, &edges).expect("cycle is a valid graph")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Topology::new(n, &edges).expect("complete graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighborhood(&self, i: usize) -> Result<&[usize], NetworkError> {
        self.adj
            .get(i)
            .map(|v| v.as_slice())
            .ok_or(NetworkError::VertexOutOfRange {
                vertex: i,
                n: self.n,
            })
    }

    /// Neighbors without bounds checking beyond the slice index.
    pub(crate) fn nbrs(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for &(a, b) in &self.edges {
            l[(a, a)] += 1.0;
            l[(b, b)] += 1.0;
            l[(a, b)] = -1.0;
            l[(b, a)] = -1.0;
        }
        l
    }

    /// Oriented incidence matrix, +1 at the smaller vertex of each edge.
    pub fn incidence(&self) -> DMatrix<f64> {
        let mut f = DMatrix::zeros(self.n, self.edges.len());
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            f[(a, k)] = 1.0;
            f[(b, k)] = -1.0;
        }
        f
    }

    pub fn laplacian_spectrum(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.laplacian())
    }

    pub fn algebraic_connectivity(&self) -> Result<f64, NetworkError> {
        let ev = self.laplacian_spectrum();
        let l2 = ev.get(1).copied().unwrap_or(0.0);
        if l2 < 1e-9 {
            return Err(NetworkError::Disconnected(l2));
        }
        Ok(l2)
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Piecewise-constant topology selector, right-continuous at switch instants.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSchedule {
    graphs: Vec<Topology>,
    /// (start time, graph index); first entry starts at 0.
    signal: Vec<(f64, usize)>,
    min_dwell: f64,
}

impl SwitchingSchedule {
    pub fn explicit(
        graphs: Vec<Topology>,
        signal: Vec<(f64, usize)>,
        min_dwell: f64,
    ) -> Result<Self, NetworkError> {
        let s = SwitchingSchedule {
            graphs,
            signal,
            min_dwell,
        };
        s.check()?;
        Ok(s)
    }

    /// Random signal: each dwell is `min_dwell` plus an exponential extra with
    /// mean `mean_extra`; consecutive graphs always differ.
    pub fn random(
        graphs: Vec<Topology>,
        seed: u64,
        min_dwell: f64,
        mean_extra: f64,
        horizon: f64,
    ) -> Result<Self, NetworkError> {
        if graphs.is_empty() {
            return Err(NetworkError::Schedule("no graphs".into()));
        }
        if !(min_dwell > 0.0) || !(mean_extra > 0.0) {
            return Err(NetworkError::Schedule(
                "dwell parameters must be positive".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra = Exp::new(1.0 / mean_extra).expect("positive rate");
        let k = graphs.len();
        let mut idx = rng.random_range(0..k);
        let mut t = 0.0;
        let mut signal = vec![(0.0, idx)];
        while t < horizon {
            t += min_dwell + extra.sample(&mut rng);
            if k > 1 {
                let mut next = rng.random_range(0..k - 1);
                if next >= idx {
                    next += 1;
                }
                idx = next;
            }
            signal.push((t, idx));
        }
        Self::explicit(graphs, signal, min_dwell)
    }

    pub fn constant(g: Topology) -> Self {
        SwitchingSchedule {
            graphs: vec![g],
            signal: vec![(0.0, 0)],
            min_dwell: f64::INFINITY,
        }
    }

    fn check(&self) -> Result<(), NetworkError> {
        let Some(first) = self.graphs.first() else {
            return Err(NetworkError::Schedule("no graphs".into()));
        };
        if self.graphs.iter().any(|g| g.n() != first.n()) {
            return Err(NetworkError::Schedule(
                "graphs differ in vertex count".into(),
            ));
        }
        for g in &self.graphs {
            g.algebraic_connectivity()?;
        }
        if self.signal.first().map(|s| s.0) != Some(0.0) {
            return Err(NetworkError::Schedule("signal must start at t = 0".into()));
        }
        if !(self.min_dwell > 0.0) {
            return Err(NetworkError::Schedule("min_dwell must be positive".into()));
        }
        for w in self.signal.windows(2) {
            if w[1].0 - w[0].0 < self.min_dwell {
                return Err(NetworkError::Schedule(format!(
                    "dwell {:.4} s at t = {} shorter than min_dwell {} s",
                    w[1].0 - w[0].0,
                    w[0].0,
                    self.min_dwell
                )));
            }
        }
        if let Some(&(_, i)) = self.signal.iter().find(|s| s.1 >= self.graphs.len()) {
            return Err(NetworkError::Schedule(format!(
                "graph index {i} out of range"
            )));
        }
        Ok(())
    }

    pub fn graphs(&self) -> &[Topology] {
        &self.graphs
    }

    pub fn signal(&self) -> &[(f64, usize)] {
        &self.signal
    }

    pub fn min_dwell(&self) -> f64 {
        self.min_dwell
    }

    pub fn active_index(&self, t: f64) -> usize {
        let k = self.signal.partition_point(|s| s.0 <= t);
        self.signal[k.saturating_sub(1)].1
    }

    pub fn active_graph(&self, t: f64) -> &Topology {
        &self.graphs[self.active_index(t)]
    }

    pub fn summary(&self) -> Result<SpectralSummary, NetworkError> {
        let l2s = self
            .graphs
            .iter()
            .map(Topology::algebraic_connectivity)
            .collect::<Result<Vec<_>, _>>()?;
        let first = self.active_graph(0.0).algebraic_connectivity()?;
        Ok(SpectralSummary {
            lambda2: first,
            min_lambda2_family: l2s.iter().copied().fold(f64::INFINITY, f64::min),
            min_edges_family: self
                .graphs
                .iter()
                .map(Topology::edge_count)
                .min()
                .unwrap_or(0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpectralSummary {
    pub lambda2: f64,
    pub min_lambda2_family: f64,
    pub min_edges_family: usize,
}

/// Either a single graph or a switching family.
#[derive(Debug, Clone, PartialEq)]
pub enum Network {
    Fixed(Topology),
    Switching(SwitchingSchedule),
}

impl Network {
    pub fn n(&self) -> usize {
        match self {
            Network::Fixed(g) => g.n(),
            Network::Switching(s) => s.graphs()[0].n(),
        }
    }

    pub fn active(&self, t: f64) -> (&Topology, usize) {
        match self {
            Network::Fixed(g) => (g, 0),
            Network::Switching(s) => {
                let i = s.active_index(t);
                (&s.graphs()[i], i)
            }
        }
    }

    pub fn summary(&self) -> Result<SpectralSummary, NetworkError> {
        match self {
            Network::Fixed(g) => {
                let l2 = g.algebraic_connectivity()?;
                Ok(SpectralSummary {
                    lambda2: l2,
                    min_lambda2_family: l2,
                    min_edges_family: g.edge_count(),
                })
            }
            Network::Switching(s) => s.summary(),
        }
    }
}

/// The three graphs used for the switching scenarios (1-based edge lists).
pub fn switching_family() -> Vec<Topology> {
    let a = Topology::from_one_based(5, &[[1, 3], [1, 4], [2, 5], [3, 4], [3, 5]]);
    let b = Topology::from_one_based(5, &[[1, 2], [1, 3], [1, 5], [2, 4], [2, 5], [3, 5]]);
    vec![a.unwrap(), b.unwrap(), Topology::cycle(5)]
}
