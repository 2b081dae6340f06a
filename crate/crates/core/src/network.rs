//! Coupling graph and oscillator parameters.
//!
//! The graph is simple and undirected; adjacency is held densely as a
//! row-major `f64` matrix of zeros and ones so it can be used directly in
//! matrix-vector products.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: usize,
    adjacency: Vec<f64>,
    degrees: Vec<usize>,
}

impl Network {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adjacency: vec![0.0; n * n],
            degrees: vec![0; n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|k| (k + 1..n).map(move |j| (k, j)));
        Self::from_edges(n, edges).expect("complete graph is valid")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|k| (k - 1, k))).expect("path graph is valid")
    }

    /// Builds a graph from an edge list. Self-loops and out-of-range nodes are
    /// rejected; duplicate edges collapse into one.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNetwork("node count must be positive".into()));
        }
        let mut net = Self::empty(n);
        for (k, j) in edges {
            if k >= n || j >= n {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({k}, {j}) out of range for n = {n}"
                )));
            }
            if k == j {
                return Err(Error::InvalidNetwork(format!("self-loop at node {k}")));
            }
            net.adjacency[k * n + j] = 1.0;
            net.adjacency[j * n + k] = 1.0;
        }
        net.recount_degrees();
        Ok(net)
    }

    /// Builds a graph from a full 0/1 matrix, checking symmetry and the diagonal.
    pub fn from_adjacency(n: usize, adjacency: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNetwork("node count must be positive".into()));
        }
        if adjacency.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                actual: adjacency.len(),
            });
        }
        for k in 0..n {
            if adjacency[k * n + k] != 0.0 {
                return Err(Error::InvalidNetwork(format!("self-loop at node {k}")));
            }
            for j in 0..n {
                let a = adjacency[k * n + j];
                if a != 0.0 && a != 1.0 {
                    return Err(Error::InvalidNetwork(format!(
                        "entry ({k}, {j}) = {a} is not 0 or 1"
                    )));
                }
                if a != adjacency[j * n + k] {
                    return Err(Error::InvalidNetwork(format!(
                        "asymmetric entry ({k}, {j})"
                    )));
                }
            }
        }
        let mut net = Self {
            n,
            adjacency,
            degrees: vec![0; n],
        };
        net.recount_degrees();
        Ok(net)
    }

    fn recount_degrees(&mut self) {
        let n = self.n;
        self.degrees = (0..n)
            .map(|k| self.adjacency[k * n..(k + 1) * n].iter().filter(|&&a| a != 0.0).count())
            .collect();
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major `n x n` adjacency.
    pub fn adjacency(&self) -> &[f64] {
        &self.adjacency
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.adjacency[k * self.n..(k + 1) * self.n]
    }

    pub fn has_edge(&self, k: usize, j: usize) -> bool {
        self.adjacency[k * self.n + j] != 0.0
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn edge_count(&self) -> usize {
        self.degrees.iter().sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |k| (k + 1..self.n).filter(move |&j| self.has_edge(k, j)).map(move |j| (k, j)))
    }

    pub fn neighbors(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(k).iter().enumerate().filter(|(_, &a)| a != 0.0).map(|(j, _)| j)
    }

    /// Number of connected components (breadth-first search).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                for j in self.neighbors(k) {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Graph Laplacian `D - A`, row-major.
    pub fn laplacian(&self) -> Vec<f64> {
        let n = self.n;
        let mut l: Vec<f64> = self.adjacency.iter().map(|a| -a).collect();
        for k in 0..n {
            l[k * n + k] = self.degrees[k] as f64;
        }
        l
    }

    /// Serializes in the edge-list text format read by [`load_adjacency`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (k, j) in self.edges() {
            let _ = writeln!(out, "{k} {j}");
        }
        out
    }
}

/// Erdős–Rényi G(n, p): each unordered pair `k < j`, visited in row-major
/// order, is an edge with probability `p`, drawn from a fresh stream seeded
/// with `seed`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Network> {
    if n == 0 {
        return Err(Error::Precondition("erdos_renyi requires n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Precondition(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for k in 0..n {
        for j in k + 1..n {
            if rng.next_f64() < p {
                edges.push((k, j));
            }
        }
    }
    Network::from_edges(n, edges)
}

/// Parses the edge-list format: `n <count>` header, then one `k j` pair per
/// line. Blank lines and lines starting with `#` are skipped.
pub fn parse_adjacency(text: &str) -> Result<Network> {
    let mut n = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected header `n <count>`, found `{line}`"),
                    });
                }
                let count: usize = fields[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad node count `{}`", fields[1]),
                })?;
                n = Some(count);
            }
            Some(_) => {
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected `k j`, found `{line}`"),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad node index `{s}`"),
                    })
                };
                edges.push((parse(fields[0])?, parse(fields[1])?));
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing `n <count>` header".into(),
    })?;
    Network::from_edges(n, edges)
}

pub fn load_adjacency(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_adjacency(&text)
}

/// Natural frequencies and coupling strength.
#[derive(Debug, Clone, PartialEq)]
pub struct OscParams {
    omega: Vec<f64>,
    sigma: f64,
}

impl OscParams {
    pub fn new(omega: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Precondition(format!("coupling strength must be positive, got {sigma}")));
        }
        if let Some(k) = omega.iter().position(|w| !w.is_finite()) {
            return Err(Error::Precondition(format!("omega[{k}] is not finite")));
        }
        Ok(Self { omega, sigma })
    }

    /// Like [`OscParams::new`] but admits `sigma = 0`, which the closed-form
    /// unit tests use to isolate the input term.
    pub fn uncoupled(omega: Vec<f64>) -> Self {
        Self { omega, sigma: 0.0 }
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn omega_inf_norm(&self) -> f64 {
        self.omega.iter().fold(0.0_f64, |m, w| m.max(w.abs()))
    }

    pub fn check_size(&self, net: &Network) -> Result<()> {
        if self.omega.len() != net.n() {
            return Err(Error::LengthMismatch {
                expected: net.n(),
                actual: self.omega.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FrequencyDist {
    Constant { value: f64 },
    Normal { mean: f64, std: f64 },
}

pub fn sample_frequencies(n: usize, dist: FrequencyDist, seed: u64) -> Result<Vec<f64>> {
    match dist {
        FrequencyDist::Constant { value } => Ok(vec![value; n]),
        FrequencyDist::Normal { mean, std } => {
            if !(std >= 0.0) {
                return Err(Error::Precondition(format!("standard deviation {std} < 0")));
            }
            let mut rng = SplitMix64::new(seed);
            Ok((0..n).map(|_| mean + std * rng.standard_normal()).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn check_invariants(net: &Network) {
        let n = net.n();
        for k in 0..n {
            assert!(!net.has_edge(k, k));
            for j in 0..n {
                assert_eq!(net.has_edge(k, j), net.has_edge(j, k));
            }
            assert_eq!(net.degrees()[k], net.neighbors(k).count());
        }
    }

    #[test]
    fn er_extremes() {
        let empty = erdos_renyi(3, 0.0, 42).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full = erdos_renyi(3, 1.0, 42).unwrap();
        assert_eq!(full.degrees(), &[2, 2, 2]);
        assert_eq!(full, Network::complete(3));
        let single = erdos_renyi(1, 0.7, 1).unwrap();
        assert_eq!(single.edge_count(), 0);
    }

    #[test]
    fn er_deterministic_and_valid() {
        let a = erdos_renyi(60, 0.3, 11).unwrap();
        let b = erdos_renyi(60, 0.3, 11).unwrap();
        assert_eq!(a, b);
        check_invariants(&a);
        let c = erdos_renyi(60, 0.3, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn er_rejects_bad_probability() {
        assert!(erdos_renyi(4, 1.5, 0).is_err());
        assert!(erdos_renyi(0, 0.5, 0).is_err());
    }

    #[test]
    fn parse_examples() {
        let net = parse_adjacency("n 2\n0 1\n").unwrap();
        assert_eq!(net.adjacency(), &[0.0, 1.0, 1.0, 0.0]);

        let err = parse_adjacency("n 2\n0 0\n").unwrap_err();
        assert!(matches!(err, Error::InvalidNetwork(_)));

        let empty = parse_adjacency("n 3\n").unwrap();
        assert_eq!(empty.n(), 3);
        assert_eq!(empty.edge_count(), 0);

        let commented = parse_adjacency("# triangle\nn 3\n0 1\n# mid\n1 2\n0 2\n").unwrap();
        assert_eq!(commented, Network::complete(3));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_adjacency("0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_adjacency("n 2\n0 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_adjacency("n 2\n0 5\n"), Err(Error::InvalidNetwork(_))));
        assert!(matches!(parse_adjacency(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn from_adjacency_validation() {
        assert!(Network::from_adjacency(2, vec![0.0, 1.0, 0.0, 0.0]).is_err());
        assert!(Network::from_adjacency(2, vec![1.0, 0.0, 0.0, 0.0]).is_err());
        let ok = Network::from_adjacency(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(ok.degrees(), &[1, 1]);
    }

    #[test]
    fn edge_list_roundtrip() {
        let net = erdos_renyi(15, 0.4, 3).unwrap();
        assert_eq!(parse_adjacency(&net.to_edge_list()).unwrap(), net);
    }

    #[test]
    fn connectivity() {
        assert!(Network::path(5).is_connected());
        let two = Network::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.component_count(), 2);
        assert!(!two.is_connected());
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let net = erdos_renyi(20, 0.3, 5).unwrap();
        let l = net.laplacian();
        for k in 0..20 {
            let s: f64 = l[k * 20..(k + 1) * 20].iter().sum();
            assert_eq!(s, 0.0);
        }
    }

    #[test]
    fn frequency_examples() {
        let c = sample_frequencies(3, FrequencyDist::Constant { value: 2.0 * PI }, 9).unwrap();
        assert_eq!(c, vec![2.0 * PI; 3]);
        let z = sample_frequencies(4, FrequencyDist::Normal { mean: 0.0, std: 0.0 }, 9).unwrap();
        assert_eq!(z, vec![0.0; 4]);
        assert!(sample_frequencies(4, FrequencyDist::Normal { mean: 0.0, std: -1.0 }, 9).is_err());
    }

    #[test]
    fn frequency_moments() {
        let n = 10_000;
        let w = sample_frequencies(n, FrequencyDist::Normal { mean: 2.0 * PI, std: 1.0 }, 77).unwrap();
        let mean = w.iter().sum::<f64>() / n as f64;
        let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // Three standard errors: 3/sqrt(n) = 0.03 for the mean, 3/sqrt(2n) ~ 0.021 for the std.
        assert!((mean - 2.0 * PI).abs() <= 0.05, "mean {mean}");
        assert!((var.sqrt() - 1.0).abs() <= 0.05, "std {}", var.sqrt());
    }

    #[test]
    fn params_validation() {
        assert!(OscParams::new(vec![1.0], 0.0).is_err());
        assert!(OscParams::new(vec![f64::NAN], 1.0).is_err());
        let p = OscParams::new(vec![1.0, -3.0], 0.5).unwrap();
        assert_eq!(p.omega_inf_norm(), 3.0);
    }
}
