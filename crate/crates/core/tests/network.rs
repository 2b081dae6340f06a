use ckuramoto::network::{self, FrequencyDist, Network};

/// P(lo <= X <= hi) for X ~ Binomial(n, p), summing the pmf in log space.
fn binomial_interval(n: u64, p: f64, lo: u64, hi: u64) -> f64 {
    let mut log_pmf = n as f64 * (1.0 - p).ln();
    let ratio = (p / (1.0 - p)).ln();
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            log_pmf += ((n - k + 1) as f64 / k as f64).ln() + ratio;
        }
        if (lo..=hi).contains(&k) {
            total += log_pmf.exp();
        }
    }
    total
}

#[test]
fn edge_count_window_has_essentially_full_mass() {
    let pairs = 100 * 99 / 2;
    let mass = binomial_interval(pairs, 0.2, 700, 1300);
    assert!(mass > 1.0 - 1e-12, "{mass}");
    let net = network::erdos_renyi(100, 0.2, 11).unwrap();
    assert!((700..=1300).contains(&net.edge_count()), "{}", net.edge_count());
}

#[test]
fn edge_counts_follow_the_binomial_law() {
    let (n, p) = (40usize, 0.3);
    let pairs = (n * (n - 1) / 2) as f64;
    let counts: Vec<f64> = (0..400).map(|s| network::erdos_renyi(n, p, s).unwrap().edge_count() as f64).collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    let (mu, sigma2) = (pairs * p, pairs * p * (1.0 - p));
    assert!((mean - mu).abs() < 5.0 * (sigma2 / 400.0).sqrt(), "mean {mean} vs {mu}");
    assert!((var / sigma2 - 1.0).abs() < 0.35, "variance {var} vs {sigma2}");
}

#[test]
fn generation_is_deterministic_and_seed_sensitive() {
    let a = network::erdos_renyi(60, 0.2, 5).unwrap();
    let b = network::erdos_renyi(60, 0.2, 5).unwrap();
    let c = network::erdos_renyi(60, 0.2, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn graphs_are_simple_and_symmetric() {
    let net = network::erdos_renyi(50, 0.5, 3).unwrap();
    for k in 0..50 {
        assert!(!net.has_edge(k, k));
        for j in 0..50 {
            assert_eq!(net.has_edge(k, j), net.has_edge(j, k));
        }
        assert_eq!(net.degrees()[k], net.neighbors(k).count());
    }
    let lap = net.laplacian();
    for k in 0..50 {
        assert!(lap[k * 50..(k + 1) * 50].iter().sum::<f64>().abs() < 1e-12);
    }
}

#[test]
fn extreme_probabilities() {
    assert_eq!(network::erdos_renyi(30, 0.0, 1).unwrap().edge_count(), 0);
    assert_eq!(network::erdos_renyi(30, 1.0, 1).unwrap(), Network::complete(30));
    assert!(network::erdos_renyi(30, 1.5, 1).is_err());
    assert!(network::erdos_renyi(0, 0.5, 1).is_err());
}

#[test]
fn edge_list_file_round_trip() {
    let net = network::erdos_renyi(25, 0.3, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, net.to_edge_list()).unwrap();
    assert_eq!(network::load_adjacency(&path).unwrap(), net);
}

#[test]
fn malformed_edge_lists_report_the_line() {
    let err = network::parse_adjacency("n 3\n0 1\n1 x\n").unwrap_err();
    assert!(err.to_string().contains('3'), "{err}");
    assert!(network::parse_adjacency("0 1\n").is_err());
    assert!(network::parse_adjacency("n 3\n0 0\n").is_err());
    assert!(network::parse_adjacency("n 3\n0 7\n").is_err());
    assert!(network::load_adjacency("/nonexistent/graph.txt").is_err());
}

#[test]
fn connectivity() {
    assert!(Network::path(10).is_connected());
    assert_eq!(Network::empty(4).component_count(), 4);
    let net = Network::from_edges(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
    assert_eq!(net.component_count(), 3);
}

#[test]
fn frequency_sampling() {
    let c = network::sample_frequencies(5, FrequencyDist::Constant { value: 2.0 }, 0).unwrap();
    assert_eq!(c, vec![2.0; 5]);
    let d = FrequencyDist::Normal { mean: 1.0, std: 0.5 };
    let a = network::sample_frequencies(2000, d, 4).unwrap();
    assert_eq!(a, network::sample_frequencies(2000, d, 4).unwrap());
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    let sd = (a.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / a.len() as f64).sqrt();
    assert!((mean - 1.0).abs() < 0.05 && (sd - 0.5).abs() < 0.05, "{mean} {sd}");
}
