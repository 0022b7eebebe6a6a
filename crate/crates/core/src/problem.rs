//! Random all-to-all Ising instances, logical energies and the exact
//! ground-state oracle.
//!
//! An instance over `N` spins has `K = N(N-1)/2` couplings `J_ij`, one per
//! unordered pair, drawn uniformly from `[-1, 1]`. Instance generation is a
//! pure function of `(n_spins, seed)`; the RNG is ChaCha8 (identifier
//! recorded in emitted provenance as `chacha8`).

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// RNG algorithm identifier recorded in output provenance.
pub const RNG_ID: &str = "chacha8";

/// Enumeration bound for [`brute_force_ground`].
pub const BRUTE_FORCE_MAX_SPINS: usize = 24;

/// All-to-all Ising instance: `H = sum_{i<j} J_ij s_i s_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalProblem {
    n_spins: usize,
    /// Couplings in canonical pair order: (0,1), (0,2), ..., (0,N-1), (1,2), ...
    couplings: Vec<f64>,
}

/// Index of pair (i, j), i < j, in canonical order.
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl LogicalProblem {
    /// Build from an explicit coupling vector in canonical pair order.
    pub fn from_couplings(n_spins: usize, couplings: Vec<f64>) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::invalid(format!(
                "n_spins must be >= 2, got {n_spins}"
            )));
        }
        let k = n_spins * (n_spins - 1) / 2;
        if couplings.len() != k {
            return Err(Error::invalid(format!(
                "expected {k} couplings for N={n_spins}, got {}",
                couplings.len()
            )));
        }
        if couplings.iter().any(|j| !j.is_finite()) {
            return Err(Error::invalid("couplings must be finite"));
        }
        Ok(Self { n_spins, couplings })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Number of couplings K = N(N-1)/2.
    pub fn n_couplings(&self) -> usize {
        self.couplings.len()
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        assert!(i < j && j < self.n_spins, "bad pair ({i},{j})");
        self.couplings[pair_index(self.n_spins, i, j)]
    }

    /// Couplings with their pair labels, canonical order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_spins;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(self.couplings.iter())
            .map(|((i, j), &v)| (i, j, v))
    }
}

/// Spin configuration, entries strictly +1 or -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("spin entries must be +1 or -1"));
        }
        Ok(Self(spins))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }
}

/// Draw a random instance with all J_ij uniform on [-1, 1].
///
/// Deterministic: identical `(n_spins, seed)` give bit-identical couplings.
pub fn generate_instance(n_spins: usize, seed: u64) -> Result<LogicalProblem> {
    if n_spins < 2 {
        return Err(Error::invalid(format!(
            "n_spins must be >= 2, got {n_spins}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = n_spins * (n_spins - 1) / 2;
    let couplings = (0..k).map(|_| rng.random_range(-1.0..=1.0)).collect();
    LogicalProblem::from_couplings(n_spins, couplings)
}

/// `sum_{i<j} J_ij s_i s_j`.
pub fn logical_energy(problem: &LogicalProblem, config: &SpinConfig) -> Result<f64> {
    if config.len() != problem.n_spins() {
        return Err(Error::invalid(format!(
            "config length {} != N={}",
            config.len(),
            problem.n_spins()
        )));
    }
    let s = config.spins();
    Ok(problem
        .pairs()
        .map(|(i, j, v)| v * f64::from(s[i] * s[j]))
        .sum())
}

/// Exhaustive ground-state search.
///
/// Enumerates the 2^(N-1) configurations with `s_0 = +1` and re-expands by
/// global flip, so the returned set is always closed under `c -> -c`.
/// Returns the exact minimum energy and all minimizing configurations.
pub fn brute_force_ground(problem: &LogicalProblem) -> Result<(f64, Vec<SpinConfig>)> {
    let n = problem.n_spins();
    if n > BRUTE_FORCE_MAX_SPINS {
        return Err(Error::ResourceLimit(format!(
            "brute force limited to N <= {BRUTE_FORCE_MAX_SPINS}, got {n}"
        )));
    }
    let mut best = f64::INFINITY;
    let mut best_masks: Vec<u32> = Vec::new();
    // Bit b of the mask is spin b+1; spin 0 is fixed to +1.
    for mask in 0u32..(1u32 << (n - 1)) {
        let spin = |q: usize| -> f64 {
            if q == 0 || mask & (1 << (q - 1)) == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut e = 0.0;
        for (i, j, v) in problem.pairs() {
            e += v * spin(i) * spin(j);
        }
        if e < best {
            best = e;
            best_masks.clear();
            best_masks.push(mask);
        } else if e == best {
            best_masks.push(mask);
        }
    }
    let mut configs = Vec::with_capacity(best_masks.len() * 2);
    for mask in best_masks {
        let spins: Vec<i8> = (0..n)
            .map(|q| {
                if q == 0 || mask & (1 << (q - 1)) == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let c = SpinConfig::new(spins).expect("entries are +-1");
        configs.push(c.flipped());
        configs.push(c);
    }
    configs.sort();
    Ok((best, configs))
}

/// Render the line-oriented instance format: `N <n>` header, then one
/// `i j J_ij` line per pair (0-based, i < j). Values round-trip exactly.
pub fn format_instance(problem: &LogicalProblem) -> String {
    let mut out = String::new();
    writeln!(out, "N {}", problem.n_spins()).unwrap();
    for (i, j, v) in problem.pairs() {
        writeln!(out, "{i} {j} {v}").unwrap();
    }
    out
}

/// Parse the instance format produced by [`format_instance`].
pub fn parse_instance(text: &str) -> Result<LogicalProblem> {
    let mut lines = text.lines().enumerate();
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty instance file"))?;
    let n: usize = header
        .strip_prefix("N ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::parse(line_no + 1, "expected header `N <n>`"))?;
    if n < 2 {
        return Err(Error::parse(line_no + 1, "N must be >= 2"));
    }
    let mut couplings = vec![f64::NAN; n * (n - 1) / 2];
    let mut seen = vec![false; couplings.len()];
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (i, j, v) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(i), Some(j), Some(v), None) => {
                let i: usize = i
                    .parse()
                    .map_err(|_| Error::parse(line_no, "bad spin index"))?;
                let j: usize = j
                    .parse()
                    .map_err(|_| Error::parse(line_no, "bad spin index"))?;
                let v: f64 = v
                    .parse()
                    .map_err(|_| Error::parse(line_no, "bad coupling value"))?;
                (i, j, v)
            }
            _ => return Err(Error::parse(line_no, "expected `i j J_ij`")),
        };
        if i >= j || j >= n {
            return Err(Error::parse(
                line_no,
                format!("bad pair ({i},{j}) for N={n}"),
            ));
        }
        let k = pair_index(n, i, j);
        if seen[k] {
            return Err(Error::parse(line_no, format!("duplicate pair ({i},{j})")));
        }
        seen[k] = true;
        couplings[k] = v;
    }
    if let Some(k) = seen.iter().position(|&s| !s) {
        return Err(Error::parse(
            text.lines().count(),
            format!("missing coupling entry #{k}"),
        ));
    }
    LogicalProblem::from_couplings(n, couplings)
}

pub fn write_instance(problem: &LogicalProblem, path: &Path) -> Result<()> {
    std::fs::write(path, format_instance(problem))?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<LogicalProblem> {
    parse_instance(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_count_matches_pairs() {
        let p = generate_instance(4, 1).unwrap();
        assert_eq!(p.n_couplings(), 6);
        assert!(p.pairs().all(|(_, _, v)| (-1.0..=1.0).contains(&v)));
        let p2 = generate_instance(2, 99).unwrap();
        assert_eq!(p2.n_couplings(), 1);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_instance(6, 42).unwrap();
        let b = generate_instance(6, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(6, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_small_n() {
        assert!(generate_instance(1, 0).is_err());
        assert!(generate_instance(0, 0).is_err());
    }

    #[test]
    fn single_pair_energy() {
        let p = LogicalProblem::from_couplings(2, vec![-1.0]).unwrap();
        let c = SpinConfig::new(vec![1, 1]).unwrap();
        assert_eq!(logical_energy(&p, &c).unwrap(), -1.0);
    }

    #[test]
    fn energy_rejects_length_mismatch() {
        let p = generate_instance(4, 0).unwrap();
        let c = SpinConfig::new(vec![1, 1, 1]).unwrap();
        assert!(logical_energy(&p, &c).is_err());
    }

    #[test]
    fn global_flip_leaves_energy_unchanged() {
        let p = generate_instance(5, 7).unwrap();
        let c = SpinConfig::new(vec![1, -1, 1, 1, -1]).unwrap();
        let e = logical_energy(&p, &c).unwrap();
        let ef = logical_energy(&p, &c.flipped()).unwrap();
        assert_eq!(e, ef);
    }

    #[test]
    fn frustrated_triangle_ground() {
        // All J = +1 on 3 spins: every config has exactly one frustrated
        // bond, minimum -1, six degenerate minimizers.
        let p = LogicalProblem::from_couplings(3, vec![1.0, 1.0, 1.0]).unwrap();
        let c = SpinConfig::new(vec![1, 1, -1]).unwrap();
        assert_eq!(logical_energy(&p, &c).unwrap(), -1.0);
        let (e0, configs) = brute_force_ground(&p).unwrap();
        assert_eq!(e0, -1.0);
        assert_eq!(configs.len(), 6);
    }

    #[test]
    fn ferromagnetic_pair_ground() {
        let p = LogicalProblem::from_couplings(2, vec![-1.0]).unwrap();
        let (e0, configs) = brute_force_ground(&p).unwrap();
        assert_eq!(e0, -1.0);
        assert_eq!(configs.len(), 2);
        assert!(configs.contains(&SpinConfig::new(vec![1, 1]).unwrap()));
        assert!(configs.contains(&SpinConfig::new(vec![-1, -1]).unwrap()));
    }

    #[test]
    fn ground_set_closed_under_flip() {
        for seed in 0..20 {
            let p = generate_instance(5, seed).unwrap();
            let (_, configs) = brute_force_ground(&p).unwrap();
            for c in &configs {
                assert!(configs.contains(&c.flipped()));
            }
        }
    }

    #[test]
    fn brute_force_rejects_large_n() {
        let n = BRUTE_FORCE_MAX_SPINS + 1;
        let p = LogicalProblem::from_couplings(n, vec![0.0; n * (n - 1) / 2]).unwrap();
        assert!(matches!(
            brute_force_ground(&p),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn oracle_minimality_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..10 {
            let p = generate_instance(7, seed).unwrap();
            let (e0, _) = brute_force_ground(&p).unwrap();
            for _ in 0..100 {
                let c = SpinConfig::new(
                    (0..7)
                        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                        .collect(),
                )
                .unwrap();
                assert!(logical_energy(&p, &c).unwrap() >= e0);
            }
        }
    }

    #[test]
    fn instance_file_round_trip() {
        let p = generate_instance(6, 3).unwrap();
        let parsed = parse_instance(&format_instance(&p)).unwrap();
        assert_eq!(p, parsed);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse_instance("N 3\n0 1 0.5\n0 2 bogus\n1 2 0.1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
