//! Deterministic synthetic graph generators.
//!
//! All families are deterministic given the seed; the structured families
//! ignore it entirely. Weights are always 1.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

const REGULAR_MAX_ATTEMPTS: usize = 1000;

/// Synthetic graph families.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphFamily {
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    Grid { rows: usize, cols: usize },
    /// Two k-cliques joined by `bridges` distinct edges.
    Dumbbell { clique: usize, bridges: usize },
    /// `count` k-cliques arranged in a ring, consecutive cliques joined by one edge.
    RingOfCliques { count: usize, size: usize },
    /// d-regular random core with path "whiskers" attached to core nodes.
    WhiskeredExpander {
        core: usize,
        degree: usize,
        whiskers: usize,
        length: usize,
    },
    /// Uniform simple d-regular graph via the pairing model with retries.
    RandomRegular { n: usize, degree: usize },
}

impl std::fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphFamily::Path { n } => write!(f, "path(n={n})"),
            GraphFamily::Cycle { n } => write!(f, "cycle(n={n})"),
            GraphFamily::Complete { n } => write!(f, "complete(n={n})"),
            GraphFamily::Grid { rows, cols } => write!(f, "grid(rows={rows};cols={cols})"),
            GraphFamily::Dumbbell { clique, bridges } => {
                write!(f, "dumbbell(k={clique};b={bridges})")
            }
            GraphFamily::RingOfCliques { count, size } => {
                write!(f, "ring_of_cliques(m={count};k={size})")
            }
            GraphFamily::WhiskeredExpander {
                core,
                degree,
                whiskers,
                length,
            } => write!(
                f,
                "whiskered_expander(core={core};d={degree};w={whiskers};len={length})"
            ),
            GraphFamily::RandomRegular { n, degree } => {
                write!(f, "random_regular(n={n};d={degree})")
            }
        }
    }
}

/// Build a graph of the given family. Randomized families draw from a
/// ChaCha stream seeded with `seed`.
pub fn generate(family: &GraphFamily, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *family {
        GraphFamily::Path { n } => {
            if n == 0 {
                return Err(Error::Infeasible("path needs at least one node".into()));
            }
            let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1, 1.0)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphFamily::Cycle { n } => {
            if n < 3 {
                return Err(Error::Infeasible(format!("cycle needs n >= 3, got {n}")));
            }
            let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
            edges.push((n - 1, 0, 1.0));
            Graph::from_edges(n, &edges)
        }
        GraphFamily::Complete { n } => {
            if n < 2 {
                return Err(Error::Infeasible(format!("complete needs n >= 2, got {n}")));
            }
            let mut edges = Vec::with_capacity(n * (n - 1) / 2);
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u, v, 1.0));
                }
            }
            Graph::from_edges(n, &edges)
        }
        GraphFamily::Grid { rows, cols } => {
            if rows == 0 || cols == 0 || rows * cols < 2 {
                return Err(Error::Infeasible(format!(
                    "grid needs at least two nodes, got {rows}x{cols}"
                )));
            }
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1), 1.0));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c), 1.0));
                    }
                }
            }
            Graph::from_edges(rows * cols, &edges)
        }
        GraphFamily::Dumbbell { clique, bridges } => {
            let k = clique;
            if k < 2 {
                return Err(Error::Infeasible(format!(
                    "dumbbell needs clique size >= 2, got {k}"
                )));
            }
            if bridges == 0 || bridges > k * k {
                return Err(Error::Infeasible(format!(
                    "dumbbell supports 1..={} bridges for clique size {k}, got {bridges}",
                    k * k
                )));
            }
            let mut edges = Vec::new();
            for u in 0..k {
                for v in u + 1..k {
                    edges.push((u, v, 1.0));
                    edges.push((k + u, k + v, 1.0));
                }
            }
            // Bridge i joins left node k-1-(i mod k) to right node k + i/k,
            // so a single bridge connects the two facing clique nodes.
            for i in 0..bridges {
                edges.push((k - 1 - (i % k), k + i / k, 1.0));
            }
            Graph::from_edges(2 * k, &edges)
        }
        GraphFamily::RingOfCliques { count, size } => {
            if count < 2 || size < 2 {
                return Err(Error::Infeasible(format!(
                    "ring of cliques needs count >= 2 and size >= 2, got {count}x{size}"
                )));
            }
            let mut edges = Vec::new();
            for c in 0..count {
                let base = c * size;
                for u in 0..size {
                    for v in u + 1..size {
                        edges.push((base + u, base + v, 1.0));
                    }
                }
                let next = (c + 1) % count;
                edges.push((base + size - 1, next * size, 1.0));
            }
            Graph::from_edges(count * size, &edges)
        }
        GraphFamily::WhiskeredExpander {
            core,
            degree,
            whiskers,
            length,
        } => {
            let mut edges = random_regular_edges(core, degree, &mut rng)?;
            if whiskers > 0 && length == 0 {
                return Err(Error::Infeasible("whisker length must be positive".into()));
            }
            for j in 0..whiskers {
                let attach = j % core;
                let base = core + j * length;
                edges.push((attach, base, 1.0));
                for step in 0..length - 1 {
                    edges.push((base + step, base + step + 1, 1.0));
                }
            }
            Graph::from_edges(core + whiskers * length, &edges)
        }
        GraphFamily::RandomRegular { n, degree } => {
            let edges = random_regular_edges(n, degree, &mut rng)?;
            Graph::from_edges(n, &edges)
        }
    }
}

/// Pairing model: shuffle n*d stubs, pair them up, retry on self-loops or
/// duplicate pairs until a simple graph appears.
fn random_regular_edges(
    n: usize,
    degree: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize, f64)>> {
    if degree == 0 || degree >= n {
        return Err(Error::Infeasible(format!(
            "no simple {degree}-regular graph on {n} nodes"
        )));
    }
    if (n * degree) % 2 != 0 {
        return Err(Error::Infeasible(format!(
            "n*d must be even, got n={n}, d={degree}"
        )));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    'attempt: for _ in 0..REGULAR_MAX_ATTEMPTS {
        stubs.shuffle(rng);
        let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(n * degree / 2);
        let mut edges = Vec::with_capacity(n * degree / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                continue 'attempt;
            }
            if !seen.insert((a.min(b), a.max(b))) {
                continue 'attempt;
            }
            edges.push((a, b, 1.0));
        }
        return Ok(edges);
    }
    Err(Error::Infeasible(format!(
        "failed to sample a simple {degree}-regular graph on {n} nodes after {REGULAR_MAX_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dumbbell_small_shape() {
        let g = generate(&GraphFamily::Dumbbell { clique: 3, bridges: 1 }, 0).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edge_count(), 7);
        assert_eq!(g.degrees(), &[2.0, 2.0, 3.0, 3.0, 2.0, 2.0]);
    }

    #[test]
    fn cycle_shape() {
        let g = generate(&GraphFamily::Cycle { n: 4 }, 0).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 4);
        assert!(g.degrees().iter().all(|&d| d == 2.0));
    }

    #[test]
    fn random_regular_degrees() {
        let g = generate(&GraphFamily::RandomRegular { n: 10, degree: 3 }, 7).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 3.0));
        assert_eq!(g.edge_count(), 15);
    }

    #[test]
    fn random_regular_is_deterministic() {
        let a = generate(&GraphFamily::RandomRegular { n: 16, degree: 3 }, 42).unwrap();
        let b = generate(&GraphFamily::RandomRegular { n: 16, degree: 3 }, 42).unwrap();
        let ea: Vec<_> = a.edges().collect();
        let eb: Vec<_> = b.edges().collect();
        assert_eq!(ea, eb);
    }

    #[test]
    fn random_regular_rejects_odd_total() {
        assert!(matches!(
            generate(&GraphFamily::RandomRegular { n: 5, degree: 3 }, 0).unwrap_err(),
            Error::Infeasible(_)
        ));
    }

    #[test]
    fn whiskered_expander_shape() {
        let g = generate(
            &GraphFamily::WhiskeredExpander {
                core: 20,
                degree: 4,
                whiskers: 3,
                length: 5,
            },
            1,
        )
        .unwrap();
        assert_eq!(g.n(), 35);
        // Whisker tips have degree 1.
        assert_eq!(g.degree(20 + 4), 1.0);
        assert!(g.is_connected());
    }

    #[test]
    fn ring_of_cliques_shape() {
        let g = generate(&GraphFamily::RingOfCliques { count: 8, size: 5 }, 0).unwrap();
        assert_eq!(g.n(), 40);
        assert_eq!(g.edge_count(), 8 * 10 + 8);
        assert!(g.is_connected());
    }
}
