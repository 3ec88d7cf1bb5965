//! Fixed synthetic graph suites used by the experiments and the acceptance
//! checks. Every entry is generated from a pinned seed and preprocessed to
//! its largest connected component, so suite contents never drift.

use implicitreg::{generate, preprocess, Graph, GraphFamily};

fn build(family: GraphFamily, seed: u64) -> (String, Graph) {
    let id = format!("{family}@{seed}");
    let graph = generate(&family, seed).expect("suite family is feasible");
    let (graph, _) = preprocess(&graph).expect("suite graph is nonempty");
    (id, graph)
}

/// Twenty mixed-family connected graphs with at most 40 nodes, used for the
/// diffusion/regularizer equivalence checks.
pub fn equivalence_suite() -> Vec<(String, Graph)> {
    vec![
        build(GraphFamily::RandomRegular { n: 16, degree: 3 }, 1),
        build(GraphFamily::RandomRegular { n: 24, degree: 3 }, 2),
        build(GraphFamily::RandomRegular { n: 40, degree: 3 }, 3),
        build(GraphFamily::RandomRegular { n: 20, degree: 4 }, 4),
        build(GraphFamily::Dumbbell { clique: 3, bridges: 1 }, 0),
        build(GraphFamily::Dumbbell { clique: 5, bridges: 2 }, 0),
        build(GraphFamily::Dumbbell { clique: 8, bridges: 3 }, 0),
        build(GraphFamily::RingOfCliques { count: 4, size: 4 }, 0),
        build(GraphFamily::RingOfCliques { count: 6, size: 4 }, 0),
        build(GraphFamily::RingOfCliques { count: 5, size: 5 }, 0),
        build(GraphFamily::Grid { rows: 3, cols: 5 }, 0),
        build(GraphFamily::Grid { rows: 4, cols: 6 }, 0),
        build(GraphFamily::Grid { rows: 5, cols: 8 }, 0),
        build(GraphFamily::Cycle { n: 12 }, 0),
        build(GraphFamily::Cycle { n: 17 }, 0),
        build(GraphFamily::Complete { n: 8 }, 0),
        build(GraphFamily::Complete { n: 12 }, 0),
        build(GraphFamily::Path { n: 16 }, 0),
        build(
            GraphFamily::WhiskeredExpander { core: 16, degree: 4, whiskers: 4, length: 3 },
            5,
        ),
        build(
            GraphFamily::WhiskeredExpander { core: 24, degree: 4, whiskers: 2, length: 4 },
            6,
        ),
    ]
}

/// Fifty mixed-family connected graphs for the Cheeger-bound sweep.
pub fn cheeger_suite(seed: u64) -> Vec<(String, Graph)> {
    let mut out = Vec::with_capacity(50);
    for i in 0..10u64 {
        out.push(build(
            GraphFamily::RandomRegular { n: 12 + 4 * i as usize, degree: 3 },
            seed + i,
        ));
    }
    for i in 0..6u64 {
        out.push(build(
            GraphFamily::RandomRegular { n: 14 + 6 * i as usize, degree: 4 },
            seed + 100 + i,
        ));
    }
    for k in [3usize, 4, 5, 6, 7] {
        out.push(build(GraphFamily::Dumbbell { clique: k, bridges: 1 }, 0));
    }
    for (m, k) in [(3usize, 3usize), (4, 4), (5, 4), (6, 5), (8, 4)] {
        out.push(build(GraphFamily::RingOfCliques { count: m, size: k }, 0));
    }
    for (r, c) in [(3usize, 4usize), (4, 7), (5, 5), (6, 9), (7, 8)] {
        out.push(build(GraphFamily::Grid { rows: r, cols: c }, 0));
    }
    for n in [8usize, 13, 24, 37] {
        out.push(build(GraphFamily::Cycle { n }, 0));
    }
    for n in [6usize, 11, 19] {
        out.push(build(GraphFamily::Complete { n }, 0));
    }
    for n in [10usize, 25, 50] {
        out.push(build(GraphFamily::Path { n }, 0));
    }
    for (core, w, len, s) in [(20usize, 4usize, 4usize, 7u64), (32, 6, 5, 8), (48, 8, 6, 9)] {
        out.push(build(
            GraphFamily::WhiskeredExpander { core, degree: 4, whiskers: w, length: len },
            seed + 200 + s,
        ));
    }
    assert_eq!(out.len(), 50);
    out
}

/// Graphs with up to 200 nodes for the dense-versus-iterative exactness
/// checks.
pub fn exactness_suite() -> Vec<(String, Graph)> {
    vec![
        build(GraphFamily::Dumbbell { clique: 4, bridges: 1 }, 0),
        build(GraphFamily::RingOfCliques { count: 10, size: 6 }, 0),
        build(GraphFamily::Grid { rows: 10, cols: 15 }, 0),
        build(GraphFamily::Cycle { n: 120 }, 0),
        build(GraphFamily::Path { n: 160 }, 0),
        build(GraphFamily::Complete { n: 40 }, 0),
        build(GraphFamily::RandomRegular { n: 180, degree: 3 }, 12),
        build(GraphFamily::RandomRegular { n: 120, degree: 4 }, 13),
        build(
            GraphFamily::WhiskeredExpander { core: 150, degree: 4, whiskers: 10, length: 5 },
            14,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_have_expected_shapes() {
        let eq = equivalence_suite();
        assert_eq!(eq.len(), 20);
        for (id, g) in &eq {
            assert!(g.n() <= 40, "{id} has {} nodes", g.n());
            assert!(g.is_connected(), "{id} is disconnected");
        }
        for (id, g) in cheeger_suite(0) {
            assert!(g.is_connected(), "{id} is disconnected");
        }
        for (id, g) in exactness_suite() {
            assert!(g.n() <= 200, "{id} has {} nodes", g.n());
            assert!(g.is_connected(), "{id} is disconnected");
        }
    }
}
