//! Random and exhaustive digraph generation for the cross-check batteries.
//!
//! Arc density is throttled as the vertex count grows so that forest
//! enumeration stays within its family budget; weights, when requested, are
//! drawn from [0.5, 10], keeping the nonzero spectrum well away from zero so
//! the fixed cross-check tolerances have headroom.

use crate::digraph::{Arc, Digraph};
use rand::Rng;

pub const WEIGHT_MIN: f64 = 0.5;
pub const WEIGHT_MAX: f64 = 10.0;

fn draw_weight<R: Rng>(rng: &mut R, weighted: bool) -> f64 {
    if weighted {
        rng.gen_range(WEIGHT_MIN..=WEIGHT_MAX)
    } else {
        1.0
    }
}

/// Random digraph with `n` vertices and i.i.d. arcs of probability `p`.
pub fn random_digraph_with<R: Rng>(rng: &mut R, n: usize, p: f64, weighted: bool) -> Digraph {
    assert!(n > 0);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                arcs.push(Arc::new(i, j, draw_weight(rng, weighted)));
            }
        }
    }
    Digraph::new(n, arcs).expect("generator respects digraph invariants")
}

/// Random digraph with `1..=n_max` vertices and a density that shrinks with
/// `n` to keep forest families enumerable.
pub fn random_digraph<R: Rng>(rng: &mut R, n_max: usize, weighted: bool) -> Digraph {
    let n = rng.gen_range(1..=n_max.max(1));
    let p_cap = if n <= 4 { 0.6 } else { (4.0 / n as f64).min(0.6) };
    let p = rng.gen_range(0.05..=p_cap);
    random_digraph_with(rng, n, p, weighted)
}

/// Random converging tree with root 0: every other vertex gets exactly one
/// out-arc pointing at a lower-numbered vertex, so every vertex reaches 0.
pub fn random_converging_tree<R: Rng>(rng: &mut R, n: usize, weighted: bool) -> Digraph {
    assert!(n > 0);
    let mut arcs = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let target = rng.gen_range(0..v);
        arcs.push(Arc::new(v, target, draw_weight(rng, weighted)));
    }
    Digraph::new(n, arcs).expect("tree construction is acyclic")
}

/// The converging path `n-1 -> ... -> 1 -> 0`.
pub fn converging_path(n: usize) -> Digraph {
    assert!(n > 0);
    let pairs: Vec<(usize, usize)> = (1..n).map(|v| (v, v - 1)).collect();
    Digraph::from_pairs(n, &pairs).expect("path construction is valid")
}

/// Random strongly connected digraph: a directed Hamiltonian cycle plus
/// random extra arcs.
pub fn random_strongly_connected<R: Rng>(rng: &mut R, n_max: usize, weighted: bool) -> Digraph {
    let n = rng.gen_range(1..=n_max.max(1));
    let mut arcs = Vec::new();
    if n > 1 {
        for v in 0..n {
            arcs.push(Arc::new(v, (v + 1) % n, draw_weight(rng, weighted)));
        }
    }
    let p = if n <= 4 { 0.3 } else { (2.0 / n as f64).min(0.3) };
    for i in 0..n {
        for j in 0..n {
            let on_cycle = n > 1 && j == (i + 1) % n;
            if i != j && !on_cycle && rng.gen_bool(p) {
                arcs.push(Arc::new(i, j, draw_weight(rng, weighted)));
            }
        }
    }
    Digraph::new(n, arcs).expect("generator respects digraph invariants")
}

/// Every unit-weight digraph on `n` vertices, missing-arc patterns included.
/// There are `2^(n(n-1))` of them, so keep `n <= 4`.
pub fn all_digraphs(n: usize) -> impl Iterator<Item = Digraph> {
    assert!(n > 0 && n <= 4, "exhaustive sweep is limited to n <= 4");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let total: u64 = 1 << pairs.len();
    (0..total).map(move |mask| {
        let chosen: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|&(k, _)| mask >> k & 1 == 1)
            .map(|(_, &pair)| pair)
            .collect();
        Digraph::from_pairs(n, &chosen).expect("subset of valid arcs")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exhaustive_counts() {
        assert_eq!(all_digraphs(1).count(), 1);
        assert_eq!(all_digraphs(2).count(), 4);
        assert_eq!(all_digraphs(3).count(), 64);
        assert_eq!(all_digraphs(4).count(), 4096);
    }

    #[test]
    fn converging_trees_have_one_sink_and_n_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=8 {
            let g = random_converging_tree(&mut rng, n, true);
            let d = components::decompose(&g);
            assert_eq!(d.scc_count, n);
            assert_eq!(d.sink_count, 1);
            assert!(components::has_spanning_converging_tree(&g));
        }
    }

    #[test]
    fn strongly_connected_generator_is_strongly_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let g = random_strongly_connected(&mut rng, 9, true);
            assert_eq!(components::decompose(&g).scc_count, 1);
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = random_digraph(&mut ChaCha8Rng::seed_from_u64(3), 8, true);
        let b = random_digraph(&mut ChaCha8Rng::seed_from_u64(3), 8, true);
        assert_eq!(a, b);
    }

    #[test]
    fn weighted_arcs_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_digraph(&mut rng, 6, true);
            for arc in g.arcs() {
                assert!(arc.weight >= WEIGHT_MIN && arc.weight <= WEIGHT_MAX);
            }
        }
    }
}
