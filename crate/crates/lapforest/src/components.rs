//! Connectivity structure of a digraph: strong and weak components,
//! condensation, sink SCCs, and the structural in-forest dimension.
//!
//! The in-forest dimension `d` of a digraph equals its number of sink
//! SCCs (an SCC with no arcs leaving it), and a spanning converging tree
//! exists exactly when `d = 1`. Both facts are exposed here and
//! cross-checked elsewhere against the enumerative and spectral routes.

use crate::digraph::Digraph;

/// Strong/weak component structure of a digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    /// Per-vertex strong-component index in `0..scc_count`.
    pub scc_id: Vec<usize>,
    pub scc_count: usize,
    pub wcc_count: usize,
    /// `sink_flags[k]` is true iff SCC `k` has out-degree 0 in the condensation.
    pub sink_flags: Vec<bool>,
    /// Condensation DAG: per-SCC sorted list of successor SCCs.
    pub condensation: Vec<Vec<usize>>,
    pub sink_count: usize,
}

/// Computes SCCs (Tarjan), WCC count, condensation, and sink flags.
pub fn decompose(g: &Digraph) -> ComponentDecomposition {
    let n = g.n();
    let adj = out_adjacency(g);
    let (scc_id, scc_count) = tarjan_scc(&adj);
    let wcc_count = weak_component_count(g);

    let mut condensation = vec![Vec::new(); scc_count];
    for u in 0..n {
        for &v in &adj[u] {
            let (cu, cv) = (scc_id[u], scc_id[v]);
            if cu != cv {
                condensation[cu].push(cv);
            }
        }
    }
    for succ in &mut condensation {
        succ.sort_unstable();
        succ.dedup();
    }
    let sink_flags: Vec<bool> = condensation.iter().map(|s| s.is_empty()).collect();
    let sink_count = sink_flags.iter().filter(|&&f| f).count();

    ComponentDecomposition {
        scc_id,
        scc_count,
        wcc_count,
        sink_flags,
        condensation,
        sink_count,
    }
}

/// The in-forest dimension by the structural route: the number of sink SCCs.
pub fn forest_dimension_structural(d: &ComponentDecomposition) -> usize {
    d.sink_count
}

/// True iff some vertex is reachable by a directed path from every vertex,
/// i.e. a spanning converging tree exists. Checked directly by reverse
/// traversal, independently of the sink count it must agree with.
pub fn has_spanning_converging_tree(g: &Digraph) -> bool {
    let n = g.n();
    let mut rev = vec![Vec::new(); n];
    for arc in g.arcs() {
        rev[arc.head].push(arc.tail);
    }
    // r is a valid root iff the reverse traversal from r covers all vertices.
    (0..n).any(|r| {
        let mut seen = vec![false; n];
        let mut stack = vec![r];
        seen[r] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &rev[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    })
}

fn out_adjacency(g: &Digraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.n()];
    for arc in g.arcs() {
        adj[arc.tail].push(arc.head);
    }
    adj
}

/// Iterative Tarjan. Returns per-vertex component id and the component count;
/// ids are renumbered so that they increase with the smallest vertex in each
/// component, which keeps the output independent of traversal order details.
fn tarjan_scc(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp = vec![UNVISITED; n];
    let mut comp_count = 0;
    let mut next_index = 0;

    // Explicit call stack of (vertex, next out-neighbor position).
    let mut call: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if index[start] != UNVISITED {
            continue;
        }
        call.push((start, 0));
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }

    // Renumber by smallest member vertex for a canonical labeling.
    let mut first_seen = vec![UNVISITED; comp_count];
    let mut order: Vec<usize> = Vec::with_capacity(comp_count);
    for v in 0..n {
        if first_seen[comp[v]] == UNVISITED {
            first_seen[comp[v]] = order.len();
            order.push(comp[v]);
        }
    }
    let relabeled: Vec<usize> = comp.iter().map(|&c| first_seen[c]).collect();
    (relabeled, comp_count)
}

fn weak_component_count(g: &Digraph) -> usize {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut count = n;
    for arc in g.arcs() {
        let (a, b) = (find(&mut parent, arc.tail), find(&mut parent, arc.head));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;

    #[test]
    fn two_cycle_is_one_strong_component() {
        let g = Digraph::from_pairs(2, &[(0, 1), (1, 0)]).unwrap();
        let d = decompose(&g);
        assert_eq!(d.scc_count, 1);
        assert_eq!(d.wcc_count, 1);
        assert_eq!(d.sink_count, 1);
        assert!(has_spanning_converging_tree(&g));
    }

    #[test]
    fn converging_path_has_n_components_one_sink() {
        let g = Digraph::from_pairs(5, &[(4, 3), (3, 2), (2, 1), (1, 0)]).unwrap();
        let d = decompose(&g);
        assert_eq!(d.scc_count, 5);
        assert_eq!(d.wcc_count, 1);
        assert_eq!(d.sink_count, 1);
        assert_eq!(forest_dimension_structural(&d), 1);
        assert!(has_spanning_converging_tree(&g));
        // Only the SCC of the root vertex 0 is a sink.
        assert!(d.sink_flags[d.scc_id[0]]);
        for v in 1..5 {
            assert!(!d.sink_flags[d.scc_id[v]]);
        }
    }

    #[test]
    fn two_disjoint_two_cycles() {
        let g = Digraph::from_pairs(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let d = decompose(&g);
        assert_eq!(d.scc_count, 2);
        assert_eq!(d.wcc_count, 2);
        assert_eq!(d.sink_count, 2);
        assert!(!has_spanning_converging_tree(&g));
    }

    #[test]
    fn empty_graph_every_singleton_is_a_sink() {
        let g = Digraph::from_pairs(3, &[]).unwrap();
        let d = decompose(&g);
        assert_eq!(d.scc_count, 3);
        assert_eq!(d.wcc_count, 3);
        assert_eq!(d.sink_count, 3);
        assert_eq!(forest_dimension_structural(&d), 3);
        assert!(!has_spanning_converging_tree(&g));
    }

    #[test]
    fn strongly_connected_dimension_is_one() {
        // Directed 4-cycle.
        let g = Digraph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let d = decompose(&g);
        assert_eq!(d.scc_count, 1);
        assert_eq!(forest_dimension_structural(&d), 1);
    }

    #[test]
    fn condensation_is_acyclic_and_sinks_match() {
        // Two 2-cycles bridged: {0,1} -> {2,3}.
        let g = Digraph::from_pairs(4, &[(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)]).unwrap();
        let d = decompose(&g);
        assert_eq!(d.scc_count, 2);
        assert_eq!(d.sink_count, 1);
        let src = d.scc_id[0];
        let dst = d.scc_id[2];
        assert_eq!(d.condensation[src], vec![dst]);
        assert!(d.condensation[dst].is_empty());
        assert!(!d.sink_flags[src]);
        assert!(d.sink_flags[dst]);
    }

    #[test]
    fn single_vertex() {
        let g = Digraph::from_pairs(1, &[]).unwrap();
        let d = decompose(&g);
        assert_eq!(d.scc_count, 1);
        assert_eq!(d.sink_count, 1);
        assert!(has_spanning_converging_tree(&g));
    }
}
