//! Exact combinatorial oracle: enumeration of spanning converging forests
//! (in-forests), the in-forest dimension, and the normalized matrix of
//! maximal in-forests.
//!
//! An in-forest is a spanning subgraph in which every vertex has at most one
//! outgoing arc and which contains no cycle; it is a vertex-disjoint union of
//! converging trees. A maximal in-forest has the largest possible arc count
//! `n - d`, which defines the in-forest dimension `d` by enumeration,
//! independently of the sink-SCC route. The matrix built here normalizes,
//! entry by entry, the total weight of maximal in-forests in which vertex `i`
//! lies in a tree rooted at `j`.
//!
//! The search is deliberately brute force (each vertex picks one outgoing arc
//! or none, cyclic assignments are rejected), with a remaining-arc bound to
//! prune branches that cannot reach the running maximum arc count.

use crate::digraph::Digraph;
use nalgebra::DMatrix;
use thiserror::Error;

/// Vertices a forest search can handle; beyond this the caller should rely
/// on the numeric routes instead.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 12;

/// Upper bound on how many maximal in-forests a family may hold before the
/// search gives up; dense graphs near the vertex limit can exceed any
/// reasonable memory budget.
pub const DEFAULT_FAMILY_BUDGET: usize = 2_000_000;

const NO_PARENT: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum ForestError {
    #[error("graph has {n} vertices, above the enumeration limit {limit}")]
    GraphTooLarge { n: usize, limit: usize },
    #[error("more than {budget} maximal in-forests; use the numeric routes")]
    FamilyTooLarge { budget: usize },
}

/// One spanning in-forest: per-vertex optional out-arc and the product of
/// the included arc weights.
#[derive(Debug, Clone, PartialEq)]
pub struct InForest {
    parent: Vec<u32>,
    weight: f64,
}

impl InForest {
    /// The out-neighbor of `v` in the forest, if any.
    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p as usize),
        }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn arc_count(&self) -> usize {
        self.parent.iter().filter(|&&p| p != NO_PARENT).count()
    }

    /// Vertices with no outgoing forest arc.
    pub fn roots(&self) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&v| self.parent[v] == NO_PARENT)
            .collect()
    }

    /// The root of the tree containing `v` (follow parents until a root).
    pub fn root_of(&self, v: usize) -> usize {
        let mut u = v;
        while self.parent[u] != NO_PARENT {
            u = self.parent[u] as usize;
        }
        u
    }
}

/// All maximal in-forests of a digraph, in canonical (lexicographic parent
/// vector) order, with their total weight and the dimension `d`.
#[derive(Debug, Clone)]
pub struct ForestFamily {
    host: Digraph,
    max_arc_count: usize,
    forests: Vec<InForest>,
    total_weight: f64,
    d: usize,
}

impl ForestFamily {
    pub fn host(&self) -> &Digraph {
        &self.host
    }

    pub fn n(&self) -> usize {
        self.host.n()
    }

    pub fn max_arc_count(&self) -> usize {
        self.max_arc_count
    }

    pub fn forests(&self) -> &[InForest] {
        &self.forests
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// The in-forest dimension `d = n - max_arc_count`.
    pub fn dimension(&self) -> usize {
        self.d
    }
}

/// Row-stochastic matrix of maximal in-forests: entry `(i, j)` is the weight
/// of maximal in-forests in which `i` belongs to a tree rooted at `j`,
/// divided by the total weight of all maximal in-forests.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestMatrix {
    matrix: DMatrix<f64>,
}

impl ForestMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Enumerates every in-forest of maximum arc count, with the default size
/// limit and family budget.
pub fn enumerate_maximal_in_forests(g: &Digraph) -> Result<ForestFamily, ForestError> {
    enumerate_maximal_in_forests_bounded(g, DEFAULT_ENUMERATION_LIMIT, DEFAULT_FAMILY_BUDGET)
}

pub fn enumerate_maximal_in_forests_with_limit(
    g: &Digraph,
    limit: usize,
) -> Result<ForestFamily, ForestError> {
    enumerate_maximal_in_forests_bounded(g, limit, DEFAULT_FAMILY_BUDGET)
}

pub fn enumerate_maximal_in_forests_bounded(
    g: &Digraph,
    limit: usize,
    budget: usize,
) -> Result<ForestFamily, ForestError> {
    let n = g.n();
    if n > limit {
        return Err(ForestError::GraphTooLarge { n, limit });
    }

    // Out-arcs per vertex, heads sorted for a deterministic search order.
    let mut choices: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for arc in g.arcs() {
        choices[arc.tail].push((arc.head as u32, arc.weight));
    }
    for c in choices.iter_mut() {
        c.sort_unstable_by_key(|&(head, _)| head);
    }

    let mut search = Search {
        choices: &choices,
        parent: vec![NO_PARENT; n],
        weight: 1.0,
        used: 0,
        best: 0,
        budget,
        overflow: false,
        found: Vec::new(),
    };
    search.run(0);
    if search.overflow {
        return Err(ForestError::FamilyTooLarge { budget });
    }

    let mut forests = search.found;
    forests.sort_unstable_by(|a, b| a.parent.cmp(&b.parent));

    let mut total = KahanSum::default();
    for f in &forests {
        total.add(f.weight);
    }

    let max_arc_count = search.best;
    Ok(ForestFamily {
        host: g.clone(),
        max_arc_count,
        d: n - max_arc_count,
        forests,
        total_weight: total.value(),
    })
}

struct Search<'a> {
    choices: &'a [Vec<(u32, f64)>],
    parent: Vec<u32>,
    weight: f64,
    used: usize,
    best: usize,
    budget: usize,
    overflow: bool,
    found: Vec<InForest>,
}

impl Search<'_> {
    fn run(&mut self, v: usize) {
        let n = self.parent.len();
        // Each undecided vertex can contribute at most one more arc.
        if self.overflow || self.used + (n - v) < self.best {
            return;
        }
        if v == n {
            if self.used > self.best {
                self.best = self.used;
                self.found.clear();
            }
            if self.found.len() >= self.budget {
                self.overflow = true;
                return;
            }
            self.found.push(InForest {
                parent: self.parent.clone(),
                weight: self.weight,
            });
            return;
        }

        // Choice 1: v keeps no outgoing arc (v is a root).
        self.run(v + 1);

        // Choice 2: v points at one of its out-neighbors, unless that
        // closes a cycle through already-assigned parents.
        for i in 0..self.choices[v].len() {
            let (head, w) = self.choices[v][i];
            if self.creates_cycle(v, head as usize) {
                continue;
            }
            self.parent[v] = head;
            self.weight *= w;
            self.used += 1;
            self.run(v + 1);
            self.used -= 1;
            self.weight /= w;
            self.parent[v] = NO_PARENT;
        }
    }

    fn creates_cycle(&self, v: usize, head: usize) -> bool {
        let mut u = head;
        loop {
            if u == v {
                return true;
            }
            match self.parent[u] {
                NO_PARENT => return false,
                p => u = p as usize,
            }
        }
    }
}

/// Builds the normalized matrix of maximal in-forests from an enumerated
/// family. Accumulation is compensated so the row sums stay within 1e-12 of
/// 1 even for families with millions of members.
pub fn forest_matrix(family: &ForestFamily) -> ForestMatrix {
    let n = family.n();
    let mut sum = DMatrix::<f64>::zeros(n, n);
    let mut comp = DMatrix::<f64>::zeros(n, n);
    let mut roots = vec![0u32; n];

    for forest in &family.forests {
        for v in 0..n {
            roots[v] = forest.root_of(v) as u32;
        }
        for v in 0..n {
            kahan_add(&mut sum[(v, roots[v] as usize)], &mut comp[(v, roots[v] as usize)], forest.weight);
        }
    }

    let total = family.total_weight;
    ForestMatrix {
        matrix: sum.map(|x| x / total),
    }
}

#[derive(Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        kahan_add(&mut self.sum, &mut self.comp, x);
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

fn kahan_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let y = x - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}
