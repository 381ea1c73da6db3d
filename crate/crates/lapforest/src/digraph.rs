//! Weighted digraph representation, edge-list parsing, and Laplacian construction.
//!
//! An arc `(i, j, w)` means vertex `i` observes vertex `j` with coupling
//! weight `w`, i.e. `a_ij = w` in the adjacency matrix. The Laplacian is
//! `L = D - A` where `D` is the diagonal matrix of weighted out-degrees,
//! so every row of `L` sums to zero.

use nalgebra::DMatrix;
use std::collections::HashSet;
use std::fmt::Write as _;
use thiserror::Error;

/// A weighted arc `tail -> head`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
}

impl Arc {
    pub fn new(tail: usize, head: usize, weight: f64) -> Self {
        Self { tail, head, weight }
    }
}

/// Construction errors for [`Digraph`].
#[derive(Debug, Error, PartialEq)]
pub enum DigraphError {
    #[error("vertex count must be positive")]
    ZeroVertices,
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("duplicate arc {tail} -> {head}")]
    DuplicateArc { tail: usize, head: usize },
    #[error("arc {tail} -> {head} has non-positive or non-finite weight {weight}")]
    BadWeight { tail: usize, head: usize, weight: f64 },
}

/// Edge-list parse errors, each with the 1-based offending line.
#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("missing header line \"n m\"")]
    MissingHeader,
    #[error("line {line}: malformed header (expected \"n m\")")]
    MalformedHeader { line: usize },
    #[error("line {line}: vertex count must be positive")]
    ZeroVertices { line: usize },
    #[error("line {line}: malformed arc (expected \"i j\" or \"i j w\")")]
    MalformedArc { line: usize },
    #[error("line {line}: vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate arc {tail} -> {head}")]
    DuplicateArc { line: usize, tail: usize, head: usize },
    #[error("line {line}: arc weight must be positive and finite, got {weight}")]
    BadWeight { line: usize, weight: f64 },
    #[error("line {line}: extra arc beyond the {declared} declared in the header")]
    TooManyArcs { line: usize, declared: usize },
    #[error("edge list ended after {found} of {declared} declared arcs")]
    TooFewArcs { declared: usize, found: usize },
}

/// A weighted directed graph on vertices `0..n`.
///
/// Invariants enforced at construction: no self-loops, at most one arc per
/// ordered pair, and every weight strictly positive and finite. Immutable
/// after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<Arc>,
}

impl Digraph {
    pub fn new(n: usize, arcs: Vec<Arc>) -> Result<Self, DigraphError> {
        if n == 0 {
            return Err(DigraphError::ZeroVertices);
        }
        let mut seen = HashSet::with_capacity(arcs.len());
        for arc in &arcs {
            if arc.tail >= n {
                return Err(DigraphError::VertexOutOfRange { vertex: arc.tail, n });
            }
            if arc.head >= n {
                return Err(DigraphError::VertexOutOfRange { vertex: arc.head, n });
            }
            if arc.tail == arc.head {
                return Err(DigraphError::SelfLoop { vertex: arc.tail });
            }
            if !(arc.weight.is_finite() && arc.weight > 0.0) {
                return Err(DigraphError::BadWeight {
                    tail: arc.tail,
                    head: arc.head,
                    weight: arc.weight,
                });
            }
            if !seen.insert((arc.tail, arc.head)) {
                return Err(DigraphError::DuplicateArc {
                    tail: arc.tail,
                    head: arc.head,
                });
            }
        }
        Ok(Self { n, arcs })
    }

    /// Builds a unit-weight digraph from `(tail, head)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, DigraphError> {
        let arcs = pairs.iter().map(|&(t, h)| Arc::new(t, h, 1.0)).collect();
        Self::new(n, arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Arcs leaving `tail`, in insertion order.
    pub fn out_arcs(&self, tail: usize) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(move |a| a.tail == tail)
    }

    /// Adjacency matrix `A` with `A[(i, j)] = a_ij`.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for arc in &self.arcs {
            a[(arc.tail, arc.head)] = arc.weight;
        }
        a
    }

    /// Parses the edge-list text format.
    ///
    /// First non-comment line is `n m`; then `m` lines `i j` or `i j w`
    /// (weight defaults to 1). Lines starting with `#` and blank lines are
    /// ignored; LF and CRLF both accepted.
    pub fn parse_edge_list(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize)> = None;
        let mut arcs: Vec<Arc> = Vec::new();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();

            let Some((n, m)) = header else {
                if fields.len() != 2 {
                    return Err(ParseError::MalformedHeader { line });
                }
                let n: usize = fields[0]
                    .parse()
                    .map_err(|_| ParseError::MalformedHeader { line })?;
                let m: usize = fields[1]
                    .parse()
                    .map_err(|_| ParseError::MalformedHeader { line })?;
                if n == 0 {
                    return Err(ParseError::ZeroVertices { line });
                }
                header = Some((n, m));
                continue;
            };

            if arcs.len() == m {
                return Err(ParseError::TooManyArcs { line, declared: m });
            }
            if fields.len() != 2 && fields.len() != 3 {
                return Err(ParseError::MalformedArc { line });
            }
            let tail: usize = fields[0]
                .parse()
                .map_err(|_| ParseError::MalformedArc { line })?;
            let head: usize = fields[1]
                .parse()
                .map_err(|_| ParseError::MalformedArc { line })?;
            let weight: f64 = match fields.get(2) {
                Some(w) => w.parse().map_err(|_| ParseError::MalformedArc { line })?,
                None => 1.0,
            };
            for &v in &[tail, head] {
                if v >= n {
                    return Err(ParseError::VertexOutOfRange { line, vertex: v, n });
                }
            }
            if tail == head {
                return Err(ParseError::SelfLoop { line, vertex: tail });
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(ParseError::BadWeight { line, weight });
            }
            if !seen.insert((tail, head)) {
                return Err(ParseError::DuplicateArc { line, tail, head });
            }
            arcs.push(Arc::new(tail, head, weight));
        }

        let Some((n, m)) = header else {
            return Err(ParseError::MissingHeader);
        };
        if arcs.len() < m {
            return Err(ParseError::TooFewArcs {
                declared: m,
                found: arcs.len(),
            });
        }
        Ok(Self { n, arcs })
    }

    /// Serializes back to the edge-list format. Weights are printed with the
    /// shortest representation that round-trips to the same `f64`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.arcs.len());
        for arc in &self.arcs {
            let _ = writeln!(out, "{} {} {}", arc.tail, arc.head, arc.weight);
        }
        out
    }
}

/// The Laplacian `L = D - A` of a digraph: `l_ij = -a_ij` off the diagonal
/// and `l_ii` equal to the weighted out-degree of `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    matrix: DMatrix<f64>,
}

impl LaplacianMatrix {
    pub fn of(g: &Digraph) -> Self {
        let n = g.n();
        let mut m = DMatrix::zeros(n, n);
        for arc in g.arcs() {
            m[(arc.tail, arc.head)] = -arc.weight;
        }
        for i in 0..n {
            let out_degree: f64 = g.out_arcs(i).map(|a| a.weight).sum();
            m[(i, i)] = out_degree;
        }
        Self { matrix: m }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Largest diagonal entry, i.e. the largest weighted out-degree.
    pub fn max_diagonal(&self) -> f64 {
        (0..self.n())
            .map(|i| self.matrix[(i, i)])
            .fold(0.0, f64::max)
    }
}

/// Convenience wrapper mirroring `LaplacianMatrix::of`.
pub fn laplacian(g: &Digraph) -> LaplacianMatrix {
    LaplacianMatrix::of(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_eq(m: &DMatrix<f64>, rows: &[&[f64]]) -> bool {
        m.nrows() == rows.len()
            && rows
                .iter()
                .enumerate()
                .all(|(i, row)| (0..m.ncols()).all(|j| m[(i, j)] == row[j]))
    }

    #[test]
    fn parses_single_arc_file() {
        let g = Digraph::parse_edge_list("2 1\n1 0 1.0").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.arcs(), &[Arc::new(1, 0, 1.0)]);
    }

    #[test]
    fn weight_defaults_to_one() {
        let g = Digraph::parse_edge_list("3 2\n2 1\n1 0").unwrap();
        assert_eq!(g.arcs(), &[Arc::new(2, 1, 1.0), Arc::new(1, 0, 1.0)]);
    }

    #[test]
    fn rejects_self_loop_with_line_number() {
        let err = Digraph::parse_edge_list("2 1\n0 0 1.0").unwrap_err();
        assert_eq!(err, ParseError::SelfLoop { line: 2, vertex: 0 });
    }

    #[test]
    fn rejects_duplicate_arc() {
        let err = Digraph::parse_edge_list("2 2\n0 1\n0 1 3.5").unwrap_err();
        assert_eq!(
            err,
            ParseError::DuplicateArc {
                line: 3,
                tail: 0,
                head: 1
            }
        );
    }

    #[test]
    fn rejects_bad_weights() {
        for w in ["0", "-1", "nan", "inf"] {
            let text = format!("2 1\n0 1 {w}");
            assert!(matches!(
                Digraph::parse_edge_list(&text),
                Err(ParseError::BadWeight { line: 2, .. })
            ));
        }
    }

    #[test]
    fn rejects_out_of_range_vertex() {
        let err = Digraph::parse_edge_list("2 1\n0 2").unwrap_err();
        assert_eq!(
            err,
            ParseError::VertexOutOfRange {
                line: 2,
                vertex: 2,
                n: 2
            }
        );
    }

    #[test]
    fn rejects_arc_count_mismatch() {
        assert_eq!(
            Digraph::parse_edge_list("3 2\n0 1"),
            Err(ParseError::TooFewArcs {
                declared: 2,
                found: 1
            })
        );
        assert_eq!(
            Digraph::parse_edge_list("3 1\n0 1\n1 2"),
            Err(ParseError::TooManyArcs {
                line: 3,
                declared: 1
            })
        );
    }

    #[test]
    fn skips_comments_blanks_and_crlf() {
        let g = Digraph::parse_edge_list("# a comment\r\n\r\n2 1\r\n# another\r\n1 0 2.5\r\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.arcs(), &[Arc::new(1, 0, 2.5)]);
    }

    #[test]
    fn rejects_zero_vertices() {
        assert_eq!(
            Digraph::parse_edge_list("0 0"),
            Err(ParseError::ZeroVertices { line: 1 })
        );
        assert_eq!(Digraph::new(0, vec![]), Err(DigraphError::ZeroVertices));
    }

    #[test]
    fn laplacian_of_two_vertex_converging_tree() {
        let g = Digraph::from_pairs(2, &[(1, 0)]).unwrap();
        let l = laplacian(&g);
        assert!(matrix_eq(l.matrix(), &[&[0.0, 0.0], &[-1.0, 1.0]]));
    }

    #[test]
    fn laplacian_of_empty_graph_is_zero() {
        let g = Digraph::from_pairs(2, &[]).unwrap();
        let l = laplacian(&g);
        assert!(matrix_eq(l.matrix(), &[&[0.0, 0.0], &[0.0, 0.0]]));
    }

    #[test]
    fn laplacian_of_asymmetric_two_cycle() {
        let g = Digraph::new(2, vec![Arc::new(0, 1, 2.0), Arc::new(1, 0, 1.0)]).unwrap();
        let l = laplacian(&g);
        assert!(matrix_eq(l.matrix(), &[&[2.0, -2.0], &[-1.0, 1.0]]));
        assert_eq!(l.max_diagonal(), 2.0);
    }

    #[test]
    fn edge_list_round_trip_is_bit_exact() {
        let g = Digraph::new(
            4,
            vec![
                Arc::new(0, 1, 0.1),
                Arc::new(1, 2, 3.75),
                Arc::new(3, 0, 9.999999999),
            ],
        )
        .unwrap();
        let back = Digraph::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(back, g);
        assert_eq!(
            LaplacianMatrix::of(&back).matrix(),
            LaplacianMatrix::of(&g).matrix()
        );
    }
}
