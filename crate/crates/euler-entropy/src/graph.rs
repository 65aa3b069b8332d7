//! Dart-based loopless multigraph.
//!
//! Every edge is split into two darts (half-edges), one at each endpoint.
//! Edge `e` owns darts `2e` and `2e + 1`; `partner` swaps them. Pairings of
//! darts at a vertex are first-class objects in the partition machinery, so
//! the dart structure is the primary representation and adjacency is derived.

use crate::error::{Error, Result};

/// Dart identifier, dense in `[0, 2m)`.
pub type Dart = u32;

/// An immutable loopless multigraph on vertices `[0, n)`.
///
/// Parallel edges are allowed, loops are not. Construction validates both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    /// Owning vertex of each dart.
    owner: Vec<u32>,
    /// Incident dart ids per vertex, in input order.
    vertex_darts: Vec<Vec<Dart>>,
}

impl MultiGraph {
    /// Build from an explicit edge list. Edge `i` gets darts `2i` (at `u`)
    /// and `2i + 1` (at `v`).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut owner = Vec::with_capacity(edges.len() * 2);
        let mut vertex_darts = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n {
                return Err(Error::VertexOutOfRange { line: i + 2, v: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { line: i + 2, v, n });
            }
            if u == v {
                return Err(Error::LoopEdge { line: i + 2, v: u });
            }
            let d0 = (2 * i) as Dart;
            let d1 = d0 + 1;
            owner.push(u as u32);
            owner.push(v as u32);
            vertex_darts[u].push(d0);
            vertex_darts[v].push(d1);
        }
        Ok(MultiGraph { n, owner, vertex_darts })
    }

    /// Parse the line-oriented edge-list format: a header `n m`, then `m`
    /// lines `u v`. Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>, lineno: usize| -> Result<usize> {
                tok.ok_or(Error::Parse {
                    line: lineno + 1,
                    msg: "expected two integers".into(),
                })?
                .parse()
                .map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: "expected two integers".into(),
                })
            };
            let a = parse(it.next(), lineno)?;
            let b = parse(it.next(), lineno)?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "trailing tokens".into(),
                });
            }
            match header {
                None => header = Some((a, b)),
                Some((n, _)) => {
                    if a >= n {
                        return Err(Error::VertexOutOfRange { line: lineno + 1, v: a, n });
                    }
                    if b >= n {
                        return Err(Error::VertexOutOfRange { line: lineno + 1, v: b, n });
                    }
                    if a == b {
                        return Err(Error::LoopEdge { line: lineno + 1, v: a });
                    }
                    edges.push((a, b));
                }
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 1,
            msg: "missing header line \"n m\"".into(),
        })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        MultiGraph::from_edges(n, &edges)
    }

    /// Serialize in the same edge-list format `parse_edge_list` reads.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for e in 0..self.m() {
            let (u, v) = self.edge_endpoints(e);
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.owner.len() / 2
    }

    pub fn num_darts(&self) -> usize {
        self.owner.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertex_darts[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// The other dart of the same edge.
    #[inline]
    pub fn dart_partner(&self, d: Dart) -> Dart {
        d ^ 1
    }

    #[inline]
    pub fn dart_owner(&self, d: Dart) -> usize {
        self.owner[d as usize] as usize
    }

    #[inline]
    pub fn dart_edge(&self, d: Dart) -> usize {
        (d / 2) as usize
    }

    pub fn darts_at(&self, v: usize) -> &[Dart] {
        &self.vertex_darts[v]
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        (self.owner[2 * e] as usize, self.owner[2 * e + 1] as usize)
    }

    /// Neighbour reached by crossing dart `d` away from its owner.
    #[inline]
    pub fn dart_head(&self, d: Dart) -> usize {
        self.dart_owner(self.dart_partner(d))
    }

    /// `Some(d)` if the graph is d-regular.
    pub fn regular_degree(&self) -> Option<usize> {
        if self.n == 0 {
            return None;
        }
        let d = self.degree(0);
        (1..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    /// True when no two edges share both endpoints.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        (0..self.m()).all(|e| {
            let (u, v) = self.edge_endpoints(e);
            seen.insert((u.min(v), u.max(v)))
        })
    }

    /// Check even degrees everywhere; with `require_regular` also check all
    /// degrees equal. Errors name the offending vertex.
    pub fn validate_eulerian_input(&self, require_regular: bool) -> Result<()> {
        for v in 0..self.n {
            if self.degree(v) % 2 != 0 {
                return Err(Error::OddDegree { vertex: v, degree: self.degree(v) });
            }
        }
        if require_regular {
            let expected = if self.n > 0 { self.degree(0) } else { 0 };
            for v in 0..self.n {
                if self.degree(v) != expected {
                    return Err(Error::NotRegular { vertex: v, got: self.degree(v), expected });
                }
            }
        }
        Ok(())
    }

    /// Adjacency matrix with parallel-edge multiplicities.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u64>> {
        let mut a = vec![vec![0u64; self.n]; self.n];
        for e in 0..self.m() {
            let (u, v) = self.edge_endpoints(e);
            a[u][v] += 1;
            a[v][u] += 1;
        }
        a
    }

    /// Girth: length of the shortest cycle, `None` for forests. Parallel
    /// edges give girth 2. BFS from every vertex; the root lying on a
    /// shortest cycle yields the exact value.
    pub fn girth(&self) -> Option<u64> {
        let mut best: Option<u64> = None;
        let mut dist = vec![u64::MAX; self.n];
        let mut via_edge = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        for root in 0..self.n {
            dist.fill(u64::MAX);
            via_edge.fill(usize::MAX);
            queue.clear();
            dist[root] = 0;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                if best.is_some_and(|b| 2 * dist[u] >= b) {
                    continue;
                }
                for &d in &self.vertex_darts[u] {
                    let e = self.dart_edge(d);
                    if e == via_edge[u] {
                        continue;
                    }
                    let w = self.dart_head(d);
                    if dist[w] == u64::MAX {
                        dist[w] = dist[u] + 1;
                        via_edge[w] = e;
                        queue.push_back(w);
                    } else {
                        // Non-tree edge closes a cycle through the root of
                        // length at most dist[u] + dist[w] + 1.
                        let cand = dist[u] + dist[w] + 1;
                        if best.is_none_or(|b| cand < b) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
        best
    }

    /// Cartesian product: vertex `(u, v)` is index `u * h.n + v`.
    pub fn cartesian_product(&self, h: &MultiGraph) -> MultiGraph {
        let n = self.n * h.n;
        let mut edges = Vec::with_capacity(self.m() * h.n + h.m() * self.n);
        for e in 0..self.m() {
            let (u, up) = self.edge_endpoints(e);
            for v in 0..h.n {
                edges.push((u * h.n + v, up * h.n + v));
            }
        }
        for e in 0..h.m() {
            let (v, vp) = h.edge_endpoints(e);
            for u in 0..self.n {
                edges.push((u * h.n + v, u * h.n + vp));
            }
        }
        MultiGraph::from_edges(n, &edges).expect("product of valid graphs is valid")
    }

    /// Disjoint union; the second graph's vertices are shifted by `self.n`.
    pub fn disjoint_union(&self, other: &MultiGraph) -> MultiGraph {
        let mut edges: Vec<(usize, usize)> = (0..self.m()).map(|e| self.edge_endpoints(e)).collect();
        for e in 0..other.m() {
            let (u, v) = other.edge_endpoints(e);
            edges.push((u + self.n, v + self.n));
        }
        MultiGraph::from_edges(self.n + other.n, &edges).expect("union of valid graphs is valid")
    }

    /// Relabel vertices: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> MultiGraph {
        assert_eq!(perm.len(), self.n);
        let edges: Vec<(usize, usize)> = (0..self.m())
            .map(|e| {
                let (u, v) = self.edge_endpoints(e);
                (perm[u], perm[v])
            })
            .collect();
        MultiGraph::from_edges(self.n, &edges).expect("relabelling preserves validity")
    }

    /// Edge multiset as sorted endpoint pairs, for isomorphism-by-identity
    /// comparisons after relabelling.
    pub fn canonical_edge_list(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = (0..self.m())
            .map(|e| {
                let (u, v) = self.edge_endpoints(e);
                (u.min(v), u.max(v))
            })
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Structural invariants: partner involution, owner consistency,
    /// degree sum. Used by tests; cheap enough to run on fixtures.
    pub fn check_invariants(&self) -> bool {
        let darts = self.num_darts();
        if darts % 2 != 0 {
            return false;
        }
        for d in 0..darts as Dart {
            let p = self.dart_partner(d);
            if p == d || self.dart_partner(p) != d {
                return false;
            }
            if self.dart_owner(d) == self.dart_owner(p) {
                return false;
            }
        }
        let mut seen = vec![false; darts];
        for (v, ds) in self.vertex_darts.iter().enumerate() {
            for &d in ds {
                if self.dart_owner(d) != v || seen[d as usize] {
                    return false;
                }
                seen[d as usize] = true;
            }
        }
        seen.into_iter().all(|s| s) && self.degrees().iter().sum::<usize>() == darts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, GeneratorSpec};

    #[test]
    fn parse_triangle() {
        let g = MultiGraph::parse_edge_list("3 3\n0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        assert!(g.check_invariants());
    }

    #[test]
    fn parse_double_edge() {
        let g = MultiGraph::parse_edge_list("2 2\n0 1\n0 1\n").unwrap();
        assert_eq!(g.degrees(), vec![2, 2]);
        assert!(!g.is_simple());
        assert_eq!(g.girth(), Some(2));
    }

    #[test]
    fn parse_rejects_loop() {
        let err = MultiGraph::parse_edge_list("2 1\n0 0\n").unwrap_err();
        assert!(matches!(err, Error::LoopEdge { .. }));
    }

    #[test]
    fn parse_rejects_out_of_range_and_malformed() {
        assert!(matches!(
            MultiGraph::parse_edge_list("2 1\n0 5\n").unwrap_err(),
            Error::VertexOutOfRange { v: 5, .. }
        ));
        assert!(matches!(
            MultiGraph::parse_edge_list("2 1\n0 x\n").unwrap_err(),
            Error::Parse { .. }
        ));
        assert!(matches!(
            MultiGraph::parse_edge_list("2 2\n0 1\n").unwrap_err(),
            Error::Parse { .. }
        ));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let g = MultiGraph::parse_edge_list("# triangle\n3 3\n\n0 1 # first\n1 2\n2 0\n").unwrap();
        assert_eq!(g.m(), 3);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = generate(&GeneratorSpec::Hypercube(3)).unwrap();
        let h = MultiGraph::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g.canonical_edge_list(), h.canonical_edge_list());
    }

    #[test]
    fn validate_eulerian() {
        let k5 = generate(&GeneratorSpec::Complete(5)).unwrap();
        assert!(k5.validate_eulerian_input(true).is_ok());

        let k4 = generate(&GeneratorSpec::Complete(4)).unwrap();
        assert!(matches!(
            k4.validate_eulerian_input(false).unwrap_err(),
            Error::OddDegree { .. }
        ));

        // star K_{1,4}: odd leaves fail regardless of the regularity flag
        let star = MultiGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!(matches!(
            star.validate_eulerian_input(false).unwrap_err(),
            Error::OddDegree { .. }
        ));
        assert!(star.validate_eulerian_input(true).is_err());
    }

    #[test]
    fn adjacency_matrix_counts_multiplicity() {
        let k3 = generate(&GeneratorSpec::Complete(3)).unwrap();
        assert_eq!(k3.adjacency_matrix(), vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);

        let dbl = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(dbl.adjacency_matrix(), vec![vec![0, 2], vec![2, 0]]);

        let q3 = generate(&GeneratorSpec::Hypercube(3)).unwrap();
        for row in q3.adjacency_matrix() {
            assert_eq!(row.iter().sum::<u64>(), 3);
        }
    }

    #[test]
    fn girth_cases() {
        let c7 = generate(&GeneratorSpec::Cycle(7)).unwrap();
        assert_eq!(c7.girth(), Some(7));

        let q4 = generate(&GeneratorSpec::Hypercube(4)).unwrap();
        assert_eq!(q4.girth(), Some(4));

        let p4 = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(p4.girth(), None);
    }

    #[test]
    fn product_girths() {
        let c3 = generate(&GeneratorSpec::Cycle(3)).unwrap();
        let c5 = generate(&GeneratorSpec::Cycle(5)).unwrap();
        assert_eq!(c3.cartesian_product(&c3).girth(), Some(3));
        assert_eq!(c5.cartesian_product(&c5).girth(), Some(4));
    }

    #[test]
    fn k2_square_is_c4() {
        let k2 = generate(&GeneratorSpec::Complete(2)).unwrap();
        let c4 = generate(&GeneratorSpec::Cycle(4)).unwrap();
        let p = k2.cartesian_product(&k2);
        assert_eq!(p.n(), 4);
        assert_eq!(p.m(), 4);
        assert_eq!(p.regular_degree(), Some(2));
        assert_eq!(p.girth(), c4.girth());
    }

    #[test]
    fn product_edge_count_formula() {
        let c3 = generate(&GeneratorSpec::Cycle(3)).unwrap();
        let p = c3.cartesian_product(&c3);
        assert_eq!(p.n(), 9);
        assert_eq!(p.m(), 18);
        assert_eq!(p.regular_degree(), Some(4));
    }

    #[test]
    fn product_commutes_up_to_relabelling() {
        let g = generate(&GeneratorSpec::Cycle(3)).unwrap();
        let h = generate(&GeneratorSpec::Complete(4)).unwrap();
        let gh = g.cartesian_product(&h);
        let hg = h.cartesian_product(&g);
        // (u, v) <-> (v, u): index u * nh + v in gh maps to v * ng + u in hg.
        let perm: Vec<usize> = (0..gh.n())
            .map(|idx| {
                let (u, v) = (idx / h.n(), idx % h.n());
                v * g.n() + u
            })
            .collect();
        assert_eq!(gh.relabel(&perm).canonical_edge_list(), hg.canonical_edge_list());
    }

    #[test]
    fn product_associates_up_to_relabelling() {
        let a = generate(&GeneratorSpec::Cycle(3)).unwrap();
        let b = generate(&GeneratorSpec::Complete(2)).unwrap();
        let c = generate(&GeneratorSpec::Cycle(4)).unwrap();
        let left = a.cartesian_product(&b).cartesian_product(&c);
        let right = a.cartesian_product(&b.cartesian_product(&c));
        // ((u, v), w) and (u, (v, w)) agree under the flat index already.
        assert_eq!(left.canonical_edge_list(), right.canonical_edge_list());
    }

    #[test]
    fn disjoint_union_and_relabel() {
        let c3 = generate(&GeneratorSpec::Cycle(3)).unwrap();
        let u = c3.disjoint_union(&c3);
        assert_eq!(u.n(), 6);
        assert_eq!(u.m(), 6);
        assert!(u.check_invariants());

        let k4 = generate(&GeneratorSpec::Complete(4)).unwrap();
        let r = k4.relabel(&[2, 0, 3, 1]);
        assert_eq!(r.canonical_edge_list(), k4.canonical_edge_list());
    }
}
