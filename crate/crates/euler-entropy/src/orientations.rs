//! Exact counting of Eulerian orientations by pruned backtracking, the
//! residual entropy rho(G) = (1/n) log EO(G), and the Pauling estimate.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// Default cap on the number of edges for exact backtracking.
pub const DEFAULT_EDGE_CAP: usize = 34;

/// Exact Eulerian-orientation count together with the residual entropy.
#[derive(Debug, Clone)]
pub struct EOCount {
    pub eo: BigUint,
    /// (1/n) ln EO(G).
    pub rho: f64,
    pub n: usize,
    pub m: usize,
}

/// Per-vertex search state: signed out-minus-in balance of oriented edges
/// and the number of incident edges still undecided.
#[derive(Clone)]
struct Balance {
    imbalance: Vec<i32>,
    remaining: Vec<i32>,
}

impl Balance {
    fn decide(&mut self, tail: usize, head: usize) -> bool {
        self.imbalance[tail] += 1;
        self.imbalance[head] -= 1;
        self.remaining[tail] -= 1;
        self.remaining[head] -= 1;
        self.imbalance[tail].abs() <= self.remaining[tail]
            && self.imbalance[head].abs() <= self.remaining[head]
    }

    fn undo(&mut self, tail: usize, head: usize) {
        self.imbalance[tail] -= 1;
        self.imbalance[head] += 1;
        self.remaining[tail] += 1;
        self.remaining[head] += 1;
    }
}

fn count_from(edges: &[(usize, usize)], state: &mut Balance, idx: usize) -> u64 {
    if idx == edges.len() {
        return 1;
    }
    let (u, v) = edges[idx];
    let mut total = 0;
    if state.decide(u, v) {
        total += count_from(edges, state, idx + 1);
    }
    state.undo(u, v);
    if state.decide(v, u) {
        total += count_from(edges, state, idx + 1);
    }
    state.undo(v, u);
    total
}

/// Count Eulerian orientations exactly with the default edge cap.
pub fn count_eulerian_orientations(g: &MultiGraph) -> Result<EOCount> {
    count_eulerian_orientations_capped(g, DEFAULT_EDGE_CAP, 1)
}

/// Count Eulerian orientations exactly.
///
/// Edges are processed in descending endpoint-degree-sum order (ties by
/// input order); a branch is abandoned as soon as some vertex's outstanding
/// imbalance exceeds its undecided incident edges. When every edge is
/// decided the pruning invariant forces all balances to zero, so leaves are
/// counted directly. Orientation-reversal symmetry halves the search: the
/// first edge is fixed and the count doubled.
///
/// With `threads > 1` the tree is split below a shallow frontier and the
/// partial counts summed; integer addition makes the result identical for
/// every thread count.
pub fn count_eulerian_orientations_capped(
    g: &MultiGraph,
    edge_cap: usize,
    threads: usize,
) -> Result<EOCount> {
    g.validate_eulerian_input(false)?;
    let m = g.m();
    if m > edge_cap {
        return Err(Error::EdgeCapExceeded { m, cap: edge_cap });
    }
    // Subtree counts are kept in u64; 2^(m-1) must fit even if the caller
    // raises the cap.
    if m > 60 {
        return Err(Error::EdgeCapExceeded { m, cap: 60 });
    }
    if m == 0 {
        return Ok(EOCount { eo: BigUint::one(), rho: 0.0, n: g.n(), m });
    }

    let mut edges: Vec<(usize, usize)> = (0..m).map(|e| g.edge_endpoints(e)).collect();
    edges.sort_by_key(|&(u, v)| std::cmp::Reverse(g.degree(u) + g.degree(v)));

    let mut state = Balance {
        imbalance: vec![0; g.n()],
        remaining: g.degrees().iter().map(|&d| d as i32).collect(),
    };

    // Fix the first edge's direction; reversal pairs orientations without
    // fixed points, so the total is exactly twice the restricted count.
    let (u0, v0) = edges[0];
    let feasible = state.decide(u0, v0);
    debug_assert!(feasible, "first decision cannot violate a degree bound");

    let restricted = if threads <= 1 {
        BigUint::from(count_from(&edges, &mut state, 1))
    } else {
        count_parallel(&edges, state, threads)
    };
    let eo = restricted * 2u32;

    let ln = big_ln(&eo);
    Ok(EOCount { rho: ln / g.n() as f64, eo, n: g.n(), m })
}

/// Expand the decision tree breadth-first to a work list, then process the
/// list in parallel chunks.
fn count_parallel(edges: &[(usize, usize)], root: Balance, threads: usize) -> BigUint {
    let target = threads * 8;
    let mut frontier: Vec<(Balance, usize)> = vec![(root, 1)];
    while frontier.len() < target {
        let Some(pos) = frontier.iter().position(|(_, idx)| *idx < edges.len()) else {
            break;
        };
        let (state, idx) = frontier.swap_remove(pos);
        let (u, v) = edges[idx];
        for (tail, head) in [(u, v), (v, u)] {
            let mut child = state.clone();
            if child.decide(tail, head) {
                frontier.push((child, idx + 1));
            }
        }
    }
    let jobs = std::sync::Mutex::new(frontier);
    let total = std::sync::Mutex::new(BigUint::zero());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let job = jobs.lock().unwrap().pop();
                let Some((mut state, idx)) = job else { break };
                let part = count_from(edges, &mut state, idx);
                *total.lock().unwrap() += part;
            });
        }
    });
    total.into_inner().unwrap()
}

/// Natural log of a positive big integer via a 64-bit mantissa.
pub fn big_ln(x: &BigUint) -> f64 {
    debug_assert!(!x.is_zero());
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 53;
    let mantissa = (x >> shift).to_f64().expect("53-bit mantissa");
    mantissa.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Pauling estimate ln C(d, d/2) - (d/2) ln 2 for even degree d.
pub fn pauling_estimate(d: usize) -> Result<f64> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidParam(format!("Pauling estimate needs even d >= 2, got {d}")));
    }
    let central = binomial(d as u64, d as u64 / 2);
    Ok(big_ln(&central) - (d as f64 / 2.0) * std::f64::consts::LN_2)
}

/// Residual entropy versus the Pauling estimate on a regular graph.
#[derive(Debug, Clone, Serialize)]
pub struct LiebWuReport {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub eo_decimal_string: String,
    pub rho: f64,
    pub rho_hat: f64,
    pub gap: f64,
}

/// Compute rho and the Pauling estimate, and report the gap. The lower
/// bound rho >= rho_hat holds for every even-degree graph; regularity is
/// required here because the estimate as computed uses a single degree.
pub fn lieb_wu_check(g: &MultiGraph, edge_cap: usize, threads: usize) -> Result<LiebWuReport> {
    g.validate_eulerian_input(true)?;
    let d = g.regular_degree().ok_or_else(|| Error::InvalidParam("empty graph".into()))?;
    let count = count_eulerian_orientations_capped(g, edge_cap, threads)?;
    let rho_hat = pauling_estimate(d)?;
    Ok(LiebWuReport {
        n: count.n,
        m: count.m,
        d,
        eo_decimal_string: count.eo.to_string(),
        rho: count.rho,
        rho_hat,
        gap: count.rho - rho_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circulant, complete, cycle, generate, torus, GeneratorSpec};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Oracle: enumerate all 2^m orientations and count the balanced ones.
    fn eo_bruteforce(g: &MultiGraph) -> u64 {
        let m = g.m();
        assert!(m <= 24, "oracle scale only");
        let mut count = 0u64;
        for mask in 0u64..(1 << m) {
            let mut bal = vec![0i32; g.n()];
            for e in 0..m {
                let (u, v) = g.edge_endpoints(e);
                if mask >> e & 1 == 0 {
                    bal[u] += 1;
                    bal[v] -= 1;
                } else {
                    bal[u] -= 1;
                    bal[v] += 1;
                }
            }
            if bal.iter().all(|&b| b == 0) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn cycles_have_two_orientations() {
        for n in 3..=8 {
            let g = cycle(n).unwrap();
            let c = count_eulerian_orientations(&g).unwrap();
            assert_eq!(c.eo, BigUint::from(2u32), "C_{n}");
            assert!((c.rho - (2.0f64).ln() / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn k5_matches_bruteforce() {
        let g = complete(5).unwrap();
        let fast = count_eulerian_orientations(&g).unwrap();
        assert_eq!(fast.eo, BigUint::from(eo_bruteforce(&g)));
    }

    #[test]
    fn octahedron_matches_bruteforce() {
        let g = circulant(6, &[1, 2]).unwrap();
        let fast = count_eulerian_orientations(&g).unwrap();
        assert_eq!(fast.eo, BigUint::from(eo_bruteforce(&g)));
    }

    #[test]
    fn torus_3x3_matches_bruteforce() {
        let g = torus(&[3, 3]).unwrap();
        let fast = count_eulerian_orientations(&g).unwrap();
        assert_eq!(fast.eo, BigUint::from(eo_bruteforce(&g)));
    }

    #[test]
    fn rejects_odd_degree_and_cap() {
        assert!(count_eulerian_orientations(&complete(4).unwrap()).is_err());
        let g = torus(&[3, 3, 3]).unwrap(); // m = 81 > 34
        assert!(matches!(
            count_eulerian_orientations(&g).unwrap_err(),
            Error::EdgeCapExceeded { .. }
        ));
    }

    #[test]
    fn relabelling_invariance() {
        let g = circulant(6, &[1, 2]).unwrap();
        let base = count_eulerian_orientations(&g).unwrap().eo;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let mut perm: Vec<usize> = (0..g.n()).collect();
            perm.shuffle(&mut rng);
            let h = g.relabel(&perm);
            assert_eq!(count_eulerian_orientations(&h).unwrap().eo, base);
        }
    }

    #[test]
    fn disjoint_union_multiplies() {
        let a = cycle(4).unwrap();
        let b = complete(5).unwrap();
        let ab = a.disjoint_union(&b);
        let ea = count_eulerian_orientations(&a).unwrap().eo;
        let eb = count_eulerian_orientations(&b).unwrap().eo;
        let eab = count_eulerian_orientations(&ab).unwrap().eo;
        assert_eq!(eab, ea * eb);
    }

    #[test]
    fn eo_is_even_on_fixtures() {
        for spec in ["cycle:5", "complete:5", "circulant:6:1,2", "torus:3x3"] {
            let g = generate(&GeneratorSpec::parse(spec).unwrap()).unwrap();
            let c = count_eulerian_orientations(&g).unwrap();
            assert_eq!(&c.eo % 2u32, BigUint::ZERO, "{spec}");
        }
    }

    #[test]
    fn thread_split_is_exact() {
        let g = torus(&[3, 3]).unwrap();
        let one = count_eulerian_orientations_capped(&g, 34, 1).unwrap();
        let four = count_eulerian_orientations_capped(&g, 34, 4).unwrap();
        assert_eq!(one.eo, four.eo);
    }

    #[test]
    fn pauling_values() {
        assert!(pauling_estimate(2).unwrap().abs() < 1e-15);
        assert!((pauling_estimate(4).unwrap() - 1.5f64.ln()).abs() < 1e-15);
        assert!((pauling_estimate(6).unwrap() - 2.5f64.ln()).abs() < 1e-15);
        assert!(pauling_estimate(3).is_err());
    }

    #[test]
    fn lieb_wu_on_fixtures() {
        for spec in ["cycle:5", "complete:5", "circulant:6:1,2", "torus:3x3"] {
            let g = generate(&GeneratorSpec::parse(spec).unwrap()).unwrap();
            let rep = lieb_wu_check(&g, 34, 1).unwrap();
            assert!(rep.gap >= -1e-12, "{spec}: gap {}", rep.gap);
        }
        let c5 = cycle(5).unwrap();
        let rep = lieb_wu_check(&c5, 34, 1).unwrap();
        assert!((rep.rho - (2.0f64).ln() / 5.0).abs() < 1e-15);
        assert_eq!(rep.rho_hat, 0.0);
    }

    #[test]
    fn big_ln_accuracy() {
        let x = BigUint::from(3u32).pow(200);
        let expected = 200.0 * 3.0f64.ln();
        assert!((big_ln(&x) - expected).abs() < 1e-9 * expected);
    }
}
