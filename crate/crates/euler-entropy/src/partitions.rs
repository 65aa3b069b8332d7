//! Eulerian partitions (pairings of the darts at every vertex), uniform
//! sampling, exhaustive enumeration, induced closed trails, and the exact
//! identity tying the expected 2^(#trails) to the Eulerian-orientation
//! count:
//!
//!   rho(G) = rho_hat(G) + (1/n) ln E 2^{|T(P)|},   P uniform on pairings,
//!
//! whose integer form is checked exactly on enumerable graphs.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinatorics::{binomial, odd_double_factorial};
use crate::error::{Error, Result};
use crate::graph::{Dart, MultiGraph};
use crate::orientations::{big_ln, count_eulerian_orientations_capped, pauling_estimate};

/// Default cap on the number of partitions for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Number of bootstrap resamples for Monte Carlo confidence intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 2000;

/// A pairing of the darts at every vertex: `pair[d]` is the dart matched
/// with `d` at their common owner. Fixed-point-free involution per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EulerianPartition {
    pair: Vec<Dart>,
}

impl EulerianPartition {
    /// Build from an explicit dart pairing, validating the involution, the
    /// absence of fixed points, and that matched darts share an owner.
    pub fn from_pair_map(g: &MultiGraph, pair: Vec<Dart>) -> Result<Self> {
        if pair.len() != g.num_darts() {
            return Err(Error::InvalidParam(format!(
                "pair map has {} entries for {} darts",
                pair.len(),
                g.num_darts()
            )));
        }
        for d in 0..pair.len() as Dart {
            let p = pair[d as usize];
            if p as usize >= pair.len() || p == d || pair[p as usize] != d {
                return Err(Error::InvalidParam(format!("pairing is not a fixed-point-free involution at dart {d}")));
            }
            if g.dart_owner(d) != g.dart_owner(p) {
                return Err(Error::InvalidParam(format!("darts {d} and {p} are paired across vertices")));
            }
        }
        Ok(EulerianPartition { pair })
    }

    #[inline]
    pub fn pair(&self, d: Dart) -> Dart {
        self.pair[d as usize]
    }

    pub fn pair_map(&self) -> &[Dart] {
        &self.pair
    }

    pub(crate) fn set_pair(&mut self, a: Dart, b: Dart) {
        self.pair[a as usize] = b;
        self.pair[b as usize] = a;
    }
}

/// A closed trail stored as its dart cycle `[out_0, in_0, out_1, in_1, ...]`
/// where `in_i` is the edge partner of `out_i` and `out_{i+1}` is paired
/// with `in_i` at their vertex. Length is the number of edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trail {
    pub darts: Vec<Dart>,
}

impl Trail {
    pub fn len(&self) -> usize {
        self.darts.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// Corner triples `(vertex, in_dart, out_dart)`: the trail arrives on
    /// `in_dart` and departs on `out_dart`, both owned by `vertex`.
    pub fn corners(&self, g: &MultiGraph) -> Vec<(usize, Dart, Dart)> {
        let l = self.len();
        (0..l)
            .map(|i| {
                let in_d = self.darts[2 * i + 1];
                let out_d = self.darts[(2 * i + 2) % (2 * l)];
                (g.dart_owner(in_d), in_d, out_d)
            })
            .collect()
    }

    /// Number of distinct vertices the trail visits.
    pub fn distinct_vertices(&self, g: &MultiGraph) -> usize {
        let mut vs: Vec<usize> = self.darts.iter().step_by(2).map(|&d| g.dart_owner(d)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs.len()
    }

    /// True when every corner pair of the trail is matched in `p`.
    pub fn is_induced_by(&self, g: &MultiGraph, p: &EulerianPartition) -> bool {
        self.corners(g).iter().all(|&(_, i, o)| p.pair(i) == o)
    }
}

/// The closed trails induced by a partition; they partition the edge set.
#[derive(Debug, Clone)]
pub struct TrailSet {
    pub trails: Vec<Trail>,
}

impl TrailSet {
    pub fn total_length(&self) -> usize {
        self.trails.iter().map(Trail::len).sum()
    }
}

/// Follow edge-partner then pairing-partner from each unvisited dart.
/// Each dart occurs exactly once across all trails; trails start at their
/// smallest out-dart, which fixes rotation and direction deterministically.
pub fn extract_trails(g: &MultiGraph, p: &EulerianPartition) -> TrailSet {
    let nd = g.num_darts();
    let mut visited = vec![false; nd];
    let mut trails = Vec::new();
    for start in 0..nd as Dart {
        if visited[start as usize] {
            continue;
        }
        let mut darts = Vec::new();
        let mut out = start;
        loop {
            let inn = g.dart_partner(out);
            visited[out as usize] = true;
            visited[inn as usize] = true;
            darts.push(out);
            darts.push(inn);
            out = p.pair(inn);
            if out == start {
                break;
            }
        }
        trails.push(Trail { darts });
    }
    TrailSet { trails }
}

/// Count induced trails without materialising them.
pub fn count_trails(g: &MultiGraph, p: &EulerianPartition) -> usize {
    let nd = g.num_darts();
    let mut visited = vec![false; nd];
    let mut count = 0;
    for start in 0..nd as Dart {
        if visited[start as usize] {
            continue;
        }
        count += 1;
        let mut out = start;
        loop {
            let inn = g.dart_partner(out);
            visited[out as usize] = true;
            visited[inn as usize] = true;
            out = p.pair(inn);
            if out == start {
                break;
            }
        }
    }
    count
}

/// Trail statistics of one partition: the split into short (at most `k`
/// distinct vertices) and long trails, and per-vertex incidence counts.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionStats {
    /// Total number of induced trails |T(P)|.
    pub t: usize,
    /// Trails with at most `k` distinct vertices.
    pub s_k: usize,
    /// The remaining trails: `t - s_k`.
    pub l_k: usize,
    /// `x[i]` = number of trails containing vertex `i`.
    pub x: Vec<u32>,
    pub k: usize,
}

impl PartitionStats {
    /// Total vertex-trail incidences: sum of x[i], equal to the sum over
    /// trails of their distinct-vertex counts.
    pub fn x_total(&self) -> u64 {
        self.x.iter().map(|&v| v as u64).sum()
    }
}

pub fn partition_stats(g: &MultiGraph, p: &EulerianPartition, k: usize) -> PartitionStats {
    let ts = extract_trails(g, p);
    let mut x = vec![0u32; g.n()];
    let mut s_k = 0;
    for trail in &ts.trails {
        let mut vs: Vec<usize> = trail.darts.iter().step_by(2).map(|&d| g.dart_owner(d)).collect();
        vs.sort_unstable();
        vs.dedup();
        if vs.len() <= k {
            s_k += 1;
        }
        for v in vs {
            x[v] += 1;
        }
    }
    let t = ts.trails.len();
    PartitionStats { t, s_k, l_k: t - s_k, x, k }
}

/// Number of pairings at a single vertex of even degree d: (d-1)!!.
pub fn pairings_per_vertex(d: usize) -> Result<BigUint> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidParam(format!("pairings need even d >= 2, got {d}")));
    }
    Ok(odd_double_factorial(d as u64 - 1))
}

/// Total number of Eulerian partitions: the product over vertices of
/// (deg(v) - 1)!!.
pub fn num_partitions(g: &MultiGraph) -> Result<BigUint> {
    g.validate_eulerian_input(false)?;
    let mut total = BigUint::one();
    for v in 0..g.n() {
        total *= odd_double_factorial(g.degree(v) as u64 - 1);
    }
    Ok(total)
}

/// Draw a uniform Eulerian partition, deterministic in the seed.
/// Equivalent to `sample_partition_stream(g, seed, 0)`.
pub fn sample_partition(g: &MultiGraph, seed: u64) -> Result<EulerianPartition> {
    sample_partition_stream(g, seed, 0)
}

/// Draw the `stream`-th partition of the seeded family. Streams are
/// independent ChaCha counter streams, so parallel callers get identical
/// results regardless of evaluation order.
pub fn sample_partition_stream(g: &MultiGraph, seed: u64, stream: u64) -> Result<EulerianPartition> {
    g.validate_eulerian_input(false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    Ok(sample_with_rng(g, &mut rng))
}

fn sample_with_rng(g: &MultiGraph, rng: &mut impl Rng) -> EulerianPartition {
    let mut pair = vec![0 as Dart; g.num_darts()];
    let mut scratch: Vec<Dart> = Vec::new();
    for v in 0..g.n() {
        scratch.clear();
        scratch.extend_from_slice(g.darts_at(v));
        // Repeatedly match the first unmatched dart with a uniform other
        // unmatched dart; every matching has probability 1/(d-1)!!.
        let mut i = 0;
        while i < scratch.len() {
            let j = rng.gen_range(i + 1..scratch.len());
            scratch.swap(i + 1, j);
            pair[scratch[i] as usize] = scratch[i + 1];
            pair[scratch[i + 1] as usize] = scratch[i];
            i += 2;
        }
    }
    EulerianPartition { pair }
}

/// All perfect matchings of `darts`, lexicographic: the first dart is
/// matched with each later dart in ascending order, recursively.
fn all_matchings(darts: &[Dart]) -> Vec<Vec<(Dart, Dart)>> {
    if darts.is_empty() {
        return vec![Vec::new()];
    }
    let first = darts[0];
    let mut out = Vec::new();
    for i in 1..darts.len() {
        let partner = darts[i];
        let rest: Vec<Dart> = darts[1..].iter().copied().filter(|&d| d != partner).collect();
        for mut sub in all_matchings(&rest) {
            sub.insert(0, (first, partner));
            out.push(sub);
        }
    }
    out
}

/// Exhaustive iterator over all Eulerian partitions, lexicographic by
/// per-vertex matching index.
pub struct PartitionIter {
    per_vertex: Vec<Vec<Vec<(Dart, Dart)>>>,
    counter: Vec<usize>,
    num_darts: usize,
    done: bool,
}

impl PartitionIter {
    pub fn len_exact(&self) -> BigUint {
        self.per_vertex.iter().map(|m| BigUint::from(m.len())).product()
    }
}

impl Iterator for PartitionIter {
    type Item = EulerianPartition;

    fn next(&mut self) -> Option<EulerianPartition> {
        if self.done {
            return None;
        }
        let mut pair = vec![0 as Dart; self.num_darts];
        for (v, &idx) in self.counter.iter().enumerate() {
            for &(a, b) in &self.per_vertex[v][idx] {
                pair[a as usize] = b;
                pair[b as usize] = a;
            }
        }
        // Advance the mixed-radix counter, most significant vertex first.
        let mut pos = self.counter.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.counter[pos] += 1;
            if self.counter[pos] < self.per_vertex[pos].len() {
                break;
            }
            self.counter[pos] = 0;
        }
        Some(EulerianPartition { pair })
    }
}

/// Enumerate every Eulerian partition of `g`, provided the total count
/// stays within `cap`.
pub fn enumerate_partitions(g: &MultiGraph, cap: u64) -> Result<PartitionIter> {
    g.validate_eulerian_input(false)?;
    let total = num_partitions(g)?;
    if total > BigUint::from(cap) {
        return Err(Error::EnumerationCapExceeded { required: total.to_string(), cap });
    }
    let per_vertex: Vec<Vec<Vec<(Dart, Dart)>>> =
        (0..g.n()).map(|v| all_matchings(g.darts_at(v))).collect();
    Ok(PartitionIter {
        counter: vec![0; g.n()],
        num_darts: g.num_darts(),
        done: g.n() == 0,
        per_vertex,
    })
}

/// Exact sum of 2^{|T(P)|} over all partitions, with the integer identity
/// check against the orientation count:
///
///   sum_P 2^{|T(P)|} * C(d, d/2)^n  ==  EO(G) * ((d-1)!!)^n * 2^{nd/2}.
#[derive(Debug, Clone)]
pub struct ExactE2T {
    pub sum_2t: BigUint,
    pub num_partitions: BigUint,
    /// E 2^{|T(P)|} as a rational.
    pub mean: BigRational,
    pub identity_lhs: BigUint,
    pub identity_rhs: BigUint,
    pub identity_holds: bool,
    pub eo: BigUint,
}

pub fn exact_e2t(g: &MultiGraph, enumeration_cap: u64, edge_cap: usize) -> Result<ExactE2T> {
    g.validate_eulerian_input(true)?;
    let d = g.regular_degree().ok_or_else(|| Error::InvalidParam("empty graph".into()))? as u64;
    let n = g.n() as u32;

    let mut sum_2t = BigUint::zero();
    for p in enumerate_partitions(g, enumeration_cap)? {
        sum_2t += BigUint::one() << count_trails(g, &p);
    }
    let total = num_partitions(g)?;

    let eo = count_eulerian_orientations_capped(g, edge_cap, 1)?.eo;
    let identity_lhs = &sum_2t * binomial(d, d / 2).pow(n);
    let identity_rhs = &eo * odd_double_factorial(d - 1).pow(n) * (BigUint::one() << (g.n() * d as usize / 2));

    Ok(ExactE2T {
        mean: BigRational::new(BigInt::from(sum_2t.clone()), BigInt::from(total.clone())),
        identity_holds: identity_lhs == identity_rhs,
        sum_2t,
        num_partitions: total,
        identity_lhs,
        identity_rhs,
        eo,
    })
}

/// Monte Carlo estimate of rho via the pairing identity.
#[derive(Debug, Clone, Serialize)]
pub struct MCEstimate {
    pub n: usize,
    pub d: usize,
    pub samples: u64,
    pub seed: u64,
    pub rho_hat: f64,
    pub rho_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    #[serde(rename = "log_mean_2T")]
    pub log_mean_2t: f64,
}

/// Estimate rho = rho_hat + (1/n) ln E 2^{|T(P)|} from `samples` uniform
/// partitions.
///
/// Trail counts are small integers, so the samples are histogrammed; the
/// mean of 2^T is then a streaming log-sum-exp over the histogram bins and
/// the percentile bootstrap resamples the histogram. Merging histograms is
/// integer addition, which keeps the result bit-identical for every thread
/// count and evaluation order.
pub fn mc_estimate(
    g: &MultiGraph,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<MCEstimate> {
    g.validate_eulerian_input(true)?;
    if samples < 100 {
        return Err(Error::InvalidParam(format!("need at least 100 samples, got {samples}")));
    }
    let d = g.regular_degree().ok_or_else(|| Error::InvalidParam("empty graph".into()))?;
    let rho_hat = pauling_estimate(d)?;

    let max_t = g.m() / 2 + 1;
    let hist = if threads <= 1 {
        histogram_range(g, seed, 0, samples, max_t)
    } else {
        let chunk = samples.div_ceil(threads as u64);
        let mut parts: Vec<Vec<u64>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|w| {
                    let lo = (w * chunk).min(samples);
                    let hi = ((w + 1) * chunk).min(samples);
                    scope.spawn(move || histogram_range(g, seed, lo, hi - lo, max_t))
                })
                .collect();
            parts = handles.into_iter().map(|h| h.join().expect("worker panicked")).collect();
        });
        let mut hist = vec![0u64; max_t + 1];
        for part in parts {
            for (i, c) in part.into_iter().enumerate() {
                hist[i] += c;
            }
        }
        hist
    };

    let log_mean = log_mean_2t(&hist, samples);
    let n = g.n() as f64;

    // Percentile bootstrap over histogram resamples, seeded on a stream
    // disjoint from the sampling streams.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let prefix: Vec<u64> = hist
        .iter()
        .scan(0u64, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let mut boot = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut resampled = vec![0u64; hist.len()];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        resampled.fill(0);
        for _ in 0..samples {
            let r = rng.gen_range(0..samples);
            let bin = prefix.partition_point(|&acc| acc <= r);
            resampled[bin] += 1;
        }
        boot.push(rho_hat + log_mean_2t(&resampled, samples) / n);
    }
    boot.sort_by(|a, b| a.total_cmp(b));
    let lo_idx = (BOOTSTRAP_RESAMPLES as f64 * 0.025).floor() as usize;
    let hi_idx = (BOOTSTRAP_RESAMPLES as f64 * 0.975).ceil() as usize - 1;

    Ok(MCEstimate {
        n: g.n(),
        d,
        samples,
        seed,
        rho_hat,
        rho_estimate: rho_hat + log_mean / n,
        ci_low: boot[lo_idx],
        ci_high: boot[hi_idx],
        log_mean_2t: log_mean,
    })
}

fn histogram_range(g: &MultiGraph, seed: u64, start: u64, count: u64, max_t: usize) -> Vec<u64> {
    let mut hist = vec![0u64; max_t + 1];
    for i in start..start + count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let p = sample_with_rng(g, &mut rng);
        hist[count_trails(g, &p)] += 1;
    }
    hist
}

/// ln( (1/N) sum_t hist[t] 2^t ) by log-sum-exp over the bins.
fn log_mean_2t(hist: &[u64], total: u64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let terms: Vec<f64> = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(t, &c)| (c as f64).ln() + t as f64 * ln2)
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln() - (total as f64).ln()
}

/// Exact probability mass function over a small integer support.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    /// (value, probability), sorted by value, probabilities summing to 1.
    pub probs: Vec<(u32, BigRational)>,
}

impl Pmf {
    pub fn mean(&self) -> BigRational {
        self.probs
            .iter()
            .map(|(v, p)| BigRational::from(BigInt::from(*v)) * p)
            .sum()
    }

    /// CSV rows `value,prob_num,prob_den`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,prob_num,prob_den\n");
        for (v, p) in &self.probs {
            out.push_str(&format!("{v},{},{}\n", p.numer(), p.denom()));
        }
        out
    }
}

/// Law of the number of trails through one vertex of a degree-d graph
/// under a uniform pairing: 1 plus independent Bernoulli(1/(2j-1)) terms
/// for j = 2..d/2, convolved exactly.
pub fn xi_pmf_theoretical(d: usize) -> Result<Pmf> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidParam(format!("need even d >= 2, got {d}")));
    }
    let half = d / 2;
    // probs[t] = Pr(X = t + 1)
    let mut probs = vec![BigRational::zero(); half];
    probs[0] = BigRational::one();
    for j in 2..=half {
        let q = BigRational::new(BigInt::one(), BigInt::from(2 * j as i64 - 1));
        let not_q = BigRational::one() - &q;
        for t in (0..half).rev() {
            let stay = &probs[t] * &not_q;
            let up = if t > 0 { &probs[t - 1] * &q } else { BigRational::zero() };
            probs[t] = stay + up;
        }
    }
    Ok(Pmf {
        probs: probs
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(t, p)| (t as u32 + 1, p))
            .collect(),
    })
}

/// Same law by exhausting ordered pairs of fixed-point-free involutions on
/// d letters and counting the cycles each union forms. Oracle scale.
pub fn xi_pmf_bruteforce(d: usize) -> Result<Pmf> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidParam(format!("need even d >= 2, got {d}")));
    }
    if d > 10 {
        return Err(Error::InvalidParam(format!("brute force supports d <= 10, got {d}")));
    }
    let letters: Vec<Dart> = (0..d as Dart).collect();
    let matchings = all_matchings(&letters);
    let as_map = |m: &Vec<(Dart, Dart)>| {
        let mut map = vec![0usize; d];
        for &(a, b) in m {
            map[a as usize] = b as usize;
            map[b as usize] = a as usize;
        }
        map
    };
    let maps: Vec<Vec<usize>> = matchings.iter().map(as_map).collect();
    let mut counts = vec![0u64; d / 2 + 1];
    for m1 in &maps {
        for m2 in &maps {
            let mut seen = vec![false; d];
            let mut cycles = 0;
            for start in 0..d {
                if seen[start] {
                    continue;
                }
                cycles += 1;
                let mut x = start;
                loop {
                    seen[x] = true;
                    let y = m1[x];
                    seen[y] = true;
                    x = m2[y];
                    if x == start {
                        break;
                    }
                }
            }
            counts[cycles] += 1;
        }
    }
    let total = BigInt::from(maps.len() as u64 * maps.len() as u64);
    Ok(Pmf {
        probs: counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(v, c)| (v as u32, BigRational::new(BigInt::from(c), total.clone())))
            .collect(),
    })
}

/// Exact expectation of the total vertex-trail incidence count X over a
/// uniform pairing of a d-regular graph on n vertices:
/// n * sum_{i=1}^{d/2} 1/(2i-1).
pub fn expected_x(d: usize, n: usize) -> Result<BigRational> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidParam(format!("need even d >= 2, got {d}")));
    }
    let sum: BigRational = (1..=d / 2)
        .map(|i| BigRational::new(BigInt::one(), BigInt::from(2 * i as i64 - 1)))
        .sum();
    Ok(sum * BigRational::from(BigInt::from(n as i64)))
}

/// f64 view of a big rational, for report output.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    // to_f64 on Ratio<BigInt> is exact-ish only for small values; do it via
    // string-free mantissa arithmetic on the parts.
    let num = r.numer();
    let den = r.denom();
    match (num.to_f64(), den.to_f64()) {
        (Some(a), Some(b)) if b.is_finite() && a.is_finite() => a / b,
        _ => {
            let sign = if num < &BigInt::zero() { -1.0 } else { 1.0 };
            let ln = big_ln(&num.magnitude().clone()) - big_ln(&den.magnitude().clone());
            sign * ln.exp()
        }
    }
}
