//! Graph family generators and the small DSL the CLI uses to name them.
//!
//! DSL grammar, one spec per string:
//!   cycle:N | complete:N | hypercube:D | torus:AxBx... | circulant:N:o1,o2,...
//!   | rr:N:D[:SEED] | product:(spec),(spec),...

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// Default seed used wherever the caller does not supply one. Fixed, never
/// time-based: reproducibility is the product.
pub const DEFAULT_SEED: u64 = 1729;

/// Attempt cap for the rejection loop of the random-regular sampler.
pub const DEFAULT_REJECTION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Cycle(usize),
    Complete(usize),
    Hypercube(u32),
    Torus(Vec<usize>),
    Circulant { n: usize, offsets: Vec<usize> },
    RandomRegular { n: usize, d: usize, seed: u64 },
    Product(Vec<GeneratorSpec>),
}

impl GeneratorSpec {
    /// Parse a DSL string such as `torus:3x3x3` or
    /// `product:(cycle:5),(cycle:5)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::InvalidGenerator(format!("{s:?}: {msg}"));
        let (kind, rest) = match s.find(':') {
            Some(i) => (&s[..i], &s[i + 1..]),
            None => return Err(bad("expected kind:params")),
        };
        let int = |tok: &str| -> Result<usize> {
            tok.trim().parse().map_err(|_| bad("expected an integer"))
        };
        match kind {
            "cycle" => Ok(GeneratorSpec::Cycle(int(rest)?)),
            "complete" => Ok(GeneratorSpec::Complete(int(rest)?)),
            "hypercube" => Ok(GeneratorSpec::Hypercube(int(rest)? as u32)),
            "torus" => {
                let sides = rest
                    .split('x')
                    .map(int)
                    .collect::<Result<Vec<_>>>()?;
                Ok(GeneratorSpec::Torus(sides))
            }
            "circulant" => {
                let (n_str, offs) = rest
                    .split_once(':')
                    .ok_or_else(|| bad("expected circulant:N:o1,o2"))?;
                let offsets = offs.split(',').map(int).collect::<Result<Vec<_>>>()?;
                Ok(GeneratorSpec::Circulant { n: int(n_str)?, offsets })
            }
            "rr" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() < 2 || parts.len() > 3 {
                    return Err(bad("expected rr:N:D[:SEED]"));
                }
                let seed = if parts.len() == 3 {
                    parts[2].trim().parse().map_err(|_| bad("bad seed"))?
                } else {
                    DEFAULT_SEED
                };
                Ok(GeneratorSpec::RandomRegular { n: int(parts[0])?, d: int(parts[1])?, seed })
            }
            "product" => {
                let factors = split_parenthesized(rest).ok_or_else(|| bad("expected product:(a),(b)"))?;
                if factors.is_empty() {
                    return Err(bad("product needs at least one factor"));
                }
                Ok(GeneratorSpec::Product(
                    factors.iter().map(|f| GeneratorSpec::parse(f)).collect::<Result<Vec<_>>>()?,
                ))
            }
            _ => Err(bad("unknown kind")),
        }
    }
}

impl std::fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratorSpec::Cycle(n) => write!(f, "cycle:{n}"),
            GeneratorSpec::Complete(n) => write!(f, "complete:{n}"),
            GeneratorSpec::Hypercube(d) => write!(f, "hypercube:{d}"),
            GeneratorSpec::Torus(sides) => {
                let s: Vec<String> = sides.iter().map(|x| x.to_string()).collect();
                write!(f, "torus:{}", s.join("x"))
            }
            GeneratorSpec::Circulant { n, offsets } => {
                let s: Vec<String> = offsets.iter().map(|x| x.to_string()).collect();
                write!(f, "circulant:{n}:{}", s.join(","))
            }
            GeneratorSpec::RandomRegular { n, d, seed } => write!(f, "rr:{n}:{d}:{seed}"),
            GeneratorSpec::Product(fs) => {
                let s: Vec<String> = fs.iter().map(|x| format!("({x})")).collect();
                write!(f, "product:{}", s.join(","))
            }
        }
    }
}

/// Split `"(a),(b),(c)"` at top-level commas, stripping one layer of parens.
fn split_parenthesized(s: &str) -> Option<Vec<String>> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                if depth > 0 {
                    cur.push(ch);
                }
                depth += 1;
            }
            ')' => {
                depth = depth.checked_sub(1)?;
                if depth > 0 {
                    cur.push(ch);
                } else {
                    parts.push(cur.clone());
                    cur.clear();
                }
            }
            ',' if depth == 0 => {}
            _ if depth > 0 => cur.push(ch),
            c if c.is_whitespace() => {}
            _ => return None,
        }
    }
    (depth == 0 && cur.is_empty()).then_some(parts)
}

/// Instantiate the named family. Pure function of (spec, seed).
pub fn generate(spec: &GeneratorSpec) -> Result<MultiGraph> {
    match spec {
        GeneratorSpec::Cycle(n) => cycle(*n),
        GeneratorSpec::Complete(n) => complete(*n),
        GeneratorSpec::Hypercube(d) => hypercube(*d),
        GeneratorSpec::Torus(sides) => torus(sides),
        GeneratorSpec::Circulant { n, offsets } => circulant(*n, offsets),
        GeneratorSpec::RandomRegular { n, d, seed } => {
            random_regular(*n, *d, *seed, DEFAULT_REJECTION_CAP)
        }
        GeneratorSpec::Product(factors) => {
            let graphs = factors.iter().map(generate).collect::<Result<Vec<_>>>()?;
            let mut it = graphs.into_iter();
            let first = it.next().expect("parse guarantees at least one factor");
            Ok(it.fold(first, |acc, g| acc.cartesian_product(&g)))
        }
    }
}

pub fn cycle(n: usize) -> Result<MultiGraph> {
    if n < 3 {
        return Err(Error::InvalidGenerator(format!("cycle length {n} < 3")));
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    MultiGraph::from_edges(n, &edges)
}

pub fn complete(n: usize) -> Result<MultiGraph> {
    if n < 1 {
        return Err(Error::InvalidGenerator("complete graph needs n >= 1".into()));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    MultiGraph::from_edges(n, &edges)
}

pub fn hypercube(dim: u32) -> Result<MultiGraph> {
    if dim < 1 || dim > 24 {
        return Err(Error::InvalidGenerator(format!("hypercube dimension {dim} out of range [1, 24]")));
    }
    let n = 1usize << dim;
    let mut edges = Vec::new();
    for u in 0..n {
        for b in 0..dim {
            let v = u ^ (1 << b);
            if u < v {
                edges.push((u, v));
            }
        }
    }
    MultiGraph::from_edges(n, &edges)
}

pub fn torus(sides: &[usize]) -> Result<MultiGraph> {
    if sides.is_empty() {
        return Err(Error::InvalidGenerator("torus needs at least one side".into()));
    }
    for &s in sides {
        if s < 3 {
            return Err(Error::InvalidGenerator(format!("torus side {s} < 3")));
        }
    }
    let mut g = cycle(sides[0])?;
    for &s in &sides[1..] {
        g = g.cartesian_product(&cycle(s)?);
    }
    Ok(g)
}

pub fn circulant(n: usize, offsets: &[usize]) -> Result<MultiGraph> {
    if n < 3 {
        return Err(Error::InvalidGenerator(format!("circulant order {n} < 3")));
    }
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for &o in offsets {
        if o < 1 || o > n / 2 {
            return Err(Error::InvalidGenerator(format!(
                "circulant offset {o} out of range [1, {}]",
                n / 2
            )));
        }
        if !seen.insert(o) {
            return Err(Error::InvalidGenerator(format!("duplicate circulant offset {o}")));
        }
        // The antipodal offset contributes each edge once.
        let reach = if 2 * o == n { n / 2 } else { n };
        for i in 0..reach {
            edges.push((i, (i + o) % n));
        }
    }
    MultiGraph::from_edges(n, &edges)
}

/// Uniform simple d-regular graph via the pairing model: shuffle nd points,
/// pair consecutive halves, reject on loops or repeated edges. Deterministic
/// for a fixed seed.
pub fn random_regular(n: usize, d: usize, seed: u64, attempt_cap: u64) -> Result<MultiGraph> {
    if d >= n {
        return Err(Error::InvalidGenerator(format!("random regular needs d < n, got d={d} n={n}")));
    }
    if (n * d) % 2 != 0 {
        return Err(Error::InvalidGenerator(format!("random regular needs n*d even, got n={n} d={d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    let half = n * d / 2;
    for attempt in 0.. {
        if attempt >= attempt_cap {
            return Err(Error::RejectionBudgetExhausted { attempts: attempt });
        }
        points.shuffle(&mut rng);
        let mut seen = std::collections::HashSet::with_capacity(half);
        let mut edges = Vec::with_capacity(half);
        let mut ok = true;
        for i in 0..half {
            let (u, v) = (points[i], points[i + half]);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                ok = false;
                break;
            }
            edges.push((u, v));
        }
        if ok {
            return MultiGraph::from_edges(n, &edges);
        }
    }
    unreachable!()
}
