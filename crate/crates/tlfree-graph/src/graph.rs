//! Bipartite graphs with Perron-Frobenius data.
//!
//! Vertices are split into an even part Γ₊ and an odd part Γ₋. Edges are
//! stored as `(plus index, minus index)` and referred to by their position,
//! so parallel edges are allowed. Every edge is read as starting at its even
//! endpoint: `s(e)` is the Γ₊ vertex and `t(e)` the Γ₋ vertex.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use tlfree_core::scalar::{format_rational, parse_rational, rational_to_f64};
use tlfree_core::{Error, Rational, Result};

/// Tolerance of the floating-point eigen-relation check, relative to
/// `max(1, δ·μ_v)`.
pub const EIGEN_TOLERANCE: f64 = 1e-10;

/// Vertex of a bipartite graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Plus(usize),
    Minus(usize),
}

/// Connected bipartite graph with a positive eigenvector μ and eigenvalue δ.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteGraph {
    plus: Vec<String>,
    minus: Vec<String>,
    edges: Vec<(usize, usize)>,
    mu_plus: Vec<f64>,
    mu_minus: Vec<f64>,
    delta: f64,
    exact: Option<ExactWeights>,
}

/// Rational Perron-Frobenius data, kept when the input is exact and
/// satisfies the eigen-relation exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactWeights {
    pub mu_plus: Vec<Rational>,
    pub mu_minus: Vec<Rational>,
    pub delta: Rational,
}

/// A weight as read from a graph file: exact when the text is rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Exact(Rational),
    Float(f64),
}

impl Weight {
    pub fn value(&self) -> f64 {
        match self {
            Weight::Exact(q) => rational_to_f64(q),
            Weight::Float(x) => *x,
        }
    }

    fn exact(&self) -> Option<&Rational> {
        match self {
            Weight::Exact(q) => Some(q),
            Weight::Float(_) => None,
        }
    }
}

impl BipartiteGraph {
    /// Build and validate a graph. `mu` must assign a weight to every vertex.
    pub fn new(
        plus: Vec<String>,
        minus: Vec<String>,
        edges: Vec<(String, String)>,
        mu: &BTreeMap<String, Weight>,
        delta: Weight,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in plus.iter().chain(&minus) {
            if !seen.insert(v.as_str()) {
                return Err(Error::arg(format!("duplicate vertex label {v:?}")));
            }
        }
        if plus.is_empty() || minus.is_empty() {
            return Err(Error::arg("both parts of the graph must be nonempty"));
        }
        let find = |list: &[String], v: &str| list.iter().position(|x| x == v);
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b) in &edges {
            let e = match (find(&plus, a), find(&minus, b)) {
                (Some(p), Some(m)) => (p, m),
                _ => match (find(&plus, b), find(&minus, a)) {
                    (Some(p), Some(m)) => (p, m),
                    _ => return Err(Error::arg(format!("edge ({a:?}, {b:?}) does not join Γ₊ to Γ₋"))),
                },
            };
            idx_edges.push(e);
        }
        let weight = |v: &String| mu.get(v).cloned().ok_or_else(|| Error::arg(format!("no μ for vertex {v:?}")));
        let w_plus: Vec<Weight> = plus.iter().map(weight).collect::<Result<_>>()?;
        let w_minus: Vec<Weight> = minus.iter().map(weight).collect::<Result<_>>()?;
        if let Some(extra) = mu.keys().find(|k| find(&plus, k).is_none() && find(&minus, k).is_none()) {
            return Err(Error::arg(format!("μ given for unknown vertex {extra:?}")));
        }
        let g = BipartiteGraph {
            plus,
            minus,
            edges: idx_edges,
            mu_plus: w_plus.iter().map(Weight::value).collect(),
            mu_minus: w_minus.iter().map(Weight::value).collect(),
            delta: delta.value(),
            exact: None,
        };
        g.check_connected()?;
        if !(g.delta > 0.0) || g.mu_plus.iter().chain(&g.mu_minus).any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::arg("μ and δ must be positive and finite"));
        }
        let exact = g.exact_weights(&w_plus, &w_minus, &delta);
        match exact {
            Some(ex) => Ok(BipartiteGraph { exact: Some(ex), ..g }),
            None => {
                g.check_eigen_relation()?;
                Ok(g)
            }
        }
    }

    fn exact_weights(&self, wp: &[Weight], wm: &[Weight], delta: &Weight) -> Option<ExactWeights> {
        let ex = ExactWeights {
            mu_plus: wp.iter().map(|w| w.exact().cloned()).collect::<Option<_>>()?,
            mu_minus: wm.iter().map(|w| w.exact().cloned()).collect::<Option<_>>()?,
            delta: delta.exact()?.clone(),
        };
        let mut sum_plus = vec![Rational::from_integer(0.into()); self.plus.len()];
        let mut sum_minus = vec![Rational::from_integer(0.into()); self.minus.len()];
        for &(p, m) in &self.edges {
            sum_plus[p] += &ex.mu_minus[m];
            sum_minus[m] += &ex.mu_plus[p];
        }
        let ok = sum_plus.iter().zip(&ex.mu_plus).all(|(s, mu)| *s == &ex.delta * mu)
            && sum_minus.iter().zip(&ex.mu_minus).all(|(s, mu)| *s == &ex.delta * mu);
        ok.then_some(ex)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.plus.len() + self.minus.len();
        let id = |v: Vertex| match v {
            Vertex::Plus(i) => i,
            Vertex::Minus(j) => self.plus.len() + j,
        };
        let mut adj = vec![Vec::new(); n];
        for &(p, m) in &self.edges {
            adj[id(Vertex::Plus(p))].push(id(Vertex::Minus(m)));
            adj[id(Vertex::Minus(m))].push(id(Vertex::Plus(p)));
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::arg("graph is not connected"))
        }
    }

    /// Largest violation of `Σ_{w ~ v} μ_w = δ·μ_v` over all vertices.
    pub fn eigen_defect(&self) -> f64 {
        let mut sum_plus = vec![0.0; self.plus.len()];
        let mut sum_minus = vec![0.0; self.minus.len()];
        for &(p, m) in &self.edges {
            sum_plus[p] += self.mu_minus[m];
            sum_minus[m] += self.mu_plus[p];
        }
        let rel = |s: f64, mu: f64| (s - self.delta * mu).abs() / (self.delta * mu).max(1.0);
        sum_plus
            .iter()
            .zip(&self.mu_plus)
            .chain(sum_minus.iter().zip(&self.mu_minus))
            .map(|(&s, &mu)| rel(s, mu))
            .fold(0.0, f64::max)
    }

    /// Fails unless μ is a δ-eigenvector of the adjacency matrix.
    pub fn check_eigen_relation(&self) -> Result<()> {
        let defect = self.eigen_defect();
        if defect <= EIGEN_TOLERANCE {
            Ok(())
        } else {
            Err(Error::arg(format!("μ is not a δ-eigenvector (defect {defect:e})")))
        }
    }

    /// Path graph A_n with quantum-integer weights μ_j = [j]_q and
    /// δ = 2cos(π/(n+1)). Odd-numbered vertices form Γ₊.
    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::arg("A_n needs n ≥ 2"));
        }
        let theta = std::f64::consts::PI / (n + 1) as f64;
        let label = |j: usize| format!("a{j}");
        let (mut plus, mut minus, mut edges) = (Vec::new(), Vec::new(), Vec::new());
        let mut mu = BTreeMap::new();
        for j in 1..=n {
            if j % 2 == 1 { plus.push(label(j)) } else { minus.push(label(j)) }
            let q = ((j as f64) * theta).sin() / theta.sin();
            let w = if (q - q.round()).abs() < 1e-12 { Weight::Exact(Rational::from_integer((q.round() as i64).into())) } else { Weight::Float(q) };
            mu.insert(label(j), w);
            if j < n {
                edges.push((label(j), label(j + 1)));
            }
        }
        let d = 2.0 * theta.cos();
        let delta = if (d - d.round()).abs() < 1e-12 { Weight::Exact(Rational::from_integer((d.round() as i64).into())) } else { Weight::Float(d) };
        BipartiteGraph::new(plus, minus, edges, &mu, delta)
    }

    /// The single-edge graph A_2 with μ ≡ 1 and δ = 1.
    pub fn single_edge() -> Self {
        BipartiteGraph::path(2).expect("A_2 is valid")
    }

    pub fn plus_labels(&self) -> &[String] {
        &self.plus
    }

    pub fn minus_labels(&self) -> &[String] {
        &self.minus
    }

    /// Edges as `(plus index, minus index)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mu_plus(&self) -> &[f64] {
        &self.mu_plus
    }

    pub fn mu_minus(&self) -> &[f64] {
        &self.mu_minus
    }

    /// Exact weights, when available.
    pub fn exact(&self) -> Option<&ExactWeights> {
        self.exact.as_ref()
    }

    /// Index in Γ₊ of `s(e)`.
    pub fn source(&self, e: usize) -> usize {
        self.edges[e].0
    }

    /// Index in Γ₋ of `t(e)`.
    pub fn target(&self, e: usize) -> usize {
        self.edges[e].1
    }

    pub fn plus_index(&self, label: &str) -> Option<usize> {
        self.plus.iter().position(|v| v == label)
    }

    /// Edges starting at the Γ₊ vertex `v`.
    pub fn edges_from(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].0 == v).collect()
    }
}

impl fmt::Display for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Γ₊={:?} Γ₋={:?} |E|={} δ={}", self.plus, self.minus, self.edges.len(), self.delta)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WeightRepr {
    Number(serde_json::Number),
    Text(String),
}

impl WeightRepr {
    fn into_weight(self) -> Result<Weight> {
        let text = match self {
            WeightRepr::Number(n) => n.to_string(),
            WeightRepr::Text(s) => s,
        };
        match parse_rational(&text) {
            Ok(q) => Ok(Weight::Exact(q)),
            Err(_) => text
                .trim()
                .parse::<f64>()
                .map(Weight::Float)
                .map_err(|_| Error::Parse(format!("bad weight {text:?}"))),
        }
    }

    fn from_weight(w: Weight) -> Self {
        match w {
            Weight::Exact(q) => WeightRepr::Text(format_rational(&q)),
            Weight::Float(x) => serde_json::Number::from_f64(x)
                .map(WeightRepr::Number)
                .unwrap_or_else(|| WeightRepr::Text(x.to_string())),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    plus: Vec<String>,
    minus: Vec<String>,
    edges: Vec<(String, String)>,
    mu: BTreeMap<String, WeightRepr>,
    delta: WeightRepr,
}

impl Serialize for BipartiteGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let w = |exact: Option<&Rational>, x: f64| match exact {
            Some(q) => Weight::Exact(q.clone()),
            None => Weight::Float(x),
        };
        let mut mu = BTreeMap::new();
        for (i, v) in self.plus.iter().enumerate() {
            let ex = self.exact.as_ref().map(|e| &e.mu_plus[i]);
            mu.insert(v.clone(), WeightRepr::from_weight(w(ex, self.mu_plus[i])));
        }
        for (j, v) in self.minus.iter().enumerate() {
            let ex = self.exact.as_ref().map(|e| &e.mu_minus[j]);
            mu.insert(v.clone(), WeightRepr::from_weight(w(ex, self.mu_minus[j])));
        }
        let repr = GraphRepr {
            plus: self.plus.clone(),
            minus: self.minus.clone(),
            edges: self.edges.iter().map(|&(p, m)| (self.plus[p].clone(), self.minus[m].clone())).collect(),
            mu,
            delta: WeightRepr::from_weight(w(self.exact.as_ref().map(|e| &e.delta), self.delta)),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BipartiteGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = GraphRepr::deserialize(d)?;
        let mu = repr
            .mu
            .into_iter()
            .map(|(k, v)| v.into_weight().map(|w| (k, w)))
            .collect::<Result<BTreeMap<_, _>>>()
            .map_err(D::Error::custom)?;
        let delta = repr.delta.into_weight().map_err(D::Error::custom)?;
        BipartiteGraph::new(repr.plus, repr.minus, repr.edges, &mu, delta).map_err(D::Error::custom)
    }
}
