//! Graphs, matchings, matching covers, edge colorings and the built-in
//! graph catalog.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::Spin;

/// Largest vertex count accepted by the exhaustive combinatorial searches.
pub const MAX_SEARCH_VERTICES: usize = 16;

const SEARCH_NODE_BUDGET: u64 = 50_000_000;

/// An edge `(u, v)` with `u < v`.
pub type Edge = (usize, usize);

/// A connected simple graph with an optional per-vertex spin override.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    spins: Vec<Spin>,
    overridden: BTreeMap<usize, Spin>,
}

impl Graph {
    /// Builds a graph. Edges are normalized to `u < v` and sorted.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::with_spins(n, edges, BTreeMap::new())
    }

    pub fn with_spins(n: usize, edges: &[(usize, usize)], spins: BTreeMap<usize, Spin>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) references a missing vertex")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("loop at vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
        }
        if let Some(&v) = spins.keys().find(|&&v| v >= n) {
            return Err(Error::InvalidGraph(format!("spin override for missing vertex {v}")));
        }
        let edges: Vec<Edge> = set.into_iter().collect();
        let mut deg = vec![0usize; n];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let spin_of = |v: usize| spins.get(&v).copied().unwrap_or(Spin::from_twice(deg[v] as u32));
        let g = Self {
            n,
            spins: (0..n).map(spin_of).collect(),
            edges,
            overridden: spins,
        };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        let e = (e.0.min(e.1), e.0.max(e.1));
        self.edges.binary_search(&e).ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Vertex spin: the override if present, otherwise half the degree.
    pub fn spin(&self, v: usize) -> Spin {
        self.spins[v]
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn spin_overrides(&self) -> &BTreeMap<usize, Spin> {
        &self.overridden
    }

    /// `S_e = S_u + S_v`.
    pub fn edge_spin(&self, e: usize) -> Spin {
        let (a, b) = self.edges[e];
        Spin::from_twice(self.spins[a].twice() + self.spins[b].twice())
    }

    /// Product of the local dimensions.
    pub fn hilbert_dim(&self) -> u128 {
        self.spins.iter().map(|s| s.dim() as u128).product()
    }

    fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// True if the two edges share a vertex.
    pub fn adjacent(&self, e: usize, f: usize) -> bool {
        let (a, b) = self.edges[e];
        let (c, d) = self.edges[f];
        e != f && (a == c || a == d || b == c || b == d)
    }

    /// Checks that the edge indices are distinct, in range and pairwise
    /// non-adjacent.
    pub fn is_matching(&self, edges: &[usize]) -> bool {
        let mut used = vec![false; self.n];
        let mut seen = BTreeSet::new();
        for &e in edges {
            if e >= self.edges.len() || !seen.insert(e) {
                return false;
            }
            let (a, b) = self.edges[e];
            if used[a] || used[b] {
                return false;
            }
            used[a] = true;
            used[b] = true;
        }
        true
    }

    pub fn degree_data(&self) -> DegreeData {
        let degrees = self.degrees();
        let s_e = (0..self.edges.len())
            .map(|e| self.edge_spin(e))
            .max()
            .unwrap_or(Spin::from_twice(0));
        DegreeData {
            max_degree: degrees.iter().copied().max().unwrap_or(0),
            degrees,
            s_e,
            g_overlap: s_e.twice() as i64 - 2,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        file.into_graph()
    }

    /// Plain-text form: one `u v` pair per line; `#` starts a comment.
    pub fn from_edge_list_str(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::InvalidGraph(format!("line {}: `{s}` is not a vertex index", i + 1)))
            };
            if parts.len() != 2 {
                return Err(Error::InvalidGraph(format!("line {}: expected two vertex indices", i + 1)));
            }
            edges.push((parse(parts[0])?, parse(parts[1])?));
        }
        let n = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Graph::new(n, &edges)
    }

    /// Reads a graph from a JSON file or a plain edge list.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if text.trim_start().starts_with('{') {
            Self::from_json_str(&text)
        } else {
            Self::from_edge_list_str(&text)
        }
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            spins: if self.overridden.is_empty() {
                None
            } else {
                Some(self.overridden.iter().map(|(v, s)| (v.to_string(), s.twice())).collect())
            },
        }
    }
}

/// On-disk graph representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    /// Vertex index (as a string key) to twice the spin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spins: Option<BTreeMap<String, u32>>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<Graph> {
        let mut spins = BTreeMap::new();
        for (k, t) in self.spins.unwrap_or_default() {
            let v: usize = k
                .parse()
                .map_err(|_| Error::InvalidGraph(format!("spin key `{k}` is not a vertex index")))?;
            spins.insert(v, Spin::from_twice(t));
        }
        let edges: Vec<Edge> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::with_spins(self.n, &edges, spins)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeData {
    pub degrees: Vec<usize>,
    pub max_degree: usize,
    /// Largest edge spin `S_E`.
    pub s_e: Spin,
    /// `g = 2 S_E - 2`.
    pub g_overlap: i64,
}

/// A set of pairwise non-adjacent edges, stored as sorted edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matching(Vec<usize>);

impl Matching {
    pub fn new(graph: &Graph, mut edges: Vec<usize>) -> Result<Self> {
        edges.sort_unstable();
        if !graph.is_matching(&edges) {
            return Err(Error::InvalidProtocol(format!("edge set {edges:?} is not a matching")));
        }
        Ok(Matching(edges))
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A list of matchings whose union is the edge set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchingCover(Vec<Matching>);

impl MatchingCover {
    pub fn new(graph: &Graph, matchings: Vec<Matching>) -> Result<Self> {
        let mut covered = vec![false; graph.edge_count()];
        for m in &matchings {
            if !graph.is_matching(m.edges()) {
                return Err(Error::InvalidProtocol(format!("{:?} is not a matching", m.edges())));
            }
            for &e in m.edges() {
                covered[e] = true;
            }
        }
        if let Some(e) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidProtocol(format!(
                "cover misses edge {:?}",
                graph.edges()[e]
            )));
        }
        Ok(Self(matchings))
    }

    /// Builds a cover from lists of edge indices.
    pub fn from_indices(graph: &Graph, classes: &[Vec<usize>]) -> Result<Self> {
        let ms = classes
            .iter()
            .map(|c| Matching::new(graph, c.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(graph, ms)
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.0.iter().map(Matching::len).collect()
    }

    /// True if the matchings are pairwise disjoint, i.e. an edge coloring.
    pub fn is_coloring(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.0.iter().flat_map(|m| m.edges()).all(|&e| seen.insert(e))
    }

    /// Each edge in its own class.
    pub fn trivial(graph: &Graph) -> Self {
        Self((0..graph.edge_count()).map(|e| Matching(vec![e])).collect())
    }

    /// Edge lists of every class, as vertex pairs.
    pub fn edge_lists(&self, graph: &Graph) -> Vec<Vec<Edge>> {
        self.0
            .iter()
            .map(|m| m.edges().iter().map(|&e| graph.edges()[e]).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingCensus {
    pub maximal: Vec<Matching>,
    pub maximum: Vec<Matching>,
    /// Matching number: size of a maximum matching.
    pub matching_number: usize,
}

fn guard(graph: &Graph) -> Result<()> {
    if graph.n() > MAX_SEARCH_VERTICES {
        return Err(Error::ResourceGuard(format!(
            "combinatorial search limited to {MAX_SEARCH_VERTICES} vertices, graph has {}",
            graph.n()
        )));
    }
    Ok(())
}

/// Lists every maximal and every maximum matching.
pub fn enumerate_matchings(graph: &Graph) -> Result<MatchingCensus> {
    guard(graph)?;
    let m = graph.edge_count();
    let mut all = Vec::new();
    let mut used = vec![false; graph.n()];
    let mut current = Vec::new();
    let mut budget = SEARCH_NODE_BUDGET;
    fn rec(
        g: &Graph,
        e: usize,
        m: usize,
        used: &mut [bool],
        current: &mut Vec<usize>,
        all: &mut Vec<Vec<usize>>,
        budget: &mut u64,
    ) -> Result<()> {
        if *budget == 0 {
            return Err(Error::ResourceGuard("matching enumeration exceeded its search budget".into()));
        }
        *budget -= 1;
        if e == m {
            all.push(current.clone());
            return Ok(());
        }
        let (a, b) = g.edges()[e];
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            current.push(e);
            rec(g, e + 1, m, used, current, all, budget)?;
            current.pop();
            used[a] = false;
            used[b] = false;
        }
        rec(g, e + 1, m, used, current, all, budget)
    }
    rec(graph, 0, m, &mut used, &mut current, &mut all, &mut budget)?;
    let maximal: Vec<Matching> = all
        .into_iter()
        .filter(|mm| {
            let mut used = vec![false; graph.n()];
            for &e in mm {
                let (a, b) = graph.edges()[e];
                used[a] = true;
                used[b] = true;
            }
            graph.edges().iter().all(|&(a, b)| used[a] || used[b])
        })
        .map(Matching)
        .collect();
    let matching_number = maximal.iter().map(Matching::len).max().unwrap_or(0);
    let maximum = maximal
        .iter()
        .filter(|m| m.len() == matching_number)
        .cloned()
        .collect();
    Ok(MatchingCensus {
        maximal,
        maximum,
        matching_number,
    })
}

/// Result of the exact edge-coloring search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    pub chromatic_index: usize,
    pub optimal: MatchingCover,
    pub trivial: MatchingCover,
}

/// Backtracking over edge colors with first-use symmetry breaking. Each
/// partition is produced once, classes ordered by their first edge.
struct ColoringSearch<'a> {
    graph: &'a Graph,
    k: usize,
    incident: Vec<Vec<usize>>,
    colors: Vec<usize>,
    budget: u64,
    limit: usize,
    found: Vec<Vec<usize>>,
}

impl<'a> ColoringSearch<'a> {
    fn new(graph: &'a Graph, k: usize, limit: usize) -> Self {
        let mut incident = vec![Vec::new(); graph.n()];
        for (i, &(a, b)) in graph.edges().iter().enumerate() {
            incident[a].push(i);
            incident[b].push(i);
        }
        Self {
            graph,
            k,
            incident,
            colors: vec![usize::MAX; graph.edge_count()],
            budget: SEARCH_NODE_BUDGET,
            limit,
            found: Vec::new(),
        }
    }

    fn run(&mut self) -> Result<()> {
        self.rec(0, 0)
    }

    fn rec(&mut self, e: usize, used: usize) -> Result<()> {
        if self.found.len() >= self.limit {
            return Ok(());
        }
        if self.budget == 0 {
            return Err(Error::ResourceGuard("edge-coloring search exceeded its budget".into()));
        }
        self.budget -= 1;
        if e == self.graph.edge_count() {
            self.found.push(self.colors.clone());
            return Ok(());
        }
        let (a, b) = self.graph.edges()[e];
        for col in 0..self.k.min(used + 1) {
            let clash = self.incident[a]
                .iter()
                .chain(&self.incident[b])
                .any(|&f| self.colors[f] == col);
            if clash {
                continue;
            }
            self.colors[e] = col;
            self.rec(e + 1, used.max(col + 1))?;
            self.colors[e] = usize::MAX;
            if self.found.len() >= self.limit {
                break;
            }
        }
        Ok(())
    }

    fn covers(&self) -> Vec<MatchingCover> {
        self.found
            .iter()
            .map(|cols| {
                let mut classes = vec![Vec::new(); self.k];
                for (e, &c) in cols.iter().enumerate() {
                    classes[c].push(e);
                }
                MatchingCover(classes.into_iter().filter(|c| !c.is_empty()).map(Matching).collect())
            })
            .collect()
    }
}

/// Chromatic index with one optimal coloring and the trivial coloring.
pub fn edge_colorings(graph: &Graph) -> Result<EdgeColoring> {
    guard(graph)?;
    let delta = graph.max_degree();
    for k in delta..=delta + 1 {
        let mut search = ColoringSearch::new(graph, k, 1);
        search.run()?;
        if let Some(cover) = search.covers().into_iter().next() {
            return Ok(EdgeColoring {
                chromatic_index: cover.len(),
                optimal: cover,
                trivial: MatchingCover::trivial(graph),
            });
        }
    }
    Err(Error::Numerical("no coloring with max degree + 1 colors found".into()))
}

/// Every coloring with `chromatic_index` classes, up to relabeling of the
/// colors, in lexicographic order of the class edge lists.
pub fn optimal_colorings(graph: &Graph, limit: usize) -> Result<Vec<MatchingCover>> {
    let k = edge_colorings(graph)?.chromatic_index;
    let mut search = ColoringSearch::new(graph, k, limit);
    search.run()?;
    let mut covers = search.covers();
    covers.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(covers)
}

/// Vertex chromatic number by exhaustive search.
pub fn chromatic_number(graph: &Graph) -> Result<usize> {
    guard(graph)?;
    let n = graph.n();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in graph.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    fn colorable(v: usize, k: usize, adj: &[Vec<usize>], col: &mut [usize], used: usize) -> bool {
        if v == adj.len() {
            return true;
        }
        for c in 0..k.min(used + 1) {
            if adj[v].iter().all(|&w| col[w] != c) {
                col[v] = c;
                if colorable(v + 1, k, adj, col, used.max(c + 1)) {
                    return true;
                }
                col[v] = usize::MAX;
            }
        }
        false
    }
    for k in 1..=n {
        let mut col = vec![usize::MAX; n];
        if colorable(0, k, &adj, &mut col, 0) {
            return Ok(k);
        }
    }
    Ok(n)
}

/// The cover `{M_1, ..., M_m}` of an odd cycle by maximum matchings, where
/// `M_j` pairs `(j-1, j), (j+1, j+2), ...` around the cycle.
pub fn cycle_matching_covers(n: usize, m: usize) -> Result<(Graph, MatchingCover)> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidArgument(format!("cycle cover needs odd n >= 3, got {n}")));
    }
    if !(3..=n).contains(&m) {
        return Err(Error::InvalidArgument(format!("cover size must lie in 3..={n}, got {m}")));
    }
    let g = closed_chain(n)?;
    let mut ms = Vec::new();
    for j in 0..m {
        let edges = (0..(n - 1) / 2)
            .map(|k| {
                let a = (j + 2 * k) % n;
                g.edge_index((a, (a + 1) % n)).expect("cycle edge")
            })
            .collect();
        ms.push(Matching::new(&g, edges)?);
    }
    let cover = MatchingCover::new(&g, ms)?;
    Ok((g, cover))
}

pub fn open_chain(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidGraph("open chain needs at least 2 vertices".into()));
    }
    let edges: Vec<Edge> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Graph::new(n, &edges)
}

pub fn closed_chain(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidGraph("closed chain needs at least 3 vertices".into()));
    }
    let edges: Vec<Edge> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(n, &edges)
}

/// Star on `n` vertices with centre `n - 1`.
pub fn star(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidGraph("star needs at least 2 vertices".into()));
    }
    let edges: Vec<Edge> = (0..n - 1).map(|i| (i, n - 1)).collect();
    Graph::new(n, &edges)
}

pub fn complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidGraph("complete graph needs at least 2 vertices".into()));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    Graph::new(n, &edges)
}

/// Edge lists of the 30 connected graphs on two to five vertices, indexed
/// from 1.
const ATLAS: [&[Edge]; 30] = [
    &[(0, 1)],
    &[(0, 1), (0, 2)],
    &[(0, 1), (0, 2), (1, 2)],
    &[(0, 3), (1, 3), (2, 3)],
    &[(0, 1), (0, 3), (1, 2)],
    &[(0, 3), (1, 2), (1, 3), (2, 3)],
    &[(0, 1), (0, 3), (1, 2), (2, 3)],
    &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)],
    &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    &[(0, 4), (1, 4), (2, 4), (3, 4)],
    &[(0, 1), (0, 4), (1, 2), (2, 3)],
    &[(0, 4), (1, 3), (2, 3), (3, 4)],
    &[(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)],
    &[(0, 4), (1, 4), (2, 3), (2, 4), (3, 4)],
    &[(0, 1), (0, 2), (0, 4), (1, 2), (2, 3)],
    &[(0, 1), (1, 3), (1, 4), (2, 3), (2, 4)],
    &[(0, 4), (1, 2), (1, 3), (2, 3), (3, 4)],
    &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)],
    &[(0, 1), (0, 3), (0, 4), (1, 2), (2, 3), (3, 4)],
    &[(0, 1), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4)],
    &[(0, 1), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
    &[(0, 1), (0, 4), (1, 4), (2, 3), (2, 4), (3, 4)],
    &[(0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
    &[(0, 1), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (3, 4)],
    &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 4)],
    &[(0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
    &[(0, 1), (0, 3), (0, 4), (1, 2), (1, 4), (2, 3), (2, 4), (3, 4)],
    &[(0, 1), (0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
    &[(0, 1), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
    &[
        (0, 1),
        (0, 2),
        (0, 3),
        (0, 4),
        (1, 2),
        (1, 3),
        (1, 4),
        (2, 3),
        (2, 4),
        (3, 4),
    ],
];

pub const ATLAS_SIZE: usize = ATLAS.len();

pub fn atlas(k: usize) -> Result<Graph> {
    if !(1..=ATLAS.len()).contains(&k) {
        return Err(Error::InvalidArgument(format!("atlas index {k} outside 1..={}", ATLAS.len())));
    }
    let edges = ATLAS[k - 1];
    let n = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(1);
    Graph::new(n, edges)
}

/// Two-dimensional lattice families with explicit edge colorings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lattice {
    Triangular,
    Kagome,
    SquareOctagon,
}

/// A finite open-boundary patch of a lattice with its periodic coloring.
#[derive(Clone, Debug)]
pub struct LatticePatch {
    pub lattice: Lattice,
    pub graph: Graph,
    pub coloring: MatchingCover,
}

struct PatchBuilder {
    index: HashMap<(usize, usize, usize), usize>,
    edges: Vec<(Edge, usize)>,
}

impl PatchBuilder {
    fn new() -> Self {
        Self {
            index: HashMap::new(),
            edges: Vec::new(),
        }
    }

    fn vertex(&mut self, key: (usize, usize, usize)) -> usize {
        let next = self.index.len();
        *self.index.entry(key).or_insert(next)
    }

    fn edge(&mut self, a: (usize, usize, usize), b: (usize, usize, usize), color: usize) {
        let (u, v) = (self.vertex(a), self.vertex(b));
        self.edges.push(((u.min(v), u.max(v)), color));
    }

    fn finish(self, lattice: Lattice) -> Result<LatticePatch> {
        let n = self.index.len();
        let list: Vec<Edge> = self.edges.iter().map(|&(e, _)| e).collect();
        let graph = Graph::new(n, &list)?;
        let k = self.edges.iter().map(|&(_, c)| c + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); k];
        for &(e, c) in &self.edges {
            classes[c].push(graph.edge_index(e).expect("edge present"));
        }
        let classes: Vec<Vec<usize>> = classes.into_iter().filter(|c| !c.is_empty()).collect();
        let coloring = MatchingCover::from_indices(&graph, &classes)?;
        Ok(LatticePatch {
            lattice,
            graph,
            coloring,
        })
    }
}

/// Kagome cell edge colors, period 2 in both directions. Index:
/// `[i % 2][j % 2][edge type]` with types AB, BC, CA of the up triangle and
/// B–A', A'–C', B–C' of the down triangle.
fn kagome_color(i: usize, j: usize, t: usize) -> usize {
    KAGOME_COLORS[i % 2][j % 2][t]
}

const KAGOME_COLORS: [[[usize; 6]; 2]; 2] = [
    [[0, 1, 2, 2, 0, 3], [0, 1, 2, 2, 0, 3]],
    [[3, 2, 1, 1, 3, 0], [3, 2, 1, 1, 3, 0]],
];

/// Builds a `rows x cols` patch (cells for kagome and square-octagon,
/// vertices for triangular) together with its edge coloring.
pub fn lattice_patch(lattice: Lattice, rows: usize, cols: usize) -> Result<LatticePatch> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("lattice patch needs positive size".into()));
    }
    let mut b = PatchBuilder::new();
    match lattice {
        Lattice::Triangular => {
            if rows * cols < 2 {
                return Err(Error::InvalidArgument("triangular patch needs two sites".into()));
            }
            for i in 0..rows {
                for j in 0..cols {
                    b.vertex((i, j, 0));
                }
            }
            for i in 0..rows {
                for j in 0..cols {
                    if i + 1 < rows {
                        b.edge((i, j, 0), (i + 1, j, 0), i % 2);
                    }
                    if j + 1 < cols {
                        b.edge((i, j, 0), (i, j + 1, 0), 2 + j % 2);
                    }
                    if i + 1 < rows && j >= 1 {
                        b.edge((i, j, 0), (i + 1, j - 1, 0), 4 + i % 2);
                    }
                }
            }
        }
        Lattice::Kagome => {
            // sites A = 0, B = 1, C = 2 of cell (i, j); the corner cell
            // (0, 0) touches no down triangle and is left out
            if rows < 2 || cols < 2 {
                return Err(Error::InvalidArgument("kagome patch needs at least 2x2 cells".into()));
            }
            for i in 0..rows {
                for j in 0..cols {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    b.edge((i, j, 0), (i, j, 1), kagome_color(i, j, 0));
                    b.edge((i, j, 1), (i, j, 2), kagome_color(i, j, 1));
                    b.edge((i, j, 2), (i, j, 0), kagome_color(i, j, 2));
                }
            }
            for i in 0..rows {
                for j in 1..cols {
                    if i + 1 < rows {
                        let (bb, a2, c2) = ((i, j, 1), (i + 1, j, 0), (i + 1, j - 1, 2));
                        b.edge(bb, a2, kagome_color(i, j, 3));
                        b.edge(a2, c2, kagome_color(i, j, 4));
                        b.edge(bb, c2, kagome_color(i, j, 5));
                    }
                }
            }
        }
        Lattice::SquareOctagon => {
            // square corners N = 0, E = 1, S = 2, W = 3
            for i in 0..rows {
                for j in 0..cols {
                    b.edge((i, j, 0), (i, j, 1), 0);
                    b.edge((i, j, 1), (i, j, 2), 1);
                    b.edge((i, j, 2), (i, j, 3), 0);
                    b.edge((i, j, 3), (i, j, 0), 1);
                    if j + 1 < cols {
                        b.edge((i, j, 1), (i, j + 1, 3), 2);
                    }
                    if i + 1 < rows {
                        b.edge((i, j, 0), (i + 1, j, 2), 2);
                    }
                }
            }
        }
    }
    b.finish(lattice)
}

fn parse_suffix(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse().ok()
}

fn parse_dims(name: &str, prefix: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix(prefix)?;
    let (r, c) = rest.split_once('x')?;
    Some((r.parse().ok()?, c.parse().ok()?))
}

/// Looks up a graph by catalog name: `chain-open-N`, `chain-closed-N`,
/// `star-N`, `complete-N`, `atlas-K` (1..=30), `triangular-RxC`,
/// `kagome-RxC`, `square-octagon-RxC`.
pub fn catalog(name: &str) -> Result<Graph> {
    let name = name.trim();
    if let Some(n) = parse_suffix(name, "chain-open-") {
        return open_chain(n);
    }
    if let Some(n) = parse_suffix(name, "chain-closed-") {
        return closed_chain(n);
    }
    if let Some(n) = parse_suffix(name, "star-") {
        return star(n);
    }
    if let Some(n) = parse_suffix(name, "complete-") {
        return complete(n);
    }
    if let Some(k) = parse_suffix(name, "atlas-") {
        return atlas(k);
    }
    if let Some(patch) = catalog_lattice(name) {
        return patch.map(|p| p.graph);
    }
    Err(Error::InvalidArgument(format!("unknown catalog graph `{name}`")))
}

/// Lattice patch lookup; `None` if the name is not a lattice name.
pub fn catalog_lattice(name: &str) -> Option<Result<LatticePatch>> {
    let table = [
        ("triangular-", Lattice::Triangular),
        ("kagome-", Lattice::Kagome),
        ("square-octagon-", Lattice::SquareOctagon),
    ];
    table.iter().find_map(|&(prefix, lat)| {
        parse_dims(name, prefix).map(|(r, c)| lattice_patch(lat, r, c))
    })
}
