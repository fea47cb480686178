//! Protocol description files and the evaluation report built from them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{
    catalog, cycle_matching_covers, edge_colorings, optimal_colorings, Edge, Graph, GraphFile,
    Matching, MatchingCover,
};
use crate::hamiltonian::DENSE_MAX;
use crate::protocol::{
    best_cover, design_hypothesis, homogeneity_check, maximal_matching_cover, nu_se,
    proportional_probabilities, s_of_graph, sample_count, theorem4_bound, theorem5_bound,
    theorem5_saturates, OptimizeOptions, Optimized, ProtocolContext, Theorem4Bound,
    Theorem5Bound,
};
use crate::sphere::{Builtin, SphereDistribution, WeightedPoint};
use crate::tables::COLORING_LIMIT;

/// Largest edge spin (twice) for which `isotropic` is realized exactly.
const ISOTROPIC_MAX_TWICE: u32 = 9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRef {
    /// Catalog name or path to a graph file.
    Name(String),
    Inline(GraphFile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuRef {
    /// Builtin name, `isotropic`, or path to a distribution file.
    Name(String),
    Points(Vec<WeightedPoint>),
}

impl Default for MuRef {
    fn default() -> Self {
        MuRef::Name("mu32".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoverRef {
    /// `trivial`, `optimal`, `coloring`, `maximal`, `Mn` or `M<k>`.
    Named(String),
    /// Edge indices of each matching.
    Explicit(Vec<Vec<usize>>),
}

impl Default for CoverRef {
    fn default() -> Self {
        CoverRef::Named("trivial".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbRef {
    /// `uniform`, `optimal` or `proportional`.
    Named(String),
    Explicit(Vec<f64>),
}

impl Default for ProbRef {
    fn default() -> Self {
        ProbRef::Named("uniform".into())
    }
}

/// A protocol description as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub graph: GraphRef,
    #[serde(default)]
    pub mu: MuRef,
    #[serde(default)]
    pub cover: CoverRef,
    #[serde(default)]
    pub p: ProbRef,
}

impl ProtocolFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

pub fn resolve_graph(r: &GraphRef, base: Option<&Path>) -> Result<(String, Graph)> {
    match r {
        GraphRef::Inline(f) => Ok(("inline".into(), f.clone().into_graph()?)),
        GraphRef::Name(name) => match catalog(name) {
            Ok(g) => Ok((name.clone(), g)),
            Err(catalog_err) => {
                let path = relative_to(base, name);
                if path.exists() {
                    Ok((name.clone(), Graph::load(&path)?))
                } else {
                    Err(catalog_err)
                }
            }
        },
    }
}

fn relative_to(base: Option<&Path>, name: &str) -> PathBuf {
    let p = PathBuf::from(name);
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p,
    }
}

/// Resolves a distribution. `isotropic` is realized by `mu32`, which
/// reproduces it exactly while the largest edge spin is at most 9/2.
pub fn resolve_mu(r: &MuRef, graph: &Graph, base: Option<&Path>) -> Result<SphereDistribution> {
    match r {
        MuRef::Points(points) => SphereDistribution::new("custom", points.clone()),
        MuRef::Name(name) if name == "isotropic" => {
            let s_e = graph.degree_data().s_e;
            if s_e.twice() > ISOTROPIC_MAX_TWICE {
                return Err(Error::InvalidArgument(format!(
                    "isotropic bond tests need S_E <= 9/2 here, graph has S_E = {s_e}"
                )));
            }
            Ok(Builtin::Mu32.distribution())
        }
        MuRef::Name(name) => match name.parse::<Builtin>() {
            Ok(b) => Ok(b.distribution()),
            Err(e) => {
                let path = relative_to(base, name);
                if path.exists() {
                    SphereDistribution::load(&path)
                } else {
                    Err(e)
                }
            }
        },
    }
}

/// A resolved cover; `choice` is set when the cover was selected by
/// optimizing over candidates.
pub struct ResolvedCover {
    pub cover: MatchingCover,
    pub label: String,
    pub optimized: Option<Optimized>,
}

pub fn resolve_cover(r: &CoverRef, ctx: &ProtocolContext, opts: &OptimizeOptions) -> Result<ResolvedCover> {
    let g = ctx.graph();
    let plain = |cover, label: &str| {
        Ok(ResolvedCover {
            cover,
            label: label.to_string(),
            optimized: None,
        })
    };
    match r {
        CoverRef::Explicit(lists) => {
            let ms = lists
                .iter()
                .map(|l| Matching::new(g, l.clone()))
                .collect::<Result<Vec<_>>>()?;
            plain(MatchingCover::new(g, ms)?, "explicit")
        }
        CoverRef::Named(name) => match name.as_str() {
            "trivial" => plain(MatchingCover::trivial(g), "trivial"),
            "coloring" => plain(edge_colorings(g)?.optimal, "coloring"),
            "maximal" => plain(maximal_matching_cover(g)?, "maximal"),
            "optimal" => {
                let candidates = optimal_colorings(g, COLORING_LIMIT)?;
                let choice = best_cover(ctx, &candidates, opts)?;
                Ok(ResolvedCover {
                    cover: choice.cover,
                    label: "optimal".into(),
                    optimized: Some(choice.optimized),
                })
            }
            other => {
                let m = match other {
                    "Mn" => g.n(),
                    _ => other
                        .strip_prefix('M')
                        .and_then(|k| k.parse::<usize>().ok())
                        .ok_or_else(|| Error::InvalidArgument(format!("unknown cover `{other}`")))?,
                };
                let (cycle, cover) = cycle_matching_covers(g.n(), m)?;
                if cycle.edges() != g.edges() {
                    return Err(Error::InvalidArgument(format!(
                        "cover `{other}` is defined for closed chains only"
                    )));
                }
                plain(cover, other)
            }
        },
    }
}

pub fn resolve_probabilities(
    r: &ProbRef,
    ctx: &ProtocolContext,
    cover: &ResolvedCover,
    opts: &OptimizeOptions,
) -> Result<(Vec<f64>, String, Option<Optimized>)> {
    let m = cover.cover.len();
    match r {
        ProbRef::Explicit(p) => Ok((p.clone(), "explicit".into(), None)),
        ProbRef::Named(n) => match n.as_str() {
            "uniform" => Ok((vec![1.0 / m as f64; m], "uniform".into(), None)),
            "proportional" => Ok((proportional_probabilities(&cover.cover)?, "proportional".into(), None)),
            "optimal" => {
                let opt = match &cover.optimized {
                    Some(o) => o.clone(),
                    None => ctx.optimize(&cover.cover, opts)?,
                };
                Ok((opt.probabilities.clone(), "optimal".into(), Some(opt)))
            }
            other => Err(Error::InvalidArgument(format!("unknown probability choice `{other}`"))),
        },
    }
}

/// Everything reported about one protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub graph: String,
    pub vertices: usize,
    pub edges: usize,
    pub dim: usize,
    pub distribution: String,
    pub gamma: f64,
    pub s_e: crate::spin::Spin,
    pub nu_se: f64,
    pub s: f64,
    pub g: i64,
    pub cover_kind: String,
    pub cover: Vec<Vec<Edge>>,
    pub probability_kind: String,
    pub probabilities: Vec<f64>,
    /// Gap of the protocol as specified.
    pub nu: f64,
    /// Trivial coloring, uniform probabilities.
    pub nu_trivial: f64,
    /// This cover, uniform probabilities.
    pub nu_uniform: f64,
    /// This cover, optimized probabilities (when requested).
    pub nu_optimized: Option<f64>,
    /// Bounds for this cover with uniform probabilities.
    pub theorem4: Option<Theorem4Bound>,
    /// Whether `mu_sym` is a `2 S_E`-design, so the design forms apply.
    pub design_hypothesis: bool,
    /// Bounds for colorings with size-proportional probabilities, and the
    /// gap they refer to.
    pub theorem5: Option<Theorem5Bound>,
    pub nu_proportional: Option<f64>,
    pub theorem5_saturated: bool,
    pub epsilon: f64,
    pub delta: f64,
    /// `None` when the gap vanishes.
    pub sample_count: Option<u64>,
    /// Flat spectrum off the target; `None` above the dense limit.
    pub homogeneous: Option<bool>,
    pub lambda: Option<f64>,
}

/// Inputs for `evaluate_protocol`.
#[derive(Clone, Debug)]
pub struct ProtocolRequest {
    pub file: ProtocolFile,
    pub base_dir: Option<PathBuf>,
    pub epsilon: f64,
    pub delta: f64,
}

/// A protocol file with every reference resolved.
pub struct ResolvedProtocol {
    pub name: String,
    pub ctx: ProtocolContext,
    pub cover: ResolvedCover,
    pub probabilities: Vec<f64>,
    pub probability_kind: String,
    pub optimized: Option<Optimized>,
}

pub fn resolve_protocol(file: &ProtocolFile, base: Option<&Path>) -> Result<ResolvedProtocol> {
    let (name, graph) = resolve_graph(&file.graph, base)?;
    let mu = resolve_mu(&file.mu, &graph, base)?;
    let ctx = ProtocolContext::new(&graph, &mu)?;
    let opts = OptimizeOptions::default();
    let cover = resolve_cover(&file.cover, &ctx, &opts)?;
    let (probabilities, probability_kind, optimized) = resolve_probabilities(&file.p, &ctx, &cover, &opts)?;
    Ok(ResolvedProtocol {
        name,
        ctx,
        cover,
        probabilities,
        probability_kind,
        optimized,
    })
}

pub fn evaluate_protocol(req: &ProtocolRequest) -> Result<ProtocolReport> {
    let ResolvedProtocol {
        name,
        ctx,
        cover,
        probabilities: p,
        probability_kind: p_kind,
        optimized,
    } = resolve_protocol(&req.file, req.base_dir.as_deref())?;
    let graph = ctx.graph().clone();
    let mu = ctx.mu().clone();
    let nu = ctx.gap(&cover.cover, &p)?;
    let nu_trivial = ctx.uniform_gap(&MatchingCover::trivial(&graph))?;
    let nu_uniform = ctx.uniform_gap(&cover.cover)?;

    let dd = graph.degree_data();
    let nse = nu_se(&graph, &mu);
    let s = s_of_graph(&graph);
    let m = cover.cover.len();
    let theorem4 = theorem4_bound(nse, ctx.gamma(), s, dd.g_overlap as f64, m).ok();
    let (theorem5, nu_proportional) = if cover.cover.is_coloring() {
        let pp = proportional_probabilities(&cover.cover)?;
        (
            Some(theorem5_bound(nse, ctx.gamma(), dd.s_e, &cover.cover.sizes())?),
            Some(ctx.gap(&cover.cover, &pp)?),
        )
    } else {
        (None, None)
    };
    let sample = match sample_count(nu, req.epsilon, req.delta) {
        Ok(n) => Some(n),
        Err(Error::InfiniteSampleCount) => None,
        Err(e) => return Err(e),
    };
    let (homogeneous, lambda) = if ctx.dim() <= DENSE_MAX {
        let h = homogeneity_check(&ctx.dense_operator(&cover.cover, &p)?, &ctx.ground().basis);
        (Some(h.homogeneous), Some(h.lambda))
    } else {
        (None, None)
    };
    Ok(ProtocolReport {
        graph: name,
        vertices: graph.n(),
        edges: graph.edge_count(),
        dim: ctx.dim(),
        distribution: mu.name().to_string(),
        gamma: ctx.gamma(),
        s_e: dd.s_e,
        nu_se: nse,
        s,
        g: dd.g_overlap,
        cover_kind: cover.label.clone(),
        cover: cover.cover.edge_lists(&graph),
        probability_kind: p_kind,
        probabilities: p,
        nu,
        nu_trivial,
        nu_uniform,
        nu_optimized: optimized.map(|o| o.gap),
        theorem4,
        design_hypothesis: design_hypothesis(&mu, dd.s_e),
        theorem5,
        nu_proportional,
        theorem5_saturated: theorem5_saturates(&graph, &cover.cover),
        epsilon: req.epsilon,
        delta: req.delta,
        sample_count: sample,
        homogeneous,
        lambda,
    })
}
