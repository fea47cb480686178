//! Monte-Carlo execution of verification protocols against exact states.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::MatchingCover;
use crate::hamiltonian::DENSE_MAX;
use crate::linalg::{CVector, HermitianOperator, LinearOperator};
use crate::protocol::{Homogeneity, ProtocolContext};
use crate::spin::rotated_basis;

/// Runs per independently seeded random stream.
pub const CHUNK: u64 = 10_000;

/// Which state is fed to the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "epsilon", rename_all = "kebab-case")]
pub enum NoiseModel {
    Target,
    /// `(1 - eps) |Psi><Psi| + eps 1/d`.
    Depolarized(f64),
    /// `(1 - eps) |Psi><Psi| + eps |phi><phi|`, with `phi` the most
    /// accepted state orthogonal to the target.
    WorstCase(f64),
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::Target => f.write_str("target"),
            NoiseModel::Depolarized(e) => write!(f, "depolarize:{e}"),
            NoiseModel::WorstCase(e) => write!(f, "worst:{e}"),
        }
    }
}

impl FromStr for NoiseModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "target" || s == "none" {
            return Ok(NoiseModel::Target);
        }
        let (kind, eps) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("noise `{s}` is not of the form kind:eps")))?;
        let eps: f64 = eps
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad noise level `{eps}`")))?;
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidArgument(format!("noise level {eps} outside [0, 1]")));
        }
        match kind {
            "depolarize" | "depolarized" => Ok(NoiseModel::Depolarized(eps)),
            "worst" | "worst-case" => Ok(NoiseModel::WorstCase(eps)),
            other => Err(Error::InvalidArgument(format!("unknown noise kind `{other}`"))),
        }
    }
}

/// Mixture of pure states plus a maximally mixed part.
#[derive(Clone, Debug)]
pub struct Ensemble {
    dim: usize,
    pure: Vec<(f64, CVector)>,
    mixed: f64,
}

impl Ensemble {
    pub fn new(dim: usize, pure: Vec<(f64, CVector)>, mixed: f64) -> Result<Self> {
        let total: f64 = pure.iter().map(|(w, _)| w).sum::<f64>() + mixed;
        if (total - 1.0).abs() > 1e-10 || mixed < 0.0 || pure.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
        }
        for (_, v) in &pure {
            if v.len() != dim || (v.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidArgument("mixture component is not a unit vector".into()));
            }
        }
        Ok(Self { dim, pure, mixed })
    }

    /// Spectral decomposition of a density matrix.
    pub fn from_density(rho: &HermitianOperator) -> Result<Self> {
        if rho.dim() > DENSE_MAX {
            return Err(Error::ResourceGuard(format!(
                "density matrices limited to dimension {DENSE_MAX}"
            )));
        }
        if (rho.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("density matrix has trace {}", rho.trace())));
        }
        let (vals, vecs) = rho.eigh();
        if vals[0] < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {}",
                vals[0]
            )));
        }
        let pure: Vec<(f64, CVector)> = vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 1e-14)
            .map(|(i, &v)| (v, vecs.column(i).into_owned()))
            .collect();
        let total: f64 = pure.iter().map(|(w, _)| w).sum();
        let pure = pure.into_iter().map(|(w, v)| (w / total, v)).collect();
        Self::new(rho.dim(), pure, 0.0)
    }

    /// Builds the state described by `model` for a protocol.
    pub fn for_protocol(
        ctx: &ProtocolContext,
        cover: &MatchingCover,
        p: &[f64],
        model: NoiseModel,
    ) -> Result<Self> {
        let psi = ctx
            .ground()
            .basis
            .first()
            .ok_or_else(|| Error::Numerical("empty target space".into()))?
            .clone();
        let dim = ctx.dim();
        match model {
            NoiseModel::Target => Self::new(dim, vec![(1.0, psi)], 0.0),
            NoiseModel::Depolarized(e) => Self::new(dim, vec![(1.0 - e, psi)], e),
            NoiseModel::WorstCase(e) => {
                let (_, phi) = ctx.worst_state(cover, p)?;
                Self::new(dim, vec![(1.0 - e, psi), (e, phi)], 0.0)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `<Psi|sigma|Psi>`.
    pub fn fidelity(&self, target: &CVector) -> f64 {
        self.pure
            .iter()
            .map(|(w, v)| w * target.dotc(v).norm_sqr())
            .sum::<f64>()
            + self.mixed / self.dim as f64
    }

    /// Exact acceptance probability `tr(Omega sigma)`.
    pub fn exact_pass_probability(
        &self,
        ctx: &ProtocolContext,
        cover: &MatchingCover,
        p: &[f64],
    ) -> Result<f64> {
        let op = ctx.operator(cover, p)?;
        let mut total = 0.0;
        for (w, v) in &self.pure {
            total += w * v.dotc(&op.apply(v)).re;
        }
        if self.mixed > 0.0 {
            // tr(T_M)/d factorizes over the edges of M
            let mut avg = 0.0;
            for (m, &pl) in cover.matchings().iter().zip(p) {
                let mut t = 1.0;
                for &e in m.edges() {
                    let b = ctx.bond(e);
                    t *= b.trace().re / b.nrows() as f64;
                }
                avg += pl * t;
            }
            total += self.mixed * avg;
        }
        Ok(total)
    }
}

/// Tally of a simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub n_runs: u64,
    pub n_pass: u64,
    pub pass_rate: f64,
    /// Binomial standard error of `pass_rate`.
    pub std_error: f64,
    pub seed: u64,
    pub generator: String,
}

impl RunResult {
    fn new(n_runs: u64, n_pass: u64, seed: u64) -> Self {
        let rate = if n_runs == 0 { 0.0 } else { n_pass as f64 / n_runs as f64 };
        Self {
            n_runs,
            n_pass,
            pass_rate: rate,
            std_error: binomial_std_error(rate, n_runs),
            seed,
            generator: "chacha8".into(),
        }
    }
}

pub fn binomial_std_error(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Joint outcome distribution of the sites of one matching, measured
/// along fixed axes, for one pure component.
struct OutcomeTable {
    /// Sites in measurement order, two per edge.
    dims: Vec<usize>,
    probs: Vec<f64>,
}

type TableKey = (usize, usize, Vec<usize>);

struct Sampler<'a> {
    ctx: &'a ProtocolContext,
    cover: &'a MatchingCover,
    ensemble: &'a Ensemble,
    component: WeightedIndex<f64>,
    matching: WeightedIndex<f64>,
    axis: WeightedIndex<f64>,
    cache: Mutex<HashMap<TableKey, Arc<OutcomeTable>>>,
}

impl<'a> Sampler<'a> {
    fn table(&self, comp: usize, l: usize, axes: &[usize]) -> Arc<OutcomeTable> {
        let key = (comp, l, axes.to_vec());
        if let Some(t) = self.cache.lock().expect("cache lock").get(&key) {
            return t.clone();
        }
        let t = Arc::new(self.build_table(comp, l, axes));
        self.cache.lock().expect("cache lock").insert(key, t.clone());
        t
    }

    fn build_table(&self, comp: usize, l: usize, axes: &[usize]) -> OutcomeTable {
        let g = self.ctx.graph();
        let space = self.ctx.space();
        let points = self.ctx.mu().points();
        let mut psi = self.ensemble.pure[comp].1.clone();
        let mut sites = Vec::new();
        for (&e, &ax) in self.cover.matchings()[l].edges().iter().zip(axes) {
            let (a, b) = g.edges()[e];
            for v in [a, b] {
                let u = rotated_basis(g.spin(v), &points[ax].v);
                psi = space.apply_one_site(&u.adjoint(), v, &psi);
                sites.push(v);
            }
        }
        let dims: Vec<usize> = sites.iter().map(|&s| space.site_dim(s)).collect();
        let size: usize = dims.iter().product();
        let mut probs = vec![0.0; size];
        for (i, amp) in psi.iter().enumerate() {
            let mut idx = 0;
            for (&s, &d) in sites.iter().zip(&dims) {
                idx = idx * d + space.digit(i, s);
            }
            probs[idx] += amp.norm_sqr();
        }
        OutcomeTable { dims, probs }
    }

    /// One protocol run; true if accepted.
    fn run(&self, rng: &mut ChaCha8Rng) -> bool {
        let comp = self.component.sample(rng);
        let l = self.matching.sample(rng);
        let edges = self.cover.matchings()[l].edges();
        let axes: Vec<usize> = edges.iter().map(|_| self.axis.sample(rng)).collect();
        if comp == self.ensemble.pure.len() {
            // maximally mixed: outcomes uniform and independent per site
            return edges.iter().all(|&e| {
                let (a, b) = self.ctx.graph().edges()[e];
                let (da, db) = (self.ctx.space().site_dim(a), self.ctx.space().site_dim(b));
                let (i, j) = (rng.gen_range(0..da), rng.gen_range(0..db));
                !is_rejecting(i, j, da, db)
            });
        }
        let table = self.table(comp, l, &axes);
        // sequential conditioning, edge by edge
        let mut prefix = 0usize;
        let mut block = table.probs.len();
        for pair in table.dims.chunks(2) {
            let (da, db) = (pair[0], pair[1]);
            let k = da * db;
            block /= k;
            let weights: Vec<f64> = (0..k)
                .map(|o| {
                    let start = (prefix * k + o) * block;
                    table.probs[start..start + block].iter().sum()
                })
                .collect();
            let total: f64 = weights.iter().sum();
            let mut x = rng.gen::<f64>() * total;
            let mut outcome = k - 1;
            for (o, w) in weights.iter().enumerate() {
                if x < *w {
                    outcome = o;
                    break;
                }
                x -= w;
            }
            if is_rejecting(outcome / db, outcome % db, da, db) {
                return false;
            }
            prefix = prefix * k + outcome;
        }
        true
    }
}

/// Outcome indices run over `m = S..-S`, so index 0 is `+S` and the last
/// index is `-S`.
fn is_rejecting(i: usize, j: usize, da: usize, db: usize) -> bool {
    (i == 0 && j == 0) || (i == da - 1 && j == db - 1)
}

/// Runs the protocol `n_runs` times on `ensemble`. Each chunk of `CHUNK`
/// runs uses its own ChaCha stream, so the result depends only on `seed`.
pub fn simulate(
    ctx: &ProtocolContext,
    cover: &MatchingCover,
    p: &[f64],
    ensemble: &Ensemble,
    n_runs: u64,
    seed: u64,
) -> Result<RunResult> {
    if ctx.dim() > DENSE_MAX {
        return Err(Error::ResourceGuard(format!(
            "simulation limited to dimension {DENSE_MAX}, got {}",
            ctx.dim()
        )));
    }
    if ensemble.dim() != ctx.dim() {
        return Err(Error::InvalidArgument("state dimension does not match the graph".into()));
    }
    ctx.operator(cover, p)?;
    let mut weights: Vec<f64> = ensemble.pure.iter().map(|(w, _)| *w).collect();
    weights.push(ensemble.mixed);
    let bad = |e: rand::distributions::WeightedError| Error::InvalidArgument(e.to_string());
    let sampler = Sampler {
        ctx,
        cover,
        ensemble,
        component: WeightedIndex::new(&weights).map_err(bad)?,
        matching: WeightedIndex::new(p).map_err(bad)?,
        axis: WeightedIndex::new(ctx.mu().points().iter().map(|q| q.w)).map_err(bad)?,
        cache: Mutex::new(HashMap::new()),
    };
    let chunks = n_runs.div_ceil(CHUNK);
    let n_pass: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let runs = CHUNK.min(n_runs - k * CHUNK);
            (0..runs).filter(|_| sampler.run(&mut rng)).count() as u64
        })
        .sum();
    Ok(RunResult::new(n_runs, n_pass, seed))
}

/// `F = (pass_rate - lambda) / nu` for a homogeneous protocol.
pub fn estimate_fidelity_homogeneous(h: &Homogeneity, pass_rate: f64) -> Result<f64> {
    if !h.homogeneous {
        return Err(Error::InvalidProtocol("protocol is not homogeneous".into()));
    }
    let nu = 1.0 - h.lambda;
    if nu <= 0.0 {
        return Err(Error::InvalidProtocol("protocol has no spectral gap".into()));
    }
    Ok((pass_rate - h.lambda) / nu)
}
