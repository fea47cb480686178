//! Matching-based verification protocols: test operators, spectral gaps,
//! probability optimization and analytic performance bounds.

use std::collections::HashMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bond::{bond_operator, nu_s};
use crate::error::{Error, Result};
use crate::graphs::{enumerate_matchings, Graph, Matching, MatchingCover};
use crate::hamiltonian::{analyze, tensor_space, AkltHamiltonian, GroundSpace, DENSE_MAX};
use crate::linalg::{
    c, extremal_eigenpairs, hermitian_eigh, to_dense, CMatrix, CVector, HermitianOperator,
    LanczosOptions, LinearOperator, TensorSpace, Which, DENSE_LIMIT,
};
use crate::sphere::SphereDistribution;
use crate::spin::{max_spin_projector, Spin};

/// Eigenvalues of `P12 P23 P12` above this are treated as exactly one.
pub const UNIT_SINGULAR_TOL: f64 = 1e-6;

/// Maximal-matching covers larger than this are not searched.
pub const MAX_MAXIMAL_MATCHINGS: usize = 17;

/// A protocol `(mu, cover, p)` on a graph.
#[derive(Clone, Debug)]
pub struct ProtocolSpec {
    pub graph: Graph,
    pub mu: SphereDistribution,
    pub cover: MatchingCover,
    pub probabilities: Vec<f64>,
}

impl ProtocolSpec {
    pub fn new(
        graph: Graph,
        mu: SphereDistribution,
        cover: MatchingCover,
        probabilities: Vec<f64>,
    ) -> Result<Self> {
        check_simplex(&probabilities, cover.len())?;
        let covered = cover.edge_lists(&graph).iter().map(Vec::len).sum::<usize>();
        if covered == 0 && graph.edge_count() > 0 {
            return Err(Error::InvalidProtocol("cover is empty".into()));
        }
        Ok(Self {
            graph,
            mu,
            cover,
            probabilities,
        })
    }

    pub fn uniform(graph: Graph, mu: SphereDistribution, cover: MatchingCover) -> Result<Self> {
        let m = cover.len();
        Self::new(graph, mu, cover, vec![1.0 / m as f64; m])
    }
}

fn check_simplex(p: &[f64], m: usize) -> Result<()> {
    if p.len() != m {
        return Err(Error::InvalidProtocol(format!(
            "{} probabilities given for {m} matchings",
            p.len()
        )));
    }
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidProtocol("probabilities must be nonnegative".into()));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProtocol(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(())
}

/// `p_l = |M_l| / |E|`, defined for edge colorings.
pub fn proportional_probabilities(cover: &MatchingCover) -> Result<Vec<f64>> {
    if !cover.is_coloring() {
        return Err(Error::InvalidProtocol(
            "size-proportional probabilities need an edge coloring".into(),
        ));
    }
    let sizes = cover.sizes();
    let total: usize = sizes.iter().sum();
    Ok(sizes.iter().map(|&s| s as f64 / total as f64).collect())
}

/// Everything needed to evaluate protocols on one graph with one bond
/// distribution: the AKLT ground space, its gap, and per-edge bond operators.
#[derive(Clone, Debug)]
pub struct ProtocolContext {
    graph: Graph,
    mu: SphereDistribution,
    space: TensorSpace,
    bonds: Vec<CMatrix>,
    ground: GroundSpace,
    gamma: f64,
}

impl ProtocolContext {
    pub fn new(graph: &Graph, mu: &SphereDistribution) -> Result<Self> {
        let spectrum = analyze(&AkltHamiltonian::new(graph)?)?;
        Self::with_ground(graph, mu, spectrum.ground, spectrum.gap)
    }

    /// Uses a precomputed target space, e.g. a degenerate ground space.
    pub fn with_ground(
        graph: &Graph,
        mu: &SphereDistribution,
        ground: GroundSpace,
        gamma: f64,
    ) -> Result<Self> {
        let space = tensor_space(graph)?;
        let mut cache: HashMap<(Spin, Spin), CMatrix> = HashMap::new();
        let bonds = graph
            .edges()
            .iter()
            .map(|&(a, b)| {
                let key = (graph.spin(a), graph.spin(b));
                cache
                    .entry(key)
                    .or_insert_with(|| bond_operator(key.0, key.1, mu).omega.into_matrix())
                    .clone()
            })
            .collect();
        Ok(Self {
            graph: graph.clone(),
            mu: mu.clone(),
            space,
            bonds,
            ground,
            gamma,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn mu(&self) -> &SphereDistribution {
        &self.mu
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn ground(&self) -> &GroundSpace {
        &self.ground
    }

    /// Spectral gap of the AKLT Hamiltonian.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Local bond operator of edge `e`.
    pub fn bond(&self, e: usize) -> &CMatrix {
        &self.bonds[e]
    }

    /// `T_M = prod_{e in M} Omega_e`, applied factor by factor.
    pub fn matching_test(&self, m: &Matching) -> MatchingTest<'_> {
        let factors = m
            .edges()
            .iter()
            .map(|&e| {
                let (a, b) = self.graph.edges()[e];
                (a, b, &self.bonds[e])
            })
            .collect();
        MatchingTest {
            space: &self.space,
            factors,
        }
    }

    /// `Omega = sum_l p_l T_{M_l}` as a matrix-free operator.
    pub fn operator(&self, cover: &MatchingCover, p: &[f64]) -> Result<ProtocolOperator<'_>> {
        check_simplex(p, cover.len())?;
        Ok(ProtocolOperator {
            dim: self.space.dim(),
            terms: cover
                .matchings()
                .iter()
                .zip(p)
                .filter(|(_, &w)| w > 0.0)
                .map(|(m, &w)| (w, self.matching_test(m)))
                .collect(),
        })
    }

    /// Dense verification operator, refused above `DENSE_MAX`.
    pub fn dense_operator(&self, cover: &MatchingCover, p: &[f64]) -> Result<HermitianOperator> {
        if self.dim() > DENSE_MAX {
            return Err(Error::ResourceGuard(format!(
                "dense verification operator limited to dimension {DENSE_MAX}, got {}",
                self.dim()
            )));
        }
        Ok(HermitianOperator::symmetrized(to_dense(&self.operator(cover, p)?)))
    }

    /// `nu = 1 - lambda_max` of the operator restricted to the complement of
    /// the target space.
    pub fn gap(&self, cover: &MatchingCover, p: &[f64]) -> Result<f64> {
        check_simplex(p, cover.len())?;
        let model = self.model(cover)?;
        Ok((1.0 - model.evaluate(p, 1)?.value).max(0.0))
    }

    pub fn uniform_gap(&self, cover: &MatchingCover) -> Result<f64> {
        let m = cover.len();
        self.gap(cover, &vec![1.0 / m as f64; m])
    }

    /// Largest eigenvector of the deflated operator.
    pub fn worst_state(&self, cover: &MatchingCover, p: &[f64]) -> Result<(f64, CVector)> {
        let model = self.model(cover)?;
        let ev = model.evaluate(p, 1)?;
        let v = ev
            .vectors
            .into_iter()
            .next()
            .ok_or_else(|| Error::Numerical("target space fills the Hilbert space".into()))?;
        Ok((ev.value, v))
    }

    fn model(&self, cover: &MatchingCover) -> Result<Model<'_>> {
        if cover.matchings().iter().flat_map(|m| m.edges()).any(|&e| e >= self.bonds.len()) {
            return Err(Error::InvalidProtocol("cover refers to unknown edges".into()));
        }
        let tests: Vec<MatchingTest<'_>> =
            cover.matchings().iter().map(|m| self.matching_test(m)).collect();
        if self.dim() <= DENSE_LIMIT {
            Ok(Model::Dense(DenseModel::new(&tests, &self.ground.basis)))
        } else {
            Ok(Model::MatrixFree {
                tests,
                deflate: &self.ground.basis,
            })
        }
    }

    /// Minimizes `lambda_max` of the deflated operator over the probability
    /// simplex.
    pub fn optimize(&self, cover: &MatchingCover, opts: &OptimizeOptions) -> Result<Optimized> {
        let model = self.model(cover)?;
        optimize_model(&model, cover.len(), opts)
    }
}

/// Matrix-free matching test.
pub struct MatchingTest<'a> {
    space: &'a TensorSpace,
    factors: Vec<(usize, usize, &'a CMatrix)>,
}

impl LinearOperator for MatchingTest<'_> {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn apply(&self, x: &CVector) -> CVector {
        let mut cur = x.clone();
        for &(a, b, op) in &self.factors {
            let mut y = CVector::zeros(cur.len());
            self.space.apply_two_site(op, a, b, c(1.0), &cur, &mut y);
            cur = y;
        }
        cur
    }
}

/// Matrix-free convex combination of matching tests.
pub struct ProtocolOperator<'a> {
    dim: usize,
    terms: Vec<(f64, MatchingTest<'a>)>,
}

impl LinearOperator for ProtocolOperator<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &CVector) -> CVector {
        let mut y = CVector::zeros(self.dim);
        for (w, t) in &self.terms {
            y.axpy(c(*w), &t.apply(x), c(1.0));
        }
        y
    }
}

/// Test operators compressed to the complement of the target space.
struct DenseModel {
    basis: CMatrix,
    tests: Vec<CMatrix>,
}

impl DenseModel {
    fn new(tests: &[MatchingTest<'_>], ground: &[CVector]) -> Self {
        let n = tests.first().map(|t| t.dim()).unwrap_or(0);
        let mut q = CMatrix::zeros(n, n);
        for g in ground {
            q += g * g.adjoint();
        }
        let complement = CMatrix::identity(n, n) - q;
        let (vals, vecs) = hermitian_eigh(&complement);
        let cols: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.5).collect();
        let basis = CMatrix::from_fn(n, cols.len(), |r, k| vecs[(r, cols[k])]);
        let tests = tests
            .iter()
            .map(|t| {
                let full = to_dense(t);
                let reduced = basis.adjoint() * full * &basis;
                HermitianOperator::symmetrized(reduced).into_matrix()
            })
            .collect();
        Self { basis, tests }
    }
}

enum Model<'a> {
    Dense(DenseModel),
    MatrixFree {
        tests: Vec<MatchingTest<'a>>,
        deflate: &'a [CVector],
    },
}

struct Evaluation {
    value: f64,
    /// `<v|T_l|v>` for each returned Ritz vector.
    cuts: Vec<Vec<f64>>,
    vectors: Vec<CVector>,
}

impl Model<'_> {
    fn evaluate(&self, p: &[f64], count: usize) -> Result<Evaluation> {
        match self {
            Model::Dense(d) => {
                let k = d.basis.ncols();
                if k == 0 {
                    return Ok(Evaluation {
                        value: 0.0,
                        cuts: vec![vec![0.0; p.len()]],
                        vectors: Vec::new(),
                    });
                }
                let mut m = CMatrix::zeros(k, k);
                for (t, &w) in d.tests.iter().zip(p) {
                    if w > 0.0 {
                        m += t * c(w);
                    }
                }
                let (vals, vecs) = hermitian_eigh(&m);
                let take = count.min(k);
                let mut cuts = Vec::with_capacity(take);
                let mut vectors = Vec::with_capacity(take);
                for i in (k - take..k).rev() {
                    let w = vecs.column(i).into_owned();
                    cuts.push(d.tests.iter().map(|t| (w.adjoint() * t * &w)[(0, 0)].re).collect());
                    vectors.push(&d.basis * w);
                }
                Ok(Evaluation {
                    value: vals[k - 1],
                    cuts,
                    vectors,
                })
            }
            Model::MatrixFree { tests, deflate } => {
                let op = ProtocolOperator {
                    dim: tests[0].dim(),
                    terms: tests
                        .iter()
                        .zip(p)
                        .filter(|(_, &w)| w > 0.0)
                        .map(|(t, &w)| {
                            (
                                w,
                                MatchingTest {
                                    space: t.space,
                                    factors: t.factors.clone(),
                                },
                            )
                        })
                        .collect(),
                };
                let pairs =
                    extremal_eigenpairs(&op, Which::Largest, count, deflate, &LanczosOptions::default())?;
                let Some(first) = pairs.first() else {
                    return Ok(Evaluation {
                        value: 0.0,
                        cuts: vec![vec![0.0; p.len()]],
                        vectors: Vec::new(),
                    });
                };
                let value = first.value;
                let mut cuts = Vec::new();
                let mut vectors = Vec::new();
                for pair in pairs {
                    cuts.push(tests.iter().map(|t| pair.vector.dotc(&t.apply(&pair.vector)).re).collect());
                    vectors.push(pair.vector);
                }
                Ok(Evaluation {
                    value,
                    cuts,
                    vectors,
                })
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizeOptions {
    pub max_iter: usize,
    /// Absolute tolerance on `lambda_max`.
    pub tol: f64,
    pub initial_radius: f64,
    /// Ritz vectors turned into cuts at each evaluation.
    pub cuts_per_eval: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 300,
            tol: 1e-7,
            initial_radius: 0.25,
            cuts_per_eval: 4,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Optimized {
    pub probabilities: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves `min h` s.t. `h >= a.p` for every cut, `p` in the simplex and
/// within `radius` of `center`.
fn lp_step(cuts: &[Vec<f64>], center: &[f64], radius: f64) -> Option<(Vec<f64>, f64)> {
    let m = center.len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = center
        .iter()
        .map(|&x| lp.add_var(0.0, ((x - radius).max(0.0), (x + radius).min(1.0))))
        .collect();
    let h = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    lp.add_constraint(vars.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    for a in cuts {
        let mut expr: Vec<_> = vars.iter().zip(a).map(|(&v, &x)| (v, -x)).collect();
        expr.push((h, 1.0));
        lp.add_constraint(expr, ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().ok()?;
    let mut p: Vec<f64> = vars.iter().map(|&v| sol[v].max(0.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    debug_assert_eq!(p.len(), m);
    Some((p, sol.objective()))
}

/// Trust-region cutting-plane method. Every Ritz vector `v` orthogonal to
/// the target gives a valid affine minorant `sum_l p_l <v|T_l|v>` of the
/// convex objective, so approximate vectors are still usable.
fn optimize_model(model: &Model<'_>, m: usize, opts: &OptimizeOptions) -> Result<Optimized> {
    let uniform = vec![1.0 / m as f64; m];
    let first = model.evaluate(&uniform, opts.cuts_per_eval)?;
    if m == 1 {
        return Ok(Optimized {
            probabilities: uniform,
            gap: (1.0 - first.value).max(0.0),
            iterations: 0,
            converged: true,
        });
    }
    let uniform_value = first.value;
    let mut cuts = first.cuts;
    let mut center = uniform.clone();
    let mut best = uniform_value;
    let mut radius = opts.initial_radius;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let Some((p, lower)) = lp_step(&cuts, &center, radius) else {
            log::warn!("cutting-plane LP failed; keeping incumbent");
            break;
        };
        if best - lower <= opts.tol {
            converged = true;
            break;
        }
        let ev = model.evaluate(&p, opts.cuts_per_eval)?;
        cuts.extend(ev.cuts);
        if ev.value < best - 1e-12 {
            best = ev.value;
            center = p;
        } else {
            radius *= 0.5;
            if radius < 1e-10 {
                converged = best - lower <= 10.0 * opts.tol;
                break;
            }
        }
    }
    if !converged {
        log::warn!("probability optimization stopped after {iterations} iterations");
    }
    if uniform_value <= best + 1e-9 {
        center = uniform;
        best = uniform_value;
    }
    Ok(Optimized {
        probabilities: center,
        gap: (1.0 - best).max(0.0),
        iterations,
        converged,
    })
}

/// Optimized probabilities and gap for a protocol on `graph`.
pub fn optimize_probabilities(
    graph: &Graph,
    mu: &SphereDistribution,
    cover: &MatchingCover,
) -> Result<Optimized> {
    ProtocolContext::new(graph, mu)?.optimize(cover, &OptimizeOptions::default())
}

/// Gap of a fully specified protocol.
pub fn protocol_gap(spec: &ProtocolSpec) -> Result<f64> {
    ProtocolContext::new(&spec.graph, &spec.mu)?.gap(&spec.cover, &spec.probabilities)
}

/// Dense verification operator of a protocol.
pub fn protocol_operator(spec: &ProtocolSpec) -> Result<HermitianOperator> {
    let ctx = ProtocolContext::new(&spec.graph, &spec.mu)?;
    ctx.dense_operator(&spec.cover, &spec.probabilities)
}

/// The cover chosen among several candidates, with both evaluations.
#[derive(Clone, Debug)]
pub struct CoverChoice {
    pub cover: MatchingCover,
    pub uniform_gap: f64,
    pub optimized: Optimized,
}

/// Picks the candidate with the largest optimized gap; ties go to the
/// earliest candidate.
pub fn best_cover(
    ctx: &ProtocolContext,
    candidates: &[MatchingCover],
    opts: &OptimizeOptions,
) -> Result<CoverChoice> {
    let results: Vec<Result<(f64, Optimized)>> = candidates
        .par_iter()
        .map(|cover| Ok((ctx.uniform_gap(cover)?, ctx.optimize(cover, opts)?)))
        .collect();
    let mut best: Option<CoverChoice> = None;
    for (cover, r) in candidates.iter().zip(results) {
        let (uniform_gap, optimized) = r?;
        if best.as_ref().map_or(true, |b| optimized.gap > b.optimized.gap + 1e-9) {
            best = Some(CoverChoice {
                cover: cover.clone(),
                uniform_gap,
                optimized,
            });
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no candidate covers".into()))
}

/// The cover made of every maximal matching.
pub fn maximal_matching_cover(graph: &Graph) -> Result<MatchingCover> {
    let census = enumerate_matchings(graph)?;
    if census.maximal.len() > MAX_MAXIMAL_MATCHINGS {
        return Err(Error::ResourceGuard(format!(
            "{} maximal matchings exceed the search cap of {MAX_MAXIMAL_MATCHINGS}",
            census.maximal.len()
        )));
    }
    MatchingCover::new(graph, census.maximal)
}

/// `s^2(P12 P23)` for the path 1-2-3 with the given spins.
pub fn s_squared(s1: Spin, s2: Spin, s3: Spin) -> f64 {
    let (d1, d3) = (s1.dim(), s3.dim());
    let p12 = max_spin_projector(s1, s2).kron(&HermitianOperator::identity(d3));
    let p23 = HermitianOperator::identity(d1).kron(&max_spin_projector(s2, s3));
    let prod = p12.matrix() * p23.matrix() * p12.matrix();
    HermitianOperator::symmetrized(prod)
        .eigenvalues()
        .into_iter()
        .filter(|&v| v < 1.0 - UNIT_SINGULAR_TOL)
        .fold(0.0, f64::max)
}

/// Largest non-unit singular value of `P12 P23`.
pub fn s_of_triple(s1: Spin, s2: Spin, s3: Spin) -> f64 {
    s_squared(s1, s2, s3).sqrt()
}

/// `s(G)`: maximum of `s(P_e P_e')` over adjacent edge pairs.
pub fn s_of_graph(graph: &Graph) -> f64 {
    let mut cache: HashMap<(Spin, Spin, Spin), f64> = HashMap::new();
    let edges = graph.edges();
    let mut best: f64 = 0.0;
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(x, y) in &edges[i + 1..] {
            let (shared, u, w) = match () {
                _ if a == x => (a, b, y),
                _ if a == y => (a, b, x),
                _ if b == x => (b, a, y),
                _ if b == y => (b, a, x),
                _ => continue,
            };
            let key = (graph.spin(u), graph.spin(shared), graph.spin(w));
            let s = *cache.entry(key).or_insert_with(|| s_of_triple(key.0, key.1, key.2));
            best = best.max(s);
        }
    }
    best
}

/// Whether `mu_sym` is a `2 S_E`-design.
pub fn design_hypothesis(mu: &SphereDistribution, s_e: Spin) -> bool {
    mu.symmetrize().design_strength() >= s_e.twice() as usize
}

fn f_theorem4(x: f64, m: usize) -> f64 {
    let r = (1.0 + x).sqrt();
    if m == 2 {
        (r - 1.0) / r
    } else {
        (r - 1.0) / (r + 1.0)
    }
}

/// Lower bounds on the gap of a protocol with `m` matchings and uniform
/// probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Bound {
    /// `nu_SE f(gamma / (s g)^2) / m`.
    pub bound: f64,
    /// `nu_SE gamma / (24 m (S_E - 1)^2)`.
    pub weak: f64,
    /// Same with `nu_SE` replaced by `2 / (2 S_E + 1)`.
    pub design: f64,
    pub design_weak: f64,
}

/// `g = 2 S_E - 2`. Fails when `s` or `g` vanish, where the bound does not
/// apply.
pub fn theorem4_bound(nu_se: f64, gamma: f64, s: f64, g: f64, m: usize) -> Result<Theorem4Bound> {
    if g <= 0.0 || s <= 0.0 {
        return Err(Error::NotApplicable(format!(
            "bound needs s > 0 and g > 0 (s = {s}, g = {g})"
        )));
    }
    if m < 2 {
        return Err(Error::NotApplicable("bound needs at least two matchings".into()));
    }
    let mf = m as f64;
    let fx = f_theorem4(gamma / (s * s * g * g), m);
    let se_minus_one = g / 2.0;
    let two_se_plus_one = g + 3.0;
    Ok(Theorem4Bound {
        bound: nu_se * fx / mf,
        weak: nu_se * gamma / (24.0 * mf * se_minus_one * se_minus_one),
        design: 2.0 * fx / (mf * two_se_plus_one),
        design_weak: gamma / (12.0 * mf * two_se_plus_one * se_minus_one * se_minus_one),
    })
}

/// Lower bounds for edge colorings with size-proportional probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem5Bound {
    /// `nu_SE gamma / |E|`.
    pub bound: f64,
    /// `2 gamma / ((2 S_E + 1) |E|)`.
    pub design: f64,
}

pub fn theorem5_bound(nu_se: f64, gamma: f64, s_e: Spin, coloring_sizes: &[usize]) -> Result<Theorem5Bound> {
    let e: usize = coloring_sizes.iter().sum();
    if e == 0 {
        return Err(Error::NotApplicable("empty coloring".into()));
    }
    let e = e as f64;
    Ok(Theorem5Bound {
        bound: nu_se * gamma / e,
        design: 2.0 * gamma / ((s_e.twice() as f64 + 1.0) * e),
    })
}

/// The design form of the coloring bound is attained when every edge has
/// the same spin and the coloring is trivial.
pub fn theorem5_saturates(graph: &Graph, cover: &MatchingCover) -> bool {
    let e = graph.edge_count();
    let first = graph.edge_spin(0);
    cover.is_coloring() && cover.len() == e && (0..e).all(|i| graph.edge_spin(i) == first)
}

/// `nu_{S_E}(mu)` for the graph's largest edge spin.
pub fn nu_se(graph: &Graph, mu: &SphereDistribution) -> f64 {
    nu_s(graph.degree_data().s_e, mu)
}

/// Number of tests `N = ceil(ln delta / ln(1 - nu eps))`.
pub fn sample_count(nu: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !(0.0 < epsilon && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(0.0 < delta && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1], got {delta}")));
    }
    if !(nu >= 0.0 && nu <= 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("nu must lie in [0, 1], got {nu}")));
    }
    if delta == 1.0 {
        return Ok(0);
    }
    if nu <= 0.0 {
        return Err(Error::InfiniteSampleCount);
    }
    let denom = (-nu.min(1.0) * epsilon).ln_1p();
    Ok((delta.ln() / denom).ceil() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Homogeneity {
    pub homogeneous: bool,
    pub lambda: f64,
}

/// Checks `Omega = Q + lambda (1 - Q)` with `Q` the projector onto
/// `ground`, to within `1e-8` entrywise.
pub fn homogeneity_check(omega: &HermitianOperator, ground: &[CVector]) -> Homogeneity {
    let n = omega.dim();
    let mut q = CMatrix::zeros(n, n);
    for g in ground {
        q += g * g.adjoint();
    }
    let comp = CMatrix::identity(n, n) - &q;
    let deflated = &comp * omega.matrix() * &comp;
    let rest = n.saturating_sub(ground.len());
    let lambda = if rest == 0 {
        0.0
    } else {
        deflated.trace().re / rest as f64
    };
    let dev = (deflated - comp * c(lambda))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Homogeneity {
        homogeneous: dev <= 1e-8,
        lambda,
    }
}
