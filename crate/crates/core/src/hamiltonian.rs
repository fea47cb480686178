//! AKLT Hamiltonians on graphs and chains, their ground spaces and gaps.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graphs::{closed_chain, open_chain, Graph};
use crate::linalg::{
    c, extremal_eigenpairs, hermitian_eigh, to_dense, CMatrix, CVector, HermitianOperator,
    LanczosOptions, LinearOperator, TensorSpace, Which, DENSE_LIMIT,
};
use crate::spin::{max_spin_projector, Spin};

/// Energies at or below this value count as ground energies.
pub const GROUND_TOL: f64 = 1e-8;

/// Largest dimension for which a dense matrix is materialized on request.
pub const DENSE_MAX: usize = 7_000;

const MAX_DEGENERACY: usize = 64;

/// `H = sum_e P_e` with `P_e` the projector onto maximal total spin of the
/// edge, stored as local two-site terms.
#[derive(Clone, Debug)]
pub struct AkltHamiltonian {
    graph: Graph,
    space: TensorSpace,
    terms: Vec<(usize, usize, CMatrix)>,
}

/// Two-site projectors keyed by the spin pair.
pub(crate) fn local_projectors(graph: &Graph) -> Vec<CMatrix> {
    let mut cache: HashMap<(Spin, Spin), CMatrix> = HashMap::new();
    graph
        .edges()
        .iter()
        .map(|&(a, b)| {
            let key = (graph.spin(a), graph.spin(b));
            cache
                .entry(key)
                .or_insert_with(|| max_spin_projector(key.0, key.1).into_matrix())
                .clone()
        })
        .collect()
}

pub(crate) fn tensor_space(graph: &Graph) -> Result<TensorSpace> {
    TensorSpace::new(graph.spins().iter().map(|s| s.dim()).collect())
}

impl AkltHamiltonian {
    pub fn new(graph: &Graph) -> Result<Self> {
        let space = tensor_space(graph)?;
        let terms = graph
            .edges()
            .iter()
            .zip(local_projectors(graph))
            .map(|(&(a, b), p)| (a, b, p))
            .collect();
        Ok(Self {
            graph: graph.clone(),
            space,
            terms,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    /// Local projector of edge `e` on its two sites.
    pub fn edge_projector(&self, e: usize) -> &CMatrix {
        &self.terms[e].2
    }

    /// `||P_e v||` for one edge.
    pub fn edge_residual(&self, e: usize, v: &CVector) -> f64 {
        let (a, b, p) = &self.terms[e];
        let mut y = CVector::zeros(self.space.dim());
        self.space.apply_two_site(p, *a, *b, c(1.0), v, &mut y);
        y.norm()
    }

    /// Dense matrix, refused above `DENSE_MAX`.
    pub fn to_dense(&self) -> Result<HermitianOperator> {
        if self.space.dim() > DENSE_MAX {
            return Err(Error::ResourceGuard(format!(
                "dense Hamiltonian limited to dimension {DENSE_MAX}, got {}",
                self.space.dim()
            )));
        }
        HermitianOperator::new(to_dense(self))
    }
}

impl LinearOperator for AkltHamiltonian {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn apply(&self, x: &CVector) -> CVector {
        let mut y = CVector::zeros(self.space.dim());
        for (a, b, p) in &self.terms {
            self.space.apply_two_site(p, *a, *b, c(1.0), x, &mut y);
        }
        y
    }
}

/// Zero-energy eigenspace.
#[derive(Clone, Debug)]
pub struct GroundSpace {
    pub energy: f64,
    /// Orthonormal basis.
    pub basis: Vec<CVector>,
    pub degeneracy: usize,
}

/// Ground space together with the spectral gap above it.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub ground: GroundSpace,
    pub gap: f64,
}

fn not_frustration_free(e: f64) -> Error {
    Error::Numerical(format!(
        "lowest energy {e:.3e} exceeds {GROUND_TOL:e}; the Hamiltonian is not frustration free"
    ))
}

/// Ground space and gap of any positive semidefinite operator whose ground
/// energy is zero.
pub fn analyze<O: LinearOperator + ?Sized>(h: &O) -> Result<Spectrum> {
    let n = h.dim();
    if n <= DENSE_LIMIT {
        let (vals, vecs) = hermitian_eigh(&to_dense(h));
        return spectrum_from_dense(&vals, &vecs);
    }
    let opts = LanczosOptions::default();
    let mut basis: Vec<CVector> = Vec::new();
    let mut energy = 0.0;
    loop {
        let pair = extremal_eigenpairs(h, Which::Smallest, 1, &basis, &opts)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Numerical("operator has no excited states".into()))?;
        if pair.value > GROUND_TOL {
            if basis.is_empty() {
                return Err(not_frustration_free(pair.value));
            }
            return Ok(Spectrum {
                ground: GroundSpace {
                    energy,
                    degeneracy: basis.len(),
                    basis,
                },
                gap: pair.value,
            });
        }
        if basis.is_empty() {
            energy = pair.value;
        }
        basis.push(pair.vector);
        if basis.len() > MAX_DEGENERACY {
            return Err(Error::ResourceGuard(format!(
                "ground space degeneracy exceeds {MAX_DEGENERACY}"
            )));
        }
    }
}

fn spectrum_from_dense(vals: &[f64], vecs: &CMatrix) -> Result<Spectrum> {
    let first = *vals.first().ok_or_else(|| Error::Numerical("empty operator".into()))?;
    if first > GROUND_TOL {
        return Err(not_frustration_free(first));
    }
    let k = vals.iter().take_while(|&&v| v <= GROUND_TOL).count();
    let gap = vals
        .get(k)
        .copied()
        .ok_or_else(|| Error::Numerical("operator has no excited states".into()))?;
    Ok(Spectrum {
        ground: GroundSpace {
            energy: first,
            basis: (0..k).map(|i| vecs.column(i).into_owned()).collect(),
            degeneracy: k,
        },
        gap,
    })
}

/// Smallest eigenvalue above the ground energy threshold.
pub fn spectral_gap<O: LinearOperator + ?Sized>(h: &O) -> Result<f64> {
    Ok(analyze(h)?.gap)
}

pub fn ground_space<O: LinearOperator + ?Sized>(h: &O) -> Result<GroundSpace> {
    Ok(analyze(h)?.ground)
}

/// The four chain Hamiltonians: closed, and open with spin-1/2 or spin-1
/// end sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainKind {
    Closed,
    OpenHalfHalf,
    OpenHalfOne,
    OpenOneOne,
}

impl ChainKind {
    pub const ALL: [ChainKind; 4] = [
        ChainKind::OpenHalfHalf,
        ChainKind::OpenHalfOne,
        ChainKind::OpenOneOne,
        ChainKind::Closed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChainKind::Closed => "closed",
            ChainKind::OpenHalfHalf => "open",
            ChainKind::OpenHalfOne => "open-half-one",
            ChainKind::OpenOneOne => "open11",
        }
    }

    /// Graph with the spin assignment of this chain type.
    pub fn graph(self, n: usize) -> Result<Graph> {
        match self {
            ChainKind::Closed => closed_chain(n),
            ChainKind::OpenHalfHalf => open_chain(n),
            ChainKind::OpenHalfOne | ChainKind::OpenOneOne => {
                let base = open_chain(n)?;
                let mut spins = std::collections::BTreeMap::new();
                spins.insert(n - 1, Spin::ONE);
                if self == ChainKind::OpenOneOne {
                    spins.insert(0, Spin::ONE);
                }
                let edges = base.edges().to_vec();
                Graph::with_spins(n, &edges, spins)
            }
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChainKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "closed" => Ok(ChainKind::Closed),
            "open" | "open-half-half" => Ok(ChainKind::OpenHalfHalf),
            "open-half-one" | "open1" => Ok(ChainKind::OpenHalfOne),
            "open11" | "open-one-one" => Ok(ChainKind::OpenOneOne),
            other => Err(Error::InvalidArgument(format!("unknown chain type `{other}`"))),
        }
    }
}

/// Lower bound on the closed-chain gap from an open-chain gap on `k` sites.
pub fn knabe_bound(gamma_open: f64, k: usize) -> Result<f64> {
    if k <= 2 {
        return Err(Error::InvalidArgument(format!("k must exceed 2, got {k}")));
    }
    let k = k as f64;
    Ok((k - 1.0) / (k - 2.0) * (gamma_open - 1.0 / (k - 1.0)))
}

/// Sharper bound with the finite-size criterion of Gosset and Mozgunov.
pub fn gosset_mozgunov_bound(gamma_open: f64, k: usize) -> Result<f64> {
    if k <= 2 {
        return Err(Error::InvalidArgument(format!("k must exceed 2, got {k}")));
    }
    let k = k as f64;
    Ok(5.0 / 6.0 * (k * k + k) / (k * k - 4.0) * (gamma_open - 6.0 / (k * (k + 1.0))))
}
