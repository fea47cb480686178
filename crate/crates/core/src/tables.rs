//! Row generators for the gap, bond, overlap, matching and catalog tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bond::{nu_isotropic, nu_s};
use crate::error::Result;
use crate::graphs::{
    atlas, chromatic_number, closed_chain, edge_colorings, enumerate_matchings, open_chain,
    optimal_colorings, MatchingCover, ATLAS_SIZE,
};
use crate::hamiltonian::{gosset_mozgunov_bound, knabe_bound, spectral_gap, AkltHamiltonian, ChainKind};
use crate::protocol::{best_cover, s_squared, OptimizeOptions, ProtocolContext};
use crate::sphere::{Builtin, SphereDistribution};
use crate::spin::Spin;

/// Chain lengths covered by the chain tables.
pub const CHAIN_LENGTHS: std::ops::RangeInclusive<usize> = 3..=10;

/// Upper limit on colorings examined per graph.
pub const COLORING_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainGapRow {
    pub n: usize,
    pub open_half_half: f64,
    pub open_half_one: f64,
    pub open_one_one: f64,
    pub closed: f64,
    pub knabe: f64,
    pub gosset_mozgunov: f64,
}

pub fn chain_gap(kind: ChainKind, n: usize) -> Result<f64> {
    spectral_gap(&AkltHamiltonian::new(&kind.graph(n)?)?)
}

pub fn chain_gap_row(n: usize) -> Result<ChainGapRow> {
    let gaps: Vec<f64> = ChainKind::ALL
        .par_iter()
        .map(|&k| chain_gap(k, n))
        .collect::<Result<_>>()?;
    Ok(ChainGapRow {
        n,
        open_half_half: gaps[0],
        open_half_one: gaps[1],
        open_one_one: gaps[2],
        closed: gaps[3],
        knabe: knabe_bound(gaps[2], n)?,
        gosset_mozgunov: gosset_mozgunov_bound(gaps[2], n)?,
    })
}

pub fn chain_gap_table(lengths: impl IntoIterator<Item = usize>) -> Result<Vec<ChainGapRow>> {
    lengths.into_iter().map(chain_gap_row).collect()
}

/// Spins `1, 3/2, ..., 4` of the bond table.
pub fn bond_table_spins() -> Vec<Spin> {
    (2..=8).map(Spin::from_twice).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BondGapRow {
    pub distribution: String,
    /// `None` for the isotropic distribution.
    pub vertices: Option<usize>,
    pub distinct_tests: Option<usize>,
    pub design_strength: Option<usize>,
    pub nu: Vec<f64>,
}

pub fn bond_gap_row(mu: &SphereDistribution) -> BondGapRow {
    BondGapRow {
        distribution: mu.name().to_string(),
        vertices: Some(mu.len()),
        distinct_tests: Some(mu.distinct_test_count()),
        design_strength: Some(mu.design_strength()),
        nu: bond_table_spins().into_iter().map(|s| nu_s(s, mu)).collect(),
    }
}

pub fn bond_gap_table() -> Vec<BondGapRow> {
    let mut rows: Vec<BondGapRow> =
        Builtin::ALL.iter().map(|b| bond_gap_row(&b.distribution())).collect();
    rows.push(BondGapRow {
        distribution: "isotropic".into(),
        vertices: None,
        distinct_tests: None,
        design_strength: None,
        nu: bond_table_spins().into_iter().map(nu_isotropic).collect(),
    });
    rows
}

/// Spins `1/2, 1, ..., 3` of the overlap table.
pub fn overlap_table_spins() -> Vec<Spin> {
    (1..=6).map(Spin::from_twice).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub s1: Spin,
    pub s3: Spin,
    /// `s^2` for each middle spin `S2 = 1/2, ..., 3`.
    pub s_squared: Vec<f64>,
}

pub fn overlap_table() -> Vec<OverlapRow> {
    let spins = overlap_table_spins();
    let mut pairs = Vec::new();
    for (i, &a) in spins.iter().enumerate() {
        for &b in &spins[i..] {
            pairs.push((a, b));
        }
    }
    pairs
        .par_iter()
        .map(|&(s1, s3)| OverlapRow {
            s1,
            s3,
            s_squared: spins.iter().map(|&s2| s_squared(s1, s2, s3)).collect(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingCountRow {
    pub n: usize,
    pub closed: (usize, usize, usize),
    pub open: (usize, usize, usize),
}

pub fn matching_count_table(lengths: impl IntoIterator<Item = usize>) -> Result<Vec<MatchingCountRow>> {
    lengths
        .into_iter()
        .map(|n| {
            let c = enumerate_matchings(&closed_chain(n)?)?;
            let o = enumerate_matchings(&open_chain(n)?)?;
            Ok(MatchingCountRow {
                n,
                closed: (c.matching_number, c.maximal.len(), c.maximum.len()),
                open: (o.matching_number, o.maximal.len(), o.maximum.len()),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub index: usize,
    pub vertices: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub matching_number: usize,
    pub chromatic_number: usize,
    pub chromatic_index: usize,
    pub dim: u128,
    pub gamma: f64,
    pub nu_trivial: f64,
    pub nu_uniform: f64,
    pub nu_optimized: f64,
    pub probabilities: Vec<f64>,
    /// Edge lists of the chosen coloring.
    pub coloring: Vec<Vec<(usize, usize)>>,
}

/// One catalog row, using `mu` for every bond. The coloring is the
/// minimum-size edge coloring with the largest optimized gap.
pub fn catalog_row(index: usize, mu: &SphereDistribution) -> Result<CatalogRow> {
    let g = atlas(index)?;
    let ctx = ProtocolContext::new(&g, mu)?;
    let trivial = MatchingCover::trivial(&g);
    let nu_trivial = ctx.uniform_gap(&trivial)?;
    let colorings = optimal_colorings(&g, COLORING_LIMIT)?;
    let choice = best_cover(&ctx, &colorings, &OptimizeOptions::default())?;
    let census = enumerate_matchings(&g)?;
    Ok(CatalogRow {
        index,
        vertices: g.n(),
        edges: g.edge_count(),
        max_degree: g.max_degree(),
        matching_number: census.matching_number,
        chromatic_number: chromatic_number(&g)?,
        chromatic_index: edge_colorings(&g)?.chromatic_index,
        dim: g.hilbert_dim(),
        gamma: ctx.gamma(),
        nu_trivial,
        nu_uniform: choice.uniform_gap,
        nu_optimized: choice.optimized.gap,
        probabilities: choice.optimized.probabilities.clone(),
        coloring: choice.cover.edge_lists(&g),
    })
}

pub fn catalog_table(mu: &SphereDistribution) -> Result<Vec<CatalogRow>> {
    (1..=ATLAS_SIZE)
        .into_par_iter()
        .map(|k| catalog_row(k, mu))
        .collect()
}
