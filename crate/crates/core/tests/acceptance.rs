//! Reproduction run: one PASS/FAIL line per criterion, followed by the
//! individual mismatches of failing criteria.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aklt_core::graphs::{atlas, closed_chain, optimal_colorings, Graph, MatchingCover, ATLAS_SIZE};
use aklt_core::protocol::{
    design_hypothesis, nu_se, proportional_probabilities, s_of_graph, theorem4_bound, theorem5_bound,
    OptimizeOptions, ProtocolContext,
};
use aklt_core::simulator::{simulate, Ensemble, NoiseModel};
use aklt_core::sphere::{Builtin, SphereDistribution};
use aklt_core::spin::{Spin, UnitVector};
use aklt_core::tables::{
    bond_gap_table, catalog_table, chain_gap_table, matching_count_table, overlap_table, overlap_table_spins,
    CatalogRow, COLORING_LIMIT,
};

use common::*;

const TABLE_I: [[f64; 8]; 6] = [
    [0.667, 0.517, 0.454, 0.421, 0.402, 0.390, 0.381, 0.376],
    [0.592, 0.473, 0.431, 0.408, 0.393, 0.384, 0.377, 0.372],
    [0.500, 0.449, 0.413, 0.398, 0.387, 0.379, 0.374, 0.367],
    [0.833, 0.333, 0.454, 0.348, 0.402, 0.350, 0.381, 0.350],
    [0.0, 0.173, 0.218, 0.248, 0.264, 0.276, 0.284, 0.291],
    [0.0, 0.207, 0.254, 0.280, 0.290, 0.296, 0.299, 0.301],
];

/// Name, vertices, distinct tests, design strength, `nu_S` for `S = 1..4`.
type BondRow = (&'static str, Option<usize>, Option<usize>, Option<usize>, [(u32, u32); 7]);

const TABLE_II: [BondRow; 8] = [
    ("tetrahedron", Some(4), Some(4), Some(2), [(2, 3), (1, 2), (1, 3), (5, 18), (5, 27), (5, 54), (0, 1)]),
    ("octahedron", Some(6), Some(3), Some(3), [(2, 3), (1, 2), (1, 3), (1, 6), (0, 1), (0, 1), (0, 1)]),
    ("cube", Some(8), Some(4), Some(3), [(2, 3), (1, 2), (1, 3), (5, 18), (5, 27), (5, 54), (0, 1)]),
    ("icosahedron", Some(12), Some(6), Some(5), [(2, 3), (1, 2), (2, 5), (1, 3), (4, 15), (7, 30), (14, 75)]),
    ("dodecahedron", Some(20), Some(10), Some(5), [(2, 3), (1, 2), (2, 5), (1, 3), (5, 18), (2, 9), (16, 81)]),
    ("mu24", Some(24), Some(24), Some(7), [(2, 3), (1, 2), (2, 5), (1, 3), (2, 7), (1, 4), (23, 105)]),
    ("mu32", Some(32), Some(16), Some(9), [(2, 3), (1, 2), (2, 5), (1, 3), (2, 7), (1, 4), (2, 9)]),
    ("isotropic", None, None, None, [(2, 3), (1, 2), (2, 5), (1, 3), (2, 7), (1, 4), (2, 9)]),
];

/// Rows `(S1, S3)` in the order `(1/2,1/2), (1/2,1), ..., (3,3)`; columns
/// `S2 = 1/2, ..., 3`.
const TABLE_III: [[(u32, u32); 6]; 21] = [
    [(1, 4), (1, 9), (1, 16), (1, 25), (1, 36), (1, 49)],
    [(1, 3), (1, 6), (1, 10), (1, 15), (1, 21), (1, 28)],
    [(3, 8), (1, 5), (1, 8), (3, 35), (1, 16), (1, 21)],
    [(2, 5), (2, 9), (1, 7), (1, 10), (2, 27), (2, 35)],
    [(5, 12), (5, 21), (5, 32), (1, 9), (1, 12), (5, 77)],
    [(3, 7), (1, 4), (1, 6), (3, 25), (1, 11), (1, 14)],
    [(4, 9), (1, 4), (4, 25), (1, 9), (4, 49), (1, 16)],
    [(1, 2), (3, 10), (1, 5), (1, 7), (3, 28), (1, 12)],
    [(8, 15), (1, 3), (8, 35), (1, 6), (8, 63), (1, 10)],
    [(5, 9), (5, 14), (1, 4), (5, 27), (1, 7), (5, 44)],
    [(4, 7), (3, 8), (4, 15), (1, 5), (12, 77), (1, 8)],
    [(9, 16), (9, 25), (1, 4), (9, 49), (9, 64), (1, 9)],
    [(3, 5), (2, 5), (2, 7), (3, 14), (1, 6), (2, 15)],
    [(5, 8), (3, 7), (5, 16), (5, 21), (3, 16), (5, 33)],
    [(9, 14), (9, 20), (1, 3), (9, 35), (9, 44), (1, 6)],
    [(16, 25), (4, 9), (16, 49), (1, 4), (16, 81), (4, 25)],
    [(2, 3), (10, 21), (5, 14), (5, 18), (2, 9), (2, 11)],
    [(24, 35), (1, 2), (8, 21), (3, 10), (8, 33), (1, 5)],
    [(25, 36), (25, 49), (25, 64), (25, 81), (1, 4), (25, 121)],
    [(5, 7), (15, 28), (5, 12), (1, 3), (3, 11), (5, 22)],
    [(36, 49), (9, 16), (4, 9), (9, 25), (36, 121), (1, 4)],
];

/// `(upsilon, #maximal, #maximum)` for closed and open chains, n = 3..10.
const TABLE_IV: [[(usize, usize, usize); 8]; 2] = [
    [(1, 3, 3), (2, 2, 2), (2, 5, 5), (3, 5, 2), (3, 7, 7), (4, 10, 2), (4, 12, 9), (5, 17, 2)],
    [(1, 2, 2), (2, 2, 1), (2, 3, 3), (3, 4, 1), (3, 5, 4), (4, 7, 1), (4, 9, 5), (5, 12, 1)],
];

struct CatalogRef {
    /// |V|, |E|, Delta, upsilon, chi, chi'.
    invariants: [usize; 6],
    dim: u128,
    gamma: f64,
    nu_trivial: f64,
    nu_uniform: f64,
    nu_optimized: f64,
    p: &'static [f64],
}

const fn row(
    invariants: [usize; 6],
    dim: u128,
    gamma: f64,
    nu: [f64; 3],
    p: &'static [f64],
) -> CatalogRef {
    CatalogRef {
        invariants,
        dim,
        gamma,
        nu_trivial: nu[0],
        nu_uniform: nu[1],
        nu_optimized: nu[2],
        p,
    }
}

const T3: f64 = 1.0 / 3.0;

const TABLE_V: [CatalogRef; 30] = [
    row([2, 1, 1, 1, 2, 1], 4, 1.0, [2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0], &[1.0]),
    row([3, 2, 2, 1, 2, 2], 12, 2.0 / 3.0, [1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0], &[0.5, 0.5]),
    row([3, 3, 2, 1, 3, 3], 27, 5.0 / 6.0, [1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0], &[T3, T3, T3]),
    row([4, 3, 3, 1, 2, 3], 32, 0.5, [1.0 / 15.0, 1.0 / 15.0, 1.0 / 15.0], &[T3, T3, T3]),
    row([4, 3, 2, 2, 2, 2], 36, 0.5168, [0.0755, 0.1119, 0.1134], &[0.4526, 0.5474]),
    row([4, 4, 3, 2, 3, 3], 72, 0.5595, [1.0 / 20.0, 1.0 / 15.0, 1.0 / 15.0], &[T3, T3, T3]),
    row([4, 4, 2, 2, 2, 2], 81, 1.0 / 3.0, [1.0 / 30.0, 1.0 / 15.0, 1.0 / 15.0], &[0.5, 0.5]),
    row([4, 5, 3, 2, 3, 3], 144, 0.5, [1.0 / 30.0, 0.0556, 0.0618], &[0.3708, 0.3708, 0.2583]),
    row([4, 6, 3, 2, 4, 3], 256, 0.7, [1.0 / 30.0, 1.0 / 15.0, 1.0 / 15.0], &[T3, T3, T3]),
    row([5, 4, 4, 1, 2, 4], 80, 0.4, [1.0 / 30.0, 1.0 / 30.0, 1.0 / 30.0], &[0.25, 0.25, 0.25, 0.25]),
    row([5, 4, 2, 2, 2, 2], 108, 0.4539, [0.0476, 0.0941, 0.0941], &[0.5, 0.5]),
    row([5, 4, 3, 2, 2, 3], 96, 0.4117, [0.0385, 0.0511, 0.0529], &[0.3170, 0.4018, 0.2812]),
    row([5, 5, 2, 2, 3, 3], 243, 0.4540, [0.0363, 0.0597, 0.0603], &[0.3368, 0.3368, 0.3264]),
    row([5, 5, 4, 2, 3, 4], 180, 0.4295, [2.0 / 75.0, 1.0 / 30.0, 1.0 / 30.0], &[0.25, 0.25, 0.25, 0.25]),
    row([5, 5, 3, 2, 3, 3], 192, 0.4796, [0.0316, 0.0527, 0.0547], &[0.2975, 0.2975, 0.4050]),
    row([5, 5, 3, 2, 2, 3], 216, 0.2871, [0.0206, 0.0344, 0.0369], &[0.3892, 0.3892, 0.2214]),
    row([5, 5, 3, 2, 3, 3], 216, 0.4396, [0.0308, 0.0511, 0.0529], &[0.3122, 0.4018, 0.2860]),
    row([5, 6, 3, 2, 2, 3], 432, 0.1931, [0.0107, 0.0214, 0.0214], &[T3, T3, T3]),
    row([5, 6, 3, 2, 3, 3], 432, 0.3106, [0.0172, 0.0343, 0.0347], &[0.3130, 0.3130, 0.3740]),
    row([5, 6, 4, 2, 3, 4], 360, 0.42, [0.0208, 0.0312, 0.0319], &[0.2470, 0.2721, 0.2134, 0.2674]),
    row([5, 6, 3, 2, 3, 3], 384, 0.4036, [0.0211, 0.0422, 0.0441], &[0.2481, 0.3760, 0.3760]),
    row([5, 6, 4, 2, 3, 4], 405, 7.0 / 15.0, [0.0222, 1.0 / 30.0, 1.0 / 30.0], &[0.2, 0.2, 0.2, 0.2, 0.2]),
    row([5, 7, 4, 2, 3, 4], 675, 0.3236, [0.0132, 0.0231, 0.0265], &[0.2873, 0.2873, 0.1382, 0.2873]),
    row([5, 7, 4, 2, 3, 4], 720, 0.4263, [0.0180, 0.0315, 0.0318], &[0.2657, 0.2462, 0.2387, 0.2494]),
    row([5, 7, 3, 2, 3, 4], 768, 0.2501, [0.0110, 0.0192, 0.0193], &[0.2625, 0.2375, 0.2625, 0.2375]),
    row([5, 7, 4, 2, 4, 4], 640, 0.4877, [0.0190, 1.0 / 30.0, 1.0 / 30.0], &[0.25, 0.25, 0.25, 0.25]),
    row([5, 8, 4, 2, 3, 4], 1280, 0.2836, [0.0100, 0.0199, 0.0199], &[0.25, 0.25, 0.25, 0.25]),
    row([5, 8, 4, 2, 4, 4], 1200, 0.4053, [0.0135, 0.0269, 0.0298], &[0.2818, 0.2818, 0.1687, 0.2677]),
    row([5, 9, 4, 2, 4, 5], 2000, 0.4, [0.0111, 0.02, 0.0203], &[0.1850, 0.1965, 0.1850, 0.2372, 0.1965]),
    row([5, 10, 4, 2, 5, 5], 3125, 0.6, [0.0133, 2.0 / 75.0, 2.0 / 75.0], &[0.2, 0.2, 0.2, 0.2, 0.2]),
];

/// Individual mismatches that are understood, keyed by criterion and the
/// start of the failure message. Any other failure still fails the run.
const KNOWN_DEVIATIONS: &[(usize, &str, &str)] = &[
    (
        1,
        "H_1,1 n=10:",
        "the reference value 0.367 disagrees with its own Knabe entry 0.291 = (9/8)(gamma - 1/9), \
         which requires gamma = 0.3698; the computed gap satisfies that relation",
    ),
    (
        5,
        "row 22:",
        "the reference row lists five probabilities for a graph with chromatic index 4; \
         gamma, invariants and all three nu columns agree",
    ),
];

fn known_reason(id: usize, failure: &str) -> Option<&'static str> {
    KNOWN_DEVIATIONS
        .iter()
        .find(|(k, prefix, _)| *k == id && failure.starts_with(prefix))
        .map(|(_, _, why)| *why)
}

struct Report {
    id: usize,
    name: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
    checked: usize,
}

impl Report {
    fn new(id: usize, name: &'static str) -> Self {
        Self {
            id,
            name,
            failures: Vec::new(),
            notes: Vec::new(),
            checked: 0,
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn result(&mut self, r: Check) {
        self.checked += 1;
        if let Err(e) = r {
            self.failures.push(e);
        }
    }

    fn close(&mut self, a: f64, b: f64, tol: f64, what: impl FnOnce() -> String) {
        self.check((a - b).abs() <= tol, || format!("{}: got {a:.6}, expected {b:.6}", what()));
    }
}

fn frac((p, q): (u32, u32)) -> f64 {
    p as f64 / q as f64
}

fn criterion_1() -> Report {
    let mut r = Report::new(1, "chain gaps and analytic bounds (Table I)");
    let rows = match chain_gap_table(3..=10) {
        Ok(rows) => rows,
        Err(e) => {
            r.check(false, || e.to_string());
            return r;
        }
    };
    let labels = ["H_1/2,1/2", "H_1/2,1", "H_1,1", "H_closed", "knabe", "gosset-mozgunov"];
    for (i, row) in rows.iter().enumerate() {
        let got = [
            row.open_half_half,
            row.open_half_one,
            row.open_one_one,
            row.closed,
            row.knabe,
            row.gosset_mozgunov,
        ];
        for (k, &v) in got.iter().enumerate() {
            r.close(v, TABLE_I[k][i], 1e-3, || format!("{} n={}", labels[k], row.n));
        }
    }
    r
}

fn criterion_2() -> Report {
    let mut r = Report::new(2, "bond gaps, vertex and test counts, design strengths (Table II)");
    let rows = bond_gap_table();
    r.check(rows.len() == TABLE_II.len(), || format!("{} rows", rows.len()));
    for (row, (name, v, t, d, nus)) in rows.iter().zip(TABLE_II) {
        r.check(row.distribution == name, || format!("row {} is {}", name, row.distribution));
        r.check(row.vertices == v, || format!("{name}: vertices {:?}", row.vertices));
        r.check(row.distinct_tests == t, || format!("{name}: tests {:?}", row.distinct_tests));
        r.check(row.design_strength == d, || format!("{name}: design strength {:?}", row.design_strength));
        for (k, (&got, &want)) in row.nu.iter().zip(&nus).enumerate() {
            r.close(got, frac(want), 1e-9, || format!("{name} nu_{}", Spin::from_twice(k as u32 + 2)));
        }
    }
    r
}

fn criterion_3() -> Report {
    let mut r = Report::new(3, "overlap values s^2 (Table III)");
    let rows = overlap_table();
    r.check(rows.len() == TABLE_III.len(), || format!("{} rows", rows.len()));
    let s2 = overlap_table_spins();
    for (row, want) in rows.iter().zip(&TABLE_III) {
        for (k, (&got, &w)) in row.s_squared.iter().zip(want).enumerate() {
            r.close(got, frac(w), 1e-9, || format!("s^2 (S1,S2,S3) = ({},{},{})", row.s1, s2[k], row.s3));
        }
    }
    r
}

fn criterion_4() -> Report {
    let mut r = Report::new(4, "matching counts of chains (Table IV)");
    match matching_count_table(3..=10) {
        Ok(rows) => {
            for (i, row) in rows.iter().enumerate() {
                r.check(row.closed == TABLE_IV[0][i], || format!("closed n={}: {:?}", row.n, row.closed));
                r.check(row.open == TABLE_IV[1][i], || format!("open n={}: {:?}", row.n, row.open));
            }
        }
        Err(e) => r.check(false, || e.to_string()),
    }
    r
}

/// Largest componentwise difference after sorting, which is the best
/// matching under any relabeling of the colors.
fn sorted_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    Some(x.iter().zip(&y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
}

fn cover_of(g: &Graph, row: &CatalogRow) -> MatchingCover {
    let classes: Vec<Vec<usize>> = row
        .coloring
        .iter()
        .map(|c| c.iter().map(|&e| g.edge_index(e).expect("edge of graph")).collect())
        .collect();
    MatchingCover::from_indices(g, &classes).expect("valid coloring")
}

/// Whether the printed coloring columns agree with `(uniform, optimized, p)`.
fn coloring_matches(want: &CatalogRef, uniform: f64, optimized: f64, p: &[f64]) -> bool {
    (uniform - want.nu_uniform).abs() <= 1e-3
        && (optimized - want.nu_optimized).abs() <= 1e-3
        && sorted_distance(p, want.p).is_some_and(|d| d <= 5e-3)
}

/// Searches the other minimum colorings for one reproducing the printed
/// coloring columns.
fn alternative_coloring(g: &Graph, ctx: &ProtocolContext, want: &CatalogRef) -> Option<(f64, f64, Vec<f64>)> {
    let opts = OptimizeOptions::default();
    for cover in optimal_colorings(g, COLORING_LIMIT).ok()? {
        let uniform = ctx.uniform_gap(&cover).ok()?;
        if (uniform - want.nu_uniform).abs() > 1e-3 {
            continue;
        }
        let opt = ctx.optimize(&cover, &opts).ok()?;
        if coloring_matches(want, uniform, opt.gap, &opt.probabilities) {
            return Some((uniform, opt.gap, opt.probabilities));
        }
    }
    None
}

fn criterion_5(rows: &[CatalogRow], mu: &SphereDistribution) -> Report {
    let mut r = Report::new(5, "catalog of graphs up to five vertices (Table V)");
    for (row, want) in rows.iter().zip(&TABLE_V) {
        let k = row.index;
        let got_inv = [
            row.vertices,
            row.edges,
            row.max_degree,
            row.matching_number,
            row.chromatic_number,
            row.chromatic_index,
        ];
        r.check(got_inv == want.invariants, || format!("row {k}: invariants {got_inv:?}"));
        r.check(row.dim == want.dim, || format!("row {k}: dim {}", row.dim));
        r.close(row.gamma, want.gamma, 1e-3, || format!("row {k} gamma"));
        r.close(row.nu_trivial, want.nu_trivial, 1e-3, || format!("row {k} nu_tri"));
        if coloring_matches(want, row.nu_uniform, row.nu_optimized, &row.probabilities) {
            r.checked += 1;
            continue;
        }
        let g = atlas(k).expect("atlas graph");
        let ctx = ProtocolContext::new(&g, mu).expect("protocol context");
        match alternative_coloring(&g, &ctx, want) {
            Some((u, o, p)) => {
                r.checked += 1;
                r.notes.push(format!(
                    "row {k}: printed columns reproduced by another minimum coloring \
                     (nu {u:.4}, nu_opt {o:.4}, p {p:.4?}); the default choice reaches nu_opt {:.4}",
                    row.nu_optimized
                ));
            }
            None => {
                let d = sorted_distance(&row.probabilities, want.p)
                    .map_or_else(|| format!("{} vs {} classes", row.probabilities.len(), want.p.len()), |d| format!("{d:.4}"));
                r.check(false, || {
                    format!(
                        "row {k}: nu {:.4} (want {:.4}), nu_opt {:.4} (want {:.4}), p {:.4?} (distance {d}); \
                         no minimum coloring reproduces the printed columns",
                        row.nu_uniform, want.nu_uniform, row.nu_optimized, want.nu_optimized, row.probabilities
                    )
                });
            }
        }
    }
    r
}

/// Trivial-cover gaps of cycles `n = 3..=7` for one distribution.
fn cycle_gaps(mu: &SphereDistribution) -> Vec<(usize, ProtocolContext, f64)> {
    (3..=7)
        .map(|n| {
            let g = closed_chain(n).expect("cycle");
            let ctx = ProtocolContext::new(&g, mu).expect("context");
            let nu = ctx.uniform_gap(&MatchingCover::trivial(&g)).expect("gap");
            (n, ctx, nu)
        })
        .collect()
}

fn criterion_6(cycles: &[(Builtin, Vec<(usize, ProtocolContext, f64)>)]) -> Report {
    let mut r = Report::new(6, "saturation of the coloring bound on cycles");
    for (b, runs) in cycles {
        let exact = matches!(b, Builtin::Icosahedron | Builtin::Dodecahedron | Builtin::Mu24 | Builtin::Mu32);
        for (n, ctx, nu) in runs {
            let target = 2.0 * ctx.gamma() / (5.0 * *n as f64);
            if exact {
                r.close(*nu, target, 1e-6, || format!("{b} n={n}"));
            } else {
                let rel = (nu - target).abs() / target;
                r.check(rel <= 0.05, || format!("{b} n={n}: nu {nu:.6} vs {target:.6} ({:.1}%)", 100.0 * rel));
            }
        }
    }
    r
}

/// Checks every bound form that applies to `(cover, p)` against `nu`.
fn bounds_hold(r: &mut Report, label: &str, ctx: &ProtocolContext, cover: &MatchingCover, nu_uniform: f64) {
    let g = ctx.graph();
    let dd = g.degree_data();
    let nse = nu_se(g, ctx.mu());
    let design = design_hypothesis(ctx.mu(), dd.s_e);
    if let Ok(t4) = theorem4_bound(nse, ctx.gamma(), s_of_graph(g), dd.g_overlap as f64, cover.len()) {
        r.check(t4.bound <= nu_uniform + 1e-9, || format!("{label}: theorem 4 bound {} > {nu_uniform}", t4.bound));
        r.check(t4.weak <= nu_uniform + 1e-9, || format!("{label}: theorem 4 weak form {} > {nu_uniform}", t4.weak));
        if design {
            r.check(t4.design <= nu_uniform + 1e-9, || format!("{label}: theorem 4 design form {}", t4.design));
            r.check(t4.design_weak <= nu_uniform + 1e-9, || format!("{label}: theorem 4 weak design form {}", t4.design_weak));
        }
    }
    if cover.is_coloring() {
        let pp = proportional_probabilities(cover).expect("coloring");
        let nu_p = ctx.gap(cover, &pp).expect("gap");
        let t5 = theorem5_bound(nse, ctx.gamma(), dd.s_e, &cover.sizes()).expect("theorem 5");
        r.check(t5.bound <= nu_p + 1e-9, || format!("{label}: theorem 5 bound {} > {nu_p}", t5.bound));
        if design {
            r.check(t5.design <= nu_p + 1e-9, || format!("{label}: theorem 5 design form {} > {nu_p}", t5.design));
        }
    }
}

fn criterion_7(
    rows: &[CatalogRow],
    mu: &SphereDistribution,
    cycles: &[(Builtin, Vec<(usize, ProtocolContext, f64)>)],
) -> Report {
    let mut r = Report::new(7, "lower bounds never exceed measured gaps");
    for row in rows {
        let g = atlas(row.index).expect("atlas graph");
        let ctx = ProtocolContext::new(&g, mu).expect("context");
        bounds_hold(&mut r, &format!("row {} trivial", row.index), &ctx, &MatchingCover::trivial(&g), row.nu_trivial);
        bounds_hold(&mut r, &format!("row {} coloring", row.index), &ctx, &cover_of(&g, row), row.nu_uniform);
    }
    for (b, runs) in cycles {
        for (n, ctx, nu) in runs {
            let cover = MatchingCover::trivial(ctx.graph());
            bounds_hold(&mut r, &format!("{b} cycle n={n}"), ctx, &cover, *nu);
        }
    }
    r
}

fn random_unit(rng: &mut ChaCha8Rng) -> UnitVector {
    let t = (1.0 - 2.0 * rng.gen::<f64>()).acos();
    UnitVector::from_angles(t, rng.gen::<f64>() * std::f64::consts::TAU)
}

fn criterion_8() -> Report {
    let mut r = Report::new(8, "property suites");
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    // pair outcome probabilities: saturation, inversion, Clebsch-Gordan
    for _ in 0..200 {
        let s1 = Spin::from_twice(rng.gen_range(1..=6));
        let s2 = Spin::from_twice(rng.gen_range(1..=6));
        let pick = |rng: &mut ChaCha8Rng, s: Spin| {
            let t = s.twice() as i32;
            match rng.gen_range(0..3) {
                0 => t,
                1 => -t,
                _ => t - 2 * rng.gen_range(0..=t),
            }
        };
        let (m1, m2) = (pick(&mut rng, s1), pick(&mut rng, s2));
        let a = random_unit(&mut rng);
        let b = match rng.gen_range(0..3) {
            0 => a,
            1 => a.neg(),
            _ => random_unit(&mut rng),
        };
        r.result(check_saturation(s1, m1, s2, m2, &a, &b));
        r.result(check_inversion(s1, m1, s2, m2, &a, &b));
        r.result(check_clebsch_gordan(s1, m1, s2, m2));
    }

    // bond gaps over the builtin grid
    for b in Builtin::ALL {
        let mu = b.distribution();
        r.result(check_monotone_gaps(&mu, Spin::from_twice(8)));
        for t in 1..=8 {
            let s = Spin::from_twice(t);
            r.result(check_split_independence(&mu, s));
            r.result(check_gap_cap_and_designs(&mu, s));
            r.result(check_frame_potential_bound(&mu, s));
        }
    }

    // ground states annihilated by every edge projector
    for k in 1..=ATLAS_SIZE {
        r.result(check_annihilation(&atlas(k).expect("atlas graph")));
    }

    // test operators shrink as matchings grow
    let mut cases = 0;
    while cases < 50 {
        let g = atlas(rng.gen_range(5..=17)).expect("atlas graph");
        let mu = Builtin::ALL[rng.gen_range(0..Builtin::ALL.len())].distribution();
        let m = g.edge_count();
        let e = rng.gen_range(0..m);
        let free: Vec<usize> = (0..m).filter(|&f| f != e && !g.adjacent(e, f)).collect();
        if free.is_empty() {
            continue;
        }
        let f = free[rng.gen_range(0..free.len())];
        let ctx = ProtocolContext::new(&g, &mu).expect("context");
        r.result(check_test_monotonicity(&ctx, &[e], &[e, f]));
        cases += 1;
    }

    // cyclic covers of odd cycles
    let dodeca = Builtin::Dodecahedron.distribution();
    for n in [5, 7, 9] {
        r.result(check_cycle_covers(n, &dodeca));
    }

    // overlap bound for a larger middle spin
    let spins = overlap_table_spins();
    for &a in &spins {
        for &b in &spins {
            for &c in &spins {
                r.result(check_overlap_bound(a, b, c));
            }
        }
    }
    r
}

fn criterion_9() -> Report {
    let mut r = Report::new(9, "simulated pass rates agree with exact acceptance");
    let mu32 = Builtin::Mu32.distribution();
    let dodeca = Builtin::Dodecahedron.distribution();
    let noises = [NoiseModel::Depolarized(0.1), NoiseModel::Depolarized(0.4), NoiseModel::WorstCase(0.2)];
    let protocols: Vec<(String, Graph, &SphereDistribution, bool)> = vec![
        ("atlas-3 trivial".into(), atlas(3).unwrap(), &mu32, false),
        ("atlas-5 coloring".into(), atlas(5).unwrap(), &mu32, true),
        ("atlas-8 coloring".into(), atlas(8).unwrap(), &mu32, true),
        ("closed-6 trivial".into(), closed_chain(6).unwrap(), &dodeca, false),
    ];
    for (i, (name, g, mu, colored)) in protocols.iter().enumerate() {
        let ctx = ProtocolContext::new(g, mu).expect("context");
        let cover = if *colored {
            aklt_core::graphs::edge_colorings(g).expect("coloring").optimal
        } else {
            MatchingCover::trivial(g)
        };
        let p = vec![1.0 / cover.len() as f64; cover.len()];
        let target = Ensemble::for_protocol(&ctx, &cover, &p, NoiseModel::Target).expect("state");
        let run = simulate(&ctx, &cover, &p, &target, 10_000, 100 + i as u64).expect("simulation");
        r.check(run.n_pass == run.n_runs, || format!("{name}: target passes {}/{}", run.n_pass, run.n_runs));
        for (j, &noise) in noises.iter().enumerate() {
            let state = Ensemble::for_protocol(&ctx, &cover, &p, noise).expect("state");
            let exact = state.exact_pass_probability(&ctx, &cover, &p).expect("exact");
            let run = simulate(&ctx, &cover, &p, &state, 100_000, 1000 + 10 * i as u64 + j as u64).expect("simulation");
            let sigma = (exact * (1.0 - exact) / run.n_runs as f64).sqrt();
            r.check((run.pass_rate - exact).abs() <= 3.0 * sigma, || {
                format!("{name} {noise}: rate {:.5} vs exact {exact:.5} (sigma {sigma:.5})", run.pass_rate)
            });
        }
    }
    r
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mu32 = Builtin::Mu32.distribution();
    let mut reports = vec![criterion_1(), criterion_2(), criterion_3(), criterion_4()];

    let rows = catalog_table(&mu32).expect("catalog sweep");
    reports.push(criterion_5(&rows, &mu32));

    let cycle_dists = [
        Builtin::Icosahedron,
        Builtin::Dodecahedron,
        Builtin::Mu24,
        Builtin::Mu32,
        Builtin::Tetrahedron,
        Builtin::Octahedron,
        Builtin::Cube,
    ];
    let cycles: Vec<_> = cycle_dists.iter().map(|&b| (b, cycle_gaps(&b.distribution()))).collect();
    reports.push(criterion_6(&cycles));
    reports.push(criterion_7(&rows, &mu32, &cycles));
    reports.push(criterion_8());
    reports.push(criterion_9());

    let mut unexpected = 0;
    for rep in &reports {
        let reasons: Vec<Option<&str>> = rep.failures.iter().map(|f| known_reason(rep.id, f)).collect();
        let status = if rep.failures.is_empty() {
            "PASS"
        } else if reasons.iter().all(Option::is_some) {
            "FAIL (known)"
        } else {
            unexpected += 1;
            "FAIL"
        };
        println!(
            "{status} criterion {}: {} [{} checks, {} failed]",
            rep.id,
            rep.name,
            rep.checked,
            rep.failures.len()
        );
        for (f, why) in rep.failures.iter().zip(&reasons) {
            println!("    mismatch: {f}");
            if let Some(why) = why {
                println!("    known: {why}");
            }
        }
        for n in &rep.notes {
            println!("    note: {n}");
        }
    }
    println!("N/A criterion 10: thermodynamic-limit constants, 2D lattice gaps and long-chain curves are out of reach at this scale");
    println!("acceptance run took {:.0}s", start.elapsed().as_secs_f64());

    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
