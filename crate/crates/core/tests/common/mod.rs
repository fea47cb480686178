//! Checks shared by the property tests and the acceptance run. Each check
//! returns `Err` with a short description of the first violation.

#![allow(dead_code)]

use aklt_core::bond::{bond_operator, nu_s, omega_s};
use aklt_core::graphs::{closed_chain, cycle_matching_covers, Graph, Matching, MatchingCover};
use aklt_core::hamiltonian::{ground_space, AkltHamiltonian};
use aklt_core::linalg::{hermitian_eigh, to_dense};
use aklt_core::protocol::{s_squared, ProtocolContext};
use aklt_core::sphere::SphereDistribution;
use aklt_core::spin::{pair_outcome_probability, Spin, UnitVector};

pub type Check = Result<(), String>;

fn ln_factorial(n: i64) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Squared Clebsch-Gordan coefficient `|<J,M|j1,m1;j2,m2>|^2` from the
/// Racah formula. All arguments are doubled.
pub fn cg_squared(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m || j < (j1 - j2).abs() || j > j1 + j2 || (j1 + j2 + j) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i64| x / 2;
    let pre = (j as f64 + 1.0).ln()
        + ln_factorial(h(j + j1 - j2))
        + ln_factorial(h(j - j1 + j2))
        + ln_factorial(h(j1 + j2 - j))
        - ln_factorial(h(j1 + j2 + j) + 1);
    let norm = ln_factorial(h(j + m))
        + ln_factorial(h(j - m))
        + ln_factorial(h(j1 - m1))
        + ln_factorial(h(j1 + m1))
        + ln_factorial(h(j2 - m2))
        + ln_factorial(h(j2 + m2));
    let mut sum = 0.0;
    for k in 0..=h(j1 + j2 + j) {
        let args = [
            k,
            h(j1 + j2 - j) - k,
            h(j1 - m1) - k,
            h(j2 + m2) - k,
            h(j - j2 + m1) + k,
            h(j - j1 - m2) + k,
        ];
        if args.iter().any(|&a| a < 0) {
            continue;
        }
        let denom: f64 = args.iter().map(|&a| ln_factorial(a)).sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (0.5 * (pre + norm) - denom).exp();
    }
    sum * sum
}

/// `r = s` or `r = -s` within `tol`.
fn parallel(r: &UnitVector, q: &UnitVector, sign: f64, tol: f64) -> bool {
    (r.x() - sign * q.x()).abs() < tol && (r.y() - sign * q.y()).abs() < tol && (r.z() - sign * q.z()).abs() < tol
}

/// The four saturation conditions for `p_{r,q}(S1,m1;S2,m2) = 1`.
pub fn saturates(s1: Spin, m1: i32, s2: Spin, m2: i32, r: &UnitVector, q: &UnitVector) -> bool {
    let (t1, t2) = (s1.twice() as i32, s2.twice() as i32);
    let same = parallel(r, q, 1.0, 1e-12);
    let opposite = parallel(r, q, -1.0, 1e-12);
    (same && ((m1 == t1 && m2 == t2) || (m1 == -t1 && m2 == -t2)))
        || (opposite && ((m1 == t1 && m2 == -t2) || (m1 == -t1 && m2 == t2)))
}

pub fn check_clebsch_gordan(s1: Spin, m1: i32, s2: Spin, m2: i32) -> Check {
    let p = pair_outcome_probability(s1, m1, s2, m2, &UnitVector::Z, &UnitVector::Z).map_err(|e| e.to_string())?;
    let (j1, j2) = (s1.twice() as i64, s2.twice() as i64);
    let cg = cg_squared(j1, m1 as i64, j2, m2 as i64, j1 + j2, (m1 + m2) as i64);
    if (p - cg).abs() > 1e-10 {
        return Err(format!("p({s1},{m1}/2;{s2},{m2}/2) = {p}, CG^2 = {cg}"));
    }
    Ok(())
}

pub fn check_inversion(s1: Spin, m1: i32, s2: Spin, m2: i32, r: &UnitVector, q: &UnitVector) -> Check {
    let a = pair_outcome_probability(s1, m1, s2, m2, r, q).map_err(|e| e.to_string())?;
    let b = pair_outcome_probability(s1, m1, s2, -m2, r, &q.neg()).map_err(|e| e.to_string())?;
    if (a - b).abs() > 1e-10 {
        return Err(format!("p = {a} but inverted p = {b}"));
    }
    Ok(())
}

pub fn check_saturation(s1: Spin, m1: i32, s2: Spin, m2: i32, r: &UnitVector, q: &UnitVector) -> Check {
    let p = pair_outcome_probability(s1, m1, s2, m2, r, q).map_err(|e| e.to_string())?;
    if p > 1.0 + 1e-10 || p < -1e-12 {
        return Err(format!("p = {p} outside [0, 1]"));
    }
    let sat = saturates(s1, m1, s2, m2, r, q);
    if sat && (p - 1.0).abs() > 1e-10 {
        return Err(format!("saturating case gives p = {p}"));
    }
    if !sat && p > 1.0 - 1e-9 {
        return Err(format!("non-saturating case gives p = {p}"));
    }
    Ok(())
}

/// Every split `S1 + S2 = S` has gap `nu_S`.
pub fn check_split_independence(mu: &SphereDistribution, s: Spin) -> Check {
    let expect = nu_s(s, mu);
    for t1 in 1..s.twice() {
        let (s1, s2) = (Spin::from_twice(t1), Spin::from_twice(s.twice() - t1));
        let g = bond_operator(s1, s2, mu).gap();
        if (g - expect).abs() > 1e-10 {
            return Err(format!("{}: split ({s1},{s2}) gives {g}, nu_{s} = {expect}", mu.name()));
        }
    }
    Ok(())
}

/// Monotonicity in `S` and `nu_{S1} >= (2S2+1)/(2S1+1) nu_{S2}` for
/// `S1 <= S2 <= max`.
pub fn check_monotone_gaps(mu: &SphereDistribution, max: Spin) -> Check {
    let nus: Vec<(Spin, f64)> = (1..=max.twice()).map(Spin::from_twice).map(|s| (s, nu_s(s, mu))).collect();
    for w in nus.windows(2) {
        if w[1].1 > w[0].1 + 1e-10 {
            return Err(format!("{}: nu_{} = {} > nu_{} = {}", mu.name(), w[1].0, w[1].1, w[0].0, w[0].1));
        }
    }
    for (i, &(a, na)) in nus.iter().enumerate() {
        for &(b, nb) in &nus[i..] {
            let rhs = (b.twice() as f64 + 1.0) / (a.twice() as f64 + 1.0) * nb;
            if na < rhs - 1e-10 {
                return Err(format!("{}: nu_{a} = {na} < {rhs} from nu_{b}", mu.name()));
            }
        }
    }
    Ok(())
}

/// `nu_S <= 2/(2S+1)`, with equality exactly when the symmetrized
/// distribution is a `2S`-design.
pub fn check_gap_cap_and_designs(mu: &SphereDistribution, s: Spin) -> Check {
    let nu = nu_s(s, mu);
    let cap = 2.0 / (s.twice() as f64 + 1.0);
    if nu > cap + 1e-10 {
        return Err(format!("{}: nu_{s} = {nu} exceeds {cap}", mu.name()));
    }
    let strength = mu.symmetrize().design_strength();
    let equal = (nu - cap).abs() < 1e-10;
    if (strength >= s.twice() as usize) != equal {
        return Err(format!("{}: nu_{s} = {nu}, cap {cap}, symmetrized design strength {strength}", mu.name()));
    }
    Ok(())
}

/// `tr[Omega_S^2] >= (2S-1)^2/(2S+1)`, with equality exactly for
/// `2S`-designs; also `f_t >= 1/(t+1)`.
pub fn check_frame_potential_bound(mu: &SphereDistribution, s: Spin) -> Check {
    let o = omega_s(s, mu);
    let tr2 = (o.matrix() * o.matrix()).trace().re;
    let ts = s.twice() as f64;
    let floor = (ts - 1.0).powi(2) / (ts + 1.0);
    if tr2 < floor - 1e-10 {
        return Err(format!("{}: tr Omega_{s}^2 = {tr2} < {floor}", mu.name()));
    }
    let strength = mu.symmetrize().design_strength();
    if (strength >= s.twice() as usize) != ((tr2 - floor).abs() < 1e-10) {
        return Err(format!("{}: tr Omega_{s}^2 = {tr2}, floor {floor}, symmetrized design strength {strength}", mu.name()));
    }
    for t in (0..=10).step_by(2) {
        let f = mu.frame_potential(t).map_err(|e| e.to_string())?;
        if f < 1.0 / (t as f64 + 1.0) - 1e-12 {
            return Err(format!("{}: f_{t} = {f}", mu.name()));
        }
    }
    Ok(())
}

/// Every edge projector annihilates the ground space.
pub fn check_annihilation(g: &Graph) -> Check {
    let h = AkltHamiltonian::new(g).map_err(|e| e.to_string())?;
    let ground = ground_space(&h).map_err(|e| e.to_string())?;
    for v in &ground.basis {
        for e in 0..g.edge_count() {
            let r = h.edge_residual(e, v);
            if r > 1e-8 {
                return Err(format!("edge {e} leaves residual {r}"));
            }
        }
    }
    Ok(())
}

/// `T_M - T_{M'}` is positive semidefinite when `M` is a subset of `M'`.
pub fn check_test_monotonicity(ctx: &ProtocolContext, small: &[usize], large: &[usize]) -> Check {
    let g = ctx.graph();
    let a = ctx.matching_test(&Matching::new(g, small.to_vec()).map_err(|e| e.to_string())?);
    let b = ctx.matching_test(&Matching::new(g, large.to_vec()).map_err(|e| e.to_string())?);
    let diff = to_dense(&a) - to_dense(&b);
    let (vals, _) = hermitian_eigh(&diff);
    let min = vals.first().copied().unwrap_or(0.0);
    if min < -1e-9 {
        return Err(format!("T_{small:?} - T_{large:?} has eigenvalue {min}"));
    }
    Ok(())
}

/// Gaps of the cyclic covers of an odd cycle grow with the cover size in
/// steps of two, and the full orbit is at least as good as any smaller one.
pub fn check_cycle_covers(n: usize, mu: &SphereDistribution) -> Check {
    let g = closed_chain(n).map_err(|e| e.to_string())?;
    let ctx = ProtocolContext::new(&g, mu).map_err(|e| e.to_string())?;
    let gap = |m: usize| -> Result<f64, String> {
        let (_, cover): (Graph, MatchingCover) = cycle_matching_covers(n, m).map_err(|e| e.to_string())?;
        ctx.uniform_gap(&cover).map_err(|e| e.to_string())
    };
    let gaps: Vec<(usize, f64)> = (3..=n).map(|m| gap(m).map(|v| (m, v))).collect::<Result<_, _>>()?;
    let full = gaps.last().expect("at least one cover").1;
    for &(m, v) in &gaps {
        if full < v - 1e-10 {
            return Err(format!("n = {n}: nu(M_n) = {full} < nu(M_{m}) = {v}"));
        }
        if let Some(&(_, w)) = gaps.iter().find(|&&(k, _)| k == m + 2) {
            if w < v - 1e-10 {
                return Err(format!("n = {n}: nu(M_{}) = {w} < nu(M_{m}) = {v}", m + 2));
            }
        }
    }
    Ok(())
}

/// `s^2 <= 1/4` whenever `S1, S3 <= S2`, with equality only for equal spins.
pub fn check_overlap_bound(s1: Spin, s2: Spin, s3: Spin) -> Check {
    if s1 > s2 || s3 > s2 {
        return Ok(());
    }
    let v = s_squared(s1, s2, s3);
    let all_equal = s1 == s2 && s2 == s3;
    if v > 0.25 + 1e-10 || (!all_equal && (v - 0.25).abs() < 1e-10) || (all_equal && (v - 0.25).abs() > 1e-10) {
        return Err(format!("s^2({s1},{s2},{s3}) = {v}"));
    }
    Ok(())
}
