//! Canonical bond tests and bond verification operators.

use crate::linalg::{c, CMatrix, HermitianOperator};
use crate::sphere::SphereDistribution;
use crate::spin::{max_spin_projector, spin_eigenprojector, Spin, UnitVector};

/// `R_r = 1 - |S1,S2>_r<..| - |-S1,-S2>_r<..|`: accepts unless both spins
/// are found fully aligned (or fully anti-aligned) with `r`.
pub fn canonical_test(s1: Spin, s2: Spin, r: &UnitVector) -> HermitianOperator {
    let t1 = s1.twice() as i32;
    let t2 = s2.twice() as i32;
    let up = spin_eigenprojector(s1, t1, r)
        .and_then(|a| Ok(a.kron(&spin_eigenprojector(s2, t2, r)?)))
        .expect("extremal projections are valid");
    let down = spin_eigenprojector(s1, -t1, r)
        .and_then(|a| Ok(a.kron(&spin_eigenprojector(s2, -t2, r)?)))
        .expect("extremal projections are valid");
    let d = s1.dim() * s2.dim();
    HermitianOperator::identity(d).sub(&up).sub(&down)
}

/// Bond verification operator `sum_r w_r R_r` on a pair of spins.
#[derive(Clone, Debug)]
pub struct BondOperator {
    pub s1: Spin,
    pub s2: Spin,
    pub omega: HermitianOperator,
}

impl BondOperator {
    /// `1 - ||P_S Omega P_S||` with `P_S` the maximal-spin projector.
    pub fn gap(&self) -> f64 {
        let p = max_spin_projector(self.s1, self.s2);
        let sandwich = p.matrix() * self.omega.matrix() * p.matrix();
        1.0 - HermitianOperator::symmetrized(sandwich).norm()
    }
}

pub fn bond_operator(s1: Spin, s2: Spin, mu: &SphereDistribution) -> BondOperator {
    let d = s1.dim() * s2.dim();
    let mut m = CMatrix::zeros(d, d);
    for p in mu.points() {
        m += canonical_test(s1, s2, &p.v).matrix() * c(p.w);
    }
    BondOperator {
        s1,
        s2,
        omega: HermitianOperator::symmetrized(m),
    }
}

/// `O_S(mu) = 2 sum w |S>_r<S|` over the symmetrized distribution, on the
/// spin-`S` space.
pub fn o_operator(s: Spin, mu: &SphereDistribution) -> HermitianOperator {
    let sym = mu.symmetrize();
    let d = s.dim();
    let mut m = CMatrix::zeros(d, d);
    for p in sym.points() {
        let proj = spin_eigenprojector(s, s.twice() as i32, &p.v).expect("highest weight");
        m += proj.matrix() * c(2.0 * p.w);
    }
    HermitianOperator::symmetrized(m)
}

/// `Omega_S(mu) = 1 - O_S(mu)`, the bond operator restricted to total spin
/// `S`.
pub fn omega_s(s: Spin, mu: &SphereDistribution) -> HermitianOperator {
    HermitianOperator::identity(s.dim()).sub(&o_operator(s, mu))
}

/// Bond spectral gap `nu_S(mu) = lambda_min(O_S(mu))`.
pub fn nu_s(s: Spin, mu: &SphereDistribution) -> f64 {
    o_operator(s, mu).min_eigenvalue().max(0.0)
}

/// Gap of the isotropic distribution, `2/(2S+1)`.
pub fn nu_isotropic(s: Spin) -> f64 {
    2.0 / (s.twice() as f64 + 1.0)
}

/// Bond gap for either a finite distribution or the isotropic one.
pub fn nu_s_or_isotropic(s: Spin, mu: Option<&SphereDistribution>) -> f64 {
    match mu {
        Some(mu) => nu_s(s, mu),
        None => nu_isotropic(s),
    }
}

/// `nu_S` for every `S = 1/2, 1, ..., max`.
pub fn nu_table(mu: &SphereDistribution, max: Spin) -> Vec<(Spin, f64)> {
    (1..=max.twice())
        .map(|t| {
            let s = Spin::from_twice(t);
            (s, nu_s(s, mu))
        })
        .collect()
}
