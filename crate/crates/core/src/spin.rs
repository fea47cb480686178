//! Spin-S operators, projectors onto rotated eigenstates and two-spin
//! projectors onto maximal total spin.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, HermitianOperator, C64};

/// A spin quantum number, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub const fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    /// Accepts non-negative integers and half-integers.
    pub fn new(value: f64) -> Result<Self> {
        let t = 2.0 * value;
        if !(t.is_finite() && t >= 0.0 && (t - t.round()).abs() < 1e-9 && t < 1e6) {
            return Err(Error::InvalidSpin(value.to_string()));
        }
        Ok(Spin(t.round() as u32))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Dimension `2S + 1` of the spin representation.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// `S(S+1)`.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }

    /// Twice the projections `m = S, S-1, ..., -S`, in basis order.
    pub fn projections(self) -> impl Iterator<Item = i32> {
        let t = self.0 as i32;
        (0..=t).map(move |k| t - 2 * k)
    }

    /// Basis index of the projection with twice-value `twice_m`.
    pub fn index_of(self, twice_m: i32) -> Result<usize> {
        let t = self.0 as i32;
        if twice_m.abs() > t || (t - twice_m) % 2 != 0 {
            return Err(Error::InvalidProjection {
                spin: self.to_string(),
                m: half_string(twice_m),
            });
        }
        Ok(((t - twice_m) / 2) as usize)
    }
}

/// Formats a twice-stored half-integer.
pub fn half_string(twice: i32) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{twice}/2")
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&half_string(self.0 as i32))
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidSpin(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "2" if num % 2 == 1 => Ok(Spin(num)),
                "1" => Ok(Spin(2 * num)),
                _ => Err(bad()),
            }
        } else {
            let v: f64 = s.parse().map_err(|_| bad())?;
            Spin::new(v).map_err(|_| bad())
        }
    }
}

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(de)? {
            Repr::Num(v) => Spin::new(v).map_err(serde::de::Error::custom),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A direction on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub const Z: UnitVector = UnitVector { x: 0.0, y: 0.0, z: 1.0 };

    /// Validates that `(x, y, z)` already has unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(Self { x, y, z })
    }

    /// Scales `(x, y, z)` to unit length.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, o: &UnitVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn neg(&self) -> UnitVector {
        UnitVector {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl TryFrom<[f64; 3]> for UnitVector {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        UnitVector::new(a[0], a[1], a[2])
    }
}

impl From<UnitVector> for [f64; 3] {
    fn from(v: UnitVector) -> Self {
        v.to_array()
    }
}

/// The Cartesian spin components for one spin value.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub x: HermitianOperator,
    pub y: HermitianOperator,
    pub z: HermitianOperator,
}

fn raising(s: Spin) -> CMatrix {
    let d = s.dim();
    let sv = s.value();
    let mut p = CMatrix::zeros(d, d);
    for i in 1..d {
        let m = sv - i as f64;
        p[(i - 1, i)] = c((sv * (sv + 1.0) - m * (m + 1.0)).sqrt());
    }
    p
}

/// `S_x`, `S_y`, `S_z` in the basis `m = S, ..., -S`.
pub fn spin_operators(s: Spin) -> SpinOperators {
    let d = s.dim();
    let sp = raising(s);
    let sm = sp.adjoint();
    let x = (&sp + &sm) * c(0.5);
    let y = (&sp - &sm) * C64::new(0.0, -0.5);
    let z = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        s.projections().map(|t| c(t as f64 / 2.0)),
    ));
    SpinOperators {
        x: HermitianOperator::symmetrized(x),
        y: HermitianOperator::symmetrized(y),
        z: HermitianOperator::symmetrized(z),
    }
}

/// `r . S`.
pub fn spin_along(s: Spin, r: &UnitVector) -> HermitianOperator {
    let ops = spin_operators(s);
    ops.x
        .scale(r.x)
        .add(&ops.y.scale(r.y))
        .add(&ops.z.scale(r.z))
}

/// Projector onto the eigenstate of `r . S` with eigenvalue `twice_m / 2`.
pub fn spin_eigenprojector(s: Spin, twice_m: i32, r: &UnitVector) -> Result<HermitianOperator> {
    s.index_of(twice_m)?;
    let d = s.dim();
    let sr = spin_along(s, r);
    let m = twice_m as f64 / 2.0;
    let mut p = CMatrix::identity(d, d);
    for tk in s.projections().filter(|&t| t != twice_m) {
        let k = tk as f64 / 2.0;
        let factor = (sr.matrix() - CMatrix::identity(d, d) * c(k)) * c(1.0 / (m - k));
        p = p * factor;
    }
    Ok(HermitianOperator::symmetrized(p))
}

/// Unit eigenvector of `r . S` with eigenvalue `twice_m / 2`, up to phase.
pub fn rotated_eigenvector(s: Spin, twice_m: i32, r: &UnitVector) -> Result<CVector> {
    let p = spin_eigenprojector(s, twice_m, r)?;
    let m = p.matrix();
    let best = (0..m.ncols())
        .max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))
        .unwrap_or(0);
    let col = m.column(best).into_owned();
    let n = col.norm();
    Ok(col.unscale(n))
}

/// Unitary whose columns are the eigenvectors of `r . S`, ordered
/// `m = S, ..., -S`.
pub fn rotated_basis(s: Spin, r: &UnitVector) -> CMatrix {
    let d = s.dim();
    let mut u = CMatrix::zeros(d, d);
    for (k, t) in s.projections().enumerate() {
        let v = rotated_eigenvector(s, t, r).expect("projection in range");
        u.set_column(k, &v);
    }
    u
}

/// `|<S|_r |S>_q|^2 = ((1 + r.q)/2)^{2S}`. Flip either direction to get the
/// overlaps involving `-S`.
pub fn highest_weight_fidelity(s: Spin, r: &UnitVector, q: &UnitVector) -> f64 {
    ((1.0 + r.dot(q)) / 2.0).max(0.0).powi(s.twice() as i32)
}

/// `S_1 . S_2` on the product space, site 1 slow.
pub fn spin_dot(s1: Spin, s2: Spin) -> HermitianOperator {
    let a = spin_operators(s1);
    let b = spin_operators(s2);
    a.x.kron(&b.x).add(&a.y.kron(&b.y)).add(&a.z.kron(&b.z))
}

/// Projector onto total spin `S_1 + S_2` in the product of two spins.
pub fn max_spin_projector(s1: Spin, s2: Spin) -> HermitianOperator {
    let d = s1.dim() * s2.dim();
    let x = spin_dot(s1, s2);
    // total spin squared = S1(S1+1) + S2(S2+1) + 2 S1.S2
    let j2 = CMatrix::identity(d, d) * c(s1.casimir() + s2.casimir()) + x.matrix() * c(2.0);
    let top = Spin(s1.0 + s2.0);
    let lo = s1.0.abs_diff(s2.0);
    let mut p = CMatrix::identity(d, d);
    let mut l = lo;
    while l < top.0 {
        let ll = Spin(l).casimir();
        let factor = (&j2 - CMatrix::identity(d, d) * c(ll)) * c(1.0 / (top.casimir() - ll));
        p = p * factor;
        l += 2;
    }
    HermitianOperator::symmetrized(p)
}

/// `||P_S |m1>_r |m2>_q||^2`: probability that the product of the two
/// rotated eigenstates passes the projection onto total spin `S_1 + S_2`.
pub fn pair_outcome_probability(
    s1: Spin,
    twice_m1: i32,
    s2: Spin,
    twice_m2: i32,
    r: &UnitVector,
    q: &UnitVector,
) -> Result<f64> {
    let a = spin_eigenprojector(s1, twice_m1, r)?;
    let b = spin_eigenprojector(s2, twice_m2, q)?;
    let p = max_spin_projector(s1, s2);
    Ok((p.matrix() * a.kron(&b).matrix()).trace().re)
}
