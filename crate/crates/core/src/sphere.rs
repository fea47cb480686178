//! Finite weighted point sets on the unit sphere.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::UnitVector;

/// Highest design order that `design_strength` certifies.
pub const MAX_DESIGN_STRENGTH: usize = 11;

const MERGE_TOL: f64 = 1e-10;
const DESIGN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub v: UnitVector,
    pub w: f64,
}

/// A probability distribution supported on finitely many unit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereDistribution {
    name: String,
    points: Vec<WeightedPoint>,
}

/// The named distributions shipped with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Tetrahedron,
    Octahedron,
    Cube,
    Icosahedron,
    Dodecahedron,
    Mu24,
    Mu32,
}

impl Builtin {
    pub const ALL: [Builtin; 7] = [
        Builtin::Tetrahedron,
        Builtin::Octahedron,
        Builtin::Cube,
        Builtin::Icosahedron,
        Builtin::Dodecahedron,
        Builtin::Mu24,
        Builtin::Mu32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Tetrahedron => "tetrahedron",
            Builtin::Octahedron => "octahedron",
            Builtin::Cube => "cube",
            Builtin::Icosahedron => "icosahedron",
            Builtin::Dodecahedron => "dodecahedron",
            Builtin::Mu24 => "mu24",
            Builtin::Mu32 => "mu32",
        }
    }

    pub fn distribution(self) -> SphereDistribution {
        let pts = match self {
            Builtin::Tetrahedron => uniform(
                [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
                    .iter()
                    .map(|&p| scaled(p, 1.0 / 3f64.sqrt()))
                    .collect(),
            ),
            Builtin::Octahedron => uniform(octahedron()),
            Builtin::Cube => uniform(cube()),
            Builtin::Icosahedron => uniform(icosahedron()),
            Builtin::Dodecahedron => uniform(dodecahedron()),
            Builtin::Mu24 => uniform(mu24()),
            Builtin::Mu32 => {
                let mut pts: Vec<WeightedPoint> = icosahedron()
                    .into_iter()
                    .map(|v| WeightedPoint { v, w: 5.0 / 168.0 })
                    .collect();
                pts.extend(dodecahedron().into_iter().map(|v| WeightedPoint { v, w: 9.0 / 280.0 }));
                pts
            }
        };
        SphereDistribution {
            name: self.name().to_string(),
            points: pts,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidDistribution(format!("unknown distribution `{s}`")))
    }
}

fn scaled(p: [f64; 3], k: f64) -> UnitVector {
    UnitVector::normalized(p[0] * k, p[1] * k, p[2] * k).expect("nonzero vertex")
}

fn uniform(vs: Vec<UnitVector>) -> Vec<WeightedPoint> {
    let w = 1.0 / vs.len() as f64;
    vs.into_iter().map(|v| WeightedPoint { v, w }).collect()
}

fn signs() -> [(f64, f64); 4] {
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
}

fn octahedron() -> Vec<UnitVector> {
    let mut out = Vec::new();
    for axis in 0..3 {
        for s in [1.0, -1.0] {
            let mut p = [0.0; 3];
            p[axis] = s;
            out.push(scaled(p, 1.0));
        }
    }
    out
}

fn cube() -> Vec<UnitVector> {
    let mut out = Vec::new();
    for x in [1.0, -1.0] {
        for (y, z) in signs() {
            out.push(scaled([x, y, z], 1.0 / 3f64.sqrt()));
        }
    }
    out
}

fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn icosahedron() -> Vec<UnitVector> {
    let b = golden();
    let k = 1.0 / (1.0 + b * b).sqrt();
    let mut out = Vec::new();
    for (s, t) in signs() {
        out.push(scaled([s, t * b, 0.0], k));
        out.push(scaled([s * b, 0.0, t], k));
        out.push(scaled([0.0, s, t * b], k));
    }
    out
}

fn dodecahedron() -> Vec<UnitVector> {
    let b = golden();
    let k = 1.0 / 3f64.sqrt();
    let mut out = Vec::new();
    for (s, t) in signs() {
        out.push(scaled([s * b, t / b, 0.0], k));
        out.push(scaled([s / b, 0.0, t * b], k));
        out.push(scaled([0.0, s * b, t / b], k));
    }
    out.extend(cube());
    out
}

/// Orbit of a fiducial vector under the rotation group of the cube.
fn mu24() -> Vec<UnitVector> {
    let theta = (3.0 * 10f64.sqrt() / 20.0).atan();
    let u: Vec<f64> = (1..=3)
        .map(|j| {
            let arg = (theta + 2.0 * j as f64 * PI) / 3.0;
            ((1.0 + 2.0 * (0.4f64).sqrt() * arg.cos()) / 3.0).sqrt()
        })
        .collect();
    // permutations of (0, 1, 2) with their signs
    let perms: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([0, 2, 1], -1.0),
        ([2, 1, 0], -1.0),
        ([1, 0, 2], -1.0),
    ];
    let mut out = Vec::new();
    for (p, sgn) in perms {
        for (a1, a2) in signs() {
            out.push(scaled([a1 * u[p[0]], a2 * u[p[1]], a1 * a2 * sgn * u[p[2]]], 1.0));
        }
    }
    out
}

/// Legendre polynomial `P_k(x)` by the three-term recurrence.
pub fn legendre(k: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return p0;
    }
    for n in 1..k {
        let n = n as f64;
        let p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

impl SphereDistribution {
    /// Validates the points; weights that do not sum to one are rescaled
    /// with a warning.
    pub fn new(name: impl Into<String>, points: Vec<WeightedPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDistribution("no points".into()));
        }
        if let Some(p) = points.iter().find(|p| !(p.w.is_finite() && p.w > 0.0)) {
            return Err(Error::InvalidDistribution(format!("weight {} is not positive", p.w)));
        }
        let total: f64 = points.iter().map(|p| p.w).sum();
        let mut points = points;
        if (total - 1.0).abs() > 1e-12 {
            log::warn!("distribution weights sum to {total}; rescaling to 1");
            for p in &mut points {
                p.w /= total;
            }
        }
        Ok(Self {
            name: name.into(),
            points,
        })
    }

    /// A builtin by name.
    pub fn builtin(name: &str) -> Result<Self> {
        Ok(name.parse::<Builtin>()?.distribution())
    }

    /// Reads the JSON form `[{"v": [x, y, z], "w": weight}, ...]`.
    pub fn from_json_str(name: impl Into<String>, text: &str) -> Result<Self> {
        let points: Vec<WeightedPoint> = serde_json::from_str(text)?;
        Self::new(name, points)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(path.display().to_string(), &text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.points).expect("points serialize")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Average of the distribution and its inversion through the origin,
    /// with coinciding points merged.
    pub fn symmetrize(&self) -> SphereDistribution {
        let mut out: Vec<WeightedPoint> = Vec::new();
        let all = self.points.iter().flat_map(|p| {
            [
                WeightedPoint { v: p.v, w: p.w / 2.0 },
                WeightedPoint { v: p.v.neg(), w: p.w / 2.0 },
            ]
        });
        for p in all {
            match out.iter_mut().find(|q| same(&q.v, &p.v)) {
                Some(q) => q.w += p.w,
                None => out.push(p),
            }
        }
        SphereDistribution {
            name: format!("{}-sym", self.name),
            points: out,
        }
    }

    pub fn is_center_symmetric(&self) -> bool {
        self.points.iter().all(|p| {
            self.points
                .iter()
                .any(|q| same(&q.v, &p.v.neg()) && (q.w - p.w).abs() < MERGE_TOL)
        })
    }

    /// Number of distinct canonical tests: antipodal points give the same
    /// test and are counted once.
    pub fn distinct_test_count(&self) -> usize {
        let mut reps: Vec<UnitVector> = Vec::new();
        for p in &self.points {
            if !reps.iter().any(|r| same(r, &p.v) || same(r, &p.v.neg())) {
                reps.push(p.v);
            }
        }
        reps.len()
    }

    fn pair_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut s = 0.0;
        for p in &self.points {
            for q in &self.points {
                s += p.w * q.w * f(p.v.dot(&q.v));
            }
        }
        s
    }

    /// Frame potential `sum w_r w_s (r.s)^t` for even `t`.
    pub fn frame_potential(&self, t: usize) -> Result<f64> {
        if t % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "frame potential order must be even, got {t}"
            )));
        }
        Ok(self.pair_sum(|x| x.powi(t as i32)))
    }

    /// `sum w_r w_s P_k(r.s)`, a non-negative quantity that vanishes
    /// exactly when all degree-`k` harmonic moments vanish.
    pub fn legendre_potential(&self, k: usize) -> f64 {
        self.pair_sum(|x| legendre(k, x))
    }

    /// Largest `t <= 11` for which the distribution is a spherical
    /// `t`-design.
    pub fn design_strength(&self) -> usize {
        (1..=MAX_DESIGN_STRENGTH)
            .find(|&k| self.legendre_potential(k) > DESIGN_TOL)
            .map(|k| k - 1)
            .unwrap_or(MAX_DESIGN_STRENGTH)
    }
}

fn same(a: &UnitVector, b: &UnitVector) -> bool {
    (a.x() - b.x()).abs() < MERGE_TOL && (a.y() - b.y()).abs() < MERGE_TOL && (a.z() - b.z()).abs() < MERGE_TOL
}
