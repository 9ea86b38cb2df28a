//! Integral polygons, straight periodic walls on the torus, and crossing numbers of
//! curve classes on the band, Möbius band, torus and Klein bottle.
//!
//! Unoriented wall classes are stored with their first nonzero coordinate positive.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec2 = [i64; 2];
pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("polygon has no vertices")]
    Empty,
    #[error("polygon is not strictly convex and counterclockwise at vertex {0}")]
    NotConvex(usize),
    #[error("polygon is not centrally symmetric")]
    NotSymmetric,
    #[error("wall class {0:?} is not primitive")]
    NotPrimitive(Vec2),
    #[error("offsets must match the walls: {walls} walls, {offsets} offsets")]
    Offsets { walls: usize, offsets: usize },
    #[error("offsets are not generic: {0}")]
    NonGeneric(String),
    #[error("symmetric placement needs an even number of walls in every class")]
    OddMultiplicity,
    #[error("malformed class: {0}")]
    Class(String),
    #[error("n must be even, got {0}")]
    OddN(i64),
    #[error("malformed polygon json: {0}")]
    Json(String),
}

fn det(a: Vec2, b: Vec2) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: Vec2, b: Vec2) -> i64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Quarter turn counterclockwise.
pub fn rot(v: Vec2) -> Vec2 {
    [-v[1], v[0]]
}

pub fn is_primitive(w: Vec2) -> bool {
    w[0].gcd(&w[1]) == 1
}

/// Representative of `±w` whose first nonzero coordinate is positive.
pub fn canonical(w: Vec2) -> Vec2 {
    if w[0] < 0 || (w[0] == 0 && w[1] < 0) {
        [-w[0], -w[1]]
    } else {
        w
    }
}

/// Angular order of nonzero vectors starting at direction (1, 0).
fn angle_cmp(a: Vec2, b: Vec2) -> Ordering {
    let half = |v: Vec2| if v[1] > 0 || (v[1] == 0 && v[0] > 0) { 0 } else { 1 };
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&det(a, b)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralPolygon {
    vertices: Vec<Vec2>,
}

impl IntegralPolygon {
    /// Vertices in counterclockwise order. One point and segments are allowed.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, LatticeError> {
        let n = vertices.len();
        match n {
            0 => return Err(LatticeError::Empty),
            1 => {}
            2 => {
                if vertices[0] == vertices[1] {
                    return Err(LatticeError::NotConvex(1));
                }
            }
            _ => {
                for i in 0..n {
                    let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
                    if det([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]]) <= 0 {
                        return Err(LatticeError::NotConvex((i + 1) % n));
                    }
                }
                // Positive turns at every vertex still allow a winding number above one.
                let turn: i64 = (0..n)
                    .map(|i| {
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        det(a, b)
                    })
                    .sum();
                let edges: Vec<Vec2> =
                    (0..n).map(|i| [vertices[(i + 1) % n][0] - vertices[i][0], vertices[(i + 1) % n][1] - vertices[i][1]]).collect();
                let wraps = (0..n).filter(|&i| angle_cmp(edges[i], edges[(i + 1) % n]) == Ordering::Greater).count();
                if turn <= 0 || wraps > 1 {
                    return Err(LatticeError::NotConvex(0));
                }
            }
        }
        Ok(IntegralPolygon { vertices })
    }

    pub fn from_json(text: &str) -> Result<Self, LatticeError> {
        #[derive(Deserialize)]
        struct J {
            vertices: Vec<Vec2>,
        }
        let j: J = serde_json::from_str(text).map_err(|e| LatticeError::Json(e.to_string()))?;
        if j.vertices.iter().flatten().any(|c| c.abs() > 1 << 20) {
            return Err(LatticeError::Json("coordinates must lie within ±2^20".into()));
        }
        IntegralPolygon::new(j.vertices)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Axis-aligned square `[-a, a]²`.
    pub fn square(a: i64) -> Self {
        IntegralPolygon::new(vec![[-a, -a], [a, -a], [a, a], [-a, a]]).expect("a > 0")
    }

    pub fn is_symmetric(&self) -> bool {
        let mut a = self.vertices.clone();
        let mut b: Vec<Vec2> = a.iter().map(|v| [-v[0], -v[1]]).collect();
        a.sort();
        b.sort();
        a == b
    }

    /// Twice the shoelace area.
    pub fn double_area(&self) -> i64 {
        let n = self.vertices.len();
        (0..n).map(|i| det(self.vertices[i], self.vertices[(i + 1) % n])).sum()
    }

    /// Lattice points of the boundary in counterclockwise order, starting at the first
    /// vertex. A segment is walked out and back.
    pub fn boundary_points(&self) -> Vec<Vec2> {
        let n = self.vertices.len();
        if n == 1 {
            return self.vertices.clone();
        }
        let mut out = Vec::new();
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let g = d[0].gcd(&d[1]);
            for k in 0..g {
                out.push([a[0] + k * d[0] / g, a[1] + k * d[1] / g]);
            }
        }
        out
    }

    pub fn support(&self, v: Vec2) -> i64 {
        self.vertices.iter().map(|&p| dot(p, v)).max().expect("nonempty")
    }
}

/// `max_{p∈K} ⟨p, v⟩`.
pub fn support_norm(k: &IntegralPolygon, v: Vec2) -> i64 {
    k.support(v)
}

/// Wall classes whose straight periodic realization has length `2‖·‖_K`.
pub fn walls_from_polygon(k: &IntegralPolygon) -> Result<Vec<Vec2>, LatticeError> {
    if !k.is_symmetric() {
        return Err(LatticeError::NotSymmetric);
    }
    let p = k.boundary_points();
    if p.len() == 1 {
        return Ok(Vec::new());
    }
    let half = p.len() / 2;
    Ok((0..half).map(|i| canonical(rot([p[i + 1][0] - p[i][0], p[i + 1][1] - p[i][1]]))).collect())
}

fn check_walls(walls: &[Vec2]) -> Result<(), LatticeError> {
    match walls.iter().find(|&&w| !is_primitive(w)) {
        Some(&w) => Err(LatticeError::NotPrimitive(w)),
        None => Ok(()),
    }
}

/// `Σ |det(wᵢ, v)|`: crossings of a straight segment of class `v` with the walls.
pub fn induced_norm(walls: &[Vec2], v: Vec2) -> Result<i64, LatticeError> {
    check_walls(walls)?;
    Ok(walls.iter().map(|&w| det(w, v).abs()).sum())
}

/// `Σ_{i<j} |det(wᵢ, wⱼ)|`.
pub fn crossing_count(walls: &[Vec2]) -> Result<i64, LatticeError> {
    check_walls(walls)?;
    let mut c = 0;
    for i in 0..walls.len() {
        for j in i + 1..walls.len() {
            c += det(walls[i], walls[j]).abs();
        }
    }
    Ok(c)
}

/// `⊕ᵢ [−J wᵢ, J wᵢ]`, the dual unit ball of the induced norm.
pub fn zonotope(walls: &[Vec2]) -> Result<IntegralPolygon, LatticeError> {
    check_walls(walls)?;
    if walls.is_empty() {
        return IntegralPolygon::new(vec![[0, 0]]);
    }
    let mut gens: Vec<Vec2> = walls
        .iter()
        .map(|&w| {
            let g = rot(w);
            if g[1] > 0 || (g[1] == 0 && g[0] > 0) {
                g
            } else {
                [-g[0], -g[1]]
            }
        })
        .collect();
    gens.sort_by(|&a, &b| angle_cmp(a, b));
    // Merge parallel generators.
    let mut merged: Vec<Vec2> = Vec::new();
    for g in gens {
        match merged.last_mut() {
            Some(m) if det(*m, g) == 0 => {
                m[0] += g[0];
                m[1] += g[1];
            }
            _ => merged.push(g),
        }
    }
    let start = merged.iter().fold([0, 0], |s, g| [s[0] - g[0], s[1] - g[1]]);
    let mut verts = vec![start];
    let mut at = start;
    for sign in [2, -2] {
        for g in &merged {
            at = [at[0] + sign * g[0], at[1] + sign * g[1]];
            verts.push(at);
        }
    }
    verts.pop();
    IntegralPolygon::new(verts)
}

/// A random centrally symmetric lattice polygon with up to `k` edge directions.
pub fn random_symmetric_polygon<R: Rng>(k: usize, max_coord: i64, rng: &mut R) -> IntegralPolygon {
    loop {
        let mut edges: Vec<Vec2> = (0..k.max(1))
            .map(|_| {
                let e = [rng.gen_range(-max_coord..=max_coord), rng.gen_range(0..=max_coord)];
                if e[1] == 0 {
                    [e[0].abs(), 0]
                } else {
                    e
                }
            })
            .filter(|e| *e != [0, 0])
            .collect();
        if edges.is_empty() {
            continue;
        }
        edges.sort_by(|&a, &b| angle_cmp(a, b));
        let mut merged: Vec<Vec2> = Vec::new();
        for e in edges {
            match merged.last_mut() {
                Some(m) if det(*m, e) == 0 => {
                    m[0] += e[0];
                    m[1] += e[1];
                }
                _ => merged.push(e),
            }
        }
        let sum = merged.iter().fold([0, 0], |s, e| [s[0] + e[0], s[1] + e[1]]);
        if sum[0] % 2 != 0 || sum[1] % 2 != 0 {
            continue;
        }
        let mut at = [-sum[0] / 2, -sum[1] / 2];
        let mut verts = vec![at];
        for sign in [1, -1] {
            for e in &merged {
                at = [at[0] + sign * e[0], at[1] + sign * e[1]];
                verts.push(at);
            }
        }
        verts.pop();
        if let Ok(p) = IntegralPolygon::new(verts) {
            return p;
        }
    }
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Crossings inside `[0,1)²` of the lines `det(wᵢ, x) ∈ cᵢ + ℤ`, found by solving every
/// pair exactly.
pub fn geometric_crossing_oracle(walls: &[Vec2], offsets: &[Q]) -> Result<i64, LatticeError> {
    Ok(crossing_points(walls, offsets)?.len() as i64)
}

fn crossing_points(walls: &[Vec2], offsets: &[Q]) -> Result<Vec<[Q; 2]>, LatticeError> {
    check_walls(walls)?;
    if walls.len() != offsets.len() {
        return Err(LatticeError::Offsets { walls: walls.len(), offsets: offsets.len() });
    }
    let (zero, one) = (Q::zero(), Q::one());
    let mut pts = Vec::new();
    for i in 0..walls.len() {
        for j in i + 1..walls.len() {
            let (a, b) = (walls[i], walls[j]);
            let dd = det(a, b);
            if dd == 0 {
                // Parallel families meet only if they coincide.
                let k = if a == b { 1 } else { -1 };
                let diff = &offsets[i] - &offsets[j] * q(k);
                if diff.is_integer() {
                    return Err(LatticeError::NonGeneric(format!("walls {i} and {j} coincide")));
                }
                continue;
            }
            let range = |w: Vec2, c: &Q| {
                let vals = [0, -w[1], w[0], w[0] - w[1]];
                let lo = *vals.iter().min().unwrap();
                let hi = *vals.iter().max().unwrap();
                ((q(lo) - c).floor().to_integer(), (q(hi) - c).ceil().to_integer())
            };
            let (alo, ahi) = range(a, &offsets[i]);
            let (blo, bhi) = range(b, &offsets[j]);
            let mut ai = alo.clone();
            while ai <= ahi {
                let mut bi = blo.clone();
                while bi <= bhi {
                    // det(a, x) = ca, det(b, x) = cb with det(w, x) = w0·x1 − w1·x0.
                    let ca = &offsets[i] + Q::from_integer(ai.clone());
                    let cb = &offsets[j] + Q::from_integer(bi.clone());
                    // Rows (−a1, a0) and (−b1, b0); determinant −a1·b0 + a0·b1 = det(a, b).
                    let den = q(dd);
                    let x0 = (&ca * q(b[0]) - &cb * q(a[0])) / &den;
                    let x1 = (&cb * q(-a[1]) - &ca * q(-b[1])) / &den;
                    let inside = |t: &Q| *t >= zero && *t < one;
                    if inside(&x0) && inside(&x1) {
                        if x0.is_zero() || x1.is_zero() {
                            return Err(LatticeError::NonGeneric(format!("walls {i} and {j} cross on the border")));
                        }
                        pts.push([x0, x1]);
                    }
                    bi += 1;
                }
                ai += 1;
            }
        }
    }
    Ok(pts)
}

/// Random offsets with large denominators, almost surely generic.
pub fn random_offsets<R: Rng>(n: usize, rng: &mut R) -> Vec<Q> {
    (0..n).map(|_| Q::new(BigInt::from(rng.gen_range(1i64..1_000_003)), BigInt::from(1_000_003i64))).collect()
}

/// Offsets pairing the walls of every class symmetrically about `(½, ½)`.
pub fn symmetric_offsets<R: Rng>(walls: &[Vec2], rng: &mut R) -> Result<Vec<Q>, LatticeError> {
    check_walls(walls)?;
    let mut offsets: Vec<Option<Q>> = vec![None; walls.len()];
    for i in 0..walls.len() {
        if offsets[i].is_some() {
            continue;
        }
        let mate = (i + 1..walls.len())
            .find(|&j| offsets[j].is_none() && canonical(walls[j]) == canonical(walls[i]))
            .ok_or(LatticeError::OddMultiplicity)?;
        let c = random_offsets(1, rng).pop().unwrap();
        let w = walls[i];
        // The half turn about the centre sends det(w, x) = c to det(w, x) = det(w, (1,1)) − c.
        let image = q(det(w, [1, 1])) - &c;
        let k = if walls[mate] == w { 1 } else { -1 };
        offsets[mate] = Some(image * q(k));
        offsets[i] = Some(c);
    }
    Ok(offsets.into_iter().map(|o| o.unwrap()).collect())
}

/// Crossings below and above the diagonal `x + y = 1` of the unit square.
pub fn crossings_by_diagonal(walls: &[Vec2], offsets: &[Q]) -> Result<(i64, i64), LatticeError> {
    let one = Q::one();
    let (mut below, mut above) = (0, 0);
    for [x, y] in crossing_points(walls, offsets)? {
        match (x + y).cmp(&one) {
            Ordering::Less => below += 1,
            Ordering::Greater => above += 1,
            Ordering::Equal => return Err(LatticeError::NonGeneric("crossing on the diagonal".into())),
        }
    }
    Ok((below, above))
}

/// Homotopy classes of closed curves in the canonical forms used for crossing numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "surface", rename_all = "lowercase")]
pub enum CurveClass {
    /// `Tᵏ` on the orientable band.
    Band { k: i64 },
    /// `R^{2k+1}` on the Möbius band.
    Moebius { k: i64 },
    /// `TᵗUᵘ` on the torus.
    Torus { t: i64, u: i64 },
    /// `TᵗUᵘ` with `t, u ≥ 0` on the Klein bottle.
    KleinTU { t: i64, u: i64 },
    /// `R^{2k+1}` on the Klein bottle.
    KleinR { k: i64 },
    /// `S^{2k+1}` on the Klein bottle.
    KleinS { k: i64 },
}

impl CurveClass {
    fn surface(&self) -> u8 {
        match self {
            CurveClass::Band { .. } => 0,
            CurveClass::Moebius { .. } => 1,
            CurveClass::Torus { .. } => 2,
            _ => 3,
        }
    }

    fn validate(&self) -> Result<(), LatticeError> {
        let bad = match *self {
            CurveClass::Band { k } | CurveClass::Moebius { k } | CurveClass::KleinR { k } | CurveClass::KleinS { k } => k < 0,
            CurveClass::KleinTU { t, u } => t < 0 || u < 0,
            CurveClass::Torus { .. } => false,
        };
        if bad {
            return Err(LatticeError::Class(format!("{self:?} has a negative exponent")));
        }
        Ok(())
    }
}

/// Minimal crossing number between two classes, or the minimal self-crossing number
/// when `b` is `None`.
pub fn mincr(a: &CurveClass, b: Option<&CurveClass>) -> Result<i64, LatticeError> {
    use CurveClass::*;
    a.validate()?;
    let Some(b) = b else {
        return Ok(match *a {
            Band { k } => (k - 1).max(0),
            Moebius { k } | KleinR { k } | KleinS { k } => k,
            Torus { t, u } => (t.gcd(&u) - 1).max(0),
            KleinTU { t, u } => {
                let g = t.gcd(&u);
                if g == 0 {
                    0
                } else {
                    t * u + g - 1
                }
            }
        });
    };
    b.validate()?;
    if a.surface() != b.surface() {
        return Err(LatticeError::Class(format!("{a:?} and {b:?} live on different surfaces")));
    }
    Ok(match (*a, *b) {
        (Band { .. }, Band { .. }) => 0,
        (Moebius { k }, Moebius { k: k2 }) => (2 * k + 1).min(2 * k2 + 1),
        (Torus { t, u }, Torus { t: t2, u: u2 }) => (t * u2 - u * t2).abs(),
        (KleinTU { t, u }, KleinTU { t: t2, u: u2 }) => 2 * (t * u2).max(u * t2),
        (KleinTU { u, .. }, KleinR { k } | KleinS { k }) | (KleinR { k } | KleinS { k }, KleinTU { u, .. }) => u * (1 + 2 * k),
        (KleinR { k }, KleinR { k: k2 }) | (KleinS { k }, KleinS { k: k2 }) => 1 + 2 * k.min(k2),
        (KleinR { .. }, KleinS { .. }) | (KleinS { .. }, KleinR { .. }) => 0,
        _ => unreachable!("surfaces checked above"),
    })
}

/// Simple-tight wallsystem on the Klein bottle: `r` walls of class R, `s` of class S
/// and `gcd(t, u)` parallel walls of class `T^{t/m}U^{u/m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KleinModel {
    pub r: i64,
    pub s: i64,
    pub t: i64,
    pub u: i64,
}

impl KleinModel {
    pub fn is_even(&self) -> bool {
        self.r % 2 == self.s % 2 && self.s % 2 == self.u % 2
    }

    /// Minimal lengths of R, S, T, U.
    pub fn minlengths(&self) -> [i64; 4] {
        let KleinModel { r, s, t, u } = *self;
        [r + u, s + u, 2 * u, 2 * t + r + s]
    }

    pub fn area(&self) -> i64 {
        let KleinModel { r, s, t, u } = *self;
        r * (r - 1) / 2 + s * (s - 1) / 2 + t * u + s * u + r * u
    }

    pub fn walls(&self) -> Vec<CurveClass> {
        let mut w = vec![CurveClass::KleinR { k: 0 }; self.r as usize];
        w.extend(vec![CurveClass::KleinS { k: 0 }; self.s as usize]);
        let m = self.t.gcd(&self.u);
        if m > 0 {
            w.extend(vec![CurveClass::KleinTU { t: self.t / m, u: self.u / m }; m as usize]);
        }
        w
    }

    /// Minimal lengths of R, S, T, U as sums of crossing numbers with the walls.
    pub fn minlengths_by_mincr(&self) -> [i64; 4] {
        let curves = [
            CurveClass::KleinR { k: 0 },
            CurveClass::KleinS { k: 0 },
            CurveClass::KleinTU { t: 1, u: 0 },
            CurveClass::KleinTU { t: 0, u: 1 },
        ];
        let walls = self.walls();
        curves.map(|c| walls.iter().map(|w| mincr(&c, Some(w)).expect("same surface")).sum())
    }

    /// Self-crossings of the model summed from crossing numbers.
    pub fn area_by_mincr(&self) -> i64 {
        let walls = self.walls();
        let mut a = 0;
        for i in 0..walls.len() {
            a += mincr(&walls[i], None).expect("valid class");
            for j in i + 1..walls.len() {
                a += mincr(&walls[i], Some(&walls[j])).expect("same surface");
            }
        }
        a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KleinMode {
    /// `len R ≥ n` and `len U ≥ n`.
    Fac,
    /// All four simple classes at least `n`.
    Systole,
}

impl KleinMode {
    pub fn admits(&self, m: &KleinModel, n: i64) -> bool {
        let [lr, ls, lt, lu] = m.minlengths();
        match self {
            KleinMode::Fac => lr >= n && lu >= n,
            KleinMode::Systole => lr >= n && ls >= n && lt >= n && lu >= n,
        }
    }
}

/// Exhaustive minimum of the area over even models with `0 ≤ r,s,t,u ≤ 2n`.
///
/// A coordinate above `2n` already forces the area past the target minimum. Ties are
/// broken by the smallest `(r, s, t, u)`.
pub fn minimize_klein(n: i64, mode: KleinMode) -> Result<(i64, KleinModel), LatticeError> {
    if n % 2 != 0 || n < 0 {
        return Err(LatticeError::OddN(n));
    }
    let hi = 2 * n;
    let best = (0..=hi)
        .into_par_iter()
        .filter_map(|r| {
            let mut best: Option<(i64, KleinModel)> = None;
            for s in (r % 2..=hi).step_by(2) {
                for u in (r % 2..=hi).step_by(2) {
                    for t in 0..=hi {
                        let m = KleinModel { r, s, t, u };
                        if !mode.admits(&m, n) {
                            continue;
                        }
                        let cand = (m.area(), m);
                        if best.as_ref().is_none_or(|b| cand < *b) {
                            best = Some(cand);
                        }
                        // Larger t only grows the area.
                        break;
                    }
                }
            }
            best
        })
        .min()
        .expect("r = s = u = n, t = n admits every mode");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const FIGURE: [Vec2; 4] = [[1, 0], [1, 2], [-1, 1], [-1, 1]];

    #[test]
    fn support_norm_basics() {
        let k = IntegralPolygon::square(1);
        assert_eq!(support_norm(&k, [0, 0]), 0);
        assert_eq!(support_norm(&k, [1, 0]), 1);
        let z = zonotope(&FIGURE).unwrap();
        assert_eq!(support_norm(&z, [1, 1]), 6);
        assert_eq!(induced_norm(&FIGURE.map(canonical), [1, 1]).unwrap(), 6);
    }

    #[test]
    fn polygon_validation() {
        assert_eq!(IntegralPolygon::new(vec![]), Err(LatticeError::Empty));
        assert!(IntegralPolygon::new(vec![[0, 0], [1, 0], [0, 1]]).is_ok());
        assert!(IntegralPolygon::new(vec![[0, 0], [0, 1], [1, 0]]).is_err());
        assert!(IntegralPolygon::new(vec![[0, 0], [1, 0], [2, 0], [0, 1]]).is_err());
        // A pentagram turns left everywhere but winds twice.
        let star = vec![[0, 10], [6, -8], [-10, 3], [10, 3], [-6, -8]];
        assert!(IntegralPolygon::new(star).is_err());
        assert!(IntegralPolygon::from_json(r#"{"vertices":[[1,1],[-1,-1]]}"#).is_ok());
        assert!(IntegralPolygon::from_json(r#"{"vertices":[[1,1,1]]}"#).is_err());
    }

    #[test]
    fn square_walls() {
        let k = IntegralPolygon::square(1);
        let w = walls_from_polygon(&k).unwrap();
        let mut sorted = w.clone();
        sorted.sort();
        assert_eq!(sorted, vec![[0, 1], [0, 1], [1, 0], [1, 0]]);
        assert_eq!(induced_norm(&w, [1, 0]).unwrap(), 2);
        assert_eq!(crossing_count(&w).unwrap(), 4);
        assert_eq!(k.double_area(), 8);
    }

    #[test]
    fn degenerate_polygons() {
        let origin = IntegralPolygon::new(vec![[0, 0]]).unwrap();
        assert!(walls_from_polygon(&origin).unwrap().is_empty());
        // A segment through a non-primitive vector gives parallel walls.
        let seg = IntegralPolygon::new(vec![[-2, 4], [2, -4]]).unwrap();
        let w = walls_from_polygon(&seg).unwrap();
        assert_eq!(w, vec![[2, 1]; 4]);
        for v in [[1, 0], [0, 1], [3, -2]] {
            assert_eq!(induced_norm(&w, v).unwrap(), 2 * support_norm(&seg, v));
        }
        assert_eq!(crossing_count(&w).unwrap(), 0);
        assert_eq!(crossing_count(&[[1, 0]]).unwrap(), 0);
        assert!(walls_from_polygon(&IntegralPolygon::new(vec![[0, 0], [1, 0], [0, 1]]).unwrap()).is_err());
        assert_eq!(induced_norm(&[[2, 0]], [0, 1]), Err(LatticeError::NotPrimitive([2, 0])));
    }

    #[test]
    fn figure_zonotope_is_a_hexagon() {
        let z = zonotope(&FIGURE).unwrap();
        assert_eq!(z.vertices().len(), 6);
        assert!(z.is_symmetric());
        let w = walls_from_polygon(&z).unwrap();
        for v in [[1, 1], [2, -1], [0, 3]] {
            assert_eq!(induced_norm(&w, v).unwrap(), 2 * support_norm(&z, v));
            assert_eq!(induced_norm(&FIGURE, v).unwrap(), support_norm(&z, v));
        }
        assert_eq!(2 * crossing_count(&w).unwrap(), z.double_area());
    }

    #[test]
    fn oracle_counts_crossings() {
        assert_eq!(geometric_crossing_oracle(&[], &[]).unwrap(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let off = random_offsets(FIGURE.len(), &mut rng);
            assert_eq!(geometric_crossing_oracle(&FIGURE, &off).unwrap(), crossing_count(&FIGURE).unwrap());
        }
        let half = Q::new(BigInt::one(), BigInt::from(2));
        let bad = geometric_crossing_oracle(&[[1, 0], [1, 0]], &[half.clone(), half.clone()]);
        assert!(matches!(bad, Err(LatticeError::NonGeneric(_))));
        let border = geometric_crossing_oracle(&[[1, 0], [0, 1]], &[Q::zero(), half]);
        assert!(matches!(border, Err(LatticeError::NonGeneric(_))));
    }

    #[test]
    fn symmetric_placement_splits_evenly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = zonotope(&[[1, 0], [1, 2], [-1, 1]]).unwrap();
        let w = walls_from_polygon(&k).unwrap();
        let off = symmetric_offsets(&w, &mut rng).unwrap();
        let (lo, hi) = crossings_by_diagonal(&w, &off).unwrap();
        assert_eq!(lo, hi);
        assert_eq!(lo + hi, crossing_count(&w).unwrap());
        assert_eq!(symmetric_offsets(&[[1, 0]], &mut rng), Err(LatticeError::OddMultiplicity));
    }

    #[test]
    fn mincr_table_values() {
        use CurveClass::*;
        assert_eq!(mincr(&Torus { t: 1, u: 0 }, Some(&Torus { t: 0, u: 1 })).unwrap(), 1);
        assert_eq!(mincr(&KleinTU { t: 1, u: 1 }, Some(&KleinTU { t: 1, u: 1 })).unwrap(), 2);
        assert_eq!(mincr(&Moebius { k: 1 }, None).unwrap(), 1);
        assert_eq!(mincr(&Band { k: 3 }, None).unwrap(), 2);
        assert_eq!(mincr(&Band { k: 3 }, Some(&Band { k: 1 })).unwrap(), 0);
        assert_eq!(mincr(&Torus { t: 2, u: 4 }, None).unwrap(), 1);
        assert_eq!(mincr(&KleinTU { t: 2, u: 4 }, None).unwrap(), 9);
        assert_eq!(mincr(&KleinR { k: 2 }, Some(&KleinR { k: 1 })).unwrap(), 3);
        assert_eq!(mincr(&KleinR { k: 2 }, Some(&KleinS { k: 1 })).unwrap(), 0);
        assert_eq!(mincr(&KleinTU { t: 5, u: 2 }, Some(&KleinS { k: 1 })).unwrap(), 6);
        assert!(mincr(&Band { k: 1 }, Some(&Torus { t: 1, u: 0 })).is_err());
        assert!(mincr(&KleinTU { t: -1, u: 0 }, None).is_err());
    }

    #[test]
    fn klein_model_formulas() {
        let m = KleinModel { r: 1, s: 1, t: 0, u: 1 };
        assert_eq!(m.minlengths(), [2, 2, 2, 2]);
        assert_eq!(m.area(), 2);
        let z = KleinModel { r: 0, s: 0, t: 0, u: 0 };
        assert_eq!(z.minlengths(), [0; 4]);
        assert_eq!(z.area(), 0);
        let tu = KleinModel { r: 0, s: 0, t: 3, u: 5 };
        assert_eq!(tu.minlengths(), [5, 5, 10, 6]);
        assert_eq!(tu.area(), 15);
    }

    #[test]
    fn klein_minima_small() {
        assert_eq!(minimize_klein(0, KleinMode::Fac).unwrap().0, 0);
        assert_eq!(minimize_klein(4, KleinMode::Fac).unwrap().0, 6);
        assert_eq!(minimize_klein(4, KleinMode::Systole).unwrap().0, 8);
        assert_eq!(minimize_klein(3, KleinMode::Fac), Err(LatticeError::OddN(3)));
        let (a, w) = minimize_klein(6, KleinMode::Systole).unwrap();
        assert_eq!(w.area(), a);
        assert!(w.is_even() && KleinMode::Systole.admits(&w, 6));
    }

    /// The reduced families left after the tightening steps of the lower-bound argument.
    fn reduced_minimum(n: i64, mode: KleinMode) -> i64 {
        match mode {
            KleinMode::Fac => {
                let s0 = (0..=n).step_by(2).map(|r| (n * n - r) / 2);
                let s1 = (1..n).step_by(2).map(|_| (n * n - n) / 2);
                s0.chain(s1).min().unwrap()
            }
            KleinMode::Systole => {
                let small_u = (0..=n / 2).map(|r| n * n / 2 + (n / 2 - 1) * r);
                small_u.min().unwrap().min(n / 2 * n)
            }
        }
    }

    #[test]
    fn exhaustive_matches_reduced_analysis() {
        for n in (0..=20).step_by(2) {
            for mode in [KleinMode::Fac, KleinMode::Systole] {
                let (a, w) = minimize_klein(n, mode).unwrap();
                assert_eq!(a, reduced_minimum(n, mode), "n = {n}, {mode:?}");
                assert_eq!(w.area(), a);
            }
        }
    }

    fn any_class() -> impl Strategy<Value = CurveClass> {
        prop_oneof![
            (0i64..6).prop_map(|k| CurveClass::Band { k }),
            (0i64..6).prop_map(|k| CurveClass::Moebius { k }),
            (-6i64..6, -6i64..6).prop_map(|(t, u)| CurveClass::Torus { t, u }),
            (0i64..6, 0i64..6).prop_map(|(t, u)| CurveClass::KleinTU { t, u }),
            (0i64..6).prop_map(|k| CurveClass::KleinR { k }),
            (0i64..6).prop_map(|k| CurveClass::KleinS { k }),
        ]
    }

    proptest! {
        #[test]
        fn mincr_is_symmetric(a in any_class(), b in any_class()) {
            prop_assert_eq!(mincr(&a, Some(&b)).ok(), mincr(&b, Some(&a)).ok());
        }

        #[test]
        fn klein_lengths_and_area_agree_with_mincr(r in 0i64..7, s in 0i64..7, t in 0i64..7, u in 0i64..7) {
            let m = KleinModel { r, s, t, u };
            prop_assert_eq!(m.minlengths_by_mincr(), m.minlengths());
            prop_assert_eq!(m.area_by_mincr(), m.area());
        }

        #[test]
        fn induced_norm_is_a_seminorm(seed in any::<u64>(), v in (-10i64..=10, -10i64..=10), w in (-10i64..=10, -10i64..=10), k in -4i64..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_symmetric_polygon(4, 3, &mut rng);
            let walls = walls_from_polygon(&p).unwrap();
            let (v, w) = ([v.0, v.1], [w.0, w.1]);
            let n = |x: Vec2| induced_norm(&walls, x).unwrap();
            prop_assert!(n([v[0] + w[0], v[1] + w[1]]) <= n(v) + n(w));
            prop_assert_eq!(n([k * v[0], k * v[1]]), k.abs() * n(v));
            prop_assert_eq!(n(v), 2 * support_norm(&p, v));
        }

        #[test]
        fn random_polygons_match_their_area(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_symmetric_polygon(4, 3, &mut rng);
            prop_assert!(p.is_symmetric());
            let walls = walls_from_polygon(&p).unwrap();
            let c = crossing_count(&walls).unwrap();
            prop_assert_eq!(2 * c, p.double_area());
            let off = random_offsets(walls.len(), &mut rng);
            prop_assert_eq!(geometric_crossing_oracle(&walls, &off).unwrap(), c);
        }
    }
}
