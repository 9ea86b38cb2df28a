//! Exact discrete exterior calculus on square-celled surfaces.
//!
//! Every edge carries the direction of its lowest-numbered side and every square the
//! corner order 0..3 of its own frame. Chains and forms store one coefficient per such
//! reference cell; other orientations are reached by sign.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::squarecell::{SquareCelledSurface, SquareError};
use crate::steinitz::{DiskDiagram, SteinitzError};

pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("degree mismatch: expected {expected}, found {found}")]
    Degree { expected: u8, found: u8 },
    #[error("degree {0} out of range")]
    Range(u8),
    #[error("form of degree {degree} has {found} values, surface has {expected} cells")]
    Size { degree: u8, expected: usize, found: usize },
    #[error("no cell {0} of that degree")]
    Cell(usize),
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("surface is not orientable")]
    NotOrientable,
    #[error("surface is not even")]
    NotEven,
    #[error("distance form is not eikonal on edge {0}")]
    NotEikonal(usize),
    #[error("surface is not a disk")]
    NotDisk,
    #[error("vertex {0} is not on the boundary")]
    NotOnBoundary(usize),
    #[error("points are not in positive cyclic boundary order")]
    NotCyclic,
    #[error("fullness is only defined for tight disks")]
    NotTight,
    #[error("malformed form json: {0}")]
    Json(String),
    #[error(transparent)]
    Square(#[from] SquareError),
    #[error(transparent)]
    Steinitz(#[from] SteinitzError),
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn half() -> Q {
    Q::new(BigInt::one(), BigInt::from(2))
}

/// A rational combination of reference cells of one degree. Zero terms are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    degree: u8,
    terms: BTreeMap<usize, Q>,
}

impl Chain {
    pub fn zero(degree: u8) -> Self {
        Chain { degree, terms: BTreeMap::new() }
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<usize, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, cell: usize, coeff: Q) {
        let slot = self.terms.entry(cell).or_insert_with(Q::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&cell);
        }
    }

    pub fn add(&self, other: &Chain) -> Result<Chain, FormError> {
        same_degree(self.degree, other.degree)?;
        let mut out = self.clone();
        for (&c, a) in &other.terms {
            out.add_term(c, a.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Q) -> Chain {
        let mut out = Chain::zero(self.degree);
        for (&c, a) in &self.terms {
            out.add_term(c, a * k);
        }
        out
    }

    pub fn neg(&self) -> Chain {
        self.scale(&int(-1))
    }
}

/// A rational value per reference cell of one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    degree: u8,
    values: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    degree: u8,
    values: BTreeMap<String, String>,
}

impl Form {
    pub fn new(degree: u8, values: Vec<Q>) -> Result<Self, FormError> {
        if degree > 2 {
            return Err(FormError::Range(degree));
        }
        Ok(Form { degree, values })
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn add(&self, other: &Form) -> Result<Form, FormError> {
        same_degree(self.degree, other.degree)?;
        if self.values.len() != other.values.len() {
            return Err(FormError::Size { degree: other.degree, expected: self.values.len(), found: other.values.len() });
        }
        Ok(Form { degree: self.degree, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn scale(&self, k: &Q) -> Form {
        Form { degree: self.degree, values: self.values.iter().map(|a| a * k).collect() }
    }

    /// `{"degree": k, "values": {"cell": "p/q", ...}}` with every cell present.
    pub fn to_json(&self) -> String {
        let values = self.values.iter().enumerate().map(|(i, v)| (i.to_string(), v.to_string())).collect();
        serde_json::to_string(&FormJson { degree: self.degree, values }).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Form, FormError> {
        let j: FormJson = serde_json::from_str(text).map_err(|e| FormError::Json(e.to_string()))?;
        let mut slots: Vec<Option<Q>> = vec![None; j.values.len()];
        for (k, v) in &j.values {
            let i: usize = k.parse().map_err(|_| FormError::Json(format!("bad cell id {k:?}")))?;
            if i >= slots.len() {
                return Err(FormError::Json(format!("cell ids must be 0..{}", slots.len())));
            }
            let x: Q = v.parse().map_err(|_| FormError::Json(format!("bad rational {v:?}")))?;
            slots[i] = Some(x);
        }
        let values = slots.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| FormError::Json("duplicate cell id".into()))?;
        Form::new(j.degree, values)
    }
}

fn same_degree(expected: u8, found: u8) -> Result<(), FormError> {
    if expected != found {
        return Err(FormError::Degree { expected, found });
    }
    Ok(())
}

/// Shape of an eikonal 0-form on one square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareShape {
    /// Values `a, a+1, a+2, a+1` with the minimum at this corner.
    Regular { min_corner: usize },
    /// Values `a, a+1, a, a+1`; the minimum sits at this corner and the opposite one.
    Singular { min_corner: usize },
}

#[derive(Clone, Debug)]
pub struct DistanceForm {
    pub source: usize,
    pub form: Form,
    pub shapes: Vec<SquareShape>,
}

#[derive(Clone, Debug)]
pub struct CyclicContent {
    pub points: Vec<usize>,
    /// Value of the cyclic form on each square in its reference orientation.
    pub per_square: Vec<Q>,
    /// Integral over the oriented surface.
    pub interior: Q,
    /// Integral of the primitive 1-form over the oriented boundary.
    pub boundary: Q,
    pub squares: usize,
}

impl CyclicContent {
    pub fn bound(&self) -> Q {
        int(4 * self.squares as i64)
    }
}

/// The cell structure of a square-celled surface with its reference orientations.
#[derive(Clone, Debug)]
pub struct Cells<'a> {
    m: &'a SquareCelledSurface,
    edge_of: Vec<usize>,
    dir: Vec<i8>,
    ends: Vec<(usize, usize)>,
    orient: Option<Vec<i8>>,
    between: HashMap<(usize, usize), (usize, i8)>,
}

impl<'a> Cells<'a> {
    pub fn new(m: &'a SquareCelledSurface) -> Self {
        let n = 4 * m.square_count();
        let mut edge_of = vec![usize::MAX; n];
        let mut dir = vec![0i8; n];
        let mut ends = Vec::new();
        let mut between = HashMap::new();
        for s in 0..n {
            if edge_of[s] != usize::MAX {
                continue;
            }
            let e = ends.len();
            let (tail, head) = (m.corner(s / 4, s % 4), m.corner(s / 4, s % 4 + 1));
            ends.push((tail, head));
            edge_of[s] = e;
            dir[s] = 1;
            if let Some((t, twisted)) = m.partner(s) {
                edge_of[t] = e;
                dir[t] = if twisted { 1 } else { -1 };
            }
            between.entry((tail, head)).or_insert((e, 1));
            between.entry((head, tail)).or_insert((e, -1));
        }
        let orient = orientation(m);
        Cells { m, edge_of, dir, ends, orient, between }
    }

    pub fn surface(&self) -> &SquareCelledSurface {
        self.m
    }

    pub fn count(&self, degree: u8) -> Result<usize, FormError> {
        match degree {
            0 => Ok(self.m.vertex_count()),
            1 => Ok(self.ends.len()),
            2 => Ok(self.m.square_count()),
            k => Err(FormError::Range(k)),
        }
    }

    /// Reference tail and head of edge `e`.
    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    /// Edge of side `s` and whether the side runs along (+1) or against (−1) it.
    pub fn side_edge(&self, s: usize) -> (usize, i8) {
        (self.edge_of[s], self.dir[s])
    }

    /// Per-square orientation signs, if the surface is orientable.
    pub fn orientation(&self) -> Option<&[i8]> {
        self.orient.as_deref()
    }

    /// The same cells with every square's orientation reversed.
    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        if let Some(o) = c.orient.as_mut() {
            o.iter_mut().for_each(|x| *x = -*x);
        }
        c
    }

    pub fn zero_form(&self, degree: u8) -> Result<Form, FormError> {
        Form::new(degree, vec![Q::zero(); self.count(degree)?])
    }

    fn check(&self, f: &Form, degree: u8) -> Result<(), FormError> {
        same_degree(degree, f.degree)?;
        let expected = self.count(degree)?;
        if f.values.len() != expected {
            return Err(FormError::Size { degree, expected, found: f.values.len() });
        }
        Ok(())
    }

    pub fn vertex(&self, x: usize) -> Result<Chain, FormError> {
        if x >= self.m.vertex_count() {
            return Err(FormError::Cell(x));
        }
        let mut c = Chain::zero(0);
        c.add_term(x, Q::one());
        Ok(c)
    }

    /// Side `s` traversed from its start corner to its end corner.
    pub fn side(&self, s: usize) -> Result<Chain, FormError> {
        if s >= self.edge_of.len() {
            return Err(FormError::Cell(s));
        }
        let mut c = Chain::zero(1);
        c.add_term(self.edge_of[s], int(self.dir[s] as i64));
        Ok(c)
    }

    /// The 1-chain of a vertex path.
    pub fn path(&self, vertices: &[usize]) -> Result<Chain, FormError> {
        let mut c = Chain::zero(1);
        for w in vertices.windows(2) {
            let &(e, sg) = self.between.get(&(w[0], w[1])).ok_or(FormError::NotAdjacent(w[0], w[1]))?;
            c.add_term(e, int(sg as i64));
        }
        Ok(c)
    }

    pub fn square(&self, q: usize) -> Result<Chain, FormError> {
        if q >= self.m.square_count() {
            return Err(FormError::Cell(q));
        }
        let mut c = Chain::zero(2);
        c.add_term(q, Q::one());
        Ok(c)
    }

    /// Sum of all squares with their induced orientation.
    pub fn fundamental(&self) -> Result<Chain, FormError> {
        let o = self.orient.as_ref().ok_or(FormError::NotOrientable)?;
        let mut c = Chain::zero(2);
        for (q, &s) in o.iter().enumerate() {
            c.add_term(q, int(s as i64));
        }
        Ok(c)
    }

    pub fn integrate(&self, theta: &Form, s: &Chain) -> Result<Q, FormError> {
        self.check(theta, s.degree)?;
        let mut total = Q::zero();
        for (&cell, a) in &s.terms {
            let v = theta.values.get(cell).ok_or(FormError::Cell(cell))?;
            total += a * v;
        }
        Ok(total)
    }

    pub fn boundary(&self, s: &Chain) -> Result<Chain, FormError> {
        let mut out = Chain::zero(s.degree.wrapping_sub(1));
        match s.degree {
            1 => {
                for (&e, a) in &s.terms {
                    let &(x, y) = self.ends.get(e).ok_or(FormError::Cell(e))?;
                    out.add_term(y, a.clone());
                    out.add_term(x, -a.clone());
                }
            }
            2 => {
                for (&q, a) in &s.terms {
                    if q >= self.m.square_count() {
                        return Err(FormError::Cell(q));
                    }
                    for i in 0..4 {
                        let sd = 4 * q + i;
                        out.add_term(self.edge_of[sd], a * int(self.dir[sd] as i64));
                    }
                }
            }
            k => return Err(FormError::Range(k)),
        }
        Ok(out)
    }

    /// Value of a 1-form on side `s` traversed forward.
    fn on_side(&self, theta: &Form, s: usize) -> Q {
        let v = &theta.values[self.edge_of[s]];
        if self.dir[s] > 0 {
            v.clone()
        } else {
            -v.clone()
        }
    }

    pub fn d(&self, theta: &Form) -> Result<Form, FormError> {
        match theta.degree {
            0 => {
                self.check(theta, 0)?;
                let f = &theta.values;
                Form::new(1, self.ends.iter().map(|&(x, y)| &f[y] - &f[x]).collect())
            }
            1 => {
                self.check(theta, 1)?;
                let vals = (0..self.m.square_count())
                    .map(|q| (0..4).map(|i| self.on_side(theta, 4 * q + i)).sum())
                    .collect();
                Form::new(2, vals)
            }
            k => Err(FormError::Range(k)),
        }
    }

    /// `f·θ` for θ of degree 1 or 2, averaging `f` over the cell's vertices.
    pub fn product(&self, f: &Form, theta: &Form) -> Result<Form, FormError> {
        self.check(f, 0)?;
        let fv = &f.values;
        match theta.degree {
            1 => {
                self.check(theta, 1)?;
                let vals = self
                    .ends
                    .iter()
                    .zip(&theta.values)
                    .map(|(&(x, y), t)| (&fv[x] + &fv[y]) * half() * t)
                    .collect();
                Form::new(1, vals)
            }
            2 => {
                self.check(theta, 2)?;
                let quarter = Q::new(BigInt::one(), BigInt::from(4));
                let vals = (0..self.m.square_count())
                    .map(|q| {
                        let s: Q = (0..4).map(|i| fv[self.m.corner(q, i)].clone()).sum();
                        s * &quarter * &theta.values[q]
                    })
                    .collect();
                Form::new(2, vals)
            }
            k => Err(FormError::Degree { expected: 1, found: k }),
        }
    }

    /// Exterior product of two 1-forms.
    pub fn wedge(&self, phi: &Form, psi: &Form) -> Result<Form, FormError> {
        self.check(phi, 1)?;
        self.check(psi, 1)?;
        let vals = (0..self.m.square_count())
            .map(|q| {
                // v = [c0,c1], w' = [c1,c2], v' = [c3,c2], w = [c0,c3].
                let pair = |t: &Form| {
                    let v = self.on_side(t, 4 * q);
                    let w2 = self.on_side(t, 4 * q + 1);
                    let v2 = -self.on_side(t, 4 * q + 2);
                    let w = -self.on_side(t, 4 * q + 3);
                    ((v + v2) * half(), (w + w2) * half())
                };
                let (pv, pw) = pair(phi);
                let (sv, sw) = pair(psi);
                pv * sw - pw * sv
            })
            .collect();
        Form::new(2, vals)
    }

    pub fn random_form<R: Rng>(&self, degree: u8, rng: &mut R) -> Result<Form, FormError> {
        let vals = (0..self.count(degree)?)
            .map(|_| Q::new(BigInt::from(rng.gen_range(-20i64..=20)), BigInt::from(rng.gen_range(1i64..=6))))
            .collect();
        Form::new(degree, vals)
    }

    /// The skeleton distance to `x` as an eikonal 0-form with its per-square shapes.
    pub fn distance_form(&self, x: usize) -> Result<DistanceForm, FormError> {
        if !self.m.is_even() {
            return Err(FormError::NotEven);
        }
        let dist = self.m.distances_from(x)?;
        for (e, &(a, b)) in self.ends.iter().enumerate() {
            if dist[a] == usize::MAX || dist[b] == usize::MAX || dist[a].abs_diff(dist[b]) != 1 {
                return Err(FormError::NotEikonal(e));
            }
        }
        let shapes = (0..self.m.square_count())
            .map(|q| {
                let c: Vec<usize> = (0..4).map(|i| dist[self.m.corner(q, i)]).collect();
                let lo = *c.iter().min().unwrap();
                let min_corner = (0..4).find(|&i| c[i] == lo).unwrap();
                if c[(min_corner + 2) % 4] == lo {
                    SquareShape::Singular { min_corner }
                } else {
                    SquareShape::Regular { min_corner }
                }
            })
            .collect();
        let form = Form::new(0, dist.iter().map(|&v| int(v as i64)).collect())?;
        Ok(DistanceForm { source: x, form, shapes })
    }

    /// Boundary vertices of an oriented disk in positive order, starting from the tail
    /// of the lowest unglued side.
    pub fn positive_boundary(&self) -> Result<Vec<usize>, FormError> {
        let o = self.orient.as_ref().ok_or(FormError::NotOrientable)?;
        let c = self.m.to_map().classify();
        if c.euler_characteristic != 1 || c.boundary_components != 1 || !c.orientable {
            return Err(FormError::NotDisk);
        }
        let mut next = HashMap::new();
        let mut first = None;
        for s in self.m.boundary_sides() {
            let (q, i) = (s / 4, s % 4);
            let (a, b) = (self.m.corner(q, i), self.m.corner(q, i + 1));
            let (a, b) = if o[q] > 0 { (a, b) } else { (b, a) };
            if next.insert(a, b).is_some() {
                return Err(FormError::NotDisk);
            }
            first.get_or_insert(a);
        }
        let start = first.ok_or(FormError::NotDisk)?;
        let mut cyc = vec![start];
        let mut at = next[&start];
        while at != start {
            if cyc.len() > next.len() {
                return Err(FormError::NotDisk);
            }
            cyc.push(at);
            at = *next.get(&at).ok_or(FormError::NotDisk)?;
        }
        Ok(cyc)
    }

    /// The cyclic 2-form and its primitive 1-form for the point sequence, without any
    /// order requirement.
    pub fn cyclic_forms(&self, points: &[usize]) -> Result<(Form, Form), FormError> {
        let fs = points.iter().map(|&x| self.distance_form(x).map(|d| d.form)).collect::<Result<Vec<_>, _>>()?;
        let dfs = fs.iter().map(|f| self.d(f)).collect::<Result<Vec<_>, _>>()?;
        let mut omega = self.zero_form(2)?;
        let mut theta = self.zero_form(1)?;
        let m = points.len();
        for i in 0..m {
            let j = (i + 1) % m;
            omega = omega.add(&self.wedge(&dfs[i], &dfs[j])?.scale(&half()))?;
            theta = theta.add(&self.product(&fs[i], &dfs[j])?.scale(&half()))?;
        }
        Ok((omega, theta))
    }

    /// Ivanov's cyclic content of an even oriented disk for boundary points in positive
    /// cyclic order, computed over the squares and, independently, over the boundary.
    pub fn cyclic_content(&self, points: &[usize]) -> Result<CyclicContent, FormError> {
        if !self.m.is_even() {
            return Err(FormError::NotEven);
        }
        let cyc = self.positive_boundary()?;
        let pos: HashMap<usize, usize> = cyc.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut rel = Vec::with_capacity(points.len());
        for &x in points {
            let p = *pos.get(&x).ok_or(FormError::NotOnBoundary(x))?;
            rel.push(p);
        }
        if let Some(&p0) = rel.first() {
            let l = cyc.len();
            let r: Vec<usize> = rel.iter().map(|&p| (p + l - p0) % l).collect();
            if r.windows(2).any(|w| w[0] >= w[1]) {
                return Err(FormError::NotCyclic);
            }
        }
        let (omega, theta) = self.cyclic_forms(points)?;
        let fund = self.fundamental()?;
        let interior = self.integrate(&omega, &fund)?;
        let boundary = self.integrate(&theta, &self.boundary(&fund)?)?;
        Ok(CyclicContent {
            points: points.to_vec(),
            per_square: omega.values,
            interior,
            boundary,
            squares: self.m.square_count(),
        })
    }

    /// Whether the dual wallsystem of this disk is a pseudoline arrangement.
    pub fn is_tight(&self) -> Result<bool, FormError> {
        self.positive_boundary()?;
        Ok(DiskDiagram::from_wallsystem(&self.m.dual_wallsystem())?.is_pla())
    }

    /// On a tight disk: every square has, for each corner, a point of `points` strictly
    /// closest to that corner.
    pub fn is_sufficiently_full(&self, points: &[usize]) -> Result<bool, FormError> {
        if !self.is_tight()? {
            return Err(FormError::NotTight);
        }
        let mut seen = vec![[false; 4]; self.m.square_count()];
        for &x in points {
            for (q, sh) in self.distance_form(x)?.shapes.iter().enumerate() {
                if let SquareShape::Regular { min_corner } = sh {
                    seen[q][*min_corner] = true;
                }
            }
        }
        Ok(seen.iter().all(|s| s.iter().all(|&b| b)))
    }
}

fn orientation(m: &SquareCelledSurface) -> Option<Vec<i8>> {
    let n = m.square_count();
    let mut o = vec![0i8; n];
    for root in 0..n {
        if o[root] != 0 {
            continue;
        }
        o[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(q) = queue.pop_front() {
            for i in 0..4 {
                let Some((t, twisted)) = m.partner(4 * q + i) else { continue };
                let want = if twisted { -o[q] } else { o[q] };
                let p = t / 4;
                if o[p] == 0 {
                    o[p] = want;
                    queue.push_back(p);
                } else if o[p] != want {
                    return None;
                }
            }
        }
    }
    Some(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squarecell::fixtures::*;
    use crate::steinitz::Chords;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn corpus() -> Vec<SquareCelledSurface> {
        vec![one_square(), hexagon(), strip(1), strip(3), moebius(2), moebius(3), torus(), complete(3), complete(4)]
    }

    /// Dual of the straight complete arrangement of `n` chords.
    fn complete(n: usize) -> SquareCelledSurface {
        let pairing = (0..n).map(|i| [i, i + n]).collect();
        let d = Chords { boundary_length: 2 * n, pairing, crossing_order: None }.to_diagram().unwrap();
        d.to_wallsystem().dualize().unwrap()
    }

    #[test]
    fn integrals_of_small_chains() {
        let m = one_square();
        let c = Cells::new(&m);
        let f = Form::new(0, (0..4).map(|v| int(v as i64 * 3)).collect()).unwrap();
        assert!(c.integrate(&f, &Chain::zero(0)).unwrap().is_zero());
        let x = c.vertex(2).unwrap();
        assert_eq!(c.integrate(&f, &x.neg()).unwrap(), -c.integrate(&f, &x).unwrap());
        let df = c.d(&f).unwrap();
        let (a, b, z) = (m.corner(0, 0), m.corner(0, 1), m.corner(0, 2));
        let p = c.path(&[a, b, z]).unwrap();
        assert_eq!(c.integrate(&df, &p).unwrap(), &f.values()[z] - &f.values()[a]);
        assert!(matches!(c.integrate(&df, &x), Err(FormError::Degree { .. })));
        assert!(matches!(c.d(&c.zero_form(2).unwrap()), Err(FormError::Range(2))));
    }

    #[test]
    fn constants_are_closed() {
        for m in corpus() {
            let c = Cells::new(&m);
            let f = Form::new(0, vec![int(7); m.vertex_count()]).unwrap();
            assert!(c.d(&f).unwrap().values().iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn square_boundary_is_its_four_sides() {
        let m = one_square();
        let c = Cells::new(&m);
        let b = c.boundary(&c.square(0).unwrap()).unwrap();
        let mut sides = Chain::zero(1);
        for i in 0..4 {
            sides = sides.add(&c.side(i).unwrap()).unwrap();
        }
        assert_eq!(b, sides);
        assert!(c.boundary(&b).unwrap().is_zero());
    }

    #[test]
    fn stokes_on_a_two_square_strip_by_expansion() {
        let m = strip(2);
        let c = Cells::new(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = c.random_form(1, &mut rng).unwrap();
        // Expand by hand: the outer boundary is six unglued sides walked forward.
        let mut hand = Q::zero();
        for s in m.boundary_sides() {
            let (e, sg) = c.side_edge(s);
            hand += &t.values()[e] * int(sg as i64);
        }
        let lhs = c.integrate(&c.d(&t).unwrap(), &c.fundamental().unwrap()).unwrap();
        assert_eq!(lhs, hand);
    }

    #[test]
    fn wedge_values_over_all_eikonal_patterns() {
        let m = one_square();
        let c = Cells::new(&m);
        // Step signs around the square: two up, two down.
        let mut patterns = Vec::new();
        for mask in 0u8..16 {
            if mask.count_ones() == 2 {
                let mut v = vec![0i64; 4];
                for i in 0..3 {
                    v[i + 1] = v[i] + if mask >> i & 1 == 1 { 1 } else { -1 };
                }
                patterns.push(v);
            }
        }
        assert_eq!(patterns.len(), 6);
        let shape = |v: &[i64]| {
            let lo = *v.iter().min().unwrap();
            let i = (0..4).find(|&i| v[i] == lo).unwrap();
            (v[(i + 2) % 4] == lo + 2, i)
        };
        let vertex_values = |v: &[i64]| {
            let mut f = vec![Q::zero(); 4];
            for i in 0..4 {
                f[m.corner(0, i)] = int(v[i]);
            }
            Form::new(0, f).unwrap()
        };
        for p in &patterns {
            for r in &patterns {
                let w = c.wedge(&c.d(&vertex_values(p)).unwrap(), &c.d(&vertex_values(r)).unwrap()).unwrap();
                let got = &w.values()[0] * half();
                let ((rf, i), (rg, j)) = (shape(p), shape(r));
                let want = if rf && rg && j == (i + 1) % 4 {
                    1
                } else if rf && rg && (j + 1) % 4 == i {
                    -1
                } else {
                    0
                };
                assert_eq!(got, int(want), "{p:?} {r:?}");
            }
        }
    }

    #[test]
    fn distance_form_shapes() {
        let m = one_square();
        let c = Cells::new(&m);
        let x = m.corner(0, 0);
        let df = c.distance_form(x).unwrap();
        assert!(df.form.values()[x].is_zero());
        assert_eq!(df.shapes, vec![SquareShape::Regular { min_corner: 0 }]);
        // A bigon lets a boundary vertex see two opposite corners at the same distance.
        let n = 3;
        let pairing = (0..n).map(|i| [i, i + n]).collect();
        let d = Chords { boundary_length: 2 * n, pairing, crossing_order: None }.to_diagram().unwrap();
        let loose = d.unmerge(0).unwrap().to_wallsystem().dualize().unwrap();
        let cl = Cells::new(&loose);
        let mut singular = 0;
        for x in 0..loose.vertex_count() {
            let f = cl.distance_form(x).unwrap();
            for (q, sh) in f.shapes.iter().enumerate() {
                let v: Vec<&Q> = (0..4).map(|i| &f.form.values()[loose.corner(q, i)]).collect();
                match *sh {
                    SquareShape::Regular { min_corner: i } => assert_eq!(v[(i + 2) % 4] - v[i], int(2)),
                    SquareShape::Singular { min_corner: i } => {
                        singular += 1;
                        assert_eq!(v[(i + 2) % 4], v[i]);
                    }
                }
            }
        }
        assert!(singular > 0);
        assert_eq!(Cells::new(&torus()).distance_form(0).unwrap_err(), FormError::NotEven);
    }

    #[test]
    fn one_square_content_is_four() {
        let m = one_square();
        let c = Cells::new(&m);
        let p = c.positive_boundary().unwrap();
        let cc = c.cyclic_content(&p).unwrap();
        assert_eq!(cc.interior, int(4));
        assert_eq!(cc.boundary, int(4));
        assert!(c.is_tight().unwrap());
        assert!(c.is_sufficiently_full(&p).unwrap());
        // Two points see at most two quadrants.
        let two = c.cyclic_content(&p[..2]).unwrap();
        assert!(two.interior.is_zero());
        let mut back = p.clone();
        back.reverse();
        assert_eq!(c.cyclic_content(&back).unwrap_err(), FormError::NotCyclic);
    }

    #[test]
    fn complete_arrangements_attain_the_bound() {
        for n in 2..=5 {
            let m = complete(n);
            let c = Cells::new(&m);
            let p = c.positive_boundary().unwrap();
            assert!(c.is_tight().unwrap());
            assert!(c.is_sufficiently_full(&p).unwrap());
            let cc = c.cyclic_content(&p).unwrap();
            assert_eq!(cc.interior, cc.bound(), "n = {n}");
            assert_eq!(cc.interior, cc.boundary);
            assert_eq!(c.reversed().cyclic_forms(&p).map(|(w, _)| w).and_then(|w| {
                c.reversed().integrate(&w, &c.reversed().fundamental()?)
            }).unwrap(), -cc.interior);
        }
    }

    #[test]
    fn a_bigon_drops_below_the_bound() {
        let n = 4;
        let pairing = (0..n).map(|i| [i, i + n]).collect();
        let d = Chords { boundary_length: 2 * n, pairing, crossing_order: None }.to_diagram().unwrap();
        let tight = d.to_wallsystem().dualize().unwrap();
        let loose = d.unmerge(0).unwrap().to_wallsystem().dualize().unwrap();
        assert_eq!(loose.square_count(), tight.square_count() + 1);
        let (ct, cl) = (Cells::new(&tight), Cells::new(&loose));
        assert!(!cl.is_tight().unwrap());
        assert_eq!(cl.is_sufficiently_full(&[]).unwrap_err(), FormError::NotTight);
        let a = ct.cyclic_content(&ct.positive_boundary().unwrap()).unwrap();
        let b = cl.cyclic_content(&cl.positive_boundary().unwrap()).unwrap();
        assert_eq!(a.interior, b.interior);
        assert_eq!(b.interior, b.boundary);
        assert!(b.interior < b.bound());
    }

    #[test]
    fn sparse_points_fall_short() {
        let m = complete(4);
        let c = Cells::new(&m);
        let p = c.positive_boundary().unwrap();
        let sparse: Vec<usize> = p.iter().copied().step_by(4).collect();
        let cc = c.cyclic_content(&sparse).unwrap();
        assert_eq!(cc.interior, cc.boundary);
        assert!(cc.interior < cc.bound());
        assert!(!c.is_sufficiently_full(&sparse).unwrap());
    }

    #[test]
    fn form_json_round_trip() {
        let m = hexagon();
        let c = Cells::new(&m);
        let t = c.random_form(1, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(Form::from_json(&t.to_json()).unwrap(), t);
        assert!(Form::from_json(r#"{"degree":1,"values":{"1":"2"}}"#).is_err());
        assert!(Form::from_json(r#"{"degree":4,"values":{}}"#).is_err());
        assert!(Form::from_json(r#"{"degree":0,"values":{"0":"1/0"}}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn stokes_holds_on_every_cell(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for m in corpus() {
                let c = Cells::new(&m);
                let f = c.random_form(0, &mut rng).unwrap();
                let t = c.random_form(1, &mut rng).unwrap();
                for e in 0..c.count(1).unwrap() {
                    let mut ch = Chain::zero(1);
                    ch.add_term(e, Q::one());
                    prop_assert_eq!(c.integrate(&c.d(&f).unwrap(), &ch).unwrap(), c.integrate(&f, &c.boundary(&ch).unwrap()).unwrap());
                }
                for q in 0..m.square_count() {
                    let ch = c.square(q).unwrap();
                    prop_assert_eq!(c.integrate(&c.d(&t).unwrap(), &ch).unwrap(), c.integrate(&t, &c.boundary(&ch).unwrap()).unwrap());
                }
                if let Ok(fund) = c.fundamental() {
                    prop_assert_eq!(c.integrate(&c.d(&t).unwrap(), &fund).unwrap(), c.integrate(&t, &c.boundary(&fund).unwrap()).unwrap());
                }
            }
        }

        #[test]
        fn dd_vanishes(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for m in corpus() {
                let c = Cells::new(&m);
                let f = c.random_form(0, &mut rng).unwrap();
                prop_assert!(c.d(&c.d(&f).unwrap()).unwrap().values().iter().all(|v| v.is_zero()));
            }
        }

        #[test]
        fn leibniz(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for m in corpus() {
                let c = Cells::new(&m);
                let f = c.random_form(0, &mut rng).unwrap();
                let t = c.random_form(1, &mut rng).unwrap();
                let lhs = c.d(&c.product(&f, &t).unwrap()).unwrap();
                let rhs = c.wedge(&c.d(&f).unwrap(), &t).unwrap().add(&c.product(&f, &c.d(&t).unwrap()).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn wedge_is_bilinear_and_antisymmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = complete(3);
            let c = Cells::new(&m);
            let (a, b, e) = (c.random_form(1, &mut rng).unwrap(), c.random_form(1, &mut rng).unwrap(), c.random_form(1, &mut rng).unwrap());
            prop_assert!(c.wedge(&a, &a).unwrap().values().iter().all(|v| v.is_zero()));
            prop_assert_eq!(c.wedge(&a, &b).unwrap(), c.wedge(&b, &a).unwrap().scale(&int(-1)));
            let k = int(rng.gen_range(-5..=5));
            prop_assert_eq!(
                c.wedge(&a.add(&e.scale(&k)).unwrap(), &b).unwrap(),
                c.wedge(&a, &b).unwrap().add(&c.wedge(&e, &b).unwrap().scale(&k)).unwrap()
            );
        }

        #[test]
        fn content_is_orientation_odd(n in 2usize..5, step in 1usize..3) {
            let m = complete(n);
            let c = Cells::new(&m);
            let p: Vec<usize> = c.positive_boundary().unwrap().into_iter().step_by(step).collect();
            let (w, _) = c.cyclic_forms(&p).unwrap();
            let r = c.reversed();
            prop_assert_eq!(r.integrate(&w, &r.fundamental().unwrap()).unwrap(), -c.integrate(&w, &c.fundamental().unwrap()).unwrap());
        }
    }
}
