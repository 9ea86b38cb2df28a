//! Square-celled surfaces: squares glued side to side.
//!
//! Side `4q + i` of square `q` runs from corner `i` to corner `i + 1`, counterclockwise
//! in the square's own frame. An untwisted gluing identifies the start of one side with
//! the end of the other; a twisted one identifies starts with starts.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combmap::{glue_polygons, Dart, EdgeKind, MapError, SurfaceMap};
use crate::wallsystem::{UnionFind, Wallsystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SquareError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("invalid square-celled surface: {0}")]
    Invalid(String),
    #[error("malformed square json: {0}")]
    Json(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("boundary must be a single cycle, found {0} cycles")]
    Boundary(usize),
    #[error("surface does not fill its boundary isometrically")]
    NotIsometric,
}

/// One side as `(square, position)`.
pub type SideRef = [usize; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GluingJson {
    Twisted(SideRef, SideRef, bool),
    Plain(SideRef, SideRef),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareJson {
    /// Corner vertex labels per square.
    pub squares: Vec<[usize; 4]>,
    #[serde(default)]
    pub gluings: Vec<GluingJson>,
}

/// A wall of the dual wallsystem seen from the squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareWall {
    pub closed: bool,
    /// Sides crossed in travel order; for an open wall the first and last are unglued.
    pub sides: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SquareCelledSurface {
    partner: Vec<Option<(usize, bool)>>,
    corner: Vec<usize>,
    nv: usize,
    adj: Vec<Vec<usize>>,
}

fn side(q: usize, i: usize) -> usize {
    4 * q + i % 4
}

impl SquareCelledSurface {
    /// Builds from a per-side partner table (length 4·squares).
    pub fn from_partners(partner: Vec<Option<(usize, bool)>>) -> Result<Self, SquareError> {
        if partner.len() % 4 != 0 {
            return Err(SquareError::Invalid("side table length is not a multiple of 4".into()));
        }
        let m = partner.len() / 4;
        if m == 0 {
            return Err(SquareError::Invalid("no squares".into()));
        }
        // Validates symmetry, the link condition and connectivity.
        let g = glue_polygons(&vec![4; m], &partner)?;
        let mut uf = UnionFind::new(4 * m);
        for s in 0..4 * m {
            if let Some((t, tw)) = partner[s] {
                let (q, i) = (s / 4, s % 4);
                let (p, j) = (t / 4, t % 4);
                if tw {
                    uf.union(side(q, i), side(p, j));
                    uf.union(side(q, i + 1), side(p, j + 1));
                } else {
                    uf.union(side(q, i), side(p, j + 1));
                    uf.union(side(q, i + 1), side(p, j));
                }
            }
        }
        let mut label = vec![usize::MAX; 4 * m];
        let mut corner = vec![0; 4 * m];
        let mut nv = 0;
        for c in 0..4 * m {
            let r = uf.find(c);
            if label[r] == usize::MAX {
                label[r] = nv;
                nv += 1;
            }
            corner[c] = label[r];
        }
        if nv != g.map.vertex_count() {
            return Err(SquareError::Invalid("a vertex link is disconnected (pinched vertex)".into()));
        }
        let mut adj = vec![Vec::new(); nv];
        for q in 0..m {
            for i in 0..4 {
                let (a, b) = (corner[side(q, i)], corner[side(q, i + 1)]);
                if !adj[a].contains(&b) {
                    adj[a].push(b);
                }
                if !adj[b].contains(&a) {
                    adj[b].push(a);
                }
            }
        }
        Ok(SquareCelledSurface { partner, corner, nv, adj })
    }

    pub fn from_json(text: &str) -> Result<Self, SquareError> {
        let j: SquareJson = serde_json::from_str(text).map_err(|e| SquareError::Json(e.to_string()))?;
        Self::from_square_json(&j)
    }

    pub fn from_square_json(j: &SquareJson) -> Result<Self, SquareError> {
        let m = j.squares.len();
        let mut partner = vec![None; 4 * m];
        for g in &j.gluings {
            let (a, b, tw) = match *g {
                GluingJson::Twisted(a, b, t) => (a, b, t),
                GluingJson::Plain(a, b) => (a, b, false),
            };
            for s in [a, b] {
                if s[0] >= m || s[1] >= 4 {
                    return Err(SquareError::Invalid(format!("side {s:?} out of range")));
                }
            }
            let (s, t) = (side(a[0], a[1]), side(b[0], b[1]));
            if s == t || partner[s].is_some() || partner[t].is_some() {
                return Err(SquareError::Invalid(format!("side glued twice near {a:?} / {b:?}")));
            }
            partner[s] = Some((t, tw));
            partner[t] = Some((s, tw));
        }
        let surf = Self::from_partners(partner)?;
        // Labels must induce exactly the corner identification of the gluings.
        let mut seen: std::collections::BTreeMap<usize, usize> = Default::default();
        let mut back: std::collections::BTreeMap<usize, usize> = Default::default();
        for q in 0..m {
            for i in 0..4 {
                let (l, v) = (j.squares[q][i], surf.corner[side(q, i)]);
                if *seen.entry(l).or_insert(v) != v || *back.entry(v).or_insert(l) != l {
                    return Err(SquareError::Invalid(format!(
                        "corner labels disagree with the gluings at square {q}, corner {i}"
                    )));
                }
            }
        }
        Ok(surf)
    }

    pub fn to_square_json(&self) -> SquareJson {
        let squares = (0..self.square_count())
            .map(|q| [0, 1, 2, 3].map(|i| self.corner[side(q, i)]))
            .collect();
        let mut gluings = Vec::new();
        for s in 0..self.partner.len() {
            if let Some((t, tw)) = self.partner[s] {
                if s < t {
                    let (a, b) = ([s / 4, s % 4], [t / 4, t % 4]);
                    gluings.push(if tw { GluingJson::Twisted(a, b, true) } else { GluingJson::Plain(a, b) });
                }
            }
        }
        SquareJson { squares, gluings }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_square_json()).expect("squares serialize")
    }

    pub fn square_count(&self) -> usize {
        self.partner.len() / 4
    }

    pub fn vertex_count(&self) -> usize {
        self.nv
    }

    pub fn partner(&self, s: usize) -> Option<(usize, bool)> {
        self.partner[s]
    }

    pub fn partners(&self) -> &[Option<(usize, bool)>] {
        &self.partner
    }

    /// Vertex at corner `i` of square `q`.
    pub fn corner(&self, q: usize, i: usize) -> usize {
        self.corner[side(q, i)]
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// The surface as a combinatorial map, one face per square.
    pub fn to_map(&self) -> SurfaceMap {
        glue_polygons(&vec![4; self.square_count()], &self.partner).expect("validated at construction").map
    }

    pub fn distances_from(&self, x: usize) -> Result<Vec<usize>, SquareError> {
        if x >= self.nv {
            return Err(SquareError::UnknownVertex(x));
        }
        let mut dist = vec![usize::MAX; self.nv];
        dist[x] = 0;
        let mut q = VecDeque::from([x]);
        while let Some(a) = q.pop_front() {
            for &b in &self.adj[a] {
                if dist[b] == usize::MAX {
                    dist[b] = dist[a] + 1;
                    q.push_back(b);
                }
            }
        }
        Ok(dist)
    }

    pub fn skeleton_distance(&self, x: usize, y: usize) -> Result<usize, SquareError> {
        if y >= self.nv {
            return Err(SquareError::UnknownVertex(y));
        }
        Ok(self.distances_from(x)?[y])
    }

    /// Bipartiteness of the 1-skeleton.
    pub fn is_even(&self) -> bool {
        let mut col = vec![-1i8; self.nv];
        col[0] = 0;
        let mut q = VecDeque::from([0]);
        while let Some(a) = q.pop_front() {
            for &b in &self.adj[a] {
                if col[b] < 0 {
                    col[b] = 1 - col[a];
                    q.push_back(b);
                } else if col[b] == col[a] {
                    return false;
                }
            }
        }
        true
    }

    /// Unglued sides.
    pub fn boundary_sides(&self) -> Vec<usize> {
        (0..self.partner.len()).filter(|&s| self.partner[s].is_none()).collect()
    }

    /// Boundary cycles as vertex sequences.
    pub fn boundary_cycles(&self) -> Vec<Vec<usize>> {
        let sides = self.boundary_sides();
        let mut ends_at: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.nv];
        for &s in &sides {
            ends_at[self.corner[s]].push((s, 0));
            ends_at[self.corner[side(s / 4, s % 4 + 1)]].push((s, 1));
        }
        let mut used = vec![false; self.partner.len()];
        let mut out = Vec::new();
        for &s0 in &sides {
            if used[s0] {
                continue;
            }
            let mut cyc = Vec::new();
            let (mut s, mut e) = (s0, 0usize);
            loop {
                used[s] = true;
                let here = if e == 0 { self.corner[s] } else { self.corner[side(s / 4, s % 4 + 1)] };
                cyc.push(here);
                let there = if e == 0 { self.corner[side(s / 4, s % 4 + 1)] } else { self.corner[s] };
                let leave = (s, 1 - e);
                let next = ends_at[there].iter().copied().find(|&x| x != leave);
                match next {
                    Some((t, f)) if !(t == s0 && f == 0) && !used[t] => {
                        s = t;
                        e = f;
                    }
                    _ => break,
                }
            }
            out.push(cyc);
        }
        out
    }

    fn single_cycle(&self) -> Result<Vec<usize>, SquareError> {
        let mut c = self.boundary_cycles();
        if c.len() != 1 {
            return Err(SquareError::Boundary(c.len()));
        }
        Ok(c.pop().unwrap())
    }

    /// Number of unglued sides, when they form one cycle.
    pub fn boundary_length(&self) -> Result<usize, SquareError> {
        Ok(self.single_cycle()?.len())
    }

    pub fn is_isometric_filling(&self) -> Result<bool, SquareError> {
        let cyc = self.single_cycle()?;
        let l = cyc.len();
        for i in 0..l {
            let dist = self.distances_from(cyc[i])?;
            for j in 0..l {
                let k = i.abs_diff(j);
                if dist[cyc[j]] != k.min(l - k) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Walls of the dual wallsystem, traced through opposite sides.
    pub fn walls(&self) -> Vec<SquareWall> {
        let n = self.partner.len();
        let mut used = vec![false; n];
        let mut out = Vec::new();
        let trace = |s0: usize, used: &mut Vec<bool>| -> SquareWall {
            // Enter through s0, leave through the opposite side.
            let mut sides = vec![s0];
            used[s0] = true;
            let mut s = s0;
            loop {
                let exit = side(s / 4, s % 4 + 2);
                used[exit] = true;
                match self.partner[exit] {
                    None => {
                        sides.push(exit);
                        return SquareWall { closed: false, sides };
                    }
                    Some((t, _)) => {
                        if t == s0 {
                            sides[0] = exit;
                            return SquareWall { closed: true, sides };
                        }
                        sides.push(exit);
                        used[t] = true;
                        s = t;
                    }
                }
            }
        };
        for s in 0..n {
            if self.partner[s].is_none() && !used[s] {
                out.push(trace(s, &mut used));
            }
        }
        for s in 0..n {
            if !used[s] {
                out.push(trace(s, &mut used));
            }
        }
        out
    }

    /// The dual wallsystem. Crossing `q` has darts `4q + i` towards side `i`, in
    /// counterclockwise order; each unglued side gets an endpoint.
    pub fn dual_wallsystem(&self) -> Wallsystem {
        let m = self.square_count();
        let bsides = self.boundary_sides();
        let mut ep = vec![usize::MAX; 4 * m];
        for (k, &s) in bsides.iter().enumerate() {
            ep[s] = k;
        }
        let base = |k: usize| 4 * m + 3 * k;
        let n = 4 * m + 3 * bsides.len() + 2 * bsides.len();
        let mut alpha = vec![usize::MAX; n];
        let mut sigma = vec![usize::MAX; n];
        let mut sign = vec![1i8; n];
        let mut kind = vec![EdgeKind::Interior; n];
        for q in 0..m {
            for i in 0..4 {
                sigma[side(q, i)] = side(q, i + 1);
            }
        }
        for s in 0..4 * m {
            match self.partner[s] {
                Some((t, tw)) => {
                    alpha[s] = t;
                    sign[s] = if tw { -1 } else { 1 };
                }
                None => {
                    let b = base(ep[s]);
                    alpha[s] = b + 1;
                    alpha[b + 1] = s;
                    sigma[b] = b + 1;
                    sigma[b + 1] = b + 2;
                    sigma[b + 2] = b;
                }
            }
        }
        // Boundary edges: pair the ends of unglued sides meeting at a boundary vertex.
        let mut next_edge = 4 * m + 3 * bsides.len();
        let mut done = vec![[false; 2]; 4 * m];
        for &s in &bsides {
            for end in 0..2 {
                if done[s][end] {
                    continue;
                }
                let (t, tend, rel) = self.link_walk(s, end);
                done[s][end] = true;
                done[t][tend] = true;
                let dart_of = |x: usize, e: usize| if e == 1 { base(ep[x]) } else { base(ep[x]) + 2 };
                let (a, b) = (dart_of(s, end), dart_of(t, tend));
                let (ea, eb) = (next_edge, next_edge + 1);
                next_edge += 2;
                // The boundary edge replaces the endpoint dart by a real edge.
                alpha[ea] = eb;
                alpha[eb] = ea;
                sign[ea] = rel;
                sign[eb] = rel;
                kind[ea] = EdgeKind::Boundary;
                kind[eb] = EdgeKind::Boundary;
                subst(&mut sigma, a, ea);
                subst(&mut sigma, b, eb);
            }
        }
        // Endpoint slots fwd/back were placeholders; drop them.
        let mut keep = vec![true; n];
        for &s in &bsides {
            keep[base(ep[s])] = false;
            keep[base(ep[s]) + 2] = false;
        }
        let mut id = vec![usize::MAX; n];
        let mut k = 0;
        for d in 0..n {
            if keep[d] {
                id[d] = k;
                k += 1;
            }
        }
        let pick = |v: &Vec<usize>| (0..n).filter(|&d| keep[d]).map(|d| id[v[d]]).collect::<Vec<_>>();
        let alpha2 = pick(&alpha);
        let sigma2 = pick(&sigma);
        let sign2 = (0..n).filter(|&d| keep[d]).map(|d| sign[d]).collect();
        let kind2 = (0..n).filter(|&d| keep[d]).map(|d| kind[d]).collect();
        let map = SurfaceMap::new(alpha2, sigma2, sign2, kind2).expect("dual wallsystem is a valid map");
        Wallsystem::new(map).expect("dual map is a wallsystem")
    }

    /// From end `end` (0 start, 1 end) of unglued side `s`, walks around the corner vertex
    /// to the other unglued side end there. Returns it with the frame agreement.
    fn link_walk(&self, s: usize, end: usize) -> (usize, usize, i8) {
        let (mut q, mut k) = (s / 4, (s % 4 + end) % 4);
        let mut came = s;
        let mut rel = 1i8;
        for _ in 0..=self.partner.len() {
            // Corner k of q lies between side k−1 (its end) and side k (its start).
            let b = if came == side(q, k) { side(q, k + 3) } else { side(q, k) };
            let at_start = b == side(q, k);
            match self.partner[b] {
                None => return (b, if at_start { 0 } else { 1 }, rel),
                Some((t, tw)) => {
                    let (p, j) = (t / 4, t % 4);
                    let nk = if tw == at_start { j } else { j + 1 };
                    if tw {
                        rel = -rel;
                    }
                    q = p;
                    k = nk % 4;
                    came = t;
                }
            }
        }
        unreachable!("vertex link is a path at boundary vertices")
    }

    /// Quarters every square along its walls and inserts one eye per open wall.
    ///
    /// Square `4q + i` is the quarter of `q` at corner `i`; eyes come after them.
    pub fn subdivide_with_eyes(&self) -> Result<SquareCelledSurface, SquareError> {
        if !self.is_isometric_filling()? {
            return Err(SquareError::NotIsometric);
        }
        let m = self.square_count();
        let walls = self.walls();
        let open: Vec<&SquareWall> = walls.iter().filter(|w| !w.closed).collect();
        let total = 4 * m + open.len();
        let mut p: Vec<Option<(usize, bool)>> = vec![None; 4 * total];
        let glue = |p: &mut Vec<Option<(usize, bool)>>, a: usize, b: usize, tw: bool| {
            p[a] = Some((b, tw));
            p[b] = Some((a, tw));
        };
        // Quarter sides: 0 corner→mid(i), 1 mid(i)→centre, 2 centre→mid(i−1), 3 mid(i−1)→corner.
        let sub = |q: usize, i: usize| 4 * q + i % 4;
        let first_half = |s: usize| side(sub(s / 4, s % 4), 0);
        let second_half = |s: usize| side(sub(s / 4, s % 4 + 1), 3);
        for q in 0..m {
            for i in 0..4 {
                glue(&mut p, side(sub(q, i), 1), side(sub(q, i + 1), 2), false);
            }
        }
        for s in 0..4 * m {
            if let Some((t, tw)) = self.partner[s] {
                if s > t {
                    continue;
                }
                if tw {
                    glue(&mut p, first_half(s), first_half(t), true);
                    glue(&mut p, second_half(s), second_half(t), true);
                } else {
                    glue(&mut p, first_half(s), second_half(t), false);
                    glue(&mut p, second_half(s), first_half(t), false);
                }
            }
        }
        for (k, w) in open.iter().enumerate() {
            let eye = 4 * m + k;
            let crossed = w.sides[1..w.sides.len() - 1].first().copied();
            match crossed {
                Some(s) => {
                    let (t, tw) = self.partner[s].unwrap();
                    for h in [first_half(s), second_half(s), first_half(t), second_half(t)] {
                        p[h] = None;
                    }
                    glue(&mut p, side(eye, 3), first_half(s), false);
                    glue(&mut p, side(eye, 2), second_half(s), false);
                    if tw {
                        glue(&mut p, side(eye, 0), first_half(t), true);
                        glue(&mut p, side(eye, 1), second_half(t), true);
                    } else {
                        glue(&mut p, side(eye, 1), first_half(t), false);
                        glue(&mut p, side(eye, 0), second_half(t), false);
                    }
                }
                None => {
                    // The wall crosses no glued side: attach the eye along its first boundary side.
                    let s = w.sides[0];
                    glue(&mut p, side(eye, 3), first_half(s), false);
                    glue(&mut p, side(eye, 2), second_half(s), false);
                }
            }
        }
        SquareCelledSurface::from_partners(p)
    }
}

fn subst(sigma: &mut [Dart], old: Dart, new: Dart) {
    let pred = (0..sigma.len()).find(|&d| sigma[d] == old).expect("dart in a rotation");
    sigma[pred] = new;
    sigma[new] = sigma[old];
    sigma[old] = old;
}

/// Small named surfaces shared by tests and the command-line fixture set.
pub mod fixtures {
    use super::*;

    pub fn one_square() -> SquareCelledSurface {
        SquareCelledSurface::from_partners(vec![None; 4]).unwrap()
    }

    /// Three squares around an inner vertex; boundary C₆.
    pub fn hexagon() -> SquareCelledSurface {
        let mut p = vec![None; 12];
        for q in 0..3 {
            let (s, t) = (side(q, 3), side((q + 1) % 3, 0));
            p[s] = Some((t, false));
            p[t] = Some((s, false));
        }
        SquareCelledSurface::from_partners(p).unwrap()
    }

    /// Squares in a row, side 1 of square i glued to side 3 of square i+1.
    pub fn strip(k: usize) -> SquareCelledSurface {
        let mut p = vec![None; 4 * k];
        for i in 0..k.saturating_sub(1) {
            p[side(i, 1)] = Some((side(i + 1, 3), false));
            p[side(i + 1, 3)] = Some((side(i, 1), false));
        }
        SquareCelledSurface::from_partners(p).unwrap()
    }

    /// `k` squares in a row with the last glued back to the first by a half twist.
    pub fn moebius(k: usize) -> SquareCelledSurface {
        let mut p = vec![None; 4 * k];
        for i in 0..k.saturating_sub(1) {
            p[side(i, 1)] = Some((side(i + 1, 3), false));
            p[side(i + 1, 3)] = Some((side(i, 1), false));
        }
        p[side(k - 1, 1)] = Some((side(0, 3), true));
        p[side(0, 3)] = Some((side(k - 1, 1), true));
        SquareCelledSurface::from_partners(p).unwrap()
    }

    pub fn torus() -> SquareCelledSurface {
        SquareCelledSurface::from_partners(vec![Some((2, false)), Some((3, false)), Some((0, false)), Some((1, false))])
            .unwrap()
    }
}
