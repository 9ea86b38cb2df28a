//! Fine surfaces: triangles whose vertices are totally ordered, with the directed
//! metric that charges 1 for walking an edge forward and 0 backward.
//!
//! Triangle `t` lists its corners in fine order `v0 < v1 < v2`. Side `3t + k` joins
//! `v_k` and `v_{k+1}` (indices mod 3), so side 2 is the long edge `v0 → v2`. Glued
//! sides identify tail with tail and head with head.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{IntegralPolygon, Vec2};
use crate::wallsystem::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FineError {
    #[error("malformed fine surface json: {0}")]
    Json(String),
    #[error("invalid fine surface: {0}")]
    Invalid(String),
    #[error("degenerate fine metric: {0}")]
    Degenerate(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("vertex {1} is unreachable from {0}")]
    Disconnected(usize, usize),
    #[error("surface is not a disk")]
    NotDisk,
    #[error("disk is not tight")]
    NotTight,
    #[error("vertex {0} is not on the boundary")]
    NotOnBoundary(usize),
    #[error("boundary function is not short from {0} to {1}")]
    NotShort(usize, usize),
    #[error("not a calibration: {0}")]
    NotCalibration(String),
    #[error("surface is not orientable")]
    NotOrientable,
    #[error("not a periodic fine torus: {0}")]
    NotTorus(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("surface does not fill its boundary isometrically")]
    NotIsometric,
    #[error("disk of area {area} fills C({a},{b}) below the bound {bound}")]
    FacViolation { a: usize, b: usize, area: usize, bound: i64 },
}

/// Tail and head corner of side `k` in fine direction.
pub fn fine_ends(k: usize) -> (usize, usize) {
    match k {
        0 => (0, 1),
        1 => (1, 2),
        _ => (0, 2),
    }
}

/// +1 when the fine direction of side `k` follows the corner cycle `v0 → v1 → v2`.
fn beta(k: usize) -> i8 {
    if k == 2 {
        -1
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineJson {
    pub triangles: Vec<[usize; 3]>,
    #[serde(default)]
    pub gluings: Vec<[usize; 2]>,
    /// Period vectors of a torus, as rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<[Vec2; 2]>,
    /// Per triangle and corner, the lattice offset of the corner's lift in period coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifts: Option<Vec<[Vec2; 3]>>,
}

/// A graph whose edges all have size one, oriented tail → head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FineGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl FineGraph {
    /// 0/1 breadth-first distances from `x`; `None` marks unreachable vertices.
    pub fn distances_from(&self, x: usize) -> Vec<Option<usize>> {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push((b, 1));
            adj[b].push((a, 0));
        }
        zero_one_bfs(&adj, x)
    }

    /// True when no two distinct vertices are at distance 0 from each other.
    pub fn is_nondegenerate(&self) -> bool {
        let mut indeg = vec![0usize; self.n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            if a == b {
                return false;
            }
            out[a].push(b);
            indeg[b] += 1;
        }
        let mut q: VecDeque<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = q.pop_front() {
            seen += 1;
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    q.push_back(w);
                }
            }
        }
        seen == self.n
    }

    /// Triples `(x, x', y)` with `{x, x'}` an edge where the fine alternative fails:
    /// exactly one of `d(x,x')+d(x',y) = d(x,y)` and `d(x',x)+d(x,y) = d(x',y)` must hold.
    pub fn alternative_failures(&self) -> Vec<(usize, usize, usize)> {
        let d: Vec<Vec<Option<usize>>> = (0..self.n).map(|x| self.distances_from(x)).collect();
        let mut bad = Vec::new();
        for &(p, q) in &self.edges {
            for (x, x2) in [(p, q), (q, p)] {
                for y in 0..self.n {
                    let (Some(a), Some(b), Some(c)) = (d[x][x2], d[x2][y], d[x][y]) else { continue };
                    let (Some(e), Some(f), Some(g)) = (d[x2][x], d[x][y], d[x2][y]) else { continue };
                    if (a + b == c) == (e + f == g) {
                        bad.push((x, x2, y));
                    }
                }
            }
        }
        bad
    }

    /// A random connected nondegenerate fine graph.
    pub fn random<R: Rng>(n: usize, p: f64, rng: &mut R) -> FineGraph {
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut edges = Vec::new();
        for i in 1..n {
            let j = rng.gen_range(0..i);
            edges.push((order[j], order[i]));
        }
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    edges.push((order[i], order[j]));
                }
            }
        }
        FineGraph { n, edges }
    }
}

fn zero_one_bfs(adj: &[Vec<(usize, usize)>], x: usize) -> Vec<Option<usize>> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[x] = 0;
    let mut dq = VecDeque::from([x]);
    while let Some(a) = dq.pop_front() {
        for &(b, w) in &adj[a] {
            let nd = dist[a] + w;
            if nd < dist[b] {
                dist[b] = nd;
                if w == 0 {
                    dq.push_front(b);
                } else {
                    dq.push_back(b);
                }
            }
        }
    }
    dist.into_iter().map(|d| (d != usize::MAX).then_some(d)).collect()
}

/// A maximal curve following the rules of the road. Segment `(t, k)` runs inside
/// triangle `t` from the midpoint of side `k` to the midpoint of side `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strand {
    pub closed: bool,
    pub segments: Vec<(usize, usize)>,
}

impl Strand {
    /// First and last side for an open strand.
    pub fn ends(&self) -> Option<(usize, usize)> {
        if self.closed {
            return None;
        }
        let &(t0, k0) = self.segments.first()?;
        let &(t1, k1) = self.segments.last()?;
        Some((3 * t0 + k0, 3 * t1 + (k1 + 1) % 3))
    }
}

/// Two strand passages through the midpoint of an interior edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub edge: usize,
    /// `(strand, index of the segment before the midpoint)` for both passages.
    pub a: (usize, usize),
    pub b: (usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlabicColor {
    Black,
    White,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlabicEnd {
    Vertex(usize),
    Boundary(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlabicEdge {
    pub fine_edge: usize,
    pub from: PlabicEnd,
    pub to: PlabicEnd,
}

/// Trivalent bicolored graph dual to an oriented fine surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlabicGraph {
    pub colors: Vec<PlabicColor>,
    pub edges: Vec<PlabicEdge>,
}

impl PlabicGraph {
    /// Every vertex is trivalent; black ones have out-degree 2, white ones in-degree 2.
    pub fn is_perfectly_oriented(&self) -> bool {
        let n = self.colors.len();
        let (mut din, mut dout) = (vec![0; n], vec![0; n]);
        for e in &self.edges {
            if let PlabicEnd::Vertex(v) = e.from {
                dout[v] += 1;
            }
            if let PlabicEnd::Vertex(v) = e.to {
                din[v] += 1;
            }
        }
        (0..n).all(|v| match self.colors[v] {
            PlabicColor::Black => dout[v] == 2 && din[v] == 1,
            PlabicColor::White => dout[v] == 1 && din[v] == 2,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusReport {
    pub triangles: usize,
    pub expected_triangles: i64,
    pub checked_pairs: usize,
    /// `(vertex, v, distance found, support norm)` for every mismatch.
    pub failures: Vec<(usize, Vec2, usize, i64)>,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacVerdict {
    pub a: usize,
    pub b: usize,
    pub area: usize,
    pub bound: i64,
    pub disk: bool,
    pub meets_bound: bool,
}

/// A reoriented surface and, per new side, the side it came from.
#[derive(Clone, Debug)]
pub struct Reoriented {
    pub surface: FineSurface,
    pub old_side: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct FineSurface {
    tri: Vec<[usize; 3]>,
    partner: Vec<Option<usize>>,
    nv: usize,
    edge_of: Vec<usize>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
    periods: Option<[Vec2; 2]>,
    lifts: Option<Vec<[Vec2; 3]>>,
}

impl FineSurface {
    pub fn new(
        triangles: Vec<[usize; 3]>,
        gluings: &[[usize; 2]],
        periods: Option<[Vec2; 2]>,
        lifts: Option<Vec<[Vec2; 3]>>,
    ) -> Result<Self, FineError> {
        let nt = triangles.len();
        if nt == 0 {
            return Err(FineError::Invalid("no triangles".into()));
        }
        let ns = 3 * nt;
        let mut partner = vec![None; ns];
        for &[a, b] in gluings {
            if a >= ns || b >= ns {
                return Err(FineError::Invalid(format!("side {} out of range", a.max(b))));
            }
            if a == b || partner[a].is_some() || partner[b].is_some() {
                return Err(FineError::Invalid(format!("side {a} or {b} glued twice")));
            }
            partner[a] = Some(b);
            partner[b] = Some(a);
        }
        // Corners are identified tail with tail and head with head.
        let mut uf = UnionFind::new(ns);
        for s in 0..ns {
            if let Some(t) = partner[s] {
                let ((ta, ha), (tb, hb)) = (fine_ends(s % 3), fine_ends(t % 3));
                uf.union(3 * (s / 3) + ta, 3 * (t / 3) + tb);
                uf.union(3 * (s / 3) + ha, 3 * (t / 3) + hb);
            }
        }
        let nv = triangles.iter().flatten().copied().max().unwrap() + 1;
        let mut class_label: BTreeMap<usize, usize> = BTreeMap::new();
        let mut label_class: Vec<Option<usize>> = vec![None; nv];
        for c in 0..ns {
            let (root, label) = (uf.find(c), triangles[c / 3][c % 3]);
            if *class_label.entry(root).or_insert(label) != label {
                return Err(FineError::Invalid(format!("gluings identify vertices {} and {label}", class_label[&root])));
            }
            match label_class[label] {
                None => label_class[label] = Some(root),
                Some(r) if r != root => {
                    return Err(FineError::Invalid(format!("vertex {label} is pinched or its corners are not glued together")))
                }
                _ => {}
            }
        }
        if let Some(v) = label_class.iter().position(|c| c.is_none()) {
            return Err(FineError::Invalid(format!("vertex label {v} is unused")));
        }
        let mut edge_of = vec![usize::MAX; ns];
        let mut edges = Vec::new();
        for s in 0..ns {
            if edge_of[s] != usize::MAX {
                continue;
            }
            let (ta, ha) = fine_ends(s % 3);
            let tr = triangles[s / 3];
            edge_of[s] = edges.len();
            if let Some(t) = partner[s] {
                edge_of[t] = edges.len();
            }
            edges.push((tr[ta], tr[ha]));
        }
        if periods.is_some() != lifts.is_some() {
            return Err(FineError::Invalid("periods and lifts come together".into()));
        }
        if let (Some(p), Some(l)) = (&periods, &lifts) {
            if (p[0][0] * p[1][1] - p[0][1] * p[1][0]).abs() != 1 {
                return Err(FineError::Invalid("periods must span the integer lattice".into()));
            }
            if l.len() != nt {
                return Err(FineError::Invalid("one lift triple per triangle".into()));
            }
            for s in 0..ns {
                if let Some(t) = partner[s] {
                    let ((ta, ha), (tb, hb)) = (fine_ends(s % 3), fine_ends(t % 3));
                    let d1 = sub(l[s / 3][ta], l[t / 3][tb]);
                    let d2 = sub(l[s / 3][ha], l[t / 3][hb]);
                    if d1 != d2 {
                        return Err(FineError::Invalid(format!("lifts disagree across sides {s} and {t}")));
                    }
                }
            }
        } else {
            let g = FineGraph { n: nv, edges: edges.clone() };
            if !g.is_nondegenerate() {
                return Err(FineError::Degenerate("edge orientation has a directed cycle".into()));
            }
        }
        let mut adj = vec![Vec::new(); nv];
        for &(a, b) in &edges {
            adj[a].push((b, 1));
            adj[b].push((a, 0));
        }
        Ok(FineSurface { tri: triangles, partner, nv, edge_of, edges, adj, periods, lifts })
    }

    /// Glues every pair of sides with the same two endpoints.
    pub fn from_triangles(triangles: Vec<[usize; 3]>) -> Result<Self, FineError> {
        let mut by_ends: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, tr) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = fine_ends(k);
                by_ends.entry((tr[a], tr[b])).or_default().push(3 * t + k);
            }
        }
        let mut gluings = Vec::new();
        for (ends, sides) in by_ends {
            match sides.len() {
                1 => {}
                2 => gluings.push([sides[0], sides[1]]),
                _ => return Err(FineError::Invalid(format!("edge {ends:?} lies on {} triangles", sides.len()))),
            }
        }
        FineSurface::new(triangles, &gluings, None, None)
    }

    pub fn from_json(text: &str) -> Result<Self, FineError> {
        let j: FineJson = serde_json::from_str(text).map_err(|e| FineError::Json(e.to_string()))?;
        FineSurface::from_fine_json(&j)
    }

    pub fn from_fine_json(j: &FineJson) -> Result<Self, FineError> {
        if j.triangles.iter().flatten().any(|&v| v > 1 << 24) {
            return Err(FineError::Json("vertex labels must stay below 2^24".into()));
        }
        FineSurface::new(j.triangles.clone(), &j.gluings, j.periods, j.lifts.clone())
    }

    pub fn to_fine_json(&self) -> FineJson {
        let gluings = (0..self.partner.len()).filter_map(|s| self.partner[s].filter(|&t| s < t).map(|t| [s, t])).collect();
        FineJson { triangles: self.tri.clone(), gluings, periods: self.periods, lifts: self.lifts.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_fine_json()).expect("plain data")
    }

    pub fn triangle_count(&self) -> usize {
        self.tri.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.nv
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.tri
    }

    pub fn partner(&self, s: usize) -> Option<usize> {
        self.partner[s]
    }

    /// Edges as `(tail, head)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_of_side(&self, s: usize) -> usize {
        self.edge_of[s]
    }

    pub fn graph(&self) -> FineGraph {
        FineGraph { n: self.nv, edges: self.edges.clone() }
    }

    pub fn distances_from(&self, x: usize) -> Result<Vec<Option<usize>>, FineError> {
        if x >= self.nv {
            return Err(FineError::UnknownVertex(x));
        }
        Ok(zero_one_bfs(&self.adj, x))
    }

    /// Fewest forward edges on a skeleton path from `x` to `y`.
    pub fn fine_distance(&self, x: usize, y: usize) -> Result<usize, FineError> {
        if y >= self.nv {
            return Err(FineError::UnknownVertex(y));
        }
        self.distances_from(x)?[y].ok_or(FineError::Disconnected(x, y))
    }

    /// Per-triangle orientation signs (+1: the corner cycle `v0 v1 v2` is positive).
    pub fn orientation(&self) -> Option<Vec<i8>> {
        let nt = self.tri.len();
        let mut eps = vec![0i8; nt];
        for root in 0..nt {
            if eps[root] != 0 {
                continue;
            }
            eps[root] = 1;
            let mut q = VecDeque::from([root]);
            while let Some(t) = q.pop_front() {
                for k in 0..3 {
                    let Some(o) = self.partner[3 * t + k] else { continue };
                    let want = -eps[t] * beta(k) * beta(o % 3);
                    let u = o / 3;
                    if eps[u] == 0 {
                        eps[u] = want;
                        q.push_back(u);
                    } else if eps[u] != want {
                        return None;
                    }
                }
            }
        }
        Some(eps)
    }

    fn boundary_sides(&self) -> Vec<usize> {
        (0..self.partner.len()).filter(|&s| self.partner[s].is_none()).collect()
    }

    /// Boundary cycles as `(side, from, to)` steps.
    fn boundary_cycles(&self) -> Vec<Vec<(usize, usize, usize)>> {
        let eps = self.orientation();
        let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let ends = |s: usize| {
            let tr = self.tri[s / 3];
            let (a, b) = (tr[s % 3], tr[(s % 3 + 1) % 3]);
            match &eps {
                Some(e) if e[s / 3] < 0 => (b, a),
                _ => (a, b),
            }
        };
        for s in self.boundary_sides() {
            let (a, b) = ends(s);
            at.entry(a).or_default().push(s);
            at.entry(b).or_default().push(s);
        }
        let mut used = vec![false; self.partner.len()];
        let mut out = Vec::new();
        for s0 in self.boundary_sides() {
            if used[s0] {
                continue;
            }
            let mut cyc = Vec::new();
            let (mut s, mut from) = (s0, ends(s0).0);
            loop {
                used[s] = true;
                let (a, b) = ends(s);
                let to = if a == from { b } else { a };
                cyc.push((s, from, to));
                match at[&to].iter().copied().find(|&x| !used[x]) {
                    Some(n) => {
                        s = n;
                        from = to;
                    }
                    None => break,
                }
            }
            out.push(cyc);
        }
        out
    }

    fn connected(&self) -> bool {
        self.distances_from(0).map(|d| d.iter().all(|x| x.is_some())).unwrap_or(false)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.nv as i64 - self.edges.len() as i64 + self.tri.len() as i64
    }

    pub fn is_disk(&self) -> bool {
        self.euler_characteristic() == 1 && self.boundary_cycles().len() == 1 && self.connected()
    }

    pub fn is_closed_torus(&self) -> bool {
        self.euler_characteristic() == 0 && self.boundary_sides().is_empty() && self.orientation().is_some()
    }

    /// The boundary cycle of a disk as `(side, from, to)` steps in positive direction.
    pub fn boundary_cycle(&self) -> Result<Vec<(usize, usize, usize)>, FineError> {
        if !self.is_disk() {
            return Err(FineError::NotDisk);
        }
        Ok(self.boundary_cycles().pop().unwrap())
    }

    /// Forward edge counts `(a, b)` along the boundary in both directions, `a ≤ b`.
    pub fn boundary_lengths(&self) -> Result<(usize, usize), FineError> {
        let cyc = self.boundary_cycle()?;
        let fwd = cyc.iter().filter(|&&(s, from, _)| self.edges[self.edge_of[s]].0 == from).count();
        let (a, b) = (fwd, cyc.len() - fwd);
        Ok((a.min(b), a.max(b)))
    }

    pub fn is_isometric_filling(&self) -> Result<bool, FineError> {
        let cyc = self.boundary_cycle()?;
        let l = cyc.len();
        // Cost of walking the cycle forward from step i through step j − 1, and backward.
        let cost = |s: usize, from: usize| usize::from(self.edges[self.edge_of[s]].0 == from);
        for i in 0..l {
            let dist = self.distances_from(cyc[i].1)?;
            let mut along = 0;
            let mut around = vec![0usize; l];
            for k in 1..l {
                let (s, from, _) = cyc[(i + k - 1) % l];
                along += cost(s, from);
                around[k] = along;
            }
            let mut back = 0;
            for k in 1..l {
                let (s, _, to) = cyc[(i + l - k) % l];
                back += cost(s, to);
                let j = (i + l - k) % l;
                let dc = around[l - k].min(back);
                if dist[cyc[j].1] != Some(dc) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn strands(&self) -> Vec<Strand> {
        let nt = self.tri.len();
        let mut used = vec![[false; 3]; nt];
        let next = |(t, k): (usize, usize)| self.partner[3 * t + (k + 1) % 3].map(|p| (p / 3, p % 3));
        let mut out = Vec::new();
        let follow = |start: (usize, usize), used: &mut Vec<[bool; 3]>| {
            let mut segs = Vec::new();
            let mut cur = start;
            loop {
                used[cur.0][cur.1] = true;
                segs.push(cur);
                match next(cur) {
                    Some(n) if n == start => return Strand { closed: true, segments: segs },
                    Some(n) => cur = n,
                    None => return Strand { closed: false, segments: segs },
                }
            }
        };
        for t in 0..nt {
            for k in 0..3 {
                if self.partner[3 * t + k].is_none() {
                    out.push(follow((t, k), &mut used));
                }
            }
        }
        for t in 0..nt {
            for k in 0..3 {
                if !used[t][k] {
                    out.push(follow((t, k), &mut used));
                }
            }
        }
        out
    }

    /// Topological crossings of strands. Passages through an edge between triangles of
    /// the same color are tangencies and are not reported.
    pub fn crossings(&self, strands: &[Strand]) -> Vec<Crossing> {
        let mut where_seg = BTreeMap::new();
        for (i, st) in strands.iter().enumerate() {
            for (j, &seg) in st.segments.iter().enumerate() {
                where_seg.insert(seg, (i, j));
            }
        }
        let mut out = Vec::new();
        for s in 0..self.partner.len() {
            let Some(t) = self.partner[s] else { continue };
            if s > t || beta(s % 3) * beta(t % 3) < 0 {
                continue;
            }
            // The segment ending at side s lies in s's triangle and started at side s − 1.
            let into = |x: usize| (x / 3, (x % 3 + 2) % 3);
            out.push(Crossing { edge: self.edge_of[s], a: where_seg[&into(s)], b: where_seg[&into(t)] });
        }
        out
    }

    /// Strands form a directed pseudoline arrangement: no closed strands, no
    /// self-crossings, and no two strands meeting twice in the same order along both.
    pub fn is_tight(&self) -> Result<bool, FineError> {
        if !self.is_disk() {
            return Err(FineError::NotDisk);
        }
        let strands = self.strands();
        if strands.iter().any(|s| s.closed) {
            return Ok(false);
        }
        let mut pairs: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for c in self.crossings(&strands) {
            if c.a.0 == c.b.0 {
                return Ok(false);
            }
            let (x, y) = if c.a.0 < c.b.0 { (c.a, c.b) } else { (c.b, c.a) };
            pairs.entry((x.0, y.0)).or_default().push((x.1, y.1));
        }
        for mut v in pairs.into_values() {
            v.sort();
            if v.windows(2).any(|w| w[0].1 < w[1].1) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Len(γ) − n` for the boundary path γ from `x` to `y` in positive direction, where
    /// `n` counts the strands running from an edge of γ to a later edge of γ.
    pub fn tight_boundary_distance(&self, x: usize, y: usize) -> Result<usize, FineError> {
        self.tight_boundary_distance_along(x, y, true)
    }

    /// As above, walking the boundary in positive (`true`) or negative direction.
    pub fn tight_boundary_distance_along(&self, x: usize, y: usize, positive: bool) -> Result<usize, FineError> {
        if !self.is_tight()? {
            return Err(FineError::NotTight);
        }
        let mut cyc = self.boundary_cycle()?;
        if !positive {
            cyc = cyc.into_iter().rev().map(|(s, a, b)| (s, b, a)).collect();
        }
        let start = cyc.iter().position(|st| st.1 == x).ok_or(FineError::NotOnBoundary(x))?;
        if !cyc.iter().any(|st| st.1 == y) {
            return Err(FineError::NotOnBoundary(y));
        }
        let mut path = Vec::new();
        let mut i = start;
        while cyc[i].1 != y {
            path.push(cyc[i]);
            i = (i + 1) % cyc.len();
        }
        let len = path.iter().filter(|&&(s, from, _)| self.edges[self.edge_of[s]].0 == from).count();
        let index: BTreeMap<usize, usize> = path.iter().enumerate().map(|(i, st)| (st.0, i)).collect();
        let n = self
            .strands()
            .iter()
            .filter_map(|st| st.ends())
            .filter(|(a, b)| matches!((index.get(a), index.get(b)), (Some(i), Some(j)) if i < j))
            .count();
        Ok(len - n)
    }

    /// Least short extension `h(x) = max_{y∈C} h_C(y) − d(x, y)` of a boundary function.
    pub fn whitney_extend(&self, h_c: &BTreeMap<usize, i64>) -> Result<Vec<i64>, FineError> {
        let on_boundary: Vec<usize> = self.boundary_sides().iter().flat_map(|&s| {
            let tr = self.tri[s / 3];
            [tr[s % 3], tr[(s % 3 + 1) % 3]]
        }).collect();
        for &v in h_c.keys() {
            if v >= self.nv {
                return Err(FineError::UnknownVertex(v));
            }
            if !on_boundary.contains(&v) {
                return Err(FineError::NotOnBoundary(v));
            }
        }
        // d(x, y) from every vertex x to each boundary point y: search the reversed graph.
        let mut radj = vec![Vec::new(); self.nv];
        for &(a, b) in &self.edges {
            radj[b].push((a, 1));
            radj[a].push((b, 0));
        }
        let mut h = vec![i64::MIN; self.nv];
        for (&y, &hy) in h_c {
            let to_y = zero_one_bfs(&radj, y);
            for (x, d) in to_y.iter().enumerate() {
                let d = d.ok_or(FineError::Disconnected(x, y))? as i64;
                h[x] = h[x].max(hy - d);
            }
        }
        for (&x, &hx) in h_c {
            if h[x] != hx {
                let y = h_c.keys().copied().find(|&y| h_c[&y] - self.fine_distance(x, y).unwrap_or(0) as i64 > hx).unwrap_or(x);
                return Err(FineError::NotShort(x, y));
            }
        }
        Ok(h)
    }

    /// Subtracts a calibration given as its value on each edge in fine direction.
    pub fn reorient(&self, theta: &[i64]) -> Result<Reoriented, FineError> {
        if theta.len() != self.edges.len() {
            return Err(FineError::NotCalibration(format!("{} values for {} edges", theta.len(), self.edges.len())));
        }
        if let Some(e) = theta.iter().position(|&v| !(0..=1).contains(&v)) {
            return Err(FineError::NotCalibration(format!("value {} on edge {e} exceeds the metric", theta[e])));
        }
        let nt = self.tri.len();
        let mut shift = vec![0usize; nt];
        for t in 0..nt {
            let th = |k: usize| theta[self.edge_of[3 * t + k]];
            if th(0) + th(1) != th(2) {
                return Err(FineError::NotCalibration(format!("not closed on triangle {t}")));
            }
            shift[t] = match (th(0), th(1)) {
                (0, 0) => 0,
                (1, 0) => 1,
                _ => 2,
            };
        }
        let tris = (0..nt).map(|t| {
            let r = shift[t];
            [self.tri[t][r], self.tri[t][(r + 1) % 3], self.tri[t][(r + 2) % 3]]
        });
        let old_side: Vec<usize> = (0..3 * nt).map(|s| 3 * (s / 3) + (s % 3 + shift[s / 3]) % 3).collect();
        let mut new_side = vec![0; 3 * nt];
        for (n, &o) in old_side.iter().enumerate() {
            new_side[o] = n;
        }
        let gluings: Vec<[usize; 2]> = (0..3 * nt)
            .filter_map(|s| self.partner[s].filter(|&t| s < t).map(|t| [new_side[s], new_side[t]]))
            .collect();
        let lifts = self.lifts.as_ref().map(|l| {
            (0..nt).map(|t| {
                let r = shift[t];
                [l[t][r], l[t][(r + 1) % 3], l[t][(r + 2) % 3]]
            }).collect()
        });
        let surface = FineSurface::new(tris.collect(), &gluings, self.periods, lifts)?;
        Ok(Reoriented { surface, old_side })
    }

    /// One colored vertex per triangle; each fine edge becomes a dual edge leaving the
    /// triangle on its left.
    pub fn dual_plabic(&self) -> Result<PlabicGraph, FineError> {
        let eps = self.orientation().ok_or(FineError::NotOrientable)?;
        self.dual_plabic_with(&eps)
    }

    /// The same with every triangle's orientation flipped.
    pub fn dual_plabic_reversed(&self) -> Result<PlabicGraph, FineError> {
        let eps: Vec<i8> = self.orientation().ok_or(FineError::NotOrientable)?.iter().map(|e| -e).collect();
        self.dual_plabic_with(&eps)
    }

    fn dual_plabic_with(&self, eps: &[i8]) -> Result<PlabicGraph, FineError> {
        let colors = eps.iter().map(|&e| if e > 0 { PlabicColor::Black } else { PlabicColor::White }).collect();
        let mut edges = Vec::new();
        for s in 0..self.partner.len() {
            let left = eps[s / 3] * beta(s % 3) > 0;
            let me = PlabicEnd::Vertex(s / 3);
            let other = match self.partner[s] {
                Some(t) if t < s => continue,
                Some(t) => PlabicEnd::Vertex(t / 3),
                None => PlabicEnd::Boundary(self.edge_of[s]),
            };
            let (from, to) = if left { (me, other) } else { (other, me) };
            edges.push(PlabicEdge { fine_edge: self.edge_of[s], from, to });
        }
        Ok(PlabicGraph { colors, edges })
    }

    fn lattice_to_plane(&self, n: Vec2) -> Vec2 {
        let p = self.periods.expect("periodic surface");
        [n[0] * p[0][0] + n[1] * p[1][0], n[0] * p[0][1] + n[1] * p[1][1]]
    }

    fn plane_to_lattice(&self, v: Vec2) -> Vec2 {
        let p = self.periods.expect("periodic surface");
        let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
        [(v[0] * p[1][1] - v[1] * p[1][0]) * det, (p[0][0] * v[1] - p[0][1] * v[0]) * det]
    }

    /// Homotopy classes of the closed strands of a periodic torus, in plane coordinates.
    pub fn strand_classes(&self) -> Result<Vec<Vec2>, FineError> {
        let lifts = self.lifts.as_ref().ok_or_else(|| FineError::NotTorus("no lifts".into()))?;
        let mut out = Vec::new();
        for st in self.strands().iter().filter(|s| s.closed) {
            let mut total = [0, 0];
            for &(t, k) in &st.segments {
                let s = 3 * t + (k + 1) % 3;
                let o = self.partner[s].expect("closed strands only cross glued sides");
                let (a, b) = (fine_ends(s % 3).0, fine_ends(o % 3).0);
                total = add(total, sub(lifts[t][a], lifts[o / 3][b]));
            }
            out.push(self.lattice_to_plane(total));
        }
        Ok(out)
    }

    /// Checks the triangle count against `4·area(K)` and `d(x, x+v) = ‖v‖_K` on a window
    /// of the universal cover, for every vertex and every `|v|∞ ≤ bound`.
    pub fn verify_fine_torus(&self, k: &IntegralPolygon, bound: i64) -> Result<TorusReport, FineError> {
        let lifts = self.lifts.as_ref().ok_or_else(|| FineError::NotTorus("no lifts".into()))?;
        if !self.is_closed_torus() {
            return Err(FineError::NotTorus("not a closed orientable surface of Euler characteristic 0".into()));
        }
        let kv = k.vertices();
        if kv.len() < 3 {
            return Err(FineError::Precondition("K must be a nondegenerate polygon".into()));
        }
        let n = kv.len();
        if (0..n).any(|i| {
            let (a, b) = (kv[i], kv[(i + 1) % n]);
            (b[0] - a[0]) * (-a[1]) - (b[1] - a[1]) * (-a[0]) < 0
        }) {
            return Err(FineError::Precondition("K must contain the origin".into()));
        }
        let expected = 2 * k.double_area();
        // Offsets of v in lattice coordinates stay within `reach`; the window leaves room
        // for detours.
        let reach = [[bound, bound], [bound, -bound], [-bound, bound], [-bound, -bound]]
            .iter()
            .map(|&c| self.plane_to_lattice(c).iter().map(|x| x.abs()).max().unwrap())
            .max()
            .unwrap();
        let w = 3 * reach + 3;
        let side = (2 * w + 1) as usize;
        let id = |v: usize, c: Vec2| -> Option<usize> {
            if c[0].abs() > w || c[1].abs() > w {
                return None;
            }
            Some((v * side + (c[0] + w) as usize) * side + (c[1] + w) as usize)
        };
        let mut adj = vec![Vec::new(); self.nv * side * side];
        for (t, tr) in self.tri.iter().enumerate() {
            for kk in 0..3 {
                let (a, b) = fine_ends(kk);
                for x in -w..=w {
                    for y in -w..=w {
                        let (pa, pb) = (add([x, y], lifts[t][a]), add([x, y], lifts[t][b]));
                        if let (Some(i), Some(j)) = (id(tr[a], pa), id(tr[b], pb)) {
                            adj[i].push((j, 1));
                            adj[j].push((i, 0));
                        }
                    }
                }
            }
        }
        let mut failures = Vec::new();
        let mut checked = 0;
        for x in 0..self.nv {
            let dist = zero_one_bfs(&adj, id(x, [0, 0]).unwrap());
            for v0 in -bound..=bound {
                for v1 in -bound..=bound {
                    let u = self.plane_to_lattice([v0, v1]);
                    let want = k.support([v0, v1]);
                    let got = id(x, u).and_then(|i| dist[i]).unwrap_or(usize::MAX);
                    checked += 1;
                    if got as i64 != want {
                        failures.push((x, [v0, v1], got, want));
                    }
                }
            }
        }
        let pass = failures.is_empty() && self.tri.len() as i64 == expected;
        Ok(TorusReport { triangles: self.tri.len(), expected_triangles: expected, checked_pairs: checked, failures, pass })
    }

    /// Area of an isometric filling of `C(a, b)` against `2ab − a − b`.
    pub fn fine_fac_check(&self) -> Result<FacVerdict, FineError> {
        if !self.is_isometric_filling()? {
            return Err(FineError::NotIsometric);
        }
        let (a, b) = self.boundary_lengths()?;
        let bound = 2 * (a * b) as i64 - (a + b) as i64;
        let area = self.tri.len();
        let v = FacVerdict { a, b, area, bound, disk: true, meets_bound: area as i64 >= bound };
        if !v.meets_bound {
            return Err(FineError::FacViolation { a, b, area, bound });
        }
        Ok(v)
    }
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

/// Small fine surfaces for tests, examples and the command line.
pub mod fixtures {
    use super::*;

    pub fn triangle() -> FineSurface {
        FineSurface::from_triangles(vec![[0, 1, 2]]).unwrap()
    }

    /// Unit squares of `[x0, x1] × [y0, y1]`, each cut by its increasing diagonal, with
    /// coordinates increasing along every edge.
    pub fn lattice_patch(x0: i64, y0: i64, x1: i64, y1: i64) -> (FineSurface, BTreeMap<Vec2, usize>) {
        let mut cells = Vec::new();
        for x in x0..x1 {
            for y in y0..y1 {
                cells.push([x, y, 0]);
                cells.push([x, y, 1]);
            }
        }
        lattice_region(&cells).expect("rectangles are disks")
    }

    /// The lattice triangles `[x, y, 0] = (x,y),(x+1,y),(x+1,y+1)` and
    /// `[x, y, 1] = (x,y),(x,y+1),(x+1,y+1)` as one fine surface.
    pub fn lattice_region(cells: &[[i64; 3]]) -> Result<(FineSurface, BTreeMap<Vec2, usize>), FineError> {
        let mut ids: BTreeMap<Vec2, usize> = BTreeMap::new();
        let mut tris = Vec::new();
        for &[x, y, c] in cells {
            let pts = if c == 0 { [[x, y], [x + 1, y], [x + 1, y + 1]] } else { [[x, y], [x, y + 1], [x + 1, y + 1]] };
            let mut tr = [0; 3];
            for (i, p) in pts.iter().enumerate() {
                let n = ids.len();
                tr[i] = *ids.entry(*p).or_insert(n);
            }
            tris.push(tr);
        }
        Ok((FineSurface::from_triangles(tris)?, ids))
    }

    /// A random disk of lattice triangles grown from one triangle.
    pub fn random_lattice_disk<R: Rng>(size: usize, rng: &mut R) -> FineSurface {
        let mut cells = vec![[0, 0, 0]];
        let mut guard = 0;
        while cells.len() < size && guard < 50 * size {
            guard += 1;
            let [x, y, c] = cells[rng.gen_range(0..cells.len())];
            // Neighbours across the three sides.
            let nb = if c == 0 { [[x, y - 1, 1], [x + 1, y, 1], [x, y, 1]] } else { [[x - 1, y, 0], [x, y + 1, 0], [x, y, 0]] };
            let cand = nb[rng.gen_range(0..3)];
            if cells.contains(&cand) {
                continue;
            }
            cells.push(cand);
            match lattice_region(&cells) {
                Ok((s, _)) if s.is_disk() => {}
                _ => {
                    cells.pop();
                }
            }
        }
        lattice_region(&cells).unwrap().0
    }

    /// Three triangles around an interior source; two strands meet twice in the same order.
    pub fn pinwheel() -> FineSurface {
        FineSurface::from_triangles(vec![[3, 0, 1], [3, 2, 1], [3, 0, 2]]).unwrap()
    }

    /// The standard triangle's torus: one vertex, the unit square cut by its increasing
    /// diagonal.
    pub fn standard_torus() -> FineSurface {
        let tris = vec![[0, 0, 0], [0, 0, 0]];
        // Lower triangle (0,0),(1,0),(1,1); upper (0,0),(0,1),(1,1).
        let lifts = vec![[[0, 0], [1, 0], [1, 1]], [[0, 0], [0, 1], [1, 1]]];
        let gluings = [[2, 5], [0, 4], [1, 3]];
        FineSurface::new(tris, &gluings, Some([[1, 0], [0, 1]]), Some(lifts)).unwrap()
    }

    /// `Conv{(0,0),(1,0),(0,1)}`.
    pub fn standard_triangle() -> IntegralPolygon {
        IntegralPolygon::new(vec![[0, 0], [1, 0], [0, 1]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distances_in_one_triangle() {
        let t = triangle();
        assert_eq!(t.fine_distance(0, 2).unwrap(), 1);
        assert_eq!(t.fine_distance(2, 0).unwrap(), 0);
        assert_eq!(t.fine_distance(1, 1).unwrap(), 0);
        assert_eq!(t.fine_distance(0, 7), Err(FineError::UnknownVertex(7)));
    }

    #[test]
    fn lattice_plane_distances() {
        let (s, ids) = lattice_patch(-4, -4, 4, 4);
        let o = ids[&[0, 0]];
        let d = s.distances_from(o).unwrap();
        for m in -4..=4 {
            for n in -4..=4 {
                assert_eq!(d[ids[&[m, n]]], Some(m.max(n).max(0) as usize), "({m},{n})");
            }
        }
    }

    #[test]
    fn single_triangle_strands() {
        let t = triangle();
        let st = t.strands();
        assert_eq!(st.len(), 3);
        assert!(st.iter().all(|s| !s.closed && s.segments.len() == 1));
        assert!(t.is_tight().unwrap());
        assert_eq!(t.tight_boundary_distance(0, 2).unwrap(), 1);
        assert_eq!(t.tight_boundary_distance(0, 0).unwrap(), 0);
        assert_eq!(t.boundary_lengths().unwrap(), (1, 2));
    }

    #[test]
    fn pinwheel_is_not_tight() {
        let p = pinwheel();
        assert!(p.is_disk());
        let st = p.strands();
        let x = p.crossings(&st);
        assert_eq!(x.len(), 2);
        let pair = |c: &Crossing| [c.a.0.min(c.b.0), c.a.0.max(c.b.0)];
        assert_eq!(pair(&x[0]), pair(&x[1]));
        assert!(!p.is_tight().unwrap());
        assert_eq!(p.tight_boundary_distance(0, 1), Err(FineError::NotTight));
    }

    #[test]
    fn validation_rejects_bad_input() {
        assert!(FineSurface::from_triangles(vec![]).is_err());
        // A directed 3-cycle across two triangles.
        assert!(matches!(FineSurface::from_triangles(vec![[0, 1, 2], [1, 2, 3], [3, 0, 4]]), Err(_)));
        assert!(FineSurface::from_json(r#"{"triangles":[[0,1,2]],"gluings":[[0,0]]}"#).is_err());
        assert!(FineSurface::from_json(r#"{"triangles":[[0,1,2],[3,4,5]],"gluings":[[0,3]]}"#).is_err());
        assert!(FineSurface::from_json(r#"{"triangles":[[0,1]]}"#).is_err());
        let ok = FineSurface::from_json(r#"{"triangles":[[0,1,2],[0,1,3]],"gluings":[[0,3]]}"#).unwrap();
        assert_eq!(ok.vertex_count(), 4);
        assert!(ok.is_disk());
    }

    #[test]
    fn json_round_trip() {
        let t = standard_torus();
        let back = FineSurface::from_json(&t.to_json()).unwrap();
        assert_eq!(back.to_fine_json(), t.to_fine_json());
    }

    #[test]
    fn grids_are_tight_and_obey_the_boundary_formula() {
        let (s, _) = lattice_patch(0, 0, 3, 2);
        assert!(s.is_tight().unwrap());
        for x in 0..s.vertex_count() {
            for y in 0..s.vertex_count() {
                let Ok(d) = s.tight_boundary_distance(x, y) else { continue };
                assert_eq!(d, s.fine_distance(x, y).unwrap());
                assert_eq!(s.tight_boundary_distance_along(x, y, false).unwrap(), d);
            }
        }
    }

    #[test]
    fn standard_torus_verifies() {
        let t = standard_torus();
        assert!(t.is_closed_torus());
        let rep = t.verify_fine_torus(&standard_triangle(), 3).unwrap();
        assert_eq!(rep.triangles, 2);
        assert!(rep.pass, "{:?}", rep.failures);
        let origin = IntegralPolygon::new(vec![[0, 0]]).unwrap();
        assert!(matches!(t.verify_fine_torus(&origin, 2), Err(FineError::Precondition(_))));
        let wrong = IntegralPolygon::new(vec![[-1, -1], [1, -1], [1, 1], [-1, 1]]).unwrap();
        assert!(!t.verify_fine_torus(&wrong, 2).unwrap().pass);
    }

    #[test]
    fn torus_strands_are_quarter_turned_sides() {
        let mut classes = standard_torus().strand_classes().unwrap();
        classes.sort();
        // Sides (1,0), (−1,1), (0,−1) of the standard triangle turned clockwise.
        let mut want = vec![[0, -1], [1, 1], [-1, 0]];
        want.sort();
        assert_eq!(classes, want);
    }

    #[test]
    fn plabic_dual_degrees() {
        let g = triangle().dual_plabic().unwrap();
        assert_eq!(g.colors, vec![PlabicColor::Black]);
        assert_eq!(g.edges.len(), 3);
        assert!(g.is_perfectly_oriented());
        let r = triangle().dual_plabic_reversed().unwrap();
        assert_eq!(r.colors, vec![PlabicColor::White]);
        assert!(r.is_perfectly_oriented());
        let (s, _) = lattice_patch(0, 0, 3, 3);
        assert!(s.dual_plabic().unwrap().is_perfectly_oriented());
        assert!(standard_torus().dual_plabic().unwrap().is_perfectly_oriented());
    }

    #[test]
    fn whitney_extension() {
        let (s, ids) = lattice_patch(0, 0, 2, 2);
        let cyc = s.boundary_cycle().unwrap();
        let zero: BTreeMap<usize, i64> = cyc.iter().map(|st| (st.1, 0)).collect();
        let h = s.whitney_extend(&zero).unwrap();
        assert!(h.iter().all(|&v| v <= 0));
        for x in 0..s.vertex_count() {
            for y in 0..s.vertex_count() {
                assert!(h[y] - h[x] <= s.fine_distance(x, y).unwrap() as i64);
            }
        }
        // Distances from a boundary point extend to distances, here on a convex patch.
        let x0 = ids[&[0, 0]];
        let hc: BTreeMap<usize, i64> = cyc.iter().map(|st| (st.1, s.fine_distance(x0, st.1).unwrap() as i64)).collect();
        let h = s.whitney_extend(&hc).unwrap();
        for v in 0..s.vertex_count() {
            assert_eq!(h[v], s.fine_distance(x0, v).unwrap() as i64);
        }
        let mut bad = zero.clone();
        *bad.get_mut(&ids[&[2, 2]]).unwrap() = 5;
        assert!(matches!(s.whitney_extend(&bad), Err(FineError::NotShort(..))));
    }

    #[test]
    fn reorientation_keeps_strands() {
        let (s, _) = lattice_patch(0, 0, 2, 2);
        let id = s.reorient(&vec![0; s.edges().len()]).unwrap();
        assert_eq!(id.surface.to_fine_json(), s.to_fine_json());
        assert!(matches!(s.reorient(&vec![1; s.edges().len()]), Err(FineError::NotCalibration(_))));
        let mut two = vec![0; s.edges().len()];
        two[0] = 2;
        assert!(matches!(s.reorient(&two), Err(FineError::NotCalibration(_))));
    }

    fn strands_in_old_sides(r: &Reoriented) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = r
            .surface
            .strands()
            .iter()
            .map(|st| st.segments.iter().map(|&(t, k)| r.old_side[3 * t + k]).collect())
            .collect();
        v.sort();
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fine_alternative_on_random_graphs(seed in any::<u64>(), n in 2usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = FineGraph::random(n, 0.3, &mut rng);
            prop_assert!(g.is_nondegenerate());
            prop_assert!(g.alternative_failures().is_empty());
            for x in 0..n {
                let dx = g.distances_from(x);
                for y in 0..n {
                    if x != y {
                        prop_assert!(dx[y].unwrap() + g.distances_from(y)[x].unwrap() >= 1);
                    }
                }
            }
        }

        #[test]
        fn random_lattice_disks_are_tight(seed in any::<u64>(), size in 1usize..14) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_lattice_disk(size, &mut rng);
            prop_assert!(s.is_tight().unwrap());
            let cyc = s.boundary_cycle().unwrap();
            for &(_, x, _) in &cyc {
                for &(_, y, _) in &cyc {
                    prop_assert_eq!(s.tight_boundary_distance(x, y).unwrap(), s.fine_distance(x, y).unwrap());
                }
            }
            prop_assert!(s.dual_plabic().unwrap().is_perfectly_oriented());
            for t in 0..s.triangle_count() {
                let tr = s.triangles()[t];
                prop_assert!(s.fine_distance(tr[0], tr[2]).unwrap() <= 1);
            }
        }

        #[test]
        fn reorienting_by_short_functions(seed in any::<u64>(), size in 1usize..14) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_lattice_disk(size, &mut rng);
            let cyc = s.boundary_cycle().unwrap();
            let x0 = cyc[rng.gen_range(0..cyc.len())].1;
            let hc: BTreeMap<usize, i64> = cyc.iter().map(|st| (st.1, s.fine_distance(x0, st.1).unwrap() as i64)).collect();
            let h = s.whitney_extend(&hc).unwrap();
            let theta: Vec<i64> = s.edges().iter().map(|&(a, b)| h[b] - h[a]).collect();
            let r = s.reorient(&theta).unwrap();
            let mut before: Vec<Vec<usize>> = s.strands().iter().map(|st| st.segments.iter().map(|&(t, k)| 3 * t + k).collect()).collect();
            before.sort();
            prop_assert_eq!(strands_in_old_sides(&r), before);
            let m = &r.surface;
            prop_assert!(m.is_tight().unwrap());
            for &(_, x, _) in &cyc {
                for &(_, y, _) in &cyc {
                    prop_assert_eq!(m.tight_boundary_distance(x, y).unwrap(), m.fine_distance(x, y).unwrap());
                }
            }
        }
    }
}
