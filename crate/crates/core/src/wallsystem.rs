//! Wallsystems: maps whose interior vertices are wall crossings.
//!
//! Lengths count wall edges crossed, area counts crossings. Seam edges are
//! transparent cell structure: regions are map faces merged across seams.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combmap::{Dart, EdgeKind, MapError, SurfaceMap};
use crate::squarecell::SquareCelledSurface;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WallError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("not a wallsystem: {0}")]
    Invalid(String),
    #[error("unknown face {0}")]
    UnknownFace(usize),
    #[error("faces {0} and {1} are not adjacent across a wall")]
    NotAdjacent(usize, usize),
    #[error("wallsystem is not cellular")]
    NotCellular,
    #[error("boundary must be a single cycle, found {0} cycles")]
    Boundary(usize),
    #[error("vertex {0} is not a crossing")]
    NotCrossing(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Crossing,
    /// Two wall darts, plus possibly seams.
    WallPoint,
    Endpoint,
    BoundaryPoint,
    /// Only seams meet here.
    SeamPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall {
    pub closed: bool,
    /// Wall darts in travel order, each leaving the vertex it sits at.
    pub darts: Vec<Dart>,
    /// Crossings met along the way (twice if the wall passes twice).
    pub crossings: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Area {
    pub crossings: usize,
    pub uht: usize,
}

/// A sequence of faces, consecutive ones sharing a wall edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacePath {
    pub faces: Vec<usize>,
    #[serde(default)]
    pub closed: bool,
}

#[derive(Clone, Debug)]
pub struct Wallsystem {
    map: SurfaceMap,
    vkind: Vec<VertexKind>,
    /// Wall darts per vertex, in rotation order.
    wall_darts: Vec<Vec<Dart>>,
    /// Region of each map face; `usize::MAX` for holes.
    region_of_face: Vec<usize>,
    regions: usize,
    /// Wall edges as `(edge id, region, region)`.
    wall_edges: Vec<(usize, usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Wallsystem {
    pub fn new(map: SurfaceMap) -> Result<Self, WallError> {
        let mut vkind = Vec::with_capacity(map.vertex_count());
        let mut wall_darts = Vec::with_capacity(map.vertex_count());
        for (v, rot) in map.vertices().iter().enumerate() {
            let w: Vec<Dart> = rot.iter().copied().filter(|&d| map.kind(d) == EdgeKind::Interior).collect();
            let b = rot.iter().filter(|&&d| map.kind(d) == EdgeKind::Boundary).count();
            let k = match (w.len(), b) {
                (4, 0) => VertexKind::Crossing,
                (2, 0) => VertexKind::WallPoint,
                (1, 2) => VertexKind::Endpoint,
                (0, 2) => VertexKind::BoundaryPoint,
                (0, 0) => VertexKind::SeamPoint,
                (w, b) => {
                    return Err(WallError::Invalid(format!(
                        "vertex {v} has {w} wall darts and {b} boundary darts"
                    )))
                }
            };
            vkind.push(k);
            wall_darts.push(w);
        }
        let nf = map.faces().len();
        let mut uf = UnionFind::new(nf);
        for e in map.edges() {
            if map.kind(e) == EdgeKind::Seam {
                let (a, b) = map.edge_sides(e);
                uf.union(a, b);
            }
        }
        let mut region_of_face = vec![usize::MAX; nf];
        let mut root_region = vec![usize::MAX; nf];
        let mut regions = 0;
        for f in 0..nf {
            if map.faces()[f].hole {
                continue;
            }
            let r = uf.find(f);
            if root_region[r] == usize::MAX {
                root_region[r] = regions;
                regions += 1;
            }
            region_of_face[f] = root_region[r];
        }
        let mut wall_edges = Vec::new();
        let mut adj = vec![Vec::new(); regions];
        for e in map.edges() {
            if map.kind(e) != EdgeKind::Interior {
                continue;
            }
            let (a, b) = map.edge_sides(e);
            let (ra, rb) = (region_of_face[a], region_of_face[b]);
            if ra == usize::MAX || rb == usize::MAX {
                return Err(WallError::Invalid(format!("wall edge {e} borders a hole")));
            }
            wall_edges.push((e, ra, rb));
            adj[ra].push(rb);
            if ra != rb {
                adj[rb].push(ra);
            }
        }
        Ok(Wallsystem { map, vkind, wall_darts, region_of_face, regions, wall_edges, adj })
    }

    pub fn from_json(text: &str) -> Result<Self, WallError> {
        Self::new(SurfaceMap::from_json(text)?)
    }

    pub fn map(&self) -> &SurfaceMap {
        &self.map
    }

    pub fn vertex_kind(&self, v: usize) -> VertexKind {
        self.vkind[v]
    }

    pub fn crossings(&self) -> Vec<usize> {
        (0..self.vkind.len()).filter(|&v| self.vkind[v] == VertexKind::Crossing).collect()
    }

    pub fn endpoints(&self) -> Vec<usize> {
        (0..self.vkind.len()).filter(|&v| self.vkind[v] == VertexKind::Endpoint).collect()
    }

    /// Wall darts at `v` in rotation order, starting from the least dart of the rotation.
    pub fn wall_darts_at(&self, v: usize) -> &[Dart] {
        &self.wall_darts[v]
    }

    /// Number of faces (map faces merged across seams).
    pub fn face_count(&self) -> usize {
        self.regions
    }

    /// Face on each side of dart `d`, or `None` for a hole.
    pub fn faces_of_dart(&self, d: Dart) -> (Option<usize>, Option<usize>) {
        let r = |f: usize| Some(self.region_of_face[f]).filter(|&x| x != usize::MAX);
        (r(self.map.face_of(d, 1)), r(self.map.face_of(d, -1)))
    }

    pub fn face_of_map_face(&self, f: usize) -> Option<usize> {
        Some(self.region_of_face[f]).filter(|&x| x != usize::MAX)
    }

    /// Wall edges as `(edge id, face, face)`.
    pub fn wall_edges(&self) -> &[(usize, usize, usize)] {
        &self.wall_edges
    }

    /// Continues straight through the far end of wall dart `d`.
    pub fn wall_successor(&self, d: Dart) -> Option<Dart> {
        let y = self.map.alpha(d);
        let w = &self.wall_darts[self.map.vertex_of(y)];
        let i = w.iter().position(|&x| x == y).expect("wall dart at its vertex");
        match w.len() {
            4 => Some(w[(i + 2) % 4]),
            2 => Some(w[1 - i]),
            _ => None,
        }
    }

    pub fn walls(&self) -> Vec<Wall> {
        let n = self.map.dart_count();
        let mut used = vec![false; n];
        let mut out = Vec::new();
        let trace = |start: Dart, used: &mut Vec<bool>| -> Wall {
            let mut darts = Vec::new();
            let mut crossings = Vec::new();
            let mut d = start;
            loop {
                used[d] = true;
                used[self.map.alpha(d)] = true;
                darts.push(d);
                let v = self.map.vertex_of(self.map.alpha(d));
                if self.vkind[v] == VertexKind::Crossing {
                    crossings.push(v);
                }
                match self.wall_successor(d) {
                    Some(nx) if nx == start => return Wall { closed: true, darts, crossings },
                    Some(nx) => d = nx,
                    None => return Wall { closed: false, darts, crossings },
                }
            }
        };
        for v in 0..self.vkind.len() {
            if self.vkind[v] == VertexKind::Endpoint {
                let d = self.wall_darts[v][0];
                if !used[d] {
                    out.push(trace(d, &mut used));
                }
            }
        }
        for d in 0..n {
            if self.map.kind(d) == EdgeKind::Interior && !used[d] {
                out.push(trace(d, &mut used));
            }
        }
        out
    }

    pub fn area(&self) -> Area {
        let c = self.vkind.iter().filter(|&&k| k == VertexKind::Crossing).count();
        Area { crossings: c, uht: 4 * c }
    }

    /// Number of wall crossings along the path.
    pub fn length(&self, path: &FacePath) -> Result<usize, WallError> {
        for &f in &path.faces {
            if f >= self.regions {
                return Err(WallError::UnknownFace(f));
            }
        }
        let mut steps: Vec<(usize, usize)> = path.faces.windows(2).map(|w| (w[0], w[1])).collect();
        if path.closed && path.faces.len() > 1 {
            steps.push((path.faces[path.faces.len() - 1], path.faces[0]));
        }
        for &(a, b) in &steps {
            if !self.adj[a].contains(&b) {
                return Err(WallError::NotAdjacent(a, b));
            }
        }
        Ok(steps.len())
    }

    /// BFS distances from face `f`; `None` for unreachable faces.
    pub fn distances_from(&self, f: usize) -> Result<Vec<Option<usize>>, WallError> {
        if f >= self.regions {
            return Err(WallError::UnknownFace(f));
        }
        let mut dist = vec![None; self.regions];
        dist[f] = Some(0);
        let mut q = VecDeque::from([f]);
        while let Some(a) = q.pop_front() {
            let da = dist[a].unwrap();
            for &b in &self.adj[a] {
                if dist[b].is_none() {
                    dist[b] = Some(da + 1);
                    q.push_back(b);
                }
            }
        }
        Ok(dist)
    }

    pub fn face_distance(&self, f: usize, g: usize) -> Result<usize, WallError> {
        if g >= self.regions {
            return Err(WallError::UnknownFace(g));
        }
        self.distances_from(f)?[g].ok_or_else(|| WallError::Invalid(format!("faces {f} and {g} are not connected")))
    }

    /// Whether faces can be 2-coloured so that every wall edge separates colours.
    pub fn is_even(&self) -> bool {
        let mut col = vec![-1i8; self.regions];
        for s in 0..self.regions {
            if col[s] >= 0 {
                continue;
            }
            col[s] = 0;
            let mut q = VecDeque::from([s]);
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
        }
        true
    }

    /// Faces along the single boundary cycle, one per arc between consecutive endpoints.
    ///
    /// Arc `k` starts right after the `k`-th endpoint met along the boundary walk.
    pub fn boundary_faces(&self) -> Result<Vec<usize>, WallError> {
        let cycles = self.map.boundary_cycles();
        if cycles.len() != 1 {
            return Err(WallError::Boundary(cycles.len()));
        }
        Ok(self.arcs_of_cycle(&cycles[0]).into_iter().map(|(r, _)| r).collect())
    }

    /// Arcs of one boundary cycle as `(face, first boundary dart)`.
    fn arcs_of_cycle(&self, cyc: &[Dart]) -> Vec<(usize, Dart)> {
        let m = &self.map;
        let inner = |d: Dart| {
            let (a, b) = self.faces_of_dart(d);
            a.or(b).expect("boundary edge borders a face")
        };
        // cyc[k] is a boundary dart; the walk passes from cyc[k] to cyc[k+1] through
        // the vertex of alpha(cyc[k]).
        let k0 = (0..cyc.len()).find(|&k| {
            let v = m.vertex_of(m.alpha(cyc[(k + cyc.len() - 1) % cyc.len()]));
            self.vkind[v] == VertexKind::Endpoint
        });
        let Some(k0) = k0 else {
            return vec![(inner(cyc[0]), cyc[0])];
        };
        let mut arcs = Vec::new();
        for j in 0..cyc.len() {
            let k = (k0 + j) % cyc.len();
            let prev = cyc[(k + cyc.len() - 1) % cyc.len()];
            if self.vkind[m.vertex_of(m.alpha(prev))] == VertexKind::Endpoint {
                arcs.push((inner(cyc[k]), cyc[k]));
            }
        }
        arcs
    }

    pub fn is_cellular(&self) -> bool {
        if self.walls().iter().any(|w| w.crossings.is_empty()) {
            return false;
        }
        let m = &self.map;
        // Open regions must be planes: F − E_seam + V_seam = 1.
        let mut chi = vec![0i64; self.regions];
        for (f, face) in m.faces().iter().enumerate() {
            if !face.hole {
                chi[self.region_of_face[f]] += 1;
            }
        }
        for e in m.edges() {
            if m.kind(e) == EdgeKind::Seam {
                let (a, _) = m.edge_sides(e);
                chi[self.region_of_face[a]] -= 1;
            }
        }
        for (v, rot) in m.vertices().iter().enumerate() {
            if self.vkind[v] == VertexKind::SeamPoint {
                let f = m.face_of(rot[0], 1);
                chi[self.region_of_face[f]] += 1;
            }
        }
        if chi.iter().any(|&c| c != 1) {
            return false;
        }
        let mut arcs = vec![0usize; self.regions];
        for cyc in m.boundary_cycles() {
            let has_end = cyc.iter().any(|&d| self.vkind[m.vertex_of(d)] == VertexKind::Endpoint);
            if !has_end {
                return false;
            }
            for (r, _) in self.arcs_of_cycle(&cyc) {
                arcs[r] += 1;
            }
        }
        arcs.iter().all(|&a| a <= 1)
    }

    pub fn is_isometric_filling(&self) -> Result<bool, WallError> {
        let faces = self.boundary_faces()?;
        let m = faces.len();
        for i in 0..m {
            let dist = self.distances_from(faces[i])?;
            for j in 0..m {
                let cyc = (i as isize - j as isize).unsigned_abs();
                if dist[faces[j]] != Some(cyc.min(m - cyc)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The dual square-celled surface: one square per crossing.
    ///
    /// Square `q` belongs to the `q`-th crossing; its side `i` is crossed by the `i`-th
    /// wall dart of that crossing.
    pub fn dualize(&self) -> Result<SquareCelledSurface, WallError> {
        if !self.is_cellular() {
            return Err(WallError::NotCellular);
        }
        let m = &self.map;
        let cr = self.crossings();
        let mut square_of = vec![usize::MAX; self.vkind.len()];
        for (q, &v) in cr.iter().enumerate() {
            square_of[v] = q;
        }
        let mut partner = vec![None; 4 * cr.len()];
        for (q, &v) in cr.iter().enumerate() {
            for (i, &x) in self.wall_darts[v].iter().enumerate() {
                let mut d = x;
                let mut acc = 1i8;
                loop {
                    acc *= m.sign(d);
                    let y = m.alpha(d);
                    let w = m.vertex_of(y);
                    match self.vkind[w] {
                        VertexKind::Crossing => {
                            let j = self.wall_darts[w].iter().position(|&z| z == y).unwrap();
                            partner[4 * q + i] = Some((4 * square_of[w] + j, acc < 0));
                            break;
                        }
                        VertexKind::WallPoint => {
                            let wd = &self.wall_darts[w];
                            d = if wd[0] == y { wd[1] } else { wd[0] };
                        }
                        _ => break,
                    }
                }
            }
        }
        SquareCelledSurface::from_partners(partner).map_err(|e| WallError::Invalid(e.to_string()))
    }

    /// Uncrosses crossing `v`. Side 0 joins wall darts (x0, x1) and (x2, x3); side 1 joins
    /// (x1, x2) and (x3, x0), with x0..x3 the wall darts at `v` in rotation order.
    /// A seam keeps the two new wall points connected.
    pub fn split_crossing(&self, v: usize, side: u8) -> Result<Wallsystem, WallError> {
        if v >= self.vkind.len() || self.vkind[v] != VertexKind::Crossing {
            return Err(WallError::NotCrossing(v));
        }
        let m = &self.map;
        let rot = &m.vertices()[v];
        let x = &self.wall_darts[v];
        let start = rot.iter().position(|&d| d == x[usize::from(side & 1)]).unwrap();
        let rot: Vec<Dart> = (0..rot.len()).map(|k| rot[(start + k) % rot.len()]).collect();
        let cut = rot.iter().position(|&d| d == x[(usize::from(side & 1) + 2) % 4]).unwrap();
        let mut b = Builder::from_map(m);
        let s1 = b.add_edge(1, EdgeKind::Seam);
        let s2 = b.alpha[s1];
        let mut w1 = rot[..cut].to_vec();
        w1.push(s1);
        let mut w2 = rot[cut..].to_vec();
        w2.push(s2);
        b.set_rotation(&w1);
        b.set_rotation(&w2);
        Ok(Wallsystem::new(b.build()?)?)
    }

    /// Removes seams separating distinct map faces and smooths wall points of degree 2.
    pub fn simplify(&self) -> Result<Wallsystem, WallError> {
        let mut cur = self.map.clone();
        loop {
            let seam = cur.edges().find(|&e| {
                if cur.kind(e) != EdgeKind::Seam {
                    return false;
                }
                let (a, b) = cur.edge_sides(e);
                a != b
            });
            let Some(e) = seam else { break };
            let mut doomed = vec![false; cur.dart_count()];
            doomed[e] = true;
            doomed[cur.alpha(e)] = true;
            cur = cur.remove_edges(&doomed)?;
        }
        loop {
            let smooth = cur.vertices().iter().find_map(|rot| {
                if rot.len() != 2 || rot.iter().any(|&d| cur.kind(d) != EdgeKind::Interior) {
                    return None;
                }
                let (d1, d2) = (rot[0], rot[1]);
                (cur.alpha(d1) != d2).then_some((d1, d2))
            });
            let Some((d1, d2)) = smooth else { break };
            let mut b = Builder::from_map(&cur);
            let (a1, a2) = (b.alpha[d1], b.alpha[d2]);
            let s = b.sign[d1] * b.sign[d2];
            b.alpha[a1] = a2;
            b.alpha[a2] = a1;
            b.sign[a1] = s;
            b.sign[a2] = s;
            b.delete(&[d1, d2]);
            cur = b.build()?;
        }
        Wallsystem::new(cur)
    }
}

/// Mutable per-dart arrays for local surgery.
pub(crate) struct Builder {
    pub alpha: Vec<Dart>,
    pub sigma: Vec<Dart>,
    pub sign: Vec<i8>,
    pub kind: Vec<EdgeKind>,
    dead: Vec<bool>,
}

impl Builder {
    pub fn from_map(m: &SurfaceMap) -> Self {
        let n = m.dart_count();
        Builder {
            alpha: (0..n).map(|d| m.alpha(d)).collect(),
            sigma: (0..n).map(|d| m.sigma(d)).collect(),
            sign: (0..n).map(|d| m.sign(d)).collect(),
            kind: (0..n).map(|d| m.kind(d)).collect(),
            dead: vec![false; n],
        }
    }

    /// Adds an edge whose darts are not yet placed in any rotation.
    pub fn add_edge(&mut self, sign: i8, kind: EdgeKind) -> Dart {
        let d = self.alpha.len();
        self.alpha.extend([d + 1, d]);
        self.sigma.extend([d, d + 1]);
        self.sign.extend([sign, sign]);
        self.kind.extend([kind, kind]);
        self.dead.extend([false, false]);
        d
    }

    pub fn set_rotation(&mut self, rot: &[Dart]) {
        for (k, &d) in rot.iter().enumerate() {
            self.sigma[d] = rot[(k + 1) % rot.len()];
        }
    }

    /// Drops darts from the map; their rotations are patched around them.
    pub fn delete(&mut self, darts: &[Dart]) {
        for &d in darts {
            self.dead[d] = true;
        }
    }

    pub fn build(self) -> Result<SurfaceMap, MapError> {
        let n = self.alpha.len();
        let mut id = vec![usize::MAX; n];
        let mut next = 0;
        for d in 0..n {
            if !self.dead[d] {
                id[d] = next;
                next += 1;
            }
        }
        let mut alpha = vec![0; next];
        let mut sigma = vec![0; next];
        let mut sign = vec![1; next];
        let mut kind = vec![EdgeKind::Interior; next];
        for d in 0..n {
            if self.dead[d] {
                continue;
            }
            let mut s = self.sigma[d];
            let mut guard = 0;
            while self.dead[s] {
                s = self.sigma[s];
                guard += 1;
                if guard > n {
                    return Err(MapError::Invalid("rotation consists of deleted darts".into()));
                }
            }
            if self.dead[self.alpha[d]] {
                return Err(MapError::Invalid("edge half-deleted".into()));
            }
            alpha[id[d]] = id[self.alpha[d]];
            sigma[id[d]] = id[s];
            sign[id[d]] = self.sign[d];
            kind[id[d]] = self.kind[d];
        }
        SurfaceMap::new(alpha, sigma, sign, kind)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
