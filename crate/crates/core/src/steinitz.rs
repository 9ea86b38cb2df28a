//! Wallsystems on the disk: Steinitz moves, reduction to pseudoline
//! arrangements, Levi distances, the funicular pairing, completion and flips.
//!
//! Work happens on [`DiskDiagram`], a port graph. Crossing `c` has slots
//! `0..4` counterclockwise, dart `4c + s`. Endpoints `0..2n` sit
//! counterclockwise on the boundary; endpoint `k` owns darts
//! `4C + 3k + {0: fwd, 1: wall, 2: back}` with rotation fwd → wall → back.
//! The boundary edge from endpoint `k` joins fwd(k) to back(k+1).
//! Faces are orbits of `d ↦ σ(link(d))`; the face of `d` lies to its right.
//! Arc `k` is the boundary face between endpoints `k` and `k+1`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combmap::{Dart, EdgeKind, SurfaceMap};
use crate::wallsystem::{VertexKind, WallError, Wallsystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteinitzError {
    #[error(transparent)]
    Wall(#[from] WallError),
    #[error("not a disk: {0}")]
    NotDisk(String),
    #[error("move pattern absent: {0}")]
    PatternAbsent(String),
    #[error("not a pseudoline arrangement")]
    NotPla,
    #[error("distance table is not disk-like: {0}")]
    NotDiskLike(String),
    #[error("invalid chords: {0}")]
    Chords(String),
    #[error("beyond search budget: {0}")]
    Budget(String),
    #[error("internal rewiring failure: {0}")]
    Rewire(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    Ste0,
    Ste1,
    Ste2,
    Ste3,
    Sho2,
}

/// One move. Darts refer to the diagram the move is applied to.
///
/// Ste1: the loop dart. Ste2/Sho2: the two darts of the bigon face. Ste3: the three
/// darts of the triangle face. Ste0: empty for a free loop, otherwise one crossing
/// dart of a component that does not reach the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub darts: Vec<usize>,
}

pub type MoveLog = Vec<Move>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BadgonKind {
    Zerogon,
    OpenMonogon,
    Bigon,
    ClosedMonogon,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Badgon {
    pub kind: BadgonKind,
    /// Boundary darts in travel order (each leaves a crossing).
    pub darts: Vec<usize>,
    /// Corner crossings: none, one, or two.
    pub corners: Vec<usize>,
    /// Faces enclosed.
    pub faces: Vec<usize>,
    /// Crossings strictly inside.
    pub inner_crossings: Vec<usize>,
    /// Wall edges with both sides inside, one dart each.
    pub inner_edges: Vec<usize>,
    /// For a bigon, the number of darts of the first side.
    pub split: usize,
}

impl Badgon {
    pub fn is_clear(&self) -> bool {
        self.faces.len() == 1
    }
}

/// Chords shorthand for a pseudoline arrangement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chords {
    pub boundary_length: usize,
    pub pairing: Vec<[usize; 2]>,
    /// Per wall, the walls it crosses in order from its first endpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossing_order: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiskDiagram {
    nc: usize,
    ne: usize,
    /// Over ports: crossing slots `4c + s`, then endpoint ports `4C + k`.
    link: Vec<usize>,
    loops: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    /// A kept port, relinked to the new slot.
    Direct(usize),
    /// Whatever lies beyond a removed port.
    Beyond(usize),
    /// A slot of another new crossing.
    New(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Alias(usize, usize),
    Through(usize),
    Dead,
}

struct Rewire {
    removed: Vec<usize>,
    roles: HashMap<usize, Role>,
    new: Vec<[Target; 4]>,
}

impl Rewire {
    fn new(removed: Vec<usize>) -> Self {
        Rewire { removed, roles: HashMap::new(), new: Vec::new() }
    }
}

fn slot(c: usize, s: usize) -> usize {
    4 * c + s % 4
}

impl DiskDiagram {
    /// The empty disk with `2n` endpoints is not valid; this is the disk with no walls.
    pub fn empty() -> Self {
        DiskDiagram { nc: 0, ne: 0, link: Vec::new(), loops: 0 }
    }

    pub fn crossing_count(&self) -> usize {
        self.nc
    }

    pub fn endpoint_count(&self) -> usize {
        self.ne
    }

    pub fn free_loops(&self) -> usize {
        self.loops
    }

    fn port_count(&self) -> usize {
        4 * self.nc + self.ne
    }

    fn end_port(&self, k: usize) -> usize {
        4 * self.nc + k
    }

    pub fn dart_count(&self) -> usize {
        4 * self.nc + 3 * self.ne
    }

    pub fn fwd(&self, k: usize) -> usize {
        4 * self.nc + 3 * k
    }

    pub fn wall_dart(&self, k: usize) -> usize {
        4 * self.nc + 3 * k + 1
    }

    pub fn back(&self, k: usize) -> usize {
        4 * self.nc + 3 * k + 2
    }

    fn port_of_dart(&self, d: usize) -> Option<usize> {
        if d < 4 * self.nc {
            Some(d)
        } else if (d - 4 * self.nc) % 3 == 1 {
            Some(4 * self.nc + (d - 4 * self.nc) / 3)
        } else {
            None
        }
    }

    fn dart_of_port(&self, p: usize) -> usize {
        if p < 4 * self.nc {
            p
        } else {
            self.wall_dart(p - 4 * self.nc)
        }
    }

    /// Edge partner of a dart, boundary edges included.
    pub fn link_dart(&self, d: usize) -> usize {
        match self.port_of_dart(d) {
            Some(p) => self.dart_of_port(self.link[p]),
            None => {
                let k = (d - 4 * self.nc) / 3;
                if (d - 4 * self.nc) % 3 == 0 {
                    self.back((k + 1) % self.ne)
                } else {
                    self.fwd((k + self.ne - 1) % self.ne)
                }
            }
        }
    }

    pub fn sigma(&self, d: usize) -> usize {
        if d < 4 * self.nc {
            slot(d / 4, d % 4 + 1)
        } else {
            let b = d - (d - 4 * self.nc) % 3;
            b + ((d - b) + 1) % 3
        }
    }

    /// Crossing owning a dart, if any.
    pub fn crossing_of(&self, d: usize) -> Option<usize> {
        (d < 4 * self.nc).then_some(d / 4)
    }

    /// Endpoint owning a dart, if any.
    pub fn endpoint_of(&self, d: usize) -> Option<usize> {
        (d >= 4 * self.nc).then(|| (d - 4 * self.nc) / 3)
    }

    /// Face walks and the face index of every dart.
    pub fn faces(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let n = self.dart_count();
        let mut face_of = vec![usize::MAX; n];
        let mut faces = Vec::new();
        for d0 in 0..n {
            if face_of[d0] != usize::MAX {
                continue;
            }
            let mut f = Vec::new();
            let mut d = d0;
            loop {
                face_of[d] = faces.len();
                f.push(d);
                d = self.sigma(self.link_dart(d));
                if d == d0 {
                    break;
                }
            }
            faces.push(f);
        }
        (faces, face_of)
    }

    /// Face of boundary arc `k`.
    pub fn arc_face(&self, face_of: &[usize], k: usize) -> usize {
        face_of[self.back((k + 1) % self.ne)]
    }

    /// Straight continuation: the dart leaving the far crossing of `d` on the same wall.
    pub fn next_on_wall(&self, d: usize) -> Option<usize> {
        let t = self.link_dart(d);
        (t < 4 * self.nc).then(|| slot(t / 4, t % 4 + 2))
    }

    /// Walls as dart sequences; open walls start at an endpoint's wall dart and list the
    /// darts leaving each vertex, closed walls list crossing darts.
    pub fn walls(&self) -> Vec<(bool, Vec<usize>)> {
        let mut used = vec![false; self.dart_count()];
        let mut out = Vec::new();
        for k in 0..self.ne {
            let d0 = self.wall_dart(k);
            if used[d0] {
                continue;
            }
            let mut seq = vec![d0];
            used[d0] = true;
            let mut d = d0;
            while let Some(nx) = self.next_on_wall(d) {
                used[self.link_dart(d)] = true;
                used[nx] = true;
                seq.push(nx);
                d = nx;
            }
            used[self.link_dart(d)] = true;
            out.push((false, seq));
        }
        for d0 in 0..4 * self.nc {
            if used[d0] {
                continue;
            }
            let mut seq = Vec::new();
            let mut d = d0;
            loop {
                used[d] = true;
                used[self.link_dart(d)] = true;
                seq.push(d);
                d = self.next_on_wall(d).expect("closed wall");
                if d == d0 {
                    break;
                }
            }
            out.push((true, seq));
        }
        out
    }

    /// Endpoint pairing as `partner[k]`.
    pub fn pairing(&self) -> Vec<usize> {
        let mut p = vec![usize::MAX; self.ne];
        for (closed, seq) in self.walls() {
            if closed {
                continue;
            }
            let a = self.endpoint_of(seq[0]).unwrap();
            let last = self.link_dart(*seq.last().unwrap());
            let b = self.endpoint_of(last).unwrap();
            p[a] = b;
            p[b] = a;
        }
        p
    }

    /// BFS distances between faces across wall edges.
    pub fn face_distances(&self, faces: &[Vec<usize>], face_of: &[usize], from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; faces.len()];
        dist[from] = 0;
        let mut q = VecDeque::from([from]);
        while let Some(f) = q.pop_front() {
            for &d in &faces[f] {
                if self.port_of_dart(d).is_none() {
                    continue;
                }
                let g = face_of[self.link_dart(d)];
                if dist[g] == usize::MAX {
                    dist[g] = dist[f] + 1;
                    q.push_back(g);
                }
            }
        }
        dist
    }

    /// Distances between boundary arcs, by BFS over faces.
    pub fn boundary_distances(&self) -> Vec<Vec<usize>> {
        let (faces, face_of) = self.faces();
        (0..self.ne)
            .map(|i| {
                let dist = self.face_distances(&faces, &face_of, self.arc_face(&face_of, i));
                (0..self.ne).map(|j| dist[self.arc_face(&face_of, j)]).collect()
            })
            .collect()
    }

    // ---- conversion -------------------------------------------------------------

    /// Reads a disk wallsystem: gauges signs to +1, ignores seams and smooths wall points.
    pub fn from_wallsystem(ws: &Wallsystem) -> Result<Self, SteinitzError> {
        let cls = ws.map().classify();
        if cls.euler_characteristic != 1 || !cls.orientable || cls.boundary_components != 1 {
            return Err(SteinitzError::NotDisk(format!(
                "classification ({}, {}, {})",
                cls.euler_characteristic, cls.orientable, cls.boundary_components
            )));
        }
        let map = ws.map().gauge_to_orientation().expect("orientable");
        let ws = Wallsystem::new(map)?;
        let m = ws.map();
        let crossings = ws.crossings();
        let mut cindex = vec![usize::MAX; m.vertex_count()];
        for (i, &v) in crossings.iter().enumerate() {
            cindex[v] = i;
        }
        let nc = crossings.len();
        // Endpoints in counterclockwise order: fwd is the boundary dart just before the wall
        // dart in the rotation restricted to wall and boundary darts.
        let ends = ws.endpoints();
        let ne = ends.len();
        let restricted = |v: usize| -> Vec<Dart> {
            m.vertices()[v].iter().copied().filter(|&d| m.kind(d) != EdgeKind::Seam).collect()
        };
        let mut order = Vec::with_capacity(ne);
        let mut eindex = vec![usize::MAX; m.vertex_count()];
        if ne > 0 {
            let mut v = ends[0];
            loop {
                eindex[v] = order.len();
                order.push(v);
                let r = restricted(v);
                let wi = r.iter().position(|&d| m.kind(d) == EdgeKind::Interior).unwrap();
                let mut d = r[(wi + 2) % 3];
                // Walk along the boundary to the next endpoint.
                loop {
                    let y = m.alpha(d);
                    let u = m.vertex_of(y);
                    if ws.vertex_kind(u) == VertexKind::Endpoint {
                        v = u;
                        break;
                    }
                    let r = restricted(u);
                    d = if r[0] == y { r[1] } else { r[0] };
                }
                if v == ends[0] {
                    break;
                }
                if order.len() > ne {
                    return Err(SteinitzError::NotDisk("boundary walk does not close".into()));
                }
            }
            if order.len() != ne {
                return Err(SteinitzError::NotDisk("endpoints on several boundary cycles".into()));
            }
        }
        let port_of_map_dart = |d: Dart| -> usize {
            let v = m.vertex_of(d);
            if cindex[v] != usize::MAX {
                let s = ws.wall_darts_at(v).iter().position(|&x| x == d).unwrap();
                4 * cindex[v] + s
            } else {
                4 * nc + eindex[v]
            }
        };
        let mut link = vec![usize::MAX; 4 * nc + ne];
        let is_port = |v: usize| matches!(ws.vertex_kind(v), VertexKind::Crossing | VertexKind::Endpoint);
        for v in 0..m.vertex_count() {
            if !is_port(v) {
                continue;
            }
            for &d in ws.wall_darts_at(v) {
                // Follow the wall through wall points to the next port.
                let mut y = m.alpha(d);
                while !is_port(m.vertex_of(y)) {
                    let w = ws.wall_darts_at(m.vertex_of(y));
                    let nx = if w[0] == y { w[1] } else { w[0] };
                    y = m.alpha(nx);
                }
                link[port_of_map_dart(d)] = port_of_map_dart(y);
            }
        }
        let loops = ws.walls().iter().filter(|w| w.closed && w.crossings.is_empty()).count();
        if link.iter().any(|&x| x >= link.len()) {
            return Err(SteinitzError::Rewire("unlinked port while reading wallsystem".into()));
        }
        let d = DiskDiagram { nc, ne, link, loops };
        d.check()?;
        Ok(d)
    }

    fn check(&self) -> Result<(), SteinitzError> {
        for p in 0..self.port_count() {
            let q = self.link[p];
            if q >= self.port_count() || self.link[q] != p || q == p {
                return Err(SteinitzError::Rewire(format!("port {p} badly linked")));
            }
        }
        Ok(())
    }

    pub fn to_map(&self) -> SurfaceMap {
        let base = self.dart_count();
        let mut alpha: Vec<usize> = (0..base).map(|d| self.link_dart(d)).collect();
        let mut sigma: Vec<usize> = (0..base).map(|d| self.sigma(d)).collect();
        let mut kind: Vec<EdgeKind> = (0..base)
            .map(|d| if self.port_of_dart(d).is_some() { EdgeKind::Interior } else { EdgeKind::Boundary })
            .collect();
        // Anchor for extra structure: a corner inside the disk.
        let anchor = if self.ne == 0 {
            alpha.extend([base + 1, base]);
            sigma.extend([base + 1, base]);
            kind.extend([EdgeKind::Boundary, EdgeKind::Boundary]);
            base
        } else {
            self.wall_dart(0)
        };
        for _ in 0..self.loops {
            // A loop wall at a new vertex, tied to the anchor by a seam.
            let l = alpha.len();
            alpha.extend([l + 1, l, l + 3, l + 2]);
            kind.extend([EdgeKind::Interior, EdgeKind::Interior, EdgeKind::Seam, EdgeKind::Seam]);
            sigma.extend([l + 1, l + 2, l, 0]);
            let after = sigma[anchor];
            sigma[anchor] = l + 3;
            sigma[l + 3] = after;
        }
        let n = alpha.len();
        SurfaceMap::new(alpha, sigma, vec![1; n], kind).expect("diagram yields a valid map")
    }

    pub fn to_wallsystem(&self) -> Wallsystem {
        Wallsystem::new(self.to_map()).expect("diagram yields a wallsystem")
    }

    // ---- rewiring --------------------------------------------------------------

    fn apply_rewire(&self, rw: &Rewire) -> Result<DiskDiagram, SteinitzError> {
        let mut removed = vec![false; self.nc];
        for &c in &rw.removed {
            removed[c] = true;
        }
        let mut cid = vec![usize::MAX; self.nc];
        let mut k = 0;
        for c in 0..self.nc {
            if !removed[c] {
                cid[c] = k;
                k += 1;
            }
        }
        let nc2 = k + rw.new.len();
        let newp = |i: usize, s: usize| 4 * (k + i) + s;
        let old_to_new = |p: usize| -> usize {
            if p < 4 * self.nc {
                4 * cid[p / 4] + p % 4
            } else {
                4 * nc2 + (p - 4 * self.nc)
            }
        };
        let is_removed = |p: usize| p < 4 * self.nc && removed[p / 4];
        let mut visited: BTreeSet<usize> = BTreeSet::new();
        let resolve = |mut t: usize, visited: &mut BTreeSet<usize>| -> Result<usize, SteinitzError> {
            for _ in 0..=4 * self.nc + 4 {
                if !is_removed(t) {
                    return Ok(old_to_new(t));
                }
                match rw.roles.get(&t).copied().unwrap_or(Role::Dead) {
                    Role::Alias(i, s) => return Ok(newp(i, s)),
                    Role::Through(t2) => {
                        visited.insert(t);
                        visited.insert(t2);
                        t = self.link[t2];
                    }
                    Role::Dead => return Err(SteinitzError::Rewire(format!("reached dead port {t}"))),
                }
            }
            Err(SteinitzError::Rewire("through-cycle reached from outside".into()))
        };
        let total = 4 * nc2 + self.ne;
        let mut link = vec![usize::MAX; total];
        for (i, slots) in rw.new.iter().enumerate() {
            for (s, t) in slots.iter().enumerate() {
                let me = newp(i, s);
                let other = match *t {
                    Target::Direct(p) => {
                        let q = old_to_new(p);
                        link[q] = me;
                        q
                    }
                    Target::Beyond(x) => {
                        let r = resolve(self.link[x], &mut visited)?;
                        if r < 4 * k || r >= 4 * nc2 {
                            link[r] = me;
                        }
                        r
                    }
                    Target::New(j, u) => newp(j, u),
                };
                link[me] = other;
            }
        }
        for p in 0..self.port_count() {
            if is_removed(p) {
                continue;
            }
            let q = old_to_new(p);
            if link[q] == usize::MAX {
                link[q] = resolve(self.link[p], &mut visited)?;
            }
        }
        let mut loops = self.loops;
        for (&t, role) in &rw.roles {
            if let Role::Through(_) = role {
                if visited.contains(&t) {
                    continue;
                }
                // An isolated through-cycle is a closed wall with no crossings left.
                let mut u = t;
                loop {
                    visited.insert(u);
                    let Some(Role::Through(u2)) = rw.roles.get(&u).copied() else {
                        return Err(SteinitzError::Rewire("broken through-cycle".into()));
                    };
                    visited.insert(u2);
                    u = self.link[u2];
                    if u == t {
                        break;
                    }
                    if !is_removed(u) {
                        return Err(SteinitzError::Rewire("through-cycle escapes".into()));
                    }
                }
                loops += 1;
            }
        }
        let d = DiskDiagram { nc: nc2, ne: self.ne, link, loops };
        d.check()?;
        Ok(d)
    }

    // ---- moves -----------------------------------------------------------------

    pub fn apply_move(&self, mv: &Move) -> Result<DiskDiagram, SteinitzError> {
        match mv.kind {
            MoveKind::Ste0 => self.ste0(&mv.darts),
            MoveKind::Ste1 => self.ste1(*single(&mv.darts)?),
            MoveKind::Ste2 => self.bigon_move(&mv.darts, false),
            MoveKind::Sho2 => self.bigon_move(&mv.darts, true),
            MoveKind::Ste3 => self.ste3(&mv.darts),
        }
    }

    fn ste0(&self, darts: &[usize]) -> Result<DiskDiagram, SteinitzError> {
        if darts.is_empty() {
            if self.loops == 0 {
                return Err(SteinitzError::PatternAbsent("no free loop".into()));
            }
            let mut d = self.clone();
            d.loops -= 1;
            return Ok(d);
        }
        let c = self.crossing_of(darts[0]).ok_or_else(|| SteinitzError::PatternAbsent("Ste0 needs a crossing".into()))?;
        let comp = self.floating_components();
        let Some(cs) = comp.into_iter().find(|cs| cs.contains(&c)) else {
            return Err(SteinitzError::PatternAbsent(format!("crossing {c} reaches the boundary")));
        };
        let mut rw = Rewire::new(cs);
        for &c in &rw.removed.clone() {
            for s in 0..4 {
                rw.roles.insert(slot(c, s), Role::Dead);
            }
        }
        self.apply_rewire(&rw)
    }

    /// Sets of crossings not connected to any endpoint.
    pub fn floating_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.nc];
        let mut q = VecDeque::new();
        for k in 0..self.ne {
            let p = self.link[self.end_port(k)];
            if p < 4 * self.nc && !seen[p / 4] {
                seen[p / 4] = true;
                q.push_back(p / 4);
            }
        }
        let spread = |q: &mut VecDeque<usize>, seen: &mut Vec<bool>, out: &mut Vec<usize>| {
            while let Some(c) = q.pop_front() {
                out.push(c);
                for s in 0..4 {
                    let p = self.link[slot(c, s)];
                    if p < 4 * self.nc && !seen[p / 4] {
                        seen[p / 4] = true;
                        q.push_back(p / 4);
                    }
                }
            }
        };
        let mut sink = Vec::new();
        spread(&mut q, &mut seen, &mut sink);
        let mut comps = Vec::new();
        for c in 0..self.nc {
            if !seen[c] {
                seen[c] = true;
                q.push_back(c);
                let mut comp = Vec::new();
                spread(&mut q, &mut seen, &mut comp);
                comp.sort();
                comps.push(comp);
            }
        }
        comps
    }

    fn ste1(&self, x: usize) -> Result<DiskDiagram, SteinitzError> {
        let c = self.crossing_of(x).ok_or_else(|| SteinitzError::PatternAbsent("Ste1 needs a crossing dart".into()))?;
        let s = x % 4;
        if self.link[x] != slot(c, s + 3) {
            return Err(SteinitzError::PatternAbsent(format!("dart {x} does not bound a monogon")));
        }
        let mut rw = Rewire::new(vec![c]);
        rw.roles.insert(slot(c, s + 1), Role::Through(slot(c, s + 2)));
        rw.roles.insert(slot(c, s + 2), Role::Through(slot(c, s + 1)));
        rw.roles.insert(slot(c, s), Role::Dead);
        rw.roles.insert(slot(c, s + 3), Role::Dead);
        self.apply_rewire(&rw)
    }

    /// Checks that `darts` walk a face of `k` distinct crossings; returns `(c, out-slot)`.
    fn face_polygon(&self, darts: &[usize], k: usize) -> Result<Vec<(usize, usize)>, SteinitzError> {
        if darts.len() != k {
            return Err(SteinitzError::PatternAbsent(format!("expected {k} darts")));
        }
        let mut out = Vec::new();
        for (i, &d) in darts.iter().enumerate() {
            let c = self.crossing_of(d).ok_or_else(|| SteinitzError::PatternAbsent(format!("dart {d} is not at a crossing")))?;
            let next = darts[(i + 1) % k];
            if self.sigma(self.link_dart(d)) != next {
                return Err(SteinitzError::PatternAbsent(format!("darts {darts:?} do not walk a face")));
            }
            out.push((c, d % 4));
        }
        let cs: BTreeSet<usize> = out.iter().map(|x| x.0).collect();
        if cs.len() != k {
            return Err(SteinitzError::PatternAbsent("face corners are not distinct crossings".into()));
        }
        Ok(out)
    }

    fn bigon_move(&self, darts: &[usize], shortening: bool) -> Result<DiskDiagram, SteinitzError> {
        let poly = self.face_polygon(darts, 2)?;
        let ((c1, a), (c2, o2)) = (poly[0], poly[1]);
        let b = o2 + 3; // arrival slot b′ at c2
        let mut rw = Rewire::new(vec![c1, c2]);
        for p in [slot(c1, a), slot(c1, a + 3), slot(c2, b), slot(c2, b + 1)] {
            rw.roles.insert(p, Role::Dead);
        }
        let ext = [slot(c1, a + 1), slot(c1, a + 2), slot(c2, b + 2), slot(c2, b + 3)];
        if shortening {
            rw.roles.insert(ext[1], Role::Through(ext[2]));
            rw.roles.insert(ext[2], Role::Through(ext[1]));
            rw.roles.insert(ext[0], Role::Through(ext[3]));
            rw.roles.insert(ext[3], Role::Through(ext[0]));
        } else {
            for (i, &p) in ext.iter().enumerate() {
                rw.roles.insert(p, Role::Alias(0, i));
            }
            rw.new.push(ext.map(Target::Beyond));
        }
        self.apply_rewire(&rw)
    }

    fn ste3(&self, darts: &[usize]) -> Result<DiskDiagram, SteinitzError> {
        let poly = self.face_polygon(darts, 3)?;
        let ((c1, o1), (c2, o2), (c3, o3)) = (poly[0], poly[1], poly[2]);
        let e = [slot(c1, o1 + 1), slot(c1, o1 + 2), slot(c3, o3 + 1), slot(c3, o3 + 2), slot(c2, o2 + 1), slot(c2, o2 + 2)];
        let f = [e[1], e[2], e[3], e[4], e[5], e[0]];
        let mut rw = Rewire::new(vec![c1, c2, c3]);
        for (c, o) in [(c1, o1), (c2, o2), (c3, o3)] {
            rw.roles.insert(slot(c, o), Role::Dead);
            rw.roles.insert(slot(c, o + 3), Role::Dead);
        }
        for (i, &p) in f.iter().enumerate() {
            rw.roles.insert(p, Role::Alias(i / 2, i % 2));
        }
        use Target::*;
        rw.new.push([Beyond(f[0]), Beyond(f[1]), New(1, 3), New(2, 2)]);
        rw.new.push([Beyond(f[2]), Beyond(f[3]), New(2, 3), New(0, 2)]);
        rw.new.push([Beyond(f[4]), Beyond(f[5]), New(0, 3), New(1, 2)]);
        self.apply_rewire(&rw)
    }

    /// Clear triangles as face dart triples.
    pub fn clear_triangles(&self) -> Vec<[usize; 3]> {
        let (faces, _) = self.faces();
        faces
            .iter()
            .filter(|f| f.len() == 3 && self.face_polygon(f, 3).is_ok())
            .map(|f| [f[0], f[1], f[2]])
            .collect()
    }

    // ---- inverse moves, used to build test inputs ------------------------------

    /// Adds a kink (a monogon) on the wall edge at dart `d`.
    pub fn kink(&self, d: usize) -> Result<DiskDiagram, SteinitzError> {
        let p = self.port_of_dart(d).ok_or_else(|| SteinitzError::PatternAbsent("kink needs a wall dart".into()))?;
        let q = self.link[p];
        let mut rw = Rewire::new(vec![]);
        use Target::*;
        rw.new.push([New(0, 3), Direct(p), Direct(q), New(0, 0)]);
        self.apply_rewire(&rw)
    }

    /// Replaces the crossing at `c` by a clear bigon.
    pub fn unmerge(&self, c: usize) -> Result<DiskDiagram, SteinitzError> {
        if c >= self.nc {
            return Err(SteinitzError::PatternAbsent(format!("no crossing {c}")));
        }
        let mut rw = Rewire::new(vec![c]);
        for s in 0..4 {
            let (i, t) = if s < 2 { (0, s + 2) } else { (1, s) };
            rw.roles.insert(slot(c, s), Role::Alias(i, t));
        }
        use Target::*;
        rw.new.push([New(1, 1), New(1, 0), Beyond(slot(c, 0)), Beyond(slot(c, 1))]);
        rw.new.push([New(0, 1), New(0, 0), Beyond(slot(c, 2)), Beyond(slot(c, 3))]);
        self.apply_rewire(&rw)
    }

    /// Pushes the wall edge of dart `p` across the wall edge of dart `q`, both bordering
    /// the face on their right; creates a bigon.
    pub fn finger(&self, p: usize, q: usize) -> Result<DiskDiagram, SteinitzError> {
        let (pp, qp) = match (self.port_of_dart(p), self.port_of_dart(q)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(SteinitzError::PatternAbsent("finger needs wall darts".into())),
        };
        let (_, face_of) = self.faces();
        if face_of[p] != face_of[q] || pp == qp || self.link[pp] == qp {
            return Err(SteinitzError::PatternAbsent("darts not on a common face".into()));
        }
        let (pb, qb) = (self.link[pp], self.link[qp]);
        let mut rw = Rewire::new(vec![]);
        use Target::*;
        rw.new.push([New(1, 2), Direct(pp), Direct(qb), New(1, 3)]);
        rw.new.push([Direct(qp), Direct(pb), New(0, 0), New(0, 3)]);
        self.apply_rewire(&rw)
    }

    /// Puts a small closed wall around the wall edge of dart `d`, crossing it twice.
    pub fn ring(&self, d: usize) -> Result<DiskDiagram, SteinitzError> {
        let p = self.port_of_dart(d).ok_or_else(|| SteinitzError::PatternAbsent("ring needs a wall dart".into()))?;
        let q = self.link[p];
        let mut rw = Rewire::new(vec![]);
        use Target::*;
        rw.new.push([Direct(p), New(1, 3), New(1, 2), New(1, 1)]);
        rw.new.push([Direct(q), New(0, 3), New(0, 2), New(0, 1)]);
        self.apply_rewire(&rw)
    }

    // ---- predicates --------------------------------------------------------------

    pub fn is_pla(&self) -> bool {
        if self.loops > 0 {
            return false;
        }
        let walls = self.walls();
        if walls.iter().any(|w| w.0) {
            return false;
        }
        let mut wall_of = vec![usize::MAX; self.nc * 4];
        for (i, (_, seq)) in walls.iter().enumerate() {
            for &d in seq {
                if d < 4 * self.nc {
                    wall_of[d] = i;
                }
                let t = self.link_dart(d);
                if t < 4 * self.nc {
                    wall_of[t] = i;
                }
            }
        }
        let mut pairs = BTreeSet::new();
        for c in 0..self.nc {
            let (a, b) = (wall_of[slot(c, 0)], wall_of[slot(c, 1)]);
            if a == b || !pairs.insert((a.min(b), a.max(b))) {
                return false;
            }
        }
        true
    }

    pub fn is_complete_pla(&self) -> bool {
        if !self.is_pla() {
            return false;
        }
        let n = self.ne / 2;
        self.crossing_count() == n * n.saturating_sub(1) / 2
    }

    /// Number of walls separating boundary arcs `f` and `g`.
    pub fn levi_distance(&self, f: usize, g: usize) -> Result<usize, SteinitzError> {
        if !self.is_pla() {
            return Err(SteinitzError::NotPla);
        }
        if f >= self.ne || g >= self.ne {
            return Err(SteinitzError::PatternAbsent("arc out of range".into()));
        }
        Ok(levi_from_pairing(&self.pairing(), f, g))
    }

    // ---- badgons -----------------------------------------------------------------

    /// All embedded badgons, convex at their corners.
    pub fn badgons(&self) -> Vec<Badgon> {
        let (faces, face_of) = self.faces();
        let hole = if self.ne > 0 { Some(face_of[self.fwd(0)]) } else { None };
        let walls = self.walls();
        let mut closed_wall = vec![false; 4 * self.nc];
        for (closed, seq) in &walls {
            for &d in seq {
                if d < 4 * self.nc {
                    closed_wall[d] = *closed;
                    let t = self.link_dart(d);
                    if t < 4 * self.nc {
                        closed_wall[t] = *closed;
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let mut push = |kind: BadgonKind, curve: Vec<usize>, corners: Vec<(usize, usize)>, split: usize| {
            let mut key: Vec<usize> = curve.iter().map(|&d| d.min(self.link_dart(d))).collect();
            key.sort();
            if !seen.insert(key) {
                return;
            }
            let Some(inside) = self.inside(&faces, &face_of, &curve, hole) else { return };
            // Convex: each corner's small angle lies inside.
            for &(_, face_dart) in &corners {
                if !inside.contains(&face_of[face_dart]) {
                    return;
                }
            }
            let on_curve: BTreeSet<usize> = curve.iter().map(|&d| d / 4).collect();
            let mut inner_crossings = BTreeSet::new();
            let mut inner_edges = BTreeSet::new();
            for &f in &inside {
                for &d in &faces[f] {
                    if let Some(c) = self.crossing_of(d) {
                        if !on_curve.contains(&c) {
                            inner_crossings.insert(c);
                        }
                    }
                    let t = self.link_dart(d);
                    if self.port_of_dart(d).is_some() && inside.contains(&face_of[t]) {
                        inner_edges.insert(d.min(t));
                    }
                }
            }
            let curve_edges: BTreeSet<usize> = curve.iter().map(|&d| d.min(self.link_dart(d))).collect();
            let inner_edges = inner_edges.into_iter().filter(|e| !curve_edges.contains(e)).collect();
            out.push(Badgon {
                kind,
                darts: curve,
                corners: corners.iter().map(|x| x.0).collect(),
                faces: inside.into_iter().collect(),
                inner_crossings: inner_crossings.into_iter().collect(),
                inner_edges,
                split,
            });
        };
        // Zerogons: closed walls without self-crossings.
        for (closed, seq) in &walls {
            if !*closed {
                continue;
            }
            let cs: BTreeSet<usize> = seq.iter().map(|&d| d / 4).collect();
            if cs.len() == seq.len() {
                push(BadgonKind::Zerogon, seq.clone(), vec![], 0);
            }
        }
        // Monogons.
        for c in 0..self.nc {
            for x in 0..4 {
                let d0 = slot(c, x);
                let mut curve = vec![d0];
                let mut visited = BTreeSet::from([c]);
                let mut d = d0;
                loop {
                    let t = self.link_dart(d);
                    let Some(c2) = self.crossing_of(t) else { break };
                    if c2 == c {
                        let y = t % 4;
                        if (y + 2) % 4 == x {
                            break;
                        }
                        // Small corner between leaving slot x and arrival slot y.
                        let fd = if (x + 1) % 4 == y { slot(c, y) } else { slot(c, x) };
                        let kind = if closed_wall[d0] { BadgonKind::ClosedMonogon } else { BadgonKind::OpenMonogon };
                        push(kind, curve.clone(), vec![(c, fd)], 0);
                        break;
                    }
                    if !visited.insert(c2) {
                        break;
                    }
                    d = slot(c2, t % 4 + 2);
                    curve.push(d);
                }
            }
        }
        // Bigons: side A from c1 to c2, side B back to c1 along the other strands.
        for c1 in 0..self.nc {
            for a in 0..4 {
                let mut side_a = vec![slot(c1, a)];
                let mut visited = BTreeSet::from([c1]);
                let mut d = slot(c1, a);
                loop {
                    let t = self.link_dart(d);
                    let Some(c2) = self.crossing_of(t) else { break };
                    if c2 == c1 || visited.contains(&c2) {
                        break;
                    }
                    let i = t % 4;
                    for o in [(i + 1) % 4, (i + 3) % 4] {
                        let mut side_b = vec![slot(c2, o)];
                        let mut vb = visited.clone();
                        vb.insert(c2);
                        let mut e = slot(c2, o);
                        loop {
                            let u = self.link_dart(e);
                            let Some(c3) = self.crossing_of(u) else { break };
                            if c3 == c1 {
                                let j = u % 4;
                                if j == (a + 2) % 4 || j == a {
                                    break;
                                }
                                let f1 = if (a + 1) % 4 == j { slot(c1, j) } else { slot(c1, a) };
                                let f2 = if (i + 1) % 4 == o { slot(c2, o) } else { slot(c2, i) };
                                let mut curve = side_a.clone();
                                let split = curve.len();
                                curve.extend(side_b.iter().copied());
                                push(BadgonKind::Bigon, curve, vec![(c1, f1), (c2, f2)], split);
                                break;
                            }
                            if !vb.insert(c3) {
                                break;
                            }
                            e = slot(c3, u % 4 + 2);
                            side_b.push(e);
                        }
                    }
                    visited.insert(c2);
                    d = slot(c2, i + 2);
                    side_a.push(d);
                }
            }
        }
        out
    }

    /// Faces enclosed by a simple closed curve (darts in travel order), the side away
    /// from the boundary. `None` if the curve does not separate.
    fn inside(&self, faces: &[Vec<usize>], face_of: &[usize], curve: &[usize], hole: Option<usize>) -> Option<BTreeSet<usize>> {
        let mut blocked = BTreeSet::new();
        for &d in curve {
            blocked.insert(d);
            blocked.insert(self.link_dart(d));
        }
        let flood = |seeds: Vec<usize>| -> BTreeSet<usize> {
            let mut seen: BTreeSet<usize> = seeds.iter().copied().collect();
            let mut q: VecDeque<usize> = seeds.into_iter().collect();
            while let Some(f) = q.pop_front() {
                for &d in &faces[f] {
                    if blocked.contains(&d) {
                        continue;
                    }
                    let g = face_of[self.link_dart(d)];
                    if seen.insert(g) {
                        q.push_back(g);
                    }
                }
            }
            seen
        };
        let right = flood(curve.iter().map(|&d| face_of[d]).collect());
        let left = flood(curve.iter().map(|&d| face_of[self.link_dart(d)]).collect());
        if !right.is_disjoint(&left) {
            return None;
        }
        let right_out = hole.is_some_and(|h| right.contains(&h));
        let left_out = hole.is_some_and(|h| left.contains(&h));
        match (right_out, left_out) {
            (false, true) => Some(right),
            (true, false) => Some(left),
            (false, false) => Some(if right.len() <= left.len() { right } else { left }),
            (true, true) => None,
        }
    }

    /// The smallest convex badgon; ties by case order, then by darts.
    pub fn find_badgon(&self) -> Option<Badgon> {
        self.badgons().into_iter().min_by(|x, y| {
            (x.faces.len(), x.kind, &x.darts).cmp(&(y.faces.len(), y.kind, &y.darts))
        })
    }

    /// One step towards a PLA, or `None` if already one.
    pub fn next_move(&self) -> Result<Option<Move>, SteinitzError> {
        if self.loops > 0 {
            return Ok(Some(Move { kind: MoveKind::Ste0, darts: vec![] }));
        }
        if let Some(comp) = self.floating_components().first() {
            return Ok(Some(Move { kind: MoveKind::Ste0, darts: vec![slot(comp[0], 0)] }));
        }
        let Some(b) = self.find_badgon() else { return Ok(None) };
        let (faces, face_of) = self.faces();
        if b.is_clear() {
            let f = &faces[b.faces[0]];
            return match (b.kind, f.len()) {
                (BadgonKind::OpenMonogon | BadgonKind::ClosedMonogon, 1) => {
                    Ok(Some(Move { kind: MoveKind::Ste1, darts: vec![f[0]] }))
                }
                (BadgonKind::Bigon, 2) => Ok(Some(Move { kind: MoveKind::Ste2, darts: f.clone() })),
                _ => Err(SteinitzError::Rewire(format!("clear badgon with face of length {}", f.len()))),
            };
        }
        if b.kind != BadgonKind::Bigon {
            return Err(SteinitzError::Rewire("minimal badgon is neither clear nor a bigon".into()));
        }
        // Sweep: the side with fewer inner-wall endpoints, ties by lower first dart.
        let inside: BTreeSet<usize> = b.faces.iter().copied().collect();
        let (s1, s2) = b.darts.split_at(b.split);
        let ends_on = |side: &[usize]| -> usize {
            side.iter().skip(1).filter(|&&d| {
                let c = d / 4;
                (0..4).any(|s| {
                    let x = slot(c, s);
                    inside.contains(&face_of[x]) && inside.contains(&face_of[self.link_dart(x)])
                })
            }).count()
        };
        let mut sides = [s1, s2];
        sides.sort_by_key(|s| (ends_on(s), s[0]));
        for side in sides {
            for &d in side {
                let f = if inside.contains(&face_of[d]) { face_of[d] } else { face_of[self.link_dart(d)] };
                let walk = &faces[f];
                if walk.len() == 3 && self.face_polygon(walk, 3).is_ok() {
                    return Ok(Some(Move { kind: MoveKind::Ste3, darts: walk.clone() }));
                }
            }
        }
        Err(SteinitzError::Rewire("no clear triangle along a minimal bigon".into()))
    }

    /// Reduces to a PLA, returning the result and the moves applied.
    pub fn reduce(&self) -> Result<(DiskDiagram, MoveLog), SteinitzError> {
        let mut cur = self.clone();
        let mut log = Vec::new();
        let cap = 10_000 + 100 * (self.nc + 1) * (self.nc + 1);
        for _ in 0..cap {
            match cur.next_move()? {
                None => return Ok((cur, log)),
                Some(mv) => {
                    cur = cur.apply_move(&mv)?;
                    log.push(mv);
                }
            }
        }
        Err(SteinitzError::Rewire("reduction did not terminate".into()))
    }

    pub fn replay(&self, log: &[Move]) -> Result<DiskDiagram, SteinitzError> {
        let mut cur = self.clone();
        for mv in log {
            cur = cur.apply_move(mv)?;
        }
        Ok(cur)
    }

    // ---- completion and flips ---------------------------------------------------

    /// Attaches squares at consecutive endpoints whose walls do not cross until every
    /// pair of walls crosses.
    pub fn complete(&self) -> Result<DiskDiagram, SteinitzError> {
        if !self.is_pla() {
            return Err(SteinitzError::NotPla);
        }
        let mut cur = self.clone();
        loop {
            let p = cur.pairing();
            let spot = (0..cur.ne).find(|&k| {
                let k1 = (k + 1) % cur.ne;
                p[k] != k1 && !interleaved((k, p[k]), (k1, p[k1]))
            });
            let Some(k) = spot else { return Ok(cur) };
            let k1 = (k + 1) % cur.ne;
            let (ea, eb) = (cur.end_port(k), cur.end_port(k1));
            let (pa, pb) = (cur.link[ea], cur.link[eb]);
            let mut rw = Rewire::new(vec![]);
            use Target::*;
            rw.new.push([Direct(pb), Direct(pa), Direct(ea), Direct(eb)]);
            cur = cur.apply_rewire(&rw)?;
        }
    }

    /// Canonical code with the boundary labeling fixed.
    pub fn labeled_code(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.nc];
        let mut rot = vec![0usize; self.nc];
        let mut order = Vec::new();
        let mut q = VecDeque::new();
        for k in 0..self.ne {
            q.push_back(self.link[self.end_port(k)]);
            while let Some(p) = q.pop_front() {
                if p >= 4 * self.nc || label[p / 4] != usize::MAX {
                    continue;
                }
                let c = p / 4;
                label[c] = order.len();
                rot[c] = p % 4;
                order.push(c);
                for s in 1..4 {
                    q.push_back(self.link[slot(c, rot[c] + s)]);
                }
            }
        }
        let enc = |p: usize| -> usize {
            if p >= 4 * self.nc {
                p - 4 * self.nc
            } else {
                self.ne + 4 * label[p / 4] + (p % 4 + 4 - rot[p / 4]) % 4
            }
        };
        let mut code = vec![self.ne, self.nc, self.loops];
        for k in 0..self.ne {
            code.push(enc(self.link[self.end_port(k)]));
        }
        for &c in &order {
            for s in 0..4 {
                code.push(enc(self.link[slot(c, rot[c] + s)]));
            }
        }
        code
    }
}

fn single(d: &[usize]) -> Result<&usize, SteinitzError> {
    match d {
        [x] => Ok(x),
        _ => Err(SteinitzError::PatternAbsent("expected one dart".into())),
    }
}

/// Whether chords `(a, b)` and `(c, d)` on a circle interleave.
pub fn interleaved(x: (usize, usize), y: (usize, usize)) -> bool {
    let (a, b) = (x.0.min(x.1), x.0.max(x.1));
    let inside = |p: usize| a < p && p < b;
    inside(y.0) != inside(y.1) && y.0 != a && y.0 != b && y.1 != a && y.1 != b
}

/// Walls separating arcs `f` and `g`, given the endpoint pairing.
pub fn levi_from_pairing(partner: &[usize], f: usize, g: usize) -> usize {
    let mut n = 0;
    for p in 0..partner.len() {
        let q = partner[p];
        if p < q {
            let side = |i: usize| p <= i && i < q;
            if side(f) != side(g) {
                n += 1;
            }
        }
    }
    n
}

/// Endpoint pairing from a table of distances between the `2n` boundary arcs.
pub fn funicular_pairing(d: &[Vec<usize>]) -> Result<Vec<usize>, SteinitzError> {
    let m = d.len();
    if d.iter().any(|r| r.len() != m) {
        return Err(SteinitzError::NotDiskLike("table is not square".into()));
    }
    if m % 2 == 1 {
        return Err(SteinitzError::NotDiskLike("odd number of arcs".into()));
    }
    let mut partner = vec![usize::MAX; m];
    for k in 0..m {
        let km = (k + m - 1) % m;
        for j in 0..m {
            if j == k {
                continue;
            }
            let jm = (j + m - 1) % m;
            let v = d[km][jm] as i64 + d[k][j] as i64 - d[km][j] as i64 - d[k][jm] as i64;
            if v < 0 || v % 2 != 0 || v > 2 {
                return Err(SteinitzError::NotDiskLike(format!("funicular value {v}/2 between endpoints {k} and {j}")));
            }
            if v == 2 {
                if partner[k] != usize::MAX {
                    return Err(SteinitzError::NotDiskLike(format!("endpoint {k} has two partners")));
                }
                partner[k] = j;
            }
        }
        if partner[k] == usize::MAX {
            return Err(SteinitzError::NotDiskLike(format!("endpoint {k} has no partner")));
        }
    }
    for k in 0..m {
        if partner[partner[k]] != k {
            return Err(SteinitzError::NotDiskLike("pairing is not symmetric".into()));
        }
    }
    Ok(partner)
}

/// The disk inequality, eikonality and zero diagonal on a cyclic table.
pub fn is_disklike(d: &[Vec<usize>]) -> bool {
    let m = d.len();
    if d.iter().any(|r| r.len() != m) {
        return false;
    }
    for x in 0..m {
        if d[x][x] != 0 {
            return false;
        }
        for y in 0..m {
            if d[x][y] != d[y][x] {
                return false;
            }
            let x1 = (x + 1) % m;
            if (d[x][y] as i64 - d[x1][y] as i64).abs() != 1 {
                return false;
            }
        }
    }
    for x in 0..m {
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    let (x1, y, y1) = ((x + i) % m, (x + j) % m, (x + k) % m);
                    if d[x][y] + d[x1][y1] < d[x][y1] + d[x1][y] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Area of every PLA with boundary distances `d`: interleaved pairs of the pairing.
pub fn min_area_for_distance(d: &[Vec<usize>]) -> Result<usize, SteinitzError> {
    if !is_disklike(d) {
        return Err(SteinitzError::NotDiskLike("disk inequality or eikonality fails".into()));
    }
    let p = funicular_pairing(d)?;
    Ok(count_interleaved(&p))
}

pub fn count_interleaved(partner: &[usize]) -> usize {
    let chords: Vec<(usize, usize)> = (0..partner.len()).filter(|&k| k < partner[k]).map(|k| (k, partner[k])).collect();
    let mut n = 0;
    for i in 0..chords.len() {
        for j in i + 1..chords.len() {
            if interleaved(chords[i], chords[j]) {
                n += 1;
            }
        }
    }
    n
}

/// Shortest sequence of Ste3 flips from `a` to `b` with the boundary labeling fixed.
pub fn ringel_path(a: &DiskDiagram, b: &DiskDiagram) -> Result<Option<Vec<Move>>, SteinitzError> {
    if !a.is_pla() || !b.is_pla() {
        return Err(SteinitzError::NotPla);
    }
    if a.ne != b.ne || a.pairing() != b.pairing() {
        return Ok(None);
    }
    if a.ne > 10 {
        return Err(SteinitzError::Budget(format!("{} walls exceeds the flip-graph budget of 5", a.ne / 2)));
    }
    let target = b.labeled_code();
    let mut prev: HashMap<Vec<usize>, Option<(Vec<usize>, Move)>> = HashMap::new();
    let start = a.labeled_code();
    prev.insert(start.clone(), None);
    let mut q = VecDeque::from([(start, a.clone())]);
    while let Some((code, d)) = q.pop_front() {
        if code == target {
            let mut path = Vec::new();
            let mut cur = code;
            while let Some(Some((p, mv))) = prev.get(&cur).cloned() {
                path.push(mv);
                cur = p;
            }
            path.reverse();
            return Ok(Some(path));
        }
        for t in d.clear_triangles() {
            let mv = Move { kind: MoveKind::Ste3, darts: t.to_vec() };
            let nd = d.apply_move(&mv)?;
            let nc = nd.labeled_code();
            if !prev.contains_key(&nc) {
                prev.insert(nc.clone(), Some((code.clone(), mv)));
                q.push_back((nc, nd));
            }
        }
    }
    Err(SteinitzError::Rewire("same pairing but no flip path found".into()))
}

// ---- chords -------------------------------------------------------------------

fn check_pairing(len: usize, pairing: &[[usize; 2]]) -> Result<Vec<usize>, SteinitzError> {
    if len % 2 == 1 || pairing.len() * 2 != len {
        return Err(SteinitzError::Chords(format!("{} walls cannot pair {len} endpoints", pairing.len())));
    }
    let mut partner = vec![usize::MAX; len];
    for &[a, b] in pairing {
        if a >= len || b >= len || a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
            return Err(SteinitzError::Chords(format!("bad pair [{a}, {b}]")));
        }
        partner[a] = b;
        partner[b] = a;
    }
    Ok(partner)
}

impl Chords {
    pub fn from_json(text: &str) -> Result<Self, SteinitzError> {
        serde_json::from_str(text).map_err(|e| SteinitzError::Chords(e.to_string()))
    }

    /// Builds the arrangement. Without an explicit order, straight chords between points
    /// on a parabola realize it.
    pub fn to_diagram(&self) -> Result<DiskDiagram, SteinitzError> {
        let len = self.boundary_length;
        check_pairing(len, &self.pairing)?;
        let w = self.pairing.len();
        let crosses = |a: usize, b: usize| {
            let (x, y) = (self.pairing[a], self.pairing[b]);
            interleaved((x[0], x[1]), (y[0], y[1]))
        };
        let order = match &self.crossing_order {
            Some(o) => {
                if o.len() != w {
                    return Err(SteinitzError::Chords("crossing_order needs one list per wall".into()));
                }
                for a in 0..w {
                    let want: BTreeSet<usize> = (0..w).filter(|&b| b != a && crosses(a, b)).collect();
                    let got: BTreeSet<usize> = o[a].iter().copied().collect();
                    if got != want || o[a].len() != want.len() {
                        return Err(SteinitzError::Chords(format!("wall {a} must cross exactly {want:?} once each")));
                    }
                }
                o.clone()
            }
            None => straight_order(len, &self.pairing)?,
        };
        let mut xid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for a in 0..w {
            for &b in &order[a] {
                let key = (a.min(b), a.max(b));
                let n = xid.len();
                xid.entry(key).or_insert(n);
            }
        }
        let nc = xid.len();
        let mut link = vec![usize::MAX; 4 * nc + len];
        // Slot of wall `a` heading forward/backward at its crossing with `b`.
        let right_of = |a: usize, p: usize| {
            let [s, t] = self.pairing[a];
            (p + len - s) % len < (t + len - s) % len && p != s
        };
        let slots = |a: usize, b: usize| -> (usize, usize) {
            let c = xid[&(a.min(b), a.max(b))];
            let (lo, hi) = (a.min(b), a.max(b));
            // Slot layout uses the lower wall as reference.
            let b_rtl = right_of(lo, self.pairing[hi][0]);
            let (lf, lb, hf, hb) = if b_rtl { (0, 2, 1, 3) } else { (0, 2, 3, 1) };
            if a == lo {
                (4 * c + lf, 4 * c + lb)
            } else {
                (4 * c + hf, 4 * c + hb)
            }
        };
        let connect = |x: usize, y: usize, link: &mut Vec<usize>| {
            link[x] = y;
            link[y] = x;
        };
        for a in 0..w {
            let [s, t] = self.pairing[a];
            let mut prev = 4 * nc + s;
            for &b in &order[a] {
                let (f, bk) = slots(a, b);
                connect(prev, bk, &mut link);
                prev = f;
            }
            connect(prev, 4 * nc + t, &mut link);
        }
        let d = DiskDiagram { nc, ne: len, link, loops: 0 };
        d.check()?;
        let cls = d.to_map().classify();
        if cls.euler_characteristic != 1 || cls.boundary_components != 1 {
            return Err(SteinitzError::Chords("crossing orders are not realizable in the disk".into()));
        }
        Ok(d)
    }
}

/// Crossing orders of straight chords between points `(x_k, x_k²)`.
fn straight_order(len: usize, pairing: &[[usize; 2]]) -> Result<Vec<Vec<usize>>, SteinitzError> {
    let w = pairing.len();
    for attempt in 0..64u64 {
        // Increasing abscissae with deterministic jitter.
        let xs: Vec<i128> = (0..len as u64)
            .map(|k| (k as i128) * 1000 + ((k.wrapping_mul(2654435761).wrapping_add(attempt * 97)) % 389) as i128)
            .collect();
        let mut order = Vec::with_capacity(w);
        let mut ok = true;
        for a in 0..w {
            let (a1, a2) = (xs[pairing[a][0]], xs[pairing[a][1]]);
            let mut hits: Vec<((i128, i128), usize)> = Vec::new();
            for b in 0..w {
                if b == a || !interleaved((pairing[a][0], pairing[a][1]), (pairing[b][0], pairing[b][1])) {
                    continue;
                }
                let (b1, b2) = (xs[pairing[b][0]], xs[pairing[b][1]]);
                // Lines y = (p+q)x − pq meet at x = (a1a2 − b1b2)/((a1+a2) − (b1+b2)).
                let mut num = a1 * a2 - b1 * b2;
                let mut den = (a1 + a2) - (b1 + b2);
                if den < 0 {
                    num = -num;
                    den = -den;
                }
                hits.push(((num, den), b));
            }
            let forward = a1 < a2;
            hits.sort_by(|x, y| {
                let o = (x.0 .0 * y.0 .1).cmp(&(y.0 .0 * x.0 .1));
                if forward { o } else { o.reverse() }
            });
            if hits.windows(2).any(|p| p[0].0 .0 * p[1].0 .1 == p[1].0 .0 * p[0].0 .1) {
                ok = false;
                break;
            }
            order.push(hits.into_iter().map(|h| h.1).collect());
        }
        if ok {
            return Ok(order);
        }
    }
    Err(SteinitzError::Chords("no generic straight realization found".into()))
}

impl DiskDiagram {
    /// The chords shorthand of a PLA.
    pub fn to_chords(&self) -> Result<Chords, SteinitzError> {
        if !self.is_pla() {
            return Err(SteinitzError::NotPla);
        }
        let walls = self.walls();
        let mut pairing = Vec::new();
        let mut walls_at: Vec<Vec<usize>> = vec![Vec::new(); self.nc];
        for (i, (_, seq)) in walls.iter().enumerate() {
            let s = self.endpoint_of(seq[0]).unwrap();
            let t = self.endpoint_of(self.link_dart(*seq.last().unwrap())).unwrap();
            pairing.push([s, t]);
            for &d in &seq[1..] {
                walls_at[d / 4].push(i);
            }
        }
        let crossing_order = walls
            .iter()
            .enumerate()
            .map(|(i, (_, seq))| seq[1..].iter().map(|&d| *walls_at[d / 4].iter().find(|&&x| x != i).unwrap()).collect())
            .collect();
        Ok(Chords { boundary_length: self.ne, pairing, crossing_order: Some(crossing_order) })
    }
}

// ---- random inputs ----------------------------------------------------------------

pub mod random {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    pub fn pairing<R: Rng>(n: usize, rng: &mut R) -> Vec<[usize; 2]> {
        let mut pts: Vec<usize> = (0..2 * n).collect();
        pts.shuffle(rng);
        pts.chunks(2).map(|c| [c[0].min(c[1]), c[0].max(c[1])]).collect()
    }

    /// A random PLA on `n` walls: random pairing, straight realization, random flips.
    pub fn pla<R: Rng>(n: usize, rng: &mut R) -> DiskDiagram {
        let ch = Chords { boundary_length: 2 * n, pairing: pairing(n, rng), crossing_order: None };
        let mut d = ch.to_diagram().expect("straight chords realize any pairing");
        for _ in 0..rng.gen_range(0..=2 * n) {
            let t = d.clear_triangles();
            if t.is_empty() {
                break;
            }
            let pick = t[rng.gen_range(0..t.len())];
            d = d.apply_move(&Move { kind: MoveKind::Ste3, darts: pick.to_vec() }).expect("flip");
        }
        d
    }

    /// A random disk wallsystem with at most `max_crossings` crossings.
    pub fn disk<R: Rng>(n: usize, max_crossings: usize, rng: &mut R) -> DiskDiagram {
        let mut d = pla(n, rng);
        let target = rng.gen_range(d.crossing_count()..=max_crossings.max(d.crossing_count()));
        let mut guard = 0;
        while d.crossing_count() < target && guard < 200 {
            guard += 1;
            let room = target - d.crossing_count();
            let walls: Vec<usize> = (0..d.dart_count()).filter(|&x| d.port_of_dart(x).is_some()).collect();
            let pick = walls[rng.gen_range(0..walls.len())];
            let choice = rng.gen_range(0..10);
            let next = match choice {
                0..=1 => d.kink(pick),
                2 if room >= 2 => d.ring(pick),
                3 if d.crossing_count() > 0 => d.unmerge(rng.gen_range(0..d.crossing_count())),
                4 => {
                    let t = d.clear_triangles();
                    if t.is_empty() {
                        continue;
                    }
                    d.apply_move(&Move { kind: MoveKind::Ste3, darts: t[rng.gen_range(0..t.len())].to_vec() })
                }
                _ if room >= 2 => {
                    let (faces, face_of) = d.faces();
                    let f = &faces[face_of[pick]];
                    let cands: Vec<usize> = f.iter().copied().filter(|&x| x != pick && d.port_of_dart(x).is_some()).collect();
                    if cands.is_empty() {
                        continue;
                    }
                    d.finger(pick, cands[rng.gen_range(0..cands.len())])
                }
                _ => continue,
            };
            if let Ok(nd) = next {
                if nd.crossing_count() <= max_crossings {
                    d = nd;
                }
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn complete3() -> DiskDiagram {
        Chords { boundary_length: 6, pairing: vec![[0, 3], [1, 4], [2, 5]], crossing_order: None }.to_diagram().unwrap()
    }

    fn cyclic(m: usize) -> Vec<Vec<usize>> {
        (0..m).map(|i| (0..m).map(|j| i.abs_diff(j).min(m - i.abs_diff(j))).collect()).collect()
    }

    #[test]
    fn chords_build_plas() {
        let d = complete3();
        assert_eq!(d.crossing_count(), 3);
        assert!(d.is_pla() && d.is_complete_pla());
        assert_eq!(d.boundary_distances(), cyclic(6));
        let two = Chords { boundary_length: 4, pairing: vec![[0, 1], [2, 3]], crossing_order: None }.to_diagram().unwrap();
        assert!(two.is_pla() && !two.is_complete_pla());
        let ws = d.to_wallsystem();
        assert!(ws.is_isometric_filling().unwrap());
        let back = DiskDiagram::from_wallsystem(&ws).unwrap();
        assert_eq!(back.labeled_code(), d.labeled_code());
    }

    #[test]
    fn one_crossing_round_trip() {
        let ws = crate::wallsystem::fixtures::one_crossing();
        let d = DiskDiagram::from_wallsystem(&ws).unwrap();
        assert_eq!((d.crossing_count(), d.endpoint_count()), (1, 4));
        assert!(d.is_complete_pla());
        let p = d.pairing();
        assert_eq!(p, vec![2, 3, 0, 1]);
        assert_eq!(funicular_pairing(&d.boundary_distances()).unwrap(), p);
    }

    #[test]
    fn badgons_of_simple_shapes() {
        assert!(complete3().find_badgon().is_none());
        // Two chords crossing twice: a clear bigon.
        let d = complete3();
        let two = Chords { boundary_length: 4, pairing: vec![[0, 2], [1, 3]], crossing_order: None }.to_diagram().unwrap();
        let b2 = two.unmerge(0).unwrap();
        let b = b2.find_badgon().unwrap();
        assert_eq!(b.kind, BadgonKind::Bigon);
        assert!(b.is_clear());
        let k = d.kink(d.wall_dart(0)).unwrap();
        let b = k.find_badgon().unwrap();
        assert_eq!(b.kind, BadgonKind::OpenMonogon);
        assert!(b.is_clear());
    }

    #[test]
    fn moves_change_area_as_stated() {
        let two = Chords { boundary_length: 4, pairing: vec![[0, 2], [1, 3]], crossing_order: None }.to_diagram().unwrap();
        let b2 = two.unmerge(0).unwrap();
        assert_eq!(b2.crossing_count(), 2);
        let mv = b2.next_move().unwrap().unwrap();
        assert_eq!(mv.kind, MoveKind::Ste2);
        let r = b2.apply_move(&mv).unwrap();
        assert_eq!(r.crossing_count(), 1);
        assert_eq!(r.boundary_distances(), b2.boundary_distances());
        let s = b2.apply_move(&Move { kind: MoveKind::Sho2, darts: mv.darts.clone() }).unwrap();
        assert_eq!(s.crossing_count(), 0);
        // Ste3 keeps the area; flipping back restores the arrangement.
        let d = complete3();
        let t = d.clear_triangles();
        assert_eq!(t.len(), 1);
        let f = d.apply_move(&Move { kind: MoveKind::Ste3, darts: t[0].to_vec() }).unwrap();
        assert_eq!(f.crossing_count(), 3);
        assert_eq!(f.boundary_distances(), d.boundary_distances());
        assert_ne!(f.labeled_code(), d.labeled_code());
        let t2 = f.clear_triangles();
        let g = f.apply_move(&Move { kind: MoveKind::Ste3, darts: t2[0].to_vec() }).unwrap();
        assert_eq!(g.labeled_code(), d.labeled_code());
        // Ste1 removes a kink.
        let k = d.kink(d.wall_dart(2)).unwrap();
        let mv = k.next_move().unwrap().unwrap();
        assert_eq!(mv.kind, MoveKind::Ste1);
        assert_eq!(k.apply_move(&mv).unwrap().labeled_code(), d.labeled_code());
        assert!(d.apply_move(&Move { kind: MoveKind::Ste1, darts: vec![0] }).is_err());
    }

    #[test]
    fn ring_and_floating_cleanup() {
        let d = complete3();
        let r = d.ring(d.wall_dart(0)).unwrap();
        assert_eq!(r.crossing_count(), 5);
        assert!(!r.is_pla());
        let (out, log) = r.reduce().unwrap();
        assert!(out.is_pla());
        assert_eq!(out.crossing_count(), 3);
        assert_eq!(out.boundary_distances(), d.boundary_distances());
        assert_eq!(r.replay(&log).unwrap(), out);
    }

    #[test]
    fn figure_eight_closed_wall() {
        // A closed wall with one self-crossing, floating: removed by Ste0.
        let ws = crate::wallsystem::fixtures::figure_eight();
        let d = DiskDiagram::from_wallsystem(&ws).unwrap();
        assert_eq!(d.floating_components().len(), 1);
        assert!(!d.is_pla());
        let (out, log) = d.reduce().unwrap();
        assert_eq!(out.crossing_count(), 0);
        assert_eq!(log[0].kind, MoveKind::Ste0);
    }

    #[test]
    fn reduction_of_inflated_hexagon() {
        // An isometric filling of C₆ with extra bigons and kinks reduces to 3 crossings.
        let mut d = complete3();
        d = d.unmerge(0).unwrap();
        d = d.unmerge(2).unwrap();
        d = d.kink(d.wall_dart(4)).unwrap();
        assert!(d.to_wallsystem().is_isometric_filling().unwrap());
        let (out, _) = d.reduce().unwrap();
        assert!(out.is_complete_pla());
        assert_eq!(out.crossing_count(), 3);
    }

    #[test]
    fn random_reductions_preserve_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rand::Rng::gen_range(&mut rng, 1..=4);
            let d = random::disk(n, 10, &mut rng);
            let before = d.boundary_distances();
            let (out, log) = d.reduce().unwrap();
            assert!(out.is_pla());
            assert!(out.crossing_count() <= d.crossing_count());
            assert_eq!(out.boundary_distances(), before);
            assert_eq!(d.replay(&log).unwrap(), out);
            let ws = d.to_wallsystem();
            assert_eq!(ws.map().classify().euler_characteristic, 1);
        }
    }

    #[test]
    fn levi_and_funicular_on_random_plas() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rand::Rng::gen_range(&mut rng, 0..=5);
            let d = random::pla(n, &mut rng);
            assert!(d.is_pla());
            let dist = d.boundary_distances();
            for f in 0..2 * n {
                for g in 0..2 * n {
                    assert_eq!(d.levi_distance(f, g).unwrap(), dist[f][g]);
                }
            }
            assert_eq!(funicular_pairing(&dist).unwrap(), d.pairing());
            assert!(is_disklike(&dist));
            assert_eq!(min_area_for_distance(&dist).unwrap(), d.crossing_count());
        }
    }

    #[test]
    fn funicular_special_cases() {
        assert_eq!(funicular_pairing(&cyclic(6)).unwrap(), vec![3, 4, 5, 0, 1, 2]);
        assert!(funicular_pairing(&vec![vec![0; 4]; 4]).is_err());
        assert!(is_disklike(&cyclic(6)));
        assert!(!is_disklike(&vec![vec![0; 4]; 4]));
        assert_eq!(min_area_for_distance(&cyclic(6)).unwrap(), 3);
        assert_eq!(min_area_for_distance(&cyclic(2)).unwrap(), 0);
    }

    #[test]
    fn completion() {
        let two = Chords { boundary_length: 4, pairing: vec![[0, 1], [2, 3]], crossing_order: None }.to_diagram().unwrap();
        let c = two.complete().unwrap();
        assert!(c.is_complete_pla());
        assert_eq!(c.crossing_count(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rand::Rng::gen_range(&mut rng, 1..=6);
            let d = random::pla(n, &mut rng);
            let c = d.complete().unwrap();
            assert!(c.is_complete_pla());
            assert_eq!(c.crossing_count(), n * (n - 1) / 2);
        }
        let d = complete3();
        assert_eq!(d.complete().unwrap(), d);
    }

    #[test]
    fn ringel_flips() {
        let d = complete3();
        let t = d.clear_triangles()[0];
        let f = d.apply_move(&Move { kind: MoveKind::Ste3, darts: t.to_vec() }).unwrap();
        assert_eq!(ringel_path(&d, &f).unwrap().unwrap().len(), 1);
        assert_eq!(ringel_path(&d, &d).unwrap().unwrap().len(), 0);
        let other = Chords { boundary_length: 6, pairing: vec![[0, 1], [2, 5], [3, 4]], crossing_order: None }.to_diagram().unwrap();
        assert!(ringel_path(&d, &other).unwrap().is_none());
    }

    #[test]
    fn chords_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let d = random::pla(rand::Rng::gen_range(&mut rng, 0..=5), &mut rng);
            let ch = d.to_chords().unwrap();
            let e = ch.to_diagram().unwrap();
            assert_eq!(e.labeled_code(), d.labeled_code());
        }
        let bad = Chords { boundary_length: 4, pairing: vec![[0, 2], [1, 3]], crossing_order: Some(vec![vec![], vec![0]]) };
        assert!(bad.to_diagram().is_err());
    }
}
