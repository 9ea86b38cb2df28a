//! Dart-based combinatorial maps of compact surfaces with boundary.
//!
//! Darts emanate from vertices. `alpha` pairs the two darts of an edge and
//! `sigma` rotates counterclockwise around a vertex, in the frame of that
//! vertex. An edge of sign −1 reverses the frame when crossed, which is how
//! non-orientable surfaces are encoded.
//!
//! Face walks run over states `(dart, ε)`: leave along `dart` while turning
//! in direction `ε` relative to the frame of its vertex. The successor of
//! `(d, ε)` is `(σ^ε'(α d), ε')` with `ε' = ε·λ(d)`. Each face is traversed
//! by two such orbits, one per direction.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Dart = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Interior,
    Boundary,
    /// Transparent edge: part of the cell structure, invisible to lengths.
    Seam,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("invalid map: {0}")]
    Invalid(String),
    #[error("malformed map json: {0}")]
    Json(String),
}

/// The JSON interchange form. Edge ids are `min(d, alpha(d))`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMap {
    pub darts: usize,
    pub alpha: Vec<usize>,
    pub sigma: Vec<usize>,
    #[serde(default)]
    pub edge_sign: BTreeMap<String, i64>,
    #[serde(default)]
    pub boundary_edges: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seam_edges: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Walk states `(dart, ε)` in traversal order.
    pub states: Vec<(Dart, i8)>,
    /// True for the outside of a boundary cycle.
    pub hole: bool,
}

impl Face {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        self.states.iter().map(|s| s.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub boundary_components: usize,
}

/// A validated map. Immutable; derived structure is computed once.
#[derive(Clone, Debug)]
pub struct SurfaceMap {
    alpha: Vec<Dart>,
    sigma: Vec<Dart>,
    sigma_inv: Vec<Dart>,
    sign: Vec<i8>,
    kind: Vec<EdgeKind>,
    vertex_of: Vec<usize>,
    vertices: Vec<Vec<Dart>>,
    faces: Vec<Face>,
    /// Face index of state `(d, ε)` at `2d + (ε < 0)`.
    face_of_state: Vec<usize>,
}

fn state_index(d: Dart, eps: i8) -> usize {
    2 * d + usize::from(eps < 0)
}

fn perm_problems(name: &str, p: &[usize], n: usize, out: &mut Vec<String>) -> bool {
    if p.len() != n {
        out.push(format!("{name} has length {} but there are {n} darts", p.len()));
        return false;
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n {
            out.push(format!("{name} maps to out-of-range dart {x}"));
            return false;
        }
        if seen[x] {
            out.push(format!("{name} is not a bijection"));
            return false;
        }
        seen[x] = true;
    }
    true
}

struct Parsed {
    alpha: Vec<Dart>,
    sigma: Vec<Dart>,
    sign: Vec<i8>,
    kind: Vec<EdgeKind>,
}

fn parse_raw(raw: &RawMap, problems: &mut Vec<String>) -> Option<Parsed> {
    let n = raw.darts;
    let mut ok = perm_problems("alpha", &raw.alpha, n, problems);
    ok &= perm_problems("sigma", &raw.sigma, n, problems);
    if !ok {
        return None;
    }
    let alpha = raw.alpha.clone();
    if (0..n).any(|d| alpha[d] == d) {
        problems.push("alpha not fixed-point-free".into());
        return None;
    }
    if (0..n).any(|d| alpha[alpha[d]] != d) {
        problems.push("alpha is not an involution".into());
        return None;
    }
    let mut sign = vec![1i8; n];
    for (key, &val) in &raw.edge_sign {
        let Ok(e) = key.trim().parse::<usize>() else {
            problems.push(format!("edge_sign key {key:?} is not an edge id"));
            continue;
        };
        if e >= n || alpha[e] < e {
            problems.push(format!("edge_sign key {e} is not an edge id"));
            continue;
        }
        match val {
            1 => {}
            -1 => {
                sign[e] = -1;
                sign[alpha[e]] = -1;
            }
            _ => problems.push(format!("edge_sign of edge {e} must be +1 or -1")),
        }
    }
    let mut kind = vec![EdgeKind::Interior; n];
    for (list, k) in [(&raw.boundary_edges, EdgeKind::Boundary), (&raw.seam_edges, EdgeKind::Seam)] {
        for &e in list {
            if e >= n || alpha[e] < e {
                problems.push(format!("{e} is not an edge id"));
                continue;
            }
            if kind[e] != EdgeKind::Interior {
                problems.push(format!("edge {e} listed twice"));
            }
            kind[e] = k;
            kind[alpha[e]] = k;
        }
    }
    if !problems.is_empty() {
        return None;
    }
    Some(Parsed { alpha, sigma: raw.sigma.clone(), sign, kind })
}

/// Every violated invariant of `raw`; empty iff `SurfaceMap::from_raw` succeeds.
pub fn validate(raw: &RawMap) -> ValidationReport {
    let mut problems = Vec::new();
    if let Some(p) = parse_raw(raw, &mut problems) {
        if let Err(MapError::Invalid(msgs)) = SurfaceMap::build(p.alpha, p.sigma, p.sign, p.kind) {
            problems.extend(msgs.split("; ").map(String::from));
        }
    }
    ValidationReport { problems }
}

impl SurfaceMap {
    pub fn from_raw(raw: &RawMap) -> Result<Self, MapError> {
        let mut problems = Vec::new();
        let p = parse_raw(raw, &mut problems).ok_or_else(|| MapError::Invalid(problems.join("; ")))?;
        Self::build(p.alpha, p.sigma, p.sign, p.kind)
    }

    pub fn from_json(text: &str) -> Result<Self, MapError> {
        let raw: RawMap = serde_json::from_str(text).map_err(|e| MapError::Json(e.to_string()))?;
        Self::from_raw(&raw)
    }

    /// Builds from per-dart data. `sign` and `kind` must agree on both darts of an edge.
    pub fn new(alpha: Vec<Dart>, sigma: Vec<Dart>, sign: Vec<i8>, kind: Vec<EdgeKind>) -> Result<Self, MapError> {
        let n = alpha.len();
        let mut problems = Vec::new();
        perm_problems("alpha", &alpha, n, &mut problems);
        perm_problems("sigma", &sigma, n, &mut problems);
        if sign.len() != n || kind.len() != n {
            problems.push("per-dart arrays disagree in length".into());
        }
        if !problems.is_empty() {
            return Err(MapError::Invalid(problems.join("; ")));
        }
        for d in 0..n {
            if alpha[d] == d || alpha[alpha[d]] != d {
                return Err(MapError::Invalid("alpha not a fixed-point-free involution".into()));
            }
            if sign[d] != sign[alpha[d]] || kind[d] != kind[alpha[d]] || sign[d].abs() != 1 {
                return Err(MapError::Invalid(format!("edge data of dart {d} inconsistent")));
            }
        }
        Self::build(alpha, sigma, sign, kind)
    }

    fn build(alpha: Vec<Dart>, sigma: Vec<Dart>, sign: Vec<i8>, kind: Vec<EdgeKind>) -> Result<Self, MapError> {
        let n = alpha.len();
        let mut problems: Vec<String> = Vec::new();
        let mut sigma_inv = vec![0; n];
        for d in 0..n {
            sigma_inv[sigma[d]] = d;
        }
        let mut vertex_of = vec![usize::MAX; n];
        let mut vertices = Vec::new();
        for d in 0..n {
            if vertex_of[d] != usize::MAX {
                continue;
            }
            let v = vertices.len();
            let mut orbit = Vec::new();
            let mut x = d;
            loop {
                vertex_of[x] = v;
                orbit.push(x);
                x = sigma[x];
                if x == d {
                    break;
                }
            }
            vertices.push(orbit);
        }
        if n > 0 && !connected(&alpha, &sigma) {
            problems.push("map not connected".into());
        }
        // Boundary structure: 0 or 2 boundary darts per vertex, adjacent in rotation.
        let mut hole_states = Vec::new();
        for (v, orbit) in vertices.iter().enumerate() {
            let b: Vec<Dart> = orbit.iter().copied().filter(|&d| kind[d] == EdgeKind::Boundary).collect();
            match b.len() {
                0 => {}
                2 => {
                    let (b1, b2) = (b[0], b[1]);
                    let f = sigma[b1] == b2;
                    let g = sigma[b2] == b1;
                    match (f, g) {
                        (true, false) => hole_states.push((b2, 1i8)),
                        (false, true) => hole_states.push((b1, 1i8)),
                        (true, true) => {}
                        (false, false) => problems.push(format!("boundary darts at vertex {v} are not adjacent in rotation")),
                    }
                }
                k => problems.push(format!("vertex {v} is incident to {k} boundary darts (expected 0 or 2)")),
            }
        }
        if !problems.is_empty() {
            return Err(MapError::Invalid(problems.join("; ")));
        }
        // Face orbits.
        let mut orbit_of = vec![usize::MAX; 2 * n];
        let mut orbits: Vec<Vec<(Dart, i8)>> = Vec::new();
        for start in 0..2 * n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut walk = Vec::new();
            let (mut d, mut e) = (start / 2, if start % 2 == 0 { 1i8 } else { -1i8 });
            loop {
                let s = state_index(d, e);
                if orbit_of[s] != usize::MAX {
                    break;
                }
                orbit_of[s] = id;
                walk.push((d, e));
                let e2 = e * sign[d];
                let a = alpha[d];
                d = if e2 > 0 { sigma[a] } else { sigma_inv[a] };
                e = e2;
            }
            orbits.push(walk);
        }
        // Pair each orbit with its reverse.
        let mut face_of_orbit = vec![usize::MAX; orbits.len()];
        let mut faces = Vec::new();
        for (i, walk) in orbits.iter().enumerate() {
            if face_of_orbit[i] != usize::MAX {
                continue;
            }
            let (d, e) = walk[0];
            let rev = orbit_of[state_index(alpha[d], -e * sign[d])];
            face_of_orbit[i] = faces.len();
            face_of_orbit[rev] = faces.len();
            faces.push(Face { states: walk.clone(), hole: false });
        }
        let face_of_state: Vec<usize> = orbit_of.iter().map(|&o| face_of_orbit[o]).collect();
        for &(d, e) in &hole_states {
            faces[face_of_state[state_index(d, e)]].hole = true;
        }
        // Bare boundary cycles (every vertex of degree two): pick the side of the least dart.
        let bdarts: Vec<Dart> = (0..n).filter(|&d| kind[d] == EdgeKind::Boundary).collect();
        let mut seen_cycle = vec![false; n];
        for &d in &bdarts {
            if seen_cycle[d] {
                continue;
            }
            let cycle = boundary_cycle(&alpha, &sigma, &kind, d);
            let determined = cycle.iter().any(|&x| faces[face_of_state[state_index(x, 1)]].hole || faces[face_of_state[state_index(x, -1)]].hole);
            for &x in &cycle {
                seen_cycle[x] = true;
                seen_cycle[alpha[x]] = true;
            }
            if !determined {
                let m = *cycle.iter().min().unwrap();
                faces[face_of_state[state_index(m, 1)]].hole = true;
            }
        }
        for (i, f) in faces.iter().enumerate() {
            if f.hole && f.states.iter().any(|&(d, _)| kind[d] != EdgeKind::Boundary) {
                problems.push(format!("outside of a boundary cycle (face {i}) runs along a non-boundary edge"));
            }
        }
        for &d in &bdarts {
            if d < alpha[d] {
                let a = faces[face_of_state[state_index(d, 1)]].hole;
                let b = faces[face_of_state[state_index(d, -1)]].hole;
                if a == b {
                    problems.push(format!("boundary edge {d} does not have exactly one outside"));
                }
            }
        }
        if !problems.is_empty() {
            return Err(MapError::Invalid(problems.join("; ")));
        }
        Ok(SurfaceMap { alpha, sigma, sigma_inv, sign, kind, vertex_of, vertices, faces, face_of_state })
    }

    pub fn to_raw(&self) -> RawMap {
        let n = self.dart_count();
        let mut edge_sign = BTreeMap::new();
        let mut boundary_edges = Vec::new();
        let mut seam_edges = Vec::new();
        for e in self.edges() {
            if self.sign[e] < 0 {
                edge_sign.insert(e.to_string(), -1);
            }
            match self.kind[e] {
                EdgeKind::Boundary => boundary_edges.push(e),
                EdgeKind::Seam => seam_edges.push(e),
                EdgeKind::Interior => {}
            }
        }
        RawMap { darts: n, alpha: self.alpha.clone(), sigma: self.sigma.clone(), edge_sign, boundary_edges, seam_edges }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("map serializes")
    }

    pub fn dart_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self, d: Dart) -> Dart {
        self.alpha[d]
    }

    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d]
    }

    pub fn sigma_inv(&self, d: Dart) -> Dart {
        self.sigma_inv[d]
    }

    /// Rotation step in direction `eps` (σ for +1, σ⁻¹ for −1).
    pub fn turn(&self, d: Dart, eps: i8) -> Dart {
        if eps > 0 {
            self.sigma[d]
        } else {
            self.sigma_inv[d]
        }
    }

    pub fn sign(&self, d: Dart) -> i8 {
        self.sign[d]
    }

    pub fn kind(&self, d: Dart) -> EdgeKind {
        self.kind[d]
    }

    pub fn edge_id(&self, d: Dart) -> usize {
        d.min(self.alpha[d])
    }

    /// Edge ids in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dart_count()).filter(move |&d| d < self.alpha[d])
    }

    pub fn edge_count(&self) -> usize {
        self.dart_count() / 2
    }

    pub fn vertex_of(&self, d: Dart) -> usize {
        self.vertex_of[d]
    }

    /// Vertex rotations, each starting at its least dart.
    pub fn vertices(&self) -> &[Vec<Dart>] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_of(&self, d: Dart, eps: i8) -> usize {
        self.face_of_state[state_index(d, eps)]
    }

    /// Successor of a face-walk state.
    pub fn face_step(&self, d: Dart, eps: i8) -> (Dart, i8) {
        let e2 = eps * self.sign[d];
        (self.turn(self.alpha[d], e2), e2)
    }

    /// The two faces along an edge: the side of `(e, +1)` and the side of `(e, −1)`.
    pub fn edge_sides(&self, e: usize) -> (usize, usize) {
        (self.face_of(e, 1), self.face_of(e, -1))
    }

    /// Boundary cycles as lists of boundary darts, one dart per edge, in walk order.
    pub fn boundary_cycles(&self) -> Vec<Vec<Dart>> {
        let n = self.dart_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for d in 0..n {
            if self.kind[d] != EdgeKind::Boundary || seen[d] {
                continue;
            }
            let c = boundary_cycle(&self.alpha, &self.sigma, &self.kind, d);
            for &x in &c {
                seen[x] = true;
                seen[self.alpha[x]] = true;
            }
            out.push(c);
        }
        out
    }

    /// Vertex orientations `o` with `o(u)·o(v)·λ(e) = +1` on every edge, if they exist.
    pub fn orientation(&self) -> Option<Vec<i8>> {
        let mut o = vec![0i8; self.vertex_count()];
        for s in 0..self.vertex_count() {
            if o[s] != 0 {
                continue;
            }
            o[s] = 1;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &d in &self.vertices[v] {
                    let w = self.vertex_of[self.alpha[d]];
                    let want = o[v] * self.sign[d];
                    if o[w] == 0 {
                        o[w] = want;
                        queue.push_back(w);
                    } else if o[w] != want {
                        return None;
                    }
                }
            }
        }
        Some(o)
    }

    pub fn classify(&self) -> Classification {
        let inner = self.faces.iter().filter(|f| !f.hole).count() as i64;
        let holes = self.faces.iter().filter(|f| f.hole).count();
        Classification {
            euler_characteristic: self.vertex_count() as i64 - self.edge_count() as i64 + inner,
            orientable: self.orientation().is_some(),
            boundary_components: holes,
        }
    }

    /// Reverses the rotation at vertex `v` and toggles the signs of its edges.
    pub fn gauge(&self, v: usize) -> SurfaceMap {
        let mut sigma = self.sigma.clone();
        let mut sign = self.sign.clone();
        for &d in &self.vertices[v] {
            sigma[d] = self.sigma_inv[d];
            sign[d] = -sign[d];
            sign[self.alpha[d]] = -sign[self.alpha[d]];
        }
        // Loops at v were toggled twice per dart pair; restore them.
        for &d in &self.vertices[v] {
            if self.vertex_of[self.alpha[d]] == v {
                sign[d] = self.sign[d];
            }
        }
        SurfaceMap::new(self.alpha.clone(), sigma, sign, self.kind.clone()).expect("gauge preserves validity")
    }

    /// Rebuilds with the frame of every vertex flipped so all signs become +1.
    pub fn gauge_to_orientation(&self) -> Option<SurfaceMap> {
        let o = self.orientation()?;
        let n = self.dart_count();
        let mut sigma = self.sigma.clone();
        for d in 0..n {
            if o[self.vertex_of[d]] < 0 {
                sigma[d] = self.sigma_inv[d];
            }
        }
        SurfaceMap::new(self.alpha.clone(), sigma, vec![1; n], self.kind.clone()).ok()
    }

    /// Applies the dart relabeling `d ↦ perm[d]`.
    pub fn relabel(&self, perm: &[Dart]) -> SurfaceMap {
        let n = self.dart_count();
        let mut alpha = vec![0; n];
        let mut sigma = vec![0; n];
        let mut sign = vec![1; n];
        let mut kind = vec![EdgeKind::Interior; n];
        for d in 0..n {
            alpha[perm[d]] = perm[self.alpha[d]];
            sigma[perm[d]] = perm[self.sigma[d]];
            sign[perm[d]] = self.sign[d];
            kind[perm[d]] = self.kind[d];
        }
        SurfaceMap::new(alpha, sigma, sign, kind).expect("relabeling preserves validity")
    }

    /// Removes darts (closed under alpha) from rotations; the rest is renumbered in order.
    pub fn remove_edges(&self, doomed: &[bool]) -> Result<SurfaceMap, MapError> {
        let n = self.dart_count();
        let mut new_id = vec![usize::MAX; n];
        let mut next = 0;
        for d in 0..n {
            if !doomed[d] {
                new_id[d] = next;
                next += 1;
            }
        }
        let mut alpha = vec![0; next];
        let mut sigma = vec![0; next];
        let mut sign = vec![1; next];
        let mut kind = vec![EdgeKind::Interior; next];
        for d in 0..n {
            if doomed[d] {
                continue;
            }
            if doomed[self.alpha[d]] {
                return Err(MapError::Invalid("removed set not closed under alpha".into()));
            }
            let mut s = self.sigma[d];
            while doomed[s] {
                s = self.sigma[s];
            }
            let i = new_id[d];
            alpha[i] = new_id[self.alpha[d]];
            sigma[i] = new_id[s];
            sign[i] = self.sign[d];
            kind[i] = self.kind[d];
        }
        SurfaceMap::new(alpha, sigma, sign, kind)
    }

    /// Lexicographically least BFS encoding over all starting states.
    ///
    /// Equal codes ⟺ isomorphic maps, mirror images and vertex re-gauging included.
    /// Starts are restricted to boundary darts when a boundary exists.
    pub fn canonical_form(&self) -> Vec<u32> {
        let n = self.dart_count();
        if n == 0 {
            return Vec::new();
        }
        let has_boundary = self.kind.contains(&EdgeKind::Boundary);
        let mut best: Option<Vec<u32>> = None;
        let mut scratch = CanonScratch::new(n, self.vertex_count());
        for d in 0..n {
            if has_boundary && self.kind[d] != EdgeKind::Boundary {
                continue;
            }
            for eps in [1i8, -1] {
                let code = self.encode_from(d, eps, &mut scratch, best.as_deref());
                if let Some(c) = code {
                    if best.as_ref().is_none_or(|b| c < *b) {
                        best = Some(c);
                    }
                }
            }
        }
        best.unwrap_or_default()
    }

    pub fn is_isomorphic(&self, other: &SurfaceMap) -> bool {
        self.dart_count() == other.dart_count()
            && self.vertex_count() == other.vertex_count()
            && self.canonical_form() == other.canonical_form()
    }

    /// BFS encoding from state `(d, eps)`; `None` once it exceeds `bound`.
    fn encode_from(&self, d: Dart, eps: i8, s: &mut CanonScratch, bound: Option<&[u32]>) -> Option<Vec<u32>> {
        let n = self.dart_count();
        s.reset();
        let visit = |x: Dart, e: i8, s: &mut CanonScratch| {
            let v = self.vertex_of[x];
            s.orient[v] = e;
            let mut y = x;
            loop {
                s.label[y] = s.order.len() as u32;
                s.order.push(y);
                y = self.turn(y, e);
                if y == x {
                    break;
                }
            }
        };
        visit(d, eps, s);
        let mut i = 0;
        while i < s.order.len() {
            let x = s.order[i];
            let y = self.alpha[x];
            if s.orient[self.vertex_of[y]] == 0 {
                let e = s.orient[self.vertex_of[x]] * self.sign[x];
                visit(y, e, s);
            }
            i += 1;
        }
        let mut code = Vec::with_capacity(3 * n);
        let mut prev_vertex = usize::MAX;
        let mut less = false;
        for (pos, &x) in s.order.iter().enumerate() {
            let v = self.vertex_of[x];
            let deg = if v != prev_vertex { self.vertices[v].len() as u32 } else { 0 };
            prev_vertex = v;
            let y = self.alpha[x];
            let norm = s.orient[v] * s.orient[self.vertex_of[y]] * self.sign[x];
            let kind = match self.kind[x] {
                EdgeKind::Interior => 0,
                EdgeKind::Boundary => 1,
                EdgeKind::Seam => 2,
            };
            let chunk = [deg, s.label[y], kind * 2 + u32::from(norm < 0)];
            for (k, &c) in chunk.iter().enumerate() {
                if !less {
                    if let Some(b) = bound {
                        let bc = b[3 * pos + k];
                        if c > bc {
                            return None;
                        }
                        if c < bc {
                            less = true;
                        }
                    }
                }
                code.push(c);
            }
        }
        Some(code)
    }
}

struct CanonScratch {
    label: Vec<u32>,
    order: Vec<Dart>,
    orient: Vec<i8>,
}

impl CanonScratch {
    fn new(n: usize, v: usize) -> Self {
        CanonScratch { label: vec![0; n], order: Vec::with_capacity(n), orient: vec![0; v] }
    }

    fn reset(&mut self) {
        self.order.clear();
        self.orient.iter_mut().for_each(|o| *o = 0);
    }
}

fn connected(alpha: &[Dart], sigma: &[Dart]) -> bool {
    let n = alpha.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(d) = stack.pop() {
        for x in [alpha[d], sigma[d]] {
            if !seen[x] {
                seen[x] = true;
                count += 1;
                stack.push(x);
            }
        }
    }
    // sigma-orbits are closed under sigma; reaching every dart through alpha and sigma
    // forward steps suffices because both are permutations of a finite set.
    count == n
}

/// Walks a boundary cycle starting along dart `d`, one dart per edge.
fn boundary_cycle(alpha: &[Dart], sigma: &[Dart], kind: &[EdgeKind], d: Dart) -> Vec<Dart> {
    let mut out = vec![d];
    let mut x = d;
    loop {
        let arrive = alpha[x];
        let mut y = sigma[arrive];
        while y != arrive && kind[y] != EdgeKind::Boundary {
            y = sigma[y];
        }
        if y == d || y == arrive || out.len() > alpha.len() {
            break;
        }
        out.push(y);
        x = y;
    }
    out
}

/// Result of gluing polygons side to side.
#[derive(Clone, Debug)]
pub struct PolygonGluing {
    pub map: SurfaceMap,
    /// Dart at the start corner of each side.
    pub side_start: Vec<Dart>,
    /// Dart at the end corner of each side.
    pub side_end: Vec<Dart>,
    /// Offset of the first side of each polygon in the side numbering.
    pub offsets: Vec<usize>,
}

/// Glues polygons of the given sizes. Side `offsets[f] + i` runs from corner `i`
/// to corner `i+1` of polygon `f`, counterclockwise in the polygon's own frame.
/// `partner[s] = Some((t, twisted))` glues side `s` to side `t`; an untwisted gluing
/// identifies the start of `s` with the end of `t`. Unglued sides become boundary.
pub fn glue_polygons(sizes: &[usize], partner: &[Option<(usize, bool)>]) -> Result<PolygonGluing, MapError> {
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut total = 0;
    for &k in sizes {
        if k == 0 {
            return Err(MapError::Invalid("polygon with no sides".into()));
        }
        offsets.push(total);
        total += k;
    }
    if partner.len() != total {
        return Err(MapError::Invalid(format!("expected {total} side entries, got {}", partner.len())));
    }
    let mut owner = vec![(0, 0); total];
    for (f, &k) in sizes.iter().enumerate() {
        for i in 0..k {
            owner[offsets[f] + i] = (f, i);
        }
    }
    let side = |f: usize, i: usize| offsets[f] + i % sizes[f];
    let mut side_start = vec![usize::MAX; total];
    let mut side_end = vec![usize::MAX; total];
    let mut kind = Vec::new();
    for s in 0..total {
        match partner[s] {
            Some((t, tw)) => {
                if t >= total || t == s || partner[t] != Some((s, tw)) {
                    return Err(MapError::Invalid(format!("gluing of side {s} is not a symmetric pairing")));
                }
                if t < s {
                    continue;
                }
                let e = kind.len();
                kind.push(EdgeKind::Interior);
                kind.push(EdgeKind::Interior);
                side_start[s] = e;
                side_end[s] = e + 1;
                if tw {
                    side_start[t] = e;
                    side_end[t] = e + 1;
                } else {
                    side_start[t] = e + 1;
                    side_end[t] = e;
                }
            }
            None => {
                let e = kind.len();
                kind.push(EdgeKind::Boundary);
                kind.push(EdgeKind::Boundary);
                side_start[s] = e;
                side_end[s] = e + 1;
            }
        }
    }
    let n = kind.len();
    // Corner (f, i) joins the start dart of side i to the end dart of side i−1.
    // Incidences: (corner index = side index of side i, role start=true/end=false).
    let mut inc: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    let corner_start = |c: usize| side_start[c];
    let corner_end = |c: usize| {
        let (f, i) = owner[c];
        side_end[side(f, i + sizes[f] - 1)]
    };
    for c in 0..total {
        inc[corner_start(c)].push((c, true));
        inc[corner_end(c)].push((c, false));
    }
    let mut sigma = vec![usize::MAX; n];
    let mut agree = vec![0i8; total];
    let mut placed = vec![false; n];
    let mut order: Vec<Dart> = (0..n).filter(|&d| inc[d].len() == 1).collect();
    order.extend((0..n).filter(|&d| inc[d].len() != 1));
    for d0 in order {
        if placed[d0] {
            continue;
        }
        if inc[d0].len() > 2 {
            return Err(MapError::Invalid("dart with more than two corners".into()));
        }
        let excluded = if inc[d0].len() == 2 { Some(inc[d0][1]) } else { None };
        let mut seq = vec![d0];
        let mut cur = d0;
        let mut came = excluded;
        loop {
            let next = inc[cur].iter().copied().find(|&x| Some(x) != came);
            let Some((c, role)) = next else { break };
            let other = if role { corner_end(c) } else { corner_start(c) };
            agree[c] = if role { 1 } else { -1 };
            came = Some((c, !role));
            if other == d0 && (came == excluded || excluded.is_none()) {
                break;
            }
            if placed[other] || seq.contains(&other) {
                return Err(MapError::Invalid("vertex link is not a path or cycle".into()));
            }
            seq.push(other);
            cur = other;
        }
        for (k, &x) in seq.iter().enumerate() {
            placed[x] = true;
            sigma[x] = seq[(k + 1) % seq.len()];
        }
    }
    let mut alpha = vec![0; n];
    for e in (0..n).step_by(2) {
        alpha[e] = e + 1;
        alpha[e + 1] = e;
    }
    let mut sign = vec![1i8; n];
    for s in 0..total {
        if side_start[s] % 2 == 0 && side_end[s] == side_start[s] + 1 {
            let (f, i) = owner[s];
            let v = agree[s] * agree[side(f, i + 1)];
            sign[side_start[s]] = v;
            sign[side_end[s]] = v;
        }
    }
    let map = SurfaceMap::new(alpha, sigma, sign, kind)?;
    Ok(PolygonGluing { map, side_start, side_end, offsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square_disk() -> SurfaceMap {
        glue_polygons(&[4], &[None; 4]).unwrap().map
    }

    fn square_torus() -> SurfaceMap {
        glue_polygons(&[4], &[Some((2, false)), Some((3, false)), Some((0, false)), Some((1, false))]).unwrap().map
    }

    fn square_mobius() -> SurfaceMap {
        glue_polygons(&[4], &[None, Some((3, true)), None, Some((1, true))]).unwrap().map
    }

    #[test]
    fn square_disk_is_valid_with_one_inner_face() {
        let m = square_disk();
        assert!(validate(&m.to_raw()).is_valid());
        assert_eq!(m.faces().len(), 2);
        assert_eq!(m.faces().iter().filter(|f| f.hole).count(), 1);
        assert!(m.faces().iter().all(|f| f.len() == 4));
        assert_eq!(m.classify(), Classification { euler_characteristic: 1, orientable: true, boundary_components: 1 });
    }

    #[test]
    fn alpha_fixed_point_is_reported() {
        let raw = RawMap { darts: 2, alpha: vec![0, 1], sigma: vec![1, 0], ..Default::default() };
        let r = validate(&raw);
        assert!(r.problems.iter().any(|p| p.contains("alpha not fixed-point-free")));
    }

    #[test]
    fn disconnected_squares_are_reported() {
        let a = square_disk().to_raw();
        let n = a.darts;
        let shift = |v: &Vec<usize>| v.iter().map(|x| x + n).collect::<Vec<_>>();
        let mut raw = a.clone();
        raw.darts = 2 * n;
        raw.alpha.extend(shift(&a.alpha));
        raw.sigma.extend(shift(&a.sigma));
        raw.boundary_edges.extend(a.boundary_edges.iter().map(|x| x + n));
        let r = validate(&raw);
        assert!(r.problems.iter().any(|p| p == "map not connected"), "{r:?}");
    }

    #[test]
    fn square_torus_has_one_face() {
        let m = square_torus();
        assert_eq!(m.faces().len(), 1);
        assert_eq!(m.classify(), Classification { euler_characteristic: 0, orientable: true, boundary_components: 0 });
    }

    #[test]
    fn square_mobius_band() {
        let m = square_mobius();
        // Hand count: sides 1 and 3 become one edge, so 3 edges and 2 vertices;
        // one square and one outside.
        assert_eq!(m.dart_count(), 6);
        assert_eq!(m.vertex_count(), 2);
        assert_eq!(m.faces().len(), 2);
        assert_eq!(m.classify(), Classification { euler_characteristic: 0, orientable: false, boundary_components: 1 });
    }

    #[test]
    fn json_round_trip() {
        let m = square_mobius();
        let back = SurfaceMap::from_json(&m.to_json()).unwrap();
        assert_eq!(back.to_raw(), m.to_raw());
    }

    #[test]
    fn mirror_and_gauge_are_isomorphic() {
        let m = square_mobius();
        let g = m.gauge(0).gauge(1);
        assert!(m.is_isomorphic(&g));
        assert!(!m.is_isomorphic(&square_torus()));
    }

    fn glued_strip(k: usize, twist: bool, close: bool) -> SurfaceMap {
        // k squares in a row; side 1 of square i glued to side 3 of square i+1.
        let mut p = vec![None; 4 * k];
        for i in 0..k.saturating_sub(1) {
            p[4 * i + 1] = Some((4 * (i + 1) + 3, false));
            p[4 * (i + 1) + 3] = Some((4 * i + 1, false));
        }
        if close {
            p[4 * (k - 1) + 1] = Some((3, twist));
            p[3] = Some((4 * (k - 1) + 1, twist));
        }
        glue_polygons(&vec![4; k], &p).unwrap().map
    }

    #[test]
    fn annulus_and_mobius_strips() {
        let a = glued_strip(3, false, true);
        assert_eq!(a.classify(), Classification { euler_characteristic: 0, orientable: true, boundary_components: 2 });
        let b = glued_strip(3, true, true);
        assert_eq!(b.classify(), Classification { euler_characteristic: 0, orientable: false, boundary_components: 1 });
        let c = glued_strip(3, false, false);
        assert_eq!(c.classify(), Classification { euler_characteristic: 1, orientable: true, boundary_components: 1 });
    }

    fn capped(m: &SurfaceMap) -> i64 {
        let c = m.classify();
        c.euler_characteristic + c.boundary_components as i64
    }

    proptest! {
        #[test]
        fn classify_invariant_under_relabeling(seed in any::<u64>(), which in 0usize..4) {
            use rand::{seq::SliceRandom, SeedableRng};
            let m = [square_torus(), square_mobius(), glued_strip(3, true, true), glued_strip(4, false, false)][which].clone();
            let mut perm: Vec<usize> = (0..m.dart_count()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let r = m.relabel(&perm);
            prop_assert_eq!(r.classify(), m.classify());
            prop_assert_eq!(r.faces().len(), m.faces().len());
            prop_assert!(r.is_isomorphic(&m));
        }

        #[test]
        fn gauge_preserves_faces_and_class(v in 0usize..8, which in 0usize..3) {
            let m = [square_mobius(), glued_strip(3, true, true), glued_strip(2, false, true)][which].clone();
            let v = v % m.vertex_count();
            let g = m.gauge(v);
            prop_assert_eq!(g.faces().len(), m.faces().len());
            prop_assert_eq!(g.classify(), m.classify());
            prop_assert_eq!(capped(&g), capped(&m));
        }
    }
}
