//! Exhaustive census of small isometric disk fillings.
//!
//! Disks are generated directly as gluings of `p`-gons: sides are decided in
//! breadth-first order, a branch dies as soon as it cannot reach the vertex count of
//! a disk, and each isomorphism class (mirror images included) is kept once, from
//! its lexicographically least breadth-first code.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fine::{fine_ends, FineJson, FineSurface};
use crate::squarecell::{SquareCelledSurface, SquareJson};
use crate::wallsystem::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid search request: {0}")]
    Request(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_area: usize,
    /// Search nodes allowed over the whole run.
    pub max_nodes: u64,
}

impl Budget {
    pub fn area(max_area: usize) -> Self {
        Budget { max_area, max_nodes: 50_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Square,
    Fine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Witness {
    /// The two boundary edges of a length-2 cycle folded onto each other.
    Degenerate,
    Square { surface: SquareJson },
    Fine { surface: FineJson },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub area: usize,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub kind: Kind,
    /// `[2n]` for squares, `[a, b]` for fine cycles.
    pub boundary: Vec<usize>,
    pub max_area: usize,
    /// Möbius-type gluings were searched instead of disks; no completeness claim.
    pub moebius: bool,
    /// False when the node budget ran out first.
    pub complete: bool,
    pub nodes: u64,
    pub entries: Vec<CensusEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacReport {
    pub kind: Kind,
    pub boundary: Vec<usize>,
    pub bound: i64,
    pub minimum: Option<usize>,
    pub counts: BTreeMap<usize, usize>,
    pub complete: bool,
    pub witnesses: Vec<Witness>,
}

impl FacReport {
    /// The census was complete and nothing beat the bound, which some filling attains.
    pub fn confirms_bound(&self) -> bool {
        self.complete && self.minimum.map(|m| m as i64) == Some(self.bound)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Minimum and witnesses of a census, measured against the filling area bound.
pub fn fac_report(c: &Census) -> FacReport {
    let bound = match c.kind {
        Kind::Square => {
            let n = c.boundary[0] as i64 / 2;
            n * (n - 1) / 2
        }
        Kind::Fine => {
            let (a, b) = (c.boundary[0] as i64, c.boundary[1] as i64);
            2 * a * b - a - b
        }
    };
    let mut counts = BTreeMap::new();
    for e in &c.entries {
        *counts.entry(e.area).or_insert(0) += 1;
    }
    let minimum = counts.keys().next().copied();
    let witnesses = c.entries.iter().filter(|e| Some(e.area) == minimum).map(|e| e.witness.clone()).collect();
    FacReport { kind: c.kind, boundary: c.boundary.clone(), bound, minimum, counts, complete: c.complete, witnesses }
}

type Table = Vec<Option<(usize, bool)>>;

struct Gen<'a> {
    p: usize,
    m: usize,
    l: usize,
    moebius: bool,
    target_v: usize,
    nodes: &'a AtomicU64,
    limit: u64,
    out_of_budget: &'a AtomicBool,
    found: Vec<Table>,
}

/// Corners `(start, end)` of side `s` of a `p`-gon.
fn corners(p: usize, s: usize) -> (usize, usize) {
    (s, p * (s / p) + (s % p + 1) % p)
}

fn vertex_classes(p: usize, table: &[Option<Option<(usize, bool)>>], faces: usize) -> usize {
    let n = p * faces;
    let mut uf = UnionFind::new(n);
    let mut classes = n;
    for s in 0..n {
        if let Some(Some((t, tw))) = table[s] {
            if s < t {
                let ((a0, a1), (b0, b1)) = (corners(p, s), corners(p, t));
                let pairs = if tw { [(a0, b0), (a1, b1)] } else { [(a0, b1), (a1, b0)] };
                for (x, y) in pairs {
                    if uf.union(x, y) {
                        classes -= 1;
                    }
                }
            }
        }
    }
    classes
}

impl Gen<'_> {
    fn run(&mut self) {
        let mut table = vec![None; self.p * self.m];
        self.rec(&mut table, 1, 0);
    }

    fn rec(&mut self, table: &mut Vec<Option<Option<(usize, bool)>>>, k: usize, b: usize) {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.limit {
            self.out_of_budget.store(true, Ordering::Relaxed);
            return;
        }
        let (p, m) = (self.p, self.m);
        let open = (0..p * k).filter(|&s| table[s].is_none()).count();
        let fresh = (m - k) * (p - 2);
        if b > self.l || b + open + fresh < self.l {
            return;
        }
        if vertex_classes(p, table, k) + fresh < self.target_v {
            return;
        }
        let Some(s) = (0..p * k).find(|&s| table[s].is_none()) else {
            if k == m && b == self.l && vertex_classes(p, table, k) == self.target_v {
                let t: Table = table.iter().map(|x| x.unwrap()).collect();
                if self.accept(&t) {
                    self.found.push(t);
                }
            }
            return;
        };
        if b < self.l {
            table[s] = Some(None);
            self.rec(table, k, b + 1);
        }
        for t in s + 1..p * k {
            if table[t].is_some() {
                continue;
            }
            for tw in [false, true] {
                if tw && !self.moebius {
                    continue;
                }
                table[s] = Some(Some((t, tw)));
                table[t] = Some(Some((s, tw)));
                self.rec(table, k, b);
                table[t] = None;
            }
        }
        if k < m {
            let t = p * k;
            table[s] = Some(Some((t, false)));
            table[t] = Some(Some((s, false)));
            self.rec(table, k + 1, b);
            table[t] = None;
        }
        table[s] = None;
    }

    fn accept(&self, t: &Table) -> bool {
        if canonical_code(self.p, t) != bfs_code(self.p, t, 0, 1) {
            return false;
        }
        if !self.moebius {
            return true;
        }
        // Euler characteristic 0 with one boundary cycle and a twist is a Möbius band.
        let sq = SquareCelledSurface::from_partners(t.clone());
        matches!(sq, Ok(s) if s.boundary_cycles().len() == 1) && t.iter().flatten().any(|&(_, tw)| tw)
    }
}

/// Breadth-first code from side `root` walking every polygon in direction `dir` (±1).
fn bfs_code(p: usize, t: &Table, root: usize, dir: i64) -> Vec<u32> {
    let m = t.len() / p;
    let mut label = vec![usize::MAX; m];
    let mut entry = vec![0usize; m];
    let mut sense = vec![0i64; m];
    let mut order = vec![root / p];
    label[root / p] = 0;
    entry[root / p] = root % p;
    sense[root / p] = dir;
    let pos = |entry: usize, sense: i64, i: usize| ((i as i64 - entry as i64) * sense).rem_euclid(p as i64) as usize;
    let mut code = Vec::with_capacity(2 * p * m);
    let mut qi = 0;
    while qi < order.len() {
        let q = order[qi];
        qi += 1;
        for j in 0..p {
            let i = (entry[q] as i64 + sense[q] * j as i64).rem_euclid(p as i64) as usize;
            match t[p * q + i] {
                None => code.extend([u32::MAX, 0]),
                Some((o, tw)) => {
                    let r = o / p;
                    if label[r] == usize::MAX {
                        label[r] = order.len();
                        order.push(r);
                        entry[r] = o % p;
                        // The new polygon is walked so that this gluing reads untwisted.
                        sense[r] = if tw { -sense[q] } else { sense[q] };
                    }
                    let rel = tw != (sense[q] != sense[r]);
                    code.extend([(p * label[r] + pos(entry[r], sense[r], o % p)) as u32, rel as u32]);
                }
            }
        }
    }
    code
}

fn canonical_code(p: usize, t: &Table) -> Vec<u32> {
    (0..t.len()).flat_map(|r| [(r, 1), (r, -1)]).map(|(r, d)| bfs_code(p, t, r, d)).min().unwrap()
}

fn target_vertices(p: usize, m: usize, l: usize, moebius: bool) -> Option<usize> {
    if (p * m + l) % 2 != 0 {
        return None;
    }
    let e = (p * m + l) / 2;
    let chi = if moebius { 0 } else { 1 };
    (1 + e + chi).checked_sub(m + 1)
}

/// All disks (or Möbius bands) glued from `m` `p`-gons with `l` boundary sides.
fn polygon_maps(p: usize, m: usize, l: usize, moebius: bool, nodes: &AtomicU64, limit: u64, oob: &AtomicBool) -> Vec<Table> {
    let Some(target_v) = target_vertices(p, m, l, moebius) else { return Vec::new() };
    if m == 0 {
        return Vec::new();
    }
    let mut g = Gen { p, m, l, moebius, target_v, nodes, limit, out_of_budget: oob, found: Vec::new() };
    g.run();
    g.found
}

/// Isometric square-celled fillings of the cycle of length `2n`, up to isomorphism.
pub fn enumerate_disk_fillings(n: usize, budget: Budget) -> Result<Census, SearchError> {
    enumerate_square(n, budget, false)
}

/// As [`enumerate_disk_fillings`], over Möbius-type gluings instead of disks.
pub fn enumerate_moebius_fillings(n: usize, budget: Budget) -> Result<Census, SearchError> {
    enumerate_square(n, budget, true)
}

fn enumerate_square(n: usize, budget: Budget, moebius: bool) -> Result<Census, SearchError> {
    if n == 0 {
        return Err(SearchError::Request("boundary cycle needs at least 2 edges".into()));
    }
    let l = 2 * n;
    let nodes = AtomicU64::new(0);
    let oob = AtomicBool::new(false);
    let mut entries: Vec<(usize, Vec<u32>, CensusEntry)> = (1..=budget.max_area)
        .into_par_iter()
        .flat_map_iter(|m| {
            let maps = polygon_maps(4, m, l, moebius, &nodes, budget.max_nodes, &oob);
            maps.into_iter().filter_map(move |t| {
                let s = SquareCelledSurface::from_partners(t.clone()).ok()?;
                if !moebius && !s.is_isometric_filling().ok()? {
                    return None;
                }
                let code = canonical_code(4, &t);
                Some((m, code, CensusEntry { area: m, witness: Witness::Square { surface: s.to_square_json() } }))
            })
        })
        .collect();
    if n == 1 && !moebius {
        entries.push((0, Vec::new(), CensusEntry { area: 0, witness: Witness::Degenerate }));
    }
    entries.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(Census {
        kind: Kind::Square,
        boundary: vec![l],
        max_area: budget.max_area,
        moebius,
        complete: !oob.load(Ordering::Relaxed),
        nodes: nodes.load(Ordering::Relaxed),
        entries: entries.into_iter().map(|e| e.2).collect(),
    })
}

/// Isometric fine disk fillings of `C(a, b)`: a boundary cycle with `a` edges pointing
/// one way around and `b` the other.
pub fn enumerate_fine_disk_fillings(a: usize, b: usize, budget: Budget) -> Result<Census, SearchError> {
    if a == 0 || b == 0 {
        return Err(SearchError::Request(format!("C({a},{b}) is degenerate")));
    }
    if a > 3 || b > 3 {
        return Err(SearchError::Request("fine searches stop at a, b ≤ 3".into()));
    }
    let (a, b) = (a.min(b), a.max(b));
    let l = a + b;
    let nodes = AtomicU64::new(0);
    let oob = AtomicBool::new(false);
    let mut entries: Vec<(usize, Vec<u32>, CensusEntry)> = (1..=budget.max_area)
        .into_par_iter()
        .flat_map_iter(|m| {
            let maps = polygon_maps(3, m, l, false, &nodes, budget.max_nodes, &oob);
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for t in maps {
                for (surface, code) in fine_orientations(&t) {
                    if surface.boundary_lengths() != Ok((a, b)) || surface.is_isometric_filling() != Ok(true) {
                        continue;
                    }
                    if seen.insert(code.clone()) {
                        out.push((m, code, CensusEntry { area: m, witness: Witness::Fine { surface: surface.to_fine_json() } }));
                    }
                }
            }
            out
        })
        .collect();
    if (a, b) == (1, 1) {
        entries.push((0, Vec::new(), CensusEntry { area: 0, witness: Witness::Degenerate }));
    }
    entries.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    Ok(Census {
        kind: Kind::Fine,
        boundary: vec![a, b],
        max_area: budget.max_area,
        moebius: false,
        complete: !oob.load(Ordering::Relaxed),
        nodes: nodes.load(Ordering::Relaxed),
        entries: entries.into_iter().map(|e| e.2).collect(),
    })
}

/// Every acyclic orientation of a triangle map's edges as a fine surface, with a code
/// that is equal for isomorphic results.
fn fine_orientations(t: &Table) -> Vec<(FineSurface, Vec<u32>)> {
    let n = t.len();
    let mut uf = UnionFind::new(n);
    for s in 0..n {
        if let Some((o, _)) = t[s] {
            let ((a0, a1), (b0, b1)) = (corners(3, s), corners(3, o));
            uf.union(a0, b1);
            uf.union(a1, b0);
        }
    }
    let mut vid = BTreeMap::new();
    let vert: Vec<usize> = (0..n).map(|c| {
        let r = uf.find(c);
        let k = vid.len();
        *vid.entry(r).or_insert(k)
    }).collect();
    let nv = vid.len();
    if (0..n / 3).any(|q| vert[3 * q] == vert[3 * q + 1] || vert[3 * q + 1] == vert[3 * q + 2] || vert[3 * q] == vert[3 * q + 2]) {
        return Vec::new();
    }
    let mut edge_of = vec![usize::MAX; n];
    let mut ends = Vec::new();
    for s in 0..n {
        if edge_of[s] == usize::MAX {
            edge_of[s] = ends.len();
            if let Some((o, _)) = t[s] {
                edge_of[o] = ends.len();
            }
            let (c0, c1) = corners(3, s);
            ends.push((vert[c0], vert[c1]));
        }
    }
    let ne = ends.len();
    let mut out = Vec::new();
    for mask in 0u64..1 << ne {
        let dir: Vec<(usize, usize)> = (0..ne).map(|e| if mask >> e & 1 == 0 { ends[e] } else { (ends[e].1, ends[e].0) }).collect();
        let Some(rank) = topological_rank(nv, &dir) else { continue };
        let mut tris = Vec::with_capacity(n / 3);
        let mut fine_side = vec![0usize; n];
        for q in 0..n / 3 {
            let mut cs = [0, 1, 2];
            cs.sort_by_key(|&i| rank[vert[3 * q + i]]);
            tris.push([vert[3 * q + cs[0]], vert[3 * q + cs[1]], vert[3 * q + cs[2]]]);
            for k in 0..3 {
                let (x, y) = fine_ends(k);
                let pair = [cs[x], cs[y]];
                let i = (0..3).find(|&i| pair.contains(&i) && pair.contains(&((i + 1) % 3))).unwrap();
                fine_side[3 * q + i] = 3 * q + k;
            }
        }
        let gluings: Vec<[usize; 2]> = (0..n).filter_map(|s| t[s].filter(|&(o, _)| s < o).map(|(o, _)| [fine_side[s], fine_side[o]])).collect();
        let Ok(surface) = FineSurface::new(tris, &gluings, None, None) else { continue };
        // Orientation bits in side order make the map code a code of the fine disk.
        let code = (0..n)
            .flat_map(|r| [(r, 1i64), (r, -1)])
            .map(|(r, d)| {
                let mut c = bfs_code(3, t, r, d);
                c.extend(side_walk(t, r, d).iter().map(|&s| {
                    let (c0, _) = corners(3, s);
                    let forward = (dir[edge_of[s]].0 == vert[c0]) == (d > 0);
                    forward as u32
                }));
                c
            })
            .min()
            .unwrap();
        out.push((surface, code));
    }
    out
}

/// Sides in the order [`bfs_code`] visits them.
fn side_walk(t: &Table, root: usize, dir: i64) -> Vec<usize> {
    let p = 3;
    let m = t.len() / p;
    let mut seen = vec![false; m];
    let mut entry = vec![0usize; m];
    let mut sense = vec![0i64; m];
    let mut order = vec![root / p];
    seen[root / p] = true;
    entry[root / p] = root % p;
    sense[root / p] = dir;
    let mut out = Vec::new();
    let mut qi = 0;
    while qi < order.len() {
        let q = order[qi];
        qi += 1;
        for j in 0..p {
            let i = (entry[q] as i64 + sense[q] * j as i64).rem_euclid(p as i64) as usize;
            out.push(p * q + i);
            if let Some((o, tw)) = t[p * q + i] {
                let r = o / p;
                if !seen[r] {
                    seen[r] = true;
                    order.push(r);
                    entry[r] = o % p;
                    sense[r] = if tw { -sense[q] } else { sense[q] };
                }
            }
        }
    }
    out
}

fn topological_rank(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0; n];
    let mut out = vec![Vec::new(); n];
    for &(a, b) in edges {
        out[a].push(b);
        indeg[b] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut rank = vec![0; n];
    let mut next = 0;
    while let Some(v) = stack.pop() {
        rank[v] = next;
        next += 1;
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    (next == n).then_some(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steinitz::DiskDiagram;

    fn min_area(c: &Census) -> Option<usize> {
        fac_report(c).minimum
    }

    #[test]
    fn disk_counts_match_known_small_cases() {
        let nodes = AtomicU64::new(0);
        let oob = AtomicBool::new(false);
        // One square, boundary 4: the bare square only.
        assert_eq!(polygon_maps(4, 1, 4, false, &nodes, u64::MAX, &oob).len(), 1);
        // One triangle: the bare triangle.
        assert_eq!(polygon_maps(3, 1, 3, false, &nodes, u64::MAX, &oob).len(), 1);
        // Two triangles with boundary 4: glued along one side.
        assert_eq!(polygon_maps(3, 2, 4, false, &nodes, u64::MAX, &oob).len(), 1);
        // A folded square has boundary 2.
        assert_eq!(polygon_maps(4, 1, 2, false, &nodes, u64::MAX, &oob).len(), 1);
    }

    #[test]
    fn square_minima() {
        let want = [(1, 0), (2, 1), (3, 3)];
        for (n, m) in want {
            let c = enumerate_disk_fillings(n, Budget::area(m + 1)).unwrap();
            assert!(c.complete);
            let r = fac_report(&c);
            assert_eq!(r.minimum, Some(m), "n = {n}");
            assert!(r.confirms_bound());
        }
    }

    #[test]
    fn enumerated_fillings_reduce_to_complete_arrangements() {
        let c = enumerate_disk_fillings(3, Budget::area(4)).unwrap();
        for e in &c.entries {
            let Witness::Square { surface } = &e.witness else { panic!() };
            let s = SquareCelledSurface::from_square_json(surface).unwrap();
            let d = DiskDiagram::from_wallsystem(&s.dual_wallsystem()).unwrap();
            assert!(d.reduce().unwrap().0.is_complete_pla());
        }
    }

    #[test]
    fn fine_minima() {
        for (a, b, m) in [(1, 1, 0), (1, 2, 1), (2, 2, 4)] {
            let c = enumerate_fine_disk_fillings(a, b, Budget::area(m + 1)).unwrap();
            assert!(c.complete);
            assert_eq!(min_area(&c), Some(m), "C({a},{b})");
        }
        assert!(enumerate_fine_disk_fillings(1, 0, Budget::area(3)).is_err());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let c = enumerate_disk_fillings(3, Budget { max_area: 4, max_nodes: 10 }).unwrap();
        assert!(!c.complete);
        assert!(!fac_report(&c).confirms_bound());
    }

    #[test]
    fn report_round_trip() {
        let r = fac_report(&enumerate_disk_fillings(2, Budget::area(2)).unwrap());
        assert_eq!(FacReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn moebius_search_finds_bands() {
        let c = enumerate_moebius_fillings(2, Budget::area(2)).unwrap();
        assert!(c.moebius);
        assert!(!c.entries.is_empty());
    }
}
