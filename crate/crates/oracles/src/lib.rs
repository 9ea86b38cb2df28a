//! Brute-force reference computations.
//!
//! Everything here works on plain vectors and integers and shares no code with the
//! main library, so its answers can be trusted to catch mistakes there. Speed is
//! not a goal.

pub mod graph {
    use std::collections::VecDeque;

    /// Unweighted BFS on an undirected graph.
    pub fn bfs(n: usize, edges: &[(usize, usize)], src: usize) -> Vec<Option<usize>> {
        let arcs: Vec<(usize, usize, u8)> = edges.iter().flat_map(|&(a, b)| [(a, b, 1), (b, a, 1)]).collect();
        dijkstra_small(n, &arcs, src)
    }

    /// Directed weights 0 or 1.
    pub fn zero_one(n: usize, arcs: &[(usize, usize, u8)], src: usize) -> Vec<Option<usize>> {
        dijkstra_small(n, arcs, src)
    }

    // Bellman-Ford style relaxation until nothing changes: slow and obviously right.
    fn dijkstra_small(n: usize, arcs: &[(usize, usize, u8)], src: usize) -> Vec<Option<usize>> {
        let mut d: Vec<Option<usize>> = vec![None; n];
        d[src] = Some(0);
        loop {
            let mut changed = false;
            for &(a, b, w) in arcs {
                if let Some(da) = d[a] {
                    let nd = da + w as usize;
                    if d[b].is_none_or(|db| nd < db) {
                        d[b] = Some(nd);
                        changed = true;
                    }
                }
            }
            if !changed {
                return d;
            }
        }
    }

    pub fn is_bipartite(n: usize, edges: &[(usize, usize)]) -> bool {
        let mut color = vec![None; n];
        for s in 0..n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &(a, b) in edges {
                    let w = if a == v { b } else if b == v { a } else { continue };
                    match color[w] {
                        None => {
                            color[w] = Some(!color[v].unwrap());
                            q.push_back(w);
                        }
                        Some(c) if c == color[v].unwrap() => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }
}

pub mod perm {
    /// Cycles of a permutation, each starting at its least element.
    pub fn orbits(p: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; p.len()];
        let mut out = Vec::new();
        for s in 0..p.len() {
            if seen[s] {
                continue;
            }
            let mut cyc = vec![s];
            seen[s] = true;
            let mut x = p[s];
            while x != s {
                seen[x] = true;
                cyc.push(x);
                x = p[x];
            }
            out.push(cyc);
        }
        out
    }

    /// `(a ∘ b)(x) = a(b(x))`.
    pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
        b.iter().map(|&x| a[x]).collect()
    }
}

pub mod polygon {
    /// Twice the signed area by the shoelace formula.
    pub fn double_area(pts: &[[i64; 2]]) -> i64 {
        let n = pts.len();
        (0..n).map(|i| pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1]).sum()
    }

    /// `max_{k∈K} ⟨k, v⟩` over the vertex list.
    pub fn support(pts: &[[i64; 2]], v: [i64; 2]) -> i64 {
        pts.iter().map(|k| v[0] * k[0] + v[1] * k[1]).max().unwrap_or(0)
    }
}

pub mod walls {
    /// `Σ |det(w, v)|`.
    pub fn det_norm(walls: &[[i64; 2]], v: [i64; 2]) -> i64 {
        walls.iter().map(|w| (w[0] * v[1] - w[1] * v[0]).abs()).sum()
    }

    /// `Σ_{i<j} |det(wᵢ, wⱼ)|`.
    pub fn pair_sum(walls: &[[i64; 2]]) -> i64 {
        let mut s = 0;
        for i in 0..walls.len() {
            for j in i + 1..walls.len() {
                s += (walls[i][0] * walls[j][1] - walls[i][1] * walls[j][0]).abs();
            }
        }
        s
    }

    /// Counts points of the unit torus where two of the line families
    /// `{x : det(wᵢ, x) ∈ cᵢ + Z}` meet, with `cᵢ = num/den` generic.
    pub fn line_crossings(walls: &[[i64; 2]], offsets: &[(i64, i64)]) -> i64 {
        let mut total = 0;
        for i in 0..walls.len() {
            for j in i + 1..walls.len() {
                total += pair_crossings(walls[i], offsets[i], walls[j], offsets[j]);
            }
        }
        total
    }

    fn pair_crossings(w1: [i64; 2], c1: (i64, i64), w2: [i64; 2], c2: (i64, i64)) -> i64 {
        let (a, b, c, d) = (w1[0] as i128, w1[1] as i128, w2[0] as i128, w2[1] as i128);
        let det = a * d - b * c;
        if det == 0 {
            return 0;
        }
        // det(w1,x) = a·x1 − b·x0 = U and det(w2,x) = c·x1 − d·x0 = V, so by Cramer
        // x0 = (c·U − a·V)/det and x1 = (d·U − b·V)/det. With U = u/q, V = v/q below.
        let q = c1.1 as i128 * c2.1 as i128;
        let range = (a.abs() + b.abs() + c.abs() + d.abs()) as i64 + 2;
        let mut n = 0;
        for k1 in -range..=range {
            for k2 in -range..=range {
                let u = (c1.0 as i128 + k1 as i128 * c1.1 as i128) * c2.1 as i128;
                let v = (c2.0 as i128 + k2 as i128 * c2.1 as i128) * c1.1 as i128;
                let den = det * q;
                let x0 = c * u - a * v;
                let x1 = d * u - b * v;
                let inside = |num: i128| {
                    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
                    0 <= num && num < den
                };
                if inside(x0) && inside(x1) {
                    n += 1;
                }
            }
        }
        n
    }
}

pub mod chords {
    pub fn interleaved(a: (usize, usize), b: (usize, usize)) -> bool {
        let (lo, hi) = (a.0.min(a.1), a.0.max(a.1));
        let inside = |p: usize| lo < p && p < hi;
        inside(b.0) ^ inside(b.1)
    }

    pub fn chord_list(partner: &[usize]) -> Vec<(usize, usize)> {
        (0..partner.len()).filter(|&p| p < partner[p]).map(|p| (p, partner[p])).collect()
    }

    /// Number of interleaved chord pairs.
    pub fn crossings(partner: &[usize]) -> usize {
        let c = chord_list(partner);
        let mut n = 0;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                n += interleaved(c[i], c[j]) as usize;
            }
        }
        n
    }

    /// Chords met when walking from arc `f` to arc `g` once; arc `i` follows endpoint `i`.
    pub fn separating(partner: &[usize], f: usize, g: usize) -> usize {
        let m = partner.len();
        let mut passed = vec![false; m];
        let mut i = f;
        while i != g {
            i = (i + 1) % m;
            passed[i] = true;
        }
        chord_list(partner).iter().filter(|&&(a, b)| passed[a] != passed[b]).count()
    }
}

pub mod klein {
    /// Minimal lengths of R, S, T, U and area of the model `(r, s, t, u)`.
    pub fn plug_in(r: i64, s: i64, t: i64, u: i64) -> ([i64; 4], i64) {
        let area = r * (r - 1) / 2 + s * (s - 1) / 2 + t * u + s * u + r * u;
        ([r + u, s + u, 2 * u, 2 * t + r + s], area)
    }

    /// Least area over `0 ≤ r, s, t, u ≤ 2n` with `r, s, u` of equal parity.
    pub fn brute_min(n: i64, systole: bool) -> i64 {
        let mut best = i64::MAX;
        for r in 0..=2 * n {
            for s in 0..=2 * n {
                for t in 0..=2 * n {
                    for u in 0..=2 * n {
                        if r % 2 != s % 2 || s % 2 != u % 2 {
                            continue;
                        }
                        let ([lr, ls, lt, lu], area) = plug_in(r, s, t, u);
                        let ok = if systole { lr >= n && ls >= n && lt >= n && lu >= n } else { lr >= n && lu >= n };
                        if ok {
                            best = best.min(area);
                        }
                    }
                }
            }
        }
        best
    }
}

pub mod square {
    /// `(df ∧ dg)(Q)` for corner values `f`, `g` on a square `(a, b, c, d)`.
    pub fn wedge_of_differentials(f: [i64; 4], g: [i64; 4]) -> i64 {
        // Sides v = [a,b], v' = [d,c], w = [a,d], w' = [b,c]; sums of the two values.
        let sums = |h: [i64; 4]| ((h[1] - h[0]) + (h[2] - h[3]), (h[3] - h[0]) + (h[2] - h[1]));
        let (fv, fw) = sums(f);
        let (gv, gw) = sums(g);
        let x = fv * gw - fw * gv;
        assert_eq!(x % 4, 0, "eikonal differentials have an integral wedge");
        x / 4
    }

    /// Functions on the four corners with minimum 0 that change by ±1 along every side.
    pub fn eikonal_patterns() -> Vec<[i64; 4]> {
        let mut out = Vec::new();
        for code in 0..256u32 {
            let h: [i64; 4] = std::array::from_fn(|i| (code >> (2 * i) & 3) as i64);
            if h.iter().min() == Some(&0) && (0..4).all(|i| (h[i] - h[(i + 1) % 4]).abs() == 1) {
                out.push(h);
            }
        }
        out
    }
}

pub mod fine {
    use super::graph;

    /// Distance from the origin to `(m, n)` in the lattice fine plane, by brute force on a
    /// window with coordinate-increasing edges and increasing diagonals.
    pub fn lattice_plane(m: i64, n: i64) -> usize {
        let r = m.abs().max(n.abs()) + 2;
        let side = (2 * r + 1) as usize;
        let id = |x: i64, y: i64| ((x + r) as usize) * side + (y + r) as usize;
        let mut arcs = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                for (dx, dy) in [(1, 0), (0, 1), (1, 1)] {
                    if x + dx <= r && y + dy <= r {
                        arcs.push((id(x, y), id(x + dx, y + dy), 1));
                        arcs.push((id(x + dx, y + dy), id(x, y), 0));
                    }
                }
            }
        }
        graph::zero_one(side * side, &arcs, id(0, 0))[id(m, n)].unwrap()
    }

    /// For every edge `{x, x'}` and vertex `y`, exactly one of the two triangle equalities.
    pub fn alternative_holds(n: usize, edges: &[(usize, usize)]) -> bool {
        let arcs: Vec<(usize, usize, u8)> = edges.iter().flat_map(|&(a, b)| [(a, b, 1), (b, a, 0)]).collect();
        let d: Vec<Vec<Option<usize>>> = (0..n).map(|x| graph::zero_one(n, &arcs, x)).collect();
        for &(p, q) in edges {
            for (x, x2) in [(p, q), (q, p)] {
                for y in 0..n {
                    let (Some(a), Some(b), Some(c), Some(e), Some(g)) = (d[x][x2], d[x2][y], d[x][y], d[x2][x], d[x2][y]) else {
                        continue;
                    };
                    if (a + b == c) == (e + c == g) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `d(x, x + v)` on the cover of the standard-triangle torus: one vertex per lattice
    /// point, edges `(1,0)`, `(0,1)`, `(1,1)`.
    pub fn standard_torus(v: [i64; 2]) -> usize {
        lattice_plane(v[0], v[1])
    }
}
