//! Library results against the brute-force oracles in `wallkit-oracles`.

use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wallkit::fine::{fixtures as fine_fixtures, FineGraph};
use wallkit::lattice::{self, KleinMode, Q};
use wallkit::squarecell::fixtures as square_fixtures;
use wallkit::steinitz::{self, random};
use wallkit_oracles as oracle;

fn as_pairs(offsets: &[Q]) -> Vec<(i64, i64)> {
    offsets.iter().map(|c| (c.numer().to_i64().unwrap(), c.denom().to_i64().unwrap())).collect()
}

fn wall_strategy() -> impl Strategy<Value = Vec<[i64; 2]>> {
    prop::collection::vec((-4i64..=4, -4i64..=4), 1..6).prop_map(|v| {
        v.into_iter()
            .map(|(a, b)| if (a, b) == (0, 0) { [1, 0] } else { [a, b] })
            .filter(|w| num_integer::gcd(w[0], w[1]) == 1)
            .collect()
    })
}

proptest! {
    #[test]
    fn induced_norm_matches_det_sum(walls in wall_strategy(), x in -6i64..=6, y in -6i64..=6) {
        prop_assume!(!walls.is_empty());
        prop_assert_eq!(lattice::induced_norm(&walls, [x, y]).unwrap(), oracle::walls::det_norm(&walls, [x, y]));
    }

    #[test]
    fn crossing_count_matches_pair_sum(walls in wall_strategy()) {
        prop_assume!(!walls.is_empty());
        prop_assert_eq!(lattice::crossing_count(&walls).unwrap(), oracle::walls::pair_sum(&walls));
    }

    #[test]
    fn geometric_crossings_match_line_count(walls in wall_strategy(), seed in 0u64..1000) {
        prop_assume!(!walls.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets = lattice::random_offsets(walls.len(), &mut rng);
        prop_assert_eq!(
            lattice::geometric_crossing_oracle(&walls, &offsets).unwrap(),
            oracle::walls::line_crossings(&walls, &as_pairs(&offsets))
        );
    }

    #[test]
    fn polygon_area_matches_shoelace(seed in 0u64..500, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = lattice::random_symmetric_polygon(k, 4, &mut rng);
        prop_assert_eq!(p.double_area(), oracle::polygon::double_area(p.vertices()).abs());
        for v in [[1, 0], [0, 1], [1, 1], [2, -3]] {
            prop_assert_eq!(p.support(v), oracle::polygon::support(p.vertices(), v));
        }
    }
}

#[test]
fn symmetric_offsets_count_like_generic_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let k = lattice::random_symmetric_polygon(3, 3, &mut rng);
        let half = lattice::walls_from_polygon(&k).unwrap();
        let walls: Vec<[i64; 2]> = half.iter().chain(&half).copied().collect();
        let offsets = lattice::symmetric_offsets(&walls, &mut rng).unwrap();
        assert_eq!(
            lattice::geometric_crossing_oracle(&walls, &offsets).unwrap(),
            oracle::walls::line_crossings(&walls, &as_pairs(&offsets))
        );
    }
}

#[test]
fn klein_minima_match_unreduced_scan() {
    for n in (0..=12).step_by(2) {
        assert_eq!(lattice::minimize_klein(n, KleinMode::Fac).unwrap().0, oracle::klein::brute_min(n, false), "fac n={n}");
        assert_eq!(lattice::minimize_klein(n, KleinMode::Systole).unwrap().0, oracle::klein::brute_min(n, true), "systole n={n}");
    }
}

#[test]
fn klein_model_plug_in() {
    for (r, s, t, u) in [(0, 0, 0, 0), (1, 1, 3, 1), (2, 0, 1, 4), (3, 5, 2, 1)] {
        let m = lattice::KleinModel { r, s, t, u };
        assert_eq!((m.minlengths(), m.area()), oracle::klein::plug_in(r, s, t, u));
    }
}

#[test]
fn levi_distance_matches_chord_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=7 {
        for _ in 0..10 {
            let d = random::pla(n, &mut rng);
            let partner = d.pairing();
            assert_eq!(steinitz::count_interleaved(&partner), oracle::chords::crossings(&partner));
            for f in 0..2 * n {
                for g in 0..2 * n {
                    let want = oracle::chords::separating(&partner, f, g);
                    assert_eq!(d.levi_distance(f, g).unwrap(), want);
                    assert_eq!(steinitz::levi_from_pairing(&partner, f, g), want);
                }
            }
        }
    }
}

#[test]
fn reduction_keeps_chord_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let d = random::disk(4, 8, &mut rng);
        let before = d.boundary_distances();
        let (r, _) = d.reduce().unwrap();
        let partner = r.pairing();
        for (f, row) in before.iter().enumerate() {
            for (g, &x) in row.iter().enumerate() {
                assert_eq!(x, oracle::chords::separating(&partner, f, g));
            }
        }
    }
}

#[test]
fn square_distances_match_bfs() {
    for m in [square_fixtures::hexagon(), square_fixtures::strip(4), square_fixtures::torus(), square_fixtures::moebius(3)] {
        let n = m.vertex_count();
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|v| m.neighbours(v).iter().map(move |&w| (v, w))).collect();
        for x in 0..n {
            let want: Vec<usize> = oracle::graph::bfs(n, &edges, x).into_iter().map(Option::unwrap).collect();
            assert_eq!(m.distances_from(x).unwrap(), want);
        }
    }
}

#[test]
fn fine_graph_distances_match_relaxation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let g = FineGraph::random(8, 0.4, &mut rng);
        let arcs: Vec<(usize, usize, u8)> = g.edges.iter().flat_map(|&(a, b)| [(a, b, 1), (b, a, 0)]).collect();
        for x in 0..g.n {
            assert_eq!(g.distances_from(x), oracle::graph::zero_one(g.n, &arcs, x));
        }
        assert_eq!(g.alternative_failures().is_empty(), oracle::fine::alternative_holds(g.n, &g.edges));
    }
}

#[test]
fn lattice_patch_distances_match_plane() {
    let (s, ids) = fine_fixtures::lattice_patch(-4, -4, 4, 4);
    let o = ids[&[0, 0]];
    for m in -2..=2i64 {
        for n in -2..=2i64 {
            let got = s.fine_distance(o, ids[&[m, n]]).unwrap();
            assert_eq!(got, oracle::fine::lattice_plane(m, n), "({m},{n})");
        }
    }
}
