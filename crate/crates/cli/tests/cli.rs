mod common;

use common::{fixture, wallkit};
use serde_json::json;
use wallkit::combmap::SurfaceMap;
use wallkit::squarecell::SquareCelledSurface;
use wallkit::steinitz::{Chords, DiskDiagram, MoveLog};
use wallkit::wallsystem::Wallsystem;

#[test]
fn exit_codes_and_schemas() {
    let problems = common::check_matrix();
    assert!(problems.is_empty(), "{}", problems.join("\n"));
}

#[test]
fn hexagon_fac_payload() {
    let r = wallkit(&["fac-check", &fixture("hexagon.json")]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json(), json!({ "isometric": true, "area": 3, "bound": 3 }));
}

#[test]
fn klein_systole_four() {
    let r = wallkit(&["klein-min", "--mode", "systole", "4"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["min"], 8);
}

#[test]
fn garbage_is_an_input_error() {
    let r = wallkit(&["validate", &fixture("garbage.json")]);
    assert_eq!(r.code, 2);
    assert!(!r.stderr.is_empty());
}

#[test]
fn help_succeeds() {
    let r = wallkit(&["--help"]);
    assert_eq!(r.code, 0);
    for sub in ["validate", "reduce", "distance", "fac-check", "torus-gen", "klein-min", "cyclic", "fine-verify", "search", "convert"] {
        assert!(r.stdout.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn square_map_square_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["hexagon.json", "one_square.json", "strip2.json", "moebius3.json", "square_torus.json"] {
        let orig = SquareCelledSurface::from_json(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        let map = dir.path().join("map.json");
        let back = dir.path().join("back.json");
        let r = wallkit(&["convert", &fixture(name), "--to", "map", "-o", map.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        let r = wallkit(&["convert", map.to_str().unwrap(), "--to", "square", "-o", back.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        let again = SquareCelledSurface::from_json(&std::fs::read_to_string(&back).unwrap()).unwrap();
        assert!(again.to_map().is_isomorphic(&orig.to_map()), "{name}");
    }
}

#[test]
fn chords_map_chords_round_trip() {
    for name in ["complete3_chords.json", "pla4_chords.json"] {
        let orig = Chords::from_json(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        let map = wallkit(&["convert", &fixture(name), "--to", "map"]);
        assert_eq!(map.code, 0);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        std::fs::write(&p, &map.stdout).unwrap();
        let back = wallkit(&["convert", p.to_str().unwrap(), "--to", "chords"]);
        assert_eq!(back.code, 0, "{}", back.stderr);
        let back = Chords::from_json(&back.stdout).unwrap();
        // The boundary may be relabelled by a rotation; the pairing up to rotation must agree.
        let len = orig.boundary_length;
        let norm = |c: &Chords, shift: usize| {
            let mut p: Vec<[usize; 2]> = c
                .pairing
                .iter()
                .map(|&[a, b]| {
                    let (a, b) = ((a + shift) % len, (b + shift) % len);
                    [a.min(b), a.max(b)]
                })
                .collect();
            p.sort();
            p
        };
        assert!((0..len).any(|s| norm(&back, s) == norm(&orig, 0)), "{name}");
    }
}

#[test]
fn reduce_writes_a_replayable_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.json");
    let out = dir.path().join("out.json");
    let input = fixture("kinked_disk.json");
    let r = wallkit(&["reduce", &input, "--log", log.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let payload = r.json();
    assert_eq!(payload["complete_pla"], true);
    let moves: MoveLog = serde_json::from_str(&std::fs::read_to_string(&log).unwrap()).unwrap();
    assert_eq!(payload["moves"], moves.len());
    let ws = Wallsystem::from_json(&std::fs::read_to_string(&input).unwrap()).unwrap();
    let replayed = DiskDiagram::from_wallsystem(&ws).unwrap().replay(&moves).unwrap();
    let written = SurfaceMap::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(replayed.to_map().is_isomorphic(&written));
    assert_eq!(payload["crossings_after"], replayed.crossing_count());
}

#[test]
fn seeds_make_torus_runs_reproducible() {
    let k = fixture("figure_k.json");
    let a = wallkit(&["torus-gen", &k, "--seed", "9"]).json();
    let b = wallkit(&["torus-gen", &k, "--seed", "9"]).json();
    let c = wallkit(&["torus-gen", &k, "--seed", "10"]).json();
    assert_eq!(a, b);
    assert_ne!(a["trials"], c["trials"]);
    assert_eq!(a["pass"], true);
}

#[test]
fn stdin_is_read_for_dash() {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let mut child = Command::new(env!("CARGO_BIN_EXE_wallkit"))
        .args(["fac-check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(std::fs::read(fixture("hexagon.json")).unwrap().as_slice()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["area"], 3);
}
