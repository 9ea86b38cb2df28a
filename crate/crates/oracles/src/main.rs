//! Prints oracle values as JSON.
//!
//! `wallkit-oracles all` prints every frozen reference value; the other subcommands
//! evaluate one oracle on arguments given as JSON.

use std::process::ExitCode;

use serde_json::{json, Value};
use wallkit_oracles::{chords, fine, graph, klein, perm, polygon, square, walls};

const USAGE: &str = "usage: wallkit-oracles <all | lattice-plane M N | klein-min N fac|systole | klein-plug R S T U \
| levi PAIRING F G | pla-crossings PAIRING | shoelace POINTS | det-norm WALLS V | line-crossings WALLS OFFSETS \
| orbits PERM | bfs N EDGES SRC | wedge-table | alternative N EDGES>";

fn arg<T: serde::de::DeserializeOwned>(args: &[String], i: usize) -> Result<T, String> {
    let s = args.get(i).ok_or_else(|| format!("missing argument {i}"))?;
    serde_json::from_str(s).map_err(|e| format!("argument {i}: {e}"))
}

fn all() -> Value {
    let plane: Vec<Value> = (-3..=3)
        .flat_map(|m| (-3..=3).map(move |n| json!([m, n, fine::lattice_plane(m, n)])))
        .collect();
    let klein: Vec<Value> = (0..=20)
        .step_by(2)
        .map(|n| json!({"n": n, "fac": klein::brute_min(n, false), "systole": klein::brute_min(n, true)}))
        .collect();
    let square_k = [[-1, -1], [1, -1], [1, 1], [-1, 1]];
    let figure_walls = [[1, 0], [1, 2], [-1, 1], [-1, 1]];
    let one_crossing = [2, 3, 0, 1];
    json!({
        "lattice_plane": plane,
        "klein_min": klein,
        "klein_plug_1101": klein::plug_in(1, 1, 0, 1),
        "square_k_double_area": polygon::double_area(&square_k),
        "square_k_walls_norm_10": walls::det_norm(&[[0, 1], [0, 1], [1, 0], [1, 0]], [1, 0]),
        "figure_norm_11": walls::det_norm(&figure_walls, [1, 1]),
        "figure_pair_sum": walls::pair_sum(&figure_walls),
        "one_crossing_levi_0_2": chords::separating(&one_crossing, 0, 2),
        "wedge_table": wedge_table(),
        "standard_torus": (-2..=2).flat_map(|a| (-2..=2).map(move |b| json!([a, b, fine::standard_torus([a, b])]))).collect::<Vec<_>>(),
    })
}

fn wedge_table() -> Value {
    let pats = square::eikonal_patterns();
    let rows: Vec<Value> = pats
        .iter()
        .flat_map(|&f| pats.iter().map(move |&g| json!([f, g, square::wedge_of_differentials(f, g) / 2])))
        .collect();
    json!(rows)
}

fn run(args: &[String]) -> Result<Value, String> {
    let cmd = args.first().map(String::as_str).ok_or(USAGE)?;
    Ok(match cmd {
        "all" => all(),
        "lattice-plane" => json!(fine::lattice_plane(arg(args, 1)?, arg(args, 2)?)),
        "klein-min" => {
            let n: i64 = arg(args, 1)?;
            let systole = match args.get(2).map(String::as_str) {
                Some("fac") => false,
                Some("systole") => true,
                _ => return Err(USAGE.into()),
            };
            json!(klein::brute_min(n, systole))
        }
        "klein-plug" => json!(klein::plug_in(arg(args, 1)?, arg(args, 2)?, arg(args, 3)?, arg(args, 4)?)),
        "levi" => json!(chords::separating(&arg::<Vec<usize>>(args, 1)?, arg(args, 2)?, arg(args, 3)?)),
        "pla-crossings" => json!(chords::crossings(&arg::<Vec<usize>>(args, 1)?)),
        "shoelace" => json!(polygon::double_area(&arg::<Vec<[i64; 2]>>(args, 1)?)),
        "det-norm" => json!(walls::det_norm(&arg::<Vec<[i64; 2]>>(args, 1)?, arg(args, 2)?)),
        "line-crossings" => json!(walls::line_crossings(&arg::<Vec<[i64; 2]>>(args, 1)?, &arg::<Vec<(i64, i64)>>(args, 2)?)),
        "orbits" => json!(perm::orbits(&arg::<Vec<usize>>(args, 1)?)),
        "bfs" => {
            let n: usize = arg(args, 1)?;
            json!(graph::bfs(n, &arg::<Vec<(usize, usize)>>(args, 2)?, arg(args, 3)?))
        }
        "wedge-table" => wedge_table(),
        "alternative" => json!(fine::alternative_holds(arg(args, 1)?, &arg::<Vec<(usize, usize)>>(args, 2)?)),
        _ => return Err(USAGE.into()),
    })
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
