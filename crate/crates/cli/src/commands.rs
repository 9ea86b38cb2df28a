//! The subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wallkit::combmap::{self, SurfaceMap};
use wallkit::fillsearch::{self, Budget};
use wallkit::fine::{FineError, FineSurface};
use wallkit::forms::Cells;
use wallkit::lattice::{self, KleinMode, LatticeError};
use wallkit::squarecell::{SquareCelledSurface, SquareError};
use wallkit::steinitz::{Chords, DiskDiagram, SteinitzError};
use wallkit::wallsystem::Wallsystem;

use crate::input::{self, Document, Format};
use crate::{Failure, Outcome};

/// Largest `n` accepted by `klein-min`; the scan grows like `n⁴`.
const KLEIN_MAX_N: i64 = 100;

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a document and report whether it is a valid object of its format.
    Validate { file: String },
    /// Reduce a disk wallsystem to a pseudoline arrangement by Steinitz moves.
    Reduce {
        file: String,
        /// Write the move log here.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Write the reduced wallsystem (map JSON) here.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Distances between faces (wallsystems) or vertices (square-celled and fine surfaces).
    ///
    /// Without `--from` the table over the boundary is printed.
    Distance {
        file: String,
        #[arg(long)]
        from: Option<usize>,
        #[arg(long)]
        to: Option<usize>,
    },
    /// Check a disk filling against the filling area bound.
    FacCheck { file: String },
    /// Walls of the torus discretizing the norm of a symmetric lattice polygon.
    TorusGen {
        file: String,
        /// Random offset placements to test.
        #[arg(long, default_value_t = 3)]
        trials: usize,
        /// Norm comparison over all lattice vectors with coordinates up to this bound.
        #[arg(long, default_value_t = 10)]
        radius: i64,
    },
    /// Least area of a simple-tight Klein bottle wallsystem.
    KleinMin {
        #[arg(long, value_enum)]
        mode: ModeArg,
        n: i64,
    },
    /// Cyclic content of an oriented even square-celled disk.
    Cyclic {
        file: String,
        /// Boundary vertices in positive cyclic order; all boundary vertices by default.
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<usize>>,
    },
    /// Verify a fine disk or a periodic fine torus.
    FineVerify {
        file: String,
        /// Polygon whose norm a fine torus should realize.
        #[arg(long)]
        polygon: Option<String>,
        /// Window for the torus check, in lattice steps.
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Exhaustive search for fillings of a boundary cycle. The search visits every
    /// gluing, so its result does not depend on the seed.
    Search {
        /// `2n` for squares; `a,b` or a total length for fine cycles.
        #[arg(long)]
        boundary: String,
        #[arg(long)]
        max_area: usize,
        #[arg(long, value_enum, default_value = "square")]
        kind: KindArg,
        /// Glue Möbius bands instead of disks (squares only).
        #[arg(long)]
        moebius: bool,
        #[arg(long, default_value_t = 50_000_000)]
        max_nodes: u64,
    },
    /// Convert between map, square-celled and chords documents.
    Convert {
        file: String,
        #[arg(long, value_enum)]
        to: Format,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Fac,
    Systole,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Square,
    Fine,
}

pub fn run(cmd: Command, seed: u64) -> Result<Outcome, Failure> {
    match cmd {
        Command::Validate { file } => validate(&input::load(&file)?),
        Command::Reduce { file, log, output } => reduce(&input::load(&file)?, log, output),
        Command::Distance { file, from, to } => distance(&input::load(&file)?, from, to),
        Command::FacCheck { file } => fac_check(&input::load(&file)?),
        Command::TorusGen { file, trials, radius } => torus_gen(&input::load(&file)?, trials, radius, seed),
        Command::KleinMin { mode, n } => klein_min(mode, n),
        Command::Cyclic { file, points } => cyclic(&input::load(&file)?, points),
        Command::FineVerify { file, polygon, bound } => fine_verify(&input::load(&file)?, polygon, bound),
        Command::Search { boundary, max_area, kind, moebius, max_nodes } => {
            search(&boundary, Budget { max_area, max_nodes }, kind, moebius)
        }
        Command::Convert { file, to, output } => convert(&input::load(&file)?, to, output),
    }
}

fn write(path: &PathBuf, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn invalid(format: Format, problems: Vec<String>) -> Outcome {
    Outcome::check(json!({ "format": format.name(), "valid": false, "problems": problems }), false)
}

fn valid(format: Format, summary: Value) -> Outcome {
    Outcome::ok(json!({ "format": format.name(), "valid": true, "problems": [], "summary": summary }))
}

// Shape errors (the JSON does not have the fields of the format) exit 2; structural
// violations of a well-formed document exit 1.
fn validate(doc: &Document) -> Result<Outcome, Failure> {
    let f = doc.format;
    Ok(match f {
        Format::Map => {
            let raw = doc.raw_map()?;
            let report = combmap::validate(&raw);
            if !report.is_valid() {
                return Ok(invalid(f, report.problems));
            }
            let map = match SurfaceMap::from_raw(&raw) {
                Ok(m) => m,
                Err(e) => return Ok(invalid(f, vec![e.to_string()])),
            };
            let c = map.classify();
            let ws = match Wallsystem::new(map.clone()) {
                Ok(w) => w,
                Err(e) => return Ok(invalid(f, vec![e.to_string()])),
            };
            let area = ws.area();
            valid(
                f,
                json!({
                    "darts": map.dart_count(),
                    "vertices": map.vertex_count(),
                    "edges": map.edge_count(),
                    "euler_characteristic": c.euler_characteristic,
                    "orientable": c.orientable,
                    "boundary_components": c.boundary_components,
                    "faces": ws.face_count(),
                    "walls": ws.walls().len(),
                    "crossings": area.crossings,
                    "uht": area.uht,
                    "even": ws.is_even(),
                    "cellular": ws.is_cellular(),
                }),
            )
        }
        Format::Square => match SquareCelledSurface::from_json(&doc.text) {
            Err(SquareError::Json(e)) => return Err(Failure(format!("malformed square json: {e}"))),
            Err(e) => invalid(f, vec![e.to_string()]),
            Ok(m) => {
                let cycles = m.boundary_cycles().len();
                valid(
                    f,
                    json!({
                        "squares": m.square_count(),
                        "vertices": m.vertex_count(),
                        "boundary_cycles": cycles,
                        "boundary_length": m.boundary_length().ok(),
                        "even": m.is_even(),
                        "isometric": m.is_isometric_filling().ok(),
                    }),
                )
            }
        },
        Format::Chords => {
            let ch: Chords = serde_json::from_str(&doc.text).map_err(|e| Failure(format!("malformed chords json: {e}")))?;
            match ch.to_diagram() {
                Err(e) => invalid(f, vec![e.to_string()]),
                Ok(d) => valid(
                    f,
                    json!({
                        "boundary_length": ch.boundary_length,
                        "walls": ch.pairing.len(),
                        "crossings": d.crossing_count(),
                        "complete_pla": d.is_complete_pla(),
                    }),
                ),
            }
        }
        Format::Fine => match FineSurface::from_json(&doc.text) {
            Err(FineError::Json(e)) => return Err(Failure(format!("malformed fine surface json: {e}"))),
            Err(e) => invalid(f, vec![e.to_string()]),
            Ok(s) => {
                let disk = s.is_disk();
                valid(
                    f,
                    json!({
                        "triangles": s.triangle_count(),
                        "vertices": s.vertex_count(),
                        "euler_characteristic": s.euler_characteristic(),
                        "disk": disk,
                        "torus": s.is_closed_torus(),
                        "tight": if disk { s.is_tight().ok() } else { None },
                        "boundary": s.boundary_lengths().ok().map(|(a, b)| [a, b]),
                    }),
                )
            }
        },
        Format::Polygon => match lattice::IntegralPolygon::from_json(&doc.text) {
            Err(LatticeError::Json(e)) => return Err(Failure(format!("malformed polygon json: {e}"))),
            Err(e) => invalid(f, vec![e.to_string()]),
            Ok(k) => valid(
                f,
                json!({
                    "vertices": k.vertices().len(),
                    "double_area": k.double_area(),
                    "symmetric": k.is_symmetric(),
                }),
            ),
        },
    })
}

fn reduce(doc: &Document, log: Option<PathBuf>, output: Option<PathBuf>) -> Result<Outcome, Failure> {
    let d = doc.disk_diagram()?;
    let before = d.crossing_count();
    let (r, moves) = d.reduce().map_err(|e| Failure(format!("reduction failed: {e}")))?;
    if let Some(p) = &log {
        write(p, &serde_json::to_string(&moves).expect("moves serialize"))?;
    }
    if let Some(p) = &output {
        write(p, &r.to_wallsystem().map().to_json())?;
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for m in &moves {
        *counts.entry(format!("{:?}", m.kind)).or_default() += 1;
    }
    Ok(Outcome::ok(json!({
        "crossings_before": before,
        "crossings_after": r.crossing_count(),
        "moves": moves.len(),
        "move_counts": counts,
        "pla": r.is_pla(),
        "complete_pla": r.is_complete_pla(),
        "pairing": r.pairing(),
    })))
}

/// Distances from one point, with `None` for unreachable points.
type Row = Vec<Option<usize>>;

fn distance(doc: &Document, from: Option<usize>, to: Option<usize>) -> Result<Outcome, Failure> {
    let (units, count, points, rows): (&'static str, usize, Vec<usize>, Box<dyn Fn(usize) -> Result<Row, Failure>>) = match doc.format {
        Format::Map | Format::Chords => {
            let ws = doc.wallsystem()?;
            let points = if from.is_none() { ws.boundary_faces().map_err(Failure::input)? } else { Vec::new() };
            let n = ws.face_count();
            (
                "faces",
                n,
                points,
                Box::new(move |x| ws.distances_from(x).map_err(Failure::input)),
            )
        }
        Format::Square => {
            let m = doc.square()?;
            let points = if from.is_none() {
                let mut c = m.boundary_cycles();
                if c.len() != 1 {
                    return Err(Failure(format!("boundary must be a single cycle, found {} cycles", c.len())));
                }
                c.pop().unwrap()
            } else {
                Vec::new()
            };
            let n = m.vertex_count();
            (
                "vertices",
                n,
                points,
                Box::new(move |x| Ok(m.distances_from(x).map_err(Failure::input)?.into_iter().map(Some).collect())),
            )
        }
        Format::Fine => {
            let s = doc.fine()?;
            let points = if from.is_none() {
                s.boundary_cycle().map_err(Failure::input)?.into_iter().map(|(_, v, _)| v).collect()
            } else {
                Vec::new()
            };
            let n = s.vertex_count();
            ("vertices", n, points, Box::new(move |x| s.distances_from(x).map_err(Failure::input)))
        }
        Format::Polygon => return Err(Failure("distance needs a wallsystem or a surface".into())),
    };
    for x in [from, to].into_iter().flatten() {
        if x >= count {
            let unit = if units == "faces" { "face" } else { "vertex" };
            return Err(Failure(format!("no {unit} {x}: there are {count} {units}")));
        }
    }
    Ok(Outcome::ok(match (from, to) {
        (Some(x), Some(y)) => json!({ "units": units, "from": x, "to": y, "distance": rows(x)?[y] }),
        (Some(x), None) => json!({ "units": units, "from": x, "distances": rows(x)? }),
        (None, Some(_)) => return Err(Failure("--to needs --from".into())),
        (None, None) => {
            let mut table = Vec::with_capacity(points.len());
            for &p in &points {
                let r = rows(p)?;
                table.push(points.iter().map(|&q| r[q]).collect::<Row>());
            }
            json!({ "units": units, "points": points, "table": table })
        }
    }))
}

fn fac_check(doc: &Document) -> Result<Outcome, Failure> {
    if doc.format == Format::Fine {
        let s = doc.fine()?;
        if !s.is_disk() {
            return Err(Failure("fac-check needs a disk".into()));
        }
        let (a, b) = s.boundary_lengths().map_err(Failure::input)?;
        let isometric = s.is_isometric_filling().map_err(Failure::input)?;
        let area = s.triangle_count();
        let bound = 2 * (a * b) as i64 - (a + b) as i64;
        let pass = isometric && area as i64 >= bound;
        return Ok(Outcome::check(json!({ "isometric": isometric, "area": area, "bound": bound, "boundary": [a, b] }), pass));
    }
    let m = doc.square_celled()?;
    let c = m.to_map().classify();
    if c.euler_characteristic != 1 || c.boundary_components != 1 {
        return Err(Failure("fac-check needs a disk".into()));
    }
    let len = m.boundary_length().map_err(Failure::input)?;
    if len % 2 != 0 {
        return Err(Failure(format!("boundary length {len} is odd; the bound concerns even cycles")));
    }
    let n = (len / 2) as i64;
    let isometric = m.is_isometric_filling().map_err(Failure::input)?;
    let area = m.square_count();
    let bound = n * (n - 1) / 2;
    Ok(Outcome::check(json!({ "isometric": isometric, "area": area, "bound": bound }), isometric && area as i64 >= bound))
}

fn q_str(q: &lattice::Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn torus_gen(doc: &Document, trials: usize, radius: i64, seed: u64) -> Result<Outcome, Failure> {
    let k = doc.polygon()?;
    if !(0..=1000).contains(&radius) {
        return Err(Failure("--radius must lie in 0..=1000".into()));
    }
    let walls = lattice::walls_from_polygon(&k).map_err(Failure::input)?;
    let crossings = lattice::crossing_count(&walls).map_err(Failure::input)?;
    let area = k.double_area() / 2;
    let mut failures = Vec::new();
    let mut checked = 0;
    for x in -radius..=radius {
        for y in -radius..=radius {
            let induced = lattice::induced_norm(&walls, [x, y]).map_err(Failure::input)?;
            let support = lattice::support_norm(&k, [x, y]);
            checked += 1;
            if induced != 2 * support {
                failures.push(json!([x, y, induced, 2 * support]));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = Vec::new();
    let mut pass = failures.is_empty() && crossings == area;
    for _ in 0..trials {
        let offsets = lattice::random_offsets(walls.len(), &mut rng);
        let g = lattice::geometric_crossing_oracle(&walls, &offsets).map_err(Failure::input)?;
        pass &= g == crossings;
        runs.push(json!({ "offsets": offsets.iter().map(q_str).collect::<Vec<_>>(), "geometric_crossings": g }));
    }
    Ok(Outcome::check(
        json!({
            "walls": walls,
            "crossings": crossings,
            "area": area,
            "norm": { "radius": radius, "checked": checked, "failures": failures },
            "trials": runs,
            "pass": pass,
        }),
        pass,
    ))
}

fn klein_min(mode: ModeArg, n: i64) -> Result<Outcome, Failure> {
    if !(0..=KLEIN_MAX_N).contains(&n) {
        return Err(Failure(format!("n must lie in 0..={KLEIN_MAX_N}")));
    }
    let (km, name, formula) = match mode {
        ModeArg::Fac => (KleinMode::Fac, "fac", n * (n - 1) / 2),
        ModeArg::Systole => (KleinMode::Systole, "systole", n * n / 2),
    };
    let (min, model) = lattice::minimize_klein(n, km).map_err(Failure::input)?;
    Ok(Outcome::check(
        json!({
            "mode": name,
            "n": n,
            "min": min,
            "formula": formula,
            "model": model,
            "minlengths": model.minlengths(),
        }),
        min == formula,
    ))
}

fn cyclic(doc: &Document, points: Option<Vec<usize>>) -> Result<Outcome, Failure> {
    let m = doc.square_celled()?;
    let cells = Cells::new(&m);
    let points = match points {
        Some(p) => p,
        None => cells.positive_boundary().map_err(Failure::input)?,
    };
    let cc = cells.cyclic_content(&points).map_err(Failure::input)?;
    let bound = cc.bound();
    let within = cc.interior <= bound;
    Ok(Outcome::check(
        json!({
            "points": points,
            "content": q_str(&cc.interior),
            "boundary_integral": q_str(&cc.boundary),
            "area": cc.squares,
            "bound": q_str(&bound),
            "tight": cells.is_tight().ok(),
            "stokes": (&cc.interior - &cc.boundary).is_zero(),
        }),
        within,
    ))
}

fn fine_verify(doc: &Document, polygon: Option<String>, bound: i64) -> Result<Outcome, Failure> {
    let s = doc.fine()?;
    if s.is_closed_torus() {
        let path = polygon.ok_or_else(|| Failure("a fine torus is verified against a polygon: pass --polygon".into()))?;
        let k = input::load(&path)?.polygon()?;
        if !(0..=50).contains(&bound) {
            return Err(Failure("--bound must lie in 0..=50".into()));
        }
        let report = s.verify_fine_torus(&k, bound).map_err(Failure::input)?;
        let pass = report.pass;
        return Ok(Outcome::check(json!({ "kind": "torus", "report": report }), pass));
    }
    if !s.is_disk() {
        return Err(Failure("fine-verify needs a disk or a periodic torus".into()));
    }
    let (a, b) = s.boundary_lengths().map_err(Failure::input)?;
    let tight = s.is_tight().map_err(Failure::input)?;
    let isometric = s.is_isometric_filling().map_err(Failure::input)?;
    let mut pass = true;
    let formula = if tight {
        let pts: Vec<usize> = s.boundary_cycle().map_err(Failure::input)?.into_iter().map(|(_, v, _)| v).collect();
        let mut failures = Vec::new();
        for &x in &pts {
            for &y in &pts {
                let got = s.tight_boundary_distance(x, y).map_err(Failure::input)?;
                let want = s.fine_distance(x, y).map_err(Failure::input)?;
                if got != want {
                    failures.push(json!([x, y, got, want]));
                }
            }
        }
        pass &= failures.is_empty();
        json!({ "checked": pts.len() * pts.len(), "failures": failures })
    } else {
        Value::Null
    };
    let fac = if isometric {
        match s.fine_fac_check() {
            Ok(v) => json!(v),
            Err(FineError::FacViolation { a, b, area, bound }) => {
                pass = false;
                json!({ "a": a, "b": b, "area": area, "bound": bound, "disk": true, "meets_bound": false })
            }
            Err(e) => return Err(Failure::input(e)),
        }
    } else {
        Value::Null
    };
    let perfect = s.dual_plabic().map(|p| p.is_perfectly_oriented()).ok();
    Ok(Outcome::check(
        json!({
            "kind": "disk",
            "triangles": s.triangle_count(),
            "boundary": [a, b],
            "tight": tight,
            "isometric": isometric,
            "boundary_formula": formula,
            "perfectly_oriented": perfect,
            "fac": fac,
        }),
        pass,
    ))
}

fn parse_usize(s: &str) -> Result<usize, Failure> {
    s.trim().parse().map_err(|_| Failure(format!("--boundary: {s:?} is not a length")))
}

fn search(boundary: &str, budget: Budget, kind: KindArg, moebius: bool) -> Result<Outcome, Failure> {
    let census = match kind {
        KindArg::Square => {
            let len = parse_usize(boundary)?;
            if len == 0 || len % 2 != 0 {
                return Err(Failure("--boundary must be a positive even length for squares".into()));
            }
            let r = if moebius {
                fillsearch::enumerate_moebius_fillings(len / 2, budget)
            } else {
                fillsearch::enumerate_disk_fillings(len / 2, budget)
            };
            r.map_err(Failure::input)?
        }
        KindArg::Fine => {
            if moebius {
                return Err(Failure("--moebius applies to square searches only".into()));
            }
            let (a, b) = match boundary.split_once(',') {
                Some((a, b)) => (parse_usize(a)?, parse_usize(b)?),
                None => {
                    let len = parse_usize(boundary)?;
                    (len / 2, len - len / 2)
                }
            };
            fillsearch::enumerate_fine_disk_fillings(a, b, budget).map_err(Failure::input)?
        }
    };
    let report = fillsearch::fac_report(&census);
    // A complete disk census with a filling below the bound would refute it.
    let pass = census.moebius || !census.complete || report.minimum.is_none_or(|m| m as i64 >= report.bound);
    Ok(Outcome::check(json!({ "census": census, "report": report }), pass))
}

fn not_pla(e: SteinitzError) -> Failure {
    match e {
        SteinitzError::NotPla => Failure("the chords shorthand needs a pseudoline arrangement; this wallsystem is not one".into()),
        e => Failure::input(e),
    }
}

fn convert(doc: &Document, to: Format, output: Option<PathBuf>) -> Result<Outcome, Failure> {
    let text = match (doc.format, to) {
        (Format::Fine | Format::Polygon, _) | (_, Format::Fine | Format::Polygon) => {
            return Err(Failure(format!("no conversion from {} to {}", doc.format.name(), to.name())));
        }
        (Format::Map, Format::Map) => doc.map()?.to_json(),
        (Format::Square, Format::Square) => doc.square()?.to_json(),
        (Format::Chords, Format::Chords) => {
            let ch = doc.chords()?;
            ch.to_diagram().map_err(Failure::input)?;
            serde_json::to_string(&ch).expect("chords serialize")
        }
        (_, Format::Map) => doc.wallsystem()?.map().to_json(),
        (_, Format::Square) => doc.wallsystem()?.dualize().map_err(Failure::input)?.to_json(),
        (_, Format::Chords) => {
            let d = DiskDiagram::from_wallsystem(&doc.wallsystem()?).map_err(Failure::input)?;
            serde_json::to_string(&d.to_chords().map_err(not_pla)?).expect("chords serialize")
        }
    };
    match output {
        Some(p) => {
            write(&p, &text)?;
            Ok(Outcome::ok(json!({ "format": to.name(), "written": p.display().to_string() })))
        }
        None => Ok(Outcome::ok(serde_json::from_str(&text).expect("converted document is JSON"))),
    }
}
