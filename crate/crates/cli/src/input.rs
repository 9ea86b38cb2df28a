//! Reading input files and telling the formats apart.

use std::fs;
use std::io::Read;

use serde_json::Value;
use wallkit::combmap::{self, RawMap, SurfaceMap};
use wallkit::fine::FineSurface;
use wallkit::lattice::IntegralPolygon;
use wallkit::squarecell::SquareCelledSurface;
use wallkit::steinitz::{Chords, DiskDiagram};
use wallkit::wallsystem::Wallsystem;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Map,
    Square,
    Chords,
    Fine,
    Polygon,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Map => "map",
            Format::Square => "square",
            Format::Chords => "chords",
            Format::Fine => "fine",
            Format::Polygon => "polygon",
        }
    }
}

/// A parsed input document, not yet validated beyond its JSON shape.
pub struct Document {
    pub format: Format,
    pub text: String,
}

/// Reads a file, or standard input for `-`.
pub fn read(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{path}: {e}")))
}

/// The format follows from a distinguishing top-level key.
pub fn detect(text: &str) -> Result<Format, Failure> {
    let v: Value = serde_json::from_str(text).map_err(|e| Failure::input(format!("not JSON: {e}")))?;
    let obj = v.as_object().ok_or_else(|| Failure::input("expected a JSON object"))?;
    let keys = [
        ("darts", Format::Map),
        ("squares", Format::Square),
        ("boundary_length", Format::Chords),
        ("triangles", Format::Fine),
        ("vertices", Format::Polygon),
    ];
    let found: Vec<Format> = keys.iter().filter(|(k, _)| obj.contains_key(*k)).map(|&(_, f)| f).collect();
    match found.as_slice() {
        [f] => Ok(*f),
        [] => Err(Failure::input("unrecognized document: expected one of darts, squares, boundary_length, triangles, vertices")),
        _ => Err(Failure::input("ambiguous document: several format keys present")),
    }
}

pub fn load(path: &str) -> Result<Document, Failure> {
    let text = read(path)?;
    let format = detect(&text)?;
    Ok(Document { format, text })
}

impl Document {
    pub fn raw_map(&self) -> Result<RawMap, Failure> {
        serde_json::from_str(&self.text).map_err(|e| Failure::input(format!("malformed map json: {e}")))
    }

    pub fn map(&self) -> Result<SurfaceMap, Failure> {
        let raw = self.raw_map()?;
        let report = combmap::validate(&raw);
        if !report.is_valid() {
            return Err(Failure::input(format!("invalid map: {}", report.problems.join("; "))));
        }
        SurfaceMap::from_raw(&raw).map_err(Failure::input)
    }

    pub fn chords(&self) -> Result<Chords, Failure> {
        Chords::from_json(&self.text).map_err(Failure::input)
    }

    pub fn square(&self) -> Result<SquareCelledSurface, Failure> {
        SquareCelledSurface::from_json(&self.text).map_err(Failure::input)
    }

    pub fn fine(&self) -> Result<FineSurface, Failure> {
        FineSurface::from_json(&self.text).map_err(Failure::input)
    }

    pub fn polygon(&self) -> Result<IntegralPolygon, Failure> {
        IntegralPolygon::from_json(&self.text).map_err(Failure::input)
    }

    /// Map, chords and square documents all describe a wallsystem; squares through their dual.
    pub fn wallsystem(&self) -> Result<Wallsystem, Failure> {
        match self.format {
            Format::Map => Wallsystem::new(self.map()?).map_err(Failure::input),
            Format::Chords => Ok(self.chords()?.to_diagram().map_err(Failure::input)?.to_wallsystem()),
            Format::Square => Ok(self.square()?.dual_wallsystem()),
            f => Err(Failure::input(format!("a {} document does not describe a wallsystem", f.name()))),
        }
    }

    pub fn disk_diagram(&self) -> Result<DiskDiagram, Failure> {
        match self.format {
            Format::Chords => self.chords()?.to_diagram().map_err(Failure::input),
            _ => DiskDiagram::from_wallsystem(&self.wallsystem()?).map_err(Failure::input),
        }
    }

    /// Square documents as they are; wallsystems through their dual.
    pub fn square_celled(&self) -> Result<SquareCelledSurface, Failure> {
        match self.format {
            Format::Square => self.square(),
            _ => self.wallsystem()?.dualize().map_err(Failure::input),
        }
    }
}
