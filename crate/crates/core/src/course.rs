//! Hole rasters: the surface grid, its text format and playability checks.
//!
//! File format: one JSON header line `{"cell_size_in":..,"pin":[x,y],"par":..}`
//! followed by `rows` lines of `cols` surface characters. Row 0 is the first
//! grid line; cell `(row, col)` covers `x in [col*s, (col+1)*s)` and
//! `y in [row*s, (row+1)*s)`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{CanonicalFrame, CellCoord, Point2};
use crate::simulator::{simulate_shot, ShotOutcome};

/// Cell side bounds, 0.7 m and 1.5 m in inches.
pub const MIN_CELL_SIZE_IN: f64 = 27.5;
pub const MAX_CELL_SIZE_IN: f64 = 59.0;

/// Number of aim directions used by the probe action set.
pub const PROBE_DIRECTIONS: usize = 180;
/// Probe shot lengths, in cells.
pub const PROBE_LADDER_CELLS: [f64; 8] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0];

#[derive(Debug, Error)]
pub enum CourseError {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceCode {
    Tee,
    Fairway,
    Rough,
    Bunker,
    Green,
    Water,
    Tree,
    Oob,
}

impl SurfaceCode {
    pub const ALL: [SurfaceCode; 8] = [
        SurfaceCode::Tee,
        SurfaceCode::Fairway,
        SurfaceCode::Rough,
        SurfaceCode::Bunker,
        SurfaceCode::Green,
        SurfaceCode::Water,
        SurfaceCode::Tree,
        SurfaceCode::Oob,
    ];

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'T' => SurfaceCode::Tee,
            'F' => SurfaceCode::Fairway,
            'R' => SurfaceCode::Rough,
            'B' => SurfaceCode::Bunker,
            'G' => SurfaceCode::Green,
            'W' => SurfaceCode::Water,
            'X' => SurfaceCode::Tree,
            'O' => SurfaceCode::Oob,
            _ => return None,
        })
    }

    pub fn as_char(self) -> char {
        match self {
            SurfaceCode::Tee => 'T',
            SurfaceCode::Fairway => 'F',
            SurfaceCode::Rough => 'R',
            SurfaceCode::Bunker => 'B',
            SurfaceCode::Green => 'G',
            SurfaceCode::Water => 'W',
            SurfaceCode::Tree => 'X',
            SurfaceCode::Oob => 'O',
        }
    }

    /// A ball may be played from here with a full shot.
    pub fn is_playable(self) -> bool {
        matches!(
            self,
            SurfaceCode::Tee | SurfaceCode::Fairway | SurfaceCode::Rough | SurfaceCode::Bunker
        )
    }

    /// Cells that become states of the optimisation model.
    pub fn is_state(self) -> bool {
        self.is_playable() || self == SurfaceCode::Green
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    cell_size_in: f64,
    pin: [f64; 2],
    par: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoleRaster {
    rows: usize,
    cols: usize,
    grid: Vec<SurfaceCode>,
    cell_size: f64,
    pin: Point2,
    tee: Option<CellCoord>,
    par: u8,
}

impl HoleRaster {
    /// Builds and checks a raster. `grid` is row-major.
    pub fn new(
        rows: usize,
        cols: usize,
        grid: Vec<SurfaceCode>,
        cell_size: f64,
        pin: Point2,
        par: u8,
    ) -> Result<Self, CourseError> {
        let bad = |m: String| Err(CourseError::InvariantViolation(m));
        if rows == 0 || cols == 0 || grid.len() != rows * cols {
            return bad(format!("grid of {} cells does not match {rows}x{cols}", grid.len()));
        }
        if !(MIN_CELL_SIZE_IN..=MAX_CELL_SIZE_IN).contains(&cell_size) {
            return bad(format!(
                "cell size {cell_size} in outside [{MIN_CELL_SIZE_IN}, {MAX_CELL_SIZE_IN}]"
            ));
        }
        if !(3..=5).contains(&par) {
            return bad(format!("par {par} not in 3..=5"));
        }
        let mut tees = grid
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == SurfaceCode::Tee)
            .map(|(i, _)| CellCoord::new(i / cols, i % cols));
        let tee = tees.next();
        if tees.next().is_some() {
            return bad("more than one tee cell".into());
        }
        let raster = Self {
            rows,
            cols,
            grid,
            cell_size,
            pin,
            tee,
            par,
        };
        match raster.cell_of(pin) {
            Some(c) if raster.surface(c) == SurfaceCode::Green => Ok(raster),
            Some(c) => bad(format!(
                "pin ({}, {}) lies on {:?}, not green",
                pin.x,
                pin.y,
                raster.surface(c)
            )),
            None => bad(format!("pin ({}, {}) outside the raster", pin.x, pin.y)),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CourseError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header_line) = lines.next().ok_or(CourseError::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let header: Header = serde_json::from_str(header_line).map_err(|e| CourseError::Parse {
            line: 1,
            message: format!("bad header: {e}"),
        })?;
        let mut grid = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (idx, line) in lines {
            let line = line.trim_end();
            let width = line.chars().count();
            match cols {
                None => cols = Some(width),
                Some(w) if w != width => {
                    return Err(CourseError::Parse {
                        line: idx + 1,
                        message: format!("row has {width} cells, expected {w}"),
                    })
                }
                _ => {}
            }
            for ch in line.chars() {
                let code = SurfaceCode::from_char(ch).ok_or_else(|| {
                    CourseError::InvariantViolation(format!("unknown surface code {ch:?} on line {}", idx + 1))
                })?;
                grid.push(code);
            }
            rows += 1;
        }
        let cols = cols.ok_or(CourseError::Parse {
            line: 2,
            message: "no grid rows".into(),
        })?;
        Self::new(
            rows,
            cols,
            grid,
            header.cell_size_in,
            Point2::new(header.pin[0], header.pin[1]),
            header.par,
        )
    }

    pub fn serialize(&self) -> String {
        let header = Header {
            cell_size_in: self.cell_size,
            pin: [self.pin.x, self.pin.y],
            par: self.par,
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for row in self.grid.chunks(self.cols) {
            out.extend(row.iter().map(|s| s.as_char()));
            out.push('\n');
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn pin(&self) -> Point2 {
        self.pin
    }

    pub fn tee(&self) -> Option<CellCoord> {
        self.tee
    }

    pub fn par(&self) -> u8 {
        self.par
    }

    pub fn width(&self) -> f64 {
        self.cols as f64 * self.cell_size
    }

    pub fn height(&self) -> f64 {
        self.rows as f64 * self.cell_size
    }

    pub fn contains(&self, c: CellCoord) -> bool {
        c.row < self.rows && c.col < self.cols
    }

    /// Surface at `c`. Panics when `c` is out of bounds.
    pub fn surface(&self, c: CellCoord) -> SurfaceCode {
        assert!(self.contains(c), "cell {c:?} outside {}x{}", self.rows, self.cols);
        self.grid[c.row * self.cols + c.col]
    }

    pub fn cell_of(&self, p: Point2) -> Option<CellCoord> {
        CellCoord::containing(p, self.cell_size).filter(|c| self.contains(*c))
    }

    pub fn center(&self, c: CellCoord) -> Point2 {
        c.center(self.cell_size)
    }

    pub fn distance_to_pin(&self, c: CellCoord) -> f64 {
        self.center(c).distance(&self.pin)
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellCoord, SurfaceCode)> + '_ {
        self.grid
            .iter()
            .enumerate()
            .map(move |(i, s)| (CellCoord::new(i / self.cols, i % self.cols), *s))
    }

    pub fn grid_rows(&self) -> Vec<String> {
        self.grid
            .chunks(self.cols)
            .map(|r| r.iter().map(|s| s.as_char()).collect())
            .collect()
    }

    /// Border cells that are neither TREE nor OOB.
    pub fn open_border_cells(&self) -> Vec<CellCoord> {
        self.cells()
            .filter(|(c, s)| {
                let edge = c.row == 0 || c.col == 0 || c.row + 1 == self.rows || c.col + 1 == self.cols;
                edge && !matches!(s, SurfaceCode::Tree | SurfaceCode::Oob)
            })
            .map(|(c, _)| c)
            .collect()
    }
}

impl fmt::Display for HoleRaster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub accepted: bool,
    pub missing_tee: bool,
    pub tee_reaches_green: bool,
    pub open_border: Vec<CellCoord>,
    pub unreachable: Vec<CellCoord>,
}

/// Checks that every playable cell can reach the green.
///
/// Each playable cell is probed with straight, error-free shots in
/// [`PROBE_DIRECTIONS`] directions at every [`PROBE_LADDER_CELLS`] length;
/// green reachability is then propagated backwards through the resulting
/// transition graph. The result depends only on the raster.
pub fn validate_hole(raster: &HoleRaster) -> ValidationReport {
    let open_border = raster.open_border_cells();
    let index = |c: CellCoord| c.row * raster.cols() + c.col;
    let n = raster.rows() * raster.cols();
    let mut predecessors: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut reaches = vec![false; n];
    let mut queue = VecDeque::new();

    if open_border.is_empty() {
        let step = std::f64::consts::TAU / PROBE_DIRECTIONS as f64;
        for (cell, surface) in raster.cells() {
            if surface == SurfaceCode::Green {
                reaches[index(cell)] = true;
                queue.push_back(index(cell));
                continue;
            }
            if !surface.is_playable() {
                continue;
            }
            let origin = raster.center(cell);
            let mut seen = Vec::new();
            for k in 0..PROBE_DIRECTIONS {
                let angle = k as f64 * step;
                for cells in PROBE_LADDER_CELLS {
                    let dist = cells * raster.cell_size();
                    let frame = CanonicalFrame::aimed(origin, angle, dist);
                    let ShotOutcome { final_cell, .. } =
                        simulate_shot(raster, cell, &frame, Point2::new(0.0, dist)).expect("start is playable");
                    let to = index(final_cell) as u32;
                    if final_cell != cell && !seen.contains(&to) {
                        seen.push(to);
                        predecessors[to as usize].push(index(cell) as u32);
                    }
                }
            }
        }
        while let Some(i) = queue.pop_front() {
            for &p in &predecessors[i] {
                if !reaches[p as usize] {
                    reaches[p as usize] = true;
                    queue.push_back(p as usize);
                }
            }
        }
    }

    let unreachable: Vec<CellCoord> = raster
        .cells()
        .filter(|(c, s)| s.is_playable() && !reaches[index(*c)])
        .map(|(c, _)| c)
        .collect();
    let tee_reaches_green = raster.tee().is_some_and(|t| reaches[index(t)]);
    ValidationReport {
        accepted: open_border.is_empty() && unreachable.is_empty() && tee_reaches_green,
        missing_tee: raster.tee().is_none(),
        tee_reaches_green,
        open_border,
        unreachable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn green_3x3() -> String {
        "{\"cell_size_in\":40.0,\"pin\":[60.0,60.0],\"par\":3}\nGGG\nGGG\nGGG\n".to_string()
    }

    #[test]
    fn parses_all_green() {
        let r = HoleRaster::parse(&green_3x3()).unwrap();
        assert_eq!((r.rows(), r.cols()), (3, 3));
        assert_eq!(r.tee(), None);
        assert_eq!(r.surface(CellCoord::new(1, 1)), SurfaceCode::Green);
        assert_eq!(HoleRaster::parse(&r.serialize()).unwrap(), r);
    }

    #[test]
    fn rejects_pin_on_water() {
        let text = "{\"cell_size_in\":40.0,\"pin\":[60.0,60.0],\"par\":3}\nGGG\nGWG\nGGG\n";
        assert!(matches!(
            HoleRaster::parse(text),
            Err(CourseError::InvariantViolation(_))
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        let cases = [
            ("", "empty"),
            ("not json\nGGG\n", "header"),
            (
                "{\"cell_size_in\":40.0,\"pin\":[60.0,60.0],\"par\":3}\nGGG\nGG\n",
                "ragged",
            ),
            ("{\"cell_size_in\":40.0,\"pin\":[60.0,60.0],\"par\":3}\n", "no rows"),
        ];
        for (text, what) in cases {
            assert!(
                matches!(HoleRaster::parse(text), Err(CourseError::Parse { .. })),
                "{what}"
            );
        }
        let small = "{\"cell_size_in\":10.0,\"pin\":[15.0,15.0],\"par\":3}\nGGG\nGGG\nGGG\n";
        assert!(matches!(
            HoleRaster::parse(small),
            Err(CourseError::InvariantViolation(_))
        ));
        let unknown = "{\"cell_size_in\":40.0,\"pin\":[60.0,60.0],\"par\":3}\nGGG\nGZG\nGGG\n";
        assert!(matches!(
            HoleRaster::parse(unknown),
            Err(CourseError::InvariantViolation(_))
        ));
        let two_tees = "{\"cell_size_in\":40.0,\"pin\":[60.0,60.0],\"par\":3}\nTGG\nGGG\nGGT\n";
        assert!(matches!(
            HoleRaster::parse(two_tees),
            Err(CourseError::InvariantViolation(_))
        ));
    }

    fn corridor() -> HoleRaster {
        let rows = [
            "OOOOOOO", "OGGGGGO", "OGGGGGO", "ORFFFRO", "ORFFFRO", "ORFFFRO", "ORFFFRO", "ORFFFRO", "ORRTRRO",
            "OOOOOOO",
        ];
        let mut text = String::from("{\"cell_size_in\":50.0,\"pin\":[175.0,75.0],\"par\":4}\n");
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        HoleRaster::parse(&text).unwrap()
    }

    #[test]
    fn corridor_is_accepted() {
        let report = validate_hole(&corridor());
        assert!(report.accepted, "{report:?}");
    }

    #[test]
    fn rough_pocket_ringed_by_trees_is_unreachable() {
        let rows = [
            "OOOOOOOOO",
            "OGGGGGGGO",
            "OFFFFFFFO",
            "OFFXXXFFO",
            "OFFXRXFFO",
            "OFFXXXFFO",
            "OFFFTFFFO",
            "OOOOOOOOO",
        ];
        let mut text = String::from("{\"cell_size_in\":50.0,\"pin\":[225.0,75.0],\"par\":4}\n");
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        let raster = HoleRaster::parse(&text).unwrap();
        let report = validate_hole(&raster);
        assert!(!report.accepted);
        assert_eq!(report.unreachable, vec![CellCoord::new(4, 4)]);
        assert!(report.tee_reaches_green);
    }

    #[test]
    fn open_border_is_rejected() {
        let rows = ["OGGO", "OFFO", "OTFF", "OOOO"];
        let mut text = String::from("{\"cell_size_in\":50.0,\"pin\":[75.0,25.0],\"par\":3}\n");
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        let raster = HoleRaster::parse(&text).unwrap();
        let report = validate_hole(&raster);
        assert!(!report.accepted);
        assert_eq!(
            report.open_border,
            vec![CellCoord::new(0, 1), CellCoord::new(0, 2), CellCoord::new(2, 3)]
        );
    }
}
