//! Outcome of a single shot realization on a hole raster.
//!
//! The hypothetical landing point is traversed cell by cell from the start.
//! Obstacles are then applied in order: the ball stops in front of the first
//! tree, a ball finishing in water is dropped on the last dry cell before the
//! water, and a ball finishing out of bounds goes back to the start. Water
//! and out-of-bounds cost one penalty stroke; at most one penalty applies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::course::{HoleRaster, SurfaceCode};
use crate::geometry::{bresenham_for_each, CanonicalFrame, CellCoord, Point2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("cannot play from {cell:?}: surface {surface:?} is not playable")]
    StartNotPlayable { cell: CellCoord, surface: SurfaceCode },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShotEvent {
    Clean,
    TreeStop,
    WaterDrop,
    OobReturn,
}

impl ShotEvent {
    pub fn penalty(self) -> u8 {
        match self {
            ShotEvent::WaterDrop | ShotEvent::OobReturn => 1,
            ShotEvent::Clean | ShotEvent::TreeStop => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShotOutcome {
    pub final_cell: CellCoord,
    pub penalty: u8,
    pub event: ShotEvent,
    pub landed_on_green: bool,
    /// Distance from the final cell's center to the pin, when on the green.
    pub distance_to_pin: Option<f64>,
}

/// Cell where a trajectory from the center of `start` toward `end` leaves
/// the raster, or the cell containing `end` when it stays inside.
pub fn clipped_end_cell(raster: &HoleRaster, start: CellCoord, end: Point2) -> CellCoord {
    let origin = raster.center(start);
    let d = end - origin;
    let (w, h) = (raster.width(), raster.height());
    let mut t = 1.0f64;
    if end.x < 0.0 {
        t = t.min(-origin.x / d.x);
    } else if end.x >= w {
        t = t.min((w - origin.x) / d.x);
    }
    if end.y < 0.0 {
        t = t.min(-origin.y / d.y);
    } else if end.y >= h {
        t = t.min((h - origin.y) / d.y);
    }
    let q = Point2::new(origin.x + d.x * t, origin.y + d.y * t);
    let col = (q.x / raster.cell_size())
        .floor()
        .clamp(0.0, (raster.cols() - 1) as f64);
    let row = (q.y / raster.cell_size())
        .floor()
        .clamp(0.0, (raster.rows() - 1) as f64);
    CellCoord::new(row as usize, col as usize)
}

/// Plays one realization `sample` (canonical frame of `frame`) from `start`.
pub fn simulate_shot(
    raster: &HoleRaster,
    start: CellCoord,
    frame: &CanonicalFrame,
    sample: Point2,
) -> Result<ShotOutcome, SimError> {
    let start_surface = raster.surface(start);
    if !start_surface.is_playable() {
        return Err(SimError::StartNotPlayable {
            cell: start,
            surface: start_surface,
        });
    }
    let end = clipped_end_cell(raster, start, frame.from_canonical(sample));

    // Walk up to the first tree, remembering the last cell that is not water.
    let mut last = start;
    let mut last_dry = start;
    let mut hit_tree = false;
    bresenham_for_each(start, end, |c| match raster.surface(c) {
        SurfaceCode::Tree => {
            hit_tree = true;
            false
        }
        SurfaceCode::Water => {
            last = c;
            true
        }
        _ => {
            last = c;
            last_dry = c;
            true
        }
    });

    let mut event = if hit_tree {
        ShotEvent::TreeStop
    } else {
        ShotEvent::Clean
    };
    let mut resting = last;
    if raster.surface(resting) == SurfaceCode::Water {
        resting = last_dry;
        event = ShotEvent::WaterDrop;
    }
    if raster.surface(resting) == SurfaceCode::Oob {
        resting = start;
        event = ShotEvent::OobReturn;
    }

    let landed_on_green = raster.surface(resting) == SurfaceCode::Green;
    Ok(ShotOutcome {
        final_cell: resting,
        penalty: event.penalty(),
        event,
        landed_on_green,
        distance_to_pin: landed_on_green.then(|| raster.distance_to_pin(resting)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::bresenham_cells;

    const CELL: f64 = 50.0;

    fn raster(rows: &[&str], pin: (usize, usize)) -> HoleRaster {
        let pin = CellCoord::new(pin.0, pin.1).center(CELL);
        let mut text = format!("{{\"cell_size_in\":{CELL},\"pin\":[{},{}],\"par\":4}}\n", pin.x, pin.y);
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        HoleRaster::parse(&text).unwrap()
    }

    /// Shoots from `start` at the center of `target` with no error.
    fn shoot(r: &HoleRaster, start: (usize, usize), target: (usize, usize)) -> ShotOutcome {
        let s = CellCoord::new(start.0, start.1);
        let frame = CanonicalFrame::new(r.center(s), r.center(CellCoord::new(target.0, target.1))).unwrap();
        simulate_shot(r, s, &frame, Point2::new(0.0, frame.distance())).unwrap()
    }

    #[test]
    fn clean_shot_onto_green() {
        let r = raster(&["OOOOO", "OGGGO", "OFFFO", "OFFFO", "OFTFO", "OOOOO"], (1, 2));
        let out = shoot(&r, (4, 2), (1, 2));
        assert_eq!(out.event, ShotEvent::Clean);
        assert_eq!(out.penalty, 0);
        assert!(out.landed_on_green);
        assert_eq!(out.final_cell, CellCoord::new(1, 2));
        assert_eq!(out.distance_to_pin, Some(0.0));
    }

    #[test]
    fn tree_wall_stops_the_ball() {
        // Hand trace: (3,0) -> (0,4) walks (3,0),(2,1),(2,2)X... col-major with
        // rows rounding half up: exact rows 3, 2.25, 1.5, 0.75, 0 -> 3,2,2,1,0.
        let r = raster(&["FFXFG", "FFXFF", "FFXFF", "TFXFF", "FFXFF"], (0, 4));
        let path = bresenham_cells(CellCoord::new(3, 0), CellCoord::new(0, 4));
        assert_eq!(
            path,
            vec![
                CellCoord::new(3, 0),
                CellCoord::new(2, 1),
                CellCoord::new(2, 2),
                CellCoord::new(1, 3),
                CellCoord::new(0, 4)
            ]
        );
        let out = shoot(&r, (3, 0), (0, 4));
        assert_eq!(out.event, ShotEvent::TreeStop);
        assert_eq!(out.penalty, 0);
        assert_eq!(out.final_cell, CellCoord::new(2, 1));
        assert!(!out.landed_on_green);
    }

    #[test]
    fn water_drop_at_entry() {
        let r = raster(
            &[
                "OOOOOOO", "OGGGGGO", "OFWWWFO", "OFWWWFO", "ORFFFRO", "ORFTFRO", "OOOOOOO",
            ],
            (1, 3),
        );
        let out = shoot(&r, (5, 3), (3, 3));
        assert_eq!(out.event, ShotEvent::WaterDrop);
        assert_eq!(out.penalty, 1);
        assert_eq!(out.final_cell, CellCoord::new(4, 3));
        // Carrying the water is clean.
        let out = shoot(&r, (5, 3), (1, 3));
        assert_eq!(out.event, ShotEvent::Clean);
        assert!(out.landed_on_green);
    }

    #[test]
    fn oob_returns_to_start() {
        let r = raster(&["OOOOO", "OGGGO", "OFFFO", "OFTFO", "OOOOO"], (1, 2));
        let out = shoot(&r, (3, 2), (3, 4));
        assert_eq!(out.event, ShotEvent::OobReturn);
        assert_eq!(out.penalty, 1);
        assert_eq!(out.final_cell, CellCoord::new(3, 2));
    }

    #[test]
    fn far_shots_clip_to_the_border() {
        let r = raster(&["OOOOO", "OGGGO", "OFFFO", "OFTFO", "OOOOO"], (1, 2));
        let s = CellCoord::new(3, 2);
        let frame = CanonicalFrame::aimed(r.center(s), -std::f64::consts::FRAC_PI_2, 10_000.0);
        let out = simulate_shot(&r, s, &frame, Point2::new(0.0, 10_000.0)).unwrap();
        assert_eq!(out.event, ShotEvent::OobReturn);
        assert_eq!(out.final_cell, s);
        assert_eq!(clipped_end_cell(&r, s, Point2::new(125.0, -1e6)), CellCoord::new(0, 2));
        assert_eq!(clipped_end_cell(&r, s, Point2::new(1e6, 175.0)), CellCoord::new(3, 4));
    }

    #[test]
    fn water_then_oob_gets_one_penalty() {
        // Ball lands in water whose last dry cell is out of bounds: back to start.
        let r = raster(&["OOOOO", "OGGGO", "OFFFO", "OFTOW", "OOOOO"], (1, 2));
        let out = shoot(&r, (3, 2), (3, 4));
        assert_eq!(out.event, ShotEvent::OobReturn);
        assert_eq!(out.penalty, 1);
        assert_eq!(out.final_cell, CellCoord::new(3, 2));
    }

    #[test]
    fn cannot_play_from_water() {
        let r = raster(&["OOOOO", "OGGGO", "OFWFO", "OFTFO", "OOOOO"], (1, 2));
        let s = CellCoord::new(2, 2);
        let frame = CanonicalFrame::aimed(r.center(s), 0.0, 100.0);
        assert!(matches!(
            simulate_shot(&r, s, &frame, Point2::new(0.0, 100.0)),
            Err(SimError::StartNotPlayable { .. })
        ));
    }
}
