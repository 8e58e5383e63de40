//! Target-aligned coordinate frames and integer grid traversal.
//!
//! All lengths are inches. A [`CanonicalFrame`] rotates world coordinates so
//! that the aimed-at point sits at `(0, distance)`; positive `x` in that frame
//! is a miss to the right of the target line.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate frame: origin and target coincide at ({x}, {y})")]
    DegenerateFrame { x: f64, y: f64 },
    #[error("non-finite coordinate")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (*self - *other).norm()
    }

    pub fn scale(&self, factor: f64) -> Point2 {
        Point2::new(self.x * factor, self.y * factor)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Rotation taking world displacements into a target-aligned frame.
///
/// `rotation` is stored row-major and always maps the unit aim vector to
/// `(0, 1)`. [`CanonicalFrame::from_canonical`] applies its transpose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalFrame {
    origin: Point2,
    rotation: [[f64; 2]; 2],
    distance: f64,
}

impl CanonicalFrame {
    /// Frame at `origin` whose `+y` axis points at `target`.
    pub fn new(origin: Point2, target: Point2) -> Result<Self, GeometryError> {
        if !origin.is_finite() || !target.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let v = target - origin;
        let distance = v.norm();
        if distance == 0.0 {
            return Err(GeometryError::DegenerateFrame {
                x: origin.x,
                y: origin.y,
            });
        }
        let unit = v.scale(1.0 / distance);
        Ok(Self::with_unit(origin, unit, distance))
    }

    /// Frame at `origin` aimed along `angle` radians (counter-clockwise from
    /// the world `+x` axis), with the target `distance` inches away.
    pub fn aimed(origin: Point2, angle: f64, distance: f64) -> Self {
        let unit = Point2::new(angle.cos(), angle.sin());
        Self::with_unit(origin, unit, distance)
    }

    fn with_unit(origin: Point2, unit: Point2, distance: f64) -> Self {
        // Rows chosen so that R * unit = (0, 1) and det R = +1.
        let rotation = [[unit.y, -unit.x], [unit.x, unit.y]];
        Self {
            origin,
            rotation,
            distance,
        }
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn rotation(&self) -> [[f64; 2]; 2] {
        self.rotation
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// World target of the frame, i.e. `from_canonical((0, distance))`.
    pub fn target(&self) -> Point2 {
        self.from_canonical(Point2::new(0.0, self.distance))
    }

    pub fn to_canonical(&self, p: Point2) -> Point2 {
        let d = p - self.origin;
        let r = &self.rotation;
        Point2::new(r[0][0] * d.x + r[0][1] * d.y, r[1][0] * d.x + r[1][1] * d.y)
    }

    pub fn from_canonical(&self, sample: Point2) -> Point2 {
        let r = &self.rotation;
        let dx = r[0][0] * sample.x + r[1][0] * sample.y;
        let dy = r[0][1] * sample.x + r[1][1] * sample.y;
        Point2::new(self.origin.x + dx, self.origin.y + dy)
    }
}

/// Grid cell address. Rows run along world `y`, columns along world `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellCoord {
    pub row: usize,
    pub col: usize,
}

impl CellCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Cell containing `p` for square cells of side `cell_size`. Points on a
    /// boundary belong to the higher-index cell. Returns `None` for negative
    /// or non-finite coordinates.
    pub fn containing(p: Point2, cell_size: f64) -> Option<CellCoord> {
        if !p.is_finite() {
            return None;
        }
        let col = (p.x / cell_size).floor();
        let row = (p.y / cell_size).floor();
        if col < 0.0 || row < 0.0 {
            return None;
        }
        Some(CellCoord::new(row as usize, col as usize))
    }

    pub fn center(&self, cell_size: f64) -> Point2 {
        Point2::new((self.col as f64 + 0.5) * cell_size, (self.row as f64 + 0.5) * cell_size)
    }
}

/// Cells visited by the segment from `a` to `b`, in order from `a`.
///
/// 8-connected Bresenham walk along the dominant axis. On the minor axis each
/// step picks the cell nearest the exact line, rounding exact half-cell ties
/// toward the higher index, so the visited set does not depend on direction.
pub fn bresenham_cells(a: CellCoord, b: CellCoord) -> Vec<CellCoord> {
    let mut out = Vec::new();
    bresenham_for_each(a, b, |c| {
        out.push(c);
        true
    });
    out
}

/// Visits the cells of [`bresenham_cells`] in order until `visit` returns
/// `false`. Allocation-free; used on the simulator hot path.
pub fn bresenham_for_each(a: CellCoord, b: CellCoord, mut visit: impl FnMut(CellCoord) -> bool) {
    let (r0, c0) = (a.row as i64, a.col as i64);
    let (r1, c1) = (b.row as i64, b.col as i64);
    let (dr, dc) = (r1 - r0, c1 - c0);
    let rows_major = dr.abs() >= dc.abs();
    let (major0, major_delta, minor0, minor_delta) = if rows_major { (r0, dr, c0, dc) } else { (c0, dc, r0, dr) };
    let steps = major_delta.abs();
    let major_step = major_delta.signum();
    let mut minor = minor0;
    // err = 2 * steps * (exact_minor - minor); kept in [-steps, steps).
    let mut err: i64 = 0;
    for i in 0..=steps {
        let major = major0 + i * major_step;
        let (row, col) = if rows_major { (major, minor) } else { (minor, major) };
        if !visit(CellCoord::new(row as usize, col as usize)) {
            return;
        }
        err += 2 * minor_delta;
        if err >= steps && steps > 0 {
            minor += 1;
            err -= 2 * steps;
        } else if err < -steps {
            minor -= 1;
            err += 2 * steps;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Point2, b: Point2, tol: f64) -> bool {
        (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol
    }

    #[test]
    fn aligned_frame_is_identity() {
        let f = CanonicalFrame::new(Point2::ORIGIN, Point2::new(0.0, 5.0)).unwrap();
        assert_eq!(f.rotation(), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(f.distance(), 5.0);
        assert_eq!(f.to_canonical(Point2::new(1.0, 2.0)), Point2::new(1.0, 2.0));
        assert_eq!(f.from_canonical(Point2::new(2.0, 3.0)), Point2::new(2.0, 3.0));
    }

    #[test]
    fn three_four_five() {
        let f = CanonicalFrame::new(Point2::ORIGIN, Point2::new(3.0, 4.0)).unwrap();
        assert!((f.distance() - 5.0).abs() < 1e-12);
        assert!(close(
            f.to_canonical(Point2::new(3.0, 4.0)),
            Point2::new(0.0, 5.0),
            1e-9
        ));
        assert!(close(f.to_canonical(Point2::ORIGIN), Point2::ORIGIN, 1e-12));
        assert!(close(
            f.from_canonical(Point2::new(0.0, 5.0)),
            Point2::new(3.0, 4.0),
            1e-9
        ));
    }

    #[test]
    fn degenerate_frame() {
        let p = Point2::new(10.0, 10.0);
        assert!(matches!(
            CanonicalFrame::new(p, p),
            Err(GeometryError::DegenerateFrame { .. })
        ));
        assert_eq!(
            CanonicalFrame::new(Point2::new(f64::NAN, 0.0), p),
            Err(GeometryError::NonFinite)
        );
    }

    #[test]
    fn positive_x_is_right_of_the_line() {
        // Facing +y with x to the right: a miss toward +x is a miss right.
        let f = CanonicalFrame::new(Point2::ORIGIN, Point2::new(0.0, 100.0)).unwrap();
        assert!(f.to_canonical(Point2::new(5.0, 100.0)).x > 0.0);
        // Facing +x, "right" is -y.
        let f = CanonicalFrame::new(Point2::ORIGIN, Point2::new(100.0, 0.0)).unwrap();
        assert!(f.to_canonical(Point2::new(100.0, -5.0)).x > 0.0);
    }

    #[test]
    fn aimed_frame_hits_its_target() {
        let f = CanonicalFrame::aimed(Point2::new(10.0, 20.0), std::f64::consts::FRAC_PI_2, 50.0);
        assert!(close(f.target(), Point2::new(10.0, 70.0), 1e-9));
    }

    #[test]
    fn point_to_cell_boundaries() {
        assert_eq!(
            CellCoord::containing(Point2::new(0.0, 0.0), 10.0),
            Some(CellCoord::new(0, 0))
        );
        assert_eq!(
            CellCoord::containing(Point2::new(10.0, 9.99), 10.0),
            Some(CellCoord::new(0, 1))
        );
        assert_eq!(CellCoord::containing(Point2::new(-0.1, 5.0), 10.0), None);
        assert_eq!(CellCoord::new(2, 3).center(10.0), Point2::new(35.0, 25.0));
    }

    #[test]
    fn bresenham_small_cases() {
        let c = CellCoord::new;
        assert_eq!(bresenham_cells(c(0, 0), c(0, 0)), vec![c(0, 0)]);
        assert_eq!(bresenham_cells(c(0, 0), c(2, 2)), vec![c(0, 0), c(1, 1), c(2, 2)]);
        assert_eq!(
            bresenham_cells(c(0, 0), c(1, 3)),
            vec![c(0, 0), c(0, 1), c(1, 2), c(1, 3)]
        );
        // Exact half-cell tie at col 1 resolves to the higher row either way.
        assert_eq!(bresenham_cells(c(0, 0), c(1, 2)), vec![c(0, 0), c(1, 1), c(1, 2)]);
        assert_eq!(bresenham_cells(c(1, 2), c(0, 0)), vec![c(1, 2), c(1, 1), c(0, 0)]);
    }

    #[test]
    fn bresenham_early_stop() {
        let mut seen = 0;
        bresenham_for_each(CellCoord::new(0, 0), CellCoord::new(0, 9), |_| {
            seen += 1;
            seen < 3
        });
        assert_eq!(seen, 3);
    }

    fn arb_frame() -> impl Strategy<Value = (Point2, Point2)> {
        let coord = -1.0e5..1.0e5f64;
        (coord.clone(), coord.clone(), coord.clone(), coord)
            .prop_filter("distinct", |(a, b, c, d)| (a - c).abs() + (b - d).abs() > 1e-3)
            .prop_map(|(a, b, c, d)| (Point2::new(a, b), Point2::new(c, d)))
    }

    proptest! {
        #[test]
        fn rotation_is_orthogonal((o, t) in arb_frame()) {
            let f = CanonicalFrame::new(o, t).unwrap();
            let r = f.rotation();
            let rtr = [
                [r[0][0] * r[0][0] + r[1][0] * r[1][0], r[0][0] * r[0][1] + r[1][0] * r[1][1]],
                [r[0][1] * r[0][0] + r[1][1] * r[1][0], r[0][1] * r[0][1] + r[1][1] * r[1][1]],
            ];
            prop_assert!((rtr[0][0] - 1.0).abs() < 1e-9);
            prop_assert!((rtr[1][1] - 1.0).abs() < 1e-9);
            prop_assert!(rtr[0][1].abs() < 1e-9);
            let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
            prop_assert!((det - 1.0).abs() < 1e-9);
            let mapped = f.to_canonical(t);
            prop_assert!(mapped.x.abs() < 1e-6);
            prop_assert!((mapped.y - f.distance()).abs() < 1e-6);
        }

        #[test]
        fn canonical_round_trip((o, t) in arb_frame(), px in -1.0e5..1.0e5f64, py in -1.0e5..1.0e5f64) {
            let f = CanonicalFrame::new(o, t).unwrap();
            let p = Point2::new(px, py);
            let back = f.from_canonical(f.to_canonical(p));
            prop_assert!(close(back, p, 1e-6));
            let q = f.to_canonical(p);
            prop_assert!(((q.norm() - (p - o).norm()) / (p - o).norm().max(1.0)).abs() < 1e-9);
        }

        #[test]
        fn bresenham_shape(r0 in 0usize..40, c0 in 0usize..40, r1 in 0usize..40, c1 in 0usize..40) {
            let a = CellCoord::new(r0, c0);
            let b = CellCoord::new(r1, c1);
            let cells = bresenham_cells(a, b);
            prop_assert_eq!(cells[0], a);
            prop_assert_eq!(*cells.last().unwrap(), b);
            let expected_len = r0.abs_diff(r1).max(c0.abs_diff(c1)) + 1;
            prop_assert_eq!(cells.len(), expected_len);
            for w in cells.windows(2) {
                prop_assert!(w[0].row.abs_diff(w[1].row) <= 1 && w[0].col.abs_diff(w[1].col) <= 1);
                prop_assert!(w[0] != w[1]);
            }
            let mut fwd = cells.clone();
            let mut rev = bresenham_cells(b, a);
            fwd.sort();
            rev.sort();
            prop_assert_eq!(fwd, rev);
        }
    }
}
