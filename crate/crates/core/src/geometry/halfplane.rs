use super::{Point, ALG_EPS};
use crate::{Error, Result};

/// Closed half-plane `{p : normal · p <= offset}` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    normal: Point,
    offset: f64,
}

impl HalfPlane {
    /// Builds `{p : normal · p <= offset}`, rescaling so the normal has unit
    /// length.
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if !(len > ALG_EPS) || !len.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "half-plane normal must be finite and nonzero, got ({}, {})",
                normal.x, normal.y
            )));
        }
        Ok(Self {
            normal: normal * (1.0 / len),
            offset: offset / len,
        })
    }

    #[inline]
    pub fn normal(&self) -> Point {
        self.normal
    }

    #[inline]
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance of `p` to the boundary line, negative inside.
    #[inline]
    pub fn eval(&self, p: Point) -> f64 {
        self.normal.dot(p) - self.offset
    }

    #[inline]
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.eval(p) <= tol
    }

    /// Closure of the complementary half-plane.
    #[inline]
    pub fn complement(&self) -> HalfPlane {
        HalfPlane {
            normal: -self.normal,
            offset: -self.offset,
        }
    }

    /// Foot of the perpendicular from the origin onto the boundary line.
    #[inline]
    pub fn foot(&self) -> Point {
        self.normal * self.offset
    }

    /// Unit direction of the boundary line.
    #[inline]
    pub fn tangent(&self) -> Point {
        self.normal.perp()
    }
}

/// The Voronoi cell of `w1` against `w2`: `{p : |p - w1| <= |p - w2|}`.
///
/// The boundary is the perpendicular bisector through the midpoint, with
/// outward normal along `w2 - w1`.
pub fn bisector(w1: Point, w2: Point) -> Result<HalfPlane> {
    let d = w2 - w1;
    let distance = d.norm();
    if distance < ALG_EPS {
        return Err(Error::DegenerateCandidates { distance });
    }
    let normal = d * (1.0 / distance);
    Ok(HalfPlane {
        normal,
        offset: normal.dot(w1.midpoint(w2)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisector_of_unit_segment_is_x_le_half() {
        let h = bisector(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        assert_eq!(h.normal(), Point::new(1.0, 0.0));
        assert!((h.offset() - 0.5).abs() < ALG_EPS);
    }

    #[test]
    fn bisector_of_diagonal_pair() {
        let h = bisector(Point::new(0.2, 0.2), Point::new(0.6, 0.6)).unwrap();
        assert!(h.eval(Point::new(0.4, 0.4)).abs() < ALG_EPS);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h.normal().x - s).abs() < ALG_EPS);
        assert!((h.normal().y - s).abs() < ALG_EPS);
    }

    #[test]
    fn bisector_rejects_coincident_candidates() {
        let w = Point::new(0.3, 0.7);
        assert!(matches!(
            bisector(w, w),
            Err(Error::DegenerateCandidates { .. })
        ));
    }

    #[test]
    fn bisector_separates_candidates() {
        let (w1, w2) = (Point::new(0.1, 0.9), Point::new(0.35, 0.2));
        let h = bisector(w1, w2).unwrap();
        assert!(h.eval(w1) < 0.0);
        assert!(h.eval(w2) > 0.0);
        assert!(h.eval(w1.midpoint(w2)).abs() < ALG_EPS);
        assert!((h.normal().norm() - 1.0).abs() < ALG_EPS);
    }

    #[test]
    fn swapping_candidates_flips_half_plane() {
        let (w1, w2) = (Point::new(0.1, 0.9), Point::new(0.35, 0.2));
        let h12 = bisector(w1, w2).unwrap();
        let h21 = bisector(w2, w1).unwrap();
        assert_eq!(h21.normal(), -h12.normal());
        assert!((h21.offset() + h12.offset()).abs() < ALG_EPS);
    }

    #[test]
    fn new_normalizes() {
        let h = HalfPlane::new(Point::new(3.0, 4.0), 10.0).unwrap();
        assert!((h.normal().norm() - 1.0).abs() < ALG_EPS);
        assert!((h.offset() - 2.0).abs() < ALG_EPS);
        assert!(HalfPlane::new(Point::ORIGIN, 1.0).is_err());
    }
}
