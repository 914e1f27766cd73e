//! Triangular-cap parameters `(a, b)` for a candidate pair in the unit
//! square.
//!
//! The pair is moved into a normal form by one of the eight symmetries of
//! the square: the smaller Voronoi region belongs to the first candidate and
//! contains the corner at the origin, and the difference vector
//! `w2 - w1 = (dx, dy)` satisfies `dx >= dy >= 0`, `dx > 0`. The bisector
//! then crosses the bottom edge at `a = (|w2|^2 - |w1|^2) / (2 dx)` and the
//! left edge (or its extension) at `a / s` with slope `s = dy / dx <= 1`.
//! The region is a right triangle with legs `(a, a/s)` when `a/s <= 1`, and a
//! right trapezoid otherwise, whose largest inscribed triangular cap has
//! legs `(a, 1)`.
//!
//! The normal form is found by trying all eight maps rather than by case
//! analysis.

use super::{Point, ALG_EPS, GEOM_EPS};
use crate::{Error, Result};

/// A symmetry of `[0, 1]^2`: optional transpose, then optional reflections
/// `x -> 1 - x` and `y -> 1 - y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dihedral {
    pub transpose: bool,
    pub flip_x: bool,
    pub flip_y: bool,
}

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral {
        transpose: false,
        flip_x: false,
        flip_y: false,
    };

    pub fn all() -> impl Iterator<Item = Dihedral> {
        (0..8u8).map(|m| Dihedral {
            transpose: m & 1 != 0,
            flip_x: m & 2 != 0,
            flip_y: m & 4 != 0,
        })
    }

    #[inline]
    pub fn apply(self, p: Point) -> Point {
        let (x, y) = if self.transpose {
            (p.y, p.x)
        } else {
            (p.x, p.y)
        };
        Point::new(
            if self.flip_x { 1.0 - x } else { x },
            if self.flip_y { 1.0 - y } else { y },
        )
    }

    /// Linear part, for difference vectors.
    #[inline]
    pub fn apply_vector(self, v: Point) -> Point {
        let (x, y) = if self.transpose {
            (v.y, v.x)
        } else {
            (v.x, v.y)
        };
        Point::new(
            if self.flip_x { -x } else { x },
            if self.flip_y { -y } else { y },
        )
    }

    #[inline]
    pub fn invert(self, p: Point) -> Point {
        let x = if self.flip_x { 1.0 - p.x } else { p.x };
        let y = if self.flip_y { 1.0 - p.y } else { p.y };
        if self.transpose {
            Point::new(y, x)
        } else {
            Point::new(x, y)
        }
    }
}

/// Largest triangular cap inside the smaller Voronoi region of a pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareTriangle {
    /// Shorter leg.
    pub a: f64,
    /// Longer leg.
    pub b: f64,
    /// 1 or 2: which candidate owns the smaller region.
    pub owner: u8,
    /// Symmetry taking the pair to normal form.
    pub map: Dihedral,
    /// Area of the smaller Voronoi region (triangle or trapezoid).
    pub region_area: f64,
    /// Whether the smaller region is itself a triangle.
    pub is_triangle: bool,
}

impl SquareTriangle {
    /// Vertices of the triangular cap in the original coordinates: the
    /// right-angle corner, then the ends of legs `a` and `b`.
    pub fn vertices(&self) -> [Point; 3] {
        [
            self.map.invert(Point::new(0.0, 0.0)),
            self.map.invert(Point::new(self.a, 0.0)),
            self.map.invert(Point::new(0.0, self.b)),
        ]
    }
}

/// Legs `(a, b)`, `a <= b`, of the largest triangular cap in the smaller
/// Voronoi region of `w1`, `w2`.
pub fn square_cap_sides(w1: Point, w2: Point) -> Result<(f64, f64)> {
    square_cap_triangle(w1, w2).map(|t| (t.a, t.b))
}

pub fn square_cap_triangle(w1: Point, w2: Point) -> Result<SquareTriangle> {
    let distance = w1.dist(w2);
    if distance < ALG_EPS {
        return Err(Error::DegenerateCandidates { distance });
    }
    let mut best: Option<SquareTriangle> = None;
    for (owner, u, v) in [(1u8, w1, w2), (2u8, w2, w1)] {
        let Some(tri) = Dihedral::all().find_map(|g| normal_form(owner, g, u, v)) else {
            continue;
        };
        if best.map_or(true, |b| tri.region_area < b.region_area) {
            best = Some(tri);
        }
    }
    best.ok_or(Error::NoChord)
}

fn normal_form(owner: u8, g: Dihedral, u: Point, v: Point) -> Option<SquareTriangle> {
    let d = g.apply_vector(v - u);
    if !(d.x > 0.0 && d.y >= 0.0 && d.x >= d.y) {
        return None;
    }
    let (gu, gv) = (g.apply(u), g.apply(v));
    let a = 0.5 * (gv.norm_sq() - gu.norm_sq()) / d.x;
    if !(a > GEOM_EPS) || a > 1.0 + GEOM_EPS {
        return None;
    }
    let a = a.min(1.0);
    let s = d.y / d.x;
    let (b, region_area, is_triangle) = if a <= s {
        let b = a / s;
        (b, 0.5 * a * b, true)
    } else {
        (1.0, a - 0.5 * s, false)
    };
    Some(SquareTriangle {
        a,
        b,
        owner,
        map: g,
        region_area,
        is_triangle,
    })
}
