//! Support function of `domain ∩ constraints`.
//!
//! Lets callers test containment of curved regions (disk caps) in a
//! half-plane without a vertex list.

use super::{Domain, HalfPlane, Point, ALG_EPS, GEOM_EPS};
use crate::{Error, Result};

/// Clips a convex polygon by a half-plane (Sutherland–Hodgman). Points
/// within [`GEOM_EPS`] of the boundary count as inside.
pub fn clip_polygon(poly: &[Point], h: &HalfPlane) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    if n == 1 {
        if h.eval(poly[0]) <= GEOM_EPS {
            out.push(poly[0]);
        }
        return out;
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let (ea, eb) = (h.eval(a), h.eval(b));
        let (a_in, b_in) = (ea <= GEOM_EPS, eb <= GEOM_EPS);
        if a_in {
            push_distinct(&mut out, a);
        }
        if a_in != b_in && (ea - eb).abs() > 0.0 {
            let t = ea / (ea - eb);
            push_distinct(&mut out, a + (b - a) * t);
        }
    }
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

fn push_distinct(out: &mut Vec<Point>, p: Point) {
    if out.last().map_or(true, |q| q.dist(p) > ALG_EPS) {
        out.push(p);
    }
}

/// Shoelace area of a simple polygon (absolute value).
pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum();
    0.5 * twice.abs()
}

/// `max { direction · p : p in domain, p in every constraint }`.
pub fn region_support(domain: Domain, constraints: &[HalfPlane], direction: Point) -> Result<f64> {
    region_support_point(domain, constraints, direction).map(|p| direction.dot(p))
}

/// A maximizer of `direction · p` over `domain ∩ constraints`.
///
/// Polygon domains are clipped and the best vertex returned. On the disk
/// the maximizer is one of: the disk's own support point, an intersection
/// of a constraint line with the circle, or an intersection of two
/// constraint lines; the best feasible candidate wins.
pub fn region_support_point(
    domain: Domain,
    constraints: &[HalfPlane],
    direction: Point,
) -> Result<Point> {
    if !(direction.norm() > ALG_EPS) {
        return Err(Error::InvalidArgument(
            "support direction must be nonzero".into(),
        ));
    }
    let best = |pts: &mut dyn Iterator<Item = Point>| {
        pts.fold(None::<Point>, |acc, p| match acc {
            Some(q) if direction.dot(q) >= direction.dot(p) => Some(q),
            _ => Some(p),
        })
    };
    match domain.polygon() {
        Some(mut poly) => {
            for h in constraints {
                poly = clip_polygon(&poly, h);
                if poly.is_empty() {
                    return Err(Error::EmptyRegion);
                }
            }
            best(&mut poly.into_iter()).ok_or(Error::EmptyRegion)
        }
        None => {
            let feasible = |p: Point| constraints.iter().all(|h| h.eval(p) <= GEOM_EPS);
            let mut candidates =
                Vec::with_capacity(1 + 2 * constraints.len() + constraints.len().pow(2));
            candidates.push(direction * (1.0 / direction.norm()));
            for h in constraints {
                let c = h.offset();
                if c.abs() <= 1.0 + GEOM_EPS {
                    let s = (1.0 - c * c).max(0.0).sqrt();
                    candidates.push(h.foot() + h.tangent() * s);
                    candidates.push(h.foot() - h.tangent() * s);
                }
            }
            for (i, hi) in constraints.iter().enumerate() {
                for hj in &constraints[i + 1..] {
                    if let Some(p) = line_intersection(hi, hj) {
                        if p.norm() <= 1.0 + GEOM_EPS {
                            candidates.push(p);
                        }
                    }
                }
            }
            best(&mut candidates.into_iter().filter(|p| feasible(*p))).ok_or(Error::EmptyRegion)
        }
    }
}

fn line_intersection(a: &HalfPlane, b: &HalfPlane) -> Option<Point> {
    let (na, nb) = (a.normal(), b.normal());
    let det = na.cross(nb);
    if det.abs() <= ALG_EPS {
        return None;
    }
    let (ca, cb) = (a.offset(), b.offset());
    Some(Point::new(
        (ca * nb.y - na.y * cb) / det,
        (na.x * cb - ca * nb.x) / det,
    ))
}
