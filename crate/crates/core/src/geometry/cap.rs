use rand::{Rng, RngExt};

use super::region::{clip_polygon, polygon_area};
use super::{region_support, Domain, HalfPlane, Point, ALG_EPS, GEOM_EPS};
use crate::{Error, Result};

/// Shape parameters of a cap `domain ∩ half`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CapShape {
    /// Circular segment; `height` is the distance from the chord to the far
    /// point of the cap, in `(0, 2)`.
    DiskSegment { height: f64 },
    /// Right triangle at a square corner with legs `a <= b`.
    SquareTriangle { a: f64, b: f64 },
    /// Right trapezoid. `(a, b = 1)` are the legs of the largest triangular
    /// cap it contains: `a` is the longer of the two parallel sides.
    SquareTrapezoid { a: f64, b: f64 },
    /// Square minus a corner triangle; `(a, b)` are the legs of the cut-off
    /// corner, `a <= b`.
    SquarePentagon { a: f64, b: f64 },
    /// Sub-interval of `[0, 1]` adjacent to one endpoint.
    IntervalSegment { length: f64 },
}

/// `A = domain ∩ half`, a proper nonempty piece of the domain, together with
/// its chord endpoints (where the boundary line of `half` meets the domain
/// boundary). On the interval both endpoints are the single cut point.
#[derive(Clone, Debug, PartialEq)]
pub struct Cap {
    domain: Domain,
    half: HalfPlane,
    z1: Point,
    z2: Point,
    shape: CapShape,
    area: f64,
    polygon: Option<Vec<Point>>,
}

impl Cap {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn half(&self) -> &HalfPlane {
        &self.half
    }

    pub fn z1(&self) -> Point {
        self.z1
    }

    pub fn z2(&self) -> Point {
        self.z2
    }

    pub fn shape(&self) -> CapShape {
        self.shape
    }

    /// Area (length on the interval).
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Vertices of a polygonal cap (square or interval), counter-clockwise.
    pub fn polygon(&self) -> Option<&[Point]> {
        self.polygon.as_deref()
    }

    /// Area of `domain \ A`.
    pub fn complement_area(&self) -> f64 {
        self.domain.measure() - self.area
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.domain.contains(p, tol) && self.half.contains(p, tol)
    }

    /// The closed complement `Ā` as a cap of the same domain.
    pub fn complement(&self) -> Result<Cap> {
        make_cap(self.domain, self.half.complement())
    }

    /// Uniform draws from the cap.
    pub fn sampler(&self) -> CapSampler {
        CapSampler::new(self)
    }
}

/// Uniform sampler over a cap: rejection from the cap's bounding rectangle
/// in the frame aligned with the chord.
#[derive(Clone, Debug)]
pub struct CapSampler {
    domain: Domain,
    half: HalfPlane,
    tangent: Point,
    normal: Point,
    u: (f64, f64),
    v: (f64, f64),
    x_range: (f64, f64),
}

impl CapSampler {
    fn new(cap: &Cap) -> Self {
        let (t, n) = (cap.half.tangent(), cap.half.normal());
        let c = [cap.half];
        let sup = |d: Point| region_support(cap.domain, &c, d).expect("cap is nonempty");
        Self {
            domain: cap.domain,
            half: cap.half,
            tangent: t,
            normal: n,
            u: (-sup(-t), sup(t)),
            v: (-sup(-n), sup(n)),
            x_range: (-sup(Point::new(-1.0, 0.0)), sup(Point::new(1.0, 0.0))),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        if self.domain == Domain::Interval {
            // The normal frame is degenerate here; use the x-extent directly.
            let (x0, x1) = self.x_range;
            return Point::new(x0 + (x1 - x0) * rng.random::<f64>(), 0.0);
        }
        loop {
            let u = self.u.0 + (self.u.1 - self.u.0) * rng.random::<f64>();
            let v = self.v.0 + (self.v.1 - self.v.0) * rng.random::<f64>();
            let p = self.tangent * u + self.normal * v;
            if self.domain.contains(p, 0.0) && self.half.eval(p) <= 0.0 {
                return p;
            }
        }
    }
}

/// Area of a unit-disk segment of the given height, `0 <= height <= 2`.
pub fn disk_segment_area(height: f64) -> f64 {
    let d = 1.0 - height;
    d.clamp(-1.0, 1.0).acos() - d * (1.0 - d * d).max(0.0).sqrt()
}

/// Builds the cap `domain ∩ h`.
///
/// Fails with [`Error::NoChord`] when the boundary line of `h` misses the
/// domain interior, i.e. when the cap would be empty or the whole domain.
pub fn make_cap(domain: Domain, h: HalfPlane) -> Result<Cap> {
    match domain {
        Domain::UnitDisk => {
            let c = h.offset();
            if c.abs() >= 1.0 - GEOM_EPS {
                return Err(Error::NoChord);
            }
            let s = (1.0 - c * c).sqrt();
            let height = 1.0 + c;
            Ok(Cap {
                domain,
                half: h,
                z1: h.foot() - h.tangent() * s,
                z2: h.foot() + h.tangent() * s,
                shape: CapShape::DiskSegment { height },
                area: disk_segment_area(height),
                polygon: None,
            })
        }
        Domain::Interval => {
            let n = h.normal();
            if n.x.abs() <= ALG_EPS {
                return Err(Error::NoChord);
            }
            let x0 = h.offset() / n.x;
            if !(x0 > GEOM_EPS && x0 < 1.0 - GEOM_EPS) {
                return Err(Error::NoChord);
            }
            let z = Point::new(x0, 0.0);
            let (poly, length) = if n.x > 0.0 {
                (vec![Point::ORIGIN, z], x0)
            } else {
                (vec![z, Point::new(1.0, 0.0)], 1.0 - x0)
            };
            Ok(Cap {
                domain,
                half: h,
                z1: z,
                z2: z,
                shape: CapShape::IntervalSegment { length },
                area: length,
                polygon: Some(poly),
            })
        }
        Domain::UnitSquare => {
            let square = domain.polygon().expect("square is a polygon");
            let poly = clip_polygon(&square, &h);
            let area = polygon_area(&poly);
            if area <= GEOM_EPS || area >= 1.0 - GEOM_EPS {
                return Err(Error::NoChord);
            }
            let on_line: Vec<bool> = poly.iter().map(|p| h.eval(*p).abs() <= GEOM_EPS).collect();
            let t = h.tangent();
            let mut chord: Vec<Point> = poly
                .iter()
                .zip(&on_line)
                .filter(|(_, &on)| on)
                .map(|(p, _)| *p)
                .collect();
            chord.sort_by(|a, b| t.dot(*a).total_cmp(&t.dot(*b)));
            let (z1, z2) = match (chord.first(), chord.last()) {
                (Some(a), Some(b)) if a.dist(*b) > GEOM_EPS => (*a, *b),
                _ => return Err(Error::NoChord),
            };
            let shape = classify_square_cap(&poly, &on_line);
            Ok(Cap {
                domain,
                half: h,
                z1,
                z2,
                shape,
                area,
                polygon: Some(poly),
            })
        }
    }
}

fn sorted(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Reads the shape off the clipped polygon: vertices strictly inside the
/// half-plane are square corners, the rest lie on the chord.
fn classify_square_cap(poly: &[Point], on_line: &[bool]) -> CapShape {
    let n = poly.len();
    let corners: Vec<usize> = (0..n).filter(|&i| !on_line[i]).collect();
    let next_on_line = |i: usize| {
        let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
        [prev, next]
            .into_iter()
            .filter(|&j| on_line[j])
            .collect::<Vec<_>>()
    };
    match corners.len() {
        1 => {
            let c = corners[0];
            let legs: Vec<f64> = next_on_line(c)
                .iter()
                .map(|&j| poly[c].dist(poly[j]))
                .collect();
            let (a, b) = sorted(legs[0], legs[1]);
            CapShape::SquareTriangle { a, b }
        }
        2 => {
            let sides: Vec<f64> = corners
                .iter()
                .flat_map(|&c| next_on_line(c).into_iter().map(move |j| (c, j)))
                .map(|(c, j)| poly[c].dist(poly[j]))
                .collect();
            let a = sides.iter().cloned().fold(0.0, f64::max);
            CapShape::SquareTrapezoid { a, b: 1.0 }
        }
        _ => {
            // Pentagon: the chord endpoints plus the missing corner form the
            // cut-off triangle.
            let ends: Vec<Point> = (0..n).filter(|&i| on_line[i]).map(|i| poly[i]).collect();
            let missing = [
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ]
            .into_iter()
            .find(|q| !poly.iter().any(|p| p.dist(*q) <= GEOM_EPS))
            .unwrap_or(Point::ORIGIN);
            let (a, b) = sorted(missing.dist(ends[0]), missing.dist(ends[ends.len() - 1]));
            CapShape::SquarePentagon { a, b }
        }
    }
}

/// Height of the smaller circular segment cut from the unit disk by the
/// bisector of `w1` and `w2`: one minus the distance from the origin to the
/// bisector line.
pub fn disk_segment_height(w1: Point, w2: Point) -> Result<f64> {
    let d = (w2 - w1).norm();
    if d < ALG_EPS {
        return Err(Error::DegenerateCandidates { distance: d });
    }
    Ok(1.0 - (w2.norm_sq() - w1.norm_sq()).abs() / (2.0 * d))
}
