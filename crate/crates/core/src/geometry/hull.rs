use super::point::orient;
use super::{HalfPlane, Point, ALG_EPS, GEOM_EPS};

/// Convex hull of a point set, kept as a strictly convex counter-clockwise
/// vertex list.
///
/// Degenerate hulls are allowed: no vertices, a single point, or a segment
/// (two vertices, e.g. every hull on the interval). Duplicate points and
/// points interior to an edge are dropped, so the vertices are exactly the
/// extreme points of the inserted set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexHull {
    vertices: Vec<Point>,
}

impl ConvexHull {
    pub fn new() -> Self {
        Self::default()
    }

    /// Batch construction (Andrew's monotone chain).
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Self {
        let mut pts: Vec<Point> = points.into_iter().collect();
        Self {
            vertices: monotone_chain(&mut pts),
        }
    }

    #[inline]
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Whether `p` lies inside or on the hull, within [`GEOM_EPS`].
    pub fn contains(&self, p: Point) -> bool {
        match self.vertices.as_slice() {
            [] => false,
            [v] => v.dist(p) <= GEOM_EPS,
            [a, b] => dist_to_segment(p, *a, *b) <= GEOM_EPS,
            vs => {
                let n = vs.len();
                (0..n).all(|i| {
                    let (a, b) = (vs[i], vs[(i + 1) % n]);
                    orient(a, b, p) >= -GEOM_EPS * a.dist(b)
                })
            }
        }
    }

    /// Adds `p`; returns `true` when the vertex set changed.
    pub fn insert(&mut self, p: Point) -> bool {
        debug_assert!(p.is_finite());
        if self.contains(p) {
            return false;
        }
        let mut pts = Vec::with_capacity(self.vertices.len() + 1);
        pts.extend_from_slice(&self.vertices);
        pts.push(p);
        self.vertices = monotone_chain(&mut pts);
        true
    }

    /// Hull of the current vertices together with `p`.
    pub fn inserted(&self, p: Point) -> ConvexHull {
        let mut out = self.clone();
        out.insert(p);
        out
    }

    /// `(min, max)` of `direction · v` over the vertices.
    #[inline]
    pub fn extent(&self, direction: Point) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                let s = direction.dot(*v);
                (lo.min(s), hi.max(s))
            })
    }

    /// Polygon area; zero for degenerate hulls.
    pub fn area(&self) -> f64 {
        super::polygon_area(&self.vertices)
    }
}

/// Whether every vertex satisfies `normal · v <= offset + 1e-12`; by
/// convexity this is containment of the whole hull.
pub fn hull_in_halfplane(hull: &ConvexHull, h: &HalfPlane) -> bool {
    debug_assert!(!hull.is_empty());
    hull.vertices.iter().all(|v| h.eval(*v) <= ALG_EPS)
}

pub fn hull_insert(hull: &ConvexHull, p: Point) -> ConvexHull {
    hull.inserted(p)
}

fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Counter-clockwise hull without collinear or repeated vertices.
fn monotone_chain(pts: &mut [Point]) -> Vec<Point> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut uniq: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in pts.iter() {
        if uniq.last() != Some(&p) {
            uniq.push(p);
        }
    }
    if uniq.len() <= 2 {
        return uniq;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * uniq.len());
    for &p in uniq.iter() {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in uniq.iter().rev().skip(1) {
        while hull.len() >= lower && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}
