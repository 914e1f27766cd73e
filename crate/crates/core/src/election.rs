//! Single-round winner determination under unanimity, for two candidates.
//!
//! Two independent characterizations:
//!
//! - [`voronoi_winner`]: candidate `i` wins iff the members' convex hull lies
//!   in its Voronoi half-plane `H_i`.
//! - [`ball_winner`]: candidate `i` wins iff it is weakly closer than the
//!   other candidate to every extreme point of the hull.
//!
//! Ties are resolved toward candidate 1 and use the same scaled tolerance in
//! both predicates. Exact ties have probability zero under the continuous
//! sampling used everywhere else.

use serde::{Deserialize, Serialize};

use crate::geometry::{
    bisector, region_support, Cap, ConvexHull, Domain, HalfPlane, Point, ALG_EPS,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Candidate {
    First,
    Second,
}

impl Candidate {
    pub fn index(self) -> u8 {
        match self {
            Candidate::First => 1,
            Candidate::Second => 2,
        }
    }

    pub fn other(self) -> Candidate {
        match self {
            Candidate::First => Candidate::Second,
            Candidate::Second => Candidate::First,
        }
    }

    /// The winning point out of `(w1, w2)`.
    pub fn pick(self, w1: Point, w2: Point) -> Point {
        match self {
            Candidate::First => w1,
            Candidate::Second => w2,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectionOutcome {
    pub winner: Option<Candidate>,
}

impl ElectionOutcome {
    pub const NONE: ElectionOutcome = ElectionOutcome { winner: None };

    fn from_flags(first: bool, second: bool) -> Self {
        let winner = if first {
            Some(Candidate::First)
        } else if second {
            Some(Candidate::Second)
        } else {
            None
        };
        Self { winner }
    }

    pub fn accepted(&self) -> bool {
        self.winner.is_some()
    }

    /// Outcome after relabelling the candidates.
    pub fn swapped(self) -> Self {
        Self {
            winner: self.winner.map(Candidate::other),
        }
    }
}

/// Winner by Voronoi-cell containment of the hull.
pub fn voronoi_winner(hull: &ConvexHull, w1: Point, w2: Point) -> Result<ElectionOutcome> {
    let h1 = bisector(w1, w2)?;
    Ok(winner_from_extent(hull, &h1))
}

/// Hot-path form of [`voronoi_winner`] for a precomputed bisector `H_1`.
#[inline]
pub fn winner_from_extent(hull: &ConvexHull, h1: &HalfPlane) -> ElectionOutcome {
    let (lo, hi) = hull.extent(h1.normal());
    let c = h1.offset();
    ElectionOutcome::from_flags(hi - c <= ALG_EPS, c - lo <= ALG_EPS)
}

/// Winner by comparing distances to every hull vertex.
///
/// The tie tolerance is `2|w2 - w1|` times the signed-distance tolerance of
/// [`voronoi_winner`], matching the identity
/// `|v - w1|^2 - |v - w2|^2 = 2 |w2 - w1| (n · v - c)`.
pub fn ball_winner(hull: &ConvexHull, w1: Point, w2: Point) -> Result<ElectionOutcome> {
    let distance = w1.dist(w2);
    if distance < ALG_EPS {
        return Err(Error::DegenerateCandidates { distance });
    }
    let tol = 2.0 * distance * ALG_EPS;
    let vs = hull.vertices();
    let first = vs.iter().all(|v| v.dist_sq(w1) - v.dist_sq(w2) <= tol);
    let second = vs.iter().all(|v| v.dist_sq(w2) - v.dist_sq(w1) <= tol);
    Ok(ElectionOutcome::from_flags(first, second))
}

/// Winner when the members' hull is the region `domain \ conditioning`
/// (the closed complement `Ā` of the cap `A = domain ∩ conditioning`).
///
/// `Ā` may have a curved boundary, so containment `Ā ⊆ H_i` is decided by
/// its support function in the direction of `H_i`'s outward normal.
pub fn conditional_winner(
    domain: Domain,
    conditioning: &HalfPlane,
    w1: Point,
    w2: Point,
) -> Result<ElectionOutcome> {
    let h1 = bisector(w1, w2)?;
    let rest = [conditioning.complement()];
    let n = h1.normal();
    let c = h1.offset();
    let first = region_support(domain, &rest, n)? - c <= ALG_EPS;
    let second = region_support(domain, &rest, -n)? + c <= ALG_EPS;
    Ok(ElectionOutcome::from_flags(first, second))
}

/// Winner against the hull `Ā` via the chord endpoints alone: candidate `i`
/// wins iff it is weakly closer than the other to both `z1` and `z2`.
///
/// Agrees with [`conditional_winner`] whenever both candidates lie in the
/// cap; outside that case it is only a necessary condition.
pub fn chord_winner(cap: &Cap, w1: Point, w2: Point) -> Result<ElectionOutcome> {
    let chord = ConvexHull::from_points([cap.z1(), cap.z2()]);
    ball_winner(&chord, w1, w2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_cap;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn hull(pts: &[(f64, f64)]) -> ConvexHull {
        ConvexHull::from_points(pts.iter().map(|&(x, y)| p(x, y)))
    }

    #[test]
    fn single_member_picks_nearer_candidate() {
        let h = hull(&[(0.5, 0.5)]);
        let out = voronoi_winner(&h, p(0.4, 0.5), p(0.7, 0.5)).unwrap();
        assert_eq!(out.winner, Some(Candidate::First));
    }

    #[test]
    fn split_hull_has_no_winner() {
        let h = hull(&[(0.9, 0.1), (0.1, 0.9)]);
        let out = voronoi_winner(&h, p(0.2, 0.1), p(0.1, 0.2)).unwrap();
        assert_eq!(out, ElectionOutcome::NONE);
        assert_eq!(
            ball_winner(&h, p(0.2, 0.1), p(0.1, 0.2)).unwrap(),
            ElectionOutcome::NONE
        );
    }

    #[test]
    fn ball_examples() {
        let out = ball_winner(&hull(&[(0.0, 0.0)]), p(0.3, 0.0), p(0.6, 0.0)).unwrap();
        assert_eq!(out.winner, Some(Candidate::First));
        let out = ball_winner(&hull(&[(0.0, 0.0), (1.0, 0.0)]), p(0.5, 0.1), p(0.5, 0.3)).unwrap();
        assert_eq!(out.winner, Some(Candidate::First));
    }

    #[test]
    fn exact_tie_goes_to_first_in_both_predicates() {
        // Member equidistant from both candidates.
        let h = hull(&[(0.5, 0.0)]);
        let (w1, w2) = (p(0.5, 0.25), p(0.5, -0.25));
        assert_eq!(
            voronoi_winner(&h, w1, w2).unwrap().winner,
            Some(Candidate::First)
        );
        assert_eq!(
            ball_winner(&h, w1, w2).unwrap().winner,
            Some(Candidate::First)
        );
        assert_eq!(
            voronoi_winner(&h, w2, w1).unwrap().winner,
            Some(Candidate::First)
        );
    }

    #[test]
    fn degenerate_candidates_error() {
        let h = hull(&[(0.5, 0.5)]);
        let w = p(0.2, 0.2);
        assert!(voronoi_winner(&h, w, w).is_err());
        assert!(ball_winner(&h, w, w).is_err());
    }

    #[test]
    fn conditional_on_disk_cap() {
        // A = {x >= 1/2}; the members fill {x <= 1/2}.
        let a = HalfPlane::new(p(-1.0, 0.0), -0.5).unwrap();
        let out = conditional_winner(Domain::UnitDisk, &a, p(0.8, 0.0), p(0.9, 0.0)).unwrap();
        assert_eq!(out.winner, Some(Candidate::First));
        let cap = make_cap(Domain::UnitDisk, a).unwrap();
        assert_eq!(
            chord_winner(&cap, p(0.8, 0.0), p(0.9, 0.0)).unwrap().winner,
            Some(Candidate::First)
        );
    }

    #[test]
    fn conditional_on_interval() {
        let a = HalfPlane::new(p(1.0, 0.0), 0.2).unwrap();
        let out = conditional_winner(Domain::Interval, &a, p(0.05, 0.0), p(0.15, 0.0)).unwrap();
        assert_eq!(out.winner, Some(Candidate::Second));
        let out = conditional_winner(Domain::Interval, &a, p(0.05, 0.0), p(0.5, 0.0)).unwrap();
        assert_eq!(out.winner, None);
    }
}
