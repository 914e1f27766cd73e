use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use super::Point;
use crate::Error;

/// The convex compact space members and candidates live in.
///
/// The square is `[0, 1]^2`; the disk is the closed unit disk centred at the
/// origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Interval,
    #[serde(rename = "square")]
    UnitSquare,
    #[serde(rename = "disk")]
    UnitDisk,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Interval, Domain::UnitSquare, Domain::UnitDisk];

    /// Length of the interval, area of the square or disk.
    pub fn measure(self) -> f64 {
        match self {
            Domain::Interval | Domain::UnitSquare => 1.0,
            Domain::UnitDisk => PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Interval => "interval",
            Domain::UnitSquare => "square",
            Domain::UnitDisk => "disk",
        }
    }

    /// Membership with tolerance `tol`.
    pub fn contains(self, p: Point, tol: f64) -> bool {
        match self {
            Domain::Interval => p.y.abs() <= tol && p.x >= -tol && p.x <= 1.0 + tol,
            Domain::UnitSquare => {
                p.x >= -tol && p.x <= 1.0 + tol && p.y >= -tol && p.y <= 1.0 + tol
            }
            Domain::UnitDisk => p.norm() <= 1.0 + tol,
        }
    }

    /// Uniform draw. The disk uses the polar method with radius `sqrt(u)`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Point {
        match self {
            Domain::Interval => Point::new(rng.random::<f64>(), 0.0),
            Domain::UnitSquare => Point::new(rng.random::<f64>(), rng.random::<f64>()),
            Domain::UnitDisk => {
                let r = rng.random::<f64>().sqrt();
                let (s, c) = (TAU * rng.random::<f64>()).sin_cos();
                Point::new(r * c, r * s)
            }
        }
    }

    /// Vertices of the domain as a counter-clockwise polygon; `None` for
    /// the disk. The interval is the degenerate two-vertex polygon.
    pub fn polygon(self) -> Option<Vec<Point>> {
        match self {
            Domain::Interval => Some(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]),
            Domain::UnitSquare => Some(vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ]),
            Domain::UnitDisk => None,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "interval" | "line" => Ok(Domain::Interval),
            "square" | "unit-square" => Ok(Domain::UnitSquare),
            "disk" | "ball" | "unit-disk" => Ok(Domain::UnitDisk),
            other => Err(Error::InvalidArgument(format!("unknown domain `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn samples_lie_in_domain() {
        let mut rng = seed::rng(1);
        for d in Domain::ALL {
            for _ in 0..10_000 {
                let p = d.sample(&mut rng);
                assert!(d.contains(p, 0.0), "{d}: {p:?}");
            }
        }
    }

    #[test]
    fn interval_samples_are_embedded() {
        let mut rng = seed::rng(2);
        for _ in 0..1000 {
            let p = Domain::Interval.sample(&mut rng);
            assert_eq!(p.y, 0.0);
            assert!((0.0..=1.0).contains(&p.x));
        }
    }

    #[test]
    fn square_sample_mean_is_centred() {
        let n = 1_000_000;
        let mut rng = seed::rng(3);
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..n {
            let p = Domain::UnitSquare.sample(&mut rng);
            sx += p.x;
            sy += p.y;
        }
        // Var of U(0,1) is 1/12.
        let sigma = (1.0 / 12.0 / n as f64).sqrt();
        assert!((sx / n as f64 - 0.5).abs() < 3.0 * sigma);
        assert!((sy / n as f64 - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn disk_inner_half_radius_holds_a_quarter() {
        let n = 1_000_000;
        let mut rng = seed::rng(4);
        let hits = (0..n)
            .filter(|_| Domain::UnitDisk.sample(&mut rng).norm() <= 0.5)
            .count();
        let sigma = (0.25 * 0.75 / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - 0.25).abs() < 3.0 * sigma);
    }

    #[test]
    fn measures() {
        assert_eq!(Domain::Interval.measure(), 1.0);
        assert_eq!(Domain::UnitSquare.measure(), 1.0);
        assert_eq!(Domain::UnitDisk.measure(), PI);
    }

    #[test]
    fn parses_names() {
        assert_eq!("disk".parse::<Domain>().unwrap(), Domain::UnitDisk);
        assert_eq!("Square".parse::<Domain>().unwrap(), Domain::UnitSquare);
        assert!("cube".parse::<Domain>().is_err());
    }
}
