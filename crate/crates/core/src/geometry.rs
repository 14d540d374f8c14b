//! The mean set of a random vector, held as support-function values on a
//! finite net of directions.
//!
//! `g(p) = Ê̆[<p, X>]` is sub-linear, so it is the support function of a
//! unique bounded closed convex set `M`. Distances to `M` are computed from
//! the net as `max(0, max_p <p, y> - g(p))`, an outer approximation whose
//! error is of order `delta * (|y| + Ê̆[|X|])`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::{dot, norm, AmbiguitySet};
use crate::error::{Error, Result};
use crate::expectation::{breve_abs_mean, breve_expectation};

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;
/// Upper bound on the number of net directions.
pub const MAX_DIRECTIONS: usize = 100_000;
/// Truncation tolerance used for support values.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Finite set of unit directions with mesh `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionNet {
    dim: usize,
    delta: f64,
    directions: Vec<Vec<f64>>,
}

fn fract(x: f64) -> f64 {
    x - x.floor()
}

impl DirectionNet {
    /// * `d = 1`: `{-1, +1}`
    /// * `d = 2`: `ceil(2π/delta)` equally spaced angles
    /// * `d = 3`: Fibonacci sphere with `ceil((4/delta)^2)` points
    /// * `d = 4`: stratified Hopf-coordinate lattice with `ceil((4/delta)^3)` points
    ///
    /// Point counts are capped at [`MAX_DIRECTIONS`].
    pub fn new(dim: usize, delta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidArgument(format!("delta {delta} must lie in (0, 1]")));
        }
        let tau = std::f64::consts::TAU;
        let directions = match dim {
            1 => vec![vec![-1.0], vec![1.0]],
            2 => {
                let n = ((tau / delta).ceil() as usize).max(3);
                (0..n)
                    .map(|i| {
                        let t = tau * i as f64 / n as f64;
                        vec![t.cos(), t.sin()]
                    })
                    .collect()
            }
            _ => {
                let count = (4.0 / delta).powi(dim as i32 - 1).ceil();
                let n = (count as usize).clamp(8, MAX_DIRECTIONS);
                if dim == 3 {
                    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                    (0..n)
                        .map(|i| {
                            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                            let r = (1.0 - z * z).max(0.0).sqrt();
                            let phi = golden * i as f64;
                            vec![r * phi.cos(), r * phi.sin(), z]
                        })
                        .collect()
                } else {
                    // Plastic-number (R2) sequence for the two angles.
                    let g = 1.324_717_957_244_746_f64;
                    let (a1, a2) = (1.0 / g, 1.0 / (g * g));
                    (0..n)
                        .map(|i| {
                            let u1 = (i as f64 + 0.5) / n as f64;
                            let u2 = fract(0.5 + a1 * i as f64);
                            let u3 = fract(0.5 + a2 * i as f64);
                            let (r1, r2) = ((1.0 - u1).sqrt(), u1.sqrt());
                            vec![
                                r1 * (tau * u2).sin(),
                                r1 * (tau * u2).cos(),
                                r2 * (tau * u3).sin(),
                                r2 * (tau * u3).cos(),
                            ]
                        })
                        .collect()
                }
            }
        };
        Ok(Self {
            dim,
            delta,
            directions,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Largest distance from a random unit vector to its nearest net member,
    /// over `probes` uniformly drawn unit vectors.
    pub fn max_probe_gap(&self, probes: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..probes {
            let v = loop {
                let v: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let n = norm(&v);
                if n > 1e-3 && n <= 1.0 {
                    break v.into_iter().map(|x| x / n).collect::<Vec<_>>();
                }
            };
            let nearest = self
                .directions
                .iter()
                .map(|d| {
                    d.iter()
                        .zip(&v)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
        }
        worst
    }
}

/// `g(p) = Ê̆[<p, X>]`.
pub fn support_function(set: &AmbiguitySet, p: &[f64]) -> Result<f64> {
    if p.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: p.len(),
        });
    }
    if p.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let report = breve_expectation(&set.project(p)?, SUPPORT_TOL)?;
    if !report.converged {
        return Err(Error::NotConvergent(format!(
            "truncated means of <{p:?}, X> did not settle"
        )));
    }
    Ok(report.upper_mean)
}

/// Support values of the mean set on a direction net.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSet {
    net: DirectionNet,
    support_values: Vec<f64>,
    abs_mean: f64,
    bounding_box: Vec<(f64, f64)>,
}

/// Builds the mean set of `set` on a net of mesh `delta`.
pub fn build_mean_set(set: &AmbiguitySet, delta: f64) -> Result<MeanSet> {
    let net = DirectionNet::new(set.dim(), delta)?;
    let support_values = net
        .directions()
        .iter()
        .map(|p| support_function(set, p))
        .collect::<Result<Vec<_>>>()?;
    let dim = set.dim();
    let bounding_box = (0..dim)
        .map(|j| {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            let hi = support_function(set, &e)?;
            e[j] = -1.0;
            let lo = -support_function(set, &e)?;
            Ok((lo, hi))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeanSet {
        net,
        support_values,
        abs_mean: breve_abs_mean(set),
        bounding_box,
    })
}

/// `max(0, max_p <p, y> - g(p))` over the net.
pub fn distance_to_mean_set(mean_set: &MeanSet, y: &[f64]) -> f64 {
    mean_set
        .net
        .directions()
        .iter()
        .zip(&mean_set.support_values)
        .map(|(p, g)| dot(p, y) - g)
        .fold(0.0, f64::max)
}

impl MeanSet {
    pub fn dim(&self) -> usize {
        self.net.dim()
    }

    pub fn net(&self) -> &DirectionNet {
        &self.net
    }

    pub fn support_values(&self) -> &[f64] {
        &self.support_values
    }

    /// `Ê̆[|X|]`, which bounds `|g(p)|` for unit `p`.
    pub fn abs_mean(&self) -> f64 {
        self.abs_mean
    }

    /// Default membership tolerance, `10 * delta`.
    pub fn default_tolerance(&self) -> f64 {
        10.0 * self.net.delta()
    }

    /// Size of the net approximation error at `y`, `delta * (|y| + Ê̆[|X|])`.
    pub fn net_error(&self, y: &[f64]) -> f64 {
        self.net.delta() * (norm(y) + self.abs_mean)
    }

    pub fn distance(&self, y: &[f64]) -> f64 {
        distance_to_mean_set(self, y)
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.distance(y) <= tol
    }

    /// Coordinate ranges `[-g(-e_j), g(e_j)]`.
    pub fn bounding_box(&self) -> &[(f64, f64)] {
        &self.bounding_box
    }

    /// The interval `[lower mean, upper mean]` of a one-dimensional mean set.
    pub fn interval(&self) -> Option<(f64, f64)> {
        (self.dim() == 1).then(|| self.bounding_box[0])
    }

    /// `m` points of the mean set spread over it.
    ///
    /// One dimension: the uniform grid on the mean interval (the midpoint
    /// when `m = 1`). Higher dimensions: grid points of the bounding box
    /// lying in the set, thinned by farthest-point selection and ordered as a
    /// nearest-neighbour tour so that consecutive targets are close.
    pub fn grid_points(&self, m: usize) -> Result<Vec<Vec<f64>>> {
        if m == 0 {
            return Err(Error::InvalidArgument("need at least one target".into()));
        }
        if let Some((lo, hi)) = self.interval() {
            if m == 1 {
                return Ok(vec![vec![0.5 * (lo + hi)]]);
            }
            return Ok((0..m)
                .map(|i| vec![lo + (hi - lo) * i as f64 / (m - 1) as f64])
                .collect());
        }
        let dim = self.dim();
        let mut per_axis = 8 * m;
        while (per_axis + 1).pow(dim as u32) > 2_000_000 && per_axis > 2 {
            per_axis /= 2;
        }
        let mut candidates = Vec::new();
        let mut idx = vec![0usize; dim];
        loop {
            let y: Vec<f64> = idx
                .iter()
                .zip(&self.bounding_box)
                .map(|(&i, &(lo, hi))| lo + (hi - lo) * i as f64 / per_axis as f64)
                .collect();
            if self.distance(&y) <= 1e-9 {
                candidates.push(y);
            }
            let mut k = 0;
            loop {
                if k == dim {
                    break;
                }
                idx[k] += 1;
                if idx[k] <= per_axis {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == dim {
                break;
            }
        }
        if candidates.len() < m {
            return Err(Error::InvalidArgument(format!(
                "only {} grid points fall in the mean set, {m} requested",
                candidates.len()
            )));
        }
        candidates.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let dist = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        };
        let mut chosen = vec![0usize];
        let mut nearest: Vec<f64> = candidates.iter().map(|c| dist(c, &candidates[0])).collect();
        while chosen.len() < m {
            let (best, _) = nearest
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
            chosen.push(best);
            for (i, c) in candidates.iter().enumerate() {
                nearest[i] = nearest[i].min(dist(c, &candidates[best]));
            }
        }
        chosen.sort_unstable();
        let mut remaining: Vec<Vec<f64>> = chosen.into_iter().map(|i| candidates[i].clone()).collect();
        let mut tour = vec![remaining.remove(0)];
        while !remaining.is_empty() {
            let last = tour.last().expect("nonempty");
            let (i, _) = remaining
                .iter()
                .enumerate()
                .map(|(i, c)| (i, dist(c, last)))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            tour.push(remaining.remove(i));
        }
        Ok(tour)
    }
}
