use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{DiscreteField, Mesh};
use crate::field::quadrature::{compose, subdivide, DEGREE5};
use crate::scalar::{Cplx, Real};

/// Windows are cut off beyond this many widths from the center.
const CUTOFF_WIDTHS: f64 = 8.0;
/// Quadrature sub-triangles per element edge are chosen so that each piece is
/// at most `1 / SUBDIV_PER_WIDTH` of a width across.
const SUBDIV_PER_WIDTH: f64 = 6.0;

/// Gaussian window `l(v) = (2 pi r^2)^{-1/2} int v exp(-|x - c|^2 / 2 r^2)`
/// restricted to the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sensor<T> {
    pub center: [T; 2],
    pub width: T,
}

impl<T: Real> Sensor<T> {
    pub fn new(center: [T; 2], width: T) -> Result<Self> {
        let inside = |v: T| v >= T::zero() && v <= T::one();
        if !inside(center[0]) || !inside(center[1]) {
            return Err(Error::OutsideDomain {
                x1: center[0].as_f64(),
                x2: center[1].as_f64(),
            });
        }
        if !(width > T::zero() && width <= T::lit(0.25)) {
            return Err(Error::InvalidParameter(format!(
                "sensor width must lie in (0, 0.25], got {width}"
            )));
        }
        Ok(Self { center, width })
    }

    /// Window value at `x` including the normalization factor.
    pub fn kernel(&self, x: T, y: T) -> T {
        let two = T::lit(2.0);
        let r2 = self.width * self.width;
        let d2 = (x - self.center[0]).powi(2) + (y - self.center[1]).powi(2);
        (-d2 / (two * r2)).exp() / (two * T::pi() * r2).sqrt()
    }

    /// Values of the functional on the nodal hat functions, as sparse
    /// `(node, weight)` pairs sorted by node.
    pub fn nodal_weights(&self, mesh: &Mesh<T>) -> Vec<(usize, T)> {
        let cutoff = T::lit(CUTOFF_WIDTHS) * self.width;
        let h = mesh.spacing();
        let s = (h / self.width * T::lit(SUBDIV_PER_WIDTH)).ceil().as_f64().max(1.0) as usize;
        let pieces = subdivide(s);
        let piece_area = T::one() / T::from_usize_lossy(s * s);
        let mut acc = std::collections::BTreeMap::<usize, T>::new();
        for (e, el) in mesh.elements().iter().enumerate() {
            let p = el.map(|k| mesh.nodes()[k]);
            let near = (0..2).all(|d| {
                let lo = p.iter().fold(p[0][d], |m, q| m.min(q[d]));
                let hi = p.iter().fold(p[0][d], |m, q| m.max(q[d]));
                self.center[d] >= lo - cutoff && self.center[d] <= hi + cutoff
            });
            if !near {
                continue;
            }
            let scale = mesh.element_area(e) * piece_area;
            let mut local = [T::zero(); 3];
            for sub in &pieces {
                for (l, w) in DEGREE5.iter() {
                    let b = compose(sub, l).map(T::lit);
                    let x = b[0] * p[0][0] + b[1] * p[1][0] + b[2] * p[2][0];
                    let y = b[0] * p[0][1] + b[1] * p[1][1] + b[2] * p[2][1];
                    let g = self.kernel(x, y) * T::lit(*w) * scale;
                    for k in 0..3 {
                        local[k] += g * b[k];
                    }
                }
            }
            for k in 0..3 {
                *acc.entry(el[k]).or_insert_with(T::zero) += local[k];
            }
        }
        acc.into_iter().collect()
    }

    /// Applies the functional to a field.
    pub fn apply(&self, mesh: &Mesh<T>, field: &DiscreteField<T>) -> Cplx<T> {
        apply_weights(&self.nodal_weights(mesh), field.values())
    }
}

pub(crate) fn apply_weights<T: Real>(w: &[(usize, T)], v: &[Cplx<T>]) -> Cplx<T> {
    w.iter()
        .fold(Cplx::new(T::zero(), T::zero()), |acc, (k, c)| acc + v[*k] * *c)
}

/// Uniform random centers with pairwise distance at least `min_dist`
/// (default `1/sqrt(3M)`), by rejection sampling.
pub fn random_placement<T: Real>(
    count: usize,
    min_dist: Option<T>,
    width: T,
    seed: u64,
) -> Result<Vec<Sensor<T>>> {
    const MAX_ATTEMPTS: usize = 100_000;
    if count == 0 {
        return Err(Error::InvalidParameter("at least one sensor is required".into()));
    }
    let min_dist = min_dist
        .unwrap_or_else(|| T::one() / (T::lit(3.0) * T::from_usize_lossy(count)).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Sensor<T>> = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        if attempts == MAX_ATTEMPTS {
            return Err(Error::PlacementInfeasible {
                placed: out.len(),
                requested: count,
                min_dist: min_dist.as_f64(),
                attempts,
            });
        }
        attempts += 1;
        let c = [T::lit(rng.random::<f64>()), T::lit(rng.random::<f64>())];
        let far = out.iter().all(|s| {
            let d2 = (s.center[0] - c[0]).powi(2) + (s.center[1] - c[1]).powi(2);
            d2 >= min_dist * min_dist
        });
        if far {
            out.push(Sensor::new(c, width)?);
        }
    }
    Ok(out)
}
