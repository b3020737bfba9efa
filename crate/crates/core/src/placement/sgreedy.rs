use nalgebra::ComplexField;

use crate::assimilation::{from_whitened, StabilityReport};
use crate::error::{Error, Result};
use crate::field::{DiscreteField, Mesh};
use crate::linalg::dense::CMatrix;
use crate::observation::{Sensor, SensorSet};
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::{Cplx, Real};

use super::factor::GrowingCholesky;

/// The Gram factor is rebuilt from scratch after this many appends.
const REFRESH_EVERY: usize = 10;

/// One greedy step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<T> {
    pub m: usize,
    pub n: usize,
    /// `beta_{N,M}` after adding the sensor of this step.
    pub beta: T,
    /// Value of `|w_inf - v_sup|` at the selected point.
    pub residual: T,
}

#[derive(Clone, Debug)]
pub struct PlacementState<T: Real> {
    pub chosen: Vec<Sensor<T>>,
    /// Final set; the set after step `M` is `set.prefix(M)`.
    pub set: SensorSet<T>,
    pub steps: Vec<StepRecord<T>>,
    pub grid: Vec<[T; 2]>,
}

/// Mesh nodes at least `margin` cells away from the boundary.
pub fn candidate_grid<T: Real>(mesh: &Mesh<T>, margin: usize) -> Vec<[T; 2]> {
    mesh.interior_nodes(margin).into_iter().map(|k| mesh.nodes()[k]).collect()
}

fn lex_less<T: Real>(a: [T; 2], b: [T; 2]) -> bool {
    a[0] < b[0] || (a[0] == b[0] && a[1] < b[1])
}

/// Greedy stability maximization.
///
/// At step `M` with `N = min(N_max, M)`, the least stable unit mode `w` of
/// `Z_N` relative to the current update space is computed (the first mode
/// when no sensor exists yet), its projection `v` onto the update space is
/// subtracted, and the next sensor goes where `|w - v|` is largest on the
/// candidate grid. Ties go to the lexicographically smallest point.
pub fn sgreedy<T: Real>(
    mesh: &Mesh<T>,
    basis: &BackgroundBasis<T>,
    m_max: usize,
    width: T,
    grid: &[[T; 2]],
) -> Result<PlacementState<T>> {
    let n_max = basis.len();
    if n_max == 0 || m_max == 0 {
        return Err(Error::InvalidParameter("SGREEDY needs at least one mode and one sensor".into()));
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if basis.mesh_id() != mesh.id() {
        return Err(Error::Dimension("basis lives on a different mesh".into()));
    }
    let locations = grid.iter().map(|p| mesh.locate(*p)).collect::<Result<Vec<_>>>()?;
    let eval = |f: &DiscreteField<T>, k: usize| {
        locations[k]
            .iter()
            .fold(Cplx::new(T::zero(), T::zero()), |acc, (i, w)| acc + f.values()[*i] * *w)
    };
    let ip = basis.inner_product();
    let mut set: Option<SensorSet<T>> = None;
    let mut chol = GrowingCholesky::<T>::new();
    let mut taken = vec![false; grid.len()];
    let mut chosen = Vec::with_capacity(m_max);
    let mut steps = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let n = n_max.min(m);
        let zeta = basis.truncate(n)?;
        // least stable direction w and its projection onto U_{M-1}
        let (w, v): (DiscreteField<T>, Option<DiscreteField<T>>) = match &set {
            None => (basis.modes()[0].clone(), None),
            Some(s) => {
                let b = zeta.bind_sensors(s)?.coupling().cloned().expect("just bound");
                let report: StabilityReport<T> = from_whitened(&chol.whiten(&b));
                let c = report.least_stable_mode;
                let w = zeta.expand(c.as_slice())?;
                let rhs = &b * &c;
                let alpha = chol.solve(&CMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice()));
                let v = s.expand(alpha.column(0).into_owned().as_slice());
                (w, Some(v))
            }
        };
        let mut best: Option<(usize, T)> = None;
        for k in 0..grid.len() {
            if taken[k] {
                continue;
            }
            let mut val = eval(&w, k);
            if let Some(v) = &v {
                val -= eval(v, k);
            }
            let r = val.modulus();
            best = match best {
                None => Some((k, r)),
                Some((bk, br)) => {
                    if r > br || (r == br && lex_less(grid[k], grid[bk])) {
                        Some((k, r))
                    } else {
                        Some((bk, br))
                    }
                }
            };
        }
        let (k, residual) = best.ok_or_else(|| Error::PlacementInfeasible {
            placed: chosen.len(),
            requested: m_max,
            min_dist: 0.0,
            attempts: grid.len(),
        })?;
        taken[k] = true;
        let sensor = Sensor::new(grid[k], width)?;
        let next = match &set {
            None => SensorSet::build(mesh, ip, vec![sensor])?,
            Some(s) => s.with_sensor(mesh, sensor)?,
        };
        if m % REFRESH_EVERY == 0 {
            chol.refresh(next.gram())?;
        } else {
            chol.append(next.gram())?;
        }
        let b = zeta.bind_sensors(&next)?.coupling().cloned().expect("just bound");
        let beta = from_whitened(&chol.whiten(&b)).beta;
        steps.push(StepRecord { m, n, beta, residual });
        chosen.push(sensor);
        set = Some(next);
    }
    Ok(PlacementState {
        chosen,
        set: set.expect("at least one step"),
        steps,
        grid: grid.to_vec(),
    })
}
