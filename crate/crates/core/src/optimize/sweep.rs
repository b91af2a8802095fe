use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::OptimizeError;

/// A cost with its standard error (zero for exact objectives).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, stderr: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub costs: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl SweepResult {
    /// Grid point with the lowest finite cost.
    pub fn argmin(&self) -> Option<(f64, f64)> {
        self.grid
            .iter()
            .zip(&self.costs)
            .filter(|(_, c)| c.is_finite())
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(g, c)| (*g, *c))
    }
}

/// `points` equally spaced values from `lo` to `hi`, both included.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
        .collect()
}

/// Evaluate `objective` on an inclusive grid. Points run in parallel and
/// are returned in grid order; non-finite costs are kept as they are.
pub fn grid_sweep<F, E>(objective: F, lo: f64, hi: f64, points: usize) -> Result<SweepResult, OptimizeError<E>>
where
    F: Fn(f64) -> Result<Estimate, E> + Sync,
    E: Send,
{
    if points < 2 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(OptimizeError::InvalidOptions(format!(
            "grid needs points >= 2 and finite lo < hi (got {points}, {lo}, {hi})"
        )));
    }
    let grid = linspace(lo, hi, points);
    let estimates: Vec<Estimate> = grid
        .par_iter()
        .map(|&x| objective(x))
        .collect::<Result<_, E>>()
        .map_err(OptimizeError::Objective)?;
    Ok(SweepResult {
        grid,
        costs: estimates.iter().map(|e| e.value).collect(),
        stderr: estimates.iter().map(|e| e.stderr).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;
    use std::f64::consts::PI;

    fn exact<F: Fn(f64) -> f64 + Sync>(f: F) -> impl Fn(f64) -> Result<Estimate, Infallible> + Sync {
        move |x| Ok(Estimate::exact(f(x)))
    }

    #[test]
    fn fifty_point_grid_is_inclusive() {
        let r = grid_sweep(exact(|x| x), -PI, PI, 50).unwrap();
        assert_eq!(r.grid.len(), 50);
        assert_eq!(r.grid[0], -PI);
        assert_eq!(r.grid[49], PI);
        for w in r.grid.windows(2) {
            assert!((w[1] - w[0] - 2.0 * PI / 49.0).abs() < 1e-12);
        }
        assert_eq!(r.costs, r.grid);
    }

    #[test]
    fn two_points() {
        let r = grid_sweep(exact(|x| x * x), 1.0, 3.0, 2).unwrap();
        assert_eq!(r.grid, vec![1.0, 3.0]);
        assert_eq!(r.costs, vec![1.0, 9.0]);
    }

    #[test]
    fn analytic_landscape_extremes() {
        let r = grid_sweep(exact(|t| -(t / 2.0).cos().powi(2)), -PI, PI, 50).unwrap();
        assert!(r.costs[0].abs() < 1e-12 && r.costs[49].abs() < 1e-12);
        let (at, min) = r.argmin().unwrap();
        let nearest = r.grid.iter().copied().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
        assert!((at.abs() - nearest.abs()).abs() < 1e-12);
        assert!((min + (PI / 98.0).cos().powi(2)).abs() < 1e-12);
        let max = r.costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(max.abs() < 1e-12);
    }

    #[test]
    fn non_finite_cost_is_kept() {
        let r = grid_sweep(exact(|x| if x == 0.0 { f64::NAN } else { x }), -1.0, 1.0, 3).unwrap();
        assert!(r.costs[1].is_nan());
        assert_eq!(r.argmin(), Some((-1.0, -1.0)));
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(grid_sweep(exact(|x| x), 0.0, 1.0, 1).is_err());
        assert!(grid_sweep(exact(|x| x), 1.0, 1.0, 5).is_err());
    }
}
