use serde::{Deserialize, Serialize};

use super::OptimizeError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    /// Offset of each initial vertex from `x0` along one axis.
    pub initial_step: f64,
    pub max_evals: usize,
    /// Largest allowed coordinate distance from the best vertex.
    pub xtol: f64,
    /// Largest allowed cost spread across the simplex.
    pub ftol: f64,
    /// Estimated objective noise. When set, the cost spread must also
    /// exceed it before the run may stop as converged.
    pub noise_floor: Option<f64>,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_step: 0.5,
            max_evals: 200,
            xtol: 1e-6,
            ftol: 1e-8,
            noise_floor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub params: Vec<f64>,
    pub cost: f64,
    /// Objective calls made so far.
    pub evals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    pub n_evals: usize,
    /// Best vertex after the initial simplex and after every iteration.
    pub trace: Vec<TracePoint>,
    pub converged: bool,
}

const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

enum Halt<E> {
    Budget,
    Fail(OptimizeError<E>),
}

struct Counter<'f, F> {
    f: &'f mut F,
    evals: usize,
    max: usize,
}

impl<F, E> Counter<'_, F>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    fn eval(&mut self, x: &[f64]) -> Result<f64, Halt<E>> {
        if self.evals >= self.max {
            return Err(Halt::Budget);
        }
        self.evals += 1;
        let value = (self.f)(x).map_err(|e| Halt::Fail(OptimizeError::Objective(e)))?;
        if !value.is_finite() {
            return Err(Halt::Fail(OptimizeError::NonFinite { params: x.to_vec(), value }));
        }
        Ok(value)
    }
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimize `objective` from `x0` with the Nelder-Mead simplex method.
///
/// The initial simplex is `x0` plus `x0 + initial_step·eᵢ` for each axis.
/// The run stops as converged once the simplex is within `xtol` of its best
/// vertex and the cost spread is below `ftol` (and above `noise_floor`, when
/// given); otherwise it stops unconverged when `max_evals` is exhausted.
pub fn nelder_mead<F, E>(
    mut objective: F,
    x0: &[f64],
    options: &NelderMeadOptions,
) -> Result<OptimizeResult, OptimizeError<E>>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let n = x0.len();
    if n == 0 {
        return Err(OptimizeError::InvalidOptions("x0 must have at least one dimension".into()));
    }
    let positive = |v: f64| v.is_finite() && v > 0.0;
    if !positive(options.initial_step) || options.xtol.is_nan() || options.xtol < 0.0 || options.ftol.is_nan() || options.ftol < 0.0 {
        return Err(OptimizeError::InvalidOptions(
            "initial_step must be positive and tolerances non-negative".into(),
        ));
    }
    if options.max_evals < n + 1 {
        return Err(OptimizeError::InvalidOptions(format!(
            "max_evals must be at least {} to build the initial simplex",
            n + 1
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(OptimizeError::InvalidOptions("x0 must be finite".into()));
    }

    let mut counter = Counter { f: &mut objective, evals: 0, max: options.max_evals };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut x = x0.to_vec();
        if i > 0 {
            x[i - 1] += options.initial_step;
        }
        let f = match counter.eval(&x) {
            Ok(f) => f,
            Err(Halt::Fail(e)) => return Err(e),
            Err(Halt::Budget) => unreachable!("budget covers the initial simplex"),
        };
        simplex.push((x, f));
    }

    let mut trace = Vec::new();
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].clone();
        trace.push(TracePoint { params: best.0.clone(), cost: best.1, evals: counter.evals });

        let xspread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let fspread = simplex[n].1 - best.1;
        let above_floor = options.noise_floor.is_none_or(|s| fspread > s);
        if xspread < options.xtol && fspread < options.ftol && above_floor {
            converged = true;
            break;
        }
        match step(&mut simplex, &mut counter) {
            Ok(()) => {}
            Err(Halt::Budget) => break,
            Err(Halt::Fail(e)) => return Err(e),
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    if simplex[0].1 < trace.last().map_or(f64::INFINITY, |t| t.cost) {
        trace.push(TracePoint {
            params: simplex[0].0.clone(),
            cost: simplex[0].1,
            evals: counter.evals,
        });
    }
    let last = trace.last().expect("trace has the initial simplex");
    Ok(OptimizeResult {
        best_params: last.params.clone(),
        best_cost: last.cost,
        n_evals: counter.evals,
        trace,
        converged,
    })
}

/// One iteration on a sorted simplex.
fn step<F, E>(simplex: &mut [(Vec<f64>, f64)], counter: &mut Counter<'_, F>) -> Result<(), Halt<E>>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let n = simplex.len() - 1;
    let mut centroid = vec![0.0; n];
    for (x, _) in &simplex[..n] {
        for (c, v) in centroid.iter_mut().zip(x) {
            *c += v / n as f64;
        }
    }
    let (worst, f_worst) = simplex[n].clone();
    let f_best = simplex[0].1;
    let f_second = simplex[n - 1].1;

    let xr = lerp(&centroid, &worst, -ALPHA);
    let fr = counter.eval(&xr)?;
    if fr < f_best {
        let xe = lerp(&centroid, &xr, GAMMA);
        let fe = counter.eval(&xe)?;
        simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        return Ok(());
    }
    if fr < f_second {
        simplex[n] = (xr, fr);
        return Ok(());
    }
    if fr < f_worst {
        let xc = lerp(&centroid, &xr, RHO);
        let fc = counter.eval(&xc)?;
        if fc <= fr {
            simplex[n] = (xc, fc);
            return Ok(());
        }
    } else {
        let xc = lerp(&centroid, &worst, RHO);
        let fc = counter.eval(&xc)?;
        if fc < f_worst {
            simplex[n] = (xc, fc);
            return Ok(());
        }
    }
    let anchor = simplex[0].0.clone();
    for vertex in simplex[1..].iter_mut() {
        let x = lerp(&anchor, &vertex.0, SIGMA);
        let f = counter.eval(&x)?;
        *vertex = (x, f);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn ok<F: Fn(&[f64]) -> f64>(f: F) -> impl FnMut(&[f64]) -> Result<f64, Infallible> {
        move |x| Ok(f(x))
    }

    #[test]
    fn one_dimensional_quadratic() {
        let r = nelder_mead(ok(|x| (x[0] - 2.0).powi(2)), &[0.0], &NelderMeadOptions::default()).unwrap();
        assert!((r.best_params[0] - 2.0).abs() < 1e-4);
        assert!(r.converged);
    }

    #[test]
    fn anisotropic_quadratic_within_budget() {
        let opts = NelderMeadOptions { max_evals: 400, ..Default::default() };
        let r = nelder_mead(ok(|x| x[0] * x[0] + 10.0 * x[1] * x[1]), &[3.0, 3.0], &opts).unwrap();
        assert!(r.best_cost < 1e-6, "{}", r.best_cost);
        assert!(r.n_evals <= 400);
    }

    #[test]
    fn rosenbrock() {
        let opts = NelderMeadOptions { max_evals: 2000, xtol: 1e-8, ftol: 1e-12, ..Default::default() };
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(ok(f), &[-1.2, 1.0], &opts).unwrap();
        assert!((r.best_params[0] - 1.0).abs() < 1e-3 && (r.best_params[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn counts_every_call_and_trace_is_monotone() {
        let mut calls = 0;
        let opts = NelderMeadOptions { max_evals: 37, ..Default::default() };
        let r = nelder_mead(
            |x: &[f64]| {
                calls += 1;
                Ok::<_, Infallible>((x[0] + 1.0).powi(2) + (x[1] - 0.5).powi(4) + x[2].abs())
            },
            &[1.0, 1.0, 1.0],
            &opts,
        )
        .unwrap();
        assert_eq!(r.n_evals, calls);
        assert!(r.n_evals <= 37);
        assert!(r.trace.windows(2).all(|w| w[1].cost <= w[0].cost));
        let min = r.trace.iter().map(|t| t.cost).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_cost, min);
    }

    #[test]
    fn budget_exhaustion_is_unconverged() {
        let opts = NelderMeadOptions { max_evals: 5, ..Default::default() };
        let r = nelder_mead(ok(|x| x[0].cos()), &[0.3], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.n_evals, 5);
    }

    #[test]
    fn noise_floor_blocks_convergence() {
        let opts = NelderMeadOptions { max_evals: 300, noise_floor: Some(1e-3), ..Default::default() };
        let r = nelder_mead(ok(|x| x[0] * x[0]), &[1.0], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.n_evals, 300);
        assert!(r.best_params[0].abs() < 1e-3);
    }

    #[test]
    fn non_finite_and_bad_options() {
        let err = nelder_mead(ok(|x| if x[0] > 0.2 { f64::NAN } else { 1.0 }), &[0.0], &Default::default())
            .unwrap_err();
        assert!(matches!(err, OptimizeError::NonFinite { .. }));
        assert!(matches!(
            nelder_mead(ok(|_| 0.0), &[], &Default::default()),
            Err(OptimizeError::InvalidOptions(_))
        ));
        let opts = NelderMeadOptions { initial_step: 0.0, ..Default::default() };
        assert!(nelder_mead(ok(|_| 0.0), &[1.0], &opts).is_err());
        let opts = NelderMeadOptions { max_evals: 1, ..Default::default() };
        assert!(nelder_mead(ok(|_| 0.0), &[1.0], &opts).is_err());
        let err = nelder_mead(|_: &[f64]| Err::<f64, _>("boom"), &[0.0], &Default::default()).unwrap_err();
        assert_eq!(err, OptimizeError::Objective("boom"));
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[0] * x[1]).sin();
        let a = nelder_mead(ok(f), &[1.0, -1.0], &Default::default()).unwrap();
        let b = nelder_mead(ok(f), &[1.0, -1.0], &Default::default()).unwrap();
        assert_eq!(a, b);
    }
}
