//! Solvers for the canonical equations of motion in their graph-parametrized
//! forms, and the residual diagnostics used to check them.

mod curve;
mod field;
mod geodesic;
mod mechanics;
mod surface;

pub use curve::{action_value, constraint_residual, first_equation_residual, MotionCurve};
pub use field::{
    continuity_residual, dw_equation_residuals, energy_momentum_tensor, field_constraint_residual,
    solve_scalar_field, DwResiduals, EnergyMomentumField, FieldGrid, RelaxationOptions,
};
pub use geodesic::{curve_spur_residual, line_deviation, solve_geodesic};
pub use mechanics::solve_mechanics;
pub use surface::{action_value_surface, spur_residual, SpurReport, SurfaceMesh};

/// One classical fourth-order Runge-Kutta step of `y' = f(y)`.
pub(crate) fn rk4_step<F>(y: &[f64], dt: f64, f: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let shifted = |k: &[f64], scale: f64| -> Vec<f64> {
        y.iter().zip(k).map(|(a, b)| a + scale * b).collect()
    };
    let k1 = f(y);
    let k2 = f(&shifted(&k1, 0.5 * dt));
    let k3 = f(&shifted(&k2, 0.5 * dt));
    let k4 = f(&shifted(&k3, dt));
    (0..y.len())
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Splits `[0, end]` into equal steps no longer than `step`.
pub(crate) fn uniform_steps(end: f64, step: f64) -> crate::Result<(usize, f64)> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(crate::Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(end > 0.0 && end.is_finite()) {
        return Err(crate::Error::InvalidArgument(format!("end must be positive, got {end}")));
    }
    let count = ((end / step) - 1e-9).ceil().max(1.0) as usize;
    Ok((count, end / count as f64))
}
