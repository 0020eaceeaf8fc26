use super::{rk4_step, uniform_steps, MotionCurve};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, MechanicsHamiltonian, ReducedHamiltonian};
use crate::multivector::Multivector;

/// Integrates a mechanical motion `q = t e_t + x(t)` with classical RK4.
///
/// With the graph parametrization `dG = lambda (e_t + e_t . d_t x)` the
/// multiplier is the time step, so the canonical equations become
/// `dq/dt = d_P H = e_t + d_p H0` and `dp/dt = -d_q H0`, the latter including
/// the `e_t` component that carries the energy balance.
///
/// `p0` supplies the spatial momentum; its `e_t` component is overwritten
/// with `-H0(q0, p0)` so the constraint holds at the first sample.
pub fn solve_mechanics<H0: ReducedHamiltonian>(
    h: &MechanicsHamiltonian<H0>,
    q0: &Multivector,
    p0: &Multivector,
    t_end: f64,
    dt: f64,
) -> Result<MotionCurve> {
    let n = h.config_dim();
    let time_bit = 1 << h.frame().time_axis().expect("mechanics frame has a time axis");
    let mut p_start = p0.clone();
    p_start.set_coeff(time_bit, 0.0);
    h.check_args(q0, &p_start)?;
    p_start.set_coeff(time_bit, -h.energy(q0, &p_start));

    let (steps, step) = uniform_steps(t_end, dt)?;
    let t0 = q0.coeff(time_bit);

    let split = |y: &[f64]| (Multivector::vector(&y[..n]), Multivector::vector(&y[n..]));
    // The vector field stays total so RK4 stages never fail; a failed gradient
    // surfaces as NaN and is reported as a non-finite state.
    let rhs = |y: &[f64]| -> Vec<f64> {
        let (q, p) = split(y);
        match (h.grad_p(&q, &p), h.grad_q_explicit(&q, &p)) {
            (Ok(dq), Ok(dp)) => {
                let mut out = dq.vector_part();
                out.extend(dp.vector_part().into_iter().map(|v| -v));
                out
            }
            _ => vec![f64::NAN; 2 * n],
        }
    };

    let mut state: Vec<f64> = q0.vector_part();
    state.extend(p_start.vector_part());

    let mut taus = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut momenta = Vec::with_capacity(steps + 1);
    let mut residual = Vec::with_capacity(steps + 1);
    let mut energy = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if k > 0 {
            state = rk4_step(&state, step, rhs);
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { step: k });
        }
        let (q, p) = split(&state);
        residual.push(h.eval(&q, &p)?.abs());
        energy.push(h.energy(&q, &p));
        taus.push(t0 + k as f64 * step);
        points.push(q);
        momenta.push(p);
    }
    Ok(MotionCurve::new(taus, points, momenta)?.with_diagnostics(residual, energy))
}
