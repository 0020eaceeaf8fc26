use super::surface::SpurReport;
use super::{rk4_step, uniform_steps, MotionCurve};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, StringHamiltonian};
use crate::multivector::Multivector;

const UNIT_TOLERANCE: f64 = 1e-12;

/// Integrates a string worldline (D = 1) by arclength.
///
/// For D = 1 the spur condition reduces to `dv/ds = 0` with `v` the unit
/// tangent, and the momentum is `P = Lambda v`. The `energy` column holds `|P|`.
pub fn solve_geodesic(
    h: &StringHamiltonian,
    q0: &Multivector,
    v0: &Multivector,
    s_end: f64,
    ds: f64,
) -> Result<MotionCurve> {
    if h.motion_dim() != 1 {
        return Err(Error::InvalidArgument("geodesic solver needs D = 1".into()));
    }
    let n = h.config_dim();
    h.check_args(q0, v0)?;
    if (v0.magnitude() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "initial direction must be a unit vector, |v0| = {}",
            v0.magnitude()
        )));
    }
    let (steps, step) = uniform_steps(s_end, ds)?;
    let rhs = |y: &[f64]| -> Vec<f64> {
        let mut out = y[n..].to_vec();
        out.extend(std::iter::repeat(0.0).take(n));
        out
    };
    let mut state = q0.vector_part();
    state.extend(v0.vector_part());

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
        let q = Multivector::vector(&state[..n]);
        let p = Multivector::vector(&state[n..]).scale(h.tension());
        residual.push(h.eval(&q, &p)?.abs());
        energy.push(p.magnitude());
        taus.push(k as f64 * step);
        points.push(q);
        momenta.push(p);
    }
    Ok(MotionCurve::new(taus, points, momenta)?.with_diagnostics(residual, energy))
}

/// `max_i |(q_i - q0) ^ v|` for unit `v`: distance of the samples from the
/// line through `q0` along `v`.
pub fn line_deviation(motion: &MotionCurve, q0: &Multivector, v: &Multivector) -> Result<f64> {
    motion.points().iter().try_fold(0.0f64, |acc, q| {
        Ok(acc.max(q.try_sub(q0)?.outer(v)?.magnitude()))
    })
}

/// `|(t . d) t|` at each sample, `t` the unit tangent: the curvature of the
/// sampled curve, the D = 1 spur. Tangents use second-order differences in
/// the curve parameter (three-point one-sided at the ends); the maximum
/// skips the two samples at each end.
pub fn curve_spur_residual(motion: &MotionCurve) -> Result<SpurReport> {
    let n = motion.len();
    if n < 5 {
        return Err(Error::InvalidArgument("curve spur needs at least 5 samples".into()));
    }
    let taus = motion.taus();
    let pts = motion.points();
    // Derivative in tau of sampled multivectors, second order on non-uniform steps.
    let derivative = |values: &[Multivector], i: usize| -> Multivector {
        let (a, b, c) = if i == 0 {
            (0, 1, 2)
        } else if i + 1 == n {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        let (ta, tb, tc, t) = (taus[a], taus[b], taus[c], taus[i]);
        let wa = (2.0 * t - tb - tc) / ((ta - tb) * (ta - tc));
        let wb = (2.0 * t - ta - tc) / ((tb - ta) * (tb - tc));
        let wc = (2.0 * t - ta - tb) / ((tc - ta) * (tc - tb));
        &(&values[a].scale(wa) + &values[b].scale(wb)) + &values[c].scale(wc)
    };
    let mut tangents = Vec::with_capacity(n);
    let mut speeds = Vec::with_capacity(n);
    for i in 0..n {
        let d = derivative(pts, i);
        let speed = d.magnitude();
        if !(speed > 0.0) {
            return Err(Error::DegenerateTangent(i));
        }
        tangents.push(d.scale(1.0 / speed));
        speeds.push(speed);
    }
    let values: Vec<f64> = (0..n)
        .map(|i| derivative(&tangents, i).magnitude() / speeds[i])
        .collect();
    Ok(SpurReport::new(values, (2..n - 2).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::string_hamiltonian;
    use crate::solver::action_value;

    #[test]
    fn straight_line_with_constant_momentum() {
        let h = string_hamiltonian(2.5, 1, 3).unwrap();
        let q0 = Multivector::vector(&[1.0, -2.0, 0.5]);
        let v0 = Multivector::vector(&[2.0, 1.0, 2.0]).scale(1.0 / 3.0);
        let curve = solve_geodesic(&h, &q0, &v0, 4.0, 0.01).unwrap();
        assert!(line_deviation(&curve, &q0, &v0).unwrap() < 1e-10);
        assert!(curve.energy().iter().all(|p| (p - 2.5).abs() < 1e-12));
        assert!(curve.h_residual().iter().all(|r| *r < 1e-12));
        assert!((action_value(&curve).unwrap() - 10.0).abs() < 1e-8);
        assert!(curve_spur_residual(&curve).unwrap().max() < 1e-8);
    }

    #[test]
    fn non_unit_direction_is_rejected() {
        let h = string_hamiltonian(1.0, 1, 2).unwrap();
        let q0 = Multivector::vector(&[0.0, 0.0]);
        assert!(solve_geodesic(&h, &q0, &Multivector::vector(&[1.0, 1.0]), 1.0, 0.1).is_err());
        assert!(solve_geodesic(&h, &q0, &Multivector::vector(&[1.0, 0.0, 0.0]), 1.0, 0.1).is_err());
    }

    #[test]
    fn circle_has_unit_curvature() {
        let taus: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
        let pts = taus.iter().map(|t| Multivector::vector(&[t.cos(), t.sin()])).collect();
        let curve = MotionCurve::new(taus, pts, vec![]).unwrap();
        let report = curve_spur_residual(&curve).unwrap();
        for i in 1..199 {
            assert!((report.values()[i] - 1.0).abs() < 1e-4);
        }
    }
}
