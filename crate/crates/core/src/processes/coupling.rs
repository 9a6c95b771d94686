//! Couplings of two diffusions on a common probability space.
//!
//! * Synchronous: the switched diffusion and the limiting Langevin diffusion
//!   driven by the same Brownian increments from the same initial point.
//! * Reflection: two copies of the switched diffusion sharing the index
//!   process, the second driven by `(I − 2eeᵀ)ΔB` with
//!   `e = (θ − θ̃)/‖θ − θ̃‖` until they meet, after which they move together.
//!
//! On a discrete grid exact meeting has probability zero. A step is declared
//! to end in a meeting when the distance drops below `eps_meet`, when the
//! difference changes sign along `e`, or when the Brownian bridge of the
//! one-dimensional distance process (variance `8h` over a step of length `h`)
//! hits zero, which happens with probability `exp(−r₀·r₁/(4h))`.

use crate::error::{invalid, Result};
use crate::potentials::PotentialFamily;
use crate::rng::{Purpose, StreamKey};
use crate::scalar::{dot, norm, Real};

use super::distance::DistanceFunction;
use super::grid::{check_finite, records_initial, records_node, validate_grid, walk, Event};
use super::index::IndexProcess;
use super::simulate::{capacity_hint, check_start, draw_noise, em_update, warn_step_size, SimOptions};
use super::trajectory::{CoupledTrajectory, Trajectory};

/// Default meeting threshold.
pub const DEFAULT_EPS_MEET: f64 = 1e-6;

/// Writes `(I − 2eeᵀ)·db` into `out`; `e` must be a unit vector.
pub fn reflect_increment<S: Real>(e: &[S], db: &[S], out: &mut [S]) {
    let two_proj = S::lit(2.0) * dot(e, db);
    for ((o, &ej), &bj) in out.iter_mut().zip(e).zip(db) {
        *o = bj - two_proj * ej;
    }
}

fn new_path<S: Real>(d: usize, opts: &SimOptions<S>, key: StreamKey, switched: bool) -> Trajectory<S> {
    let mut t = Trajectory::with_capacity(d, capacity_hint(opts), switched);
    t.seed = key.seed;
    t.replica = key.replica;
    t
}

/// Switched diffusion (path a) and Langevin diffusion (path b) from the same
/// start with identical Gaussian increments.
pub fn simulate_synchronous_pair<S: Real>(
    family: &PotentialFamily<S>,
    eta: S,
    x0: &[S],
    horizon: S,
    dt: S,
    seed: impl Into<StreamKey>,
) -> Result<CoupledTrajectory<S>> {
    simulate_synchronous_pair_with(family, eta, x0, &SimOptions::new(horizon, dt), seed)
}

pub fn simulate_synchronous_pair_with<S: Real>(
    family: &PotentialFamily<S>,
    eta: S,
    x0: &[S],
    opts: &SimOptions<S>,
    seed: impl Into<StreamKey>,
) -> Result<CoupledTrajectory<S>> {
    let key = seed.into();
    check_start(family, x0)?;
    validate_grid(opts.horizon, opts.dt, &opts.record)?;
    let mut index = IndexProcess::new(family.n_components(), eta, opts.initial_index, key)?;
    if opts.warn {
        warn_step_size(family, Some(eta), opts.dt);
    }
    let d = family.dim();
    let mut rng = key.rng(Purpose::Diffusion);
    let (mut x, mut y) = (x0.to_vec(), x0.to_vec());
    let (mut gx, mut gy, mut scratch) = (vec![S::zero(); d], vec![S::zero(); d], vec![S::zero(); d]);
    let mut noise = vec![S::zero(); d];
    let mut a = new_path(d, opts, key, true);
    let mut b = new_path(d, opts, key, false);
    if records_initial(&opts.record, opts.horizon) {
        a.push(S::zero(), &x, Some(index.state()));
        b.push(S::zero(), &y, None);
    }
    walk(opts.horizon, opts.dt, &opts.record, Some(&mut index), |ev| {
        match ev {
            Event::Step { idx, t, h } => {
                family.grad_into(idx, &x, &mut gx);
                family.mean_gradient_into(&y, &mut gy, &mut scratch);
                draw_noise(&mut rng, h, &mut noise);
                em_update(&mut x, &gx, h, &noise);
                em_update(&mut y, &gy, h, &noise);
                check_finite(&x, t + h)?;
                check_finite(&y, t + h)?;
            }
            Event::Node { node, idx } => {
                if records_node(&opts.record, node) {
                    a.push(node.t, &x, Some(idx));
                    b.push(node.t, &y, None);
                }
            }
        }
        Ok(())
    })?;
    let f = DistanceFunction::new(family.declared_l(), family.declared_r())?;
    Ok(CoupledTrajectory::assemble(a, b, None, |r| f.eval(r)))
}

/// Reflection coupling of two switched diffusions sharing the index process.
#[allow(clippy::too_many_arguments)]
pub fn simulate_reflection_coupling<S: Real>(
    family: &PotentialFamily<S>,
    eta: S,
    x0: &[S],
    y0: &[S],
    horizon: S,
    dt: S,
    eps_meet: S,
    seed: impl Into<StreamKey>,
) -> Result<CoupledTrajectory<S>> {
    simulate_reflection_coupling_with(family, eta, x0, y0, eps_meet, &SimOptions::new(horizon, dt), seed)
}

pub fn simulate_reflection_coupling_with<S: Real>(
    family: &PotentialFamily<S>,
    eta: S,
    x0: &[S],
    y0: &[S],
    eps_meet: S,
    opts: &SimOptions<S>,
    seed: impl Into<StreamKey>,
) -> Result<CoupledTrajectory<S>> {
    let key = seed.into();
    check_start(family, x0)?;
    check_start(family, y0)?;
    if !(eps_meet > S::zero()) {
        return invalid(format!("eps_meet must be positive, got {eps_meet}"));
    }
    validate_grid(opts.horizon, opts.dt, &opts.record)?;
    let mut index = IndexProcess::new(family.n_components(), eta, opts.initial_index, key)?;
    if opts.warn {
        warn_step_size(family, Some(eta), opts.dt);
    }
    let d = family.dim();
    let mut rng = key.rng(Purpose::Diffusion);
    let mut meet_rng = key.rng(Purpose::Meeting);
    let (mut x, mut y) = (x0.to_vec(), y0.to_vec());
    let (mut gx, mut gy) = (vec![S::zero(); d], vec![S::zero(); d]);
    let (mut db, mut db_ref) = (vec![S::zero(); d], vec![S::zero(); d]);
    let mut e = vec![S::zero(); d];
    let mut diff = vec![S::zero(); d];
    let mut meeting_time = (x == y).then_some(S::zero());
    let mut a = new_path(d, opts, key, true);
    let mut b = new_path(d, opts, key, true);
    if records_initial(&opts.record, opts.horizon) {
        a.push(S::zero(), &x, Some(index.state()));
        b.push(S::zero(), &y, Some(index.state()));
    }
    walk(opts.horizon, opts.dt, &opts.record, Some(&mut index), |ev| {
        match ev {
            Event::Step { idx, t, h } => {
                draw_noise(&mut rng, h, &mut db);
                if meeting_time.is_some() {
                    family.grad_into(idx, &x, &mut gx);
                    em_update(&mut x, &gx, h, &db);
                    check_finite(&x, t + h)?;
                    y.copy_from_slice(&x);
                    return Ok(());
                }
                for ((ej, &xj), &yj) in e.iter_mut().zip(&x).zip(&y) {
                    *ej = xj - yj;
                }
                let r_old = norm(&e);
                e.iter_mut().for_each(|v| *v = *v / r_old);
                family.grad_into(idx, &x, &mut gx);
                em_update(&mut x, &gx, h, &db);
                check_finite(&x, t + h)?;
                reflect_increment(&e, &db, &mut db_ref);
                family.grad_into(idx, &y, &mut gy);
                em_update(&mut y, &gy, h, &db_ref);
                check_finite(&y, t + h)?;
                for ((dj, &xj), &yj) in diff.iter_mut().zip(&x).zip(&y) {
                    *dj = xj - yj;
                }
                let r_new = norm(&diff);
                let along = dot(&diff, &e);
                let met = r_new <= eps_meet
                    || along <= S::zero()
                    || S::unit(&mut meet_rng) < (-(r_old * along) / (S::lit(4.0) * h)).exp();
                if met {
                    meeting_time = Some(t + h);
                    y.copy_from_slice(&x);
                }
            }
            Event::Node { node, idx } => {
                if records_node(&opts.record, node) {
                    a.push(node.t, &x, Some(idx));
                    b.push(node.t, &y, Some(idx));
                }
            }
        }
        Ok(())
    })?;
    let f = DistanceFunction::new(family.declared_l(), family.declared_r())?;
    Ok(CoupledTrajectory::assemble(a, b, meeting_time, |r| f.eval(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{quadratic, trig};
    use crate::processes::trajectory::Record;

    #[test]
    fn reflection_preserves_norm_and_flips_component() {
        let e = [0.6f64, 0.8];
        let db = [1.0, -2.0];
        let mut out = [0.0; 2];
        reflect_increment(&e, &db, &mut out);
        assert!((norm(&out) - norm(&db)).abs() < 1e-14);
        assert!((dot(&e, &out) + dot(&e, &db)).abs() < 1e-14);
    }

    #[test]
    fn synchronous_pair_with_one_component_is_diagonal() {
        let fam = quadratic(&[10.0], &[0.0], 1).unwrap();
        let c = simulate_synchronous_pair(&fam, 0.1, &[1.0], 1.0, 1e-3, 7).unwrap();
        assert!(c.r.iter().all(|&r| r == 0.0));
        assert!(c.f_of_r.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn synchronous_pair_separates_with_several_components() {
        let fam = quadratic(&[10.0, 10.0], &[-1.0, 1.0], 1).unwrap();
        let c = simulate_synchronous_pair(&fam, 0.1, &[0.0], 1.0, 1e-3, 7).unwrap();
        assert!(c.r.iter().any(|&r| r > 1e-3));
        assert_eq!(c.times(), c.path_b.times.as_slice());
    }

    #[test]
    fn identical_starts_meet_immediately() {
        let fam = trig(&[0.0, 1.0], 1).unwrap();
        let c = simulate_reflection_coupling(&fam, 0.1, &[0.5], &[0.5], 1.0, 1e-3, 1e-6, 3).unwrap();
        assert_eq!(c.meeting_time, Some(0.0));
        assert!(c.r.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn paths_stay_merged_after_meeting() {
        let fam = quadratic(&[1.0, 1.0], &[-0.5, 0.5], 2).unwrap();
        let c = simulate_reflection_coupling(&fam, 0.1, &[0.3, 0.0], &[-0.3, 0.0], 20.0, 1e-3, 1e-6, 11).unwrap();
        let m = c.meeting_time.expect("pair should meet");
        for (&t, &r) in c.times().iter().zip(&c.r) {
            if t >= m {
                assert_eq!(r, 0.0);
            }
        }
    }

    #[test]
    fn ornstein_uhlenbeck_pairs_couple() {
        let fam = quadratic(&[1.0], &[0.0], 1).unwrap();
        let opts = SimOptions::new(10.0, 1e-3).record(Record::Final).quiet();
        let n = 200;
        let met = (0..n)
            .filter(|&rep| {
                simulate_reflection_coupling_with(&fam, 1.0, &[2.0], &[-2.0], 1e-6, &opts, StreamKey::new(5, rep))
                    .unwrap()
                    .met_by(10.0)
            })
            .count();
        assert!(met as f64 / n as f64 >= 0.99, "only {met}/{n} pairs met");
    }

    #[test]
    fn reflected_noise_keeps_marginal_law() {
        // Path b of a reflection coupling is itself a switched diffusion: for a
        // single quadratic its terminal variance must match the OU value.
        let fam = quadratic(&[1.0], &[0.0], 1).unwrap();
        let opts = SimOptions::new(1.0, 1e-3).record(Record::Final).quiet();
        let n = 4000;
        let ys: Vec<f64> = (0..n)
            .map(|rep| {
                let c = simulate_reflection_coupling_with(&fam, 1.0, &[5.0], &[0.0], 1e-6, &opts, StreamKey::new(9, rep)).unwrap();
                c.path_b.last_point()[0]
            })
            .collect();
        let mean = ys.iter().sum::<f64>() / n as f64;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let want = 1.0 - (-2.0f64).exp();
        assert!((var - want).abs() < 0.08, "variance {var} vs {want}");
    }
}
