use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weakprobe_core::qmat::{self, hermitian_eigen};
use weakprobe_core::trajectory::{hamiltonian_step, run_steps_observed, Stepper};
use weakprobe_core::{
    analyze, analyze_matrix, angle_between, bloch_from_state, build_bins, calibrate, density_from_bloch,
    outcome_distribution, polar_decompose, replay, BinSet, BlochVector, DensityMatrix, DetectorParams, Ket,
    Mat2, QubitParams, ScaledPropagator, TrajectorySeed,
};

fn complex() -> impl Strategy<Value = Complex<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn matrix() -> impl Strategy<Value = Mat2> {
    [complex(), complex(), complex(), complex()]
        .prop_filter("full rank", |c| (c[0] * c[3] - c[1] * c[2]).norm() > 1e-3)
        .prop_map(|c| qmat::Mat2([[c[0], c[1]], [c[2], c[3]]]))
}

fn unit_ket() -> impl Strategy<Value = Ket> {
    [complex(), complex()]
        .prop_filter("nonzero", |c| c[0].norm() + c[1].norm() > 1e-3)
        .prop_map(|c| Ket::new(c[0], c[1]).normalized())
}

fn direction() -> impl Strategy<Value = BlochVector> {
    (-1.0..1.0f64, -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(z, phi)| BlochVector::unit(z.acos(), phi))
}

fn mixed_state() -> impl Strategy<Value = DensityMatrix> {
    (0.0..=1.0f64, direction()).prop_map(|(r, d)| density_from_bloch(&BlochVector::new(r, d.theta, d.phi)).unwrap())
}

fn detector() -> impl Strategy<Value = (DetectorParams, QubitParams)> {
    (
        -2.0..2.0f64,
        0.0..1.5f64,
        0.3..3.0f64,
        0.05..0.4f64,
        3.0..8.0f64,
        0.0..=std::f64::consts::FRAC_PI_2,
    )
        .prop_map(|(mean, sep, sigma, frac, range, beta)| {
            let dp = DetectorParams::new(mean, mean + sep, sigma, frac * sigma, 0.01)
                .unwrap()
                .with_range_sigmas(range)
                .unwrap();
            (dp, QubitParams::new(1.0, beta).unwrap())
        })
}

fn bins_for(g: f64, beta: f64) -> BinSet {
    let qp = QubitParams::new(1.0, beta).unwrap();
    build_bins(&calibrate(g, 1.0, 0.01, 1.0).unwrap(), &qp).unwrap()
}

fn relative_diff(a: &Mat2, b: &Mat2) -> f64 {
    a.max_abs_diff(b) / b.frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bloch_round_trip(psi in unit_ket()) {
        let back = bloch_from_state(&psi).unwrap().to_state();
        prop_assert!((psi.inner(&back).norm() - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn polar_factors_reproduce_input(m in matrix()) {
        let p = polar_decompose(&m).unwrap();
        prop_assert!(relative_diff(&(p.rotation * p.positive_part), &m) < 1e-12);
        prop_assert!((p.rotation.adjoint() * p.rotation).max_abs_diff(&Mat2::identity()) < 1e-12);
        prop_assert!(p.positive_part.hermiticity_defect() < 1e-12);
        let eig = hermitian_eigen(&p.positive_part);
        prop_assert!(eig.values[1] >= -1e-12);
        prop_assert!(p.singular_values[0] >= p.singular_values[1]);
        prop_assert!((0.0..=1.0).contains(&p.contrast));
    }

    #[test]
    fn polar_scales_with_input(m in matrix(), log_c in -6.0..6.0f64) {
        let c = 10f64.powf(log_c);
        let a = polar_decompose(&m).unwrap();
        let b = polar_decompose(&m.scale(c)).unwrap();
        prop_assert!(a.rotation.max_abs_diff(&b.rotation) < 1e-10);
        prop_assert!(relative_diff(&b.positive_part, &a.positive_part.scale(c)) < 1e-10);
    }

    #[test]
    fn angle_is_a_metric(a in direction(), b in direction(), c in direction()) {
        let ab = angle_between(&a, &b);
        prop_assert!((ab - angle_between(&b, &a)).abs() < 1e-15);
        prop_assert!((0.0..=std::f64::consts::PI).contains(&ab));
        prop_assert!(ab <= angle_between(&a, &c) + angle_between(&c, &b) + 1e-7);
    }

    #[test]
    fn povm_is_complete((dp, qp) in detector()) {
        let bins = build_bins(&dp, &qp).unwrap();
        prop_assert!(bins.povm_sum().max_abs_diff(&Mat2::identity()) < 1e-12);
    }

    #[test]
    fn kraus_are_contractions((dp, qp) in detector()) {
        let bins = build_bins(&dp, &qp).unwrap();
        for k in bins.kraus() {
            prop_assert!(k.hermiticity_defect() < 1e-15);
            let eig = hermitian_eigen(k);
            prop_assert!(eig.values[1] >= -1e-15 && eig.values[0] <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn outcome_distribution_is_affine(
        (dp, qp) in detector(), r1 in mixed_state(), r2 in mixed_state(), alpha in 0.0..=1.0f64
    ) {
        let bins = build_bins(&dp, &qp).unwrap();
        let mix = DensityMatrix::new(r1.matrix().scale(alpha) + r2.matrix().scale(1.0 - alpha)).unwrap();
        let (p1, p2, pm) = (
            outcome_distribution(&bins, &r1),
            outcome_distribution(&bins, &r2),
            outcome_distribution(&bins, &mix),
        );
        for k in 0..bins.len() {
            prop_assert!((pm[k] - (alpha * p1[k] + (1.0 - alpha) * p2[k])).abs() < 1e-12);
        }
        prop_assert!((pm.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_step_is_unitary(e in 0.01..10.0f64, beta in 0.0..=std::f64::consts::FRAC_PI_2, frac in 0.0..=1.0f64) {
        let qp = QubitParams::new(e, beta).unwrap();
        let u = hamiltonian_step(&qp, 0.1 * frac / e).unwrap();
        prop_assert!((u.adjoint() * u).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn order_swap_is_small(g in 0.05..10.0f64, beta in 0.0..=std::f64::consts::FRAC_PI_2) {
        let bins = bins_for(g, beta);
        let stepper = Stepper::new(&bins).unwrap();
        let u = *stepper.hamiltonian();
        for k in bins.kraus() {
            let commutator = *k * u - u * *k;
            prop_assert!(commutator.frobenius_norm() <= 0.01 * k.frobenius_norm());
        }
    }

    #[test]
    fn unconditioned_average_is_the_cp_map(g in 0.05..10.0f64, beta in 0.0..=std::f64::consts::FRAC_PI_2, rho in mixed_state()) {
        let bins = bins_for(g, beta);
        let stepper = Stepper::new(&bins).unwrap();
        // Average of conditioned states weighted by their exact probabilities.
        let mut averaged = Mat2::zero();
        for k in 0..bins.len() {
            let op = stepper.step_operator(k);
            let unnormalized = op.conjugate(rho.matrix());
            let p = unnormalized.trace().re;
            if p > 0.0 {
                let mut acc = ScaledPropagator::identity();
                let next = stepper.apply(&rho, &mut acc, k, 0).unwrap();
                averaged = averaged + next.matrix().scale(p);
            }
        }
        // Σ_k K_k U ρ U† K_k† computed by hand from the charge-basis masses.
        let (l, r) = bins.charge_states();
        let precessed = stepper.hamiltonian().conjugate(rho.matrix());
        let overlap: f64 = bins.mass_l().iter().zip(bins.mass_r()).map(|(a, b)| (a * b).sqrt()).sum();
        let (pl, pr) = (l.projector(), r.projector());
        let expected = pl * precessed * pl + pr * precessed * pr
            + (pl * precessed * pr + pr * precessed * pl).scale(overlap);
        prop_assert!(averaged.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn replay_matches_naive_product(g in 0.5..10.0f64, beta in 0.0..=std::f64::consts::FRAC_PI_2, len in 1usize..=50, seed in any::<u64>()) {
        let bins = bins_for(g, beta);
        let stepper = Stepper::new(&bins).unwrap();
        let initial = DensityMatrix::pure(&Ket::ground());
        let run = run_steps_observed(&initial, len, &stepper, TrajectorySeed::new(seed, 0), |_, _, _, _| {}).unwrap();
        let naive = run.record.iter().fold(Mat2::identity(), |acc, &k| stepper.step_operator(k as usize) * acc);
        prop_assert!(relative_diff(&run.propagator.unscaled(), &naive) < 1e-10);
        let (again, state) = replay(&initial, &run.record, &bins).unwrap();
        prop_assert!(relative_diff(&again.unscaled(), &naive) < 1e-10);
        prop_assert!(state.matrix().max_abs_diff(run.final_rho.matrix()) < 1e-12);
    }

    #[test]
    fn analysis_is_scale_invariant(m in matrix(), log_c in -6.0..6.0f64) {
        let c = 10f64.powf(log_c);
        let a = analyze_matrix(&m).unwrap();
        let b = analyze_matrix(&m.scale(c)).unwrap();
        prop_assert!((a.w1 - b.w1).abs() < 1e-10 && (a.w2 - b.w2).abs() < 1e-10);
        prop_assert!((a.fidelity - b.fidelity).abs() < 1e-10);
        prop_assert!(a.rotation.max_abs_diff(&b.rotation) < 1e-10);
        prop_assert!(a.positive_part.max_abs_diff(&b.positive_part) < 1e-10);
        prop_assert!((a.psi1.inner(&b.psi1).norm() - 1.0).abs() < 1e-10);
        prop_assert!(angle_between(&a.basis_angles, &b.basis_angles) < 1e-6);
        prop_assert_eq!(a.result_index, b.result_index);
        prop_assert!((a.final_state.inner(&b.final_state).norm() - 1.0).abs() < 1e-10);
        prop_assert_eq!(a.degenerate, b.degenerate);
    }

    #[test]
    fn analysis_reconstructs_the_matrix(m in matrix()) {
        let o = analyze_matrix(&m).unwrap();
        prop_assert!((o.fidelity - (1.0 - 2.0 * o.w2)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&o.fidelity));
        let positive = o.psi1.projector().scale((o.w1 * o.weight_scale).sqrt())
            + o.psi2.projector().scale((o.w2 * o.weight_scale).sqrt());
        prop_assert!(relative_diff(&(o.rotation * positive), &m) < 1e-10);
    }

    #[test]
    fn density_from_bloch_is_valid(r in 0.0..=1.0f64, d in direction()) {
        let rho = density_from_bloch(&BlochVector::new(r, d.theta, d.phi)).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!(rho.min_eigenvalue() >= -1e-12);
        prop_assert!(DensityMatrix::new(*rho.matrix()).is_ok());
    }
}

/// Every state along 10⁶ pooled steps keeps unit trace, stays positive and,
/// starting pure, stays pure.
#[test]
fn states_stay_physical_along_trajectories() {
    let mut pooled = 0;
    let mut worst_trace: f64 = 0.0;
    let mut worst_eigen: f64 = 0.0;
    let mut worst_purity: f64 = 0.0;
    for (i, &(g, beta)) in [(0.01, 0.3), (0.2, 0.785), (5.0, 1.2), (1.0, 0.0)].iter().enumerate() {
        let bins = bins_for(g, beta);
        let stepper = Stepper::new(&bins).unwrap();
        let initial = DensityMatrix::pure(&BlochVector::unit(1.0, 2.0).to_state());
        for run in 0..25 {
            run_steps_observed(&initial, 10_000, &stepper, TrajectorySeed::new(7 + i as u64, run), |_, _, rho, _| {
                worst_trace = worst_trace.max((rho.trace() - 1.0).abs());
                worst_eigen = worst_eigen.min(rho.min_eigenvalue());
                worst_purity = worst_purity.max((rho.purity() - 1.0).abs());
                pooled += 1;
            })
            .unwrap();
        }
    }
    assert_eq!(pooled, 1_000_000);
    assert!(worst_trace < 1e-12, "trace deviation {worst_trace}");
    assert!(worst_eigen >= -1e-12, "min eigenvalue {worst_eigen}");
    assert!(worst_purity < 1e-9, "purity deviation {worst_purity}");
}

#[test]
fn pure_state_stays_pure_over_long_run() {
    let bins = bins_for(0.2, 0.785);
    let initial = DensityMatrix::pure(&Ket::real(0.6, 0.8));
    let stepper = Stepper::new(&bins).unwrap();
    let run = run_steps_observed(&initial, 10_000, &stepper, TrajectorySeed::new(3, 1), |_, _, _, _| {}).unwrap();
    assert!((run.final_rho.purity() - 1.0).abs() < 1e-9);
}

#[test]
fn equal_means_give_pure_precession() {
    let dp = DetectorParams::new(0.5, 0.5, 1.0, 0.1, 0.01).unwrap();
    let qp = QubitParams::new(1.0, 0.6).unwrap();
    let bins = build_bins(&dp, &qp).unwrap();
    let stepper = Stepper::new(&bins).unwrap();
    let initial = DensityMatrix::pure(&Ket::real(0.6, 0.8));
    let z0 = initial.bloch_components()[2];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut state = initial;
    let mut acc = ScaledPropagator::identity();
    for i in 0..500 {
        state = stepper.step(&state, &mut acc, &mut rng, i).unwrap().0;
        assert!((state.purity() - 1.0).abs() < 1e-12);
        assert!((state.bloch_components()[2] - z0).abs() < 1e-12);
    }
}

#[test]
fn one_step_matches_hand_multiplication() {
    let bins = bins_for(0.5, 0.9);
    let stepper = Stepper::new(&bins).unwrap();
    let rho = density_from_bloch(&BlochVector::new(0.7, 1.1, -0.4)).unwrap();
    let (l, r) = bins.charge_states();
    // E δt / 2 with E = 1, δt = 0.01
    let theta = 0.005;
    let u = Mat2::diag(Complex::from_polar(1.0, theta), Complex::from_polar(1.0, -theta));
    for k in [0, bins.len() / 3, bins.len() / 2, bins.len() - 1] {
        let kraus = l.projector().scale(bins.mass_l()[k].sqrt()) + r.projector().scale(bins.mass_r()[k].sqrt());
        let total = kraus * u;
        let raw = total * *rho.matrix() * total.adjoint();
        let expected = raw.scale(1.0 / raw.trace().re);
        let mut acc = ScaledPropagator::identity();
        let next = stepper.apply(&rho, &mut acc, k, 0).unwrap();
        assert!(next.matrix().max_abs_diff(&expected) < 1e-14);
    }
}

#[test]
fn analysis_survives_long_runs() {
    let bins = bins_for(5.0, 0.785);
    let initial = DensityMatrix::pure(&Ket::ground());
    let stepper = Stepper::new(&bins).unwrap();
    let run = run_steps_observed(&initial, 100_000, &stepper, TrajectorySeed::new(5, 5), |_, _, _, _| {}).unwrap();
    let o = analyze(&run.propagator).unwrap();
    assert!(o.fidelity.is_finite() && o.fidelity > 0.9);
    assert!(run.propagator.log_scale.is_finite());
}
