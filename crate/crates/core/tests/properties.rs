use ilw_lab::evolution::{evolve, invariant_report, EquationParams, EvolutionConfig};
use ilw_lab::experiments::{deep_water_gap, qdelta_scan, ExperimentReport};
use ilw_lab::gauge::{exp_i_primitive, gamma_integral, gauge_w, primitive};
use ilw_lab::spectral::special::coth_minus_sign;
use ilw_lab::spectral::{
    apply_symbol, make_symbol, norm, project, symbol_at, Grid, MultiplierSpec, Norm, Projection, PropagatorTag,
    SpectralField,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_real(n: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    SpectralField::from_real_samples(Grid::periodic(n).unwrap(), &samples).unwrap()
}

/// Smooth, mean-free, real, with no Nyquist content.
fn smooth_mean_free(n: usize, seed: u64, amp: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::periodic(n).unwrap();
    let modes: Vec<(i64, Complex64)> = (1..n as i64 / 4)
        .map(|k| {
            let decay = amp * (-(k as f64) / 2.0).exp();
            (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * decay)
        })
        .collect();
    let mut all = modes.clone();
    all.extend(modes.iter().map(|(k, c)| (-k, c.conj())));
    SpectralField::from_modes(grid, &all).unwrap()
}

fn reality_preserving_specs() -> Vec<MultiplierSpec> {
    let mut v = vec![
        MultiplierSpec::Hilbert,
        MultiplierSpec::TDelta { delta: 0.7 },
        MultiplierSpec::QDelta { delta: 2.0 },
        MultiplierSpec::GDelta { delta: 0.3 },
        MultiplierSpec::QEffective { delta: 1.5 },
        MultiplierSpec::Dx,
        MultiplierSpec::DxInv,
        MultiplierSpec::Js { s: 0.75 },
    ];
    for tag in [
        PropagatorTag::Ilw { delta: 1.0 },
        PropagatorTag::Bo,
        PropagatorTag::Kdv,
        PropagatorTag::Silw { delta: 0.25 },
    ] {
        v.push(MultiplierSpec::FreePropagator { t: 0.83, tag });
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn transform_roundtrip(seed in any::<u64>(), log_n in 3u32..10) {
        let n = 1usize << log_n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = SpectralField::from_real_samples(Grid::periodic(n).unwrap(), &samples).unwrap();
        let back = f.to_real_samples().unwrap();
        let scale = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in samples.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reality_preserving_multipliers_keep_hermitian_symmetry(seed in any::<u64>()) {
        let f = random_real(64, seed);
        for spec in reality_preserving_specs() {
            prop_assert!(spec.reality_preserving());
            let g = apply_symbol(&f, &spec).unwrap();
            prop_assert!(g.hermitian_defect() <= 1e-12 * g.max_abs().max(1.0), "{:?}", spec);
        }
    }

    #[test]
    fn primitive_inverts_derivative(seed in any::<u64>()) {
        let v = smooth_mean_free(64, seed, 1.0);
        let f = primitive(&v).unwrap();
        let dv = apply_symbol(&f, &MultiplierSpec::Dx).unwrap();
        prop_assert!(dv.max_abs_diff(&v).unwrap() <= 1e-10 * v.max_abs().max(1.0));
    }

    #[test]
    fn exp_i_primitive_is_unimodular(seed in any::<u64>()) {
        // Band-limited and moderate, so e^{iF} is resolved on the grid.
        let v = smooth_mean_free(256, seed, 1.0);
        let v = project(&v, Projection::Leq { n: 8 }).unwrap();
        let e = exp_i_primitive(&primitive(&v).unwrap());
        for z in e.to_complex_samples() {
            prop_assert!((z.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn gauge_is_contractive_and_positive(seed in any::<u64>()) {
        let v = smooth_mean_free(64, seed, 1.0);
        let w = gauge_w(&v).unwrap();
        prop_assert!(norm(&w, Norm::L2).unwrap() <= norm(&v, Norm::L2).unwrap() * (1.0 + 1e-10));
        for n in w.grid().indices().filter(|n| *n <= 0) {
            prop_assert_eq!(w.coeff(n), Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn propagators_are_unitary() {
    let grid = Grid::periodic(256).unwrap();
    let tags = [
        PropagatorTag::Ilw { delta: 0.5 },
        PropagatorTag::Ilw { delta: f64::INFINITY },
        PropagatorTag::Bo,
        PropagatorTag::Kdv,
        PropagatorTag::Silw { delta: 0.125 },
        PropagatorTag::GaugedFree { m0: 0.4 },
    ];
    for tag in tags {
        for t in [-3.0, 0.1, 7.5] {
            for c in make_symbol(&MultiplierSpec::FreePropagator { t, tag }, &grid).unwrap() {
                assert!((c.norm() - 1.0).abs() <= 1e-14, "{tag:?}");
            }
        }
    }
}

#[test]
fn q_delta_tail_bound() {
    for delta in [1.0f64, 2.0, 4.0, 8.0] {
        let q = symbol_at(&MultiplierSpec::QDelta { delta }, 1.0).norm();
        assert!(q <= 3.0 * (-2.0 * delta).exp(), "delta = {delta}");
    }
}

#[test]
fn bernstein_scaling() {
    // One C for all N: Cauchy-Schwarz over the support of ψ_N gives
    // ‖P_N f‖∞ ≤ (#supp / L)^{1/2} ‖P_N f‖₂, and #supp grows like N.
    let grid = Grid::periodic(512).unwrap();
    let dyadic: Vec<u64> = (1..=7).map(|k| 1u64 << k).collect();
    let support = |n: u64| {
        let w = Projection::Dyadic { n };
        grid.wavenumbers().iter().filter(|xi| w.weight(**xi).unwrap() != 0.0).count() as f64
    };
    let c = dyadic
        .iter()
        .map(|&n| (support(n) / (grid.period() * n as f64)).sqrt())
        .fold(0.0, f64::max);
    let ratio = |f: &SpectralField, n: u64| {
        let p = project(f, Projection::Dyadic { n }).unwrap();
        norm(&p, Norm::Linf).unwrap() / norm(&p, Norm::L2).unwrap() / (n as f64).sqrt()
    };
    // The Dirichlet-type spike comes within a small factor, so the N^{1/2} rate is sharp.
    let spike = SpectralField::from_coeffs(grid, vec![Complex64::new(1.0, 0.0); 512]).unwrap();
    for &n in &dyadic {
        let r = ratio(&spike, n);
        assert!(r <= c * (1.0 + 1e-12) && r >= c / 3.0, "N = {n}: {r} vs {c}");
    }
    for seed in 0..20 {
        let f = random_real(512, seed);
        for &n in &dyadic {
            assert!(ratio(&f, n) <= c * (1.0 + 1e-12), "seed {seed}, N = {n}");
        }
    }
}

#[test]
fn littlewood_paley_partition() {
    let f = random_real(256, 3);
    let mut sum = project(&f, Projection::Lo).unwrap();
    for k in 1..=7 {
        sum = sum.add(&project(&f, Projection::Dyadic { n: 1 << k }).unwrap()).unwrap();
    }
    assert!(sum.max_abs_diff(&f).unwrap() <= 1e-12);
}

#[test]
fn mean_is_conserved_by_every_equation() {
    let grid = Grid::periodic(64).unwrap();
    let u0 = SpectralField::from_real_fn(grid, |x| 0.2 + 0.3 * x.cos() - 0.1 * (3.0 * x).sin());
    for eq in ["ilw", "bo", "kdv", "silw", "kdv_third", "bo_perturbed"] {
        let cfg = EvolutionConfig::new(eq, grid, 1e-3, 0.2)
            .with_params(EquationParams::with_delta(1.0))
            .with_stride(20);
        let traj = evolve(&u0, &cfg).unwrap();
        let rep = invariant_report(&traj).unwrap();
        assert!(rep.mean_drift <= 1e-13, "{eq}: {:e}", rep.mean_drift);
    }
}

#[test]
fn ilw_symbol_approaches_bo_per_frequency() {
    let grid = Grid::periodic(128).unwrap();
    let delta = 32.0;
    let ilw = make_symbol(
        &MultiplierSpec::FreePropagator {
            t: 1.0,
            tag: PropagatorTag::Ilw { delta },
        },
        &grid,
    )
    .unwrap();
    for n in grid.indices().filter(|n| *n != 0 && *n != grid.nyquist_index()) {
        let xi = n as f64;
        let gap = (PropagatorTag::Ilw { delta }.generator(xi) - PropagatorTag::Bo.generator(xi)).norm();
        let bound = xi * xi * (1.0 / (delta * xi.abs()) + 3.0 * (-2.0 * delta * xi.abs()).exp());
        // Equality up to rounding once coth(δ|ξ|) = 1 in floating point.
        assert!(gap <= bound * (1.0 + 1e-14), "n = {n}");
        assert!((gap - deep_water_gap(xi, delta)).abs() <= 1e-12 * bound);
        let slot = grid.slot(n).unwrap();
        assert!((ilw[slot].norm() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn gamma_grows_at_the_conserved_rate() {
    let grid = Grid::periodic(64).unwrap();
    let v0 = SpectralField::from_real_fn(grid, |x| 0.3 * x.cos() + 0.1 * (2.0 * x).sin());
    for (eq, params) in [("bo", EquationParams::default()), ("ilw", EquationParams::with_delta(1.0))] {
        let cfg = EvolutionConfig::new(eq, grid, 1e-3, 0.5).with_params(params);
        let traj = evolve(&v0, &cfg).unwrap();
        let m0: f64 = v0.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let (t1, t2) = (0.1, 0.4);
        let slope = (gamma_integral(&traj, t2).unwrap() - gamma_integral(&traj, t1).unwrap()) / (t2 - t1);
        assert!((slope - m0).abs() <= 1e-8, "{eq}: {slope} vs {m0}");
    }
}

#[test]
fn verdicts_reproduce_from_serialized_report() {
    let r = qdelta_scan(&[0.0, 0.25], &[0.25, 1.0, 4.0], &Grid::periodic(64).unwrap()).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: ExperimentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.evaluate().unwrap(), r.verdicts);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    use ilw_lab::experiments::{deep_water, SolverParams};
    let u0 = SpectralField::from_real_fn(Grid::periodic(32).unwrap(), |x| 0.3 * x.cos());
    let sp = SolverParams {
        t_final: 0.1,
        ..SolverParams::default()
    };
    let deltas = [1.0, 2.0, 4.0, f64::INFINITY];
    let parallel = deep_water(&u0, 0.25, &deltas, &sp, false).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| deep_water(&u0, 0.25, &deltas, &sp, false)).unwrap();
    assert_eq!(parallel, serial);
}

#[test]
fn linear_gap_decreases_along_the_delta_grid() {
    let deltas = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    for n in 1..128 {
        let gaps: Vec<f64> = deltas.iter().map(|d| deep_water_gap(n as f64, *d)).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "n = {n}");
        assert!(coth_minus_sign(32.0 * n as f64) < 1e-20);
    }
}
