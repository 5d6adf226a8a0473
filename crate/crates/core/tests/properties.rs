//! Property tests of the structural identities across the crate.

use proptest::prelude::*;

use sqg_core::inequality_lab::ab::relative_slack;
use sqg_core::inequality_lab::{check_ab_inequality, AbSetup};
use sqg_core::initial::PowerLaw;
use sqg_core::littlewood_paley::{
    commutator_bj, dealiased_product, paraproduct_decompose, project_block, project_low, trilinear_n, DyadicPartition,
    SemigroupWeight,
};
use sqg_core::solver::{advection, run_simulation, SolverConfig};
use sqg_core::spectral::multiplier::spectral_divergence_defect;
use sqg_core::spectral::{
    apply_multiplier, forward_transform, inverse_transform, lp_norm, riesz_perp, GridSpec, MultiplierSpec,
    SpectralField,
};

fn field(n: usize, seed: u64, slope: f64) -> SpectralField {
    PowerLaw::new(slope, 1.0, f64::INFINITY).sample(GridSpec::square(n).unwrap(), seed)
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plancherel(seed in any::<u64>(), slope in 0.0..3.0f64) {
        let f = field(64, seed, slope);
        let phys = inverse_transform(&f).unwrap();
        let l2 = lp_norm(&phys, f.grid(), 2.0).unwrap();
        prop_assert!((l2 - f.l2_norm()).abs() <= 1e-10 * f.l2_norm());
        let back = forward_transform(&phys, f.grid()).unwrap();
        prop_assert!(rel(&back, &f) < 1e-13);
    }

    #[test]
    fn heat_semigroup(seed in any::<u64>(), t1 in 0.0..2.0f64, t2 in 0.0..2.0f64, gamma in 0.1..2.0f64) {
        let f = field(32, seed, 1.0);
        let a = apply_multiplier(&apply_multiplier(&f, &MultiplierSpec::heat(1.0, t1, gamma)).unwrap(), &MultiplierSpec::heat(1.0, t2, gamma)).unwrap();
        let b = apply_multiplier(&f, &MultiplierSpec::heat(1.0, t1 + t2, gamma)).unwrap();
        prop_assert!(rel(&a, &b) <= 1e-12);
    }

    #[test]
    fn gevrey_inverts_heat(seed in any::<u64>(), gamma in 0.2..1.5f64, frac in 0.0..1.0f64) {
        let f = field(64, seed, 0.5);
        let t = frac * 30.0 / f.grid().max_wavenumber().powf(gamma);
        let h = apply_multiplier(&f, &MultiplierSpec::heat(1.0, t, gamma)).unwrap();
        let back = apply_multiplier(&h, &MultiplierSpec::gevrey(1.0, t, gamma)).unwrap();
        prop_assert!(rel(&back, &f) <= 1e-9);
    }

    #[test]
    fn riesz_divergence_free(seed in any::<u64>()) {
        let f = field(32, seed, 0.0);
        let (u1, u2) = riesz_perp(&f);
        prop_assert!(spectral_divergence_defect(&u1, &u2) <= 1e-15 * f.coeff_norm());
    }

    #[test]
    fn partition_reconstructs(seed in any::<u64>(), n_exp in 4u32..8) {
        let f = field(1 << n_exp, seed, 0.0);
        let part = DyadicPartition::for_grid(f.grid());
        let mut sum = project_low(&f, part.j_low);
        for j in part.j_low + 1..=part.j_max {
            sum = sum.add(&project_block(&f, j)).unwrap();
        }
        prop_assert!(rel(&sum, &f) <= 1e-12);
    }

    #[test]
    fn distant_blocks_orthogonal(seed in any::<u64>(), j in 0i32..3, gap in 2i32..4) {
        let f = field(64, seed, 0.0);
        let a = project_block(&f, j);
        let b = project_block(&project_block(&f, j + gap), j);
        prop_assert!(b.l2_norm() <= 1e-12 * f.l2_norm());
        prop_assert!(a.inner(&project_block(&f, j + gap)).unwrap().abs() <= 1e-12 * f.l2_norm().powi(2));
    }

    #[test]
    fn paraproduct_reconstructs(s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = field(64, s1, 1.5);
        let g = field(64, s2, 1.5);
        let p = paraproduct_decompose(&f, &g).unwrap();
        let whole = dealiased_product(&f, &g).unwrap();
        prop_assert!(rel(&p.total().unwrap(), &whole) <= 1e-10);
    }

    #[test]
    fn transport_energy_neutral(s1 in any::<u64>(), s2 in any::<u64>()) {
        let g = field(32, s1, 1.5);
        let f = field(32, s2, 1.5);
        let v = trilinear_n(&g, &f, &f, 0.0, 1.0, 0.0, SemigroupWeight::Full).unwrap();
        let scale = g.l2_norm() * f.l2_norm() * f.l2_norm() * 32.0;
        prop_assert!(v.abs() <= 1e-10 * scale);
    }

    #[test]
    fn commutator_vanishes_far_above(s1 in any::<u64>(), s2 in any::<u64>(), tau in 0.0..0.5f64) {
        // t = τ·2^{-J₀γ}, the window of the lemma; larger t amplifies FFT round-off in block j by e^{t|k|^γ}
        let t = tau * 0.25;
        let g = GridSpec::with_period(256, std::f64::consts::TAU / 32.0).unwrap();
        let f = project_low(&PowerLaw::new(0.0, 0.0, f64::INFINITY).sample(g, s1), 4 + 2);
        let h = project_low(&PowerLaw::new(0.0, 0.0, f64::INFINITY).sample(g, s2), 4 + 4);
        let b = commutator_bj(&f, &h, 4 + 7, t, 0.5).unwrap();
        let scale = advection(&f, &h).unwrap().0.l2_norm();
        prop_assert!(b.l2_norm() <= 1e-11 * scale);
    }

    #[test]
    fn ab_random_triples(a in -10.0..10.0f64, b in -10.0..10.0f64, q in 1.01..20.0f64) {
        prop_assert!(relative_slack(a, b, q) >= -1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn solver_mean_and_dissipation_ordering(seed in any::<u64>(), gamma in 0.3..1.5f64) {
        let grid = GridSpec::square(32).unwrap();
        let f = PowerLaw::new(3.0, 1.0, 8.0).sample(grid, seed);
        let f = f.scaled(1.0 / f.l2_norm());
        let viscous = SolverConfig { output_every: 2, ..SolverConfig::new(grid, 1.0, gamma, 0.01, 0.1) };
        let inviscid = SolverConfig { nu: 0.0, ..viscous.clone() };
        let a = run_simulation(&f, &viscous).unwrap();
        let b = run_simulation(&f, &inviscid).unwrap();
        for r in &a.steps {
            prop_assert!(r.mean.abs() <= 1e-15);
        }
        for (x, y) in a.samples.iter().zip(&b.samples) {
            prop_assert!(x.l2 <= y.l2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn solver_gevrey_monotone_in_eps0(seed in any::<u64>(), e1 in 0.05..1.0f64, e2 in 0.05..1.0f64) {
        let grid = GridSpec::square(32).unwrap();
        let f = PowerLaw::new(2.0, 1.0, 10.0).sample(grid, seed);
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let base = SolverConfig { output_every: 2, ..SolverConfig::new(grid, 1.0, 0.5, 0.01, 0.1) };
        let a = run_simulation(&f, &SolverConfig { gevrey_epsilon0: lo, ..base.clone() }).unwrap();
        let b = run_simulation(&f, &SolverConfig { gevrey_epsilon0: hi, ..base }).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            prop_assert!(x.gevrey_h_s <= y.gevrey_h_s * (1.0 + 1e-14));
            prop_assert_eq!(x.l2.to_bits(), y.l2.to_bits());
        }
    }

    #[test]
    fn solver_deterministic(seed in any::<u64>()) {
        let grid = GridSpec::square(32).unwrap();
        let f = PowerLaw::new(2.0, 1.0, 10.0).sample(grid, seed);
        let cfg = SolverConfig::new(grid, 1.0, 0.5, 0.01, 0.05);
        let a = run_simulation(&f, &cfg).unwrap();
        let b = run_simulation(&f, &cfg).unwrap();
        prop_assert_eq!(&a.final_state, &b.final_state);
        prop_assert_eq!(&a.samples, &b.samples);
        prop_assert_eq!(&a.steps, &b.steps);
    }
}

#[test]
fn ab_report_deterministic() {
    let s = AbSetup::single(3.0, 1000, 5);
    let a = check_ab_inequality(&s).unwrap();
    let b = check_ab_inequality(&s).unwrap();
    assert_eq!(a, b);
}
