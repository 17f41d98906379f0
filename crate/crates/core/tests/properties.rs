use proptest::prelude::*;

use num_complex::Complex64 as C;
use radpol::algebra::{invert4, kron, Complex2x2, Real4x4};
use radpol::bench_sim::{bench_mueller, full_bench, Sample};
use radpol::elements::{apply_to_pol, apply_to_spa, compose, DepolarizingEnsemble, ElementKind, LocalOp, Polarization};
use radpol::fields::{render, Grid};
use radpol::polarimetry::{
    abstract_intensities, conventional_probe_set, conventional_reconstruct_ensemble, least_squares_mueller,
    mueller_depolarizing, mueller_from_jones, probed_radial_state, single_shot_mueller,
};
use radpol::sampling::{ginibre, passive_jones, random_coherency, random_state, rng_from_seed};
use radpol::states::{
    coherency_of, radial_beam, reduce_pol, reduce_spa, schmidt_coefficients, two_dof_stokes, CoherencyMatrix4,
    StokesVector,
};

fn complex() -> impl Strategy<Value = C> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C::new(re, im))
}

fn matrix2() -> impl Strategy<Value = Complex2x2> {
    prop::array::uniform4(complex()).prop_map(|a| Complex2x2::new(a[0], a[1], a[2], a[3]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kron_mixed_product(a in matrix2(), b in matrix2(), c in matrix2(), d in matrix2()) {
        let lhs = kron(&a, &b) * kron(&c, &d);
        let rhs = kron(&(a * c), &(b * d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn invert_round_trip(entries in prop::array::uniform16(-1.0..1.0f64)) {
        // Diagonal shift keeps the matrix well conditioned.
        let m = Real4x4::from_fn(|i, j| entries[4 * i + j] + if i == j { 5.0 } else { 0.0 });
        let inv = invert4(&m).unwrap();
        prop_assert!((m * inv).max_abs_diff(&Real4x4::identity()) < 1e-12);
        prop_assert!((inv * m).max_abs_diff(&Real4x4::identity()) < 1e-12);
    }

    #[test]
    fn two_dof_stokes_round_trip(seed in any::<u64>()) {
        let rho = random_coherency(&mut rng_from_seed(seed));
        let back = CoherencyMatrix4::from_two_dof_stokes(&two_dof_stokes(&rho));
        prop_assert!(back.0.max_abs_diff(&rho.0) < 1e-13);
    }

    #[test]
    fn partial_traces_keep_power(seed in any::<u64>()) {
        let rho = random_coherency(&mut rng_from_seed(seed));
        let p = rho.power();
        prop_assert!((reduce_pol(&rho).power() - p).abs() < 1e-13);
        prop_assert!((reduce_spa(&rho).power() - p).abs() < 1e-13);
        prop_assert!((two_dof_stokes(&rho).power() - p).abs() < 1e-13);
        prop_assert!((abstract_intensities(&rho).transmitted_power() - p).abs() < 1e-13);
    }

    #[test]
    fn reduced_spectra_equal_schmidt_squares(seed in any::<u64>()) {
        let e = random_state(&mut rng_from_seed(seed));
        let (s1, s2) = schmidt_coefficients(&e);
        let rho = coherency_of(&e);
        for r in [reduce_pol(&rho), reduce_spa(&rho)] {
            let (lo, hi) = r.0.hermitian_eigenvalues();
            prop_assert!((hi - s1 * s1).abs() < 1e-13 && (lo - s2 * s2).abs() < 1e-13);
        }
    }

    #[test]
    fn local_operators_commute(t in matrix2(), w in matrix2(), seed in any::<u64>()) {
        let e = random_state(&mut rng_from_seed(seed));
        let a = apply_to_spa(&w, &apply_to_pol(&t, &e));
        let b = apply_to_pol(&t, &apply_to_spa(&w, &e));
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
        let via_kron = e.apply(&LocalOp::<Polarization>::new(t).embedded());
        prop_assert!(via_kron.max_abs_diff(&apply_to_pol(&t, &e)) < 1e-12);
    }

    #[test]
    fn single_shot_equals_oracle(t in matrix2()) {
        let want = mueller_from_jones(&t);
        prop_assert!(single_shot_mueller(&t).max_abs_error(&want) < 1e-12 * (1.0 + want.0.frobenius()));
    }

    #[test]
    fn mueller_scales_with_modulus_squared(t in matrix2(), s in complex()) {
        let m = mueller_from_jones(&t);
        let ms = mueller_from_jones(&t.scale(s));
        let want = m.0.scale(s.norm_sqr());
        prop_assert!(ms.0.max_abs_diff(&want) < 1e-12 * (1.0 + want.frobenius()));
    }

    #[test]
    fn mueller_is_multiplicative(a in matrix2(), b in matrix2()) {
        let lhs = mueller_from_jones(&(b * a)).0;
        let rhs = mueller_from_jones(&b).0 * mueller_from_jones(&a).0;
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-11 * (1.0 + rhs.frobenius()));
    }

    #[test]
    fn ensembles_are_affine(seed in any::<u64>(), w in 0.0..1.0f64) {
        let mut rng = rng_from_seed(seed);
        let (a, b) = (passive_jones(&mut rng), passive_jones(&mut rng));
        let ens = DepolarizingEnsemble::new(vec![(w, a), (1.0 - w, b)]).unwrap();
        let want = mueller_from_jones(&a).0.scale(w) + mueller_from_jones(&b).0.scale(1.0 - w);
        prop_assert!(mueller_depolarizing(&ens).0.max_abs_diff(&want) < 1e-14);
        let bench = bench_mueller(&Sample::Ensemble(ens.clone())).unwrap();
        prop_assert!(bench.0.max_abs_diff(&want) < 1e-12);
        let conv = conventional_reconstruct_ensemble(&ens, &conventional_probe_set()).unwrap();
        prop_assert!(conv.0.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn bench_conserves_transmitted_power(seed in any::<u64>()) {
        let t = passive_jones(&mut rng_from_seed(seed));
        let d = full_bench(&Sample::Jones(t));
        let transmitted = probed_radial_state(&t).power();
        prop_assert!((d.total_power() - transmitted).abs() < 1e-13);
        prop_assert!(d.is_nonnegative());
    }

    #[test]
    fn passive_samples_do_not_amplify(seed in any::<u64>()) {
        let t = passive_jones(&mut rng_from_seed(seed));
        let (smax, _) = t.singular_values();
        prop_assert!(smax <= 1.0 + 1e-12);
        let m = mueller_from_jones(&t);
        let out = m.apply(&StokesVector([1.0, 0.0, 0.0, 1.0]));
        prop_assert!(out.0[0] <= 1.0 + 1e-12);
    }

    #[test]
    fn composition_matches_matrix_product(a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let first = ElementKind::QuarterWaveConverter { theta: a };
        let second = ElementKind::Polarizer { theta: b };
        let t = compose(&[first, second]);
        prop_assert!(t.max_abs_diff(&(second.jones() * first.jones())) < 1e-15);
    }

    #[test]
    fn least_squares_recovers_exact_data(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let t = ginibre(&mut rng);
        let m = mueller_from_jones(&t);
        let pairs: Vec<_> = (0..6)
            .map(|_| {
                let z = ginibre(&mut rng);
                let s = radpol::states::stokes_of(&radpol::states::CoherencyMatrix2::pure([z.0[0][0], z.0[1][0]]));
                (s, m.apply(&s))
            })
            .collect();
        let fit = least_squares_mueller(&pairs).unwrap();
        prop_assert!(fit.max_abs_error(&m) < 1e-8 * (1.0 + m.0.frobenius()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn render_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in complex(), b in complex()) {
        let g = Grid::square(24, 3.0).unwrap();
        let e1 = random_state(&mut rng_from_seed(s1));
        let e2 = random_state(&mut rng_from_seed(s2));
        let lhs = render(&e1.scale(a).add(&e2.scale(b)), &g);
        let rhs = render(&e1, &g).scale(a).add(&render(&e2, &g).scale(b));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        prop_assert!(lhs.intensity().iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn radial_state_is_maximally_entangled() {
    let (s1, s2) = schmidt_coefficients(&radial_beam());
    assert!((s1 - s2).abs() < 1e-15);
}
