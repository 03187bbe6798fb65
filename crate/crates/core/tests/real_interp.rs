use mwl_core::fields::{
    gen_commuting_pair, gen_rotating_weight, Convention, GridDomain, MatrixWeightField,
    ScalarField, ScalarProfile, SpectralProfile, VectorField,
};
use mwl_core::linalg::C64;
use mwl_core::real_interp::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn domain() -> GridDomain {
    GridDomain::unit(128).unwrap()
}

fn smooth_weight(rng: &mut ChaCha8Rng, amplitude: f64) -> ScalarField {
    let d = domain();
    let v = ScalarProfile::LogSmooth {
        amplitude,
        modes: 4,
    }
    .sample(&d, rng);
    ScalarField::new(d, v).unwrap()
}

fn scalar_couple(rng: &mut ChaCha8Rng, p0: f64, p1: f64) -> CoupleSpec {
    let w0 = smooth_weight(rng, 1.5);
    let w1 = smooth_weight(rng, 1.5);
    CoupleSpec::scalar(p0, p1, &w0, &w1).unwrap()
}

fn matrix_couple(seed: u64, p0: f64, p1: f64) -> CoupleSpec {
    let d = domain();
    let w0 = gen_rotating_weight(
        seed,
        d,
        &ScalarProfile::Linear {
            offset: 0.2,
            slope: 3.0,
        },
        &ScalarProfile::ExpSine {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.1,
        },
        &ScalarProfile::Constant { value: 0.7 },
    )
    .unwrap();
    let w1 = gen_rotating_weight(
        seed + 1,
        d,
        &ScalarProfile::Linear {
            offset: -0.4,
            slope: 1.0,
        },
        &ScalarProfile::Constant { value: 2.0 },
        &ScalarProfile::ExpSine {
            amplitude: 0.8,
            frequency: 2.0,
            phase: 0.3,
        },
    )
    .unwrap();
    CoupleSpec::matrix(p0, p1, &w0, &w1, Convention::Plain).unwrap()
}

fn smooth_function(rng: &mut ChaCha8Rng, n: usize) -> VectorField {
    let d = domain();
    let coeffs: Vec<(f64, f64, f64)> = (0..3 * n)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..1.0),
            )
        })
        .collect();
    VectorField::from_fn(d, n, |_, x| {
        (0..n)
            .map(|j| {
                let mut v = C64::new(0.3, 0.0);
                for (k, (a, b, ph)) in coeffs[3 * j..3 * j + 3].iter().enumerate() {
                    let arg = 2.0 * std::f64::consts::PI * ((k + 1) as f64 * x + ph);
                    v += C64::new(a * arg.sin(), b * arg.cos()) / (k + 1) as f64;
                }
                v
            })
            .collect()
    })
    .unwrap()
}

#[test]
fn equal_spaces_give_min_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = smooth_weight(&mut rng, 1.0);
    for p in [1.0, 1.5, 2.0, 3.0] {
        let c = CoupleSpec::scalar(p, p, &w, &w).unwrap();
        let f = smooth_function(&mut rng, 1);
        let norm = c.norm0(&f).unwrap();
        for t in [1e-3, 0.2, 1.0, 3.0, 1e4] {
            let (k, dec) = k_functional(t, &f, &c).unwrap();
            assert!(
                (k / (t.min(1.0) * norm) - 1.0).abs() < 1e-9,
                "p={p} t={t}: {k}"
            );
            assert!(dec.x0.add(&dec.x1).max_abs_diff(&f) < 1e-12);
        }
        assert!((sum_norm(&f, &c).unwrap() / norm - 1.0).abs() < 1e-9);
        assert!((intersection_norm(&f, &c).unwrap() / norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zero_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let c = scalar_couple(&mut rng, 1.5, 3.0);
    let z = VectorField::zeros(domain(), 1);
    assert_eq!(sum_norm(&z, &c).unwrap(), 0.0);
    assert_eq!(e_functional(0.5, &z, &c, 2.0).unwrap().0, 0.0);
    assert_eq!(
        real_interp_norm(&z, &c, 0.5, 2.0, RealMethod::K, &LogGrid::default()).unwrap(),
        0.0
    );
}

#[test]
fn k_below_trivial_splittings_and_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p0, p1) in [
        (1.0, 1.0),
        (1.5, 1.5),
        (2.0, 2.0),
        (1.5, 3.0),
        (3.0, 1.2),
        (2.0, 4.0),
    ] {
        let couples = [
            scalar_couple(&mut rng, p0, p1),
            matrix_couple(rng.gen(), p0, p1),
        ];
        for c in &couples {
            let f = smooth_function(&mut rng, c.dim());
            let (n0, n1) = (c.norm0(&f).unwrap(), c.norm1(&f).unwrap());
            for _ in 0..5 {
                let t = 10f64.powf(rng.gen_range(-3.0..3.0));
                let kv = k_functional_certified(t, &f, c).unwrap();
                assert!(kv.value <= n0.min(t * n1) * (1.0 + 1e-12));
                assert!(
                    kv.lower_bound <= kv.value
                        && kv.value <= kv.lower_bound * (1.0 + CERTIFICATE_TOLERANCE)
                );
                let dec = &kv.decomposition;
                let direct = c.norm0(&dec.x0).unwrap() + t * c.norm1(&dec.x1).unwrap();
                assert!(
                    (direct / kv.value - 1.0).abs() < 1e-9,
                    "{direct} vs {}",
                    kv.value
                );
            }
        }
    }
}

#[test]
fn random_perturbations_do_not_improve_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (p0, p1) in [(1.5, 3.0), (2.0, 2.0), (4.0, 1.5)] {
        let c = matrix_couple(rng.gen(), p0, p1);
        let f = smooth_function(&mut rng, 2);
        let t = 0.7;
        let (k, dec) = k_functional(t, &f, &c).unwrap();
        for _ in 0..30 {
            let eps: f64 = 10f64.powf(rng.gen_range(-4.0..-1.0));
            let delta = VectorField::random(&mut rng, domain(), 2).scale_real(eps);
            let x0 = dec.x0.add(&delta);
            let x1 = f.sub(&x0);
            let v = c.norm0(&x0).unwrap() + t * c.norm1(&x1).unwrap();
            assert!(v >= k * (1.0 - 1e-9), "perturbation improved K: {v} < {k}");
        }
    }
}

#[test]
fn equal_exponent_surrogate_envelope() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = domain().h();
    for p in [1.0, 1.5, 2.0, 3.0] {
        let w0 = smooth_weight(&mut rng, 2.0);
        let w1 = smooth_weight(&mut rng, 2.0);
        let c = CoupleSpec::scalar(p, p, &w0, &w1).unwrap();
        let f = smooth_function(&mut rng, 1);
        for t in [1e-2, 0.3, 1.0, 4.0, 50.0] {
            let k = k_functional(t, &f, &c).unwrap().0;
            let s: f64 = (0..f.len())
                .map(|i| (w0.values()[i].min(t * w1.values()[i]) * f.point(i)[0].norm()).powf(p))
                .sum::<f64>()
                * h;
            let ratio = k / s.powf(1.0 / p);
            assert!(
                (1.0 - 1e-9..=2.0).contains(&ratio),
                "p={p} t={t}: ratio {ratio}"
            );
        }
    }
}

#[test]
fn k_is_nondecreasing_and_concave() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let grid = LogGrid::default();
    let ts = grid.values();
    for (p0, p1) in [(1.5, 3.0), (2.0, 2.0), (2.5, 2.5)] {
        for c in [
            scalar_couple(&mut rng, p0, p1),
            matrix_couple(rng.gen(), p0, p1),
        ] {
            let f = smooth_function(&mut rng, c.dim());
            let k = functional_sweep(&f, &c, &grid, RealMethod::K).unwrap();
            let scale = k[k.len() - 1];
            for i in 1..k.len() - 1 {
                assert!(k[i] >= k[i - 1] * (1.0 - 1e-12));
                let lam = (ts[i + 1] - ts[i]) / (ts[i + 1] - ts[i - 1]);
                let chord = lam * k[i - 1] + (1.0 - lam) * k[i + 1];
                assert!(k[i] >= chord - 1e-6 * scale, "not concave at {i}");
            }
        }
    }
}

#[test]
fn e_functional_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = scalar_couple(&mut rng, 1.5, 3.0);
    let f = smooth_function(&mut rng, 1);
    let n1 = c.norm1(&f).unwrap();
    assert_eq!(e_functional(n1 * 1.001, &f, &c, 1.0).unwrap().0, 0.0);
    let (e, dec) = e_functional(n1 * 0.3, &f, &c, 1.0).unwrap();
    assert!(c.norm1(&dec.x1).unwrap() <= n1 * 0.3 * (1.0 + 1e-9));
    assert!((c.norm0(&dec.x0).unwrap() / (n1 * 0.3) / e - 1.0).abs() < 1e-9);
    // E_alpha is nonincreasing in t
    let mut prev = f64::INFINITY;
    for t in [1e-3, 1e-2, 0.1, 1.0, 10.0] {
        let v = e_functional(t, &f, &c, 2.0).unwrap().0;
        assert!(v <= prev * (1.0 + 1e-12));
        prev = v;
    }
}

#[test]
fn selector_extremes_and_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let c = matrix_couple(11, 1.5, 3.0);
    let f = smooth_function(&mut rng, 2);
    let big = selector(1e9, &f, &c, RealMethod::K, 1e-2).unwrap();
    assert!(big.x1.l2_norm() <= 1e-12 * f.l2_norm());
    let tiny = selector(1e-9, &f, &c, RealMethod::K, 1e-2).unwrap();
    assert!(tiny.x0.l2_norm() <= 1e-12 * f.l2_norm());
    for _ in 0..30 {
        let c = if rng.gen_bool(0.5) {
            scalar_couple(&mut rng, 1.5, 3.0)
        } else {
            matrix_couple(rng.gen(), 2.0, 2.0)
        };
        let f = smooth_function(&mut rng, c.dim());
        let t = 10f64.powf(rng.gen_range(-2.0..2.0));
        for m in [
            RealMethod::K,
            RealMethod::E { alpha: 1.0 },
            RealMethod::E { alpha: 2.0 },
        ] {
            selector(t, &f, &c, m, 1e-2).unwrap();
        }
    }
}

#[test]
fn selector_is_homogeneous() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = matrix_couple(5, 1.5, 3.0);
    let f = smooth_function(&mut rng, 2);
    let lambda = C64::new(-2.5, 1.5);
    let a = selector(0.4, &f, &c, RealMethod::K, 1e-2).unwrap();
    let b = selector(0.4, &f.scale(lambda), &c, RealMethod::K, 1e-2).unwrap();
    assert!(b.x0.max_abs_diff(&a.x0.scale(lambda)) < 1e-9 * f.l2_norm());
}

#[test]
fn interpolation_norm_is_homogeneous() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let c = scalar_couple(&mut rng, 1.5, 3.0);
    let f = smooth_function(&mut rng, 1);
    let grid = LogGrid::default();
    let a = real_interp_norm(&f, &c, 0.4, 2.0, RealMethod::K, &grid).unwrap();
    let b = real_interp_norm(&f.scale_real(7.5), &c, 0.4, 2.0, RealMethod::K, &grid).unwrap();
    assert!((b / (7.5 * a) - 1.0).abs() < 1e-8, "{a} {b}");
}

#[test]
fn equal_spaces_norm_is_constant_multiple() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = smooth_weight(&mut rng, 1.0);
    let c = CoupleSpec::scalar(2.0, 2.0, &w, &w).unwrap();
    let f = smooth_function(&mut rng, 1);
    let (theta, q) = (0.3f64, 2.0f64);
    let want = (1.0 / ((1.0 - theta) * q) + 1.0 / (theta * q)).powf(1.0 / q) * c.norm0(&f).unwrap();
    let got = real_interp_norm(&f, &c, theta, q, RealMethod::K, &LogGrid::default()).unwrap();
    assert!((got / want - 1.0).abs() < 1e-6, "{got} vs {want}");
}

#[test]
fn l_space_norm_exact_path_and_scalar_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let d = domain();
    let diag = [smooth_weight(&mut rng, 1.0), smooth_weight(&mut rng, 1.0)];
    let f = VectorField::random(&mut rng, d, 2);
    let (p0, p1, theta) = (1.5, 3.0, 0.4);
    let pt = 1.0 / ((1.0 - theta) / p0 + theta / p1);
    let dw = MatrixWeightField::diagonal(&diag).unwrap();
    let want = dw
        .power(theta)
        .unwrap()
        .weighted_norm(&f, pt, Convention::Plain)
        .unwrap();
    let got = l_space_norm(&f, &diag, p0, p1, pt, theta, 8).unwrap();
    assert!(got.is_exact() && (got.lower / want - 1.0).abs() < 1e-12);
    // n = 1: Lorentz norm with the scalar densities
    let g = VectorField::from_data(d, 1, f.component(0)).unwrap();
    let one = l_space_norm(&g, &diag[..1], p0, p1, 2.0, theta, 8).unwrap();
    let density = diag[0].map(|w| w.powf(-p0 * p1 / (p1 - p0)));
    let outer = diag[0].map(|w| w.powf(p1 / (p1 - p0)));
    assert_eq!(
        one.lower,
        lorentz_norm(&g, pt, 2.0, &density, &outer).unwrap()
    );
}

#[test]
fn commuting_weights_lift_to_scalar_derivations() {
    // W1 = 2 W0: every coordinate sees the couple (1, 2)
    let d = domain();
    let (w0, _) = gen_commuting_pair(
        3,
        2,
        d,
        SpectralProfile::Smooth {
            amplitude: 1.0,
            modes: 3,
        },
    )
    .unwrap();
    let w1 = w0.scale(2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = smooth_function(&mut rng, 2);
    let params = mwl_core::complex_interp::InterpParams::new(2.0, 2.0, 0.5).unwrap();
    let grid = LogGrid::default();
    let lifted = lifted_matrix_derivation(
        &f,
        &w0,
        &w1,
        params,
        Convention::Plain,
        RealMethod::K,
        1,
        &grid,
    )
    .unwrap();
    let direct = omega_real(
        &f,
        &CoupleSpec::matrix(2.0, 2.0, &w0, &w1, Convention::Plain).unwrap(),
        RealMethod::K,
        1,
        &grid,
        DerivationPath::Quadrature,
    )
    .unwrap();
    assert!(
        lifted.max_abs_diff(&direct) < 1e-8 * f.l2_norm().max(1.0),
        "{}",
        lifted.max_abs_diff(&direct)
    );
}

#[test]
fn unimodular_input_has_zero_closed_form() {
    let d = domain();
    let one = ScalarField::constant(d, 1.0);
    let c = CoupleSpec::scalar(1.5, 3.0, &one, &one).unwrap();
    let f = VectorField::from_fn(d, 1, |_, x| vec![C64::from_polar(1.0, 6.0 * x)]).unwrap();
    for n in 1..=3 {
        let o = omega_real(
            &f,
            &c,
            RealMethod::E { alpha: 2.0 },
            n,
            &LogGrid::default(),
            DerivationPath::ClosedForm,
        )
        .unwrap();
        assert!(o.l2_norm() < 1e-14);
    }
}

#[test]
fn lift_matches_direct_when_one_coordinate_carries_the_input() {
    // W0 = I, W1 = diag(a, 3) with a < 3: eigenvalue order never changes, so the lift
    // sees coordinate 0 alone, exactly as the joint couple does.
    let d = domain();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let one = ScalarField::constant(d, 1.0);
    let a = smooth_weight(&mut rng, 1.0);
    let w0 = MatrixWeightField::diagonal(&[one.clone(), one.clone()]).unwrap();
    let w1 = MatrixWeightField::diagonal(&[a, ScalarField::constant(d, 3.0)]).unwrap();
    let mut f = VectorField::zeros(d, 2);
    f.set_component(0, &smooth_function(&mut rng, 1).component(0));
    let params = mwl_core::complex_interp::InterpParams::new(2.0, 2.0, 0.5).unwrap();
    let grid = LogGrid::default();
    let lifted = lifted_matrix_derivation(
        &f,
        &w0,
        &w1,
        params,
        Convention::Plain,
        RealMethod::K,
        1,
        &grid,
    )
    .unwrap();
    let couple = CoupleSpec::matrix(2.0, 2.0, &w0, &w1, Convention::Plain).unwrap();
    let direct = omega_real(
        &f,
        &couple,
        RealMethod::K,
        1,
        &grid,
        DerivationPath::Quadrature,
    )
    .unwrap();
    assert!(
        lifted.max_abs_diff(&direct) < 1e-8 * f.l2_norm(),
        "{}",
        lifted.max_abs_diff(&direct)
    );
}
