use hetnet::dynamics::{eval_g, kernel_shape, PerturbationKernel};
use hetnet::netspec::KernelParams;
use proptest::prelude::*;

#[test]
fn reference_table_matches_golden_file() {
    // values computed at 40 significant digits from the closed form
    let table = include_str!("data/g_reference.csv");
    let mut rows = 0;
    for (i, line) in table.lines().skip(1).enumerate() {
        let (u, g) = line.split_once(',').unwrap();
        let u: f64 = u.parse().unwrap();
        let expected: f64 = g.parse().unwrap();
        assert_eq!(u, i as f64 / 199.0);
        let got = kernel_shape(&KernelParams::REFERENCE, u);
        assert!((got - expected).abs() <= 1e-12, "u = {u}: {got} vs {expected}");
        rows += 1;
    }
    assert_eq!(rows, 200);
}

#[test]
fn reference_shape_has_expected_plateaus() {
    let k = KernelParams::REFERENCE;
    assert!((kernel_shape(&k, 0.0) - 1.0).abs() < 1e-6);
    assert!((kernel_shape(&k, 0.3) - 2.0).abs() < 1e-6);
    assert!(kernel_shape(&k, 0.7).abs() < 1e-6);
    assert!((kernel_shape(&k, 1.0) + 1.0).abs() < 1e-3);
    assert!(kernel_shape(&k, 1.5).abs() < 1e-6);
}

fn params() -> impl Strategy<Value = KernelParams> {
    (0.01..0.99f64, 0.01..0.99f64, 0.1..200.0f64, 0.1..200.0f64, 0.1..200.0f64, -0.5..0.5f64)
        .prop_map(|(l1, l2, s1, s2, s3, b)| KernelParams { l1, l2, s1, s2, s3, b })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn g_is_even(k in params(), u in -3.0..3.0f64, amplitude in 0.0..1.0f64, scale in 1e-4..1.0f64) {
        let kernel = PerturbationKernel { params: k, amplitude, input_scale: scale };
        prop_assert_eq!(eval_g(&kernel, u), eval_g(&kernel, -u));
        prop_assert_eq!(kernel_shape(&k, u), kernel_shape(&k, -u));
    }

    #[test]
    fn zero_amplitude_never_kicks(k in params(), u in -3.0..3.0f64) {
        let kernel = PerturbationKernel { params: k, amplitude: 0.0, input_scale: 0.01 };
        prop_assert_eq!(eval_g(&kernel, u), 0.0);
    }

    #[test]
    fn g_is_bounded(k in params(), u in -3.0..3.0f64) {
        prop_assert!(kernel_shape(&k, u).abs() <= 3.0 + 1e-12);
    }
}
