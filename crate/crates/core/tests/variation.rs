use num_complex::Complex64;
use periods_core::riemann::{period_matrix, CurvePoint, Sheet};
use periods_core::suite::fixed_genus_two_curve;
use periods_core::variation::{fay_tensor, rauch_fd_check, schiffer_tensor, RauchOptions};

#[test]
fn branch_point_derivative_is_pi_i_times_w_w() {
    let curve = fixed_genus_two_curve();
    let pi_i = Complex64::new(0.0, std::f64::consts::PI);
    for k in [0, 3] {
        let r = rauch_fd_check(&curve, k, &RauchOptions::default()).unwrap();
        assert!((r.scalar - pi_i).norm() < 1e-6, "branch {k}: scalar {}", r.scalar);
        // Central differences: halving the step cuts the error by about 4.
        for ratio in &r.table.error_ratios {
            assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
        }
    }
}

#[test]
fn fay_tensor_tends_to_twice_schiffer() {
    let rm = period_matrix(&fixed_genus_two_curve(), 1e-12).unwrap();
    let x = Complex64::new(0.3, -0.2);
    let a = CurvePoint::regular(x, Sheet::Plus);
    let s = schiffer_tensor(&rm, &a, Complex64::new(1.0, 0.0)).unwrap().matrix * Complex64::new(2.0, 0.0);
    let mut last = f64::INFINITY;
    for h in [1e-2, 1e-3, 1e-4] {
        let b = CurvePoint::regular(x + Complex64::new(h, h), Sheet::Plus);
        let f = fay_tensor(&rm, &a, &b).unwrap().matrix;
        let err = (&f - &s).norm() / s.norm();
        assert!(err < last);
        last = err;
    }
    assert!(last < 1e-3);
}
