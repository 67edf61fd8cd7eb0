mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use tvho::transforms::{MeasurementKind, MeasurementOperator, SamplingPlan, WaveletFamily, WaveletOperator};
use tvho::{BoundaryCondition, DerivativeOperator, GradientField, GradientOperator, KernelSpec, Mode, VideoTensor};

fn all_bcs() -> Vec<BoundaryCondition> {
    let mut v = BoundaryCondition::all_kinds().to_vec();
    v.push(BoundaryCondition::reflective().with_shift(1).unwrap());
    v.push(BoundaryCondition::anti_reflective().with_shift(0).unwrap());
    v
}

#[test]
fn derivative_matches_extended_convolution() {
    let mut rng = Lcg::new(1);
    for (l, p) in [(3, 2), (5, 2), (5, 4), (7, 6)] {
        let k = KernelSpec::design(l, p, 0.7).unwrap();
        for bc in all_bcs() {
            let d = DerivativeOperator::new(16, &k, bc).unwrap();
            for _ in 0..100 {
                let f = rng.vec(16);
                let err = max_abs_diff(&d.apply(&f).unwrap(), &convolve_extended(&f, &k, bc));
                assert!(err <= 1e-12, "{bc} L={l}: {err}");
            }
        }
    }
}

#[test]
fn anti_reflective_is_exact_on_ramps() {
    for (l, p) in [(3, 2), (9, 8), (27, 25)] {
        let k = KernelSpec::design(l, p, 0.25).unwrap();
        let d = DerivativeOperator::new(40, &k, BoundaryCondition::anti_reflective()).unwrap();
        let f: Vec<f64> = (0..40).map(|j| 3.0 - 2.0 * 0.25 * j as f64).collect();
        let out = d.apply(&f).unwrap();
        assert!(out.iter().all(|v| (v + 2.0).abs() < 1e-9), "L={l}: {out:?}");
    }
}

#[test]
fn derivative_transpose_is_adjoint() {
    let mut rng = Lcg::new(2);
    let k = KernelSpec::design(7, 4, 1.0).unwrap();
    for bc in all_bcs() {
        let d = DerivativeOperator::new(12, &k, bc).unwrap();
        let (x, y) = (rng.vec(12), rng.vec(12));
        let lhs: f64 = d.apply(&x).unwrap().iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(d.apply_transpose(&y).unwrap()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}

#[test]
fn gradient_matches_materialized_kronecker() {
    let mut rng = Lcg::new(3);
    for shape in [(4, 4, 4), (5, 4, 6), (6, 6, 6)] {
        let k = KernelSpec::design(3, 2, 1.0).unwrap();
        for bc in BoundaryCondition::all_kinds() {
            let g = GradientOperator::build(shape, &k, [bc; 3], [1.0, 0.5, 2.0]).unwrap();
            let [dx, dy, dt] = g.axes();
            let f = rng.tensor(shape.0, shape.1, shape.2);
            let got = g.apply(&f).unwrap();
            let kx = kron_axes(Some(dx.matrix()), None, None, shape);
            let ky = kron_axes(None, Some(dy.matrix()), None, shape);
            let kt = kron_axes(None, None, Some(dt.matrix()), shape);
            assert!(max_abs_diff(got.gx.as_slice(), &matvec(&kx, f.as_slice())) < 1e-12);
            assert!(max_abs_diff(got.gy.as_slice(), &matvec(&ky, f.as_slice())) < 1e-12);
            assert!(max_abs_diff(got.gt.as_slice(), &matvec(&kt, f.as_slice())) < 1e-12);

            let field = GradientField {
                gx: rng.tensor(shape.0, shape.1, shape.2),
                gy: rng.tensor(shape.0, shape.1, shape.2),
                gt: rng.tensor(shape.0, shape.1, shape.2),
            };
            let mut want = matvec(&kx.transpose(), field.gx.as_slice());
            for (w, v) in want.iter_mut().zip(matvec(&ky.transpose(), field.gy.as_slice())) {
                *w += v;
            }
            for (w, v) in want.iter_mut().zip(matvec(&kt.transpose(), field.gt.as_slice())) {
                *w += v;
            }
            assert!(max_abs_diff(g.adjoint(&field).unwrap().as_slice(), &want) < 1e-12);
        }
    }
}

#[test]
fn measurement_matches_kronecker() {
    let mut rng = Lcg::new(4);
    for kind in [MeasurementKind::GaussianOrthonormal, MeasurementKind::WalshHadamard] {
        let phi = MeasurementOperator::new(kind, 4, 4, 11).unwrap();
        let f = rng.tensor(4, 4, 2);
        let big = kron_axes(Some(phi.phi_m()), Some(phi.phi_n()), None, (4, 4, 2));
        let y = phi.measure(&f).unwrap();
        assert!(max_abs_diff(y.as_slice(), &matvec(&big, f.as_slice())) < 1e-12);
        assert!((y.norm() - f.norm()).abs() < 1e-10 * f.norm());
        assert!(max_abs_diff(phi.adjoint(&y).unwrap().as_slice(), f.as_slice()) < 1e-10);
    }
}

#[test]
fn selection_matches_explicit_matrix() {
    let mut rng = Lcg::new(5);
    let plan = SamplingPlan::new(4, 4, 2, 0.4, 8, false).unwrap();
    let p = DMatrix::from_fn(plan.len(), 32, |r, c| if plan.indices()[r] == c { 1.0 } else { 0.0 });
    let y = rng.vec(32);
    assert_eq!(plan.select(&y).unwrap(), matvec(&p, &y));
    let b = rng.vec(plan.len());
    assert_eq!(plan.select_adjoint(&b).unwrap(), matvec(&p.transpose(), &b));
}

#[test]
fn wavelet_matches_kronecker_of_filter_bank_matrices() {
    let mut rng = Lcg::new(6);
    for (family, levels, m, n) in [
        (WaveletFamily::Haar, 2, 4, 8),
        (WaveletFamily::Symmlet10, 1, 4, 6),
        (WaveletFamily::Symmlet10, 3, 8, 8),
    ] {
        let w = WaveletOperator::new(family, levels, m, n).unwrap();
        let f = rng.tensor(m, n, 3);
        let wm = dwt_matrix(m, levels, family);
        let wn = dwt_matrix(n, levels, family);
        let big = kron_axes(Some(&wm), Some(&wn), None, (m, n, 3));
        let c = w.analysis(&f).unwrap();
        assert!(max_abs_diff(c.as_slice(), &matvec(&big, f.as_slice())) < 1e-12);
        let back = matvec(&big.transpose(), c.as_slice());
        assert!(max_abs_diff(w.synthesis(&c).unwrap().as_slice(), &back) < 1e-12);
    }
}

#[test]
fn mode_product_matches_kronecker_on_each_axis() {
    let mut rng = Lcg::new(7);
    let f = rng.tensor(3, 4, 5);
    let a = DMatrix::from_fn(3, 3, |i, j| (i as f64 - 2.0 * j as f64) / 3.0);
    let b = DMatrix::from_fn(4, 4, |i, j| ((i * j) % 3) as f64 - 1.0);
    let c = DMatrix::from_fn(5, 5, |i, j| (i + 2 * j) as f64 * 0.1);
    for (mode, big) in [
        (Mode::Rows, kron_axes(Some(&a), None, None, (3, 4, 5))),
        (Mode::Cols, kron_axes(None, Some(&b), None, (3, 4, 5))),
        (Mode::Frames, kron_axes(None, None, Some(&c), (3, 4, 5))),
    ] {
        let mat = match mode {
            Mode::Rows => &a,
            Mode::Cols => &b,
            Mode::Frames => &c,
        };
        let got = f.mode_product(mat, mode, false).unwrap();
        assert!(max_abs_diff(got.as_slice(), &matvec(&big, f.as_slice())) < 1e-12);
        let got_t = f.mode_product(mat, mode, true).unwrap();
        assert!(max_abs_diff(got_t.as_slice(), &matvec(&big.transpose(), f.as_slice())) < 1e-12);
    }
}

fn tensor_strategy(m: usize, n: usize, f: usize) -> impl Strategy<Value = VideoTensor> {
    prop::collection::vec(-100.0f64..100.0, m * n * f)
        .prop_map(move |v| VideoTensor::from_vec(m, n, f, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_are_linear(
        f in tensor_strategy(8, 8, 6),
        g in tensor_strategy(8, 8, 6),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        bc in 0usize..4,
    ) {
        let bc = BoundaryCondition::all_kinds()[bc];
        let k = KernelSpec::design(5, 4, 1.0).unwrap();
        let grad = GradientOperator::build((8, 8, 6), &k, [bc; 3], [1.0; 3]).unwrap();
        let phi = MeasurementOperator::new(MeasurementKind::GaussianOrthonormal, 8, 8, 1).unwrap();
        let w = WaveletOperator::new(WaveletFamily::Symmlet10, 2, 8, 8).unwrap();
        let mut combo = f.scaled(a);
        combo.axpy(b, &g);
        let scale = 1.0 + f.norm() + g.norm();

        let lhs = grad.apply(&combo).unwrap();
        let mut rhs = grad.apply(&f).unwrap();
        for c in rhs.components_mut() { *c = c.scaled(a); }
        rhs.axpy(b, &grad.apply(&g).unwrap());
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-10 * scale);

        let ops: [&dyn Fn(&VideoTensor) -> VideoTensor; 3] = [
            &|x| phi.measure(x).unwrap(),
            &|x| w.analysis(x).unwrap(),
            &|x| w.synthesis(x).unwrap(),
        ];
        for op in ops {
            let mut want = op(&f).scaled(a);
            want.axpy(b, &op(&g));
            prop_assert!(op(&combo).sub(&want).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn adjoint_identities(f in tensor_strategy(8, 8, 8), g in tensor_strategy(8, 8, 8), bc in 0usize..4) {
        let bc = BoundaryCondition::all_kinds()[bc];
        let k = KernelSpec::design(7, 6, 1.0).unwrap();
        let grad = GradientOperator::build((8, 8, 8), &k, [bc; 3], [1.0; 3]).unwrap();
        let field = GradientField { gx: g.clone(), gy: g.scaled(-0.5), gt: f.scaled(0.25) };
        let lhs = grad.apply(&f).unwrap().dot(&field);
        let rhs = f.dot(&grad.adjoint(&field).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));

        let phi = MeasurementOperator::new(MeasurementKind::WalshHadamard, 8, 8, 0).unwrap();
        let lhs = phi.measure(&f).unwrap().dot(&g);
        let rhs = f.dot(&phi.adjoint(&g).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));

        let w = WaveletOperator::new(WaveletFamily::Symmlet10, 3, 8, 8).unwrap();
        let lhs = w.analysis(&f).unwrap().dot(&g);
        let rhs = f.dot(&w.synthesis(&g).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        prop_assert!(w.synthesis(&w.analysis(&f).unwrap()).unwrap().sub(&f).norm() <= 1e-10 * f.norm().max(1.0));
    }
}
