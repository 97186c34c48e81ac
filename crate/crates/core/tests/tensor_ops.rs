mod tensor {
    
    use tlf::{Error, ImageTensor, Shape};

    #[test]
    fn from_vec_checks_length_and_finiteness() {
        let s = Shape::new(2, 2, 1);
        assert!(ImageTensor::from_vec(s, vec![0.0; 3]).is_err());
        assert!(ImageTensor::from_vec(s, vec![0.0, 1.0, f64::NAN, 2.0]).is_err());
        assert!(ImageTensor::from_vec(Shape::new(0, 2, 1), vec![]).is_err());
        let t = ImageTensor::from_vec(s, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.get(1, 0, 0), 3.0);
    }

    #[test]
    fn channel_planar_layout() {
        let t = ImageTensor::from_fn(Shape::new(2, 3, 2), |i, j, c| (100 * c + 10 * i + j) as f64);
        assert_eq!(t.plane(1)[0], 100.0);
        assert_eq!(t.as_slice()[4], 11.0);
        assert_eq!(t.get(1, 2, 1), 112.0);
    }

    #[test]
    fn arithmetic_rejects_mismatched_shapes() {
        let a = ImageTensor::zeros(Shape::new(2, 2, 1));
        let b = ImageTensor::zeros(Shape::new(2, 3, 1));
        assert!(matches!(a.add(&b), Err(Error::ShapeMismatch { .. })));
    }
}

mod kernel {
    use tlf::kernel::*;
    

    #[test]
    fn gaussian_is_normalized_and_symmetric() {
        let k = BlurKernel::gaussian(9, 1.5).unwrap();
        assert!(k.is_normalized());
        assert_eq!(k.tap(0, 3), k.tap(3, 0));
        assert_eq!(k.tap(1, 2), k.tap(7, 6));
        assert!(k.tap(4, 4) > k.tap(4, 5));
    }

    #[test]
    fn even_sizes_rejected() {
        assert!(BlurKernel::new(2, 3, vec![1.0; 6]).is_err());
        assert!(BlurKernel::new(3, 3, vec![1.0; 8]).is_err());
        assert!(BlurKernel::new(3, 3, vec![0.0; 9]).is_err());
    }

    #[test]
    fn unnormalized_keeps_taps() {
        let k = BlurKernel::unnormalized(1, 1, vec![2.0]).unwrap();
        assert_eq!(k.taps(), &[2.0]);
        assert!(!k.is_normalized());
    }

    #[test]
    fn motion_kernel_is_a_normalized_line() {
        let k = BlurKernel::motion(7, 0.0).unwrap();
        assert!(k.is_normalized());
        for j in 0..7 {
            assert!(k.tap(3, j) > 0.0);
            assert_eq!(k.tap(0, j), 0.0);
        }
    }
}

mod operator {
    use rustfft::num_complex::Complex64;
    use tlf::kernel::BlurKernel;
    use tlf::operator::*;
    use tlf::rng::Lcg64;
    use tlf::{Error, ImageTensor, Shape};

    fn shape(h: usize, w: usize) -> Shape {
        Shape::new(h, w, 1)
    }

    fn random(shape: Shape, seed: u64) -> ImageTensor {
        Lcg64::new(seed).uniform_tensor(shape, -1.0, 1.0)
    }

    #[test]
    fn identity_and_all_ones_mask_are_identity() {
        let s = shape(6, 5);
        let x = random(s, 1);
        assert_eq!(LinearOperator::identity(s).apply(&x).unwrap(), x);
        let m = LinearOperator::mask(ImageTensor::filled(s, 1.0)).unwrap();
        assert_eq!(m.apply(&x).unwrap(), x);
        assert_eq!(m.adjoint(&x).unwrap(), m.apply(&x).unwrap());
    }

    #[test]
    fn averaging_kernel_preserves_constants() {
        let s = shape(8, 8);
        let k = BlurKernel::new(3, 3, vec![1.0; 9]).unwrap();
        let op = LinearOperator::convolution(k, s).unwrap();
        let y = op.apply(&ImageTensor::filled(s, 0.7)).unwrap();
        assert!(y.as_slice().iter().all(|v| (v - 0.7).abs() < 1e-14));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let op = LinearOperator::identity(shape(4, 4));
        let x = ImageTensor::zeros(shape(4, 5));
        assert!(matches!(op.apply(&x), Err(Error::ShapeMismatch { .. })));
        assert!(op.adjoint(&x).is_err());
    }

    #[test]
    fn non_binary_mask_rejected() {
        let mut m = ImageTensor::filled(shape(2, 2), 1.0);
        m[3] = 0.5;
        assert!(LinearOperator::mask(m).is_err());
    }

    #[test]
    fn oversized_kernel_rejected() {
        let k = BlurKernel::gaussian(9, 1.5).unwrap();
        assert!(LinearOperator::convolution(k, shape(8, 16)).is_err());
    }

    #[test]
    fn gradient_adjoint_is_negative_divergence() {
        let s = shape(4, 4);
        let mut y = ImageTensor::zeros(s);
        y.set(1, 1, 0, 1.0);
        let gt = LinearOperator::gradient_h(s).adjoint(&y).unwrap();
        assert_eq!(gt.get(1, 1, 0), -1.0);
        assert_eq!(gt.get(1, 2, 0), 1.0);
        assert_eq!(gt.norm_sq(), 2.0);
    }

    #[test]
    fn power_iteration_on_scaled_identity() {
        let s = shape(8, 8);
        assert!((estimate_lipschitz(&LinearOperator::identity(s), 5).unwrap() - 1.0).abs() < 1e-12);
        let k = BlurKernel::unnormalized(1, 1, vec![2.0]).unwrap();
        let op = LinearOperator::convolution(k, s).unwrap();
        assert!((estimate_lipschitz(&op, 5).unwrap() - 4.0).abs() < 1e-12);
        assert!(estimate_lipschitz(&op, 0).is_err());
    }

    #[test]
    fn zero_operator_has_zero_norm() {
        let s = shape(4, 4);
        let op = LinearOperator::mask(ImageTensor::zeros(s)).unwrap();
        assert_eq!(estimate_lipschitz(&op, 10).unwrap(), 0.0);
    }

    #[test]
    fn gradient_spectrum_matches_analytic_symbol() {
        let s = shape(4, 8);
        let spec = LinearOperator::gradient_h(s).circulant_spectrum().unwrap();
        for (l, s) in spec.iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * l as f64 / 8.0;
            let expected = Complex64::new(theta.cos() - 1.0, theta.sin());
            assert!((s - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn mask_and_wavelet_are_not_circulant() {
        let s = shape(8, 8);
        assert!(!LinearOperator::mask(ImageTensor::filled(s, 1.0)).unwrap().is_circulant());
        let comp = LinearOperator::compose(vec![
            LinearOperator::wavelet_inverse(2, s).unwrap(),
            LinearOperator::identity(s),
        ])
        .unwrap();
        assert!(!comp.is_circulant());
        assert_eq!(LinearOperator::identity(s).spectral_norm_sq(), Some(1.0));
    }
}

mod wavelet {
    use tlf::wavelet::*;
    use tlf::{Error, ImageTensor, Shape};

    fn pseudo_random(shape: Shape, seed: u64) -> ImageTensor {
        let mut s = seed;
        ImageTensor::from_fn(shape, |_, _, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
    }

    #[test]
    fn constant_image_has_no_detail() {
        let c = 0.3;
        let levels = 3;
        let x = ImageTensor::filled(Shape::new(16, 16, 1), c);
        let w = wavelet_forward(&x, levels).unwrap();
        let approx = 16 >> levels;
        for i in 0..16 {
            for j in 0..16 {
                let v = w.get(i, j, 0);
                if i < approx && j < approx {
                    assert!((v - c * 8.0).abs() < 1e-12, "approx {v}");
                } else {
                    assert_eq!(v, 0.0, "detail at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn parseval_and_roundtrip() {
        let x = pseudo_random(Shape::new(32, 16, 3), 7);
        let w = wavelet_forward(&x, 3).unwrap();
        let rel = (w.norm_sq() - x.norm_sq()).abs() / x.norm_sq();
        assert!(rel < 1e-10);
        let back = wavelet_inverse(&w, 3).unwrap();
        assert!(back.distance(&x).unwrap() / x.norm() < 1e-10);
    }

    #[test]
    fn divisibility_enforced() {
        let x = ImageTensor::zeros(Shape::new(12, 16, 1));
        assert!(matches!(wavelet_forward(&x, 3), Err(Error::InvalidShape(_))));
        assert!(wavelet_forward(&x, 2).is_ok());
    }

    #[test]
    fn zero_levels_is_identity() {
        let x = pseudo_random(Shape::new(5, 3, 1), 3);
        assert_eq!(wavelet_forward(&x, 0).unwrap(), x);
    }
}

mod rng {
    use tlf::rng::*;
    use tlf::{ImageTensor, Shape};

    const MULTIPLIER: u64 = 6364136223846793005;
    const INCREMENT: u64 = 1442695040888963407;

    #[test]
    fn first_outputs_follow_the_recurrence() {
        let mut rng = Lcg64::new(0);
        assert_eq!(rng.next_u64(), INCREMENT);
        assert_eq!(
            rng.next_u64(),
            INCREMENT.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT)
        );
    }

    #[test]
    fn normals_have_unit_variance() {
        let mut rng = Lcg64::new(42);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn same_seed_same_noise() {
        let x = ImageTensor::filled(Shape::new(4, 4, 1), 0.5);
        assert_eq!(add_gaussian_noise(&x, 1.0, 9), add_gaussian_noise(&x, 1.0, 9));
        assert_ne!(add_gaussian_noise(&x, 1.0, 9), add_gaussian_noise(&x, 1.0, 10));
    }
}
