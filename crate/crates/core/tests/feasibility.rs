mod feasibility {
    use tlf::feasibility::*;
    use tlf::{Error, ImageTensor, Shape};
    use tlf::kernel::BlurKernel;
    use tlf::operator::LinearOperator;
    use tlf::prox::Exponent;
    use tlf::rng::Lcg64;

    fn s16() -> Shape {
        Shape::new(16, 16, 1)
    }

    #[test]
    fn zero_tv_weight_with_identity_returns_observation() {
        let b = Lcg64::new(1).uniform_tensor(s16(), 0.0, 1.0);
        let x0 = Lcg64::new(2).uniform_tensor(s16(), 0.0, 1.0);
        let m = FeasibilityModel::new(LinearOperator::identity(s16()), b.clone(), 0.0, Exponent::One)
            .unwrap();
        let x = solve_g(&m, &x0).unwrap();
        assert!(x.distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn constant_observation_is_a_fixed_point() {
        let b = ImageTensor::filled(s16(), 0.4);
        let m = FeasibilityModel::new(LinearOperator::identity(s16()), b.clone(), 0.1, Exponent::One)
            .unwrap();
        let x = solve_g(&m, &b).unwrap();
        assert!(x.as_slice().iter().all(|v| (v - 0.4).abs() < 1e-12));
    }

    #[test]
    fn fft_rejected_for_mask() {
        let m = FeasibilityModel::new(
            LinearOperator::mask(ImageTensor::filled(s16(), 1.0)).unwrap(),
            ImageTensor::zeros(s16()),
            0.1,
            Exponent::One,
        )
        .unwrap();
        assert_eq!(m.x_solver(), XSolver::Cg);
        assert!(matches!(m.with_x_solver(XSolver::Fft), Err(Error::Config(_))));
    }

    #[test]
    fn anchor_contracts() {
        let b = ImageTensor::zeros(s16());
        let m = FeasibilityModel::new(LinearOperator::identity(s16()), b.clone(), 0.1, Exponent::One)
            .unwrap();
        assert!(solve_g_mu(&m, &b).is_err());
        let with_zero = m.clone().with_anchor(b.clone(), 0.0).unwrap();
        assert!(solve_g_mu(&with_zero, &b).is_err());
        assert!(solve_g(&with_zero, &b).is_err());
    }

    #[test]
    fn huge_mu_returns_anchor() {
        let mut rng = Lcg64::new(8);
        let b = rng.uniform_tensor(s16(), 0.0, 1.0);
        let anchor = rng.uniform_tensor(s16(), 0.0, 1.0);
        let k = BlurKernel::gaussian(5, 1.0).unwrap();
        let m = FeasibilityModel::new(
            LinearOperator::convolution(k, s16()).unwrap(),
            b.clone(),
            0.05,
            Exponent::One,
        )
        .unwrap()
        .with_anchor(anchor.clone(), 1e8)
        .unwrap();
        let x = solve_g_mu(&m, &b).unwrap();
        assert!(x.distance(&anchor).unwrap() / anchor.norm() < 1e-4);
    }

    #[test]
    fn cg_reports_non_convergence() {
        let b = Lcg64::new(4).uniform_tensor(s16(), 0.0, 1.0);
        let m = FeasibilityModel::new(
            LinearOperator::mask(Lcg64::new(5).uniform_tensor(s16(), 0.0, 1.0).map(f64::round)).unwrap(),
            b.clone(),
            0.1,
            Exponent::One,
        )
        .unwrap()
        .with_cg(1e-12, 2)
        .unwrap();
        match solve_g(&m, &b) {
            Err(Error::NotConverged { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-12);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn z_initialization_does_not_matter() {
        // z is always recomputed from x first, so two runs from the same
        // x_init are bit-identical.
        let b = Lcg64::new(6).uniform_tensor(s16(), 0.0, 1.0);
        let m = FeasibilityModel::new(LinearOperator::identity(s16()), b.clone(), 0.1, Exponent::Half)
            .unwrap();
        assert_eq!(solve_g(&m, &b).unwrap(), solve_g(&m, &b).unwrap());
    }
}
