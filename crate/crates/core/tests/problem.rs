mod problem {
    use tlf::operator::LinearOperator;
    use tlf::problem::*;
    use tlf::prox::Exponent;
    use tlf::{ImageTensor, Shape};

    fn pixel(v: f64) -> ImageTensor {
        ImageTensor::filled(Shape::new(1, 1, 1), v)
    }

    fn scalar_problem(b: f64, weight: f64) -> CompositeProblem {
        let s = Shape::new(1, 1, 1);
        CompositeProblem::new(
            LinearOperator::identity(s),
            pixel(b),
            Regularizer::new(Exponent::One, weight).unwrap(),
            1.0,
            VariableSpace::Image,
        )
        .unwrap()
    }

    #[test]
    fn objective_by_hand() {
        let p = scalar_problem(0.0, 1.0);
        assert_eq!(p.objective(&pixel(2.0)).unwrap(), 4.0);
        let q = scalar_problem(0.7, 0.0);
        assert_eq!(q.objective(&pixel(0.7)).unwrap(), 0.0);
    }

    #[test]
    fn pg_step_by_hand() {
        let p = scalar_problem(0.0, 1.0);
        assert_eq!(p.pg_step(&pixel(1.0), 0.5).unwrap().as_slice(), &[0.0]);
    }

    #[test]
    fn pg_fixed_point_when_gradient_vanishes() {
        let p = scalar_problem(0.3, 0.0);
        assert_eq!(p.pg_step(&pixel(0.3), 0.9).unwrap(), pixel(0.3));
    }

    #[test]
    fn step_range_enforced() {
        let p = scalar_problem(0.0, 1.0);
        assert!(p.pg_step(&pixel(1.0), 1.0).is_err());
        assert!(p.pg_step(&pixel(1.0), 0.0).is_err());
        assert!(p.pg_step(&pixel(1.0), -0.1).is_err());
    }

    #[test]
    fn problem_validation() {
        let s = Shape::new(2, 2, 1);
        let reg = Regularizer::new(Exponent::One, 0.1).unwrap();
        assert!(CompositeProblem::new(
            LinearOperator::identity(s),
            ImageTensor::zeros(s),
            reg,
            0.0,
            VariableSpace::Image
        )
        .is_err());
        assert!(CompositeProblem::new(
            LinearOperator::identity(s),
            ImageTensor::zeros(Shape::new(2, 3, 1)),
            reg,
            1.0,
            VariableSpace::Image
        )
        .is_err());
        assert!(Regularizer::new(Exponent::Half, -1.0).is_err());
    }

    #[test]
    fn params_validation() {
        let ok = SolverParams::for_lipschitz(2.0);
        assert!(ok.validate(2.0).is_ok());
        assert!(ok.validate(2.5).is_err());
        assert!(SolverParams { gamma: 1.0, ..ok }.validate(2.0).is_err());
        assert!(SolverParams { beta: 0.0, ..ok }.validate(2.0).is_err());
        assert!(SolverParams { c: 0.0, ..ok }.validate(2.0).is_err());
        assert!(SolverParams { max_iters: 0, ..ok }.validate(2.0).is_err());
        assert!(SolverParams { alpha0: 0.0, ..ok }.validate(2.0).is_ok());
    }
}

mod baseline {
    use tlf::baseline::*;
    use tlf::{ImageTensor, Shape};
    use tlf::kernel::BlurKernel;
    use tlf::operator::LinearOperator;
    use tlf::problem::{CompositeProblem, Regularizer, SolverParams, VariableSpace};
    use tlf::prox::Exponent;
    use tlf::rng::Lcg64;

    fn least_squares(b: &ImageTensor) -> CompositeProblem {
        CompositeProblem::new(
            LinearOperator::identity(b.shape()),
            b.clone(),
            Regularizer::new(Exponent::One, 0.0).unwrap(),
            1.0,
            VariableSpace::Image,
        )
        .unwrap()
    }

    #[test]
    fn all_baselines_solve_least_squares_quickly() {
        let b = Lcg64::new(5).uniform_tensor(Shape::new(8, 8, 1), 0.0, 1.0);
        let prob = least_squares(&b);
        let params = SolverParams {
            step: 1.0 - 1e-12,
            rel_tol: 1e-10,
            ..SolverParams::default()
        };
        let x0 = ImageTensor::zeros(b.shape());
        for m in [Baseline::Pg, Baseline::Apg, Baseline::Mapg] {
            let sol = solve_baseline(&prob, m, &params, &x0, None).unwrap();
            assert!(sol.trace.len() <= 3, "{m:?} took {} iterations", sol.trace.len());
            assert!(sol.trace.last().unwrap().rel_err < 1e-10);
            assert!(sol.x.distance(&b).unwrap() < 1e-10);
        }
    }

    #[test]
    fn pg_matches_repeated_pg_step() {
        let s = Shape::new(16, 16, 1);
        let mut rng = Lcg64::new(11);
        let b = rng.uniform_tensor(s, 0.0, 1.0);
        let op = LinearOperator::convolution(BlurKernel::gaussian(5, 1.0).unwrap(), s).unwrap();
        let prob = CompositeProblem::new(
            op,
            b,
            Regularizer::new(Exponent::Half, 0.01).unwrap(),
            1.0,
            VariableSpace::Image,
        )
        .unwrap();
        let params = SolverParams {
            max_iters: 15,
            rel_tol: 0.0,
            ..SolverParams::for_lipschitz(1.0)
        };
        let x0 = ImageTensor::zeros(s);
        let sol = solve_baseline(&prob, Baseline::Pg, &params, &x0, None).unwrap();
        let mut x = x0;
        for _ in 0..15 {
            x = prob.pg_step(&x, params.step).unwrap();
        }
        assert_eq!(sol.x, x);
    }

    #[test]
    fn mapg_is_monotone_on_nonconvex_instance() {
        let s = Shape::new(16, 16, 1);
        let mut rng = Lcg64::new(21);
        let b = rng.uniform_tensor(s, 0.0, 1.0);
        let op = LinearOperator::convolution(BlurKernel::gaussian(5, 1.2).unwrap(), s).unwrap();
        let lip = op.spectral_norm_sq().unwrap();
        let prob = CompositeProblem::new(
            op,
            b,
            Regularizer::new(Exponent::Half, 0.02).unwrap(),
            lip,
            VariableSpace::Image,
        )
        .unwrap();
        let params = SolverParams {
            max_iters: 100,
            rel_tol: 0.0,
            ..SolverParams::for_lipschitz(lip)
        };
        let sol = solve_baseline(&prob, Baseline::Mapg, &params, &rng.uniform_tensor(s, 0.0, 1.0), None)
            .unwrap();
        let f = sol.trace.objectives();
        for w in f.windows(2) {
            assert!(w[1] <= w[0], "{} -> {}", w[0], w[1]);
        }
    }
}

mod trace {
    use tlf::trace::*;
    

    #[test]
    fn csv_schema() {
        let mut t = IterateTrace::new(Method::Tlf, 3.0);
        t.records.push(IterateRecord {
            k: 0,
            objective: 2.5,
            rel_err: 0.1,
            norm_xf_x: 0.2,
            norm_xg_x: Some(0.3),
            norm_xgmu_x: None,
            alpha: Some(0.9),
            mu: None,
            mdus: MdusBranch::AcceptedV,
            bus: BusBranch::NotApplicable,
            psnr: None,
        });
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("0,2.5,0.1,0.2,0.3,,0.9,,accepted-v,not-applicable,"));
        assert_eq!(t.objectives(), vec![3.0, 2.5]);
    }

    #[test]
    fn method_tags_roundtrip() {
        for m in [Method::Pg, Method::NiApg, Method::ApgNc, Method::Dtlf] {
            assert_eq!(Method::from_tag(m.tag()), Some(m));
        }
        assert_eq!(Method::from_tag("fista"), None);
    }

    #[test]
    fn relative_change_edge_cases() {
        assert_eq!(relative_change(0.0, 0.0), 0.0);
        assert!(relative_change(1.0, 0.0).is_infinite());
        assert_eq!(relative_change(1.0, 4.0), 0.25);
    }
}
