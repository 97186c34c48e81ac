mod common;

mod designed {
    use tlf::denoise::*;
    use tlf::{ImageTensor, Shape};
    use tlf::rng::{add_gaussian_noise, Lcg64};

    fn noisy16() -> ImageTensor {
        let s = Shape::new(16, 16, 1);
        let clean = ImageTensor::from_fn(s, |i, j, _| if i < 8 && j > 4 { 0.8 } else { 0.2 });
        add_gaussian_noise(&clean, 10.0, 7)
    }

    #[test]
    fn tv_of_constant_is_zero() {
        assert_eq!(total_variation(&ImageTensor::filled(Shape::new(4, 5, 2), 0.3)), 0.0);
        let step = ImageTensor::from_fn(Shape::new(2, 4, 1), |_, j, _| if j < 2 { 0.0 } else { 1.0 });
        // two jumps per row, circularly
        assert!((total_variation(&step) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn tv_rof_reduces_tv() {
        let x = noisy16();
        let y = tv_rof(&x, 0.05).unwrap();
        assert!(total_variation(&y) <= total_variation(&x));
    }

    #[test]
    fn smoothers_preserve_constants() {
        let c = ImageTensor::filled(Shape::new(8, 12, 3), 0.37);
        for out in [gaussian(&c, 1.3), recursive_filter(&c, 2.0), median(&c, 2)] {
            assert!(out.distance(&c).unwrap() < 1e-12);
        }
    }

    #[test]
    fn median_removes_isolated_spike() {
        let mut x = ImageTensor::filled(Shape::new(5, 5, 1), 0.1);
        x.set(2, 2, 0, 1.0);
        assert_eq!(median(&x, 1), ImageTensor::filled(x.shape(), 0.1));
    }

    #[test]
    fn shrink_levels_follow_divisibility() {
        let mut rng = Lcg64::new(3);
        assert_eq!(shrink_levels(&rng.uniform_tensor(Shape::new(16, 16, 1), 0.0, 1.0)), 3);
        assert_eq!(shrink_levels(&rng.uniform_tensor(Shape::new(12, 16, 1), 0.0, 1.0)), 2);
        assert_eq!(shrink_levels(&rng.uniform_tensor(Shape::new(5, 16, 1), 0.0, 1.0)), 0);
    }
}

mod external {
    use tlf::denoise::*;
    use tlf::{Error, ImageTensor};

    #[test]
    fn empty_command_rejected() {
        assert!(ExternalCommand::parse("   ").is_err());
        let c = ExternalCommand::parse("denoiser --sigma 0.1").unwrap();
        assert_eq!(c.program, "denoiser");
        assert_eq!(c.args, vec!["--sigma", "0.1"]);
    }

    #[test]
    fn missing_program_is_a_denoiser_error() {
        let cmd = ExternalCommand::parse("/nonexistent/tlf-denoiser").unwrap();
        let x = ImageTensor::zeros(tlf::tensor::Shape::new(2, 2, 1));
        assert!(matches!(external_roundtrip(&cmd, &x, 0.1), Err(Error::Denoiser(_))));
    }

    fn double(mode: &str) -> ExternalCommand {
        ExternalCommand::parse(&format!("{} {mode}", super::common::double())).unwrap()
    }

    #[test]
    fn reply_values_come_back_through_f32() {
        let x = ImageTensor::from_fn(tlf::Shape::new(3, 4, 1), |i, j, _| (i * 4 + j) as f64 / 16.0);
        let y = external_roundtrip(&double("add 0.25"), &x, 0.1).unwrap();
        for (a, b) in y.as_slice().iter().zip(x.as_slice()) {
            assert_eq!(*a, (*b as f32 + 0.25f32) as f64);
        }
    }

    #[test]
    fn slow_child_is_killed_at_the_timeout() {
        let x = ImageTensor::zeros(tlf::Shape::new(2, 2, 1));
        let cmd = double("sleep 5").with_timeout(std::time::Duration::from_millis(200));
        let start = std::time::Instant::now();
        let err = external_roundtrip(&cmd, &x, 0.1).unwrap_err();
        assert!(matches!(err, Error::Denoiser(_)));
        assert_eq!(err.exit_code(), 3);
        assert!(start.elapsed() < std::time::Duration::from_secs(4));
        let quick = double("sleep 0.05").with_timeout(std::time::Duration::from_secs(10));
        assert_eq!(external_roundtrip(&quick, &x, 0.1).unwrap(), x);
    }

    #[test]
    fn nonzero_exit_is_reported() {
        let x = ImageTensor::zeros(tlf::Shape::new(2, 2, 1));
        let err = external_roundtrip(&double("exit 7"), &x, 0.1).unwrap_err();
        assert!(matches!(err, Error::Denoiser(_)));
    }

    #[test]
    fn spec_routes_through_the_child() {
        let x = ImageTensor::filled(tlf::Shape::new(2, 3, 1), 0.5);
        let spec = DenoiserSpec::external(double("add 0.125"), 0.2).unwrap();
        assert_eq!(denoise(&spec, &x, 0).unwrap(), ImageTensor::filled(x.shape(), 0.625));
    }
}

mod denoise {
    use tlf::denoise::*;
    use tlf::Shape;
    use tlf::rng::Lcg64;

    #[test]
    fn parse_and_display() {
        let d: DenoiserSpec = "tv-rof:0.05".parse().unwrap();
        assert_eq!(d.kind(), &DenoiserKind::TvRof);
        assert_eq!(d.strength(), 0.05);
        assert_eq!(d.to_string(), "tv-rof:0.05");

        let s: DenoiserSpec = "gaussian:2,1,0.5".parse().unwrap();
        assert_eq!(s.strength_at(0), 2.0);
        assert_eq!(s.strength_at(2), 0.5);
        assert_eq!(s.strength_at(99), 0.5);
        assert_eq!(s.to_string().parse::<DenoiserSpec>().unwrap(), s);

        let e: DenoiserSpec = "external:@0.1 my-denoiser --fast".parse().unwrap();
        let DenoiserKind::External(cmd) = e.kind() else { panic!() };
        assert_eq!(cmd.program, "my-denoiser");
        assert_eq!(e.strength() as f32, 0.1);
        assert_eq!(e.to_string().parse::<DenoiserSpec>().unwrap(), e);

        for bad in ["blur:1", "gaussian", "gaussian:-1", "gaussian:x", "external:", "external:@0.1"] {
            assert!(bad.parse::<DenoiserSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn zero_strength_is_identity_for_every_kind() {
        let x = Lcg64::new(9).uniform_tensor(Shape::new(8, 8, 1), 0.0, 1.0);
        let kinds = [
            DenoiserKind::TvRof,
            DenoiserKind::RecursiveFilter,
            DenoiserKind::Gaussian,
            DenoiserKind::Median,
            DenoiserKind::WaveletShrink,
            DenoiserKind::External(ExternalCommand::parse("/nonexistent").unwrap()),
        ];
        for k in kinds {
            let spec = DenoiserSpec::new(k, 0.0).unwrap();
            assert_eq!(denoise(&spec, &x, 3).unwrap(), x);
        }
    }
}

mod protocol {
    use tlf::denoise::protocol::*;
    use tlf::{ImageTensor, Shape};
    use proptest::prelude::*;

    #[test]
    fn request_layout_is_bit_exact() {
        let x = ImageTensor::from_vec(Shape::new(1, 2, 1), vec![0.5, -1.0]).unwrap();
        let bytes = encode_request(&x, 0.25);
        let mut expected = b"TLF1".to_vec();
        expected.extend_from_slice(&[1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0]);
        expected.extend_from_slice(&0.25f32.to_le_bytes());
        expected.extend_from_slice(&0.5f32.to_le_bytes());
        expected.extend_from_slice(&(-1.0f32).to_le_bytes());
        assert_eq!(bytes, expected);
    }

    #[test]
    fn reply_errors() {
        let x = ImageTensor::zeros(Shape::new(2, 2, 1));
        let good = encode_reply(&x);
        assert_eq!(decode_reply(&good, x.shape()).unwrap(), x);
        assert!(decode_reply(&good, Shape::new(2, 2, 3)).is_err());
        assert!(decode_reply(&good[..good.len() - 1], x.shape()).is_err());
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(decode_reply(&bad, x.shape()).is_err());
        assert!(decode_reply(b"TLF", x.shape()).is_err());
        let mut nan = good;
        let at = nan.len() - 4;
        nan[at..].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(decode_reply(&nan, x.shape()).is_err());
    }

    proptest! {
        #[test]
        fn f32_values_roundtrip(vals in proptest::collection::vec(-1e3f32..1e3, 6), hint in 0f32..1.0) {
            let x = ImageTensor::from_vec(Shape::new(2, 1, 3), vals.iter().map(|&v| v as f64).collect()).unwrap();
            let req = decode_request(&encode_request(&x, hint as f64)).unwrap();
            prop_assert_eq!(req.hint, hint);
            prop_assert_eq!(&req.image, &x);
            prop_assert_eq!(decode_reply(&encode_reply(&x), x.shape()).unwrap(), x);
        }
    }
}
