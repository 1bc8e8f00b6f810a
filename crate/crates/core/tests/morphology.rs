use approx::assert_relative_eq;
use mvam::config::default_design_space;
use mvam::morphology::*;
use nalgebra::Vector2;
use proptest::prelude::*;

fn space(masses: &[f64]) -> DesignSpaceSpec {
    let components = masses
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            ComponentSpec::point_mass(
                format!("c{i}"),
                m,
                Bounds { xmin: -0.3, xmax: 0.3, ymin: -0.1, ymax: 0.1 },
            )
        })
        .collect();
    DesignSpaceSpec::new(
        components,
        BaseStructure { mass: 0.5, com: [0.01, -0.02], inertia: 0.01 },
        Geometry::default(),
    )
}

fn placements(xy: &[(f64, f64)]) -> Vec<Placement> {
    xy.iter().enumerate().map(|(i, &(x, y))| Placement::new(format!("c{i}"), x, y)).collect()
}

fn inputs() -> impl Strategy<Value = (Vec<f64>, Vec<(f64, f64)>)> {
    (1usize..5).prop_flat_map(|n| {
        (
            prop::collection::vec(0.05f64..3.0, n),
            prop::collection::vec((-0.3f64..0.3, -0.1f64..0.1), n),
        )
    })
}

proptest! {
    #[test]
    fn mass_is_additive((masses, xy) in inputs()) {
        let spec = space(&masses);
        let body = aggregate_body_params(&spec, &placements(&xy)).unwrap();
        prop_assert!((body.mass - spec.total_mass()).abs() < 1e-12);
    }

    #[test]
    fn com_stays_in_bounding_box((masses, xy) in inputs()) {
        let spec = space(&masses);
        let body = aggregate_body_params(&spec, &placements(&xy)).unwrap();
        let xs = xy.iter().map(|p| p.0).chain([0.01]);
        let ys = xy.iter().map(|p| p.1).chain([-0.02]);
        let (xlo, xhi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let (ylo, yhi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        prop_assert!(body.cx() >= xlo - 1e-12 && body.cx() <= xhi + 1e-12);
        prop_assert!(body.cy() >= ylo - 1e-12 && body.cy() <= yhi + 1e-12);
    }

    #[test]
    fn translation_moves_com_and_keeps_inertia(
        (masses, xy) in inputs(),
        dx in -0.05f64..0.05,
        dy in -0.05f64..0.05,
    ) {
        let mut spec = space(&masses);
        for c in &mut spec.components {
            c.bounds = Bounds { xmin: -1.0, xmax: 1.0, ymin: -1.0, ymax: 1.0 };
        }
        let a = aggregate_body_params(&spec, &placements(&xy)).unwrap();
        let shifted: Vec<(f64, f64)> = xy.iter().map(|&(x, y)| (x + dx, y + dy)).collect();
        spec.base.com = [spec.base.com[0] + dx, spec.base.com[1] + dy];
        let b = aggregate_body_params(&spec, &placements(&shifted)).unwrap();
        prop_assert!((b.cx() - a.cx() - dx).abs() < 1e-12);
        prop_assert!((b.cy() - a.cy() - dy).abs() < 1e-12);
        prop_assert!((b.inertia_sagittal - a.inertia_sagittal).abs() < 1e-12);
    }

    #[test]
    fn inertia_is_smallest_about_the_com((masses, xy) in inputs(), ox in -0.2f64..0.2, oy in -0.2f64..0.2) {
        let spec = space(&masses);
        let body = aggregate_body_params(&spec, &placements(&xy)).unwrap();
        let o = Vector2::new(ox, oy);
        let about_o: f64 = std::iter::once((spec.base.mass, Vector2::from(spec.base.com), spec.base.inertia))
            .chain(masses.iter().zip(&xy).map(|(&m, &(x, y))| (m, Vector2::new(x, y), 0.0)))
            .map(|(m, p, own)| own + m * (p - o).norm_squared())
            .sum();
        prop_assert!(body.inertia_sagittal <= about_o + 1e-12);
        let parallel_axis = body.inertia_sagittal + body.mass * (body.com_offset - o).norm_squared();
        prop_assert!((parallel_axis - about_o).abs() < 1e-10);
    }

    #[test]
    fn point_mass_reaggregation_matches((masses, xy) in inputs(), extra in 0.0f64..5.0) {
        let spec = space(&masses);
        let body = aggregate_body_params(&spec, &placements(&xy)).unwrap();
        let loaded = body.with_point_mass(extra, Vector2::new(0.05, 0.0));
        let mut spec2 = spec.clone();
        spec2.components.push(ComponentSpec::point_mass("extra", extra.max(1e-300), Bounds::point(0.05, 0.0)));
        let mut p2 = placements(&xy);
        p2.push(Placement::new("extra", 0.05, 0.0));
        if extra > 0.0 {
            let direct = aggregate_body_params(&spec2, &p2).unwrap();
            prop_assert!((direct.inertia_sagittal - loaded.inertia_sagittal).abs() < 1e-10);
            prop_assert!((direct.com_offset - loaded.com_offset).norm() < 1e-12);
        }
    }
}

#[test]
fn default_space_covers_the_stated_ranges() {
    let spec = default_design_space();
    let samples = enumerate_design_space(&spec).unwrap();
    assert_eq!(samples.len(), 250);
    let range = |f: fn(&BodyParams) -> f64| {
        samples.iter().map(|s| f(&s.body)).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let (cx_lo, cx_hi) = range(BodyParams::cx);
    let (cy_lo, cy_hi) = range(BodyParams::cy);
    let (ib_lo, ib_hi) = range(|b| b.inertia_sagittal);
    assert_relative_eq!(cx_lo, -0.1, epsilon = 1e-12);
    assert_relative_eq!(cx_hi, 0.1, epsilon = 1e-12);
    assert_relative_eq!(cy_lo, -0.05, epsilon = 1e-12);
    assert_relative_eq!(cy_hi, 0.05, epsilon = 1e-12);
    assert!(ib_lo >= 0.05 - 1e-9 && ib_hi <= 0.3, "{ib_lo} {ib_hi}");
    for s in &samples {
        assert_relative_eq!(s.body.mass, 4.3, epsilon = 1e-12);
    }
}

#[test]
fn grid_indices_match_enumeration() {
    let spec = default_design_space();
    let samples = enumerate_design_space(&spec).unwrap();
    for s in samples.iter().step_by(7) {
        let idx = grid_indices(&spec, s.id);
        let x0 = -0.2 + 0.4 * idx[0].0 as f64 / 9.0;
        assert_relative_eq!(s.placements[0].position.x, x0, epsilon = 1e-12);
        let y1 = -0.2 + 0.4 * idx[1].1 as f64 / 4.0;
        assert_relative_eq!(s.placements[1].position.y, y1, epsilon = 1e-12);
    }
}

#[test]
fn sample_cap_is_enforced() {
    let mut spec = default_design_space();
    spec.sample_cap = 100;
    assert_eq!(
        enumerate_design_space(&spec).unwrap_err(),
        MorphologyError::SpaceTooLarge { count: 250, cap: 100 }
    );
}
