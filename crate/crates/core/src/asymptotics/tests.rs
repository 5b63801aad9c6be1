use super::chiral::{chiral_asymptotic_field, AsymptoticSpace};
use super::fields::*;
use super::kernel::*;
use super::states::*;
use crate::fock::{field_operator, ladder_matrices, TestFunction};
use crate::linalg::{basis_vector, op_norm, phase, real, Mat, Vector, C64};
use crate::net::{ChiralGenerator, SpacetimePoint, Translate, TwoDNet, Wedge, WedgeElement};

fn default_net() -> TwoDNet {
    TwoDNet::symmetric(1.0, 3, 2, Some(4.0)).unwrap()
}

fn gauss(net: &TwoDNet, c: f64) -> TestFunction {
    TestFunction::gaussian(net.net1.grid(), c, 0.5, 1.0).unwrap()
}

/// `A₁ ⊗ (c + φ₂(g))` in `W`.
fn right_element(net: &TwoDNet, c1: f64, offset: f64, c2: f64) -> WedgeElement {
    WedgeElement::product(
        net,
        ChiralGenerator::field(gauss(net, c1)),
        ChiralGenerator::affine(real(offset), gauss(net, c2)),
        Wedge::Right,
    )
    .unwrap()
}

fn left_element(net: &TwoDNet, c1: f64, offset: f64, c2: f64) -> WedgeElement {
    WedgeElement::product(
        net,
        ChiralGenerator::affine(real(offset), gauss(net, c1)),
        ChiralGenerator::field(gauss(net, c2)),
        Wedge::Left,
    )
    .unwrap()
}

#[test]
fn smearing_identity_is_identity() {
    let net = default_net();
    let k = AveragingKernel::gaussian(0.5, 16.0).unwrap();
    let s = smear_along_ray(
        &net,
        &net.identity(),
        &k,
        RaySign::Plus,
        &QuadratureSettings::default(),
    )
    .unwrap();
    assert!((s.operator - net.identity()).norm() < 1e-13);
}

#[test]
fn net_one_operators_are_invariant_along_plus_ray() {
    let net = default_net();
    let a = net.lift1(
        &field_operator(&net.net1, &gauss(&net, -2.0))
            .unwrap()
            .matrix,
    );
    let k = AveragingKernel::gaussian(0.5, 8.0).unwrap();
    let s = smear_along_ray(&net, &a, &k, RaySign::Plus, &QuadratureSettings::default()).unwrap();
    assert!((s.operator - &a).norm() < 1e-13);
}

#[test]
fn vacuum_component_of_minus_smearing_follows_gaussian_transform() {
    let net = default_net();
    let (a, ad) = ladder_matrices(&net.net1, 0).unwrap();
    let f = net.lift1(&(a.matrix + ad.matrix));
    let k = AveragingKernel::gaussian(0.5, 16.0).unwrap();
    let s = smear_along_ray(&net, &f, &k, RaySign::Minus, &QuadratureSettings::default()).unwrap();
    let v = (&s.operator * net.vacuum()).norm();
    // ĥ(√2·4) = e^{−16}
    let oracle = (-16.0f64).exp();
    assert!((v - oracle).abs() < 1e-13, "{v:e} vs {oracle:e}");
    assert!((oracle - 1.125e-7).abs() < 1e-9);
}

#[test]
fn smearing_matches_closed_form_entrywise() {
    let net = default_net();
    let f = right_element(&net, -2.0, 0.5, 3.0).operator;
    let q = QuadratureSettings::default();
    for &t in &[8.0, -32.0] {
        let k = AveragingKernel::gaussian(0.5, t).unwrap();
        let s = smear_along_ray(&net, &f, &k, RaySign::Plus, &q).unwrap();
        let oracle = Mat::from_fn(net.dim(), net.dim(), |m, n| {
            let w = (net.energy(m) - net.energy(n)) - (net.momentum(m) - net.momentum(n));
            f[(m, n)] * phase(w * t) * (-0.5 * (k.width() * w).powi(2)).exp()
        });
        assert!((&s.operator - &oracle).norm() <= s.error_bound.max(1e-13));
        assert!(op_norm(&s.operator) <= op_norm(&f) * (1.0 + 1e-12));
    }
}

#[test]
fn ergodic_residual_obeys_spectral_bound() {
    let net = default_net();
    let f = right_element(&net, -2.0, 0.7, 2.5).operator;
    let fo = &f * net.vacuum();
    let target = net.pplus() * &fo;
    let transverse = (&fo - &target).norm();
    let q = QuadratureSettings::default();
    let mut residuals = Vec::new();
    for &t in &[8.0, 16.0, 32.0, 64.0] {
        let k = AveragingKernel::gaussian(0.5, t).unwrap();
        let s = smear_along_ray(&net, &f, &k, RaySign::Plus, &q).unwrap();
        let r = (&s.operator * net.vacuum() - &target).norm();
        // smallest nonzero frequency √2 dominates the bound
        let bound = transverse * (-0.5 * (k.width() * std::f64::consts::SQRT_2).powi(2)).exp();
        assert!(
            r <= bound + s.error_bound + 1e-15,
            "T={t}: {r:e} > {bound:e}"
        );
        residuals.push(r);
    }
    assert!(residuals[3] <= 1e-3);
    assert!(residuals[3] <= 0.2 * residuals[1]);
}

#[test]
fn identity_field_has_zero_residual() {
    let net = default_net();
    let one = WedgeElement::identity(&net, Wedge::Right);
    let r = asymptotic_field(
        &net,
        &one,
        AsymptoticKind::OutPlus,
        &LimitSettings::default(),
    )
    .unwrap();
    assert!((r.operator - net.identity()).norm() < 1e-13);
    assert!(r.trace.final_residual < 1e-12);
    assert!(r.trace.monotone);
}

#[test]
fn chiral_factorization_of_out_field() {
    let net = default_net();
    let settings = LimitSettings::default();
    for (c1, off, c2) in [(-2.0, 0.5, 2.5), (-3.0, 1.5, 2.0), (-2.5, 0.0, 3.0)] {
        let el = right_element(&net, c1, off, c2);
        let r = asymptotic_field(&net, &el, AsymptoticKind::OutPlus, &settings).unwrap();
        // A₁ ⊗ ⟨Ω̂₂|A₂Ω̂₂⟩ 1 with ⟨c + φ(g)⟩ = c.
        let a1 = field_operator(&net.net1, &gauss(&net, c1)).unwrap().matrix;
        let closed = net.lift1(&a1) * real(off);
        assert!((&r.operator - &closed).norm() < 1e-3);
        assert!(op_norm(&(&r.operator - &closed)) <= r.trace.final_residual.max(1e-13));
        // Φ₊^{out}(F)Ω = P₊FΩ
        let v = (&r.operator * net.vacuum() - net.pplus() * (&el.operator * net.vacuum())).norm();
        assert!(v <= r.trace.final_residual.max(1e-13));
        let generic = chiral_asymptotic_field(&net, &el.operator, AsymptoticKind::OutPlus);
        assert!((generic - closed).norm() < 1e-13);
    }
}

#[test]
fn zero_vacuum_expectation_kills_the_field() {
    let net = default_net();
    let el = right_element(&net, -2.0, 0.0, 2.0);
    let r = asymptotic_field(
        &net,
        &el,
        AsymptoticKind::OutPlus,
        &LimitSettings::default(),
    )
    .unwrap();
    assert!(r.operator.norm() < 1e-10);
}

#[test]
fn primed_fields_by_reflection_agree_with_direct_limit() {
    let net = default_net();
    let settings = LimitSettings::default();
    let el = left_element(&net, 2.5, 0.8, -2.0);
    for kind in [AsymptoticKind::InPlus, AsymptoticKind::OutMinus] {
        let via_j = asymptotic_field(&net, &el, kind, &settings).unwrap();
        let direct = asymptotic_field_direct(&net, &el, kind, &settings).unwrap();
        assert!(
            (&via_j.operator - &direct.operator).norm() < 1e-11,
            "{kind:?}"
        );
        let closed = chiral_asymptotic_field(&net, &el.operator, kind);
        assert!((&via_j.operator - closed).norm() < 1e-10, "{kind:?}");
    }
}

#[test]
fn wrong_wedge_is_rejected() {
    let net = default_net();
    let el = left_element(&net, 2.5, 0.8, -2.0);
    assert!(asymptotic_field(
        &net,
        &el,
        AsymptoticKind::OutPlus,
        &LimitSettings::default()
    )
    .is_err());
}

#[test]
fn trace_schedule_and_monotonicity() {
    let net = default_net();
    let el = right_element(&net, -2.0, 1.0, 2.5);
    let r = asymptotic_field(
        &net,
        &el,
        AsymptoticKind::InMinus,
        &LimitSettings::default(),
    )
    .unwrap();
    let ts: Vec<f64> = r.trace.points.iter().map(|p| p.t).collect();
    assert_eq!(ts, vec![-8.0, -16.0, -32.0, -64.0]);
    assert!(r.trace.monotone);
    let csv = r.trace.csv();
    assert!(csv.starts_with("T,residual,bound\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn flat_schedule_is_rejected() {
    let s = LimitSettings {
        schedule: vec![8.0, 8.0],
        ..LimitSettings::default()
    };
    assert!(s.validate().is_err());
    let s = LimitSettings {
        kernel_exponent: 1.2,
        ..LimitSettings::default()
    };
    match s.validate() {
        Err(crate::Error::InvalidParameter { field, .. }) => assert_eq!(field, "kernel_exponent"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn too_short_schedule_fails_to_converge() {
    // T = 1, 2 with a slowly decaying gap: residual cannot halve.
    let net = TwoDNet::symmetric(0.05, 2, 1, None).unwrap();
    let g = TestFunction::gaussian(net.net1.grid(), 3.0, 0.5, 1.0).unwrap();
    let a = ChiralGenerator::affine(
        real(1.0),
        TestFunction::gaussian(net.net1.grid(), -3.0, 0.5, 1.0).unwrap(),
    );
    let el = WedgeElement::product(&net, a, ChiralGenerator::field(g), Wedge::Right).unwrap();
    let s = LimitSettings {
        schedule: vec![1.0, 1.1],
        ..LimitSettings::default()
    };
    assert!(matches!(
        asymptotic_field(&net, &el, AsymptoticKind::OutPlus, &s),
        Err(crate::Error::NonConvergence(_))
    ));
}

fn engine() -> ScatteringEngine {
    ScatteringEngine::new(
        &default_net(),
        LimitSettings::default(),
        &DictionarySpec::default(),
    )
    .unwrap()
}

#[test]
fn dictionaries_span_the_wave_spaces() {
    let e = engine();
    for k in AsymptoticKind::ALL {
        let d = e.dictionary(k);
        assert_eq!(crate::linalg::rank(&d.vectors, 1e-8), 9, "{k:?}");
        assert!(d.elements.iter().all(|el| el.satisfies_wedge_constraint()));
    }
}

#[test]
fn vacuum_pair_gives_vacuum() {
    let e = engine();
    let om = e.net.vacuum().clone();
    for dir in [Direction::Out, Direction::In] {
        let s = build_scattering_state(&e, &om, &om, dir).unwrap();
        assert!((&s.composed - &om).norm() < 1e-10);
    }
}

#[test]
fn out_state_of_chiral_pair_is_tensor_product() {
    let e = engine();
    let net = &e.net;
    let psi1 = Vector::from_fn(9, |i, _| C64::new(1.0 / (1.0 + i as f64), 0.3 * i as f64));
    let psi2 = Vector::from_fn(9, |i, _| C64::new((i as f64).cos(), 0.0));
    let plus = net.product_state(&psi1, &net.net2.vacuum());
    let minus = net.product_state(&net.net1.vacuum(), &psi2);
    let out = e.out_state(&plus, &minus).unwrap();
    let exact = exact_chiral_state(net, &plus, &minus, Direction::Out);
    assert!((&out.composed - &exact.composed).norm() < 1e-8);
    assert!((&exact.composed - net.product_state(&psi1, &psi2)).norm() == 0.0);
    assert!(out.norm_defect() < 1e-8);
    let inn = e.in_state(&plus, &minus).unwrap();
    let direct = e.in_state_direct(&plus, &minus).unwrap();
    assert!((&inn.composed - &direct.composed).norm() < 1e-8);
}

#[test]
fn waves_outside_lightcone_subspaces_are_rejected() {
    let e = engine();
    let v = basis_vector(81, 10);
    assert!(e.out_state(&v, e.net.vacuum()).is_err());
}

#[test]
fn clustering_holds_for_sampled_quadruples() {
    let e = engine();
    let net = &e.net;
    let f = right_element(net, -2.0, 0.7, 2.5);
    let g = right_element(net, -3.0, 1.2, 2.0);
    let fp = left_element(net, 2.5, 0.4, -2.0);
    let gp = left_element(net, 2.0, 1.1, -3.5);
    assert!(check_clustering(&e, &f, &g, &fp, &gp).unwrap() < 1e-6);
    let one = WedgeElement::identity(net, Wedge::Right);
    let one_p = WedgeElement::identity(net, Wedge::Left);
    assert!(check_clustering(&e, &one, &one, &one_p, &one_p).unwrap() < 1e-14);
    // P₊FΩ = 0 when the spectator has zero vacuum expectation.
    let z = right_element(net, -2.0, 0.0, 2.5);
    assert!(check_clustering(&e, &z, &g, &fp, &gp).unwrap() < 1e-12);
}

#[test]
fn undeformed_scattering_operator_is_identity() {
    let e = engine();
    let pairs = basis_pairs(&e.net);
    let s = scattering_operator(&e, &pairs).unwrap();
    assert!(s.identity_residual < 1e-6, "{}", s.identity_residual);
    assert!(s.isometry_residual < 1e-8);
    assert!(s.is_complete());
    assert!(s.covariance_residual < 1e-8);
    let om = &s.matrix * e.net.vacuum();
    assert!((om - e.net.vacuum()).norm() < 1e-8);
    let r = random_unit_vector(81, 3);
    assert!(((&s.matrix * &r).norm() - 1.0).abs() < 1e-8);
}

#[test]
fn out_states_are_translation_covariant() {
    let e = engine();
    let net = &e.net;
    let psi1 = Vector::from_fn(9, |i, _| C64::new(1.0, i as f64));
    let psi2 = Vector::from_fn(9, |i, _| C64::new(2.0 - i as f64, 0.5));
    let plus = net.product_state(&psi1, &net.net2.vacuum());
    let minus = net.product_state(&net.net1.vacuum(), &psi2);
    for x in [
        SpacetimePoint::new(0.2, 1.0),
        SpacetimePoint::new(0.1, -1.3),
        SpacetimePoint::ORIGIN,
    ] {
        let a = e
            .out_state(&plus, &minus)
            .unwrap()
            .composed
            .translate(net, x);
        let b = e
            .out_state(&plus.translate(net, x), &minus.translate(net, x))
            .unwrap()
            .composed;
        assert!((a - b).norm() < 1e-8);
    }
}

#[test]
fn asymptotic_space_matches_net_keys() {
    let net = default_net();
    let s = AsymptoticSpace::new(&net);
    assert_eq!(s.plus_dim(), 9);
    assert_eq!(s.minus_dim(), 9);
    let w = super::chiral::intertwiner_w(&net);
    assert!(w.unitarity_residual < 1e-12);
    assert!(w.covariance_residual < 1e-10);
    assert_eq!(w.vacuum_residual, 0.0);
}

#[test]
fn asymptotic_triple_is_free_and_local_on_commuting_samples() {
    let e = engine();
    let net = &e.net;
    let one_r = WedgeElement::identity(net, Wedge::Right);
    let one_l = WedgeElement::identity(net, Wedge::Left);
    let r = vec![
        (one_r.clone(), one_r.clone()),
        (right_element(net, -2.0, 0.7, 2.5), one_r.clone()),
        (
            right_element(net, -3.0, 1.0, 2.0),
            right_element(net, -2.0, 0.6, 2.5),
        ),
    ];
    let rp = vec![
        (one_l.clone(), one_l.clone()),
        (one_l.clone(), left_element(net, 2.5, 0.4, -2.0)),
        (
            left_element(net, 3.0, 0.9, -2.5),
            left_element(net, 2.0, 0.5, -3.0),
        ),
    ];
    let (gr, _, rep) = super::chiral::asymptotic_triple_generators(&e, &r, &rp).unwrap();
    let id = Mat::identity(81, 81);
    assert!((&gr[0].tensor - &id).norm() < 1e-12);
    assert!(rep.commutator_commuting <= 1e-8);
    assert!(rep.outgoing_residual < 1e-8);
    assert!(rep.incoming_residual < 1e-8);
    assert!(rep.chiral_structure_residual < 1e-10);
}
