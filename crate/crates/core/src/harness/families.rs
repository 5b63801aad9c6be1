use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::report::{Comparison, RunReport, TraceTable};
use crate::asymptotics::{
    asymptotic_field, basis_pairs, check_clustering, chiral_asymptotic_field, intertwiner_w,
    scattering_operator, smear_along_ray, AsymptoticKind, RaySign, ScatteringEngine,
};
use crate::error::Result;
use crate::fock::{field_operator, TestFunction};
use crate::linalg::{op_norm, ordered_map, real, Mat, C64};
use crate::modular::{
    geometric_vs_modular_report, modular_objects, toy_wedge_samples, worked_examples,
};
use crate::net::{reflection, ChiralGenerator, SpacetimePoint, TwoDNet, Wedge, WedgeElement};
use crate::warp::{
    commutant_trend, warp_oscillatory, DeformationMatrix, DeformedElement, DeformedPipeline,
    Mollifier,
};

const PACKET_WIDTH: f64 = 0.5;

fn gauss(net: &TwoDNet, center: f64) -> Result<TestFunction> {
    TestFunction::gaussian(net.net1.grid(), center, PACKET_WIDTH, 1.0)
}

/// `φ₁(g_{c₁}) ⊗ (offset + φ₂(g_{c₂}))` in `W`.
pub fn right_sample(net: &TwoDNet, c1: f64, offset: f64, c2: f64) -> Result<WedgeElement> {
    WedgeElement::product(
        net,
        ChiralGenerator::field(gauss(net, c1)?),
        ChiralGenerator::affine(real(offset), gauss(net, c2)?),
        Wedge::Right,
    )
}

/// `(offset + φ₁(g_{c₁})) ⊗ φ₂(g_{c₂})` in `W′`.
pub fn left_sample(net: &TwoDNet, c1: f64, offset: f64, c2: f64) -> Result<WedgeElement> {
    WedgeElement::product(
        net,
        ChiralGenerator::affine(real(offset), gauss(net, c1)?),
        ChiralGenerator::field(gauss(net, c2)?),
        Wedge::Left,
    )
}

struct Sampler(ChaCha8Rng);

impl Sampler {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler(rng)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.random_range(lo..hi)
    }

    fn right(&mut self, net: &TwoDNet) -> Result<WedgeElement> {
        let (c1, off, c2) = (
            self.range(-3.5, -1.5),
            self.range(0.2, 1.5),
            self.range(1.5, 3.5),
        );
        right_sample(net, c1, off, c2)
    }

    fn left(&mut self, net: &TwoDNet) -> Result<WedgeElement> {
        let (c1, off, c2) = (
            self.range(1.5, 3.5),
            self.range(0.2, 1.5),
            self.range(-3.5, -1.5),
        );
        left_sample(net, c1, off, c2)
    }
}

/// `0.5 → "0.5"`, `1 → "1.0"`.
fn klabel(kappa: f64) -> String {
    let s = format!("{kappa}");
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

#[cfg(not(target_arch = "wasm32"))]
fn timed<T>(
    report: &mut RunReport,
    stage: &str,
    f: impl FnOnce(&mut RunReport) -> Result<T>,
) -> Result<T> {
    let start = std::time::Instant::now();
    let out = f(report);
    report
        .timings
        .insert(stage.to_string(), start.elapsed().as_secs_f64());
    out
}

// No monotonic clock on wasm32-unknown-unknown; timings stay empty.
#[cfg(target_arch = "wasm32")]
fn timed<T>(
    report: &mut RunReport,
    _stage: &str,
    f: impl FnOnce(&mut RunReport) -> Result<T>,
) -> Result<T> {
    f(report)
}

pub(super) fn build_net(cfg: &ExperimentConfig) -> Result<TwoDNet> {
    let m = &cfg.model;
    let space = crate::fock::FockSpace::build(
        crate::fock::ModeGrid::new(m.spacing, m.modes)?,
        m.per_mode_cap,
        m.energy_cap,
    )?;
    TwoDNet::build_with_bound(space.clone(), space, m.max_dim)
}

pub(super) fn ergodic(cfg: &ExperimentConfig, net: &TwoDNet, report: &mut RunReport) -> Result<()> {
    let settings = cfg.limit_settings();
    settings.validate()?;
    let tol = &cfg.tolerances;
    let om = net.vacuum();

    timed(report, "ergodic", |report| {
        let f = right_sample(net, -2.0, 0.7, 2.5)?;
        let fo = &f.operator * om;
        let target = net.pplus() * &fo;
        let transverse = &fo - &target;
        // Frequencies E − P of the components the plus-ray average must suppress.
        let gaps: Vec<f64> = (0..net.dim())
            .filter(|&n| transverse[n].norm() > 0.0)
            .map(|n| net.energy(n) - net.momentum(n))
            .collect();
        let mut table = TraceTable::new("ergodic", &["T", "residual", "bound", "quadrature_error"]);
        let mut residuals = Vec::new();
        let mut worst_excess = f64::NEG_INFINITY;
        for &t in &settings.schedule {
            let k = settings.kernel(t)?;
            let s = smear_along_ray(net, &f.operator, &k, RaySign::Plus, &settings.quadrature)?;
            let r = (&s.operator * om - &target).norm();
            let decay = gaps
                .iter()
                .map(|&w| settings.profile.fourier(k.width() * w).abs())
                .fold(0.0, f64::max);
            let bound = transverse.norm() * decay;
            worst_excess = worst_excess.max(r - (bound + s.error_bound));
            table.push(vec![t, r, bound, s.error_bound]);
            residuals.push((t, r));
        }
        report.check(
            "ergodic_bound_excess",
            worst_excess,
            Comparison::AtMost,
            1e-15,
        );
        let &(t_last, r_last) = residuals.last().expect("schedule is nonempty");
        report.at_most("ergodic_residual_final", r_last, tol.ergodic_final);
        match residuals
            .iter()
            .find(|(t, _)| (t * 4.0 - t_last).abs() <= 1e-12 * t_last)
        {
            Some(&(_, r_quarter)) => {
                report.at_most("ergodic_ratio", r_last / r_quarter, tol.ergodic_ratio);
            }
            None => report.diagnostic("ergodic_ratio", "schedule has no T_max/4"),
        }
        report.diagnostic("ergodic_transverse_norm", transverse.norm());
        report.trace(table);
        Ok(())
    })?;

    timed(report, "factorization", |report| {
        let mut sampler = Sampler::new(cfg.seed, 1);
        let mut worst = 0.0f64;
        let mut worst_ratio = 0.0f64;
        let mut shortcut_closed = 0.0f64;
        let mut per_sample = Vec::new();
        for i in 0..cfg.samples.factorization {
            let (c1, off, c2) = (
                sampler.range(-3.5, -1.5),
                sampler.range(0.2, 1.5),
                sampler.range(1.5, 3.5),
            );
            let el = right_sample(net, c1, off, c2)?;
            let r = asymptotic_field(net, &el, AsymptoticKind::OutPlus, &settings)?;
            let a1 = field_operator(&net.net1, &gauss(net, c1)?)?.matrix;
            let closed = net.lift1(&a1) * real(off);
            let d = (&r.operator - &closed).norm();
            let shortcut = chiral_asymptotic_field(net, &el.operator, AsymptoticKind::OutPlus);
            let e = op_norm(&(&r.operator - &shortcut));
            let estimate = r.trace.final_residual.max(1e-13);
            worst = worst.max(d);
            worst_ratio = worst_ratio.max(e / estimate);
            shortcut_closed = shortcut_closed.max((&shortcut - &closed).norm());
            per_sample.push(serde_json::json!({ "c1": c1, "offset": off, "c2": c2, "distance": d, "estimate": estimate }));
            report.trace(TraceTable::from_convergence(
                format!("factorization_{i}"),
                &r.trace,
            ));
        }
        report.at_most(
            "factorization_max_distance",
            worst,
            cfg.tolerances.factorization,
        );
        report.at_most("factorization_shortcut_ratio", worst_ratio, 1.0);
        report.diagnostic("factorization_shortcut_vs_closed_form", shortcut_closed);
        report.diagnostic("factorization_samples", per_sample);
        Ok(())
    })
}

fn engine(
    cfg: &ExperimentConfig,
    net: &TwoDNet,
    report: &mut RunReport,
) -> Result<ScatteringEngine> {
    timed(report, "engine", |_| {
        ScatteringEngine::new(net, cfg.limit_settings(), &cfg.dictionary)
    })
}

pub(super) fn clustering(
    cfg: &ExperimentConfig,
    net: &TwoDNet,
    report: &mut RunReport,
) -> Result<()> {
    let e = engine(cfg, net, report)?;
    timed(report, "clustering", |report| {
        let mut sampler = Sampler::new(cfg.seed, 2);
        let mut quads = Vec::with_capacity(cfg.samples.clustering);
        for _ in 0..cfg.samples.clustering {
            quads.push((
                sampler.right(net)?,
                sampler.right(net)?,
                sampler.left(net)?,
                sampler.left(net)?,
            ));
        }
        let residuals: Vec<f64> =
            ordered_map(&quads, |(f, g, fp, gp)| check_clustering(&e, f, g, fp, gp))
                .into_iter()
                .collect::<Result<_>>()?;
        let mut table = TraceTable::new("clustering", &["sample", "residual"]);
        for (i, r) in residuals.iter().enumerate() {
            table.push(vec![i as f64, *r]);
        }
        report.at_most(
            "clustering_max_residual",
            residuals.iter().copied().fold(0.0, f64::max),
            cfg.tolerances.clustering,
        );
        report.trace(table);
        Ok(())
    })
}

pub(super) fn smatrix(cfg: &ExperimentConfig, net: &TwoDNet, report: &mut RunReport) -> Result<()> {
    let tol = &cfg.tolerances;
    let e = engine(cfg, net, report)?;
    timed(report, "scattering_operator", |report| {
        let pairs = basis_pairs(net);
        let s = scattering_operator(&e, &pairs)?;
        report.at_most("S_identity_residual", s.identity_residual, tol.s_identity);
        report.at_most("S_isometry_residual", s.isometry_residual, tol.isometry);
        report.check(
            "S_out_rank",
            s.out_rank as f64,
            Comparison::Equal,
            s.dim as f64,
        );
        report.diagnostic("S_in_rank", s.in_rank);
        report.diagnostic("S_in_isometry_residual", s.in_isometry_residual);
        report.diagnostic("S_covariance_residual", s.covariance_residual);
        report.diagnostic("S_pairs", pairs.len());
        let mut table = TraceTable::new(
            "smatrix_pairs",
            &["pair", "out_norm_defect", "in_norm_defect"],
        );
        for (i, (o, n)) in s.out_states.iter().zip(&s.in_states).enumerate() {
            table.push(vec![i as f64, o.norm_defect(), n.norm_defect()]);
        }
        report.trace(table);
        Ok(())
    })?;

    timed(report, "intertwiner", |report| {
        let w = intertwiner_w(net);
        report.at_most(
            "W_unitarity_residual",
            w.unitarity_residual,
            tol.intertwiner_unitarity,
        );
        report.at_most(
            "W_covariance_residual",
            w.covariance_residual,
            tol.intertwiner_covariance,
        );
        report.check(
            "W_vacuum_residual",
            w.vacuum_residual,
            Comparison::Equal,
            0.0,
        );
        report.diagnostic("W_sample_points", w.sample_points.len());
        Ok(())
    })?;

    timed(report, "structure", |report| {
        report.at_most(
            "spectrum_violation",
            net.spectrum_violation(),
            tol.structural,
        );
        report.check(
            "vacuum_multiplicity",
            net.vacuum_multiplicity() as f64,
            Comparison::Equal,
            1.0,
        );
        let j = reflection(net)?;
        let r = j.invariant_residuals(net);
        report.at_most("J_inversion_residual", r.inversion, tol.structural);
        report.diagnostic("J_residuals", r);
        let mut sampler = Sampler::new(cfg.seed, 3);
        let mut group = 0.0f64;
        for _ in 0..cfg.samples.translations {
            let x = SpacetimePoint::new(sampler.range(-2.0, 2.0), sampler.range(-2.0, 2.0));
            let y = SpacetimePoint::new(sampler.range(-2.0, 2.0), sampler.range(-2.0, 2.0));
            let lhs = net.translation_unitary(x) * net.translation_unitary(y);
            group = group.max(op_norm(&(lhs - net.translation_unitary(x.add(&y)))));
        }
        report.at_most("U_group_law_residual", group, tol.structural);
        Ok(())
    })
}

pub(super) fn warp_oracle(
    cfg: &ExperimentConfig,
    net: &TwoDNet,
    report: &mut RunReport,
) -> Result<()> {
    let ws = cfg.warp_settings();
    ws.validate()?;
    let primary = cfg.deformation.mollifier;
    let elements = [
        right_sample(net, -3.0, 0.5, 2.5)?,
        left_sample(net, 2.5, 0.5, -4.0)?,
    ];

    struct KappaResult {
        kappa: f64,
        built: Vec<DeformedElement>,
        swaps: Vec<(Mollifier, f64)>,
    }
    let runs = timed(report, "warp_oracle", |_| {
        ordered_map(&cfg.deformation.kappa, |&kappa| -> Result<KappaResult> {
            let q = DeformationMatrix::new(kappa)?;
            let mut built = Vec::with_capacity(elements.len());
            for el in &elements {
                let qe = if el.wedge == Wedge::Right { q } else { q.neg() };
                built.push(DeformedElement::build(net, el, qe, primary, &ws)?);
            }
            let mut swaps = Vec::new();
            for m in Mollifier::ALL.into_iter().filter(|&m| m != primary) {
                let other = warp_oscillatory(net, &elements[0].operator, &q, m, &ws)?;
                swaps.push((m, op_norm(&(&other.matrix - &built[0].oscillatory_form))));
            }
            Ok(KappaResult {
                kappa,
                built,
                swaps,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()
    })?;

    let mut worst = 0.0f64;
    let mut coverage = 0.0f64;
    let mut swap = 0.0f64;
    for run in &runs {
        for d in &run.built {
            worst = worst.max(d.oracle_distance);
            coverage = coverage.max(d.oracle_distance / d.error_estimate.max(f64::MIN_POSITIVE));
            let side = if d.q.is_negated() { "left" } else { "right" };
            let mut t = TraceTable::new(
                format!("regulator_k{}_{side}", klabel(run.kappa)),
                &["reg_epsilon", "distance"],
            );
            for &(eps, dist) in &d.regulator_trace {
                t.push(vec![eps, dist]);
            }
            report.trace(t);
            report.diagnostic(
                format!("warp_k{}_{side}", klabel(run.kappa)),
                serde_json::json!({ "oracle_distance": d.oracle_distance, "error_estimate": d.error_estimate }),
            );
        }
        for &(m, s) in &run.swaps {
            swap = swap.max(s);
            report.diagnostic(
                format!("mollifier_swap_k{}_{}", klabel(run.kappa), m.name()),
                s,
            );
        }
    }
    report.at_most(
        "warp_oracle_max_distance",
        worst,
        cfg.tolerances.warp_oracle,
    );
    report.at_most("warp_estimate_coverage", coverage, 1.0);
    if runs.iter().any(|r| !r.swaps.is_empty()) {
        report.at_most("mollifier_swap_max", swap, cfg.tolerances.mollifier_swap);
    }
    report.diagnostic("model_dim", net.dim());
    Ok(())
}

pub(super) fn deform(cfg: &ExperimentConfig, net: &TwoDNet, report: &mut RunReport) -> Result<()> {
    let tol = &cfg.tolerances;
    let e = engine(cfg, net, report)?;
    let pairs = basis_pairs(net);
    // (1,1) in units of the grid spacings: one quantum on each chiral factor.
    let spot_index = (0..net.dim()).find(|&i| net.key(i) == (1, 1));

    for &kappa in &cfg.deformation.kappa {
        let k = klabel(kappa);
        let sk = timed(report, &format!("deform_k{k}"), |_| {
            let mut pipe = DeformedPipeline::new(&e, kappa)?;
            pipe.path_tolerance = cfg.deformation.path_tolerance;
            pipe.scattering_operator(&pairs)
        })?;
        report.at_most(
            format!("S_kappa_phase_error@{k}"),
            sk.max_phase_error(),
            tol.phase,
        );
        report.at_most(
            format!("S_kappa_oracle_residual@{k}"),
            sk.oracle_residual,
            tol.s_identity,
        );
        if let (Some(i), Some(p)) = (spot_index, sk.phase_for_key((1, 1))) {
            let (a, b) = net.chiral_momenta(i);
            let expected = (kappa * 2.0 * a * b).cos();
            report.at_most(
                format!("S_kappa_spot_re_11@{k}"),
                (p.measured.re - expected).abs(),
                tol.spot,
            );
            report.diagnostic(format!("S_kappa_spot_re_11@{k}"), p.measured.re);
        }

        let wrapped = |a: C64, b: C64| (a / b).arg().abs();
        let (mut expected_gap, mut measured_gap, mut witness) = (0.0f64, 0.0f64, ((0, 0), (0, 0)));
        for a in &sk.phases {
            for b in &sk.phases {
                expected_gap = expected_gap.max(wrapped(a.expected, b.expected));
                let g = a.phase_gap(b);
                if g > measured_gap {
                    measured_gap = g;
                    witness = (a.key, b.key);
                }
            }
        }
        if expected_gap >= tol.phase_gap {
            report.check(
                format!("S_kappa_phase_gap@{k}"),
                measured_gap,
                Comparison::AtLeast,
                tol.phase_gap,
            );
            report.diagnostic(format!("S_kappa_gap_witness@{k}"), witness);
        }
        if kappa == 0.0 {
            let d = op_norm(&(&sk.operator.matrix - &sk.undeformed.matrix));
            report.at_most(
                format!("S_kappa_undeformed_collapse@{k}"),
                d,
                tol.undeformed_collapse,
            );
        }
        report.diagnostic(
            format!("S_kappa@{k}"),
            serde_json::json!({
                "unitarity_residual": sk.unitarity_residual,
                "path_residual": sk.path_residual,
                "scalar_distance_lower_bound": sk.scalar_distance_lower_bound,
                "out_rank": sk.operator.out_rank,
            }),
        );
        let mut t = TraceTable::new(
            format!("phases_k{k}"),
            &[
                "index",
                "key1",
                "key2",
                "re",
                "im",
                "expected_re",
                "expected_im",
                "phase_error",
            ],
        );
        for p in &sk.phases {
            t.push(vec![
                p.index as f64,
                p.key.0 as f64,
                p.key.1 as f64,
                p.measured.re,
                p.measured.im,
                p.expected.re,
                p.expected.im,
                p.phase_error,
            ]);
        }
        report.trace(t);
    }

    let sweep = cfg.commutant_sweep();
    let asserted: Vec<(f64, bool)> = cfg.commutant.kappa.iter().map(|&k| (k, true)).collect();
    let reported: Vec<(f64, bool)> = cfg
        .commutant
        .diagnostic_kappa
        .iter()
        .map(|&k| (k, false))
        .collect();
    let all: Vec<(f64, bool)> = asserted.into_iter().chain(reported).collect();
    let trends = timed(report, "commutant", |_| {
        ordered_map(&all, |&(kappa, _)| commutant_trend(&sweep, kappa))
            .into_iter()
            .collect::<Result<Vec<_>>>()
    })?;
    for (trend, &(kappa, assert)) in trends.iter().zip(&all) {
        let k = klabel(kappa);
        let growth = trend
            .residuals
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        if assert {
            report.at_most(format!("commutant_trend_growth@{k}"), growth, 1e-12);
        } else {
            report.diagnostic(format!("commutant_trend_growth@{k}"), growth);
        }
        let mut t = TraceTable::new(
            format!("commutant_k{k}"),
            &["per_mode_cap", "dim", "residual"],
        );
        for ((&cap, &dim), &r) in trend.caps.iter().zip(&trend.dims).zip(&trend.residuals) {
            t.push(vec![cap as f64, dim as f64, r]);
        }
        report.trace(t);
    }
    Ok(())
}

pub(super) fn modular_demo(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let tol = cfg.tolerances.modular;
    timed(report, "modular", |report| {
        let entrywise = |a: &Mat, b: &Mat| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        for ex in worked_examples() {
            let data = modular_objects(&ex.algebra, &ex.omega)?;
            report.at_most(
                format!("modular_{}_delta", ex.name),
                entrywise(&data.delta, &ex.delta),
                tol,
            );
            report.at_most(
                format!("modular_{}_j", ex.name),
                entrywise(&data.j_mod.matrix, &ex.j_matrix),
                tol,
            );
            report.at_most(
                format!("modular_{}_commutant", ex.name),
                data.residuals.commutant,
                tol,
            );
            report.diagnostic(format!("modular_{}_residuals", ex.name), data.residuals);
        }
        let toy = TwoDNet::symmetric(cfg.model.spacing, 1, 1, None)?;
        let geo = geometric_vs_modular_report(&toy, &toy_wedge_samples(&toy)?)?;
        report.diagnostic("geometric_vs_modular", geo);
        Ok(())
    })
}
