//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Runs the harness families on `configs/default.toml` and compares against
//! oracles computed here.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use wedgewave::harness::{
    left_sample, right_sample, run_experiment, ExperimentConfig, Family, RunReport,
};
use wedgewave::linalg::{
    basis_vector, commutator, conj_mat, conj_vec, kron, kron_vec, op_norm, phase, real, Mat, Vector,
};
use wedgewave::modular::{modular_objects, worked_examples};
use wedgewave::net::{SpacetimePoint, TwoDNet, Wedge};
use wedgewave::warp::{momentum_vector, DeformationMatrix, DeformedElement, Mollifier};

struct Outcome {
    pass: bool,
    detail: String,
}

struct Suite {
    config: ExperimentConfig,
    outcomes: Vec<(usize, &'static str, Outcome)>,
}

fn config() -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    ExperimentConfig::load(&path).expect("default config loads")
}

impl Suite {
    fn run(&self, family: Family) -> (RunReport, f64) {
        let start = Instant::now();
        let r =
            run_experiment(&self.config, family).unwrap_or_else(|e| panic!("{family} failed: {e}"));
        (r, start.elapsed().as_secs_f64())
    }

    fn record(&mut self, n: usize, title: &'static str, outcome: Outcome) {
        self.outcomes.push((n, title, outcome));
    }
}

/// All the named checks pass and satisfy their bounds.
fn checks_pass(report: &RunReport, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        match report.get(name) {
            Some(c) => {
                ok &= c.pass;
                parts.push(format!("{name}={:.3e}", c.value));
            }
            None => {
                ok = false;
                parts.push(format!("{name}=missing"));
            }
        }
    }
    (ok, parts.join(" "))
}

fn value(report: &RunReport, name: &str) -> f64 {
    report.get(name).map(|c| c.value).unwrap_or(f64::NAN)
}

fn ergodic(suite: &mut Suite) {
    let (r, secs) = suite.run(Family::Ergodic);
    // Independent closed form of the plus-ray average on the vacuum:
    // entries F_{n0}·e^{iωT}·e^{−(|T|^ε ω)²/2} with ω = E_n − P_n.
    let net = TwoDNet::symmetric(1.0, 3, 2, Some(4.0)).unwrap();
    let f = right_sample(&net, -2.0, 0.7, 2.5).unwrap().operator;
    let fo = &f * net.vacuum();
    let target = net.pplus() * &fo;
    let residual_at = |t: f64| {
        let width = t.powf(0.5);
        let v = Vector::from_fn(net.dim(), |n, _| {
            let w = net.energy(n) - net.momentum(n);
            fo[n] * phase(w * t) * (-0.5 * (width * w).powi(2)).exp()
        });
        (v - &target).norm()
    };
    let (r16, r64) = (residual_at(16.0), residual_at(64.0));
    let table = r
        .traces
        .iter()
        .find(|t| t.name == "ergodic")
        .expect("ergodic trace");
    let harness_64 = table
        .rows
        .iter()
        .find(|row| row[0] == 64.0)
        .map(|row| row[1])
        .unwrap_or(f64::NAN);
    let oracle_agrees = (harness_64 - r64).abs() <= 1e-12;
    let (ok, detail) = checks_pass(
        &r,
        &[
            "ergodic_bound_excess",
            "ergodic_residual_final",
            "ergodic_ratio",
        ],
    );
    let pass = ok
        && oracle_agrees
        && r64 <= 1e-3
        && r64 <= 0.2 * r16
        && value(&r, "ergodic_residual_final") <= 1e-3;
    let t_ergodic = r.timings.get("ergodic").copied().unwrap_or(secs);
    suite.record(
        1,
        "ergodic extraction",
        Outcome {
            pass: pass && t_ergodic < 60.0,
            detail: format!(
                "{detail} oracle(T=64)={r64:.3e} oracle(T=16)={r16:.3e} time={t_ergodic:.1}s"
            ),
        },
    );

    let samples = r.diagnostics["factorization_samples"]
        .as_array()
        .map(|a| a.len())
        .unwrap_or(0);
    let (ok, detail) = checks_pass(
        &r,
        &["factorization_max_distance", "factorization_shortcut_ratio"],
    );
    suite.record(
        2,
        "chiral factorization",
        Outcome {
            pass: ok && samples == 10 && value(&r, "factorization_max_distance") <= 1e-3,
            detail: format!("{detail} samples={samples}"),
        },
    );
}

fn clustering(suite: &mut Suite) {
    let (r, _) = suite.run(Family::Clustering);
    let rows = r
        .traces
        .iter()
        .find(|t| t.name == "clustering")
        .map(|t| t.rows.len())
        .unwrap_or(0);
    let (ok, detail) = checks_pass(&r, &["clustering_max_residual"]);
    suite.record(
        3,
        "clustering",
        Outcome {
            pass: ok && rows == 20 && value(&r, "clustering_max_residual") <= 1e-6,
            detail: format!("{detail} quadruples={rows}"),
        },
    );
}

fn smatrix(suite: &mut Suite) {
    let (r, _) = suite.run(Family::Smatrix);
    let (ok, detail) = checks_pass(
        &r,
        &["S_identity_residual", "S_isometry_residual", "S_out_rank"],
    );
    suite.record(
        4,
        "undeformed scattering operator",
        Outcome {
            pass: ok
                && value(&r, "S_identity_residual") <= 1e-6
                && value(&r, "S_isometry_residual") <= 1e-8
                && value(&r, "S_out_rank") == 81.0,
            detail,
        },
    );

    let points = r.diagnostics["W_sample_points"].as_u64().unwrap_or(0);
    let (ok, detail) = checks_pass(
        &r,
        &[
            "W_unitarity_residual",
            "W_covariance_residual",
            "W_vacuum_residual",
        ],
    );
    suite.record(
        9,
        "intertwiner",
        Outcome {
            pass: ok
                && points == 5
                && value(&r, "W_unitarity_residual") <= 1e-12
                && value(&r, "W_covariance_residual") <= 1e-10
                && value(&r, "W_vacuum_residual") == 0.0,
            detail: format!("{detail} points={points}"),
        },
    );

    let names = [
        "spectrum_violation",
        "vacuum_multiplicity",
        "J_inversion_residual",
        "U_group_law_residual",
    ];
    let (ok, detail) = checks_pass(&r, &names);
    let tight = [
        "spectrum_violation",
        "J_inversion_residual",
        "U_group_law_residual",
    ]
    .iter()
    .all(|n| value(&r, n) <= 1e-12);
    suite.record(
        10,
        "structural exactness",
        Outcome {
            pass: ok && tight && value(&r, "vacuum_multiplicity") == 1.0,
            detail,
        },
    );
}

fn warp_oracle(suite: &mut Suite) {
    let (r, secs) = suite.run(Family::WarpOracle);
    let (ok, detail) = checks_pass(&r, &["warp_oracle_max_distance", "mollifier_swap_max"]);
    let kappas_seen = ["0.25", "0.5", "1.0"].iter().all(|k| {
        r.diagnostics.contains_key(&format!("warp_k{k}_right"))
            && r.diagnostics.contains_key(&format!("warp_k{k}_left"))
    });

    // Spectral oracle built column by column from U(Qp_n) F U(Qp_n)*.
    let net = TwoDNet::symmetric(1.0, 3, 2, Some(4.0)).unwrap();
    let settings = suite.config.warp_settings();
    let mut worst = 0.0f64;
    for kappa in [0.25, 0.5, 1.0] {
        for el in [
            right_sample(&net, -3.0, 0.5, 2.5).unwrap(),
            left_sample(&net, 2.5, 0.5, -4.0).unwrap(),
        ] {
            let q = DeformationMatrix::new(kappa).unwrap();
            let q = if el.wedge == Wedge::Right { q } else { q.neg() };
            let d = DeformedElement::build(&net, &el, q, Mollifier::ProductGaussian, &settings)
                .unwrap();
            let mut oracle = Mat::zeros(net.dim(), net.dim());
            for n in 0..net.dim() {
                let x = q.apply(momentum_vector(&net, n));
                let u = net.translation_unitary(SpacetimePoint::new(x[0], x[1]));
                oracle.set_column(
                    n,
                    &(&u * &el.operator * u.adjoint() * basis_vector(net.dim(), n)),
                );
            }
            worst = worst.max(op_norm(&(&d.oscillatory_form - &oracle)));
        }
    }
    suite.record(
        5,
        "warped-convolution oracle",
        Outcome {
            pass: ok
                && kappas_seen
                && worst <= 1e-4
                && value(&r, "mollifier_swap_max") <= 1e-5
                && net.dim() <= 81
                && secs < 180.0,
            detail: format!(
                "{detail} conjugation_oracle={worst:.3e} dim={} time={secs:.1}s",
                net.dim()
            ),
        },
    );
}

fn deform(suite: &mut Suite) {
    let (r, _) = suite.run(Family::Deform);
    // (1,1): one quantum of momentum 1 on each factor, M² = 2·1·1, phase κM² = 1.
    let spot_oracle = 1.0f64.cos();
    let spot = r
        .diagnostics
        .get("S_kappa_spot_re_11@0.5")
        .and_then(|v| v.as_f64())
        .unwrap_or(f64::NAN);
    let (ok, detail) = checks_pass(
        &r,
        &[
            "S_kappa_phase_error@0.5",
            "S_kappa_spot_re_11@0.5",
            "S_kappa_phase_gap@0.5",
            "S_kappa_oracle_residual@0.5",
        ],
    );
    suite.record(
        6,
        "deformed scattering operator",
        Outcome {
            pass: ok
                && value(&r, "S_kappa_phase_error@0.5") <= 1e-4
                && (spot - spot_oracle).abs() <= 1e-4
                && (spot_oracle - 0.5403).abs() < 1e-4
                && value(&r, "S_kappa_phase_gap@0.5") >= 0.5,
            detail: format!("{detail} re(λ11)={spot:.6} cos1={spot_oracle:.6}"),
        },
    );

    let mut ok = true;
    let mut parts = Vec::new();
    for k in ["0.0", "0.1", "0.25"] {
        let t = r
            .traces
            .iter()
            .find(|t| t.name == format!("commutant_k{k}"));
        let residuals: Vec<f64> = t
            .map(|t| t.rows.iter().map(|row| row[2]).collect())
            .unwrap_or_default();
        let caps: Vec<f64> = t
            .map(|t| t.rows.iter().map(|row| row[0]).collect())
            .unwrap_or_default();
        let monotone = residuals.len() == 3 && residuals.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        ok &= monotone && caps == vec![1.0, 2.0, 3.0];
        ok &= r
            .get(&format!("commutant_trend_growth@{k}"))
            .map(|c| c.pass)
            .unwrap_or(false);
        let shown: Vec<String> = residuals.iter().map(|x| format!("{x:.3e}")).collect();
        parts.push(format!("κ={k}:[{}]", shown.join(", ")));
    }
    suite.record(
        7,
        "commutant trend over per_mode_cap",
        Outcome {
            pass: ok,
            detail: parts.join(" "),
        },
    );
}

/// `Δ = ρ⊗σ⁻¹` and `J(u_a⊗v̄_b) = u_b⊗v̄_a` from the Schmidt form of `Ω ∈ ℂ²⊗ℂ²`.
fn schmidt_oracle(omega: &Vector) -> (Mat, Mat) {
    let r = Mat::from_fn(2, 2, |i, j| omega[2 * i + j]);
    let svd = r.svd(true, true);
    let (u, v) = (svd.u.unwrap(), svd.v_t.unwrap().adjoint());
    let s2 = Mat::from_diagonal(&svd.singular_values.map(|x| real(x * x)));
    let rho = &u * &s2 * u.adjoint();
    let sigma = conj_mat(&v) * &s2 * v.transpose();
    let delta = kron(&rho, &sigma.try_inverse().unwrap());
    let (mut f, mut fp) = (Mat::zeros(4, 4), Mat::zeros(4, 4));
    for a in 0..2 {
        for b in 0..2 {
            let uv = |x: usize, y: usize| {
                kron_vec(
                    &u.column(x).into_owned(),
                    &conj_vec(&v.column(y).into_owned()),
                )
            };
            f.set_column(2 * a + b, &uv(a, b));
            fp.set_column(2 * a + b, &uv(b, a));
        }
    }
    (delta, &fp * f.transpose())
}

fn modular(suite: &mut Suite) {
    let (r, _) = suite.run(Family::ModularDemo);
    let entrywise = |a: &Mat, b: &Mat| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for ex in worked_examples() {
        let data = modular_objects(&ex.algebra, &ex.omega).unwrap();
        let (delta, j) = match ex.name {
            "entangled" => schmidt_oracle(&ex.omega),
            _ => {
                let d = ex.omega.len();
                let u = Mat::from_diagonal(&ex.omega.map(|z| z / z.conj()));
                (Mat::identity(d, d), u)
            }
        };
        let e_delta = entrywise(&data.delta, &delta);
        let e_j = entrywise(&data.j_mod.matrix, &j);
        // J alg J commutes with alg, and has the commutant's dimension.
        let jaj: Vec<Mat> = ex
            .algebra
            .basis
            .iter()
            .map(|a| data.j_mod.conjugate(a))
            .collect();
        let comm = jaj
            .iter()
            .flat_map(|x| {
                ex.algebra
                    .basis
                    .iter()
                    .map(move |b| op_norm(&commutator(x, b)))
            })
            .fold(0.0, f64::max);
        let dims = wedgewave::modular::commutant(&ex.algebra).len() == ex.algebra.len();
        worst = worst.max(e_delta).max(e_j).max(comm);
        if !dims {
            worst = f64::INFINITY;
        }
        parts.push(format!(
            "{}: Δ={e_delta:.1e} J={e_j:.1e} [JaJ,b]={comm:.1e}",
            ex.name
        ));
    }
    let (ok, detail) = checks_pass(
        &r,
        &[
            "modular_diagonal_delta",
            "modular_diagonal_j",
            "modular_entangled_delta",
            "modular_entangled_j",
            "modular_entangled_commutant",
        ],
    );
    suite.record(
        8,
        "modular diagnostics",
        Outcome {
            pass: ok && worst <= 1e-10,
            detail: format!("{} | {detail}", parts.join("; ")),
        },
    );
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        // `cargo test -- --list` probes every target; report nothing to list.
        return ExitCode::SUCCESS;
    }
    let mut suite = Suite {
        config: config(),
        outcomes: Vec::new(),
    };
    let start = Instant::now();
    ergodic(&mut suite);
    clustering(&mut suite);
    smatrix(&mut suite);
    warp_oracle(&mut suite);
    deform(&mut suite);
    modular(&mut suite);
    suite.outcomes.sort_by_key(|o| o.0);
    let mut failures = 0;
    for (n, title, o) in &suite.outcomes {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} [{mark}] {title}: {}", o.detail);
        failures += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        suite.outcomes.len() - failures,
        suite.outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if failures == 0 && suite.outcomes.len() == 10 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
