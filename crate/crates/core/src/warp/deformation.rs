use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::asymptotics::ProbeSet;
use crate::error::{Error, Result};
use crate::fock::TestFunction;
use crate::linalg::{commutator, op_norm, ordered_map, pairwise_sum, phase, Mat, C64};
use crate::net::{ChiralGenerator, TwoDNet, Wedge, WedgeElement};
use crate::quadrature::CompositeRule;

/// Minkowski product `a⁰b⁰ − a¹b¹`.
pub fn minkowski(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] - a[1] * b[1]
}

/// `Q_κ = [[0, κ], [κ, 0]]`, possibly negated, acting on `(x⁰, x¹)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationMatrix {
    kappa: f64,
    negated: bool,
}

impl DeformationMatrix {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::invalid(
                "deformation.kappa",
                format!("must be finite and ≥ 0, got {kappa}"),
            ));
        }
        Ok(DeformationMatrix {
            kappa,
            negated: false,
        })
    }

    pub fn zero() -> Self {
        DeformationMatrix {
            kappa: 0.0,
            negated: false,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// `−Q`.
    pub fn neg(&self) -> Self {
        DeformationMatrix {
            kappa: self.kappa,
            negated: !self.negated,
        }
    }

    fn off_diagonal(&self) -> f64 {
        if self.negated {
            -self.kappa
        } else {
            self.kappa
        }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let k = self.off_diagonal();
        [[0.0, k], [k, 0.0]]
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let k = self.off_diagonal();
        [k * x[1], k * x[0]]
    }

    /// `max |(Qx)·y + x·(Qy)|` over the given pairs.
    pub fn antisymmetry_residual(&self, samples: &[([f64; 2], [f64; 2])]) -> f64 {
        samples
            .iter()
            .map(|&(x, y)| (minkowski(self.apply(x), y) + minkowski(x, self.apply(y))).abs())
            .fold(0.0, f64::max)
    }
}

/// `f(x, y) = g(x)·m(y)` with `g(0) = m(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mollifier {
    /// `g = m = e^{−|·|²/2}`.
    ProductGaussian,
    /// `g = m = (1 + |·|²/2)·e^{−|·|²/2}`.
    PolynomialDamped,
}

impl Mollifier {
    pub const ALL: [Mollifier; 2] = [Mollifier::ProductGaussian, Mollifier::PolynomialDamped];

    pub fn name(self) -> &'static str {
        match self {
            Mollifier::ProductGaussian => "product-gaussian",
            Mollifier::PolynomialDamped => "polynomial-damped",
        }
    }

    fn radial(self, r2: f64) -> f64 {
        match self {
            Mollifier::ProductGaussian => (-0.5 * r2).exp(),
            Mollifier::PolynomialDamped => (1.0 + 0.5 * r2) * (-0.5 * r2).exp(),
        }
    }

    /// The factor `g` acting on `x`.
    pub fn spatial(self, x: [f64; 2]) -> f64 {
        self.radial(x[0] * x[0] + x[1] * x[1])
    }

    /// `f(x, y)`.
    pub fn value(self, x: [f64; 2], y: [f64; 2]) -> f64 {
        self.spatial(x) * self.radial(y[0] * y[0] + y[1] * y[1])
    }

    /// `m̂(u) = ∫d²y m(y)e^{iu·y}` (Euclidean pairing).
    pub fn dual(self, u: [f64; 2]) -> f64 {
        let r2 = u[0] * u[0] + u[1] * u[1];
        let two_pi = 2.0 * std::f64::consts::PI;
        match self {
            Mollifier::ProductGaussian => two_pi * (-0.5 * r2).exp(),
            Mollifier::PolynomialDamped => two_pi * (2.0 - 0.5 * r2) * (-0.5 * r2).exp(),
        }
    }

    /// Crude bound on `∫|m̂|` outside `[−L, L]²`, normalized by `(2π)²`.
    fn tail_bound(self, half_width: f64) -> f64 {
        let tail = statrs::function::erf::erfc(half_width / std::f64::consts::SQRT_2);
        match self {
            Mollifier::ProductGaussian => 2.0 * tail,
            Mollifier::PolynomialDamped => 2.0 * (2.0 + half_width * half_width) * tail,
        }
    }
}

impl std::str::FromStr for Mollifier {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product-gaussian" => Ok(Mollifier::ProductGaussian),
            "polynomial-damped" => Ok(Mollifier::PolynomialDamped),
            _ => Err(Error::invalid(
                "deformation.mollifier",
                format!("unknown family {s:?}, expected product-gaussian or polynomial-damped"),
            )),
        }
    }
}

/// Joint momentum `(E, P)` of basis state `i`.
pub fn momentum_vector(net: &TwoDNet, i: usize) -> [f64; 2] {
    [net.energy(i), net.momentum(i)]
}

/// Phase `(p_m − p_n)·Q p_n` of entry `(m, n)`.
fn warp_exponent(net: &TwoDNet, q: &DeformationMatrix, m: usize, n: usize) -> f64 {
    let (pm, pn) = (momentum_vector(net, m), momentum_vector(net, n));
    minkowski([pm[0] - pn[0], pm[1] - pn[1]], q.apply(pn))
}

/// `F_Q = Σ_p α_{Qp}(F)E(p)`, exact on the discrete joint spectrum.
pub fn warp_spectral(net: &TwoDNet, f: &Mat, q: &DeformationMatrix) -> Mat {
    Mat::from_fn(f.nrows(), f.ncols(), |m, n| {
        if q.kappa == 0.0 {
            f[(m, n)]
        } else {
            f[(m, n)] * phase(warp_exponent(net, q, m, n))
        }
    })
}

/// Regulator schedule and quadrature for the oscillatory form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpSettings {
    pub reg_epsilon: Vec<f64>,
    /// Gauss–Legendre order per panel, per dimension.
    pub order: usize,
    /// Panels per dimension of the coarse rule; the check rule uses one more.
    pub panels: usize,
    /// Integration box `[−L, L]²` in the rescaled variable.
    pub half_width: f64,
    /// Upper bound on nodes per dimension.
    pub max_nodes: usize,
    /// Largest acceptable extrapolation error estimate per entry.
    pub extrapolation_tolerance: f64,
}

impl Default for WarpSettings {
    fn default() -> Self {
        WarpSettings {
            reg_epsilon: vec![0.1, 0.05, 0.025, 0.0125],
            order: 16,
            panels: 3,
            half_width: 9.0,
            max_nodes: 256,
            extrapolation_tolerance: 1e-3,
        }
    }
}

impl WarpSettings {
    pub fn validate(&self) -> Result<()> {
        if self.reg_epsilon.len() < 2 {
            return Err(Error::invalid(
                "deformation.reg_epsilon",
                "needs at least two values",
            ));
        }
        if self
            .reg_epsilon
            .iter()
            .any(|e| !(e.is_finite() && *e > 0.0))
        {
            return Err(Error::invalid(
                "deformation.reg_epsilon",
                "values must be positive",
            ));
        }
        let mut sorted = self.reg_epsilon.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        sorted.dedup();
        if sorted.len() != self.reg_epsilon.len() {
            return Err(Error::invalid(
                "deformation.reg_epsilon",
                "values must be distinct",
            ));
        }
        if self.order == 0 || self.panels == 0 {
            return Err(Error::invalid(
                "deformation.quadrature",
                "order and panels must be ≥ 1",
            ));
        }
        if !(self.half_width > 0.0) {
            return Err(Error::invalid("deformation.half_width", "must be positive"));
        }
        if !(self.extrapolation_tolerance > 0.0) {
            return Err(Error::invalid(
                "deformation.extrapolation_tolerance",
                "must be positive",
            ));
        }
        Ok(())
    }

    fn check_budget(&self) -> Result<()> {
        let nodes = self.order * (self.panels + 1);
        if nodes > self.max_nodes {
            return Err(Error::QuadratureBudget {
                bound: f64::NAN,
                target: self.extrapolation_tolerance,
                nodes,
            });
        }
        Ok(())
    }
}

/// Extrapolated value of one distinct `(a, b)` entry factor.
#[derive(Debug, Clone, Copy)]
struct EntryFactor {
    value: C64,
    per_level: [Option<C64>; 8],
    error: f64,
}

/// `I_ε(a, b) = (2π)^{−2}∫d²u g(εb + ε²u)·m̂(u)·e^{iε a·u}`, with `a·u` Minkowski.
fn regularized_factor(
    rule: &CompositeRule,
    mollifier: Mollifier,
    a: [f64; 2],
    b: [f64; 2],
    eps: f64,
) -> C64 {
    let nodes = rule.nodes();
    let weights = rule.weights();
    let p0: Vec<C64> = nodes.iter().map(|&u| phase(eps * a[0] * u)).collect();
    let p1: Vec<C64> = nodes.iter().map(|&u| phase(-eps * a[1] * u)).collect();
    let eps2 = eps * eps;
    let rows: Vec<C64> = nodes
        .iter()
        .enumerate()
        .map(|(i, &u0)| {
            let terms: Vec<C64> = nodes
                .iter()
                .enumerate()
                .map(|(j, &u1)| {
                    let x = [eps * b[0] + eps2 * u0, eps * b[1] + eps2 * u1];
                    p1[j] * (weights[j] * mollifier.spatial(x) * mollifier.dual([u0, u1]))
                })
                .collect();
            pairwise_sum(&terms) * p0[i] * weights[i]
        })
        .collect();
    pairwise_sum(&rows) / (4.0 * std::f64::consts::PI * std::f64::consts::PI)
}

/// Neville extrapolation to `x = 0`; returns `(value, error estimate, Lebesgue constant)`.
pub(crate) fn richardson(xs: &[f64], values: &[C64]) -> (C64, f64, f64) {
    let n = xs.len();
    let mut table: Vec<Vec<C64>> = vec![values.to_vec()];
    for j in 1..n {
        let prev = &table[j - 1];
        let row: Vec<C64> = (j..n)
            .map(|i| {
                let (xi, xl) = (xs[i], xs[i - j]);
                // P_{i−j..i}(0) from P_{i−j..i−1}(0) and P_{i−j+1..i}(0).
                (prev[i - j + 1] * xl - prev[i - j] * xi) / (xl - xi)
            })
            .collect();
        table.push(row);
    }
    let best = table[n - 1][0];
    let mut err = (best - table[n - 2][1])
        .norm()
        .max((best - table[n - 2][0]).norm());
    if !err.is_finite() {
        err = f64::INFINITY;
    }
    let lebesgue: f64 = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&k| k != i)
                .map(|k| xs[k] / (xs[k] - xs[i]))
                .product::<f64>()
                .abs()
        })
        .sum();
    (best, err, lebesgue)
}

type EntryKey = ((u32, u32), (u32, u32));
type EntryPoints = ([f64; 2], [f64; 2]);

fn entry_factor(
    settings: &WarpSettings,
    mollifier: Mollifier,
    a: [f64; 2],
    b: [f64; 2],
) -> EntryFactor {
    let l = settings.half_width;
    let coarse = CompositeRule::new(-l, l, settings.panels, settings.order);
    let fine = CompositeRule::new(-l, l, settings.panels + 1, settings.order);
    let xs: Vec<f64> = settings.reg_epsilon.iter().map(|e| e * e).collect();
    let mut values = Vec::with_capacity(xs.len());
    let mut quad = 0.0f64;
    let mut per_level = [None; 8];
    for (k, &eps) in settings.reg_epsilon.iter().enumerate() {
        let v = regularized_factor(&fine, mollifier, a, b, eps);
        let w = regularized_factor(&coarse, mollifier, a, b, eps);
        quad = quad.max((v - w).norm());
        values.push(v);
        if k < per_level.len() {
            per_level[k] = Some(v);
        }
    }
    let (value, err, lebesgue) = richardson(&xs, &values);
    let outer = phase(minkowski(a, b));
    EntryFactor {
        value: value * outer,
        per_level: per_level.map(|v| v.map(|z| z * outer)),
        error: err + lebesgue * (quad + mollifier.tail_bound(l)),
    }
}

/// Oscillatory form with its certificate and regulator trace.
#[derive(Debug, Clone)]
pub struct OscillatoryWarp {
    pub matrix: Mat,
    /// Frobenius bound `‖F∘E‖₂` on the distance to the exact limit.
    pub error_estimate: f64,
    /// `(ε_reg, ‖F_Q^ε − F_Q‖)` before extrapolation.
    pub regulator_trace: Vec<(f64, f64)>,
    pub distinct_entries: usize,
}

/// Regularized double integral per distinct `(p_m, p_n)`, extrapolated in `ε_reg²`.
pub fn warp_oscillatory(
    net: &TwoDNet,
    f: &Mat,
    q: &DeformationMatrix,
    mollifier: Mollifier,
    settings: &WarpSettings,
) -> Result<OscillatoryWarp> {
    settings.validate()?;
    settings.check_budget()?;
    if settings.reg_epsilon.len() > 8 {
        return Err(Error::invalid(
            "deformation.reg_epsilon",
            "at most 8 levels",
        ));
    }
    let dim = f.nrows();
    let mut keys: BTreeMap<EntryKey, ([f64; 2], [f64; 2])> = BTreeMap::new();
    for m in 0..dim {
        for n in 0..dim {
            if f[(m, n)].norm() == 0.0 {
                continue;
            }
            let (pm, pn) = (momentum_vector(net, m), momentum_vector(net, n));
            let qd = q.apply([pm[0] - pn[0], pm[1] - pn[1]]);
            keys.entry((net.key(m), net.key(n)))
                .or_insert(([-qd[0], -qd[1]], pn));
        }
    }
    let list: Vec<(EntryKey, EntryPoints)> = keys.into_iter().collect();
    let factors = ordered_map(&list, |(_, (a, b))| {
        entry_factor(settings, mollifier, *a, *b)
    });
    let table: BTreeMap<EntryKey, EntryFactor> =
        list.iter().map(|(k, _)| *k).zip(factors).collect();

    let worst = table.values().map(|e| e.error).fold(0.0, f64::max);
    if !(worst <= settings.extrapolation_tolerance) {
        return Err(Error::NonConvergence(format!(
            "regulator extrapolation error {worst:.3e} exceeds {:.3e}",
            settings.extrapolation_tolerance
        )));
    }
    let lookup = |m: usize, n: usize| table.get(&(net.key(m), net.key(n)));
    let matrix = Mat::from_fn(dim, dim, |m, n| match lookup(m, n) {
        Some(e) => f[(m, n)] * e.value,
        None => f[(m, n)],
    });
    let error_estimate = (0..dim)
        .flat_map(|m| (0..dim).map(move |n| (m, n)))
        .map(|(m, n)| {
            lookup(m, n)
                .map(|e| f[(m, n)].norm_sqr() * e.error * e.error)
                .unwrap_or(0.0)
        })
        .sum::<f64>()
        .sqrt();
    let exact = warp_spectral(net, f, q);
    let regulator_trace = settings
        .reg_epsilon
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let level = Mat::from_fn(dim, dim, |m, n| {
                match lookup(m, n).and_then(|e| e.per_level[k]) {
                    Some(v) => f[(m, n)] * v,
                    None => f[(m, n)],
                }
            });
            (eps, op_norm(&(level - &exact)))
        })
        .collect();
    Ok(OscillatoryWarp {
        matrix,
        error_estimate,
        regulator_trace,
        distinct_entries: table.len(),
    })
}

/// A wedge element with both forms of its warped convolution.
#[derive(Debug, Clone)]
pub struct DeformedElement {
    pub original: WedgeElement,
    pub q: DeformationMatrix,
    pub spectral_form: Mat,
    pub oscillatory_form: Mat,
    pub error_estimate: f64,
    pub regulator_trace: Vec<(f64, f64)>,
    /// `‖oscillatory − spectral‖`.
    pub oracle_distance: f64,
}

impl DeformedElement {
    pub fn build(
        net: &TwoDNet,
        original: &WedgeElement,
        q: DeformationMatrix,
        mollifier: Mollifier,
        settings: &WarpSettings,
    ) -> Result<Self> {
        let spectral_form = warp_spectral(net, &original.operator, &q);
        let osc = warp_oscillatory(net, &original.operator, &q, mollifier, settings)?;
        let oracle_distance = op_norm(&(&osc.matrix - &spectral_form));
        Ok(DeformedElement {
            original: original.clone(),
            q,
            spectral_form,
            oscillatory_form: osc.matrix,
            error_estimate: osc.error_estimate,
            regulator_trace: osc.regulator_trace,
            oracle_distance,
        })
    }

    /// The spectral form as an element of the deformed wedge algebra.
    pub fn element(&self) -> WedgeElement {
        let label = format!(
            "{}_Q({:+})",
            self.original.label,
            if self.q.negated {
                -self.q.kappa
            } else {
                self.q.kappa
            }
        );
        self.original
            .with_operator(self.spectral_form.clone(), label)
    }
}

/// `max ‖[F_Q, G′_{−Q}]ψ‖` over samples and probes.
pub fn deformed_commutant_check(
    net: &TwoDNet,
    r_samples: &[WedgeElement],
    rp_samples: &[WedgeElement],
    q: &DeformationMatrix,
    probes: &ProbeSet,
) -> f64 {
    let fq: Vec<Mat> = r_samples
        .iter()
        .map(|f| warp_spectral(net, &f.operator, q))
        .collect();
    let gq: Vec<Mat> = rp_samples
        .iter()
        .map(|g| warp_spectral(net, &g.operator, &q.neg()))
        .collect();
    let mut worst = 0.0f64;
    for f in &fq {
        for g in &gq {
            worst = worst.max(probes.max_action(&commutator(f, g)));
        }
    }
    worst
}

/// Fixed Weyl smearings swept over `per_mode_cap` on otherwise fixed cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutantSweep {
    pub spacing: f64,
    pub modes: usize,
    pub energy_cap: Option<f64>,
    pub caps: Vec<u8>,
    /// Each center `c` gives `W(g_{−c})⊗W(g_c) ∈ R` and `W(g_c)⊗W(g_{−c}) ∈ R′`.
    pub centers: Vec<f64>,
    pub width: f64,
}

impl Default for CommutantSweep {
    fn default() -> Self {
        CommutantSweep {
            spacing: 1.0,
            modes: 3,
            energy_cap: Some(4.0),
            caps: vec![1, 2, 3],
            centers: vec![2.0, 2.5],
            width: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommutantTrend {
    pub kappa: f64,
    pub caps: Vec<u8>,
    pub dims: Vec<usize>,
    pub residuals: Vec<f64>,
    pub non_increasing: bool,
}

/// `max_ψ‖[F_Q, G′_{−Q}]ψ‖` on the vacuum probe for each cap of the sweep.
pub fn commutant_trend(sweep: &CommutantSweep, kappa: f64) -> Result<CommutantTrend> {
    let q = DeformationMatrix::new(kappa)?;
    let mut dims = Vec::new();
    let mut residuals = Vec::new();
    for &cap in &sweep.caps {
        let net = TwoDNet::symmetric(sweep.spacing, sweep.modes, cap, sweep.energy_cap)?;
        let grid = *net.net1.grid();
        let weyl = |c: f64| -> Result<ChiralGenerator> {
            Ok(ChiralGenerator::weyl(TestFunction::gaussian(
                &grid,
                c,
                sweep.width,
                1.0,
            )?))
        };
        let mut r = Vec::new();
        let mut rp = Vec::new();
        for &c in &sweep.centers {
            r.push(WedgeElement::product(
                &net,
                weyl(-c)?,
                weyl(c)?,
                Wedge::Right,
            )?);
            rp.push(WedgeElement::product(
                &net,
                weyl(c)?,
                weyl(-c)?,
                Wedge::Left,
            )?);
        }
        let probes = ProbeSet {
            vectors: vec![net.vacuum().clone()],
        };
        dims.push(net.dim());
        residuals.push(deformed_commutant_check(&net, &r, &rp, &q, &probes));
    }
    let non_increasing = residuals.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    Ok(CommutantTrend {
        kappa,
        caps: sweep.caps.clone(),
        dims,
        residuals,
        non_increasing,
    })
}
