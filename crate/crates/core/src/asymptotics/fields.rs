use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kernel::{AveragingKernel, BaseProfile, QuadratureSettings};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

use crate::linalg::{conj_mat, ordered_map, Mat, Vector, C64};
use crate::net::{TwoDNet, Wedge, WedgeElement};

/// A Hilbert space on which translations act diagonally with integer
/// chiral momentum keys, so that `U(x)` is fixed by `(p, q)` per basis state.
pub trait LightconeSpectrum: Sync {
    fn dim(&self) -> usize;
    /// Chiral momenta in units of the net-1 / net-2 grid spacings.
    fn chiral_key(&self, i: usize) -> (u32, u32);
    fn spacings(&self) -> (f64, f64);
    fn vacuum(&self) -> Vector;
}

impl LightconeSpectrum for TwoDNet {
    fn dim(&self) -> usize {
        TwoDNet::dim(self)
    }

    fn chiral_key(&self, i: usize) -> (u32, u32) {
        self.key(i)
    }

    fn spacings(&self) -> (f64, f64) {
        (self.net1.grid().spacing(), self.net2.grid().spacing())
    }

    fn vacuum(&self) -> Vector {
        TwoDNet::vacuum(self).clone()
    }
}

/// Direction of the light ray `t_± = (t, ±t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RaySign {
    Plus,
    Minus,
}

impl RaySign {
    /// Frequency of the matrix unit `|m⟩⟨n|` along the ray: `(E_m−E_n) ∓ (P_m−P_n)`.
    /// Along `(t, t)` only net 2 moves, along `(t, −t)` only net 1.
    pub fn frequency_units<S: LightconeSpectrum + ?Sized>(
        self,
        space: &S,
        m: usize,
        n: usize,
    ) -> (i64, f64) {
        let (km, kn) = (space.chiral_key(m), space.chiral_key(n));
        let (d1, d2) = space.spacings();
        match self {
            RaySign::Plus => (km.1 as i64 - kn.1 as i64, SQRT_2 * d2),
            RaySign::Minus => (km.0 as i64 - kn.0 as i64, SQRT_2 * d1),
        }
    }
}

/// The four asymptotic fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AsymptoticKind {
    OutPlus,
    InMinus,
    InPlus,
    OutMinus,
}

impl AsymptoticKind {
    pub const ALL: [AsymptoticKind; 4] = [
        AsymptoticKind::OutPlus,
        AsymptoticKind::InMinus,
        AsymptoticKind::InPlus,
        AsymptoticKind::OutMinus,
    ];

    pub fn sign(self) -> RaySign {
        match self {
            AsymptoticKind::OutPlus | AsymptoticKind::InPlus => RaySign::Plus,
            AsymptoticKind::InMinus | AsymptoticKind::OutMinus => RaySign::Minus,
        }
    }

    /// `+1` for `T → +∞`, `−1` for `T → −∞`.
    pub fn time_direction(self) -> f64 {
        match self {
            AsymptoticKind::OutPlus | AsymptoticKind::OutMinus => 1.0,
            AsymptoticKind::InPlus | AsymptoticKind::InMinus => -1.0,
        }
    }

    /// Wedge the argument must belong to.
    pub fn wedge(self) -> Wedge {
        match self {
            AsymptoticKind::OutPlus | AsymptoticKind::InMinus => Wedge::Right,
            AsymptoticKind::InPlus | AsymptoticKind::OutMinus => Wedge::Left,
        }
    }

    /// The kind on `R` that the primed kinds are conjugated from.
    pub fn reflected(self) -> AsymptoticKind {
        match self {
            AsymptoticKind::OutPlus => AsymptoticKind::InPlus,
            AsymptoticKind::InPlus => AsymptoticKind::OutPlus,
            AsymptoticKind::InMinus => AsymptoticKind::OutMinus,
            AsymptoticKind::OutMinus => AsymptoticKind::InMinus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AsymptoticKind::OutPlus => "phi_plus_out",
            AsymptoticKind::InMinus => "phi_minus_in",
            AsymptoticKind::InPlus => "phi_plus_in",
            AsymptoticKind::OutMinus => "phi_minus_out",
        }
    }
}

/// Settings shared by every strong limit `T → ±∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSettings {
    pub profile: BaseProfile,
    pub kernel_exponent: f64,
    /// `|T|` values, strictly increasing.
    pub schedule: Vec<f64>,
    pub quadrature: QuadratureSettings,
    /// Residuals below this absolute level count as converged.
    pub floor: f64,
    pub seed: u64,
}

impl Default for LimitSettings {
    fn default() -> Self {
        LimitSettings {
            profile: BaseProfile::Gaussian,
            kernel_exponent: 0.5,
            schedule: vec![8.0, 16.0, 32.0, 64.0],
            quadrature: QuadratureSettings::default(),
            floor: 1e-12,
            seed: 7,
        }
    }
}

impl LimitSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.kernel_exponent > 0.0 && self.kernel_exponent < 1.0) {
            return Err(Error::invalid(
                "kernel_exponent",
                format!("must lie in (0, 1), got {}", self.kernel_exponent),
            ));
        }
        if self.schedule.is_empty() {
            return Err(Error::invalid("schedule", "T schedule is empty"));
        }
        if self.schedule[0] <= 0.0 || self.schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "schedule",
                "T schedule must be positive and strictly increasing",
            ));
        }
        if !(self.floor > 0.0) {
            return Err(Error::invalid("floor", "must be positive"));
        }
        Ok(())
    }

    pub fn kernel(&self, center: f64) -> Result<AveragingKernel> {
        AveragingKernel::new(self.profile, self.kernel_exponent, center)
    }
}

/// Hadamard factor `K_{mn} = ∫ h_T(t) e^{iω_{mn}t} dt` for one `T` and ray.
#[derive(Debug, Clone)]
pub struct SmearingPlan {
    pub center: f64,
    pub sign: RaySign,
    pub factors: Mat,
    /// Largest scalar quadrature bound among the frequencies present.
    pub quadrature_bound: f64,
    /// `max |ĥ(|T|^ε ω)|` over nonzero frequencies present.
    pub tail: f64,
    /// Per-entry quadrature bounds and `|ĥ(|T|^ε ω_{mn})|·[ω_{mn} ≠ 0]`.
    pub entry_bounds: DMatrix<f64>,
    pub entry_tails: DMatrix<f64>,
    pub nodes: usize,
}

impl SmearingPlan {
    pub fn build<S: LightconeSpectrum + ?Sized>(
        space: &S,
        kernel: &AveragingKernel,
        sign: RaySign,
        quadrature: &QuadratureSettings,
    ) -> Result<Self> {
        let dim = space.dim();
        let mut units: BTreeMap<i64, f64> = BTreeMap::new();
        let mut table = vec![0i64; dim * dim];
        for m in 0..dim {
            for n in 0..dim {
                let (u, scale) = sign.frequency_units(space, m, n);
                units.insert(u, scale);
                table[m * dim + n] = u;
            }
        }
        let keys: Vec<(i64, f64)> = units.into_iter().collect();
        // ω = 0 is the normalization ∫h_T = 1, validated separately; use it exactly.
        kernel.check_normalization(quadrature)?;
        let transforms = ordered_map(&keys, |&(u, scale)| {
            if u == 0 {
                Ok(super::kernel::KernelTransform {
                    value: C64::new(1.0, 0.0),
                    bound: 0.0,
                    nodes: 0,
                })
            } else {
                kernel.transform(u as f64 * scale, quadrature)
            }
        });
        let mut values: BTreeMap<i64, (C64, f64, f64)> = BTreeMap::new();
        let (mut bound, mut tail, mut nodes) = (0.0f64, 0.0f64, 0usize);
        for ((u, scale), t) in keys.iter().zip(transforms) {
            let t = t?;
            bound = bound.max(t.bound);
            nodes = nodes.max(t.nodes);
            let h = if *u != 0 {
                kernel
                    .profile
                    .fourier(kernel.width() * *u as f64 * scale)
                    .abs()
            } else {
                0.0
            };
            tail = tail.max(h);
            values.insert(*u, (t.value, t.bound, h));
        }
        let factors = Mat::from_fn(dim, dim, |m, n| values[&table[m * dim + n]].0);
        let entry_bounds = DMatrix::from_fn(dim, dim, |m, n| values[&table[m * dim + n]].1);
        let entry_tails = DMatrix::from_fn(dim, dim, |m, n| values[&table[m * dim + n]].2);
        Ok(SmearingPlan {
            center: kernel.center,
            sign,
            factors,
            quadrature_bound: bound,
            tail,
            entry_bounds,
            entry_tails,
            nodes,
        })
    }

    /// `‖F∘B‖₂`, a bound on the operator-norm quadrature error for `F`.
    pub fn quadrature_error(&self, f: &Mat) -> f64 {
        weighted_frobenius(f, &self.entry_bounds)
    }

    /// `‖F∘|ĥ|‖₂` over nonzero frequencies: bound on the distance to the limit.
    pub fn tail_norm(&self, f: &Mat) -> f64 {
        weighted_frobenius(f, &self.entry_tails)
    }

    pub fn apply(&self, f: &Mat) -> Mat {
        f.component_mul(&self.factors)
    }
}

fn weighted_frobenius(f: &Mat, w: &DMatrix<f64>) -> f64 {
    f.iter()
        .zip(w.iter())
        .map(|(z, b)| z.norm_sqr() * b * b)
        .sum::<f64>()
        .sqrt()
}

/// Result of one time average `F_±(h_T)`.
#[derive(Debug, Clone)]
pub struct Smeared {
    pub operator: Mat,
    /// Bound on the operator-norm deviation from the exact integral.
    pub error_bound: f64,
    pub nodes: usize,
}

/// `F_±(h_T) = ∫ h_T(t) α_{(t,±t)}(F) dt`. In the joint eigenbasis `α` acts
/// by phases on matrix units, so each entry picks up one scalar transform.
pub fn smear_along_ray<S: LightconeSpectrum + ?Sized>(
    space: &S,
    f: &Mat,
    kernel: &AveragingKernel,
    sign: RaySign,
    quadrature: &QuadratureSettings,
) -> Result<Smeared> {
    let plan = SmearingPlan::build(space, kernel, sign, quadrature)?;
    Ok(Smeared {
        operator: plan.apply(f),
        error_bound: plan.quadrature_error(f),
        nodes: plan.nodes,
    })
}

/// One row of a convergence trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    /// `max_ψ ‖(F(h_T) − L)ψ‖` over the probe set.
    pub residual: f64,
    /// A priori bound `‖F‖₂·max|ĥ(|T|^ε ω)| + quadrature`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub label: String,
    pub points: Vec<TracePoint>,
    pub monotone: bool,
    /// Estimated distance of the limit estimate from the true limit.
    pub final_residual: f64,
}

impl ConvergenceTrace {
    pub fn exact(label: impl Into<String>) -> Self {
        ConvergenceTrace {
            label: label.into(),
            points: Vec::new(),
            monotone: true,
            final_residual: 0.0,
        }
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.residual).collect()
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("T,residual,bound\n");
        for p in &self.points {
            s.push_str(&format!("{},{:e},{:e}\n", p.t, p.residual, p.bound));
        }
        s
    }
}

/// Probe vectors on which strong limits are certified.
#[derive(Debug, Clone)]
pub struct ProbeSet {
    pub vectors: Vec<Vector>,
}

impl ProbeSet {
    /// `Ω`, a seeded random unit vector, and the given extra vectors (normalized).
    pub fn new(vacuum: Vector, extra: &[Vector], seed: u64) -> Self {
        let dim = vacuum.len();
        let mut vectors = vec![vacuum];
        vectors.push(random_unit_vector(dim, seed));
        for v in extra {
            let n = v.norm();
            if n > 0.0 {
                vectors.push(v / C64::new(n, 0.0));
            }
        }
        ProbeSet { vectors }
    }

    pub fn max_action(&self, a: &Mat) -> f64 {
        self.vectors
            .iter()
            .map(|v| (a * v).norm())
            .fold(0.0, f64::max)
    }
}

pub fn random_unit_vector(dim: usize, seed: u64) -> Vector {
    use rand::RngExt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = Vector::from_fn(dim, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Precomputed smearing plans along one schedule; applying them to many
/// operators costs one Hadamard product per `T`.
#[derive(Debug, Clone)]
pub struct LimitPlan {
    pub kind: AsymptoticKind,
    pub plans: Vec<SmearingPlan>,
    pub floor: f64,
}

impl LimitPlan {
    /// Plan for `T → ±∞` along the ray of `kind`, evaluated directly (no `J`).
    pub fn direct<S: LightconeSpectrum + ?Sized>(
        space: &S,
        kind: AsymptoticKind,
        settings: &LimitSettings,
    ) -> Result<Self> {
        settings.validate()?;
        let centers: Vec<f64> = settings
            .schedule
            .iter()
            .map(|t| t * kind.time_direction())
            .collect();
        let plans = ordered_map(&centers, |&c| {
            let k = settings.kernel(c)?;
            SmearingPlan::build(space, &k, kind.sign(), &settings.quadrature)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(LimitPlan {
            kind,
            plans,
            floor: settings.floor,
        })
    }

    /// Runs the schedule on `f` and returns the limit estimate with its trace.
    pub fn limit(
        &self,
        f: &Mat,
        probes: &ProbeSet,
        label: &str,
    ) -> Result<(Mat, ConvergenceTrace)> {
        let fnorm = f.norm();
        let smeared: Vec<Mat> = self.plans.iter().map(|p| p.apply(f)).collect();
        let last = smeared.last().expect("schedule validated nonempty");
        let k = smeared.len();

        // Model-ratio tail: successive differences shrink like ĥ(|T|^ε·gap).
        let final_quad = self.plans[k - 1].quadrature_error(f);
        let model_tail = if k >= 2 {
            let d = probes.max_action(&(&smeared[k - 1] - &smeared[k - 2]));
            let (prev, cur) = (
                self.plans[k - 2].tail_norm(f),
                self.plans[k - 1].tail_norm(f),
            );
            let rho = if prev > 0.0 {
                (cur / prev).min(0.5)
            } else {
                0.0
            };
            d * rho / (1.0 - rho)
        } else {
            self.plans[0].tail_norm(f)
        };
        let final_residual = model_tail + final_quad;

        let points: Vec<TracePoint> = self
            .plans
            .iter()
            .zip(&smeared)
            .enumerate()
            .map(|(i, (p, a))| {
                let r = if i + 1 == k {
                    final_residual
                } else {
                    probes.max_action(&(a - last)) + final_residual
                };
                TracePoint {
                    t: p.center,
                    residual: r,
                    bound: p.tail_norm(f) + p.quadrature_error(f),
                }
            })
            .collect();
        let floor = self.floor * fnorm.max(1.0);
        let monotone = points
            .windows(2)
            .all(|w| w[1].residual <= 0.5 * w[0].residual || w[1].residual <= floor);
        let trace = ConvergenceTrace {
            label: label.to_string(),
            points,
            monotone,
            final_residual,
        };
        if !monotone {
            return Err(Error::NonConvergence(format!(
                "{label}: residuals {:?} do not halve per doubling of T",
                trace.residuals()
            )));
        }
        Ok((last.clone(), trace))
    }
}

/// Asymptotic field with its certificate.
#[derive(Debug, Clone)]
pub struct AsymptoticField {
    pub kind: AsymptoticKind,
    pub operator: Mat,
    pub trace: ConvergenceTrace,
}

/// `Φ₊^{out}`, `Φ₋^{in}` by the direct limit on `R`; `Φ₊^{in}(F′) = JΦ₊^{out}(JF′J)J`
/// and `Φ₋^{out}(F′) = JΦ₋^{in}(JF′J)J` on `R′`.
pub fn asymptotic_field(
    net: &TwoDNet,
    f: &WedgeElement,
    kind: AsymptoticKind,
    settings: &LimitSettings,
) -> Result<AsymptoticField> {
    let probes = ProbeSet::new(net.vacuum().clone(), &[], settings.seed);
    let plan = match kind.wedge() {
        Wedge::Right => LimitPlan::direct(net, kind, settings)?,
        Wedge::Left => LimitPlan::direct(net, kind.reflected(), settings)?,
    };
    field_with_plan(f, kind, &plan, &probes)
}

pub(crate) fn field_with_plan(
    f: &WedgeElement,
    kind: AsymptoticKind,
    plan: &LimitPlan,
    probes: &ProbeSet,
) -> Result<AsymptoticField> {
    if f.wedge != kind.wedge() {
        return Err(Error::invalid(
            "kind",
            format!(
                "{} needs an element of the {} algebra, got {}",
                kind.name(),
                kind.wedge(),
                f.wedge
            ),
        ));
    }
    let label = format!("{}({})", kind.name(), f.label);
    match kind.wedge() {
        Wedge::Right => {
            debug_assert_eq!(plan.kind, kind);
            let (op, trace) = plan.limit(&f.operator, probes, &label)?;
            Ok(AsymptoticField {
                kind,
                operator: op,
                trace,
            })
        }
        Wedge::Left => {
            debug_assert_eq!(plan.kind, kind.reflected());
            // J is entrywise conjugation in the product basis; probes are mapped along.
            let jprobes = ProbeSet {
                vectors: probes.vectors.iter().map(crate::linalg::conj_vec).collect(),
            };
            let (op, trace) = plan.limit(&conj_mat(&f.operator), &jprobes, &label)?;
            Ok(AsymptoticField {
                kind,
                operator: conj_mat(&op),
                trace,
            })
        }
    }
}

/// Primed-wedge fields from the direct `T → ∓∞` limit, bypassing `J`.
pub fn asymptotic_field_direct(
    net: &TwoDNet,
    f: &WedgeElement,
    kind: AsymptoticKind,
    settings: &LimitSettings,
) -> Result<AsymptoticField> {
    let probes = ProbeSet::new(net.vacuum().clone(), &[], settings.seed);
    let plan = LimitPlan::direct(net, kind, settings)?;
    let (op, trace) = plan.limit(
        &f.operator,
        &probes,
        &format!("{}({})", kind.name(), f.label),
    )?;
    Ok(AsymptoticField {
        kind,
        operator: op,
        trace,
    })
}
