use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fields::{
    field_with_plan, AsymptoticKind, ConvergenceTrace, LimitPlan, LimitSettings, ProbeSet,
};
use crate::error::{Error, Result};
use crate::fock::TestFunction;
use crate::linalg::{conj_mat, conj_vec, inner, least_squares, real, Mat, Vector, C64};
use crate::net::{ChiralGenerator, Polynomial, TwoDNet, Wedge, WedgeElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

/// Recipe for the wedge elements used to approximate a target wave.
/// Words of degree ≤ `max_degree` in fields on the moving factor, times
/// either `1` or `offset + φ(g)` on the spectator factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DictionarySpec {
    /// Distances of the packet centers from the origin.
    pub word_centers: Vec<f64>,
    pub word_width: f64,
    pub amplitude: f64,
    pub max_degree: usize,
    pub spectator_offset: f64,
    pub spectator_center: f64,
    pub spectator_width: f64,
}

impl Default for DictionarySpec {
    fn default() -> Self {
        DictionarySpec {
            word_centers: vec![2.5, 4.0, 5.5],
            word_width: 0.5,
            amplitude: 1.0,
            max_degree: 3,
            spectator_offset: 1.0,
            spectator_center: 3.0,
            spectator_width: 0.5,
        }
    }
}

/// Wedge elements for one asymptotic kind with their cached asymptotic fields.
#[derive(Debug, Clone)]
pub struct Dictionary {
    pub kind: AsymptoticKind,
    pub elements: Vec<WedgeElement>,
    pub fields: Vec<Mat>,
    /// Columns `P_± D_j Ω`.
    pub vectors: Mat,
    pub traces: Vec<ConvergenceTrace>,
}

/// Least-squares combination of dictionary elements.
#[derive(Debug, Clone)]
pub struct Approximant {
    pub coefficients: Vec<C64>,
    pub residual: f64,
    /// `Σ c_j Φ(D_j)`.
    pub field: Mat,
    /// `Σ |c_j|·(final residual of D_j)`.
    pub limit_residual: f64,
}

impl Dictionary {
    pub fn approximate(&self, target: &Vector, tolerance: f64) -> Result<Approximant> {
        let (x, residual) = least_squares(&self.vectors, target, 1e-12);
        if residual > tolerance {
            return Err(Error::ApproximantFailure { residual });
        }
        let dim = self.vectors.nrows();
        let mut field = Mat::zeros(dim, dim);
        let mut limit_residual = 0.0;
        for (j, c) in x.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            field += &self.fields[j] * *c;
            limit_residual += c.norm() * self.traces[j].final_residual;
        }
        Ok(Approximant {
            coefficients: x.iter().copied().collect(),
            residual,
            field,
            limit_residual,
        })
    }

    /// Combination of an arbitrary per-element field family with the given coefficients.
    pub fn combine(&self, fields: &[Mat], coefficients: &[C64]) -> Mat {
        let dim = self.vectors.nrows();
        let mut out = Mat::zeros(dim, dim);
        for (f, c) in fields.iter().zip(coefficients) {
            if c.norm() != 0.0 {
                out += f * *c;
            }
        }
        out
    }
}

fn side(wedge: Wedge, net: usize) -> f64 {
    // W: net 1 on ℝ₋, net 2 on ℝ₊.
    match (wedge, net) {
        (Wedge::Right, 1) | (Wedge::Left, 2) => -1.0,
        _ => 1.0,
    }
}

/// Elements of `R` (or `R′`) generating the waves of one kind.
pub fn dictionary_elements(
    net: &TwoDNet,
    kind: AsymptoticKind,
    spec: &DictionarySpec,
) -> Result<Vec<WedgeElement>> {
    let wedge = kind.wedge();
    // The + ray moves net 2, so waves live on net 1, and vice versa.
    let (word_net, spectator_net) = match kind.sign() {
        super::fields::RaySign::Plus => (1, 2),
        super::fields::RaySign::Minus => (2, 1),
    };
    let word_grid = if word_net == 1 {
        net.net1.grid()
    } else {
        net.net2.grid()
    };
    let spec_grid = if spectator_net == 1 {
        net.net1.grid()
    } else {
        net.net2.grid()
    };
    let s_word = side(wedge, word_net);
    let s_spec = side(wedge, spectator_net);

    let mut pairs: Vec<(ChiralGenerator, ChiralGenerator)> = Vec::new();
    let place = |g: ChiralGenerator| {
        if word_net == 1 {
            (g, ChiralGenerator::identity())
        } else {
            (ChiralGenerator::identity(), g)
        }
    };
    for &c in &spec.word_centers {
        let f = TestFunction::gaussian(word_grid, s_word * c, spec.word_width, spec.amplitude)?;
        pairs.push(place(ChiralGenerator::field(f)));
    }
    let g = TestFunction::gaussian(
        spec_grid,
        s_spec * spec.spectator_center,
        spec.spectator_width,
        spec.amplitude,
    )?;
    let spectator = ChiralGenerator::affine(real(spec.spectator_offset), g);
    let spectator_index = pairs.len();
    pairs.push(if spectator_net == 2 {
        (ChiralGenerator::identity(), spectator)
    } else {
        (spectator, ChiralGenerator::identity())
    });

    let n = spec.word_centers.len();
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..spec.max_degree {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..n {
                let mut v = w.clone();
                v.push(i);
                next.push(v);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }

    let mut out = Vec::with_capacity(2 * words.len());
    for w in &words {
        for with_spectator in [false, true] {
            let mut mono = w.clone();
            if with_spectator {
                mono.push(spectator_index);
            }
            let mut el = WedgeElement::new(net, pairs.clone(), Polynomial::monomial(mono), wedge)?;
            el.label = format!("w{:?}{}", w, if with_spectator { "·(c+φ)" } else { "" });
            out.push(el);
        }
    }
    Ok(out)
}

/// Plus/minus fields and their traces, standing in for the dictionary's own.
pub(crate) type FieldFamilies<'a> = (
    &'a [Mat],
    &'a [Mat],
    &'a [ConvergenceTrace],
    &'a [ConvergenceTrace],
);

/// Asymptotic fields, dictionaries and scattering states on one net.
#[derive(Debug, Clone)]
pub struct ScatteringEngine {
    pub net: TwoDNet,
    pub settings: LimitSettings,
    pub approximant_tolerance: f64,
    pub probes: ProbeSet,
    plans: BTreeMap<AsymptoticKind, LimitPlan>,
    dictionaries: BTreeMap<AsymptoticKind, Dictionary>,
}

/// Provenance of a composed state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StateTrace {
    ExactChiral,
    Pipeline {
        plus_residual: f64,
        minus_residual: f64,
        /// Propagated limit uncertainty of the composed vector.
        limit_residual: f64,
    },
}

#[derive(Debug, Clone)]
pub struct ScatteringState {
    pub plus: Vector,
    pub minus: Vector,
    pub direction: Direction,
    pub composed: Vector,
    pub trace: StateTrace,
}

impl ScatteringState {
    /// `|‖composed‖ − ‖Ψ₊‖·‖Ψ₋‖|`.
    pub fn norm_defect(&self) -> f64 {
        (self.composed.norm() - self.plus.norm() * self.minus.norm()).abs()
    }
}

impl ScatteringEngine {
    pub fn new(net: &TwoDNet, settings: LimitSettings, spec: &DictionarySpec) -> Result<Self> {
        settings.validate()?;
        let kinds = AsymptoticKind::ALL;
        let mut elements = BTreeMap::new();
        for k in kinds {
            elements.insert(k, dictionary_elements(net, k, spec)?);
        }
        // Probes: Ω, a random vector, and a few F′Ω from both wedges.
        let mut extra = Vec::new();
        for k in kinds {
            for el in elements[&k].iter().skip(2).step_by(9).take(2) {
                extra.push(&el.operator * net.vacuum());
            }
        }
        let probes = ProbeSet::new(net.vacuum().clone(), &extra, settings.seed);

        let mut plans = BTreeMap::new();
        for k in kinds {
            let direct = match k.wedge() {
                Wedge::Right => k,
                Wedge::Left => k.reflected(),
            };
            plans.insert(k, LimitPlan::direct(net, direct, &settings)?);
        }

        let mut dictionaries = BTreeMap::new();
        for k in kinds {
            let els = elements.remove(&k).unwrap();
            let proj = match k.sign() {
                super::fields::RaySign::Plus => net.pplus(),
                super::fields::RaySign::Minus => net.pminus(),
            };
            let results: Vec<_> = els
                .iter()
                .map(|el| field_with_plan(el, k, &plans[&k], &probes))
                .collect::<Result<_>>()?;
            let mut vectors = Mat::zeros(net.dim(), els.len());
            for (j, el) in els.iter().enumerate() {
                vectors.set_column(j, &(proj * (&el.operator * net.vacuum())));
            }
            let (fields, traces) = results.into_iter().map(|r| (r.operator, r.trace)).unzip();
            dictionaries.insert(
                k,
                Dictionary {
                    kind: k,
                    elements: els,
                    fields,
                    vectors,
                    traces,
                },
            );
        }
        Ok(ScatteringEngine {
            net: net.clone(),
            settings,
            approximant_tolerance: 1e-10,
            probes,
            plans,
            dictionaries,
        })
    }

    pub fn dictionary(&self, kind: AsymptoticKind) -> &Dictionary {
        &self.dictionaries[&kind]
    }

    /// Asymptotic field of an arbitrary operator in the algebra of `kind.wedge()`.
    pub fn field(&self, f: &WedgeElement, kind: AsymptoticKind) -> Result<(Mat, ConvergenceTrace)> {
        let r = field_with_plan(f, kind, &self.plans[&kind], &self.probes)?;
        Ok((r.operator, r.trace))
    }

    pub(crate) fn check_waves(&self, plus: &Vector, minus: &Vector) -> Result<()> {
        let tol = 1e-10 * (1.0 + plus.norm().max(minus.norm()));
        if (plus - self.net.pplus() * plus).norm() > tol {
            return Err(Error::invalid("psi_plus", "not in ran(P₊)"));
        }
        if (minus - self.net.pminus() * minus).norm() > tol {
            return Err(Error::invalid("psi_minus", "not in ran(P₋)"));
        }
        Ok(())
    }

    /// `Ψ₊ ⊗out Ψ₋ = Φ₊^{out}(F)Φ₋^{out}(F′)Ω` with least-squares approximants.
    pub fn out_state(&self, plus: &Vector, minus: &Vector) -> Result<ScatteringState> {
        self.check_waves(plus, minus)?;
        self.compose(
            plus,
            minus,
            AsymptoticKind::OutPlus,
            AsymptoticKind::OutMinus,
            Direction::Out,
        )
    }

    /// `Ψ₊ ⊗in Ψ₋ = J((JΨ₊) ⊗out (JΨ₋))`.
    pub fn in_state(&self, plus: &Vector, minus: &Vector) -> Result<ScatteringState> {
        self.check_waves(plus, minus)?;
        let out = self.out_state(&conj_vec(plus), &conj_vec(minus))?;
        Ok(ScatteringState {
            plus: plus.clone(),
            minus: minus.clone(),
            direction: Direction::In,
            composed: conj_vec(&out.composed),
            trace: out.trace,
        })
    }

    /// `Φ₊^{in}(G′)Φ₋^{in}(G)Ω` with approximants in `R′` resp. `R`.
    pub fn in_state_direct(&self, plus: &Vector, minus: &Vector) -> Result<ScatteringState> {
        self.check_waves(plus, minus)?;
        self.compose(
            plus,
            minus,
            AsymptoticKind::InPlus,
            AsymptoticKind::InMinus,
            Direction::In,
        )
    }

    fn compose(
        &self,
        plus: &Vector,
        minus: &Vector,
        kp: AsymptoticKind,
        km: AsymptoticKind,
        direction: Direction,
    ) -> Result<ScatteringState> {
        self.compose_fields(plus, minus, kp, km, direction, None)
    }

    /// Composition with the approximant coefficients of `plus`/`minus` applied to
    /// a substitute per-element field family (the deformed pipeline reuses the
    /// undeformed coefficients since `P_±F_QΩ = P_±FΩ`).
    pub(crate) fn compose_fields(
        &self,
        plus: &Vector,
        minus: &Vector,
        kp: AsymptoticKind,
        km: AsymptoticKind,
        direction: Direction,
        substitute: Option<FieldFamilies<'_>>,
    ) -> Result<ScatteringState> {
        let (dp, dm) = (self.dictionary(kp), self.dictionary(km));
        let ap = dp.approximate(plus, self.approximant_tolerance)?;
        let am = dm.approximate(minus, self.approximant_tolerance)?;
        let (fp, fm, lp, lm) = match substitute {
            None => (
                ap.field.clone(),
                am.field.clone(),
                ap.limit_residual,
                am.limit_residual,
            ),
            Some((pf, mf, pt, mt)) => (
                dp.combine(pf, &ap.coefficients),
                dm.combine(mf, &am.coefficients),
                weighted_residual(&ap.coefficients, pt),
                weighted_residual(&am.coefficients, mt),
            ),
        };
        let composed = &fp * (&fm * self.net.vacuum());
        let limit_residual = lp * crate::linalg::op_norm(&fm) + crate::linalg::op_norm(&fp) * lm;
        Ok(ScatteringState {
            plus: plus.clone(),
            minus: minus.clone(),
            direction,
            composed,
            trace: StateTrace::Pipeline {
                plus_residual: ap.residual,
                minus_residual: am.residual,
                limit_residual,
            },
        })
    }

    pub fn scattering_state(
        &self,
        plus: &Vector,
        minus: &Vector,
        direction: Direction,
    ) -> Result<ScatteringState> {
        match direction {
            Direction::Out => self.out_state(plus, minus),
            Direction::In => self.in_state(plus, minus),
        }
    }

    /// Composed state for `kp`/`km` with an arbitrary per-element field family.
    pub fn compose_with(
        &self,
        plus: &Vector,
        minus: &Vector,
        kinds: (AsymptoticKind, AsymptoticKind),
        plus_fields: &[Mat],
        minus_fields: &[Mat],
    ) -> Result<Vector> {
        self.check_waves(plus, minus)?;
        let direction = if kinds.0 == AsymptoticKind::OutPlus {
            Direction::Out
        } else {
            Direction::In
        };
        let tp = &self.dictionary(kinds.0).traces;
        let tm = &self.dictionary(kinds.1).traces;
        let s = self.compose_fields(
            plus,
            minus,
            kinds.0,
            kinds.1,
            direction,
            Some((plus_fields, minus_fields, tp, tm)),
        )?;
        Ok(s.composed)
    }
}

fn weighted_residual(coefficients: &[C64], traces: &[ConvergenceTrace]) -> f64 {
    coefficients
        .iter()
        .zip(traces)
        .map(|(c, t)| c.norm() * t.final_residual)
        .sum()
}

pub fn build_scattering_state(
    engine: &ScatteringEngine,
    plus: &Vector,
    minus: &Vector,
    direction: Direction,
) -> Result<ScatteringState> {
    engine.scattering_state(plus, minus, direction)
}

/// Exact chiral shortcut `(ψ₁⊗Ω̂₂, Ω̂₁⊗ψ₂) ↦ ψ₁⊗ψ₂`.
pub fn exact_chiral_state(
    net: &TwoDNet,
    plus: &Vector,
    minus: &Vector,
    direction: Direction,
) -> ScatteringState {
    let (psi1, psi2) = chiral_components(net, plus, minus);
    ScatteringState {
        plus: plus.clone(),
        minus: minus.clone(),
        direction,
        composed: net.product_state(&psi1, &psi2),
        trace: StateTrace::ExactChiral,
    }
}

/// `ψ₁` from `ψ₁⊗Ω̂₂` and `ψ₂` from `Ω̂₁⊗ψ₂`.
pub fn chiral_components(net: &TwoDNet, plus: &Vector, minus: &Vector) -> (Vector, Vector) {
    let (v1, v2) = (net.net1.vacuum_index(), net.net2.vacuum_index());
    let psi1 = Vector::from_fn(net.net1.dim(), |i, _| plus[net.index(i, v2)]);
    let psi2 = Vector::from_fn(net.net2.dim(), |i, _| minus[net.index(v1, i)]);
    (psi1, psi2)
}

/// `|(Φ₊F Φ₋F′Ω | Φ₊G Φ₋G′Ω) − (Φ₊FΩ|Φ₊GΩ)(Φ₋F′Ω|Φ₋G′Ω)|` with out fields.
pub fn check_clustering(
    engine: &ScatteringEngine,
    f: &WedgeElement,
    g: &WedgeElement,
    fp: &WedgeElement,
    gp: &WedgeElement,
) -> Result<f64> {
    let om = engine.net.vacuum();
    let (pf, _) = engine.field(f, AsymptoticKind::OutPlus)?;
    let (pg, _) = engine.field(g, AsymptoticKind::OutPlus)?;
    let (mf, _) = engine.field(fp, AsymptoticKind::OutMinus)?;
    let (mg, _) = engine.field(gp, AsymptoticKind::OutMinus)?;
    let lhs = inner(&(&pf * (&mf * om)), &(&pg * (&mg * om)));
    let rhs = inner(&(&pf * om), &(&pg * om)) * inner(&(&mf * om), &(&mg * om));
    Ok((lhs - rhs).norm())
}

/// Map of out states to in states on a sampled family.
#[derive(Debug, Clone)]
pub struct ScatteringOperator {
    pub matrix: Mat,
    pub out_rank: usize,
    pub in_rank: usize,
    pub dim: usize,
    /// `‖(S − 1)Π_out‖`.
    pub identity_residual: f64,
    /// Max entry of `Gram(out) − Gram(Ψ₊)∘Gram(Ψ₋)`.
    pub isometry_residual: f64,
    pub in_isometry_residual: f64,
    /// `max_x ‖(S U(x) − U(x) S)Π_out‖` on the sampled points.
    pub covariance_residual: f64,
    pub out_states: Vec<ScatteringState>,
    pub in_states: Vec<ScatteringState>,
}

impl ScatteringOperator {
    pub fn is_complete(&self) -> bool {
        self.out_rank == self.dim && self.in_rank == self.dim
    }
}

pub fn wave_gram(pairs: &[(Vector, Vector)]) -> Mat {
    let n = pairs.len();
    Mat::from_fn(n, n, |i, j| {
        inner(&pairs[i].0, &pairs[j].0) * inner(&pairs[i].1, &pairs[j].1)
    })
}

pub fn columns(vs: &[&Vector]) -> Mat {
    let dim = vs.first().map(|v| v.len()).unwrap_or(0);
    let mut m = Mat::zeros(dim, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

pub(crate) fn gram_residual(states: &Mat, reference: &Mat) -> f64 {
    (states.adjoint() * states - reference)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `S = IN·OUT⁺` from precomputed out and in states.
pub fn assemble_scattering_operator(
    net: &TwoDNet,
    pairs: &[(Vector, Vector)],
    out_states: Vec<ScatteringState>,
    in_states: Vec<ScatteringState>,
) -> ScatteringOperator {
    let out = columns(&out_states.iter().map(|s| &s.composed).collect::<Vec<_>>());
    let inn = columns(&in_states.iter().map(|s| &s.composed).collect::<Vec<_>>());
    let pinv = crate::linalg::pseudo_inverse(&out, 1e-10);
    let matrix = &inn * &pinv;
    let proj = &out * &pinv;
    let identity_residual = crate::linalg::op_norm(&(&matrix * &proj - &proj));
    let g = wave_gram(pairs);
    let samples = net_sample_points();
    let covariance_residual = samples
        .iter()
        .map(|&x| {
            let u = net.translation_unitary(x);
            crate::linalg::op_norm(&((&matrix * &u - &u * &matrix) * &proj))
        })
        .fold(0.0, f64::max);
    ScatteringOperator {
        out_rank: crate::linalg::rank(&out, 1e-8),
        in_rank: crate::linalg::rank(&inn, 1e-8),
        dim: net.dim(),
        identity_residual,
        isometry_residual: gram_residual(&out, &g),
        in_isometry_residual: gram_residual(&inn, &g),
        covariance_residual,
        matrix,
        out_states,
        in_states,
    }
}

pub(crate) fn net_sample_points() -> Vec<crate::net::SpacetimePoint> {
    use crate::net::SpacetimePoint as X;
    vec![
        X::new(0.0, 0.0),
        X::new(0.3, 1.2),
        X::new(-0.4, -1.5),
        X::new(1.1, 0.2),
        X::new(-0.7, 2.3),
    ]
}

pub fn scattering_operator(
    engine: &ScatteringEngine,
    pairs: &[(Vector, Vector)],
) -> Result<ScatteringOperator> {
    let out: Vec<ScatteringState> = pairs
        .iter()
        .map(|(p, m)| engine.out_state(p, m))
        .collect::<Result<_>>()?;
    let inn: Vec<ScatteringState> = pairs
        .iter()
        .map(|(p, m)| engine.in_state(p, m))
        .collect::<Result<_>>()?;
    let s = assemble_scattering_operator(&engine.net, pairs, out, inn);
    if s.out_rank < pairs.len().min(s.dim) {
        log::warn!(
            "sampled out states span rank {} of {} pairs",
            s.out_rank,
            pairs.len()
        );
    }
    Ok(s)
}

/// All `(ψ₁⊗Ω̂₂, Ω̂₁⊗ψ₂)` with `ψᵢ` running over occupation basis vectors.
pub fn basis_pairs(net: &TwoDNet) -> Vec<(Vector, Vector)> {
    let (v1, v2) = (net.net1.vacuum_index(), net.net2.vacuum_index());
    let mut out = Vec::with_capacity(net.dim());
    for i1 in 0..net.net1.dim() {
        for i2 in 0..net.net2.dim() {
            let plus = crate::linalg::basis_vector(net.dim(), net.index(i1, v2));
            let minus = crate::linalg::basis_vector(net.dim(), net.index(v1, i2));
            out.push((plus, minus));
        }
    }
    out
}

/// `J·M·J` for a matrix, exposed for the deformed pipeline.
pub fn reflect(m: &Mat) -> Mat {
    conj_mat(m)
}
