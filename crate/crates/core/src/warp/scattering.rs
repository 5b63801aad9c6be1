use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::deformation::{warp_spectral, DeformationMatrix};
use crate::asymptotics::states::assemble_scattering_operator;
use crate::asymptotics::{
    AsymptoticKind, ConvergenceTrace, Direction, ScatteringEngine, ScatteringOperator,
    ScatteringState,
};
use crate::error::{Error, Result};
use crate::linalg::{inner, op_norm, Mat, Vector, C64};
use crate::net::Wedge;

/// Asymptotic fields of the warped dictionaries: `F_Q` on `R`, `F′_{−Q}` on `R′`.
#[derive(Debug, Clone)]
pub struct DeformedPipeline<'a> {
    pub engine: &'a ScatteringEngine,
    pub q: DeformationMatrix,
    /// Absolute tolerance for the agreement of the two paths.
    pub path_tolerance: f64,
    fields: BTreeMap<AsymptoticKind, (Vec<Mat>, Vec<ConvergenceTrace>)>,
}

/// A deformed scattering state computed along both paths.
#[derive(Debug, Clone)]
pub struct DeformedState {
    /// Path (ii): the asymptotic limit of warped generators.
    pub state: ScatteringState,
    /// Path (i): `e^{∓(i/2)κ(H²−P²)}` applied to the undeformed state.
    pub phased: Vector,
    pub path_distance: f64,
}

impl<'a> DeformedPipeline<'a> {
    pub fn new(engine: &'a ScatteringEngine, kappa: f64) -> Result<Self> {
        let q = DeformationMatrix::new(kappa)?;
        let mut fields = BTreeMap::new();
        for kind in AsymptoticKind::ALL {
            let qk = match kind.wedge() {
                Wedge::Right => q,
                Wedge::Left => q.neg(),
            };
            let dict = engine.dictionary(kind);
            let mut ops = Vec::with_capacity(dict.elements.len());
            let mut traces = Vec::with_capacity(dict.elements.len());
            for el in &dict.elements {
                let warped = el.with_operator(
                    warp_spectral(&engine.net, &el.operator, &qk),
                    format!("{}_Q", el.label),
                );
                let (op, trace) = engine.field(&warped, kind)?;
                ops.push(op);
                traces.push(trace);
            }
            fields.insert(kind, (ops, traces));
        }
        Ok(DeformedPipeline {
            engine,
            q,
            path_tolerance: 1e-6,
            fields,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.q.kappa()
    }

    fn compose(
        &self,
        plus: &Vector,
        minus: &Vector,
        kp: AsymptoticKind,
        km: AsymptoticKind,
        direction: Direction,
    ) -> Result<ScatteringState> {
        let (pf, pt) = &self.fields[&kp];
        let (mf, mt) = &self.fields[&km];
        self.engine
            .compose_fields(plus, minus, kp, km, direction, Some((pf, mf, pt, mt)))
    }

    fn both_paths(
        &self,
        pipeline: ScatteringState,
        undeformed: &ScatteringState,
        sign: f64,
    ) -> Result<DeformedState> {
        let phased = self.engine.net.mass_phase(sign * 0.5 * self.kappa()) * &undeformed.composed;
        let path_distance = (&pipeline.composed - &phased).norm();
        let scale = 1.0 + pipeline.plus.norm() * pipeline.minus.norm();
        if !(path_distance <= self.path_tolerance * scale) {
            return Err(Error::PathDisagreement {
                distance: path_distance,
                tolerance: self.path_tolerance * scale,
            });
        }
        Ok(DeformedState {
            state: pipeline,
            phased,
            path_distance,
        })
    }

    /// `Ψ₊ ×_out Ψ₋` of the deformed theory.
    pub fn out_state(&self, plus: &Vector, minus: &Vector) -> Result<DeformedState> {
        self.engine.check_waves(plus, minus)?;
        let pipeline = self.compose(
            plus,
            minus,
            AsymptoticKind::OutPlus,
            AsymptoticKind::OutMinus,
            Direction::Out,
        )?;
        let undeformed = self.engine.out_state(plus, minus)?;
        self.both_paths(pipeline, &undeformed, -1.0)
    }

    /// `Ψ₊ ×_in Ψ₋` of the deformed theory, from `G′_{−Q} ∈ R′` and `G_Q ∈ R`.
    pub fn in_state(&self, plus: &Vector, minus: &Vector) -> Result<DeformedState> {
        self.engine.check_waves(plus, minus)?;
        let pipeline = self.compose(
            plus,
            minus,
            AsymptoticKind::InPlus,
            AsymptoticKind::InMinus,
            Direction::In,
        )?;
        let undeformed = self.engine.in_state(plus, minus)?;
        self.both_paths(pipeline, &undeformed, 1.0)
    }

    /// `S_κ` from the deformed states, with the comparison to `e^{iκ(H²−P²)}S`.
    pub fn scattering_operator(&self, pairs: &[(Vector, Vector)]) -> Result<DeformedScattering> {
        let mut outs = Vec::with_capacity(pairs.len());
        let mut ins = Vec::with_capacity(pairs.len());
        let mut path_residual = 0.0f64;
        for (p, m) in pairs {
            let o = self.out_state(p, m)?;
            let i = self.in_state(p, m)?;
            path_residual = path_residual.max(o.path_distance).max(i.path_distance);
            outs.push(o.state);
            ins.push(i.state);
        }
        let undeformed_out: Vec<ScatteringState> = pairs
            .iter()
            .map(|(p, m)| self.engine.out_state(p, m))
            .collect::<Result<_>>()?;
        let undeformed_in: Vec<ScatteringState> = pairs
            .iter()
            .map(|(p, m)| self.engine.in_state(p, m))
            .collect::<Result<_>>()?;
        let net = &self.engine.net;
        let s = assemble_scattering_operator(net, pairs, undeformed_out, undeformed_in);
        let sk = assemble_scattering_operator(net, pairs, outs, ins);
        if sk.out_rank < pairs.len().min(sk.dim) {
            log::warn!(
                "deformed out states span rank {} of {} pairs",
                sk.out_rank,
                pairs.len()
            );
        }

        let mass = net.mass_phase(self.kappa());
        let out_cols = crate::asymptotics::states::columns(
            &sk.out_states
                .iter()
                .map(|s| &s.composed)
                .collect::<Vec<_>>(),
        );
        let proj = &out_cols * crate::linalg::pseudo_inverse(&out_cols, 1e-10);
        let oracle_residual = op_norm(&((&sk.matrix - &mass * &s.matrix) * &proj));
        let unitarity_residual = op_norm(
            &((sk.matrix.adjoint() * &sk.matrix - Mat::identity(net.dim(), net.dim())) * &proj),
        );

        let phases: Vec<PairPhase> = sk
            .out_states
            .iter()
            .map(|o| {
                let v = &o.composed;
                let lambda = inner(v, &(&sk.matrix * v)) / v.norm_squared();
                let index = (0..v.len())
                    .max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
                    .unwrap_or(0);
                let expected = crate::linalg::phase(self.kappa() * net.mass_squared(index));
                PairPhase {
                    index,
                    key: net.key(index),
                    momenta: net.chiral_momenta(index),
                    measured: lambda,
                    expected,
                    phase_error: (lambda / expected).arg().abs(),
                    modulus_defect: (lambda.norm() - 1.0).abs(),
                }
            })
            .collect();
        let mut spread = 0.0f64;
        for a in &phases {
            for b in &phases {
                spread = spread.max((a.measured - b.measured).norm());
            }
        }
        Ok(DeformedScattering {
            kappa: self.kappa(),
            oracle_residual,
            unitarity_residual,
            path_residual,
            scalar_distance_lower_bound: 0.5 * spread,
            phases,
            undeformed: s,
            operator: sk,
        })
    }
}

/// Diagonal entry of `S_κ` on one basis pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairPhase {
    pub index: usize,
    pub key: (u32, u32),
    pub momenta: (f64, f64),
    pub measured: C64,
    pub expected: C64,
    /// `|arg(measured/expected)|`.
    pub phase_error: f64,
    pub modulus_defect: f64,
}

impl PairPhase {
    /// Wrapped distance between the measured phases of two pairs.
    pub fn phase_gap(&self, other: &PairPhase) -> f64 {
        (self.measured / other.measured).arg().abs()
    }
}

#[derive(Debug, Clone)]
pub struct DeformedScattering {
    pub kappa: f64,
    pub operator: ScatteringOperator,
    pub undeformed: ScatteringOperator,
    /// `‖(S_κ − e^{iκ(H²−P²)}S)Π_out‖`.
    pub oracle_residual: f64,
    /// `‖(S_κ*S_κ − 1)Π_out‖`.
    pub unitarity_residual: f64,
    pub path_residual: f64,
    /// `½ max |λ_i − λ_j|`, a lower bound for `min_c ‖S_κ − c‖` on the span.
    pub scalar_distance_lower_bound: f64,
    pub phases: Vec<PairPhase>,
}

impl DeformedScattering {
    pub fn phase_for_key(&self, key: (u32, u32)) -> Option<&PairPhase> {
        self.phases.iter().find(|p| p.key == key)
    }

    pub fn max_phase_error(&self) -> f64 {
        self.phases
            .iter()
            .map(|p| p.phase_error)
            .fold(0.0, f64::max)
    }
}

/// One-shot deformed out state.
pub fn deformed_out_state(
    engine: &ScatteringEngine,
    plus: &Vector,
    minus: &Vector,
    kappa: f64,
) -> Result<DeformedState> {
    DeformedPipeline::new(engine, kappa)?.out_state(plus, minus)
}

pub fn deformed_in_state(
    engine: &ScatteringEngine,
    plus: &Vector,
    minus: &Vector,
    kappa: f64,
) -> Result<DeformedState> {
    DeformedPipeline::new(engine, kappa)?.in_state(plus, minus)
}

pub fn deformed_scattering_operator(
    engine: &ScatteringEngine,
    kappa: f64,
    pairs: &[(Vector, Vector)],
) -> Result<DeformedScattering> {
    DeformedPipeline::new(engine, kappa)?.scattering_operator(pairs)
}
