//! Closed forms for the chiral model, the asymptotic Borchers triple on
//! `H₊⊗H₋`, and the intertwiner onto `H`.

use serde::Serialize;

use super::fields::{AsymptoticKind, LightconeSpectrum, LimitPlan, LimitSettings, ProbeSet};
use super::states::{net_sample_points, ScatteringEngine};
use crate::error::Result;
use crate::linalg::{commutator, kron, kron_vec, op_norm, Mat, Vector, C64};
use crate::net::{SpacetimePoint, Translate, TwoDNet, WedgeElement};

/// `(id ⊗ ω₂)(F)`: block of `F` between net-2 vacuum components.
pub fn partial_vacuum_expectation_2(net: &TwoDNet, f: &Mat) -> Mat {
    let v2 = net.net2.vacuum_index();
    let d1 = net.net1.dim();
    Mat::from_fn(d1, d1, |i, j| f[(net.index(i, v2), net.index(j, v2))])
}

/// `(ω₁ ⊗ id)(F)`.
pub fn partial_vacuum_expectation_1(net: &TwoDNet, f: &Mat) -> Mat {
    let v1 = net.net1.vacuum_index();
    let d2 = net.net2.dim();
    Mat::from_fn(d2, d2, |i, j| f[(net.index(v1, i), net.index(v1, j))])
}

/// Chiral closed form of an asymptotic field: the `+` fields act as
/// `(id⊗ω₂)(F)⊗1`, the `−` fields as `1⊗(ω₁⊗id)(F)`.
pub fn chiral_asymptotic_field(net: &TwoDNet, f: &Mat, kind: AsymptoticKind) -> Mat {
    match kind.sign() {
        super::fields::RaySign::Plus => net.lift1(&partial_vacuum_expectation_2(net, f)),
        super::fields::RaySign::Minus => net.lift2(&partial_vacuum_expectation_1(net, f)),
    }
}

/// `H₊⊗H₋` with `U^{as}(x) = U(x)|_{H₊} ⊗ U(x)|_{H₋}`.
#[derive(Debug, Clone)]
pub struct AsymptoticSpace {
    /// Indices in `H` spanning `H₊` (resp. `H₋`), in occupation order.
    pub plus_indices: Vec<usize>,
    pub minus_indices: Vec<usize>,
    keys: Vec<(u32, u32)>,
    spacings: (f64, f64),
}

impl AsymptoticSpace {
    pub fn new(net: &TwoDNet) -> Self {
        let dim = net.dim();
        let plus_indices: Vec<usize> = (0..dim).filter(|&i| net.key(i).1 == 0).collect();
        let minus_indices: Vec<usize> = (0..dim).filter(|&i| net.key(i).0 == 0).collect();
        let mut keys = Vec::with_capacity(plus_indices.len() * minus_indices.len());
        for &a in &plus_indices {
            for &b in &minus_indices {
                let (ka, kb) = (net.key(a), net.key(b));
                keys.push((ka.0 + kb.0, ka.1 + kb.1));
            }
        }
        AsymptoticSpace {
            plus_indices,
            minus_indices,
            keys,
            spacings: (net.net1.grid().spacing(), net.net2.grid().spacing()),
        }
    }

    pub fn plus_dim(&self) -> usize {
        self.plus_indices.len()
    }

    pub fn minus_dim(&self) -> usize {
        self.minus_indices.len()
    }

    /// Compression of `A` to `H₊`.
    pub fn restrict_plus(&self, a: &Mat) -> Mat {
        restrict(a, &self.plus_indices)
    }

    pub fn restrict_minus(&self, a: &Mat) -> Mat {
        restrict(a, &self.minus_indices)
    }

    pub fn vector_plus(&self, v: &Vector) -> Vector {
        Vector::from_fn(self.plus_dim(), |i, _| v[self.plus_indices[i]])
    }

    pub fn vector_minus(&self, v: &Vector) -> Vector {
        Vector::from_fn(self.minus_dim(), |i, _| v[self.minus_indices[i]])
    }

    pub fn translation_phases(&self, x: SpacetimePoint) -> Vec<C64> {
        let (s1, s2) = x.lightline();
        self.keys
            .iter()
            .map(|&(p, q)| {
                crate::linalg::phase(
                    p as f64 * self.spacings.0 * s1 + q as f64 * self.spacings.1 * s2,
                )
            })
            .collect()
    }

    pub fn translation_unitary(&self, x: SpacetimePoint) -> Mat {
        Mat::from_diagonal(&Vector::from_vec(self.translation_phases(x)))
    }
}

fn restrict(a: &Mat, idx: &[usize]) -> Mat {
    Mat::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

impl LightconeSpectrum for AsymptoticSpace {
    fn dim(&self) -> usize {
        self.keys.len()
    }

    fn chiral_key(&self, i: usize) -> (u32, u32) {
        self.keys[i]
    }

    fn spacings(&self) -> (f64, f64) {
        self.spacings
    }

    fn vacuum(&self) -> Vector {
        // Ω ⊗ Ω; Ω is the first index of both H₊ and H₋.
        crate::linalg::basis_vector(self.keys.len(), 0)
    }
}

/// Generators of `R^{as}` and `(R′)^{as}` with their checks.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticTripleReport {
    /// Max commutator between `R^{as}` and `(R′)^{as}` generators over all samples.
    pub commutator_all: f64,
    /// Same over the samples whose restricted factors commute in the truncation.
    pub commutator_commuting: f64,
    /// `max ‖(Ψ₊⊗Ω)⊗out(Ω⊗Ψ₋) − Ψ₊⊗Ψ₋‖` in the asymptotic theory.
    pub outgoing_residual: f64,
    pub incoming_residual: f64,
    /// Max distance of `Φ₊^{out}(F)|_{H₊}` from `A₁·⟨A₂⟩` over the samples.
    pub chiral_structure_residual: f64,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct AsymptoticGenerators {
    pub primed: bool,
    pub plus: Mat,
    pub minus: Mat,
    pub tensor: Mat,
}

/// `Φ₊^{out}(F)|_{H₊} ⊗ Φ₋^{in}(G)|_{H₋}` and `Φ₊^{in}(F′)|_{H₊} ⊗ Φ₋^{out}(G′)|_{H₋}`
/// on sampled elements; checks locality and trivial scattering of the
/// asymptotic triple.
pub fn asymptotic_triple_generators(
    engine: &ScatteringEngine,
    r_samples: &[(WedgeElement, WedgeElement)],
    rp_samples: &[(WedgeElement, WedgeElement)],
) -> Result<(
    Vec<AsymptoticGenerators>,
    Vec<AsymptoticGenerators>,
    AsymptoticTripleReport,
)> {
    let net = &engine.net;
    let space = AsymptoticSpace::new(net);
    let make = |f: &WedgeElement,
                g: &WedgeElement,
                kf: AsymptoticKind,
                kg: AsymptoticKind,
                primed: bool|
     -> Result<AsymptoticGenerators> {
        let (a, _) = engine.field(f, kf)?;
        let (b, _) = engine.field(g, kg)?;
        let plus = space.restrict_plus(&a);
        let minus = space.restrict_minus(&b);
        let tensor = kron(&plus, &minus);
        Ok(AsymptoticGenerators {
            primed,
            plus,
            minus,
            tensor,
        })
    };
    let r: Vec<AsymptoticGenerators> = r_samples
        .iter()
        .map(|(f, g)| {
            make(
                f,
                g,
                AsymptoticKind::OutPlus,
                AsymptoticKind::InMinus,
                false,
            )
        })
        .collect::<Result<_>>()?;
    let rp: Vec<AsymptoticGenerators> = rp_samples
        .iter()
        .map(|(f, g)| make(f, g, AsymptoticKind::InPlus, AsymptoticKind::OutMinus, true))
        .collect::<Result<_>>()?;

    let scalar_tol = 1e-9;
    let is_scalar = |m: &Mat| {
        let c = m[(0, 0)];
        (m - Mat::identity(m.nrows(), m.ncols()) * c).norm() <= scalar_tol * (1.0 + m.norm())
    };
    let (mut all, mut commuting) = (0.0f64, 0.0f64);
    for a in &r {
        for b in &rp {
            let c = op_norm(&commutator(&a.tensor, &b.tensor));
            all = all.max(c);
            // In the truncation the factors commute when one side of each tensor slot is scalar.
            let plus_ok = is_scalar(&a.plus) || is_scalar(&b.plus);
            let minus_ok = is_scalar(&a.minus) || is_scalar(&b.minus);
            if plus_ok && minus_ok {
                commuting = commuting.max(c);
            }
        }
    }

    let chiral_structure_residual = r_samples
        .iter()
        .zip(&r)
        .map(|((f, _), gen)| {
            let closed = space.restrict_plus(&chiral_asymptotic_field(
                net,
                &f.operator,
                AsymptoticKind::OutPlus,
            ));
            (&gen.plus - closed).norm()
        })
        .fold(0.0, f64::max);

    // Scattering in the asymptotic theory: its own time averages on H₊⊗H₋.
    let settings: &LimitSettings = &engine.settings;
    let probes = ProbeSet::new(space.vacuum(), &[], settings.seed);
    let plan_out_plus = LimitPlan::direct(&space, AsymptoticKind::OutPlus, settings)?;
    let plan_out_minus = LimitPlan::direct(&space, AsymptoticKind::OutMinus, settings)?;
    let plan_in_plus = LimitPlan::direct(&space, AsymptoticKind::InPlus, settings)?;
    let plan_in_minus = LimitPlan::direct(&space, AsymptoticKind::InMinus, settings)?;
    let id_plus = Mat::identity(space.plus_dim(), space.plus_dim());
    let id_minus = Mat::identity(space.minus_dim(), space.minus_dim());
    let om_as = space.vacuum();
    let om_plus = crate::linalg::basis_vector(space.plus_dim(), 0);
    let om_minus = crate::linalg::basis_vector(space.minus_dim(), 0);

    let (mut outgoing, mut incoming) = (0.0f64, 0.0f64);
    for a in &r {
        for b in &rp {
            // (Ψ₊⊗Ω)⊗out(Ω⊗Ψ₋) from Φ₊^{out}(X⊗1) Φ₋^{out}(1⊗Y′) Ω^{as}.
            let x = kron(&a.plus, &id_minus);
            let y = kron(&id_plus, &b.minus);
            let (px, _) = plan_out_plus.limit(&x, &probes, "as_out_plus")?;
            let (py, _) = plan_out_minus.limit(&y, &probes, "as_out_minus")?;
            let out = &px * (&py * &om_as);
            let target = kron_vec(&(&a.plus * &om_plus), &(&b.minus * &om_minus));
            outgoing = outgoing.max((&out - &target).norm());
            // (Ψ₊⊗Ω)⊗in(Ω⊗Ψ₋) from Φ₊^{in}(X′⊗1) Φ₋^{in}(1⊗Y) Ω^{as}, with X′ = b.plus, Y = a.minus.
            let xp = kron(&b.plus, &id_minus);
            let yp = kron(&id_plus, &a.minus);
            let (pxp, _) = plan_in_plus.limit(&xp, &probes, "as_in_plus")?;
            let (pyp, _) = plan_in_minus.limit(&yp, &probes, "as_in_minus")?;
            let inn = &pxp * (&pyp * &om_as);
            let target_in = kron_vec(&(&b.plus * &om_plus), &(&a.minus * &om_minus));
            incoming = incoming.max((&inn - &target_in).norm());
        }
    }
    let report = AsymptoticTripleReport {
        commutator_all: all,
        commutator_commuting: commuting,
        outgoing_residual: outgoing,
        incoming_residual: incoming,
        chiral_structure_residual,
        samples: r.len() * rp.len(),
    };
    Ok((r, rp, report))
}

/// `W: H₊⊗H₋ → H`, `(ψ₁⊗Ω̂₂)⊗(Ω̂₁⊗ψ₂) ↦ ψ₁⊗ψ₂`.
#[derive(Debug, Clone)]
pub struct Intertwiner {
    pub matrix: Mat,
    pub unitarity_residual: f64,
    pub covariance_residual: f64,
    pub vacuum_residual: f64,
    pub sample_points: Vec<SpacetimePoint>,
}

pub fn intertwiner_w(net: &TwoDNet) -> Intertwiner {
    let space = AsymptoticSpace::new(net);
    let dim = net.dim();
    let das = space.plus_dim() * space.minus_dim();
    let mut w = Mat::zeros(dim, das);
    for (a, &ip) in space.plus_indices.iter().enumerate() {
        for (b, &im) in space.minus_indices.iter().enumerate() {
            // ip = (i1, vac2), im = (vac1, i2) ⇒ target (i1, i2).
            let i1 = ip / net.net2.dim();
            let i2 = im % net.net2.dim();
            w[(net.index(i1, i2), a * space.minus_dim() + b)] = C64::new(1.0, 0.0);
        }
    }
    let unitarity_residual = op_norm(&(w.adjoint() * &w - Mat::identity(das, das)));
    let sample_points = net_sample_points();
    let covariance_residual = sample_points
        .iter()
        .map(|&x| op_norm(&(&w * space.translation_unitary(x) - net.translation_unitary(x) * &w)))
        .fold(0.0, f64::max);
    let vacuum_residual = (&w * space.vacuum() - net.vacuum()).norm();
    Intertwiner {
        matrix: w,
        unitarity_residual,
        covariance_residual,
        vacuum_residual,
        sample_points,
    }
}

impl Intertwiner {
    /// `‖W (X⊗Y) W* − ⟨B₁⟩⟨A₂⟩ A₁⊗B₂‖` for `X = Φ₊^{out}(A₁⊗A₂)|_{H₊}`,
    /// `Y = Φ₋^{in}(B₁⊗B₂)|_{H₋}` given as the chiral factors.
    pub fn generator_residual(&self, x: &Mat, y: &Mat, expected: &Mat) -> f64 {
        (&self.matrix * kron(x, y) * self.matrix.adjoint() - expected).norm()
    }

    pub fn translate_check(&self, net: &TwoDNet, v: &Vector, x: SpacetimePoint) -> f64 {
        let space = AsymptoticSpace::new(net);
        let lhs = &self.matrix * Vector::from_vec(space.translation_phases(x)).component_mul(v);
        let rhs = (&self.matrix * v).translate(net, x);
        (lhs - rhs).norm()
    }
}
