//! Two-dimensional chiral net on `Ĥ₁ ⊗ Ĥ₂`.
//!
//! Lightline coordinates: net 1 lives on `s₁ = (x⁰−x¹)/√2`, net 2 on
//! `s₂ = (x⁰+x¹)/√2`, so that `U(x) = Û₁(s₁) ⊗ Û₂(s₂)` and
//! `H = (P̂₁⊗1 + 1⊗P̂₂)/√2`, `P = (P̂₁⊗1 − 1⊗P̂₂)/√2`. With this sign
//! net-1 excitations span `ker(H−P)` (right movers).

use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FieldKind, FockSpace, Interval, ModeGrid, TestFunction};
use crate::linalg::{self, conj_mat, conj_vec, kron, kron_vec, phase, real, Mat, Vector, C64};

/// Default bound on the product dimension.
pub const DEFAULT_MAX_PRODUCT_DIM: usize = 4096;

/// Spacetime point `(x⁰, x¹)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
}

impl SpacetimePoint {
    pub const ORIGIN: SpacetimePoint = SpacetimePoint { t: 0.0, x: 0.0 };

    pub fn new(t: f64, x: f64) -> Self {
        SpacetimePoint { t, x }
    }

    /// Lightline coordinates `(s₁, s₂)`.
    pub fn lightline(&self) -> (f64, f64) {
        ((self.t - self.x) / SQRT_2, (self.t + self.x) / SQRT_2)
    }

    pub fn in_wedge(&self, wedge: Wedge) -> bool {
        match wedge {
            Wedge::Right => self.x >= self.t.abs(),
            Wedge::Left => -self.x >= self.t.abs(),
        }
    }

    pub fn neg(&self) -> Self {
        SpacetimePoint::new(-self.t, -self.x)
    }

    pub fn add(&self, other: &SpacetimePoint) -> Self {
        SpacetimePoint::new(self.t + other.t, self.x + other.x)
    }
}

/// The right wedge `W = {x¹ ≥ |x⁰|}` or its causal complement `W′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Wedge {
    Right,
    Left,
}

impl Wedge {
    pub fn complement(self) -> Wedge {
        match self {
            Wedge::Right => Wedge::Left,
            Wedge::Left => Wedge::Right,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Wedge::Right => "W",
            Wedge::Left => "W′",
        }
    }
}

impl fmt::Display for Wedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Joint eigenspace of `(H, P)`, keyed by the exact chiral momenta in units
/// of the respective grid spacings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointEigenspace {
    pub key: (u32, u32),
    pub energy: f64,
    pub momentum: f64,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TwoDNet {
    pub net1: FockSpace,
    pub net2: FockSpace,
    dim: usize,
    /// `(p₁, p₂)` in units of the grid spacings, per product basis index.
    keys: Vec<(u32, u32)>,
    /// Chiral momenta `(p̂₁, p̂₂)` per product basis index.
    chiral: Vec<(f64, f64)>,
    vacuum: Vector,
    h: Mat,
    p: Mat,
    joint_spectrum: Vec<JointEigenspace>,
    pplus: Mat,
    pminus: Mat,
}

pub fn build_two_d_net(net1: FockSpace, net2: FockSpace) -> Result<TwoDNet> {
    TwoDNet::build(net1, net2)
}

impl TwoDNet {
    pub fn build(net1: FockSpace, net2: FockSpace) -> Result<Self> {
        Self::build_with_bound(net1, net2, DEFAULT_MAX_PRODUCT_DIM)
    }

    pub fn build_with_bound(net1: FockSpace, net2: FockSpace, max_dim: usize) -> Result<Self> {
        let (d1, d2) = (net1.dim(), net2.dim());
        let dim = d1 * d2;
        if dim > max_dim {
            return Err(Error::DimensionOverflow {
                dim,
                bound: max_dim,
            });
        }
        let mut keys = Vec::with_capacity(dim);
        let mut chiral = Vec::with_capacity(dim);
        for i1 in 0..d1 {
            for i2 in 0..d2 {
                keys.push((net1.momentum_units(i1), net2.momentum_units(i2)));
                chiral.push((net1.momentum(i1), net2.momentum(i2)));
            }
        }
        let energies: Vec<f64> = chiral.iter().map(|&(a, b)| (a + b) / SQRT_2).collect();
        let momenta: Vec<f64> = chiral.iter().map(|&(a, b)| (a - b) / SQRT_2).collect();
        let h = Mat::from_diagonal(&Vector::from_iterator(
            dim,
            energies.iter().map(|&e| real(e)),
        ));
        let p = Mat::from_diagonal(&Vector::from_iterator(
            dim,
            momenta.iter().map(|&m| real(m)),
        ));

        let mut joint_spectrum: Vec<JointEigenspace> = Vec::new();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by_key(|&i| (keys[i].0 + keys[i].1, keys[i]));
        for i in order {
            match joint_spectrum.last_mut() {
                Some(last) if last.key == keys[i] => last.indices.push(i),
                _ => joint_spectrum.push(JointEigenspace {
                    key: keys[i],
                    energy: energies[i],
                    momentum: momenta[i],
                    indices: vec![i],
                }),
            }
        }
        let diag_projection = |pred: &dyn Fn(usize) -> bool| {
            Mat::from_diagonal(&Vector::from_iterator(
                dim,
                (0..dim).map(|i| if pred(i) { real(1.0) } else { real(0.0) }),
            ))
        };
        let pplus = diag_projection(&|i| keys[i].1 == 0);
        let pminus = diag_projection(&|i| keys[i].0 == 0);
        let vacuum = kron_vec(&net1.vacuum(), &net2.vacuum());

        Ok(TwoDNet {
            net1,
            net2,
            dim,
            keys,
            chiral,
            vacuum,
            h,
            p,
            joint_spectrum,
            pplus,
            pminus,
        })
    }

    /// Two copies of the same truncated chiral theory.
    pub fn symmetric(
        spacing: f64,
        modes: usize,
        per_mode_cap: u8,
        energy_cap: Option<f64>,
    ) -> Result<Self> {
        let space = FockSpace::build(ModeGrid::new(spacing, modes)?, per_mode_cap, energy_cap)?;
        Self::build(space.clone(), space)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vacuum(&self) -> &Vector {
        &self.vacuum
    }

    pub fn hamiltonian(&self) -> &Mat {
        &self.h
    }

    pub fn momentum_operator(&self) -> &Mat {
        &self.p
    }

    pub fn joint_spectrum(&self) -> &[JointEigenspace] {
        &self.joint_spectrum
    }

    pub fn key(&self, i: usize) -> (u32, u32) {
        self.keys[i]
    }

    pub fn chiral_momenta(&self, i: usize) -> (f64, f64) {
        self.chiral[i]
    }

    pub fn energy(&self, i: usize) -> f64 {
        (self.chiral[i].0 + self.chiral[i].1) / SQRT_2
    }

    pub fn momentum(&self, i: usize) -> f64 {
        (self.chiral[i].0 - self.chiral[i].1) / SQRT_2
    }

    /// Eigenvalue of `H² − P² = 2·P̂₁P̂₂` on basis state `i`.
    pub fn mass_squared(&self, i: usize) -> f64 {
        2.0 * self.chiral[i].0 * self.chiral[i].1
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.net2.dim() + i2
    }

    pub fn identity(&self) -> Mat {
        Mat::identity(self.dim, self.dim)
    }

    pub fn lift1(&self, a: &Mat) -> Mat {
        kron(a, &self.net2.identity())
    }

    pub fn lift2(&self, a: &Mat) -> Mat {
        kron(&self.net1.identity(), a)
    }

    pub fn product_state(&self, psi1: &Vector, psi2: &Vector) -> Vector {
        kron_vec(psi1, psi2)
    }

    /// Diagonal of `U(x)` in the occupation product basis.
    pub fn translation_phases(&self, x: SpacetimePoint) -> Vec<C64> {
        let (s1, s2) = x.lightline();
        self.chiral
            .iter()
            .map(|&(a, b)| phase(a * s1 + b * s2))
            .collect()
    }

    pub fn translation_unitary(&self, x: SpacetimePoint) -> Mat {
        Mat::from_diagonal(&Vector::from_vec(self.translation_phases(x)))
    }

    /// `e^{i·θ(H²−P²)}` as a diagonal matrix.
    pub fn mass_phase(&self, theta: f64) -> Mat {
        Mat::from_diagonal(&Vector::from_iterator(
            self.dim,
            (0..self.dim).map(|i| phase(theta * self.mass_squared(i))),
        ))
    }

    pub fn translate<T: Translate>(&self, target: &T, x: SpacetimePoint) -> T {
        target.translate(self, x)
    }

    /// Maximum `E − |P|` violation over the joint spectrum (should be ≤ 0).
    pub fn spectrum_violation(&self) -> f64 {
        self.joint_spectrum
            .iter()
            .map(|e| e.momentum.abs() - e.energy)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Dimension of the joint eigenspace with `(E, P) = (0, 0)`.
    pub fn vacuum_multiplicity(&self) -> usize {
        self.joint_spectrum
            .iter()
            .filter(|e| e.key == (0, 0))
            .map(|e| e.indices.len())
            .sum()
    }
}

pub fn lightcone_projections(net: &TwoDNet) -> (Mat, Mat) {
    (net.pplus.clone(), net.pminus.clone())
}

impl TwoDNet {
    /// Projection onto `ker(H−P)`.
    pub fn pplus(&self) -> &Mat {
        &self.pplus
    }

    /// Projection onto `ker(H+P)`.
    pub fn pminus(&self) -> &Mat {
        &self.pminus
    }
}

/// Anything `U(x)` acts on.
pub trait Translate: Sized {
    fn translate(&self, net: &TwoDNet, x: SpacetimePoint) -> Self;
}

impl Translate for Vector {
    fn translate(&self, net: &TwoDNet, x: SpacetimePoint) -> Self {
        let ph = net.translation_phases(x);
        Vector::from_iterator(self.len(), self.iter().zip(&ph).map(|(v, p)| v * p))
    }
}

impl Translate for Mat {
    fn translate(&self, net: &TwoDNet, x: SpacetimePoint) -> Self {
        let ph = net.translation_phases(x);
        let mut out = self.clone();
        for c in 0..out.ncols() {
            let pc = ph[c].conj();
            for r in 0..out.nrows() {
                out[(r, c)] *= ph[r] * pc;
            }
        }
        out
    }
}

/// Generator `offset·1 + φ(f)` (or its Weyl exponential) on one chiral factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiralGenerator {
    pub offset: C64,
    pub field: Option<TestFunction>,
    #[serde(default)]
    pub kind: FieldKind,
}

impl ChiralGenerator {
    pub fn identity() -> Self {
        ChiralGenerator {
            offset: real(1.0),
            field: None,
            kind: FieldKind::Smeared,
        }
    }

    pub fn field(f: TestFunction) -> Self {
        ChiralGenerator {
            offset: real(0.0),
            field: Some(f),
            kind: FieldKind::Smeared,
        }
    }

    pub fn affine(offset: C64, f: TestFunction) -> Self {
        ChiralGenerator {
            offset,
            field: Some(f),
            kind: FieldKind::Smeared,
        }
    }

    pub fn weyl(f: TestFunction) -> Self {
        ChiralGenerator {
            offset: real(0.0),
            field: Some(f),
            kind: FieldKind::Weyl,
        }
    }

    pub fn support(&self) -> Option<Interval> {
        self.field
            .as_ref()
            .filter(|f| !f.is_zero())
            .map(|f| f.nominal_support)
    }

    pub fn operator(&self, space: &FockSpace) -> Result<Mat> {
        let mut m = space.identity() * self.offset;
        if let Some(f) = &self.field {
            m += fock::local_operator(space, f, self.kind)?.matrix;
        }
        Ok(m)
    }

    /// `⟨Ω̂|A Ω̂⟩` for this generator.
    pub fn vacuum_expectation(&self, space: &FockSpace) -> Result<C64> {
        let m = self.operator(space)?;
        let i = space.vacuum_index();
        Ok(m[(i, i)])
    }

    fn translated(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.field = self.field.as_ref().map(|f| f.translated(s));
        out
    }

    /// Image under the geometric conjugation: `J(c + φ(f))J = conj(c) + φ(f(−·))`.
    /// The Weyl variant maps to `e^{−iφ(f(−·))}`.
    fn reflected(&self) -> Self {
        let mut out = self.clone();
        out.offset = self.offset.conj();
        out.field = self.field.as_ref().map(|f| {
            let mut r = f.reflected();
            if self.kind == FieldKind::Weyl {
                r.amplitude = -r.amplitude;
                r.momentum_profile.iter_mut().for_each(|z| *z = -*z);
            }
            r
        });
        out
    }

    /// Fraction of position mass on the wrong half-line.
    fn half_line_leakage(&self, positive_half: bool) -> Option<(f64, f64)> {
        let f = self.field.as_ref().filter(|f| !f.is_zero())?;
        let wrong = if positive_half {
            f.mass_left_of(0.0)
        } else {
            f.mass_right_of(0.0)
        };
        Some((wrong, f.leakage))
    }
}

/// Formal polynomial in generator pairs: `Σ_t c_t · X_{i₁}X_{i₂}…`.
/// The empty monomial is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<(C64, Vec<usize>)>,
}

impl Polynomial {
    pub fn identity() -> Self {
        Polynomial {
            terms: vec![(real(1.0), Vec::new())],
        }
    }

    pub fn monomial(indices: Vec<usize>) -> Self {
        Polynomial {
            terms: vec![(real(1.0), indices)],
        }
    }

    pub fn single(index: usize) -> Self {
        Self::monomial(vec![index])
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.iter().flat_map(|(_, m)| m.iter().copied()).max()
    }
}

/// Element of the wedge algebra `R` (for `W`) or `R′` (for `W′`) together with
/// the generators used to produce it.
#[derive(Debug, Clone)]
pub struct WedgeElement {
    pub operator: Mat,
    pub wedge: Wedge,
    pub factors: Vec<(ChiralGenerator, ChiralGenerator)>,
    pub polynomial: Polynomial,
    pub label: String,
}

pub fn wedge_element(
    net: &TwoDNet,
    pairs: Vec<(ChiralGenerator, ChiralGenerator)>,
    polynomial: Polynomial,
    wedge: Wedge,
) -> Result<WedgeElement> {
    WedgeElement::new(net, pairs, polynomial, wedge)
}

impl WedgeElement {
    pub fn new(
        net: &TwoDNet,
        pairs: Vec<(ChiralGenerator, ChiralGenerator)>,
        polynomial: Polynomial,
        wedge: Wedge,
    ) -> Result<Self> {
        check_supports(&pairs, wedge)?;
        if let Some(m) = polynomial.max_index() {
            if m >= pairs.len() {
                return Err(Error::invalid(
                    "polynomial",
                    format!(
                        "refers to pair {m} but only {} pairs were given",
                        pairs.len()
                    ),
                ));
            }
        }
        let generators: Vec<Mat> = pairs
            .iter()
            .map(|(g1, g2)| Ok(kron(&g1.operator(&net.net1)?, &g2.operator(&net.net2)?)))
            .collect::<Result<_>>()?;
        let mut op = Mat::zeros(net.dim(), net.dim());
        for (coef, mono) in &polynomial.terms {
            let mut m = net.identity();
            for &i in mono {
                m *= &generators[i];
            }
            op += m * *coef;
        }
        Ok(WedgeElement {
            operator: op,
            wedge,
            factors: pairs,
            polynomial,
            label: format!("{}-element", wedge.name()),
        })
    }

    pub fn identity(net: &TwoDNet, wedge: Wedge) -> Self {
        WedgeElement {
            operator: net.identity(),
            wedge,
            factors: Vec::new(),
            polynomial: Polynomial::identity(),
            label: "1".into(),
        }
    }

    /// Single product generator `A₁ ⊗ A₂`.
    pub fn product(
        net: &TwoDNet,
        a1: ChiralGenerator,
        a2: ChiralGenerator,
        wedge: Wedge,
    ) -> Result<Self> {
        Self::new(net, vec![(a1, a2)], Polynomial::single(0), wedge)
    }

    /// Same generators, different operator (used for deformed elements,
    /// which belong to the deformed wedge algebra).
    pub fn with_operator(&self, operator: Mat, label: impl Into<String>) -> Self {
        WedgeElement {
            operator,
            wedge: self.wedge,
            factors: self.factors.clone(),
            polynomial: self.polynomial.clone(),
            label: label.into(),
        }
    }

    /// `Σ c_j F_j`; all elements must live in the same wedge.
    pub fn linear_combination(terms: &[(C64, &WedgeElement)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::invalid("linear_combination", "needs at least one term"))?;
        let wedge = first.1.wedge;
        let mut op = Mat::zeros(first.1.operator.nrows(), first.1.operator.ncols());
        let mut factors = Vec::new();
        let mut poly = Vec::new();
        for (c, el) in terms {
            if el.wedge != wedge {
                return Err(Error::invalid(
                    "linear_combination",
                    "mixes W and W′ elements",
                ));
            }
            op += &el.operator * *c;
            let off = factors.len();
            factors.extend(el.factors.iter().cloned());
            for (tc, mono) in &el.polynomial.terms {
                poly.push((*c * *tc, mono.iter().map(|i| i + off).collect()));
            }
        }
        Ok(WedgeElement {
            operator: op,
            wedge,
            factors,
            polynomial: Polynomial { terms: poly },
            label: format!("Σ{}", terms.len()),
        })
    }

    /// `JFJ`: conjugated matrix, reflected generators, opposite wedge.
    pub fn reflected(&self) -> Self {
        WedgeElement {
            operator: conj_mat(&self.operator),
            wedge: self.wedge.complement(),
            factors: self
                .factors
                .iter()
                .map(|(a, b)| (a.reflected(), b.reflected()))
                .collect(),
            polynomial: Polynomial {
                terms: self
                    .polynomial
                    .terms
                    .iter()
                    .map(|(c, m)| (c.conj(), m.clone()))
                    .collect(),
            },
            label: format!("J{}J", self.label),
        }
    }

    /// Support hulls of the net-1 and net-2 generators.
    pub fn supports(&self) -> (Option<Interval>, Option<Interval>) {
        let hull = |it: &mut dyn Iterator<Item = Interval>| it.reduce(|a, b| a.hull(&b));
        let s1 = hull(&mut self.factors.iter().filter_map(|(a, _)| a.support()));
        let s2 = hull(&mut self.factors.iter().filter_map(|(_, b)| b.support()));
        (s1, s2)
    }

    pub fn satisfies_wedge_constraint(&self) -> bool {
        check_supports(&self.factors, self.wedge).is_ok()
    }
}

impl Translate for WedgeElement {
    fn translate(&self, net: &TwoDNet, x: SpacetimePoint) -> Self {
        let (s1, s2) = x.lightline();
        WedgeElement {
            operator: self.operator.translate(net, x),
            wedge: self.wedge,
            factors: self
                .factors
                .iter()
                .map(|(a, b)| (a.translated(s1), b.translated(s2)))
                .collect(),
            polynomial: self.polynomial.clone(),
            label: format!("α({})", self.label),
        }
    }
}

fn check_supports(pairs: &[(ChiralGenerator, ChiralGenerator)], wedge: Wedge) -> Result<()> {
    // W: net-1 support in ℝ₋, net-2 support in ℝ₊. W′ mirrored.
    let (net1_positive, net2_positive) = match wedge {
        Wedge::Right => (false, true),
        Wedge::Left => (true, false),
    };
    for (i, (g1, g2)) in pairs.iter().enumerate() {
        for (which, g, positive) in [(1, g1, net1_positive), (2, g2, net2_positive)] {
            if let Some((wrong, tol)) = g.half_line_leakage(positive) {
                if wrong > tol {
                    return Err(Error::SupportViolation {
                        pair: i,
                        wedge: wedge.name(),
                        detail: format!(
                            "net-{which} generator has {wrong:.2e} of its mass on the wrong half-line (support {})",
                            g.support().unwrap()
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Geometric reflection: complex conjugation in the occupation product basis
/// followed by a real orthogonal matrix.
#[derive(Debug, Clone)]
pub struct ReflectionJ {
    pub orthogonal: Mat,
}

pub fn reflection(net: &TwoDNet) -> Result<ReflectionJ> {
    ReflectionJ::build(net)
}

impl ReflectionJ {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn build(net: &TwoDNet) -> Result<Self> {
        let j = ReflectionJ {
            orthogonal: net.identity(),
        };
        j.verify(net)?;
        Ok(j)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.orthogonal * conj_vec(v)
    }

    /// `J A J` as a linear operator.
    pub fn conjugate(&self, a: &Mat) -> Mat {
        &self.orthogonal * conj_mat(a) * self.orthogonal.transpose()
    }

    /// Sample grid of translations used by the construction checks.
    pub fn sample_points() -> Vec<SpacetimePoint> {
        let vals = [-2.0, -0.7, 0.0, 0.45, 1.3];
        vals.iter()
            .flat_map(|&t| vals.iter().map(move |&x| SpacetimePoint::new(t, x)))
            .collect()
    }

    /// Largest violation among the structural invariants of `J`.
    pub fn invariant_residuals(&self, net: &TwoDNet) -> ReflectionResiduals {
        let n = net.dim();
        let j_squared =
            (&self.orthogonal * conj_mat(&self.orthogonal) - Mat::identity(n, n)).norm();
        let vacuum = (self.apply(net.vacuum()) - net.vacuum()).norm();
        let mut inversion = 0.0f64;
        for x in Self::sample_points() {
            let u = net.translation_unitary(x);
            let lhs = self.conjugate(&u);
            let rhs = net.translation_unitary(x.neg());
            inversion = inversion.max(linalg::op_norm(&(lhs - rhs)));
        }
        let lightcone = {
            let jp = |p: &Mat| {
                let jpp = &self.orthogonal * conj_mat(p);
                linalg::op_norm(&((Mat::identity(n, n) - p) * jpp))
            };
            jp(net.pplus()).max(jp(net.pminus()))
        };
        ReflectionResiduals {
            j_squared,
            vacuum,
            inversion,
            lightcone,
        }
    }

    fn verify(&self, net: &TwoDNet) -> Result<()> {
        let r = self.invariant_residuals(net);
        if r.max() > Self::TOLERANCE {
            return Err(Error::Construction(format!(
                "geometric reflection invariants fail: {r:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReflectionResiduals {
    pub j_squared: f64,
    pub vacuum: f64,
    pub inversion: f64,
    pub lightcone: f64,
}

impl ReflectionResiduals {
    pub fn max(&self) -> f64 {
        self.j_squared
            .max(self.vacuum)
            .max(self.inversion)
            .max(self.lightcone)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ladder_matrices, ModeGrid};
    use crate::linalg::{commutator, op_norm, I};

    fn default_net() -> TwoDNet {
        let g = ModeGrid::new(1.0, 3).unwrap();
        let a = FockSpace::build(g, 2, Some(4.0)).unwrap();
        TwoDNet::build(a.clone(), a).unwrap()
    }

    #[test]
    fn vacuum_has_zero_energy_momentum() {
        let net = default_net();
        assert_eq!(net.dim(), 81);
        let om = net.vacuum();
        assert!((net.hamiltonian() * om).norm() == 0.0);
        assert!((net.momentum_operator() * om).norm() == 0.0);
        assert_eq!(net.vacuum_multiplicity(), 1);
    }

    #[test]
    fn one_particle_net1_state_is_right_moving() {
        let net = default_net();
        let i1 = net.net1.index_of(&[1, 0, 0]).unwrap();
        let i = net.index(i1, 0);
        assert!((net.energy(i) - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((net.momentum(i) - 1.0 / SQRT_2).abs() < 1e-15);
        assert_eq!(net.pplus()[(i, i)], real(1.0));
    }

    #[test]
    fn pair_mass_squared() {
        let net = default_net();
        let i1 = net.net1.index_of(&[1, 0, 0]).unwrap();
        let i2 = net.net2.index_of(&[1, 0, 0]).unwrap();
        let i = net.index(i1, i2);
        let e = net.energy(i);
        let p = net.momentum(i);
        assert!((e * e - p * p - 2.0).abs() < 1e-14);
        assert_eq!(net.mass_squared(i), 2.0);
    }

    #[test]
    fn spectrum_condition_and_projections() {
        let net = default_net();
        assert!(net.spectrum_violation() <= 1e-12);
        let (pp, pm) = lightcone_projections(&net);
        let omega_proj = net.vacuum() * net.vacuum().adjoint();
        assert!((&pp * &pm - omega_proj).norm() < 1e-15);
        // E = P on ran(P₊) and E = −P on ran(P₋)
        assert!(((net.hamiltonian() - net.momentum_operator()) * &pp).norm() < 1e-14);
        assert!(((net.hamiltonian() + net.momentum_operator()) * &pm).norm() < 1e-14);
    }

    #[test]
    fn lightcone_projection_examples() {
        let net = default_net();
        let psi1 = Vector::from_iterator(
            9,
            (0..9).map(|k| crate::linalg::c(k as f64 * 0.1, 0.3 - k as f64 * 0.05)),
        );
        let v = net.product_state(&psi1, &net.net2.vacuum());
        assert!((net.pplus() * &v - &v).norm() < 1e-15);
        let expected = net.vacuum() * psi1[0];
        assert!((net.pminus() * &v - expected).norm() < 1e-15);
    }

    #[test]
    fn translation_is_a_representation() {
        let net = default_net();
        let x = SpacetimePoint::new(0.3, -1.1);
        let y = SpacetimePoint::new(-0.8, 0.25);
        let lhs = net.translation_unitary(x) * net.translation_unitary(y);
        let rhs = net.translation_unitary(x.add(&y));
        assert!(op_norm(&(lhs - rhs)) < 1e-12);
        let om = net.vacuum().clone();
        assert!((om.translate(&net, x) - &om).norm() < 1e-15);
        let m = net.identity() * C64::new(0.5, 0.1);
        assert_eq!(m.translate(&net, SpacetimePoint::ORIGIN), m);
    }

    #[test]
    fn lightline_factorization_of_translations() {
        let net = default_net();
        let (a, _) = ladder_matrices(&net.net1, 0).unwrap();
        let (b, _) = ladder_matrices(&net.net2, 1).unwrap();
        let x = SpacetimePoint::new(0.7, 0.2);
        let (s1, s2) = x.lightline();
        let lhs = kron(&a.matrix, &b.matrix).translate(&net, x);
        let a1 = fock::translate_chiral(&net.net1, &a, s1);
        let b2 = fock::translate_chiral(&net.net2, &b, s2);
        assert!((lhs - kron(&a1.matrix, &b2.matrix)).norm() < 1e-13);
    }

    fn wedge_pair(net: &TwoDNet) -> (ChiralGenerator, ChiralGenerator) {
        let g = *net.net1.grid();
        (
            ChiralGenerator::field(TestFunction::gaussian(&g, -2.0, 0.5, 1.0).unwrap()),
            ChiralGenerator::field(TestFunction::gaussian(&g, 2.0, 0.5, 1.0).unwrap()),
        )
    }

    #[test]
    fn wedge_elements() {
        let net = default_net();
        let empty = WedgeElement::new(&net, vec![], Polynomial::identity(), Wedge::Right).unwrap();
        assert_eq!(empty.operator, net.identity());

        let (a1, _) = wedge_pair(&net);
        let el = WedgeElement::product(&net, a1.clone(), ChiralGenerator::identity(), Wedge::Right)
            .unwrap();
        let expected = net.lift1(&a1.operator(&net.net1).unwrap());
        assert!((el.operator - expected).norm() < 1e-15);

        // net-1 support on ℝ₋ is forbidden for W′
        let err =
            WedgeElement::product(&net, a1, ChiralGenerator::identity(), Wedge::Left).unwrap_err();
        assert!(matches!(err, Error::SupportViolation { pair: 0, .. }));
    }

    #[test]
    fn translation_inside_wedge_keeps_constraint() {
        let net = default_net();
        let (a1, a2) = wedge_pair(&net);
        let el = WedgeElement::product(&net, a1, a2, Wedge::Right).unwrap();
        for x in [
            SpacetimePoint::new(0.0, 1.0),
            SpacetimePoint::new(0.5, 0.9),
            SpacetimePoint::new(-2.0, 3.0),
        ] {
            assert!(x.in_wedge(Wedge::Right));
            let moved = net.translate(&el, x);
            assert!(moved.satisfies_wedge_constraint());
        }
        // a large shift outside W breaks it
        let moved = net.translate(&el, SpacetimePoint::new(0.0, -5.0));
        assert!(!moved.satisfies_wedge_constraint());
    }

    #[test]
    fn reflected_element_lives_in_the_complement() {
        let net = default_net();
        let (a1, a2) = wedge_pair(&net);
        let el = WedgeElement::product(&net, a1, a2, Wedge::Right).unwrap();
        let r = el.reflected();
        assert_eq!(r.wedge, Wedge::Left);
        assert!(r.satisfies_wedge_constraint());
        let rebuilt =
            WedgeElement::new(&net, r.factors.clone(), r.polynomial.clone(), Wedge::Left).unwrap();
        assert!((rebuilt.operator - &r.operator).norm() < 1e-13);
    }

    #[test]
    fn wedge_commutator_diagnostic_is_reported() {
        let g = ModeGrid::new(0.5, 8).unwrap();
        let s = FockSpace::build(g, 1, Some(2.5)).unwrap();
        let net = TwoDNet::build(s.clone(), s).unwrap();
        let f = |c: f64| ChiralGenerator::field(TestFunction::gaussian(&g, c, 0.6, 1.0).unwrap());
        let w = WedgeElement::product(&net, f(-2.5), f(2.5), Wedge::Right).unwrap();
        let wp = WedgeElement::product(&net, f(2.5), f(-2.5), Wedge::Left).unwrap();
        let comm = op_norm(&commutator(&w.operator, &wp.operator));
        let scale = op_norm(&w.operator) * op_norm(&wp.operator);
        assert!(comm.is_finite() && scale > 0.0);
    }

    #[test]
    fn reflection_examples() {
        let net = default_net();
        let j = reflection(&net).unwrap();
        assert_eq!(j.apply(net.vacuum()), *net.vacuum());
        let iom = net.vacuum() * I;
        assert!((j.apply(&iom) + &iom).norm() == 0.0);
        let u = net.translation_unitary(SpacetimePoint::new(1.0, 0.0));
        let prod = j.conjugate(&u) * &u;
        assert!(op_norm(&(prod - net.identity())) < 1e-12);
        assert!(j.invariant_residuals(&net).max() < 1e-12);
    }
}
