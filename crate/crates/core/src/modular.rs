//! Finite-dimensional Tomita–Takesaki theory: generated *-algebras, commutants,
//! the modular operator `Δ` and conjugation `J_mod` of a cyclic separating vector.
//!
//! Antilinear maps are stored as `v ↦ U·conj(v)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    conj_mat, conj_vec, hermitian_function, kron, null_space, op_norm, pseudo_inverse, rank, real,
    Mat, Vector, C64,
};
use crate::net::{TwoDNet, WedgeElement};

/// Threshold on relative singular values for cyclicity and separation.
pub const RANK_THRESHOLD: f64 = 1e-8;

const SPAN_TOL: f64 = 1e-10;

/// The *-algebra generated by a set of square matrices, with an orthonormal
/// (Hilbert–Schmidt) basis.
#[derive(Debug, Clone)]
pub struct MatrixAlgebra {
    pub dim: usize,
    pub generators: Vec<Mat>,
    pub basis: Vec<Mat>,
    pub selfadjoint_closed: bool,
}

fn vectorize(m: &Mat) -> Vector {
    Vector::from_iterator(m.len(), m.iter().copied())
}

fn unvectorize(v: &Vector, n: usize) -> Mat {
    Mat::from_iterator(n, n, v.iter().copied())
}

/// Gram–Schmidt with one reorthogonalization pass; `None` if `x` is in the span.
fn orthogonalize(basis: &[Vector], x: &Vector, tol: f64) -> Option<Vector> {
    let scale = x.norm();
    if scale == 0.0 {
        return None;
    }
    let mut r = x.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(&r);
            r -= b * c;
        }
    }
    let n = r.norm();
    if n <= tol * scale.max(1.0) {
        None
    } else {
        Some(r / real(n))
    }
}

impl MatrixAlgebra {
    /// Span of all words in the generators and their adjoints, including `1`.
    pub fn generate(generators: &[Mat], max_dim: Option<usize>) -> Result<Self> {
        let n = generators
            .first()
            .map(|g| g.nrows())
            .ok_or_else(|| Error::invalid("generators", "need at least one generator"))?;
        if generators.iter().any(|g| g.nrows() != n || g.ncols() != n) {
            return Err(Error::invalid("generators", "must be square of equal size"));
        }
        let limit = max_dim.unwrap_or(n * n).min(n * n);
        let mut letters: Vec<Mat> = Vec::new();
        for g in generators {
            letters.push(g.clone());
            if (g - g.adjoint()).norm() > SPAN_TOL * g.norm().max(1.0) {
                letters.push(g.adjoint());
            }
        }
        let mut vecs: Vec<Vector> = Vec::new();
        let mut mats: Vec<Mat> = Vec::new();
        let mut frontier = vec![Mat::identity(n, n)];
        while let Some(w) = frontier.pop() {
            if let Some(v) = orthogonalize(&vecs, &vectorize(&w), SPAN_TOL) {
                if vecs.len() == limit {
                    return Err(Error::DimensionOverflow {
                        dim: limit + 1,
                        bound: limit,
                    });
                }
                mats.push(unvectorize(&v, n));
                vecs.push(v);
                for l in &letters {
                    frontier.push(l * &w);
                }
            }
        }
        Ok(MatrixAlgebra {
            dim: n,
            generators: generators.to_vec(),
            basis: mats,
            selfadjoint_closed: true,
        })
    }

    /// Algebra given directly by a spanning set (assumed closed).
    pub fn from_span(dim: usize, span: &[Mat]) -> Self {
        let mut vecs: Vec<Vector> = Vec::new();
        for m in span {
            if let Some(v) = orthogonalize(&vecs, &vectorize(m), SPAN_TOL) {
                vecs.push(v);
            }
        }
        let basis: Vec<Mat> = vecs.iter().map(|v| unvectorize(v, dim)).collect();
        let selfadjoint_closed = basis
            .iter()
            .all(|b| distance_to_span(&vecs, &b.adjoint()) <= 1e-9);
        MatrixAlgebra {
            dim,
            generators: basis.clone(),
            basis,
            selfadjoint_closed,
        }
    }

    pub fn full(dim: usize) -> Self {
        let span: Vec<Mat> = (0..dim * dim)
            .map(|k| {
                let mut m = Mat::zeros(dim, dim);
                m[(k % dim, k / dim)] = real(1.0);
                m
            })
            .collect();
        Self::from_span(dim, &span)
    }

    pub fn scalars(dim: usize) -> Self {
        Self::from_span(dim, &[Mat::identity(dim, dim)])
    }

    /// Linear dimension of the algebra.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    fn vectors(&self) -> Vec<Vector> {
        self.basis.iter().map(vectorize).collect()
    }

    /// Hilbert–Schmidt distance of `x` to the algebra, relative to `‖x‖₂`.
    pub fn distance(&self, x: &Mat) -> f64 {
        distance_to_span(&self.vectors(), x)
    }

    pub fn contains(&self, x: &Mat, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Mutual containment residual of two spans.
    pub fn span_distance(&self, other: &MatrixAlgebra) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        let a = self.vectors();
        let b = other.vectors();
        let ab = self
            .basis
            .iter()
            .map(|m| distance_to_span(&b, m))
            .fold(0.0, f64::max);
        let ba = other
            .basis
            .iter()
            .map(|m| distance_to_span(&a, m))
            .fold(0.0, f64::max);
        ab.max(ba)
    }

    /// Span of the basis images under a linear map.
    pub fn map(&self, f: impl Fn(&Mat) -> Mat) -> MatrixAlgebra {
        let span: Vec<Mat> = self.basis.iter().map(f).collect();
        Self::from_span(self.dim, &span)
    }

    /// `rank{AΩ : A ∈ alg}`.
    pub fn orbit_rank(&self, omega: &Vector) -> usize {
        let mut m = Mat::zeros(self.dim, self.len());
        for (j, b) in self.basis.iter().enumerate() {
            m.set_column(j, &(b * omega));
        }
        rank(&m, RANK_THRESHOLD)
    }
}

fn distance_to_span(basis: &[Vector], x: &Mat) -> f64 {
    let v = vectorize(x);
    let scale = v.norm();
    if scale == 0.0 {
        return 0.0;
    }
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(&r);
            r -= b * c;
        }
    }
    r.norm() / scale
}

/// `alg′ = {X : [X, G] = 0 for every generator}` from the null space of the
/// stacked `I⊗G − Gᵀ⊗I`.
pub fn commutant(alg: &MatrixAlgebra) -> MatrixAlgebra {
    let n = alg.dim;
    let id = Mat::identity(n, n);
    let mut letters: Vec<Mat> = Vec::new();
    for g in &alg.generators {
        letters.push(g.clone());
        letters.push(g.adjoint());
    }
    let mut stacked = Mat::zeros(letters.len() * n * n, n * n);
    for (k, g) in letters.iter().enumerate() {
        // vec(GX − XG) = (I⊗G − Gᵀ⊗I)·vec(X) for column-major vec.
        let block = kron(&id, g) - kron(&g.transpose(), &id);
        stacked
            .view_mut((k * n * n, 0), (n * n, n * n))
            .copy_from(&block);
    }
    let scale = letters.iter().map(|g| g.norm()).fold(1.0, f64::max);
    let null = null_space(&stacked, 1e-10 * scale);
    let span: Vec<Mat> = (0..null.ncols())
        .map(|j| unvectorize(&null.column(j).into_owned(), n))
        .collect();
    MatrixAlgebra::from_span(n, &span)
}

/// An antilinear operator `v ↦ matrix·conj(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Antilinear {
    pub matrix: Mat,
}

impl Antilinear {
    pub fn complex_conjugation(dim: usize) -> Self {
        Antilinear {
            matrix: Mat::identity(dim, dim),
        }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.matrix * conj_vec(v)
    }

    /// `J A J` as a linear matrix.
    pub fn conjugate(&self, a: &Mat) -> Mat {
        &self.matrix * conj_mat(a) * conj_mat(&self.matrix)
    }

    /// `J K` for another antilinear `K`, which is linear.
    pub fn compose(&self, other: &Antilinear) -> Mat {
        &self.matrix * conj_mat(&other.matrix)
    }
}

#[derive(Debug, Clone)]
pub struct ModularData {
    pub delta: Mat,
    pub j_mod: Antilinear,
    pub omega: Vector,
    /// `S = J_mod Δ^{1/2}`.
    pub s: Antilinear,
    pub residuals: ModularResiduals,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModularResiduals {
    pub delta_vacuum: f64,
    pub j_vacuum: f64,
    pub j_involution: f64,
    pub j_delta_inversion: f64,
    /// `J_mod alg J_mod` vs `alg′` as spans.
    pub commutant: f64,
    /// `max_t` distance of `Δ^{it} alg Δ^{−it}` from `alg`, `t ∈ {0.5, 1, 2}`.
    pub modular_flow: f64,
    pub delta_hermitian: f64,
    pub delta_min_eigenvalue: f64,
}

impl ModularResiduals {
    pub fn max_exact(&self) -> f64 {
        [
            self.delta_vacuum,
            self.j_vacuum,
            self.j_involution,
            self.j_delta_inversion,
            self.commutant,
            self.modular_flow,
            self.delta_hermitian,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Modular objects of `(alg, Ω)` with the invariants checked.
pub fn modular_objects(alg: &MatrixAlgebra, omega: &Vector) -> Result<ModularData> {
    let n = alg.dim;
    if omega.len() != n {
        return Err(Error::invalid(
            "omega",
            format!("length {} for dimension {n}", omega.len()),
        ));
    }
    let cyclic = alg.orbit_rank(omega);
    if cyclic < n {
        return Err(Error::NotCyclic {
            rank: cyclic,
            dim: n,
        });
    }
    let comm = commutant(alg);
    let separating = comm.orbit_rank(omega);
    if separating < n {
        return Err(Error::NotSeparating {
            rank: separating,
            dim: n,
        });
    }

    // S(AΩ) = A*Ω, i.e. M·conj(V) = W with V = [AΩ], W = [A*Ω].
    let k = alg.len();
    let mut v = Mat::zeros(n, k);
    let mut w = Mat::zeros(n, k);
    for (j, b) in alg.basis.iter().enumerate() {
        v.set_column(j, &(b * omega));
        w.set_column(j, &(b.adjoint() * omega));
    }
    let m = &w * pseudo_inverse(&conj_mat(&v), 1e-12);
    let s = Antilinear { matrix: m.clone() };
    // Δ = S*S with S* = v ↦ Mᵀ·conj(v).
    let raw = m.transpose() * conj_mat(&m);
    let delta = (&raw + raw.adjoint()) * real(0.5);
    let delta_hermitian = op_norm(&(&raw - raw.adjoint()));
    let eig = delta.clone().symmetric_eigen();
    let delta_min_eigenvalue = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(delta_min_eigenvalue > 0.0) {
        return Err(Error::Construction(format!(
            "Δ is not positive definite (λ_min = {delta_min_eigenvalue:.3e})"
        )));
    }
    let inv_sqrt = hermitian_function(&delta, |x| real(x.powf(-0.5)));
    let j_mod = Antilinear {
        matrix: &m * conj_mat(&inv_sqrt),
    };

    let id = Mat::identity(n, n);
    let delta_inv = hermitian_function(&delta, |x| real(1.0 / x));
    let jaj = alg.map(|a| j_mod.conjugate(a));
    let mut flow = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let u = hermitian_function(&delta, |x| C64::from_polar(1.0, t * x.ln()));
        let ua = u.adjoint();
        flow = flow.max(
            alg.basis
                .iter()
                .map(|a| alg.distance(&(&u * a * &ua)))
                .fold(0.0, f64::max),
        );
    }
    let residuals = ModularResiduals {
        delta_vacuum: (&delta * omega - omega).norm(),
        j_vacuum: (j_mod.apply(omega) - omega).norm(),
        j_involution: op_norm(&(j_mod.compose(&j_mod) - &id)),
        j_delta_inversion: op_norm(&(j_mod.conjugate(&delta) - &delta_inv)),
        commutant: jaj.span_distance(&comm),
        modular_flow: flow,
        delta_hermitian,
        delta_min_eigenvalue,
    };
    Ok(ModularData {
        delta,
        j_mod,
        omega: omega.clone(),
        s,
        residuals,
    })
}

/// Distance between `J_mod` of a wedge sub-algebra and the geometric `J`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometricModularReport {
    pub dim: usize,
    pub algebra_dim: usize,
    pub commutant_dim: usize,
    /// `‖U_mod − U_geo‖` for the matrices of the two antilinear maps.
    pub j_distance: f64,
    /// `‖Δ − 1‖`; the geometric theory has no finite-size prediction.
    pub delta_deviation: f64,
    /// `J_geo alg J_geo` vs `alg′` as spans.
    pub geometric_commutant_distance: f64,
    pub residuals: ModularResiduals,
}

/// Diagnostic only: nothing here is asserted.
pub fn geometric_vs_modular_report(
    net: &TwoDNet,
    samples: &[WedgeElement],
) -> Result<GeometricModularReport> {
    let gens: Vec<Mat> = samples.iter().map(|s| s.operator.clone()).collect();
    let alg = MatrixAlgebra::generate(&gens, None)?;
    let data = modular_objects(&alg, net.vacuum())?;
    let comm = commutant(&alg);
    let geo = Antilinear::complex_conjugation(net.dim());
    let geometric_commutant_distance = alg.map(|a| geo.conjugate(a)).span_distance(&comm);
    Ok(GeometricModularReport {
        dim: net.dim(),
        algebra_dim: alg.len(),
        commutant_dim: comm.len(),
        j_distance: op_norm(&(&data.j_mod.matrix - &geo.matrix)),
        delta_deviation: op_norm(&(&data.delta - Mat::identity(net.dim(), net.dim()))),
        geometric_commutant_distance,
        residuals: data.residuals,
    })
}

/// A finite-dimensional pair `(alg, Ω)` with closed-form modular objects.
#[derive(Debug, Clone)]
pub struct WorkedExample {
    pub name: &'static str,
    pub algebra: MatrixAlgebra,
    pub omega: Vector,
    pub delta: Mat,
    /// `J_mod` as `v ↦ U·conj(v)`.
    pub j_matrix: Mat,
}

/// Diagonal `2×2` algebra, and `M₂⊗1` on a Schmidt-diagonal vector.
pub fn worked_examples() -> Vec<WorkedExample> {
    let (a, b) = (C64::new(0.6, 0.3), C64::new(-0.2, 0.7));
    let p = Mat::from_diagonal(&Vector::from_vec(vec![real(1.0), real(0.0)]));
    let diagonal = WorkedExample {
        name: "diagonal",
        algebra: MatrixAlgebra::from_span(2, &[p.clone(), Mat::identity(2, 2) - p]),
        omega: Vector::from_vec(vec![a, b]),
        delta: Mat::identity(2, 2),
        j_matrix: Mat::from_diagonal(&Vector::from_vec(vec![a / a.conj(), b / b.conj()])),
    };

    let (l0, l1) = (0.7f64, 0.3f64);
    let id = Mat::identity(2, 2);
    let x = Mat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
    let z = Mat::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)]);
    let algebra = MatrixAlgebra::generate(&[kron(&x, &id), kron(&z, &id)], None)
        .expect("M2 closes in dimension 4");
    let mut swap = Mat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            swap[(2 * j + i, 2 * i + j)] = real(1.0);
        }
    }
    let entangled = WorkedExample {
        name: "entangled",
        algebra,
        omega: Vector::from_vec(vec![real(l0.sqrt()), real(0.0), real(0.0), real(l1.sqrt())]),
        delta: Mat::from_diagonal(&Vector::from_vec(vec![
            real(1.0),
            real(l0 / l1),
            real(l1 / l0),
            real(1.0),
        ])),
        j_matrix: swap,
    };
    vec![diagonal, entangled]
}

/// `φ₁(f)⊗1 + 1⊗φ₂(g)` on a small net; one generator, full orbit.
pub fn toy_wedge_samples(net: &TwoDNet) -> Result<Vec<WedgeElement>> {
    use crate::fock::TestFunction;
    use crate::net::{ChiralGenerator, Wedge};
    let grid = net.net1.grid();
    let f = TestFunction::gaussian(grid, -2.0, 0.5, 1.0)?;
    let g = TestFunction::gaussian(grid, 2.0, 0.5, 0.6)?;
    let a = WedgeElement::product(
        net,
        ChiralGenerator::field(f),
        ChiralGenerator::identity(),
        Wedge::Right,
    )?;
    let b = WedgeElement::product(
        net,
        ChiralGenerator::identity(),
        ChiralGenerator::field(g),
        Wedge::Right,
    )?;
    Ok(vec![WedgeElement::linear_combination(&[
        (real(1.0), &a),
        (real(1.0), &b),
    ])?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn diag2() -> MatrixAlgebra {
        let p = Mat::from_diagonal(&Vector::from_vec(vec![real(1.0), real(0.0)]));
        MatrixAlgebra::generate(&[p], None).unwrap()
    }

    #[test]
    fn commutant_of_identity_is_everything_and_vice_versa() {
        assert_eq!(commutant(&MatrixAlgebra::scalars(3)).len(), 9);
        assert_eq!(commutant(&MatrixAlgebra::full(3)).len(), 1);
    }

    #[test]
    fn diagonal_algebra_is_maximal_abelian() {
        let d = diag2();
        assert_eq!(d.len(), 2);
        assert!(commutant(&d).span_distance(&d) < 1e-12);
    }

    #[test]
    fn generated_algebra_closes_under_products() {
        let x = Mat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        let z = Mat::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)]);
        assert_eq!(
            MatrixAlgebra::generate(std::slice::from_ref(&x), None)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(MatrixAlgebra::generate(&[x, z], None).unwrap().len(), 4);
    }

    #[test]
    fn diagonal_example_has_trivial_delta_and_phase_conjugation() {
        let (a, b) = (c(0.6, 0.3), c(-0.2, 0.7));
        let omega = Vector::from_vec(vec![a, b]);
        let data = modular_objects(&diag2(), &omega).unwrap();
        assert!(op_norm(&(&data.delta - Mat::identity(2, 2))) < 1e-10);
        let oracle = Mat::from_diagonal(&Vector::from_vec(vec![a / a.conj(), b / b.conj()]));
        assert!((&data.j_mod.matrix - oracle)
            .iter()
            .all(|z| z.norm() < 1e-10));
        assert!(data.residuals.max_exact() < 1e-10);
    }

    #[test]
    fn vacuum_must_be_cyclic_and_separating() {
        let omega = Vector::from_vec(vec![real(1.0), real(0.0)]);
        assert!(matches!(
            modular_objects(&diag2(), &omega),
            Err(Error::NotCyclic { .. })
        ));
        let full = MatrixAlgebra::full(2);
        let omega = Vector::from_vec(vec![real(0.6), real(0.8)]);
        assert!(matches!(
            modular_objects(&full, &omega),
            Err(Error::NotSeparating { .. })
        ));
        assert!(matches!(
            modular_objects(&MatrixAlgebra::scalars(2), &omega),
            Err(Error::NotCyclic { .. })
        ));
    }

    /// `Δ = ρ⊗σ⁻¹` and `J(u_a⊗v̄_b) = u_b⊗v̄_a` from the Schmidt form of `Ω`.
    fn schmidt_oracle(omega: &Vector) -> (Mat, Mat) {
        let r = Mat::from_fn(2, 2, |i, j| omega[2 * i + j]);
        let svd = r.svd(true, true);
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let v = vt.adjoint();
        let s2 = Mat::from_diagonal(&svd.singular_values.map(|x| real(x * x)));
        let rho = &u * &s2 * u.adjoint();
        let sigma = conj_mat(&v) * &s2 * v.transpose();
        let delta = kron(&rho, &sigma.try_inverse().unwrap());
        let mut f = Mat::zeros(4, 4);
        let mut fp = Mat::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                let uv = |x: usize, y: usize| {
                    crate::linalg::kron_vec(
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

    fn m2_tensor_one() -> MatrixAlgebra {
        let id = Mat::identity(2, 2);
        let x = Mat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        let z = Mat::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)]);
        MatrixAlgebra::generate(&[kron(&x, &id), kron(&z, &id)], None).unwrap()
    }

    #[test]
    fn entangled_example_matches_schmidt_oracle() {
        let alg = m2_tensor_one();
        assert_eq!(alg.len(), 4);
        let (l0, l1) = (0.7f64, 0.3f64);
        let omega = Vector::from_vec(vec![real(l0.sqrt()), real(0.0), real(0.0), real(l1.sqrt())]);
        let data = modular_objects(&alg, &omega).unwrap();
        let (delta, j) = schmidt_oracle(&omega);
        assert!((&data.delta - &delta).iter().all(|z| z.norm() < 1e-10));
        assert!((&data.j_mod.matrix - &j).iter().all(|z| z.norm() < 1e-10));
        let rho = Mat::from_diagonal(&Vector::from_vec(vec![real(l0), real(l1)]));
        let closed = kron(&rho, &rho.clone().try_inverse().unwrap());
        assert!((&data.delta - closed).iter().all(|z| z.norm() < 1e-10));
        assert!(data.residuals.max_exact() < 1e-10);
    }

    #[test]
    fn worked_examples_match_their_closed_forms() {
        for ex in worked_examples() {
            let data = modular_objects(&ex.algebra, &ex.omega).unwrap();
            assert!(
                (&data.delta - &ex.delta).iter().all(|z| z.norm() < 1e-10),
                "{}",
                ex.name
            );
            assert!(
                (&data.j_mod.matrix - &ex.j_matrix)
                    .iter()
                    .all(|z| z.norm() < 1e-10),
                "{}",
                ex.name
            );
            if ex.name == "entangled" {
                let (delta, j) = schmidt_oracle(&ex.omega);
                assert!((&ex.delta - delta).norm() < 1e-12);
                assert!((&ex.j_matrix - j).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rotated_entangled_vacuum_matches_schmidt_oracle() {
        let alg = m2_tensor_one();
        let omega = Vector::from_vec(vec![c(0.5, 0.1), c(0.2, -0.3), c(0.1, 0.4), c(-0.6, 0.25)])
            .normalize();
        let data = modular_objects(&alg, &omega).unwrap();
        let (delta, j) = schmidt_oracle(&omega);
        assert!((&data.delta - &delta).iter().all(|z| z.norm() < 1e-10));
        assert!((&data.j_mod.matrix - &j).iter().all(|z| z.norm() < 1e-10));
        assert!(data.residuals.max_exact() < 1e-10);
    }

    #[test]
    fn geometric_report_on_product_vacuum_toy() {
        let net = TwoDNet::symmetric(1.0, 1, 1, None).unwrap();
        assert_eq!(net.dim(), 4);
        let samples = toy_wedge_samples(&net).unwrap();
        let r = geometric_vs_modular_report(&net, &samples).unwrap();
        assert_eq!(r.algebra_dim, 4);
        assert!(r.j_distance.is_finite());
        assert!(r.residuals.max_exact() < 1e-10);
        let again = geometric_vs_modular_report(&net, &samples).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn geometric_report_rejects_scalar_subalgebra() {
        let net = TwoDNet::symmetric(1.0, 1, 1, None).unwrap();
        let id = WedgeElement::identity(&net, crate::net::Wedge::Right);
        assert!(matches!(
            geometric_vs_modular_report(&net, &[id]),
            Err(Error::NotCyclic { .. })
        ));
    }
}
