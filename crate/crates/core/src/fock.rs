//! Truncated second-quantized chiral boson on one lightline.
//!
//! Occupation-number basis on a positive momentum grid, ladder operators,
//! the chiral momentum generator and smeared fields built from
//! Gaussian-windowed wave packets.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, commutator, op_norm, phase, real, Mat, Vector, C64};

/// Default bound on the dimension of a single chiral factor.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Default fraction of position-space mass allowed outside a nominal support.
pub const DEFAULT_LEAKAGE: f64 = 1e-3;

/// Positive momentum grid `{k·spacing | k = 1..count}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    spacing: f64,
    count: usize,
}

impl ModeGrid {
    pub fn new(spacing: f64, count: usize) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid(
                "grid.spacing",
                "must be a positive finite number",
            ));
        }
        if count == 0 {
            return Err(Error::invalid("grid.count", "must be at least 1"));
        }
        Ok(ModeGrid { spacing, count })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Momentum of mode `k` (zero based), i.e. `(k+1)·spacing`.
    pub fn momentum(&self, mode: usize) -> f64 {
        (mode + 1) as f64 * self.spacing
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.momentum(k)).collect()
    }
}

/// Occupation tuple `(n₁, …, n_N)`.
pub type Occupation = Vec<u8>;

/// Truncated Fock space admitted by a per-mode cap and an optional energy cap.
#[derive(Debug, Clone)]
pub struct FockSpace {
    grid: ModeGrid,
    per_mode_cap: u8,
    energy_cap: Option<f64>,
    basis: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
    /// Total chiral momentum of each basis state in units of the grid spacing.
    momentum_units: Vec<u32>,
    /// Nonzero entries `(row, col, value)` of each annihilator.
    ladders: Vec<Vec<(usize, usize, f64)>>,
}

impl FockSpace {
    /// Build with the default dimension bound.
    pub fn build(grid: ModeGrid, per_mode_cap: u8, energy_cap: Option<f64>) -> Result<Self> {
        Self::build_with_bound(grid, per_mode_cap, energy_cap, DEFAULT_MAX_DIM)
    }

    pub fn build_with_bound(
        grid: ModeGrid,
        per_mode_cap: u8,
        energy_cap: Option<f64>,
        max_dim: usize,
    ) -> Result<Self> {
        if per_mode_cap == 0 {
            return Err(Error::invalid("per_mode_cap", "must be at least 1"));
        }
        if let Some(e) = energy_cap {
            if !(e > 0.0) {
                return Err(Error::invalid(
                    "energy_cap",
                    "must be positive or unbounded",
                ));
            }
        }
        // Energy cap in integer momentum units; the small slack absorbs
        // representation error in caps that are exact multiples of the spacing.
        let unit_cap: Option<u32> = energy_cap.map(|e| (e / grid.spacing + 1e-9).floor() as u32);
        if unit_cap.is_none() {
            let mut count: usize = 1;
            for _ in 0..grid.count {
                count = count.saturating_mul(per_mode_cap as usize + 1);
            }
            if count > max_dim {
                return Err(Error::DimensionOverflow {
                    dim: count,
                    bound: max_dim,
                });
            }
        }

        let mut basis = Vec::new();
        let mut current = vec![0u8; grid.count];
        enumerate(
            &mut current,
            0,
            0,
            per_mode_cap,
            unit_cap,
            &mut basis,
            max_dim,
        )?;
        let weight = |occ: &Occupation| -> u32 {
            occ.iter()
                .enumerate()
                .map(|(k, &n)| n as u32 * (k as u32 + 1))
                .sum()
        };
        basis.sort_by(|a, b| weight(a).cmp(&weight(b)).then_with(|| a.cmp(b)));
        if basis.len() < 2 {
            return Err(Error::invalid(
                "energy_cap",
                "admits only the vacuum; the space must contain an excitation",
            ));
        }
        let index: HashMap<Occupation, usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, o)| (o, i))
            .collect();
        let momentum_units = basis.iter().map(weight).collect();

        let mut ladders = Vec::with_capacity(grid.count);
        for mode in 0..grid.count {
            let mut entries = Vec::new();
            for (col, occ) in basis.iter().enumerate() {
                let n = occ[mode];
                if n == 0 {
                    continue;
                }
                let mut lower = occ.clone();
                lower[mode] -= 1;
                if let Some(&row) = index.get(&lower) {
                    entries.push((row, col, (n as f64).sqrt()));
                }
            }
            ladders.push(entries);
        }

        Ok(FockSpace {
            grid,
            per_mode_cap,
            energy_cap,
            basis,
            index,
            momentum_units,
            ladders,
        })
    }

    pub fn grid(&self) -> &ModeGrid {
        &self.grid
    }

    pub fn per_mode_cap(&self) -> u8 {
        self.per_mode_cap
    }

    pub fn energy_cap(&self) -> Option<f64> {
        self.energy_cap
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Occupation] {
        &self.basis
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// The vacuum sorts first under the graded order.
    pub fn vacuum_index(&self) -> usize {
        0
    }

    pub fn vacuum(&self) -> Vector {
        linalg::basis_vector(self.dim(), self.vacuum_index())
    }

    /// Basis vector of an occupation tuple; `None` when it is truncated away.
    pub fn state(&self, occupation: &[u8]) -> Option<Vector> {
        self.index_of(occupation)
            .map(|i| linalg::basis_vector(self.dim(), i))
    }

    /// Total chiral momentum of basis state `i` in units of the spacing.
    pub fn momentum_units(&self, i: usize) -> u32 {
        self.momentum_units[i]
    }

    pub fn momentum(&self, i: usize) -> f64 {
        self.momentum_units[i] as f64 * self.grid.spacing
    }

    pub fn identity(&self) -> Mat {
        Mat::identity(self.dim(), self.dim())
    }

    fn annihilator_matrix(&self, mode: usize) -> Mat {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for &(r, c, v) in &self.ladders[mode] {
            m[(r, c)] = real(v);
        }
        m
    }
}

fn enumerate(
    current: &mut Occupation,
    mode: usize,
    units: u32,
    cap: u8,
    unit_cap: Option<u32>,
    out: &mut Vec<Occupation>,
    max_dim: usize,
) -> Result<()> {
    if mode == current.len() {
        out.push(current.clone());
        if out.len() > max_dim {
            return Err(Error::DimensionOverflow {
                dim: out.len(),
                bound: max_dim,
            });
        }
        return Ok(());
    }
    let step = mode as u32 + 1;
    for n in 0..=cap {
        let e = units + n as u32 * step;
        if let Some(limit) = unit_cap {
            if e > limit {
                break;
            }
        }
        current[mode] = n;
        enumerate(current, mode + 1, e, cap, unit_cap, out, max_dim)?;
    }
    current[mode] = 0;
    Ok(())
}

/// Closed interval on the lightline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn shifted(&self, s: f64) -> Self {
        Interval::new(self.lo + s, self.hi + s)
    }

    pub fn reflected(&self) -> Self {
        Interval::new(-self.hi, -self.lo)
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Self {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.3}, {:.3}]", self.lo, self.hi)
    }
}

/// Gaussian wave packet `g(x) = A·exp(−(x−c)²/(2w²))` sampled on the grid with
/// the current measure, `f̂(k) = A·√(k·Δ)·w·e^{−w²k²/2}·e^{−ikc}`.
///
/// The nominal support is the smallest centred interval holding all but
/// `leakage` of the position-space mass `|g|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
    pub spacing: f64,
    pub momentum_profile: Vec<C64>,
    pub nominal_support: Interval,
    pub leakage: f64,
}

impl TestFunction {
    pub fn gaussian(grid: &ModeGrid, center: f64, width: f64, amplitude: f64) -> Result<Self> {
        Self::gaussian_with_leakage(grid, center, width, amplitude, DEFAULT_LEAKAGE)
    }

    pub fn gaussian_with_leakage(
        grid: &ModeGrid,
        center: f64,
        width: f64,
        amplitude: f64,
        leakage: f64,
    ) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::invalid("test_function.width", "must be positive"));
        }
        if !(leakage > 0.0 && leakage < 1.0) {
            return Err(Error::invalid(
                "test_function.leakage",
                "must lie in (0, 1)",
            ));
        }
        let radius = width * statrs::function::erf::erfc_inv(leakage);
        let profile = Self::profile(grid, center, width, amplitude);
        Ok(TestFunction {
            center,
            width,
            amplitude,
            spacing: grid.spacing(),
            momentum_profile: profile,
            nominal_support: Interval::new(center - radius, center + radius),
            leakage,
        })
    }

    fn profile(grid: &ModeGrid, center: f64, width: f64, amplitude: f64) -> Vec<C64> {
        let d = grid.spacing();
        grid.momenta()
            .into_iter()
            .map(|k| {
                let env = amplitude * (k * d).sqrt() * width * (-0.5 * width * width * k * k).exp();
                phase(-k * center) * env
            })
            .collect()
    }

    pub fn zero(grid: &ModeGrid) -> Self {
        TestFunction {
            center: 0.0,
            width: 1.0,
            amplitude: 0.0,
            spacing: grid.spacing(),
            momentum_profile: vec![C64::new(0.0, 0.0); grid.count()],
            nominal_support: Interval::new(0.0, 0.0),
            leakage: DEFAULT_LEAKAGE,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.momentum_profile.iter().all(|z| z.norm() == 0.0)
    }

    pub fn profile_norm(&self) -> f64 {
        self.momentum_profile
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Fraction of `|g|²` lying to the right of `x`.
    pub fn mass_right_of(&self, x: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        0.5 * statrs::function::erf::erfc((x - self.center) / self.width)
    }

    pub fn mass_left_of(&self, x: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        0.5 * statrs::function::erf::erfc((self.center - x) / self.width)
    }

    /// Translate by `s` along the lightline.
    pub fn translated(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.center += s;
        out.nominal_support = self.nominal_support.shifted(s);
        for (k, z) in out.momentum_profile.iter_mut().enumerate() {
            *z *= phase(-((k + 1) as f64) * self.spacing * s);
        }
        out
    }

    /// Mirror image `x ↦ −x`; on the momentum side this is complex conjugation.
    pub fn reflected(&self) -> Self {
        let mut out = self.clone();
        out.center = -self.center;
        out.nominal_support = self.nominal_support.reflected();
        for z in out.momentum_profile.iter_mut() {
            *z = z.conj();
        }
        out
    }

    /// `Σ_k f̂(k)·conj(ĝ(k))`.
    pub fn overlap(&self, other: &TestFunction) -> C64 {
        self.momentum_profile
            .iter()
            .zip(&other.momentum_profile)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    fn check_grid(&self, space: &FockSpace) -> Result<()> {
        let count = space.grid().count();
        if self.momentum_profile.len() != count
            || (self.spacing - space.grid().spacing()).abs() > 1e-15
        {
            return Err(Error::MismatchedGrid {
                expected: self.momentum_profile.len(),
                found: count,
            });
        }
        Ok(())
    }
}

/// A bounded operator on one chiral factor.
#[derive(Debug, Clone)]
pub struct ChiralOperator {
    pub matrix: Mat,
    pub label: String,
    pub support: Option<Interval>,
}

impl ChiralOperator {
    pub fn new(matrix: Mat, label: impl Into<String>, support: Option<Interval>) -> Self {
        ChiralOperator {
            matrix,
            label: label.into(),
            support,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.matrix)
    }
}

/// Smeared field or its Weyl exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    #[default]
    Smeared,
    Weyl,
}

pub fn build_fock_space(
    grid: ModeGrid,
    per_mode_cap: u8,
    energy_cap: Option<f64>,
) -> Result<FockSpace> {
    FockSpace::build(grid, per_mode_cap, energy_cap)
}

/// `(a_k, a_k†)` for mode `k`; transitions out of the truncated basis are dropped.
pub fn ladder_matrices(space: &FockSpace, mode: usize) -> Result<(ChiralOperator, ChiralOperator)> {
    if mode >= space.grid().count() {
        return Err(Error::ModeOutOfRange {
            index: mode,
            count: space.grid().count(),
        });
    }
    let a = space.annihilator_matrix(mode);
    let ad = a.adjoint();
    Ok((
        ChiralOperator::new(a, format!("a_{}", mode + 1), None),
        ChiralOperator::new(ad, format!("a†_{}", mode + 1), None),
    ))
}

/// Diagonal generator `P̂` with eigenvalue `Σ n_k·k·Δ`.
pub fn chiral_momentum(space: &FockSpace) -> ChiralOperator {
    let diag = Vector::from_iterator(
        space.dim(),
        (0..space.dim()).map(|i| real(space.momentum(i))),
    );
    ChiralOperator::new(Mat::from_diagonal(&diag), "P̂", None)
}

/// `φ(f) = Σ_k f̂(k)·a_k + conj(f̂(k))·a†_k`.
pub fn field_operator(space: &FockSpace, f: &TestFunction) -> Result<ChiralOperator> {
    f.check_grid(space)?;
    let n = space.dim();
    let mut m = Mat::zeros(n, n);
    for (mode, &amp) in f.momentum_profile.iter().enumerate() {
        if amp.norm() == 0.0 {
            continue;
        }
        for &(r, c, v) in &space.ladders[mode] {
            m[(r, c)] += amp * v;
            m[(c, r)] += amp.conj() * v;
        }
    }
    Ok(ChiralOperator::new(
        m,
        format!("φ(c={:.2},w={:.2})", f.center, f.width),
        Some(f.nominal_support),
    ))
}

/// `e^{iφ(f)}`, the bounded Weyl operator.
pub fn weyl_operator(space: &FockSpace, f: &TestFunction) -> Result<ChiralOperator> {
    let field = field_operator(space, f)?;
    let w = linalg::hermitian_function(&field.matrix, phase);
    Ok(ChiralOperator::new(
        w,
        format!("W({})", field.label),
        field.support,
    ))
}

pub fn local_operator(
    space: &FockSpace,
    f: &TestFunction,
    kind: FieldKind,
) -> Result<ChiralOperator> {
    match kind {
        FieldKind::Smeared => field_operator(space, f),
        FieldKind::Weyl => weyl_operator(space, f),
    }
}

/// `e^{iP̂s}·A·e^{−iP̂s}`.
pub fn translate_chiral(space: &FockSpace, op: &ChiralOperator, s: f64) -> ChiralOperator {
    let n = space.dim();
    let mut m = op.matrix.clone();
    for col in 0..n {
        let pc = space.momentum(col);
        for row in 0..n {
            let z = m[(row, col)];
            if z.norm() != 0.0 {
                m[(row, col)] = z * phase((space.momentum(row) - pc) * s);
            }
        }
    }
    ChiralOperator::new(
        m,
        format!("α_{s:.3}({})", op.label),
        op.support.map(|i| i.shifted(s)),
    )
}

/// `‖[φ(f), φ(g)]‖` in operator norm. Truncation artifacts of the ladder
/// algebra are included, so the value is a leakage diagnostic and not zero.
pub fn local_commutator_profile(
    space: &FockSpace,
    f: &TestFunction,
    g: &TestFunction,
) -> Result<f64> {
    if f.nominal_support.intersects(&g.nominal_support) && !f.is_zero() && !g.is_zero() {
        log::warn!(
            "local_commutator_profile: supports {} and {} overlap",
            f.nominal_support,
            g.nominal_support
        );
    }
    let a = field_operator(space, f)?;
    let b = field_operator(space, g)?;
    Ok(op_norm(&commutator(&a.matrix, &b.matrix)))
}

/// `‖[φ(f), φ(g)]Ω‖`. On the vacuum sector the truncated commutator is the
/// c-number `2i·Im Σ f̂ conj(ĝ)`, so this isolates the grid discretization part
/// of the locality leakage.
pub fn vacuum_commutator(space: &FockSpace, f: &TestFunction, g: &TestFunction) -> Result<f64> {
    let a = field_operator(space, f)?;
    let b = field_operator(space, g)?;
    Ok((commutator(&a.matrix, &b.matrix) * space.vacuum()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_hermitian;

    fn grid(d: f64, n: usize) -> ModeGrid {
        ModeGrid::new(d, n).unwrap()
    }

    /// Brute-force count of occupation tuples over the full cube.
    fn brute_force_count(n_modes: usize, cap: u8, unit_cap: Option<u32>) -> usize {
        let total = (cap as usize + 1).pow(n_modes as u32);
        (0..total)
            .filter(|&code| {
                let mut c = code;
                let mut e = 0u32;
                for k in 0..n_modes {
                    let n = (c % (cap as usize + 1)) as u32;
                    c /= cap as usize + 1;
                    e += n * (k as u32 + 1);
                }
                unit_cap.is_none_or(|u| e <= u)
            })
            .count()
    }

    #[test]
    fn single_mode_qubit() {
        let s = FockSpace::build(grid(1.0, 1), 1, None).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis(), &[vec![0], vec![1]]);
    }

    #[test]
    fn dimensions_match_enumeration() {
        assert_eq!(brute_force_count(2, 2, None), 9);
        assert_eq!(FockSpace::build(grid(1.0, 2), 2, None).unwrap().dim(), 9);
        assert_eq!(brute_force_count(2, 2, Some(2)), 4);
        let s = FockSpace::build(grid(1.0, 2), 2, Some(2.0)).unwrap();
        assert_eq!(s.dim(), 4);
        assert!(s.index_of(&[1, 1]).is_none());
        for occ in [[0, 0], [1, 0], [2, 0], [0, 1]] {
            assert!(s.index_of(&occ).is_some());
        }
        // default desk-scale factor
        let d = FockSpace::build(grid(1.0, 3), 2, Some(4.0)).unwrap();
        assert_eq!(d.dim(), brute_force_count(3, 2, Some(4)));
        assert_eq!(d.dim(), 9);
    }

    #[test]
    fn basis_order_is_graded_then_lexicographic() {
        let s = FockSpace::build(grid(1.0, 2), 2, Some(2.0)).unwrap();
        assert_eq!(s.basis(), &[vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0]]);
        assert_eq!(s.vacuum_index(), 0);
    }

    #[test]
    fn overflow_is_reported() {
        let err = FockSpace::build_with_bound(grid(1.0, 12), 2, None, 1000).unwrap_err();
        assert!(matches!(err, Error::DimensionOverflow { .. }));
        let err = FockSpace::build_with_bound(grid(0.01, 40), 3, Some(1.0), 500).unwrap_err();
        assert!(matches!(err, Error::DimensionOverflow { .. }));
    }

    #[test]
    fn ladder_examples() {
        let s = FockSpace::build(grid(1.0, 1), 1, None).unwrap();
        let (a, ad) = ladder_matrices(&s, 0).unwrap();
        assert_eq!(ad.matrix, a.matrix.adjoint());
        assert!((&a.matrix * s.vacuum()).norm() == 0.0);
        let one = s.state(&[1]).unwrap();
        assert_eq!(&ad.matrix * s.vacuum(), one);
        assert_eq!((&ad.matrix * &one).norm(), 0.0);
        let comm = commutator(&a.matrix, &ad.matrix);
        assert!((comm[(0, 0)] - real(1.0)).norm() < 1e-15);
        assert!(ladder_matrices(&s, 1).is_err());
    }

    #[test]
    fn ladder_elements_are_sqrt_n_plus_one() {
        let s = FockSpace::build(grid(1.0, 2), 3, None).unwrap();
        let (_, ad) = ladder_matrices(&s, 1).unwrap();
        let from = s.index_of(&[1, 2]).unwrap();
        let to = s.index_of(&[1, 3]).unwrap();
        assert!((ad.matrix[(to, from)].re - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn chiral_momentum_eigenvalues() {
        let s = FockSpace::build(grid(1.0, 2), 2, None).unwrap();
        let p = chiral_momentum(&s);
        let at = |o: &[u8]| {
            let i = s.index_of(o).unwrap();
            p.matrix[(i, i)].re
        };
        assert_eq!(at(&[0, 0]), 0.0);
        assert_eq!(at(&[1, 0]), 1.0);
        assert_eq!(at(&[1, 1]), 3.0);
        let zeros = (0..s.dim()).filter(|&i| p.matrix[(i, i)].re == 0.0).count();
        assert_eq!(zeros, 1);
    }

    #[test]
    fn field_examples() {
        let g1 = grid(1.0, 1);
        let s = FockSpace::build(g1, 1, None).unwrap();
        let zero = TestFunction::zero(&g1);
        assert_eq!(field_operator(&s, &zero).unwrap().matrix.norm(), 0.0);

        let mut unit = TestFunction::zero(&g1);
        unit.momentum_profile = vec![real(1.0)];
        let phi = field_operator(&s, &unit).unwrap().matrix;
        let omega = s.vacuum();
        let two_point = omega.dotc(&(&phi * &phi * &omega));
        assert!((two_point - real(1.0)).norm() < 1e-15);
    }

    #[test]
    fn two_point_function_on_small_space() {
        let g = grid(1.0, 2);
        let s = FockSpace::build(g, 2, None).unwrap();
        let f = TestFunction::gaussian(&g, -1.5, 0.6, 1.0).unwrap();
        let h = TestFunction::gaussian(&g, 0.7, 0.4, 0.8).unwrap();
        let a = field_operator(&s, &f).unwrap().matrix;
        let b = field_operator(&s, &h).unwrap().matrix;
        let om = s.vacuum();
        let lhs = om.dotc(&(&a * &b * &om));
        assert!((lhs - f.overlap(&h)).norm() < 1e-14);
        assert!(is_hermitian(&a, 1e-15));
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let s = FockSpace::build(grid(1.0, 2), 1, None).unwrap();
        let f = TestFunction::gaussian(&grid(1.0, 3), 0.0, 0.5, 1.0).unwrap();
        assert!(matches!(
            field_operator(&s, &f),
            Err(Error::MismatchedGrid { .. })
        ));
    }

    #[test]
    fn translation_of_creator_is_a_phase() {
        let g = grid(1.0, 2);
        let s = FockSpace::build(g, 2, None).unwrap();
        let (_, ad) = ladder_matrices(&s, 1).unwrap();
        let shifted = translate_chiral(&s, &ad, 0.3);
        let expected = &ad.matrix * phase(2.0 * 0.3);
        assert!((shifted.matrix - expected).norm() < 1e-14);
        let same = translate_chiral(&s, &ad, 0.0);
        assert_eq!(same.matrix, ad.matrix);
    }

    #[test]
    fn translated_field_matches_translated_test_function() {
        let g = grid(1.0, 3);
        let s = FockSpace::build(g, 2, Some(4.0)).unwrap();
        let f = TestFunction::gaussian(&g, -2.0, 0.5, 1.0).unwrap();
        let phi = field_operator(&s, &f).unwrap();
        let by_op = translate_chiral(&s, &phi, 0.8);
        let by_fn = field_operator(&s, &f.translated(0.8)).unwrap();
        assert!((by_op.matrix - by_fn.matrix).norm() < 1e-13);
        assert!((by_op.support.unwrap().lo - (f.nominal_support.lo + 0.8)).abs() < 1e-15);
    }

    #[test]
    fn nominal_support_leakage() {
        let g = grid(1.0, 3);
        let f = TestFunction::gaussian(&g, 0.0, 0.5, 1.0).unwrap();
        let outside = f.mass_right_of(f.nominal_support.hi) + f.mass_left_of(f.nominal_support.lo);
        assert!((outside - DEFAULT_LEAKAGE).abs() < 1e-9);
    }

    #[test]
    fn zero_profile_commutator_vanishes() {
        let g = grid(1.0, 3);
        let s = FockSpace::build(g, 2, Some(4.0)).unwrap();
        let f = TestFunction::gaussian(&g, -2.0, 0.5, 1.0).unwrap();
        assert_eq!(
            local_commutator_profile(&s, &f, &TestFunction::zero(&g)).unwrap(),
            0.0
        );
    }

    #[test]
    fn vacuum_commutator_is_the_c_number() {
        let g = grid(1.0, 4);
        let s = FockSpace::build(g, 1, Some(5.0)).unwrap();
        let f = TestFunction::gaussian(&g, -1.5, 0.5, 1.0).unwrap();
        let h = TestFunction::gaussian(&g, 1.5, 0.5, 1.0).unwrap();
        let expected = 2.0 * f.overlap(&h).im.abs();
        assert!((vacuum_commutator(&s, &f, &h).unwrap() - expected).abs() < 1e-14);
    }
}
