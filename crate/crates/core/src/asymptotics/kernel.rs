use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{phase, C64};
use crate::quadrature::{ln_gaussian_oscillatory_derivative_bound, CompositeRule};

/// Half-width of the integration window in units of `|T|^ε`.
pub const WINDOW: f64 = 8.0;

/// Base profile `h` of the averaging family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseProfile {
    /// Standard normal density.
    #[default]
    Gaussian,
}

impl BaseProfile {
    pub fn density(self, u: f64) -> f64 {
        match self {
            BaseProfile::Gaussian => (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt(),
        }
    }

    /// `ĥ(k) = ∫ h(u) e^{iku} du`.
    pub fn fourier(self, k: f64) -> f64 {
        match self {
            BaseProfile::Gaussian => (-0.5 * k * k).exp(),
        }
    }

    /// Mass of `h` outside `[−WINDOW, WINDOW]`.
    pub fn tail_mass(self) -> f64 {
        match self {
            BaseProfile::Gaussian => statrs::function::erf::erfc(WINDOW / std::f64::consts::SQRT_2),
        }
    }
}

/// Node and accuracy budget for the time integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Requested bound on each scalar kernel transform.
    pub target: f64,
    pub max_nodes: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            order: 16,
            target: 1e-12,
            max_nodes: 8192,
        }
    }
}

/// `h_T(t) = |T|^{−ε} h(|T|^{−ε}(t − T))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingKernel {
    pub profile: BaseProfile,
    pub exponent: f64,
    pub center: f64,
}

/// Quadrature value of `∫ h_T(t) e^{iωt} dt` with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTransform {
    pub value: C64,
    pub bound: f64,
    pub nodes: usize,
}

impl AveragingKernel {
    pub fn new(profile: BaseProfile, exponent: f64, center: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent < 1.0) {
            return Err(Error::invalid(
                "kernel_exponent",
                format!("must lie in (0, 1), got {exponent}"),
            ));
        }
        if center == 0.0 || !center.is_finite() {
            return Err(Error::invalid(
                "T",
                format!("kernel center must be finite and nonzero, got {center}"),
            ));
        }
        Ok(AveragingKernel {
            profile,
            exponent,
            center,
        })
    }

    pub fn gaussian(exponent: f64, center: f64) -> Result<Self> {
        Self::new(BaseProfile::Gaussian, exponent, center)
    }

    /// `|T|^ε`.
    pub fn width(&self) -> f64 {
        self.center.abs().powf(self.exponent)
    }

    pub fn window(&self) -> (f64, f64) {
        let s = self.width();
        (self.center - WINDOW * s, self.center + WINDOW * s)
    }

    pub fn density(&self, t: f64) -> f64 {
        let s = self.width();
        self.profile.density((t - self.center) / s) / s
    }

    /// Closed form of `∫ h_T(t) e^{iωt} dt` over the whole line.
    pub fn fourier(&self, omega: f64) -> C64 {
        phase(omega * self.center) * self.profile.fourier(self.width() * omega)
    }

    fn rule(&self, panels: usize, order: usize) -> CompositeRule {
        let (a, b) = self.window();
        CompositeRule::new(a, b, panels, order)
    }

    /// Bound on the quadrature error of [`Self::transform`] for given panels:
    /// Gauss–Legendre remainder, window tail, and a summation roundoff allowance.
    fn error_bound(&self, omega: f64, rule: &CompositeRule) -> f64 {
        let s = self.width();
        let nu = omega * s;
        let m = rule.order();
        // The remainder is stated in the rescaled variable u = (t − T)/s.
        let unit_rule = CompositeRule::new(-WINDOW, WINDOW, rule.panels(), m);
        let remainder =
            unit_rule.remainder_bound(ln_gaussian_oscillatory_derivative_bound(2 * m, nu));
        remainder + self.profile.tail_mass() + rule.len() as f64 * f64::EPSILON
    }

    /// `∫ h_T(t) e^{iωt} dt` by composite Gauss–Legendre on the window,
    /// doubling the panel count until the error bound meets the target.
    pub fn transform(&self, omega: f64, settings: &QuadratureSettings) -> Result<KernelTransform> {
        let mut panels = 1;
        loop {
            let rule = self.rule(panels, settings.order);
            let bound = self.error_bound(omega, &rule);
            if bound <= settings.target {
                let value = rule.integrate_complex(|t| phase(omega * t) * self.density(t));
                return Ok(KernelTransform {
                    value,
                    bound,
                    nodes: rule.len(),
                });
            }
            if 2 * rule.len() > settings.max_nodes {
                return Err(Error::QuadratureBudget {
                    bound,
                    target: settings.target,
                    nodes: rule.len(),
                });
            }
            panels *= 2;
        }
    }

    /// `∫ h_T` under the quadrature; must equal 1 within 10⁻¹⁰.
    pub fn check_normalization(&self, settings: &QuadratureSettings) -> Result<f64> {
        let t = self.transform(0.0, settings)?;
        let defect = (t.value - C64::new(1.0, 0.0)).norm();
        if defect > 1e-10 {
            return Err(Error::Construction(format!(
                "kernel integrates to {} (defect {defect:.2e})",
                t.value
            )));
        }
        Ok(defect)
    }
}
