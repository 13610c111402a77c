//! Scalar effective moduli of homogenized stiffness tensors and their
//! deviations from a reference (FFT) result.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::IsotropicMaterial;
use crate::tensor::Tensor4;

/// Label of the full-field rows in comparison tables.
pub const BASELINE_MODEL: &str = "FFT";

pub const CSV_HEADER: &str = "rve_id,model,contrast,K_norm,mu_norm,E1_norm,deltaK_pct,deltaMu_pct,deltaE_pct";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModuli {
    pub k_eff: f64,
    pub mu_eff: f64,
    /// Young's modulus along axis 1.
    pub e1_eff: f64,
    pub k_norm: f64,
    pub mu_norm: f64,
    pub e1_norm: f64,
}

/// `K = C_iijj / 9`, `mu = (3 C_ijij - C_iijj) / 30`, `E1 = 1 / S_11`.
pub fn effective_moduli(c: &Tensor4, matrix: &IsotropicMaterial) -> Result<EffectiveModuli> {
    let (k_eff, mu_eff) = c.isotropic_projection();
    let compliance = c.voigt().try_inverse().ok_or(Error::Singular { condition: c.condition_number() })?;
    let e1_eff = 1.0 / compliance[(0, 0)];
    Ok(EffectiveModuli {
        k_eff,
        mu_eff,
        e1_eff,
        k_norm: k_eff / matrix.bulk(),
        mu_norm: mu_eff / matrix.shear(),
        e1_norm: e1_eff / matrix.young(),
    })
}

/// `E1` for an orthotropic Voigt matrix, ignoring any normal-shear coupling.
pub fn orthotropic_e1(c: &Tensor4) -> f64 {
    let v = c.voigt();
    let (c11, c22, c33) = (v[(0, 0)], v[(1, 1)], v[(2, 2)]);
    let (c12, c23, c13) = (v[(0, 1)], v[(1, 2)], v[(0, 2)]);
    (c11 * c22 * c33 + 2.0 * c12 * c23 * c13 - c12 * c12 * c33 - c23 * c23 * c11 - c13 * c13 * c22)
        / (c22 * c33 - c23 * c23)
}

/// Percent deviations `100 (model - baseline) / baseline` of the normalized
/// bulk, shear and Young's moduli.
pub fn relative_deviations(model: &EffectiveModuli, baseline: &EffectiveModuli) -> Result<(f64, f64, f64)> {
    let pct = |name: &str, m: f64, b: f64| {
        if b == 0.0 || !b.is_finite() {
            return Err(Error::ZeroBaseline(name.to_string()));
        }
        Ok(100.0 * (m - b) / b)
    };
    Ok((
        pct("K", model.k_norm, baseline.k_norm)?,
        pct("mu", model.mu_norm, baseline.mu_norm)?,
        pct("E1", model.e1_norm, baseline.e1_norm)?,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub rve_id: String,
    pub model: String,
    pub contrast: f64,
    /// `None` when the computation for this row failed.
    pub moduli: Option<EffectiveModuli>,
    pub delta_k: Option<f64>,
    pub delta_mu: Option<f64>,
    pub delta_e: Option<f64>,
}

impl ComparisonRow {
    pub fn baseline(rve_id: &str, contrast: f64, moduli: EffectiveModuli) -> Self {
        Self {
            rve_id: rve_id.into(),
            model: BASELINE_MODEL.into(),
            contrast,
            moduli: Some(moduli),
            delta_k: Some(0.0),
            delta_mu: Some(0.0),
            delta_e: Some(0.0),
        }
    }

    /// Row for a model; deviations are left empty without a baseline.
    pub fn compared(
        rve_id: &str,
        model: &str,
        contrast: f64,
        moduli: EffectiveModuli,
        baseline: Option<&EffectiveModuli>,
    ) -> Result<Self> {
        let deltas = baseline.map(|b| relative_deviations(&moduli, b)).transpose()?;
        Ok(Self {
            rve_id: rve_id.into(),
            model: model.into(),
            contrast,
            moduli: Some(moduli),
            delta_k: deltas.map(|d| d.0),
            delta_mu: deltas.map(|d| d.1),
            delta_e: deltas.map(|d| d.2),
        })
    }

    pub fn failed(rve_id: &str, model: &str, contrast: f64) -> Self {
        Self {
            rve_id: rve_id.into(),
            model: model.into(),
            contrast,
            moduli: None,
            delta_k: None,
            delta_mu: None,
            delta_e: None,
        }
    }

    pub fn is_failed(&self) -> bool {
        self.moduli.is_none()
    }
}

fn cell(v: Option<f64>, failed: bool) -> String {
    match v {
        Some(x) => format!("{x:.10}"),
        None if failed => "FAILED".into(),
        None => String::new(),
    }
}

impl fmt::Display for ComparisonRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed = self.is_failed();
        let m = self.moduli;
        write!(
            f,
            "{},{},{},{},{},{},{},{},{}",
            self.rve_id,
            self.model,
            self.contrast,
            cell(m.map(|m| m.k_norm), failed),
            cell(m.map(|m| m.mu_norm), failed),
            cell(m.map(|m| m.e1_norm), failed),
            cell(self.delta_k, failed),
            cell(self.delta_mu, failed),
            cell(self.delta_e, failed),
        )
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[ComparisonRow]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix() -> IsotropicMaterial {
        IsotropicMaterial::new(1.0, 1.0 / 3.0).unwrap()
    }

    #[test]
    fn matrix_moduli() {
        let m = effective_moduli(&matrix().stiffness(), &matrix()).unwrap();
        assert!((m.k_eff - 1.0).abs() < 1e-12);
        assert!((m.mu_eff - 0.375).abs() < 1e-12);
        assert!((m.e1_eff - 1.0).abs() < 1e-12);
        assert!((m.k_norm - 1.0).abs() < 1e-12 && (m.mu_norm - 1.0).abs() < 1e-12 && (m.e1_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deviation_formula() {
        let base = effective_moduli(&matrix().stiffness(), &matrix()).unwrap();
        let model = EffectiveModuli { k_norm: 1.10, ..base };
        let (dk, dmu, de) = relative_deviations(&model, &base).unwrap();
        assert!((dk - 10.0).abs() < 1e-12);
        assert_eq!((dmu, de), (0.0, 0.0));
        let zero = EffectiveModuli { mu_norm: 0.0, ..base };
        assert!(matches!(relative_deviations(&base, &zero), Err(Error::ZeroBaseline(_))));
    }

    #[test]
    fn failed_rows_are_flagged() {
        let row = ComparisonRow::failed("rve1", "FFT", 400.0);
        assert_eq!(row.to_string(), "rve1,FFT,400,FAILED,FAILED,FAILED,FAILED,FAILED,FAILED");
    }
}
