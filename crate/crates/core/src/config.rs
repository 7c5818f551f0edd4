//! Run configuration: one JSON file with `params`, `noise`, `sim`, and
//! `monotonicity` sections whose keys mirror the field names. Everything
//! has a default, so `{}` is a valid file.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::noise::{JumpModel, NoiseFamily};
use crate::params::{
    DriftMode, GLParams, MonotonicityConfig, NoiseConstants, SimConfig,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
    /// Components of the complex 2-vector multiplying `grad(|u|^2 u)`.
    /// `lambda1_re`/`lambda1_im` are accepted as aliases for the
    /// x-component.
    #[serde(alias = "lambda1_re")]
    pub lambda1_x_re: f64,
    #[serde(alias = "lambda1_im")]
    pub lambda1_x_im: f64,
    pub lambda1_y_re: f64,
    pub lambda1_y_im: f64,
    #[serde(alias = "lambda2_re")]
    pub lambda2_x_re: f64,
    #[serde(alias = "lambda2_im")]
    pub lambda2_x_im: f64,
    pub lambda2_y_re: f64,
    pub lambda2_y_im: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        let p = GLParams::<f64>::default();
        ParamsSection {
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            sigma: p.sigma,
            lambda1_x_re: p.lambda1[0].re,
            lambda1_x_im: p.lambda1[0].im,
            lambda1_y_re: p.lambda1[1].re,
            lambda1_y_im: p.lambda1[1].im,
            lambda2_x_re: p.lambda2[0].re,
            lambda2_x_im: p.lambda2[0].im,
            lambda2_y_re: p.lambda2[1].re,
            lambda2_y_im: p.lambda2[1].im,
            l1: p.l1,
            l2: p.l2,
        }
    }
}

impl ParamsSection {
    pub fn build(&self) -> Result<GLParams<f64>> {
        let params = GLParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            sigma: self.sigma,
            lambda1: [
                Complex::new(self.lambda1_x_re, self.lambda1_x_im),
                Complex::new(self.lambda1_y_re, self.lambda1_y_im),
            ],
            lambda2: [
                Complex::new(self.lambda2_x_re, self.lambda2_x_im),
                Complex::new(self.lambda2_y_re, self.lambda2_y_im),
            ],
            l1: self.l1,
            l2: self.l2,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    /// Number of atoms; 0 disables the noise entirely.
    pub marks: usize,
    pub nu: Vec<f64>,
    pub h: Vec<f64>,
    /// `"linear"` or `"quadratic"`.
    pub family: String,
    /// Linear-family coefficient.
    pub c: f64,
    /// Quadratic-family saturation; omit for no saturation.
    pub cap: Option<f64>,
    /// Moment order `2 <= p < 2 sigma`.
    pub p: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            marks: 2,
            nu: vec![1.0, 1.0],
            h: vec![0.5, 0.25],
            family: "linear".into(),
            c: 0.1,
            cap: None,
            p: 4.0,
        }
    }
}

impl NoiseSection {
    pub fn build(&self) -> Result<JumpModel<f64>> {
        if self.marks == 0 {
            return Ok(JumpModel::none());
        }
        if self.nu.len() != self.marks || self.h.len() != self.marks {
            return Err(CoreError::Config(format!(
                "noise section: marks = {} but nu has {} and h has {} entries",
                self.marks,
                self.nu.len(),
                self.h.len()
            )));
        }
        let family = match self.family.as_str() {
            "linear" => NoiseFamily::LinearMultiplicative { c: self.c },
            "quadratic" => NoiseFamily::QuadraticSaturated {
                cap: self.cap.unwrap_or(f64::INFINITY),
            },
            other => {
                return Err(CoreError::Config(format!(
                    "noise family must be \"linear\" or \"quadratic\", got \"{other}\""
                )))
            }
        };
        JumpModel::new(self.nu.clone(), self.h.clone(), family, self.p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub n1: usize,
    pub n2: usize,
    pub dt: f64,
    pub t_end: f64,
    pub blowup_radius: f64,
    pub seed: u64,
    pub n_paths: usize,
    pub snap_every: usize,
    pub drift: DriftMode,
    /// Initial-data amplitude for the built-in sampler.
    pub u0_amplitude: f64,
    /// Spectral decay of the built-in initial sampler.
    pub u0_decay: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = SimConfig::<f64>::default();
        SimSection {
            n1: s.n1,
            n2: s.n2,
            dt: s.dt,
            t_end: s.t_end,
            blowup_radius: s.blowup_radius,
            seed: s.seed,
            n_paths: s.n_paths,
            snap_every: s.snap_every,
            drift: s.drift,
            u0_amplitude: 0.2,
            u0_decay: 1.5,
        }
    }
}

impl SimSection {
    pub fn build(&self) -> Result<SimConfig<f64>> {
        let config = SimConfig {
            n1: self.n1,
            n2: self.n2,
            dt: self.dt,
            t_end: self.t_end,
            blowup_radius: self.blowup_radius,
            seed: self.seed,
            n_paths: self.n_paths,
            snap_every: self.snap_every,
            drift: self.drift,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct MonotonicitySection {
    /// `eps_8 .. eps_15`; omitted entries are derived automatically from
    /// the regime margins.
    pub eps: Option<[f64; 8]>,
}

impl MonotonicitySection {
    pub fn build(
        &self,
        params: &GLParams<f64>,
        noise: &NoiseConstants<f64>,
    ) -> MonotonicityConfig<f64> {
        match self.eps {
            Some(eps) => MonotonicityConfig::derive(params, eps),
            None => MonotonicityConfig::auto(params, noise),
        }
    }
}

/// The whole config file.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub params: ParamsSection,
    pub noise: NoiseSection,
    pub sim: SimSection,
    pub monotonicity: MonotonicitySection,
}

/// Everything a run needs, built from one file.
pub struct BuiltConfig {
    pub params: GLParams<f64>,
    pub model: JumpModel<f64>,
    pub sim: SimConfig<f64>,
    pub mono: MonotonicityConfig<f64>,
    pub u0_amplitude: f64,
    pub u0_decay: f64,
}

impl FileConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| CoreError::Config(format!("config parse error: {e}")))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CoreError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn build(&self) -> Result<BuiltConfig> {
        let params = self.params.build()?;
        let model = self.noise.build()?;
        let sim = self.sim.build()?;
        let mono = self.monotonicity.build(&params, &model.constants);
        Ok(BuiltConfig {
            params,
            model,
            sim,
            mono,
            u0_amplitude: self.sim.u0_amplitude,
            u0_decay: self.sim.u0_decay,
        })
    }

    /// Pretty JSON of the defaults: the authoritative key listing.
    pub fn defaults_json() -> String {
        serde_json::to_string_pretty(&FileConfig::default())
            .expect("defaults serialize")
    }
}
