//! Distance-to-gain models. Each model implements [`PathLoss`] and is
//! registered by name in a [`PathLossRegistry`] so experiments can select
//! one at runtime.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Linear power gain as a function of tower-to-point distance.
pub trait PathLoss: Send + Sync + fmt::Debug {
    /// Registry name of the model.
    fn name(&self) -> &'static str;

    /// Linear gain at distance `d_m` meters. Callers clamp `d_m` first.
    fn gain(&self, d_m: f64) -> f64;

    /// Path loss in dB.
    fn loss_db(&self, d_m: f64) -> f64 {
        -10.0 * self.gain(d_m).log10()
    }
}

/// `d^-eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    eta: f64,
}

impl PowerLaw {
    pub fn new(eta: f64) -> Result<Self> {
        if !(2.0..=6.0).contains(&eta) {
            return Err(config_err(format!(
                "propagation.eta = {eta} outside accepted range 2 <= eta <= 6"
            )));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl PathLoss for PowerLaw {
    fn name(&self) -> &'static str {
        "power_law"
    }

    fn gain(&self, d_m: f64) -> f64 {
        d_m.powf(-self.eta)
    }
}

/// Okumura-Hata, urban small/medium city form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hata {
    f_mhz: f64,
    hb_m: f64,
    hm_m: f64,
    // distance-independent part of the loss, dB
    intercept_db: f64,
    // dB per decade of distance in km
    slope_db: f64,
}

impl Hata {
    pub fn new(f_mhz: f64, hb_m: f64, hm_m: f64) -> Result<Self> {
        let mut bad = Vec::new();
        if !(150.0..=1500.0).contains(&f_mhz) {
            bad.push(format!(
                "propagation.f_mhz = {f_mhz} outside 150 <= f_mhz <= 1500"
            ));
        }
        if !(30.0..=200.0).contains(&hb_m) {
            bad.push(format!(
                "propagation.hb_m = {hb_m} outside 30 <= hb_m <= 200"
            ));
        }
        if !(1.0..=10.0).contains(&hm_m) {
            bad.push(format!("propagation.hm_m = {hm_m} outside 1 <= hm_m <= 10"));
        }
        if !bad.is_empty() {
            return Err(config_err(bad.join("; ")));
        }
        let lf = f_mhz.log10();
        let mobile_correction = (1.1 * lf - 0.7) * hm_m - (1.56 * lf - 0.8);
        let intercept_db = 69.55 + 26.16 * lf - 13.82 * hb_m.log10() - mobile_correction;
        let slope_db = 44.9 - 6.55 * hb_m.log10();
        Ok(Self {
            f_mhz,
            hb_m,
            hm_m,
            intercept_db,
            slope_db,
        })
    }

    pub fn f_mhz(&self) -> f64 {
        self.f_mhz
    }

    pub fn hb_m(&self) -> f64 {
        self.hb_m
    }

    pub fn hm_m(&self) -> f64 {
        self.hm_m
    }

    /// Equivalent power-law exponent implied by the distance slope.
    pub fn distance_exponent(&self) -> f64 {
        self.slope_db / 10.0
    }
}

impl PathLoss for Hata {
    fn name(&self) -> &'static str {
        "hata"
    }

    fn gain(&self, d_m: f64) -> f64 {
        10f64.powf(-self.loss_db(d_m) / 10.0)
    }

    fn loss_db(&self, d_m: f64) -> f64 {
        self.intercept_db + self.slope_db * (d_m / 1000.0).log10()
    }
}

/// Parameters from which a registered model is built. Each model reads the
/// fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    pub model: String,
    pub eta: f64,
    pub f_mhz: f64,
    pub hb_m: f64,
    pub hm_m: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self {
            model: "hata".into(),
            eta: 3.5,
            f_mhz: 700.0,
            hb_m: 30.0,
            hm_m: 1.5,
        }
    }
}

type PathLossFactory = fn(&PathLossParams) -> Result<Box<dyn PathLoss>>;

/// Name-keyed table of path-loss model constructors.
pub struct PathLossRegistry {
    factories: BTreeMap<&'static str, PathLossFactory>,
}

impl PathLossRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: PathLossFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    pub fn build(&self, params: &PathLossParams) -> Result<Box<dyn PathLoss>> {
        let factory = self.factories.get(params.model.as_str()).ok_or_else(|| {
            config_err(format!(
                "propagation.model = {:?} is not one of {:?}",
                params.model,
                self.names()
            ))
        })?;
        factory(params)
    }
}

impl Default for PathLossRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register("power_law", |p| Ok(Box::new(PowerLaw::new(p.eta)?)));
        reg.register("hata", |p| {
            Ok(Box::new(Hata::new(p.f_mhz, p.hb_m, p.hm_m)?))
        });
        reg
    }
}
