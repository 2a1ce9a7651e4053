//! Closed-form covert capacities and key rates of a binary covert channel, in nats.
//!
//! With `D_B = D(sigma1||sigma0)`, `D_W = D(omega1||omega0)` and
//! `c = sqrt(chi2(omega1||omega0) / 2)`:
//! keyed secrecy `D_B / c`, unassisted secrecy and entanglement generation
//! `[D_B - D_W]_+ / c`, minimal key `D_W / c`, key without secrecy `[D_W - D_B]_+ / c`.

use serde::{Deserialize, Serialize};

use crate::channel::{build_covert_channel, BinaryCovertChannel, StinespringIsometry};
use crate::divergence::{chi_square, qre};
use crate::error::{Error, Result, SupportAssumption};
use crate::operator::Tolerances;

/// Relative dead zone of the positive part: differences below
/// `POSITIVE_PART_REL_TOL * max(|a|, |b|)` count as zero.
pub const POSITIVE_PART_REL_TOL: f64 = 1e-12;

/// `[a - b]_+`, exactly zero when `a` and `b` agree to roundoff.
pub fn positive_part_diff(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d <= POSITIVE_PART_REL_TOL * a.abs().max(b.abs()) {
        0.0
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Components {
    d_bob: f64,
    d_willie: f64,
    chi2: f64,
    denom: f64,
}

fn components(ch: &BinaryCovertChannel, tol: &Tolerances) -> Result<Components> {
    let d_bob = qre(ch.sigma1(), ch.sigma0(), tol)?
        .finite()
        .ok_or(Error::AssumptionViolation(SupportAssumption::Bob))?;
    let d_willie = qre(ch.omega1(), ch.omega0(), tol)?
        .finite()
        .ok_or(Error::AssumptionViolation(SupportAssumption::Willie))?;
    let chi2 = chi_square(ch.omega1(), ch.omega0(), tol)?;
    if chi2 <= 0.0 {
        return Err(Error::SingularReference { min_eigenvalue: chi2 });
    }
    Ok(Components {
        d_bob,
        d_willie,
        chi2,
        denom: (0.5 * chi2).sqrt(),
    })
}

/// `D(sigma1||sigma0) / sqrt(chi2(omega1||omega0) / 2)`.
pub fn covert_secrecy_capacity_keyed(ch: &BinaryCovertChannel, tol: &Tolerances) -> Result<f64> {
    let c = components(ch, tol)?;
    Ok(c.d_bob / c.denom)
}

/// `[D(sigma1||sigma0) - D(omega1||omega0)]_+ / sqrt(chi2 / 2)`.
pub fn covert_secrecy_capacity_unassisted(
    ch: &BinaryCovertChannel,
    tol: &Tolerances,
) -> Result<f64> {
    let c = components(ch, tol)?;
    Ok(positive_part_diff(c.d_bob, c.d_willie) / c.denom)
}

/// Covert entanglement-generation capacity of the channel with dilation `v`.
pub fn covert_eg_capacity(v: &StinespringIsometry, tol: &Tolerances) -> Result<f64> {
    covert_secrecy_capacity_unassisted(&build_covert_channel(v, tol)?, tol)
}

/// `D(omega1||omega0) / sqrt(chi2 / 2)`.
pub fn minimal_key_rate(ch: &BinaryCovertChannel, tol: &Tolerances) -> Result<f64> {
    let c = components(ch, tol)?;
    Ok(c.d_willie / c.denom)
}

/// `[D(omega1||omega0) - D(sigma1||sigma0)]_+ / sqrt(chi2 / 2)`.
pub fn key_rate_without_secrecy(ch: &BinaryCovertChannel, tol: &Tolerances) -> Result<f64> {
    let c = components(ch, tol)?;
    Ok(positive_part_diff(c.d_willie, c.d_bob) / c.denom)
}

/// `log((1-g)/g) sqrt(2(1-g)/g)` for `g < 1/2`, zero otherwise.
pub fn excitation_capacity_closed_form(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "excitation probability must lie in (0, 1], got {gamma}"
        )));
    }
    if gamma >= 0.5 {
        return Ok(0.0);
    }
    let ratio = (1.0 - gamma) / gamma;
    Ok(ratio.ln() * (2.0 * ratio).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CapacityReport {
    pub d_bob: f64,
    pub d_willie: f64,
    pub chi2_willie: f64,
    pub denom: f64,
    #[serde(rename = "cSKey")]
    pub c_s_key: f64,
    #[serde(rename = "cS")]
    pub c_s: f64,
    #[serde(rename = "cEG")]
    pub c_eg: f64,
    pub l_key_min: f64,
    pub l_key_no_secrecy: f64,
    pub anti_degraded_flag: bool,
}

impl CapacityReport {
    pub fn from_channel(ch: &BinaryCovertChannel, tol: &Tolerances) -> Result<Self> {
        let c = components(ch, tol)?;
        let c_s = positive_part_diff(c.d_bob, c.d_willie) / c.denom;
        Ok(Self {
            d_bob: c.d_bob,
            d_willie: c.d_willie,
            chi2_willie: c.chi2,
            denom: c.denom,
            c_s_key: c.d_bob / c.denom,
            c_s,
            c_eg: c_s,
            l_key_min: c.d_willie / c.denom,
            l_key_no_secrecy: positive_part_diff(c.d_willie, c.d_bob) / c.denom,
            anti_degraded_flag: c_s == 0.0,
        })
    }

    /// Every rate divided by `ln 2`.
    pub fn in_bits(&self) -> Self {
        let b = std::f64::consts::LN_2;
        Self {
            d_bob: self.d_bob / b,
            d_willie: self.d_willie / b,
            c_s_key: self.c_s_key / b,
            c_s: self.c_s / b,
            c_eg: self.c_eg / b,
            l_key_min: self.l_key_min / b,
            l_key_no_secrecy: self.l_key_no_secrecy / b,
            ..*self
        }
    }
}

pub fn capacity_report(v: &StinespringIsometry, tol: &Tolerances) -> Result<CapacityReport> {
    CapacityReport::from_channel(&build_covert_channel(v, tol)?, tol)
}

/// One row of an excitation-channel sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub d_bob: f64,
    pub d_willie: f64,
    pub chi2: f64,
    pub c_s_key: f64,
    pub c_s: f64,
    pub c_eg: f64,
    pub l_key_min: f64,
    pub c_eg_closed_form: f64,
}

impl SweepRow {
    pub const HEADER: [&'static str; 9] = [
        "gamma",
        "d_bob",
        "d_willie",
        "chi2",
        "c_s_key",
        "c_s",
        "c_eg",
        "l_key_min",
        "c_eg_closed_form",
    ];

    pub fn values(&self) -> [f64; 9] {
        [
            self.gamma,
            self.d_bob,
            self.d_willie,
            self.chi2,
            self.c_s_key,
            self.c_s,
            self.c_eg,
            self.l_key_min,
            self.c_eg_closed_form,
        ]
    }
}

/// Evaluates the pipeline and the closed form at `steps` evenly spaced
/// excitation probabilities in `[from, to]`.
pub fn excitation_sweep(from: f64, to: f64, steps: usize, tol: &Tolerances) -> Result<Vec<SweepRow>> {
    if !(0.0 < from && from < to && to < 1.0) || steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "sweep needs 0 < from < to < 1 and at least 2 steps (got {from}, {to}, {steps})"
        )));
    }
    (0..steps)
        .map(|i| {
            let last = (steps - 1) as f64;
            let gamma = (from * (last - i as f64) + to * i as f64) / last;
            let v = crate::channel::excitation_channel(gamma)?.to_stinespring();
            let r = capacity_report(&v, tol)?;
            Ok(SweepRow {
                gamma,
                d_bob: r.d_bob,
                d_willie: r.d_willie,
                chi2: r.chi2_willie,
                c_s_key: r.c_s_key,
                c_s: r.c_s,
                c_eg: r.c_eg,
                l_key_min: r.l_key_min,
                c_eg_closed_form: excitation_capacity_closed_form(gamma)?,
            })
        })
        .collect()
}
