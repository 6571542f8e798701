//! Wireless cell model: device placement, path gain, achievable spectral
//! efficiency, and the shifted-exponential local-computation latency.
//!
//! All functions here are pure over explicit RNG streams; callers that need
//! concurrency give each thread its own stream. External configuration uses
//! the conventional radio units (MHz, dBm/MHz, ms/sample); everything in this
//! module is already converted to SI (Hz, seconds, linear ratios), except the
//! two power densities, which only ever enter as a dB difference.

use rand::Rng;

use crate::error::{Error, Result};

/// Distances below this are clamped/rejected to avoid the path-gain
/// singularity at the cell center.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Static per-device parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    pub id: usize,
    /// Local dataset size in samples (`D_i`).
    pub data_size: u64,
    /// Deterministic compute floor in seconds per sample (`a_i`).
    pub shift_rate_s_per_sample: f64,
    /// Peak compute rate in samples per second (`mu_i`).
    pub max_rate_samples_per_s: f64,
    /// Transmit power spectral density in dBm/MHz (`p_i`).
    pub tx_power_dbm_per_mhz: f64,
}

impl DeviceProfile {
    pub fn validate(&self) -> Result<()> {
        if self.data_size == 0 {
            return Err(Error::Config(format!(
                "device {}: data_size must be at least 1",
                self.id
            )));
        }
        if !(self.shift_rate_s_per_sample > 0.0) || !(self.max_rate_samples_per_s > 0.0) {
            return Err(Error::Config(format!(
                "device {}: compute-latency constants must be positive",
                self.id
            )));
        }
        if !self.tx_power_dbm_per_mhz.is_finite() {
            return Err(Error::Config(format!(
                "device {}: transmit power density must be finite",
                self.id
            )));
        }
        Ok(())
    }
}

/// Small-scale fading applied on top of the distance-based path loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fading {
    /// Deterministic path loss only (the default).
    #[default]
    None,
    /// Multiplicative Exp(1) power gain per device per round.
    Rayleigh,
}

/// Cell-wide constants.
#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    pub radius_m: f64,
    pub bandwidth_hz: f64,
    pub pathloss_exponent: f64,
    /// Noise power spectral density in dBm/MHz (`N_0`).
    pub noise_dbm_per_mhz: f64,
    /// Uplink payload per device per round, in bits (`S_model`).
    pub model_size_bits: f64,
    /// Relative tolerance of the bandwidth binary search.
    pub epsilon: f64,
    pub fading: Fading,
}

impl CellConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius_m > 0.0) || !(self.bandwidth_hz > 0.0) {
            return Err(Error::Config(
                "cell radius and bandwidth must be positive".into(),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config("epsilon must lie in (0, 1)".into()));
        }
        if !(self.model_size_bits > 0.0) {
            return Err(Error::Config("model size must be positive".into()));
        }
        Ok(())
    }
}

/// Per-device realized channel for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    pub distance_m: f64,
    /// `h^2`, unitless.
    pub path_gain: f64,
    pub snr_linear: f64,
    /// bits/s/Hz at the device's SNR.
    pub spectral_efficiency: f64,
}

impl ChannelState {
    /// Realize the channel at `distance_m` with a multiplicative `fading_gain`
    /// (1.0 when fading is disabled).
    pub fn observe(
        distance_m: f64,
        fading_gain: f64,
        profile: &DeviceProfile,
        cell: &CellConfig,
    ) -> Result<Self> {
        let gain = path_gain(distance_m, cell.pathloss_exponent)? * fading_gain;
        let snr_linear = snr(profile.tx_power_dbm_per_mhz, gain, cell.noise_dbm_per_mhz);
        Ok(ChannelState {
            distance_m,
            path_gain: gain,
            snr_linear,
            spectral_efficiency: spectral_efficiency(snr_linear),
        })
    }

    /// Upload capacity in bits/s if the device received the whole band.
    pub fn link_capacity_bps(&self, bandwidth_hz: f64) -> f64 {
        bandwidth_hz * self.spectral_efficiency
    }
}

/// Draw `num_devices` distances uniformly over the disk area: `d = R * sqrt(u)`
/// with `u` uniform on (0, 1], clamped below at [`MIN_DISTANCE_M`].
pub fn sample_positions<R: Rng>(num_devices: usize, radius_m: f64, rng: &mut R) -> Vec<f64> {
    (0..num_devices)
        .map(|_| {
            let u = 1.0 - rng.random::<f64>();
            (radius_m * u.sqrt()).max(MIN_DISTANCE_M)
        })
        .collect()
}

/// Deterministic distance-based power gain `h^2 = d^(-alpha)`.
pub fn path_gain(distance_m: f64, pathloss_exponent: f64) -> Result<f64> {
    if distance_m < MIN_DISTANCE_M {
        return Err(Error::DegenerateGeometry(distance_m));
    }
    Ok(distance_m.powf(-pathloss_exponent))
}

/// Linear SNR from power densities given in the same dB unit:
/// `10^((p - N0)/10) * h^2`.
pub fn snr(tx_power_dbm_per_mhz: f64, path_gain: f64, noise_dbm_per_mhz: f64) -> f64 {
    10f64.powf((tx_power_dbm_per_mhz - noise_dbm_per_mhz) / 10.0) * path_gain
}

/// `log2(1 + snr)` in bits/s/Hz.
pub fn spectral_efficiency(snr_linear: f64) -> f64 {
    (1.0 + snr_linear).log2()
}

/// One Exp(1) power gain for Rayleigh fading.
pub fn sample_rayleigh_gain<R: Rng>(rng: &mut R) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

/// Inverse CDF of the shifted-exponential compute latency:
/// `t(u) = a*D - (D/mu) * ln(1 - u)`, `u` in [0, 1).
pub fn comp_latency_quantile(profile: &DeviceProfile, u: f64) -> f64 {
    let d = profile.data_size as f64;
    let floor = profile.shift_rate_s_per_sample * d;
    floor - d / profile.max_rate_samples_per_s * (1.0 - u).ln()
}

/// Sample one local-computation latency in seconds; always `>= a*D`.
pub fn sample_comp_latency<R: Rng>(profile: &DeviceProfile, rng: &mut R) -> f64 {
    comp_latency_quantile(profile, rng.random::<f64>())
}

/// Mean of the compute-latency distribution: `a*D + D/mu`. Scheduling
/// decisions are made before latencies realize, so policies consume this
/// instead of a draw.
pub fn expected_comp_latency(profile: &DeviceProfile) -> f64 {
    let d = profile.data_size as f64;
    profile.shift_rate_s_per_sample * d + d / profile.max_rate_samples_per_s
}

/// CDF of the compute latency at `t` seconds.
pub fn comp_latency_cdf(profile: &DeviceProfile, t: f64) -> f64 {
    let d = profile.data_size as f64;
    let floor = profile.shift_rate_s_per_sample * d;
    if t < floor {
        0.0
    } else {
        1.0 - (-(profile.max_rate_samples_per_s / d) * (t - floor)).exp()
    }
}

/// `E{ S / (B * log2(1 + p h^2 / N0)) }` for a device placed uniformly over
/// the disk, by Simpson quadrature over the distance density `2d/R^2` plus the
/// point mass from the [`MIN_DISTANCE_M`] clamp.
pub fn mean_inverse_capacity_s(cell: &CellConfig, tx_power_dbm_per_mhz: f64) -> f64 {
    let r = cell.radius_m;
    let inv_rate = |d: f64| {
        let gain = d.powf(-cell.pathloss_exponent);
        let se = spectral_efficiency(snr(tx_power_dbm_per_mhz, gain, cell.noise_dbm_per_mhz));
        cell.model_size_bits / (cell.bandwidth_hz * se)
    };
    let lo = MIN_DISTANCE_M.min(r);
    let atom = (lo / r).powi(2) * inv_rate(lo);
    if lo >= r {
        return inv_rate(r);
    }
    let n = 4096; // even
    let h = (r - lo) / n as f64;
    let f = |d: f64| inv_rate(d) * 2.0 * d / (r * r);
    let mut sum = f(lo) + f(r);
    for i in 1..n {
        let w = if i % 2 == 0 { 2.0 } else { 4.0 };
        sum += w * f(lo + i as f64 * h);
    }
    atom + sum * h / 3.0
}
