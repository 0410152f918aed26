//! Analytic throughput of the two accelerator designs.
//!
//! The bank-limited design issues one memory read per bank per cycle, so a
//! point costs `ceil(reads / banks)` cycles. The fully pipelined design
//! accepts one point every `ii` cycles unless memory bandwidth cannot keep
//! up with the bytes each point needs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::Dim;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AcceleratorConfig {
    pub dim: Dim,
    pub freq_hz: f64,
    /// Initiation interval, cycles per point when compute-bound.
    pub ii: u32,
    /// Pipeline depth; only affects fill/drain time.
    pub latency_cycles: u64,
    pub data_bits_per_point: u32,
    pub index_bits_per_point: u32,
}

impl AcceleratorConfig {
    pub fn new(
        dim: Dim,
        freq_hz: f64,
        ii: u32,
        latency_cycles: u64,
        data_bits_per_point: u32,
        index_bits_per_point: u32,
    ) -> Result<Self> {
        let cfg = AcceleratorConfig {
            dim,
            freq_hz,
            ii,
            latency_cycles,
            data_bits_per_point,
            index_bits_per_point,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The synthesized design's operating point: 500 MHz with 768 data and
    /// 128 index bits per point in 2D, 357 MHz with 1152 + 192 in 3D.
    pub fn reference(dim: Dim) -> Self {
        match dim {
            Dim::Two => AcceleratorConfig {
                dim,
                freq_hz: 500e6,
                ii: 1,
                latency_cycles: 264,
                data_bits_per_point: 768,
                index_bits_per_point: 128,
            },
            Dim::Three => AcceleratorConfig {
                dim,
                freq_hz: 357e6,
                ii: 1,
                latency_cycles: 421,
                data_bits_per_point: 1152,
                index_bits_per_point: 192,
            },
        }
    }

    pub fn with_freq(self, freq_hz: f64) -> Result<Self> {
        let cfg = AcceleratorConfig { freq_hz, ..self };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.freq_hz > 0.0 && self.freq_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "frequency must be positive, got {}",
                self.freq_hz
            )));
        }
        if self.ii < 1 {
            return Err(Error::InvalidParameter("initiation interval must be at least 1".into()));
        }
        for (name, bits) in [("data", self.data_bits_per_point), ("index", self.index_bits_per_point)] {
            if bits == 0 || bits % 8 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} bits per point must be a positive multiple of 8, got {bits}"
                )));
            }
        }
        Ok(())
    }

    pub fn bytes_per_point(&self) -> f64 {
        f64::from(self.data_bits_per_point + self.index_bits_per_point) / 8.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MemorySystem {
    pub name: String,
    pub peak_bytes_per_sec: f64,
    pub banks: u32,
    /// Fraction of peak reached under the access pattern in use.
    pub pattern_efficiency: f64,
}

impl MemorySystem {
    /// Reads each bank can serve per clock cycle.
    pub const READS_PER_BANK_PER_CYCLE: u32 = 1;

    pub fn new(name: impl Into<String>, peak_bytes_per_sec: f64, banks: u32, pattern_efficiency: f64) -> Result<Self> {
        let mem = MemorySystem {
            name: name.into(),
            peak_bytes_per_sec,
            banks,
            pattern_efficiency,
        };
        mem.validate()?;
        Ok(mem)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.peak_bytes_per_sec > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "peak bandwidth must be positive, got {}",
                self.peak_bytes_per_sec
            )));
        }
        if self.banks < 1 {
            return Err(Error::InvalidParameter("memory needs at least one bank".into()));
        }
        if !(self.pattern_efficiency > 0.0 && self.pattern_efficiency <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "pattern efficiency must be in (0, 1], got {}",
                self.pattern_efficiency
            )));
        }
        Ok(())
    }

    pub fn effective_bytes_per_sec(&self) -> f64 {
        self.peak_bytes_per_sec * self.pattern_efficiency
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Compute,
    Memory,
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Bound::Compute => "compute",
            Bound::Memory => "memory",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NaiveThroughput {
    pub cycles_per_point: u64,
    pub points_per_cycle: f64,
    pub points_per_sec: f64,
}

/// Throughput of the bank-limited design, which reads every value and
/// index of a point through `banks` single-read-per-cycle ports.
pub fn naive_throughput(
    values_per_point: u32,
    indexes_per_point: u32,
    banks: u32,
    freq_hz: f64,
) -> Result<NaiveThroughput> {
    if banks == 0 {
        return Err(Error::InvalidParameter("memory needs at least one bank".into()));
    }
    let reads = u64::from(values_per_point) + u64::from(indexes_per_point);
    if reads == 0 {
        return Err(Error::InvalidParameter("a point must read at least one value".into()));
    }
    if !(freq_hz > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency must be positive, got {freq_hz}"
        )));
    }
    let per_cycle = u64::from(banks) * u64::from(MemorySystem::READS_PER_BANK_PER_CYCLE);
    let cycles_per_point = reads.div_ceil(per_cycle);
    Ok(NaiveThroughput {
        cycles_per_point,
        points_per_cycle: 1.0 / cycles_per_point as f64,
        points_per_sec: freq_hz / cycles_per_point as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Throughput {
    /// Points per second.
    pub rate: f64,
    pub bound: Bound,
    /// Average clock cycles per point at that rate.
    pub cycles_per_point: f64,
}

/// Throughput of the fully pipelined design: the lesser of the issue rate
/// and the rate memory can deliver point records.
pub fn pipelined_throughput(cfg: &AcceleratorConfig, mem: &MemorySystem) -> Throughput {
    let compute_rate = cfg.freq_hz / f64::from(cfg.ii);
    let memory_rate = mem.effective_bytes_per_sec() / cfg.bytes_per_point();
    let (rate, bound) = if compute_rate <= memory_rate {
        (compute_rate, Bound::Compute)
    } else {
        (memory_rate, Bound::Memory)
    };
    Throughput {
        rate,
        bound,
        cycles_per_point: cfg.freq_hz / rate,
    }
}

/// Seconds to stream `n_points` at `rate`, plus one pipeline fill.
pub fn estimate_runtime(n_points: u64, rate_points_per_sec: f64, latency_cycles: u64, freq_hz: f64) -> Result<f64> {
    if !(rate_points_per_sec > 0.0 && freq_hz > 0.0) {
        return Err(Error::InvalidParameter("rate and frequency must be positive".into()));
    }
    Ok(latency_cycles as f64 / freq_hz + n_points as f64 / rate_points_per_sec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_examples() {
        let t = naive_throughput(12, 4, 4, 500e6).unwrap();
        assert_eq!(
            (t.cycles_per_point, t.points_per_cycle, t.points_per_sec),
            (4, 0.25, 125e6)
        );
        let t = naive_throughput(18, 6, 4, 357e6).unwrap();
        assert!((t.points_per_cycle - 0.1667).abs() < 1e-4);
        assert!((t.points_per_sec - 59.5e6).abs() <= 0.1e6);
        let t = naive_throughput(7, 0, 7, 3e8).unwrap();
        assert_eq!((t.points_per_cycle, t.points_per_sec), (1.0, 3e8));
        assert!(naive_throughput(12, 4, 0, 500e6).is_err());
    }

    #[test]
    fn pipelined_examples() {
        let cfg = AcceleratorConfig::reference(Dim::Two);
        let fast = MemorySystem::new("fast", 56e9, 4, 1.0).unwrap();
        let t = pipelined_throughput(&cfg, &fast);
        assert_eq!((t.rate, t.bound, t.cycles_per_point), (500e6, Bound::Compute, 1.0));

        let ddr = MemorySystem::new("2ch", 38.4e9, 2, 1.0).unwrap();
        let t = pipelined_throughput(&cfg.with_freq(300e6).unwrap(), &ddr);
        assert_eq!((t.rate, t.bound), (300e6, Bound::Compute));

        let tiny = MemorySystem::new("tiny", 1e-3, 1, 1.0).unwrap();
        let t = pipelined_throughput(&cfg, &tiny);
        assert_eq!(t.bound, Bound::Memory);
        assert_eq!(t.rate, 1e-3 / 112.0);
    }

    #[test]
    fn runtime_examples() {
        let s = estimate_runtime(500_000_000, 500e6, 264, 500e6).unwrap();
        assert!((s - 1.000000528).abs() < 1e-12);
        let s = estimate_runtime(357_000_000, 357e6, 421, 357e6).unwrap();
        assert!((s - (1.0 + 421.0 / 357e6)).abs() < 1e-12);
        assert!((s - 1.0000012).abs() < 1e-7);
        assert_eq!(estimate_runtime(0, 1.0, 264, 500e6).unwrap(), 264.0 / 500e6);
    }

    #[test]
    fn config_validation() {
        let r = AcceleratorConfig::reference(Dim::Three);
        assert!(r.with_freq(0.0).is_err());
        assert!(AcceleratorConfig { ii: 0, ..r }.validate().is_err());
        assert!(AcceleratorConfig {
            data_bits_per_point: 100,
            ..r
        }
        .validate()
        .is_err());
        assert!(MemorySystem::new("m", 1.0, 1, 1.5).is_err());
        assert!(MemorySystem::new("m", 1.0, 0, 1.0).is_err());
        assert_eq!(r.bytes_per_point(), 168.0);
    }
}
