//! Bandwidth, feasibility and GFLOPS model of the streaming FTLE core.
//!
//! GB means 10⁹ bytes everywhere in this module.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{ftle_of_record, PointRecord};
use crate::mesh::Dim;
use crate::pipeline::{AcceleratorConfig, MemorySystem};
use crate::scalar::{Counted, OpCounts};

/// A named memory technology and its peak bandwidth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MemoryTech {
    /// Short name accepted on the command line.
    pub name: &'static str,
    pub label: &'static str,
    pub peak_gbps: f64,
    /// Independent channels or stacks.
    pub banks: u32,
}

impl MemoryTech {
    pub fn memory_system(&self, pattern_efficiency: f64) -> Result<MemorySystem> {
        MemorySystem::new(self.name, self.peak_gbps * 1e9, self.banks, pattern_efficiency)
    }
}

pub const CATALOG: [MemoryTech; 7] = [
    MemoryTech {
        name: "1ch-ddr4-2400",
        label: "1 channel DDR4-2400",
        peak_gbps: 19.2,
        banks: 1,
    },
    MemoryTech {
        name: "1ch-ddr4-2666",
        label: "1 channel DDR4-2666",
        peak_gbps: 21.3,
        banks: 1,
    },
    MemoryTech {
        name: "2ch-ddr4-2400",
        label: "2 channel DDR4-2400",
        peak_gbps: 38.4,
        banks: 2,
    },
    MemoryTech {
        name: "2ch-ddr4-2666",
        label: "2 channel DDR4-2666",
        peak_gbps: 42.6,
        banks: 2,
    },
    MemoryTech {
        name: "4ch-ddr4-2400",
        label: "4 channel DDR4-2400",
        peak_gbps: 76.8,
        banks: 4,
    },
    MemoryTech {
        name: "1-hbm",
        label: "1 stack HBM",
        peak_gbps: 230.0,
        banks: 1,
    },
    MemoryTech {
        name: "2-hbm",
        label: "2 stack HBM",
        peak_gbps: 460.0,
        banks: 2,
    },
];

/// Case-insensitive catalog lookup by short name.
pub fn lookup_tech(name: &str) -> Result<&'static MemoryTech> {
    CATALOG
        .iter()
        .find(|t| t.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            let known: Vec<&str> = CATALOG.iter().map(|t| t.name).collect();
            Error::InvalidParameter(format!(
                "unknown memory technology {name:?}; known: {}",
                known.join(", ")
            ))
        })
}

/// Synthesis figures reported for the HLS design. Reference constants only;
/// nothing in this crate predicts them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SynthesisReference {
    pub dim: Dim,
    pub max_freq_mhz: f64,
    pub latency_cycles: u64,
    pub data_bits_per_cycle: u32,
    pub index_bits_per_cycle: u32,
    pub lut: u32,
    pub lutram: u32,
    pub ff: u32,
    pub dsp: u32,
    pub bram: u32,
    pub power_w: f64,
}

pub const SYNTHESIS_2D: SynthesisReference = SynthesisReference {
    dim: Dim::Two,
    max_freq_mhz: 500.0,
    latency_cycles: 264,
    data_bits_per_cycle: 768,
    index_bits_per_cycle: 128,
    lut: 29323,
    lutram: 1797,
    ff: 49677,
    dsp: 250,
    bram: 0,
    power_w: 8.1,
};

pub const SYNTHESIS_3D: SynthesisReference = SynthesisReference {
    dim: Dim::Three,
    max_freq_mhz: 357.0,
    latency_cycles: 421,
    data_bits_per_cycle: 1152,
    index_bits_per_cycle: 192,
    lut: 134519,
    lutram: 5679,
    ff: 139912,
    dsp: 1012,
    bram: 1,
    power_w: 21.17,
};

pub fn synthesis_reference(dim: Dim) -> &'static SynthesisReference {
    match dim {
        Dim::Two => &SYNTHESIS_2D,
        Dim::Three => &SYNTHESIS_3D,
    }
}

/// Input bandwidth split into floating-point data and neighbor indexes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bandwidth {
    pub data_gbps: f64,
    pub index_gbps: f64,
}

impl Bandwidth {
    pub fn total_gbps(&self) -> f64 {
        self.data_gbps + self.index_gbps
    }

    /// Both parts rounded to one decimal, as reported.
    pub fn rounded(&self) -> Bandwidth {
        Bandwidth {
            data_gbps: round1(self.data_gbps),
            index_gbps: round1(self.index_gbps),
        }
    }
}

pub fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

/// GB/s needed to feed one record per cycle at `freq_hz`.
pub fn required_bandwidth(data_bits: u32, index_bits: u32, freq_hz: f64) -> Result<Bandwidth> {
    if data_bits == 0 || index_bits == 0 || !(freq_hz > 0.0) {
        return Err(Error::InvalidParameter(
            "bit widths and frequency must be positive".into(),
        ));
    }
    let gbps = |bits: u32| f64::from(bits) * freq_hz / 8.0 / 1e9;
    Ok(Bandwidth {
        data_gbps: gbps(data_bits),
        index_gbps: gbps(index_bits),
    })
}

/// One column of the feasibility table: a design at a clock frequency.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub label: &'static str,
    pub dim: Dim,
    pub freq_hz: f64,
    pub bandwidth: Bandwidth,
    /// Rounded total, the denominator of every feasibility cell.
    pub desired_gbps: f64,
}

impl Scenario {
    pub fn accelerator(&self) -> AcceleratorConfig {
        AcceleratorConfig {
            freq_hz: self.freq_hz,
            ..AcceleratorConfig::reference(self.dim)
        }
    }
}

/// The four design points: each dimension at its maximum frequency and at 300 MHz.
pub fn scenarios() -> Vec<Scenario> {
    let make = |label, dim: Dim, freq_hz: f64| {
        let cfg = AcceleratorConfig::reference(dim);
        let bw = required_bandwidth(cfg.data_bits_per_point, cfg.index_bits_per_point, freq_hz)
            .expect("reference widths are positive")
            .rounded();
        Scenario {
            label,
            dim,
            freq_hz,
            bandwidth: bw,
            desired_gbps: round1(bw.total_gbps()),
        }
    };
    vec![
        make("2D max freq", Dim::Two, SYNTHESIS_2D.max_freq_mhz * 1e6),
        make("3D max freq", Dim::Three, SYNTHESIS_3D.max_freq_mhz * 1e6),
        make("2D 300 MHz", Dim::Two, 300e6),
        make("3D 300 MHz", Dim::Three, 300e6),
    ]
}

/// Published feasibility percentages, rows in [`CATALOG`] order, columns in
/// [`scenarios`] order.
pub const REPORTED_TABLE2: [[i64; 4]; 7] = [
    [34, 32, 57, 38],
    [38, 36, 63, 59],
    [69, 64, 114, 76],
    [76, 71, 127, 85],
    [137, 128, 229, 152],
    [410, 383, 685, 456],
    [820, 767, 1369, 912],
];

/// Published cells that disagree with the arithmetic: (tech name, scenario label, printed value).
pub const KNOWN_ERRATA: [(&str, &str, i64); 1] = [("1ch-ddr4-2666", "3D 300 MHz", 59)];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityCell {
    /// `round(100 · absolute / desired)`.
    pub percent: i64,
    pub exact: f64,
    pub reported: Option<i64>,
    /// Set when the reported value is a known erratum.
    pub erratum: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityRow {
    pub tech: MemoryTech,
    pub cells: Vec<FeasibilityCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityTable {
    pub scenarios: Vec<Scenario>,
    pub rows: Vec<FeasibilityRow>,
}

/// Peak bandwidth of each technology as a percentage of each scenario's need.
pub fn feasibility_table(catalog: &[MemoryTech], scenarios: &[Scenario]) -> Result<FeasibilityTable> {
    if let Some(s) = scenarios.iter().find(|s| !(s.desired_gbps > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "scenario {:?} needs positive bandwidth",
            s.label
        )));
    }
    let rows = catalog
        .iter()
        .map(|tech| {
            let cells = scenarios
                .iter()
                .map(|s| {
                    let exact = 100.0 * tech.peak_gbps / s.desired_gbps;
                    let reported = reported_cell(tech.name, s.label);
                    FeasibilityCell {
                        percent: exact.round() as i64,
                        exact,
                        reported,
                        erratum: KNOWN_ERRATA.iter().any(|&(t, l, _)| t == tech.name && l == s.label),
                    }
                })
                .collect();
            FeasibilityRow { tech: *tech, cells }
        })
        .collect();
    Ok(FeasibilityTable {
        scenarios: scenarios.to_vec(),
        rows,
    })
}

fn reported_cell(tech: &str, scenario: &str) -> Option<i64> {
    let row = CATALOG.iter().position(|t| t.name == tech)?;
    let col = ["2D max freq", "3D max freq", "2D 300 MHz", "3D 300 MHz"]
        .iter()
        .position(|&l| l == scenario)?;
    Some(REPORTED_TABLE2[row][col])
}

/// Sustained GFLOPS of an II = 1 pipeline.
pub fn gflops(flops_per_point: f64, freq_hz: f64) -> Result<f64> {
    if !(flops_per_point > 0.0 && freq_hz > 0.0) {
        return Err(Error::InvalidParameter(
            "flops per point and frequency must be positive".into(),
        ));
    }
    Ok(flops_per_point * freq_hz / 1e9)
}

/// FLOPs per point backed out of the reported 24.6 and 61.8 GFLOPS totals
/// at 500 and 357 MHz. Derived from those totals, not measured.
pub fn derived_flops_per_point(dim: Dim) -> f64 {
    match dim {
        Dim::Two => 49.2,
        Dim::Three => 173.1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlopAudit {
    pub dim: Dim,
    pub counts: OpCounts,
    pub total: u64,
    /// For comparison only; see [`derived_flops_per_point`].
    pub derived_from_reported: f64,
}

/// Counts the floating-point operations this crate's kernel spends on one
/// fully resolved point (every axis has two distinct neighbors).
pub fn audit_flops(dim: Dim) -> FlopAudit {
    let record = audit_record(dim).map(Counted);
    let (_, counts) = Counted::measure(|| ftle_of_record(&record, Counted(1.0)));
    FlopAudit {
        dim,
        counts,
        total: counts.total(),
        derived_from_reported: derived_flops_per_point(dim),
    }
}

/// A generic nondegenerate record whose tensor has nonzero off-diagonal terms.
fn audit_record(dim: Dim) -> PointRecord {
    let d = dim.get();
    let mut rec = PointRecord {
        dim,
        coord_minus: [0.0; 3],
        coord_plus: [0.0; 3],
        fm_minus: [[0.0; 3]; 3],
        fm_plus: [[0.0; 3]; 3],
    };
    for a in 0..d {
        rec.coord_minus[a] = -0.5 - 0.1 * a as f64;
        rec.coord_plus[a] = 0.5 + 0.2 * a as f64;
        for i in 0..d {
            rec.fm_minus[a][i] = 0.3 * (a + 2 * i) as f64 - 0.7;
            rec.fm_plus[a][i] = 1.1 * (i + 1) as f64 + 0.45 * (a * a) as f64 + if a == i { 1.0 } else { 0.0 };
        }
    }
    rec
}
