//! Text, CSV and JSON renderings of the reconstructed synthesis and
//! feasibility tables.

use ftle_core::mesh::Dim;
use ftle_core::perf::{
    feasibility_table, required_bandwidth, synthesis_reference, FeasibilityTable, SynthesisReference, CATALOG,
    KNOWN_ERRATA,
};
use serde::Serialize;

use crate::OutputFormat;

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Computed,
    /// Reported, not computed.
    Reported,
}

impl Source {
    fn marker(self) -> &'static str {
        match self {
            Source::Computed => "computed",
            Source::Reported => "reported, not computed",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Table1Row {
    pub name: &'static str,
    pub d2: String,
    pub d3: String,
    pub source: Source,
}

fn bandwidth_cell(r: &SynthesisReference, freq_hz: f64) -> String {
    let b = required_bandwidth(r.data_bits_per_cycle, r.index_bits_per_cycle, freq_hz)
        .expect("reference widths are positive")
        .rounded();
    format!("{:.1}+{:.1}", b.data_gbps, b.index_gbps)
}

pub fn table1_rows() -> Vec<Table1Row> {
    let (a, b) = (synthesis_reference(Dim::Two), synthesis_reference(Dim::Three));
    let reported = |name, f: &dyn Fn(&SynthesisReference) -> String| Table1Row {
        name,
        d2: f(a),
        d3: f(b),
        source: Source::Reported,
    };
    vec![
        reported("Max Freq (MHz)", &|r| format!("{}", r.max_freq_mhz)),
        reported("Latency / cycles", &|r| r.latency_cycles.to_string()),
        reported("Input bandwidth (bits/cycle)", &|r| {
            format!("{}+{}", r.data_bits_per_cycle, r.index_bits_per_cycle)
        }),
        Table1Row {
            name: "Input bandwidth for max freq (GB/s)",
            d2: bandwidth_cell(a, a.max_freq_mhz * 1e6),
            d3: bandwidth_cell(b, b.max_freq_mhz * 1e6),
            source: Source::Computed,
        },
        Table1Row {
            name: "Input bandwidth for 300 MHz (GB/s)",
            d2: bandwidth_cell(a, 300e6),
            d3: bandwidth_cell(b, 300e6),
            source: Source::Computed,
        },
        reported("LUT", &|r| r.lut.to_string()),
        reported("LUTRAM", &|r| r.lutram.to_string()),
        reported("FF", &|r| r.ff.to_string()),
        reported("DSP", &|r| r.dsp.to_string()),
        reported("BRAM", &|r| r.bram.to_string()),
        reported("Power consumption", &|r| format!("{} W", r.power_w)),
    ]
}

pub fn render_table1(format: OutputFormat) -> String {
    let rows = table1_rows();
    match format {
        OutputFormat::Json => {
            let body = serde_json::json!({
                "table": "synthesis",
                "note": "bandwidth rows are computed as bits x frequency / 8, GB = 1e9 bytes; other rows are reported synthesis results, not computed",
                "rows": rows,
            });
            serde_json::to_string_pretty(&body).expect("serializable") + "\n"
        }
        OutputFormat::Csv => {
            let mut out = String::from("row,2D,3D,source\n");
            for r in &rows {
                out.push_str(&format!("{},{},{},{}\n", r.name, r.d2, r.d3, r.source.marker()));
            }
            out
        }
        OutputFormat::Text => {
            let mut out = format!("{:<38}{:>12}{:>12}   {}\n", "", "2D", "3D", "source");
            for r in &rows {
                out.push_str(&format!(
                    "{:<38}{:>12}{:>12}   {}\n",
                    r.name,
                    r.d2,
                    r.d3,
                    r.source.marker()
                ));
            }
            out
        }
    }
}

pub fn table2() -> FeasibilityTable {
    feasibility_table(&CATALOG, &ftle_core::perf::scenarios()).expect("scenarios have positive bandwidth")
}

fn erratum_note(t: &FeasibilityTable) -> Vec<String> {
    let mut notes = Vec::new();
    for row in &t.rows {
        for (s, c) in t.scenarios.iter().zip(&row.cells) {
            if c.erratum {
                let printed = KNOWN_ERRATA
                    .iter()
                    .find(|e| e.0 == row.tech.name && e.1 == s.label)
                    .map_or(0, |e| e.2);
                notes.push(format!(
                    "{} / {}: published value {}% does not follow from {} / {}; arithmetic gives {}%",
                    row.tech.label, s.label, printed, row.tech.peak_gbps, s.desired_gbps, c.percent
                ));
            }
        }
    }
    notes
}

pub fn render_table2(format: OutputFormat) -> String {
    let t = table2();
    let notes = erratum_note(&t);
    match format {
        OutputFormat::Json => {
            let body = serde_json::json!({
                "table": "feasibility",
                "unit": "percent of desired bandwidth, rounded to nearest; absolute bandwidth in GB/s (1e9 bytes)",
                "scenarios": t.scenarios,
                "rows": t.rows,
                "errata": notes,
            });
            serde_json::to_string_pretty(&body).expect("serializable") + "\n"
        }
        OutputFormat::Csv => {
            let mut out = String::from("technology,absolute_gbps");
            for s in &t.scenarios {
                out.push_str(&format!(",{}", s.label));
            }
            out.push_str(",flags\n");
            out.push_str("Desired bandwidth,");
            for s in &t.scenarios {
                out.push_str(&format!(",{}", s.desired_gbps));
            }
            out.push_str(",\n");
            for row in &t.rows {
                out.push_str(&format!("{},{}", row.tech.label, row.tech.peak_gbps));
                let mut flags = Vec::new();
                for (s, c) in t.scenarios.iter().zip(&row.cells) {
                    out.push_str(&format!(",{}", c.percent));
                    if c.erratum {
                        flags.push(format!("erratum:{}", s.label));
                    }
                }
                out.push_str(&format!(",{}\n", flags.join(";")));
            }
            out
        }
        OutputFormat::Text => {
            let mut out = format!("{:<22}{:>13}", "", "Absolute BW");
            for s in &t.scenarios {
                out.push_str(&format!("{:>14}", s.label));
            }
            out.push('\n');
            out.push_str(&format!("{:<22}{:>13}", "Desired bandwidth", ""));
            for s in &t.scenarios {
                out.push_str(&format!("{:>14}", format!("{} (100%)", s.desired_gbps)));
            }
            out.push('\n');
            for row in &t.rows {
                out.push_str(&format!("{:<22}{:>13}", row.tech.label, row.tech.peak_gbps));
                for c in &row.cells {
                    let mark = if c.erratum { "*" } else { "" };
                    out.push_str(&format!("{:>14}", format!("{}%{mark}", c.percent)));
                }
                out.push('\n');
            }
            for n in &notes {
                out.push_str(&format!("* {n}\n"));
            }
            out
        }
    }
}
