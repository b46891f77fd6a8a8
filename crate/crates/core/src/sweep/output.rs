use std::fmt::Write as _;
use std::path::Path;

use super::run::SweepRecord;
use crate::error::{Error, Result};

/// Plot annotations (K).
pub const MARKER_ORDERING: f64 = 58.9;
pub const MARKER_DISORDERING: f64 = 73.4;
pub const MARKER_GLASS: f64 = 105.0;

const PAIR_COLUMNS: [&str; 6] =
    ["concurrence", "eof_bits", "discord_bits", "geo_discord", "mutual_info_bits", "classical_J_bits"];

/// `x` with 12 significant digits, trailing zeros dropped, in the style of
/// C's `%.12g`.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_header(record: &SweepRecord) -> String {
    let mut cols: Vec<String> = ["T_K", "P_BF", "S_bits", "C_l1", "C_rel_bits"].map(String::from).to_vec();
    for p in &record.pairs {
        for name in PAIR_COLUMNS {
            cols.push(format!("{name}_s{}_{}", p.sites.0, p.sites.1));
        }
    }
    cols.join(",")
}

/// The CSV text for a sweep. Every record must carry the same pairs.
pub fn csv_string(records: &[SweepRecord]) -> Result<String> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    let mut out = csv_header(first);
    out.push('\n');
    for r in records {
        if r.pairs.iter().map(|p| p.sites).ne(first.pairs.iter().map(|p| p.sites)) {
            return Err(Error::InvalidConfig("records disagree on the site pairs".into()));
        }
        let mut fields = vec![r.temperature, r.p_bf, r.entropy_bits, r.c_l1, r.c_rel_bits];
        for p in &r.pairs {
            fields.extend([
                p.concurrence,
                p.eof_bits,
                p.discord_bits,
                p.geo_discord,
                p.mutual_info_bits,
                p.classical_j_bits,
            ]);
        }
        let line: Vec<String> = fields.into_iter().map(format_g12).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Writes the sweep as CSV. Nothing is created for an empty sweep.
pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    let text = csv_string(records)?;
    write(path, &text)
}

/// Writes a matplotlib script that plots the CSV at `csv_path` (resolved
/// relative to the script's own directory when not absolute). The script
/// needs the CSV to exist when it runs.
pub fn emit_plot_script(csv_path: &Path, path: &Path) -> Result<()> {
    let mut s = String::new();
    let csv = csv_path.to_string_lossy().replace('\\', "\\\\").replace('"', "\\\"");
    let _ = writeln!(s, "#!/usr/bin/env python3");
    let _ = writeln!(s, "# Plots a hexice temperature sweep. Requires the CSV written by `hexice sweep`.");
    let _ = writeln!(s, "import csv");
    let _ = writeln!(s, "import os");
    let _ = writeln!(s, "import sys");
    let _ = writeln!(s);
    let _ = writeln!(s, "import matplotlib");
    let _ = writeln!(s, "matplotlib.use(\"Agg\")");
    let _ = writeln!(s, "import matplotlib.pyplot as plt");
    let _ = writeln!(s);
    let _ = writeln!(s, "HERE = os.path.dirname(os.path.abspath(__file__))");
    let _ = writeln!(s, "CSV = os.path.join(HERE, \"{csv}\")");
    let _ = writeln!(s, "MARKERS = [{MARKER_ORDERING}, {MARKER_DISORDERING}, {MARKER_GLASS}]");
    s.push_str(PLOT_BODY);
    write(path, &s)
}

const PLOT_BODY: &str = r#"

def load(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def pair_suffixes(columns):
    return [c[len("concurrence_"):] for c in columns if c.startswith("concurrence_")]


def mark(ax):
    for t in MARKERS:
        ax.axvline(t, color="grey", linestyle="--", linewidth=0.8)


def main():
    if not os.path.exists(CSV):
        sys.exit(f"missing {CSV}; run `hexice sweep` first")
    data = load(CSV)
    t = data["T_K"]
    pairs = pair_suffixes(data)
    fig, axes = plt.subplots(2, 2, figsize=(11, 8), sharex=True)

    ax = axes[0][0]
    ax.plot(t, data["P_BF"], label="P_BF")
    ax.plot(t, data["S_bits"], label="S (bits)")
    ax.set_title("ice-rule population and entropy")

    ax = axes[0][1]
    ax.plot(t, data["C_l1"], label="C_l1")
    ax.plot(t, data["C_rel_bits"], label="C_rel (bits)")
    ax.set_title("coherence")

    ax = axes[1][0]
    for p in pairs:
        ax.plot(t, data["mutual_info_bits_" + p], label="I " + p)
        ax.plot(t, data["classical_J_bits_" + p], label="J " + p)
    ax.set_title("classical pairwise correlations")

    ax = axes[1][1]
    for p in pairs:
        ax.plot(t, data["discord_bits_" + p], label="discord " + p)
        ax.plot(t, data["geo_discord_" + p], label="geometric discord " + p)
        ax.plot(t, data["eof_bits_" + p], label="EoF " + p)
        ax.plot(t, data["concurrence_" + p], label="concurrence " + p)
    ax.set_title("quantum pairwise correlations")

    for row in axes:
        for ax in row:
            mark(ax)
            ax.legend(fontsize=7)
    for ax in axes[1]:
        ax.set_xlabel("T (K)")
    fig.tight_layout()
    out = os.path.splitext(CSV)[0] + ".png"
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SiteIndex;
    use crate::sweep::run::PairRecord;

    fn record(t: f64, pairs: &[(i64, i64)]) -> SweepRecord {
        SweepRecord {
            temperature: t,
            p_bf: 0.5,
            entropy_bits: 1.0,
            c_l1: 0.25,
            c_rel_bits: 1e-7,
            pairs: pairs
                .iter()
                .map(|&(a, b)| PairRecord {
                    sites: (SiteIndex::new(a).unwrap(), SiteIndex::new(b).unwrap()),
                    concurrence: 0.0,
                    eof_bits: 0.0,
                    discord_bits: 0.1,
                    geo_discord: 0.2,
                    mutual_info_bits: 1.0 / 3.0,
                    classical_j_bits: 1.0,
                })
                .collect(),
        }
    }

    #[test]
    fn g12_format() {
        assert_eq!(format_g12(0.0), "0");
        assert_eq!(format_g12(2.0), "2");
        assert_eq!(format_g12(150.0), "150");
        assert_eq!(format_g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_g12(0.574961234567891), "0.574961234568");
        assert_eq!(format_g12(1e-7), "1e-07");
        assert_eq!(format_g12(-2.5e-12), "-2.5e-12");
        assert_eq!(format_g12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_g12(0.0001), "0.0001");
        assert_eq!(format_g12(999999999999.5), "1e+12");
    }

    #[test]
    fn column_count() {
        for n in 0..4 {
            let pairs: Vec<(i64, i64)> = (0..n).map(|k| (k + 1, k + 2)).collect();
            let text = csv_string(&[record(2.0, &pairs), record(3.0, &pairs)]).unwrap();
            let lines: Vec<&str> = text.lines().collect();
            assert_eq!(lines.len(), 3);
            for l in lines {
                assert_eq!(l.split(',').count(), 5 + 6 * n as usize);
            }
        }
    }

    #[test]
    fn header_names() {
        let text = csv_string(&[record(2.0, &[(1, 2)])]).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "T_K,P_BF,S_bits,C_l1,C_rel_bits,concurrence_s1_2,eof_bits_s1_2,discord_bits_s1_2,geo_discord_s1_2,mutual_info_bits_s1_2,classical_J_bits_s1_2"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn empty_records_create_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        assert!(matches!(emit_csv(&[], &path), Err(Error::EmptyRecords)));
        assert!(!path.exists());
    }

    #[test]
    fn plot_script_has_markers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plot.py");
        emit_plot_script(Path::new("sweep.csv"), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("MARKERS = [58.9, 73.4, 105]"));
        assert!(text.contains("\"sweep.csv\""));
        let again = dir.path().join("plot2.py");
        emit_plot_script(Path::new("sweep.csv"), &again).unwrap();
        assert_eq!(text, std::fs::read_to_string(&again).unwrap());
    }
}
